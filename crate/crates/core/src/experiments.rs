//! Table-producing experiments: chain-graph diameters and slope maps.
//!
//! Rows are computed in parallel and emitted in a fixed order. The
//! `SYMDYN_WORKERS` environment variable caps the worker count.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::grid2d::Rect;
use crate::layers::{build_point_window, slope_window_estimate, Sequence, SequencePair};
use crate::shift1d::{chain_graph_on, default_radius, Presentation, Sft1D};
use crate::slope::{fmt_rational, Rational, Slope};
use crate::spacer1d::{image_type, spacer_image};
use crate::words::{self, Word};

/// Runs `f` on a pool sized by `SYMDYN_WORKERS` when it is set.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let n = std::env::var("SYMDYN_WORKERS").ok().and_then(|s| s.parse::<usize>().ok());
    match n {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Binary words over `{a, b}` (for `0`, `1`) of length at most `max_len`
/// that are not balanced but all of whose proper factors are.
pub fn minimal_unbalanced_words(max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        for bits in 0u64..1 << len {
            let w: Vec<u8> = (0..len).map(|k| b'0' + ((bits >> (len - 1 - k)) & 1) as u8).collect();
            let bal = |s: &[u8]| words::is_k_balanced(&Word::new(s), 1).expect("binary");
            if !bal(&w) && bal(&w[1..]) && bal(&w[..len - 1]) {
                out.push(Word::new(w.iter().map(|&c| if c == b'0' { b'a' } else { b'b' }).collect::<Vec<_>>()));
            }
        }
    }
    out
}

/// Sequences over `{a, b}` all of whose windows of length `window` are
/// balanced.
pub fn balanced_window_sft(window: usize) -> Result<Sft1D> {
    Sft1D::new(b"ab", minimal_unbalanced_words(window))
}

#[derive(Clone, Debug)]
pub enum ChainInstance {
    Sft(Sft1D),
    /// Spacer image of [`balanced_window_sft`] for this window length.
    SpacerBalanced { window: usize },
}

impl ChainInstance {
    fn presentation(&self) -> Result<(Presentation, usize)> {
        match self {
            ChainInstance::Sft(x) => Ok((x.transfer_graph(), x.type_t())),
            ChainInstance::SpacerBalanced { window } => {
                let base = balanced_window_sft(*window)?;
                Ok((spacer_image(&base.transfer_graph())?, image_type(base.type_t())))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainDiameterSpec {
    pub instance: ChainInstance,
    pub n_max: usize,
    /// Annulus radius for every `n`; `n + 2t + 4` when absent.
    pub radius: Option<usize>,
    /// Lengths whose language exceeds this many words are not searched.
    pub max_words: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub n: usize,
    pub words: usize,
    pub components: usize,
    pub diameter: Option<usize>,
    pub radius: usize,
    /// The language was too large to search.
    pub truncated: bool,
}

pub fn experiment_chain_diameter(spec: &ChainDiameterSpec) -> Result<Vec<ChainRow>> {
    let (g, t) = spec.instance.presentation()?;
    if g.is_empty() {
        bail!(Domain, "the subshift is empty");
    }
    let mut rows = Vec::new();
    for n in 1..=spec.n_max {
        let radius = spec.radius.unwrap_or_else(|| default_radius(n, t));
        let words = g.language(n).len();
        if words > spec.max_words {
            rows.push(ChainRow { n, words, components: 0, diameter: None, radius, truncated: true });
            break;
        }
        let cg = with_workers(|| chain_graph_on(&g, t, n, radius))?;
        rows.push(ChainRow {
            n,
            words,
            components: cg.components.len(),
            diameter: cg.diameter(),
            radius,
            truncated: false,
        });
    }
    Ok(rows)
}

pub fn chain_rows_csv(rows: &[ChainRow]) -> String {
    let mut s = String::from("n,words,components,diameter,radius,truncated\n");
    for r in rows {
        let d = r.diameter.map_or(String::new(), |d| d.to_string());
        let _ = writeln!(s, "{},{},{},{},{},{}", r.n, r.words, r.components, d, r.radius, r.truncated);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeRow {
    pub slope: Rational,
    pub length: usize,
    pub lo: Rational,
    pub hi: Rational,
}

impl SlopeRow {
    pub fn contains_slope(&self) -> bool {
        self.lo <= self.slope && self.slope <= self.hi
    }

    pub fn width(&self) -> Rational {
        self.hi - self.lo
    }
}

/// Slope intervals of one-row windows of the lower characteristic
/// sequence for every slope and length. Fails if an interval misses its
/// slope or widens as the length grows.
pub fn experiment_slope_map(slopes: &[Rational], lengths: &[usize]) -> Result<Vec<SlopeRow>> {
    let cells: Vec<(Rational, usize)> =
        slopes.iter().flat_map(|&a| lengths.iter().map(move |&l| (a, l))).collect();
    let rows: Vec<SlopeRow> = with_workers(|| {
        cells
            .par_iter()
            .map(|&(a, len)| -> Result<SlopeRow> {
                if len == 0 {
                    bail!(Input, "window length must be positive");
                }
                let s = Slope::try_from(crate::slope::Quadratic::from_rational(a))?;
                let pair = SequencePair::new(Sequence::lower(s), Sequence::lower(s));
                let rect = Rect::new(0, 0, len as i64, 1);
                let w = build_point_window(&pair, rect, &Default::default(), 2)?.pattern;
                let iv = slope_window_estimate(&w)?;
                Ok(SlopeRow { slope: a, length: len, lo: iv.lo, hi: iv.hi })
            })
            .collect::<Result<_>>()
    })?;
    for r in &rows {
        if !r.contains_slope() {
            bail!(Consistency, "slope {} escapes its interval at length {}", fmt_rational(&r.slope), r.length);
        }
    }
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.slope == b.slope && b.length >= a.length && b.width() > a.width() {
            bail!(Consistency, "interval for {} widens at length {}", fmt_rational(&a.slope), b.length);
        }
    }
    Ok(rows)
}

pub fn slope_rows_csv(rows: &[SlopeRow]) -> String {
    let mut s = String::from("slope,length,lo,hi,width\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_rational(&r.slope),
            r.length,
            fmt_rational(&r.lo),
            fmt_rational(&r.hi),
            fmt_rational(&r.width())
        );
    }
    s
}
