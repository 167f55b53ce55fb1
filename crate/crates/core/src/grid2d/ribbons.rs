//! The ribbon shifts: rules, flat points, tracing and crossings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::levels::Levels;
use super::{Pattern2D, Rect, Sft2D};
use crate::error::{bail, Result};

pub const ZERO: u8 = b'0';
pub const H: u8 = b'H';
pub const V: u8 = b'V';

fn pat(cells: &[((i64, i64), bool)], on: u8) -> Pattern2D {
    Pattern2D::from_cells(cells.iter().map(|&(k, b)| (k, if b { on } else { ZERO })))
}

/// Forbidden list for horizontal ribbons drawn with `on`. With `vertical`
/// the roles of the axes are exchanged.
fn ribbon_rules(on: u8, vertical: bool) -> Vec<Pattern2D> {
    // (a, b) = (along, across): for horizontal ribbons a = x, b = y
    let s = |a: i64, b: i64| if vertical { (b, a) } else { (a, b) };
    let mut out = Vec::new();
    // columns: no gap of length 1, none of length 5 or more, no triple
    out.push(pat(&[(s(0, 0), true), (s(0, 1), false), (s(0, 2), true)], on));
    out.push(pat(&(0..5).map(|b| (s(0, b), false)).collect::<Vec<_>>(), on));
    out.push(pat(&(0..3).map(|b| (s(0, b), true)).collect::<Vec<_>>(), on));
    // exactly two cardinal neighbours
    let arms = [s(0, 1), s(2, 1), s(1, 0), s(1, 2)];
    for mask in 0u32..16 {
        if mask.count_ones() != 2 {
            let mut cells = vec![(s(1, 1), true)];
            cells.extend(arms.iter().enumerate().map(|(k, &c)| (c, mask >> k & 1 == 1)));
            out.push(pat(&cells, on));
        }
    }
    // diagonal neighbours share exactly one neighbour
    for common in [false, true] {
        out.push(pat(
            &[(s(0, 0), true), (s(1, 1), true), (s(1, 0), common), (s(0, 1), common)],
            on,
        ));
        out.push(pat(
            &[(s(0, 1), true), (s(1, 0), true), (s(0, 0), common), (s(1, 1), common)],
            on,
        ));
    }
    // a diagonal triple needs both along-neighbours of its centre
    for side in [0, 2] {
        out.push(pat(
            &[(s(0, 0), true), (s(1, 1), true), (s(2, 2), true), (s(side, 1), false)],
            on,
        ));
        out.push(pat(
            &[(s(0, 2), true), (s(1, 1), true), (s(2, 0), true), (s(side, 1), false)],
            on,
        ));
    }
    out
}

/// `X_H` over `{0, H}`.
pub fn xh_rules() -> Sft2D {
    Sft2D::new(&[ZERO, H], ribbon_rules(H, false)).expect("valid rules")
}

/// `X_V` over `{0, V}`.
pub fn xv_rules() -> Sft2D {
    Sft2D::new(&[ZERO, V], ribbon_rules(V, true)).expect("valid rules")
}

/// The flat point `x₀` of `X_H` on `r`: ribbons on the rows `y ≡ 0 mod 4`.
pub fn flat_xh(r: Rect) -> Pattern2D {
    Pattern2D::filled(r, |_, y| if y.rem_euclid(4) == 0 { H } else { ZERO })
}

/// The flat point `y₀` of `X_V` on `r`.
pub fn flat_xv(r: Rect) -> Pattern2D {
    Pattern2D::filled(r, |x, _| if x.rem_euclid(4) == 0 { V } else { ZERO })
}

/// A ribbon crossing the whole window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ribbon {
    pub index: i64,
    pub levels: Levels,
}

impl Ribbon {
    pub fn steps(&self) -> Vec<i64> {
        self.levels.steps()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonDecomposition {
    pub window: Rect,
    /// Ribbons crossing from the left edge to the right edge, bottom to top.
    pub ribbons: Vec<Ribbon>,
    /// Pieces of ribbons cut by the top or bottom edge.
    pub fragments: Vec<Vec<(i64, i64)>>,
    /// `gaps[k][c]`: zeros between ribbon `k` and ribbon `k + 1` in the
    /// `c`-th column of the window.
    pub gaps: Vec<Vec<i64>>,
}

impl RibbonDecomposition {
    pub fn by_index(&self, index: i64) -> Option<&Ribbon> {
        self.ribbons.iter().find(|r| r.index == index)
    }
}

fn components(cells: &BTreeSet<(i64, i64)>) -> Vec<Vec<(i64, i64)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in cells {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some((x, y)) = queue.pop_front() {
            for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                if cells.contains(&n) && seen.insert(n) {
                    comp.push(n);
                    queue.push_back(n);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Levels of a crossing component, by walking it as a path from its end
/// in the leftmost column.
fn walk(comp: &[(i64, i64)], r: &Rect) -> Result<Levels> {
    let set: BTreeSet<(i64, i64)> = comp.iter().copied().collect();
    let nbrs = |(x, y): (i64, i64)| {
        [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
            .into_iter()
            .filter(|n| set.contains(n))
            .collect::<Vec<_>>()
    };
    let Some(&start) = comp.iter().find(|&&(x, y)| x == r.x0 && nbrs((x, y)).len() <= 1) else {
        bail!(Legality, "ribbon through {:?} has no end on the left edge", comp[0]);
    };
    let mut path = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next: Vec<_> = nbrs(cur).into_iter().filter(|&n| Some(n) != prev).collect();
        match next.as_slice() {
            [] => break,
            [n] => {
                prev = Some(cur);
                cur = *n;
                path.push(cur);
            }
            _ => bail!(Legality, "ribbon branches at {cur:?}"),
        }
        if path.len() > comp.len() {
            bail!(Legality, "ribbon through {start:?} closes up");
        }
    }
    if path.len() != comp.len() || cur.0 != r.x1 {
        bail!(Legality, "component through {start:?} is not a single crossing path");
    }
    let mut h = vec![start.1];
    for w in path.windows(2) {
        match w[1].0 - w[0].0 {
            1 => h.push(w[0].1),
            0 => {}
            _ => bail!(Legality, "ribbon turns back at {:?}", w[0]),
        }
    }
    h.push(cur.1);
    let levels = Levels::new(r.x0 - 1, h);
    levels.check_shape()?;
    Ok(levels)
}

/// Decompose a legal `X_H` window into ribbons.
///
/// Ribbon 0 is the first crossing ribbon met going up column 0 from the
/// origin; when column 0 is outside the window the nearest column stands
/// in for it.
pub fn ribbon_trace(window: &Pattern2D) -> Result<RibbonDecomposition> {
    let Some(r) = window.bbox() else {
        return Ok(RibbonDecomposition {
            window: Rect::new(0, 0, 0, 0),
            ribbons: Vec::new(),
            fragments: Vec::new(),
            gaps: Vec::new(),
        });
    };
    if !window.is_rectangle() {
        bail!(Input, "ribbon tracing needs a rectangular window");
    }
    if !xh_rules().validate(window)? {
        bail!(Legality, "window is not locally admissible for X_H");
    }
    let cells: BTreeSet<(i64, i64)> =
        window.cells().filter(|&(_, c)| c == H).map(|(k, _)| k).collect();
    let mut crossing = Vec::new();
    let mut fragments = Vec::new();
    for comp in components(&cells) {
        let touches = |x: i64| comp.iter().any(|&(cx, _)| cx == x);
        if touches(r.x0) && touches(r.x1) {
            crossing.push(walk(&comp, &r)?);
        } else {
            fragments.push(comp);
        }
    }
    let xr = 0i64.clamp(r.x0, r.x1);
    crossing.sort_by_key(|l| l.column(xr).0);
    let zero = crossing.iter().position(|l| l.column(xr).1 >= 0).unwrap_or(crossing.len()) as i64;
    let mut gaps = Vec::new();
    for w in crossing.windows(2) {
        let g: Vec<i64> = (r.x0..=r.x1).map(|x| w[1].gap_above(&w[0], x)).collect();
        if let Some(bad) = g.iter().find(|g| !(2..=4).contains(*g)) {
            bail!(Legality, "ribbons {:?} and {:?} are {bad} apart", w[0].column(r.x0), w[1].column(r.x0));
        }
        gaps.push(g);
    }
    let ribbons = crossing
        .into_iter()
        .enumerate()
        .map(|(k, levels)| Ribbon { index: k as i64 - zero, levels })
        .collect();
    Ok(RibbonDecomposition { window: r, ribbons, fragments, gaps })
}

/// Ribbon cells by index, in window coordinates.
fn ribbon_cells(d: &RibbonDecomposition, swap: bool) -> BTreeMap<i64, BTreeSet<(i64, i64)>> {
    d.ribbons
        .iter()
        .map(|rb| {
            let cells = rb.levels.cells().map(|(x, y)| if swap { (y, x) } else { (x, y) }).collect();
            (rb.index, cells)
        })
        .collect()
}

/// For each horizontal ribbon `i` and vertical ribbon `j` whose crossing
/// lies inside the common part of the windows and off its border, the
/// sites they share.
pub fn crossing_sites(xh: &Pattern2D, xv: &Pattern2D) -> Result<BTreeMap<(i64, i64), BTreeSet<(i64, i64)>>> {
    let mut out = BTreeMap::new();
    let (Some(a), Some(b)) = (xh.bbox(), xv.bbox()) else {
        return Ok(out);
    };
    let overlap = a.intersect(&b);
    if overlap.is_empty() {
        return Ok(out);
    }
    let hs = ribbon_cells(&ribbon_trace(xh)?, false);
    let turned = xv.transpose().map_letters(|c| if c == V { H } else { c });
    if turned.letters().iter().any(|&c| c != H && c != ZERO) {
        bail!(Alphabet, "vertical window must be over {{0, V}}");
    }
    let vs = ribbon_cells(&ribbon_trace(&turned)?, true);
    for (&i, hc) in &hs {
        for (&j, vc) in &vs {
            let meet: BTreeSet<(i64, i64)> =
                hc.intersection(vc).filter(|&&(x, y)| overlap.contains(x, y)).copied().collect();
            if meet.is_empty() || meet.iter().any(|&(x, y)| overlap.in_frame(x, y, 1)) {
                continue;
            }
            let spread = |f: fn(&(i64, i64)) -> i64| {
                meet.iter().map(f).max().unwrap() - meet.iter().map(f).min().unwrap()
            };
            if meet.len() > 3 || spread(|p| p.0) > 1 || spread(|p| p.1) > 1 {
                bail!(Consistency, "ribbons {i} and {j} meet in {} scattered sites", meet.len());
            }
            out.insert((i, j), meet);
        }
    }
    Ok(out)
}

/// The least site (compared by `x`, then `y`) of each crossing found by
/// [`crossing_sites`].
pub fn crossing_map(xh: &Pattern2D, xv: &Pattern2D) -> Result<BTreeMap<(i64, i64), (i64, i64)>> {
    Ok(crossing_sites(xh, xv)?
        .into_iter()
        .map(|(k, s)| (k, *s.first().expect("crossings are nonempty")))
        .collect())
}
