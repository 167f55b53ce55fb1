//! The three-layer plane shift built from pairs of jointly balanced
//! sequences.
//!
//! A letter is `b'0' + bits` with bit 0 the first layer, bit 1 the
//! second and bit 2 the third. The first layer is constant along
//! columns, the second along the diagonals `(i, j) → (i + 1, j + 1)`, and
//! the third keeps a running difference:
//! `third(i, j) = third(i − 1, j) + second(i, j) − first(i, j)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{bail, Error, Result};
use crate::grid2d::{Pattern2D, Rect, Sft2D};
use crate::slope::{Quadratic, Rational, Slope, SlopeInterval};
use crate::words::{self, Word};

pub const FIRST: u8 = 0;
pub const SECOND: u8 = 1;
pub const THIRD: u8 = 2;

/// Letters reachable by a point of one of these windows.
pub const LETTERS: [u8; 8] = *b"01234567";

pub fn letter(first: u8, second: u8, third: u8) -> u8 {
    b'0' + (first & 1) + ((second & 1) << 1) + ((third & 1) << 2)
}

fn bit(c: u8, layer: u8) -> u8 {
    ((c - b'0') >> layer) & 1
}

/// Forbidden 2-cell patterns: vertical pairs whose first layers differ,
/// diagonal pairs whose second layers differ and horizontal pairs that
/// break the running-difference rule.
pub fn x_rules() -> Sft2D {
    let mut forbidden = Vec::new();
    for c in LETTERS {
        for d in LETTERS {
            if bit(c, FIRST) != bit(d, FIRST) {
                forbidden.push(Pattern2D::from_cells([((0, 0), c), ((0, 1), d)]));
            }
        }
    }
    for c in LETTERS {
        for d in LETTERS {
            if bit(c, SECOND) != bit(d, SECOND) {
                forbidden.push(Pattern2D::from_cells([((0, 0), c), ((1, 1), d)]));
            }
        }
    }
    for c in LETTERS {
        for d in LETTERS {
            let want = bit(c, THIRD) as i8 + bit(d, SECOND) as i8 - bit(d, FIRST) as i8;
            if bit(d, THIRD) as i8 != want {
                forbidden.push(Pattern2D::from_cells([((0, 0), c), ((1, 0), d)]));
            }
        }
    }
    Sft2D::new(&LETTERS, forbidden).expect("layer rules are well formed")
}

/// A window over the eight layered letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredPattern(Pattern2D);

impl LayeredPattern {
    pub fn new(p: Pattern2D) -> Result<Self> {
        if let Some(c) = p.letters().into_iter().find(|c| !LETTERS.contains(c)) {
            bail!(Alphabet, "'{}' is not a layered letter", c as char);
        }
        Ok(LayeredPattern(p))
    }

    /// Stacks three binary patterns over one shape.
    pub fn from_layers(first: &Pattern2D, second: &Pattern2D, third: &Pattern2D) -> Result<Self> {
        if first.shape() != second.shape() || first.shape() != third.shape() {
            bail!(Input, "layers have different shapes");
        }
        let mut p = Pattern2D::new();
        for ((x, y), f) in first.cells() {
            let s = second.get(x, y).unwrap();
            let t = third.get(x, y).unwrap();
            for c in [f, s, t] {
                if c != b'0' && c != b'1' {
                    bail!(Alphabet, "layer letter '{}' is not binary", c as char);
                }
            }
            p.set(x, y, letter(f - b'0', s - b'0', t - b'0'));
        }
        Ok(LayeredPattern(p))
    }

    pub fn pattern(&self) -> &Pattern2D {
        &self.0
    }

    pub fn into_pattern(self) -> Pattern2D {
        self.0
    }

    /// One layer as a `0`/`1` pattern.
    pub fn layer(&self, layer: u8) -> Pattern2D {
        self.0.map_letters(|c| b'0' + bit(c, layer))
    }

    pub fn bit(&self, x: i64, y: i64, layer: u8) -> Option<u8> {
        self.0.get(x, y).map(|c| bit(c, layer))
    }

    pub fn rows(&self) -> BTreeSet<i64> {
        self.0.cells().map(|((_, y), _)| y).collect()
    }

    /// Maximal horizontal runs of the shape as `(row, first x, last x)`.
    pub fn row_segments(&self) -> Vec<(i64, i64, i64)> {
        let mut out = Vec::new();
        let mut run: Option<(i64, i64, i64)> = None;
        let mut cells: Vec<(i64, i64)> = self.0.shape().into_iter().map(|(x, y)| (y, x)).collect();
        cells.sort_unstable();
        for (y, x) in cells {
            run = match run {
                Some((ry, a, b)) if ry == y && b + 1 == x => Some((ry, a, x)),
                Some(r) => {
                    out.push(r);
                    Some((y, x, x))
                }
                None => Some((y, x, x)),
            };
        }
        out.extend(run);
        out
    }

    /// Header `@ xmin ymax`, then the first, second and third layers as
    /// grids separated by blank lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, layer) in [FIRST, SECOND, THIRD].into_iter().enumerate() {
            let text = self.layer(layer).to_text();
            let body = text.split_once('\n').map_or("", |(_, rest)| rest);
            if k == 0 {
                s.push_str(text.lines().next().unwrap_or("@ 0 0"));
                s.push('\n');
            } else {
                s.push('\n');
            }
            s.push_str(body);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim_end);
        let head = lines
            .by_ref()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| Error::Parse("empty layered pattern".into()))?;
        if !head.trim_start().starts_with('@') {
            bail!(Parse, "layered pattern needs an '@ xmin ymax' header");
        }
        let mut blocks: Vec<Vec<&str>> = vec![Vec::new()];
        for l in lines {
            if l.trim().is_empty() {
                if !blocks.last().unwrap().is_empty() {
                    blocks.push(Vec::new());
                }
            } else {
                blocks.last_mut().unwrap().push(l);
            }
        }
        blocks.retain(|b| !b.is_empty());
        if blocks.len() != 3 {
            bail!(Parse, "expected three layer grids, found {}", blocks.len());
        }
        let layers: Vec<Pattern2D> = blocks
            .iter()
            .map(|b| Pattern2D::parse(&format!("{head}\n{}", b.join("\n"))))
            .collect::<Result<_>>()?;
        Self::from_layers(&layers[0], &layers[1], &layers[2])
    }
}

impl fmt::Display for LayeredPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Default reach of window comparisons for irrational sequences.
const IRRATIONAL_HORIZON: i64 = 512;

/// A bi-infinite binary sequence with an exact finite description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequence {
    /// `…left·left · center · right·right…`; `center` keeps its offset,
    /// so `left` ends at `center.offset() − 1`.
    Eventually { left: Vec<u8>, center: Word, right: Vec<u8> },
    /// `n ↦ ⌊(n+1)α + ρ⌋ − ⌊nα + ρ⌋`, or ceilings when `upper`.
    Characteristic { slope: Slope, intercept: Quadratic, upper: bool },
}

fn check_binary(w: &[u8], what: &str) -> Result<()> {
    if let Some(c) = w.iter().find(|&&c| c != b'0' && c != b'1') {
        bail!(Alphabet, "{what} letter '{}' is not binary", *c as char);
    }
    Ok(())
}

impl Sequence {
    pub fn eventually(left: &[u8], center: Word, right: &[u8]) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            bail!(Input, "tail periods must be nonempty");
        }
        check_binary(left, "left period")?;
        check_binary(center.letters(), "center")?;
        check_binary(right, "right period")?;
        Ok(Sequence::Eventually { left: left.to_vec(), center, right: right.to_vec() })
    }

    /// `period` repeated in both directions with `period[0]` at index 0.
    pub fn periodic(period: &str) -> Result<Self> {
        Self::eventually(period.as_bytes(), Word::empty(), period.as_bytes())
    }

    pub fn characteristic(slope: Slope, intercept: Quadratic, upper: bool) -> Result<Self> {
        // probe once so that mismatched square roots fail here
        words::char_letter(&slope.value(), &intercept, 0, upper)?;
        Ok(Sequence::Characteristic { slope, intercept, upper })
    }

    pub fn lower(slope: Slope) -> Self {
        Sequence::Characteristic { slope, intercept: Quadratic::integer(0), upper: false }
    }

    pub fn upper(slope: Slope) -> Self {
        Sequence::Characteristic { slope, intercept: Quadratic::integer(0), upper: true }
    }

    pub fn at(&self, n: i64) -> u8 {
        match self {
            Sequence::Eventually { left, center, right } => {
                if n < center.offset() {
                    let k = (n - center.offset()).rem_euclid(left.len() as i64);
                    left[k as usize]
                } else if n > center.end() {
                    right[((n - center.end() - 1) % right.len() as i64) as usize]
                } else {
                    center.get(n).unwrap()
                }
            }
            Sequence::Characteristic { slope, intercept, upper } => {
                words::char_letter(&slope.value(), intercept, n, *upper)
                    .expect("radicands checked on construction")
            }
        }
    }

    /// Letters `lo..=hi`, offset at `lo`.
    pub fn window(&self, lo: i64, hi: i64) -> Word {
        Word::at(lo, (lo..=hi).map(|n| self.at(n)).collect::<Vec<_>>())
    }

    /// Density of ones; the right tail decides for eventually periodic
    /// sequences.
    pub fn slope(&self) -> Slope {
        match self {
            Sequence::Eventually { right, .. } => {
                let ones = right.iter().filter(|&&c| c == b'1').count() as i64;
                Slope::rational(ones, right.len() as i64).expect("density lies in [0,1]")
            }
            Sequence::Characteristic { slope, .. } => *slope,
        }
    }

    /// Indices beyond which the sequence is a tail of period `period`.
    fn horizon(&self) -> (i64, i64) {
        match self {
            Sequence::Eventually { left, center, right } => (
                center.offset().abs().max((center.end() + 1).abs()),
                (left.len() as i64).lcm(&(right.len() as i64)),
            ),
            Sequence::Characteristic { slope, .. } => match slope.as_rational() {
                Some(r) => (0, *r.denom()),
                None => (IRRATIONAL_HORIZON, 1),
            },
        }
    }

    pub fn is_periodic(&self) -> bool {
        match self {
            Sequence::Eventually { left, center, right } => {
                let (l, r) = (left.len() as i64, right.len() as i64);
                let lo = center.offset() - l * r - r;
                (lo..=center.end() + 1 + r).all(|n| self.at(n) == self.at(n + r))
            }
            Sequence::Characteristic { slope, .. } => slope.is_rational(),
        }
    }

    /// True when `self(i) = other(i − k)` for every `i`. Exact for
    /// eventually periodic and rational sequences; irrational ones are
    /// compared on a long window.
    pub fn equals_shifted(&self, other: &Sequence, k: i64) -> bool {
        let (ra, pa) = self.horizon();
        let (rb, pb) = other.horizon();
        let reach = ra + rb + k.abs() + pa.lcm(&pb).min(4096) + 1;
        (-reach..=reach).all(|i| self.at(i) == other.at(i - k))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Eventually { left, center, right } => {
                let s = |w: &[u8]| String::from_utf8_lossy(w).into_owned();
                write!(f, "{}|{}", s(left), s(center.letters()))?;
                if center.offset() != 0 {
                    write!(f, "@{}", center.offset())?;
                }
                write!(f, "|{}", s(right))
            }
            Sequence::Characteristic { slope, intercept, upper } => {
                write!(f, "{}:{slope}", if *upper { "upper" } else { "lower" })?;
                if intercept.signum() != 0 {
                    write!(f, "+{intercept}")?;
                }
                Ok(())
            }
        }
    }
}

/// `left|center|right` with an optional `@offset` after the center,
/// a bare period word, or `lower:α`, `upper:α`, `lower:α+ρ`.
impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for (prefix, upper) in [("lower:", false), ("upper:", true)] {
            if let Some(rest) = s.strip_prefix(prefix) {
                // the intercept follows the last '+' outside parentheses
                let mut depth = 0;
                let mut split = None;
                for (i, ch) in rest.char_indices() {
                    match ch {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        '+' if depth == 0 && i > 0 => split = Some(i),
                        _ => {}
                    }
                }
                let (a, rho) = match split {
                    Some(i) => (&rest[..i], rest[i + 1..].parse::<Quadratic>()?),
                    None => (rest, Quadratic::integer(0)),
                };
                return Sequence::characteristic(a.parse()?, rho, upper);
            }
        }
        let parts: Vec<&str> = s.split('|').collect();
        match parts.as_slice() {
            [p] if !p.is_empty() => Sequence::periodic(p),
            [l, c, r] => {
                let (c, off) = match c.split_once('@') {
                    Some((c, o)) => (
                        c,
                        o.parse::<i64>().map_err(|_| Error::Parse(format!("bad offset '{o}'")))?,
                    ),
                    None => (*c, 0),
                };
                Sequence::eventually(l.as_bytes(), Word::at(off, c.as_bytes()), r.as_bytes())
            }
            _ => bail!(Parse, "cannot read sequence '{s}'"),
        }
    }
}

/// `a` feeds the first layer (`first(i, j) = a(i)`), `b` the second
/// (`second(i, j) = b(i − j)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePair {
    pub a: Sequence,
    pub b: Sequence,
}

impl SequencePair {
    pub fn new(a: Sequence, b: Sequence) -> Self {
        SequencePair { a, b }
    }

    /// Row `j` has equal first and second layers at every column.
    pub fn row_globally_free(&self, j: i64) -> bool {
        self.a.equals_shifted(&self.b, j)
    }
}

/// How far a free row's freedom reaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Freedom {
    /// `a = σ^{−j} b`: the whole bi-infinite row is unforced.
    Global,
    /// Layers agree on the evaluated extent only.
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltWindow {
    pub pattern: LayeredPattern,
    pub free: BTreeMap<i64, Freedom>,
    /// Columns on which the third layer was evaluated.
    pub extent: (i64, i64),
}

/// Evaluates the point determined by `pair` on `window`.
///
/// The third layer starts at 0 in column 0 of every row and accumulates
/// `second − first` away from it over the columns
/// `[min(x0, 0) − collar, max(x1, 0) + collar]`. A row that dips to −1
/// anywhere on that extent is raised by one. Rows whose first and second
/// layers agree on the whole extent take the value in `free_rows`, or 0.
pub fn build_point_window(
    pair: &SequencePair,
    window: Rect,
    free_rows: &BTreeMap<i64, u8>,
    collar: i64,
) -> Result<BuiltWindow> {
    if window.is_empty() {
        bail!(Input, "empty window");
    }
    if collar < 0 {
        bail!(Input, "negative collar {collar}");
    }
    let (lo, hi) = (window.x0.min(0) - collar, window.x1.max(0) + collar);
    let a = pair.a.window(lo, hi);
    let b = pair.b.window(lo - window.y1, hi - window.y0);
    if !words::is_jointly_balanced(&a, &b)? {
        bail!(Construction, "pair is not jointly balanced on columns [{lo},{hi}]");
    }
    for (&j, &v) in free_rows {
        if j < window.y0 || j > window.y1 {
            bail!(Input, "free row {j} lies outside the window");
        }
        if v > 1 {
            bail!(Input, "free row {j} value {v} is not 0 or 1");
        }
    }

    let mut p = Pattern2D::new();
    let mut free = BTreeMap::new();
    for j in window.y0..=window.y1 {
        let diff = |i: i64| b.get(i - j).unwrap() as i64 - a.get(i).unwrap() as i64;
        let mut third = BTreeMap::new();
        third.insert(0, 0i64);
        let mut acc = 0;
        for i in 1..=hi {
            acc += diff(i);
            third.insert(i, acc);
        }
        acc = 0;
        for i in (lo..0).rev() {
            acc -= diff(i + 1);
            third.insert(i, acc);
        }
        let has_neg = third.values().any(|&t| t == -1);
        let has_pos = third.values().any(|&t| t == 1);
        if let Some((&i, &t)) = third.iter().find(|(_, t)| t.abs() > 1) {
            bail!(Construction, "running difference {t} at ({i},{j})");
        }
        if has_neg && has_pos {
            bail!(Construction, "row {j} holds both 1 and -1 before correction");
        }
        let is_free = !has_neg && !has_pos && (lo..=hi).all(|i| diff(i) == 0);
        let lift = match (is_free, free_rows.get(&j)) {
            (true, v) => {
                let kind = if pair.row_globally_free(j) { Freedom::Global } else { Freedom::Local };
                free.insert(j, kind);
                v.copied().unwrap_or(0) as i64
            }
            (false, Some(_)) => bail!(Input, "row {j} is forced, it cannot take a free value"),
            (false, None) => has_neg as i64,
        };
        for i in window.x0..=window.x1 {
            let t = third[&i] + lift;
            p.set(i, j, letter(a.get(i).unwrap() - b'0', b.get(i - j).unwrap() - b'0', t as u8));
        }
    }
    let pattern = LayeredPattern(p);
    debug_assert!(x_rules().validate(pattern.pattern()).unwrap());
    Ok(BuiltWindow { pattern, free, extent: (lo, hi) })
}

/// Every row segment telescopes: the third layer rises between the cell
/// left of the segment and its last cell by the second-layer ones minus
/// the first-layer ones inside.
pub fn c1_telescoping_holds(w: &LayeredPattern) -> bool {
    w.row_segments().into_iter().all(|(y, x0, x1)| {
        (x0..x1).all(|s| {
            let mut net = 0i64;
            (s + 1..=x1).all(|r| {
                net += w.bit(r, y, SECOND).unwrap() as i64 - w.bit(r, y, FIRST).unwrap() as i64;
                w.bit(r, y, THIRD).unwrap() as i64 - w.bit(s, y, THIRD).unwrap() as i64 == net
            })
        })
    })
}

/// Telescoping check on a window that must already be legal.
pub fn verify_c1_forward(w: &LayeredPattern) -> Result<bool> {
    if !x_rules().validate(w.pattern())? {
        bail!(Input, "window violates the layer rules");
    }
    Ok(c1_telescoping_holds(w))
}

/// Rows on which the first and second layers agree everywhere.
pub fn row_freedom(w: &LayeredPattern) -> BTreeSet<i64> {
    let mut forced = BTreeSet::new();
    for ((x, y), _) in w.pattern().cells() {
        if w.bit(x, y, FIRST) != w.bit(x, y, SECOND) {
            forced.insert(y);
        }
    }
    w.rows().difference(&forced).copied().collect()
}

/// Categories of a jointly balanced pair, judged on `[−radius, radius]`:
///
/// 1. irrational slope, both sequences 1-balanced;
/// 2. rational slope, both 1-balanced;
/// 3. `a` 2-balanced but not 1-balanced, `b` a shift of the lower
///    characteristic sequence;
/// 4. the same with `a` and `b` exchanged.
pub fn classify_pair(pair: &SequencePair, radius: i64) -> Result<BTreeSet<u8>> {
    if radius < 1 {
        bail!(Input, "radius must be positive");
    }
    let (lo, hi) = (-radius, radius);
    let a = pair.a.window(lo, hi);
    let b = pair.b.window(lo, hi);
    if !words::is_jointly_balanced(&a, &b)? {
        bail!(Input, "pair is not jointly balanced on [{lo},{hi}]");
    }
    let alpha = pair.a.slope();
    if pair.b.slope() != alpha {
        bail!(Input, "slopes {alpha} and {} differ", pair.b.slope());
    }
    let bal1 = |w: &Word| words::is_k_balanced(w, 1);
    let skew = |w: &Word| -> Result<bool> { Ok(words::is_k_balanced(w, 2)? && !bal1(w)?) };
    let span = 4 * radius + pair.b.horizon().1.min(4096);
    let lower = words::lower_char_window(&alpha, lo - span, hi + span);
    let in_orbit = |w: &Word| lower.contains(w.letters());

    let mut tags = BTreeSet::new();
    let both = bal1(&a)? && bal1(&b)?;
    if both {
        tags.insert(if alpha.is_rational() { 2 } else { 1 });
    }
    if skew(&a)? && in_orbit(&b) {
        tags.insert(3);
    }
    if skew(&b)? && in_orbit(&a) {
        tags.insert(4);
    }
    Ok(tags)
}

/// `[(m − 2)/L, (m + 2)/L] ∩ [0, 1]` for `m` first-layer ones on a
/// longest row segment of length `L`.
pub fn slope_window_estimate(w: &LayeredPattern) -> Result<SlopeInterval> {
    let Some((y, x0, x1)) = w
        .row_segments()
        .into_iter()
        .max_by_key(|&(y, a, b)| (b - a, std::cmp::Reverse(y)))
    else {
        bail!(Domain, "window has no row segment");
    };
    let len = x1 - x0 + 1;
    let m = (x0..=x1).map(|x| w.bit(x, y, FIRST).unwrap() as i64).sum::<i64>();
    Ok(SlopeInterval::clamped(Rational::new(m - 2, len), Rational::new(m + 2, len)))
}

/// Sturmian data reproducing a window of a 1-balanced pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub slope: Slope,
    pub pair: SequencePair,
    pub window: LayeredPattern,
    /// Row `k` with `a = σ^{−k} b`, when there is one.
    pub shift: Option<i64>,
}

const COLLAR_CAP: i64 = 512;
const OCCURRENCE_CAP: i64 = 1 << 20;

/// Smallest collar at which every row of `window` is either globally
/// free or shows a disagreement between `a` and the shifted `b`.
fn decisive_collar(pair: &SequencePair, window: Rect) -> Result<i64> {
    let rows: Vec<i64> = (window.y0..=window.y1).filter(|&j| !pair.row_globally_free(j)).collect();
    let agrees = |j: i64, i: i64| pair.a.at(i) == pair.b.at(i - j);
    for c in 2..=COLLAR_CAP {
        let (lo, hi) = (window.x0.min(0) - c, window.x1.max(0) + c);
        if rows.iter().all(|&j| (lo..=hi).any(|i| !agrees(j, i))) {
            return Ok(c);
        }
    }
    bail!(Consistency, "rows stay undecided within collar {COLLAR_CAP}")
}

/// Intercept `ρ` with `⌊(n+1)α + ρ⌋ − ⌊nα + ρ⌋ = u(n)` on `u`'s indices.
fn sturmian_intercept(alpha: &Slope, u: &Word) -> Result<Quadratic> {
    let mut len = 4096;
    loop {
        let host = words::lower_char_window(alpha, 0, len);
        if let Some(p) = host.letters().windows(u.len()).position(|s| s == u.letters()) {
            let rho = alpha.value().mul_int((p as i64 - u.offset()) as i128);
            return Ok(rho.add_int(-rho.floor()));
        }
        if len >= OCCURRENCE_CAP {
            bail!(Search, "'{}' not found in the first {len} letters", u.as_str());
        }
        len *= 4;
    }
}

/// Replaces a 1-balanced pair of rational slope, not both periodic, by
/// Sturmian sequences of an irrational slope that reproduce the pair's
/// layered window.
///
/// When `a = σ^{−k} b` for some row `k` both replacements come from one
/// Sturmian sequence, keeping row `k` free; otherwise each sequence is
/// matched separately inside the joint slope interval of the two
/// evaluated windows.
pub fn sturmian_approx_window(
    pair: &SequencePair,
    window: Rect,
    free_rows: &BTreeMap<i64, u8>,
) -> Result<Approximation> {
    if pair.a.is_periodic() && pair.b.is_periodic() {
        bail!(Input, "both sequences are periodic; no Sturmian approximation applies");
    }
    let collar = decisive_collar(pair, window)?;
    let original = build_point_window(pair, window, free_rows, collar)?;
    let (lo, hi) = original.extent;
    let u = pair.a.window(lo, hi);
    if !words::is_k_balanced(&u, 1)? || !words::is_k_balanced(&pair.b.window(lo - window.y1, hi - window.y0), 1)? {
        bail!(Input, "sequences are not 1-balanced");
    }
    let (ra, pa) = pair.a.horizon();
    let (rb, pb) = pair.b.horizon();
    let reach = ra + rb + pa.lcm(&pb).min(4096);
    let shift = (-reach..=reach).find(|&k| pair.row_globally_free(k));

    let (slope, new_pair) = match shift {
        Some(k) => {
            let (vlo, vhi) = ((lo - window.y1).min(lo - k), (hi - window.y0).max(hi - k));
            let v = pair.b.window(vlo, vhi);
            let iv = words::slope_interval(&v)?;
            let alpha = iv
                .irrational_point()
                .ok_or_else(|| Error::Consistency(format!("empty slope interval {iv}")))?;
            let rho = sturmian_intercept(&alpha, &v)?;
            let b2 = Sequence::characteristic(alpha, rho, false)?;
            let rho_a = rho.checked_sub(&alpha.value().mul_int(k as i128))?;
            let rho_a = rho_a.add_int(-rho_a.floor());
            (alpha, SequencePair::new(Sequence::characteristic(alpha, rho_a, false)?, b2))
        }
        None => {
            let v = pair.b.window(lo - window.y1, hi - window.y0);
            let iv = words::joint_slope_interval(&u, &v)?
                .ok_or_else(|| Error::Consistency("joint slope interval is empty".into()))?;
            let alpha = iv
                .irrational_point()
                .ok_or_else(|| Error::Consistency(format!("no irrational point in {iv}")))?;
            let a2 = Sequence::characteristic(alpha, sturmian_intercept(&alpha, &u)?, false)?;
            let b2 = Sequence::characteristic(alpha, sturmian_intercept(&alpha, &v)?, false)?;
            (alpha, SequencePair::new(a2, b2))
        }
    };
    let rebuilt = build_point_window(&new_pair, window, free_rows, collar)?;
    if rebuilt.pattern != original.pattern {
        bail!(Consistency, "Sturmian window differs from the original");
    }
    Ok(Approximation { slope, pair: new_pair, window: rebuilt.pattern, shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequence {
        s.parse().unwrap()
    }

    fn layer_rows(w: &LayeredPattern, layer: u8, r: Rect) -> Vec<Vec<u8>> {
        (r.y0..=r.y1).map(|y| (r.x0..=r.x1).map(|x| w.bit(x, y, layer).unwrap()).collect()).collect()
    }

    #[test]
    fn rule_count_and_examples() {
        let x = x_rules();
        assert_eq!(x.forbidden().len(), 104);
        assert_eq!(x.type_t(), 2);
        let zero = Pattern2D::filled(Rect::new(0, 0, 4, 4), |_, _| b'0');
        assert!(x.validate(&zero).unwrap());
        let mut bad = zero.clone();
        bad.set(1, 1, letter(1, 0, 0));
        assert!(!x.validate(&bad).unwrap());
    }

    #[test]
    fn periodic_example_window() {
        let pair = SequencePair::new(seq("01"), seq("01"));
        let r = Rect::new(0, 0, 2, 2);
        let built = build_point_window(&pair, r, &BTreeMap::new(), 4).unwrap();
        let w = &built.pattern;
        assert_eq!(layer_rows(w, FIRST, r), [[0, 1], [0, 1]]);
        assert_eq!(layer_rows(w, SECOND, r), [[0, 1], [1, 0]]);
        assert_eq!(layer_rows(w, THIRD, r), [[0, 0], [1, 0]]);
        assert_eq!(built.free.get(&0), Some(&Freedom::Global));
        assert_eq!(row_freedom(w), BTreeSet::from([0]));
        assert!(verify_c1_forward(w).unwrap());

        let bad = BTreeMap::from([(1, 1)]);
        assert!(matches!(build_point_window(&pair, r, &bad, 4), Err(Error::Input(_))));
        let ok = BTreeMap::from([(0, 1)]);
        let w = build_point_window(&pair, r, &ok, 4).unwrap().pattern;
        assert_eq!(layer_rows(&w, THIRD, r)[0], [1, 1]);
    }

    #[test]
    fn unbalanced_pair_is_rejected() {
        let pair = SequencePair::new(seq("0"), seq("1"));
        let r = Rect::new(0, 0, 3, 3);
        assert!(matches!(build_point_window(&pair, r, &BTreeMap::new(), 2), Err(Error::Construction(_))));
    }

    #[test]
    fn text_round_trip() {
        let pair = SequencePair::new(seq("lower:2/5"), seq("lower:2/5"));
        let w = build_point_window(&pair, Rect::new(-2, -1, 5, 5), &BTreeMap::new(), 6).unwrap().pattern;
        let back = LayeredPattern::parse(&w.to_text()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn telescoping_rejects_unbalanced_rows() {
        let first = Pattern2D::from_rows(0, 0, &["0011"]);
        let second = Pattern2D::from_rows(0, 0, &["0000"]);
        let third = Pattern2D::from_rows(0, 0, &["0000"]);
        let w = LayeredPattern::from_layers(&first, &second, &third).unwrap();
        assert!(!c1_telescoping_holds(&w));
        assert!(matches!(verify_c1_forward(&w), Err(Error::Input(_))));
    }

    #[test]
    fn sequence_descriptions() {
        let s = seq("01|0100101101|01");
        assert_eq!(s.window(-4, 13).as_str(), "010101001011010101");
        assert!(!s.is_periodic());
        assert!(seq("0110|0110|0110").is_periodic());
        assert_eq!(seq("01").slope(), Slope::rational(1, 2).unwrap());
        let g = seq("upper:(-1+1*sqrt(5))/2");
        assert_eq!(g.to_string().parse::<Sequence>().unwrap(), g);
        assert_eq!(seq("0|1@3|0").at(3), b'1');
        assert_eq!(seq("0|1@3|0").to_string(), "0|1@3|0");
    }

    #[test]
    fn classification_examples() {
        let two_fifths = SequencePair::new(seq("lower:2/5"), seq("lower:2/5"));
        assert_eq!(classify_pair(&two_fifths, 40).unwrap(), BTreeSet::from([2]));
        let golden = SequencePair::new(seq("lower:(-1+1*sqrt(5))/2"), seq("upper:(-1+1*sqrt(5))/2"));
        assert_eq!(classify_pair(&golden, 40).unwrap(), BTreeSet::from([1]));
        let skew = SequencePair::new(seq("01|0100101101|01"), seq("lower:1/2"));
        assert_eq!(classify_pair(&skew, 40).unwrap(), BTreeSet::from([3]));
        let bad = SequencePair::new(seq("0"), seq("1"));
        assert!(matches!(classify_pair(&bad, 10), Err(Error::Input(_))));
    }

    #[test]
    fn slope_estimates() {
        let row = |s: &str| {
            let f = Pattern2D::from_rows(0, 0, &[s]);
            let z = f.map_letters(|_| b'0');
            LayeredPattern::from_layers(&f, &z, &z).unwrap()
        };
        let iv = slope_window_estimate(&row("00101")).unwrap();
        assert_eq!((iv.lo, iv.hi), (Rational::new(0, 1), Rational::new(4, 5)));
        let iv = slope_window_estimate(&row(&"0".repeat(100))).unwrap();
        assert_eq!((iv.lo, iv.hi), (Rational::new(0, 1), Rational::new(1, 50)));
        let iv = slope_window_estimate(&row(&"01".repeat(50))).unwrap();
        assert_eq!((iv.lo, iv.hi), (Rational::new(48, 100), Rational::new(52, 100)));
        let empty = LayeredPattern::new(Pattern2D::new()).unwrap();
        assert!(matches!(slope_window_estimate(&empty), Err(Error::Domain(_))));
    }

    #[test]
    fn sturmian_approximation_cases() {
        let r = Rect::new(0, 0, 4, 4);
        let case1 = SequencePair::new(seq("01|0|01"), seq("lower:1/2"));
        let out = sturmian_approx_window(&case1, r, &BTreeMap::new()).unwrap();
        assert!(!out.slope.is_rational());
        assert_eq!(out.shift, None);

        let b = seq("01|0|01");
        let a = seq("01|0@2|01");
        let case2 = SequencePair::new(a, b);
        let free = BTreeMap::from([(2, 1)]);
        let out = sturmian_approx_window(&case2, Rect::new(-1, 0, 4, 4), &free).unwrap();
        assert_eq!(out.shift, Some(2));
        assert!(row_freedom(&out.window).contains(&2));

        let both = SequencePair::new(seq("01"), seq("10"));
        assert!(matches!(sturmian_approx_window(&both, r, &BTreeMap::new()), Err(Error::Input(_))));
    }
}
