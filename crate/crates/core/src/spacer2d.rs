//! Planar spacer transform: base letters ride on the crossings of a
//! horizontal ribbon window and a vertical one.
//!
//! A site is stored as one byte: `0` for no ribbon, `H` or `V` for a
//! single ribbon, `+` for an empty crossing site and the base letter
//! itself for a crossing site that carries one.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{bail, Error, Result};
use crate::grid2d::{crossing_sites, ribbon_trace, xh_rules, xv_rules, Pattern2D, Rect, H, V, ZERO};

/// Bytes that cannot be base letters.
pub const RESERVED: [u8; 5] = [ZERO, H, V, b'+', b'.'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BLetter {
    Empty,
    V,
    H,
    /// Both flags; `Some(c)` carries base letter `c`.
    Cross(Option<u8>),
}

impl BLetter {
    pub fn to_byte(self) -> u8 {
        match self {
            BLetter::Empty => ZERO,
            BLetter::V => V,
            BLetter::H => H,
            BLetter::Cross(None) => b'+',
            BLetter::Cross(Some(c)) => c,
        }
    }

    pub fn from_byte(c: u8) -> Self {
        match c {
            ZERO => BLetter::Empty,
            V => BLetter::V,
            H => BLetter::H,
            b'+' => BLetter::Cross(None),
            c => BLetter::Cross(Some(c)),
        }
    }

    fn from_flags(h: bool, v: bool) -> Self {
        match (h, v) {
            (false, false) => BLetter::Empty,
            (false, true) => BLetter::V,
            (true, false) => BLetter::H,
            (true, true) => BLetter::Cross(None),
        }
    }

    pub fn has_h(self) -> bool {
        matches!(self, BLetter::H | BLetter::Cross(_))
    }

    pub fn has_v(self) -> bool {
        matches!(self, BLetter::V | BLetter::Cross(_))
    }

    pub fn base(self) -> Option<u8> {
        match self {
            BLetter::Cross(c) => c,
            _ => None,
        }
    }
}

fn check_base_alphabet(a: &[u8]) -> Result<()> {
    if let Some(c) = a.iter().find(|c| RESERVED.contains(c)) {
        bail!(Alphabet, "base letter '{}' clashes with a ribbon symbol", *c as char);
    }
    Ok(())
}

/// The three single-flag letters plus one crossing letter per base
/// letter and the empty crossing.
pub fn alphabet_b(a: &[u8]) -> Result<Vec<BLetter>> {
    check_base_alphabet(a)?;
    let base: BTreeSet<u8> = a.iter().copied().collect();
    let mut out = vec![BLetter::Empty, BLetter::V, BLetter::H, BLetter::Cross(None)];
    out.extend(base.into_iter().map(|c| BLetter::Cross(Some(c))));
    Ok(out)
}

/// The `0/H` flag layer of a window.
pub fn h_layer(w: &Pattern2D) -> Pattern2D {
    w.map_letters(|c| if BLetter::from_byte(c).has_h() { H } else { ZERO })
}

/// The `0/V` flag layer of a window.
pub fn v_layer(w: &Pattern2D) -> Pattern2D {
    w.map_letters(|c| if BLetter::from_byte(c).has_v() { V } else { ZERO })
}

/// Places `t` on the crossings of `xh` and `xv`. Site `(j, i)` of `t`
/// belongs to vertical ribbon `j` and horizontal ribbon `i`; its letter
/// goes on the least site of their crossing.
pub fn superimpose(xh: &Pattern2D, xv: &Pattern2D, t: &Pattern2D) -> Result<Pattern2D> {
    if xh.shape() != xv.shape() {
        bail!(Input, "flag windows have different shapes");
    }
    if xh.letters().iter().any(|&c| c != H && c != ZERO) {
        bail!(Alphabet, "horizontal window must be over {{0, H}}");
    }
    if xv.letters().iter().any(|&c| c != V && c != ZERO) {
        bail!(Alphabet, "vertical window must be over {{0, V}}");
    }
    check_base_alphabet(&t.letters().into_iter().collect::<Vec<_>>())?;
    let sites = crossing_sites(xh, xv)?;
    let mut out = Pattern2D::new();
    for ((x, y), h) in xh.cells() {
        let v = xv.get(x, y).unwrap();
        out.set(x, y, BLetter::from_flags(h == H, v == V).to_byte());
    }
    for ((j, i), c) in t.cells() {
        let Some(s) = sites.get(&(i, j)) else {
            bail!(Input, "no visible crossing of horizontal ribbon {i} and vertical ribbon {j}");
        };
        let &(x, y) = s.first().expect("crossings are nonempty");
        out.set(x, y, c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub xh: Pattern2D,
    pub xv: Pattern2D,
    /// Base letters by `(vertical ribbon, horizontal ribbon)`.
    pub base: Pattern2D,
}

/// Letters on visible crossings and where each crossing's least site is.
fn letter_audit(w: &Pattern2D) -> Result<(Projection, Vec<BViolation>)> {
    let xh = h_layer(w);
    let xv = v_layer(w);
    let sites = crossing_sites(&xh, &xv)?;
    let mut owner = BTreeMap::new();
    for (&(i, j), s) in &sites {
        for &p in s {
            owner.insert(p, (i, j));
        }
    }
    let mut base = Pattern2D::new();
    let mut bad = Vec::new();
    for ((x, y), c) in w.cells() {
        let Some(letter) = BLetter::from_byte(c).base() else {
            continue;
        };
        // letters on partly visible crossings are left alone
        let Some(&(i, j)) = owner.get(&(x, y)) else {
            continue;
        };
        if sites[&(i, j)].first() == Some(&(x, y)) {
            base.set(j, i, letter);
        } else {
            bad.push(BViolation::MisplacedLetter { at: (x, y) });
        }
    }
    for (&(i, j), s) in &sites {
        if base.get(j, i).is_none() {
            let &at = s.first().expect("crossings are nonempty");
            bad.push(BViolation::MissingLetter { crossing: (i, j), at });
        }
    }
    Ok((Projection { xh, xv, base }, bad))
}

/// Splits a window into its flag layers and the base letters read off
/// the visible crossings.
pub fn project_f2(w: &Pattern2D) -> Result<Projection> {
    let (p, bad) = letter_audit(w)?;
    if let Some(BViolation::MisplacedLetter { at }) =
        bad.iter().find(|v| matches!(v, BViolation::MisplacedLetter { .. }))
    {
        bail!(Consistency, "base letter at {at:?} is not on the least site of its crossing");
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BViolation {
    /// Byte outside the letters built from the base alphabet.
    Foreign { at: (i64, i64) },
    /// A forbidden `X_H` pattern anchored here.
    HFlags { at: (i64, i64) },
    /// A forbidden `X_V` pattern anchored here.
    VFlags { at: (i64, i64) },
    /// Base letter on a crossing site other than the least one.
    MisplacedLetter { at: (i64, i64) },
    /// Visible crossing with no base letter on its least site.
    MissingLetter { crossing: (i64, i64), at: (i64, i64) },
    /// Flags pass the local rules but do not split into ribbons; `at` is
    /// the window's lower-left corner.
    Untraceable { at: (i64, i64) },
}

impl BViolation {
    pub fn site(&self) -> (i64, i64) {
        match *self {
            BViolation::Foreign { at }
            | BViolation::HFlags { at }
            | BViolation::VFlags { at }
            | BViolation::MisplacedLetter { at }
            | BViolation::MissingLetter { at, .. }
            | BViolation::Untraceable { at } => at,
        }
    }
}

/// Everything that keeps a rectangular window from being a window of the
/// transformed shift over base alphabet `a`. Crossings cut by the window
/// border are not judged.
pub fn violations_b(w: &Pattern2D, a: &[u8]) -> Result<Vec<BViolation>> {
    check_base_alphabet(a)?;
    if !w.is_rectangle() {
        bail!(Input, "window must be a rectangle");
    }
    let mut out: Vec<BViolation> = w
        .cells()
        .filter(|&(_, c)| BLetter::from_byte(c).base().is_some_and(|b| !a.contains(&b)))
        .map(|(at, _)| BViolation::Foreign { at })
        .collect();
    let hv = xh_rules().violations(&h_layer(w))?;
    let vv = xv_rules().violations(&v_layer(w))?;
    out.extend(hv.iter().map(|&(_, at)| BViolation::HFlags { at }));
    out.extend(vv.iter().map(|&(_, at)| BViolation::VFlags { at }));
    if hv.is_empty() && vv.is_empty() {
        match letter_audit(w) {
            Ok((_, bad)) => out.extend(bad),
            Err(Error::Legality(_)) => {
                let r = w.bbox().expect("nonempty when rules were checked");
                out.push(BViolation::Untraceable { at: (r.x0, r.y0) });
            }
            Err(e) => return Err(e),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn validate_b(w: &Pattern2D, a: &[u8]) -> Result<bool> {
    Ok(violations_b(w, a)?.is_empty())
}

/// The same judgement made site by site, looking only at the
/// `(2r + 1) × (2r + 1)` box around each site.
pub fn local_violations_b(w: &Pattern2D, a: &[u8], radius: i64) -> Result<Vec<BViolation>> {
    let Some(win) = w.bbox() else {
        return Ok(Vec::new());
    };
    let mut out = BTreeSet::new();
    for (x, y) in win.sites() {
        let bx = Rect { x0: x - radius, y0: y - radius, x1: x + radius, y1: y + radius }.intersect(&win);
        for v in violations_b(&w.restrict(&bx), a)? {
            match v {
                BViolation::Untraceable { .. } => {
                    out.insert(BViolation::Untraceable { at: (win.x0, win.y0) });
                }
                v if v.site() == (x, y) => {
                    out.insert(v);
                }
                _ => {}
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Which ribbons a move shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Horizontal ribbons move up or down.
    Horizontal,
    /// Vertical ribbons move left or right.
    Vertical,
}

/// Frame that a move must leave untouched.
pub const MOVE_FRAME: i64 = 5;

/// Shifts by `sign` the part over `region`'s columns of every horizontal
/// ribbon of `layer` that meets `region`. Returns the new layer and the
/// old-to-new ribbon indices.
fn shift_h_ribbons(layer: &Pattern2D, sign: i64, region: Rect) -> Result<(Pattern2D, BTreeMap<i64, i64>)> {
    let d = ribbon_trace(layer)?;
    let win = d.window;
    let region = region.intersect(&win);
    if let Some(f) = d.fragments.iter().find(|f| f.iter().any(|&(x, y)| region.contains(x, y))) {
        bail!(Input, "ribbon through {:?} leaves the window", f[0]);
    }
    let mut levels: Vec<_> = d.ribbons.iter().map(|r| r.levels.clone()).collect();
    let mut moved = Vec::new();
    for (k, l) in levels.iter_mut().enumerate() {
        if !l.cells().any(|(x, y)| region.contains(x, y)) {
            continue;
        }
        let mut h = l.heights().to_vec();
        for x in region.x0 - 1..=region.x1 {
            h[(x - (win.x0 - 1)) as usize] += sign;
        }
        let shifted = crate::grid2d::Levels::new(win.x0 - 1, h);
        shifted.check_shape().map_err(|e| Error::Legality(format!("ribbon {}: {e}", d.ribbons[k].index)))?;
        *l = shifted;
        moved.push(k);
    }
    for k in 1..levels.len() {
        for x in win.x0..=win.x1 {
            let g = levels[k].gap_above(&levels[k - 1], x);
            if !(2..=4).contains(&g) {
                bail!(
                    Legality,
                    "gap {g} between ribbons {} and {} in column {x}",
                    d.ribbons[k - 1].index,
                    d.ribbons[k].index
                );
            }
        }
    }
    let mut out = layer.clone();
    for &k in &moved {
        for (x, y) in d.ribbons[k].levels.cells() {
            out.set(x, y, ZERO);
        }
    }
    for &k in &moved {
        for (x, y) in levels[k].cells() {
            if !win.contains(x, y) {
                bail!(Input, "ribbon {} would leave the window", d.ribbons[k].index);
            }
            out.set(x, y, H);
        }
    }
    if !xh_rules().validate(&out)? {
        bail!(Legality, "moved ribbons clash with the rest of the window");
    }
    let after = ribbon_trace(&out)?;
    let remap = d.ribbons.iter().zip(&after.ribbons).map(|(a, b)| (a.index, b.index)).collect();
    Ok((out, remap))
}

fn h_to_v(p: &Pattern2D) -> Pattern2D {
    p.transpose().map_letters(|c| if c == H { V } else { c })
}

fn v_to_h(p: &Pattern2D) -> Pattern2D {
    p.transpose().map_letters(|c| if c == V { H } else { c })
}

/// Moves every ribbon of the chosen family that meets `region` by one
/// unit (`sign` = ±1) over the extent of `region`, carrying the base
/// letters along with their crossings. The moved sites must stay clear
/// of the outer frame of thickness [`MOVE_FRAME`].
pub fn meander_move(w: &Pattern2D, axis: Axis, sign: i64, region: Rect) -> Result<Pattern2D> {
    if sign != 1 && sign != -1 {
        bail!(Input, "sign must be 1 or -1");
    }
    let Some(win) = w.bbox() else {
        return Ok(w.clone());
    };
    if region.intersect(&win).is_empty() {
        return Ok(w.clone());
    }
    let p = project_f2(w)?;
    let (xh, xv, base) = match axis {
        Axis::Horizontal => {
            let (xh, remap) = shift_h_ribbons(&p.xh, sign, region)?;
            let mut base = Pattern2D::new();
            for ((j, i), c) in p.base.cells() {
                base.set(j, remap[&i], c);
            }
            (xh, p.xv.clone(), base)
        }
        Axis::Vertical => {
            let region_t = Rect { x0: region.y0, y0: region.x0, x1: region.y1, y1: region.x1 };
            let (turned, remap) = shift_h_ribbons(&v_to_h(&p.xv), sign, region_t)?;
            let mut base = Pattern2D::new();
            for ((j, i), c) in p.base.cells() {
                base.set(remap[&j], i, c);
            }
            (p.xh.clone(), h_to_v(&turned), base)
        }
    };
    let mut out = superimpose(&xh, &xv, &base)?;
    // letters on partly visible crossings stay where they were
    let visible: BTreeSet<(i64, i64)> = crossing_sites(&xh, &xv)?.into_values().flatten().collect();
    for ((x, y), c) in w.cells() {
        if BLetter::from_byte(c).base().is_some() && out.get(x, y) == Some(b'+') && !visible.contains(&(x, y)) {
            out.set(x, y, c);
        }
    }
    if let Some(((x, y), _)) =
        w.cells().find(|&((x, y), c)| win.in_frame(x, y, MOVE_FRAME) && out.get(x, y) != Some(c))
    {
        bail!(Input, "move reaches the frame at ({x},{y})");
    }
    Ok(out)
}

/// Three grids under one `@ xmin ymax` header: horizontal flags,
/// vertical flags and base letters (`0` where there is none).
pub fn to_text_b(w: &Pattern2D) -> String {
    let layers = [
        h_layer(w),
        v_layer(w),
        w.map_letters(|c| BLetter::from_byte(c).base().unwrap_or(ZERO)),
    ];
    let mut s = String::new();
    for (k, l) in layers.iter().enumerate() {
        let text = l.to_text();
        let (head, body) = text.split_once('\n').unwrap_or((&text, ""));
        if k == 0 {
            s.push_str(head);
        }
        s.push('\n');
        s.push_str(body);
    }
    s
}

pub fn parse_b(text: &str) -> Result<Pattern2D> {
    let mut lines = text.lines().map(str::trim_end);
    let head = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("empty window".into()))?;
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
        bail!(Parse, "expected three grids, found {}", blocks.len());
    }
    let grid = |b: &Vec<&str>| Pattern2D::parse(&format!("{head}\n{}", b.join("\n")));
    let (h, v, base) = (grid(&blocks[0])?, grid(&blocks[1])?, grid(&blocks[2])?);
    if h.shape() != v.shape() || h.shape() != base.shape() {
        bail!(Parse, "grids have different shapes");
    }
    let mut out = Pattern2D::new();
    for ((x, y), hc) in h.cells() {
        let letter = BLetter::from_flags(hc == H, v.get(x, y) == Some(V));
        let b = base.get(x, y).unwrap();
        let letter = match (letter, b) {
            (l, ZERO) => l,
            (BLetter::Cross(None), c) => BLetter::Cross(Some(c)),
            _ => bail!(Parse, "base letter at ({x},{y}) is off the crossings"),
        };
        out.set(x, y, letter.to_byte());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid2d::{crossing_map, flat_xh, flat_xv};

    fn flat_b(r: Rect, letter: u8) -> (Pattern2D, Pattern2D) {
        let (xh, xv) = (flat_xh(r), flat_xv(r));
        let mut t = Pattern2D::new();
        for &(i, j) in crossing_map(&xh, &xv).unwrap().keys() {
            t.set(j, i, letter);
        }
        (superimpose(&xh, &xv, &t).unwrap(), t)
    }

    #[test]
    fn alphabet_sizes() {
        assert_eq!(alphabet_b(b"a").unwrap().len(), 5);
        assert_eq!(alphabet_b(b"ab").unwrap().len(), 6);
        assert_eq!(alphabet_b(b"").unwrap().len(), 4);
        assert!(matches!(alphabet_b(b"0a"), Err(Error::Alphabet(_))));
    }

    #[test]
    fn flat_superimposition() {
        let r = Rect::new(-6, -6, 13, 13);
        let (w, t) = flat_b(r, b'a');
        for ((j, i), _) in t.cells() {
            assert_eq!(w.get(4 * j, 4 * i), Some(b'a'));
        }
        assert!(validate_b(&w, b"a").unwrap());
        let p = project_f2(&w).unwrap();
        assert_eq!((p.xh, p.xv, p.base), (flat_xh(r), flat_xv(r), t));

        let empty = superimpose(&flat_xh(r), &flat_xv(r), &Pattern2D::new()).unwrap();
        assert!(empty.letters().iter().all(|&c| BLetter::from_byte(c).base().is_none()));
        let far = Pattern2D::from_cells([((40, 40), b'a')]);
        assert!(matches!(superimpose(&flat_xh(r), &flat_xv(r), &far), Err(Error::Input(_))));
    }

    #[test]
    fn misplaced_letter() {
        let r = Rect::new(-6, -6, 13, 13);
        let xh = flat_xh(r);
        // a vertical ribbon stepping across row 0 meets ribbon 0 twice
        let mut xv = flat_xv(r);
        for y in -6..=-1 {
            xv.set(0, y, ZERO);
            xv.set(1, y, V);
        }
        xv.set(1, 0, V);
        assert!(xv_rules().validate(&xv).unwrap());
        let w = superimpose(&xh, &xv, &Pattern2D::new()).unwrap();
        let sites = crossing_sites(&xh, &xv).unwrap();
        let two = sites.values().find(|s| s.len() == 2).unwrap();
        let mut bad = w.clone();
        let second = *two.iter().nth(1).unwrap();
        bad.set(second.0, second.1, b'a');
        assert!(matches!(project_f2(&bad), Err(Error::Consistency(_))));
        let first = *two.first().unwrap();
        let mut good = w.clone();
        good.set(first.0, first.1, b'a');
        assert!(project_f2(&good).is_ok());
    }

    #[test]
    fn moves() {
        let r = Rect::new(-12, -12, 25, 25);
        let (w, t) = flat_b(r, b'a');
        let region = Rect { x0: 0, y0: -2, x1: 0, y1: 2 };
        let moved = meander_move(&w, Axis::Vertical, -1, region).unwrap();
        assert!(validate_b(&moved, b"a").unwrap());
        let d = ribbon_trace(&v_to_h(&v_layer(&moved))).unwrap();
        let gaps: BTreeSet<i64> = d.gaps.iter().map(|g| g[12]).collect();
        assert_eq!(gaps, BTreeSet::from([2, 3, 4]));
        assert_eq!(project_f2(&moved).unwrap().base.normalized(), t.normalized());
        for ((x, y), c) in w.cells() {
            if r.in_frame(x, y, MOVE_FRAME) {
                assert_eq!(moved.get(x, y), Some(c));
            }
        }
        let next = Rect { x0: 4, y0: -2, x1: 4, y1: 2 };
        let err = meander_move(&moved, Axis::Vertical, 1, next).unwrap_err();
        assert!(matches!(err, Error::Legality(ref m) if m.contains("gap 5")), "{err}");
        let none = Rect { x0: 100, y0: 100, x1: 101, y1: 101 };
        assert_eq!(meander_move(&w, Axis::Horizontal, 1, none).unwrap(), w);
        let up = meander_move(&w, Axis::Horizontal, 1, Rect { x0: -2, y0: 0, x1: 2, y1: 0 }).unwrap();
        assert!(validate_b(&up, b"a").unwrap());
    }

    #[test]
    fn text_round_trip() {
        let (w, _) = flat_b(Rect::new(0, 0, 9, 9), b'a');
        assert_eq!(parse_b(&to_text_b(&w)).unwrap(), w);
    }

    #[test]
    fn local_matches_global_on_small_windows() {
        let (w, _) = flat_b(Rect::new(-3, -3, 8, 8), b'a');
        let mut bad = w.clone();
        bad.set(0, 0, b'+');
        for p in [w, bad] {
            assert_eq!(local_violations_b(&p, b"a", 7).unwrap(), violations_b(&p, b"a").unwrap());
        }
    }
}
