//! Embedding an `X_H` pattern into a point homoclinic to the flat point.
//!
//! Three steps: complete the ribbons through the pattern across its
//! columns, route them left and right to flat equispaced heights, then add
//! ribbons above and below, each smoothing out the one before, until they
//! come out flat.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fill::{FillOptions, FillProblem};
use super::levels::{render, Levels};
use super::ribbons::{flat_xh, xh_rules, H, ZERO};
use super::{Pattern2D, Rect};
use crate::error::{bail, Error, Result};

/// Largest margin tried before giving up.
pub const EMBED_MARGIN_CAP: i64 = 48;

const FRAME: i64 = 5;
const FILL_BUDGET: u64 = 400_000;

/// Ribbons through `w`, completed over its columns. Each comes back with
/// exit heights on `[x0 − 1, x1]`.
fn complete_segments(w: &Pattern2D, b: Rect) -> Result<Vec<Levels>> {
    let xh = xh_rules();
    let k = (b.width() + 5) / 2 + 6;
    let strip = Rect { x0: b.x0 - 2, x1: b.x1 + 2, y0: b.y0 - k, y1: b.y1 + k };
    let mut prob = FillProblem::new(&xh, strip);
    prob.fix_all(w)?;
    let w_h: BTreeSet<(i64, i64)> = w.cells().filter(|&(_, c)| c == H).map(|(p, _)| p).collect();
    for seed in [None, Some(1), Some(2), Some(3), Some(4)] {
        let opts = FillOptions { max_nodes: Some(FILL_BUDGET), seed };
        let Some(filled) = prob.solve(&opts).pattern() else {
            continue;
        };
        if let Some(kept) = extract_levels(&filled, &w_h, w, b) {
            return Ok(kept);
        }
    }
    bail!(Input, "the pattern could not be completed to crossing ribbons");
}

fn extract_levels(
    filled: &Pattern2D,
    w_h: &BTreeSet<(i64, i64)>,
    w: &Pattern2D,
    b: Rect,
) -> Option<Vec<Levels>> {
    let cells: BTreeSet<(i64, i64)> =
        filled.cells().filter(|&(_, c)| c == H).map(|(p, _)| p).collect();
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for &start in w_h {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some((x, y)) = stack.pop() {
            for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                if cells.contains(&n) && comp.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.extend(comp.iter().copied());
        let mut h = Vec::new();
        for x in b.x0 - 1..=b.x1 {
            let ys: Vec<i64> =
                comp.iter().filter(|&&(cx, cy)| cx == x && comp.contains(&(x + 1, cy))).map(|p| p.1).collect();
            match ys.as_slice() {
                [y] => h.push(*y),
                _ => return None,
            }
        }
        let l = Levels::new(b.x0 - 1, h);
        l.check_shape().ok()?;
        kept.push(l);
    }
    kept.sort_by_key(|l| l.at(b.x0));
    for pair in kept.windows(2) {
        if (b.x0..=b.x1).any(|x| !(2..=4).contains(&pair[1].gap_above(&pair[0], x))) {
            return None;
        }
    }
    // the completed ribbons must redraw w exactly
    let drawn: BTreeSet<(i64, i64)> = kept.iter().flat_map(|l| l.cells().collect::<Vec<_>>()).collect();
    let exact = w.cells().all(|(p, c)| drawn.contains(&p) == (c == H));
    exact.then_some(kept)
}

struct Route<'a> {
    xa: i64,
    xb: i64,
    fixed: Option<&'a Levels>,
    /// Sites of `w` this ribbon must cover, by column; it covers no others.
    owned: Option<&'a BTreeMap<i64, BTreeSet<i64>>>,
    below: Option<&'a Levels>,
    above: Option<&'a Levels>,
    shape: &'a BTreeSet<(i64, i64)>,
    target: i64,
}

/// Cheapest ribbon over `[xa, xb]` meeting the constraints: fewest moves
/// first, then closest to parallel with its neighbour. Ties prefer flat,
/// then up, then down.
fn route(r: &Route) -> Option<Levels> {
    let span = r.xb - r.xa + 2;
    let mut lo = r.target;
    let mut hi = r.target;
    for l in [r.fixed, r.below, r.above].into_iter().flatten() {
        lo = lo.min(*l.heights().iter().min()?);
        hi = hi.max(*l.heights().iter().max()?);
    }
    lo -= span / 2 + 8;
    hi += span / 2 + 8;
    let nh = (hi - lo + 1) as usize;
    let id = |h: i64, moved: bool| (h - lo) as usize * 2 + moved as usize;
    const INF: u64 = u64::MAX;
    let mut cost = vec![INF; nh * 2];
    cost[id(r.target, false)] = 0;
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(span as usize);
    for x in r.xa..=r.xb {
        let mut next = vec![INF; nh * 2];
        let mut from = vec![u32::MAX; nh * 2];
        let pinned = if x <= r.xa + FRAME - 1 || x >= r.xb - FRAME { Some(r.target) } else { None };
        let fixed = r.fixed.filter(|f| (f.first_column() - 1..=f.last_column()).contains(&x)).map(|f| f.at(x));
        let owned = r.owned.and_then(|o| o.get(&x));
        let reference = match (r.below, r.above) {
            (Some(b), _) => b.at(x) + 4,
            (None, Some(a)) => a.at(x) - 4,
            _ => r.target,
        };
        for s in 0..nh * 2 {
            let c = cost[s];
            if c == INF {
                continue;
            }
            let h = lo + (s / 2) as i64;
            let moved = s % 2 == 1;
            for d in [0i64, 1, -1] {
                if d != 0 && moved {
                    continue;
                }
                let h2 = h + d;
                if h2 < lo || h2 > hi || pinned.is_some_and(|t| t != h2) || fixed.is_some_and(|f| f != h2) {
                    continue;
                }
                let (clo, chi) = (h.min(h2), h.max(h2));
                if r.below.is_some_and(|b| !(2..=4).contains(&(clo - b.column(x).1 - 1))) {
                    continue;
                }
                if r.above.is_some_and(|a| !(2..=4).contains(&(a.column(x).0 - chi - 1))) {
                    continue;
                }
                let covered = (clo..=chi).filter(|&y| r.shape.contains(&(x, y)));
                if !covered.eq(owned.iter().flat_map(|o| o.iter().copied())) {
                    continue;
                }
                let c2 = c + if d != 0 { 1000 } else { 0 } + h2.abs_diff(reference);
                let t = id(h2, d != 0);
                if c2 < next[t] {
                    next[t] = c2;
                    from[t] = s as u32;
                }
            }
        }
        cost = next;
        back.push(from);
    }
    let end = [id(r.target, false), id(r.target, true)].into_iter().filter(|&s| cost[s] != INF).min_by_key(|&s| cost[s])?;
    let mut h = vec![0; span as usize];
    let mut s = end;
    for k in (0..back.len()).rev() {
        h[k + 1] = lo + (s / 2) as i64;
        s = back[k][s] as usize;
    }
    h[0] = r.target;
    Some(Levels::new(r.xa - 1, h))
}

#[derive(Clone, Copy)]
enum Order {
    BottomUp,
    TopDown,
}

/// Route the kept ribbons, then unravel above and below. Returns every
/// ribbon meeting the window, bottom to top.
fn assemble(
    kept: &[Levels],
    shape: &BTreeSet<(i64, i64)>,
    win: Rect,
    t1: i64,
    order: Order,
    pin: bool,
) -> Option<Vec<Levels>> {
    let (xa, xb) = (win.x0, win.x1);
    let base = Route { xa, xb, fixed: None, owned: None, below: None, above: None, shape, target: t1 };
    let owned: Vec<BTreeMap<i64, BTreeSet<i64>>> = kept
        .iter()
        .map(|l| {
            let mut m: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
            for (x, y) in l.cells().filter(|p| shape.contains(p)) {
                m.entry(x).or_default().insert(y);
            }
            m
        })
        .collect();
    let fixed = |k: usize| if pin { Some(&kept[k]) } else { None };
    let mut ribbons: Vec<Levels> = Vec::new();
    if kept.is_empty() {
        ribbons.push(route(&base)?);
    } else {
        match order {
            Order::BottomUp => {
                for k in 0..kept.len() {
                    let r = Route {
                        fixed: fixed(k),
                        owned: Some(&owned[k]),
                        below: ribbons.last(),
                        target: t1 + 4 * k as i64,
                        ..base
                    };
                    ribbons.push(route(&r)?);
                }
            }
            Order::TopDown => {
                let top = t1 + 4 * (kept.len() as i64 - 1);
                for k in (0..kept.len()).rev() {
                    let r = Route {
                        fixed: fixed(k),
                        owned: Some(&owned[k]),
                        above: ribbons.last(),
                        target: top - 4 * (kept.len() - 1 - k) as i64,
                        ..base
                    };
                    ribbons.push(route(&r)?);
                }
                ribbons.reverse();
            }
        }
    }
    let cap = win.height() / 2 + 8;
    // above: unravel, then flat ribbons up to the top of the window
    let mut above = Vec::new();
    let mut t = t1 + 4 * (ribbons.len() as i64 - 1);
    let mut prev = ribbons.last()?.clone();
    while !prev.is_flat() {
        if above.len() as i64 > cap {
            return None;
        }
        t += 4;
        let next = route(&Route { below: Some(&prev), target: t, ..base })?;
        above.push(next.clone());
        prev = next;
    }
    while t + 4 <= win.y1 + 4 {
        t += 4;
        above.push(Levels::flat(xa, xb, t));
    }
    let mut below = Vec::new();
    let mut t = t1;
    let mut prev = ribbons.first()?.clone();
    while !prev.is_flat() {
        if below.len() as i64 > cap {
            return None;
        }
        t -= 4;
        let next = route(&Route { above: Some(&prev), target: t, ..base })?;
        below.push(next.clone());
        prev = next;
    }
    while t - 4 >= win.y0 - 4 {
        t -= 4;
        below.push(Levels::flat(xa, xb, t));
    }
    below.reverse();
    below.extend(ribbons);
    below.extend(above);
    Some(below)
}

fn attempt(w: &Pattern2D, kept: &[Levels], b: Rect, m: i64) -> Option<Pattern2D> {
    let win = b.expand(m);
    let shape = w.shape();
    let mid = match kept.first() {
        Some(k) => k.heights().iter().sum::<i64>() / k.heights().len() as i64,
        None => b.y0 - 2,
    };
    let base = mid.div_euclid(4) * 4;
    let xh = xh_rules();
    let tries = [false, true]
        .into_iter()
        .flat_map(|pin| [0, 4, -4, 8, -8].into_iter().map(move |dt| (pin, dt)));
    for (pin, dt) in tries {
        for order in [Order::BottomUp, Order::TopDown] {
            let Some(ribbons) = assemble(kept, &shape, win, base + dt, order, pin) else {
                continue;
            };
            let p = render(&ribbons, win, H, ZERO);
            let frame_ok = p.cells().all(|((x, y), c)| !win.in_frame(x, y, FRAME) || c == flat_xh(Rect::new(x, y, 1, 1)).get(x, y).unwrap());
            if frame_ok && w.agrees_with(&p) && xh.validate(&p).unwrap_or(false) {
                return Some(p);
            }
        }
    }
    None
}

/// A window containing `w`, legal for `X_H`, equal to the flat point on
/// its outer frame of thickness 5 and agreeing with `w`. The window is the
/// bounding box of `w` grown by `margin` on every side.
///
/// When `margin` is too small the error reports the least margin that
/// works.
pub fn embed_homoclinic_xh(w: &Pattern2D, margin: i64) -> Result<Pattern2D> {
    let Some(b) = w.bbox() else {
        return Ok(flat_xh(Rect::new(-margin, -margin, 2 * margin + 1, 2 * margin + 1)));
    };
    if w.letters().iter().any(|&c| c != H && c != ZERO) {
        bail!(Alphabet, "pattern must be over {{0, H}}");
    }
    if !xh_rules().validate(w)? {
        bail!(Input, "pattern is not legal for X_H");
    }
    let kept = complete_segments(w, b)?;
    if margin >= FRAME + 1 {
        if let Some(p) = attempt(w, &kept, b, margin) {
            return Ok(p);
        }
    }
    for m in (margin + 1).max(FRAME + 1)..=EMBED_MARGIN_CAP {
        if attempt(w, &kept, b, m).is_some() {
            return Err(Error::Growth { given: margin, required: m });
        }
    }
    bail!(Construction, "no embedding found with margin up to {EMBED_MARGIN_CAP}");
}

/// Smallest margin for which [`embed_homoclinic_xh`] succeeds.
pub fn required_margin(w: &Pattern2D) -> Result<i64> {
    match embed_homoclinic_xh(w, 0) {
        Ok(_) => Ok(0),
        Err(Error::Growth { required, .. }) => Ok(required),
        Err(e) => Err(e),
    }
}

/// One random ribbon above `below` (or free when `None`) over columns
/// `0..g`, flat on the first and last two columns.
fn random_ribbon(rng: &mut ChaCha8Rng, g: i64, start: i64, below: Option<&Levels>) -> Option<Levels> {
    'attempt: for _ in 0..200 {
        let mut h = vec![start, start];
        let mut moved = false;
        for x in 1..g {
            let last = *h.last().expect("nonempty");
            let free = x >= 2 && x < g - 2 && !moved;
            let mut options: Vec<(i64, u32)> = vec![(0, 2)];
            if free {
                options.extend([(1, 1), (-1, 1)]);
            }
            options.retain(|&(d, _)| {
                let y = last + d;
                below.is_none_or(|b| {
                    let (_, bhi) = b.column(x);
                    (2..=4).contains(&(last.min(y) - bhi - 1))
                })
            });
            let total: u32 = options.iter().map(|o| o.1).sum();
            if total == 0 {
                continue 'attempt;
            }
            let mut pick = rng.gen_range(0..total);
            let d = options
                .iter()
                .find(|o| {
                    if pick < o.1 {
                        true
                    } else {
                        pick -= o.1;
                        false
                    }
                })
                .expect("weighted pick")
                .0;
            moved = d != 0;
            h.push(last + d);
        }
        return Some(Levels::new(-1, h));
    }
    None
}

/// A random window of at most `max_side × max_side` sites cut from a
/// configuration of random ribbons that extends to a point of `X_H`.
pub fn random_xh_window(seed: u64, max_side: i64) -> Pattern2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = max_side + 12;
    let n = max_side / 2 + 6;
    'config: loop {
        let mut ribbons: Vec<Levels> = Vec::new();
        for k in 0..n {
            let start = match ribbons.last() {
                Some(b) => b.at(-1) + rng.gen_range(3..=5),
                None => 0,
            };
            match random_ribbon(&mut rng, g, start, ribbons.last()) {
                Some(r) => ribbons.push(r),
                None if k == 0 => unreachable!("a free ribbon always exists"),
                None => continue 'config,
            }
        }
        let top_of_first = ribbons[0].heights().iter().max().copied().unwrap_or(0);
        let bottom_of_last = ribbons[n as usize - 1].heights().iter().min().copied().unwrap_or(0);
        let ww = rng.gen_range(1..=max_side);
        let hh = rng.gen_range(1..=max_side.min(bottom_of_last - top_of_first - 1).max(1));
        let x0 = rng.gen_range(2..=g - 2 - ww);
        let y0 = rng.gen_range(top_of_first + 1..=(bottom_of_last - hh).max(top_of_first + 1));
        let region = Rect::new(0, top_of_first - 8, g, bottom_of_last - top_of_first + 16);
        let full = render(&ribbons, region, H, ZERO);
        let (dx, dy) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6));
        return full.restrict(&Rect::new(x0, y0, ww, hh)).translate(dx, dy);
    }
}

/// Ribbon heights of a window at its left and right edges, for tests.
#[cfg(test)]
fn edge_heights(p: &Pattern2D) -> BTreeMap<i64, (i64, i64)> {
    let d = super::ribbon_trace(p).unwrap();
    d.ribbons
        .iter()
        .map(|r| (r.index, (r.levels.at(d.window.x0 - 1), r.levels.at(d.window.x1))))
        .collect()
}
