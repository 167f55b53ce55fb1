//! Backtracking fill of a rectangle with forward checking.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Pattern2D, Rect, Sft2D};
use crate::error::{bail, Result};

#[derive(Clone, Debug, Default)]
pub struct FillOptions {
    /// Give up after this many search nodes.
    pub max_nodes: Option<u64>,
    /// Shuffle the value order at every node with this seed.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillOutcome {
    Filled(Pattern2D),
    Unsatisfiable,
    BudgetExhausted,
}

impl FillOutcome {
    pub fn pattern(self) -> Option<Pattern2D> {
        match self {
            FillOutcome::Filled(p) => Some(p),
            _ => None,
        }
    }
}

/// A fill of `target` where each site ranges over a subset of the
/// alphabet. Forbidden patterns are checked only where they fit inside
/// the target.
#[derive(Clone, Debug)]
pub struct FillProblem<'a> {
    sft: &'a Sft2D,
    target: Rect,
    domains: Vec<u64>,
    focus: Option<(f64, f64)>,
}

impl<'a> FillProblem<'a> {
    pub fn new(sft: &'a Sft2D, target: Rect) -> Self {
        let all = if sft.alphabet().len() == 64 { u64::MAX } else { (1u64 << sft.alphabet().len()) - 1 };
        let n = (target.width() * target.height()) as usize;
        FillProblem { sft, target, domains: vec![all; n], focus: None }
    }

    fn index(&self, x: i64, y: i64) -> Result<usize> {
        if !self.target.contains(x, y) {
            bail!(Input, "site ({x},{y}) is outside the target {}", self.target);
        }
        Ok(((y - self.target.y0) * self.target.width() + (x - self.target.x0)) as usize)
    }

    fn letter_index(&self, c: u8) -> Result<usize> {
        match self.sft.alphabet().iter().position(|&a| a == c) {
            Some(i) => Ok(i),
            None => bail!(Alphabet, "letter '{}' is not in the alphabet", c as char),
        }
    }

    /// Restrict a site to the given letters.
    pub fn restrict(&mut self, x: i64, y: i64, letters: &[u8]) -> Result<&mut Self> {
        let i = self.index(x, y)?;
        let mut mask = 0u64;
        for &c in letters {
            mask |= 1 << self.letter_index(c)?;
        }
        self.domains[i] &= mask;
        Ok(self)
    }

    pub fn fix(&mut self, x: i64, y: i64, c: u8) -> Result<&mut Self> {
        self.restrict(x, y, &[c])
    }

    pub fn fix_all(&mut self, p: &Pattern2D) -> Result<&mut Self> {
        for ((x, y), c) in p.cells() {
            self.fix(x, y, c)?;
        }
        if let Some(r) = p.bbox() {
            self.focus = Some(((r.y0 + r.y1) as f64 / 2.0, (r.x0 + r.x1) as f64 / 2.0));
        }
        Ok(self)
    }

    pub fn solve(&self, opts: &FillOptions) -> FillOutcome {
        if self.target.is_empty() {
            return FillOutcome::Filled(Pattern2D::new());
        }
        let mut s = Solver::build(self, opts);
        match s.run() {
            Some(true) => FillOutcome::Filled(s.pattern()),
            Some(false) => FillOutcome::Unsatisfiable,
            None => FillOutcome::BudgetExhausted,
        }
    }
}

/// Complete `partial` to a pattern on `target` with no forbidden pattern
/// inside `target`.
pub fn fill_rectangle(x: &Sft2D, partial: &Pattern2D, target: Rect) -> Result<Option<Pattern2D>> {
    let mut prob = FillProblem::new(x, target);
    prob.fix_all(partial)?;
    Ok(prob.solve(&FillOptions::default()).pattern())
}

/// As [`fill_rectangle`], with the outer frame of the given thickness
/// pinned to the point `frame`, so the fill extends by that point.
pub fn fill_rectangle_framed(
    x: &Sft2D,
    partial: &Pattern2D,
    target: Rect,
    frame: impl Fn(i64, i64) -> u8,
    thickness: i64,
) -> Result<Option<Pattern2D>> {
    let mut prob = FillProblem::new(x, target);
    prob.fix_all(partial)?;
    for (px, py) in target.sites() {
        if target.in_frame(px, py, thickness) {
            prob.fix(px, py, frame(px, py))?;
        }
    }
    Ok(prob.solve(&FillOptions::default()).pattern())
}

const UNSET: u8 = u8::MAX;

struct Solver<'a> {
    target: Rect,
    alphabet: &'a [u8],
    domain: Vec<u64>,
    value: Vec<u8>,
    rank: Vec<u32>,
    placements: Vec<Vec<(u32, u8)>>,
    by_cell: Vec<Vec<(u32, u8)>>,
    broken: Vec<u16>,
    matched: Vec<u16>,
    trail: Vec<(u32, u64)>,
    nodes: u64,
    max_nodes: u64,
    rng: Option<ChaCha8Rng>,
}

impl<'a> Solver<'a> {
    fn build(prob: &FillProblem<'a>, opts: &FillOptions) -> Self {
        let t = prob.target;
        let w = t.width();
        let idx = |x: i64, y: i64| ((y - t.y0) * w + (x - t.x0)) as u32;
        let alphabet = prob.sft.alphabet();
        let n = prob.domains.len();
        let mut placements = Vec::new();
        let mut by_cell = vec![Vec::new(); n];
        for f in prob.sft.forbidden() {
            let r = f.bbox().expect("nonempty");
            let cells: Vec<((i64, i64), u8)> = f
                .cells()
                .map(|(k, c)| (k, alphabet.iter().position(|&a| a == c).expect("checked") as u8))
                .collect();
            for oy in t.y0..=t.y1 - r.y1 {
                for ox in t.x0..=t.x1 - r.x1 {
                    let pid = placements.len() as u32;
                    let pl: Vec<(u32, u8)> =
                        cells.iter().map(|&((x, y), c)| (idx(x + ox, y + oy), c)).collect();
                    for &(cell, c) in &pl {
                        by_cell[cell as usize].push((pid, c));
                    }
                    placements.push(pl);
                }
            }
        }
        let (fy, fx) = prob.focus.unwrap_or(((t.y0 + t.y1) as f64 / 2.0, t.x0 as f64));
        let mut order: Vec<usize> = (0..n).collect();
        let key = |i: usize| {
            let (x, y) = (t.x0 + i as i64 % w, t.y0 + i as i64 / w);
            ((2.0 * (y as f64 - fy).abs()) as i64, (2.0 * (x as f64 - fx).abs()) as i64, y, x)
        };
        order.sort_by_key(|&i| key(i));
        let mut rank = vec![0u32; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as u32;
        }
        let np = placements.len();
        Solver {
            target: t,
            alphabet,
            domain: prob.domains.clone(),
            value: vec![UNSET; n],
            rank,
            placements,
            by_cell,
            broken: vec![0; np],
            matched: vec![0; np],
            trail: Vec::new(),
            nodes: 0,
            max_nodes: opts.max_nodes.unwrap_or(u64::MAX),
            rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
        }
    }

    fn pattern(&self) -> Pattern2D {
        let w = self.target.width();
        Pattern2D::from_cells(self.value.iter().enumerate().map(|(i, &v)| {
            let (x, y) = (self.target.x0 + i as i64 % w, self.target.y0 + i as i64 / w);
            ((x, y), self.alphabet[v as usize])
        }))
    }

    fn remove(&mut self, cell: u32, c: u8) -> bool {
        let d = self.domain[cell as usize];
        if d & (1 << c) != 0 {
            self.trail.push((cell, d));
            self.domain[cell as usize] = d & !(1 << c);
        }
        self.domain[cell as usize] != 0
    }

    /// Assign and forward check. Counters are always fully updated so
    /// that `unassign` can reverse them.
    fn assign(&mut self, cell: u32, v: u8) -> bool {
        self.value[cell as usize] = v;
        let mut ok = true;
        for k in 0..self.by_cell[cell as usize].len() {
            let (pid, c) = self.by_cell[cell as usize][k];
            let p = pid as usize;
            if c != v {
                self.broken[p] += 1;
                continue;
            }
            self.matched[p] += 1;
            if self.broken[p] != 0 || !ok {
                continue;
            }
            let size = self.placements[p].len() as u16;
            if self.matched[p] == size {
                ok = false;
            } else if self.matched[p] + 1 == size {
                let (u, req) = *self.placements[p]
                    .iter()
                    .find(|&&(u, _)| self.value[u as usize] == UNSET)
                    .expect("one site left");
                ok = self.remove(u, req);
            }
        }
        ok
    }

    fn unassign(&mut self, cell: u32) {
        let v = self.value[cell as usize];
        for &(pid, c) in &self.by_cell[cell as usize] {
            if c != v {
                self.broken[pid as usize] -= 1;
            } else {
                self.matched[pid as usize] -= 1;
            }
        }
        self.value[cell as usize] = UNSET;
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (cell, d) = self.trail.pop().expect("nonempty");
            self.domain[cell as usize] = d;
        }
    }

    fn pick(&self) -> Option<u32> {
        let mut best: Option<(u32, u32, u32)> = None;
        for (i, &v) in self.value.iter().enumerate() {
            if v != UNSET {
                continue;
            }
            let key = (self.domain[i].count_ones(), self.rank[i], i as u32);
            if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                best = Some(key);
            }
        }
        best.map(|b| b.2)
    }

    /// `Some(true)` solved, `Some(false)` exhausted, `None` over budget.
    fn run(&mut self) -> Option<bool> {
        if self.domain.contains(&0) {
            return Some(false);
        }
        // single-site patterns
        for p in 0..self.placements.len() {
            if let [(u, c)] = self.placements[p][..] {
                if !self.remove(u, c) {
                    return Some(false);
                }
            }
        }
        self.trail.clear();
        self.search()
    }

    fn search(&mut self) -> Option<bool> {
        let Some(cell) = self.pick() else {
            return Some(true);
        };
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        let d = self.domain[cell as usize];
        let mut vals: Vec<u8> = (0..64u8).filter(|&c| d & (1 << c) != 0).collect();
        if let Some(rng) = self.rng.as_mut() {
            vals.shuffle(rng);
        }
        for v in vals {
            let mark = self.trail.len();
            if self.assign(cell, v) {
                match self.search() {
                    Some(false) => {}
                    other => return other,
                }
            }
            self.unassign(cell);
            self.undo_to(mark);
        }
        Some(false)
    }
}
