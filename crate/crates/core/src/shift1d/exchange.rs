//! Exchangeability of words, chain graphs and the finite-scale report on
//! periodic witnesses and chain connectivity.

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Write as _};

use rayon::prelude::*;

use super::{Presentation, Sft1D, StateSet};
use crate::error::{bail, Result};
use crate::words::Word;

/// Common annulus word: the outer `t` letters at each end of `[−N, N]`.
/// Between the annulus and the exchanged interval the two fillings may
/// differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Letters on `[−N, −N+t−1]`.
    pub left: Word,
    /// Letters on `[N−t+1, N]`.
    pub right: Word,
}

/// `n + 2t + 4`.
pub fn default_radius(n: usize, t: usize) -> usize {
    n + 2 * t + 4
}

pub fn exchangeable(x: &Sft1D, w: &Word, w2: &Word, radius: usize) -> Result<Option<Witness>> {
    exchangeable_in(&x.transfer_graph(), x.type_t(), w, w2, radius)
}

/// Searches an annulus word `δ` on `[−N, N] ∖ [−N+t, N−t]` such that `δw`
/// and `δw′` both extend to points. The first witness in letter order is
/// returned.
pub fn exchangeable_in(
    g: &Presentation,
    t: usize,
    w: &Word,
    w2: &Word,
    radius: usize,
) -> Result<Option<Witness>> {
    if w.len() != w2.len() || w.offset() != w2.offset() {
        bail!(Input, "'{w}' and '{w2}' sit on different intervals");
    }
    for u in [w, w2] {
        if !g.accepts(u.letters()) {
            bail!(Input, "'{}' does not occur in the subshift", u.as_str());
        }
    }
    let n = radius as i64;
    let (s, e) = (w.offset(), w.end());
    if t == 0 || s < -n + t as i64 || e > n - t as i64 {
        bail!(
            Input,
            "interval [{s},{e}] leaves no annulus of thickness {t} inside [-{n},{n}]"
        );
    }
    let mut search = Search {
        g,
        a: w.letters(),
        b: w2.letters(),
        t,
        gap_left: (s - (-n + t as i64)) as usize,
        gap_right: ((n - t as i64) - e) as usize,
        dead_left: HashSet::new(),
        dead_right: HashSet::new(),
        left: Vec::with_capacity(t),
        right: Vec::with_capacity(t),
    };
    let found = search.left_part(&g.essential_states(), t);
    Ok(found.then(|| Witness {
        left: Word::at(-n, search.left),
        right: Word::at(n - t as i64 + 1, search.right),
    }))
}

struct Search<'a> {
    g: &'a Presentation,
    a: &'a [u8],
    b: &'a [u8],
    t: usize,
    gap_left: usize,
    gap_right: usize,
    dead_left: HashSet<(usize, StateSet)>,
    dead_right: HashSet<(usize, StateSet, StateSet)>,
    left: Vec<u8>,
    right: Vec<u8>,
}

impl Search<'_> {
    /// States reachable from `set` after `k` arbitrary letters.
    fn free(&self, set: &StateSet, k: usize) -> StateSet {
        let mut cur = set.clone();
        for _ in 0..k {
            let mut next = StateSet::empty(self.g.vertex_count());
            for &c in self.g.alphabet() {
                for v in self.g.step(&cur, c).iter() {
                    next.insert(v);
                }
            }
            cur = next;
        }
        cur
    }

    fn through(&self, set: &StateSet, word: &[u8]) -> StateSet {
        let inner = self.g.run(&self.free(set, self.gap_left), word);
        self.free(&inner, self.gap_right)
    }

    fn left_part(&mut self, set: &StateSet, remaining: usize) -> bool {
        if set.is_empty() || self.dead_left.contains(&(remaining, set.clone())) {
            return false;
        }
        if remaining == 0 {
            let pa = self.through(set, self.a);
            let pb = self.through(set, self.b);
            return self.right_part(&pa, &pb, self.t);
        }
        for &c in self.g.alphabet() {
            self.left.push(c);
            if self.left_part(&self.g.step(set, c), remaining - 1) {
                return true;
            }
            self.left.pop();
        }
        self.dead_left.insert((remaining, set.clone()));
        false
    }

    fn right_part(&mut self, pa: &StateSet, pb: &StateSet, remaining: usize) -> bool {
        if pa.is_empty() || pb.is_empty() {
            return false;
        }
        if remaining == 0 {
            return true;
        }
        let key = (remaining, pa.clone(), pb.clone());
        if self.dead_right.contains(&key) {
            return false;
        }
        for &c in self.g.alphabet() {
            self.right.push(c);
            if self.right_part(&self.g.step(pa, c), &self.g.step(pb, c), remaining - 1) {
                return true;
            }
            self.right.pop();
        }
        self.dead_right.insert(key);
        false
    }
}

/// Words of one length linked by exchangeability at a fixed radius.
#[derive(Clone, Debug)]
pub struct ChainGraph {
    pub n: usize,
    pub radius: usize,
    pub nodes: Vec<Word>,
    /// `(i, j, δ)` with `i < j`.
    pub edges: Vec<(usize, usize, Witness)>,
    /// Node indices per component, components ordered by least member.
    pub components: Vec<Vec<usize>>,
    /// Graph diameter of each component, aligned with `components`.
    pub diameters: Vec<usize>,
}

impl ChainGraph {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    /// Diameter when connected; `None` flags a disconnected graph.
    pub fn diameter(&self) -> Option<usize> {
        self.is_connected()
            .then(|| self.diameters.first().copied().unwrap_or(0))
    }

    pub fn is_complete(&self) -> bool {
        let k = self.nodes.len();
        self.edges.len() == k * k.saturating_sub(1) / 2
    }

    /// `node <i> <word>` lines, then `edge <i> <j> <left>|<right>` lines.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# n={} radius={}\n", self.n, self.radius);
        for (i, w) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "node {i} {}", w.as_str());
        }
        for (i, j, d) in &self.edges {
            let _ = writeln!(s, "edge {i} {j} {}|{}", d.left.as_str(), d.right.as_str());
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph chain {\n");
        for w in &self.nodes {
            let _ = writeln!(s, "  \"{}\";", w.as_str());
        }
        for (i, j, _) in &self.edges {
            let _ = writeln!(s, "  \"{}\" -- \"{}\";", self.nodes[*i].as_str(), self.nodes[*j].as_str());
        }
        s.push_str("}\n");
        s
    }
}

pub fn chain_graph(x: &Sft1D, n: usize, radius: usize) -> Result<ChainGraph> {
    chain_graph_on(&x.transfer_graph(), x.type_t(), n, radius)
}

/// Chain graph on the length-`n` words placed at `[0, n−1]`.
pub fn chain_graph_on(g: &Presentation, t: usize, n: usize, radius: usize) -> Result<ChainGraph> {
    if n == 0 {
        bail!(Input, "word length must be positive");
    }
    if radius <= n + t {
        bail!(Input, "radius {radius} must exceed n + t = {}", n + t);
    }
    let nodes = g.language(n);
    let pairs: Vec<(usize, usize)> = (0..nodes.len())
        .flat_map(|i| (i + 1..nodes.len()).map(move |j| (i, j)))
        .collect();
    let found: Vec<Option<(usize, usize, Witness)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            exchangeable_in(g, t, &nodes[i], &nodes[j], radius)
                .map(|d| d.map(|d| (i, j, d)))
        })
        .collect::<Result<_>>()?;
    let edges: Vec<_> = found.into_iter().flatten().collect();

    let mut adj = vec![Vec::new(); nodes.len()];
    for (i, j, _) in &edges {
        adj[*i].push(*j);
        adj[*j].push(*i);
    }
    let mut comp_of = vec![usize::MAX; nodes.len()];
    let mut components = Vec::new();
    for start in 0..nodes.len() {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp_of[start] = id;
        let mut k = 0;
        while k < members.len() {
            for &v in &adj[members[k]] {
                if comp_of[v] == usize::MAX {
                    comp_of[v] = id;
                    members.push(v);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        components.push(members);
    }
    let diameters = components
        .iter()
        .map(|c| c.iter().map(|&v| eccentricity(&adj, v)).max().unwrap_or(0))
        .collect();
    Ok(ChainGraph { n, radius, nodes, edges, components, diameters })
}

fn eccentricity(adj: &[Vec<usize>], from: usize) -> usize {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    let mut far = 0;
    while let Some(v) = queue.pop_front() {
        far = far.max(dist[v]);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// A period `p` such that `p^∞` is a point with `w` at index 0, so `w`
/// occurs with positive frequency. `None` when no cycle carries `w`.
pub fn positive_frequency_witness(x: &Sft1D, w: &Word) -> Result<Option<Word>> {
    let g = x.transfer_graph();
    if !g.accepts(w.letters()) {
        bail!(Input, "'{}' does not occur in the subshift", w.as_str());
    }
    Ok(g.cycle_through(w.letters()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub n: usize,
    pub words: usize,
    pub radius: usize,
    /// Words lacking a periodic witness.
    pub aperiodic: Vec<Word>,
    pub components: usize,
    pub diameter: Option<usize>,
}

impl ReportRow {
    pub fn passes(&self) -> bool {
        self.aperiodic.is_empty() && self.components <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZtcpeReport {
    pub rows: Vec<ReportRow>,
}

impl ZtcpeReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(ReportRow::passes)
    }

    pub fn diameters(&self) -> Vec<Option<usize>> {
        self.rows.iter().map(|r| r.diameter).collect()
    }

    /// First failing length and the reason.
    pub fn failure(&self) -> Option<(usize, String)> {
        let row = self.rows.iter().find(|r| !r.passes())?;
        let why = if row.components > 1 {
            format!("chain graph disconnected ({} components)", row.components)
        } else {
            format!("no periodic witness for '{}'", row.aperiodic[0].as_str())
        };
        Some((row.n, why))
    }
}

impl fmt::Display for ZtcpeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let d = r.diameter.map_or("inf".to_string(), |d| d.to_string());
            writeln!(
                f,
                "n={} words={} radius={} periodic={} components={} diameter={}",
                r.n,
                r.words,
                r.radius,
                if r.aperiodic.is_empty() { "yes" } else { "no" },
                r.components,
                d
            )?;
        }
        match self.failure() {
            None => write!(f, "PASS"),
            Some((n, why)) => write!(f, "FAIL: {why} at n={n}"),
        }
    }
}

/// Runs lengths `1..=n_max`; the radius defaults to [`default_radius`].
pub fn ztcpe_report(x: &Sft1D, n_max: usize, radius: Option<usize>) -> Result<ZtcpeReport> {
    ztcpe_report_on(&x.transfer_graph(), x.type_t(), n_max, radius)
}

pub fn ztcpe_report_on(
    g: &Presentation,
    t: usize,
    n_max: usize,
    radius: Option<usize>,
) -> Result<ZtcpeReport> {
    if g.is_empty() {
        bail!(Domain, "the subshift is empty");
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let r = radius.unwrap_or_else(|| default_radius(n, t));
        let cg = chain_graph_on(g, t, n, r)?;
        let aperiodic = cg
            .nodes
            .iter()
            .filter(|w| g.cycle_through(w.letters()).is_none())
            .cloned()
            .collect();
        rows.push(ReportRow {
            n,
            words: cg.nodes.len(),
            radius: r,
            aperiodic,
            components: cg.components.len(),
            diameter: cg.diameter(),
        });
    }
    Ok(ZtcpeReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Sft1D {
        Sft1D::from_strs("01", &["11"]).unwrap()
    }

    #[test]
    fn exchange_examples() {
        let d = exchangeable(&golden(), &Word::from("0"), &Word::from("1"), 3)
            .unwrap()
            .unwrap();
        assert_eq!(d.left, Word::at(-3, *b"00"));
        assert_eq!(d.right, Word::at(2, *b"00"));
        let split = Sft1D::from_strs("01", &["01", "10"]).unwrap();
        assert!(exchangeable(&split, &"0".into(), &"1".into(), 5).unwrap().is_none());
        assert!(exchangeable(&golden(), &"11".into(), &"00".into(), 6).is_err());
        assert!(exchangeable(&golden(), &"0".into(), &"1".into(), 1).is_err());
    }

    #[test]
    fn chain_graph_examples() {
        let cg = chain_graph(&golden(), 2, 6).unwrap();
        assert!(cg.is_connected());
        assert_eq!(cg.diameter(), Some(1));
        let split = Sft1D::from_strs("01", &["01", "10"]).unwrap();
        let cg = chain_graph(&split, 1, 6).unwrap();
        assert_eq!(cg.components.len(), 2);
        assert_eq!(cg.diameter(), None);
        let full = Sft1D::full_shift(b"01").unwrap();
        assert!(chain_graph(&full, 3, 8).unwrap().is_complete());
        assert!(cg.to_dot().starts_with("graph chain {"));
        assert!(cg.to_edge_list().contains("node 1 1"));
    }

    #[test]
    fn frequency_witnesses() {
        let p = positive_frequency_witness(&golden(), &"010".into()).unwrap();
        assert_eq!(p.unwrap().as_str(), "010");
        let full = Sft1D::full_shift(b"01").unwrap();
        let p = positive_frequency_witness(&full, &"0110".into()).unwrap();
        assert_eq!(p.unwrap().as_str(), "0110");
        let alt = Sft1D::from_strs("ab", &["aa", "bb"]).unwrap();
        let p = positive_frequency_witness(&alt, &"ab".into()).unwrap();
        assert_eq!(p.unwrap().as_str(), "ab");
        // 0^∞1^∞ carries 01 but no cycle does
        let step = Sft1D::from_strs("01", &["10"]).unwrap();
        assert!(positive_frequency_witness(&step, &"01".into()).unwrap().is_none());
    }

    #[test]
    fn reports() {
        let split = Sft1D::from_strs("01", &["01", "10"]).unwrap();
        let r = ztcpe_report(&split, 1, Some(6)).unwrap();
        assert!(!r.passes());
        assert_eq!(r.failure().unwrap().0, 1);
        let r = ztcpe_report(&golden(), 3, Some(8)).unwrap();
        assert!(r.passes());
        assert_eq!(r.diameters(), vec![Some(1); 3]);
        let full = Sft1D::full_shift(b"01").unwrap();
        let r = ztcpe_report(&full, 2, Some(6)).unwrap();
        assert!(r.passes());
        assert!(r.to_string().ends_with("PASS"));
    }
}
