//! Edge-labelled graphs presenting one-dimensional subshifts.
//!
//! A point is the label sequence of a biinfinite path. Only vertices that
//! lie on such a path (reachable from a cycle and reaching a cycle) matter,
//! and every search here runs on that essential part.

use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::words::Word;

/// A set of vertices, packed into 64-bit blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<u64>);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(vec![0; n.div_ceil(64)])
    }

    pub fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &block)| {
            (0..64).filter(move |b| block >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

#[derive(Clone, Debug)]
pub struct Presentation {
    alphabet: Vec<u8>,
    names: Vec<String>,
    /// `succ[v]` lists `(label index, target)`.
    succ: Vec<Vec<(usize, usize)>>,
    essential: Vec<bool>,
}

impl Presentation {
    /// Builds a presentation; edge labels must belong to `alphabet`.
    pub fn new(alphabet: Vec<u8>, names: Vec<String>, edges: &[(usize, u8, usize)]) -> Self {
        let n = names.len();
        let mut succ = vec![Vec::new(); n];
        for &(from, label, to) in edges {
            let li = alphabet
                .iter()
                .position(|&c| c == label)
                .expect("edge label outside the alphabet");
            succ[from].push((li, to));
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let essential = essential_vertices(&succ);
        Presentation { alphabet, names, succ, essential }
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn is_essential(&self, v: usize) -> bool {
        self.essential[v]
    }

    /// True when no biinfinite path exists.
    pub fn is_empty(&self) -> bool {
        !self.essential.iter().any(|&e| e)
    }

    /// Essential edges as `(from, label, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, u8, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(move |(v, out)| {
            out.iter()
                .filter(move |&&(_, to)| self.essential[v] && self.essential[to])
                .map(move |&(l, to)| (v, self.alphabet[l], to))
        })
    }

    pub fn essential_states(&self) -> StateSet {
        let mut s = StateSet::empty(self.vertex_count());
        for v in (0..self.vertex_count()).filter(|&v| self.essential[v]) {
            s.insert(v);
        }
        s
    }

    fn letter_index(&self, c: u8) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == c)
    }

    /// Follows every essential edge labelled `c` out of `from`.
    pub fn step(&self, from: &StateSet, c: u8) -> StateSet {
        let mut out = StateSet::empty(self.vertex_count());
        let Some(li) = self.letter_index(c) else {
            return out;
        };
        for v in from.iter() {
            for &(l, to) in &self.succ[v] {
                if l == li && self.essential[to] {
                    out.insert(to);
                }
            }
        }
        out
    }

    pub fn run(&self, from: &StateSet, word: &[u8]) -> StateSet {
        word.iter().fold(from.clone(), |s, &c| self.step(&s, c))
    }

    /// Whether `word` occurs in some point.
    pub fn accepts(&self, word: &[u8]) -> bool {
        !self.run(&self.essential_states(), word).is_empty()
    }

    /// All length-`n` words occurring in points, in alphabet order.
    pub fn language(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(n);
        self.extend_language(&self.essential_states(), n, &mut buf, &mut out);
        out
    }

    fn extend_language(&self, set: &StateSet, n: usize, buf: &mut Vec<u8>, out: &mut Vec<Word>) {
        if set.is_empty() {
            return;
        }
        if buf.len() == n {
            out.push(Word::new(buf.clone()));
            return;
        }
        for &c in &self.alphabet {
            let next = self.step(set, c);
            buf.push(c);
            self.extend_language(&next, n, buf, out);
            buf.pop();
        }
    }

    /// Strongly connected components of the essential graph that carry a
    /// cycle, each sorted, in order of least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.vertex_count()).map(|_| g.add_node(())).collect();
        for (v, _, to) in self.edges() {
            g.add_edge(nodes[v], nodes[to], ());
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .filter(|c| {
                self.essential[c[0]]
                    && (c.len() > 1 || self.succ[c[0]].iter().any(|&(_, to)| to == c[0]))
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn is_irreducible(&self) -> bool {
        let comps = self.components();
        let ess = self.essential.iter().filter(|&&e| e).count();
        comps.len() == 1 && comps[0].len() == ess
    }

    /// gcd of cycle lengths inside the component containing `comp[0]`.
    pub fn period(&self, comp: &[usize]) -> usize {
        let inside: BTreeSet<usize> = comp.iter().copied().collect();
        let mut level = vec![usize::MAX; self.vertex_count()];
        level[comp[0]] = 0;
        let mut queue = VecDeque::from([comp[0]]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &(_, to) in &self.succ[v] {
                if !inside.contains(&to) {
                    continue;
                }
                if level[to] == usize::MAX {
                    level[to] = level[v] + 1;
                    queue.push_back(to);
                } else {
                    let diff = (level[v] + 1).abs_diff(level[to]);
                    g = num_integer::gcd(g, diff);
                }
            }
        }
        g
    }

    pub fn is_mixing(&self) -> bool {
        self.is_irreducible() && self.period(&self.components()[0]) == 1
    }

    /// Spectral radius of the adjacency matrix of one component.
    ///
    /// Power iteration on `A + I`, which is primitive on an irreducible
    /// component, stopped once the Collatz–Wielandt bounds agree to a
    /// relative `tol`.
    pub fn spectral_radius(&self, comp: &[usize], tol: f64) -> f64 {
        let index = |v: usize| comp.binary_search(&v).ok();
        let adj: Vec<Vec<usize>> = comp
            .iter()
            .map(|&v| self.succ[v].iter().filter_map(|&(_, to)| index(to)).collect())
            .collect();
        let mut x = vec![1.0f64; comp.len()];
        let mut rho = 1.0;
        for _ in 0..1_000_000 {
            let y: Vec<f64> = (0..comp.len())
                .map(|i| x[i] + adj[i].iter().map(|&j| x[j]).sum::<f64>())
                .collect();
            let (lo, hi) = y
                .iter()
                .zip(&x)
                .map(|(a, b)| a / b)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
            rho = 0.5 * (lo + hi);
            if hi - lo <= tol * hi {
                break;
            }
            let norm = y.iter().cloned().fold(0.0, f64::max);
            x = y.into_iter().map(|v| v / norm).collect();
        }
        rho - 1.0
    }

    /// Natural-log entropy of the label shift; exact for right-resolving
    /// presentations such as the transfer graphs built here. `None` when
    /// the shift is empty.
    pub fn entropy(&self) -> Option<f64> {
        let comps = self.components();
        if comps.is_empty() {
            return None;
        }
        let rho = comps
            .iter()
            .map(|c| self.spectral_radius(c, 1e-12))
            .fold(0.0, f64::max);
        Some(rho.ln())
    }

    /// Shortest period word `p` with `word` a prefix of `p^∞` and `p^∞` a
    /// point; ties go to the lexicographically least `p`.
    pub fn cycle_through(&self, word: &[u8]) -> Option<Word> {
        let n = self.vertex_count();
        let mut best: Option<Vec<u8>> = None;
        for s in (0..n).filter(|&v| self.essential[v]) {
            let mut start = StateSet::empty(n);
            start.insert(s);
            let ends = self.run(&start, word);
            for e in ends.iter() {
                let Some(back) = self.shortest_labels(e, s) else {
                    continue;
                };
                if word.is_empty() && back.is_empty() {
                    continue;
                }
                let mut p = word.to_vec();
                p.extend(back);
                let better = match &best {
                    None => true,
                    Some(b) => (p.len(), &p) < (b.len(), b),
                };
                if better {
                    best = Some(p);
                }
            }
        }
        best.map(Word::new)
    }

    /// Labels of a shortest essential path from `from` to `to`; for
    /// `from == to` the empty path.
    fn shortest_labels(&self, from: usize, to: usize) -> Option<Vec<u8>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut prev = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(l, w) in &self.succ[v] {
                if !self.essential[w] || seen[w] {
                    continue;
                }
                seen[w] = true;
                prev[w] = Some((v, self.alphabet[l]));
                if w == to {
                    let mut labels = Vec::new();
                    let mut cur = to;
                    while let Some((p, c)) = prev[cur] {
                        labels.push(c);
                        cur = p;
                    }
                    labels.reverse();
                    return Some(labels);
                }
                queue.push_back(w);
            }
        }
        None
    }
}

fn essential_vertices(succ: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let n = succ.len();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (v, out) in succ.iter().enumerate() {
        for &(_, to) in out {
            g.add_edge(nodes[v], nodes[to], ());
        }
    }
    let mut on_cycle = vec![false; n];
    for comp in tarjan_scc(&g) {
        let v = comp[0].index();
        if comp.len() > 1 || succ[v].iter().any(|&(_, to)| to == v) {
            for c in comp {
                on_cycle[c.index()] = true;
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for (v, out) in succ.iter().enumerate() {
        for &(_, to) in out {
            pred[to].push(v);
        }
    }
    let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
        let mut seen = on_cycle.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&v| on_cycle[v]).collect();
        while let Some(v) = stack.pop() {
            for w in adj(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let forward = reach(&|v| succ[v].iter().map(|&(_, t)| t).collect());
    let backward = reach(&|v| pred[v].clone());
    (0..n).map(|v| forward[v] && backward[v]).collect()
}
