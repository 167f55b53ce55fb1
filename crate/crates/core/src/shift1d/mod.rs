//! One-dimensional shifts of finite type.

mod exchange;
mod presentation;

pub use exchange::{
    chain_graph, chain_graph_on, default_radius, exchangeable, exchangeable_in,
    positive_frequency_witness, ztcpe_report, ztcpe_report_on, ChainGraph, ReportRow, Witness,
    ZtcpeReport,
};
pub use presentation::{Presentation, StateSet};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::words::{contains, Word};

/// `X(F)` over a finite alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sft1D {
    alphabet: Vec<u8>,
    forbidden: Vec<Word>,
    type_t: usize,
}

impl Sft1D {
    pub fn new(alphabet: &[u8], forbidden: Vec<Word>) -> Result<Self> {
        let alphabet: Vec<u8> = alphabet.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if alphabet.is_empty() {
            bail!(Alphabet, "empty alphabet");
        }
        for f in &forbidden {
            if f.is_empty() {
                bail!(Input, "empty forbidden word");
            }
            if let Some(c) = f.letters().iter().find(|c| !alphabet.contains(c)) {
                bail!(Alphabet, "forbidden word '{}' uses '{}'", f.as_str(), *c as char);
            }
        }
        let type_t = forbidden.iter().map(Word::len).max().unwrap_or(1);
        Ok(Sft1D { alphabet, forbidden, type_t })
    }

    /// `Sft1D::from_strs("01", &["11"])` is the golden mean shift.
    pub fn from_strs(alphabet: &str, forbidden: &[&str]) -> Result<Self> {
        Sft1D::new(alphabet.as_bytes(), forbidden.iter().map(|&s| Word::from(s)).collect())
    }

    pub fn full_shift(alphabet: &[u8]) -> Result<Self> {
        Sft1D::new(alphabet, Vec::new())
    }

    /// First non-comment line: the alphabet letters. Every further line is
    /// one forbidden word. Commas and whitespace separate letters freely.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("missing alphabet line".into()))?;
        let alphabet: Vec<u8> = head
            .bytes()
            .filter(|c| !c.is_ascii_whitespace() && *c != b',')
            .collect();
        let forbidden = lines.map(Word::from).collect();
        Sft1D::new(&alphabet, forbidden)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from_utf8_lossy(&self.alphabet).into_owned();
        s.push('\n');
        for f in &self.forbidden {
            s.push_str(f.as_str());
            s.push('\n');
        }
        s
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    /// Longest forbidden word, at least 1.
    pub fn type_t(&self) -> usize {
        self.type_t
    }

    /// No forbidden word occurs in `w`.
    pub fn is_locally_admissible(&self, w: &[u8]) -> bool {
        self.forbidden.iter().all(|f| !contains(w, f.letters()))
    }

    /// The transfer graph: vertices are admissible words of length
    /// `max(t−1, 1)`, and an edge appends one letter when the resulting
    /// word of length `max(t, 2)` is admissible. Edges are labelled by the
    /// appended letter.
    pub fn transfer_graph(&self) -> Presentation {
        let l = self.type_t.saturating_sub(1).max(1);
        let mut vertices: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..l {
            let mut next = Vec::new();
            for v in &vertices {
                for &c in &self.alphabet {
                    let mut w = v.clone();
                    w.push(c);
                    if self.is_locally_admissible(&w) {
                        next.push(w);
                    }
                }
            }
            vertices = next;
        }
        let index = |w: &[u8]| vertices.binary_search_by(|v| v.as_slice().cmp(w)).ok();
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            for &c in &self.alphabet {
                let mut w = v.clone();
                w.push(c);
                if !self.is_locally_admissible(&w) {
                    continue;
                }
                if let Some(j) = index(&w[1..]) {
                    edges.push((i, c, j));
                }
            }
        }
        let names = vertices
            .iter()
            .map(|v| String::from_utf8_lossy(v).into_owned())
            .collect();
        Presentation::new(self.alphabet.clone(), names, &edges)
    }

    pub fn language(&self, n: usize) -> Vec<Word> {
        self.transfer_graph().language(n)
    }

    pub fn contains_word(&self, w: &[u8]) -> bool {
        self.transfer_graph().accepts(w)
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        let g = self.nonempty_graph()?;
        Ok(g.is_irreducible())
    }

    pub fn is_mixing(&self) -> Result<bool> {
        let g = self.nonempty_graph()?;
        Ok(g.is_mixing())
    }

    /// Natural-log entropy, accurate to about `1e−10`.
    pub fn entropy(&self) -> Result<f64> {
        self.nonempty_graph()?
            .entropy()
            .ok_or_else(|| Error::Domain("empty subshift".into()))
    }

    fn nonempty_graph(&self) -> Result<Presentation> {
        let g = self.transfer_graph();
        if g.is_empty() {
            bail!(Domain, "the subshift is empty");
        }
        Ok(g)
    }
}

impl fmt::Display for Sft1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<&str> = self.forbidden.iter().map(Word::as_str).collect();
        write!(
            f,
            "X(F) over {{{}}} with F = {{{}}}",
            String::from_utf8_lossy(&self.alphabet),
            words.join(",")
        )
    }
}
