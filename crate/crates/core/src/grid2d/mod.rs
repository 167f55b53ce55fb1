//! Two-dimensional patterns and shifts of finite type, the ribbon shifts
//! `X_H` and `X_V`, and the homoclinic embedding into `X_H`.

mod embed;
mod fill;
mod levels;
mod ribbons;

pub use embed::{embed_homoclinic_xh, random_xh_window, required_margin, EMBED_MARGIN_CAP};
pub use fill::{fill_rectangle, fill_rectangle_framed, FillOptions, FillOutcome, FillProblem};
pub use levels::{render as render_ribbons, Levels};
pub use ribbons::{
    crossing_map, crossing_sites, flat_xh, flat_xv, ribbon_trace, xh_rules, xv_rules, Ribbon, RibbonDecomposition, H,
    V, ZERO,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{bail, Error, Result};

/// Axis-aligned rectangle with inclusive bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    /// `w × h` rectangle with lower-left corner `(x0, y0)`.
    pub fn new(x0: i64, y0: i64, w: i64, h: i64) -> Self {
        Rect { x0, y0, x1: x0 + w - 1, y1: y0 + h - 1 }
    }

    pub fn width(&self) -> i64 {
        (self.x1 - self.x0 + 1).max(0)
    }

    pub fn height(&self) -> i64 {
        (self.y1 - self.y0 + 1).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.width() == 0 || self.height() == 0
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }

    pub fn expand(&self, m: i64) -> Rect {
        Rect { x0: self.x0 - m, y0: self.y0 - m, x1: self.x1 + m, y1: self.y1 + m }
    }

    pub fn intersect(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        }
    }

    /// Sites in row-major order, bottom row first.
    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> {
        let r = *self;
        (r.y0..=r.y1).flat_map(move |y| (r.x0..=r.x1).map(move |x| (x, y)))
    }

    /// Whether `(x, y)` lies within `t` of the border.
    pub fn in_frame(&self, x: i64, y: i64, t: i64) -> bool {
        self.contains(x, y)
            && (x < self.x0 + t || x > self.x1 - t || y < self.y0 + t || y > self.y1 - t)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// A finite pattern: letters on a finite set of sites `(x, y)`, with `y`
/// pointing up.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pattern2D {
    cells: BTreeMap<(i64, i64), u8>,
}

impl Pattern2D {
    pub fn new() -> Self {
        Pattern2D::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = ((i64, i64), u8)>) -> Self {
        Pattern2D { cells: cells.into_iter().collect() }
    }

    pub fn filled(r: Rect, mut f: impl FnMut(i64, i64) -> u8) -> Self {
        Pattern2D::from_cells(r.sites().map(|(x, y)| ((x, y), f(x, y))))
    }

    /// Rows listed top first; the top row sits at `y_top` and each row
    /// starts at `x0`. A `.` leaves the site out of the shape.
    pub fn from_rows(x0: i64, y_top: i64, rows: &[&str]) -> Self {
        let mut p = Pattern2D::new();
        for (k, row) in rows.iter().enumerate() {
            for (i, c) in row.bytes().enumerate() {
                if c != b'.' {
                    p.set(x0 + i as i64, y_top - k as i64, c);
                }
            }
        }
        p
    }

    pub fn get(&self, x: i64, y: i64) -> Option<u8> {
        self.cells.get(&(x, y)).copied()
    }

    pub fn set(&mut self, x: i64, y: i64, c: u8) {
        self.cells.insert((x, y), c);
    }

    pub fn remove(&mut self, x: i64, y: i64) -> Option<u8> {
        self.cells.remove(&(x, y))
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.cells.contains_key(&(x, y))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = ((i64, i64), u8)> + '_ {
        self.cells.iter().map(|(&k, &v)| (k, v))
    }

    pub fn shape(&self) -> BTreeSet<(i64, i64)> {
        self.cells.keys().copied().collect()
    }

    pub fn letters(&self) -> BTreeSet<u8> {
        self.cells.values().copied().collect()
    }

    pub fn bbox(&self) -> Option<Rect> {
        let mut it = self.cells.keys();
        let &(x, y) = it.next()?;
        let mut r = Rect { x0: x, y0: y, x1: x, y1: y };
        for &(x, y) in it {
            r.x0 = r.x0.min(x);
            r.x1 = r.x1.max(x);
            r.y0 = r.y0.min(y);
            r.y1 = r.y1.max(y);
        }
        Some(r)
    }

    /// The shape fills its bounding box.
    pub fn is_rectangle(&self) -> bool {
        self.bbox()
            .is_some_and(|r| (r.width() * r.height()) as usize == self.cells.len())
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Pattern2D {
        Pattern2D::from_cells(self.cells().map(|((x, y), c)| ((x + dx, y + dy), c)))
    }

    /// Translate so the bounding box starts at the origin.
    pub fn normalized(&self) -> Pattern2D {
        match self.bbox() {
            Some(r) => self.translate(-r.x0, -r.y0),
            None => Pattern2D::new(),
        }
    }

    pub fn restrict(&self, r: &Rect) -> Pattern2D {
        Pattern2D::from_cells(self.cells().filter(|&((x, y), _)| r.contains(x, y)))
    }

    /// Mirror in the main diagonal.
    pub fn transpose(&self) -> Pattern2D {
        Pattern2D::from_cells(self.cells().map(|((x, y), c)| ((y, x), c)))
    }

    /// Quarter turn counterclockwise about the origin.
    pub fn rotate90(&self) -> Pattern2D {
        Pattern2D::from_cells(self.cells().map(|((x, y), c)| ((-y, x), c)))
    }

    pub fn map_letters(&self, mut f: impl FnMut(u8) -> u8) -> Pattern2D {
        Pattern2D::from_cells(self.cells().map(|(k, c)| (k, f(c))))
    }

    /// Union of two patterns that agree where both are defined.
    pub fn merge(&self, other: &Pattern2D) -> Result<Pattern2D> {
        let mut out = self.clone();
        for ((x, y), c) in other.cells() {
            match out.get(x, y) {
                Some(d) if d != c => bail!(Consistency, "patterns disagree at ({x},{y})"),
                _ => out.set(x, y, c),
            }
        }
        Ok(out)
    }

    /// Agrees with `other` on every site both define.
    pub fn agrees_with(&self, other: &Pattern2D) -> bool {
        self.cells().all(|((x, y), c)| other.get(x, y).is_none_or(|d| d == c))
    }

    /// Grid text: a header `@ xmin ymax`, then rows from the top.
    pub fn to_text(&self) -> String {
        let Some(r) = self.bbox() else {
            return "@ 0 0\n".into();
        };
        let mut s = format!("@ {} {}\n", r.x0, r.y1);
        for y in (r.y0..=r.y1).rev() {
            for x in r.x0..=r.x1 {
                s.push(self.get(x, y).map_or('.', char::from));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Pattern2D> {
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.trim().is_empty());
        let (x0, y_top) = match lines.next() {
            Some(head) if head.trim_start().starts_with('@') => parse_header(head)?,
            Some(first) => {
                // no header: anchor the bottom-left corner at the origin
                let rest: Vec<&str> = std::iter::once(first).chain(lines).collect();
                return Ok(Pattern2D::from_rows(0, rest.len() as i64 - 1, &rest));
            }
            None => return Ok(Pattern2D::new()),
        };
        let rows: Vec<&str> = lines.collect();
        Ok(Pattern2D::from_rows(x0, y_top, &rows))
    }
}

fn parse_header(head: &str) -> Result<(i64, i64)> {
    let nums: Vec<&str> = head.trim_start()[1..].split_whitespace().collect();
    let parse = |s: &str| s.parse::<i64>().map_err(|e| Error::Parse(format!("bad header '{head}': {e}")));
    match nums.as_slice() {
        [a, b] => Ok((parse(a)?, parse(b)?)),
        _ => Err(Error::Parse(format!("header '{head}' needs two integers"))),
    }
}

impl fmt::Display for Pattern2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A forbidden pattern flattened to anchor-relative offsets.
#[derive(Clone, Debug)]
struct Compiled {
    anchor: u8,
    rest: Vec<(i64, i64, u8)>,
}

/// `X(F)` on `Z²` for a finite forbidden list.
#[derive(Clone, Debug)]
pub struct Sft2D {
    alphabet: Vec<u8>,
    forbidden: Vec<Pattern2D>,
    compiled: Vec<Compiled>,
    t: usize,
}

impl PartialEq for Sft2D {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.forbidden == other.forbidden
    }
}

impl Sft2D {
    /// Forbidden patterns are normalized to start at the origin.
    pub fn new(alphabet: &[u8], forbidden: Vec<Pattern2D>) -> Result<Self> {
        let alphabet: Vec<u8> = alphabet.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if alphabet.is_empty() {
            bail!(Alphabet, "empty alphabet");
        }
        if alphabet.len() > 64 {
            bail!(Alphabet, "at most 64 letters are supported");
        }
        let mut t = 1;
        let mut pats = Vec::with_capacity(forbidden.len());
        for f in forbidden {
            if f.is_empty() {
                bail!(Input, "empty forbidden pattern");
            }
            if let Some(c) = f.letters().into_iter().find(|c| !alphabet.contains(c)) {
                bail!(Alphabet, "forbidden pattern uses '{}'", c as char);
            }
            let f = f.normalized();
            let r = f.bbox().expect("nonempty");
            t = t.max(r.width().max(r.height()) as usize);
            pats.push(f);
        }
        let compiled = pats
            .iter()
            .map(|f| {
                let mut it = f.cells();
                let ((ax, ay), anchor) = it.next().expect("nonempty");
                Compiled { anchor, rest: it.map(|((x, y), c)| (x - ax, y - ay, c)).collect() }
            })
            .collect();
        Ok(Sft2D { alphabet, forbidden: pats, compiled, t })
    }

    pub fn full_shift(alphabet: &[u8]) -> Result<Self> {
        Sft2D::new(alphabet, Vec::new())
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Pattern2D] {
        &self.forbidden
    }

    /// Side of the smallest square box holding every forbidden shape.
    pub fn type_t(&self) -> usize {
        self.t
    }

    /// The forbidden list as a set of normalized patterns.
    pub fn forbidden_set(&self) -> BTreeSet<Vec<((i64, i64), u8)>> {
        self.forbidden.iter().map(|f| f.normalized().cells().collect()).collect()
    }

    fn check_letters(&self, p: &Pattern2D) -> Result<()> {
        if let Some(c) = p.letters().into_iter().find(|c| !self.alphabet.contains(c)) {
            bail!(Alphabet, "letter '{}' is not in the alphabet", c as char);
        }
        Ok(())
    }

    /// Every forbidden occurrence inside `p`, as (pattern index, anchor site).
    pub fn violations(&self, p: &Pattern2D) -> Result<Vec<(usize, (i64, i64))>> {
        self.check_letters(p)?;
        let mut out = Vec::new();
        for ((x, y), c) in p.cells() {
            for (k, f) in self.compiled.iter().enumerate() {
                if f.anchor == c && f.rest.iter().all(|&(dx, dy, d)| p.get(x + dx, y + dy) == Some(d)) {
                    out.push((k, (x, y)));
                }
            }
        }
        Ok(out)
    }

    /// No translate of a forbidden pattern occurs inside `p`.
    pub fn validate(&self, p: &Pattern2D) -> Result<bool> {
        self.check_letters(p)?;
        Ok(p.cells().all(|((x, y), c)| {
            self.compiled.iter().all(|f| {
                f.anchor != c || !f.rest.iter().all(|&(dx, dy, d)| p.get(x + dx, y + dy) == Some(d))
            })
        }))
    }

    /// Alphabet line, then the forbidden patterns as grids separated by
    /// blank lines.
    pub fn to_text(&self) -> String {
        let mut s = String::from_utf8_lossy(&self.alphabet).into_owned();
        s.push('\n');
        for f in &self.forbidden {
            s.push('\n');
            s.push_str(&f.to_text());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks = text.split("\n\n").map(str::trim).filter(|b| !b.is_empty());
        let head = blocks.next().ok_or_else(|| Error::Parse("missing alphabet line".into()))?;
        let mut head_lines = head.lines();
        let alphabet: Vec<u8> = head_lines
            .next()
            .unwrap_or_default()
            .bytes()
            .filter(|c| !c.is_ascii_whitespace() && *c != b',')
            .collect();
        let mut forbidden = Vec::new();
        let rest: Vec<&str> = head_lines.collect();
        if !rest.is_empty() {
            forbidden.push(Pattern2D::parse(&rest.join("\n"))?);
        }
        for b in blocks {
            forbidden.push(Pattern2D::parse(b)?);
        }
        Sft2D::new(&alphabet, forbidden)
    }
}
