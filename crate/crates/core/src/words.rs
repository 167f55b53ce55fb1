//! Finite words with a position offset, and exact combinatorics of
//! balanced and characteristic sequences over `{0,1}`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{bail, Error, Result};
use crate::slope::{Quadratic, Rational, Slope, SlopeInterval};

/// A finite word whose first letter sits at index `offset`.
///
/// Letters are stored as ASCII bytes, so `"0101"` is the binary word and
/// `"ab"` a word over `{a, b}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
    offset: i64,
}

impl Word {
    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        Word { letters: letters.into(), offset: 0 }
    }

    pub fn at(offset: i64, letters: impl Into<Vec<u8>>) -> Self {
        Word { letters: letters.into(), offset }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Index of the last letter (one before `offset` for the empty word).
    pub fn end(&self) -> i64 {
        self.offset + self.letters.len() as i64 - 1
    }

    /// Letter at absolute index `i`.
    pub fn get(&self, i: i64) -> Option<u8> {
        let k = i.checked_sub(self.offset)?;
        usize::try_from(k).ok().and_then(|k| self.letters.get(k).copied())
    }

    /// The subword on the absolute index range `[lo, hi]`.
    pub fn slice(&self, lo: i64, hi: i64) -> Result<Word> {
        if hi < lo {
            return Ok(Word::at(lo, Vec::new()));
        }
        if lo < self.offset || hi > self.end() {
            bail!(
                Domain,
                "range [{lo},{hi}] outside word on [{},{}]",
                self.offset,
                self.end()
            );
        }
        let a = (lo - self.offset) as usize;
        let b = (hi - self.offset) as usize;
        Ok(Word::at(lo, self.letters[a..=b].to_vec()))
    }

    pub fn shifted(&self, offset: i64) -> Word {
        Word::at(offset, self.letters.clone())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::at(self.offset, letters)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word::at(self.offset, self.letters.repeat(times))
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.letters).unwrap_or("<non-ascii>")
    }

    pub fn contains(&self, needle: &[u8]) -> bool {
        contains(&self.letters, needle)
    }
}

pub(crate) fn contains(hay: &[u8], needle: &[u8]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word::new(s.as_bytes())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset != 0 {
            write!(f, "@{}:", self.offset)?;
        }
        f.write_str(self.as_str())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `0101` or `@-3:0101`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix('@') else {
            return Ok(Word::from(s));
        };
        let (k, letters) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in '{s}'")))?;
        let k = k
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad offset in '{s}'")))?;
        Ok(Word::at(k, letters.as_bytes()))
    }
}

fn bits(w: &[u8]) -> Result<impl Iterator<Item = usize> + '_> {
    if let Some(c) = w.iter().find(|&&c| c != b'0' && c != b'1') {
        bail!(Alphabet, "letter '{}' is not binary", *c as char);
    }
    Ok(w.iter().map(|&c| (c - b'0') as usize))
}

/// Prefix sums of ones: `p[k]` counts ones in the first `k` letters.
pub(crate) fn prefix_ones(w: &[u8]) -> Result<Vec<usize>> {
    let mut p = Vec::with_capacity(w.len() + 1);
    p.push(0);
    let mut acc = 0;
    for b in bits(w)? {
        acc += b;
        p.push(acc);
    }
    Ok(p)
}

/// Least and greatest one-counts among the length-`n` windows.
fn count_range(prefix: &[usize], n: usize) -> (usize, usize) {
    let len = prefix.len() - 1;
    (0..=len - n)
        .map(|s| prefix[s + n] - prefix[s])
        .fold((usize::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)))
}

pub fn ones_count(w: &Word) -> Result<usize> {
    Ok(bits(w.letters())?.sum())
}

pub fn is_k_balanced(w: &Word, k: usize) -> Result<bool> {
    let p = prefix_ones(w.letters())?;
    Ok((1..=w.len()).all(|n| {
        let (lo, hi) = count_range(&p, n);
        hi - lo <= k
    }))
}

/// `(max_v (#v−1)/|v|, min_v (#v+1)/|v|)` over nonempty subwords `v`,
/// clamped to `[0, 1]`.
pub fn slope_interval(w: &Word) -> Result<SlopeInterval> {
    if w.is_empty() {
        bail!(Domain, "slope interval of the empty word");
    }
    let p = prefix_ones(w.letters())?;
    let mut lo = Rational::from_integer(0);
    let mut hi = Rational::from_integer(1);
    for n in 1..=w.len() {
        let (cmin, cmax) = count_range(&p, n);
        let n = n as i64;
        lo = lo.max(Rational::new(cmax as i64 - 1, n));
        hi = hi.min(Rational::new(cmin as i64 + 1, n));
    }
    Ok(SlopeInterval::clamped(lo, hi))
}

pub fn joint_slope_interval(u: &Word, v: &Word) -> Result<Option<SlopeInterval>> {
    Ok(slope_interval(u)?.intersect(&slope_interval(v)?))
}

/// Letter `n` of the characteristic sequence of slope `alpha` shifted by
/// `intercept`: floors for the lower sequence, ceilings for the upper one.
pub fn char_letter(alpha: &Quadratic, intercept: &Quadratic, n: i64, upper: bool) -> Result<u8> {
    let at = |k: i64| -> Result<i128> {
        let v = alpha.mul_int(k as i128).checked_add(intercept)?;
        Ok(if upper { v.ceil() } else { v.floor() })
    };
    Ok(b'0' + (at(n + 1)? - at(n)?) as u8)
}

fn char_window(
    alpha: &Slope,
    intercept: &Quadratic,
    lo: i64,
    hi: i64,
    upper: bool,
) -> Result<Word> {
    let a = alpha.value();
    let mut prev = None;
    let mut letters = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    for n in lo..=hi + 1 {
        let v = a.mul_int(n as i128).checked_add(intercept)?;
        let f = if upper { v.ceil() } else { v.floor() };
        if let Some(p) = prev {
            letters.push(b'0' + (f - p) as u8);
        }
        prev = Some(f);
    }
    Ok(Word::at(lo, letters))
}

/// `⌊(n+1)α⌋ − ⌊nα⌋` for `n` in `[lo, hi]`.
pub fn lower_char_window(alpha: &Slope, lo: i64, hi: i64) -> Word {
    char_window(alpha, &Quadratic::integer(0), lo, hi, false)
        .expect("zero intercept combines with any slope")
}

/// `⌈(n+1)α⌉ − ⌈nα⌉` for `n` in `[lo, hi]`.
pub fn upper_char_window(alpha: &Slope, lo: i64, hi: i64) -> Word {
    char_window(alpha, &Quadratic::integer(0), lo, hi, true)
        .expect("zero intercept combines with any slope")
}

/// Lower window with `ρ` added inside the floors. Fails when `ρ` and `α`
/// involve different square roots.
pub fn lower_char_window_with(
    alpha: &Slope,
    intercept: &Quadratic,
    lo: i64,
    hi: i64,
) -> Result<Word> {
    char_window(alpha, intercept, lo, hi, false)
}

pub fn upper_char_window_with(
    alpha: &Slope,
    intercept: &Quadratic,
    lo: i64,
    hi: i64,
) -> Result<Word> {
    char_window(alpha, intercept, lo, hi, true)
}

/// Shift taking the upper characteristic sequence to the lower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharShift {
    pub k: i64,
    /// Slope 0 or 1, where both sequences coincide and `k` is 0.
    pub degenerate: bool,
}

/// Least `k > 0` with `k·i ≡ 1 (mod j)` for `α = i/j`.
pub fn char_shift_offset(alpha: Rational) -> Result<CharShift> {
    let (i, j) = (*alpha.numer(), *alpha.denom());
    if i < 0 || i > j {
        bail!(Domain, "slope {i}/{j} outside [0,1]");
    }
    if i == 0 || i == j {
        return Ok(CharShift { k: 0, degenerate: true });
    }
    let g = i.extended_gcd(&j);
    debug_assert_eq!(g.gcd, 1);
    Ok(CharShift { k: g.x.rem_euclid(j), degenerate: false })
}

/// Cross-pair test: every length-`n` subword of `a` against every
/// length-`n` subword of `b`.
pub fn is_jointly_balanced(a: &Word, b: &Word) -> Result<bool> {
    jointly_balanced_slices(a.letters(), b.letters())
}

pub(crate) fn jointly_balanced_slices(a: &[u8], b: &[u8]) -> Result<bool> {
    let pa = prefix_ones(a)?;
    let pb = prefix_ones(b)?;
    Ok((1..=a.len().min(b.len())).all(|n| {
        let (alo, ahi) = count_range(&pa, n);
        let (blo, bhi) = count_range(&pb, n);
        ahi <= blo + 1 && bhi <= alo + 1
    }))
}

fn lower_rational_window(alpha: Rational, len: usize) -> Word {
    let s = Slope::Rational(alpha);
    lower_char_window(&s, 0, len as i64 - 1)
}

/// Repairs a window `t` of length `m·j` into one period of a sequence
/// jointly balanced with the lower characteristic sequence of `i/j`.
pub fn periodize_jointly_balanced(t: &Word, alpha: Rational) -> Result<Word> {
    let (i, j) = (*alpha.numer(), *alpha.denom());
    if t.is_empty() || t.len() as i64 % j != 0 {
        bail!(Input, "length {} is not a positive multiple of {j}", t.len());
    }
    let m = t.len() as i64 / j;
    let reference = lower_rational_window(alpha, 3 * t.len());
    if !is_jointly_balanced(t, &reference)? {
        bail!(Input, "'{}' is not jointly balanced with slope {i}/{j}", t.as_str());
    }
    let ones = ones_count(t)? as i64;
    let mut letters = t.letters().to_vec();
    let last = letters.len() - 1;
    if ones == m * i - 1 {
        if letters[last] != b'0' {
            bail!(Search, "one-count short by one but final letter is 1");
        }
        letters[last] = b'1';
    } else if ones == m * i + 1 {
        if letters[last] != b'1' {
            bail!(Search, "one-count over by one but final letter is 0");
        }
        letters[last] = b'0';
    } else if ones != m * i {
        bail!(Input, "one-count {ones} is not within 1 of {}", m * i);
    }
    let p = Word::at(t.offset(), letters);
    let four = p.repeat(4);
    let reference = lower_rational_window(alpha, four.len() + j as usize);
    if !is_jointly_balanced(&four, &reference)? {
        bail!(Search, "repaired period '{}' fails the four-period check", p.as_str());
    }
    Ok(p)
}

/// Checks `|#(v,1) − |v|·α| ≤ 1` for every subword `v` of `p³·mid·q³`.
pub fn splice_check(p: &Word, mid: &Word, q: &Word, alpha: Rational) -> Result<bool> {
    let (i, j) = (*alpha.numer(), *alpha.denom());
    for (name, w) in [("p", p), ("q", q)] {
        if w.len() as i64 != j {
            bail!(Input, "|{name}| = {} but the period is {j}", w.len());
        }
        if ones_count(w)? as i64 != i {
            bail!(Input, "{name} does not carry {i} ones");
        }
    }
    let s = p.repeat(3).concat(mid).concat(&q.repeat(3));
    let pre = prefix_ones(s.letters())?;
    for a in 0..s.len() {
        for b in a + 1..=s.len() {
            let ones = (pre[b] - pre[a]) as i64;
            let len = (b - a) as i64;
            if (ones * j - len * i).abs() > j {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
