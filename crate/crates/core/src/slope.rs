//! Exact slopes: rationals and real quadratic irrationals.
//!
//! Every quantity here is kept in closed form `(a + b·√d) / c` so that
//! floors, ceilings and comparisons are decided by integer arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{bail, Error, Result};

pub type Rational = Ratio<i64>;

/// A real number `(a + b·√d) / c` with `c > 0` and `d` squarefree.
///
/// When `b == 0` the value is rational and `d` is stored as 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
}

fn squarefree_split(mut d: i128) -> (i128, i128) {
    // d = s^2 * r with r squarefree
    let mut s = 1;
    let mut p = 2;
    while p * p <= d {
        while d % (p * p) == 0 {
            d /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, d)
}

impl Quadratic {
    /// Builds `(a + b·√d) / c`. Fails on `c == 0` or `d < 0`.
    pub fn new(a: i128, b: i128, d: i128, c: i128) -> Result<Self> {
        if c == 0 {
            bail!(Domain, "zero denominator");
        }
        if d < 0 {
            bail!(Domain, "negative radicand {d}");
        }
        let (s, r) = if d == 0 { (0, 1) } else { squarefree_split(d) };
        let (mut a, mut b) = (a, b * s);
        let mut d = r;
        if r == 1 {
            a += b;
            b = 0;
        }
        if b == 0 {
            d = 1;
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(mut a: i128, mut b: i128, mut c: i128, d: i128) -> Self {
        if c < 0 {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if g > 1 {
            a /= g;
            b /= g;
            c /= g;
        }
        let d = if b == 0 { 1 } else { d };
        Quadratic { a, b, c, d }
    }

    pub fn integer(n: i128) -> Self {
        Quadratic { a: n, b: 0, c: 1, d: 1 }
    }

    pub fn ratio(p: i128, q: i128) -> Self {
        assert!(q != 0, "zero denominator");
        Self::normalized(p, 0, q, 1)
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::ratio(*r.numer() as i128, *r.denom() as i128)
    }

    pub fn parts(&self) -> (i128, i128, i128, i128) {
        (self.a, self.b, self.d, self.c)
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.b != 0 {
            return None;
        }
        Some(Rational::new(
            i64::try_from(self.a).ok()?,
            i64::try_from(self.c).ok()?,
        ))
    }

    fn radicand_with(&self, other: &Self) -> Result<i128> {
        match (self.b == 0, other.b == 0) {
            (true, _) => Ok(other.d),
            (_, true) => Ok(self.d),
            _ if self.d == other.d => Ok(self.d),
            _ => bail!(
                Domain,
                "cannot combine sqrt({}) and sqrt({}) exactly",
                self.d,
                other.d
            ),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.radicand_with(other)?;
        Ok(Self::normalized(
            self.a * other.c + other.a * self.c,
            self.b * other.c + other.b * self.c,
            self.c * other.c,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Quadratic { a: -self.a, b: -self.b, c: self.c, d: self.d }
    }

    pub fn mul_int(&self, n: i128) -> Self {
        Self::normalized(self.a * n, self.b * n, self.c, self.d)
    }

    pub fn add_int(&self, n: i128) -> Self {
        Self::normalized(self.a + n * self.c, self.b, self.c, self.d)
    }

    pub fn div_int(&self, n: i128) -> Self {
        assert!(n != 0, "division by zero");
        Self::normalized(self.a, self.b, self.c * n, self.d)
    }

    /// Sign of the value.
    pub fn signum(&self) -> i32 {
        let (a, b) = (self.a, self.b);
        let s = if b == 0 {
            a.signum()
        } else if a >= 0 && b > 0 {
            1
        } else if a <= 0 && b < 0 {
            -1
        } else {
            // opposite signs: compare a^2 with b^2 d, never equal for irrational part
            let lhs = a * a;
            let rhs = b * b * self.d;
            if a > 0 {
                if lhs > rhs { 1 } else { -1 }
            } else if rhs > lhs {
                1
            } else {
                -1
            }
        };
        s as i32
    }

    pub fn floor(&self) -> i128 {
        if self.b == 0 {
            return Integer::div_floor(&self.a, &self.c);
        }
        let root = (self.b * self.b * self.d).isqrt();
        let floor_irr = if self.b > 0 { root } else { -root - 1 };
        Integer::div_floor(&(self.a + floor_irr), &self.c)
    }

    pub fn ceil(&self) -> i128 {
        if self.b == 0 {
            return Integer::div_ceil(&self.a, &self.c);
        }
        self.floor() + 1
    }

    pub fn is_integer(&self) -> bool {
        self.b == 0 && self.c == 1
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.c as f64
    }

    /// Compares against an integer exactly.
    pub fn cmp_int(&self, n: i128) -> Ordering {
        match self.add_int(-n).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl PartialOrd for Quadratic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(diff.signum().cmp(&0))
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            return write!(f, "{}/{}", self.a, self.c);
        }
        let sign = if self.b < 0 { '-' } else { '+' };
        write!(
            f,
            "({}{}{}*sqrt({}))/{}",
            self.a,
            sign,
            self.b.abs(),
            self.d,
            self.c
        )
    }
}

fn parse_int(s: &str) -> Result<i128> {
    s.trim()
        .parse::<i128>()
        .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
}

impl FromStr for Quadratic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = s.strip_prefix('(') {
            // (a+b*sqrt(d))/c
            let (num, den) = rest
                .rsplit_once(")/")
                .ok_or_else(|| Error::Parse(format!("bad quadratic '{s}'")))?;
            let open = num
                .find("*sqrt(")
                .ok_or_else(|| Error::Parse(format!("bad quadratic '{s}'")))?;
            let head = &num[..open];
            let d = num[open + 6..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("bad quadratic '{s}'")))?;
            let split = head[1..]
                .rfind(['+', '-'])
                .map(|i| i + 1)
                .ok_or_else(|| Error::Parse(format!("bad quadratic '{s}'")))?;
            let a = parse_int(&head[..split])?;
            let b = parse_int(&head[split..])?;
            return Quadratic::new(a, b, parse_int(d)?, parse_int(den)?);
        }
        match s.split_once('/') {
            Some((p, q)) => {
                let q = parse_int(q)?;
                if q == 0 {
                    bail!(Parse, "zero denominator in '{s}'");
                }
                Ok(Quadratic::ratio(parse_int(p)?, q))
            }
            None => Ok(Quadratic::integer(parse_int(&s)?)),
        }
    }
}

/// Slope of a balanced sequence, a number in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slope {
    Rational(Rational),
    Quadratic(Quadratic),
}

impl Slope {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            bail!(Domain, "zero denominator");
        }
        Self::try_from(Quadratic::ratio(p as i128, q as i128))
    }

    /// `(a + b·√d) / c`; collapses to a rational when the radical vanishes.
    pub fn quadratic(a: i64, b: i64, d: i64, c: i64) -> Result<Self> {
        Self::try_from(Quadratic::new(a as i128, b as i128, d as i128, c as i128)?)
    }

    /// `(√5 − 1) / 2`.
    pub fn golden() -> Self {
        Self::quadratic(-1, 1, 5, 2).expect("golden ratio conjugate is in [0,1]")
    }

    pub fn value(&self) -> Quadratic {
        match self {
            Slope::Rational(r) => Quadratic::from_rational(*r),
            Slope::Quadratic(q) => *q,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Slope::Rational(r) => Some(*r),
            Slope::Quadratic(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Slope::Rational(_))
    }

    /// `floor(n·α)`.
    pub fn floor_mul(&self, n: i64) -> i64 {
        self.value().mul_int(n as i128).floor() as i64
    }

    /// `ceil(n·α)`.
    pub fn ceil_mul(&self, n: i64) -> i64 {
        self.value().mul_int(n as i128).ceil() as i64
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }
}

impl TryFrom<Quadratic> for Slope {
    type Error = Error;

    fn try_from(q: Quadratic) -> Result<Self> {
        if q.signum() < 0 || q.cmp_int(1) == Ordering::Greater {
            bail!(Domain, "slope {q} outside [0,1]");
        }
        match q.as_rational() {
            Some(r) => Ok(Slope::Rational(r)),
            None if q.is_rational() => bail!(Domain, "slope {q} overflows i64"),
            None => Ok(Slope::Quadratic(q)),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value().fmt(f)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Slope::try_from(s.parse::<Quadratic>()?)
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Open interval `(lo, hi)` of candidate slopes, clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlopeInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl SlopeInterval {
    /// Clamps both ends to `[0, 1]`.
    pub fn clamped(lo: Rational, hi: Rational) -> Self {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        SlopeInterval {
            lo: lo.clamp(zero, one),
            hi: hi.clamp(zero, one),
        }
    }

    /// True when the open interval has no points.
    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn width(&self) -> Rational {
        if self.is_empty() {
            Rational::from_integer(0)
        } else {
            self.hi - self.lo
        }
    }

    pub fn intersect(&self, other: &SlopeInterval) -> Option<SlopeInterval> {
        let out = SlopeInterval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        };
        (!out.is_empty()).then_some(out)
    }

    pub fn contains_open(&self, x: &Quadratic) -> bool {
        let lo = Quadratic::from_rational(self.lo);
        let hi = Quadratic::from_rational(self.hi);
        matches!(x.partial_cmp(&lo), Some(Ordering::Greater))
            && matches!(x.partial_cmp(&hi), Some(Ordering::Less))
    }

    pub fn contains_closed(&self, x: &Quadratic) -> bool {
        let lo = Quadratic::from_rational(self.lo);
        let hi = Quadratic::from_rational(self.hi);
        !matches!(x.partial_cmp(&lo), Some(Ordering::Less) | None)
            && !matches!(x.partial_cmp(&hi), Some(Ordering::Greater) | None)
    }

    /// An irrational point strictly inside: `lo + (hi − lo)·√2/2`.
    pub fn irrational_point(&self) -> Option<Slope> {
        if self.is_empty() {
            return None;
        }
        let w = self.hi - self.lo;
        let (p, q) = (*w.numer() as i128, *w.denom() as i128);
        let inner = Quadratic::new(0, p, 2, 2 * q).ok()?;
        let point = Quadratic::from_rational(self.lo).checked_add(&inner).ok()?;
        Slope::try_from(point).ok()
    }
}

impl fmt::Display for SlopeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}
