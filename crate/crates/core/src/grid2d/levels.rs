//! Horizontal ribbons as sequences of exit heights.

use super::{Pattern2D, Rect};
use crate::error::{bail, Result};

/// A horizontal ribbon over a range of columns. `at(x)` is the height at
/// which the ribbon passes from column `x` to column `x + 1`; column `x`
/// holds the sites between `at(x − 1)` and `at(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Levels {
    entry: i64,
    h: Vec<i64>,
}

impl Levels {
    /// Exit heights for columns `entry, entry + 1, …`; the first column
    /// that owns sites is `entry + 1`.
    pub fn new(entry: i64, h: Vec<i64>) -> Self {
        assert!(h.len() >= 2, "a ribbon needs at least one column");
        Levels { entry, h }
    }

    /// Flat ribbon at `height` over columns `x0..=x1`.
    pub fn flat(x0: i64, x1: i64, height: i64) -> Self {
        Levels::new(x0 - 1, vec![height; (x1 - x0 + 2) as usize])
    }

    pub fn first_column(&self) -> i64 {
        self.entry + 1
    }

    pub fn last_column(&self) -> i64 {
        self.entry + self.h.len() as i64 - 1
    }

    pub fn heights(&self) -> &[i64] {
        &self.h
    }

    pub fn at(&self, x: i64) -> i64 {
        self.h[(x - self.entry) as usize]
    }

    /// Lowest and highest site in column `x`.
    pub fn column(&self, x: i64) -> (i64, i64) {
        let (a, b) = (self.at(x - 1), self.at(x));
        (a.min(b), a.max(b))
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.first_column()..=self.last_column()).flat_map(move |x| {
            let (lo, hi) = self.column(x);
            (lo..=hi).map(move |y| (x, y))
        })
    }

    /// Vertical move inside each column, left to right.
    pub fn steps(&self) -> Vec<i64> {
        self.h.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn nonzero_steps(&self) -> usize {
        self.steps().iter().filter(|&&s| s != 0).count()
    }

    pub fn is_flat(&self) -> bool {
        self.h.iter().all(|&y| y == self.h[0])
    }

    /// Moves of at most one, never in two consecutive columns.
    pub fn check_shape(&self) -> Result<()> {
        let steps = self.steps();
        for (k, &s) in steps.iter().enumerate() {
            let x = self.first_column() + k as i64;
            if s.abs() > 1 {
                bail!(Legality, "ribbon jumps {s} in column {x}");
            }
            if s != 0 && k > 0 && steps[k - 1] != 0 {
                bail!(Legality, "ribbon moves in consecutive columns {} and {x}", x - 1);
            }
        }
        Ok(())
    }

    /// Zeros between the top of `below` and the bottom of `self` in
    /// column `x`.
    pub fn gap_above(&self, below: &Levels, x: i64) -> i64 {
        self.column(x).0 - below.column(x).1 - 1
    }

    /// Restriction to columns `x0..=x1`.
    pub fn slice(&self, x0: i64, x1: i64) -> Levels {
        let a = (x0 - 1 - self.entry) as usize;
        let b = (x1 - self.entry) as usize;
        Levels::new(x0 - 1, self.h[a..=b].to_vec())
    }
}

/// Draw ribbons with `letter` on a background of `zero` inside `window`.
pub fn render(ribbons: &[Levels], window: Rect, letter: u8, zero: u8) -> Pattern2D {
    let mut p = Pattern2D::filled(window, |_, _| zero);
    for r in ribbons {
        for (x, y) in r.cells() {
            if window.contains(x, y) {
                p.set(x, y, letter);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_steps() {
        let r = Levels::new(-1, vec![0, 0, 1, 1, 0, 0]);
        assert_eq!(r.first_column(), 0);
        assert_eq!(r.last_column(), 4);
        assert_eq!(r.column(1), (0, 1));
        assert_eq!(r.column(2), (1, 1));
        assert_eq!(r.steps(), [0, 1, 0, -1, 0]);
        assert!(r.check_shape().is_ok());
        assert_eq!(r.cells().count(), 7);
        assert!(Levels::new(0, vec![0, 1, 2]).check_shape().is_err());
        let above = Levels::flat(0, 4, 4);
        assert_eq!(above.gap_above(&r, 2), 2);
        assert_eq!(above.gap_above(&r, 0), 3);
        assert_eq!(r.slice(1, 2), Levels::new(0, vec![0, 1, 1]));
    }
}
