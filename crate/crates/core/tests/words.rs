use proptest::prelude::*;
use symdyn::slope::Rational;
use symdyn::words::{self, Word};
use symdyn::{Quadratic, Slope};

fn bits(v: &[bool]) -> Word {
    Word::new(v.iter().map(|&b| if b { b'1' } else { b'0' }).collect::<Vec<_>>())
}

fn ones(w: &[u8]) -> i64 {
    w.iter().filter(|&&c| c == b'1').count() as i64
}

/// Every pair of equal-length factors, compared directly.
fn balanced_brute(w: &[u8], k: i64) -> bool {
    (1..=w.len()).all(|n| {
        let counts: Vec<i64> = w.windows(n).map(ones).collect();
        counts.iter().max().unwrap() - counts.iter().min().unwrap() <= k
    })
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// Lower and upper windows of `p/q` with integer floors and ceilings only.
fn rational_window(p: i64, q: i64, lo: i64, hi: i64, upper: bool) -> String {
    (lo..=hi)
        .map(|n| {
            let d = if upper {
                ceil_div((n + 1) * p, q) - ceil_div(n * p, q)
            } else {
                floor_div((n + 1) * p, q) - floor_div(n * p, q)
            };
            char::from(b'0' + d as u8)
        })
        .collect()
}

fn slope_strategy() -> impl Strategy<Value = (i64, i64)> {
    (1i64..=30).prop_flat_map(|q| (0..=q, Just(q)))
}

proptest! {
    #[test]
    fn rational_windows_match_integer_formula((p, q) in slope_strategy(), lo in -200i64..200, len in 1i64..80) {
        let s = Slope::rational(p, q).unwrap();
        let hi = lo + len - 1;
        prop_assert_eq!(words::lower_char_window(&s, lo, hi).as_str().to_string(), rational_window(p, q, lo, hi, false));
        prop_assert_eq!(words::upper_char_window(&s, lo, hi).as_str().to_string(), rational_window(p, q, lo, hi, true));
    }

    #[test]
    fn k_balance_matches_brute_force(v in prop::collection::vec(any::<bool>(), 1..24), k in 0usize..3) {
        let w = bits(&v);
        prop_assert_eq!(words::is_k_balanced(&w, k).unwrap(), balanced_brute(w.letters(), k as i64));
    }

    #[test]
    fn characteristic_windows_are_balanced((p, q) in slope_strategy(), lo in -100i64..100, len in 1i64..60) {
        let s = Slope::rational(p, q).unwrap();
        let w = words::lower_char_window(&s, lo, lo + len - 1);
        prop_assert!(words::is_k_balanced(&w, 1).unwrap());
        let iv = words::slope_interval(&w).unwrap();
        prop_assert!(iv.lo <= Rational::new(p, q) && Rational::new(p, q) <= iv.hi);
    }

    #[test]
    fn joint_balance_is_symmetric(a in prop::collection::vec(any::<bool>(), 1..16), b in prop::collection::vec(any::<bool>(), 1..16)) {
        let (a, b) = (bits(&a), bits(&b));
        prop_assert_eq!(words::is_jointly_balanced(&a, &b).unwrap(), words::is_jointly_balanced(&b, &a).unwrap());
    }

    #[test]
    fn joint_balance_matches_brute_force(a in prop::collection::vec(any::<bool>(), 1..14), b in prop::collection::vec(any::<bool>(), 1..14)) {
        let (a, b) = (bits(&a), bits(&b));
        let n_max = a.len().min(b.len());
        let brute = (1..=n_max).all(|n| {
            a.letters().windows(n).all(|u| b.letters().windows(n).all(|v| (ones(u) - ones(v)).abs() <= 1))
        });
        prop_assert_eq!(words::is_jointly_balanced(&a, &b).unwrap(), brute);
    }

    #[test]
    fn shift_offset_moves_upper_onto_lower(q in 2i64..40, p0 in 1i64..40) {
        let p = 1 + p0 % (q - 1);
        prop_assume!(num_gcd(p, q) == 1);
        let k = words::char_shift_offset(Rational::new(p, q)).unwrap().k;
        let s = Slope::rational(p, q).unwrap();
        let upper = words::upper_char_window(&s, -30 + k, 30 + k);
        let lower = words::lower_char_window(&s, -30, 30);
        prop_assert_eq!(upper.letters(), lower.letters());
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

#[test]
fn golden_window_against_float_oracle() {
    let a = Slope::golden();
    let phi = a.to_f64();
    let w = words::lower_char_window(&a, 0, 199);
    for (n, &c) in w.letters().iter().enumerate() {
        let n = n as f64;
        let d = ((n + 1.0) * phi).floor() - (n * phi).floor();
        assert_eq!(c, b'0' + d as u8, "index {n}");
    }
}

#[test]
fn intercepts_shift_the_window() {
    let alpha: Quadratic = "2/5".parse().unwrap();
    let rho: Quadratic = "1/5".parse().unwrap();
    let w: String = (0..10).map(|n| char::from(words::char_letter(&alpha, &rho, n, false).unwrap())).collect();
    assert_eq!(w, rational_window_shifted(2, 5, 1, 0, 9));
}

fn rational_window_shifted(p: i64, q: i64, r: i64, lo: i64, hi: i64) -> String {
    (lo..=hi)
        .map(|n| char::from(b'0' + (floor_div((n + 1) * p + r, q) - floor_div(n * p + r, q)) as u8))
        .collect()
}
