use std::collections::BTreeMap;

use proptest::prelude::*;
use symdyn::grid2d::{Pattern2D, Rect};
use symdyn::layers::{
    self, build_point_window, c1_telescoping_holds, classify_pair, slope_window_estimate, x_rules, Sequence,
    SequencePair,
};
use symdyn::{Quadratic, Rational, Slope};

fn bit(c: u8, k: u8) -> i64 {
    ((c - b'0') >> k) as i64 & 1
}

/// The three local rules written out directly: the first layer is constant
/// up columns, the second along diagonals, and the third steps by
/// `second − first` to the right.
fn legal_by_hand(p: &Pattern2D) -> bool {
    p.cells().all(|((x, y), c)| {
        let up = p.get(x, y + 1).is_none_or(|d| bit(d, 0) == bit(c, 0));
        let diag = p.get(x + 1, y + 1).is_none_or(|d| bit(d, 1) == bit(c, 1));
        let right = p.get(x + 1, y).is_none_or(|d| bit(d, 2) == bit(c, 2) + bit(d, 1) - bit(d, 0));
        up && diag && right
    })
}

fn rational_slope() -> impl Strategy<Value = (i64, i64, i64)> {
    (1i64..=7).prop_flat_map(|q| (0..=q, Just(q), 0..q))
}

proptest! {
    #[test]
    fn rules_match_hand_written_check(cells in prop::collection::vec(prop::sample::select(b"01234567".to_vec()), 9)) {
        let p = Pattern2D::filled(Rect::new(0, 0, 3, 3), |x, y| cells[(3 * y + x) as usize]);
        prop_assert_eq!(x_rules().validate(&p).unwrap(), legal_by_hand(&p));
    }

    #[test]
    fn built_windows_follow_the_layer_formulas(
        (p, q, r) in rational_slope(),
        r2 in 0i64..7,
        x0 in -6i64..6,
        y0 in -4i64..4,
        w in 1i64..9,
        h in 1i64..5,
    ) {
        let alpha = Slope::rational(p, q).unwrap();
        let a = Sequence::characteristic(alpha, Quadratic::ratio(r as i128, q as i128), false).unwrap();
        let b = Sequence::characteristic(alpha, Quadratic::ratio((r2 % q) as i128, q as i128), true).unwrap();
        let pair = SequencePair::new(a.clone(), b.clone());
        let rect = Rect::new(x0, y0, w, h);
        let built = build_point_window(&pair, rect, &BTreeMap::new(), 2).unwrap();
        let lp = &built.pattern;
        prop_assert!(legal_by_hand(lp.pattern()));
        prop_assert!(c1_telescoping_holds(lp));
        prop_assert!(layers::verify_c1_forward(lp).unwrap());
        for (x, y) in rect.sites() {
            prop_assert_eq!(lp.bit(x, y, 0), Some(a.at(x) - b'0'));
            prop_assert_eq!(lp.bit(x, y, 1), Some(b.at(x - y) - b'0'));
        }
        let iv = slope_window_estimate(lp).unwrap();
        let s = Rational::new(p, q);
        prop_assert!(iv.lo <= s && s <= iv.hi);
        let back = layers::LayeredPattern::parse(&lp.to_text()).unwrap();
        prop_assert_eq!(&back, lp);
    }

    #[test]
    fn same_slope_pairs_get_a_tag((p, q, r) in rational_slope(), upper in any::<bool>()) {
        let alpha = Slope::rational(p, q).unwrap();
        let a = Sequence::lower(alpha);
        let b = Sequence::characteristic(alpha, Quadratic::ratio(r as i128, q as i128), upper).unwrap();
        let tags = classify_pair(&SequencePair::new(a, b), 40).unwrap();
        prop_assert!(!tags.is_empty());
    }

    #[test]
    fn sequence_descriptions_round_trip(
        l in "[01]{1,3}", c in "[01]{0,5}", r in "[01]{1,3}", off in -5i64..5,
    ) {
        let text = if off == 0 { format!("{l}|{c}|{r}") } else { format!("{l}|{c}@{off}|{r}") };
        let s: Sequence = text.parse().unwrap();
        let again: Sequence = s.to_string().parse().unwrap();
        for i in -30..30 {
            prop_assert_eq!(s.at(i), again.at(i));
        }
    }
}

#[test]
fn characteristic_descriptions_round_trip() {
    for text in ["lower:2/5", "upper:1/3", "lower:2/5+1/5", "lower:(-1+1*sqrt(5))/2"] {
        let s: Sequence = text.parse().unwrap();
        let again: Sequence = s.to_string().parse().unwrap();
        assert_eq!(s.window(-20, 20), again.window(-20, 20), "{text}");
    }
}

#[test]
fn free_rows_take_the_requested_value() {
    let pair = SequencePair::new("01".parse().unwrap(), "01".parse().unwrap());
    for v in 0..=1u8 {
        let free = BTreeMap::from([(0, v)]);
        let built = build_point_window(&pair, Rect::new(0, 0, 4, 2), &free, 2).unwrap();
        assert!((0..4).all(|x| built.pattern.bit(x, 0, 2) == Some(v)));
        assert!(built.free.contains_key(&0));
    }
}
