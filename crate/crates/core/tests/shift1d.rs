use std::collections::BTreeSet;

use proptest::prelude::*;
use symdyn::shift1d::{chain_graph, exchangeable, Sft1D};
use symdyn::words::Word;

/// Binary SFTs with one to three forbidden words of length one to three.
fn small_sft() -> impl Strategy<Value = Sft1D> {
    prop::collection::vec(prop::collection::vec(prop::bool::ANY, 1..=3), 1..=3).prop_map(|fs| {
        let f: Vec<Word> = fs
            .iter()
            .map(|v| Word::new(v.iter().map(|&b| if b { b'1' } else { b'0' }).collect::<Vec<_>>()))
            .collect();
        Sft1D::new(b"01", f).unwrap()
    })
}

fn admissible(forbidden: &[Word], w: &[u8]) -> bool {
    forbidden.iter().all(|f| !w.windows(f.len()).any(|u| u == f.letters()))
}

/// Whether `w` extends by `pad` letters to the right (or to the left)
/// without creating a forbidden word, by depth-first search.
fn extends(x: &Sft1D, w: &[u8], pad: usize, right: bool) -> bool {
    if pad == 0 {
        return true;
    }
    x.alphabet().iter().any(|&c| {
        let v: Vec<u8> = if right {
            w.iter().copied().chain([c]).collect()
        } else {
            [c].into_iter().chain(w.iter().copied()).collect()
        };
        admissible(x.forbidden(), &v) && extends(x, &v, pad - 1, right)
    })
}

/// Length-`n` words that extend `pad` letters both ways. For a shift of
/// type `t` left and right extensions are independent once `n ≥ t − 1`,
/// and a long enough `pad` exhausts the de Bruijn graph. Shorter words are
/// read off as prefixes of extendable words of length `t − 1`.
fn extendable(x: &Sft1D, n: usize, pad: usize) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        if w.len() == n {
            let ok = if n + 1 >= x.type_t() {
                extends(x, &w, pad, true) && extends(x, &w, pad, false)
            } else {
                // too short to separate the two sides: extend to length t − 1 first
                extendable(x, x.type_t() - 1, pad).iter().any(|v| v.windows(n).next() == Some(&w[..]))
            };
            if ok {
                out.insert(w);
            }
            continue;
        }
        for &c in x.alphabet() {
            let mut v = w.clone();
            v.push(c);
            if admissible(x.forbidden(), &v) {
                stack.push(v);
            }
        }
    }
    out
}

/// Exchangeability by enumeration: two points of `[−N, N]` holding `w`
/// and `w′` on `S` that agree on the outer `t` letters at each end.
fn exchangeable_brute(x: &Sft1D, points: &BTreeSet<Vec<u8>>, w: &Word, w2: &Word, radius: usize) -> bool {
    let t = x.type_t();
    let len = 2 * radius + 1;
    let s = (w.offset() + radius as i64) as usize;
    let holding = |u: &Word| -> BTreeSet<(Vec<u8>, Vec<u8>)> {
        points
            .iter()
            .filter(|p| &p[s..s + u.len()] == u.letters())
            .map(|p| (p[..t].to_vec(), p[len - t..].to_vec()))
            .collect()
    };
    !holding(w).is_disjoint(&holding(w2))
}

const PAD: usize = 10;

/// `ln` of the number of admissible words of length `n`, by a transfer
/// count over the last `t − 1` letters with running normalisation.
fn log_count(x: &Sft1D, n: usize) -> f64 {
    let k = x.type_t().saturating_sub(1);
    let mut counts: std::collections::BTreeMap<Vec<u8>, f64> = extendable(x, k, 0).into_iter().map(|w| (w, 1.0)).collect();
    let mut log = 0.0;
    for _ in k..n {
        let mut next = std::collections::BTreeMap::new();
        for (w, c) in &counts {
            for &a in x.alphabet() {
                let mut v = w.clone();
                v.push(a);
                if admissible(x.forbidden(), &v) {
                    *next.entry(v[1..].to_vec()).or_insert(0.0) += c;
                }
            }
        }
        let total: f64 = next.values().sum();
        if total == 0.0 {
            return f64::NEG_INFINITY;
        }
        next.values_mut().for_each(|c| *c /= total);
        log += total.ln();
        counts = next;
    }
    log
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn language_matches_enumeration(x in small_sft(), n in 1usize..7) {
        let lang: BTreeSet<Vec<u8>> = x.language(n).into_iter().map(Word::into_letters).collect();
        prop_assert_eq!(lang, extendable(&x, n, PAD));
    }

    #[test]
    fn exchangeability_matches_enumeration(x in small_sft(), n in 1usize..3, extra in 0usize..2) {
        let radius = n + x.type_t() + extra;
        let words = x.language(n);
        let points = extendable(&x, 2 * radius + 1, PAD);
        for a in &words {
            for b in &words {
                let found = exchangeable(&x, a, b, radius).unwrap().is_some();
                prop_assert_eq!(found, exchangeable_brute(&x, &points, a, b, radius), "{} {} N={}", a, b, radius);
            }
        }
    }

    #[test]
    fn exchangeability_is_reflexive_symmetric_monotone(x in small_sft(), n in 1usize..4) {
        let radius = n + x.type_t() + 1;
        let words = x.language(n);
        for a in &words {
            prop_assert!(exchangeable(&x, a, a, radius).unwrap().is_some());
            for b in &words {
                let ab = exchangeable(&x, a, b, radius).unwrap().is_some();
                prop_assert_eq!(ab, exchangeable(&x, b, a, radius).unwrap().is_some());
                if ab {
                    prop_assert!(exchangeable(&x, a, b, radius + 3).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn witnesses_are_legal(x in small_sft(), n in 1usize..4) {
        let radius = n + x.type_t() + 2;
        let t = x.type_t();
        let words = x.language(n);
        for a in &words {
            for b in &words {
                if let Some(d) = exchangeable(&x, a, b, radius).unwrap() {
                    prop_assert_eq!(d.left.len(), t);
                    prop_assert_eq!(d.right.len(), t);
                    prop_assert_eq!(d.left.offset(), -(radius as i64));
                    prop_assert_eq!(d.right.end(), radius as i64);
                    prop_assert!(x.contains_word(d.left.letters()) && x.contains_word(d.right.letters()));
                }
            }
        }
    }

    #[test]
    fn entropy_matches_word_counts(x in small_sft()) {
        match x.entropy() {
            Ok(h) => {
                let est = (log_count(&x, 400) - log_count(&x, 200)) / 200.0;
                prop_assert!((h - est).abs() < 0.02, "h={} estimate={}", h, est);
            }
            Err(_) => prop_assert!(x.language(12).is_empty()),
        }
    }
}

#[test]
fn chain_graph_components_match_brute_force() {
    for forbid in [&["11"][..], &["01", "10"], &["00", "11"], &["10"], &["111", "000"]] {
        let x = Sft1D::from_strs("01", forbid).unwrap();
        for n in 1..=3 {
            let radius = n + x.type_t() + 2;
            let cg = chain_graph(&x, n, radius).unwrap();
            let points = extendable(&x, 2 * radius + 1, PAD);
            let edges: BTreeSet<(usize, usize)> = cg.edges.iter().map(|&(i, j, _)| (i, j)).collect();
            for i in 0..cg.nodes.len() {
                for j in i + 1..cg.nodes.len() {
                    let brute = exchangeable_brute(&x, &points, &cg.nodes[i], &cg.nodes[j], radius);
                    assert_eq!(edges.contains(&(i, j)), brute, "{forbid:?} n={n}");
                }
            }
        }
    }
}

#[test]
fn mixing_and_irreducibility() {
    let golden = Sft1D::from_strs("01", &["11"]).unwrap();
    assert!(golden.is_mixing().unwrap());
    let alt = Sft1D::from_strs("01", &["00", "11"]).unwrap();
    assert!(alt.is_irreducible().unwrap() && !alt.is_mixing().unwrap());
    let split = Sft1D::from_strs("01", &["01", "10"]).unwrap();
    assert!(!split.is_irreducible().unwrap());
}
