//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Run with `--nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::experiments::{chain_rows_csv, experiment_chain_diameter, ChainDiameterSpec, ChainInstance};
use symdyn::grid2d::{
    embed_homoclinic_xh, flat_xh, random_xh_window, required_margin, xh_rules, FillOptions, FillOutcome,
    FillProblem, Rect,
};
use symdyn::layers::{classify_pair, letter, x_rules, Sequence, SequencePair};
use symdyn::shift1d::{ztcpe_report, Sft1D};
use symdyn::spacer1d::{inducement_windows, spacer_sft};
use symdyn::spacer2d::{meander_move, project_f2, superimpose, validate_b, Axis, MOVE_FRAME};
use symdyn::words::{self, Word};
use symdyn::{Quadratic, Rational, Slope};

const BALANCE_WINDOWS: usize = 500;
const BALANCE_BUDGET: Duration = Duration::from_secs(5);
const SHIFT_HALF_WIDTH: i64 = 50;
const INDUCE_MAX_LEN: usize = 12;
const INDUCE_BUDGET: Duration = Duration::from_secs(60);
const LN2_TOL: f64 = 1e-9;
const GOLDEN_TOL: f64 = 1e-6;
const FILL_BUDGET: Duration = Duration::from_secs(600);
const EMBED_SAMPLES: u64 = 50;
const SPACER2D_SAMPLES: u64 = 100;
const CLASSIFY_RADIUS: i64 = 40;
const SKEW_PAIRS: usize = 20;
const SKEW_PER_SLOPE: usize = 3;
const CHAIN_NMAX: usize = 8;
const CHAIN_WINDOW: usize = 4;

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n:>2} {}: {detail}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn c01_balanced_word_laws() {
    let start = Instant::now();
    let mut slopes: Vec<Slope> = [
        (0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5), (3, 5), (1, 6), (5, 7), (3, 8), (4, 9),
        (7, 10), (5, 11), (7, 12), (6, 13), (11, 17), (13, 21), (31, 64),
    ]
    .iter()
    .map(|&(p, q)| Slope::rational(p, q).unwrap())
    .collect();
    for q in ["(-1+1*sqrt(5))/2", "(3-1*sqrt(5))/2", "(-1+1*sqrt(2))/1", "(-1+1*sqrt(3))/2", "(-2+1*sqrt(7))/1"] {
        slopes.push(q.parse().unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut violations = 0usize;
    let mut factors = 0usize;
    for k in 0..BALANCE_WINDOWS {
        let alpha = slopes[k % slopes.len()];
        let len = rng.gen_range(5..=200i64);
        let lo = rng.gen_range(-1000..=1000i64);
        let w = if k % 2 == 0 {
            words::lower_char_window(&alpha, lo, lo + len - 1)
        } else {
            words::upper_char_window(&alpha, lo, lo + len - 1)
        };
        let mut prefix = vec![0i64];
        for &c in w.letters() {
            prefix.push(prefix.last().unwrap() + (c == b'1') as i64);
        }
        for n in 1..=len as usize {
            let na: Quadratic = alpha.value().mul_int(n as i128);
            let (fl, ce) = (na.floor() as i64, na.ceil() as i64);
            for s in 0..=w.len() - n {
                let c = prefix[s + n] - prefix[s];
                factors += 1;
                // |nα − c| ≤ 1, exactly: c − 1 ≤ nα ≤ c + 1
                let within_one = na.cmp_int((c - 1) as i128).is_ge() && na.cmp_int((c + 1) as i128).is_le();
                let floor_or_ceil = na.is_integer() || c == fl || c == ce;
                if !within_one || !floor_or_ceil {
                    violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && elapsed < BALANCE_BUDGET;
    report(1, ok, &format!("{BALANCE_WINDOWS} windows, {factors} factors, {violations} violations, {elapsed:.2?}"));
    assert!(ok);
}

#[test]
fn c02_shift_identity() {
    let mut checked = 0;
    let mut mismatches = 0;
    for j in 1..=12i64 {
        for i in 0..=j {
            if num_integer::gcd(i, j) != 1 {
                continue;
            }
            let k = words::char_shift_offset(Rational::new(i, j)).unwrap().k;
            let a = Slope::rational(i, j).unwrap();
            let upper = words::upper_char_window(&a, -SHIFT_HALF_WIDTH + k, SHIFT_HALF_WIDTH + k);
            let lower = words::lower_char_window(&a, -SHIFT_HALF_WIDTH, SHIFT_HALF_WIDTH);
            checked += 1;
            if upper.letters() != lower.letters() {
                mismatches += 1;
            }
        }
    }
    report(2, mismatches == 0, &format!("{checked} slopes, {mismatches} mismatches"));
    assert_eq!(mismatches, 0);
}

#[test]
fn c03_image_rules_match_inducement() {
    let mut instances = Vec::new();
    for alphabet in ["a", "ab"] {
        let letters = alphabet.as_bytes();
        let mut candidates: Vec<Vec<u8>> = letters.iter().map(|&c| vec![c]).collect();
        for &c in letters {
            for &d in letters {
                candidates.push(vec![c, d]);
            }
        }
        for mask in 0u32..1 << candidates.len() {
            let f: Vec<Word> =
                (0..candidates.len()).filter(|k| mask >> k & 1 == 1).map(|k| Word::new(candidates[k].clone())).collect();
            instances.push(Sft1D::new(letters, f).unwrap());
        }
    }
    let mut mismatched = 0;
    let mut slowest = Duration::ZERO;
    for x in &instances {
        let t = Instant::now();
        let img = spacer_sft(x).unwrap();
        for l in 1..=INDUCE_MAX_LEN {
            let rules: BTreeSet<Vec<u8>> = img.language(l).into_iter().map(Word::into_letters).collect();
            if rules != inducement_windows(x, l).unwrap() {
                mismatched += 1;
                break;
            }
        }
        slowest = slowest.max(t.elapsed());
    }
    let ok = mismatched == 0 && slowest < INDUCE_BUDGET;
    report(3, ok, &format!("{} instances, L <= {INDUCE_MAX_LEN}, {mismatched} mismatched, slowest {slowest:.2?}", instances.len()));
    assert!(ok);
}

#[test]
fn c04_entropy() {
    let full = Sft1D::full_shift(b"01").unwrap().entropy().unwrap();
    let golden = Sft1D::from_strs("01", &["11"]).unwrap().entropy().unwrap();
    let split = Sft1D::from_strs("01", &["01", "10"]).unwrap().entropy().unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ok = (full - 2f64.ln()).abs() < LN2_TOL && (golden - phi.ln()).abs() < GOLDEN_TOL && split == 0.0;
    report(4, ok, &format!("full {full:.12}, golden {golden:.12}, split {split}"));
    assert!(ok);
}

/// Row `j` of the window admits a third layer in `{0, 1}` iff the running
/// sum of `b(i − j) − a(i)` over the window's columns spans at most one.
fn rows_jointly_balanced(a: &[u8], b: impl Fn(i64) -> u8, w: i64, h: i64) -> bool {
    (0..h).all(|j| {
        let (mut s, mut lo, mut hi) = (0i64, 0i64, 0i64);
        for i in 1..w {
            s += b(i - j) as i64 - a[i as usize] as i64;
            lo = lo.min(s);
            hi = hi.max(s);
        }
        hi - lo <= 1
    })
}

#[test]
fn c05_third_layer_fill_matches_joint_balance() {
    let start = Instant::now();
    let rules = x_rules();
    // shifts of lower characteristic sequences with denominator at most 5
    let mut seqs: Vec<Vec<u8>> = Vec::new();
    for q in 1..=5i64 {
        for p in 0..=q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let s = Slope::rational(p, q).unwrap();
            for shift in 0..q {
                let w = words::lower_char_window(&s, shift - 16, shift + 16);
                seqs.push(w.letters().iter().map(|c| c - b'0').collect());
            }
        }
    }
    let (mut cases, mut disagreements, mut balanced) = (0usize, 0usize, 0usize);
    for a in &seqs {
        for b in &seqs {
            for w in 1..=8i64 {
                for h in 1..=4i64 {
                    // columns 0..w from the middle of a; b(k) for k in [−h+1, w−1]
                    let a_cols: Vec<u8> = (0..w).map(|i| a[(16 + i) as usize]).collect();
                    let bb = |k: i64| b[(16 + k) as usize];
                    let oracle = rows_jointly_balanced(&a_cols, bb, w, h);
                    let mut prob = FillProblem::new(&rules, Rect::new(0, 0, w, h));
                    for i in 0..w {
                        for j in 0..h {
                            let (f, s) = (a_cols[i as usize], bb(i - j));
                            prob.restrict(i, j, &[letter(f, s, 0), letter(f, s, 1)]).unwrap();
                        }
                    }
                    let filled = match prob.solve(&FillOptions::default()) {
                        FillOutcome::Filled(_) => Some(true),
                        FillOutcome::Unsatisfiable => Some(false),
                        FillOutcome::BudgetExhausted => None,
                    };
                    cases += 1;
                    balanced += oracle as usize;
                    if filled != Some(oracle) {
                        disagreements += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = disagreements == 0 && elapsed < FILL_BUDGET;
    report(5, ok, &format!("{cases} windows ({balanced} jointly balanced), {disagreements} disagreements, {elapsed:.2?}"));
    assert!(ok);
}

#[test]
fn c06_homoclinic_embedding() {
    let mut failures = Vec::new();
    for seed in 0..EMBED_SAMPLES {
        let w = random_xh_window(seed, 10);
        let ok = required_margin(&w).and_then(|m| embed_homoclinic_xh(&w, m)).is_ok_and(|e| {
            let r = e.bbox().unwrap();
            let flat = flat_xh(r);
            xh_rules().validate(&e).unwrap()
                && w.agrees_with(&e)
                && e.cells().all(|((x, y), c)| !r.in_frame(x, y, 5) || flat.get(x, y) == Some(c))
        });
        if !ok {
            failures.push(seed);
        }
    }
    report(6, failures.is_empty(), &format!("{EMBED_SAMPLES} windows, failures at seeds {failures:?}"));
    assert!(failures.is_empty());
}

#[test]
fn c07_spacer2d_round_trip_and_moves() {
    let (mut round_trip_failures, mut tried, mut accepted, mut move_failures) = (0, 0, 0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..SPACER2D_SAMPLES {
        let inst = common::spacer2d_instance(seed, b"ab");
        let w = superimpose(&inst.xh, &inst.xv, &inst.base).unwrap();
        let p = project_f2(&w).unwrap();
        if (p.xh, p.xv, &p.base) != (inst.xh.clone(), inst.xv.clone(), &inst.base) || !validate_b(&w, b"ab").unwrap() {
            round_trip_failures += 1;
        }
        let r = w.bbox().unwrap();
        for _ in 0..6 {
            let axis = if rng.gen() { Axis::Horizontal } else { Axis::Vertical };
            let sign = if rng.gen() { 1 } else { -1 };
            let (rw, rh) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let region = Rect::new(
                rng.gen_range(r.x0 + MOVE_FRAME..=(r.x1 - MOVE_FRAME - rw).max(r.x0 + MOVE_FRAME)),
                rng.gen_range(r.y0 + MOVE_FRAME..=(r.y1 - MOVE_FRAME - rh).max(r.y0 + MOVE_FRAME)),
                rw,
                rh,
            );
            tried += 1;
            let Ok(out) = meander_move(&w, axis, sign, region) else {
                continue;
            };
            accepted += 1;
            let frame_same = r.sites().all(|(x, y)| !r.in_frame(x, y, MOVE_FRAME) || w.get(x, y) == out.get(x, y));
            let base_same = project_f2(&out).is_ok_and(|q| q.base.normalized() == inst.base.normalized());
            if !validate_b(&out, b"ab").unwrap() || !frame_same || !base_same || out.bbox() != Some(r) {
                move_failures += 1;
            }
        }
    }
    let ok = round_trip_failures == 0 && move_failures == 0 && accepted > 0;
    report(
        7,
        ok,
        &format!(
            "{SPACER2D_SAMPLES} round trips ({round_trip_failures} failed), {accepted}/{tried} moves accepted ({move_failures} failed)"
        ),
    );
    assert!(ok);
}

#[test]
fn c08_condition_reports() {
    let split = ztcpe_report(&Sft1D::from_strs("01", &["01", "10"]).unwrap(), 1, None).unwrap();
    let golden = ztcpe_report(&Sft1D::from_strs("01", &["11"]).unwrap(), 4, None).unwrap();
    let full = ztcpe_report(&Sft1D::full_shift(b"01").unwrap(), 4, None).unwrap();
    let split_ok = !split.passes() && split.failure().is_some_and(|(n, why)| n == 1 && why.contains("disconnected"));
    let golden_ok = golden.passes() && golden.diameters() == vec![Some(1); 4];
    let full_ok = full.passes() && full.diameters() == vec![Some(1); 4];
    let ok = split_ok && golden_ok && full_ok;
    report(
        8,
        ok,
        &format!(
            "split {:?}, golden {:?}, full {:?}",
            split.failure().map(|f| f.0),
            golden.diameters(),
            full.diameters()
        ),
    );
    assert!(ok);
}

/// `x̲_α` on `[lo, hi]` for `α = p/q`, straight from integer floors.
fn lower_rational(p: i64, q: i64, lo: i64, hi: i64) -> Vec<u8> {
    (lo..=hi).map(|n| b'0' + (((n + 1) * p).div_euclid(q) - (n * p).div_euclid(q)) as u8).collect()
}

fn is_factor(needle: &[u8], hay: &[u8]) -> bool {
    hay.windows(needle.len()).any(|w| w == needle)
}

/// Constructed eventually periodic sequences that are 2-balanced but not
/// 1-balanced around a single defect, paired with a shift of `x̲_α`.
fn skew_pairs() -> Vec<(Sequence, Sequence)> {
    let r = CLASSIFY_RADIUS;
    let mut out = Vec::new();
    'slopes: for q in 2..=5i64 {
        for p in 1..q {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            let period = String::from_utf8(lower_rational(p, q, 0, q - 1)).unwrap();
            let mut windows = BTreeSet::new();
            'lens: for len in q..=2 * q {
                for bits in 0u32..1 << len {
                    let center: String = (0..len).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect();
                    let a: Sequence = format!("{period}|{center}|{period}").parse().unwrap();
                    let wa = a.window(-r, r);
                    if a.is_periodic()
                        || words::is_k_balanced(&wa, 1).unwrap()
                        || !words::is_k_balanced(&wa, 2).unwrap()
                    {
                        continue;
                    }
                    let partner = (0..q).find_map(|s| {
                        let b: Sequence = format!("lower:{p}/{q}+{s}/{q}").parse().unwrap();
                        words::is_jointly_balanced(&wa, &b.window(-r, r)).unwrap().then_some(b)
                    });
                    if let Some(b) = partner {
                        if !windows.insert(wa) {
                            continue;
                        }
                        out.push((a, b));
                        if out.len() == SKEW_PAIRS {
                            break 'slopes;
                        }
                        if windows.len() == SKEW_PER_SLOPE {
                            break 'lens;
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn c09_classification() {
    let r = CLASSIFY_RADIUS;
    let mut periodic: Vec<Sequence> = Vec::new();
    let mut seen = BTreeSet::new();
    for len in 1..=4u32 {
        for bits in 0u32..1 << len {
            let w: String = (0..len).map(|k| if bits >> k & 1 == 1 { '1' } else { '0' }).collect();
            let s = Sequence::periodic(&w).unwrap();
            if seen.insert(s.window(-12, 12)) {
                periodic.push(s);
            }
        }
    }
    let mut pairs: Vec<(Sequence, Sequence)> = Vec::new();
    for a in &periodic {
        for b in &periodic {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let skew = skew_pairs();
    let skew_count = skew.len();
    for (a, b) in skew {
        pairs.push((b.clone(), a.clone()));
        pairs.push((a, b));
    }
    let (mut jointly, mut untagged, mut unpartnered) = (0, 0, 0);
    for (a, b) in &pairs {
        let (wa, wb) = (a.window(-r, r), b.window(-r, r));
        if !words::is_jointly_balanced(&wa, &wb).unwrap() {
            continue;
        }
        jointly += 1;
        let Ok(tags) = classify_pair(&SequencePair::new(a.clone(), b.clone()), r) else {
            untagged += 1;
            continue;
        };
        if tags.is_empty() {
            untagged += 1;
        }
        // a 2-balanced, not 1-balanced member needs its partner inside the orbit of x̲_α
        let alpha = a.slope().as_rational().unwrap_or(Rational::new(0, 1));
        let lower = lower_rational(*alpha.numer(), *alpha.denom(), -8 * r, 8 * r);
        for (me, other, tag) in [(&wa, &wb, 3), (&wb, &wa, 4)] {
            let skewed = words::is_k_balanced(me, 2).unwrap() && !words::is_k_balanced(me, 1).unwrap();
            if skewed && (!tags.contains(&tag) || !is_factor(other.letters(), &lower)) {
                unpartnered += 1;
            }
        }
    }
    let ok = untagged == 0 && unpartnered == 0 && skew_count == SKEW_PAIRS;
    report(
        9,
        ok,
        &format!(
            "{} pairs ({skew_count} skew, both orders), {jointly} jointly balanced, {untagged} untagged, {unpartnered} skew members without an orbit partner",
            pairs.len()
        ),
    );
    assert!(ok);
}

#[test]
fn c10_spacer_balanced_chain_diameters() {
    let spec = ChainDiameterSpec {
        instance: ChainInstance::SpacerBalanced { window: CHAIN_WINDOW },
        n_max: CHAIN_NMAX,
        radius: None,
        max_words: 5000,
    };
    let rows = experiment_chain_diameter(&spec).unwrap();
    print!("{}", chain_rows_csv(&rows));
    let ok = rows.len() == CHAIN_NMAX && rows.iter().all(|r| !r.truncated && r.components == 1);
    let diam: Vec<_> = rows.iter().map(|r| r.diameter).collect();
    report(10, ok, &format!("n <= {CHAIN_NMAX}, diameters {diam:?}"));
    assert!(ok);
}
