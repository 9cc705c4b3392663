use proptest::prelude::*;
use rand::Rng;
use renorm_core::graphcalc::{admissible, TuplePattern};
use renorm_core::probtools::*;

/// f on sign vector `x` by evaluating every monomial literally.
fn eval_direct(f: &BooleanPoly, x: &[f64]) -> f64 {
    f.terms.iter().map(|(mono, c)| c * mono.iter().map(|&i| x[i]).product::<f64>()).sum()
}

fn signs(m: usize, code: usize) -> Vec<f64> {
    (0..m).map(|i| if code >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

fn direct_moment(f: &BooleanPoly, p: i32) -> f64 {
    let total: f64 = (0..1usize << f.m).map(|c| eval_direct(f, &signs(f.m, c)).abs().powi(p)).sum();
    total / (1usize << f.m) as f64
}

#[test]
fn hand_enumerated_moments() {
    let y1 = BooleanPoly::variable(3, 0).unwrap();
    assert_eq!(exact_moment(&y1, 2.0).unwrap(), 1.0);
    let f = BooleanPoly::new(2, vec![(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
    assert_eq!(exact_moment(&f, 4.0).unwrap(), 8.0);
    // Y₁² = 1.
    let g = BooleanPoly::new(2, vec![(vec![0, 0], 2.0)]).unwrap();
    assert_eq!(exact_moment(&g, 3.0).unwrap(), 8.0);
}

#[test]
fn exact_moment_matches_direct_enumeration() {
    let mut rng = rng(5);
    for s in 1..=3 {
        let f = random_poly(&mut rng, 9, s, 25).unwrap();
        for p in [1, 2, 4, 8] {
            let a = exact_moment(&f, p as f64).unwrap();
            let b = direct_moment(&f, p);
            assert!((a - b).abs() <= 1e-12 * b, "s={s} p={p}: {a} vs {b}");
        }
    }
}

#[test]
fn limits_and_bad_input() {
    let f = BooleanPoly::variable(21, 0).unwrap();
    assert_eq!(exact_moment(&f, 2.0).unwrap_err(), ProbError::TooManyVariables(21));
    assert!(BooleanPoly::new(3, vec![(vec![3], 1.0)]).is_err());
    assert!(exact_moment(&BooleanPoly::variable(2, 0).unwrap(), 0.0).is_err());
}

#[test]
fn bonami_extremes() {
    let y1 = BooleanPoly::variable(4, 0).unwrap();
    assert!((bonami_check(&y1).unwrap().ratio - 1.0 / 9.0).abs() < 1e-15);
    for s in 1..=5 {
        let f = BooleanPoly::new(6, vec![((0..s).collect(), 1.0)]).unwrap();
        let out = bonami_check(&f).unwrap();
        assert!((out.ratio - 9f64.powi(-(s as i32))).abs() < 1e-15);
        assert_eq!(out.degree, s);
    }
    let zero = BooleanPoly::new(3, vec![]).unwrap();
    assert_eq!(bonami_check(&zero).unwrap().ratio, 0.0);
}

#[test]
fn bonami_holds_on_two_hundred_random_polynomials() {
    let report = bonami_suite(200, 12, 3, 42).unwrap();
    assert_eq!(report.trials.len(), 200);
    assert!(report.all_hold, "max ratio {}", report.max_ratio);
    assert!(report.trials.iter().all(|t| (1..=3).contains(&t.degree)));
}

#[test]
fn moment_equivalence_examples() {
    let mut rng = rng(9);
    for _ in 0..20 {
        let f = random_poly(&mut rng, 10, 2, 30).unwrap();
        let p1 = moment_equivalence_check(&f, 1.0).unwrap();
        assert!(p1.ratio <= 1.0 + 1e-12 && p1.holds);
        let p4 = moment_equivalence_check(&f, 4.0).unwrap();
        assert!(p4.ratio <= 9.0 && p4.holds, "{}", p4.ratio);
    }
    let y1 = BooleanPoly::variable(3, 1).unwrap();
    let out = moment_equivalence_check(&y1, 8.0).unwrap();
    assert!((out.ratio - 1.0).abs() < 1e-15 && out.bound == 27.0);
    let zero = BooleanPoly::new(3, vec![]).unwrap();
    assert_eq!(moment_equivalence_check(&zero, 4.0).unwrap().ratio, 0.0);
}

/// lhs by brute force: every sign vector, every tuple, admissibility from
/// the window definition.
fn brute_khintchine(w: &ChainWeights, p: i32, restrict: bool) -> (f64, f64) {
    let (n, s) = (w.sites(), w.s());
    let tuples: Vec<Vec<usize>> = (0..n.pow(s as u32))
        .map(|mut c| {
            let mut t = vec![0; s];
            for slot in t.iter_mut().rev() {
                *slot = c % n;
                c /= n;
            }
            t
        })
        .collect();
    let mut moment = 0.0;
    for code in 0..1usize << n {
        let x = signs(n, code);
        let sum: f64 = tuples
            .iter()
            .filter(|t| !restrict || admissible(&TuplePattern::new(t)))
            .map(|t| w.weight(t) * t.iter().map(|&i| x[i]).product::<f64>())
            .sum();
        moment += sum.abs().powi(p);
    }
    let lhs = (moment / (1usize << n) as f64).powf(1.0 / p as f64);
    let rhs = tuples.iter().map(|t| w.weight(t).powi(2)).sum::<f64>().sqrt();
    (lhs, rhs)
}

#[test]
fn khintchine_matches_brute_force() {
    let mut rng = rng(21);
    for s in 1..=3 {
        for p in [2, 4] {
            let w = ChainWeights::random(&mut rng, 6, s);
            for (restrict, r) in [(true, Restriction::Admissible), (false, Restriction::Unrestricted)] {
                let out = khintchine_check(&w, p as f64, Mode::Exact, r).unwrap();
                let (lhs, rhs) = brute_khintchine(&w, p, restrict);
                assert!((out.lhs - lhs).abs() <= 1e-12 * lhs, "s={s} p={p} {r:?}");
                assert!((out.rhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }
}

#[test]
fn khintchine_single_site_sum_is_orthogonal() {
    let mut rng = rng(3);
    for _ in 0..20 {
        let w = ChainWeights::random(&mut rng, 10, 1);
        let out = khintchine_check(&w, 2.0, Mode::Exact, Restriction::Admissible).unwrap();
        assert!((out.ratio - 1.0).abs() < 1e-12, "{}", out.ratio);
    }
}

#[test]
fn khintchine_zero_weights() {
    let mut w = ChainWeights::random(&mut rng(1), 5, 2);
    w.first.iter_mut().for_each(|x| *x = 0.0);
    let out = khintchine_check(&w, 4.0, Mode::Exact, Restriction::Admissible).unwrap();
    assert_eq!((out.lhs, out.rhs, out.ratio), (0.0, 0.0, 0.0));
}

#[test]
fn khintchine_two_step_ratio_is_bounded() {
    let mut rng = rng(77);
    let mut max: f64 = 0.0;
    for _ in 0..100 {
        let w = ChainWeights::random(&mut rng, 10, 2);
        max = max.max(khintchine_check(&w, 2.0, Mode::Exact, Restriction::Admissible).unwrap().ratio);
    }
    assert!(max <= S2_P2_BOUND, "{max}");
}

#[test]
fn cancelled_tuples_break_the_inequality() {
    for sites in [4, 9, 14] {
        let w = diagonal_witness(sites);
        let open = khintchine_check(&w, 2.0, Mode::Exact, Restriction::Unrestricted).unwrap();
        assert!((open.lhs - sites as f64).abs() < 1e-12);
        assert!((open.ratio - (sites as f64).sqrt()).abs() < 1e-12);
        let starred = khintchine_check(&w, 2.0, Mode::Exact, Restriction::Admissible).unwrap();
        assert_eq!(starred.lhs, 0.0);
    }
    let report = khintchine_suite(42, 10, 10).unwrap();
    assert!(report.negative_control.exceeds_rhs);
    assert!(report.s1_p2_deviation < 1e-12);
    assert!(report.s2_p2_holds);
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let w = ChainWeights::random(&mut rng(8), 12, 2);
    let exact = khintchine_check(&w, 2.0, Mode::Exact, Restriction::Admissible).unwrap();
    let mc = khintchine_check(&w, 2.0, Mode::MonteCarlo { samples: 40_000, seed: 4 }, Restriction::Admissible).unwrap();
    assert!((mc.lhs / exact.lhs - 1.0).abs() < 0.03, "{} vs {}", mc.lhs, exact.lhs);
    let big = ChainWeights::random(&mut rng(8), 15, 1);
    assert!(matches!(khintchine_check(&big, 2.0, Mode::Exact, Restriction::Admissible), Err(ProbError::TooLarge(_))));
    assert!(khintchine_check(&big, 2.0, Mode::MonteCarlo { samples: 100, seed: 1 }, Restriction::Admissible).is_ok());
}

#[test]
fn omega_is_reproducible_and_balanced() {
    assert_eq!(sample_omega(7, 500), sample_omega(7, 500));
    let differing = (0..100u64).filter(|&k| sample_omega(2 * k, 100) != sample_omega(2 * k + 1, 100)).count();
    assert!(differing >= 99);
    let big = sample_omega(123, 1_000_000);
    let mean = big.values.iter().map(|&x| x as f64).sum::<f64>() / big.len() as f64;
    assert!(mean.abs() < 0.005, "{mean}");
    let plus = big.values[..100_000].iter().filter(|&&x| x == 1).count() as f64 / 1e5;
    assert!((plus - 0.5).abs() < 0.01, "{plus}");
    assert!(big.values.iter().all(|&x| x == 1 || x == -1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_on_the_cube(seed in any::<u64>(), s in 1usize..=3) {
        let mut r = rng(seed);
        let f = random_poly(&mut r, 8, s, 20).unwrap();
        // Reduce Y² = 1 by parity of each variable count.
        let mut hat = std::collections::HashMap::new();
        for (mono, c) in &f.terms {
            let mut key: Vec<usize> = mono.iter().copied().filter(|i| mono.iter().filter(|j| *j == i).count() % 2 == 1).collect();
            key.sort_unstable();
            key.dedup();
            *hat.entry(key).or_insert(0.0) += c;
        }
        let weight: f64 = hat.values().map(|c: &f64| c * c).sum();
        let e2 = exact_moment(&f, 2.0).unwrap();
        prop_assert!((e2 - weight).abs() <= 1e-12 * weight.max(1e-300));
    }

    #[test]
    fn bonami_ratio_is_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let s = r.gen_range(1..=3);
        let f = random_poly(&mut r, 8, s, 20).unwrap();
        let a = bonami_check(&f).unwrap();
        let b = bonami_check(&f.scaled(c)).unwrap();
        prop_assert!(a.holds && b.holds);
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio.max(1e-300));
    }
}
