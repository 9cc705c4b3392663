use proptest::prelude::*;
use renorm_core::graphcalc::{admissible, TuplePattern};
use renorm_core::opalgebra::*;

fn ring(n: usize, seed: u64, constants: ConstantChoice) -> LatticeInstance {
    let mut cfg = InstanceConfig::ring(n, seed);
    cfg.constants = constants;
    LatticeInstance::new(cfg).unwrap()
}

fn failures(report: &IdentityReport) -> Vec<String> {
    report
        .rows
        .iter()
        .filter(|r| !r.as_expected())
        .map(|r| format!("{} residual {:e} expected pass={}", r.check, r.residual, r.expected))
        .collect()
}

#[test]
fn identity_suite_holds_on_small_rings() {
    for (n, seed) in [(6, 1), (6, 2), (8, 3)] {
        for c in [ConstantChoice::Canonical, ConstantChoice::Perturbed] {
            let report = identity_suite(&ring(n, seed, c), true).unwrap();
            assert!(report.all_as_expected(), "N={n} seed={seed} {c:?}: {:?}", failures(&report));
        }
    }
}

#[test]
fn identity_suite_holds_on_ten_sites() {
    let report = identity_suite(&ring(10, 5, ConstantChoice::Canonical), false).unwrap();
    assert!(report.all_as_expected(), "{:?}", failures(&report));
}

#[test]
fn identity_suite_holds_for_arbitrary_constants() {
    let inst = ring(6, 11, ConstantChoice::Custom { rho: -0.7, eta: 2.3 });
    let report = identity_suite(&inst, false).unwrap();
    assert!(report.all_as_expected(), "{:?}", failures(&report));
}

#[test]
fn typeset_variants_are_reported_as_failing() {
    let report = identity_suite(&ring(8, 7, ConstantChoice::Canonical), false).unwrap();
    for name in [
        "boxed5_printed_sigma_rho_sign_vs_born",
        "lemma_iteration_2_printed_even_cap",
        "c_minus_p6pp_printed",
        "q1_printed",
        "q2_printed",
        "rearrangement1_printed_refined7",
        "rearranged7_closed_form_printed",
    ] {
        let row = report.rows.iter().find(|r| r.check == name).unwrap();
        assert!(!row.pass && row.residual > 1e-6, "{name}: {:e}", row.residual);
    }
}

/// C(n₁,n₃) = v²_{n₁}v²_{n₃} G̃(n₁,n₃) Σ_{n₂} G̃(n₁,n₂)² v²_{n₂} G̃(n₂,n₃)² − ηv⁶ δ.
#[test]
fn c_matches_triple_loop() {
    let mut cfg = InstanceConfig::ring(4, 3);
    cfg.kappa = 0.9;
    let inst = LatticeInstance::new(cfg).unwrap();
    let ops = special_operators(&inst);
    let n = inst.sites;
    let v2: Vec<f64> = inst.v.iter().map(|x| x * x).collect();
    let mut gt = vec![vec![0.0; n]; n];
    for (a, row) in gt.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = inst.g0[(a, b)] - if a == b { inst.sigma } else { 0.0 };
        }
    }
    for a in 0..n {
        for c in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                s += gt[a][b] * gt[a][b] * v2[b] * gt[b][c] * gt[b][c];
            }
            let mut want = v2[a] * v2[c] * gt[a][c] * s;
            if a == c {
                want -= inst.eta * v2[a].powi(3);
            }
            assert!((ops.c[(a, c)] - want).abs() <= 1e-14 * want.abs().max(1e-3), "({a},{c})");
        }
    }
}

#[test]
fn special_operator_shapes() {
    let inst = ring(8, 4, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    for i in 0..inst.sites {
        assert!((inst.g0[(i, i)] - inst.sigma).abs() < 1e-14);
        assert_eq!(ops.gt[(i, i)], 0.0);
    }
    for (name, m) in [("W", &ops.w), ("C", &ops.c), ("P6pp", &ops.p6pp), ("M", &ops.m), ("C6", &ops.c6)] {
        let asym = rel_diff(&m.transpose(), m);
        if name == "P6pp" {
            // P₆″ is antisymmetric in its weight, not symmetric.
            assert!(asym > 1e-3, "{name}");
        } else {
            assert!(asym < 1e-14, "{name}: {asym:e}");
        }
    }
    assert!(rel_diff(&ops.s, &ops.st.transpose()) == 0.0);
    assert!(inst.v.iter().all(|&x| x > 0.0));
    assert!(inst.omega.iter().all(|&w| w == 1.0 || w == -1.0));
}

#[test]
fn zero_coupling_kills_every_operator() {
    let mut cfg = InstanceConfig::ring(6, 2);
    cfg.kappa = 0.0;
    let inst = LatticeInstance::new(cfg).unwrap();
    let ops = special_operators(&inst);
    for m in [&ops.w, &ops.w4, &ops.c, &ops.c6, &ops.p6p, &ops.p6pp, &ops.s, &ops.q1, &ops.q2] {
        assert_eq!(max_abs(m), 0.0);
    }
    for d in [&ops.d4, &ops.r6, &ops.d6_1, &ops.d6_2, &ops.d7] {
        assert!(d.iter().all(|&x| x == 0.0));
    }
    let ctx = Context { inst: &inst, ops: &ops };
    let boxed = boxed_all(&ctx, 7).unwrap();
    for i in 2..=7 {
        assert_eq!(check_lemma_iteration(i, &inst, &ops, &boxed, Form::Verified), 0.0);
    }
    assert_eq!(boxed[0], inst.g0);
    for b in &boxed[1..] {
        assert_eq!(max_abs(b), 0.0);
    }
    let [first, second] = require_rearrangements(&inst).unwrap();
    assert!(first.iter().chain(&second).all(|&r| r == 0.0));
}

#[test]
fn born_low_degrees() {
    let inst = ring(6, 9, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    let born = graded_born(&inst, &ops, &all_stages(), 8).unwrap();
    assert_eq!(born.degree(0), &inst.g0);
    let ctx = Context { inst: &inst, ops: &ops };
    let first = eval("G0 V G0", &ctx, false).unwrap();
    assert!(rel_diff(&-born.degree(1), &first) < 1e-15);
    assert!(born_residual(&inst, &ops, &all_stages(), &born).max_relative < BORN_TOL);
    assert_eq!(graded_born(&inst, &ops, &all_stages(), 9).unwrap_err(), OpError::DegreeOverflow(9));
}

#[test]
fn graded_product_is_multiplicative() {
    let inst = ring(6, 9, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    let a = graded_born(&inst, &ops, &all_stages(), 5).unwrap();
    let b = graded_born(&inst, &ops, &all_stages(), 3).unwrap();
    let p = a.mul(&b);
    assert_eq!(p.max_degree(), 3);
    let by_hand = a.degree(0) * b.degree(2) + a.degree(1) * b.degree(1) + a.degree(2) * b.degree(0);
    assert!(rel_diff(p.degree(2), &by_hand) < 1e-15);
}

#[test]
fn star_of_two_potentials_drops_the_diagonal_pair() {
    let inst = ring(3, 5, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    let ctx = Context { inst: &inst, ops: &ops };
    let starred = eval("G0 V G0 V G0", &ctx, true).unwrap();
    let n = inst.sites;
    let g = &inst.g0;
    let vw: Vec<f64> = inst.v.iter().zip(&inst.omega).map(|(v, w)| v * w).collect();
    for a in 0..n {
        for b in 0..n {
            let mut full = 0.0;
            let mut pair = 0.0;
            for x in 0..n {
                for y in 0..n {
                    full += g[(a, x)] * vw[x] * g[(x, y)] * vw[y] * g[(y, b)];
                }
                pair += g[(a, x)] * inst.v[x].powi(2) * g[(x, x)] * g[(x, b)];
            }
            assert!((starred[(a, b)] - (full - pair)).abs() < 1e-15, "({a},{b})");
        }
    }
}

#[test]
fn star_is_trivial_with_at_most_one_potential() {
    let inst = ring(5, 5, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    let ctx = Context { inst: &inst, ops: &ops };
    for w in ["G0 V G0", "G0 W G0", "G0 v2 Gt v4 G0"] {
        assert_eq!(eval(w, &ctx, true).unwrap(), eval(w, &ctx, false).unwrap(), "{w}");
    }
}

#[test]
fn word_errors() {
    let inst = ring(64, 5, ConstantChoice::Canonical);
    let ops = special_operators(&inst);
    let ctx = Context { inst: &inst, ops: &ops };
    let long = "G0 V G0 V G0 V G0 V G0 V G0";
    assert!(matches!(eval(long, &ctx, true), Err(OpError::TooLarge(_))));
    assert!(eval(long, &ctx, false).is_ok());
    assert_eq!(eval("G0 X", &ctx, false).unwrap_err(), OpError::UnknownToken("X".into()));
    assert!(matches!(eval("  ", &ctx, false), Err(OpError::MalformedWord(_))));
}

#[test]
fn rearrangements_hold_degreewise() {
    for c in [ConstantChoice::Canonical, ConstantChoice::Perturbed] {
        let [first, second] = require_rearrangements(&ring(8, 13, c)).unwrap();
        assert_eq!(first.len(), 8);
        assert!(first.iter().chain(&second).all(|&r| r < IDENTITY_TOL));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn admissibility_agrees_with_window_definition(tuple in prop::collection::vec(0usize..5, 1..8)) {
        prop_assert_eq!(admissible_tuple(&tuple), admissible(&TuplePattern::new(&tuple)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boxed_terms_are_homogeneous(c in 0.3f64..3.0, i in 1usize..=7, seed in 0u64..50) {
        let inst = ring(5, seed, ConstantChoice::Canonical);
        let ops = special_operators(&inst);
        let ctx = Context { inst: &inst, ops: &ops };
        let b = sum_terms(&boxed_terms(i, &inst, Form::Verified).unwrap(), &ctx).unwrap();
        let scaled = inst.scaled(c);
        let sops = special_operators(&scaled);
        let sctx = Context { inst: &scaled, ops: &sops };
        let bs = sum_terms(&boxed_terms(i, &scaled, Form::Verified).unwrap(), &sctx).unwrap();
        prop_assert!(rel_diff(&(bs / c.powi(i as i32)), &b) < 1e-12);
    }

    #[test]
    fn boxed_terms_are_symmetric_and_match_born(seed in 0u64..1000, kappa in 0.05f64..0.8) {
        let mut cfg = InstanceConfig::ring(6, seed);
        cfg.kappa = kappa;
        let inst = LatticeInstance::new(cfg).unwrap();
        let ops = special_operators(&inst);
        let ctx = Context { inst: &inst, ops: &ops };
        let born = born7(&inst, &ops).unwrap();
        let boxed = boxed_all(&ctx, 7).unwrap();
        for i in 0..=7 {
            prop_assert!(rel_diff(&boxed[i], born.degree(i)) < IDENTITY_TOL, "degree {}", i);
            prop_assert!(rel_diff(&boxed[i].transpose(), &boxed[i]) < IDENTITY_TOL, "degree {}", i);
        }
    }
}
