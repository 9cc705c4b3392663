use proptest::prelude::*;
use renorm_core::kernels::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// All offsets of Z_L^d (or the box |n|_∞ ≤ r when `period` is None).
fn offsets(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// ∫_{T³} dξ / (6 − 2Σ cos 2πξ_j) with the ξ₃ integral done in closed form,
/// ∫₀¹ dξ/(a − 2cos 2πξ) = 1/√(a² − 4), and the remaining 2-d integrand's
/// 1/|θ| corner singularity removed by the Duffy map θ₂ = yθ₁ on each half of
/// [0,π]²; composite Simpson in both variables.
fn watson_oracle() -> f64 {
    let f = |t1: f64, t2: f64| {
        let a = 6.0 - 2.0 * t1.cos() - 2.0 * t2.cos();
        // a − 2 = 4 sin²(t1/2) + 4 sin²(t2/2), computed without cancellation.
        let am2 = 4.0 * (t1 / 2.0).sin().powi(2) + 4.0 * (t2 / 2.0).sin().powi(2);
        1.0 / (am2 * (a + 2.0)).sqrt()
    };
    let pi = std::f64::consts::PI;
    let n = 800;
    let simpson = |k: usize| {
        if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let h = 1.0 / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let x = pi * i as f64 * h;
        for j in 0..=n {
            let y = j as f64 * h;
            // Jacobian π·x for (x, y) ↦ (x, xy); x = 0 has a finite limit.
            let g = if i == 0 {
                let e = 1e-9;
                e * f(e, e * y)
            } else {
                x * f(x, x * y)
            };
            s += simpson(i) * simpson(j) * pi * g;
        }
    }
    let half = s * h * h / 9.0;
    // Two triangles of [0,π]², which is a quarter of the torus; divide by π².
    2.0 * half / (pi * pi)
}

#[test]
fn laplacian_symbol_examples() {
    assert_eq!(laplacian_symbol(&[0.0; 4]), 0.0);
    assert!((laplacian_symbol(&[0.5]) - 4.0).abs() < 1e-15);
    assert!((laplacian_symbol(&[0.5; 5]) - 20.0).abs() < 1e-13);
}

#[test]
fn watson_value_matches_independent_quadrature() {
    let oracle = watson_oracle();
    assert!((oracle - 0.2527310098).abs() < 1e-8, "oracle {oracle}");
    let g = free_green(3, 0.0, 2).unwrap();
    assert!((g.sigma() - oracle).abs() < 1e-6, "{} vs {oracle}", g.sigma());
}

#[test]
fn massive_diagonal_within_spectral_bounds() {
    for d in 1..=5 {
        let g = free_green(d, 10.0, 2).unwrap();
        let s = g.sigma();
        assert!(s > 1.0 / (100.0 + 4.0 * d as f64) && s < 0.01, "d={d} σ={s}");
    }
}

#[test]
fn massless_low_dimension_rejected() {
    assert_eq!(free_green(2, 0.0, 3).unwrap_err(), KernelError::DimensionTooSmall(2));
    assert_eq!(torus_green(3, 8, 0.0).unwrap_err(), KernelError::SingularOperator);
}

#[test]
fn free_d5_positive_and_decreasing_with_cubic_decay() {
    let g = free_green(5, 0.0, 16).unwrap();
    let axis = g.axis(16);
    assert!(axis.iter().all(|p| p.1 > 0.0));
    assert!(axis.windows(2).all(|w| w[1].1 < w[0].1));
    let fit = decay_fit(&axis_points(&g.values, (4, 16))).unwrap();
    assert!((fit.exponent + 3.0).abs() <= 0.15, "{fit:?}");
    // K = G³ inherits three times the exponent.
    let k = g.values.map(|v| v * v * v);
    let kf = decay_fit(&axis_points(&k, (4, 16))).unwrap();
    assert!((kf.exponent + 9.0).abs() <= 1.0, "{kf:?}");
}

#[test]
fn torus_constant_mode_sum() {
    for &(d, l, m) in &[(1, 7, 0.3), (2, 6, 1.0), (3, 8, 0.5), (5, 6, 2.0)] {
        let g = torus_green(d, l, m).unwrap();
        let s = g.values.unfolded_sum(Some(l), |v| v);
        assert!(rel(s, 1.0 / (m * m)) < 1e-12, "d={d} L={l}: {s}");
    }
}

#[test]
fn torus_converges_as_side_doubles() {
    let n = [1i64, 0, 0];
    let vals: Vec<f64> = [4, 8, 16, 32].iter().map(|&l| torus_green(3, l, 1.0).unwrap().value(&n).unwrap()).collect();
    let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    // Image contributions fall off like e^{−μL}: each doubling shrinks the
    // change by orders of magnitude.
    assert!(diffs.windows(2).all(|w| w[1] < 1e-2 * w[0]), "{diffs:?}");
}

#[test]
fn d3_torus_against_free_kernel() {
    let free = free_green(3, 0.0, 3).unwrap();
    let ex = torus_extrapolated(3, 64).unwrap();
    let lit = torus_green(3, 64, 0.01).unwrap();
    let mut worst_lit: f64 = 0.0;
    for n in offsets(3, -3, 3) {
        let f = free.value(&n).unwrap();
        assert!(rel(ex.value(&n).unwrap(), f) <= 0.02, "{n:?}");
        worst_lit = worst_lit.max(rel(lit.value(&n).unwrap(), f));
    }
    // The literal massive torus carries the zero-mode shift 1/(m²L³) ≈ 0.038.
    assert!(worst_lit > 0.3, "literal torus unexpectedly close: {worst_lit}");
}

#[test]
fn constants_by_brute_force_on_small_torus() {
    let (d, l) = (2, 6);
    let g = torus_green(d, l, 1.0).unwrap();
    let c = renorm_constants(&g).unwrap();
    let gt = |n: &[i64]| if n.iter().all(|&x| x.rem_euclid(l as i64) == 0) { 0.0 } else { g.value(n).unwrap() };
    let pts = offsets(d, 0, l as i64 - 1);
    let sigma = g.value(&[0, 0]).unwrap();
    let cube: f64 = pts.iter().map(|n| g.value(n).unwrap().powi(3)).sum();
    let mut eta = 0.0;
    for a in &pts {
        for b in &pts {
            let ab: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            eta += gt(a) * gt(b).powi(2) * gt(&ab).powi(2);
        }
    }
    assert!(rel(c.sigma, sigma) < 1e-14);
    assert!(rel(c.rho, 2.0 * sigma.powi(3) - cube) < 1e-12);
    assert!(rel(c.eta, eta) < 1e-12);
    assert!(c.residual_m0 < 1e-8 && c.residual_n0 < 1e-8);
}

#[test]
fn d5_constants_free_against_torus() {
    let free = renorm_constants(&free_green(5, 0.0, 16).unwrap()).unwrap();
    let ex = renorm_constants(&torus_extrapolated(5, 48).unwrap()).unwrap();
    for (a, b) in [(free.sigma, ex.sigma), (free.rho, ex.rho), (free.eta, ex.eta)] {
        assert!(rel(a, b) < 1e-4, "{free:?}\n{ex:?}");
    }
    for c in [&free, &ex] {
        assert!(c.residual_m0 < 1e-8 && c.residual_n0 < 1e-8 && c.tail_bound < TAIL_LIMIT);
    }
    // The literal m = 1e−3 torus at L = 48 is dominated by its zero mode.
    let lit = renorm_constants(&torus_green(5, 48, 1e-3).unwrap()).unwrap();
    assert!(rel(lit.rho, free.rho) > 1.0);
}

#[test]
fn tail_guard() {
    assert!(matches!(renorm_constants(&free_green(5, 0.0, 3).unwrap()), Err(KernelError::TailTooLarge { .. })));
    assert!(matches!(renorm_constants(&free_green(3, 0.0, 6).unwrap()), Err(KernelError::TailTooLarge { .. })));
}

#[test]
fn derived_kernel_identities_and_decay() {
    let g = torus_green_projected(5, 32, 1e-3).unwrap();
    let c = renorm_constants(&g).unwrap();
    let dk = derived_kernels(&g, &c).unwrap();
    assert_eq!(dk.m.data[0], c.rho - c.sigma.powi(3));
    assert_eq!(dk.n.data[0], 0.0);
    assert_eq!(dk.ntilde.data[0], -c.eta);
    assert!(dk.m.unfolded_sum(Some(32), |v| v).abs() < 1e-8);
    assert!(dk.ntilde.unfolded_sum(Some(32), |v| v).abs() < 1e-8);
    let gn = decay_fit(&axis_points(&dk.g0n, (3, 7))).unwrap();
    assert!(gn.exponent <= -6.3, "{gn:?}");
}

#[test]
fn k_decay_on_extrapolated_torus() {
    let g = torus_extrapolated(5, 48).unwrap();
    let k = g.values.map(|v| v * v * v);
    let fit = decay_fit(&axis_points(&k, (4, 12))).unwrap();
    assert!((fit.exponent + 9.0).abs() <= 1.0, "{fit:?}");
    // On the literal L = 16, m = 1e−3 torus the zero mode 1/(m²L⁵) ≈ 0.95
    // swamps G and K is nearly flat.
    let lit = torus_green(5, 16, 1e-3).unwrap();
    let k = lit.values.map(|v| v * v * v);
    let fit = decay_fit(&axis_points(&k, (2, 8))).unwrap();
    assert!(fit.exponent > -1.0, "{fit:?}");
}

#[test]
fn free_convolution_truncation_is_flagged() {
    let g = free_green(5, 0.0, 12).unwrap();
    let c = renorm_constants(&g).unwrap();
    let dk = derived_kernels(&g, &c).unwrap();
    assert!(dk.truncation_warning.is_some());
}

#[test]
fn summation_lemma_probes() {
    let probes: Vec<usize> = (2..=20).collect();
    let r1 = convolution_lemma(5, 3.0, 4.0, 80, &probes, DEFAULT_SPREAD).unwrap();
    assert!(r1.pass, "{r1:?}");
    let r2 = weighted_convolution_lemma(5, 3.0, 3.0, 2.5, 80, &probes, DEFAULT_SPREAD).unwrap();
    assert!(r2.pass, "{r2:?}");
    // Probes beyond radius/4 are rejected.
    assert!(matches!(convolution_lemma(5, 3.0, 4.0, 60, &probes, 50.0), Err(KernelError::ParameterViolation(_))));
}

#[test]
fn summation_lemma_parameter_checks() {
    assert!(convolution_lemma(5, 2.0, 3.0, 40, &[2], 50.0).is_err());
    assert!(convolution_lemma(5, 5.0, 1.0, 40, &[2], 50.0).is_err());
    assert!(weighted_convolution_lemma(5, 4.0, 3.0, 2.5, 40, &[2], 50.0).is_err());
    assert!(weighted_convolution_lemma(5, 3.0, 3.0, 5.0, 40, &[2], 50.0).is_err());
    assert!(difference_lemma(0.0, &[], 50.0).is_err());
}

#[test]
fn difference_lemma_example_and_grid() {
    let pair = (vec![100, 0, 0], vec![101, 0, 0]);
    let lhs = (100f64.powf(-0.3) - 101f64.powf(-0.3)).abs();
    let rhs = 1.0 / (201.0 * 100f64.powf(0.3));
    assert!(lhs <= 10.0 * rhs);
    let r = difference_lemma(0.3, &[pair], 10.0).unwrap();
    assert!(r.pass && (r.probes[0].ratio - lhs / rhs).abs() < 1e-12);

    let pts = offsets(2, -12, 12);
    let pairs: Vec<_> =
        pts.iter().step_by(7).flat_map(|a| pts.iter().step_by(5).map(move |b| (a.clone(), b.clone()))).collect();
    let r = difference_lemma(0.3, &pairs, DEFAULT_SPREAD).unwrap();
    assert!(r.pass, "max ratio {}", r.spread);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_kernel_matches_direct_dft_and_hypercubic_symmetry(
        n in proptest::collection::vec(-7i64..7, 3),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
        signs in proptest::collection::vec(any::<bool>(), 3),
    ) {
        let (l, m) = (6usize, 0.7f64);
        let g = torus_green(3, l, m).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut direct = 0.0;
        for k in offsets(3, 0, l as i64 - 1) {
            let phase: f64 = k.iter().zip(&n).map(|(&a, &b)| (a * b) as f64).sum::<f64>() * two_pi / l as f64;
            let sym: f64 = k.iter().map(|&a| 2.0 - 2.0 * (two_pi * a as f64 / l as f64).cos()).sum();
            direct += phase.cos() / (m * m + sym);
        }
        direct /= (l * l * l) as f64;
        let v = g.value(&n).unwrap();
        prop_assert!((v - direct).abs() < 1e-14);
        let image: Vec<i64> = perm.iter().zip(&signs).map(|(&p, &s)| if s { -n[p] } else { n[p] }).collect();
        prop_assert!((g.value(&image).unwrap() - v).abs() <= 1e-15 * v.abs());
    }

    #[test]
    fn free_kernel_is_a_resolvent_away_from_origin(n in proptest::collection::vec(-3i64..=3, 4)) {
        // (−Δ + m²)G = δ, checked at an interior point with an independent stencil.
        let g = free_green(4, 0.5, 4).unwrap();
        let mut lap = (8.0 + 0.25) * g.value(&n).unwrap();
        for i in 0..4 {
            for s in [-1, 1] {
                let mut q = n.clone();
                q[i] += s;
                lap -= g.value(&q).unwrap();
            }
        }
        let delta = if n.iter().all(|&x| x == 0) { 1.0 } else { 0.0 };
        prop_assert!((lap - delta).abs() < 1e-10);
    }

    #[test]
    fn decay_fit_recovers_synthetic_exponents(p in 0.5f64..10.0, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = (3..15).map(|r| (r as f64, c * (r as f64).powf(-p))).collect();
        let f = decay_fit(&pts).unwrap();
        prop_assert!((f.exponent + p).abs() < 1e-9 && f.residual < 1e-9);
    }
}
