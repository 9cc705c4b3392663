use proptest::prelude::*;
use renorm_core::graphcalc::*;

fn poly(s: &str) -> CoeffPoly {
    CoeffPoly::parse(s).unwrap()
}

/// Independent route: the coefficient of a complete graph factorizes over its
/// solid components, each contributing Σ over ways to tile the run with stage
/// factors of Π(−coef)·σ^(joints).
fn component_factor(a: usize, stages: &[(usize, CoeffPoly)]) -> CoeffPoly {
    let mut table = vec![CoeffPoly::zero(); a + 1];
    // table[n] = Σ over tilings of length n of Π(−coef)·σ^(tiles−1), with the
    // σ for the joint attached when a tile is appended to a nonempty prefix.
    for n in 1..=a {
        let mut acc = CoeffPoly::zero();
        for (w, c) in stages {
            if *w > n {
                continue;
            }
            let tile = -c.clone();
            if *w == n {
                acc = acc + tile;
            } else {
                acc = acc + &(&table[n - w] * &CoeffPoly::sigma()) * &tile;
            }
        }
        table[n] = acc;
    }
    table[a].clone()
}

fn oracle(seq: &[usize], order: usize) -> CoeffPoly {
    let stages: Vec<(usize, CoeffPoly)> = stages_for_order(order)
        .into_iter()
        .filter(|s| *s != Stage::R6)
        .map(|s| (s.order(), s.default_coefficient()))
        .collect();
    seq.iter().fold(CoeffPoly::one(), |acc, &a| &acc * &component_factor(a, &stages))
}

#[test]
fn engine_agrees_with_factorized_oracle_for_all_compositions() {
    for order in 1..=8 {
        let sources = sources_for_order(order).unwrap();
        for seq in compositions(order) {
            assert_eq!(sequence_coefficient(&seq, &sources).unwrap(), oracle(&seq, order), "{seq:?}");
        }
    }
}

#[test]
fn order_six_table_matches_every_published_row() {
    let rows = coefficient_tables(6).expect("order-6 table");
    assert_eq!(rows.len(), 32 + 15);
    let find = |c: &str| rows.iter().find(|r| r.class == c).unwrap().coefficient.clone();
    assert_eq!(find("<6>"), poly("s^5+r*s^2"));
    assert_eq!(find("(n1,n2,n2,n2,n2,n1)"), poly("r-s^3"));
    assert_eq!(find("<2,2,1,1>"), CoeffPoly::zero());
    assert_eq!(find("<1,1,1,3>"), poly("-s^2"));
}

#[test]
fn order_seven_table_matches_every_published_row() {
    let rows = coefficient_tables(7).expect("order-7 table");
    assert_eq!(rows.len(), 64 + 3);
    let find = |c: &str| rows.iter().find(|r| r.class == c).unwrap().coefficient.clone();
    assert_eq!(find("<7>"), poly("8*e*s-7*s^6+12*s^3*r"));
    assert_eq!(find("<5,1,1>"), poly("-2*s*r"));
    assert_eq!(find("<1,3,3>"), poly("-s^4"));
    assert_eq!(find("<1,1,1,1,1,1,1>"), poly("-1"));
    assert_eq!(find("G0R6VG0"), poly("2*s"));
}

#[test]
fn order_six_graph_examples() {
    let sources = sources_for_order(6).unwrap();
    let all_solid = CharGraph::from_sequence(&[6]);
    assert_eq!(coefficient_of(&all_solid, &sources).unwrap(), poly("s^5+r*s^2"));
    let g = TuplePattern::new(&[1, 2, 1, 2, 2, 2]).graph();
    assert_eq!(coefficient_of(&g, &sources).unwrap(), poly("-s^2"));
}

#[test]
fn offsets_cancel_exactly() {
    let summary = verify_offsets().expect("offsets");
    assert!(summary.order6.passed());
    assert!(summary.order7.passed());
    for class in ["<6,1>", "<1,6>", "<4,3>", "<3,4>", "<1,1,1,4>", "<4,1,1,1>", "G0VG~0R6G0"] {
        assert!(summary.order7.cancelled.iter().any(|c| c == class), "{class} never produced");
    }
}

#[test]
fn eta_perturbation_breaks_the_offset() {
    let err = verify_offsets_with_eta_shift(Rational::from_integer(1)).unwrap_err();
    match err {
        GraphCalcError::OffsetFailure(msg) => assert!(msg.contains("<1,6>") || msg.contains("<6,1>"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn sixth_order_counterterm_is_reconstructed() {
    let r = renormalization_report(6).unwrap();
    assert_eq!(r.scalar, poly("4*e-3*s^5+5*s^2*r"));
    assert_eq!(renormalization_report(4).unwrap().scalar, poly("-r"));
}

fn arb_pattern() -> impl Strategy<Value = TuplePattern> {
    prop::collection::vec(0u8..4, 1..9).prop_map(|v| TuplePattern::new(&v))
}

proptest! {
    #[test]
    fn admissible_means_no_window_cancels(p in arb_pattern()) {
        let any_window = (0..p.len()).any(|i| (i + 2..=p.len()).any(|j| cancels(&p.window(i, j))));
        prop_assert_eq!(admissible(&p), !any_window);
    }

    #[test]
    fn odd_length_never_cancels(p in arb_pattern()) {
        if p.len() % 2 == 1 {
            prop_assert!(!cancels(&p));
        }
    }

    #[test]
    fn coefficients_are_linear_and_order_free(
        order in 2usize..8,
        pick in any::<u64>(),
        scale in -5i64..5,
    ) {
        let sources = sources_for_order(order).unwrap();
        let comps = compositions(order);
        let target = CharGraph::from_sequence(&comps[(pick as usize) % comps.len()]);
        let full = coefficient_of(&target, &sources).unwrap();
        let mut reversed = sources.clone();
        reversed.reverse();
        prop_assert_eq!(coefficient_of(&target, &reversed).unwrap(), full.clone());
        let split = (pick as usize >> 8) % (sources.len() + 1);
        let a = coefficient_of(&target, &sources[..split]).unwrap();
        let b = coefficient_of(&target, &sources[split..]).unwrap();
        prop_assert_eq!(&a + &b, full.clone());
        let scaled: Vec<SourceTerm> = sources
            .iter()
            .map(|s| SourceTerm { prefactor: s.prefactor.scale(Rational::from_integer(scale)), factors: s.factors.clone() })
            .collect();
        prop_assert_eq!(coefficient_of(&target, &scaled).unwrap(), full.scale(Rational::from_integer(scale)));
    }

    #[test]
    fn poly_display_parse_round_trip(coeffs in prop::collection::vec((-20i64..20, 1i64..5, 0u16..4, 0u16..4, 0u16..3), 0..6)) {
        let p: CoeffPoly = coeffs
            .iter()
            .map(|&(n, d, a, b, c)| CoeffPoly::term(Rational::new(n, d), Monomial([a, b, c])))
            .sum();
        prop_assert_eq!(CoeffPoly::parse(&p.to_string()).unwrap(), p);
    }
}
