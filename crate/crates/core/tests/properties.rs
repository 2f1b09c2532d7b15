//! Invariants checked on random inputs.

use proptest::prelude::*;

use oneround::algofile::{format_algorithm, parse_algorithm};
use oneround::certify::{pentagon_certificate, verify_certificate};
use oneround::debruijn::{
    mono_count_by_overlap, mono_count_streaming, mono_fraction, Coloring, DeBruijnSpec, Variant,
};
use oneround::evaluate::{p_bracket_monotone, p_exact, p_grid, p_threshold, section_bracket};
use oneround::ledger::Ledger;
use oneround::model::{
    lift, refine, Algorithm, GridAlgorithm, MonotoneRegionAlgorithm, Oracle, OrderPattern, RankAlgorithm, RegionShape,
    ThresholdAlgorithm, MINUS_PLUS_MINUS,
};
use oneround::optimize::{BoundKind, BoundRecord, FlipState};
use oneround::scalar::ratio;
use oneround::simulate::mono_count;
use oneround::Rational;

fn grid(min_n: usize, max_n: usize) -> impl Strategy<Value = GridAlgorithm> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n * n).prop_map(move |bits| GridAlgorithm::new(n, bits).unwrap())
    })
}

fn coloring(variant: Variant, n: usize) -> impl Strategy<Value = Coloring> {
    let spec = DeBruijnSpec::new(variant, n).unwrap();
    proptest::collection::vec(any::<bool>(), spec.vertex_count()).prop_map(move |bits| Coloring::new(spec, bits).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..1.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refinement_preserves_value_and_lift(g in grid(1, 4), factor in 1usize..4, x in unit(), y in unit(), z in unit()) {
        let r = refine(&g, factor, 256).unwrap();
        prop_assert_eq!(p_grid(&r), p_grid(&g));
        prop_assert_eq!(lift(&r).eval(x, y, z), lift(&g).eval(x, y, z));
    }

    #[test]
    fn grid_value_matches_induced_coloring(g in grid(2, 5)) {
        prop_assert_eq!(p_grid(&g), mono_fraction(&g.to_coloring().unwrap()).fraction);
    }

    #[test]
    fn cut_is_invariant_under_swap_relabel_and_mirror(
        (c, pi) in (2usize..5).prop_flat_map(|n| (coloring(Variant::Normal, n), permutation(n)))
    ) {
        let base = mono_fraction(&c).mono_edges;
        prop_assert_eq!(mono_fraction(&c.complement()).mono_edges, base);
        prop_assert_eq!(mono_fraction(&c.relabel(&pi).unwrap()).mono_edges, base);
        prop_assert_eq!(mono_fraction(&c.reversed()).mono_edges, base);
    }

    #[test]
    fn distinct_cut_invariances((c, pi) in (4usize..7).prop_flat_map(|n| (coloring(Variant::Distinct, n), permutation(n)))) {
        let base = mono_count_streaming(&c);
        prop_assert_eq!(mono_count_by_overlap(&c), base);
        prop_assert_eq!(mono_count_streaming(&c.relabel(&pi).unwrap()), base);
        prop_assert_eq!(mono_count_streaming(&c.reversed()), base);
    }

    #[test]
    fn overlap_count_matches_edge_walk(c in (2usize..6).prop_flat_map(|n| coloring(Variant::Normal, n))) {
        prop_assert_eq!(mono_count_by_overlap(&c), mono_count_streaming(&c));
    }

    #[test]
    fn pentagon_forces_a_fifth(c in coloring(Variant::Distinct, 5)) {
        // Each of the 24 odd cycles holds a monochromatic edge.
        prop_assert!(mono_count_streaming(&c) >= 24);
    }

    #[test]
    fn flip_deltas_match_recounts(c in coloring(Variant::Normal, 3), flips in proptest::collection::vec(0usize..27, 1..200)) {
        let mut state = FlipState::new(&c);
        for v in flips {
            let before = Coloring::new(*c.spec(), state.bits().to_vec()).unwrap();
            let d = state.flip(v);
            let after = Coloring::new(*c.spec(), state.bits().to_vec()).unwrap();
            prop_assert_eq!(mono_count_streaming(&after) as i64 - mono_count_streaming(&before) as i64, d);
            prop_assert_eq!(state.mono(), mono_count_streaming(&after));
        }
    }

    #[test]
    fn bracket_contains_monotone_grid_values(
        table_n in 2usize..7,
        w in (0.0..1.0f64, 0.1..1.0f64, 0.0..1.0f64),
        offset in -0.5..0.8f64,
        res in 2usize..10,
    ) {
        // b·w1 - a·w0 - c·w2 >= offset is monotone in the -+- order.
        let g = GridAlgorithm::from_fn(table_n, |a, b, c| {
            let s = |i: usize| (i as f64 + 0.5) / table_n as f64;
            s(b) * w.1 - s(a) * w.0 - s(c) * w.2 >= offset
        });
        prop_assert!(g.is_monotone(MINUS_PLUS_MINUS));
        let exact = p_grid(&g);
        let f = MonotoneRegionAlgorithm::new(RegionShape::Grid(g), Some(MINUS_PLUS_MINUS));
        let br = p_bracket_monotone(&f, res).unwrap();
        prop_assert!(br.contains(&exact), "{} not in {:?}", exact, br);
        prop_assert!(section_bracket(&f, res * 3).unwrap().contains(&exact));
    }

    #[test]
    fn rank_algorithms_ignore_monotone_transforms(
        decision in proptest::array::uniform6(any::<bool>()),
        a in unit(), b in unit(), c in unit(),
        k in 1u32..5,
    ) {
        let f = RankAlgorithm { decision };
        let t = |x: f64| 0.1 + 0.8 * x.powi(k as i32);
        prop_assert_eq!(f.eval(a, b, c), f.eval(t(a), t(b), t(c)));
        prop_assert_eq!(f.decide(OrderPattern::of(a, b, c)), f.eval(a, b, c));
    }

    #[test]
    fn threshold_on_grid_cuts_matches_grid(g in grid(1, 4)) {
        // A threshold algorithm with cuts k/n is the lift of the grid.
        let n = g.n();
        let cuts: Vec<Rational> = (1..n).map(|k| ratio(k as i64, n as i64)).collect();
        let t = ThresholdAlgorithm::new(cuts, g.table().to_vec()).unwrap();
        prop_assert_eq!(p_threshold(&t), p_grid(&g));
    }

    #[test]
    fn permuted_certificates_verify(pi in permutation(5)) {
        let cert = pentagon_certificate().unwrap();
        let v = verify_certificate(&cert.permuted(&pi)).unwrap();
        prop_assert_eq!(v.bound, ratio(1, 5));
    }

    #[test]
    fn cycle_counts_are_rotation_invariant(values in proptest::collection::vec(unit(), 4..40), shift in 0usize..40) {
        let f = |a: f64, b: f64, c: f64| (b > a) ^ (c > 0.5);
        let mut rotated = values.clone();
        rotated.rotate_left(shift % values.len());
        prop_assert_eq!(mono_count(&f, &values), mono_count(&f, &rotated));
    }

    #[test]
    fn algorithm_files_round_trip(g in grid(1, 4), decision in proptest::array::uniform6(any::<bool>())) {
        for f in [Algorithm::Grid(g.clone()), Algorithm::Rank(RankAlgorithm { decision })] {
            let back = parse_algorithm(&format_algorithm(&f)).unwrap();
            prop_assert_eq!(p_exact(&back).unwrap(), p_exact(&f).unwrap());
            prop_assert_eq!(format_algorithm(&back), format_algorithm(&f));
        }
    }

    #[test]
    fn ledger_keeps_the_sandwich(appends in proptest::collection::vec((any::<bool>(), 1i64..100), 1..30)) {
        let mut ledger = Ledger::in_memory();
        for (upper, num) in appends {
            let record = BoundRecord {
                direction: if upper { BoundKind::Upper } else { BoundKind::Lower },
                value: ratio(num, 100),
                n: 2,
                variant: Variant::Normal,
                method: "test".into(),
                witness_path: None,
                seed: None,
            };
            let _ = ledger.append(record, "test");
            if let Some((lo, hi)) = ledger.sandwich() {
                prop_assert!(lo < hi);
            }
        }
    }
}
