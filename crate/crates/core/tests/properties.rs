//! Property tests for the exact-arithmetic invariants of system analysis,
//! the analytic invariances of the norms, and the partition/incidence
//! guarantees of the packing code.

use gowers_core::gowers::{
    norm_cyclic, norm_subset, pp_sum_fast, pp_sum_oracle, Method, SubsetDomain,
};
use gowers_core::linear_systems::{Flagification, LinearSystem};
use gowers_core::numeric::{close, e, Complex64};
use gowers_core::regions::{
    incidence_count, pack_cubes, Halfspace, LatticeRegion,
};
use gowers_core::series::{
    dilate_embed, dilation_image, generate, GeneratorKind, GeneratorSpec, Series,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn form_strategy(dimension: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, dimension)
        .prop_filter("nonzero form", |c| c.iter().any(|&x| x != 0))
}

fn system_strategy() -> impl Strategy<Value = LinearSystem> {
    (1usize..=3)
        .prop_flat_map(|d| prop::collection::vec(form_strategy(d), 2..=4))
        .prop_filter_map("valid system", |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            LinearSystem::from_rows(&refs).ok()
        })
}

/// Systems whose image contains `(1, …, 1)` by construction: every form has
/// first coefficient 1, so evaluating at the first unit vector gives all 1s.
fn translation_invariant_strategy() -> impl Strategy<Value = LinearSystem> {
    (2usize..=3)
        .prop_flat_map(|d| {
            prop::collection::vec(
                prop::collection::vec(-3i64..=3, d - 1).prop_map(|rest| {
                    let mut coeffs = vec![1i64];
                    coeffs.extend(rest);
                    coeffs
                }),
                2..=4,
            )
        })
        .prop_filter_map("valid system", |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            LinearSystem::from_rows(&refs).ok()
        })
}

fn unimodular(seed: u64, lo: i64, hi: i64) -> Series {
    generate(&GeneratorSpec::new(GeneratorKind::RandomUnimodular, seed), lo, hi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_span_contains_evaluation_vectors(
        system in system_strategy(),
        point in prop::collection::vec(-5i64..=5, 3),
        k in 1u32..=4,
    ) {
        let x = &point[..system.dimension()];
        let values = system.evaluate(x).unwrap();
        let span = system.power_span(k).unwrap();
        let vector: Vec<BigInt> = values
            .iter()
            .map(|&v| BigInt::from(v).pow(k))
            .collect();
        prop_assert!(
            span.contains_vector(&vector),
            "({values:?})^{k} escaped its span"
        );
    }

    #[test]
    fn translation_invariance_implies_flag(system in translation_invariant_strategy()) {
        prop_assert!(system.is_translation_invariant());
        let report = system.is_flag(5).unwrap();
        prop_assert!(
            report.is_flag_up_to_kmax,
            "violation {:?} in a translation-invariant system",
            report.first_violation
        );
    }

    #[test]
    fn flagification_rescales_to_translation_invariance(system in system_strategy()) {
        let Ok(flag) = system.flagify(16) else {
            // No witness in the searched ball (degenerate coincidences);
            // nothing to check.
            return Ok(());
        };
        prop_assert!(flag.a.iter().all(|&a| a != 0));
        prop_assert!(flag.product != 0);
        for (a, b) in flag.a.iter().zip(&flag.b) {
            prop_assert_eq!(a * b, flag.product);
        }
        prop_assert!(flag.rescaled.is_translation_invariant());
        // The same witness reproduces the flagification deterministically.
        let again = Flagification::from_witness(&system, &flag.witness_point).unwrap();
        prop_assert_eq!(again, flag);
    }

    #[test]
    fn rescaling_preserves_independence_rank(system in system_strategy()) {
        let Some(s) = system.independence_degree(4).unwrap() else {
            return Ok(());
        };
        let Ok(flag) = system.flagify(16) else {
            return Ok(());
        };
        let t = system.forms().len();
        let rescaled_dim = flag.rescaled.power_span(s + 1).unwrap().dim();
        prop_assert_eq!(rescaled_dim, t, "rank dropped after rescaling");
    }

    #[test]
    fn containment_answers_are_stable_in_kmax(system in system_strategy()) {
        let narrow = system.is_flag(4).unwrap();
        let wide = system.is_flag(7).unwrap();
        for entry in &narrow.entries {
            prop_assert_eq!(
                wide.contained(entry.low, entry.high),
                Some(entry.contained),
                "({}, {}) flipped between kmax = 4 and 7",
                entry.low,
                entry.high
            );
        }
        // A violation never disappears; new ones can only involve degrees
        // beyond the narrow horizon.
        if let Some((k, l)) = narrow.first_violation {
            prop_assert_eq!(wide.contained(k, l), Some(false));
        } else if let Some((_, l)) = wide.first_violation {
            prop_assert!(l > 4);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_bounded_and_deterministic(
        seed in any::<u64>(),
        kind_pick in 0usize..5,
        alpha in 0.0f64..1.0,
        beta in 0.0f64..1.0,
    ) {
        let kind = match kind_pick {
            0 => GeneratorKind::RandomUnimodular,
            1 => GeneratorKind::RandomPm1,
            2 => GeneratorKind::PolynomialPhase { coeffs: vec![alpha, beta] },
            3 => GeneratorKind::BracketPhase { alpha, beta },
            _ => GeneratorKind::Indicator { start: 0, step: 3 },
        };
        let spec = GeneratorSpec::new(kind, seed);
        let f = generate(&spec, -12, 12).unwrap();
        for (n, v) in f.support_points() {
            prop_assert!(v.norm() <= 1.0 + 1e-12, "|f({n})| = {}", v.norm());
        }
        let again = generate(&spec, -12, 12).unwrap();
        prop_assert_eq!(f.values(), again.values());
    }

    #[test]
    fn dilation_preserves_the_value_multiset(
        seed in any::<u64>(),
        a_i_raw in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        extra in 0i64..=2,
        n in 2i64..=8,
    ) {
        let a = a_i_raw.abs() + extra;
        let f = unimodular(seed, -n, n);
        let embedded = dilate_embed(&f, a_i_raw, a, n).unwrap();
        let image = dilation_image(a_i_raw, a, n);

        let mut original: Vec<(u64, u64)> = f
            .values()
            .iter()
            .map(|v| (v.re.to_bits(), v.im.to_bits()))
            .collect();
        let mut through_map: Vec<(u64, u64)> = image
            .points()
            .map(|x| {
                let v = embedded.value(x);
                (v.re.to_bits(), v.im.to_bits())
            })
            .collect();
        original.sort_unstable();
        through_map.sort_unstable();
        prop_assert_eq!(original, through_map);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_and_fast_sums_agree(seed in any::<u64>(), len in 2i64..=14, s in 1u32..=2) {
        let f = unimodular(seed, 0, len - 1);
        let oracle = pp_sum_oracle(&f, s).unwrap();
        let fast = pp_sum_fast(&f, s).unwrap();
        prop_assert!(
            close(oracle.value.re, fast.value.re, 1e-9),
            "{} vs {}",
            oracle.value.re,
            fast.value.re
        );
        prop_assert_eq!(oracle.config_count, fast.config_count);
    }

    #[test]
    fn norms_are_invariant_under_modulation(
        seed in any::<u64>(),
        theta in 0.0f64..1.0,
        start in -20i64..=20,
        step in prop::sample::select(vec![-4i64, -2, -1, 1, 2, 3]),
        len in 3u64..=12,
        s in 1u32..=2,
    ) {
        let f = unimodular(seed, -64, 64);
        let domain = SubsetDomain::Progression { start, step, len };
        let plain = norm_subset(&f, &domain, s, Method::Fast).unwrap();
        let modulated = norm_subset(&f.modulate(theta), &domain, s, Method::Fast).unwrap();
        prop_assert!(
            close(plain.norm_value, modulated.norm_value, 1e-9),
            "θ = {theta}: {} vs {}",
            plain.norm_value,
            modulated.norm_value
        );
    }

    #[test]
    fn norms_are_invariant_under_dilation_embedding(
        seed in any::<u64>(),
        a_i_raw in prop::sample::select(vec![-2i64, -1, 1, 2]),
        extra in 0i64..=1,
        n in 2i64..=7,
        s in 1u32..=2,
    ) {
        let a = a_i_raw.abs() + extra;
        let f = unimodular(seed, -n, n);
        let embedded = dilate_embed(&f, a_i_raw, a, n).unwrap();
        let image = dilation_image(a_i_raw, a, n);

        let interval = SubsetDomain::Interval { lo: -n, hi: n };
        let progression = SubsetDomain::from_progression(image);
        let base = norm_subset(&f, &interval, s, Method::Fast).unwrap();
        let mapped = norm_subset(&embedded, &progression, s, Method::Fast).unwrap();
        prop_assert!(
            close(base.norm_value, mapped.norm_value, 1e-9),
            "a_i = {a_i_raw}, a = {a}: {} vs {}",
            base.norm_value,
            mapped.norm_value
        );
        prop_assert_eq!(base.config_count, mapped.config_count);
    }

    #[test]
    fn cyclic_norms_are_monotone(seed in any::<u64>(), n in 8i64..=20) {
        let f = unimodular(seed, 0, n - 1);
        let u2 = norm_cyclic(&f, 1).unwrap().norm_value;
        let u3 = norm_cyclic(&f, 2).unwrap().norm_value;
        let u4 = norm_cyclic(&f, 3).unwrap().norm_value;
        prop_assert!(u2 <= u3 + 1e-9);
        prop_assert!(u3 <= u4 + 1e-9);
    }

    #[test]
    fn norms_of_bounded_series_stay_bounded(
        phases in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 4..=16),
        s in 1u32..=2,
    ) {
        let values: Vec<Complex64> = phases.iter().map(|&(r, theta)| e(theta) * r).collect();
        let lo = -(values.len() as i64) / 2;
        let f = Series::new_bounded(lo, values, "bounded").unwrap();
        let (wlo, whi) = f.window();

        let interval = SubsetDomain::Interval { lo: wlo, hi: whi };
        let report = norm_subset(&f, &interval, s, Method::Fast).unwrap();
        prop_assert!(report.norm_value <= 1.0 + 1e-9, "{}", report.norm_value);
        let cyclic = norm_cyclic(&f, s).unwrap();
        prop_assert!(cyclic.norm_value <= 1.0 + 1e-9, "{}", cyclic.norm_value);
    }

    #[test]
    fn subset_norm_factorizes_over_oracle_routes(
        seed in any::<u64>(),
        lo in -6i64..=0,
        width in 2i64..=8,
    ) {
        let f = unimodular(seed, -8, 10);
        let hi = lo + width;
        let domain = SubsetDomain::Interval { lo, hi };
        let report = norm_subset(&f, &domain, 1, Method::Oracle).unwrap();

        // Independent route: materialize f·1_A and 1_A and take raw sums.
        let restricted = f.restricted(lo, hi).unwrap();
        let ones = Series::new_bounded(
            lo,
            vec![Complex64::new(1.0, 0.0); width as usize + 1],
            "1_A",
        )
        .unwrap();
        let num = pp_sum_oracle(&restricted, 1).unwrap().value.re.max(0.0);
        let den = pp_sum_oracle(&ones, 1).unwrap().value.re;
        let direct = (num / den).powf(0.25);
        prop_assert!(
            close(report.norm_value, direct, 1e-9),
            "{} vs {}",
            report.norm_value,
            direct
        );
    }
}

fn halfspace_strategy() -> impl Strategy<Value = Halfspace> {
    (
        prop::collection::vec(-2i64..=2, 2).prop_filter("nonzero normal", |v| {
            v.iter().any(|&c| c != 0)
        }),
        -4i64..=8,
    )
        .prop_map(|(normal, bound)| Halfspace::new(normal, bound))
}

fn region_strategy() -> impl Strategy<Value = LatticeRegion> {
    (4i64..=10, prop::collection::vec(halfspace_strategy(), 0..=3))
        .prop_map(|(radius, halfspaces)| LatticeRegion::new(2, radius, halfspaces).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enumeration_is_sorted_complete_and_contained(region in region_strategy()) {
        let points: Vec<Vec<i64>> = region.points().collect();
        for pair in points.windows(2) {
            prop_assert!(pair[0] < pair[1], "not strictly increasing: {pair:?}");
        }
        for p in &points {
            prop_assert!(region.contains(p).unwrap());
        }
        let n = region.radius();
        let brute = (-n..=n)
            .flat_map(|x| (-n..=n).map(move |y| vec![x, y]))
            .filter(|p| region.contains(p).unwrap())
            .count();
        prop_assert_eq!(points.len(), brute);
    }

    #[test]
    fn packing_partitions_every_region(
        region in region_strategy(),
        q in 1i64..=2,
        eps in prop::sample::select(vec![0.25f64, 0.5]),
    ) {
        let partition = pack_cubes(&region, q, eps, region.radius()).unwrap();
        let mut from_partition: Vec<Vec<i64>> = partition
            .cells
            .iter()
            .flat_map(|cell| cell.points().collect::<Vec<_>>())
            .chain(partition.boundary.iter().cloned())
            .collect();
        from_partition.sort();
        let mut expected: Vec<Vec<i64>> = region.points().collect();
        expected.sort();
        prop_assert_eq!(from_partition, expected);
    }

    #[test]
    fn incidence_agrees_with_cell_scans(
        region in region_strategy(),
        q in 1i64..=2,
        coeffs in prop::collection::vec(-2i64..=2, 2).prop_filter("nonzero", |v| v.iter().any(|&c| c != 0)),
        c in -3i64..=3,
        n in -30i64..=30,
    ) {
        let partition = pack_cubes(&region, q, 0.25, region.radius()).unwrap();
        let form = gowers_core::linear_systems::LinearForm::new(coeffs).unwrap();
        let fast = incidence_count(&partition, &form, c, n).unwrap();
        let brute = partition
            .cells
            .iter()
            .filter(|cell| {
                cell.points().any(|p| {
                    form.coeffs()
                        .iter()
                        .zip(&p)
                        .map(|(&a, &x)| a * x)
                        .sum::<i64>()
                        + c
                        == n
                })
            })
            .count() as u64;
        prop_assert_eq!(fast, brute);
    }
}
