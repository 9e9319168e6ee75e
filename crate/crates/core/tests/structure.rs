use polar_pilot_core::construction::{
    construct_info_set, ga_llr_means, rank_by_reliability, validate_code_spec, ConstructionMethod,
};
use polar_pilot_core::gf2::{
    dominates, gf2_invert_lower_triangular, gf2_multiply, is_domination_contiguous, is_involution, is_zero, kron_power,
    submatrix, BitMatrix, IndexSet,
};
use polar_pilot_core::pilots::{compute_d, compute_s, select_eps, select_ueps, validate_plan};
use proptest::prelude::*;

/// Literal triple loop over (h, i, j).
fn contiguous_naive(set: &IndexSet, n: u32) -> bool {
    let size = 1usize << n;
    for h in set.iter() {
        for j in set.iter() {
            for i in 1..=size {
                if dominates(h, i, n).unwrap() && dominates(i, j, n).unwrap() && !set.contains(i) {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn d_complement_block_is_zero_for_every_length() {
    for n in 2..=10 {
        let g = kron_power(n).unwrap();
        let d = compute_d(1 << n).unwrap();
        assert!(is_zero(&submatrix(&g, &d.complement(), &d).unwrap()), "N = {}", 1 << n);
        assert!(is_involution(&submatrix(&g, &d, &d).unwrap()).unwrap());
    }
}

#[test]
fn constructed_sets_pass_every_check() {
    for n in 3..=8 {
        let size = 1usize << n;
        for k in [size / 4, size / 2, 3 * size / 4] {
            let spec = construct_info_set(n, k, 3.0, &ConstructionMethod::GaussianApproximation).unwrap();
            let v = validate_code_spec(&spec);
            assert!(v.all_pass(), "N = {size}, K = {k}: {v:?}");
        }
    }
}

#[test]
fn nesting_under_a_fixed_design_channel() {
    let order = rank_by_reliability(&ga_llr_means(8, 4.0 * 0.5 * 10f64.powf(0.3)));
    for k in 1..256 {
        let small = IndexSet::new(256, order[..k].iter().copied()).unwrap();
        let big = IndexSet::new(256, order[..k + 1].iter().copied()).unwrap();
        assert!(small.is_subset(&big));
    }
}

fn subset_of_16() -> impl Strategy<Value = IndexSet> {
    proptest::collection::btree_set(1usize..=16, 0..=6).prop_map(|s| IndexSet::new(16, s).unwrap())
}

fn unit_lower_triangular(size: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(any::<bool>(), size * size).prop_map(move |bits| {
        let mut m = BitMatrix::identity(size);
        for r in 0..size {
            for c in 0..r {
                m.set(r, c, bits[r * size + c]);
            }
        }
        m
    })
}

proptest! {
    #[test]
    fn contiguity_matches_triple_loop(set in subset_of_16()) {
        prop_assert_eq!(is_domination_contiguous(&set, 4).unwrap(), contiguous_naive(&set, 4));
    }

    #[test]
    fn contiguity_implies_involution(set in subset_of_16()) {
        if is_domination_contiguous(&set, 4).unwrap() {
            let g = kron_power(4).unwrap();
            prop_assert!(is_involution(&submatrix(&g, &set, &set).unwrap()).unwrap());
        }
    }

    #[test]
    fn submatrix_entries_follow_domination(set in subset_of_16()) {
        let g = kron_power(4).unwrap();
        let m = submatrix(&g, &set, &set).unwrap();
        for (r, &i) in set.as_slice().iter().enumerate() {
            for (c, &j) in set.as_slice().iter().enumerate() {
                prop_assert_eq!(m.get(r, c), dominates(i, j, 4).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lower_triangular_inverse(m in (1usize..=24).prop_flat_map(unit_lower_triangular)) {
        let inv = gf2_invert_lower_triangular(&m).unwrap();
        prop_assert_eq!(gf2_multiply(&m, &inv).unwrap(), BitMatrix::identity(m.rows()));
        prop_assert_eq!(gf2_multiply(&inv, &m).unwrap(), BitMatrix::identity(m.rows()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pilot_plans_keep_the_encoding_set_structured(n in 3u32..=8, k_frac in 1usize..4, pilots_frac in 0.0f64..=1.0) {
        let size = 1usize << n;
        let k = size * k_frac / 4;
        let spec = construct_info_set(n, k, 3.0, &ConstructionMethod::GaussianApproximation).unwrap();
        let g = kron_power(n).unwrap();

        let s = compute_s(&spec);
        let ueps_count = ((s.len() + k) as f64 * pilots_frac) as usize;
        let plan = select_ueps(&spec, ueps_count).unwrap();
        let c = plan.encoding_set();
        prop_assert!(is_zero(&submatrix(&g, &c.complement(), c).unwrap()));
        prop_assert!(validate_plan(&spec, &plan).unwrap().all_pass());

        let d = compute_d(size).unwrap();
        let d_f = d.difference(spec.info_set()).unwrap().len();
        let eps_count = d_f + ((d.len() - d_f) as f64 * pilots_frac) as usize;
        let plan = select_eps(&spec, eps_count).unwrap();
        prop_assert_eq!(plan.pilot_positions().len(), eps_count);
        prop_assert!(validate_plan(&spec, &plan).unwrap().all_pass());
    }
}
