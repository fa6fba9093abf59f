//! Public-API walkthroughs across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use padic_tiles::qp::{
    constancy_parameter, density, is_function_tiling, measure_ball_counts, measure_zero_scan, spectrum_for_homogeneous,
    tiling_complement_orders_check, CompactOpenSet,
};
use padic_tiles::tree::{build_tree, is_p_homogeneous, zero_exponents, BranchLevelSet, ResidueSet};
use padic_tiles::{
    classify_tile_pp, find_spectra, find_tiling_complements, is_spectral_pair, Ball, GroupSubset, ProductGroup,
};

#[test]
fn ternary_tree_with_alternating_branches() {
    let c = BranchLevelSet::new(5, [0, 2, 4]).unwrap().canonical_set(3).unwrap();
    assert_eq!(c.len(), 27);
    let t = build_tree(&c).unwrap();
    assert_eq!(t.level_sizes(), vec![1, 3, 3, 9, 9, 27]);
    let levels = is_p_homogeneous(&c).branch_levels().cloned().unwrap();
    assert_eq!(levels.levels().iter().copied().collect::<Vec<_>>(), vec![0, 2, 4]);
    // Zero exponents j sit one above the branch level.
    assert_eq!(zero_exponents(&c).unwrap(), [1, 3, 5].into());
}

#[test]
fn finite_tile_spectrum_round_trip() {
    let g = ProductGroup::new(2, 2, 2).unwrap();
    let a = GroupSubset::new(g, [(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
    let t = find_tiling_complements(&a).unwrap();
    assert!(t.exhaustive && !t.sets.is_empty());
    let s = find_spectra(&a).unwrap();
    assert!(!s.sets.is_empty());
    for l in &s.sets {
        assert!(is_spectral_pair(&a, l).unwrap());
    }
    let cls = classify_tile_pp(&a).unwrap();
    assert!(cls.tile.reverify().unwrap());
}

#[test]
fn homogeneous_compact_open_pipeline() {
    // Ω = {0, 2} + 8Z_2 with branch position 1.
    let omega = CompactOpenSet::from_ints(2, 3, &[0, 2]).unwrap();
    let window = Ball::centered_at_zero(2, 2).unwrap();
    let t = omega.homogeneous_complement(&window).unwrap();
    let one = BigRational::from_integer(BigInt::from(1));
    assert!(is_function_tiling(&omega.indicator(), &t, &one, &window).unwrap());

    let d = density(&t).unwrap();
    let f = omega.indicator();
    assert_eq!(&d.value * f.integral(), one);
    let c = constancy_parameter(&f).unwrap();
    for n in c.n_f..=2 {
        let counts = measure_ball_counts(&t, n).unwrap();
        let expect = &d.value * padic_tiles::qp::TestFunction::scaled_indicator(&Ball::centered_at_zero(2, n).unwrap(), one.clone()).integral();
        assert_eq!(BigRational::from_integer(BigInt::from(counts.value().unwrap())), expect);
    }
    let z = measure_zero_scan(&t, 4).unwrap();
    assert!(z.vanishing.iter().all(|&r| r <= z.n_nu.unwrap() + 1));

    assert!(tiling_complement_orders_check(&omega, &t).unwrap().pass);
    assert!(spectrum_for_homogeneous(&omega, 6).unwrap().pass);
}

#[test]
fn residue_sets_from_json() {
    let c: ResidueSet = serde_json::from_str(r#"{"p":2,"n":2,"members":[0,3]}"#).unwrap();
    assert_eq!(c.members(), &[0, 3]);
    assert!(serde_json::from_str::<ResidueSet>(r#"{"p":2,"n":2,"members":[0,4]}"#).is_err());
}
