use littlewood::bounds::{
    constant_scan, verify_basic_multidim, verify_main_prop, verify_mps, verify_multidim,
    verify_multidimz, ConstantMode, Family, MainPropInput, ScanMode, DEFAULT_C_MPS,
};
use littlewood::quadrature::GridBudget;
use littlewood::structures::{build_strong_integer, build_strong_lattice, IntegerSpec, Shape};
use littlewood::{indicator_poly, IntegerSet, LatticeSet};

/// Frozen from exact rational summation and 30-digit quadrature.
const H_101: f64 = 5.197_278_507_738_63;
const LEBESGUE_101: f64 = 2.859_870_343_046_77;
const LEBESGUE_4: f64 = 1.552_017_146_595_51;
const LEBESGUE_32: f64 = 2.394_052_838_220_98;
const BASIC_4_RHS: f64 = 0.808_342_263_851_827;
const MULTIDIM_32_RHS: f64 = 0.750_707_834_247_189_7;

fn budget() -> GridBudget {
    GridBudget::default()
}

#[test]
fn mps_on_interval() {
    let f = indicator_poly(&IntegerSet::interval(1, 101)).unwrap();
    let v = verify_mps(&f, DEFAULT_C_MPS, 0.05, budget()).unwrap();
    assert!((v.rhs - 0.25 * H_101).abs() < 1e-12);
    assert!(v.lhs.contains(LEBESGUE_101));
    assert!(v.pass && v.certified);
    assert_eq!(v.margin, v.lhs.lo - v.rhs);
}

#[test]
fn mps_fails_for_large_constant() {
    let f = indicator_poly(&IntegerSet::interval(1, 101)).unwrap();
    let v = verify_mps(&f, 1.0, 0.05, budget()).unwrap();
    assert!(!v.pass && v.margin < 0.0);
}

#[test]
fn basic_multidim_on_small_box() {
    let line = IntegerSet::interval(1, 4);
    let set = LatticeSet::product(&[line.clone(), line]).unwrap();
    let rep = verify_basic_multidim(&set, 0.25, 0.05, budget()).unwrap();
    assert!(rep.verdict.lhs.contains(LEBESGUE_4 * LEBESGUE_4));
    assert!(rep.rhs_lower <= BASIC_4_RHS && BASIC_4_RHS <= rep.verdict.rhs);
    assert!(rep.verdict.pass);
    assert_eq!(rep.fibres.len(), 4);
}

#[test]
fn basic_multidim_rhs_lower_shrinks_with_coarser_grids() {
    let line = IntegerSet::interval(1, 6);
    let set = LatticeSet::product(&[line.clone(), line]).unwrap();
    let mut prev = f64::INFINITY;
    for rho in [0.01, 0.05, 0.2, 0.5] {
        let rep = verify_basic_multidim(&set, 0.25, rho, budget()).unwrap();
        assert!(rep.rhs_lower <= prev + 1e-12);
        prev = rep.rhs_lower;
    }
}

#[test]
fn multidim_on_box_32() {
    let (set, cert) = build_strong_lattice(&[32, 32], Shape::Box, 0).unwrap();
    let v = verify_multidim(&set, &cert, 0.25, 0.1, budget()).unwrap();
    assert!((v.rhs - MULTIDIM_32_RHS).abs() < 1e-12);
    assert!(v.lhs.contains(LEBESGUE_32 * LEBESGUE_32));
    assert!(v.pass && v.certified);
}

#[test]
fn multidimz_box_16_16() {
    let spec = IntegerSpec::new(vec![1.0], vec![16, 16], Shape::Box, 0);
    let (set, cert) = build_strong_integer(&spec).unwrap();
    let derived = verify_multidimz(&set, &cert, ConstantMode::Derived { c_mps: 0.25 }, 0.1, budget()).unwrap();
    assert!(derived.pass);
    assert!(derived.rhs < 1e-5);
    assert!(!derived.certified, "size hypothesis cannot hold at n = 16");
    let size = derived.hypotheses.iter().find(|h| h.name.contains("C^3")).unwrap();
    assert!(!size.pass);
    let empirical = verify_multidimz(&set, &cert, ConstantMode::Empirical { c: 0.25 }, 0.1, budget()).unwrap();
    assert!(empirical.pass);
    assert!((empirical.constant_used - 0.0625).abs() < 1e-15);
}

#[test]
fn main_prop_on_structured_set() {
    let spec = IntegerSpec::new(vec![1.0], vec![16, 16], Shape::Box, 0);
    let (set, _) = build_strong_integer(&spec).unwrap();
    let f = indicator_poly(&set).unwrap();
    // d1 = 8, d2 = 25 for this spec
    let input = MainPropInput::from_poly(&f, 8, 25, 1.0, 16, 0).unwrap();
    assert_eq!(input.assemble().unwrap(), f);
    let rep = verify_main_prop(&input, 0.25, 0.05, budget()).unwrap();
    assert!(rep.verdict.pass);
    assert_eq!(rep.j_count, 1);
    assert!(rep.rhs_lower <= rep.verdict.rhs);
    // |‖thinned‖ - T1| <= T2 <= t2_bound
    assert!(rep.thinned_norm.lo <= rep.t1[1] + rep.t2_bound);
    assert!(rep.t1[0] <= rep.thinned_norm.hi + rep.t2_bound);
    assert!(rep.t2_estimate <= rep.t2_bound * 1.05);

    let bad = MainPropInput::from_poly(&f, 8, 25, 1.0, 4, 0).unwrap();
    assert!(verify_main_prop(&bad, 0.25, 0.05, budget()).is_err());
}

#[test]
fn scans_are_ordered_and_deterministic() {
    let fam = Family::Intervals { from: 4, to: 40 };
    let a = constant_scan(&fam, ScanMode::Mps, 0.05, budget()).unwrap();
    let b = constant_scan(&fam, ScanMode::Mps, 0.05, budget()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 37);
    assert!(a.rows.windows(2).all(|w| w[0].size < w[1].size));
    assert!(a.min.unwrap() >= 0.25);
    let gaps = constant_scan(&Family::Gaps { params: vec![[1, 10, 3, 2], [1, 50, 7, 7]] }, ScanMode::Mps, 0.05, budget()).unwrap();
    assert_eq!(gaps.rows.len(), 2);
    assert!(gaps.min.unwrap() >= 0.25);
}

#[test]
fn scan_of_singleton_has_no_ratio_for_log_modes() {
    let rep = constant_scan(&Family::LatticeBoxes { sizes: vec![vec![1, 5]] }, ScanMode::Multidim, 0.05, budget()).unwrap();
    assert_eq!(rep.rows[0].ratio, None);
    assert_eq!(rep.min, None);
}
