use ringlab_core::model::ModelRing;
use ringlab_core::radial::solve_radial_bvp;
use ringlab_core::verify::{analyze, RadialInstance, VerifyOptions};

fn nodal_error(n: u32, a: f64, b: f64, m: usize) -> f64 {
    let s = solve_radial_bvp(n, a, b, m).unwrap();
    s.nodes
        .iter()
        .zip(&s.values)
        .map(|(&r, &u)| (u - s.exact(r)).abs())
        .fold(0.0, f64::max)
}

fn end_slope_error(n: u32, a: f64, b: f64, m: usize) -> f64 {
    let s = solve_radial_bvp(n, a, b, m).unwrap();
    let du = s.slopes();
    (du[0] - s.exact_slope(a))
        .abs()
        .max((du[m] - s.exact_slope(b)).abs())
}

#[test]
fn three_point_scheme_is_exact_in_three_dimensions() {
    // the scheme annihilates 1 and 1/r and is exact on r²
    let m = ModelRing::new(3, 0.3).unwrap();
    assert!(nodal_error(3, m.r1, m.r2, 4096) < 1e-11);
}

#[test]
fn second_order_nodal_convergence() {
    for n in [4, 5, 7] {
        let errs: Vec<f64> = [128, 256, 512].map(|m| nodal_error(n, 0.3, 1.0, m)).into();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.2, "n = {n}: order {order}");
        }
    }
}

#[test]
fn second_order_end_slopes() {
    let m = ModelRing::new(3, 0.3).unwrap();
    let errs: Vec<f64> = [512, 1024, 2048]
        .map(|k| end_slope_error(3, m.r1, m.r2, k))
        .into();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.4, "order {order}");
    }
}

#[test]
fn radial_shell_recovers_its_core_radius() {
    let model = ModelRing::new(3, 0.3).unwrap();
    let s = solve_radial_bvp(3, model.r1, model.r2, 4096).unwrap();
    let inst = RadialInstance::new(s).unwrap();
    let analysis = analyze(&inst, &VerifyOptions::default()).unwrap();
    assert!((analysis.ordering.r1 - 0.3).abs() < 1e-4);
    assert!((analysis.ordering.r2 - 0.3).abs() < 1e-4);
    assert!(!analysis.ordering.serrin_flag);
}

#[test]
fn any_shell_is_a_scaled_model_annulus() {
    // a shell fixes R through r₁/r₂; both components must agree on it
    let s = solve_radial_bvp(4, 0.2, 0.9, 4096).unwrap();
    let inst = RadialInstance::new(s).unwrap();
    let analysis = analyze(&inst, &VerifyOptions::default()).unwrap();
    assert!((analysis.ordering.r1 - analysis.ordering.r2).abs() < 1e-4);
    assert!(analysis.measured.iter().filter(|m| m.applicable).count() > 5);
}
