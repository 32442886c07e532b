use ringlab_core::field::{
    assemble_system, boundary_gradient, extend_with_ghosts, extract_sigma, solve_poisson,
    ScalarField3, SolveOptions,
};
use ringlab_core::geometry::{
    boundary_quadrature, make_domain, Boundary, RingDomainSpec, SphereGrid, ValidatedDomain,
};
use ringlab_core::model::ModelRing;
use ringlab_core::radial::radial_closed_form;

fn annulus(core: f64) -> (ModelRing, ValidatedDomain) {
    let m = ModelRing::new(3, core).unwrap();
    (m, make_domain(RingDomainSpec::annulus(m.r1, m.r2)).unwrap())
}

fn solve(domain: &ValidatedDomain, h: f64) -> ScalarField3 {
    let system = assemble_system(domain, h).unwrap();
    let (field, report) = solve_poisson(&system, &SolveOptions::default()).unwrap();
    assert!(report.residual < 1e-10);
    field
}

fn max_nodal_error(model: &ModelRing, field: &ScalarField3) -> f64 {
    let (a, b) = radial_closed_form(3, model.r1, model.r2).unwrap();
    let g = field.grid;
    let mut worst: f64 = 0.0;
    for k in 0..g.dims[2] {
        for j in 0..g.dims[1] {
            for i in 0..g.dims[0] {
                let idx = g.index(i, j, k);
                if !field.mask[idx].in_domain() {
                    continue;
                }
                let x = g.position([i, j, k]);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let exact = -0.5 * r * r + a + b / r;
                worst = worst.max((field.values[idx] - exact).abs());
            }
        }
    }
    worst
}

#[test]
fn annulus_converges_at_second_order() {
    let (model, domain) = annulus(0.5);
    let coarse = max_nodal_error(&model, &solve(&domain, 1.0 / 24.0));
    let fine = max_nodal_error(&model, &solve(&domain, 1.0 / 48.0));
    let order = (coarse / fine).log2();
    assert!(fine < 1e-3, "error {fine}");
    assert!(order > 1.5, "order {order}");
}

#[test]
fn solves_are_bitwise_repeatable() {
    let (_, domain) = annulus(0.5);
    let a = solve(&domain, 1.0 / 32.0);
    let b = solve(&domain, 1.0 / 32.0);
    assert_eq!(a.values.len(), b.values.len());
    assert!(a
        .values
        .iter()
        .zip(&b.values)
        .all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn maximum_sphere_and_boundary_slopes() {
    let (model, domain) = annulus(0.5);
    let field = solve(&domain, 1.0 / 48.0);
    let ext = extend_with_ghosts(&field, &domain);
    let grid = SphereGrid::new(16, 32);
    let sigma = extract_sigma(&ext, &domain, &grid, 4).unwrap();
    for r in &sigma.ray_radius {
        assert!((r - 0.5).abs() < 5e-3, "ray radius {r}");
    }
    assert!((sigma.u_max - model.u_max).abs() < 1e-3);

    for (which, r) in [(Boundary::Inner, model.r1), (Boundary::Outer, model.r2)] {
        let exact = model.u_eval(r).unwrap().1.abs();
        let samples = boundary_quadrature(domain.graph(which), &grid).unwrap();
        let g = boundary_gradient(&ext, &domain, which, &samples).unwrap();
        for s in &g.samples {
            let v = s.raw.expect("stencil inside the domain");
            assert!(
                (v - exact).abs() < 0.02 * exact,
                "{which:?}: {v} vs {exact}"
            );
        }
    }
}
