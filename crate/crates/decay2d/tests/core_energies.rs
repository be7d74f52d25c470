//! Weighted data norms against an independent 2D quadrature oracle of the
//! same (analytic) integrands.

mod common;

use decay2d::data::{sample_initial_data, ComponentSpec, InitialDataSpec};
use decay2d::energy::initial_energies;
use decay2d::grid::{Boundary, GridSpec};

// the bump sits away from the origin so the (1+|x|)² weight is smooth on its
// support; the trapezoid rule is then superalgebraically accurate and the
// only surviving error is the 4th-order difference stencil
const CENTER: (f64, f64) = (2.5, 0.0);
const RADIUS: f64 = 2.0;
const BOX_L: f64 = 5.5;

fn bump_value(x: f64, y: f64) -> f64 {
    let dx = x - CENTER.0;
    let dy = y - CENTER.1;
    common::bump_profile((dx * dx + dy * dy).sqrt(), RADIUS)
}

fn bump_grad_sq(x: f64, y: f64) -> f64 {
    let dx = x - CENTER.0;
    let dy = y - CENTER.1;
    let r = (dx * dx + dy * dy).sqrt();
    let d = common::bump_profile_deriv(r, RADIUS);
    d * d
}

/// Frobenius norm squared of the bump Hessian, from the closed form
/// ∂ᵢ∂ⱼ exp(1-1/(1-s)) with s = |x-c|²/R².
fn bump_hessian_sq(x: f64, y: f64) -> f64 {
    let dx = x - CENTER.0;
    let dy = y - CENTER.1;
    let r2c = RADIUS * RADIUS;
    let s = (dx * dx + dy * dy) / r2c;
    if s >= 1.0 {
        return 0.0;
    }
    let w = (1.0 - 1.0 / (1.0 - s)).exp();
    let g = 1.0 / (1.0 - s);
    // dw/ds = -w g² and d²w/ds² = w(g⁴ - 2g³)
    let w1 = -w * g * g;
    let w2 = w * (g.powi(4) - 2.0 * g.powi(3));
    let sx = 2.0 * dx / r2c;
    let sy = 2.0 * dy / r2c;
    let hxx = w2 * sx * sx + w1 * 2.0 / r2c;
    let hyy = w2 * sy * sy + w1 * 2.0 / r2c;
    let hxy = w2 * sx * sy;
    hxx * hxx + 2.0 * hxy * hxy + hyy * hyy
}

#[test]
fn hessian_closed_form_matches_finite_differences() {
    let eps = 1e-5;
    for &(x, y) in &[(2.0, 0.5), (3.1, -0.7), (1.2, 0.2)] {
        let hxx = (bump_value(x + eps, y) - 2.0 * bump_value(x, y) + bump_value(x - eps, y))
            / (eps * eps);
        let hyy = (bump_value(x, y + eps) - 2.0 * bump_value(x, y) + bump_value(x, y - eps))
            / (eps * eps);
        let hxy = (bump_value(x + eps, y + eps) - bump_value(x + eps, y - eps)
            - bump_value(x - eps, y + eps)
            + bump_value(x - eps, y - eps))
            / (4.0 * eps * eps);
        let fd = hxx * hxx + 2.0 * hxy * hxy + hyy * hyy;
        let cf = bump_hessian_sq(x, y);
        assert!((fd - cf).abs() < 1e-4 * cf.max(1.0), "({x},{y}): {fd} vs {cf}");
    }
}

fn data_spec() -> InitialDataSpec {
    InitialDataSpec {
        phi0: Some(ComponentSpec::bump(1.0, RADIUS, CENTER)),
        phi1: None,
    }
}

#[test]
fn e02_matches_2d_quadrature_oracle() {
    let grid = GridSpec::new(BOX_L, 1025, Boundary::DirichletTruncation).unwrap();
    let state = sample_initial_data(&data_spec(), &grid, 3.0).unwrap();
    let e = initial_energies(&state, &grid).unwrap();

    let p = 3.0;
    let integrand = |x: f64, y: f64| {
        let r = (x * x + y * y).sqrt();
        let w2 = (1.0 + r) * (1.0 + r);
        let v = bump_value(x, y);
        w2 * (bump_grad_sq(x, y) + 2.0 / (p + 1.0) * v.powi(4))
    };
    let (ax, bx) = (CENTER.0 - RADIUS, CENTER.0 + RADIUS);
    let (ay, by) = (CENTER.1 - RADIUS, CENTER.1 + RADIUS);
    let oracle = common::quad2d(integrand, ax, bx, ay, by, 1e-10);

    let rel = ((e.e02 - oracle) / oracle).abs();
    println!("e02 grid = {:.12e}, oracle = {:.12e}, rel = {rel:.3e}", e.e02, oracle);
    assert!(rel < 1e-6, "relative error {rel:.3e} vs 2D quadrature oracle");
}

#[test]
fn e10_converges_at_second_order() {
    // the Hessian term uses plain centered second differences, so the whole
    // norm converges at order 2; expected error ratio 4 under h -> h/2
    let p = 3.0;
    let integrand = |x: f64, y: f64| {
        let r = (x * x + y * y).sqrt();
        let w2 = (1.0 + r) * (1.0 + r);
        let v = bump_value(x, y);
        bump_grad_sq(x, y) + 2.0 / (p + 1.0) * v.powi(4) + w2 * bump_hessian_sq(x, y)
    };
    let (ax, bx) = (CENTER.0 - RADIUS, CENTER.0 + RADIUS);
    let (ay, by) = (CENTER.1 - RADIUS, CENTER.1 + RADIUS);
    let exact = common::quad2d(integrand, ax, bx, ay, by, 1e-11);

    let e10_at = |n: usize| {
        let grid = GridSpec::new(BOX_L, n, Boundary::DirichletTruncation).unwrap();
        let state = sample_initial_data(&data_spec(), &grid, p).unwrap();
        initial_energies(&state, &grid).unwrap().e10
    };
    let errs: Vec<f64> = [129, 257, 513].iter().map(|&n| (e10_at(n) - exact).abs()).collect();
    println!("e10 errors: {errs:?}");
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (3.4..=4.6).contains(&ratio),
            "refinement ratio {ratio} outside [3.4, 4.6] (errors {errs:?})"
        );
    }
}
