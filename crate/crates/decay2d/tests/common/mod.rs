//! Independent numerical oracles for the integration tests. Deliberately
//! separate implementations from the crate's own quadrature/stepping paths:
//! Romberg extrapolation instead of adaptive Simpson, and an embedded
//! Runge-Kutta-Fehlberg 4(5) pair instead of the leapfrog marcher.

#![allow(dead_code)]

/// Romberg integration on [a, b]; halves the step until the extrapolated
/// tableau stabilizes to `tol`.
pub fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_LEVELS: usize = 24;
    let mut r = vec![vec![0.0f64; MAX_LEVELS]; MAX_LEVELS];
    let mut h = b - a;
    r[0][0] = 0.5 * h * (f(a) + f(b));
    for i in 1..MAX_LEVELS {
        h *= 0.5;
        let points = 1usize << (i - 1);
        let mut sum = 0.0;
        for k in 0..points {
            sum += f(a + (2 * k + 1) as f64 * h);
        }
        r[i][0] = 0.5 * r[i - 1][0] + h * sum;
        let mut factor = 1.0;
        for j in 1..=i {
            factor *= 4.0;
            r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / (factor - 1.0);
        }
        if i > 3 && (r[i][i] - r[i - 1][i - 1]).abs() < tol {
            return r[i][i];
        }
    }
    r[MAX_LEVELS - 1][MAX_LEVELS - 1]
}

/// Iterated 2D quadrature over [ax, bx] × [ay, by] via nested Romberg.
pub fn quad2d<F: Fn(f64, f64) -> f64>(f: F, ax: f64, bx: f64, ay: f64, by: f64, tol: f64) -> f64 {
    romberg(|y| romberg(|x| f(x, y), ax, bx, tol * 0.1), ay, by, tol)
}

/// Embedded RKF4(5) with adaptive steps for u'' = rhs(u), integrating the
/// first-order system (u, v). Returns (u(t_end), v(t_end)).
pub fn rkf45_second_order<F: Fn(f64) -> f64>(
    rhs: F,
    u0: f64,
    v0: f64,
    t_end: f64,
    tol: f64,
) -> (f64, f64) {
    // classic Fehlberg coefficients
    const A: [[f64; 5]; 5] = [
        [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
        [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
        [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
        [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ];
    const B5: [f64; 6] =
        [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
    const B4: [f64; 6] =
        [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];

    let deriv = |state: (f64, f64)| (state.1, rhs(state.0));
    let mut t = 0.0;
    let mut y = (u0, v0);
    let mut h = 1e-3 * t_end.max(1e-6);
    while t < t_end {
        h = h.min(t_end - t);
        let mut k = [(0.0, 0.0); 6];
        k[0] = deriv(y);
        for stage in 1..6 {
            let mut s = (0.0, 0.0);
            for j in 0..stage {
                s.0 += A[stage - 1][j] * k[j].0;
                s.1 += A[stage - 1][j] * k[j].1;
            }
            k[stage] = deriv((y.0 + h * s.0, y.1 + h * s.1));
        }
        let mut y5 = y;
        let mut y4 = y;
        for j in 0..6 {
            y5.0 += h * B5[j] * k[j].0;
            y5.1 += h * B5[j] * k[j].1;
            y4.0 += h * B4[j] * k[j].0;
            y4.1 += h * B4[j] * k[j].1;
        }
        let err = ((y5.0 - y4.0).abs()).max((y5.1 - y4.1).abs());
        if err <= tol * h.max(1e-12) || h < 1e-12 {
            t += h;
            y = y5;
        }
        let scale = if err > 0.0 { 0.9 * (tol * h / err).powf(0.25) } else { 2.0 };
        h *= scale.clamp(0.2, 4.0);
    }
    y
}

/// Smooth compactly supported bump profile and its radial derivative,
/// duplicated here so oracle integrands never call into the crate.
pub fn bump_profile(r: f64, radius: f64) -> f64 {
    let s = (r / radius) * (r / radius);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

pub fn bump_profile_deriv(r: f64, radius: f64) -> f64 {
    let s = (r / radius) * (r / radius);
    if s >= 1.0 {
        0.0
    } else {
        let g = 1.0 - s;
        bump_profile(r, radius) * (-2.0 * r / (radius * radius)) / (g * g)
    }
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn romberg_matches_closed_forms() {
        assert!((romberg(|x| x.exp(), 0.0, 1.0, 1e-12) - (1f64.exp() - 1.0)).abs() < 1e-10);
        assert!(
            (quad2d(|x, y| x * x + y, 0.0, 1.0, 0.0, 2.0, 1e-10) - (2.0 / 3.0 + 2.0)).abs()
                < 1e-8
        );
    }

    #[test]
    fn rkf45_integrates_harmonic_oscillator() {
        let (u, v) = rkf45_second_order(|u| -u, 1.0, 0.0, 10.0, 1e-12);
        assert!((u - 10f64.cos()).abs() < 1e-8);
        assert!((v + 10f64.sin()).abs() < 1e-8);
    }
}
