//! Radial profiles: ring extrema of |φ| and the angular functionals
//!
//!   A₁(t,r) = (1/2π)∫ φ̃ dθ,   A₂(t,r) = ∫|∂_θφ̃|² dθ,   A₃(t,r) = ∫|φ̃|^{p+1} dθ,
//!
//! with φ̃(θ) sampled on each ring by bicubic interpolation and ∂_θ taken
//! spectrally from the periodic samples. Ring bins have width h centered at
//! r_m = m·h and cover every grid node (out to the box corners); the circle
//! sampling is only attempted while the interpolation stencil stays inside
//! the data region, otherwise the angular entries are zero.
//!
//! Per ring the chain sup-inf ≤ ∫|∂_θ(|φ̃|^{(p+3)/2})| ≤ ((p+3)/2)√(A₂A₃)
//! gives the inequality φ*^{(p+3)/2} ≤ φ₋^{(p+3)/2} + ((p+3)/2)√(A₂A₃),
//! which [`ring_inequality_stats`] audits on the circle samples.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::diagnostics::pow_abs;
use crate::error::Result;
use crate::field::WaveState;
use crate::grid::GridSpec;
use crate::params::PParam;
use crate::util::map_rows;

#[derive(Debug, Clone, Copy)]
pub struct RingEntry {
    pub r: f64,
    /// max of |φ| over the grid nodes binned to this ring
    pub phi_star: f64,
    /// min of |φ| over the binned nodes
    pub phi_minus: f64,
    /// max of |φ̃| over the interpolated circle samples
    pub circle_star: f64,
    pub circle_minus: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub n_nodes: usize,
    /// circle data valid (ring inside the interpolable region)
    pub sampled: bool,
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub t: f64,
    pub p: f64,
    pub rings: Vec<RingEntry>,
    pub sup_abs: f64,
    pub f: f64,
    pub f_star: f64,
}

/// Bin nodes into rings of width h and take per-ring extrema of |φ|; empty
/// bins (possible in the box corners) are merged away. Also returns the grid
/// suprema (sup|φ|, f, f_star).
pub fn sup_profile(state: &WaveState, grid: &GridSpec) -> Result<RadialProfile> {
    state.check_finite()?;
    let n = grid.n;
    let h = grid.h;
    let m_max = (grid.l * std::f64::consts::SQRT_2 / h).ceil() as usize + 1;

    struct Bin {
        max: f64,
        min: f64,
        count: usize,
    }
    let mut bins: Vec<Bin> =
        (0..=m_max).map(|_| Bin { max: 0.0, min: f64::INFINITY, count: 0 }).collect();
    for j in 0..n {
        let y = grid.coord(j);
        for i in 0..n {
            let x = grid.coord(i);
            let r = (x * x + y * y).sqrt();
            let m = (r / h).round() as usize;
            let a = state.phi.at(i, j).abs();
            let b = &mut bins[m.min(m_max)];
            b.max = b.max.max(a);
            b.min = b.min.min(a);
            b.count += 1;
        }
    }

    let (sup_abs, f, f_star) = crate::diagnostics::sup_norms(state, grid);
    let rings: Vec<RingEntry> = bins
        .iter()
        .enumerate()
        .filter(|(_, b)| b.count > 0)
        .map(|(m, b)| RingEntry {
            r: m as f64 * h,
            phi_star: b.max,
            phi_minus: b.min,
            circle_star: 0.0,
            circle_minus: 0.0,
            a1: 0.0,
            a2: 0.0,
            a3: 0.0,
            n_nodes: b.count,
            sampled: false,
        })
        .collect();

    Ok(RadialProfile { t: state.t, p: state.p, rings, sup_abs, f, f_star })
}

fn next_pow2(v: usize) -> usize {
    let mut p = 1;
    while p < v {
        p <<= 1;
    }
    p
}

/// Fill the angular entries of a profile: per ring, φ̃ is sampled at
/// N_θ ≥ max(16, ⌈2πr/h⌉) equispaced angles (rounded up to a power of two)
/// by bicubic interpolation, ∂_θφ̃ comes from the Fourier coefficients, and
/// A₃ uses the θ-trapezoid rule, exact for trigonometric polynomials.
pub fn angular_functionals(
    state: &WaveState,
    grid: &GridSpec,
    pp: &PParam,
    profile: &mut RadialProfile,
) -> Result<()> {
    let h = grid.h;
    let sample_limit = grid.l - 2.0 * h;
    let p = pp.p;

    // plan each distinct FFT length once
    let mut planner = FftPlanner::<f64>::new();
    let mut plans: HashMap<usize, Arc<dyn Fft<f64>>> = HashMap::new();
    for ring in profile.rings.iter() {
        if ring.r <= sample_limit {
            let n_theta = next_pow2((2.0 * std::f64::consts::PI * ring.r / h).ceil().max(16.0) as usize);
            plans.entry(n_theta).or_insert_with(|| planner.plan_fft_forward(n_theta));
        }
    }

    let entries: Vec<Option<(f64, f64, f64, f64, f64)>> = map_rows(profile.rings.len(), |k| {
        let ring = &profile.rings[k];
        if ring.r > sample_limit {
            return None;
        }
        let n_theta =
            next_pow2((2.0 * std::f64::consts::PI * ring.r / h).ceil().max(16.0) as usize);
        let plan = &plans[&n_theta];
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n_theta);
        let mut cmax = 0.0f64;
        let mut cmin = f64::INFINITY;
        let mut a3 = 0.0;
        for jj in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * jj as f64 / n_theta as f64;
            let v = state.phi.bicubic(ring.r * theta.cos(), ring.r * theta.sin(), grid);
            cmax = cmax.max(v.abs());
            cmin = cmin.min(v.abs());
            a3 += pow_abs(v, p + 1.0);
            buf.push(Complex::new(v, 0.0));
        }
        a3 *= 2.0 * std::f64::consts::PI / n_theta as f64;
        plan.process(&mut buf);
        let inv_n = 1.0 / n_theta as f64;
        let a1 = buf[0].re * inv_n;
        // Parseval: ∫|∂_θ φ̃|²dθ = 2π Σ k²|c_k|², Nyquist derivative dropped
        let mut a2 = 0.0;
        for k in 1..n_theta / 2 {
            let ck = buf[k] * inv_n;
            let cnk = buf[n_theta - k] * inv_n;
            a2 += (k * k) as f64 * (ck.norm_sqr() + cnk.norm_sqr());
        }
        a2 *= 2.0 * std::f64::consts::PI;
        Some((a1, a2, a3, cmax, cmin))
    });

    for (ring, e) in profile.rings.iter_mut().zip(entries) {
        if let Some((a1, a2, a3, cmax, cmin)) = e {
            ring.a1 = a1;
            ring.a2 = a2;
            ring.a3 = a3;
            ring.circle_star = cmax;
            ring.circle_minus = cmin;
            ring.sampled = true;
        }
    }
    Ok(())
}

/// 1D trapezoid over the ring radii of (1+t+r)^{(p-1)/2} φ*^{(p+3)/2}.
pub fn phi_star_functional(profile: &RadialProfile, t: f64, pp: &PParam) -> f64 {
    let q = pp.q;
    let beta = 0.5 * (pp.p + 3.0);
    let vals: Vec<(f64, f64)> = profile
        .rings
        .iter()
        .map(|ring| (ring.r, pow_abs(1.0 + t + ring.r, q) * pow_abs(ring.phi_star, beta)))
        .collect();
    let mut acc = 0.0;
    for w in vals.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct RingInequalityStats {
    pub checked: usize,
    pub passed: usize,
    pub max_rel_violation: f64,
}

/// Audit φ*^{(p+3)/2} ≤ φ₋^{(p+3)/2} + ((p+3)/2)√(A₂A₃) on the circle
/// samples of every ring carrying data.
pub fn ring_inequality_stats(profile: &RadialProfile, pp: &PParam, rel_tol: f64) -> RingInequalityStats {
    let beta = 0.5 * (pp.p + 3.0);
    let mut checked = 0;
    let mut passed = 0;
    let mut max_v = 0.0f64;
    for ring in &profile.rings {
        if !ring.sampled || ring.circle_star <= 1e-12 {
            continue;
        }
        checked += 1;
        let lhs = pow_abs(ring.circle_star, beta);
        let rhs = pow_abs(ring.circle_minus, beta) + beta * (ring.a2 * ring.a3).max(0.0).sqrt();
        let viol = ((lhs - rhs) / lhs.max(1e-300)).max(0.0);
        max_v = max_v.max(viol);
        if viol <= rel_tol {
            passed += 1;
        }
    }
    RingInequalityStats { checked, passed, max_rel_violation: max_v }
}
