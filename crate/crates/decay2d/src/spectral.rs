//! Free wave evolution and homogeneous Sobolev norms on the periodic box,
//! used to extract scattering candidates by backward evolution.
//!
//! States supported away from the box boundary wrap periodically without
//! error (finite speed of propagation), so the free group
//!
//!   φ̂(t+Δt) = cos(|k|Δt) φ̂ + Δt sinc(|k|Δt) π̂,
//!   π̂(t+Δt) = -|k| sin(|k|Δt) φ̂ + cos(|k|Δt) π̂,
//!
//! with box wavenumbers k = (π/L)·m is exact mode-by-mode, conserves the
//! Ḣ¹×L² energy norm over the k ≠ 0 modes, and inverts by Δt → -Δt. The
//! k = 0 mode evolves as φ̂ += Δt·π̂ and is excluded from the homogeneous
//! norms (Ḣ^{s-1} is singular there; a mean-carrying π contributes a
//! documented caveat, not a crash).

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{Field, WaveState};
use crate::grid::{Boundary, GridSpec};

#[derive(Debug, Clone)]
pub struct SpectralState {
    /// modes per axis (the grid's n-1 unique nodes)
    pub n: usize,
    /// box half-width
    pub l: f64,
    pub t: f64,
    pub p: f64,
    /// row-major N×N coefficients, c_0 the mean
    pub phi_hat: Vec<Complex<f64>>,
    pub pi_hat: Vec<Complex<f64>>,
}

fn fft2(data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    // rows
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    // columns via transpose-process-transpose
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            col[j] = data[j * n + i];
        }
        fft.process(&mut col);
        for j in 0..n {
            data[j * n + i] = col[j];
        }
    }
}

/// signed mode index: 0, 1, …, N/2-1, -N/2, …, -1
#[inline]
fn mode_of(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Which wave dispersion the per-mode rotation uses.
///
/// `Continuum` is the exact free group ω = |k|. `DiscreteMatched` rotates at
/// the leapfrog/5-point frequencies instead: ω_h from
/// sin(ω_h·dt/2) = (dt/2)√λ_k with λ_k the stencil symbol, and the centered
/// ∂ₜφ of a discrete mode carries amplitude ω̃ = sin(ω_h·dt)/dt rather than
/// ω_h. Backward evolution under `DiscreteMatched` inverts the solver's own
/// linear flow exactly, so scattering-candidate differences measure the
/// nonlinear interaction instead of accumulated grid dispersion.
#[derive(Debug, Clone, Copy)]
pub enum Dispersion {
    Continuum,
    DiscreteMatched { dt: f64, h: f64 },
}

impl Dispersion {
    /// (rotation frequency, ∂ₜφ scaling frequency) for wavenumbers (kx, ky)
    fn frequencies(&self, kx: f64, ky: f64) -> (f64, f64) {
        match *self {
            Dispersion::Continuum => {
                let w = (kx * kx + ky * ky).sqrt();
                (w, w)
            }
            Dispersion::DiscreteMatched { dt, h } => {
                if kx == 0.0 && ky == 0.0 {
                    return (0.0, 0.0);
                }
                let s1 = (0.5 * kx * h).sin();
                let s2 = (0.5 * ky * h).sin();
                let sqrt_lambda = 2.0 / h * (s1 * s1 + s2 * s2).sqrt();
                let omega_h = 2.0 / dt * (0.5 * dt * sqrt_lambda).asin();
                let omega_pi = (omega_h * dt).sin() / dt;
                (omega_h, omega_pi)
            }
        }
    }
}

impl SpectralState {
    /// Transform the unique (n-1)×(n-1) samples of a periodic-compatible
    /// state. Dirichlet-truncation states qualify while their support has
    /// not reached the boundary band (enforced by [`scattering_candidate`]).
    pub fn from_state(state: &WaveState, grid: &GridSpec) -> Result<Self> {
        state.check_finite()?;
        let n = grid.n - 1;
        let norm = 1.0 / (n * n) as f64;
        let mut phi_hat = vec![Complex::new(0.0, 0.0); n * n];
        let mut pi_hat = vec![Complex::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                phi_hat[j * n + i] = Complex::new(state.phi.at(i, j), 0.0);
                pi_hat[j * n + i] = Complex::new(state.pi.at(i, j), 0.0);
            }
        }
        fft2(&mut phi_hat, n, false);
        fft2(&mut pi_hat, n, false);
        for c in phi_hat.iter_mut().chain(pi_hat.iter_mut()) {
            *c *= norm;
        }
        Ok(SpectralState { n, l: grid.l, t: state.t, p: state.p, phi_hat, pi_hat })
    }

    /// Back to physical samples on an n×n grid (duplicated end row/column).
    pub fn to_state(&self, grid: &GridSpec) -> Result<WaveState> {
        if grid.n != self.n + 1 {
            return Err(Error::Param("grid size does not match spectral state".into()));
        }
        let n = self.n;
        let mut phi_buf = self.phi_hat.clone();
        let mut pi_buf = self.pi_hat.clone();
        fft2(&mut phi_buf, n, true);
        fft2(&mut pi_buf, n, true);
        let mut phi = Field::zeros(grid.n);
        let mut pi = Field::zeros(grid.n);
        for j in 0..grid.n {
            for i in 0..grid.n {
                let (iu, ju) = (i % n, j % n);
                phi.set(i, j, phi_buf[ju * n + iu].re);
                pi.set(i, j, pi_buf[ju * n + iu].re);
            }
        }
        Ok(WaveState { t: self.t, phi, pi, p: self.p })
    }

    /// Parseval L² mass of φ: (2L)² Σ|φ̂_k|².
    pub fn l2_mass_phi(&self) -> f64 {
        let area = (2.0 * self.l) * (2.0 * self.l);
        area * self.phi_hat.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Exact free evolution by Δt (may be negative).
    pub fn free_evolve(&mut self, dt: f64) {
        self.evolve_with(dt, Dispersion::Continuum);
    }

    /// Per-mode rotation under the chosen dispersion model.
    pub fn evolve_with(&mut self, dt: f64, dispersion: Dispersion) {
        let n = self.n;
        let k0 = std::f64::consts::PI / self.l;
        for j in 0..n {
            let ky = k0 * mode_of(j, n) as f64;
            for i in 0..n {
                let kx = k0 * mode_of(i, n) as f64;
                let (omega, omega_pi) = dispersion.frequencies(kx, ky);
                let idx = j * n + i;
                let (c, s_over_w, ws) = if omega == 0.0 {
                    (1.0, dt, 0.0)
                } else {
                    let th = omega * dt;
                    (th.cos(), th.sin() / omega_pi, omega_pi * th.sin())
                };
                let f = self.phi_hat[idx];
                let g = self.pi_hat[idx];
                self.phi_hat[idx] = f * c + g * s_over_w;
                self.pi_hat[idx] = -f * ws + g * c;
            }
        }
        self.t += dt;
    }

    /// Homogeneous pair norm (Σ_{k≠0} |k|^{2s}|φ̂|² + |k|^{2s-2}|π̂|²)^{1/2}
    /// with Parseval normalization.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.n;
        let k0 = std::f64::consts::PI / self.l;
        let area = (2.0 * self.l) * (2.0 * self.l);
        let mut acc = 0.0;
        for j in 0..n {
            let ky = k0 * mode_of(j, n) as f64;
            for i in 0..n {
                if i == 0 && j == 0 {
                    continue;
                }
                let kx = k0 * mode_of(i, n) as f64;
                let k2 = kx * kx + ky * ky;
                let idx = j * n + i;
                acc += k2.powf(s) * self.phi_hat[idx].norm_sqr()
                    + k2.powf(s - 1.0) * self.pi_hat[idx].norm_sqr();
            }
        }
        (area * acc).sqrt()
    }

    /// Ḣ¹×L² energy norm over the k ≠ 0 modes.
    pub fn energy_norm(&self) -> f64 {
        self.sobolev_norm(1.0)
    }

    /// Pair-difference norm in Ḣ^s × Ḣ^{s-1}.
    pub fn diff_norm(&self, other: &SpectralState, s: f64) -> Result<f64> {
        if self.n != other.n || self.l != other.l {
            return Err(Error::Param("spectral states live on different boxes".into()));
        }
        let mut d = self.clone();
        for (a, b) in d.phi_hat.iter_mut().zip(other.phi_hat.iter()) {
            *a -= b;
        }
        for (a, b) in d.pi_hat.iter_mut().zip(other.pi_hat.iter()) {
            *a -= b;
        }
        Ok(d.sobolev_norm(s))
    }
}

/// Width of the boundary band (in units of h) that must carry no data for
/// the periodic wrap of a truncation-run snapshot to be exact.
const BOUNDARY_BAND: usize = 4;

/// Relative threshold below which boundary-band values count as numerical
/// dust rather than arrived signal: the explicit stencil spreads support one
/// node per step (discrete speed h/dt > 1), but beyond the physical light
/// cone the leaked amplitudes decay super-exponentially with depth.
const BOUNDARY_TOL: f64 = 1e-12;

/// L(-T) applied to a snapshot: the scattering-candidate data at t = 0.
/// Refuses snapshots whose physical support has reached the boundary band.
pub fn scattering_candidate(snapshot: &WaveState, grid: &GridSpec) -> Result<SpectralState> {
    scattering_candidate_with(snapshot, grid, Dispersion::Continuum)
}

/// Candidate extraction under an explicit dispersion model; the
/// discrete-matched variant strips the solver's linear flow exactly.
pub fn scattering_candidate_with(
    snapshot: &WaveState,
    grid: &GridSpec,
    dispersion: Dispersion,
) -> Result<SpectralState> {
    if grid.boundary == Boundary::DirichletTruncation {
        let n = grid.n;
        let band = BOUNDARY_BAND.min(n / 4);
        let mut max_abs = 0.0f64;
        let mut max_interior = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let v = snapshot.phi.at(i, j).abs().max(snapshot.pi.at(i, j).abs());
                if i >= band && i < n - band && j >= band && j < n - band {
                    max_interior = max_interior.max(v);
                } else {
                    max_abs = max_abs.max(v);
                }
            }
        }
        if max_abs > BOUNDARY_TOL * max_interior.max(1e-300) {
            return Err(Error::ConeGuard {
                msg: format!(
                    "snapshot at t = {} touches the boundary band (max there = {max_abs:e})",
                    snapshot.t
                ),
                max_t_final: snapshot.t,
            });
        }
    }
    let mut spec = SpectralState::from_state(snapshot, grid)?;
    spec.evolve_with(-snapshot.t, dispersion);
    Ok(spec)
}
