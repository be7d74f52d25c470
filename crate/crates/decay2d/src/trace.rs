//! Accumulated integrands on the null hyperplane {t = x₁}.
//!
//! Per step the fields are evaluated on the moving line x₁ = τ at the step
//! midpoint τ = t + dt/2 (cubic interpolation along x₁ of φ, ∂ₜφ and the
//! solver-order centered ∂₁φ/∂₂φ values; linear interpolation between the
//! two time levels), and a rectangle rule in (t, x₂) advances the running
//! integrals
//!
//!   I₁ = ∬ x₂²|L₁φ|²,
//!   I₂ = ∬ |L₁φ|² + |∂₂φ|² + (2/(p+1))|φ|^{p+1},
//!   I₃ = ∬ |x₂L₁φ + ∂₂φ|² + (2/(p+1))|φ|^{p+1},
//!
//! with L₁ = ∂ₜ + ∂₁. I₃ is the flux whose double bounds the growth of the
//! null-weighted energy E[φ]_q; all three are nondecreasing in time.

use crate::error::{Error, Result};
use crate::field::WaveState;
use crate::grid::GridSpec;
use crate::params::PParam;
use crate::util::{cubic_weights, map_rows, pairwise_sum};

/// One interpolated row of the trace (fixed x₂ line at one step midpoint).
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: f64,
    pub x2: f64,
    pub phi: f64,
    pub l1_phi: f64,
    pub d2_phi: f64,
}

#[derive(Debug, Clone)]
pub struct NullTrace {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// set once the interpolation stencil would leave the grid (t ≥ L - 2h)
    pub saturated: bool,
    /// retain the interpolated rows (off by default; the integrals always run)
    pub keep_rows: bool,
    pub rows: Vec<TraceRow>,
    p: f64,
}

struct RowOut {
    i1: f64,
    i2: f64,
    i3: f64,
    row: TraceRow,
}

impl NullTrace {
    pub fn new(_grid: &GridSpec, pp: PParam) -> Self {
        NullTrace {
            i1: 0.0,
            i2: 0.0,
            i3: 0.0,
            saturated: false,
            keep_rows: false,
            rows: Vec::new(),
            p: pp.p,
        }
    }

    /// Advance the trace over [state_a.t, state_b.t].
    pub fn record(
        &mut self,
        state_a: &WaveState,
        state_b: &WaveState,
        grid: &GridSpec,
    ) -> Result<()> {
        if self.saturated {
            return Ok(());
        }
        let dt = state_b.t - state_a.t;
        if !(dt > 0.0) {
            return Err(Error::Param("null trace needs states at t and t + dt".into()));
        }
        if state_a.t < 0.0 {
            return Err(Error::Param("null trace starts at t = 0".into()));
        }
        let tau = 0.5 * (state_a.t + state_b.t);
        if tau >= grid.l - 2.0 * grid.h {
            self.saturated = true;
            return Ok(());
        }

        let n = grid.n;
        let p = self.p;
        let pot_coeff = 2.0 / (p + 1.0);
        // cubic stencil along x1 around the moving point x1 = tau
        let fx = grid.frac_index(tau);
        let i0 = (fx.floor() as isize).clamp(1, n as isize - 3) as usize;
        let w = cubic_weights(fx - i0 as f64);

        let outs: Vec<RowOut> = map_rows(n, |j| {
            let x2 = grid.coord(j);
            let mut phi = 0.0;
            let mut pi = 0.0;
            let mut d1 = 0.0;
            let mut d2 = 0.0;
            for (di, &wi) in w.iter().enumerate() {
                let i = i0 + di - 1;
                // time-linear midpoint = average of the two levels
                phi += wi * 0.5 * (state_a.phi.at(i, j) + state_b.phi.at(i, j));
                pi += wi * 0.5 * (state_a.pi.at(i, j) + state_b.pi.at(i, j));
                d1 += wi * 0.5 * (state_a.phi.dx1_o2(i, j, grid) + state_b.phi.dx1_o2(i, j, grid));
                d2 += wi * 0.5 * (state_a.phi.dx2_o2(i, j, grid) + state_b.phi.dx2_o2(i, j, grid));
            }
            let l1 = pi + d1;
            let pot = pot_coeff * crate::energy::phi_pow_p1(phi, p);
            let wj = grid.weight(j);
            let flux = x2 * l1 + d2;
            RowOut {
                i1: wj * x2 * x2 * l1 * l1,
                i2: wj * (l1 * l1 + d2 * d2 + pot),
                i3: wj * (flux * flux + pot),
                row: TraceRow { t: tau, x2, phi, l1_phi: l1, d2_phi: d2 },
            }
        });

        let di1 = pairwise_sum(&outs.iter().map(|o| o.i1).collect::<Vec<_>>());
        let di2 = pairwise_sum(&outs.iter().map(|o| o.i2).collect::<Vec<_>>());
        let di3 = pairwise_sum(&outs.iter().map(|o| o.i3).collect::<Vec<_>>());
        self.i1 += dt * di1;
        self.i2 += dt * di2;
        self.i3 += dt * di3;
        if !(self.i1.is_finite() && self.i2.is_finite() && self.i3.is_finite()) {
            return Err(Error::NonFinite("null trace integrals".into()));
        }
        if self.keep_rows {
            self.rows.extend(outs.into_iter().map(|o| o.row));
        }
        Ok(())
    }
}
