//! Analytic initial-data families and their exact sampling onto the grid.
//!
//! Each component of the data pair (φ₀, φ₁) is one of three closed-form
//! families. The families expose analytic gradients (needed by the mesh-free
//! propagator, which differentiates the φ₀ disc integral in time) and a
//! support radius used by the cone guard.

use crate::error::{Error, Result};
use crate::field::{Field, WaveState};
use crate::grid::{Boundary, GridSpec};

/// Tail threshold defining the effective support radius of the Gaussian
/// family: the profile is below 1e-14·a outside R_eff.
const GAUSSIAN_TAIL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// a·exp(1 - 1/(1 - |x-c|²/R²)) inside |x-c| < R, zero outside.
    /// Compact support of radius exactly R.
    SmoothBump,
    /// a·exp(-|x-c|²/R²). Not compactly supported; the effective radius
    /// R_eff = R·sqrt(ln(a/tail)) is tracked for the cone guard.
    Gaussian,
    /// a·cos(k·x) with box wavenumber k = (π/L)·mode. Periodic grids only.
    FourierMode,
}

/// One analytic component of the data pair.
#[derive(Debug, Clone, Copy)]
pub struct ComponentSpec {
    pub family: Family,
    pub amplitude: f64,
    pub radius: f64,
    pub center: (f64, f64),
    pub mode: (i32, i32),
}

impl ComponentSpec {
    pub fn bump(amplitude: f64, radius: f64, center: (f64, f64)) -> Self {
        ComponentSpec { family: Family::SmoothBump, amplitude, radius, center, mode: (0, 0) }
    }

    pub fn gaussian(amplitude: f64, radius: f64, center: (f64, f64)) -> Self {
        ComponentSpec { family: Family::Gaussian, amplitude, radius, center, mode: (0, 0) }
    }

    pub fn fourier(amplitude: f64, mode: (i32, i32)) -> Self {
        ComponentSpec { family: Family::FourierMode, amplitude, radius: 0.0, center: (0.0, 0.0), mode }
    }

    fn validate(&self) -> Result<()> {
        match self.family {
            Family::SmoothBump | Family::Gaussian => {
                if !(self.radius > 0.0) {
                    return Err(Error::Param(format!(
                        "data family needs a positive radius, got {}",
                        self.radius
                    )));
                }
            }
            Family::FourierMode => {}
        }
        if !self.amplitude.is_finite() {
            return Err(Error::Param("non-finite amplitude".into()));
        }
        Ok(())
    }

    /// Evaluate the component at (x, y); `box_l` fixes the Fourier wavenumber.
    pub fn eval(&self, x: f64, y: f64, box_l: f64) -> f64 {
        let a = self.amplitude;
        if a == 0.0 {
            return 0.0;
        }
        match self.family {
            Family::SmoothBump => {
                let dx = x - self.center.0;
                let dy = y - self.center.1;
                let s = (dx * dx + dy * dy) / (self.radius * self.radius);
                if s >= 1.0 {
                    0.0
                } else {
                    a * (1.0 - 1.0 / (1.0 - s)).exp()
                }
            }
            Family::Gaussian => {
                let dx = x - self.center.0;
                let dy = y - self.center.1;
                a * (-(dx * dx + dy * dy) / (self.radius * self.radius)).exp()
            }
            Family::FourierMode => {
                let k1 = std::f64::consts::PI * self.mode.0 as f64 / box_l;
                let k2 = std::f64::consts::PI * self.mode.1 as f64 / box_l;
                a * (k1 * x + k2 * y).cos()
            }
        }
    }

    /// Analytic gradient of the component.
    pub fn grad(&self, x: f64, y: f64, box_l: f64) -> (f64, f64) {
        let a = self.amplitude;
        if a == 0.0 {
            return (0.0, 0.0);
        }
        match self.family {
            Family::SmoothBump => {
                let dx = x - self.center.0;
                let dy = y - self.center.1;
                let r2 = self.radius * self.radius;
                let s = (dx * dx + dy * dy) / r2;
                if s >= 1.0 {
                    (0.0, 0.0)
                } else {
                    let v = a * (1.0 - 1.0 / (1.0 - s)).exp();
                    let g = 1.0 - s;
                    let factor = -v / (g * g) * 2.0 / r2;
                    (factor * dx, factor * dy)
                }
            }
            Family::Gaussian => {
                let dx = x - self.center.0;
                let dy = y - self.center.1;
                let r2 = self.radius * self.radius;
                let v = a * (-(dx * dx + dy * dy) / r2).exp();
                (-2.0 * dx / r2 * v, -2.0 * dy / r2 * v)
            }
            Family::FourierMode => {
                let k1 = std::f64::consts::PI * self.mode.0 as f64 / box_l;
                let k2 = std::f64::consts::PI * self.mode.1 as f64 / box_l;
                let s = -a * (k1 * x + k2 * y).sin();
                (k1 * s, k2 * s)
            }
        }
    }

    /// Radius beyond which the component vanishes (exactly for the bump, to
    /// below 1e-14·a for the Gaussian; unbounded for Fourier modes).
    pub fn support_radius(&self) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let center_off = (self.center.0 * self.center.0 + self.center.1 * self.center.1).sqrt();
        match self.family {
            Family::SmoothBump => center_off + self.radius,
            Family::Gaussian => center_off + self.radius * (1.0 / GAUSSIAN_TAIL).ln().sqrt(),
            Family::FourierMode => f64::INFINITY,
        }
    }
}

/// The data pair; `None` means identically zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct InitialDataSpec {
    pub phi0: Option<ComponentSpec>,
    pub phi1: Option<ComponentSpec>,
}

impl InitialDataSpec {
    pub fn support_radius(&self) -> f64 {
        let r0 = self.phi0.map_or(0.0, |c| c.support_radius());
        let r1 = self.phi1.map_or(0.0, |c| c.support_radius());
        r0.max(r1)
    }

    pub fn eval_phi0(&self, x: f64, y: f64, box_l: f64) -> f64 {
        self.phi0.map_or(0.0, |c| c.eval(x, y, box_l))
    }

    pub fn eval_phi1(&self, x: f64, y: f64, box_l: f64) -> f64 {
        self.phi1.map_or(0.0, |c| c.eval(x, y, box_l))
    }
}

/// Pointwise-exact sampling of the analytic pair at t = 0.
pub fn sample_initial_data(spec: &InitialDataSpec, grid: &GridSpec, p: f64) -> Result<WaveState> {
    if let Some(c) = &spec.phi0 {
        c.validate()?;
    }
    if let Some(c) = &spec.phi1 {
        c.validate()?;
    }
    if grid.boundary == Boundary::DirichletTruncation {
        let r_s = spec.support_radius();
        if !(r_s + 2.0 * grid.h < grid.l) {
            return Err(Error::ConeGuard {
                msg: format!(
                    "initial data support radius {r_s} does not fit inside the box half-width {}",
                    grid.l
                ),
                max_t_final: 0.0,
            });
        }
    }
    let phi = Field::from_fn(grid, |x, y| spec.eval_phi0(x, y, grid.l));
    let pi = Field::from_fn(grid, |x, y| spec.eval_phi1(x, y, grid.l));
    let state = WaveState { t: 0.0, phi, pi, p };
    state.check_finite()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitudes_give_zero_state() {
        let grid = GridSpec::new(4.0, 33, Boundary::DirichletTruncation).unwrap();
        let spec = InitialDataSpec::default();
        let st = sample_initial_data(&spec, &grid, 3.0).unwrap();
        assert!(st.phi.data.iter().all(|&v| v == 0.0));
        assert!(st.pi.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bump_peak_and_compact_support() {
        let grid = GridSpec::new(8.0, 65, Boundary::DirichletTruncation).unwrap();
        let spec = InitialDataSpec {
            phi0: Some(ComponentSpec::bump(1.0, 2.0, (0.0, 0.0))),
            phi1: None,
        };
        let st = sample_initial_data(&spec, &grid, 3.0).unwrap();
        // peak value a·e^{1-1} = 1 at the center node
        assert_eq!(st.phi.at(32, 32), 1.0);
        // exactly zero on the circle |x| = R: the node (2, 0) lies on it
        assert_eq!(st.phi.at(40, 32), 0.0);
        assert_eq!(st.phi.at(64, 32), 0.0);
    }

    #[test]
    fn oversized_support_rejected_with_cone_message() {
        let grid = GridSpec::new(2.0, 33, Boundary::DirichletTruncation).unwrap();
        let spec = InitialDataSpec {
            phi0: Some(ComponentSpec::bump(1.0, 3.0, (0.0, 0.0))),
            phi1: None,
        };
        let err = sample_initial_data(&spec, &grid, 3.0).unwrap_err();
        assert!(err.to_string().contains("cone guard"));
    }

    #[test]
    fn bump_gradient_matches_finite_differences() {
        let c = ComponentSpec::bump(1.3, 2.0, (0.3, -0.4));
        let eps = 1e-6;
        for &(x, y) in &[(0.5, 0.2), (1.1, -1.0), (0.3, 1.2)] {
            let (gx, gy) = c.grad(x, y, 10.0);
            let nx = (c.eval(x + eps, y, 10.0) - c.eval(x - eps, y, 10.0)) / (2.0 * eps);
            let ny = (c.eval(x, y + eps, 10.0) - c.eval(x, y - eps, 10.0)) / (2.0 * eps);
            assert!((gx - nx).abs() < 1e-6 && (gy - ny).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_truncation_radius_covers_tail() {
        let c = ComponentSpec::gaussian(2.0, 1.5, (0.0, 0.0));
        let r_eff = c.support_radius();
        assert!(c.eval(r_eff, 0.0, 10.0).abs() <= 1e-14 * 2.0 * (1.0 + 1e-12));
    }
}
