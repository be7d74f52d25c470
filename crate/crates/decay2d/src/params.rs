//! Nonlinearity exponent and the exponents derived from it.

use crate::error::{Error, Result};

/// The power p of the defocusing nonlinearity |φ|^{p-1}φ, with the
/// null-weight exponent q = (p-1)/2 and the critical Sobolev regularity
/// s_p = (p-3)/(p-1). The laboratory covers 1 < p ≤ 5; p = 5 is the
/// conformally invariant endpoint (q = 2, s_p = 1/2).
#[derive(Debug, Clone, Copy)]
pub struct PParam {
    pub p: f64,
    pub q: f64,
    pub s_p: f64,
}

impl PParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 5.0) || !p.is_finite() {
            return Err(Error::Param(format!("need 1 < p <= 5, got {p}")));
        }
        Ok(PParam { p, q: 0.5 * (p - 1.0), s_p: (p - 3.0) / (p - 1.0) })
    }

    /// Strictly below the conformal power.
    pub fn is_subconformal(&self) -> bool {
        self.p < 5.0
    }

    /// Above 1 + sqrt(8), where the spacetime L^{3(p-1)/2} bound is claimed.
    pub fn spacetime_bound_claimed(&self) -> bool {
        self.p > 1.0 + 8.0f64.sqrt()
    }
}
