//! Grid fields and the (φ, ∂ₜφ) state, with the finite-difference operators
//! used by the diagnostics.
//!
//! Storage is row-major with rows indexed by the x₂ node j: `data[j*n + i]`
//! holds the sample at (x₁, x₂) = (coord(i), coord(j)). Diagnostic first
//! derivatives use a 4th-order centered stencil so that quadrature and
//! time-stepping errors, not differentiation, dominate every audit; second
//! derivatives are the plain 3-point stencil matching the solver order.

use crate::error::{Error, Result};
use crate::grid::{Boundary, GridSpec};
use crate::util::{cubic_weights, max_rows, sum_rows};

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n;
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            let y = grid.coord(j);
            for i in 0..n {
                data[j * n + i] = f(grid.coord(i), y);
            }
        }
        Field { n, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        max_rows(self.n, |j| {
            self.row(j).iter().fold(0.0f64, |a, &v| a.max(v.abs()))
        })
    }

    pub fn scaled(&self, lambda: f64) -> Field {
        Field { n: self.n, data: self.data.iter().map(|v| lambda * v).collect() }
    }

    /// Relabel samples under x₁ → -x₁.
    pub fn reflect_x1(&self) -> Field {
        let n = self.n;
        let mut out = Field::zeros(n);
        for j in 0..n {
            for i in 0..n {
                out.set(i, j, self.at(n - 1 - i, j));
            }
        }
        out
    }

    fn wrap(&self, i: isize) -> usize {
        // periodic index over the n-1 unique nodes
        let m = (self.n - 1) as isize;
        (((i % m) + m) % m) as usize
    }

    #[inline]
    fn sample(&self, i: isize, j: isize, boundary: Boundary) -> f64 {
        let n = self.n as isize;
        match boundary {
            Boundary::Periodic => self.at(self.wrap(i), self.wrap(j)),
            Boundary::DirichletTruncation => {
                if i < 0 || j < 0 || i >= n || j >= n {
                    0.0
                } else {
                    self.at(i as usize, j as usize)
                }
            }
        }
    }

    /// 4th-order centered ∂₁ at node (i, j). Out-of-range samples are zero
    /// for Dirichlet truncation and wrap for periodic grids.
    #[inline]
    pub fn dx1(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (8.0 * (self.sample(i + 1, j, b) - self.sample(i - 1, j, b))
            - (self.sample(i + 2, j, b) - self.sample(i - 2, j, b)))
            / (12.0 * grid.h)
    }

    /// 4th-order centered ∂₂ at node (i, j).
    #[inline]
    pub fn dx2(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (8.0 * (self.sample(i, j + 1, b) - self.sample(i, j - 1, b))
            - (self.sample(i, j + 2, b) - self.sample(i, j - 2, b)))
            / (12.0 * grid.h)
    }

    /// Plain centered ∂₁, matching the solver's second order; the identity
    /// audits use this flavor so their residuals refine like the scheme.
    #[inline]
    pub fn dx1_o2(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i + 1, j, b) - self.sample(i - 1, j, b)) / (2.0 * grid.h)
    }

    /// Plain centered ∂₂.
    #[inline]
    pub fn dx2_o2(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i, j + 1, b) - self.sample(i, j - 1, b)) / (2.0 * grid.h)
    }

    /// 3-point second derivatives and the mixed derivative (centered first
    /// differences applied twice).
    #[inline]
    pub fn d11(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i + 1, j, b) - 2.0 * self.sample(i, j, b) + self.sample(i - 1, j, b))
            / (grid.h * grid.h)
    }

    #[inline]
    pub fn d22(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i, j + 1, b) - 2.0 * self.sample(i, j, b) + self.sample(i, j - 1, b))
            / (grid.h * grid.h)
    }

    #[inline]
    pub fn d12(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i + 1, j + 1, b) - self.sample(i - 1, j + 1, b)
            - self.sample(i + 1, j - 1, b)
            + self.sample(i - 1, j - 1, b))
            / (4.0 * grid.h * grid.h)
    }

    /// 5-point Laplacian at node (i, j).
    #[inline]
    pub fn laplacian(&self, i: usize, j: usize, grid: &GridSpec) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let b = grid.boundary;
        (self.sample(i + 1, j, b)
            + self.sample(i - 1, j, b)
            + self.sample(i, j + 1, b)
            + self.sample(i, j - 1, b)
            - 4.0 * self.sample(i, j, b))
            / (grid.h * grid.h)
    }

    /// Bicubic (tensor cubic Lagrange) interpolation at physical point (x, y).
    /// The 4×4 stencil is clamped at the box edge.
    pub fn bicubic(&self, x: f64, y: f64, grid: &GridSpec) -> f64 {
        let n = self.n;
        let fx = grid.frac_index(x);
        let fy = grid.frac_index(y);
        let i0 = (fx.floor() as isize).clamp(1, n as isize - 3) as usize;
        let j0 = (fy.floor() as isize).clamp(1, n as isize - 3) as usize;
        let wx = cubic_weights(fx - i0 as f64);
        let wy = cubic_weights(fy - j0 as f64);
        let mut acc = 0.0;
        for (dj, &wyj) in wy.iter().enumerate() {
            let j = j0 + dj - 1;
            let row = self.row(j);
            let mut r = 0.0;
            for (di, &wxi) in wx.iter().enumerate() {
                r += wxi * row[i0 + di - 1];
            }
            acc += wyj * r;
        }
        acc
    }

    /// Trapezoid integral of `f(i, j, value)` over the grid.
    pub fn integrate<F>(&self, grid: &GridSpec, f: F) -> f64
    where
        F: Fn(usize, usize, f64) -> f64 + Sync,
    {
        let n = self.n;
        sum_rows(n, |j| {
            let wj = grid.weight(j);
            let row = self.row(j);
            let mut acc = 0.0;
            for (i, &v) in row.iter().enumerate() {
                acc += grid.weight(i) * f(i, j, v);
            }
            wj * acc
        })
    }
}

/// The pair (φ, ∂ₜφ) at one time level together with the nonlinearity
/// exponent it evolves under.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub t: f64,
    pub phi: Field,
    pub pi: Field,
    pub p: f64,
}

impl WaveState {
    pub fn zero(grid: &GridSpec, p: f64) -> Self {
        WaveState { t: 0.0, phi: Field::zeros(grid.n), pi: Field::zeros(grid.n), p }
    }

    /// NaN/∞ anywhere is a hard fault.
    pub fn check_finite(&self) -> Result<()> {
        if !self.phi.all_finite() {
            return Err(Error::NonFinite("phi".into()));
        }
        if !self.pi.all_finite() {
            return Err(Error::NonFinite("pi".into()));
        }
        Ok(())
    }
}

/// |v|^e with fast paths for small integer exponents; shared by every
/// functional so identical integrands stay bit-identical across modules.
#[inline]
pub fn pow_abs(v: f64, e: f64) -> f64 {
    let a = v.abs();
    if a == 0.0 {
        return 0.0;
    }
    let r = e.round();
    if e == r && r.abs() <= 8.0 {
        let m = a.powi(r.abs() as i32);
        if r < 0.0 {
            1.0 / m
        } else {
            m
        }
    } else {
        (e * a.ln()).exp()
    }
}

/// sign(φ)|φ|^p, evaluated without NaN at φ = 0 for non-integer p.
#[inline]
pub fn nonlin_pow(phi: f64, p: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let a = phi.abs();
    let m = if p == 3.0 {
        a * a * a
    } else if p == 5.0 {
        let a2 = a * a;
        a2 * a2 * a
    } else if p == 2.0 {
        a * a
    } else if p == 4.0 {
        let a2 = a * a;
        a2 * a2
    } else {
        (p * a.ln()).exp()
    };
    if phi > 0.0 {
        m
    } else {
        -m
    }
}

/// G(φ) = |φ|^{p+1}/(p+1), the potential density of the conserved energy.
#[inline]
pub fn potential_g(phi: f64, p: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let a = phi.abs();
    let m = if p == 3.0 {
        let a2 = a * a;
        a2 * a2
    } else if p == 5.0 {
        let a2 = a * a;
        a2 * a2 * a2
    } else {
        ((p + 1.0) * a.ln()).exp()
    };
    m / (p + 1.0)
}
