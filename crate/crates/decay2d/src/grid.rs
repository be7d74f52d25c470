//! Uniform Cartesian grid on the square [-L, L]².

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Domain truncation with the field pinned to zero on the boundary;
    /// valid only while the light cone of the data stays inside the box.
    DirichletTruncation,
    /// Periodic identification of x = -L with x = +L (the last node
    /// duplicates the first).
    Periodic,
}

/// Grid specification: `n` nodes per axis at spacing `h = 2L/(n-1)`,
/// `n` odd so the origin is a node and x_i = -L + i·h hits ±L exactly.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub l: f64,
    pub n: usize,
    pub h: f64,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn new(l: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Grid(format!("half-width L must be positive, got {l}")));
        }
        if n < 3 {
            return Err(Error::Grid(format!("need at least 3 points per axis, got {n}")));
        }
        if n % 2 == 0 {
            return Err(Error::Grid(format!(
                "points per axis must be odd so the origin is a node, got {n}"
            )));
        }
        let h = 2.0 * l / (n - 1) as f64;
        Ok(GridSpec { l, n, h, boundary })
    }

    /// Coordinate of node `i` along either axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h
    }

    /// Trapezoid weight of node `i` (h at interior nodes, h/2 at the ends).
    /// For periodic fields with the duplicated end column this reduces to the
    /// rectangle rule over the n-1 unique nodes.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Fractional index of coordinate `x` (0 at -L).
    #[inline]
    pub fn frac_index(&self, x: f64) -> f64 {
        (x + self.l) / self.h
    }

    /// Number of independent nodes per axis (periodic grids identify the
    /// duplicated end node).
    pub fn unique_n(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n - 1,
            Boundary::DirichletTruncation => self.n,
        }
    }
}

/// Containment check for Dirichlet truncation runs: data supported in
/// |x| ≤ R_s never influences the boundary before T_final when
/// R_s + T_final + 2h < L (finite speed of propagation plus a stencil halo).
pub fn cone_guard(grid: &GridSpec, data_support_radius: f64, t_final: f64) -> Result<()> {
    let max_t_final = grid.l - data_support_radius - 2.0 * grid.h;
    if data_support_radius + t_final + 2.0 * grid.h < grid.l {
        Ok(())
    } else {
        Err(Error::ConeGuard {
            msg: format!(
                "support radius {data_support_radius} + T_final {t_final} + 2h reaches the box half-width {}",
                grid.l
            ),
            max_t_final,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_grid() {
        let g = GridSpec::new(1.0, 3, Boundary::DirichletTruncation).unwrap();
        assert_eq!(g.h, 1.0);
        assert_eq!(g.coord(0), -1.0);
        assert_eq!(g.coord(1), 0.0);
        assert_eq!(g.coord(2), 1.0);
    }

    #[test]
    fn production_grid_spacing() {
        let g = GridSpec::new(40.0, 1025, Boundary::DirichletTruncation).unwrap();
        assert_eq!(g.h, 80.0 / 1024.0);
        assert_eq!(g.h, 0.078125);
        assert_eq!(g.coord(1024), 40.0);
        assert_eq!(g.coord(512), 0.0);
    }

    #[test]
    fn even_n_rejected() {
        assert!(GridSpec::new(1.0, 4, Boundary::DirichletTruncation).is_err());
        assert!(GridSpec::new(-1.0, 5, Boundary::DirichletTruncation).is_err());
    }

    #[test]
    fn cone_guard_cases() {
        let g = GridSpec::new(40.0, 1025, Boundary::DirichletTruncation).unwrap();
        assert!(cone_guard(&g, 2.0, 30.0).is_ok());
        assert!(cone_guard(&g, 2.0, 37.9).is_err());

        let small = GridSpec::new(10.0, 129, Boundary::DirichletTruncation).unwrap();
        match cone_guard(&small, 2.0, 30.0) {
            Err(Error::ConeGuard { max_t_final, .. }) => {
                assert!((max_t_final - (8.0 - 2.0 * small.h)).abs() < 1e-12);
            }
            other => panic!("expected cone guard violation, got {other:?}"),
        }
    }
}
