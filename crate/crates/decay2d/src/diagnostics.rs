//! The monitored functionals: conserved energy, weighted potential energies,
//! conformal charge Q₀, null-weighted energy E[φ]_q, weighted L² norms,
//! pointwise suprema and spacetime-norm partial sums.
//!
//! Every area integral is the tensor-product trapezoid rule on the grid.
//! The conserved-energy functional uses the 4th-order first-derivative
//! stencil so it reproduces the data norms of [`crate::energy`] bit for bit;
//! the identity audits (Q₀, E[φ]_q, the weighted L² suite) use plain
//! centered differences matching the solver's second order, so their
//! residuals refine like the scheme itself. All per-record quantities are
//! evaluated in one fused row-parallel pass by [`full_record`].

use crate::error::{Error, Result};
use crate::field::WaveState;
use crate::grid::GridSpec;
use crate::params::PParam;
use crate::trace::NullTrace;
use crate::util::{map_rows, pairwise_sum};

/// Time-indexed record of every monitored functional.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagnosticRecord {
    pub t: f64,
    /// ∫ |∂ₜφ|² + |∇φ|² + (2/(p+1))|φ|^{p+1} dx
    pub e_total: f64,
    /// ∫ (1+t+r)^{(p-1)/2} |φ|^{p+1} dx
    pub pot_weighted: f64,
    /// ∫ |φ|^{p+1} dx
    pub pot_plain: f64,
    /// ∫ (t²+r²) |φ|^{p+1} dx, the potential part of the conformal identity
    pub pot_conformal: f64,
    /// ∫ |x₁∂₂φ-x₂∂₁φ|² + |Sφ+φ|² + Σⱼ|xⱼ∂ₜφ+t∂ⱼφ|² dx
    pub q0: f64,
    /// null-weighted energy over {x₁ ≤ t}
    pub e_q: f64,
    /// (1+t)² ‖∇̄φ‖²
    pub wl2_angular: f64,
    /// ‖(1+|t-r|)∇φ‖²
    pub wl2_cone: f64,
    /// ‖φ‖²
    pub l2_sq: f64,
    pub h2_norm: f64,
    pub sup_abs: f64,
    /// sup|φ|·(1+t)^{1/2}
    pub f: f64,
    /// max over nodes of |φ(x)|·(1+t+|x|)^{1/2}
    pub f_star: f64,
    /// ∫ |φ|^{3(p-1)/2} dx
    pub lp_s1: f64,
    /// (∫ |φ|^{2p} dx)^{1/2} = ‖φ(t)‖^p_{L^{2p}}
    pub lp_s2: f64,
    /// running Σ dt·lp_s1 up to this record
    pub s1_partial: f64,
    /// running Σ dt·lp_s2 up to this record
    pub s2_partial: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

pub use crate::field::pow_abs;

struct NodeData {
    x: f64,
    y: f64,
    r: f64,
    v: f64,
    pi: f64,
    /// 4th-order gradient (conserved-energy functional)
    gx: f64,
    gy: f64,
    /// solver-order centered gradient (identity audits)
    gx2: f64,
    gy2: f64,
}

#[inline]
fn node_data(state: &WaveState, grid: &GridSpec, i: usize, j: usize) -> NodeData {
    let x = grid.coord(i);
    let y = grid.coord(j);
    NodeData {
        x,
        y,
        r: (x * x + y * y).sqrt(),
        v: state.phi.at(i, j),
        pi: state.pi.at(i, j),
        gx: state.phi.dx1(i, j, grid),
        gy: state.phi.dx2(i, j, grid),
        gx2: state.phi.dx1_o2(i, j, grid),
        gy2: state.phi.dx2_o2(i, j, grid),
    }
}

fn integrate_nodes<F>(state: &WaveState, grid: &GridSpec, f: F) -> f64
where
    F: Fn(&NodeData) -> f64 + Sync,
{
    let n = grid.n;
    let rows: Vec<f64> = map_rows(n, |j| {
        let wj = grid.weight(j);
        let mut acc = 0.0;
        for i in 0..n {
            let nd = node_data(state, grid, i, j);
            acc += grid.weight(i) * f(&nd);
        }
        wj * acc
    });
    pairwise_sum(&rows)
}

/// ∫ |∂ₜφ|² + |∇φ|² + (2/(p+1))|φ|^{p+1} dx; equals e00 of the data at t = 0.
pub fn total_energy(state: &WaveState, grid: &GridSpec) -> Result<f64> {
    let p = state.p;
    let c = 2.0 / (p + 1.0);
    let e = integrate_nodes(state, grid, |nd| {
        nd.pi * nd.pi + nd.gx * nd.gx + nd.gy * nd.gy + c * pow_abs(nd.v, p + 1.0)
    });
    if !e.is_finite() {
        return Err(Error::NonFinite("total energy".into()));
    }
    Ok(e)
}

/// (∫(1+t+r)^{(p-1)/2}|φ|^{p+1} dx, ∫|φ|^{p+1} dx)
pub fn potential_decay_functional(state: &WaveState, grid: &GridSpec) -> Result<(f64, f64)> {
    let p = state.p;
    let t = state.t;
    let q = 0.5 * (p - 1.0);
    let weighted = integrate_nodes(state, grid, |nd| {
        pow_abs(1.0 + t + nd.r, q) * pow_abs(nd.v, p + 1.0)
    });
    let plain = integrate_nodes(state, grid, |nd| pow_abs(nd.v, p + 1.0));
    if !weighted.is_finite() || !plain.is_finite() {
        return Err(Error::NonFinite("potential energy".into()));
    }
    Ok((weighted, plain))
}

/// The conformal charge Q₀ built from rotation, scaling and boost fields.
pub fn conformal_charge(state: &WaveState, grid: &GridSpec) -> f64 {
    let t = state.t;
    integrate_nodes(state, grid, |nd| {
        let rot = nd.x * nd.gy2 - nd.y * nd.gx2;
        let scal = t * nd.pi + nd.x * nd.gx2 + nd.y * nd.gy2 + nd.v;
        let b1 = nd.x * nd.pi + t * nd.gx2;
        let b2 = nd.y * nd.pi + t * nd.gy2;
        rot * rot + scal * scal + b1 * b1 + b2 * b2
    })
}

/// ∫ (t²+r²)|φ|^{p+1} dx
pub fn conformal_potential(state: &WaveState, grid: &GridSpec) -> f64 {
    let p = state.p;
    let t = state.t;
    integrate_nodes(state, grid, |nd| (t * t + nd.r * nd.r) * pow_abs(nd.v, p + 1.0))
}

/// Null-weighted energy E[φ]_q over the half-plane {x₁ ≤ t} with
/// u₁ = t - x₁ + 1.
pub fn null_weighted_energy(state: &WaveState, grid: &GridSpec, pp: &PParam) -> f64 {
    let t = state.t;
    let p = pp.p;
    let q = pp.q;
    let c = 2.0 / (p + 1.0);
    integrate_nodes(state, grid, |nd| {
        if nd.x > t {
            return 0.0;
        }
        let u1 = t - nd.x + 1.0;
        let good = nd.y * (nd.pi + nd.gx2) + u1 * nd.gy2;
        let bad = u1 * (nd.pi - nd.gx2) + nd.y * nd.gy2 + nd.v;
        let pot = c * (nd.y * nd.y + u1 * u1) * pow_abs(nd.v, p + 1.0);
        pow_abs(u1, q - 2.0) * (good * good + bad * bad + pot)
    })
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedNorms {
    /// (1+t)² ‖∇̄φ‖²
    pub angular_weighted: f64,
    /// ‖(1+|t-r|)∇φ‖²
    pub cone_weighted: f64,
    pub l2_sq: f64,
    pub h2_norm: f64,
}

/// The weighted L² triple of the conformal-energy bound plus the H² norm
/// (centered second differences). ∇̄φ is set to zero at r < h/2.
pub fn weighted_norm_suite(state: &WaveState, grid: &GridSpec) -> WeightedNorms {
    let t = state.t;
    let half_h = 0.5 * grid.h;
    let angular = integrate_nodes(state, grid, |nd| {
        if nd.r < half_h {
            return 0.0;
        }
        let ang = (nd.x * nd.gy2 - nd.y * nd.gx2) / nd.r;
        ang * ang
    });
    let cone = integrate_nodes(state, grid, |nd| {
        let w = 1.0 + (t - nd.r).abs();
        w * w * (nd.gx2 * nd.gx2 + nd.gy2 * nd.gy2)
    });
    let l2 = integrate_nodes(state, grid, |nd| nd.v * nd.v);
    let n = grid.n;
    let h2_sq = {
        let rows: Vec<f64> = map_rows(n, |j| {
            let wj = grid.weight(j);
            let mut acc = 0.0;
            for i in 0..n {
                let nd = node_data(state, grid, i, j);
                let hxx = state.phi.d11(i, j, grid);
                let hyy = state.phi.d22(i, j, grid);
                let hxy = state.phi.d12(i, j, grid);
                acc += grid.weight(i)
                    * (nd.v * nd.v
                        + nd.gx2 * nd.gx2
                        + nd.gy2 * nd.gy2
                        + hxx * hxx
                        + 2.0 * hxy * hxy
                        + hyy * hyy);
            }
            wj * acc
        });
        pairwise_sum(&rows)
    };
    WeightedNorms {
        angular_weighted: (1.0 + t) * (1.0 + t) * angular,
        cone_weighted: cone,
        l2_sq: l2,
        h2_norm: h2_sq.sqrt(),
    }
}

/// (sup|φ|, f, f_star): grid maxima of |φ|, |φ|(1+t)^{1/2}, |φ|(1+t+r)^{1/2}.
pub fn sup_norms(state: &WaveState, grid: &GridSpec) -> (f64, f64, f64) {
    let n = grid.n;
    let t = state.t;
    let per_row: Vec<(f64, f64)> = map_rows(n, |j| {
        let mut sup = 0.0f64;
        let mut fstar = 0.0f64;
        let y = grid.coord(j);
        for i in 0..n {
            let a = state.phi.at(i, j).abs();
            if a == 0.0 {
                continue;
            }
            sup = sup.max(a);
            let x = grid.coord(i);
            let r = (x * x + y * y).sqrt();
            fstar = fstar.max(a * (1.0 + t + r).sqrt());
        }
        (sup, fstar)
    });
    let sup = per_row.iter().fold(0.0f64, |a, b| a.max(b.0));
    let fstar = per_row.iter().fold(0.0f64, |a, b| a.max(b.1));
    (sup, sup * (1.0 + t).sqrt(), fstar)
}

struct RowSums {
    vals: [f64; 12],
    sup: f64,
    fstar: f64,
}

/// All record entries in one row-parallel pass.
pub fn full_record(
    state: &WaveState,
    grid: &GridSpec,
    pp: &PParam,
    trace: &NullTrace,
) -> Result<DiagnosticRecord> {
    let n = grid.n;
    let t = state.t;
    let p = pp.p;
    let q = pp.q;
    let pot_c = 2.0 / (p + 1.0);
    let half_h = 0.5 * grid.h;
    let m_s1 = 1.5 * (p - 1.0);

    let rows: Vec<RowSums> = map_rows(n, |j| {
        let wj = grid.weight(j);
        let mut vals = [0.0f64; 12];
        let mut sup = 0.0f64;
        let mut fstar = 0.0f64;
        for i in 0..n {
            let nd = node_data(state, grid, i, j);
            let w = grid.weight(i) * wj;
            let abs_v = nd.v.abs();
            let vp1 = pow_abs(nd.v, p + 1.0);
            let grad_sq = nd.gx * nd.gx + nd.gy * nd.gy;

            // e_total
            vals[0] += w * (nd.pi * nd.pi + grad_sq + pot_c * vp1);
            // pot_weighted / pot_plain / pot_conformal
            vals[1] += w * pow_abs(1.0 + t + nd.r, q) * vp1;
            vals[2] += w * vp1;
            vals[3] += w * (t * t + nd.r * nd.r) * vp1;
            let grad2_sq = nd.gx2 * nd.gx2 + nd.gy2 * nd.gy2;
            // q0
            {
                let rot = nd.x * nd.gy2 - nd.y * nd.gx2;
                let scal = t * nd.pi + nd.x * nd.gx2 + nd.y * nd.gy2 + nd.v;
                let b1 = nd.x * nd.pi + t * nd.gx2;
                let b2 = nd.y * nd.pi + t * nd.gy2;
                vals[4] += w * (rot * rot + scal * scal + b1 * b1 + b2 * b2);
            }
            // e_q over {x1 <= t}
            if nd.x <= t {
                let u1 = t - nd.x + 1.0;
                let good = nd.y * (nd.pi + nd.gx2) + u1 * nd.gy2;
                let bad = u1 * (nd.pi - nd.gx2) + nd.y * nd.gy2 + nd.v;
                let pot = pot_c * (nd.y * nd.y + u1 * u1) * vp1;
                vals[5] += w * pow_abs(u1, q - 2.0) * (good * good + bad * bad + pot);
            }
            // angular / cone-weighted / l2
            if nd.r >= half_h {
                let ang = (nd.x * nd.gy2 - nd.y * nd.gx2) / nd.r;
                vals[6] += w * ang * ang;
            }
            {
                let wc = 1.0 + (t - nd.r).abs();
                vals[7] += w * wc * wc * grad2_sq;
            }
            vals[8] += w * nd.v * nd.v;
            // h2 (squared)
            {
                let hxx = state.phi.d11(i, j, grid);
                let hyy = state.phi.d22(i, j, grid);
                let hxy = state.phi.d12(i, j, grid);
                vals[9] += w
                    * (nd.v * nd.v + grad2_sq + hxx * hxx + 2.0 * hxy * hxy + hyy * hyy);
            }
            // spacetime integrands
            vals[10] += w * pow_abs(nd.v, m_s1);
            vals[11] += w * pow_abs(nd.v, 2.0 * p);
            // suprema
            if abs_v > 0.0 {
                sup = sup.max(abs_v);
                fstar = fstar.max(abs_v * (1.0 + t + nd.r).sqrt());
            }
        }
        RowSums { vals, sup, fstar }
    });

    let comp = |k: usize| -> f64 {
        let v: Vec<f64> = rows.iter().map(|r| r.vals[k]).collect();
        pairwise_sum(&v)
    };
    let sup_abs = rows.iter().fold(0.0f64, |a, r| a.max(r.sup));
    let f_star = rows.iter().fold(0.0f64, |a, r| a.max(r.fstar));

    let rec = DiagnosticRecord {
        t,
        e_total: comp(0),
        pot_weighted: comp(1),
        pot_plain: comp(2),
        pot_conformal: comp(3),
        q0: comp(4),
        e_q: comp(5),
        wl2_angular: (1.0 + t) * (1.0 + t) * comp(6),
        wl2_cone: comp(7),
        l2_sq: comp(8),
        h2_norm: comp(9).sqrt(),
        sup_abs,
        f: sup_abs * (1.0 + t).sqrt(),
        f_star,
        lp_s1: comp(10),
        lp_s2: comp(11).sqrt(),
        s1_partial: 0.0,
        s2_partial: 0.0,
        i1: trace.i1,
        i2: trace.i2,
        i3: trace.i3,
    };
    for (name, v) in [
        ("e_total", rec.e_total),
        ("pot_weighted", rec.pot_weighted),
        ("q0", rec.q0),
        ("e_q", rec.e_q),
        ("h2_norm", rec.h2_norm),
        ("lp_s2", rec.lp_s2),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("diagnostic {name} at t = {t}")));
        }
    }
    Ok(rec)
}

/// Relative residual of the conformal energy identity between sample times
/// s < t:
///
///   Q₀(t) + (2/(p+1))∫(t²+r²)|φ(t)|^{p+1}dx + ((p-5)/(p+1))∫ₛᵗ 2τ∫|φ|^{p+1}dx dτ
///     = Q₀(s) + (2/(p+1))∫(s²+r²)|φ(s)|^{p+1}dx,
///
/// with the time integral accumulated by trapezoid over the intermediate
/// samples. The bulk coefficient vanishes identically at p = 5.
pub fn conformal_identity_residual(
    series: &[DiagnosticRecord],
    pp: &PParam,
    s: f64,
    t: f64,
) -> Result<f64> {
    if !(s < t) {
        return Err(Error::Param(format!("need s < t, got s={s}, t={t}")));
    }
    let idx_of = |target: f64| -> Result<usize> {
        series
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.t - target).abs().partial_cmp(&(b.1.t - target).abs()).unwrap()
            })
            .map(|(k, _)| k)
            .ok_or_else(|| Error::Param("empty series".into()))
    };
    let ks = idx_of(s)?;
    let kt = idx_of(t)?;
    if kt <= ks || kt - ks < 4 {
        return Err(Error::Param(format!(
            "need at least 3 intermediate samples between s={s} and t={t}"
        )));
    }
    let mut time_int = 0.0;
    for k in ks..kt {
        let (a, b) = (&series[k], &series[k + 1]);
        let ga = 2.0 * a.t * a.pot_plain;
        let gb = 2.0 * b.t * b.pot_plain;
        time_int += 0.5 * (b.t - a.t) * (ga + gb);
    }
    let c = 2.0 / (pp.p + 1.0);
    let bulk = (pp.p - 5.0) / (pp.p + 1.0);
    let lhs = series[kt].q0 + c * series[kt].pot_conformal + bulk * time_int;
    let rhs = series[ks].q0 + c * series[ks].pot_conformal;
    let denom = lhs.abs().max(rhs.abs());
    if denom < 1e-300 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs() / denom)
}

#[derive(Debug, Clone, Copy)]
pub struct SpacetimeNorms {
    pub s1: f64,
    pub s2: f64,
    /// the L^{3(p-1)/2} bound is only claimed for p > 1 + sqrt(8)
    pub s1_bound_claimed: bool,
}

/// Spacetime norms from a uniformly sampled record stream: every record
/// contributes dt·(its spatial integrand).
pub fn spacetime_norm_accumulate(
    series: &[DiagnosticRecord],
    pp: &PParam,
    dt_sample: f64,
) -> Result<SpacetimeNorms> {
    if series.is_empty() {
        return Err(Error::Param("empty record stream".into()));
    }
    if !(dt_sample > 0.0) {
        return Err(Error::Param("sample spacing must be positive".into()));
    }
    for w in series.windows(2) {
        let d = w[1].t - w[0].t;
        if (d - dt_sample).abs() > 0.02 * dt_sample && w[1].t + 1e-12 < series.last().unwrap().t {
            return Err(Error::Param(format!(
                "non-uniform sample spacing: {d} vs {dt_sample}"
            )));
        }
    }
    let raw1: f64 = dt_sample * pairwise_sum(&series.iter().map(|r| r.lp_s1).collect::<Vec<_>>());
    let raw2: f64 = dt_sample * pairwise_sum(&series.iter().map(|r| r.lp_s2).collect::<Vec<_>>());
    let m1 = 1.5 * (pp.p - 1.0);
    Ok(SpacetimeNorms {
        s1: raw1.powf(1.0 / m1),
        s2: raw2.powf(1.0 / pp.p),
        s1_bound_claimed: pp.spacetime_bound_claimed(),
    })
}
