//! Power-law exponent fitting and the Gronwall-bootstrap right-hand side.

use crate::error::{Error, Result};

/// Least-squares slope of log(value) against log(1+t), with the residual
/// reported rather than hidden.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub n_samples: usize,
}

pub fn fit_decay_rate(ts: &[f64], values: &[f64], window: (f64, f64)) -> Result<RateFit> {
    if ts.len() != values.len() {
        return Err(Error::Param("time and value arrays differ in length".into()));
    }
    let pairs: Vec<(f64, f64)> = ts
        .iter()
        .zip(values.iter())
        .filter(|(&t, _)| t >= window.0 - 1e-12 && t <= window.1 + 1e-12)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pairs.len() < 5 {
        return Err(Error::Param(format!(
            "need at least 5 samples in the fit window, got {}",
            pairs.len()
        )));
    }
    if let Some((t, v)) = pairs.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Param(format!("nonpositive value {v} at t = {t} in fit window")));
    }

    let xs: Vec<f64> = pairs.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Degenerate("fit window collapses to a single abscissa".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    Ok(RateFit {
        exponent: slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
        window,
        n_samples: pairs.len(),
    })
}

/// RHS of the sharp-decay bootstrap for p > 3:
///
///   1 + ∫₀^{t₀} (ln(1+s)+1)(1+s)^{(7-3p)/4} |f(s)|^{(p-3)/2} ds,
///
/// by trapezoid on the sample grid of f.
pub fn bootstrap_rhs(ts: &[f64], f_values: &[f64], p: f64, t0: f64) -> Result<f64> {
    if p <= 3.0 {
        return Err(Error::Param(format!(
            "bootstrap exponent (p-3)/2 needs p > 3, got {p}"
        )));
    }
    if ts.len() != f_values.len() || ts.len() < 2 {
        return Err(Error::Param("need at least two samples of f".into()));
    }
    let e_t = (7.0 - 3.0 * p) / 4.0;
    let e_f = 0.5 * (p - 3.0);
    let g = |s: f64, f: f64| ((1.0 + s).ln() + 1.0) * (1.0 + s).powf(e_t) * f.abs().powf(e_f);
    let mut acc = 0.0;
    for w in ts.windows(2).zip(f_values.windows(2)) {
        let (tw, fw) = w;
        if tw[0] >= t0 {
            break;
        }
        let t1 = tw[1].min(t0);
        // clip the last interval at t0 with linear interpolation of f
        let f1 = if tw[1] <= t0 {
            fw[1]
        } else {
            fw[0] + (fw[1] - fw[0]) * (t0 - tw[0]) / (tw[1] - tw[0])
        };
        acc += 0.5 * (t1 - tw[0]) * (g(tw[0], fw[0]) + g(t1, f1));
    }
    Ok(1.0 + acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovered() {
        let ts: Vec<f64> = (0..60).map(|k| k as f64 * 0.5).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 2.5 / (1.0 + t)).collect();
        let fit = fit_decay_rate(&ts, &vs, (0.0, 30.0)).unwrap();
        assert!((fit.exponent + 1.0).abs() < 1e-6, "alpha = {}", fit.exponent);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_exponent() {
        let ts: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let vs = vec![3.0; 20];
        let fit = fit_decay_rate(&ts, &vs, (0.0, 19.0)).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
    }

    #[test]
    fn oscillating_power_law_within_tenth() {
        let ts: Vec<f64> = (0..400).map(|k| k as f64 * 0.1).collect();
        let vs: Vec<f64> = ts.iter().map(|t| (2.0 + t.sin()) / (1.0 + t)).collect();
        let fit = fit_decay_rate(&ts, &vs, (5.0, 40.0)).unwrap();
        assert!((fit.exponent + 1.0).abs() < 0.1, "alpha = {}", fit.exponent);
        assert!(fit.residual_rms > 0.0);
    }

    #[test]
    fn guards_fire() {
        let ts = vec![0.0, 1.0, 2.0, 3.0];
        let vs = vec![1.0, 1.0, 1.0, 1.0];
        assert!(fit_decay_rate(&ts, &vs, (0.0, 3.0)).is_err()); // too few
        let ts = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let vs = vec![1.0, 1.0, -1.0, 1.0, 1.0, 1.0];
        assert!(fit_decay_rate(&ts, &vs, (0.0, 5.0)).is_err()); // nonpositive
    }

    #[test]
    fn bootstrap_zero_f_gives_one() {
        let ts: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let fs = vec![0.0; 100];
        let rhs = bootstrap_rhs(&ts, &fs, 4.0, 8.0).unwrap();
        assert_eq!(rhs, 1.0);
    }

    #[test]
    fn bootstrap_requires_p_above_three() {
        let ts = vec![0.0, 1.0];
        let fs = vec![1.0, 1.0];
        assert!(bootstrap_rhs(&ts, &fs, 3.0, 1.0).is_err());
        assert!(bootstrap_rhs(&ts, &fs, 2.5, 1.0).is_err());
    }
}
