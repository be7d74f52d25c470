//! Report emission: series/profile CSVs, verdict JSONL, sweep CSVs and the
//! binary snapshot format.
//!
//! All floating-point output uses 17 significant digits so that identical
//! runs produce byte-identical files on every platform.
//!
//! Snapshot format: a 32-byte header — magic `W2D1` (4 bytes), n as u32
//! little-endian (4 bytes), then L, t, p as little-endian f64 (24 bytes) —
//! followed by the n×n φ samples and the n×n ∂ₜφ samples, row-major
//! little-endian f64. A sidecar text manifest records the layout.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticRecord;
use crate::error::{Error, Result};
use crate::field::{Field, WaveState};
use crate::grid::{Boundary, GridSpec};
use crate::rings::RadialProfile;

const SNAPSHOT_MAGIC: &[u8; 4] = b"W2D1";

/// 17-significant-digit decimal formatting shared by every writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const SERIES_COLUMNS: &[&str] = &[
    "t",
    "e_total",
    "pot_weighted",
    "pot_plain",
    "pot_conformal",
    "q0",
    "e_q",
    "wl2_angular",
    "wl2_cone",
    "l2_sq",
    "h2_norm",
    "sup_abs",
    "f",
    "f_star",
    "lp_s1",
    "lp_s2",
    "s1_partial",
    "s2_partial",
    "i1",
    "i2",
    "i3",
];

fn record_fields(r: &DiagnosticRecord) -> [f64; 21] {
    [
        r.t,
        r.e_total,
        r.pot_weighted,
        r.pot_plain,
        r.pot_conformal,
        r.q0,
        r.e_q,
        r.wl2_angular,
        r.wl2_cone,
        r.l2_sq,
        r.h2_norm,
        r.sup_abs,
        r.f,
        r.f_star,
        r.lp_s1,
        r.lp_s2,
        r.s1_partial,
        r.s2_partial,
        r.i1,
        r.i2,
        r.i3,
    ]
}

pub fn write_series_csv(path: &Path, series: &[DiagnosticRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", SERIES_COLUMNS.join(","))?;
    for r in series {
        let cells: Vec<String> = record_fields(r).iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Long-format profile CSV: one row per (t, ring).
pub fn write_profile_csv(path: &Path, profiles: &[RadialProfile]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,r,phi_star,phi_minus,a1,a2,a3")?;
    for p in profiles {
        for ring in &p.rings {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_f64(p.t),
                fmt_f64(ring.r),
                fmt_f64(ring.phi_star),
                fmt_f64(ring.phi_minus),
                fmt_f64(ring.a1),
                fmt_f64(ring.a2),
                fmt_f64(ring.a3),
            )?;
        }
    }
    Ok(())
}

/// One acceptance check: the claim it exercises, the measured value, the
/// pinned threshold and the comparison that must hold.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    /// the mathematical statement being checked, with its exponents/constants
    pub claim: String,
    pub measured: f64,
    pub threshold: f64,
    /// "<=", ">=", or "in" (threshold then encodes the midpoint; see lo/hi)
    pub cmp: &'static str,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl Verdict {
    pub fn le(name: &str, claim: &str, measured: f64, threshold: f64) -> Self {
        Verdict {
            name: name.into(),
            claim: claim.into(),
            measured,
            threshold,
            cmp: "<=",
            lo: None,
            hi: None,
            pass: measured <= threshold && measured.is_finite(),
        }
    }

    pub fn ge(name: &str, claim: &str, measured: f64, threshold: f64) -> Self {
        Verdict {
            name: name.into(),
            claim: claim.into(),
            measured,
            threshold,
            cmp: ">=",
            lo: None,
            hi: None,
            pass: measured >= threshold && measured.is_finite(),
        }
    }

    pub fn within(name: &str, claim: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Verdict {
            name: name.into(),
            claim: claim.into(),
            measured,
            threshold: 0.5 * (lo + hi),
            cmp: "in",
            lo: Some(lo),
            hi: Some(hi),
            pass: measured >= lo && measured <= hi && measured.is_finite(),
        }
    }
}

fn json_escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => "\\\"".chars().collect::<Vec<_>>(),
            '\\' => "\\\\".chars().collect(),
            '\n' => "\\n".chars().collect(),
            c => vec![c],
        })
        .collect()
}

/// One JSON object per line: name, claim, measured, threshold, pass.
pub fn write_verdicts_jsonl(path: &Path, verdicts: &[Verdict]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in verdicts {
        write_verdict_line(&mut w, v)?;
    }
    Ok(())
}

pub fn write_verdict_line<W: Write>(w: &mut W, v: &Verdict) -> Result<()> {
    let bounds = match (v.lo, v.hi) {
        (Some(lo), Some(hi)) => format!(",\"lo\":{},\"hi\":{}", fmt_f64(lo), fmt_f64(hi)),
        _ => String::new(),
    };
    writeln!(
        w,
        "{{\"name\":\"{}\",\"claim\":\"{}\",\"measured\":{},\"cmp\":\"{}\",\"threshold\":{}{},\"pass\":{}}}",
        json_escape(&v.name),
        json_escape(&v.claim),
        fmt_f64(v.measured),
        v.cmp,
        fmt_f64(v.threshold),
        bounds,
        v.pass
    )?;
    Ok(())
}

/// Sweep CSV with the seed recorded in a leading comment line.
pub fn write_sweep_csv(
    path: &Path,
    seed: u64,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# seed = {seed}")?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Cauchy-difference report: (T1, T2, energy_diff, critical_diff).
pub fn write_cauchy_csv(path: &Path, rows: &[(f64, f64, f64, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t1,t2,energy_diff,critical_diff")?;
    for (t1, t2, e, c) in rows {
        writeln!(w, "{},{},{},{}", fmt_f64(*t1), fmt_f64(*t2), fmt_f64(*e), fmt_f64(*c))?;
    }
    Ok(())
}

pub fn write_snapshot(path: &Path, state: &WaveState, grid: &GridSpec) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&(grid.n as u32).to_le_bytes())?;
    w.write_all(&grid.l.to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    w.write_all(&state.p.to_le_bytes())?;
    for field in [&state.phi, &state.pi] {
        for v in &field.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    drop(w);

    let manifest = path.with_extension("manifest.txt");
    let mut m = BufWriter::new(File::create(manifest)?);
    writeln!(m, "file = {}", path.file_name().unwrap_or_default().to_string_lossy())?;
    writeln!(m, "magic = W2D1")?;
    writeln!(m, "n = {}", grid.n)?;
    writeln!(m, "L = {}", fmt_f64(grid.l))?;
    writeln!(m, "t = {}", fmt_f64(state.t))?;
    writeln!(m, "p = {}", fmt_f64(state.p))?;
    writeln!(m, "layout = header(32 bytes) | phi(n*n f64 le, row-major) | pi(n*n f64 le, row-major)")?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(WaveState, GridSpec)> {
    let mut f = File::open(path)?;
    let mut header = [0u8; 32];
    f.read_exact(&mut header)?;
    if &header[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::config(format!("{}: bad snapshot magic", path.display())));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(header[8..16].try_into().unwrap());
    let t = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let p = f64::from_le_bytes(header[24..32].try_into().unwrap());
    let grid = GridSpec::new(l, n, Boundary::DirichletTruncation)?;
    let mut buf = vec![0u8; n * n * 8];
    let mut read_field = |f: &mut File| -> Result<Field> {
        f.read_exact(&mut buf)?;
        let data: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Field { n, data })
    };
    let phi = read_field(&mut f)?;
    let pi = read_field(&mut f)?;
    Ok((WaveState { t, phi, pi, p }, grid))
}
