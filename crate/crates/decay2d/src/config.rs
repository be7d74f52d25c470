//! Strict run-configuration files.
//!
//! INI-style sections with `key = value` lines; `#` or `;` start comments.
//! Unknown sections or keys are fatal (a typo must not silently invalidate a
//! long run), missing required keys are fatal, and cone-guard violations are
//! surfaced at parse time when derivable. Schema:
//!
//! ```text
//! [grid]        L = 40.0        # box half-width          (required)
//!               n = 1025        # odd nodes per axis      (required)
//!               boundary = dirichlet | periodic           (default dirichlet)
//! [data]        p = 3.0         # nonlinearity exponent   (required)
//!               phi0.family = bump | gaussian | fourier | zero
//!               phi0.amplitude / phi0.radius / phi0.center = x y / phi0.mode = m1 m2
//!               phi1.…          # same keys for the velocity component
//! [scheme]      kind = leapfrog | conservative            (default leapfrog)
//!               cfl = 0.4                                 (default 0.4)
//!               nonlinearity = on | off                   (default on)
//!               t_final = 30.0                            (required)
//! [diagnostics] sample_dt = 0.25, profile_times = 0 1 2, snapshot_times = …,
//!               null_trace = on | off                     (default on)
//! [output]      dir = out, series = series.csv, profile = profile.csv,
//!               verdicts = verdicts.jsonl, snapshots = on | off
//! [oracle]      queries = pts.txt   # optional, for the kernel-oracle preset
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::data::{ComponentSpec, Family, InitialDataSpec};
use crate::error::{Error, Result};
use crate::grid::{Boundary, GridSpec};
use crate::solver::{RunConfig, SchemeKind};

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub series_name: String,
    pub profile_name: String,
    pub verdicts_name: String,
    pub write_snapshots: bool,
    /// optional query list for the kernel-oracle preset
    pub oracle_queries: Option<PathBuf>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: PathBuf::from("out"),
            series_name: "series.csv".into(),
            profile_name: "profile.csv".into(),
            verdicts_name: "verdicts.jsonl".into(),
            write_snapshots: false,
            oracle_queries: None,
        }
    }
}

pub fn parse_config(path: &Path) -> Result<(RunConfig, OutputSpec)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

struct Raw {
    // (section, key) -> (value, consumed)
    entries: BTreeMap<(String, String), (String, bool)>,
}

impl Raw {
    fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.entries.get_mut(&(section.to_string(), key.to_string())).map(|e| {
            e.1 = true;
            e.0.clone()
        })
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.take(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config(format!("{section}.{key}: expected a number, got {v:?}"))),
        }
    }

    fn usize(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.take(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::config(format!("{section}.{key}: expected an integer, got {v:?}"))),
        }
    }

    fn require_f64(&mut self, section: &str, key: &str) -> Result<f64> {
        self.f64(section, key)?
            .ok_or_else(|| Error::config(format!("missing required key {section}.{key}")))
    }

    fn on_off(&mut self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.take(section, key).as_deref() {
            None => Ok(default),
            Some("on") | Some("true") => Ok(true),
            Some("off") | Some("false") => Ok(false),
            Some(v) => Err(Error::config(format!("{section}.{key}: expected on/off, got {v:?}"))),
        }
    }

    fn f64_list(&mut self, section: &str, key: &str) -> Result<Vec<f64>> {
        match self.take(section, key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::config(format!("{section}.{key}: bad number {tok:?}"))
                    })
                })
                .collect(),
        }
    }
}

const KNOWN_SECTIONS: &[&str] = &["grid", "data", "scheme", "diagnostics", "output", "oracle"];

fn parse_raw(text: &str) -> Result<Raw> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find(['#', ';']) {
            Some(k) => &raw_line[..k],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !KNOWN_SECTIONS.contains(&name.as_str()) {
                return Err(Error::config(format!(
                    "line {}: unknown section [{name}]",
                    lineno + 1
                )));
            }
            section = name;
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!("line {}: expected key = value", lineno + 1)));
        };
        if section.is_empty() {
            return Err(Error::config(format!(
                "line {}: key before any [section]",
                lineno + 1
            )));
        }
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if entries
            .insert((section.clone(), key.clone()), (value, false))
            .is_some()
        {
            return Err(Error::config(format!("duplicate key {section}.{key}")));
        }
    }
    Ok(Raw { entries })
}

fn parse_component(raw: &mut Raw, which: &str, box_l: f64) -> Result<Option<ComponentSpec>> {
    let fam_key = format!("{which}.family");
    let family = raw.take("data", &fam_key);
    let amplitude = raw.f64("data", &format!("{which}.amplitude"))?;
    let radius = raw.f64("data", &format!("{which}.radius"))?;
    let center = raw.f64_list("data", &format!("{which}.center"))?;
    let mode = raw.f64_list("data", &format!("{which}.mode"))?;
    let family = match family.as_deref() {
        None | Some("zero") => {
            if amplitude.is_some() || radius.is_some() || !center.is_empty() || !mode.is_empty() {
                return Err(Error::config(format!(
                    "data.{which}.*: parameters given without a family"
                )));
            }
            return Ok(None);
        }
        Some("bump") | Some("smooth_bump") => Family::SmoothBump,
        Some("gaussian") => Family::Gaussian,
        Some("fourier") | Some("fourier_mode") => Family::FourierMode,
        Some(v) => {
            return Err(Error::config(format!("data.{fam_key}: unknown family {v:?}")))
        }
    };
    let center = match center.len() {
        0 => (0.0, 0.0),
        2 => (center[0], center[1]),
        k => {
            return Err(Error::config(format!(
                "data.{which}.center: expected two numbers, got {k}"
            )))
        }
    };
    let mode = match mode.len() {
        0 => (0, 0),
        2 => (mode[0] as i32, mode[1] as i32),
        k => {
            return Err(Error::config(format!(
                "data.{which}.mode: expected two integers, got {k}"
            )))
        }
    };
    let _ = box_l;
    Ok(Some(ComponentSpec {
        family,
        amplitude: amplitude.unwrap_or(1.0),
        radius: radius.unwrap_or(1.0),
        center,
        mode,
    }))
}

pub fn parse_config_str(text: &str) -> Result<(RunConfig, OutputSpec)> {
    let mut raw = parse_raw(text)?;

    let l = raw.require_f64("grid", "L")?;
    let n = raw
        .usize("grid", "n")?
        .ok_or_else(|| Error::config("missing required key grid.n"))?;
    let boundary = match raw.take("grid", "boundary").as_deref() {
        None | Some("dirichlet") | Some("dirichlet_truncation") => Boundary::DirichletTruncation,
        Some("periodic") => Boundary::Periodic,
        Some(v) => return Err(Error::config(format!("grid.boundary: unknown value {v:?}"))),
    };
    let grid = GridSpec::new(l, n, boundary)?;

    let p = raw.require_f64("data", "p")?;
    crate::params::PParam::new(p)?;
    let data = InitialDataSpec {
        phi0: parse_component(&mut raw, "phi0", l)?,
        phi1: parse_component(&mut raw, "phi1", l)?,
    };

    let scheme_kind = match raw.take("scheme", "kind").as_deref() {
        None | Some("leapfrog") | Some("explicit_leapfrog") => SchemeKind::ExplicitLeapfrog,
        Some("conservative") => SchemeKind::Conservative,
        Some(v) => return Err(Error::config(format!("scheme.kind: unknown value {v:?}"))),
    };
    let cfl = raw.f64("scheme", "cfl")?.unwrap_or(0.4);
    let nonlinear = raw.on_off("scheme", "nonlinearity", true)?;
    let t_final = raw.require_f64("scheme", "t_final")?;

    let sample_dt = raw.f64("diagnostics", "sample_dt")?.unwrap_or(0.25);
    let profile_times = raw.f64_list("diagnostics", "profile_times")?;
    let snapshot_times = raw.f64_list("diagnostics", "snapshot_times")?;
    let record_trace = raw.on_off("diagnostics", "null_trace", true)?;

    let mut out = OutputSpec::default();
    if let Some(dir) = raw.take("output", "dir") {
        out.dir = PathBuf::from(dir);
    }
    if let Some(v) = raw.take("output", "series") {
        out.series_name = v;
    }
    if let Some(v) = raw.take("output", "profile") {
        out.profile_name = v;
    }
    if let Some(v) = raw.take("output", "verdicts") {
        out.verdicts_name = v;
    }
    out.write_snapshots = raw.on_off("output", "snapshots", false)?;
    out.oracle_queries = raw.take("oracle", "queries").map(PathBuf::from);

    // strict mode: every key must have been consumed
    if let Some(((section, key), _)) = raw.entries.iter().find(|(_, (_, used))| !used) {
        return Err(Error::config(format!("unknown key {section}.{key}")));
    }

    let config = RunConfig {
        grid,
        data,
        p,
        scheme_kind,
        cfl,
        nonlinear,
        t_final,
        sample_dt,
        profile_times,
        snapshot_times,
        record_trace,
    };
    config.validate()?;
    Ok((config, out))
}
