//! CLI entry point:
//!
//!   decay2d <preset|simulate|all> [--config <path>] [--out <dir>] [--seed <u64>]
//!
//! `simulate` runs the configuration file and writes series/profile CSVs and
//! optional binary snapshots. A preset name runs that experiment with its
//! pinned thresholds, prints one PASS/FAIL line per check, writes a verdict
//! JSONL, and exits nonzero if any check fails. DECAY2D_THREADS caps the
//! worker count.

use std::path::PathBuf;
use std::process::ExitCode;

use decay2d::config::parse_config;
use decay2d::presets::{self, Lab, Preset};
use decay2d::report::{self, Verdict};

struct Args {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: u64,
}

fn usage() -> String {
    let presets: Vec<&str> = presets::ALL_PRESETS.iter().map(|p| p.name()).collect();
    format!(
        "usage: decay2d <preset|simulate|all> [--config <path>] [--out <dir>] [--seed <u64>]\n\
         presets: {}",
        presets.join(", ")
    )
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(usage)?;
    let mut args = Args { command, config: None, out: None, seed: 0 };
    while let Some(flag) = argv.next() {
        match flag.as_str() {
            "--config" => {
                args.config = Some(PathBuf::from(argv.next().ok_or("--config needs a path")?))
            }
            "--out" => args.out = Some(PathBuf::from(argv.next().ok_or("--out needs a dir")?)),
            "--seed" => {
                args.seed = argv
                    .next()
                    .ok_or("--seed needs a u64")?
                    .parse()
                    .map_err(|e| format!("bad seed: {e}"))?
            }
            other => return Err(format!("unknown flag {other}\n{}", usage())),
        }
    }
    Ok(args)
}

fn print_verdicts(preset: &str, verdicts: &[Verdict]) -> bool {
    let mut ok = true;
    for v in verdicts {
        let status = if v.pass { "PASS" } else { "FAIL" };
        let bound = match (v.lo, v.hi) {
            (Some(lo), Some(hi)) => format!("in [{lo:.3}, {hi:.3}]"),
            _ => format!("{} {:.6e}", v.cmp, v.threshold),
        };
        println!("[{status}] {preset} :: {} = {:.6e} ({bound})", v.name, v.measured);
        ok &= v.pass;
    }
    ok
}

fn simulate(config_path: &PathBuf, out_override: Option<PathBuf>) -> decay2d::Result<bool> {
    let (cfg, mut out_spec) = parse_config(config_path)?;
    if let Some(dir) = out_override {
        out_spec.dir = dir;
    }
    let output = decay2d::solver::run(&cfg)?;
    std::fs::create_dir_all(&out_spec.dir)?;
    report::write_series_csv(&out_spec.dir.join(&out_spec.series_name), &output.series)?;
    if !output.profiles.is_empty() {
        report::write_profile_csv(&out_spec.dir.join(&out_spec.profile_name), &output.profiles)?;
    }
    if out_spec.write_snapshots {
        for snap in &output.snapshots {
            let name = format!("snapshot_t{:.3}.w2d", snap.t);
            report::write_snapshot(&out_spec.dir.join(name), snap, &cfg.grid)?;
        }
    }
    println!(
        "simulated to t = {:.6} ({} records, dt = {:.6e}); e00 = {:.6e}",
        output.series.last().map(|r| r.t).unwrap_or(0.0),
        output.series.len(),
        output.dt,
        output.energies.e00,
    );
    Ok(true)
}

fn real_main() -> Result<bool, String> {
    let args = parse_args()?;

    #[cfg(feature = "parallel")]
    if let Ok(threads) = std::env::var("DECAY2D_THREADS") {
        let threads: usize = threads.parse().map_err(|e| format!("DECAY2D_THREADS: {e}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }

    match args.command.as_str() {
        "simulate" => {
            let config = args.config.ok_or("simulate needs --config <path>")?;
            simulate(&config, args.out).map_err(|e| e.to_string())
        }
        "all" => {
            let mut lab = Lab::new(args.seed);
            let out = presets::default_out_dir(args.out);
            let all = presets::run_all(&mut lab, Some(&out)).map_err(|e| e.to_string())?;
            let mut ok = true;
            for (name, verdicts) in &all {
                ok &= print_verdicts(name, verdicts);
            }
            Ok(ok)
        }
        name => {
            let preset = Preset::parse(name).ok_or_else(|| format!("unknown command {name}\n{}", usage()))?;
            let out = presets::default_out_dir(args.out);

            // with a config carrying [oracle] queries, the kernel-oracle
            // preset acts as a point-evaluation service instead
            if preset == Preset::KernelOracle {
                if let Some(cfg_path) = &args.config {
                    let (cfg, out_spec) = parse_config(cfg_path).map_err(|e| e.to_string())?;
                    if let Some(queries) = &out_spec.oracle_queries {
                        std::fs::create_dir_all(&out).map_err(|e| e.to_string())?;
                        let n = presets::oracle_from_query_file(
                            queries,
                            &out.join("oracle_values.csv"),
                            &cfg.data,
                            cfg.grid.l,
                        )
                        .map_err(|e| e.to_string())?;
                        println!("evaluated {n} oracle queries from {}", queries.display());
                        return Ok(true);
                    }
                }
            }

            let mut lab = Lab::new(args.seed);
            let verdicts = presets::run_preset(&mut lab, preset, Some(&out)).map_err(|e| e.to_string())?;
            Ok(print_verdicts(preset.name(), &verdicts))
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("decay2d: {msg}");
            ExitCode::from(2)
        }
    }
}
