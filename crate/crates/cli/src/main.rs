//! `stability-lab`: run and validate stability-laboratory experiments.
//!
//! ```text
//! stability-lab run <config> [--out DIR] [--workers N] [--seed S]
//! stability-lab validate <config>
//! ```
//!
//! Exit codes: 0 success, 2 config error, 3 run error. The environment
//! variables `STABILITY_LAB_OUT` and `STABILITY_LAB_WORKERS` override the
//! config; command-line flags override both.

use stability_lab::config::validate_config;
use stability_lab::experiments::{run_config, RunError};
use stability_lab::output::emit;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "usage:
  stability-lab run <config> [--out DIR] [--workers N] [--seed S]
  stability-lab validate <config>";

struct RunArgs {
    config_path: String,
    out: Option<String>,
    workers: Option<usize>,
    seed: Option<u64>,
}

fn parse_run_args(args: &[String]) -> Result<RunArgs, String> {
    let mut out = None;
    let mut workers = None;
    let mut seed = None;
    let mut config_path = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--out" => {
                out = Some(it.next().ok_or("--out needs a value")?.clone());
            }
            "--workers" => {
                let v = it.next().ok_or("--workers needs a value")?;
                workers = Some(v.parse().map_err(|_| format!("--workers: `{v}` is not an integer"))?);
            }
            "--seed" => {
                let v = it.next().ok_or("--seed needs a value")?;
                seed = Some(v.parse().map_err(|_| format!("--seed: `{v}` is not an unsigned integer"))?);
            }
            other if config_path.is_none() && !other.starts_with('-') => {
                config_path = Some(other.to_string());
            }
            other => return Err(format!("unexpected argument `{other}`")),
        }
    }
    Ok(RunArgs {
        config_path: config_path.ok_or("missing <config> path")?,
        out,
        workers,
        seed,
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return ExitCode::from(2);
    };
    match command.as_str() {
        "validate" => {
            let Some(path) = args.get(1) else {
                eprintln!("{USAGE}");
                return ExitCode::from(2);
            };
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("config error: cannot read `{path}`: {e}");
                    return ExitCode::from(2);
                }
            };
            match validate_config(&text) {
                Ok(cfg) => {
                    print!("{}", cfg.canonical());
                    println!("config_hash = {}", cfg.config_hash());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
        "run" => {
            let parsed = match parse_run_args(&args[1..]) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}\n{USAGE}");
                    return ExitCode::from(2);
                }
            };
            let text = match std::fs::read_to_string(&parsed.config_path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("config error: cannot read `{}`: {e}", parsed.config_path);
                    return ExitCode::from(2);
                }
            };
            let mut cfg = match validate_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            // Priority: flag > environment > config.
            if let Ok(dir) = std::env::var("STABILITY_LAB_OUT") {
                cfg.out = dir;
            }
            if let Some(dir) = parsed.out {
                cfg.out = dir;
            }
            let mut workers = 0usize;
            if let Ok(w) = std::env::var("STABILITY_LAB_WORKERS") {
                match w.parse() {
                    Ok(v) => workers = v,
                    Err(_) => {
                        eprintln!("config error: STABILITY_LAB_WORKERS=`{w}` is not an integer");
                        return ExitCode::from(2);
                    }
                }
            }
            if let Some(w) = parsed.workers {
                workers = w;
            }
            if let Some(seed) = parsed.seed {
                cfg.master_seed = seed;
            }
            match run_config(&cfg, workers) {
                Ok(outcome) => {
                    let out_dir = PathBuf::from(&cfg.out);
                    if let Err(e) = emit(&out_dir, &outcome.rows, &outcome.summary) {
                        eprintln!("run error: cannot write outputs: {e}");
                        return ExitCode::from(3);
                    }
                    println!(
                        "{}: {} rows ({} invalid trials) -> {}",
                        outcome.summary.experiment,
                        outcome.summary.rows,
                        outcome.summary.invalid_trials,
                        out_dir.display()
                    );
                    for entry in &outcome.summary.spearman {
                        println!("spearman[{}] = {:.4}", entry.metric, entry.value);
                    }
                    if let Some(c) = &outcome.summary.containment {
                        println!(
                            "containment[{}] = {}/{} ({:.1}%) at bound {:.6}",
                            c.bound,
                            c.contained,
                            c.trials,
                            100.0 * c.fraction,
                            c.bound_value
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(RunError::ConfigDomain(m)) => {
                    eprintln!("config error: {m}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(3)
                }
            }
        }
        other => {
            eprintln!("unknown command `{other}`\n{USAGE}");
            ExitCode::from(2)
        }
    }
}
