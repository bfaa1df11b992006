use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use vorstokes::config::{parse_config, parse_config_str, RunConfig};
use vorstokes::pipeline::{self, write_json};
use vorstokes::Result;

#[derive(Parser)]
#[command(name = "vorstokes", version, about = "Periodic traveling water waves with vorticity on deep water")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML run configuration; defaults to zero vorticity.
    #[arg(long, global = true, env = "VORSTOKES_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory; JSON goes to stdout when absent.
    #[arg(long, global = true, env = "VORSTOKES_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "VORSTOKES_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Seed of the random Jacobian test directions.
    #[arg(long, global = true, env = "VORSTOKES_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Flat-surface shear flow at a given λ.
    Trivial {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 101)]
        levels: usize,
    },
    /// Bifurcation point of the regularized problem.
    Bifurcate {
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Traces and verifies the nontrivial branch.
    Continue {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        step_size: Option<f64>,
        #[arg(long)]
        target_s: Option<f64>,
    },
    /// ε → 0 homotopy at a fixed branch coordinate.
    Homotopy {
        #[arg(long)]
        target_s: Option<f64>,
    },
    /// Verification report for a saved state.
    Verify {
        #[arg(long)]
        state: PathBuf,
    },
    /// Physical surface and flow field of a saved state.
    Reconstruct {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 60)]
        levels: usize,
    },
    /// Irrotational surface-angle equation.
    Nekrasov {
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Full pipeline over the ε schedule.
    Run,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(p),
        None => parse_config_str("[vorticity]\nkind = \"zero\"\n", std::env::vars()),
    }
}

fn emit<T: Serialize>(out: Option<&Path>, name: &str, value: &T) -> Result<()> {
    match out {
        Some(dir) => write_json(&dir.join(name), value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = load_config(cli.global.config.as_deref())?;
    let out = cli.global.out.as_deref();
    let seed = cli.global.seed;
    match cli.command {
        Command::Trivial { lambda, levels } => emit(out, "trivial.json", &pipeline::trivial(&cfg, lambda, levels)?)?,
        Command::Bifurcate { epsilon } => {
            emit(out, "bifurcation.json", &pipeline::bifurcate(&cfg, epsilon.unwrap_or(cfg.epsilon))?)?
        }
        Command::Continue { epsilon, steps, step_size, target_s } => {
            let eps = epsilon.unwrap_or(cfg.epsilon);
            if let Some(n) = steps {
                cfg.branch.steps = n;
            }
            if let Some(h) = step_size {
                cfg.seeds.step = h;
            }
            let run = pipeline::continue_and_verify_to(&cfg, eps, target_s, seed)?;
            match out {
                Some(dir) => {
                    pipeline::write_branch(dir, &run)?;
                }
                None => println!("{}", serde_json::to_string_pretty(&run.records)?),
            }
            return Ok(run.passed());
        }
        Command::Homotopy { target_s } => {
            if let Some(t) = target_s {
                cfg.branch.target_s = t;
            }
            let h = pipeline::homotopy(&cfg)?;
            emit(out, "homotopy.json", &h)?;
            return Ok(h.failure.is_none());
        }
        Command::Verify { state } => {
            let report = pipeline::verify(&cfg, &pipeline::read_state(&state)?)?;
            emit(out, "report.json", &report)?;
            return Ok(report.passed);
        }
        Command::Reconstruct { state, levels } => {
            let wave = pipeline::reconstruct_state(&cfg, &pipeline::read_state(&state)?)?;
            match out {
                Some(dir) => {
                    pipeline::write_reconstruction(dir, &wave, levels)?;
                    write_json(&dir.join("wave.json"), &wave)?;
                }
                None => println!("{}", serde_json::to_string_pretty(&wave)?),
            }
        }
        Command::Nekrasov { nu, n, tol } => {
            cfg.nekrasov.nu = nu.unwrap_or(cfg.nekrasov.nu);
            cfg.nekrasov.n = n.unwrap_or(cfg.nekrasov.n);
            cfg.nekrasov.tol = tol.unwrap_or(cfg.nekrasov.tol);
            cfg.validate()?;
            let r = pipeline::nekrasov(&cfg)?;
            emit(out, "nekrasov.json", &r)?;
            return Ok(r.bound_holds.unwrap_or(true));
        }
        Command::Run => {
            let dir = out.unwrap_or(Path::new("vorstokes-run"));
            let manifest = pipeline::run_pipeline(&cfg, dir, seed)?;
            eprintln!("wrote {} files to {}", manifest.files.len(), dir.display());
            return Ok(manifest.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
