mod cache;
mod commands;
mod config;

use clap::Parser;
use config::InstanceConfig;
use std::path::PathBuf;
use std::process::ExitCode;

const CACHE_ENV: &str = "ANTICYCLO_CACHE_DIR";

/// Anticyclotomic Gross–Zagier sums on a definite quaternion algebra.
#[derive(Parser, Debug)]
#[command(name = "anticyclo", version)]
struct Args {
    /// validate, classgroup, tower, brandt, eigen, mu-nu, cmpoints, gzscan,
    /// trace-check, survey or table
    command: String,
    /// key = value instance file; the 11a / Q(√−67) / p = 3 instance if omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    /// λ-adic working precision
    #[arg(long)]
    precision: Option<u32>,
    /// search bound for μ and the hypothesis witnesses
    #[arg(long)]
    bound: Option<u64>,
}

fn load(args: &Args) -> Result<InstanceConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            InstanceConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => InstanceConfig::default(),
    };
    if let Some(k) = args.precision {
        cfg.precision = k;
    }
    if let Some(b) = args.bound {
        cfg.mu_search_bound = b;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(j) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let cache_dir = std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .or_else(|| cfg.cache_dir.clone())
        .unwrap_or_else(|| args.out.join(".cache"));
    match commands::run(&args.command, &cfg, &args.out, &cache_dir) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
