use clap::{Args, Parser, Subcommand};
use fractal_dims_cli::cache::Cache;
use fractal_dims_cli::config::{apply_overrides, load};
use fractal_dims_cli::manifest::sha256_hex;
use fractal_dims_cli::{run, Command, RunOptions};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Complex dimensions, tube functions and heat content of self-similar sets.
#[derive(Parser)]
#[command(name = "fractal-dims", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Similarity dimensions and lattice structure of a ratio list.
    Dims(Common),
    /// Complex dimensions in a window, with residues.
    Poles(Common),
    /// Tube function of a snowflake, scaling equation and zeta identity.
    Tube(Common),
    /// Heat content by finite differences, with scaling and Monte Carlo checks.
    Heat(Common),
    /// Explicit formula against directly computed antiderivatives.
    Explicit(Common),
    /// Prefractal curves and snowflakes as SVG.
    Render(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; without one the config starts empty.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory [default: out/<command>-<hash>].
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Override a config entry: dotted.key=JSON (strings may be bare).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Ignore $FRACTAL_DIMS_CACHE for this run.
    #[arg(long)]
    no_cache: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::Dims(a) => (Command::Dims, a),
        Sub::Poles(a) => (Command::Poles, a),
        Sub::Tube(a) => (Command::Tube, a),
        Sub::Heat(a) => (Command::Heat, a),
        Sub::Explicit(a) => (Command::Explicit, a),
        Sub::Render(a) => (Command::Render, a),
    };
    match go(cmd, args) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn go(cmd: Command, args: Common) -> fractal_dims_cli::Result<bool> {
    let mut opts = RunOptions { out_dir: args.out, cache: if args.no_cache { None } else { Cache::from_env() }, ..Default::default() };
    let mut config: Value = match &args.config {
        Some(path) => {
            let (v, bytes) = load(path)?;
            opts.input_hashes.insert(path.display().to_string(), sha256_hex(&bytes));
            v
        }
        None => json!({}),
    };
    apply_overrides(&mut config, &args.overrides)?;
    let (manifest, dir) = run(cmd, config, &opts)?;
    println!("{}: {}{}", cmd.name(), dir.display(), if manifest.from_cache { " (cached)" } else { "" });
    for (name, pass) in &manifest.verdicts {
        println!("  {name}: {}", if *pass { "pass" } else { "FAIL" });
    }
    println!("{}", serde_json::to_string_pretty(&manifest.summary)?);
    Ok(manifest.all_pass())
}
