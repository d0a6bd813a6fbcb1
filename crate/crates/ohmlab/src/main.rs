use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ohmlab::config::parse_config;
use ohmlab::pipeline::{self, all_pass, close_stages, parse_stages, Format, ResultBundle, Stage};

#[derive(Parser, Debug)]
#[command(name = "ohmlab", version, about = "Linear response and Joule heating for disordered lattice fermions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Hamiltonian and Fermi symbol summaries
    Equilibrium(Args),
    /// Paramagnetic transport kernel on the time grid
    Transport(Args),
    /// Conductivity measure atoms
    Measure(Args),
    /// Driven runs over the eta ladder
    Drive(Args),
    /// Ohm/Joule scaling report
    Joule(Args),
    /// Full identity suite
    Verify(Args),
    /// Run the stages for every seed of the config
    Sweep(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 gives the bitwise-deterministic serial mode
    #[arg(long)]
    threads: Option<usize>,
    /// Comma-separated stage list, taken literally (dependencies are not added)
    #[arg(long)]
    stages: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn print_verify(b: &ResultBundle) -> bool {
    let Some(report) = &b.verify else { return true };
    for (name, c) in report {
        println!("{:<4} {name:<40} residual {:.3e}  tolerance {:.3e}", if c.pass { "ok" } else { "FAIL" }, c.residual, c.tolerance);
    }
    all_pass(report)
}

fn run(cli: Cli) -> ohmlab::Result<bool> {
    let (args, default_stages, is_sweep) = match &cli.cmd {
        Cmd::Equilibrium(a) => (a, vec![Stage::Equilibrium], false),
        Cmd::Transport(a) => (a, vec![Stage::Transport], false),
        Cmd::Measure(a) => (a, vec![Stage::Measure], false),
        Cmd::Drive(a) => (a, vec![Stage::Drive], false),
        Cmd::Joule(a) => (a, vec![Stage::Joule], false),
        Cmd::Verify(a) => (a, vec![Stage::Verify], false),
        Cmd::Sweep(a) => (a, pipeline::ALL_STAGES.to_vec(), true),
    };
    let stages = match &args.stages {
        Some(list) => parse_stages(list)?,
        None => close_stages(&default_stages),
    };
    if let Some(n) = args.threads {
        // only fails if a global pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let mut cfg = parse_config(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    let dir = cfg.output.clone();
    let format = Format::from(args.format);

    let bundles = if is_sweep { pipeline::sweep(&cfg, &stages)? } else { vec![pipeline::run_pipeline(&cfg, &stages)?] };
    let files = if is_sweep { pipeline::export_sweep(&bundles, &dir, format)? } else { pipeline::export(&bundles[0], &dir, format)? };

    let mut ok = true;
    for b in &bundles {
        if is_sweep {
            println!("seed {}", b.seed);
        }
        ok &= print_verify(b);
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
