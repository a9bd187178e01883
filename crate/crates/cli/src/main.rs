use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use numrange_cli::{parse_seed, render, run_command, Command, Format, KindArg, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "numrange", version, about = "Numerical ranges, numerical indices and tensor norms of finite-dimensional normed spaces")]
struct Args {
    /// Catalog file (JSON). Defaults to the shipped catalog.
    #[arg(long, env = "NUMRANGE_CATALOG")]
    catalog: Option<PathBuf>,
    #[arg(long, value_enum)]
    cmd: Command,
    /// Comma-separated catalog labels.
    #[arg(long, value_delimiter = ',')]
    target: Vec<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    /// Seed in hexadecimal.
    #[arg(long, value_parser = parse_seed, default_value = "5EED")]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Vector (norm) or functional (dual, slice), e.g. "1/2,-1" or "1+2i,0".
    #[arg(long, allow_hyphen_values = true)]
    vector: Option<String>,
    /// Slice depth for `slice`, delta for `vdelta`.
    #[arg(long)]
    delta: Option<f64>,
    /// Restrict `tensor-norm` to one norm.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

fn main() -> ExitCode {
    let a = Args::parse();
    let rc = RunConfig {
        catalog: a.catalog,
        command: a.cmd,
        targets: a.target,
        tol: a.tol,
        budget: a.budget,
        seed: a.seed,
        format: a.format,
        out: a.out,
        vector: a.vector,
        delta: a.delta,
        kind: a.kind,
    };
    match run_command(&rc) {
        Ok(o) => {
            let text = render(&o.report, rc.format);
            match &rc.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        eprintln!("numrange: cannot write {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("numrange: {e}");
            ExitCode::from(1)
        }
    }
}
