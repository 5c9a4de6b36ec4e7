use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ifs_core::cli::{execute, Format, RunConfig, CONFIG_ERROR_CODE, CSV_COLUMNS};
use ifs_core::numerics::MIN_PRECISION;
use ifs_core::Error;

fn columns_help() -> String {
    let mut s = String::from(
        "Exit status: 0 on success, 1 when a hypothesis check fails (details in the output), \
         2 on config errors.\n\nCSV columns per command (each row also ends with `arithmetic`):\n",
    );
    for (name, cols) in CSV_COLUMNS {
        s.push_str(&format!("  {name:<13} {}\n", cols.join(",")));
    }
    s
}

/// Run one attractor experiment described by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "ifs-lab", version, after_long_help = columns_help())]
struct Args {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Working precision in bits for systems with non-affine maps.
    #[arg(long, value_name = "BITS", value_parser = clap::value_parser!(u32).range(MIN_PRECISION as i64..))]
    precision: Option<u32>,
    /// Largest stage depth any command may build.
    #[arg(long, value_name = "N")]
    depth_cap: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn load(args: &Args) -> Result<RunConfig, Error> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(p) = args.precision {
        cfg.precision = p;
    }
    if let Some(d) = args.depth_cap {
        cfg.depth_cap = d;
    }
    if let Some(o) = &args.out {
        cfg.output.path = Some(o.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CONFIG_ERROR_CODE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = load(&args).and_then(|cfg| execute(&cfg));
    match result {
        Ok((status, text)) => {
            if let Some(t) = text {
                print!("{t}");
            }
            ExitCode::from(status.code() as u8)
        }
        Err(e) => {
            eprintln!("ifs-lab: {e}");
            ExitCode::from(CONFIG_ERROR_CODE as u8)
        }
    }
}
