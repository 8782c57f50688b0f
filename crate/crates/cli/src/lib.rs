//! Command-line front end: CSV and PGM ingestion, experiment drivers and
//! report writers.

pub mod args;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod frames;
pub mod pgm;

pub use args::Cli;
pub use error::{CliError, CliResult};

use args::Command;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Regress(args) => {
            let sols = commands::regress::run(&args)?;
            for s in &sols {
                println!(
                    "{:<7} x = {:?}  outliers = {:?}  iterations = {}",
                    s.method, s.x, s.support, s.iterations
                );
            }
            println!("wrote {}", args.output.out.join("solution.json").display());
        }
        Command::Simulate(args) => {
            let rows = commands::simulate::run(&args)?;
            for r in &rows {
                println!(
                    "{} N={} seed={} DR={:.4} Pre={:.4} F={:.4} iterations={}",
                    r.method, r.n, r.seed, r.dr, r.pre, r.f, r.iterations
                );
            }
            println!("wrote {}", args.output.out.join("report.csv").display());
        }
        Command::Bgmodel(args) => {
            let rep = commands::bgmodel::run(&args)?;
            println!(
                "{} frames of {}x{}, rank {}, {} iterations",
                rep.frames, rep.width, rep.height, rep.rank, rep.iterations
            );
            println!("wrote {}", args.output.out.display());
        }
        Command::Version(args) => {
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string(&commands::version::info()).expect("plain data serializes")
                );
            } else {
                println!("loire {}", env!("CARGO_PKG_VERSION"));
            }
        }
    }
    Ok(())
}
