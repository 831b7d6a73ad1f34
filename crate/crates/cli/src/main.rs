use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ecvm_core::harness::{self, output::real, Preset, RunManifest};
use ecvm_core::integrators::SchemeId;
use ecvm_core::Error;
use log::error;

#[derive(Parser)]
#[command(name = "ecvm", about = "Energy-conserving DG solver for 1D2V Vlasov-Maxwell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration and write diagnostics and snapshots to its out_dir.
    Run { config: PathBuf },
    /// Time-reversal accuracy study on N^3 meshes; writes convergence.csv.
    Accuracy {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        meshes: Vec<usize>,
    },
    /// List presets and schemes.
    Presets,
    /// Print the version.
    Version,
}

fn load(path: &PathBuf) -> Result<RunManifest, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    harness::parse_config(&text)
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run { config } => {
            let manifest = load(&config)?;
            let summary = harness::run_simulation(&manifest)?;
            println!(
                "{} steps to t = {}, {} records in {}",
                summary.steps,
                summary.final_time,
                summary.records,
                summary.out_dir.display()
            );
        }
        Command::Accuracy { config, meshes } => {
            let manifest = load(&config)?;
            let rows = harness::reversal_accuracy_study(&manifest, &meshes)?;
            let path = harness::write_convergence(&manifest.out_dir, &rows)?;
            println!("{:>6} {:>5} {:>24} {:>8}", "mesh", "field", "l2_error", "order");
            for r in &rows {
                let order = r.order.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
                println!("{:>6} {:>5} {:>24} {:>8}", r.mesh, r.field, real(r.l2_error), order);
            }
            println!("wrote {}", path.display());
        }
        Command::Presets => {
            for p in Preset::ALL {
                let w = p.params();
                println!(
                    "{:<12} {} (beta {}, b {}, delta {:.4}, v01 {}, v02 {}, k0 {})",
                    p.name(),
                    p.description(),
                    w.beta,
                    w.b,
                    w.delta,
                    w.v01,
                    w.v02,
                    w.k0
                );
            }
            let names: Vec<&str> = SchemeId::ALL.iter().map(|s| s.name()).collect();
            println!("schemes: {}", names.join(" "));
        }
        Command::Version => println!("ecvm {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_config_error() => {
            error!("{e}");
            ExitCode::from(1)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(2)
        }
    }
}
