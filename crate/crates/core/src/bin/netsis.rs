use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netsis::experiment::{
    graph_info, load_config, load_sweep_config, run_experiment, run_sweep, validate, Report,
};
use netsis::graphio::parse_edge_list;

#[derive(Parser)]
#[command(name = "netsis", version, about = "Networked SIS epidemic experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config up to the endemic equilibrium without simulating.
    Validate { config: PathBuf },
    /// Run one experiment and write its trajectory CSV and report JSON.
    Run { config: PathBuf },
    /// Run a parameter sweep.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Summarize an edge-list file.
    GraphInfo { edgelist: PathBuf },
}

fn print_error_report(code: String, message: String) -> ExitCode {
    let report = Report {
        errors: vec![netsis::experiment::ErrorEntry { code, message }],
        ..Report::default()
    };
    print!("{}", report.to_json());
    ExitCode::from(2)
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match load_config(&config) {
            Ok((cfg, base)) => {
                let report = validate(&cfg, &base);
                print!("{}", report.to_json());
                status(report.is_ok())
            }
            Err(e) => print_error_report(e.code(), e.to_string()),
        },
        Command::Run { config } => {
            let outcome = load_config(&config).and_then(|(cfg, base)| run_experiment(&cfg, &base));
            match outcome {
                Ok(o) => {
                    print!("{}", o.report_json());
                    status(o.is_ok())
                }
                Err(e) => print_error_report(e.code(), e.to_string()),
            }
        }
        Command::Sweep { config, workers } => {
            let outcome =
                load_sweep_config(&config).and_then(|(cfg, base)| run_sweep(&cfg, &base, workers));
            match outcome {
                Ok(o) => {
                    print!("{}", o.summary_csv);
                    status(o.reports.iter().all(Report::is_ok))
                }
                Err(e) => print_error_report(e.code(), e.to_string()),
            }
        }
        Command::GraphInfo { edgelist } => {
            let parsed = std::fs::read_to_string(&edgelist)
                .map_err(|e| ("io.Failed".to_string(), e.to_string()))
                .and_then(|t| {
                    parse_edge_list(&t)
                        .map_err(|e| (format!("graphio.{}", e.code()), e.to_string()))
                });
            match parsed {
                Ok(g) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&graph_info(&g)).expect("serializes")
                    );
                    ExitCode::SUCCESS
                }
                Err((code, message)) => print_error_report(code, message),
            }
        }
    }
}
