mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::Value;

use qlds::{tolerance, Tolerance};

use args::{Cli, Command};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_RESIDUAL: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qlds::Error),
    #[error("{0}")]
    Input(String),
}

fn configure_tolerance(flag: Option<f64>) -> Result<(), CliError> {
    let (source, value) = match flag {
        Some(v) => ("--tol", v),
        None => match std::env::var("QLDS_TOL") {
            Ok(s) => (
                "QLDS_TOL",
                s.trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("QLDS_TOL is not a number: {s:?}")))?,
            ),
            Err(_) => return Ok(()),
        },
    };
    let tol = Tolerance::default().with_zero_tol(value).ok_or_else(|| {
        CliError::Input(format!("{source} must be positive and finite, got {value}"))
    })?;
    let _ = tolerance::configure(tol);
    Ok(())
}

fn render(cli: &Cli, mut report: commands::Report) -> String {
    if cli.output.csv {
        return match report.table.take() {
            Some((header, rows)) => output::csv_table(&header, &rows),
            None => output::csv_key_value(&report.value),
        };
    }
    if let Value::Object(map) = &mut report.value {
        map.insert(
            "tolerance".into(),
            serde_json::to_value(tolerance::session()).expect("serializable"),
        );
        if !cli.output.no_timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("timestamp".into(), secs.into());
        }
    }
    let mut s = serde_json::to_string_pretty(&report.value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    configure_tolerance(cli.output.tol)?;
    let report = match &cli.command {
        Command::Chsh(a) => commands::chsh(a)?,
        Command::LatticeDemo => commands::lattice_demo()?,
        Command::Coherent(a) => commands::coherent(a)?,
        Command::Classify(a) => commands::classify(a)?,
        Command::DsTable1(a) => commands::ds_table1(a)?,
    };
    let failed = report.failed;
    let text = render(cli, report);
    match &cli.output.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(if failed {
        ExitCode::from(EXIT_RESIDUAL)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
