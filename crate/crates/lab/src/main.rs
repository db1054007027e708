use std::process::ExitCode;
use std::time::Instant;

use spdelab::cli::{self, ParseFailure};
use spdelab::error::LabError;
use spdelab::io::{write_json, OutDir};
use spdelab::manifest::{diagnostic, Manifest};
use spdelab::{commands, runner::Runner};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match cli::parse(argv) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(ParseFailure::Clap(e)) => {
            let _ = e.print();
            let err = LabError::Config(e.kind().to_string());
            eprintln!("{}", diagnostic("parse", &err));
            return ExitCode::from(1);
        }
        Err(ParseFailure::Config(err)) => {
            eprintln!("error: {err}");
            eprintln!("{}", diagnostic("parse", &err));
            return ExitCode::from(1);
        }
    };
    let name = cli.command.name();
    let started = Instant::now();
    let result = (|| {
        let runner = Runner::from_settings(cli.threads)?;
        let mut out = OutDir::create(cli.command.out())?;
        let summary = commands::run(&cli.command, &runner, &mut out);
        let echo = cli::config_echo(&cli);
        std::fs::write(out.path().join("config.toml"), &echo).map_err(|e| LabError::io(out.path(), e))?;
        let manifest = Manifest {
            command: name.to_string(),
            config: serde_json::to_value(&cli.command).expect("arguments serialize"),
            seed: cli.command.seed(),
            threads: runner.threads(),
            artifacts: out.artifacts().to_vec(),
            wall_time: started.elapsed(),
        };
        manifest.write(out.path())?;
        summary.map(|_| ())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let diag = diagnostic(name, &err);
            if write_json(&cli.command.out().join("diagnostic.json"), &diag).is_err() {
                eprintln!("{diag}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
