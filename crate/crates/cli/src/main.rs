mod build;
mod config;
mod output;
mod report;
mod tables;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, Format};

/// Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration.
fn run(cli: &Cli) -> anyhow::Result<bool> {
    let opts = &cli.opts;
    let out = opts.out.as_deref();
    match cli.command {
        Command::Verify => {
            let b = build::build_state(opts, opts.single_hbar()?)?;
            let r = verify::run(&b, opts.seed);
            for c in r.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: margin {:e}", c.name, c.margin);
            }
            let doc = serde_json::to_value(&r)?;
            output::write(&output::render_document(&doc, opts.format_or(Format::Json)), out)?;
            Ok(r.pass)
        }
        Command::Report => {
            let b = build::build_state(opts, opts.single_hbar()?)?;
            let doc = report::report(&b)?;
            output::write(&output::render_document(&doc, opts.format_or(Format::Json)), out)?;
            Ok(true)
        }
        Command::Figure1 => {
            let t = tables::figure1_table(opts)?;
            output::write(&t.render(opts.format_or(Format::Csv)), out)?;
            Ok(true)
        }
        Command::Figure2 => {
            let t = tables::figure2_table(opts)?;
            output::write(&t.render(opts.format_or(Format::Csv)), out)?;
            Ok(true)
        }
        Command::Sweep => {
            let t = tables::sweep_table(opts)?;
            output::write(&t.render(opts.format_or(Format::Csv)), out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
