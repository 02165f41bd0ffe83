mod cli;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    let common = &args.common;
    let result = run::run(common, &args.command);
    let out = match result {
        Ok(out) => out,
        Err(f) => {
            eprintln!("invmetric {}: {f}", args.command.name());
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    if let Some(dir) = &common.out {
        let config = run::config_value(common, &args.command);
        if let Err(e) = output::emit(dir, args.command.name(), common.seed, &config, &out) {
            eprintln!("invmetric {}: cannot write {}: {e}", args.command.name(), dir.display());
            return ExitCode::from(2);
        }
    }
    if common.json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
    } else {
        println!("{}", out.text);
    }
    ExitCode::SUCCESS
}
