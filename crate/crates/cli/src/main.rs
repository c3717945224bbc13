use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use kss_cli::{dispatch, exit_code_for, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successful terminations; anything
            // else is a usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = cli.into_config();
    let bytes = match dispatch(&config) {
        Ok(bytes) => bytes,
        Err(e) => {
            eprintln!("kss: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match &config.out_path {
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(&bytes) {
                eprintln!("kss: {e}");
                return ExitCode::from(1);
            }
        }
        Some(path) => {
            // Write-then-rename keeps the target either absent or complete.
            let tmp = path.with_extension("tmp");
            let res = std::fs::write(&tmp, &bytes).and_then(|()| std::fs::rename(&tmp, path));
            if let Err(e) = res {
                let _ = std::fs::remove_file(&tmp);
                eprintln!("kss: {e}");
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
