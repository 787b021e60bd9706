use std::process::ExitCode;

use mac_stokes_cli::{parse_args, run, CliError};

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2))
        }
        Err(e) => {
            eprintln!("mac-stokes: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `mac-stokes --help` for the list of flags");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn real_main() -> Result<u8, CliError> {
    let inv = parse_args(std::env::args_os())?;
    if inv.cli.print_config {
        print!("{}", inv.config.serialize());
        return Ok(0);
    }
    let summary = run(&inv.config)?;
    mac_stokes_cli::run::write_config(&inv.config, &inv.config.output_dir)?;
    for line in &summary.lines {
        println!("{line}");
    }
    Ok(if summary.ok { 0 } else { 1 })
}
