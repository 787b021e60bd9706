//! Command-line flags layered over an optional config file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::config::{parse_bc, parse_precond, parse_side, Command, RunConfig};
use crate::CliError;

/// MAC Stokes operators, preconditioned GMRES and spectral checks.
#[derive(Debug, Parser)]
#[command(name = "mac-stokes", version)]
pub struct Cli {
    /// What to run.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// key=value file read before the flags are applied.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// dirichlet | periodic-x | periodic
    #[arg(long)]
    pub bc: Option<String>,
    /// Density; 0 selects steady flow.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// none | p1 | p1-exact | p2 | p3 | p4
    #[arg(long)]
    pub precond: Option<String>,
    /// left | right | auto
    #[arg(long)]
    pub side: Option<String>,
    /// Relative GMRES tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Write the assembled operators as MatrixMarket files.
    #[arg(long)]
    pub export_matrices: bool,
    /// Comma-separated ε² values for the unsteady spectra.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub eps2_list: Option<Vec<f64>>,
    /// Seed of the random probe and right-hand-side vectors.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Time steps per Taylor run.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Taylor: run every density with p1, p3 and p4.
    #[arg(long)]
    pub full_table: bool,
    /// Print the merged configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl Cli {
    /// Applies the flags that were given on top of `cfg`.
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(c) = self.command {
            cfg.command = Some(c);
        }
        macro_rules! copy {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        copy!(nx, ny, rho, mu, dt, tol, max_iters, output_dir, eps2_list, seed, steps);
        if let Some(b) = &self.bc {
            cfg.bc = parse_bc(b)?;
        }
        if let Some(p) = &self.precond {
            cfg.precond = parse_precond(p)?;
        }
        if let Some(s) = &self.side {
            cfg.side = parse_side(s)?;
        }
        cfg.export_matrices |= self.export_matrices;
        cfg.full_table |= self.full_table;
        Ok(())
    }
}

/// Parsed flags together with the merged configuration.
#[derive(Debug)]
pub struct Invocation {
    pub cli: Cli,
    pub config: RunConfig,
}

/// Parses `argv` (program name first), reads `--config` and applies the
/// flags. A missing command is a usage error unless `--print-config` is set.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    cli.apply(&mut config)?;
    if config.command.is_none() && !cli.print_config {
        return Err(CliError::Usage(
            "missing command (identities | spectrum | solve | taylor)".into(),
        ));
    }
    config.validate()?;
    Ok(Invocation { cli, config })
}
