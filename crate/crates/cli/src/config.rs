//! Run configuration and its flat `key=value` file format.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use mac_stokes::{BoundaryKind, PrecondKind, Side};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Identities,
    Spectrum,
    Solve,
    Taylor,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Spectrum => "spectrum",
            Command::Solve => "solve",
            Command::Taylor => "taylor",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Command::Identities,
            Command::Spectrum,
            Command::Solve,
            Command::Taylor,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub nx: usize,
    pub ny: usize,
    pub bc: BoundaryKind,
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
    pub precond: PrecondKind,
    /// `None` picks the preconditioner's default side.
    pub side: Option<Side>,
    pub tol: f64,
    pub max_iters: usize,
    pub output_dir: PathBuf,
    pub export_matrices: bool,
    pub eps2_list: Vec<f64>,
    pub seed: u64,
    /// Time steps per Taylor run.
    pub steps: usize,
    /// Run every density and preconditioner of the iteration table.
    pub full_table: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            nx: 64,
            ny: 64,
            bc: BoundaryKind::DirichletAll,
            rho: 1.0,
            mu: 1.0,
            dt: 0.5,
            precond: PrecondKind::P1,
            side: None,
            tol: 1e-10,
            max_iters: 500,
            output_dir: PathBuf::from("out"),
            export_matrices: false,
            eps2_list: Vec::new(),
            seed: 0,
            steps: 3,
            full_table: false,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "command",
    "nx",
    "ny",
    "bc",
    "rho",
    "mu",
    "dt",
    "precond",
    "side",
    "tol",
    "max_iters",
    "output_dir",
    "export_matrices",
    "eps2_list",
    "seed",
    "steps",
    "full_table",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value for {key}: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "invalid value for {key}: {value:?} (true|false)"
        ))),
    }
}

pub fn parse_bc(value: &str) -> Result<BoundaryKind, CliError> {
    BoundaryKind::from_name(value).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown bc {value:?} (dirichlet|periodic-x|periodic)"
        ))
    })
}

pub fn parse_precond(value: &str) -> Result<PrecondKind, CliError> {
    PrecondKind::from_name(value).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown precond {value:?} (none|p1|p1-exact|p2|p3|p4)"
        ))
    })
}

pub fn parse_side(value: &str) -> Result<Option<Side>, CliError> {
    if value == "auto" {
        return Ok(None);
    }
    Side::from_name(value)
        .map(Some)
        .ok_or_else(|| CliError::Usage(format!("unknown side {value:?} (left|right|auto)")))
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "command" => {
                self.command = Some(
                    Command::from_name(value)
                        .ok_or_else(|| CliError::Usage(format!("unknown command {value:?}")))?,
                )
            }
            "nx" => self.nx = parse_num(key, value)?,
            "ny" => self.ny = parse_num(key, value)?,
            "bc" => self.bc = parse_bc(value)?,
            "rho" => self.rho = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "dt" => self.dt = parse_num(key, value)?,
            "precond" => self.precond = parse_precond(value)?,
            "side" => self.side = parse_side(value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "max_iters" => self.max_iters = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "export_matrices" => self.export_matrices = parse_bool(key, value)?,
            "eps2_list" => {
                self.eps2_list = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|v| parse_num(key, v.trim()))
                        .collect::<Result<_, _>>()?
                }
            }
            "seed" => self.seed = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "full_table" => self.full_table = parse_bool(key, value)?,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown config key {key:?} (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parses a config file on top of the defaults. Blank lines and lines
    /// starting with `#` are skipped; repeated keys are rejected.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::Usage(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
            seen.push(key);
            cfg.set(key, value.trim())
                .map_err(|e| CliError::Usage(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    /// Canonical text form; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        if let Some(c) = self.command {
            put("command", c.name().into());
        }
        put("nx", self.nx.to_string());
        put("ny", self.ny.to_string());
        put("bc", self.bc.name().into());
        put("rho", self.rho.to_string());
        put("mu", self.mu.to_string());
        put("dt", self.dt.to_string());
        put("precond", self.precond.name().into());
        put("side", self.side.map_or("auto", Side::name).into());
        put("tol", self.tol.to_string());
        put("max_iters", self.max_iters.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("export_matrices", self.export_matrices.to_string());
        put(
            "eps2_list",
            self.eps2_list
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        put("seed", self.seed.to_string());
        put("steps", self.steps.to_string());
        put("full_table", self.full_table.to_string());
        out
    }

    pub fn effective_side(&self) -> Side {
        self.side.unwrap_or_else(|| self.precond.default_side())
    }

    /// Range checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.nx < 2 || self.ny < 2 {
            return Err(CliError::Usage("nx and ny must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("tol must be positive".into()));
        }
        if self.max_iters == 0 || self.steps == 0 {
            return Err(CliError::Usage(
                "max_iters and steps must be at least 1".into(),
            ));
        }
        if self.eps2_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Usage("eps2_list entries must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = c.serialize();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
        assert_eq!(text.lines().count(), KEYS.len() - 1);
    }

    #[test]
    fn comments_and_aliases() {
        let c = RunConfig::parse(
            "# comment\n\ncommand = taylor\nbc=x-periodic\nside=right\neps2_list=0.001, 10\n",
        )
        .unwrap();
        assert_eq!(c.command, Some(Command::Taylor));
        assert_eq!(c.bc, BoundaryKind::PeriodicXDirichletY);
        assert_eq!(c.side, Some(Side::Right));
        assert_eq!(c.eps2_list, vec![1e-3, 10.0]);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "colour=red",
            "nx=ten",
            "nx=4\nnx=5",
            "just words",
            "bc=neumann",
            "export_matrices=yes",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(CliError::Usage(_))),
                "{text}"
            );
        }
    }
}
