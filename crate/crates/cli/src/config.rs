//! Command-line flags merged with an optional `key = value` file.
//!
//! Keys in the file are the long flag names (`omega-q` or `omega_q`). Flags
//! given on the command line win over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use quasilattice::{CavitySpec, HalfInt, LatticeSpec};

use crate::error::{CliError, CliResult};

pub const DEFAULT_N: usize = 4;
pub const DEFAULT_ELL: f64 = 2.0 / 3.0;
pub const DEFAULT_OMEGA_C: f64 = 6.729;
pub const DEFAULT_ETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    ChiSweep,
    DecaySweep,
    Dynamics,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    Ell,
    OmegaQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LSum {
    Collapsed,
    PerL,
}

#[derive(Debug, Parser)]
#[command(name = "qlattice", version, about = "Polariton spectra, selective radiation and decay of qubit quasi-lattices")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// key = value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Number of qubits
    #[arg(long)]
    pub n: Option<usize>,
    /// Relative spacing 2 L_q / lambda_C
    #[arg(long)]
    pub ell: Option<f64>,
    /// Qubit frequency (GHz); defaults to the cavity frequency
    #[arg(long)]
    pub omega_q: Option<f64>,
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// Maximal qubit-cavity coupling (GHz)
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to the machine's parallelism
    #[arg(long)]
    pub threads: Option<usize>,
    /// Branch of the first excited sector
    #[arg(long)]
    pub branch: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Highest excitation sector in the spectrum, e.g. 2 or -3/2
    #[arg(long, allow_hyphen_values = true)]
    pub u_max: Option<String>,

    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_points: Option<usize>,

    #[arg(long, value_enum)]
    pub axis: Option<SweepAxis>,
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Emit rows for both first-excited branches
    #[arg(long)]
    pub both_branches: bool,
    /// Dipole moment for the physical rate prefactor
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub epsilon_d: Option<f64>,
    /// Resonator cross-section
    #[arg(long)]
    pub area: Option<f64>,
    /// Mode volume for a physical bath
    #[arg(long)]
    pub volume: Option<f64>,

    /// Golden-rule rate per unit |s|^2 of the flat bath (1/ns)
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Record every stride-th step
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub fit_start: Option<f64>,
    #[arg(long)]
    pub fit_end: Option<f64>,
    #[arg(long, value_enum)]
    pub l_sum: Option<LSum>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub ell: f64,
    pub omega_q: f64,
    pub omega_c: f64,
    pub eta: f64,
}

impl ModelParams {
    pub fn lattice(&self) -> CliResult<LatticeSpec> {
        Ok(LatticeSpec::new(self.n, self.ell, self.omega_q)?)
    }

    pub fn cavity(&self) -> CliResult<CavitySpec> {
        Ok(CavitySpec::new(self.omega_c, self.eta)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> CliResult<Self> {
        if points < 2 {
            return Err(CliError::Args(format!("grid needs at least 2 points, got {points}")));
        }
        if !(min < max) {
            return Err(CliError::Args(format!("grid range [{min}, {max}] is not increasing")));
        }
        Ok(Grid { min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.max } else { self.min + i as f64 * step }).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prefactor {
    pub mu: f64,
    pub epsilon_d: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsParams {
    pub kappa: f64,
    pub bandwidth: f64,
    pub modes: usize,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub fit_start: f64,
    pub fit_end: f64,
    pub l_sum: LSum,
    /// mu, epsilon_d, volume for a physical bath.
    pub physical: Option<(f64, f64, f64)>,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub command: Command,
    pub model: ModelParams,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub branch: usize,
    pub seed: u64,
    pub u_max: Option<HalfInt>,
    /// Momentum grid (0, k_max] for chi sweeps.
    pub k_max: f64,
    pub k_points: usize,
    pub axis: SweepAxis,
    pub grid: Grid,
    pub both_branches: bool,
    pub prefactor: Option<Prefactor>,
    pub dynamics: DynamicsParams,
}

/// Reads a flat TOML table of flag names; `_` and `-` are interchangeable.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let table: toml::Table = text.parse().map_err(|e| CliError::Args(format!("config: {e}")))?;
    table
        .into_iter()
        .map(|(key, value)| {
            let value = match value {
                toml::Value::String(s) => s,
                toml::Value::Integer(_) | toml::Value::Float(_) | toml::Value::Boolean(_) => value.to_string(),
                other => return Err(CliError::Args(format!("config key `{key}`: unsupported value {other}"))),
            };
            Ok((key.replace('_', "-"), value))
        })
        .collect()
}

struct Merge<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Merge<'_> {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| CliError::Args(format!("config key `{key}` = `{v}`: {e}"))),
        }
    }

    fn enumerated<T: ValueEnum>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => T::from_str(v, true).map(Some).map_err(|e| CliError::Args(format!("config key `{key}`: {e}"))),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "n",
    "ell",
    "omega-q",
    "omega-c",
    "eta",
    "out",
    "format",
    "threads",
    "branch",
    "seed",
    "u-max",
    "k-max",
    "k-points",
    "axis",
    "min",
    "max",
    "points",
    "both-branches",
    "mu",
    "epsilon-d",
    "area",
    "volume",
    "kappa",
    "bandwidth",
    "modes",
    "dt",
    "t-final",
    "stride",
    "fit-start",
    "fit-end",
    "l-sum",
];

/// Parses `2`, `-1`, `3/2` or `-3/2` into a half-integer.
pub fn parse_half_int(s: &str) -> CliResult<HalfInt> {
    let bad = || CliError::Args(format!("`{s}` is not an integer or half-integer"));
    match s.trim().split_once('/') {
        Some((num, "2")) => {
            let twice: i64 = num.trim().parse().map_err(|_| bad())?;
            Ok(HalfInt::from_twice(twice))
        }
        Some(_) => Err(bad()),
        None => s.trim().parse::<i64>().map(HalfInt::from_int).map_err(|_| bad()),
    }
}

impl SweepConfig {
    pub fn resolve(cli: Cli) -> CliResult<Self> {
        let file = match &cli.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        if let Some(k) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Args(format!("unknown config key `{k}`")));
        }
        let m = Merge { file: &file };
        let command = cli.command;

        let omega_c = m.get(cli.omega_c, "omega-c")?.unwrap_or(DEFAULT_OMEGA_C);
        let model = ModelParams {
            n: m.get(cli.n, "n")?.unwrap_or(DEFAULT_N),
            ell: m.get(cli.ell, "ell")?.unwrap_or(DEFAULT_ELL),
            omega_q: m.get(cli.omega_q, "omega-q")?.unwrap_or(omega_c),
            omega_c,
            eta: m.get(cli.eta, "eta")?.unwrap_or(DEFAULT_ETA),
        };

        let (default_out, default_format) = match command {
            Command::Spectrum => ("spectrum.json", Format::Json),
            Command::ChiSweep => ("chi_sweep.csv", Format::Csv),
            Command::DecaySweep => ("decay_sweep.csv", Format::Csv),
            Command::Dynamics => ("dynamics.csv", Format::Csv),
            Command::Validate => ("validate.json", Format::Json),
        };
        let out = m.get(cli.out.map(|p| p.to_string_lossy().into_owned()), "out")?.map(PathBuf::from).unwrap_or_else(|| default_out.into());
        let format = m.enumerated(cli.format, "format")?.unwrap_or(default_format);
        if matches!(command, Command::Spectrum | Command::Validate) && format != Format::Json {
            return Err(CliError::Args("spectrum and validate write JSON only".into()));
        }

        let threads = m.get(cli.threads, "threads")?;
        if threads == Some(0) {
            return Err(CliError::Args("--threads must be at least 1".into()));
        }
        let u_max = m.get(cli.u_max, "u-max")?.map(|s| parse_half_int(&s)).transpose()?;

        let axis = m.enumerated(cli.axis, "axis")?.unwrap_or(SweepAxis::Ell);
        let (dmin, dmax, dpoints) = match axis {
            SweepAxis::Ell => (0.0, 1.0, 101),
            SweepAxis::OmegaQ => (0.5, 41.0, 401),
        };
        let grid = Grid::new(
            m.get(cli.min, "min")?.unwrap_or(dmin),
            m.get(cli.max, "max")?.unwrap_or(dmax),
            m.get(cli.points, "points")?.unwrap_or(dpoints),
        )?;

        let both_branches = cli.both_branches || m.get(None, "both-branches")?.unwrap_or(false);
        let mu = m.get(cli.mu, "mu")?;
        let epsilon_d = m.get(cli.epsilon_d, "epsilon-d")?;
        let area = m.get(cli.area, "area")?;
        let volume = m.get(cli.volume, "volume")?;
        let prefactor = match (mu, epsilon_d, area) {
            (Some(mu), Some(epsilon_d), Some(area)) => Some(Prefactor { mu, epsilon_d, area }),
            (None, _, None) => None,
            _ if command == Command::DecaySweep => return Err(CliError::Args("--mu, --epsilon-d and --area go together".into())),
            _ => None,
        };
        let physical = match (command, mu, epsilon_d, volume) {
            (Command::Dynamics, Some(mu), Some(eps), Some(v)) => Some((mu, eps, v)),
            (Command::Dynamics, _, _, Some(_)) => return Err(CliError::Args("a physical bath needs --mu, --epsilon-d and --volume".into())),
            _ => None,
        };

        let t_final = m.get(cli.t_final, "t-final")?.unwrap_or(200.0);
        let dynamics = DynamicsParams {
            kappa: m.get(cli.kappa, "kappa")?.unwrap_or(0.01),
            bandwidth: m.get(cli.bandwidth, "bandwidth")?.unwrap_or(2.0),
            modes: m.get(cli.modes, "modes")?.unwrap_or(801),
            dt: m.get(cli.dt, "dt")?.unwrap_or(0.05),
            t_final,
            stride: m.get(cli.stride, "stride")?.unwrap_or(20),
            fit_start: m.get(cli.fit_start, "fit-start")?.unwrap_or(0.1 * t_final),
            fit_end: m.get(cli.fit_end, "fit-end")?.unwrap_or(t_final),
            l_sum: m.enumerated(cli.l_sum, "l-sum")?.unwrap_or(LSum::Collapsed),
            physical,
        };
        if !(dynamics.kappa >= 0.0) {
            return Err(CliError::Args("--kappa must be nonnegative".into()));
        }

        let k_points = m.get(cli.k_points, "k-points")?.unwrap_or(3000);
        if k_points < 2 {
            return Err(CliError::Args("--k-points must be at least 2".into()));
        }
        let k_max = m.get(cli.k_max, "k-max")?.unwrap_or(30.0);
        if !(k_max > 0.0) {
            return Err(CliError::Args("--k-max must be positive".into()));
        }

        Ok(SweepConfig {
            command,
            model,
            out,
            format,
            threads,
            branch: m.get(cli.branch, "branch")?.unwrap_or(0),
            seed: m.get(cli.seed, "seed")?.unwrap_or(2024),
            u_max,
            k_max,
            k_points,
            axis,
            grid,
            both_branches,
            prefactor,
            dynamics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<SweepConfig> {
        let mut full = vec!["qlattice"];
        full.extend_from_slice(args);
        SweepConfig::resolve(Cli::try_parse_from(full).map_err(|e| CliError::Args(e.to_string()))?)
    }

    #[test]
    fn defaults_reproduce_the_worked_example() {
        let c = parse(&["chi-sweep"]).unwrap();
        assert_eq!(c.model, ModelParams { n: 4, ell: 2.0 / 3.0, omega_q: 6.729, omega_c: 6.729, eta: 0.1 });
        assert_eq!(c.k_points, 3000);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "# sweep\nn = 6\nomega_q = 5.5\neta=0.2\n").unwrap();
        let c = parse(&["spectrum", "--config", path.to_str().unwrap(), "--n", "3"]).unwrap();
        assert_eq!(c.model.n, 3);
        assert_eq!(c.model.omega_q, 5.5);
        assert_eq!(c.model.eta, 0.2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_text("n 4").is_err());
        assert!(parse_config_text("n = [4]").is_err());
        assert!(parse(&["decay-sweep", "--points", "1"]).is_err());
        assert!(parse(&["decay-sweep", "--min", "0.8", "--max", "0.2"]).is_err());
        assert!(parse(&["spectrum", "--format", "csv"]).is_err());
        assert!(parse(&["decay-sweep", "--mu", "1.0"]).is_err());
    }

    #[test]
    fn half_integers() {
        assert_eq!(parse_half_int("-3/2").unwrap(), HalfInt::from_twice(-3));
        assert_eq!(parse_half_int("2").unwrap(), HalfInt::from_int(2));
        assert!(parse_half_int("1/3").is_err());
        let c = parse(&["spectrum", "--u-max", "-1"]).unwrap();
        assert_eq!(c.u_max, Some(HalfInt::from_int(-1)));
    }
}
