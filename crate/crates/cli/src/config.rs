//! Option resolution: command-line flags over a key=value file over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use impact_game::montecarlo::{PriceModel, SimConfig};
use impact_game::GameParams;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Resilience ρ of the impact kernel.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Time horizon.
    #[arg(long = "T", global = true)]
    pub horizon: Option<f64>,
    /// Number of trading intervals (N + 1 trading times).
    #[arg(long = "N", global = true)]
    pub steps: Option<usize>,
    /// Quadratic transaction-cost level.
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Initial inventory of agent 1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Initial inventory of agent 2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// File of key=value lines. Flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// List of N: `a:b`, `a:b:step` or `a,b,c`.
    #[arg(long = "n-list", global = true)]
    pub n_list: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// constant_zero or random_walk.
    #[arg(long = "price-model", global = true)]
    pub price_model: Option<String>,
    /// Standard deviation of random-walk increments.
    #[arg(long = "walk-scale", global = true)]
    pub walk_scale: Option<f64>,
    /// Grid for verify: small or full.
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Small,
    Full,
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub rho: f64,
    pub horizon: f64,
    pub steps: usize,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub n_list: Option<Vec<usize>>,
    pub seed: u64,
    pub samples: usize,
    pub price_model: PriceModel,
    pub walk_scale: f64,
    pub grid: Grid,
}

const KEYS: [&str; 14] = [
    "rho",
    "T",
    "N",
    "theta",
    "x",
    "y",
    "format",
    "output",
    "n-list",
    "seed",
    "samples",
    "price-model",
    "walk-scale",
    "grid",
];

/// Reads `key = value` lines. Blank lines and `#` comments are skipped;
/// underscores in keys are accepted in place of dashes.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Param(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Param(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Param(format!("{}:{}: unknown key `{}`", path.display(), i + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s
            .parse()
            .map_err(|e| CliError::Param(format!("config key `{key}`: cannot parse `{s}`: {e}"))),
        None => Ok(default),
    }
}

fn pick_str(flag: &Option<String>, file: &BTreeMap<String, String>, key: &str) -> Option<String> {
    flag.clone().or_else(|| file.get(key).cloned())
}

pub fn parse_format(s: &str) -> Result<Format, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        _ => Err(CliError::Param(format!("format must be json or csv, got `{s}`"))),
    }
}

pub fn parse_price_model(s: &str) -> Result<PriceModel, CliError> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "constant_zero" | "zero" => Ok(PriceModel::ConstantZero),
        "random_walk" | "walk" => Ok(PriceModel::RandomWalk),
        _ => Err(CliError::Param(format!("price-model must be constant_zero or random_walk, got `{s}`"))),
    }
}

fn parse_grid(s: &str) -> Result<Grid, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "small" => Ok(Grid::Small),
        "full" => Ok(Grid::Full),
        _ => Err(CliError::Param(format!("grid must be small or full, got `{s}`"))),
    }
}

/// Parses `a:b` (inclusive), `a:b:step` or a comma-separated list.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = |what: &str| CliError::Param(format!("n-list `{s}`: {what}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(&format!("`{}` is not a count", t.trim())));
    let list: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(bad("expected a:b or a:b:step")),
        };
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        if a > b {
            return Err(bad("start exceeds end"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if list.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(n) = list.iter().find(|&&n| n < 2) {
        return Err(bad(&format!("N = {n} is below 2")));
    }
    Ok(list)
}

impl Resolved {
    pub fn from_flags(flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let format = match pick_str(&flags.format, &file, "format") {
            Some(s) => parse_format(&s)?,
            None => Format::Json,
        };
        let price_model = match pick_str(&flags.price_model, &file, "price-model") {
            Some(s) => parse_price_model(&s)?,
            None => PriceModel::ConstantZero,
        };
        let grid = match pick_str(&flags.grid, &file, "grid") {
            Some(s) => parse_grid(&s)?,
            None => Grid::Small,
        };
        let n_list = pick_str(&flags.n_list, &file, "n-list").map(|s| parse_n_list(&s)).transpose()?;
        let output = flags.output.clone().or_else(|| file.get("output").map(PathBuf::from));
        Ok(Self {
            rho: pick(flags.rho, &file, "rho", 1.0)?,
            horizon: pick(flags.horizon, &file, "T", 1.0)?,
            steps: pick(flags.steps, &file, "N", 50)?,
            theta: pick(flags.theta, &file, "theta", 0.25)?,
            x: pick(flags.x, &file, "x", 1.0)?,
            y: pick(flags.y, &file, "y", 1.0)?,
            format,
            output,
            n_list,
            seed: pick(flags.seed, &file, "seed", 2024)?,
            samples: pick(flags.samples, &file, "samples", 100_000)?,
            price_model,
            walk_scale: pick(flags.walk_scale, &file, "walk-scale", 0.1)?,
            grid,
        })
    }

    pub fn params(&self) -> Result<GameParams, CliError> {
        Ok(GameParams::new(self.rho, self.horizon, self.steps, self.theta, self.x, self.y)?)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            n_samples: self.samples,
            seed: self.seed,
            price_model: self.price_model,
            walk_scale: self.walk_scale,
        }
    }

    /// Every resolved option, for the JSON `meta.config` echo.
    pub fn echo(&self) -> Value {
        json!({
            "rho": self.rho,
            "T": self.horizon,
            "N": self.steps,
            "theta": self.theta,
            "x": self.x,
            "y": self.y,
            "n_list": self.n_list,
            "seed": self.seed,
            "samples": self.samples,
            "price_model": match self.price_model {
                PriceModel::ConstantZero => "constant_zero",
                PriceModel::RandomWalk => "random_walk",
            },
            "walk_scale": self.walk_scale,
            "grid": match self.grid {
                Grid::Small => "small",
                Grid::Full => "full",
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_forms() {
        assert_eq!(parse_n_list("2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_n_list("10:30:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_n_list("7, 3,100").unwrap(), vec![7, 3, 100]);
        assert!(parse_n_list("1:4").is_err());
        assert!(parse_n_list("5:2").is_err());
        assert!(parse_n_list("2:9:0").is_err());
        assert!(parse_n_list("a,b").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("impact-game-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# run\nrho = 2\nN=12\nwalk_scale = 0.5\nformat=csv\n").unwrap();
        let flags = Flags { config: Some(path), steps: Some(30), ..Flags::default() };
        let r = Resolved::from_flags(&flags).unwrap();
        assert_eq!((r.rho, r.steps, r.walk_scale, r.format), (2.0, 30, 0.5, Format::Csv));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
