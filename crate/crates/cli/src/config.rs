use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pcf_calculus::FractalDescriptor;
use serde::Deserialize;

use crate::error::CliError;

/// Exact arithmetic grows quickly with the degree.
pub const MAX_DEGREE: usize = 64;
/// Largest cell count `N^m` a run may touch.
pub const MAX_CELLS: u64 = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

/// Options shared by every subcommand. Each may also come from a TOML file given by `--config`;
/// command-line values win.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Built-in fractal (sg, sg3, hg, sg4) or path to a descriptor TOML file
    #[arg(long, global = true)]
    pub fractal: Option<String>,

    /// Run on all four built-in fractals
    #[arg(long, global = true)]
    pub all: bool,

    /// Table degree J
    #[arg(short = 'J', long, global = true)]
    pub degree: Option<usize>,

    /// Order n
    #[arg(short = 'n', long, global = true)]
    pub order: Option<usize>,

    /// Level range such as 1..6, 1..=6 or 3
    #[arg(short = 'm', long, global = true)]
    pub levels: Option<String>,

    /// Vertex in word/corner syntax, e.g. 01/2
    #[arg(long, global = true)]
    pub vertex: Option<String>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Significant digits in decimal output
    #[arg(long, global = true)]
    pub digits: Option<usize>,

    /// Output file, or a directory when several outputs are produced
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for random jet draws
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Random draws per verification case
    #[arg(long, global = true)]
    pub draws: Option<usize>,

    /// Extra refinement levels used to measure tangent errors
    #[arg(long, global = true)]
    pub depth: Option<usize>,

    /// TOML file with any of the options above
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    /// Fill unset values from the config file, if one was given.
    pub fn resolve(self) -> Result<Options, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Options = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(Options {
            fractal: self.fractal.or(file.fractal),
            all: self.all || file.all,
            degree: self.degree.or(file.degree),
            order: self.order.or(file.order),
            levels: self.levels.or(file.levels),
            vertex: self.vertex.or(file.vertex),
            format: self.format.or(file.format),
            digits: self.digits.or(file.digits),
            output: self.output.or(file.output),
            seed: self.seed.or(file.seed),
            draws: self.draws.or(file.draws),
            depth: self.depth.or(file.depth),
            config: Some(path),
        })
    }
}

/// Validated run parameters. Command-specific defaults are applied by each command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub fractals: Vec<FractalDescriptor>,
    pub degree: Option<usize>,
    pub order: Option<usize>,
    pub levels: Option<RangeInclusive<usize>>,
    pub vertex: Option<String>,
    pub format: Option<Format>,
    pub digits: usize,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub draws: Option<usize>,
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn from_options(opts: Options) -> Result<Self, CliError> {
        let opts = opts.resolve()?;
        let fractals = match (&opts.fractal, opts.all) {
            (Some(_), true) => {
                return Err(CliError::Config("--fractal and --all are exclusive".into()))
            }
            (None, true) => FractalDescriptor::all_builtin()?,
            (Some(name), false) => vec![load_fractal(name)?],
            (None, false) => Vec::new(),
        };
        if let Some(j) = opts.degree {
            if j > MAX_DEGREE {
                return Err(CliError::Config(format!(
                    "degree {j} exceeds the limit {MAX_DEGREE}"
                )));
            }
        }
        let levels = opts.levels.as_deref().map(parse_levels).transpose()?;
        let digits = opts.digits.unwrap_or(10);
        if !(1..=60).contains(&digits) {
            return Err(CliError::Config(format!(
                "digits must lie in 1..=60, got {digits}"
            )));
        }
        Ok(RunConfig {
            fractals,
            degree: opts.degree,
            order: opts.order,
            levels,
            vertex: opts.vertex,
            format: opts.format,
            digits,
            output: opts.output,
            seed: opts.seed.unwrap_or(0),
            draws: opts.draws,
            depth: opts.depth,
        })
    }

    pub fn require_fractals(&self) -> Result<&[FractalDescriptor], CliError> {
        if self.fractals.is_empty() {
            return Err(CliError::Config(
                "choose a fractal with --fractal NAME or --all".into(),
            ));
        }
        Ok(&self.fractals)
    }

    pub fn levels_or(&self, default: RangeInclusive<usize>) -> RangeInclusive<usize> {
        self.levels.clone().unwrap_or(default)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn load_fractal(name: &str) -> Result<FractalDescriptor, CliError> {
    let path = Path::new(name);
    if name.ends_with(".toml") || path.is_file() {
        return Ok(FractalDescriptor::from_path(path)?);
    }
    Ok(FractalDescriptor::builtin(name)?)
}

/// `a..b` and `a..=b` are both inclusive; a single number is one level.
pub fn parse_levels(text: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::Config(format!("bad level range {text:?}"));
    let t = text.trim();
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=').trim()),
        None => (t, t),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(CliError::Config(format!(
            "level range {text:?} must satisfy 1 <= start <= end"
        )));
    }
    Ok(lo..=hi)
}

/// Reject levels whose cell count `N^m` exceeds the guard.
pub fn check_level(fractal: &FractalDescriptor, m: usize) -> Result<(), CliError> {
    let cells = (fractal.n_maps as u64)
        .checked_pow(m as u32)
        .unwrap_or(u64::MAX);
    if cells > MAX_CELLS {
        return Err(CliError::Config(format!(
            "{}: level {m} has {cells} cells, above the limit {MAX_CELLS}",
            fractal.name
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("1..6").unwrap(), 1..=6);
        assert_eq!(parse_levels("2..=4").unwrap(), 2..=4);
        assert_eq!(parse_levels("3").unwrap(), 3..=3);
        assert!(parse_levels("0..2").is_err());
        assert!(parse_levels("5..2").is_err());
        assert!(parse_levels("a").is_err());
    }

    #[test]
    fn level_guard_depends_on_cell_count() {
        let sg = FractalDescriptor::builtin("sg").unwrap();
        let hg = FractalDescriptor::builtin("hg").unwrap();
        assert!(check_level(&sg, 9).is_ok());
        assert!(check_level(&hg, 7).is_err());
    }

    #[test]
    fn degree_guard() {
        let opts = Options {
            fractal: Some("sg".into()),
            degree: Some(65),
            ..Options::default()
        };
        assert!(matches!(
            RunConfig::from_options(opts),
            Err(CliError::Config(_))
        ));
    }
}
