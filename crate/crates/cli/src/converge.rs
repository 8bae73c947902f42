use clap::ValueEnum;
use pcf_calculus::fractal::VertexAddress;
use pcf_calculus::jets::{Jet, LocalChart};
use pcf_calculus::lab::{
    convergence_experiment, tangent_convergence_experiment, ConvergenceReport,
};
use pcf_calculus::{monomial_sequences, FractalDescriptor, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{check_level, Format, RunConfig};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// sup error of the iterated graph Laplacian against the exact one
    Laplacian,
    /// sup distance of the local fits h_m to the weak tangent h
    Tangent,
}

/// Test function: `monomial:j` is `Q_{j1}`; `multiharmonic:k` draws random boundary jets of order `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    Monomial(usize),
    Multiharmonic(usize),
}

impl std::str::FromStr for TestFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, k) = s
            .split_once(':')
            .ok_or_else(|| format!("expected monomial:J or multiharmonic:K, got {s:?}"))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| format!("bad order in {s:?}"))?;
        match kind.trim() {
            "monomial" if k >= 1 => Ok(TestFunction::Monomial(k)),
            "monomial" => Err("monomial order must be at least 1".into()),
            "multiharmonic" => Ok(TestFunction::Multiharmonic(k)),
            other => Err(format!("unknown function family {other:?}")),
        }
    }
}

fn boundary_jets(
    f: &FractalDescriptor,
    func: TestFunction,
    seed: u64,
) -> Result<Vec<Jet>, CliError> {
    Ok(match func {
        TestFunction::Monomial(j) => {
            let alpha = monomial_sequences(f, j)?.alpha.into_entries();
            let mut jets = vec![Jet::unit(j, j)];
            for _ in 1..f.n_boundary {
                jets.push(Jet((0..=j).map(|i| alpha[j - i].clone()).collect()));
            }
            jets
        }
        TestFunction::Multiharmonic(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..f.n_boundary)
                .map(|_| {
                    Jet((0..=k)
                        .map(|_| Rational::new(rng.random_range(-20..=20), rng.random_range(1..=9)))
                        .collect())
                })
                .collect()
        }
    })
}

fn render(rep: &ConvergenceReport, digits: usize, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => rep.to_csv(digits)?,
        Format::Json => {
            let rows: Vec<_> = rep
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "sup_error_exact": r.error.to_string(),
                        "sup_error_decimal": r.error.to_decimal_string(digits),
                        "ratio_decimal": r.ratio.as_ref().map(|x| x.to_decimal_string(digits)),
                    })
                })
                .collect();
            let v = json!({ "fractal": rep.fractal, "order": rep.order, "rows": rows });
            serde_json::to_string_pretty(&v).expect("report serializes")
        }
        Format::Text => {
            let w = digits + 8;
            let mut out = format!("{:>3}  {:>w$}  {:>w$}\n", "m", "sup error", "ratio");
            for r in &rep.rows {
                let ratio = r
                    .ratio
                    .as_ref()
                    .map_or(String::new(), |x| x.to_decimal_string(digits));
                out.push_str(&format!(
                    "{:>3}  {:>w$}  {:>w$}\n",
                    r.m,
                    r.error.to_decimal_string(digits),
                    ratio
                ));
            }
            out
        }
    })
}

pub fn run(
    cfg: &RunConfig,
    experiment: Experiment,
    func: Option<TestFunction>,
) -> Result<(), CliError> {
    let fractals = cfg.require_fractals()?;
    let n = cfg.order.unwrap_or(1);
    if n == 0 {
        return Err(CliError::Config("order n must be at least 1".into()));
    }
    let func = func.unwrap_or(TestFunction::Monomial(n + 1));
    let levels = cfg.levels_or(1..=4);
    let format = cfg.format_or(Format::Csv);
    let mut out = Emitter::new(cfg.output.clone(), format, fractals.len() > 1)?;
    for f in fractals {
        check_level(f, *levels.end())?;
        let jets = boundary_jets(f, func, cfg.seed)?;
        let rep = match experiment {
            Experiment::Laplacian => convergence_experiment(f, &jets, n, levels.clone())?,
            Experiment::Tangent => {
                let x = VertexAddress::parse(cfg.vertex.as_deref().unwrap_or("0/1"), f)?;
                let depth = cfg.depth.unwrap_or(3);
                let chart = LocalChart::new(f, &x)?;
                check_level(f, chart.level + levels.end() + depth)?;
                tangent_convergence_experiment(f, &jets, &x, n, levels.clone(), depth)?
            }
        };
        out.emit(&f.name, &render(&rep, cfg.digits, format)?)?;
    }
    Ok(())
}
