use std::ops::RangeInclusive;

use clap::ValueEnum;
use pcf_calculus::fractal::{build_level_graph, laplacian_domain};
use pcf_calculus::jets::{easy_basis_constants, Jet};
use pcf_calculus::lab::{IdentityChecker, IdentityReport};
use pcf_calculus::monomial::{explicit_recursions, relation_route, verify_neighbor_identity};
use pcf_calculus::{build_monomial_table, monomial_sequences, FractalDescriptor, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{check_level, Format, RunConfig};
use crate::error::CliError;
use crate::output::Emitter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Δ̃_m h as a combination of the jet of h with alpha weights
    OneStep,
    /// The same identity with easy-basis weights
    OneStepEasy,
    /// Δ̃_m^n h = Δ^n h on the iterate domain
    Iterated,
    /// Neighbor identity of the monomial values on V_1
    NeighborIdentity,
    /// No alpha_j, beta_j, gamma_j vanishes
    Nonvanishing,
    /// Relation solutions equal the scalar recursions
    DualRoute,
    /// alpha_j + Σ a_(j-i) beta_i = 0
    Duality,
    /// Every suite with its defaults
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::OneStep => "one-step",
            Suite::OneStepEasy => "one-step-easy",
            Suite::Iterated => "iterated",
            Suite::NeighborIdentity => "neighbor-identity",
            Suite::Nonvanishing => "nonvanishing",
            Suite::DualRoute => "dual-route",
            Suite::Duality => "duality",
            Suite::All => "all",
        }
    }
}

const SUITES: [Suite; 7] = [
    Suite::OneStep,
    Suite::OneStepEasy,
    Suite::Iterated,
    Suite::NeighborIdentity,
    Suite::Nonvanishing,
    Suite::DualRoute,
    Suite::Duality,
];

/// One checked case.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub fractal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub checked: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    fn new(suite: Suite, f: &FractalDescriptor) -> Self {
        CheckRecord {
            suite,
            fractal: f.name.clone(),
            order: None,
            level: None,
            degree: None,
            checked: 0,
            pass: true,
            detail: None,
        }
    }

    fn fail(&mut self, detail: String) {
        if self.pass {
            self.detail = Some(detail);
        }
        self.pass = false;
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    suite: Suite,
    seed: u64,
    pass: bool,
    checks: &'a [CheckRecord],
}

fn random_jets(rng: &mut ChaCha8Rng, n0: usize, n: usize) -> Vec<Jet> {
    (0..n0)
        .map(|_| {
            Jet((0..=n)
                .map(|_| Rational::new(rng.random_range(-20..=20), rng.random_range(1..=9)))
                .collect())
        })
        .collect()
}

struct Params {
    orders: RangeInclusive<usize>,
    levels: RangeInclusive<usize>,
    draws: usize,
}

fn identity_suite(
    suite: Suite,
    f: &FractalDescriptor,
    p: &Params,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CheckRecord>, CliError> {
    let mut out = Vec::new();
    for n in p.orders.clone() {
        if n == 0 && suite == Suite::Iterated {
            continue;
        }
        let checker = IdentityChecker::new(f, n)?;
        for m in p.levels.clone() {
            check_level(f, m)?;
            if suite == Suite::Iterated && laplacian_domain(&build_level_graph(f, m), n).is_empty()
            {
                continue;
            }
            let mut rec = CheckRecord {
                order: Some(n),
                level: Some(m),
                ..CheckRecord::new(suite, f)
            };
            for _ in 0..p.draws {
                let jets = random_jets(rng, f.n_boundary, n);
                let rep: IdentityReport = match suite {
                    Suite::OneStep => checker.one_step(&jets, m)?,
                    Suite::OneStepEasy => checker.one_step_easy(&jets, m)?,
                    _ => checker.iterated(&jets, m)?,
                };
                rec.checked += rep.checked;
                if let Some((x, r)) = rep.failures.first() {
                    rec.fail(format!("residual {r} at {x}"));
                }
            }
            out.push(rec);
        }
    }
    Ok(out)
}

fn neighbor_identity(f: &FractalDescriptor, degree: usize) -> Result<Vec<CheckRecord>, CliError> {
    let t = build_monomial_table(f, degree)?;
    (0..=degree)
        .map(|j| {
            let rep = verify_neighbor_identity(&t, j)?;
            let mut rec = CheckRecord {
                degree: Some(j),
                checked: rep.ranks.len(),
                ..CheckRecord::new(Suite::NeighborIdentity, f)
            };
            if let Some((k, x, r)) = rep.residuals.first() {
                rec.fail(format!("family {k}: residual {r} at {x}"));
            } else if !rep.holds() {
                rec.fail("degree system is not uniquely solvable".into());
            }
            Ok(rec)
        })
        .collect()
}

fn nonvanishing(f: &FractalDescriptor, degree: usize) -> Result<CheckRecord, CliError> {
    let t = monomial_sequences(f, degree)?;
    let mut rec = CheckRecord {
        degree: Some(degree),
        checked: 3 * (degree + 1),
        ..CheckRecord::new(Suite::Nonvanishing, f)
    };
    if let Err(e) = t.check_nonvanishing() {
        rec.fail(e.to_string());
    }
    Ok(rec)
}

fn dual_route(f: &FractalDescriptor, degree: usize) -> Result<CheckRecord, CliError> {
    let explicit = explicit_recursions(&f.name, degree).ok_or_else(|| {
        CliError::Config(format!(
            "{}: no scalar recursion is known for this fractal",
            f.name
        ))
    })?;
    let relation = relation_route(f, degree)?;
    let mut rec = CheckRecord {
        degree: Some(degree),
        ..CheckRecord::new(Suite::DualRoute, f)
    };
    for (k, name) in ["alpha", "beta", "gamma"].iter().enumerate() {
        for (j, (a, b)) in relation[k].entries().iter().zip(&explicit[k]).enumerate() {
            rec.checked += 1;
            if a != b {
                rec.fail(format!("{name}_{j}: relation {a}, recursion {b}"));
            }
        }
    }
    Ok(rec)
}

fn duality(f: &FractalDescriptor, degree: usize) -> Result<CheckRecord, CliError> {
    let k = easy_basis_constants(f, degree)?;
    let t = monomial_sequences(f, degree)?;
    let (alpha, beta) = (t.alpha.entries(), t.beta.entries());
    let mut rec = CheckRecord {
        degree: Some(degree),
        ..CheckRecord::new(Suite::Duality, f)
    };
    for j in 0..=degree {
        let s: Rational = (0..=j).map(|i| &k.a[j - i] * &beta[i]).sum();
        let residual = if j == 0 {
            Rational::one() + s
        } else {
            &alpha[j] + s
        };
        rec.checked += 1;
        if !residual.is_zero() {
            rec.fail(format!("residual {residual} at j = {j}"));
        }
    }
    Ok(rec)
}

fn run_suite(
    suite: Suite,
    f: &FractalDescriptor,
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CheckRecord>, CliError> {
    let params = Params {
        orders: cfg.order.map_or(1..=3, |n| n..=n),
        levels: cfg.levels_or(1..=3),
        draws: cfg.draws.unwrap_or(20),
    };
    Ok(match suite {
        Suite::OneStep | Suite::OneStepEasy | Suite::Iterated => {
            identity_suite(suite, f, &params, rng)?
        }
        Suite::NeighborIdentity => neighbor_identity(f, cfg.degree.unwrap_or(5))?,
        Suite::Nonvanishing => vec![nonvanishing(f, cfg.degree.unwrap_or(20))?],
        Suite::DualRoute => vec![dual_route(f, cfg.degree.unwrap_or(20))?],
        Suite::Duality => vec![duality(f, cfg.degree.unwrap_or(10))?],
        Suite::All => unreachable!("expanded by the caller"),
    })
}

fn render(records: &[CheckRecord], suite: Suite, seed: u64, format: Format) -> String {
    let pass = records.iter().all(|r| r.pass);
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    match format {
        Format::Json => serde_json::to_string_pretty(&VerifyReport {
            suite,
            seed,
            pass,
            checks: records,
        })
        .expect("report serializes"),
        Format::Csv => {
            let mut out = String::from("suite,fractal,order,level,degree,checked,pass,detail\n");
            for r in records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},\"{}\"\n",
                    r.suite.name(),
                    r.fractal,
                    opt(r.order),
                    opt(r.level),
                    opt(r.degree),
                    r.checked,
                    r.pass,
                    r.detail.clone().unwrap_or_default().replace('"', "\"\"")
                ));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in records {
                let mut line = format!(
                    "{} {} {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.suite.name(),
                    r.fractal
                );
                for (k, v) in [("n", r.order), ("m", r.level), ("J", r.degree)] {
                    if let Some(v) = v {
                        line.push_str(&format!(" {k}={v}"));
                    }
                }
                line.push_str(&format!(" checked={}", r.checked));
                if let Some(d) = &r.detail {
                    line.push_str(&format!(" ({d})"));
                }
                out.push_str(&line);
                out.push('\n');
            }
            out.push_str(&format!(
                "{}\n",
                if pass {
                    "all checks pass"
                } else {
                    "some checks FAIL"
                }
            ));
            out
        }
    }
}

/// Run the exact-identity suites; a failed check yields a verification error after the report is written.
pub fn run(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    let fractals = cfg.require_fractals()?;
    let suites: Vec<Suite> = if suite == Suite::All {
        SUITES.to_vec()
    } else {
        vec![suite]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    for f in fractals {
        for &s in &suites {
            match run_suite(s, f, cfg, &mut rng) {
                Ok(r) => records.extend(r),
                Err(CliError::Config(_)) if suite == Suite::All && s == Suite::DualRoute => {}
                Err(e) => return Err(e),
            }
        }
    }
    let format = cfg.format_or(Format::Json);
    Emitter::new(cfg.output.clone(), format, false)?
        .emit("verify", &render(&records, suite, cfg.seed, format))?;
    match records.iter().find(|r| !r.pass) {
        Some(r) => Err(CliError::Verification(format!(
            "{} on {}: {}",
            r.suite.name(),
            r.fractal,
            r.detail.clone().unwrap_or_default()
        ))),
        None => Ok(()),
    }
}
