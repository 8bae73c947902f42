//! Monomial sequences `α_j, β_j, γ_j`, their auxiliary `V_1` values, and table output.

mod explicit;
mod layout;
mod tables;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fractal::FractalDescriptor;
use crate::harmonic::VertexFunction;
use crate::rational::Rational;
use crate::relation::{solve_implicit_relation, Context, RelationSpec};
use crate::seq::SemiCirculantSeq;

pub use explicit::explicit_recursions;
pub use layout::{
    auxiliary_sequences, boundary_weights, graph_route, monomial_values_v1,
    verify_neighbor_identity, GraphRoute, NeighborIdentityReport,
};
pub use tables::{
    compare_golden, golden_table, load_errata, ratio_column, render_tables, table_csv, table_json,
    CellCheck, Erratum, ErratumKind, GoldenComparison, GoldenTable,
};

/// The three monomial families at `q_0`.
pub const FAMILIES: [usize; 3] = [1, 2, 3];

/// Sequences of one fractal up to degree `J`, with optional `V_1` data.
#[derive(Clone, Debug)]
pub struct MonomialTable {
    pub fractal: FractalDescriptor,
    pub degree: usize,
    pub alpha: SemiCirculantSeq,
    pub beta: SemiCirculantSeq,
    pub gamma: SemiCirculantSeq,
    /// family index -> auxiliary name -> sequence
    pub aux: BTreeMap<usize, BTreeMap<String, SemiCirculantSeq>>,
    /// family index -> values of the degree-`j` monomial on `V_1`, for `j = 0..=J`
    pub v1_layouts: BTreeMap<usize, Vec<VertexFunction>>,
}

impl MonomialTable {
    pub fn name(&self) -> &str {
        &self.fractal.name
    }

    /// Sequence of a family: 1 -> alpha, 2 -> beta, 3 -> gamma.
    pub fn family(&self, k: usize) -> &SemiCirculantSeq {
        match k {
            1 => &self.alpha,
            2 => &self.beta,
            _ => &self.gamma,
        }
    }

    /// Base context with `r`, `lambda` and the three sequences bound.
    pub fn context(&self) -> Context {
        base_context(&self.fractal)
            .with_known("alpha", self.alpha.clone())
            .with_known("beta", self.beta.clone())
            .with_known("gamma", self.gamma.clone())
    }

    /// Solve the auxiliary systems and assemble the `V_1` values of every monomial.
    pub fn fill_layouts(&mut self) -> Result<()> {
        for k in FAMILIES {
            let aux = auxiliary_sequences(self, k)?;
            self.aux.insert(k, aux);
        }
        for k in FAMILIES {
            let layouts = (0..=self.degree)
                .map(|j| monomial_values_v1(self, k, j))
                .collect::<Result<Vec<_>>>()?;
            self.v1_layouts.insert(k, layouts);
        }
        Ok(())
    }

    /// Nonvanishing of every `α_j, β_j, γ_j` up to the table degree.
    pub fn check_nonvanishing(&self) -> Result<()> {
        for (name, s) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
        ] {
            if let Some(j) = s.entries().iter().position(|x| x.is_zero()) {
                return Err(Error::Precondition(format!(
                    "{}: {name}_{j} vanishes",
                    self.fractal.name
                )));
            }
        }
        Ok(())
    }

    /// First `j` with `γ_j != 4 α_{j+1}`, over the degrees where both exist.
    pub fn gamma_alpha_defect(&self) -> Option<usize> {
        let four = Rational::from_integer(4);
        (0..self.degree).find(|&j| self.gamma.get(j) != &(&four * self.alpha.get(j + 1)))
    }
}

pub(crate) fn base_context(fractal: &FractalDescriptor) -> Context {
    Context::new(fractal.rho.clone())
        .with_scalar("r", fractal.r.clone())
        .with_scalar("lambda", fractal.lambda.clone())
}

/// Route through the matrix relations of the descriptor.
pub fn relation_route(fractal: &FractalDescriptor, degree: usize) -> Result<[SemiCirculantSeq; 3]> {
    let ctx = base_context(fractal);
    let alpha = solve_implicit_relation(
        &RelationSpec::new(&fractal.relations.alpha, "alpha", ctx.clone())?,
        &[Rational::one(), fractal.alpha1()],
        degree,
    )?;
    let ctx = ctx.with_known("alpha", alpha.clone());
    let beta = solve_implicit_relation(
        &RelationSpec::new(&fractal.relations.beta, "beta", ctx.clone())?,
        &[fractal.beta0()],
        degree,
    )?;
    let gamma = solve_implicit_relation(
        &RelationSpec::new(&fractal.relations.gamma, "gamma", ctx)?,
        &[fractal.gamma0()],
        degree,
    )?;
    Ok([alpha, beta, gamma])
}

fn first_difference(a: &[Rational], b: &[Rational]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())))
}

fn agree(label: &str, name: &str, a: &[Rational], b: &[Rational]) -> Result<()> {
    match first_difference(a, b) {
        Some(degree) => Err(Error::RouteMismatch {
            sequence: format!("{name} ({label})"),
            degree,
        }),
        None => Ok(()),
    }
}

/// `α, β, γ` up to degree `J`, cross-checked between the relation solver, the explicit
/// recursions (for the built-in fractals) and the level-1 graph system.
pub fn monomial_sequences(fractal: &FractalDescriptor, degree: usize) -> Result<MonomialTable> {
    Ok(checked_sequences(fractal, degree)?.0)
}

fn checked_sequences(
    fractal: &FractalDescriptor,
    degree: usize,
) -> Result<(MonomialTable, GraphRoute)> {
    let [alpha, beta, gamma] = relation_route(fractal, degree)?;
    let names = ["alpha", "beta", "gamma"];
    let routed = [&alpha, &beta, &gamma];
    if let Some(explicit) = explicit_recursions(&fractal.name, degree) {
        for ((name, s), e) in names.iter().zip(routed).zip(&explicit) {
            agree("relations vs explicit recursion", name, s.entries(), e)?;
        }
    }
    let graph = graph_route(fractal, degree)?;
    for (k, (name, s)) in FAMILIES.iter().zip(names.iter().zip(routed)) {
        agree(
            "relations vs level-1 graph system",
            name,
            s.entries(),
            &graph.boundary_sequence(*k),
        )?;
    }
    let table = MonomialTable {
        fractal: fractal.clone(),
        degree,
        alpha,
        beta,
        gamma,
        aux: BTreeMap::new(),
        v1_layouts: BTreeMap::new(),
    };
    table.check_nonvanishing()?;
    Ok((table, graph))
}

/// Sequences plus auxiliary values and `V_1` layouts, with the layouts checked against the graph system.
pub fn build_monomial_table(fractal: &FractalDescriptor, degree: usize) -> Result<MonomialTable> {
    let (mut table, graph) = checked_sequences(fractal, degree)?;
    table.fill_layouts()?;
    for k in FAMILIES {
        for (j, f) in table.v1_layouts[&k].iter().enumerate() {
            if f != &graph.values[&k][j] {
                return Err(Error::RouteMismatch {
                    sequence: format!("V_1 values of family {k} (auxiliary vs graph)"),
                    degree: j,
                });
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn second_alpha_entries() {
        for (name, a2) in [
            ("sg", q(1, 180)),
            ("sg3", q(239, 44820)),
            ("hg", q(17, 3276)),
            ("sg4", q(1, 720)),
        ] {
            let f = FractalDescriptor::builtin(name).unwrap();
            let t = monomial_sequences(&f, 4).unwrap();
            assert_eq!(t.alpha.get(2), &a2, "{name}");
        }
    }

    #[test]
    fn initial_data() {
        for f in FractalDescriptor::all_builtin().unwrap() {
            let t = monomial_sequences(&f, 2).unwrap();
            let d4 = f.n_boundary == 4;
            assert_eq!(t.alpha.get(0), &Rational::one());
            assert_eq!(t.alpha.get(1), &if d4 { q(1, 12) } else { q(1, 6) });
            assert_eq!(t.beta.get(0), &if d4 { q(-1, 3) } else { q(-1, 2) });
            assert_eq!(t.gamma.get(0), &if d4 { q(1, 3) } else { q(1, 2) });
        }
    }

    #[test]
    fn sg4_gamma_is_shifted_alpha() {
        let f = FractalDescriptor::builtin("sg4").unwrap();
        let t = monomial_sequences(&f, 12).unwrap();
        assert_eq!(t.gamma_alpha_defect(), None);
        let sg = monomial_sequences(&FractalDescriptor::builtin("sg").unwrap(), 4).unwrap();
        assert_eq!(sg.gamma_alpha_defect(), Some(0));
    }

    #[test]
    fn sg_aux_first_entry() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let t = build_monomial_table(&f, 3).unwrap();
        assert_eq!(t.aux[&1]["a"].get(0), &Rational::one());
    }

    #[test]
    fn broken_relation_is_route_mismatch() {
        let mut f = FractalDescriptor::builtin("sg").unwrap();
        f.relations.gamma =
            "tau(gamma) - lambda*gamma = 4*lambda*alpha*gamma + lambda*(alpha - I)*gamma".into();
        match monomial_sequences(&f, 5) {
            Err(Error::RouteMismatch { sequence, degree }) => {
                assert!(sequence.starts_with("gamma"));
                assert_eq!(degree, 1);
            }
            other => panic!("expected mismatch, got {other:?}"),
        }
    }
}
