//! Iterated renormalized graph Laplacians, exact pointwise-formula identities, convergence runs and
//! coefficient schemes for `Δ^n`.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, laplacian_domain, FractalDescriptor, LevelGraph,
    VertexAddress,
};
use crate::harmonic::{renormalized_laplacian, VertexFunction};
use crate::jets::{
    weak_tangent, weak_tangent_fit, EasyBasis, Jet, JetField, LocalChart, Multiharmonic,
};
use crate::monomial::monomial_sequences;
use crate::rational::Rational;

/// `Δ̃_m^n f` on `V_m^n`.
pub fn iterate_discrete_laplacian(
    graph: &LevelGraph,
    f: &VertexFunction,
    n: usize,
) -> Result<VertexFunction> {
    if n == 0 {
        return Err(Error::Domain("iteration count must be at least 1".into()));
    }
    let dist = graph.boundary_distances();
    let mut g: Vec<Option<Rational>> = graph.vertices().iter().map(|v| f.get(v).cloned()).collect();
    for k in 1..=n {
        if dist.iter().all(|&d| d < k) {
            return Err(Error::Domain(format!("V_{}^{k} is empty", graph.level)));
        }
        let missing =
            |i: usize| Error::Domain(format!("function undefined at {}", graph.vertex(i)));
        let mut next = vec![None; graph.len()];
        for i in (0..graph.len()).filter(|&i| dist[i] >= k) {
            let gx = g[i].as_ref().ok_or_else(|| missing(i))?;
            let mut s = Rational::zero();
            for &j in graph.neighbors(i) {
                s += g[j].as_ref().ok_or_else(|| missing(j))? - gx;
            }
            next[i] = Some(s * graph.conductance() / graph.tent_integral(i));
        }
        g = next;
    }
    Ok(VertexFunction::from_map(
        graph.level,
        g.into_iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (graph.vertex(i).clone(), v)))
            .collect(),
    ))
}

/// Exact residuals of a pointwise identity over a vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub fractal: String,
    pub level: usize,
    pub order: usize,
    pub checked: usize,
    /// Only the nonzero residuals.
    pub failures: Vec<(VertexAddress, Rational)>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }
}

fn report(
    identity: &str,
    fractal: &FractalDescriptor,
    level: usize,
    order: usize,
    residuals: impl IntoIterator<Item = (VertexAddress, Rational)>,
) -> IdentityReport {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (x, r) in residuals {
        checked += 1;
        if !r.is_zero() {
            failures.push((x, r));
        }
    }
    IdentityReport {
        identity: identity.into(),
        fractal: fractal.name.clone(),
        level,
        order,
        checked,
        failures,
    }
}

fn order_of(jets: &[Jet]) -> Result<usize> {
    jets.first()
        .map(|j| j.order())
        .ok_or_else(|| Error::Domain("no boundary jets".into()))
}

/// Precomputed data for checking the pointwise identities on many functions of order `<= n`.
#[derive(Clone, Debug)]
pub struct IdentityChecker {
    pub fractal: FractalDescriptor,
    basis: EasyBasis,
    alpha: Vec<Rational>,
}

impl IdentityChecker {
    pub fn new(fractal: &FractalDescriptor, n: usize) -> Result<Self> {
        let alpha = monomial_sequences(fractal, n)?.alpha.into_entries();
        Ok(IdentityChecker {
            fractal: fractal.clone(),
            basis: EasyBasis::new(fractal, n)?,
            alpha,
        })
    }

    fn field(&self, jets: &[Jet], m: usize) -> Result<JetField> {
        Ok(Multiharmonic::with_basis(&self.basis, jets.to_vec())?.field(m))
    }

    fn one_step_residuals(
        &self,
        jets: &[Jet],
        m: usize,
        weights: &[Rational],
    ) -> Result<Vec<(VertexAddress, Rational)>> {
        let f = &self.fractal;
        let n = order_of(jets)?;
        let field = self.field(jets, m)?;
        let graph = build_level_graph(f, m);
        let values = field.layer(0);
        graph
            .interior_indices()
            .into_iter()
            .map(|i| {
                let x = graph.vertex(i);
                let lhs = renormalized_laplacian(&graph, &values, x)?;
                let jet = &field.jets[x];
                let rhs: Rational = (1..=n)
                    .map(|j| f.rho.pow((m * (j - 1)) as i32) * &weights[j] * &jet[j])
                    .sum();
                Ok((x.clone(), lhs - rhs))
            })
            .collect()
    }

    /// `Δ̃_m h(x) = Σ_{j≥1} ρ^{m(j-1)} α_1^{-1} α_j Δ^j h(x)` on `V_m \ V_0`.
    pub fn one_step(&self, jets: &[Jet], m: usize) -> Result<IdentityReport> {
        let inv = self.alpha[1].recip()?;
        let w: Vec<Rational> = self.alpha.iter().map(|a| a * &inv).collect();
        Ok(report(
            "one-step Laplacian via alpha",
            &self.fractal,
            m,
            order_of(jets)?,
            self.one_step_residuals(jets, m, &w)?,
        ))
    }

    /// The same identity with weights `N0 (N0-1) c_j` from the easy basis.
    pub fn one_step_easy(&self, jets: &[Jet], m: usize) -> Result<IdentityReport> {
        let n0 = self.fractal.n_boundary as i64;
        let scale = Rational::from_integer(n0 * (n0 - 1));
        let w: Vec<Rational> = self.basis.constants.c.iter().map(|x| x * &scale).collect();
        Ok(report(
            "one-step Laplacian via easy basis",
            &self.fractal,
            m,
            order_of(jets)?,
            self.one_step_residuals(jets, m, &w)?,
        ))
    }

    /// `Δ̃_m^n h = Δ^n h` on `V_m^n` for `h ∈ H_n`.
    pub fn iterated(&self, jets: &[Jet], m: usize) -> Result<IdentityReport> {
        let n = order_of(jets)?;
        if n == 0 {
            return Err(Error::Domain("order must be at least 1".into()));
        }
        let field = self.field(jets, m)?;
        let graph = build_level_graph(&self.fractal, m);
        let it = iterate_discrete_laplacian(&graph, &field.layer(0), n)?;
        let residuals: Vec<_> = it
            .iter()
            .map(|(x, v)| (x.clone(), v - &field.jets[x][n]))
            .collect();
        Ok(report("iterated Laplacian", &self.fractal, m, n, residuals))
    }
}

pub fn verify_one_step(
    fractal: &FractalDescriptor,
    jets: &[Jet],
    m: usize,
) -> Result<IdentityReport> {
    IdentityChecker::new(fractal, order_of(jets)?)?.one_step(jets, m)
}

pub fn verify_one_step_easy(
    fractal: &FractalDescriptor,
    jets: &[Jet],
    m: usize,
) -> Result<IdentityReport> {
    IdentityChecker::new(fractal, order_of(jets)?)?.one_step_easy(jets, m)
}

pub fn verify_iterated(
    fractal: &FractalDescriptor,
    jets: &[Jet],
    m: usize,
) -> Result<IdentityReport> {
    IdentityChecker::new(fractal, order_of(jets)?)?.iterated(jets, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub error: Rational,
    pub ratio: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub fractal: String,
    pub order: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    fn from_errors(
        fractal: &FractalDescriptor,
        order: usize,
        errors: Vec<(usize, Rational)>,
    ) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::new();
        for (m, error) in errors {
            let ratio = rows.last().and_then(|p| error.checked_div(&p.error).ok());
            rows.push(ConvergenceRow { m, error, ratio });
        }
        ConvergenceReport {
            fractal: fractal.name.clone(),
            order,
            rows,
        }
    }

    pub fn to_csv(&self, digits: usize) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Serialize(e.to_string());
        w.write_record(["m", "sup_error_exact", "sup_error_decimal", "ratio_decimal"])
            .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                r.error.to_string(),
                r.error.to_decimal_string(digits),
                r.ratio
                    .as_ref()
                    .map_or(String::new(), |x| x.to_decimal_string(digits)),
            ])
            .map_err(io)?;
        }
        String::from_utf8(
            w.into_inner()
                .map_err(|e| Error::Serialize(e.to_string()))?,
        )
        .map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// `sup_{V_m^n} |Δ̃_m^n f - Δ^n f|` for a multiharmonic `f` of higher order.
pub fn convergence_experiment(
    fractal: &FractalDescriptor,
    jets: &[Jet],
    n: usize,
    levels: RangeInclusive<usize>,
) -> Result<ConvergenceReport> {
    let order = order_of(jets)?;
    if n == 0 || n > order {
        return Err(Error::Domain(format!(
            "iteration count {n} must lie in 1..={order}"
        )));
    }
    let u = Multiharmonic::new(fractal, jets.to_vec())?;
    let levels: Vec<usize> = levels.collect();
    let results: Vec<Result<Option<(usize, Rational)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&m| {
                let u = &u;
                s.spawn(move || -> Result<Option<(usize, Rational)>> {
                    let graph = build_level_graph(fractal, m);
                    if laplacian_domain(&graph, n).is_empty() {
                        return Ok(None);
                    }
                    let field = u.field(m);
                    let it = iterate_discrete_laplacian(&graph, &field.layer(0), n)?;
                    let err = it
                        .iter()
                        .map(|(x, v)| (v - &field.jets[x][n]).abs())
                        .max()
                        .unwrap_or_default();
                    Ok(Some((m, err)))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut errors = Vec::new();
    for r in results {
        if let Some(e) = r? {
            errors.push(e);
        }
    }
    Ok(ConvergenceReport::from_errors(fractal, n, errors))
}

/// `‖h_m - h‖` over `U(x)` at level `m_0 + depth`, for the fits `h_m` of `f` against its weak tangent `h`.
pub fn tangent_convergence_experiment(
    fractal: &FractalDescriptor,
    jets: &[Jet],
    x: &VertexAddress,
    n: usize,
    levels: RangeInclusive<usize>,
    depth: usize,
) -> Result<ConvergenceReport> {
    let order = order_of(jets)?;
    if order != n + 1 {
        return Err(Error::Domain(format!(
            "tangent of order {n} needs a function of order {}",
            n + 1
        )));
    }
    let basis = EasyBasis::new(fractal, order)?;
    let u = Multiharmonic::with_basis(&basis, jets.to_vec())?;
    let chart = LocalChart::new(fractal, x)?;
    let f = |y: &VertexAddress| Ok(u.value_at(y));
    let limit = weak_tangent(&basis, &chart, &f, n, chart.level)?;
    let mut errors = Vec::new();
    for m in levels.filter(|&m| m >= chart.level) {
        let mut samples = VertexFunction::new(m + n);
        for i in 0..=n {
            for (_, _, y) in chart.shell(m + i)? {
                let v = u.value_at(&y);
                samples.insert(y, v);
            }
        }
        let h = weak_tangent_fit(&basis, &chart, n, m, &samples)?;
        let err = h
            .sub(&limit)
            .sample(&basis, &chart, chart.level, depth)?
            .sup_norm();
        errors.push((m, err));
    }
    Ok(ConvergenceReport::from_errors(fractal, n, errors))
}

/// A linear functional `Σ a_j f(y_j)` annihilating `H_{n-1}`, normalized by `A = Σ a_j h'(y_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientScheme {
    pub order: usize,
    pub points: Vec<VertexAddress>,
    pub coefficients: Vec<Rational>,
    pub normalizer: Rational,
}

/// The `n`-fold renormalized Laplacian at `x` as a stencil on `V_m`.
pub fn laplacian_stencil(
    graph: &LevelGraph,
    x: &VertexAddress,
    n: usize,
) -> Result<(Vec<VertexAddress>, Vec<Rational>)> {
    let mut stencil: std::collections::BTreeMap<usize, Rational> = [(
        graph
            .index_of(x)
            .ok_or_else(|| Error::Domain(format!("{x} not in V_{}", graph.level)))?,
        Rational::one(),
    )]
    .into();
    let dist = graph.boundary_distances();
    for step in 0..n {
        let mut next = std::collections::BTreeMap::new();
        for (&i, c) in &stencil {
            if dist[i] < n - step {
                return Err(Error::Domain(format!(
                    "{x} is not in V_{}^{n}",
                    graph.level
                )));
            }
            let w = c * graph.conductance() / graph.tent_integral(i);
            for &j in graph.neighbors(i) {
                *next.entry(j).or_insert_with(Rational::zero) += &w;
            }
            *next.entry(i).or_insert_with(Rational::zero) -=
                &w * Rational::from_integer(graph.neighbors(i).len() as i64);
        }
        stencil = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    Ok(stencil
        .into_iter()
        .map(|(i, c)| (graph.vertex(i).clone(), c))
        .unzip())
}

/// Checks the scheme against the easy basis of `H_{n-1}` and computes `A`.
pub fn scheme_check(
    fractal: &FractalDescriptor,
    points: &[VertexAddress],
    coefficients: &[Rational],
    n: usize,
) -> Result<CoefficientScheme> {
    if n == 0 {
        return Err(Error::Domain("scheme order must be at least 1".into()));
    }
    if points.len() != coefficients.len() || points.is_empty() {
        return Err(Error::Domain(
            "points and coefficients must be nonempty and of equal length".into(),
        ));
    }
    let n0 = fractal.n_boundary;
    let basis = EasyBasis::new(fractal, n)?;
    let apply = |jets: Vec<Jet>| -> Result<Rational> {
        let u = Multiharmonic::with_basis(&basis, jets)?;
        Ok(points
            .iter()
            .zip(coefficients)
            .map(|(y, a)| a * &u.value_at(y))
            .sum())
    };
    let mut failures = Vec::new();
    for i in 0..n {
        for l in 0..n0 {
            let jets = (0..n0)
                .map(|c| {
                    if c == l {
                        Jet::unit(i, i)
                    } else {
                        Jet::zero(i)
                    }
                })
                .collect();
            let v = apply(jets)?;
            if !v.is_zero() {
                failures.push(format!("f_{{{i},{l}}} gives {v}"));
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::Precondition(format!(
            "scheme does not annihilate H_{}: {}",
            n - 1,
            failures.join("; ")
        )));
    }
    let normalizer = apply(vec![Jet::unit(n, n); n0])?;
    if normalizer.is_zero() {
        return Err(Error::Precondition("scheme normalizer A vanishes".into()));
    }
    Ok(CoefficientScheme {
        order: n,
        points: points.to_vec(),
        coefficients: coefficients.to_vec(),
        normalizer,
    })
}

/// `A^{-1} ρ^{-nm} Σ a_j f(F_w y_j)` with `m = |w|`.
pub fn scheme_apply(
    scheme: &CoefficientScheme,
    f: &Multiharmonic,
    word: &[usize],
) -> Result<Rational> {
    let fr = &f.basis.fractal;
    if let Some(&i) = word.iter().find(|&&i| i >= fr.n_maps) {
        return Err(Error::Domain(format!("map index {i} out of range")));
    }
    let mut s = Rational::zero();
    for (y, a) in scheme.points.iter().zip(&scheme.coefficients) {
        let mut w = word.to_vec();
        w.extend(y.word());
        s += a * &f.value_at(&canonical_vertex(fr, &w, y.corner()));
    }
    let scale = fr.rho.pow(-((scheme.order * word.len()) as i32));
    Ok(s * scale / scheme.normalizer.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn sg_domain_of_second_iterate() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let g = build_level_graph(&f, 2);
        let h = VertexFunction::from_fn(&g, |v| Rational::from_integer(v.word_len() as i64));
        assert_eq!(iterate_discrete_laplacian(&g, &h, 2).unwrap().len(), 6);
        let g1 = build_level_graph(&f, 1);
        assert!(
            iterate_discrete_laplacian(&g1, &VertexFunction::constant(&g1, q(1, 1)), 2).is_err()
        );
    }

    #[test]
    fn unit_laplacian_is_reproduced() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let jets = vec![Jet::unit(1, 1); 3];
        let r = verify_one_step(&f, &jets, 2).unwrap();
        assert!(r.holds());
        assert_eq!(r.checked, 12);
    }

    #[test]
    fn sg_junction_stencil_normalizer() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let g = build_level_graph(&f, 1);
        let x = VertexAddress::parse("0/1", &f).unwrap();
        let i = g.index_of(&x).unwrap();
        let mut pts = vec![x.clone()];
        let mut coef = vec![-g.conductance() * Rational::from_integer(4)];
        for &j in g.neighbors(i) {
            pts.push(g.vertex(j).clone());
            coef.push(g.conductance().clone());
        }
        let s = scheme_check(&f, &pts, &coef, 1).unwrap();
        assert_eq!(s.normalizer, q(2, 9));
        coef[1] += q(1, 7);
        assert!(matches!(
            scheme_check(&f, &pts, &coef, 1),
            Err(Error::Precondition(_))
        ));
    }
}
