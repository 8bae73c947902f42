//! Harmonic extension, graph Laplacians, energies and derivative estimates.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, words, FractalDescriptor, LevelGraph, VertexAddress,
};
use crate::linalg::{poly_from_roots, Matrix};
use crate::rational::Rational;

/// Values on (part of) `V_m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VertexFunction {
    pub level: usize,
    values: BTreeMap<VertexAddress, Rational>,
}

impl VertexFunction {
    pub fn new(level: usize) -> Self {
        VertexFunction {
            level,
            values: BTreeMap::new(),
        }
    }

    pub fn from_map(level: usize, values: BTreeMap<VertexAddress, Rational>) -> Self {
        VertexFunction { level, values }
    }

    /// Samples `f` at every vertex of the graph.
    pub fn from_fn(graph: &LevelGraph, mut f: impl FnMut(&VertexAddress) -> Rational) -> Self {
        let values = graph.vertices().iter().map(|v| (v.clone(), f(v))).collect();
        VertexFunction {
            level: graph.level,
            values,
        }
    }

    pub fn constant(graph: &LevelGraph, c: Rational) -> Self {
        Self::from_fn(graph, |_| c.clone())
    }

    pub fn get(&self, v: &VertexAddress) -> Option<&Rational> {
        self.values.get(v)
    }

    pub fn value(&self, v: &VertexAddress) -> Result<&Rational> {
        self.values
            .get(v)
            .ok_or_else(|| Error::Domain(format!("function undefined at {v}")))
    }

    pub fn insert(&mut self, v: VertexAddress, x: Rational) {
        self.values.insert(v, x);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexAddress, &Rational)> {
        self.values.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &VertexAddress> {
        self.values.keys()
    }

    pub fn map(&self, mut f: impl FnMut(&Rational) -> Rational) -> Self {
        VertexFunction {
            level: self.level,
            values: self.values.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        }
    }

    /// Pointwise combination on the common domain.
    pub fn zip_with(
        &self,
        other: &Self,
        mut f: impl FnMut(&Rational, &Rational) -> Rational,
    ) -> Self {
        let values = self
            .values
            .iter()
            .filter_map(|(k, a)| other.values.get(k).map(|b| (k.clone(), f(a, b))))
            .collect();
        VertexFunction {
            level: self.level.max(other.level),
            values,
        }
    }

    /// Largest absolute value.
    pub fn sup_norm(&self) -> Rational {
        self.values
            .values()
            .fold(Rational::zero(), |acc, v| acc.max_ref(&v.abs()).clone())
    }
}

/// The maps `M_l` with `(M_l u)_c = h(F_l q_c)` for the harmonic `h` with boundary data `u`.
#[derive(Clone, Debug)]
pub struct HarmonicExtension {
    pub matrices: Vec<Matrix>,
    level1: LevelGraph,
    /// harmonic values on `V_1`, one column per boundary vertex
    values: Matrix,
    interior: Vec<usize>,
    /// inverse of the unit-conductance interior block of the level-1 Laplacian
    dirichlet_inverse: Matrix,
}

/// Unit-conductance Laplacian rows of `G_1` restricted to the interior vertices.
fn level1_blocks(g: &LevelGraph) -> (Vec<usize>, Matrix, Matrix) {
    let interior = g.interior_indices();
    let pos: BTreeMap<usize, usize> = interior.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let bnd = g.boundary_indices();
    let ni = interior.len();
    let mut lii = Matrix::zeros(ni, ni);
    let mut lib = Matrix::zeros(ni, bnd.len());
    for (k, &i) in interior.iter().enumerate() {
        lii[(k, k)] = Rational::from_integer(-(g.neighbors(i).len() as i64));
        for &j in g.neighbors(i) {
            if let Some(&kj) = pos.get(&j) {
                lii[(k, kj)] += Rational::one();
            } else {
                let c = g.vertex(j).corner();
                lib[(k, c)] += Rational::one();
            }
        }
    }
    (interior, lii, lib)
}

pub fn compute_harmonic_extension(fractal: &FractalDescriptor) -> Result<HarmonicExtension> {
    let g = build_level_graph(fractal, 1);
    let n0 = fractal.n_boundary;
    let (interior, lii, lib) = level1_blocks(&g);
    let inv = lii.inverse().map_err(|_| {
        Error::Descriptor(format!(
            "{}: level-1 interior system is singular",
            fractal.name
        ))
    })?;
    let mut values = Matrix::zeros(g.len(), n0);
    let h_int = inv.mul(&lib)?.scale(&-Rational::one());
    for c in 0..n0 {
        let b = g
            .index_of(&VertexAddress::boundary(c))
            .expect("boundary present");
        values[(b, c)] = Rational::one();
        for (k, &i) in interior.iter().enumerate() {
            values[(i, c)] = h_int[(k, c)].clone();
        }
    }
    let mut matrices = Vec::with_capacity(fractal.n_maps);
    for l in 0..fractal.n_maps {
        let mut m = Matrix::zeros(n0, n0);
        for c in 0..n0 {
            let v = canonical_vertex(fractal, &[l], c);
            let i = g.index_of(&v).expect("level-1 vertex");
            for c2 in 0..n0 {
                m[(c, c2)] = values[(i, c2)].clone();
            }
        }
        matrices.push(m);
    }
    Ok(HarmonicExtension {
        matrices,
        level1: g,
        values,
        interior,
        dirichlet_inverse: inv,
    })
}

impl HarmonicExtension {
    pub fn level1(&self) -> &LevelGraph {
        &self.level1
    }

    /// Harmonic value at level-1 vertex index `i` for boundary data `u`.
    pub fn level1_value(&self, i: usize, u: &[Rational]) -> Rational {
        self.values.row(i).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn dirichlet_inverse(&self) -> &Matrix {
        &self.dirichlet_inverse
    }

    /// Every row of every `M_l` sums to one.
    pub fn rows_sum_to_one(&self) -> bool {
        self.matrices
            .iter()
            .all(|m| (0..m.rows()).all(|i| m.row(i).iter().cloned().sum::<Rational>().is_one()))
    }

    /// Characteristic polynomial of `M_l` equals that of `{1, r, λ, ...}` for every map fixing a boundary vertex.
    pub fn spectrum_matches(&self, fractal: &FractalDescriptor) -> bool {
        let mut roots = vec![Rational::one(), fractal.r.clone()];
        roots.extend(std::iter::repeat_n(
            fractal.lambda.clone(),
            fractal.n_boundary - 2,
        ));
        let target = poly_from_roots(&roots);
        (0..fractal.n_boundary).all(|c| self.matrices[fractal.fixing_map(c)].char_poly() == target)
    }

    /// Harmonic function with boundary data `u`, sampled on `V_m`.
    pub fn extend(&self, fractal: &FractalDescriptor, u: &[Rational], m: usize) -> VertexFunction {
        let mut f = VertexFunction::new(0);
        for (c, x) in u.iter().enumerate() {
            f.insert(VertexAddress::boundary(c), x.clone());
        }
        for k in 0..m {
            f = self.refine(fractal, &f, k);
        }
        f
    }

    /// Harmonic refinement of a function on `V_k` to `V_{k+1}`, cell by cell.
    pub fn refine(
        &self,
        fractal: &FractalDescriptor,
        f: &VertexFunction,
        k: usize,
    ) -> VertexFunction {
        let mut out = f.clone();
        out.level = k + 1;
        for w in words(fractal.n_maps, k) {
            let u: Vec<Rational> = (0..fractal.n_boundary)
                .map(|c| {
                    f.get(&canonical_vertex(fractal, &w, c))
                        .cloned()
                        .unwrap_or_else(Rational::zero)
                })
                .collect();
            for &i in &self.interior {
                let v = self.level1.vertex(i);
                let mut word = w.clone();
                word.extend(v.word());
                out.insert(
                    canonical_vertex(fractal, &word, v.corner()),
                    self.level1_value(i, &u),
                );
            }
        }
        out
    }
}

/// `Δ_m f(x) = Σ_{y∼x} c_xy (f(y) − f(x))`.
pub fn graph_laplacian(
    graph: &LevelGraph,
    f: &VertexFunction,
    x: &VertexAddress,
) -> Result<Rational> {
    let i = graph
        .index_of(x)
        .ok_or_else(|| Error::Domain(format!("{x} not in V_{}", graph.level)))?;
    if graph.is_boundary(i) {
        return Err(Error::Domain(format!("{x} is a boundary vertex")));
    }
    let fx = f.value(x)?;
    let mut s = Rational::zero();
    for &j in graph.neighbors(i) {
        s += f.value(graph.vertex(j))? - fx;
    }
    Ok(s * graph.conductance())
}

/// `Δ̃_m f(x)`: the graph Laplacian over the tent integral.
pub fn renormalized_laplacian(
    graph: &LevelGraph,
    f: &VertexFunction,
    x: &VertexAddress,
) -> Result<Rational> {
    let d = graph_laplacian(graph, f, x)?;
    let i = graph.index_of(x).expect("checked");
    Ok(d / graph.tent_integral(i))
}

/// `E_m(f) = Σ_edges c_xy (f(x) − f(y))²`.
pub fn energy(graph: &LevelGraph, f: &VertexFunction) -> Result<Rational> {
    let mut s = Rational::zero();
    for (a, b) in graph.edges() {
        let d = f.value(graph.vertex(a))? - f.value(graph.vertex(b))?;
        s += &d * &d;
    }
    Ok(s * graph.conductance())
}

fn sample(
    fractal: &FractalDescriptor,
    f: &VertexFunction,
    word: &[usize],
    c: usize,
) -> Result<Rational> {
    f.value(&canonical_vertex(fractal, word, c)).cloned()
}

fn inner_word(fractal: &FractalDescriptor, w: &[usize], l: usize, m: usize) -> Vec<usize> {
    let fl = fractal.fixing_map(l);
    let mut word = w.to_vec();
    word.extend(std::iter::repeat_n(fl, m));
    word
}

/// Finite-`m` normal derivative at `F_w q_l` seen from the cell `F_w K`, scaled by `r_w^{-1}`.
pub fn normal_derivative_estimate(
    fractal: &FractalDescriptor,
    f: &VertexFunction,
    w: &[usize],
    l: usize,
    m: usize,
) -> Result<Rational> {
    let word = inner_word(fractal, w, l, m);
    let n0 = fractal.n_boundary;
    let mut s = Rational::from_integer(n0 as i64 - 1) * sample(fractal, f, w, l)?;
    for c in (0..n0).filter(|&c| c != l) {
        s -= sample(fractal, f, &word, c)?;
    }
    Ok(s * fractal.r.pow(-((w.len() + m) as i32)))
}

/// Finite-`m` transverse derivative(s) at `F_w q_l`: one value on D3, two on D4.
pub fn transverse_derivative_estimate(
    fractal: &FractalDescriptor,
    f: &VertexFunction,
    w: &[usize],
    l: usize,
    m: usize,
) -> Result<Vec<Rational>> {
    let word = inner_word(fractal, w, l, m);
    let n0 = fractal.n_boundary;
    let vals: Vec<Rational> = (1..n0)
        .map(|k| sample(fractal, f, &word, (l + k) % n0))
        .collect::<Result<_>>()?;
    let scale = fractal.r.pow(-(w.len() as i32)) * fractal.lambda.pow(-(m as i32));
    Ok(fractal
        .transverse_stencils()
        .iter()
        .map(|st| st.iter().zip(&vals).map(|(a, b)| a * b).sum::<Rational>() * &scale)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn sg_first_matrix() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let h = compute_harmonic_extension(&f).unwrap();
        let expect = Matrix::from_rows(vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(2, 5), q(2, 5), q(1, 5)],
            vec![q(2, 5), q(1, 5), q(2, 5)],
        ])
        .unwrap();
        assert_eq!(h.matrices[0], expect);
    }

    #[test]
    fn spectra_and_row_sums() {
        for name in ["sg", "sg3", "hg", "sg4"] {
            let f = FractalDescriptor::builtin(name).unwrap();
            let h = compute_harmonic_extension(&f).unwrap();
            assert!(h.rows_sum_to_one(), "{name}");
            assert!(h.spectrum_matches(&f), "{name}");
        }
    }

    #[test]
    fn sg3_edge_cells_have_their_own_spectrum() {
        let f = FractalDescriptor::builtin("sg3").unwrap();
        let h = compute_harmonic_extension(&f).unwrap();
        let other = poly_from_roots(&[q(1, 1), q(4, 15), q(2, 15)]);
        for l in 3..6 {
            assert_eq!(h.matrices[l].char_poly(), other);
        }
    }

    #[test]
    fn tent_laplacian_on_sg() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let g = build_level_graph(&f, 1);
        let x = canonical_vertex(&f, &[0], 1);
        let tent = VertexFunction::from_fn(&g, |v| {
            if *v == x {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        assert_eq!(graph_laplacian(&g, &tent, &x).unwrap(), q(-20, 3));
        assert!(graph_laplacian(&g, &tent, &VertexAddress::boundary(0)).is_err());
    }

    #[test]
    fn harmonic_functions_are_balanced() {
        let f = FractalDescriptor::builtin("hg").unwrap();
        let h = compute_harmonic_extension(&f).unwrap();
        let u = vec![q(3, 1), q(-1, 2), q(2, 7)];
        let v = h.extend(&f, &u, 2);
        let g = build_level_graph(&f, 2);
        for x in g.vertices().iter().filter(|x| !x.is_boundary()) {
            assert!(graph_laplacian(&g, &v, x).unwrap().is_zero());
        }
    }

    #[test]
    fn easy_normal_derivative_is_two_on_d3() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let h = compute_harmonic_extension(&f).unwrap();
        let v = h.extend(&f, &[q(1, 1), q(0, 1), q(0, 1)], 4);
        for m in 0..=4 {
            assert_eq!(
                normal_derivative_estimate(&f, &v, &[], 0, m).unwrap(),
                q(2, 1)
            );
        }
    }
}
