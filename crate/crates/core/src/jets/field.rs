use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, FractalDescriptor, LevelGraph, VertexAddress,
};
use crate::rational::Rational;

use super::{EasyBasis, Jet, JetField};

pub(crate) fn flatten(jets: &[&Jet]) -> Vec<Rational> {
    jets.iter().flat_map(|j| j.0.iter().cloned()).collect()
}

pub(crate) fn normalize(jets: &[&Jet], rho: &Rational, m: usize) -> Vec<Rational> {
    let n = jets[0].order();
    let scale: Vec<Rational> = (0..=n).map(|k| rho.pow((m * k) as i32)).collect();
    let mut v = flatten(jets);
    for (i, x) in v.iter_mut().enumerate() {
        *x *= &scale[i % (n + 1)];
    }
    v
}

pub(crate) fn denormalize(g: &[Rational], c: usize, n: usize, rho: &Rational, m: usize) -> Jet {
    Jet((0..=n)
        .map(|k| &g[c * (n + 1) + k] * rho.pow(-((m * k) as i32)))
        .collect())
}

/// Residuals of the matching condition `Σ_cells ∂_n Δ^i u(x) = 0` at every interior vertex, order `i`.
pub fn matching_residuals(
    field: &JetField,
    basis: &EasyBasis,
    graph: &LevelGraph,
) -> Result<Vec<(VertexAddress, usize, Rational)>> {
    let n = field.order;
    if basis.order() < n {
        return Err(Error::Config(format!(
            "easy basis of order {} too small for jets of order {n}",
            basis.order()
        )));
    }
    let mut out = Vec::new();
    for x in graph.interior_indices() {
        for i in 0..=n {
            let mut s = Rational::zero();
            for &k in graph.cells_of(x) {
                let corners: Vec<&[Rational]> = graph
                    .cell(k)
                    .iter()
                    .map(|&y| field.jets.get(graph.vertex(y)).map(|j| j.0.as_slice()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| {
                        Error::Domain(format!(
                            "jet field misses a vertex of level {}",
                            graph.level
                        ))
                    })?;
                let l = graph
                    .cell(k)
                    .iter()
                    .position(|&y| y == x)
                    .expect("cell contains vertex");
                s += basis.normal_derivative(&corners, l, i, field.level);
            }
            out.push((graph.vertex(x).clone(), i, s));
        }
    }
    Ok(out)
}

fn check_field(field: &JetField, graph: &LevelGraph) -> Result<()> {
    if field.jets.len() != graph.len()
        || graph.vertices().iter().any(|v| !field.jets.contains_key(v))
    {
        return Err(Error::Domain(format!(
            "jet field does not cover V_{}",
            field.level
        )));
    }
    if field.jets.values().any(|j| j.order() != field.order) {
        return Err(Error::Domain("jets of mixed order".into()));
    }
    Ok(())
}

fn refine(field: &JetField, basis: &EasyBasis, graph: &LevelGraph) -> JetField {
    let f = &basis.fractal;
    let n = field.order;
    let m = field.level;
    let scale: Vec<Rational> = (0..=n).map(|t| f.rho.pow((m * t) as i32)).collect();
    // weights[v][t][l] = ρ^{mt} f_{tl}(v)
    let weights: Vec<(&VertexAddress, Vec<Vec<Rational>>)> = basis
        .interior()
        .iter()
        .map(|(v, table)| {
            (
                v,
                (0..=n)
                    .map(|t| table[t].iter().map(|x| x * &scale[t]).collect())
                    .collect(),
            )
        })
        .collect();
    let mut jets = field.jets.clone();
    for k in 0..graph.cell_count() {
        let word = graph.cell_word(k);
        let corners: Vec<&Jet> = graph
            .cell(k)
            .iter()
            .map(|&y| &field.jets[graph.vertex(y)])
            .collect();
        for (v, w) in &weights {
            let mut addr = word.to_vec();
            addr.extend(v.word());
            let jet = (0..=n)
                .map(|i| {
                    let mut s = Rational::zero();
                    for t in 0..=n - i {
                        for (l, c) in corners.iter().enumerate() {
                            if !w[t][l].is_zero() && !c[i + t].is_zero() {
                                s += &w[t][l] * &c[i + t];
                            }
                        }
                    }
                    s
                })
                .collect();
            jets.insert(canonical_vertex(f, &addr, v.corner()), Jet(jet));
        }
    }
    JetField {
        level: m + 1,
        order: n,
        jets,
    }
}

fn basis_for(fractal: &FractalDescriptor, order: usize) -> Result<EasyBasis> {
    EasyBasis::new(fractal, order)
}

/// Jets on `V_{m+1}` of the multiharmonic function with the given jets on `V_m`.
pub fn subdivide_jets(field: &JetField, fractal: &FractalDescriptor) -> Result<JetField> {
    let basis = basis_for(fractal, field.order)?;
    let graph = build_level_graph(fractal, field.level);
    check_field(field, &graph)?;
    let bad: Vec<String> = matching_residuals(field, &basis, &graph)?
        .into_iter()
        .filter(|(_, _, r)| !r.is_zero())
        .map(|(v, i, _)| format!("{v} (order {i})"))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "matching condition fails at {}",
            bad.join(", ")
        )));
    }
    Ok(refine(field, &basis, &graph))
}

/// Jets on `V_m` of the unique `u ∈ H_n` with the given boundary jets.
pub fn evaluate_multiharmonic(
    fractal: &FractalDescriptor,
    boundary_jets: &[Jet],
    m: usize,
) -> Result<JetField> {
    let u = Multiharmonic::new(fractal, boundary_jets.to_vec())?;
    Ok(u.field(m))
}

/// A multiharmonic function on `K`, given by its boundary jets.
#[derive(Clone, Debug)]
pub struct Multiharmonic {
    pub basis: EasyBasis,
    pub boundary: Vec<Jet>,
}

impl Multiharmonic {
    pub fn new(fractal: &FractalDescriptor, boundary: Vec<Jet>) -> Result<Self> {
        let basis = basis_for(fractal, Self::order_of(fractal, &boundary)?)?;
        Ok(Multiharmonic { basis, boundary })
    }

    pub fn with_basis(basis: &EasyBasis, boundary: Vec<Jet>) -> Result<Self> {
        let n = Self::order_of(&basis.fractal, &boundary)?;
        if n > basis.order() {
            return Err(Error::Config(format!(
                "easy basis of order {} too small for order {n}",
                basis.order()
            )));
        }
        Ok(Multiharmonic {
            basis: basis.clone(),
            boundary,
        })
    }

    fn order_of(fractal: &FractalDescriptor, boundary: &[Jet]) -> Result<usize> {
        if boundary.len() != fractal.n_boundary {
            return Err(Error::Domain(format!(
                "{} boundary jets given, {} expected",
                boundary.len(),
                fractal.n_boundary
            )));
        }
        let n = boundary[0].order();
        if boundary.iter().any(|j| j.order() != n) {
            return Err(Error::Domain("boundary jets of mixed order".into()));
        }
        Ok(n)
    }

    pub fn order(&self) -> usize {
        self.boundary[0].order()
    }

    /// Normalized corner jets of `u ∘ F_w`.
    pub fn cell_jets(&self, word: &[usize]) -> Vec<Rational> {
        let refs: Vec<&Jet> = self.boundary.iter().collect();
        let n = self.order();
        let mut g = flatten(&refs);
        for &i in word {
            g = self
                .basis
                .child_for(i, n)
                .mul_vec(&g)
                .expect("child map shape");
        }
        g
    }

    pub fn jet_at(&self, v: &VertexAddress) -> Jet {
        let g = self.cell_jets(&v.word());
        denormalize(
            &g,
            v.corner(),
            self.order(),
            &self.basis.fractal.rho,
            v.word_len(),
        )
    }

    pub fn value_at(&self, v: &VertexAddress) -> Rational {
        self.jet_at(v).0[0].clone()
    }

    pub fn field(&self, m: usize) -> JetField {
        let f = &self.basis.fractal;
        let mut field = JetField {
            level: 0,
            order: self.order(),
            jets: (0..f.n_boundary)
                .map(|c| (VertexAddress::boundary(c), self.boundary[c].clone()))
                .collect(),
        };
        for level in 0..m {
            field = refine(&field, &self.basis, &build_level_graph(f, level));
        }
        field
    }
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::build_monomial_table;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn constant_jets_stay_constant() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let one = Jet(vec![q(1, 1), q(0, 1)]);
        let field = evaluate_multiharmonic(&f, &vec![one.clone(); 3], 3).unwrap();
        assert!(field.jets.values().all(|j| *j == one));
        assert_eq!(field.jets.len(), 42);
    }

    #[test]
    fn harmonic_layer_matches_extension() {
        let f = FractalDescriptor::builtin("sg3").unwrap();
        let h = crate::harmonic::compute_harmonic_extension(&f).unwrap();
        let u = [q(2, 1), q(-1, 3), q(5, 7)];
        let expect = h.extend(&f, &u, 2);
        let jets: Vec<Jet> = u
            .iter()
            .map(|x| Jet(vec![x.clone(), q(0, 1), q(0, 1)]))
            .collect();
        let field = evaluate_multiharmonic(&f, &jets, 2).unwrap();
        assert_eq!(field.layer(0), expect);
    }

    #[test]
    fn point_evaluation_agrees_with_field() {
        let f = FractalDescriptor::builtin("hg").unwrap();
        let jets = vec![
            Jet(vec![q(1, 1), q(2, 1)]),
            Jet(vec![q(0, 1), q(-1, 1)]),
            Jet(vec![q(3, 1), q(1, 2)]),
        ];
        let u = Multiharmonic::new(&f, jets).unwrap();
        let field = u.field(2);
        for (v, j) in &field.jets {
            assert_eq!(&u.jet_at(v), j);
        }
    }

    #[test]
    fn subdivision_rejects_broken_matching() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let jets = vec![
            Jet(vec![q(1, 1), q(0, 1)]),
            Jet(vec![q(0, 1), q(0, 1)]),
            Jet(vec![q(0, 1), q(0, 1)]),
        ];
        let mut field = evaluate_multiharmonic(&f, &jets, 1).unwrap();
        subdivide_jets(&field, &f).unwrap();
        let v = VertexAddress::parse("0/1", &f).unwrap();
        field.jets.get_mut(&v).unwrap().0[1] += q(1, 100);
        assert!(matches!(
            subdivide_jets(&field, &f),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn monomial_jets_reproduce_v1_layout() {
        for name in ["sg", "sg4"] {
            let f = FractalDescriptor::builtin(name).unwrap();
            let t = build_monomial_table(&f, 3).unwrap();
            let j = 2;
            let k = 1;
            let alpha = t.alpha.entries();
            let mut jets = vec![Jet((0..=j)
                .map(|i| if i == j { q(1, 1) } else { q(0, 1) })
                .collect())];
            for _ in 1..f.n_boundary {
                jets.push(Jet((0..=j).map(|i| alpha[j - i].clone()).collect()));
            }
            let field = evaluate_multiharmonic(&f, &jets, 1).unwrap();
            assert_eq!(field.layer(0), t.v1_layouts[&k][j], "{name}");
        }
    }
}
