//! The easy basis `f_{jl}` (with `Δ^i f_{jl}(q_{l'}) = δ_{ij} δ_{ll'}`) and its normal-derivative constants.

use std::borrow::Cow;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, symmetry_action, FractalDescriptor, LevelGraph,
    VertexAddress,
};
use crate::harmonic::VertexFunction;
use crate::linalg::Matrix;
use crate::rational::Rational;

/// `a_j = ∂_n f_{jl}(q_l)`, `b_j = ∂_n f_{jl}(q_{l'})`, and the pointwise-formula constants `c_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EasyBasisConstants {
    pub order: usize,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    /// `∫ f_{jl} dμ`
    pub integrals: Vec<Rational>,
}

/// Easy basis up to order `n`: constants, `V_1` values of `f_{j0}`, and the child maps on corner jets.
#[derive(Clone, Debug)]
pub struct EasyBasis {
    pub fractal: FractalDescriptor,
    pub constants: EasyBasisConstants,
    /// `values[j]` is `f_{j0}` on `V_1`
    pub values: Vec<VertexFunction>,
    /// `child[i]` maps normalized corner jets of `g` to those of `g ∘ F_i`
    child: Vec<Matrix>,
    /// `V_1 \ V_0` with `f_{jl}(v)` indexed `[j][l]`
    interior: Vec<(VertexAddress, Vec<Vec<Rational>>)>,
}

pub fn easy_basis_constants(fractal: &FractalDescriptor, n: usize) -> Result<EasyBasisConstants> {
    Ok(EasyBasis::new(fractal, n)?.constants)
}

/// Neighbors of `x` within each level-1 cell containing it.
fn cell_neighbors(g: &LevelGraph, x: usize) -> Vec<Vec<usize>> {
    g.cells_of(x)
        .iter()
        .map(|&k| g.cell(k).iter().copied().filter(|&y| y != x).collect())
        .collect()
}

impl EasyBasis {
    pub fn new(fractal: &FractalDescriptor, n: usize) -> Result<Self> {
        let f = fractal;
        let g1 = build_level_graph(f, 1);
        let n0 = f.n_boundary;
        let interior = g1.interior_indices();
        let ni = interior.len();
        let pos: BTreeMap<usize, usize> =
            interior.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let rho = &f.rho;
        let rho_pow: Vec<Rational> = (0..=n).map(|t| rho.pow(t as i32)).collect();
        let q0 = g1
            .index_of(&VertexAddress::boundary(0))
            .expect("boundary vertex");

        let mut a = vec![f.degree0()];
        let mut b = vec![-Rational::one()];
        let mut integrals = vec![Rational::new(1, n0 as i64)];
        // values[j][vertex index]
        let mut vals: Vec<Vec<Rational>> = Vec::new();

        for j in 0..=n {
            let extra = if j == 0 { 0 } else { 2 };
            let (ia, ib) = (ni, ni + 1);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            let boundary_value = |v: usize| {
                if j == 0 && v == q0 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            };

            for &x in &interior {
                let mut row = vec![Rational::zero(); ni + extra];
                let mut c = Rational::zero();
                for nbrs in cell_neighbors(&g1, x) {
                    for t in 0..=j {
                        let w = &rho_pow[t];
                        if t == 0 {
                            row[pos[&x]] += w * &a[0];
                            for &y in &nbrs {
                                match pos.get(&y) {
                                    Some(&p) => row[p] += w * &b[0],
                                    None => c += w * &b[0] * boundary_value(y),
                                }
                            }
                        } else if t == j {
                            row[ia] += w * &vals[0][x];
                            for &y in &nbrs {
                                row[ib] += w * &vals[0][y];
                            }
                        } else {
                            c += w * &a[t] * &vals[j - t][x];
                            for &y in &nbrs {
                                c += w * &b[t] * &vals[j - t][y];
                            }
                        }
                    }
                }
                rows.push(row);
                rhs.push(-c);
            }

            if j > 0 {
                let r_inv = f.r.recip()?;
                for l in 0..2 {
                    let fix = f.fixing_map(l);
                    let others: Vec<usize> = (0..n0)
                        .filter(|&c| c != l)
                        .map(|c| {
                            g1.index_of(&canonical_vertex(f, &[fix], c))
                                .expect("level-1 vertex")
                        })
                        .collect();
                    let mut row = vec![Rational::zero(); ni + extra];
                    let mut c = Rational::zero();
                    row[if l == 0 { ia } else { ib }] -= Rational::one();
                    for t in 0..=j {
                        let w = &rho_pow[t] * &r_inv;
                        if t == j {
                            if l == 0 {
                                row[ia] += &w;
                            }
                            for &y in &others {
                                row[ib] += &w * &vals[0][y];
                            }
                        } else if t == 0 {
                            for &y in &others {
                                match pos.get(&y) {
                                    Some(&p) => row[p] += &w * &b[0],
                                    None => c += &w * &b[0] * boundary_value(y),
                                }
                            }
                        } else {
                            for &y in &others {
                                c += &w * &b[t] * &vals[j - t][y];
                            }
                        }
                    }
                    rows.push(row);
                    rhs.push(-c);
                }
                let mut row = vec![Rational::zero(); ni + extra];
                row[ia] = Rational::one();
                row[ib] = f.degree0();
                rows.push(row);
                rhs.push(integrals[j - 1].clone());
            }

            let sol = Matrix::from_rows(rows)?.solve(&rhs).map_err(|e| {
                Error::Descriptor(format!(
                    "{}: easy-basis system at order {j} not uniquely solvable ({e})",
                    f.name
                ))
            })?;
            let mut v = vec![Rational::zero(); g1.len()];
            for (k, &i) in interior.iter().enumerate() {
                v[i] = sol[k].clone();
            }
            if j == 0 {
                v[q0] = Rational::one();
            } else {
                a.push(sol[ia].clone());
                b.push(sol[ib].clone());
            }
            vals.push(v);

            if j > 0 {
                let mut known = Rational::zero();
                let mut top = Rational::zero();
                for i in 0..f.n_maps {
                    for c in 0..n0 {
                        let y = g1
                            .index_of(&canonical_vertex(f, &[i], c))
                            .expect("level-1 vertex");
                        top += &vals[0][y];
                        for k in 0..j {
                            known += &rho_pow[k] * &vals[j - k][y] * &integrals[k];
                        }
                    }
                }
                let denom = Rational::one() - &f.mu * &rho_pow[j] * top;
                integrals.push((&f.mu * known).checked_div(&denom)?);
            }
        }

        let scale = f.degree0().recip()?;
        let mut c = vec![Rational::one()];
        for j in 1..=n {
            let s: Rational = (0..j).map(|s| &b[j - s] * &c[s]).sum();
            c.push(&a[j] * &scale + s);
        }

        let values: Vec<VertexFunction> = vals
            .iter()
            .map(|v| {
                VertexFunction::from_map(
                    1,
                    g1.vertices()
                        .iter()
                        .cloned()
                        .zip(v.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let constants = EasyBasisConstants {
            order: n,
            a,
            b,
            c,
            integrals,
        };
        let mut basis = EasyBasis {
            fractal: f.clone(),
            constants,
            values,
            child: Vec::new(),
            interior: Vec::new(),
        };
        basis.child = (0..f.n_maps)
            .map(|i| basis.child_matrix(i))
            .collect::<Result<_>>()?;
        basis.interior = interior
            .iter()
            .map(|&i| {
                let v = g1.vertex(i).clone();
                let table = (0..=n)
                    .map(|j| {
                        (0..n0)
                            .map(|l| basis.value(j, l, &v))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((v, table))
            })
            .collect::<Result<_>>()?;
        Ok(basis)
    }

    pub fn order(&self) -> usize {
        self.constants.order
    }

    /// `f_{jl}(v)` for a level-1 vertex `v`.
    pub fn value(&self, j: usize, l: usize, v: &VertexAddress) -> Result<Rational> {
        let f = &self.fractal;
        let to_q0 = f
            .group()
            .elements()
            .iter()
            .find(|g| g.boundary[l] == 0)
            .ok_or_else(|| {
                Error::Descriptor(format!("{}: no symmetry moves q_{l} to q_0", f.name))
            })?;
        let image = symmetry_action(f, &to_q0.boundary, v)?;
        Ok(self.values[j].value(&image)?.clone())
    }

    fn child_matrix(&self, i: usize) -> Result<Matrix> {
        let f = &self.fractal;
        let n = self.order();
        let n0 = f.n_boundary;
        let w = n + 1;
        let mut t = Matrix::zeros(n0 * w, n0 * w);
        for c in 0..n0 {
            let v = canonical_vertex(f, &[i], c);
            for l in 0..n0 {
                for s in 0..=n {
                    let fv = self.value(s, l, &v)?;
                    if fv.is_zero() {
                        continue;
                    }
                    for k in 0..=n - s {
                        t[(c * w + k, l * w + k + s)] = f.rho.pow(k as i32) * &fv;
                    }
                }
            }
        }
        Ok(t)
    }

    /// Map on normalized corner jets (`Δ^k (h ∘ F_w)` at `q_c`, flattened `c * (n+1) + k`) for child `i`.
    pub fn child(&self, i: usize) -> &Matrix {
        &self.child[i]
    }

    /// Level-1 interior vertices with their easy-basis values `f_{jl}(v)`.
    pub fn interior(&self) -> &[(VertexAddress, Vec<Vec<Rational>>)] {
        &self.interior
    }

    /// [`Self::child`] restricted to jets of order `n <= self.order()`.
    pub fn child_for(&self, i: usize, n: usize) -> Cow<'_, Matrix> {
        let full = self.order();
        if n == full {
            return Cow::Borrowed(&self.child[i]);
        }
        let n0 = self.fractal.n_boundary;
        let keep: Vec<usize> = (0..n0)
            .flat_map(|c| (0..=n).map(move |k| c * (full + 1) + k))
            .collect();
        let mut t = Matrix::zeros(keep.len(), keep.len());
        for (a, &i0) in keep.iter().enumerate() {
            for (b, &j0) in keep.iter().enumerate() {
                t[(a, b)] = self.child[i][(i0, j0)].clone();
            }
        }
        Cow::Owned(t)
    }

    /// `∂_n` of `Δ^i u` at corner `l` of a level-`m` cell, up to the factor `r^{-m}`, from the cell's corner jets.
    pub fn normal_derivative(
        &self,
        corner_jets: &[&[Rational]],
        l: usize,
        i: usize,
        m: usize,
    ) -> Rational {
        let n = corner_jets[0].len() - 1;
        let k = &self.constants;
        let mut s = Rational::zero();
        for t in 0..=n - i {
            let w = self.fractal.rho.pow((m * t) as i32);
            let mut term = &k.a[t] * &corner_jets[l][i + t];
            for (c, jet) in corner_jets.iter().enumerate() {
                if c != l {
                    term += &k.b[t] * &jet[i + t];
                }
            }
            s += w * term;
        }
        s
    }
}
