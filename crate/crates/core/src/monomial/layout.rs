//! Auxiliary systems, `V_1` values of the monomials, and the level-1 graph system they satisfy.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fractal::{
    build_level_graph, canonical_vertex, symmetry_action, FractalDescriptor, LevelGraph,
    VertexAddress,
};
use crate::harmonic::VertexFunction;
use crate::linalg::Matrix;
use crate::monomial::{MonomialTable, FAMILIES};
use crate::rational::Rational;
use crate::relation::RelationSystem;
use crate::seq::SemiCirculantSeq;

/// Solve the displayed elimination system of family `k` degree by degree.
pub fn auxiliary_sequences(
    table: &MonomialTable,
    k: usize,
) -> Result<BTreeMap<String, SemiCirculantSeq>> {
    let f = &table.fractal;
    let equations = f.auxiliary.get(&k).cloned().unwrap_or_default();
    if equations.is_empty() {
        return Ok(BTreeMap::new());
    }
    let eq_refs: Vec<&str> = equations.iter().map(String::as_str).collect();
    let probe = RelationSystem::new(&[], &eq_refs)?;
    let mut used = Vec::new();
    for eq in &probe.equations {
        for id in eq.identifiers() {
            if f.layout.contains_key(&id) && !used.contains(&id) {
                used.push(id);
            }
        }
    }
    used.sort();
    let names: Vec<&str> = used.iter().map(String::as_str).collect();
    let sys = RelationSystem::new(&names, &eq_refs)?;
    sys.solve(&table.context(), &BTreeMap::new(), table.degree)
}

/// Scale factor of the degree-`j` family-`k` monomial under the map fixing `q_0`.
fn family_scale(f: &FractalDescriptor, k: usize) -> Rational {
    match k {
        1 => Rational::one(),
        2 => f.r.clone(),
        _ => f.lambda.clone(),
    }
}

/// Boundary weights of family `k`: `q_0 -> 0`, `q_1 -> 1`, others by symmetry.
pub fn boundary_weights(f: &FractalDescriptor, k: usize) -> Result<Vec<Rational>> {
    let n0 = f.n_boundary;
    let mut w = vec![Rational::one(); n0];
    w[0] = Rational::zero();
    if k == 3 {
        let mut set = vec![false; n0];
        set[0] = true;
        set[1] = true;
        let s1 = f.skew[1];
        if s1 != 1 {
            w[s1] = -Rational::one();
            set[s1] = true;
        }
        for c in 1..n0 {
            if f.skew[c] == c {
                w[c] = Rational::zero();
                set[c] = true;
            }
        }
        if !set.iter().all(|&b| b) {
            return Err(Error::Descriptor(format!(
                "{}: skew reflection does not determine the transverse boundary data",
                f.name
            )));
        }
    }
    Ok(w)
}

/// Symmetries respected by family `k`, with the sign they introduce.
fn family_symmetries(f: &FractalDescriptor, k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 3 {
        let id: Vec<usize> = (0..f.n_boundary).collect();
        vec![(id, false), (f.skew.clone(), true)]
    } else {
        f.group()
            .elements()
            .iter()
            .filter(|g| g.boundary[0] == 0)
            .map(|g| (g.boundary.clone(), false))
            .collect()
    }
}

fn assign(
    values: &mut BTreeMap<VertexAddress, Rational>,
    v: VertexAddress,
    x: Rational,
) -> Result<()> {
    match values.get(&v) {
        Some(old) if old != &x => Err(Error::Inconsistent {
            degree: 0,
            detail: format!("conflicting values {old} and {x} at {v}"),
        }),
        _ => {
            values.insert(v, x);
            Ok(())
        }
    }
}

/// Values of the degree-`j` family-`k` monomial at `q_0` on `V_1`.
pub fn monomial_values_v1(table: &MonomialTable, k: usize, j: usize) -> Result<VertexFunction> {
    let f = &table.fractal;
    let aux = table.aux.get(&k).ok_or_else(|| {
        Error::Precondition(format!("auxiliary sequences of family {k} not computed"))
    })?;
    let rho_j = f.rho.pow(j as i32);
    let base = table.family(k).get(j).clone();
    let weights = boundary_weights(f, k)?;
    let fix0 = f.fixing_map(0);
    let scale = &family_scale(f, k) * &rho_j;

    let mut seeds = BTreeMap::new();
    let q0 = if k == 1 && j == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    seeds.insert(VertexAddress::boundary(0), q0);
    for c in 1..f.n_boundary {
        let v = &base * &weights[c];
        seeds.insert(canonical_vertex(f, &[fix0], c), &scale * &v);
        seeds.insert(VertexAddress::boundary(c), v);
    }
    for (name, at) in &f.layout {
        let x = match aux.get(name) {
            Some(s) => &rho_j * s.get(j),
            None if k == 3 && symmetry_action(f, &f.skew, at)? == *at => Rational::zero(),
            None => {
                return Err(Error::Precondition(format!(
                    "{}: no auxiliary value {name} for family {k}",
                    f.name
                )));
            }
        };
        assign(&mut seeds, at.clone(), x)?;
    }

    let mut values = BTreeMap::new();
    for (perm, flip) in family_symmetries(f, k) {
        for (v, x) in &seeds {
            let image = symmetry_action(f, &perm, v)?;
            assign(&mut values, image, if flip { -x } else { x.clone() })?;
        }
    }
    let g1 = build_level_graph(f, 1);
    if k == 3 {
        for v in g1.vertices() {
            if !values.contains_key(v) && symmetry_action(f, &f.skew, v)? == *v {
                values.insert(v.clone(), Rational::zero());
            }
        }
    }
    if let Some(v) = g1.vertices().iter().find(|v| !values.contains_key(*v)) {
        return Err(Error::Descriptor(format!(
            "{}: layout leaves {v} unassigned",
            f.name
        )));
    }
    Ok(VertexFunction::from_map(1, values))
}

/// `V_1` values of every monomial found by solving the level-1 graph identities directly.
#[derive(Clone, Debug)]
pub struct GraphRoute {
    /// family index -> degree -> values
    pub values: BTreeMap<usize, Vec<VertexFunction>>,
}

impl GraphRoute {
    /// The value at `q_1` for each degree.
    pub fn boundary_sequence(&self, k: usize) -> Vec<Rational> {
        let q1 = VertexAddress::boundary(1);
        self.values[&k]
            .iter()
            .map(|f| f.get(&q1).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }
}

/// Degrees at which the graph system fixes a monomial only up to a multiple.
fn is_normalization_step(k: usize, j: usize) -> bool {
    (k == 1 && j == 1) || (k != 1 && j == 0)
}

fn seed_value(f: &FractalDescriptor, k: usize) -> Rational {
    match k {
        1 => f.alpha1(),
        2 => f.beta0(),
        _ => f.gamma0(),
    }
}

/// Linear system for the degree-`j` family-`k` values on `V_1 \ {q_0}`.
struct GraphSystem {
    unknowns: Vec<VertexAddress>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl GraphSystem {
    fn matrix(&self) -> Result<Matrix> {
        Matrix::from_rows(self.rows.clone())
    }
}

/// `alpha[i]` must be known for `i < j` (family 1) or `i <= j` (families 2, 3).
fn graph_system(
    f: &FractalDescriptor,
    g1: &LevelGraph,
    k: usize,
    j: usize,
    lower: &[VertexFunction],
    alpha: &[Rational],
) -> Result<GraphSystem> {
    let q0 = VertexAddress::boundary(0);
    let q0_value = if k == 1 && j == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    let unknowns: Vec<VertexAddress> = g1
        .vertices()
        .iter()
        .filter(|v| **v != q0)
        .cloned()
        .collect();
    let pos: BTreeMap<&VertexAddress, usize> =
        unknowns.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = unknowns.len();
    let q1 = pos[&VertexAddress::boundary(1)];
    let mut rows = Vec::new();
    let mut rhs = Vec::new();

    for x in g1.interior_indices() {
        let xv = g1.vertex(x);
        let deg = Rational::from_integer(g1.neighbors(x).len() as i64);
        let mut row = vec![Rational::zero(); n];
        let mut c = Rational::zero();
        for &y in g1.neighbors(x) {
            let yv = g1.vertex(y);
            match pos.get(yv) {
                Some(&p) => row[p] += Rational::one(),
                None => c += &q0_value,
            }
        }
        row[pos[xv]] -= &deg;
        for i in 1..=j {
            let w = &deg * &f.rho.pow(i as i32);
            if k == 1 && i == j {
                row[q1] -= w;
            } else {
                c -= w * &alpha[i] * lower[j - i].value(xv)?;
            }
        }
        rows.push(row);
        rhs.push(-c);
    }

    let fix0 = f.fixing_map(0);
    let scale = &family_scale(f, k) * &f.rho.pow(j as i32);
    for cidx in 1..f.n_boundary {
        let mut row = vec![Rational::zero(); n];
        row[pos[&canonical_vertex(f, &[fix0], cidx)]] += Rational::one();
        row[pos[&VertexAddress::boundary(cidx)]] -= &scale;
        rows.push(row);
        rhs.push(Rational::zero());
    }

    for (perm, flip) in family_symmetries(f, k) {
        for v in &unknowns {
            let image = symmetry_action(f, &perm, v)?;
            if &image == v && !flip {
                continue;
            }
            let mut row = vec![Rational::zero(); n];
            row[pos[v]] += Rational::one();
            let s = if flip {
                Rational::one()
            } else {
                -Rational::one()
            };
            row[pos[&image]] += s;
            rows.push(row);
            rhs.push(Rational::zero());
        }
    }
    Ok(GraphSystem {
        unknowns,
        rows,
        rhs,
    })
}

fn solve_graph_system(
    f: &FractalDescriptor,
    sys: &mut GraphSystem,
    k: usize,
    j: usize,
) -> Result<VertexFunction> {
    if is_normalization_step(k, j) {
        let mut row = vec![Rational::zero(); sys.unknowns.len()];
        let q1 = sys
            .unknowns
            .iter()
            .position(|v| *v == VertexAddress::boundary(1))
            .expect("q_1 present");
        row[q1] = Rational::one();
        sys.rows.push(row);
        sys.rhs.push(seed_value(f, k));
    }
    let a = sys.matrix()?;
    let x = a.solve(&sys.rhs).map_err(|e| match e {
        Error::Singular(detail) => Error::NotSolvable {
            degree: j,
            detail: format!("family {k}: {detail}"),
        },
        other => other,
    })?;
    let mut values: BTreeMap<VertexAddress, Rational> =
        sys.unknowns.iter().cloned().zip(x).collect();
    let q0 = if k == 1 && j == 0 {
        Rational::one()
    } else {
        Rational::zero()
    };
    values.insert(VertexAddress::boundary(0), q0);
    Ok(VertexFunction::from_map(1, values))
}

/// Solve the level-1 identities family by family, degree by degree.
pub fn graph_route(f: &FractalDescriptor, degree: usize) -> Result<GraphRoute> {
    let g1 = build_level_graph(f, 1);
    let q1 = VertexAddress::boundary(1);
    let mut values = BTreeMap::new();
    let mut alpha: Vec<Rational> = Vec::new();
    for k in FAMILIES {
        let mut fam: Vec<VertexFunction> = Vec::with_capacity(degree + 1);
        for j in 0..=degree {
            let mut sys = graph_system(f, &g1, k, j, &fam, &alpha)?;
            let sol = solve_graph_system(f, &mut sys, k, j)?;
            if k == 1 {
                alpha.push(sol.value(&q1)?.clone());
            }
            fam.push(sol);
        }
        values.insert(k, fam);
    }
    Ok(GraphRoute { values })
}

/// Outcome of checking the level-1 identities on assembled `V_1` values.
#[derive(Clone, Debug)]
pub struct NeighborIdentityReport {
    pub degree: usize,
    /// `(family, vertex, residual)` for every nonzero residual
    pub residuals: Vec<(usize, VertexAddress, Rational)>,
    /// `(family, rank, unknowns, normalization rows)` of each degree-`j` system
    pub ranks: Vec<(usize, usize, usize, usize)>,
}

impl NeighborIdentityReport {
    pub fn holds(&self) -> bool {
        self.residuals.is_empty()
            && self
                .ranks
                .iter()
                .all(|&(_, rank, n, norm)| rank + norm == n)
    }
}

/// Check the neighbor-sum identity at every interior `V_1` vertex for degree `j`, and that the
/// degree-`j` system determines the values (up to the normalization steps).
pub fn verify_neighbor_identity(table: &MonomialTable, j: usize) -> Result<NeighborIdentityReport> {
    let f = &table.fractal;
    if j > table.degree || table.v1_layouts.is_empty() {
        return Err(Error::Precondition(format!(
            "V_1 values up to degree {j} not assembled"
        )));
    }
    let g1 = build_level_graph(f, 1);
    let alpha = table.alpha.entries();
    let mut residuals = Vec::new();
    let mut ranks = Vec::new();
    for k in FAMILIES {
        let layouts = &table.v1_layouts[&k];
        let q = &layouts[j];
        for x in g1.interior_indices() {
            let xv = g1.vertex(x);
            let deg = Rational::from_integer(g1.neighbors(x).len() as i64);
            let lhs: Rational = g1
                .neighbors(x)
                .iter()
                .map(|&y| q.value(g1.vertex(y)).cloned())
                .sum::<Result<Rational>>()?;
            let mut rhs = Rational::zero();
            for i in 0..=j {
                rhs += f.rho.pow(i as i32) * &alpha[i] * layouts[j - i].value(xv)?;
            }
            let res = lhs - deg * rhs;
            if !res.is_zero() {
                residuals.push((k, xv.clone(), res));
            }
        }
        let sys = graph_system(f, &g1, k, j, &layouts[..j], alpha)?;
        let norm = usize::from(is_normalization_step(k, j));
        ranks.push((k, sys.matrix()?.rank(), sys.unknowns.len(), norm));
    }
    Ok(NeighborIdentityReport {
        degree: j,
        residuals,
        ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::build_monomial_table;

    #[test]
    fn constant_monomial_is_one_on_v1() {
        for f in FractalDescriptor::all_builtin().unwrap() {
            let t = build_monomial_table(&f, 1).unwrap();
            assert!(
                t.v1_layouts[&1][0].iter().all(|(_, x)| x.is_one()),
                "{}",
                f.name
            );
        }
    }

    #[test]
    fn transverse_values_vanish_on_axis() {
        let f = FractalDescriptor::builtin("sg3").unwrap();
        let t = build_monomial_table(&f, 4).unwrap();
        let center = VertexAddress::parse("3/0", &f).unwrap();
        for j in 0..=4 {
            assert!(t.v1_layouts[&3][j].value(&center).unwrap().is_zero());
        }
    }

    #[test]
    fn scaled_corner_values() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let t = build_monomial_table(&f, 3).unwrap();
        let v = canonical_vertex(&f, &[0], 1);
        let j = 2;
        let rj = f.rho.pow(j as i32);
        assert_eq!(
            t.v1_layouts[&1][j].value(&v).unwrap(),
            &(&rj * t.alpha.get(j))
        );
        assert_eq!(
            t.v1_layouts[&2][j].value(&v).unwrap(),
            &(&f.r * &rj * t.beta.get(j))
        );
        assert_eq!(
            t.v1_layouts[&3][j].value(&v).unwrap(),
            &(&f.lambda * &rj * t.gamma.get(j))
        );
    }

    #[test]
    fn identity_holds_and_detects_perturbation() {
        let f = FractalDescriptor::builtin("sg3").unwrap();
        let mut t = build_monomial_table(&f, 3).unwrap();
        for j in 0..=3 {
            assert!(
                verify_neighbor_identity(&t, j).unwrap().holds(),
                "degree {j}"
            );
        }
        let mut a = t.alpha.entries().to_vec();
        a[2] += Rational::new(1, 1_000_000_000);
        t.alpha = SemiCirculantSeq::new(a, f.rho.clone()).unwrap();
        assert!(!verify_neighbor_identity(&t, 2).unwrap().holds());
    }
}
