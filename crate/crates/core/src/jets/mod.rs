//! Jets `(u, Δu, ..., Δ^n u)` at vertices, multiharmonic subdivision, symmetry projections and weak tangents.

mod easy;
mod field;
mod local;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::fractal::VertexAddress;
use crate::rational::Rational;

pub use easy::{easy_basis_constants, EasyBasis, EasyBasisConstants};
pub use field::{evaluate_multiharmonic, matching_residuals, subdivide_jets, Multiharmonic};
pub use local::{
    project_symmetry, weak_tangent, weak_tangent_defect, weak_tangent_fit, ChartCell, LocalChart,
    LocalFunction, TangentDefect,
};

/// `(u(x), Δu(x), ..., Δ^n u(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Jet(pub Vec<Rational>);

impl Jet {
    pub fn zero(n: usize) -> Self {
        Jet(vec![Rational::zero(); n + 1])
    }

    /// Unit jet: `Δ^j u = 1`, all other entries zero.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![Rational::zero(); n + 1];
        v[j] = Rational::one();
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> &Rational {
        &self.0[0]
    }
}

impl std::ops::Index<usize> for Jet {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// Jets of a function on every vertex of `V_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetField {
    pub level: usize,
    pub order: usize,
    pub jets: BTreeMap<VertexAddress, Jet>,
}

impl JetField {
    pub fn get(&self, v: &VertexAddress) -> Option<&Jet> {
        self.jets.get(v)
    }

    /// Values `Δ^i u` on `V_m`.
    pub fn layer(&self, i: usize) -> crate::harmonic::VertexFunction {
        crate::harmonic::VertexFunction::from_map(
            self.level,
            self.jets
                .iter()
                .map(|(v, j)| (v.clone(), j[i].clone()))
                .collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("jet field serializes")
    }
}
