use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::fractal::address::{canonical_vertex, VertexAddress};
use crate::fractal::descriptor::FractalDescriptor;

/// Symmetry `g` with `g(F_i x) = F_{maps[i]}(g_i x)`, where `g_i` permutes `V_0` by `corners[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub boundary: Vec<usize>,
    pub maps: Vec<usize>,
    pub corners: Vec<Vec<usize>>,
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n
        && p.iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

impl GroupElement {
    pub fn new(
        boundary: Vec<usize>,
        maps: Vec<usize>,
        corners: Vec<Vec<usize>>,
        n: usize,
        n0: usize,
    ) -> Result<Self> {
        if !is_perm(&boundary, n0)
            || !is_perm(&maps, n)
            || corners.len() != n
            || !corners.iter().all(|c| is_perm(c, n0))
        {
            return Err(Error::Descriptor(
                "symmetry generator entries are not permutations".into(),
            ));
        }
        Ok(GroupElement {
            boundary,
            maps,
            corners,
        })
    }

    pub fn identity(n: usize, n0: usize) -> Self {
        let id0: Vec<usize> = (0..n0).collect();
        GroupElement {
            boundary: id0.clone(),
            maps: (0..n).collect(),
            corners: vec![id0; n],
        }
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            boundary: compose(&self.boundary, &other.boundary),
            maps: compose(&self.maps, &other.maps),
            corners: (0..other.maps.len())
                .map(|i| compose(&self.corners[other.maps[i]], &other.corners[i]))
                .collect(),
        }
    }
}

/// Finite group keyed by the boundary permutation.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    elements: Vec<GroupElement>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl SymmetryGroup {
    pub fn trivial(n: usize, n0: usize) -> Self {
        let e = GroupElement::identity(n, n0);
        let mut index = BTreeMap::new();
        index.insert(e.boundary.clone(), 0);
        SymmetryGroup {
            elements: vec![e],
            index,
        }
    }

    /// Closure of the generators; a boundary permutation must determine the whole element.
    pub fn generate(gens: &[GroupElement], n: usize, n0: usize) -> Result<Self> {
        let mut g = Self::trivial(n, n0);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for s in gens {
                let prod = s.then_after(&g.elements[i]);
                match g.index.get(&prod.boundary) {
                    Some(&j) => {
                        if g.elements[j] != prod {
                            return Err(Error::Descriptor(format!(
                                "symmetry generators disagree on boundary permutation {:?}",
                                prod.boundary
                            )));
                        }
                    }
                    None => {
                        g.index.insert(prod.boundary.clone(), g.elements.len());
                        g.elements.push(prod);
                        queue.push_back(g.elements.len() - 1);
                    }
                }
            }
        }
        for e in &g.elements {
            if e.corners.iter().any(|c| !g.index.contains_key(c)) {
                return Err(Error::Descriptor(
                    "cell relabeling is not a group element".into(),
                ));
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn find(&self, boundary: &[usize]) -> Option<&GroupElement> {
        self.index.get(boundary).map(|&i| &self.elements[i])
    }
}

/// Image of a vertex under the symmetry with the given boundary permutation.
pub fn symmetry_action(
    fractal: &FractalDescriptor,
    boundary_perm: &[usize],
    v: &VertexAddress,
) -> Result<VertexAddress> {
    let group = fractal.group();
    let mut g = group.find(boundary_perm).ok_or_else(|| {
        Error::Domain(format!(
            "{boundary_perm:?} is not a symmetry of {}",
            fractal.name
        ))
    })?;
    let mut word = Vec::with_capacity(v.word_len());
    for i in v.word() {
        word.push(g.maps[i]);
        g = group.find(&g.corners[i]).expect("closed group");
    }
    Ok(canonical_vertex(fractal, &word, g.boundary[v.corner()]))
}

/// Image of a cell word.
pub fn symmetry_word(
    fractal: &FractalDescriptor,
    boundary_perm: &[usize],
    word: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let group = fractal.group();
    let mut g = group.find(boundary_perm)?;
    let mut out = Vec::with_capacity(word.len());
    for &i in word {
        out.push(g.maps[i]);
        g = group.find(&g.corners[i])?;
    }
    Some((out, g.boundary.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sg_rotation_moves_q0() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        let q0 = VertexAddress::boundary(0);
        let r = [1, 2, 0];
        assert_eq!(
            symmetry_action(&f, &r, &q0).unwrap(),
            VertexAddress::boundary(1)
        );
        let v = canonical_vertex(&f, &[0, 2], 1);
        let mut w = v.clone();
        for _ in 0..3 {
            w = symmetry_action(&f, &r, &w).unwrap();
        }
        assert_eq!(w, v);
    }

    #[test]
    fn non_member_rejected() {
        let f = FractalDescriptor::builtin("sg").unwrap();
        assert!(symmetry_action(&f, &[0, 0, 1], &VertexAddress::boundary(0)).is_err());
    }
}
