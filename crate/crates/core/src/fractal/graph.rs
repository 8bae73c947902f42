use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fractal::address::{canonical_vertex, VertexAddress};
use crate::fractal::descriptor::FractalDescriptor;
use crate::rational::Rational;

/// The level-`m` resistance graph `G_m`.
#[derive(Clone, Debug)]
pub struct LevelGraph {
    pub level: usize,
    vertices: Vec<VertexAddress>,
    index: HashMap<VertexAddress, usize>,
    /// cell words of length `m`
    cell_words: Vec<Vec<usize>>,
    /// vertex indices of each cell, by corner
    cells: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    membership: Vec<Vec<usize>>,
    conductance: Rational,
    tent_weight: Rational,
    n_boundary: usize,
}

/// Every word of length `m` over `n` letters in lexicographic order.
pub fn words(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn build_level_graph(fractal: &FractalDescriptor, m: usize) -> LevelGraph {
    let cell_words = words(fractal.n_maps, m);
    let n0 = fractal.n_boundary;
    let mut set = BTreeSet::new();
    let corner_addrs: Vec<Vec<VertexAddress>> = cell_words
        .iter()
        .map(|w| {
            (0..n0)
                .map(|c| {
                    let v = canonical_vertex(fractal, w, c);
                    set.insert(v.clone());
                    v
                })
                .collect()
        })
        .collect();
    let vertices: Vec<VertexAddress> = set.into_iter().collect();
    let index: HashMap<VertexAddress, usize> = vertices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let cells: Vec<Vec<usize>> = corner_addrs
        .iter()
        .map(|cs| cs.iter().map(|v| index[v]).collect())
        .collect();
    let mut nb: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertices.len()];
    let mut membership = vec![Vec::new(); vertices.len()];
    for (k, cell) in cells.iter().enumerate() {
        for &a in cell {
            membership[a].push(k);
            for &b in cell {
                if a != b {
                    nb[a].insert(b);
                }
            }
        }
    }
    LevelGraph {
        level: m,
        vertices,
        index,
        cell_words,
        cells,
        neighbors: nb.into_iter().map(|s| s.into_iter().collect()).collect(),
        membership,
        conductance: fractal.r.pow(-(m as i32)),
        tent_weight: fractal.tent_weight(m),
        n_boundary: n0,
    }
}

impl LevelGraph {
    pub fn vertices(&self) -> &[VertexAddress] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &VertexAddress) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn vertex(&self, i: usize) -> &VertexAddress {
        &self.vertices[i]
    }

    pub fn contains(&self, v: &VertexAddress) -> bool {
        self.index.contains_key(v)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_word(&self, k: usize) -> &[usize] {
        &self.cell_words[k]
    }

    /// Vertex indices of cell `k` by corner.
    pub fn cell(&self, k: usize) -> &[usize] {
        &self.cells[k]
    }

    /// Cells `W(x)` containing vertex `i`.
    pub fn cells_of(&self, i: usize) -> &[usize] {
        &self.membership[i]
    }

    pub fn cell_index(&self, word: &[usize]) -> Option<usize> {
        self.cell_words
            .binary_search_by(|w| w.as_slice().cmp(word))
            .ok()
    }

    /// Edge conductance `r^{-m}`.
    pub fn conductance(&self) -> &Rational {
        &self.conductance
    }

    /// `∫ψ_x^m dμ = #W(x) μ^m / N0`.
    pub fn tent_integral(&self, i: usize) -> Rational {
        &self.tent_weight * Rational::from_integer(self.membership[i].len() as i64)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.neighbors.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.n_boundary)
            .map(|c| self.index[&VertexAddress::boundary(c)])
            .collect()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.vertices[i].is_boundary()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_boundary(i)).collect()
    }

    fn bfs(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(a) = queue.pop_front() {
            let d = dist[a].expect("visited");
            for &b in &self.neighbors[a] {
                if dist[b].is_none() {
                    dist[b] = Some(d + 1);
                    queue.push_back(b);
                }
            }
        }
        dist
    }

    /// Distances from vertex `i` to every vertex.
    pub fn distances_from(&self, i: usize) -> Vec<usize> {
        self.bfs(&[i])
            .into_iter()
            .map(|d| d.expect("level graphs are connected"))
            .collect()
    }

    /// Distances to `V_0`.
    pub fn boundary_distances(&self) -> Vec<usize> {
        self.bfs(&self.boundary_indices())
            .into_iter()
            .map(|d| d.expect("level graphs are connected"))
            .collect()
    }
}

/// Graph distance `d_m(x, y)`.
pub fn m_distance(x: &VertexAddress, y: &VertexAddress, graph: &LevelGraph) -> Result<usize> {
    let i = graph
        .index_of(x)
        .ok_or_else(|| Error::Domain(format!("{x} not in V_{}", graph.level)))?;
    let j = graph
        .index_of(y)
        .ok_or_else(|| Error::Domain(format!("{y} not in V_{}", graph.level)))?;
    Ok(graph.distances_from(i)[j])
}

/// `V_m^n`: vertices at distance at least `n` from `V_0`.
pub fn laplacian_domain(graph: &LevelGraph, n: usize) -> Vec<VertexAddress> {
    graph
        .boundary_distances()
        .into_iter()
        .enumerate()
        .filter(|&(_, d)| d >= n)
        .map(|(i, _)| graph.vertex(i).clone())
        .collect()
}

/// `U_m^n(x)` with its boundary and the shell `L_m^n(x)`.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    pub center: VertexAddress,
    pub level: usize,
    pub order: usize,
    /// cell words, sorted
    pub cells: Vec<Vec<usize>>,
    pub boundary: Vec<VertexAddress>,
    pub shell: Vec<VertexAddress>,
    /// all vertices of the cells
    pub vertices: Vec<VertexAddress>,
}

pub fn neighborhood(graph: &LevelGraph, x: &VertexAddress, n: usize) -> Result<Neighborhood> {
    let n = n.max(1);
    let i = graph
        .index_of(x)
        .ok_or_else(|| Error::Domain(format!("{x} not in V_{}", graph.level)))?;
    if graph.boundary_distances()[i] < n {
        return Err(Error::Domain(format!(
            "{x} is not in V_{}^{n}",
            graph.level
        )));
    }
    let dist = graph.distances_from(i);
    let mut cells = BTreeSet::new();
    for (y, &d) in dist.iter().enumerate() {
        if d < n {
            cells.extend(graph.cells_of(y).iter().copied());
        }
    }
    let shell: Vec<usize> = (0..graph.len()).filter(|&y| dist[y] <= n).collect();
    let boundary: Vec<usize> = shell
        .iter()
        .copied()
        .filter(|&y| graph.is_boundary(y) || !graph.cells_of(y).iter().all(|k| cells.contains(k)))
        .collect();
    let mut verts = BTreeSet::new();
    for &k in &cells {
        verts.extend(graph.cell(k).iter().copied());
    }
    let addr = |v: &[usize]| -> Vec<VertexAddress> {
        let mut out: Vec<VertexAddress> = v.iter().map(|&j| graph.vertex(j).clone()).collect();
        out.sort();
        out
    };
    Ok(Neighborhood {
        center: x.clone(),
        level: graph.level,
        order: n,
        cells: cells.iter().map(|&k| graph.cell_word(k).to_vec()).collect(),
        boundary: addr(&boundary),
        shell: addr(&shell),
        vertices: addr(&verts.into_iter().collect::<Vec<_>>()),
    })
}

/// Groups neighborhoods into shape classes: cell-vertex incidence plus straight lines made of several
/// cell edges, up to isomorphism fixing the center and boundary marks.
pub fn classify_neighborhood_types(
    fractal: &FractalDescriptor,
    hoods: &[Neighborhood],
) -> Vec<Vec<usize>> {
    use petgraph::algo::is_isomorphic_matching;
    use petgraph::graph::UnGraph;

    let to_graph = |h: &Neighborhood| -> UnGraph<u8, ()> {
        let mut g = UnGraph::new_undirected();
        let bset: BTreeSet<&VertexAddress> = h.boundary.iter().collect();
        let mut vmap: BTreeMap<VertexAddress, petgraph::graph::NodeIndex> = BTreeMap::new();
        for v in &h.vertices {
            let tag = if v == &h.center {
                2
            } else if bset.contains(v) {
                1
            } else {
                0
            };
            vmap.insert(v.clone(), g.add_node(tag));
        }
        let mut lines: BTreeMap<(Vec<usize>, usize, usize), BTreeSet<VertexAddress>> =
            BTreeMap::new();
        let mut edge_count: BTreeMap<(Vec<usize>, usize, usize), usize> = BTreeMap::new();
        for w in &h.cells {
            let c = g.add_node(3);
            for k in 0..fractal.n_boundary {
                let v = canonical_vertex(fractal, w, k);
                g.add_edge(c, vmap[&v], ());
                for k2 in k + 1..fractal.n_boundary {
                    let key = fractal.ancestor_edge(w, k, k2);
                    let set = lines.entry(key.clone()).or_default();
                    set.insert(v.clone());
                    set.insert(canonical_vertex(fractal, w, k2));
                    *edge_count.entry(key).or_default() += 1;
                }
            }
        }
        for (key, verts) in lines {
            if edge_count[&key] < 2 {
                continue;
            }
            let l = g.add_node(4);
            for v in verts {
                g.add_edge(l, vmap[&v], ());
            }
        }
        g
    };
    let graphs: Vec<UnGraph<u8, ()>> = hoods.iter().map(to_graph).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let hit = classes.iter_mut().find(|cl| {
            let rep = &graphs[cl[0]];
            rep.node_count() == g.node_count()
                && rep.edge_count() == g.edge_count()
                && is_isomorphic_matching(rep, g, |a, b| a == b, |_, _| true)
        });
        match hit {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg() -> FractalDescriptor {
        FractalDescriptor::builtin("sg").unwrap()
    }

    #[test]
    fn level_one_sizes() {
        let g = build_level_graph(&sg(), 1);
        assert_eq!((g.len(), g.edge_count()), (6, 9));
        for (name, n) in [("sg3", 10), ("hg", 12), ("sg4", 10)] {
            let f = FractalDescriptor::builtin(name).unwrap();
            assert_eq!(build_level_graph(&f, 1).len(), n, "{name}");
        }
    }

    #[test]
    fn sg_vertex_counts() {
        let f = sg();
        for m in 0..=5u32 {
            assert_eq!(
                build_level_graph(&f, m as usize).len(),
                (3usize.pow(m + 1) + 3) / 2
            );
        }
    }

    #[test]
    fn sg_distances() {
        let f = sg();
        let g1 = build_level_graph(&f, 1);
        let q0 = VertexAddress::boundary(0);
        assert_eq!(
            m_distance(&q0, &VertexAddress::boundary(1), &g1).unwrap(),
            2
        );
        assert_eq!(m_distance(&q0, &q0, &g1).unwrap(), 0);
        let g2 = build_level_graph(&f, 2);
        let y = canonical_vertex(&f, &[1, 1], 0);
        assert_eq!(m_distance(&q0, &y, &g2).unwrap(), 3);
    }

    #[test]
    fn sg_domains() {
        let g2 = build_level_graph(&sg(), 2);
        assert_eq!(laplacian_domain(&g2, 1).len(), 12);
        assert_eq!(laplacian_domain(&g2, 2).len(), 6);
        assert!(laplacian_domain(&g2, 10).is_empty());
    }

    #[test]
    fn junction_neighborhood() {
        let f = sg();
        let g = build_level_graph(&f, 1);
        let x = canonical_vertex(&f, &[0], 1);
        let h = neighborhood(&g, &x, 1).unwrap();
        assert_eq!(h.cells.len(), 2);
        assert_eq!(h.boundary.len(), 4);
        assert!(neighborhood(&g, &VertexAddress::boundary(0), 1).is_err());
    }

    #[test]
    fn hg_tip_is_inner() {
        let f = FractalDescriptor::builtin("hg").unwrap();
        let g = build_level_graph(&f, 1);
        let x = canonical_vertex(&f, &[3], 1);
        let h = neighborhood(&g, &x, 1).unwrap();
        let tip = canonical_vertex(&f, &[3], 0);
        assert!(h.vertices.contains(&tip) && !h.boundary.contains(&tip));
    }
}
