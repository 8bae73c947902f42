//! Self-similar structures, vertex addressing and level graphs.

pub mod address;
pub mod descriptor;
pub mod graph;
pub mod symmetry;

pub use address::{canonical_vertex, VertexAddress};
pub use descriptor::{FractalDescriptor, SymmetryGenerator};
pub use graph::{
    build_level_graph, classify_neighborhood_types, laplacian_domain, m_distance, neighborhood,
    words, LevelGraph, Neighborhood,
};
pub use symmetry::{symmetry_action, symmetry_word, GroupElement, SymmetryGroup};
