//! Exact calculus of higher-order Laplacians and multiharmonic functions on
//! fully symmetric p.c.f. fractals: SG, SG3, the hexagasket and SG4.

pub mod error;
pub mod fractal;
pub mod harmonic;
pub mod jets;
pub mod lab;
pub mod linalg;
pub mod monomial;
pub mod rational;
pub mod relation;
pub mod seq;

pub use error::{Error, Result};
pub use fractal::{FractalDescriptor, LevelGraph, VertexAddress};
pub use monomial::{build_monomial_table, monomial_sequences, MonomialTable};
pub use rational::Rational;
pub use seq::SemiCirculantSeq;
