#![allow(dead_code)]

use pcf_calculus::jets::{EasyBasis, Jet, LocalChart, LocalFunction};
use pcf_calculus::{FractalDescriptor, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(-20..=20), rng.random_range(1..=9))
}

pub fn random_jets(rng: &mut ChaCha8Rng, n0: usize, n: usize) -> Vec<Jet> {
    (0..n0)
        .map(|_| Jet((0..=n).map(|_| random_rational(rng)).collect()))
        .collect()
}

/// Boundary jets of `Q_{j1}` at `q_0`.
pub fn q_j1_jets(alpha: &[Rational], n0: usize, j: usize) -> Vec<Jet> {
    let mut jets = vec![Jet::unit(j, j)];
    for _ in 1..n0 {
        jets.push(Jet((0..=j).map(|i| alpha[j - i].clone()).collect()));
    }
    jets
}

/// `sup |u|` over the vertices of `U(x)` at level `m_0 + depth`.
pub fn local_sup(
    basis: &EasyBasis,
    chart: &LocalChart,
    u: &LocalFunction,
    depth: usize,
) -> Rational {
    u.sample(basis, chart, chart.level, depth)
        .unwrap()
        .sup_norm()
}

pub fn builtin(name: &str) -> FractalDescriptor {
    FractalDescriptor::builtin(name).unwrap()
}
