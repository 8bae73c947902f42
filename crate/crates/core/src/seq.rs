//! Truncated generating sequences of lower-triangular Toeplitz matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Entries `d_0..=d_J` of a semi-circulant matrix, with the scaling `rho` used by `tau`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiCirculantSeq {
    entries: Vec<Rational>,
    rho: Rational,
}

impl SemiCirculantSeq {
    pub fn new(entries: Vec<Rational>, rho: Rational) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("sequence needs at least one entry".into()));
        }
        Ok(SemiCirculantSeq { entries, rho })
    }

    /// The identity `(1, 0, 0, ...)`.
    pub fn identity(degree: usize, rho: Rational) -> Self {
        Self::scalar(Rational::one(), degree, rho)
    }

    pub fn scalar(c: Rational, degree: usize, rho: Rational) -> Self {
        let mut entries = vec![Rational::zero(); degree + 1];
        entries[0] = c;
        SemiCirculantSeq { entries, rho }
    }

    pub fn zeros(degree: usize, rho: Rational) -> Self {
        SemiCirculantSeq {
            entries: vec![Rational::zero(); degree + 1],
            rho,
        }
    }

    pub fn degree(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.entries[j]
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::Config(format!(
                "truncation degree mismatch: {} vs {}",
                self.degree(),
                other.degree()
            )));
        }
        if self.rho != other.rho {
            return Err(Error::Config(format!(
                "rho mismatch: {} vs {}",
                self.rho, other.rho
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SemiCirculantSeq {
            entries,
            rho: self.rho.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SemiCirculantSeq {
            entries,
            rho: self.rho.clone(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SemiCirculantSeq {
            entries: self.entries.iter().map(|a| a * c).collect(),
            rho: self.rho.clone(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(SemiCirculantSeq {
            entries: cauchy(&self.entries, &other.entries),
            rho: self.rho.clone(),
        })
    }

    /// Entry `j` scaled by `rho^{-j}`.
    pub fn tau(&self) -> Self {
        let inv = self.rho.recip().expect("rho is nonzero");
        let mut f = Rational::one();
        let mut entries = Vec::with_capacity(self.entries.len());
        for a in &self.entries {
            entries.push(a * &f);
            f = &f * &inv;
        }
        SemiCirculantSeq {
            entries,
            rho: self.rho.clone(),
        }
    }

    /// Same entries under a different scaling context.
    pub fn with_rho(&self, rho: Rational) -> Self {
        SemiCirculantSeq {
            entries: self.entries.clone(),
            rho,
        }
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let n = (degree + 1).min(self.entries.len());
        SemiCirculantSeq {
            entries: self.entries[..n].to_vec(),
            rho: self.rho.clone(),
        }
    }
}

/// `seq_mul` on two sequences sharing degree and scaling.
pub fn seq_mul(a: &SemiCirculantSeq, b: &SemiCirculantSeq) -> Result<SemiCirculantSeq> {
    a.mul(b)
}

/// `seq_tau`: entry `j` multiplied by `rho^{-j}`.
pub fn seq_tau(a: &SemiCirculantSeq) -> SemiCirculantSeq {
    a.tau()
}

pub(crate) fn cauchy(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).map(|i| &a[i] * &b[k - i]).sum())
        .collect()
}
