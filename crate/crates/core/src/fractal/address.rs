use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fractal::descriptor::FractalDescriptor;

/// The point `F_w q_corner`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexAddress {
    word: Vec<u8>,
    corner: u8,
    canonical: bool,
}

impl VertexAddress {
    /// Unreduced address; see [`canonical_vertex`] for the reduced form.
    pub fn raw(word: &[usize], corner: usize) -> Self {
        VertexAddress {
            word: word.iter().map(|&i| i as u8).collect(),
            corner: corner as u8,
            canonical: false,
        }
    }

    pub fn boundary(corner: usize) -> Self {
        VertexAddress {
            word: Vec::new(),
            corner: corner as u8,
            canonical: true,
        }
    }

    pub fn word(&self) -> Vec<usize> {
        self.word.iter().map(|&i| i as usize).collect()
    }

    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    pub fn corner(&self) -> usize {
        self.corner as usize
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_boundary(&self) -> bool {
        self.canonical && self.word.is_empty()
    }

    /// Smallest `m` with the point in `V_m`.
    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// `F_i` applied in front of the word.
    pub fn prefixed(&self, i: usize) -> VertexAddress {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(i as u8);
        word.extend_from_slice(&self.word);
        VertexAddress {
            word,
            corner: self.corner,
            canonical: false,
        }
    }

    /// Parse `"0 1/2"`, `"01/2"`, `"/2"` or `"q2"`; digits before the slash form the word.
    pub fn parse(text: &str, fractal: &FractalDescriptor) -> Result<VertexAddress> {
        let t = text.trim();
        let (w, c) = if let Some(rest) = t.strip_prefix('q') {
            ("", rest)
        } else {
            t.split_once('/')
                .ok_or_else(|| Error::Parse(format!("vertex {t:?}: expected word/corner")))?
        };
        let mut word = Vec::new();
        for ch in w
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '.')
        {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::Parse(format!("vertex {t:?}: bad map digit {ch:?}")))?;
            if d as usize >= fractal.n_maps {
                return Err(Error::Parse(format!("vertex {t:?}: map {d} out of range")));
            }
            word.push(d as usize);
        }
        let corner: usize = c
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("vertex {t:?}: bad corner")))?;
        if corner >= fractal.n_boundary {
            return Err(Error::Parse(format!(
                "vertex {t:?}: corner {corner} out of range"
            )));
        }
        Ok(canonical_vertex(fractal, &word, corner))
    }
}

/// Shortest, then lexicographically least, address of the same point.
pub fn canonical_vertex(
    fractal: &FractalDescriptor,
    word: &[usize],
    corner: usize,
) -> VertexAddress {
    let mut w: Vec<usize> = word.to_vec();
    let mut c = corner;
    while let Some(&l) = w.last() {
        if fractal.fixed_point[l] == Some(c) {
            w.pop();
            continue;
        }
        let (m, c2) = fractal.class_representative(l, c);
        *w.last_mut().expect("nonempty") = m;
        c = c2;
        break;
    }
    VertexAddress {
        word: w.into_iter().map(|i| i as u8).collect(),
        corner: c as u8,
        canonical: true,
    }
}

impl Ord for VertexAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.corner.cmp(&other.corner))
    }
}

impl PartialOrd for VertexAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "q{}", self.corner);
        }
        for d in &self.word {
            write!(f, "{d}")?;
        }
        write!(f, "/{}", self.corner)
    }
}

impl fmt::Debug for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for VertexAddress {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
