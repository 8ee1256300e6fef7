//! Which states can be extracted from the server's resource states.
//!
//! A cycle graph is the interlacement graph of an Eulerian tour on the
//! circulant multigraph `C_n^{1,2}`, and Pauli measurements on it become
//! local rewirings ("fragments") of that multigraph. The module builds
//! these objects, predicts the shape left after measuring the server
//! photons of a zigzag, partial honeycomb or every-third path, and checks
//! each prediction against direct graph-state measurement.

mod multigraph;
mod predict;


use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MeasurementBasis, Vertex};

pub use multigraph::{
    apply_word, build_circulant, canonical_tour, circle_graph, find_tour, fragment, interlacement, leaf_expansion,
    EulerianTour, Multigraph4R,
};
pub use predict::{
    crosscheck, predict_class, predict_graph, sweep, CrossReport, Link, Resource, ResourceGraph, MAX_RESOURCE,
};


#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinorError {
    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error("vertex {0} has degree {1}, expected 4")]
    NotFourRegular(Vertex, usize),

    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),

    #[error("vertex {0} used twice")]
    Repeated(Vertex),

    #[error("n = {n} is below the minimum {min}")]
    TooSmall { n: usize, min: usize },

    #[error("n = {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("canonical tour needs an even n >= 6, got {0}")]
    Canonical(usize),

    #[error("multigraph is not connected")]
    Disconnected,

    #[error("word has {actual} letters for {expected} measured vertices")]
    WordLength { expected: usize, actual: usize },

    #[error("invalid word {0:?}: letters must be X, Y or Z")]
    Word(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = MinorError> = std::result::Result<T, E>;

/// One Pauli letter per measured vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionWord(Vec<MeasurementBasis>);

impl TransitionWord {
    pub fn new(letters: Vec<MeasurementBasis>) -> Self {
        Self(letters)
    }

    pub fn uniform(b: MeasurementBasis, len: usize) -> Self {
        Self(vec![b; len])
    }

    pub fn letters(&self) -> impl Iterator<Item = MeasurementBasis> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[MeasurementBasis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `3^len` words in lexicographic order `X < Y < Z`.
    pub fn all(len: usize) -> impl Iterator<Item = TransitionWord> {
        use MeasurementBasis::*;
        let total = 3usize.pow(len as u32);
        (0..total).map(move |mut k| {
            let mut w = vec![X; len];
            for slot in w.iter_mut().rev() {
                *slot = [X, Y, Z][k % 3];
                k /= 3;
            }
            TransitionWord(w)
        })
    }
}

impl FromStr for TransitionWord {
    type Err = MinorError;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| MeasurementBasis::from_letter(c.to_ascii_uppercase()).ok_or_else(|| MinorError::Word(s.into())))
            .collect::<Result<Vec<_>>>()
            .map(TransitionWord)
    }
}

impl fmt::Display for TransitionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{}", b.letter()))
    }
}

impl Serialize for TransitionWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransitionWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
