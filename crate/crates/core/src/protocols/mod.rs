//! Entanglement distribution protocols of the weaving server.
//!
//! Every protocol is written once as a [`Program`] of photon sources,
//! beam-splitter fusions and detections. The graph engine runs it as
//! fusion and Pauli-measurement rewrites with exact Clifford frames; the
//! optical engine runs the same program photon by photon. The distributed
//! state is reported on a fixed target graph together with the single-qubit
//! corrections that bring the physical state onto it.

mod chain;
mod montecarlo;
mod nostorage;
mod program;
mod request;
mod weave;

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::clifford::{Clifford1, Gate};
use crate::graph::{FramedGraph, Graph, GraphError, MeasurementBasis, Vertex};
use crate::optics::OpticsError;

pub use chain::{
    build_block, expected_blocks, fuse_chain, Block, BlockKind, ChainSpec, ChainStats, FusionPolicy, JointPlan,
    BLOCK_STRIDE, MAX_BLOCKS,
};
pub use montecarlo::{
    monte_carlo, run_trial, sample, sample_sequential, trial_rng, Job, MonteCarloStats, Trial,
};
pub use nostorage::{ghz_parity, run_caterpillar, run_cycle, run_ghz, run_path, DualCheck, Layout, Protocol, Role};
pub use program::{CrossCheck, Fusion, GraphBranch, Program};
pub use request::{trials_csv, ProtocolRequest, ProtocolResponse};
pub use weave::{fuse_within, fuse_within_program, weave_graphs, weave_program};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error(transparent)]
    Optics(#[from] OpticsError),

    #[error("{what} = {value} outside {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("plan has {actual} entries for {expected} joints")]
    PlanMismatch { expected: usize, actual: usize },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = ProtocolError> = std::result::Result<T, E>;

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(ProtocolError::OutOfRange { what, value, min, max })
    }
}

/// A single detection.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub vertex: Vertex,
    pub basis: MeasurementBasis,
    pub minus: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcomes: Vec<Outcome>,
    /// Photons found in `|−⟩`.
    pub m_minus: usize,
    /// Photons detected in the ± basis.
    pub pm_measurements: usize,
}

impl MeasurementRecord {
    pub fn new(outcomes: Vec<Outcome>) -> Self {
        let pm = outcomes.iter().filter(|o| o.basis == MeasurementBasis::X);
        let m_minus = pm.clone().filter(|o| o.minus).count();
        let pm_measurements = pm.count();
        Self {
            outcomes,
            m_minus,
            pm_measurements,
        }
    }
}

/// Single-qubit gates a party applies locally, in time order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub vertex: Vertex,
    pub gates: Vec<Gate>,
}

impl Correction {
    pub fn clifford(&self) -> Clifford1 {
        Clifford1::from_gates(&self.gates)
    }
}

/// What the server reports after a protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub protocol: String,
    pub users: Vec<Vertex>,
    /// Server photons that remain part of the distributed state.
    pub server: Vec<Vertex>,
    pub final_graph: Graph,
    /// Heralding probability `2^-exponent`.
    pub exponent: u32,
    pub measurement_record: MeasurementRecord,
    pub corrections: Vec<Correction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainStats>,
}

impl ProtocolResult {
    pub fn success_probability(&self) -> f64 {
        0.5f64.powi(self.exponent as i32)
    }

    /// Builds the report from a post-measurement state by moving it onto
    /// `target` and reading off the remaining frames.
    pub(crate) fn from_state(
        protocol: &str,
        mut state: FramedGraph,
        target: &Graph,
        users: Vec<Vertex>,
        server: Vec<Vertex>,
        exponent: u32,
        outcomes: Vec<Outcome>,
    ) -> Result<Self> {
        if !state.transform_to(target)? {
            return Err(ProtocolError::Invalid(format!(
                "{protocol}: {} is not locally equivalent to the target {target}",
                state.graph()
            )));
        }
        let vertices: Vec<Vertex> = target.vertices().collect();
        let corrections = state
            .corrections(&vertices)
            .into_iter()
            .map(|(vertex, c)| Correction { vertex, gates: c.gates() })
            .collect();
        Ok(Self {
            protocol: protocol.to_string(),
            users,
            server,
            final_graph: target.clone(),
            exponent,
            measurement_record: MeasurementRecord::new(outcomes),
            corrections,
            chain: None,
        })
    }
}

/// Source of random events during a run.
pub trait Outcomes {
    /// Whether the next probabilistic fusion succeeds.
    fn fusion(&mut self) -> bool;
    /// Whether the next detection gives `−1`.
    fn minus(&mut self) -> bool;
}

/// Every fusion succeeds and every detection gives `+1`.
#[derive(Copy, Clone, Debug, Default)]
pub struct Heralded;

impl Outcomes for Heralded {
    fn fusion(&mut self) -> bool {
        true
    }

    fn minus(&mut self) -> bool {
        false
    }
}

/// Replays fixed outcome lists, then behaves like [`Heralded`].
#[derive(Clone, Debug, Default)]
pub struct Scripted {
    pub fusions: VecDeque<bool>,
    pub minus: VecDeque<bool>,
}

impl Scripted {
    pub fn new(fusions: &[bool], minus: &[bool]) -> Self {
        Self {
            fusions: fusions.iter().copied().collect(),
            minus: minus.iter().copied().collect(),
        }
    }
}

impl Outcomes for Scripted {
    fn fusion(&mut self) -> bool {
        self.fusions.pop_front().unwrap_or(true)
    }

    fn minus(&mut self) -> bool {
        self.minus.pop_front().unwrap_or(false)
    }
}

/// Fair coins from an RNG.
#[derive(Clone, Debug)]
pub struct Sampled<R>(pub R);

impl<R: Rng> Outcomes for Sampled<R> {
    fn fusion(&mut self) -> bool {
        self.0.random_bool(0.5)
    }

    fn minus(&mut self) -> bool {
        self.0.random_bool(0.5)
    }
}
