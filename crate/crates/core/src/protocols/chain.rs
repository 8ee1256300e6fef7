//! Storage mode: building blocks held at the server and joined by type-I
//! fusions into larger states.
//!
//! Every block position `k` owns the labels `8k..8k+8`. Users come first,
//! then their partner photons, then the two server pairs `(c1, c2)` and
//! `(d1, d2)`. The server keeps `c2` and `d2` as the outer photons `s_a`
//! and `s_b` of the block.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{check_range, Fusion, Outcome, Outcomes, Program, ProtocolError, ProtocolResult, Result};
use crate::graph::{FramedGraph, Graph, MeasurementBasis, Vertex};
use crate::optics::SourceSpec;

/// Labels reserved per block position.
pub const BLOCK_STRIDE: Vertex = 8;

/// Largest chain length accepted.
pub const MAX_BLOCKS: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    /// `s_a – u1 – u2 – s_b`.
    Path4,
    /// GHZ of `u1, u2, s_a, s_b`, written as a star centred on `u1`.
    Star4,
    /// `s_a – u – s_b`.
    Three,
}

impl FromStr for BlockKind {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "path4" | "path" => Ok(Self::Path4),
            "star4" | "star" => Ok(Self::Star4),
            "three" | "3" => Ok(Self::Three),
            _ => Err(ProtocolError::Invalid(format!("unknown block kind {s:?}"))),
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Path4 => "Path4",
            Self::Star4 => "Star4",
            Self::Three => "Three",
        })
    }
}

impl BlockKind {
    pub fn user_count(self) -> usize {
        match self {
            Self::Path4 | Self::Star4 => 2,
            Self::Three => 1,
        }
    }

    pub fn users(self, base: Vertex) -> Vec<Vertex> {
        (0..self.user_count() as Vertex).map(|i| base + i).collect()
    }

    /// `[s_a, s_b]`.
    pub fn outer(self, base: Vertex) -> [Vertex; 2] {
        match self {
            Self::Path4 | Self::Star4 => [base + 5, base + 7],
            Self::Three => [base + 3, base + 5],
        }
    }

    /// Sources, fusions and detections that make the block.
    pub fn program(self, base: Vertex) -> Program {
        use MeasurementBasis::{X, Z};
        let bell = |a: Vertex, b: Vertex| SourceSpec::GBell([base + a, base + b]);
        let (sources, fusions, measure) = match self {
            Self::Path4 => (
                vec![bell(0, 2), bell(1, 3), bell(4, 5), bell(6, 7)],
                vec![Fusion::weave(2, 4), Fusion::weave(3, 4), Fusion::weave(6, 4)],
                vec![(4, Z), (2, X), (3, X), (6, X)],
            ),
            Self::Star4 => (
                vec![bell(0, 2), bell(1, 3), bell(4, 5), bell(6, 7)],
                vec![Fusion::ghz(3, 2), Fusion::ghz(6, 3), Fusion::ghz(4, 6)],
                vec![(4, X), (2, X), (3, X), (6, X)],
            ),
            Self::Three => (
                vec![bell(0, 1), bell(2, 3), bell(4, 5)],
                vec![Fusion::weave(1, 2), Fusion::weave(4, 2)],
                vec![(2, Z), (1, X), (4, X)],
            ),
        };
        let shift = |f: Fusion| Fusion {
            f: base + f.f,
            l: base + f.l,
            ..f
        };
        Program {
            sources,
            fusions: fusions.into_iter().map(shift).collect(),
            measure: measure.into_iter().map(|(v, b)| (base + v, b)).collect(),
        }
    }

    /// Representative the block is reported on.
    pub fn target(self, base: Vertex) -> Graph {
        let [sa, sb] = self.outer(base);
        match self {
            Self::Path4 => Graph::path(&[sa, base, base + 1, sb]),
            Self::Star4 => Graph::star(base, &[base + 1, sa, sb]),
            Self::Three => Graph::path(&[sa, base, sb]),
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            Self::Path4 | Self::Star4 => 3,
            Self::Three => 2,
        }
    }

    /// Runs the block program and moves the result onto [`Self::target`].
    /// The server undoes the frames of its two outer photons; user frames
    /// stay in place.
    pub fn prepare(self, base: Vertex, outcomes: &mut dyn Outcomes) -> Result<(FramedGraph, Vec<Outcome>)> {
        let table = self.branch_table()?;
        let mut prefix: Vec<bool> = Vec::with_capacity(table.width);
        for _ in 0..table.width {
            let want = outcomes.minus();
            prefix.push(want);
            if !table.has_prefix(&prefix) {
                prefix.pop();
                prefix.push(!want);
            }
        }
        let (state, record) = &table.branches[&prefix];
        let map: BTreeMap<Vertex, Vertex> = state.graph().vertices().map(|v| (v, v + base)).collect();
        let record = record
            .iter()
            .map(|o| Outcome {
                vertex: o.vertex + base,
                ..*o
            })
            .collect();
        Ok((state.relabel(&map)?, record))
    }

    fn branch_table(self) -> Result<&'static BranchTable> {
        static TABLES: [OnceLock<std::result::Result<BranchTable, ProtocolError>>; 3] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let slot = match self {
            Self::Path4 => &TABLES[0],
            Self::Star4 => &TABLES[1],
            Self::Three => &TABLES[2],
        };
        slot.get_or_init(|| BranchTable::build(self)).as_ref().map_err(Clone::clone)
    }
}

/// Every detector branch of a block at position 0, already on target.
struct BranchTable {
    width: usize,
    branches: BTreeMap<Vec<bool>, (FramedGraph, Vec<Outcome>)>,
}

impl BranchTable {
    fn build(kind: BlockKind) -> Result<Self> {
        let program = kind.program(0);
        let mut branches = BTreeMap::new();
        for b in program.graph_branches()? {
            let mut state = b.state;
            if !state.transform_to(&kind.target(0))? {
                return Err(ProtocolError::Invalid(format!("{kind} block off target: {}", state.graph())));
            }
            for v in kind.outer(0) {
                state.reset_frame(v)?;
            }
            let key = b.outcomes.iter().map(|o| o.minus).collect();
            branches.insert(key, (state, b.outcomes));
        }
        Ok(Self {
            width: program.measure.len(),
            branches,
        })
    }

    fn has_prefix(&self, prefix: &[bool]) -> bool {
        self.branches
            .range(prefix.to_vec()..)
            .next()
            .is_some_and(|(k, _)| k.starts_with(prefix))
    }
}

/// A freshly heralded block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub graph: Graph,
    /// Heralding probability `2^-exponent`.
    pub exponent: u32,
    pub users: Vec<Vertex>,
    pub outer: [Vertex; 2],
}

impl Block {
    pub fn probability(&self) -> f64 {
        0.5f64.powi(self.exponent as i32)
    }
}

/// Block at position 0.
pub fn build_block(kind: BlockKind) -> Block {
    Block {
        kind,
        graph: kind.target(0),
        exponent: kind.exponent(),
        users: kind.users(0),
        outer: kind.outer(0),
    }
}

/// What happens to a joint photon once the chain is complete.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum JointPlan {
    Keep,
    Measure(MeasurementBasis),
}

impl FromStr for JointPlan {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-" | "K" | "k" | "keep" => Ok(Self::Keep),
            t => {
                let mut cs = t.chars();
                match (cs.next().and_then(|c| MeasurementBasis::from_letter(c.to_ascii_uppercase())), cs.next()) {
                    (Some(b), None) => Ok(Self::Measure(b)),
                    _ => Err(ProtocolError::Invalid(format!("unknown joint plan {s:?}"))),
                }
            }
        }
    }
}

impl fmt::Display for JointPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Keep => f.write_str("-"),
            Self::Measure(b) => write!(f, "{}", b.letter()),
        }
    }
}

impl Serialize for JointPlan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for JointPlan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Reaction to a failed joint fusion.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionPolicy {
    /// The incoming block is discarded: its fused photon is lost, its users
    /// are removed by `Z` measurements, and a fresh block for the same
    /// users is fused again. The chain built so far is kept.
    #[default]
    RepeatLast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub blocks: Vec<BlockKind>,
    pub plan: Vec<JointPlan>,
    #[serde(default)]
    pub close: bool,
    #[serde(default)]
    pub policy: FusionPolicy,
    /// Attempts per joint before giving up.
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
}

fn default_attempts() -> usize {
    64
}

impl ChainSpec {
    pub fn new(blocks: Vec<BlockKind>, plan: Vec<JointPlan>, close: bool) -> Self {
        Self {
            blocks,
            plan,
            close,
            policy: FusionPolicy::RepeatLast,
            max_attempts: default_attempts(),
        }
    }

    pub fn joints(&self) -> usize {
        self.blocks.len().saturating_sub(1) + usize::from(self.close)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("blocks", self.blocks.len(), 2, MAX_BLOCKS)?;
        if self.plan.len() != self.joints() {
            return Err(ProtocolError::PlanMismatch {
                expected: self.joints(),
                actual: self.plan.len(),
            });
        }
        if self.max_attempts == 0 {
            return Err(ProtocolError::Invalid("max_attempts must be positive".into()));
        }
        Ok(())
    }

    pub fn base(k: usize) -> Vertex {
        k as Vertex * BLOCK_STRIDE
    }

    /// Probability that every joint fuses on the first attempt.
    pub fn exponent(&self) -> u32 {
        self.joints() as u32
    }

    /// User labels of the whole chain.
    pub fn users(&self) -> Vec<Vertex> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, b)| b.users(Self::base(k)))
            .collect()
    }

    /// Joint photon of joint `j`: the `s_b` of block `j`.
    pub fn joint(&self, j: usize) -> Vertex {
        self.blocks[j].outer(Self::base(j))[1]
    }
}

/// Resource accounting of one chain run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStats {
    pub blocks_consumed: usize,
    pub fusion_attempts: usize,
    pub failures: usize,
    /// The closing fusion failed and the cycle was abandoned.
    pub aborted: bool,
}

/// Mean number of blocks used by an open chain of `blocks` blocks.
pub fn expected_blocks(blocks: usize) -> f64 {
    1.0 + 2.0 * blocks.saturating_sub(1) as f64
}

fn detect(
    state: &mut FramedGraph,
    v: Vertex,
    basis: MeasurementBasis,
    outcomes: &mut dyn Outcomes,
    record: &mut Vec<Outcome>,
) -> Result<()> {
    let want = outcomes.minus();
    let mut trial = state.clone();
    let minus = match trial.measure(v, basis, want) {
        Ok(_) => want,
        Err(_) => {
            trial = state.clone();
            trial.measure(v, basis, !want)?;
            !want
        }
    };
    *state = trial;
    record.push(Outcome { vertex: v, basis, minus });
    Ok(())
}

/// Owner applies its pending correction, then measures `Z`: the vertex
/// leaves the graph without touching other edges.
fn remove(state: &mut FramedGraph, v: Vertex, outcomes: &mut dyn Outcomes, record: &mut Vec<Outcome>) -> Result<()> {
    state.reset_frame(v)?;
    detect(state, v, MeasurementBasis::Z, outcomes, record)
}

fn join(
    state: &mut FramedGraph,
    f: Vertex,
    l: Vertex,
    outcomes: &mut dyn Outcomes,
    record: &mut Vec<Outcome>,
) -> Result<()> {
    state.reset_frame(f)?;
    state.reset_frame(l)?;
    state.fuse(f, l, false)?;
    detect(state, l, MeasurementBasis::X, outcomes, record)
}

/// Joins the blocks in order and then applies the joint plan.
///
/// Joint photons are measured in the graph basis, the server first undoing
/// their frames. Outer photons of an open chain are removed.
pub fn fuse_chain(spec: &ChainSpec, outcomes: &mut dyn Outcomes) -> Result<ProtocolResult> {
    spec.validate()?;
    let mut record = Vec::new();
    let mut stats = ChainStats::default();
    let first = spec.blocks[0];
    let (mut state, rec) = first.prepare(0, outcomes)?;
    record.extend(rec);
    stats.blocks_consumed = 1;
    let mut tail = first.outer(0)[1];
    for (k, &kind) in spec.blocks.iter().enumerate().skip(1) {
        let base = ChainSpec::base(k);
        let [sa, sb] = kind.outer(base);
        let mut attempts = 0;
        loop {
            if attempts == spec.max_attempts {
                return Err(ProtocolError::Invalid(format!(
                    "joint {k}: no success in {attempts} attempts"
                )));
            }
            attempts += 1;
            let (block, rec) = kind.prepare(base, outcomes)?;
            record.extend(rec);
            stats.blocks_consumed += 1;
            stats.fusion_attempts += 1;
            state.extend(block)?;
            if outcomes.fusion() {
                join(&mut state, tail, sa, outcomes, &mut record)?;
                tail = sb;
                break;
            }
            stats.failures += 1;
            detect(&mut state, sa, MeasurementBasis::Z, outcomes, &mut record)?;
            for v in kind.users(base).into_iter().chain([sb]) {
                remove(&mut state, v, outcomes, &mut record)?;
            }
        }
    }
    let head = first.outer(0)[0];
    let mut joints: Vec<Vertex> = (0..spec.blocks.len() - 1).map(|j| spec.joint(j)).collect();
    if spec.close {
        stats.fusion_attempts += 1;
        if outcomes.fusion() {
            join(&mut state, tail, head, outcomes, &mut record)?;
            joints.push(tail);
        } else {
            stats.failures += 1;
            stats.aborted = true;
            for v in [tail, head] {
                detect(&mut state, v, MeasurementBasis::Z, outcomes, &mut record)?;
            }
        }
    } else {
        for v in [head, tail] {
            remove(&mut state, v, outcomes, &mut record)?;
        }
    }
    let mut server = Vec::new();
    for (&j, plan) in joints.iter().zip(&spec.plan) {
        match *plan {
            JointPlan::Keep => server.push(j),
            JointPlan::Measure(b) => {
                state.reset_frame(j)?;
                detect(&mut state, j, b, outcomes, &mut record)?;
            }
        }
    }
    let target = state.graph().clone();
    let mut result = ProtocolResult::from_state(
        "chain",
        state,
        &target,
        spec.users(),
        server,
        spec.exponent(),
        record,
    )?;
    result.chain = Some(stats);
    Ok(result)
}
