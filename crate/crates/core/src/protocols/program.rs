//! A photonic program: sources, beam-splitter fusions and detector settings,
//! executed either photon by photon on the optical engine or as graph
//! rewrites on a [`FramedGraph`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Outcome, Outcomes, ProtocolError, Result};
use crate::graph::clifford::Gate;
use crate::graph::{FramedGraph, Graph, MeasurementBasis, StateVector, Vertex};
use crate::optics::{Circuit, Element, MeasureSpec, PolBasis, SourceSpec};

/// Two photons meeting at a polarising beam splitter, optionally followed
/// by a Hadamard plate on `l`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fusion {
    pub f: Vertex,
    pub l: Vertex,
    pub hwp: bool,
}

impl Fusion {
    pub fn weave(f: Vertex, l: Vertex) -> Self {
        Self { f, l, hwp: true }
    }

    pub fn ghz(f: Vertex, l: Vertex) -> Self {
        Self { f, l, hwp: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub sources: Vec<SourceSpec>,
    pub fusions: Vec<Fusion>,
    /// Detected photons, in detection order. Only `X` (±) and `Z` (H/V)
    /// are available to a polarisation detector.
    pub measure: Vec<(Vertex, MeasurementBasis)>,
}

/// One fully specified run of a [`Program`] on the graph engine.
#[derive(Clone, Debug)]
pub struct GraphBranch {
    pub outcomes: Vec<Outcome>,
    /// Probability of these detector outcomes given successful
    /// postselection.
    pub probability: f64,
    pub state: FramedGraph,
}

impl Program {
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.sources.iter().flat_map(|s| s.ports()).collect()
    }

    /// Photons left undetected, ascending.
    pub fn kept(&self) -> Vec<Vertex> {
        let gone: BTreeSet<Vertex> = self.measure.iter().map(|&(v, _)| v).collect();
        self.vertices().into_iter().filter(|v| !gone.contains(v)).collect()
    }

    /// Number of beam splitters; postselection succeeds with `2^-k`.
    pub fn exponent(&self) -> u32 {
        self.fusions.len() as u32
    }

    /// Source states as a framed graph.
    pub fn initial(&self) -> Result<FramedGraph> {
        let mut fg = FramedGraph::default();
        for s in &self.sources {
            let part = match s {
                SourceSpec::Plus(p) => FramedGraph::new(Graph::empty([*p])),
                SourceSpec::GBell([a, b]) => FramedGraph::new(Graph::path(&[*a, *b])),
                SourceSpec::BellPsi([a, b]) => {
                    let mut g = FramedGraph::new(Graph::path(&[*a, *b]));
                    g.apply_gate(*b, Gate::H)?;
                    g
                }
                SourceSpec::Graph { ports, edges } => {
                    FramedGraph::new(Graph::from_edges(ports.iter().copied(), edges.iter().map(|e| (e[0], e[1])))?)
                }
            };
            fg.extend(part)?;
        }
        Ok(fg)
    }

    /// State after every fusion has succeeded, before detection.
    pub fn fused(&self) -> Result<FramedGraph> {
        let mut fg = self.initial()?;
        for f in &self.fusions {
            fg.fuse(f.f, f.l, f.hwp)?;
        }
        Ok(fg)
    }

    /// Runs detection with outcomes drawn from `outcomes`. An outcome of
    /// zero probability is replaced by the certain one.
    pub fn run_graph(&self, outcomes: &mut dyn Outcomes) -> Result<GraphBranch> {
        let mut state = self.fused()?;
        let mut record = Vec::with_capacity(self.measure.len());
        let mut probability = 1.0;
        for &(v, basis) in &self.measure {
            let want = outcomes.minus();
            let mut trial = state.clone();
            let (minus, rec) = match trial.measure(v, basis, want) {
                Ok(r) => (want, r),
                Err(_) => {
                    trial = state.clone();
                    (!want, trial.measure(v, basis, !want)?)
                }
            };
            state = trial;
            probability *= rec.probability;
            record.push(Outcome { vertex: v, basis, minus });
        }
        Ok(GraphBranch {
            outcomes: record,
            probability,
            state,
        })
    }

    /// Every detector outcome combination with non-zero probability.
    pub fn graph_branches(&self) -> Result<Vec<GraphBranch>> {
        let mut branches = vec![GraphBranch {
            outcomes: Vec::new(),
            probability: 1.0,
            state: self.fused()?,
        }];
        for &(v, basis) in &self.measure {
            let mut next = Vec::with_capacity(2 * branches.len());
            for b in branches {
                for minus in [false, true] {
                    let mut s = b.state.clone();
                    let Ok(rec) = s.measure(v, basis, minus) else {
                        continue;
                    };
                    let mut outcomes = b.outcomes.clone();
                    outcomes.push(Outcome { vertex: v, basis, minus });
                    next.push(GraphBranch {
                        outcomes,
                        probability: b.probability * rec.probability,
                        state: s,
                    });
                }
            }
            branches = next;
        }
        Ok(branches)
    }

    /// The same program as an optical circuit: every photon sits on the
    /// port of its label and every port must see one photon.
    pub fn circuit(&self) -> Result<Circuit> {
        let mut elements = Vec::with_capacity(2 * self.fusions.len());
        for f in &self.fusions {
            elements.push(Element::Pbs([f.f, f.l]));
            if f.hwp {
                elements.push(Element::Hwp(f.l, 22.5));
            }
        }
        let measure = self
            .measure
            .iter()
            .map(|&(port, b)| {
                let basis = match b {
                    MeasurementBasis::X => PolBasis::PM,
                    MeasurementBasis::Z => PolBasis::HV,
                    MeasurementBasis::Y => {
                        return Err(ProtocolError::Invalid(format!("photon {port}: no Y detector")));
                    }
                };
                Ok(MeasureSpec { port, basis })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            sources: self.sources.clone(),
            elements,
            postselect: self.vertices().into_iter().collect(),
            measure,
            ports: Vec::new(),
        })
    }

    /// Runs both engines and compares every branch exactly.
    pub fn cross_check(&self, tol: f64) -> Result<CrossCheck> {
        let run = self.circuit()?.run()?;
        let kept = self.kept();
        let map: Vec<(u32, Vertex)> = kept.iter().map(|&v| (v, v)).collect();
        let graph = self.graph_branches()?;
        let mut branches = 0;
        let mut mismatches = Vec::new();
        for ob in &run.branches {
            if ob.probability < tol {
                continue;
            }
            branches += 1;
            let minus: Vec<bool> = ob.outcomes.iter().map(|(_, o)| o.is_minus()).collect();
            let Some(gb) = graph
                .iter()
                .find(|g| g.outcomes.iter().map(|o| o.minus).eq(minus.iter().copied()))
            else {
                mismatches.push(format!("{minus:?}: missing on graph side"));
                continue;
            };
            let sv = ob.state.extract_logical(&map)?;
            let want: StateVector = gb.state.to_state_vector()?;
            if (gb.probability - ob.probability).abs() > tol {
                mismatches.push(format!("{minus:?}: p {} vs {}", ob.probability, gb.probability));
            } else if !sv.equal_up_to_phase(&want, tol) {
                mismatches.push(format!("{minus:?}: states differ"));
            }
        }
        let graph_mass: f64 = graph.iter().map(|g| g.probability).sum();
        if (graph_mass - 1.0).abs() > tol {
            mismatches.push(format!("graph branches carry {graph_mass}"));
        }
        Ok(CrossCheck {
            postselection_probability: run.postselection_probability,
            exponent: self.exponent(),
            branches,
            mismatches,
        })
    }
}

/// Outcome of [`Program::cross_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub postselection_probability: f64,
    pub exponent: u32,
    pub branches: usize,
    pub mismatches: Vec<String>,
}

impl CrossCheck {
    pub fn agrees(&self, tol: f64) -> bool {
        self.mismatches.is_empty() && (self.postselection_probability - 0.5f64.powi(self.exponent as i32)).abs() < tol
    }
}
