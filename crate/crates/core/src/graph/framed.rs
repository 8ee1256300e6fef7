//! Graph states dressed with single-qubit Clifford frames.
//!
//! A [`FramedGraph`] stands for the physical state `(⊗_v C_v)|G⟩` up to a
//! global phase. Measuring a physical Pauli first rewrites the axis through
//! the frame, then applies the graph rule, then folds the outcome-dependent
//! byproduct back into the frames of the surviving neighbours. Sequences of
//! measurements and fusions are therefore exact, not only correct up to
//! local equivalence.

use std::collections::BTreeMap;

use super::clifford::{Clifford1, Gate};
use super::{Graph, GraphError, GraphResult, MeasurementBasis, StateVector, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FramedGraph {
    graph: Graph,
    frame: BTreeMap<Vertex, Clifford1>,
}

/// Result of one Pauli measurement on a [`FramedGraph`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MeasureRecord {
    /// Axis actually measured on the underlying graph state.
    pub graph_basis: MeasurementBasis,
    /// Whether the graph-frame outcome was `-1`.
    pub graph_minus: bool,
    /// Branch probability (`1/2` except for `X` on an isolated vertex).
    pub probability: f64,
}

impl FramedGraph {
    pub fn new(graph: Graph) -> Self {
        Self {
            graph,
            frame: BTreeMap::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn frame(&self, v: Vertex) -> Clifford1 {
        self.frame.get(&v).copied().unwrap_or_default()
    }

    /// Non-trivial frames, ordered by vertex.
    pub fn frames(&self) -> impl Iterator<Item = (Vertex, Clifford1)> + '_ {
        self.frame.iter().filter(|(_, c)| !c.is_identity()).map(|(&v, &c)| (v, c))
    }

    fn set_frame(&mut self, v: Vertex, c: Clifford1) {
        if c.is_identity() {
            self.frame.remove(&v);
        } else {
            self.frame.insert(v, c);
        }
    }

    /// Apply a physical gate to vertex `v`.
    pub fn apply(&mut self, v: Vertex, c: Clifford1) -> GraphResult<()> {
        if !self.graph.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let f = c.compose(self.frame(v));
        self.set_frame(v, f);
        Ok(())
    }

    pub fn apply_gate(&mut self, v: Vertex, g: Gate) -> GraphResult<()> {
        self.apply(v, Clifford1::from_gate(g))
    }

    /// Adds `other` alongside this state. Labels must be disjoint.
    pub fn extend(&mut self, other: FramedGraph) -> GraphResult<()> {
        self.graph = self.graph.disjoint_union(&other.graph)?;
        self.frame.extend(other.frame);
        Ok(())
    }

    /// Renames vertices; labels missing from `map` are kept.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> GraphResult<FramedGraph> {
        let f = |v: Vertex| map.get(&v).copied().unwrap_or(v);
        Ok(FramedGraph {
            graph: self.graph.relabel(map)?,
            frame: self.frame.iter().map(|(&v, &c)| (f(v), c)).collect(),
        })
    }

    /// Changes the representative to `τ_v(G)` without changing the
    /// physical state.
    pub fn local_complement(&mut self, v: Vertex) -> GraphResult<()> {
        let ns: Vec<Vertex> = self.graph.neighbors(v)?.iter().copied().collect();
        self.graph.local_complement_mut(v)?;
        // |τ_v G⟩ = U|G⟩ with U = √(−iX_v) ∏_{u∈N(v)} √(iZ_u).
        let uv = Clifford1::quarter_turn(MeasurementBasis::X, -1);
        self.set_frame(v, self.frame(v).compose(uv.dagger()));
        let uz = Clifford1::quarter_turn(MeasurementBasis::Z, 1);
        for u in ns {
            self.set_frame(u, self.frame(u).compose(uz.dagger()));
        }
        Ok(())
    }

    /// Rewrites the representative into `target` by local complementations,
    /// keeping the physical state. Returns `false` (and leaves `self`
    /// untouched) when `target` is not LC-equivalent.
    pub fn transform_to(&mut self, target: &Graph) -> GraphResult<bool> {
        let seq = super::equivalence::lc_sequence(&self.graph, target, super::equivalence::DEFAULT_ORBIT_LIMIT)?;
        let Some(seq) = seq else {
            return Ok(false);
        };
        for v in seq {
            self.local_complement(v)?;
        }
        debug_assert_eq!(&self.graph, target);
        Ok(true)
    }

    /// Undoes the frame on `v` by a physical gate and returns that gate.
    pub fn reset_frame(&mut self, v: Vertex) -> GraphResult<Clifford1> {
        if !self.graph.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let c = self.frame(v).dagger();
        self.frame.remove(&v);
        Ok(c)
    }

    /// Measures the physical Pauli `basis` on `v` and selects the outcome
    /// (`minus` for `-1`). The vertex is removed.
    pub fn measure(&mut self, v: Vertex, basis: MeasurementBasis, minus: bool) -> GraphResult<MeasureRecord> {
        let ns = self.graph.neighbors(v)?.clone();
        let (sign, q) = self.frame(v).conjugate(basis);
        let gminus = minus ^ (sign < 0);
        let zt = |s: i8| Clifford1::quarter_turn(MeasurementBasis::Z, s);
        let z = Clifford1::pauli(MeasurementBasis::Z);
        let mut byproduct: Vec<(Vertex, Clifford1)> = Vec::new();
        let mut probability = 0.5;
        match q {
            MeasurementBasis::Z => {
                if gminus {
                    byproduct.extend(ns.iter().map(|&u| (u, z)));
                }
            }
            MeasurementBasis::Y => {
                let t = zt(if gminus { 1 } else { -1 });
                byproduct.extend(ns.iter().map(|&u| (u, t)));
            }
            MeasurementBasis::X => match self.graph.x_partner(v)? {
                None => {
                    if gminus {
                        return Err(GraphError::Invalid(format!(
                            "outcome -1 of X on isolated vertex {v} has zero probability"
                        )));
                    }
                    probability = 1.0;
                }
                Some(b0) => {
                    let nb = self.graph.neighbors(b0)?;
                    let y = |s: i8| Clifford1::quarter_turn(MeasurementBasis::Y, s);
                    if gminus {
                        byproduct.push((b0, y(-1)));
                        byproduct.extend(
                            nb.iter()
                                .filter(|&&u| u != v && !ns.contains(&u))
                                .map(|&u| (u, z)),
                        );
                    } else {
                        byproduct.push((b0, y(1)));
                        byproduct.extend(
                            ns.iter()
                                .filter(|&&u| u != b0 && !nb.contains(&u))
                                .map(|&u| (u, z)),
                        );
                    }
                }
            },
        }
        self.graph.measure_pauli_mut(v, q)?;
        self.frame.remove(&v);
        for (u, c) in byproduct {
            self.set_frame(u, self.frame(u).compose(c));
        }
        Ok(MeasureRecord {
            graph_basis: q,
            graph_minus: gminus,
            probability,
        })
    }

    /// Polarising-beam-splitter fusion of `f` and `l` with postselection on
    /// one photon per output. With `hwp` a Hadamard is applied to `l`
    /// afterwards and the result is the graph with `N(f) := N(f) Δ N(l)`
    /// and `l` a leaf of `f`. Without it the same graph is returned with an
    /// extra Hadamard in the frame of `l`.
    ///
    /// Succeeds with probability 1/2, which is not returned.
    pub fn fuse(&mut self, f: Vertex, l: Vertex, hwp: bool) -> GraphResult<()> {
        if f == l {
            return Err(GraphError::SelfLoop(f));
        }
        let nf = self.graph.neighbors(f)?.clone();
        let nl = self.graph.neighbors(l)?.clone();
        if nf.contains(&l) {
            return Err(GraphError::Adjacent(f, l));
        }
        for v in [f, l] {
            if !self.frame(v).is_diagonal() {
                return Err(GraphError::FrameNotDiagonal(v));
            }
        }
        for &u in &nl {
            self.graph.flip(l, u);
        }
        for &u in nl.iter().filter(|&&u| u != f) {
            self.graph.flip(f, u);
        }
        self.graph.insert_edge(f, l);
        let h = Clifford1::from_gate(Gate::H);
        let dl = self.frame(l);
        let new = if hwp {
            h.compose(dl).compose(h)
        } else {
            dl.compose(h)
        };
        self.set_frame(l, new);
        Ok(())
    }

    /// Physical state vector, qubits in ascending label order.
    pub fn to_state_vector(&self) -> GraphResult<StateVector> {
        let mut sv = self.graph.to_state_vector()?;
        for (v, c) in self.frames() {
            sv.apply_gate(v, &c.matrix())?;
        }
        Ok(sv)
    }

    /// Gates that bring the listed vertices back to the bare graph state:
    /// the inverse frame, one entry per vertex with a non-trivial frame.
    pub fn corrections(&self, vertices: &[Vertex]) -> Vec<(Vertex, Clifford1)> {
        vertices
            .iter()
            .map(|&v| (v, self.frame(v).dagger()))
            .filter(|(_, c)| !c.is_identity())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MeasurementBasis::*;

    fn all_graphs(n: u32) -> Vec<Graph> {
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        (0..1u32 << pairs.len())
            .map(|m| {
                let es = pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &e)| e);
                Graph::from_edges(0..n, es).unwrap()
            })
            .collect()
    }

    fn framed(g: &Graph, seed: usize) -> FramedGraph {
        let mut fg = FramedGraph::new(g.clone());
        for (i, v) in g.vertices().enumerate() {
            let k = (seed * 7 + i * 5) % 24;
            let c = (0..k).fold(Clifford1::IDENTITY, |acc, j| {
                let g = if j % 3 == 0 { Gate::H } else { Gate::S };
                Clifford1::from_gate(g).compose(acc)
            });
            fg.apply(v, c).unwrap();
        }
        fg
    }

    #[test]
    fn representation_change_keeps_state() {
        for (i, g) in all_graphs(4).iter().enumerate() {
            let fg = framed(g, i);
            let want = fg.to_state_vector().unwrap();
            for v in g.vertices() {
                let mut h = fg.clone();
                h.local_complement(v).unwrap();
                assert!(h.to_state_vector().unwrap().equal_up_to_phase(&want, 1e-9), "{g} at {v}");
            }
        }
    }

    #[test]
    fn measurement_matches_projection() {
        for (i, g) in all_graphs(4).iter().enumerate() {
            let fg = framed(g, i);
            let sv = fg.to_state_vector().unwrap();
            for v in g.vertices() {
                for basis in [X, Y, Z] {
                    for minus in [false, true] {
                        let (p, proj) = sv.project(v, basis, minus).unwrap();
                        let mut h = fg.clone();
                        match h.measure(v, basis, minus) {
                            Ok(rec) => {
                                assert!((rec.probability - p).abs() < 1e-9, "{g} {v} {basis} {minus}");
                                let got = h.to_state_vector().unwrap();
                                assert!(got.equal_up_to_phase(&proj.unwrap(), 1e-9), "{g} {v} {basis} {minus}");
                            }
                            Err(_) => assert!(p < 1e-12),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fusion_matches_projection() {
        let h = Gate::H.matrix();
        for g in all_graphs(4) {
            for (f, l) in [(0, 1), (1, 0), (2, 3)] {
                if g.has_edge(f, l) {
                    continue;
                }
                let sv = g.to_state_vector().unwrap();
                let n = 4;
                let amps: Vec<_> = sv
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(b, &a)| {
                        let bf = b >> (n - 1 - f) & 1;
                        let bl = b >> (n - 1 - l) & 1;
                        if bf == bl {
                            a
                        } else {
                            num_complex::Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                let proj = StateVector::new(sv.qubits().to_vec(), amps).unwrap();
                for hwp in [false, true] {
                    let mut want = proj.clone();
                    if hwp {
                        want.apply_gate(l, &h).unwrap();
                    }
                    let mut fg = FramedGraph::new(g.clone());
                    fg.fuse(f, l, hwp).unwrap();
                    assert!(fg.to_state_vector().unwrap().equal_up_to_phase(&want, 1e-9));
                    if hwp {
                        assert!(fg.frames().next().is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn fusion_rejects_adjacent() {
        let mut fg = FramedGraph::new(Graph::path(&[1, 2]));
        assert_eq!(fg.fuse(1, 2, true), Err(GraphError::Adjacent(1, 2)));
    }
}
