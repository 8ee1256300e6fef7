//! Graph-state calculus.
//!
//! A [`Graph`] on integer-labelled vertices stands for the graph state built
//! by applying a CZ along every edge to a register of `|+⟩` qubits. All
//! rewrite operations here act on that representation: CZ toggles an edge,
//! local complementation toggles the edges inside a neighbourhood, and the
//! Pauli measurement rules turn one graph into a representative of the
//! post-measurement state (up to single-qubit Cliffords).
//!
//! Exact byproduct tracking lives in [`framed`], the dense state-vector
//! oracle in [`state`] and the equivalence searches in [`equivalence`].

mod classify;
pub mod clifford;
mod dense;
pub mod equivalence;
pub mod framed;
mod io;
pub mod state;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify_graph, CaterpillarWitness, ShapeClass, ShapeKind};
pub use equivalence::{isomorphic, locally_equivalent, locally_equivalent_with, EquivalenceOptions};
pub use framed::FramedGraph;
pub use state::{state_locally_equivalent, StateVector};

/// Vertex label. Labels are arbitrary integers; they are not required to be
/// contiguous.
pub type Vertex = u32;

/// Largest graph that [`Graph::to_state_vector`] will expand.
pub const STATE_VECTOR_LIMIT: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),

    #[error("self-loop on vertex {0} is not allowed")]
    SelfLoop(Vertex),

    #[error("vertex {0} already present")]
    DuplicateVertex(Vertex),

    #[error("vertices {0} and {1} are adjacent")]
    Adjacent(Vertex, Vertex),

    #[error("{what}: size {actual} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("local-complementation orbit exceeded {0} graphs")]
    OrbitLimit(usize),

    #[error("graphs are on different vertex sets")]
    VertexSetMismatch,

    #[error("qubit order does not match the graph's vertex set")]
    QubitOrderMismatch,

    #[error("frame on vertex {0} does not commute with the parity projection")]
    FrameNotDiagonal(Vertex),

    #[error("invalid graph description: {0}")]
    Invalid(String),
}

pub type GraphResult<T> = Result<T, GraphError>;

/// Pauli axis used for a single-qubit measurement.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementBasis {
    X,
    Y,
    Z,
}

impl MeasurementBasis {
    pub const ALL: [MeasurementBasis; 3] = [Self::X, Self::Y, Self::Z];

    pub fn letter(self) -> char {
        match self {
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }
}

impl fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for MeasurementBasis {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Self::from_letter), chars.next()) {
            (Some(b), None) => Ok(b),
            _ => Err(GraphError::Invalid(format!("not a Pauli basis: {s:?}"))),
        }
    }
}

/// Simple undirected graph on labelled vertices.
///
/// The adjacency map is ordered so iteration, serialization and every
/// tie-break that depends on "smallest label" are deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "io::GraphJson", try_from = "io::GraphJson")]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edgeless graph on the given labels.
    pub fn empty<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        Self {
            adj: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    pub fn from_edges<I, E>(vertices: I, edges: E) -> GraphResult<Self>
    where
        I: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Path visiting `labels` in order.
    pub fn path(labels: &[Vertex]) -> Self {
        let mut g = Self::empty(labels.iter().copied());
        for w in labels.windows(2) {
            g.insert_edge(w[0], w[1]);
        }
        g
    }

    /// Cycle visiting `labels` in order and closing back to the first.
    pub fn cycle(labels: &[Vertex]) -> Self {
        let mut g = Self::path(labels);
        if labels.len() > 2 {
            g.insert_edge(labels[0], labels[labels.len() - 1]);
        }
        g
    }

    pub fn star(center: Vertex, leaves: &[Vertex]) -> Self {
        let mut g = Self::empty(std::iter::once(center).chain(leaves.iter().copied()));
        for &l in leaves {
            g.insert_edge(center, l);
        }
        g
    }

    pub fn complete(labels: &[Vertex]) -> Self {
        let mut g = Self::empty(labels.iter().copied());
        for (i, &u) in labels.iter().enumerate() {
            for &v in &labels[i + 1..] {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|ns| ns.contains(&v))
    }

    pub fn neighbors(&self, v: Vertex) -> GraphResult<&BTreeSet<Vertex>> {
        self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: Vertex) -> GraphResult<usize> {
        self.neighbors(v).map(BTreeSet::len)
    }

    pub fn max_label(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    pub fn add_vertex(&mut self, v: Vertex) -> GraphResult<()> {
        if self.adj.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adj.insert(v, BTreeSet::new());
        Ok(())
    }

    /// Adds an edge; adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> GraphResult<()> {
        self.check_pair(u, v)?;
        self.insert_edge(u, v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> GraphResult<()> {
        self.check_pair(u, v)?;
        self.adj.get_mut(&u).unwrap().remove(&v);
        self.adj.get_mut(&v).unwrap().remove(&u);
        Ok(())
    }

    pub fn toggle_edge(&mut self, u: Vertex, v: Vertex) -> GraphResult<()> {
        self.check_pair(u, v)?;
        self.flip(u, v);
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> GraphResult<BTreeSet<Vertex>> {
        let ns = self.adj.remove(&v).ok_or(GraphError::UnknownVertex(v))?;
        for u in &ns {
            self.adj.get_mut(u).unwrap().remove(&v);
        }
        Ok(ns)
    }

    /// CZ between `u` and `v`: toggles the edge.
    pub fn apply_cz(&self, u: Vertex, v: Vertex) -> GraphResult<Graph> {
        let mut g = self.clone();
        g.toggle_edge(u, v)?;
        Ok(g)
    }

    /// Local complementation at `v`: every pair of neighbours of `v` has its
    /// edge toggled.
    pub fn local_complement(&self, v: Vertex) -> GraphResult<Graph> {
        let mut g = self.clone();
        g.local_complement_mut(v)?;
        Ok(g)
    }

    pub fn local_complement_mut(&mut self, v: Vertex) -> GraphResult<()> {
        let ns: Vec<Vertex> = self.neighbors(v)?.iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                self.flip(a, b);
            }
        }
        Ok(())
    }

    /// The neighbour used as the pivot partner for an X measurement on `v`:
    /// the smallest-labelled neighbour, or `None` when `v` is isolated.
    pub fn x_partner(&self, v: Vertex) -> GraphResult<Option<Vertex>> {
        Ok(self.neighbors(v)?.iter().next().copied())
    }

    /// Graph rule for a Pauli measurement of `v`.
    ///
    /// * `Z`: delete `v`.
    /// * `Y`: complement at `v`, then delete `v`.
    /// * `X`: complement at `v`, at its partner `w` ([`Graph::x_partner`]),
    ///   at `v` again, then delete `v`. An isolated `v` is simply deleted.
    ///
    /// The result represents the post-measurement state only up to
    /// single-qubit Cliffords on the former neighbourhood; see
    /// [`FramedGraph`] for the exact byproducts.
    pub fn measure_pauli(&self, v: Vertex, basis: MeasurementBasis) -> GraphResult<Graph> {
        let mut g = self.clone();
        g.measure_pauli_mut(v, basis)?;
        Ok(g)
    }

    pub fn measure_pauli_mut(&mut self, v: Vertex, basis: MeasurementBasis) -> GraphResult<()> {
        match basis {
            MeasurementBasis::Z => {}
            MeasurementBasis::Y => self.local_complement_mut(v)?,
            MeasurementBasis::X => {
                if let Some(w) = self.x_partner(v)? {
                    self.local_complement_mut(v)?;
                    self.local_complement_mut(w)?;
                    self.local_complement_mut(v)?;
                }
            }
        }
        self.remove_vertex(v)?;
        Ok(())
    }

    /// Subgraph induced on the given vertices (unknown labels are ignored).
    pub fn induced<'a, I: IntoIterator<Item = &'a Vertex>>(&self, keep: I) -> Graph {
        let keep: BTreeSet<Vertex> = keep.into_iter().copied().filter(|v| self.contains(*v)).collect();
        let adj = keep
            .iter()
            .map(|&v| (v, self.adj[&v].intersection(&keep).copied().collect()))
            .collect();
        Graph { adj }
    }

    /// Connected components, each as an ordered vertex set, ordered by their
    /// smallest label.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adj[&v] {
                    if seen.insert(u) {
                        comp.insert(u);
                        queue.push_back(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Disjoint union. Fails on a shared label.
    pub fn disjoint_union(&self, other: &Graph) -> GraphResult<Graph> {
        let mut g = self.clone();
        for (&v, ns) in &other.adj {
            if g.adj.contains_key(&v) {
                return Err(GraphError::DuplicateVertex(v));
            }
            g.adj.insert(v, ns.clone());
        }
        Ok(g)
    }

    /// Applies a label map; labels missing from `map` are kept.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> GraphResult<Graph> {
        let f = |v: Vertex| map.get(&v).copied().unwrap_or(v);
        let mut g = Graph::new();
        for v in self.vertices() {
            g.add_vertex(f(v))?;
        }
        for (u, v) in self.edges() {
            g.insert_edge(f(u), f(v));
        }
        Ok(g)
    }

    /// Dense state vector of the graph state, qubits in ascending label order.
    pub fn to_state_vector(&self) -> GraphResult<StateVector> {
        StateVector::from_graph(self)
    }

    fn check_pair(&self, u: Vertex, v: Vertex) -> GraphResult<()> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.adj.contains_key(&x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        Ok(())
    }

    // Callers guarantee both endpoints exist and differ.
    fn insert_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert_ne!(u, v);
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
    }

    fn flip(&mut self, u: Vertex, v: Vertex) {
        let ns = self.adj.get_mut(&u).unwrap();
        if !ns.remove(&v) {
            ns.insert(v);
            self.adj.get_mut(&v).unwrap().insert(u);
        } else {
            self.adj.get_mut(&v).unwrap().remove(&u);
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices().map(|v| v.to_string()).collect();
        let es: Vec<String> = self.edges().map(|(u, v)| format!("{u}-{v}")).collect();
        write!(f, "V{{{}}} E{{{}}}", vs.join(","), es.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(labels: &[Vertex]) -> Graph {
        Graph::path(labels)
    }

    #[test]
    fn cz_toggles_edges() {
        let g = p(&[1, 2]);
        assert_eq!(g.apply_cz(1, 2).unwrap(), Graph::empty([1, 2]));
        let g = Graph::empty([1, 2, 3]).apply_cz(1, 2).unwrap().apply_cz(2, 3).unwrap();
        assert_eq!(g, p(&[1, 2, 3]));
    }

    #[test]
    fn cz_errors() {
        let g = Graph::empty([1, 2]);
        assert_eq!(g.apply_cz(1, 1), Err(GraphError::SelfLoop(1)));
        assert_eq!(g.apply_cz(1, 7), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn local_complement_examples() {
        assert_eq!(p(&[1, 2, 3]).local_complement(2).unwrap(), Graph::complete(&[1, 2, 3]));
        let g = Graph::from_edges([1, 2, 3, 4], [(1, 2)]).unwrap();
        assert_eq!(g.local_complement(4).unwrap(), g);
        let star = Graph::star(0, &[1, 2, 3]);
        assert_eq!(star.local_complement(0).unwrap(), Graph::complete(&[0, 1, 2, 3]));
        assert_eq!(p(&[1, 2]).local_complement(9), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn measurement_rules() {
        let g = p(&[1, 2, 3]);
        assert_eq!(g.measure_pauli(2, MeasurementBasis::Z).unwrap(), Graph::empty([1, 3]));
        assert_eq!(g.measure_pauli(2, MeasurementBasis::Y).unwrap(), p(&[1, 3]));
        let g = p(&[1, 2, 3, 4]);
        assert_eq!(g.x_partner(2).unwrap(), Some(1));
        assert_eq!(g.measure_pauli(2, MeasurementBasis::X).unwrap(), p(&[1, 3, 4]));
        let iso = Graph::empty([5, 6]);
        assert_eq!(iso.measure_pauli(5, MeasurementBasis::X).unwrap(), Graph::empty([6]));
    }

    #[test]
    fn components_and_induced() {
        let g = Graph::from_edges([1, 2, 3, 4, 5], [(1, 2), (4, 5)]).unwrap();
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[0], BTreeSet::from([1, 2]));
        assert_eq!(g.induced(&[1, 2, 4]).edge_count(), 1);
    }

    #[test]
    fn basis_parsing() {
        assert_eq!("y".parse::<MeasurementBasis>().unwrap(), MeasurementBasis::Y);
        assert!("XY".parse::<MeasurementBasis>().is_err());
    }
}
