//! 4-regular multigraphs, Eulerian tours and transition minors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{MinorError, Result, TransitionWord};
use crate::graph::{Graph, MeasurementBasis, Vertex};

/// Multigraph in which every vertex has degree four. Loops count twice.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multigraph4R {
    vertices: BTreeSet<Vertex>,
    /// Unordered pairs, repeated for multiplicity, each stored `(min, max)`.
    edges: Vec<(Vertex, Vertex)>,
}

impl Multigraph4R {
    /// Checks 4-regularity.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut edges: Vec<(Vertex, Vertex)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        let m = Self { vertices, edges };
        let deg = m.degrees();
        for &(a, b) in &m.edges {
            for v in [a, b] {
                if !m.vertices.contains(&v) {
                    return Err(MinorError::UnknownVertex(v));
                }
            }
        }
        if let Some(&v) = m.vertices.iter().find(|v| deg.get(v).copied().unwrap_or(0) != 4) {
            return Err(MinorError::NotFourRegular(v, deg.get(&v).copied().unwrap_or(0)));
        }
        Ok(m)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn degrees(&self) -> BTreeMap<Vertex, usize> {
        let mut deg: BTreeMap<Vertex, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(a, b) in &self.edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg
    }

    pub fn multiplicity(&self, a: Vertex, b: Vertex) -> usize {
        let e = (a.min(b), a.max(b));
        self.edges.iter().filter(|&&x| x == e).count()
    }

    /// Connected components as vertex sets.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in &self.vertices {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = BTreeSet::from([s]);
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &adj[&v] {
                    if seen.insert(u) {
                        comp.insert(u);
                        stack.push(u);
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

    /// Sub-multigraph on a union of components.
    pub fn restrict(&self, keep: &BTreeSet<Vertex>) -> Multigraph4R {
        Multigraph4R {
            vertices: keep.clone(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .collect(),
        }
    }
}

/// `C_n^{1,2}`: `i ~ j` iff their cyclic distance is 1 or 2.
pub fn build_circulant(n: usize) -> Result<Multigraph4R> {
    if n < 5 {
        return Err(MinorError::TooSmall { n, min: 5 });
    }
    let n32 = n as Vertex;
    let edges = (0..n32).flat_map(|i| [(i, (i + 1) % n32), (i, (i + 2) % n32)]);
    Multigraph4R::new(0..n32, edges)
}

/// Closed walk using every edge once, stored without repeating the start.
/// Step `i` runs from `sequence[i]` to `sequence[i + 1]`, cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerianTour {
    pub sequence: Vec<Vertex>,
}

impl EulerianTour {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Step `i` as an unordered pair.
    pub fn step(&self, i: usize) -> (Vertex, Vertex) {
        let a = self.sequence[i];
        let b = self.sequence[(i + 1) % self.sequence.len()];
        (a.min(b), a.max(b))
    }

    /// Positions at which `v` is visited.
    pub fn occurrences(&self, v: Vertex) -> Vec<usize> {
        self.sequence
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Multigraph traced out by the tour.
    pub fn multigraph(&self) -> Result<Multigraph4R> {
        let steps = (0..self.len()).map(|i| self.step(i));
        Multigraph4R::new(self.sequence.iter().copied(), steps)
    }

    /// Whether this is an Eulerian tour of `f`: consecutive vertices are
    /// adjacent and every edge is used exactly once.
    pub fn is_tour_of(&self, f: &Multigraph4R) -> bool {
        let mut steps: Vec<(Vertex, Vertex)> = (0..self.len()).map(|i| self.step(i)).collect();
        steps.sort_unstable();
        steps == f.edges
    }
}

/// The tour `0, 2, 1, 3, 2, 4, …` on `C_n^{1,2}` whose interlacement
/// graph is the cycle `0 – 1 – … – (n−1)`.
pub fn canonical_tour(n: usize) -> Result<EulerianTour> {
    if n < 6 || n % 2 == 1 {
        return Err(MinorError::Canonical(n));
    }
    let n32 = n as Vertex;
    Ok(EulerianTour {
        sequence: (0..n32).flat_map(|i| [i, (i + 2) % n32]).collect(),
    })
}

/// Hierholzer's algorithm, always taking the lowest-numbered unused edge.
pub fn find_tour(f: &Multigraph4R) -> Result<EulerianTour> {
    if !f.is_connected() {
        return Err(MinorError::Disconnected);
    }
    let Some(start) = f.vertices().next() else {
        return Ok(EulerianTour { sequence: Vec::new() });
    };
    let mut incident: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, &(a, b)) in f.edges.iter().enumerate() {
        incident.entry(a).or_default().push(i);
        if a != b {
            incident.entry(b).or_default().push(i);
        }
    }
    let mut used = vec![false; f.edges.len()];
    let mut cursor: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(f.edges.len() + 1);
    while let Some(&v) = stack.last() {
        let list = &incident[&v];
        let c = cursor.entry(v).or_insert(0);
        while *c < list.len() && used[list[*c]] {
            *c += 1;
        }
        if *c == list.len() {
            circuit.push(v);
            stack.pop();
        } else {
            let e = list[*c];
            used[e] = true;
            let (a, b) = f.edges[e];
            stack.push(if a == v { b } else { a });
        }
    }
    circuit.pop();
    circuit.reverse();
    Ok(EulerianTour { sequence: circuit })
}

/// `u ~ v` iff their visits alternate `u … v … u … v` around the tour.
pub fn interlacement(t: &EulerianTour) -> Graph {
    let mut pos: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, &v) in t.sequence.iter().enumerate() {
        pos.entry(v).or_default().push(i);
    }
    let mut g = Graph::empty(pos.keys().copied());
    let vs: Vec<(Vertex, (usize, usize))> = pos
        .iter()
        .filter(|(_, p)| p.len() == 2)
        .map(|(&v, p)| (v, (p[0], p[1])))
        .collect();
    for (i, &(u, (u0, u1))) in vs.iter().enumerate() {
        for &(v, (v0, v1)) in &vs[i + 1..] {
            let inside = |x: usize| u0 < x && x < u1;
            if inside(v0) != inside(v1) {
                let _ = g.add_edge(u, v);
            }
        }
    }
    g
}

/// Interlacement graphs of one tour per component, combined.
pub fn circle_graph(f: &Multigraph4R) -> Result<Graph> {
    let mut g = Graph::new();
    for comp in f.components() {
        let t = find_tour(&f.restrict(&comp))?;
        g = g.disjoint_union(&interlacement(&t)).map_err(MinorError::Graph)?;
    }
    Ok(g)
}

/// Pairing of the four edge ends at a vertex visited at positions `p < q`
/// of the tour. Ends are named by the tour: `a` enters at `p`, `b` leaves
/// at `p`, `c` enters at `q`, `d` leaves at `q`.
///
/// * `Z`: `a–b`, `c–d` (the tour passes straight through);
/// * `Y`: `a–c`, `b–d` (one half of the tour is reversed);
/// * `X`: `a–d`, `b–c` (the tour splits in two).
pub fn fragment(basis: MeasurementBasis) -> [[usize; 2]; 2] {
    match basis {
        MeasurementBasis::Z => [[0, 1], [2, 3]],
        MeasurementBasis::Y => [[0, 2], [1, 3]],
        MeasurementBasis::X => [[0, 3], [1, 2]],
    }
}

/// Replaces each measured vertex by its fragment, read against the tour
/// `t`. Edge chains running through measured vertices become single edges;
/// closed chains that meet no surviving vertex vanish.
pub fn apply_word(t: &EulerianTour, measured: &[Vertex], word: &TransitionWord) -> Result<Multigraph4R> {
    if measured.len() != word.len() {
        return Err(MinorError::WordLength {
            expected: measured.len(),
            actual: word.len(),
        });
    }
    let len = t.len();
    // End `2i` is step i at its start, `2i + 1` at its finish.
    let mut glue: BTreeMap<usize, usize> = BTreeMap::new();
    let mut gone = BTreeSet::new();
    for (&v, b) in measured.iter().zip(word.letters()) {
        let occ = t.occurrences(v);
        let [p, q] = occ[..] else {
            return Err(MinorError::UnknownVertex(v));
        };
        if !gone.insert(v) {
            return Err(MinorError::Repeated(v));
        }
        let ends = [2 * ((p + len - 1) % len) + 1, 2 * p, 2 * ((q + len - 1) % len) + 1, 2 * q];
        for [x, y] in fragment(b) {
            glue.insert(ends[x], ends[y]);
            glue.insert(ends[y], ends[x]);
        }
    }
    let at = |end: usize| {
        let i = end / 2;
        if end.is_multiple_of(2) {
            t.sequence[i]
        } else {
            t.sequence[(i + 1) % len]
        }
    };
    let mut seen = vec![false; 2 * len];
    let mut edges = Vec::new();
    for start in 0..2 * len {
        if seen[start] || gone.contains(&at(start)) {
            continue;
        }
        let mut end = start;
        loop {
            seen[end] = true;
            let other = end ^ 1;
            seen[other] = true;
            if !gone.contains(&at(other)) {
                edges.push((at(start), at(other)));
                break;
            }
            end = glue[&other];
        }
    }
    let survivors = t.sequence.iter().copied().filter(|v| !gone.contains(v));
    Multigraph4R::new(survivors, edges)
}

/// Splits `v` into two vertices joined by a double edge. The vertex that
/// keeps the label `v` takes the two edges of the second visit and the
/// new vertex `leaf` those of the first visit. The inherited tour runs
/// `… a, leaf, v, leaf, b, … c, v, d, …`, so its interlacement graph is
/// the old one with `leaf` hanging off `v`.
pub fn leaf_expansion(t: &EulerianTour, v: Vertex, leaf: Vertex) -> Result<(Multigraph4R, EulerianTour)> {
    let occ = t.occurrences(v);
    let [p, _] = occ[..] else {
        return Err(MinorError::UnknownVertex(v));
    };
    if t.sequence.contains(&leaf) {
        return Err(MinorError::Repeated(leaf));
    }
    let mut seq = Vec::with_capacity(t.len() + 2);
    for (i, &x) in t.sequence.iter().enumerate() {
        if i == p {
            seq.extend([leaf, v, leaf]);
        } else {
            seq.push(x);
        }
    }
    let tour = EulerianTour { sequence: seq };
    Ok((tour.multigraph()?, tour))
}
