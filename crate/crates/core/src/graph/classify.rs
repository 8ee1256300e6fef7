//! Shape recognition for the graphs a server can hand out.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Graph, Vertex};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Empty,
    Path,
    Star,
    Cycle,
    Caterpillar,
    LeafedCycle,
    CaterpillarForest,
    Other,
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShapeKind::Empty => "empty",
            ShapeKind::Path => "path",
            ShapeKind::Star => "star",
            ShapeKind::Cycle => "cycle",
            ShapeKind::Caterpillar => "caterpillar",
            ShapeKind::LeafedCycle => "leafed-cycle",
            ShapeKind::CaterpillarForest => "caterpillar-forest",
            ShapeKind::Other => "other",
        };
        f.write_str(s)
    }
}

/// One component: a spine (open path, or a cycle when `closed`) and the
/// leaves hanging off each spine vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaterpillarWitness {
    pub spine: Vec<Vertex>,
    pub leaves: BTreeMap<Vertex, Vec<Vertex>>,
    pub closed: bool,
}

impl CaterpillarWitness {
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.spine
            .iter()
            .copied()
            .chain(self.leaves.values().flatten().copied())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.values().map(Vec::len).sum()
    }

    pub fn max_leaves_per_vertex(&self) -> usize {
        self.leaves.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Leaf-carrying spine vertices form one run along the spine (cyclic
    /// for closed spines).
    pub fn leaves_contiguous(&self) -> bool {
        let carry: Vec<bool> = self
            .spine
            .iter()
            .map(|v| self.leaves.get(v).is_some_and(|l| !l.is_empty()))
            .collect();
        let n = carry.len();
        let starts = (0..n)
            .filter(|&i| {
                let prev = if i == 0 {
                    if self.closed {
                        carry[n - 1]
                    } else {
                        false
                    }
                } else {
                    carry[i - 1]
                };
                carry[i] && !prev
            })
            .count();
        starts <= 1
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = if self.closed {
            Graph::cycle(&self.spine)
        } else {
            Graph::path(&self.spine)
        };
        for (&s, ls) in &self.leaves {
            for &l in ls {
                // Witnesses are built from valid graphs; labels are fresh.
                let _ = g.add_vertex(l);
                let _ = g.add_edge(s, l);
            }
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeClass {
    pub kind: ShapeKind,
    /// Decomposition of every component; empty for [`ShapeKind::Other`].
    pub components: Vec<CaterpillarWitness>,
    /// Every component has its leaf-carrying vertices consecutive.
    pub contiguous: bool,
}

impl ShapeClass {
    /// Graph rebuilt from the witness, `None` for unrecognised shapes.
    pub fn representative(&self) -> Option<Graph> {
        if self.kind == ShapeKind::Other {
            return None;
        }
        let mut g = Graph::new();
        for c in &self.components {
            g = g.disjoint_union(&c.to_graph()).ok()?;
        }
        Some(g)
    }

    /// Components with at least one edge.
    pub fn nontrivial_components(&self) -> impl Iterator<Item = &CaterpillarWitness> {
        self.components.iter().filter(|c| c.spine.len() > 1 || c.leaf_count() > 0)
    }
}

/// Classifies `g` and returns a witness.
///
/// Each component has its degree-one vertices stripped once. A tree whose
/// core is a path is a caterpillar; a component whose core is a cycle is a
/// leafed cycle. Isolated vertices are trivial caterpillars.
pub fn classify_graph(g: &Graph) -> ShapeClass {
    let mut comps = Vec::new();
    let mut recognised = true;
    for comp in g.components() {
        match component_witness(g, &comp) {
            Some(w) => comps.push(w),
            None => recognised = false,
        }
    }
    if !recognised {
        return ShapeClass {
            kind: ShapeKind::Other,
            components: Vec::new(),
            contiguous: false,
        };
    }
    let contiguous = comps.iter().all(CaterpillarWitness::leaves_contiguous);
    let nontrivial: Vec<&CaterpillarWitness> = comps
        .iter()
        .filter(|c| c.spine.len() > 1 || c.leaf_count() > 0)
        .collect();
    let kind = match nontrivial.as_slice() {
        [] => ShapeKind::Empty,
        [c] if comps.len() == 1 => single_kind(c),
        cs if cs.iter().all(|c| !c.closed) => ShapeKind::CaterpillarForest,
        _ => ShapeKind::Other,
    };
    ShapeClass {
        kind,
        components: comps,
        contiguous,
    }
}

fn single_kind(c: &CaterpillarWitness) -> ShapeKind {
    let n = c.spine.len() + c.leaf_count();
    match (c.closed, c.leaf_count()) {
        (true, 0) => ShapeKind::Cycle,
        (true, _) => ShapeKind::LeafedCycle,
        (false, 0) => ShapeKind::Path,
        (false, k) if n >= 4 && c.spine.len() == 3 && k == n - 3 => ShapeKind::Star,
        _ => ShapeKind::Caterpillar,
    }
}

fn component_witness(g: &Graph, comp: &BTreeSet<Vertex>) -> Option<CaterpillarWitness> {
    let deg = |v: Vertex| g.degree(v).unwrap();
    if comp.len() <= 2 {
        return Some(CaterpillarWitness {
            spine: comp.iter().copied().collect(),
            leaves: BTreeMap::new(),
            closed: false,
        });
    }
    let leaves: BTreeSet<Vertex> = comp.iter().copied().filter(|&v| deg(v) == 1).collect();
    let core: BTreeSet<Vertex> = comp.difference(&leaves).copied().collect();
    let cg = g.induced(&core);
    let edges = g.induced(comp).edge_count();
    let core_deg = |v: Vertex| cg.degree(v).unwrap();
    if core.iter().any(|&v| core_deg(v) > 2) {
        return None;
    }
    let mut leaf_map: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &l in &leaves {
        let s = *g.neighbors(l).unwrap().iter().next().unwrap();
        leaf_map.entry(s).or_default().push(l);
    }
    if edges == comp.len() - 1 {
        // Tree: the core is a path (or one vertex).
        let mut spine = walk(&cg, &core)?;
        for end in [0, 1] {
            let v = if end == 0 { spine[0] } else { *spine.last().unwrap() };
            if let Some(ls) = leaf_map.get_mut(&v) {
                let l = ls.remove(0);
                if ls.is_empty() {
                    leaf_map.remove(&v);
                }
                if end == 0 {
                    spine.insert(0, l);
                } else {
                    spine.push(l);
                }
            }
        }
        Some(CaterpillarWitness {
            spine,
            leaves: leaf_map,
            closed: false,
        })
    } else if edges == comp.len() && core.iter().all(|&v| core_deg(v) == 2) {
        let spine = walk(&cg, &core)?;
        Some(CaterpillarWitness {
            spine,
            leaves: leaf_map,
            closed: true,
        })
    } else {
        None
    }
}

/// Orders the vertices of a path or cycle, starting at the smallest end.
fn walk(g: &Graph, vs: &BTreeSet<Vertex>) -> Option<Vec<Vertex>> {
    let start = vs
        .iter()
        .copied()
        .find(|&v| g.degree(v).unwrap() <= 1)
        .or_else(|| vs.iter().next().copied())?;
    let mut order = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = g
            .neighbors(cur)
            .unwrap()
            .iter()
            .copied()
            .find(|&u| Some(u) != prev && !order.contains(&u));
        match next {
            Some(u) => {
                order.push(u);
                prev = Some(cur);
                cur = u;
            }
            None => break,
        }
    }
    (order.len() == vs.len()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::isomorphic;

    #[test]
    fn path_has_empty_leaf_map() {
        let c = classify_graph(&Graph::path(&[1, 2, 3, 4, 5]));
        assert_eq!(c.kind, ShapeKind::Path);
        assert_eq!(c.components[0].spine, vec![1, 2, 3, 4, 5]);
        assert!(c.components[0].leaves.is_empty());
    }

    #[test]
    fn leafed_cycle() {
        let mut g = Graph::cycle(&[1, 2, 3, 4, 5, 6]);
        g.add_vertex(7).unwrap();
        g.add_edge(3, 7).unwrap();
        let c = classify_graph(&g);
        assert_eq!(c.kind, ShapeKind::LeafedCycle);
        assert!(isomorphic(&c.representative().unwrap(), &g));
        assert_eq!(classify_graph(&Graph::cycle(&[1, 2, 3, 4])).kind, ShapeKind::Cycle);
    }

    #[test]
    fn forest_of_caterpillars() {
        let a = Graph::star(1, &[2, 3, 4]);
        let b = Graph::path(&[10, 11, 12]);
        let g = a.disjoint_union(&b).unwrap();
        let c = classify_graph(&g);
        assert_eq!(c.kind, ShapeKind::CaterpillarForest);
        assert_eq!(c.representative().unwrap(), g);
    }

    #[test]
    fn star_and_caterpillar() {
        assert_eq!(classify_graph(&Graph::star(0, &[1, 2, 3, 4])).kind, ShapeKind::Star);
        let g = Graph::from_edges(1..=7, [(1, 2), (2, 3), (3, 4), (2, 5), (3, 6), (3, 7)]).unwrap();
        let c = classify_graph(&g);
        assert_eq!(c.kind, ShapeKind::Caterpillar);
        assert!(c.contiguous);
        assert!(isomorphic(&c.representative().unwrap(), &g));
    }

    #[test]
    fn contiguity_flag() {
        // Spine 1..5 with leaves on 2 and 4 only.
        let g = Graph::from_edges(1..=7, [(1, 2), (2, 3), (3, 4), (4, 5), (2, 6), (4, 7)]).unwrap();
        let c = classify_graph(&g);
        assert_eq!(c.kind, ShapeKind::Caterpillar);
        assert!(!c.contiguous);
    }

    #[test]
    fn non_caterpillars() {
        // Spider with three legs of length two.
        let g = Graph::from_edges(0..7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
        assert_eq!(classify_graph(&g).kind, ShapeKind::Other);
        assert_eq!(classify_graph(&Graph::complete(&[1, 2, 3, 4])).kind, ShapeKind::Other);
        assert_eq!(classify_graph(&Graph::empty([1, 2])).kind, ShapeKind::Empty);
    }
}
