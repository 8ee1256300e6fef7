//! Local-complementation orbits and graph isomorphism.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::dense::Dense;
use super::{Graph, GraphError, GraphResult, Vertex};

/// Default cap on the number of graphs visited during an orbit search.
pub const DEFAULT_ORBIT_LIMIT: usize = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceOptions {
    /// Also accept graphs whose orbits meet after renaming vertices.
    pub allow_relabeling: bool,
    pub orbit_limit: usize,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            allow_relabeling: false,
            orbit_limit: DEFAULT_ORBIT_LIMIT,
        }
    }
}

/// Label-preserving LC equivalence: is `g2` reachable from `g1` by a
/// sequence of local complementations?
pub fn locally_equivalent(g1: &Graph, g2: &Graph) -> GraphResult<bool> {
    locally_equivalent_with(g1, g2, EquivalenceOptions::default())
}

pub fn locally_equivalent_with(g1: &Graph, g2: &Graph, opts: EquivalenceOptions) -> GraphResult<bool> {
    if g1.vertex_count() != g2.vertex_count() {
        return Err(GraphError::VertexSetMismatch);
    }
    if opts.allow_relabeling {
        return relabeled(g1, g2, opts.orbit_limit);
    }
    if g1.vertex_set() != g2.vertex_set() {
        return Err(GraphError::VertexSetMismatch);
    }
    // Components must match exactly; search each independently.
    let comps = g1.components();
    if comps != g2.components() {
        return Ok(false);
    }
    for comp in comps {
        if !bidirectional(&g1.induced(&comp), &g2.induced(&comp), opts.orbit_limit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn bidirectional(a: &Graph, b: &Graph, limit: usize) -> GraphResult<bool> {
    if a == b {
        return Ok(true);
    }
    let labels: Vec<Vertex> = a.vertices().collect();
    let da = Dense::from_graph(a, &labels)?;
    let db = Dense::from_graph(b, &labels)?;
    let mut seen = [HashSet::from([da.clone()]), HashSet::from([db.clone()])];
    let mut frontier = [vec![da], vec![db]];
    loop {
        // Grow the side with the smaller frontier by one full level.
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            return Ok(false);
        }
        let mut next = Vec::new();
        for g in std::mem::take(&mut frontier[side]) {
            for v in 0..g.len() {
                let h = g.local_complement(v);
                if seen[1 - side].contains(&h) {
                    return Ok(true);
                }
                if seen[side].insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        if seen[0].len() + seen[1].len() > limit {
            return Err(GraphError::OrbitLimit(limit));
        }
        frontier[side] = next;
    }
}

/// A sequence of vertices whose local complementations, applied in order,
/// turn `from` into `to`; `None` when the graphs are not LC-equivalent.
pub fn lc_sequence(from: &Graph, to: &Graph, limit: usize) -> GraphResult<Option<Vec<Vertex>>> {
    if from.vertex_set() != to.vertex_set() {
        return Err(GraphError::VertexSetMismatch);
    }
    let labels: Vec<Vertex> = from.vertices().collect();
    let da = Dense::from_graph(from, &labels)?;
    let db = Dense::from_graph(to, &labels)?;
    if da == db {
        return Ok(Some(Vec::new()));
    }
    // parent[side][g] = (previous graph, vertex complemented to reach g)
    let mut parent: [HashMap<Dense, Option<(Dense, usize)>>; 2] =
        [HashMap::from([(da.clone(), None)]), HashMap::from([(db.clone(), None)])];
    let mut frontier = [vec![da], vec![db]];
    let meet = loop {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            break None;
        }
        let mut next = Vec::new();
        let mut hit = None;
        'grow: for g in std::mem::take(&mut frontier[side]) {
            for v in 0..g.len() {
                let h = g.local_complement(v);
                if !parent[side].contains_key(&h) {
                    parent[side].insert(h.clone(), Some((g.clone(), v)));
                    if parent[1 - side].contains_key(&h) {
                        hit = Some(h);
                        break 'grow;
                    }
                    next.push(h);
                }
            }
        }
        if hit.is_some() {
            break hit;
        }
        if parent[0].len() + parent[1].len() > limit {
            return Err(GraphError::OrbitLimit(limit));
        }
        frontier[side] = next;
    };
    let Some(meet) = meet else {
        return Ok(None);
    };
    // Local complementation is an involution, so the backward half is
    // replayed in reverse order with the same vertices.
    let mut forward = Vec::new();
    let mut cur = meet.clone();
    while let Some(Some((prev, v))) = parent[0].get(&cur) {
        forward.push(labels[*v]);
        cur = prev.clone();
    }
    forward.reverse();
    let mut cur = meet;
    while let Some(Some((prev, v))) = parent[1].get(&cur) {
        forward.push(labels[*v]);
        cur = prev.clone();
    }
    Ok(Some(forward))
}

/// Every graph reachable from `g` by local complementations.
pub fn lc_orbit(g: &Graph, limit: usize) -> GraphResult<Vec<Graph>> {
    let labels: Vec<Vertex> = g.vertices().collect();
    let start = Dense::from_graph(g, &labels)?;
    let mut seen = HashSet::from([start.clone()]);
    let mut order = vec![start];
    let mut i = 0;
    while i < order.len() {
        for v in 0..order[i].len() {
            let h = order[i].local_complement(v);
            if seen.insert(h.clone()) {
                if seen.len() > limit {
                    return Err(GraphError::OrbitLimit(limit));
                }
                order.push(h);
            }
        }
        i += 1;
    }
    Ok(order.into_iter().map(|d| d.to_graph(&labels)).collect())
}

fn relabeled(g1: &Graph, g2: &Graph, limit: usize) -> GraphResult<bool> {
    let target = degree_sequence(g2);
    for h in lc_orbit(g1, limit)? {
        if h.edge_count() == g2.edge_count() && degree_sequence(&h) == target && isomorphic(&h, g2) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn degree_sequence(g: &Graph) -> Vec<usize> {
    let mut d: Vec<usize> = g.vertices().map(|v| g.degree(v).unwrap()).collect();
    d.sort_unstable();
    d
}

/// Graph isomorphism by degree-pruned backtracking.
pub fn isomorphic(g1: &Graph, g2: &Graph) -> bool {
    isomorphism(g1, g2).is_some()
}

/// A label map `g1 → g2` preserving adjacency, if one exists.
pub fn isomorphism(g1: &Graph, g2: &Graph) -> Option<BTreeMap<Vertex, Vertex>> {
    if g1.vertex_count() != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
        || degree_sequence(g1) != degree_sequence(g2)
    {
        return None;
    }
    let sig = |g: &Graph, v: Vertex| {
        let mut nd: Vec<usize> = g.neighbors(v).unwrap().iter().map(|&u| g.degree(u).unwrap()).collect();
        nd.sort_unstable();
        (g.degree(v).unwrap(), nd)
    };
    let mut order: Vec<Vertex> = g1.vertices().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g1.degree(v).unwrap()));
    let sig1: BTreeMap<Vertex, _> = g1.vertices().map(|v| (v, sig(g1, v))).collect();
    let sig2: BTreeMap<Vertex, _> = g2.vertices().map(|v| (v, sig(g2, v))).collect();

    fn extend(
        k: usize,
        order: &[Vertex],
        g1: &Graph,
        g2: &Graph,
        sig1: &BTreeMap<Vertex, (usize, Vec<usize>)>,
        sig2: &BTreeMap<Vertex, (usize, Vec<usize>)>,
        map: &mut BTreeMap<Vertex, Vertex>,
        used: &mut HashSet<Vertex>,
    ) -> bool {
        let Some(&v) = order.get(k) else {
            return true;
        };
        for w in g2.vertices() {
            if used.contains(&w) || sig1[&v] != sig2[&w] {
                continue;
            }
            let consistent = map
                .iter()
                .all(|(&a, &b)| g1.has_edge(a, v) == g2.has_edge(b, w));
            if !consistent {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            if extend(k + 1, order, g1, g2, sig1, sig2, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&w);
        }
        false
    }

    let mut map = BTreeMap::new();
    let mut used = HashSet::new();
    extend(0, &order, g1, g2, &sig1, &sig2, &mut map, &mut used).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_and_complete_are_equivalent() {
        let star = Graph::star(1, &[2, 3, 4]);
        assert!(locally_equivalent(&star, &Graph::complete(&[1, 2, 3, 4])).unwrap());
    }

    #[test]
    fn path_and_star_are_not() {
        let p4 = Graph::path(&[1, 2, 3, 4]);
        let star = Graph::star(2, &[1, 3, 4]);
        assert!(!locally_equivalent(&p4, &star).unwrap());
        let opts = EquivalenceOptions {
            allow_relabeling: true,
            ..Default::default()
        };
        assert!(!locally_equivalent_with(&p4, &star, opts).unwrap());
    }

    #[test]
    fn relabeling_option() {
        let a = Graph::star(1, &[2, 3, 4]);
        let b = Graph::star(4, &[1, 2, 3]);
        assert!(locally_equivalent(&a, &b).unwrap());
        let c4 = Graph::cycle(&[1, 2, 3, 4]);
        let c4b = Graph::cycle(&[1, 3, 2, 4]);
        let opts = EquivalenceOptions {
            allow_relabeling: true,
            ..Default::default()
        };
        assert!(locally_equivalent_with(&c4, &c4b, opts).unwrap());
    }

    #[test]
    fn orbit_limit_is_reported() {
        let g = Graph::cycle(&(0..10).collect::<Vec<_>>());
        let h = Graph::path(&(0..10).collect::<Vec<_>>());
        let opts = EquivalenceOptions {
            allow_relabeling: false,
            orbit_limit: 10,
        };
        assert_eq!(locally_equivalent_with(&g, &h, opts), Err(GraphError::OrbitLimit(10)));
    }

    #[test]
    fn mismatched_vertex_sets() {
        let a = Graph::path(&[1, 2]);
        let b = Graph::path(&[1, 2, 3]);
        assert_eq!(locally_equivalent(&a, &b), Err(GraphError::VertexSetMismatch));
    }

    #[test]
    fn lc_sequence_reaches_target() {
        let a = Graph::star(1, &[2, 3, 4, 5]);
        let b = Graph::star(4, &[1, 2, 3, 5]);
        let seq = lc_sequence(&a, &b, DEFAULT_ORBIT_LIMIT).unwrap().unwrap();
        let mut g = a.clone();
        for v in seq {
            g.local_complement_mut(v).unwrap();
        }
        assert_eq!(g, b);
        let p = Graph::path(&[1, 2, 3, 4, 5]);
        assert_eq!(lc_sequence(&a, &p, DEFAULT_ORBIT_LIMIT).unwrap(), None);
    }

    #[test]
    fn isomorphism_finds_map() {
        let a = Graph::path(&[1, 2, 3, 4]);
        let b = Graph::path(&[7, 5, 9, 6]);
        let m = isomorphism(&a, &b).unwrap();
        for (u, v) in a.edges() {
            assert!(b.has_edge(m[&u], m[&v]));
        }
        assert!(!isomorphic(&a, &Graph::star(5, &[6, 7, 9])));
    }
}
