//! Bitmask adjacency for orbit enumeration.

use super::{Graph, GraphError, GraphResult, Vertex};

pub(crate) const DENSE_LIMIT: usize = 64;

/// Adjacency rows over positions `0..n`; row `i` has bit `j` set when
/// positions `i` and `j` are adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Dense {
    pub rows: Vec<u64>,
}

impl Dense {
    pub fn from_graph(g: &Graph, labels: &[Vertex]) -> GraphResult<Dense> {
        if labels.len() > DENSE_LIMIT {
            return Err(GraphError::SizeLimit {
                what: "dense graph",
                limit: DENSE_LIMIT,
                actual: labels.len(),
            });
        }
        let pos = |v: Vertex| labels.binary_search(&v).map_err(|_| GraphError::UnknownVertex(v));
        let mut rows = vec![0u64; labels.len()];
        for (u, v) in g.edges() {
            let (i, j) = (pos(u)?, pos(v)?);
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
        Ok(Dense { rows })
    }

    pub fn to_graph(&self, labels: &[Vertex]) -> Graph {
        let mut g = Graph::empty(labels.iter().copied());
        for (i, &row) in self.rows.iter().enumerate() {
            let mut r = row >> (i + 1);
            let mut j = i + 1;
            while r != 0 {
                if r & 1 == 1 {
                    g.insert_edge(labels[i], labels[j]);
                }
                r >>= 1;
                j += 1;
            }
        }
        g
    }

    pub fn local_complement(&self, v: usize) -> Dense {
        let mut rows = self.rows.clone();
        let nv = self.rows[v];
        let mut r = nv;
        while r != 0 {
            let u = r.trailing_zeros() as usize;
            rows[u] ^= nv & !(1 << u);
            r &= r - 1;
        }
        Dense { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_matches_sparse() {
        let g = Graph::from_edges([2, 4, 6, 8], [(2, 4), (4, 6), (4, 8)]).unwrap();
        let labels: Vec<_> = g.vertices().collect();
        let d = Dense::from_graph(&g, &labels).unwrap();
        assert_eq!(d.to_graph(&labels), g);
        for (i, &v) in labels.iter().enumerate() {
            assert_eq!(d.local_complement(i).to_graph(&labels), g.local_complement(v).unwrap());
        }
    }
}
