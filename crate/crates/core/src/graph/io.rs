use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, GraphResult, Vertex};

#[derive(Serialize, Deserialize)]
pub(super) struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<[Vertex; 2]>,
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            vertices: g.vertices().collect(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        Graph::from_edges(j.vertices, j.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> GraphResult<Graph> {
        serde_json::from_str(s).map_err(|e| GraphError::Invalid(e.to_string()))
    }

    /// Graphviz rendering. Vertices listed in `highlight` are drawn as boxes
    /// (used for server-held photons).
    pub fn to_dot_with(&self, name: &str, highlight: &[Vertex]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        for v in self.vertices() {
            if highlight.contains(&v) {
                let _ = writeln!(s, "  {v} [shape=box];");
            } else {
                let _ = writeln!(s, "  {v};");
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_dot(&self) -> String {
        self.to_dot_with("G", &[])
    }
}
