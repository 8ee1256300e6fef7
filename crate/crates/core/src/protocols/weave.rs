//! Graph-level weaving and self-fusion, with their optical programs.

use super::{Fusion, Program, ProtocolError, Result};
use crate::graph::{FramedGraph, Graph, GraphError, Vertex};
use crate::optics::SourceSpec;

fn source(g: &Graph) -> SourceSpec {
    SourceSpec::Graph {
        ports: g.vertices().collect(),
        edges: g.edges().map(|(a, b)| [a, b]).collect(),
    }
}

fn aux_label(g1: &Graph, g2: &Graph) -> Vertex {
    g1.max_label().max(g2.max_label()).map_or(0, |m| m + 1)
}

fn check_weave(g1: &Graph, m: Vertex, g2: &Graph, n: Vertex) -> Result<()> {
    if let Some(v) = g1.vertices().find(|&v| g2.contains(v)) {
        return Err(GraphError::DuplicateVertex(v).into());
    }
    for (g, v) in [(g1, m), (g2, n)] {
        if !g.contains(v) {
            return Err(GraphError::UnknownVertex(v).into());
        }
    }
    Ok(())
}

/// Connects `m ∈ g1` and `n ∈ g2` with one auxiliary photon.
///
/// The result is the union with the edge `m–n` and a new vertex, labelled
/// one above the largest label, attached to `n` only.
pub fn weave_graphs(g1: &Graph, m: Vertex, g2: &Graph, n: Vertex) -> Result<Graph> {
    Ok(weave_program(g1, m, g2, n)?.fused()?.into_graph())
}

/// The auxiliary photon meets `m` and then `n`, each time at a PBS followed
/// by a Hadamard plate. Succeeds with probability 1/4.
pub fn weave_program(g1: &Graph, m: Vertex, g2: &Graph, n: Vertex) -> Result<Program> {
    check_weave(g1, m, g2, n)?;
    let a = aux_label(g1, g2);
    Ok(Program {
        sources: vec![source(g1), source(g2), SourceSpec::Plus(a)],
        fusions: vec![Fusion::weave(m, a), Fusion::weave(n, a)],
        measure: Vec::new(),
    })
}

/// Fuses two photons of the same graph state.
///
/// Every neighbour of `l` toggles its edge to `f` and `l` is left as a leaf
/// of `f`. Common neighbours of `f` and `l` therefore lose their edge to `f`.
pub fn fuse_within(g: &Graph, f: Vertex, l: Vertex) -> Result<Graph> {
    let mut fg = FramedGraph::new(g.clone());
    fg.fuse(f, l, true)?;
    Ok(fg.into_graph())
}

/// Single PBS plus Hadamard plate acting on two photons of `g`.
pub fn fuse_within_program(g: &Graph, f: Vertex, l: Vertex) -> Result<Program> {
    if f == l {
        return Err(GraphError::SelfLoop(f).into());
    }
    if g.has_edge(f, l) {
        return Err(ProtocolError::Graph(GraphError::Adjacent(f, l)));
    }
    Ok(Program {
        sources: vec![source(g)],
        fusions: vec![Fusion::weave(f, l)],
        measure: Vec::new(),
    })
}
