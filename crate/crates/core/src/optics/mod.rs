//! Linear-optical simulation of polarisation-encoded photons.
//!
//! States are sparse superpositions of Fock occupation patterns over
//! `(port, polarisation)` modes. Polarising beam splitters permute modes,
//! half-wave plates mix the two polarisations of a port, and coincidence
//! postselection keeps the one-photon-per-port component. `H` encodes the
//! logical `0`, `V` the logical `1`.

mod circuit;
mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circuit::{ghz_chain, weaving_chain, Circuit, CircuitBranch, CircuitRun, Element, MeasureSpec};
pub use state::{
    DumpMode, DumpTerm, ModeLabel, Pattern, PhotonicState, PolBasis, PolBranch, PolOutcome, Polarization,
    StateDump,
};

use crate::C64;

/// Spatial port index.
pub type Port = u32;

pub const MAX_PORTS: usize = 16;
pub const MAX_PHOTONS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("unknown port {0}")]
    UnknownPort(Port),

    #[error("port {0} used twice")]
    PortCollision(Port),

    #[error("port {0} exceeds the {MAX_PORTS}-port limit")]
    PortLimit(Port),

    #[error("{0} photons exceed the {MAX_PHOTONS}-photon limit")]
    PhotonLimit(usize),

    #[error("unsupported wave-plate angle {0}")]
    UnsupportedAngle(f64),

    #[error("port {0} does not hold exactly one photon in every term")]
    IndefinitePhotonNumber(Port),

    #[error("occupancy violation: {0}")]
    Occupancy(String),

    #[error("invalid circuit: {0}")]
    Invalid(String),
}

pub type OpticsResult<T> = Result<T, OpticsError>;

/// Photon sources.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceSpec {
    /// `|+⟩` on one port.
    Plus(Port),
    /// `(|HH⟩ + |VV⟩)/√2`.
    #[serde(rename = "bell")]
    BellPsi([Port; 2]),
    /// `(|+H⟩ + |−V⟩)/√2`, the two-vertex graph state.
    #[serde(rename = "gbell")]
    GBell([Port; 2]),
    /// Graph state with one photon per listed port; edges are port pairs.
    Graph { ports: Vec<Port>, edges: Vec<[Port; 2]> },
}

impl SourceSpec {
    pub fn ports(&self) -> Vec<Port> {
        match self {
            SourceSpec::Plus(p) => vec![*p],
            SourceSpec::BellPsi(ps) | SourceSpec::GBell(ps) => ps.to_vec(),
            SourceSpec::Graph { ports, .. } => ports.clone(),
        }
    }

    pub fn state(&self) -> OpticsResult<PhotonicState> {
        use Polarization::{H, V};
        let c = |x: f64| C64::new(x, 0.0);
        match self {
            SourceSpec::Plus(p) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                PhotonicState::single(*p, c(r), c(r))
            }
            SourceSpec::BellPsi([a, b]) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                PhotonicState::from_polarizations(&[*a, *b], &[(vec![H, H], c(r)), (vec![V, V], c(r))])
            }
            SourceSpec::GBell([a, b]) => PhotonicState::from_polarizations(
                &[*a, *b],
                &[
                    (vec![H, H], c(0.5)),
                    (vec![H, V], c(0.5)),
                    (vec![V, H], c(0.5)),
                    (vec![V, V], c(-0.5)),
                ],
            ),
            SourceSpec::Graph { ports, edges } => {
                let n = ports.len();
                if n > MAX_PHOTONS {
                    return Err(OpticsError::PhotonLimit(n));
                }
                let idx = |p: Port| {
                    ports
                        .iter()
                        .position(|&q| q == p)
                        .ok_or(OpticsError::UnknownPort(p))
                };
                let mut pairs = Vec::with_capacity(edges.len());
                for &[a, b] in edges {
                    let (i, j) = (idx(a)?, idx(b)?);
                    if i == j {
                        return Err(OpticsError::Invalid(format!("self-loop on port {a}")));
                    }
                    pairs.push((i, j));
                }
                let amp = 1.0 / ((1u64 << n) as f64).sqrt();
                let terms: Vec<(Vec<Polarization>, C64)> = (0..1usize << n)
                    .map(|x| {
                        let bit = |i: usize| x >> i & 1 == 1;
                        let odd = pairs.iter().filter(|&&(i, j)| bit(i) && bit(j)).count() % 2 == 1;
                        let pols = (0..n).map(|i| if bit(i) { V } else { H }).collect();
                        (pols, c(if odd { -amp } else { amp }))
                    })
                    .collect();
                PhotonicState::from_polarizations(ports, &terms)
            }
        }
    }
}

/// Tensor product of the given sources.
pub fn prepare(sources: &[SourceSpec]) -> OpticsResult<PhotonicState> {
    let mut s = PhotonicState::vacuum([])?;
    for src in sources {
        let ps = src.ports();
        let distinct: std::collections::BTreeSet<_> = ps.iter().collect();
        if distinct.len() != ps.len() {
            return Err(OpticsError::PortCollision(ps[0]));
        }
        s = s.tensor(&src.state()?)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{state_locally_equivalent, Graph};

    #[test]
    fn prepare_three_plus_photons() {
        let s = prepare(&[SourceSpec::Plus(0), SourceSpec::Plus(1), SourceSpec::Plus(2)]).unwrap();
        assert_eq!(s.len(), 8);
        for (_, a) in s.terms() {
            assert!((a.re - 0.5f64.powf(1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn gbell_is_the_two_vertex_graph_state() {
        let s = prepare(&[SourceSpec::GBell([0, 1])]).unwrap();
        assert_eq!(s.len(), 4);
        let sv = s.extract_logical(&[(0, 1), (1, 2)]).unwrap();
        assert!(sv.equal_up_to_phase(&Graph::path(&[1, 2]).to_state_vector().unwrap(), 1e-12));
    }

    #[test]
    fn graph_source_matches_graph_layer() {
        let src = SourceSpec::Graph {
            ports: vec![3, 5, 7],
            edges: vec![[3, 5], [5, 7]],
        };
        let sv = prepare(&[src]).unwrap().extract_logical(&[(3, 0), (5, 1), (7, 2)]).unwrap();
        let g = Graph::path(&[0, 1, 2]);
        assert!(sv.equal_up_to_phase(&g.to_state_vector().unwrap(), 1e-12));
        assert!(state_locally_equivalent(&sv, &g).unwrap());
    }

    #[test]
    fn port_collision_is_rejected() {
        assert!(prepare(&[SourceSpec::Plus(0), SourceSpec::GBell([0, 1])]).is_err());
        assert!(prepare(&[SourceSpec::GBell([2, 2])]).is_err());
    }

    #[test]
    fn source_json() {
        let s: Vec<SourceSpec> = serde_json::from_str(r#"[{"plus":0},{"gbell":[1,2]},{"bell":[3,4]}]"#).unwrap();
        assert_eq!(s[1], SourceSpec::GBell([1, 2]));
    }
}
