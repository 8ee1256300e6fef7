//! Simulation of a photon-weaving entanglement server.
//!
//! Two independent engines describe the same physics:
//!
//! * [`optics`] pushes polarisation-encoded photons through polarising beam
//!   splitters and wave plates and postselects on coincidences;
//! * [`graph`] rewrites graph states under local complementation, Pauli
//!   measurements and fusion.
//!
//! [`protocols`] drives both engines through the distribution protocols and
//! [`minors`] classifies the shapes reachable from the server's resource
//! states via Eulerian tours on 4-regular multigraphs.

pub mod exec;
pub mod graph;
pub mod minors;
pub mod optics;
pub mod protocols;

pub use num_complex::Complex64 as C64;
