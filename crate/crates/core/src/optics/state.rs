use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{OpticsError, OpticsResult, Port, MAX_PHOTONS, MAX_PORTS};
use crate::graph::{StateVector, Vertex};
use crate::C64;

const NORM_TOL: f64 = 1e-10;
const ZERO: f64 = 1e-15;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// A spatial port together with a polarisation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub port: Port,
    pub pol: Polarization,
}

impl ModeLabel {
    fn index(self) -> usize {
        2 * self.port as usize + usize::from(self.pol == Polarization::V)
    }

    fn from_index(i: usize) -> Self {
        ModeLabel {
            port: (i / 2) as Port,
            pol: if i.is_multiple_of(2) { Polarization::H } else { Polarization::V },
        }
    }
}

/// Photon counts per mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pattern([u8; 2 * MAX_PORTS]);

impl Pattern {
    pub fn count(&self, m: ModeLabel) -> u8 {
        self.0[m.index()]
    }

    pub fn port_count(&self, p: Port) -> u8 {
        self.0[2 * p as usize] + self.0[2 * p as usize + 1]
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// Occupied modes with their counts, in mode order.
    pub fn modes(&self) -> impl Iterator<Item = (ModeLabel, u8)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (ModeLabel::from_index(i), c))
    }

    fn with(mut self, m: ModeLabel, c: u8) -> Self {
        self.0[m.index()] = c;
        self
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .modes()
            .map(|(m, c)| {
                let pol = if m.pol == Polarization::H { 'H' } else { 'V' };
                if c == 1 {
                    format!("{pol}{}", m.port)
                } else {
                    format!("{pol}{}^{c}", m.port)
                }
            })
            .collect();
        write!(f, "|{}⟩", parts.join(" "))
    }
}

/// Superposition of occupation patterns with a fixed photon number.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonicState {
    terms: BTreeMap<Pattern, C64>,
    photons: usize,
    ports: BTreeSet<Port>,
}

fn factorial(n: u8) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

fn binomial(n: u8, k: u8) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl PhotonicState {
    /// The vacuum on the given port set.
    pub fn vacuum<I: IntoIterator<Item = Port>>(ports: I) -> OpticsResult<Self> {
        let ports: BTreeSet<Port> = ports.into_iter().collect();
        if let Some(&p) = ports.iter().find(|&&p| p as usize >= MAX_PORTS) {
            return Err(OpticsError::PortLimit(p));
        }
        Ok(Self {
            terms: BTreeMap::from([(Pattern::default(), C64::new(1.0, 0.0))]),
            photons: 0,
            ports,
        })
    }

    /// Single-photon state on `port` with the given H and V amplitudes.
    pub fn single(port: Port, h: C64, v: C64) -> OpticsResult<Self> {
        let mut s = Self::vacuum([port])?;
        s.terms.clear();
        s.photons = 1;
        let base = Pattern::default();
        for (pol, a) in [(Polarization::H, h), (Polarization::V, v)] {
            if a.norm() > ZERO {
                s.terms.insert(base.with(ModeLabel { port, pol }, 1), a);
            }
        }
        Ok(s)
    }

    /// Builds a state from explicit one-photon-per-port terms: each entry of
    /// `terms` lists the polarisation of every port in `ports`.
    pub fn from_polarizations(ports: &[Port], terms: &[(Vec<Polarization>, C64)]) -> OpticsResult<Self> {
        let mut s = Self::vacuum(ports.iter().copied())?;
        if s.ports.len() != ports.len() {
            return Err(OpticsError::PortCollision(ports[0]));
        }
        if ports.len() > MAX_PHOTONS {
            return Err(OpticsError::PhotonLimit(ports.len()));
        }
        s.terms.clear();
        s.photons = ports.len();
        for (pols, a) in terms {
            let mut pat = Pattern::default();
            for (&port, &pol) in ports.iter().zip(pols) {
                pat = pat.with(ModeLabel { port, pol }, 1);
            }
            if a.norm() > ZERO {
                *s.terms.entry(pat).or_default() += a;
            }
        }
        Ok(s)
    }

    /// Tensor product; the port sets must be disjoint.
    pub fn tensor(&self, other: &PhotonicState) -> OpticsResult<Self> {
        if let Some(&p) = self.ports.intersection(&other.ports).next() {
            return Err(OpticsError::PortCollision(p));
        }
        let photons = self.photons + other.photons;
        if photons > MAX_PHOTONS {
            return Err(OpticsError::PhotonLimit(photons));
        }
        let mut terms = BTreeMap::new();
        for (pa, a) in &self.terms {
            for (pb, b) in &other.terms {
                let mut pat = *pa;
                for (i, c) in pat.0.iter_mut().enumerate() {
                    *c += pb.0[i];
                }
                terms.insert(pat, a * b);
            }
        }
        Ok(Self {
            terms,
            photons,
            ports: self.ports.union(&other.ports).copied().collect(),
        })
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn ports(&self) -> &BTreeSet<Port> {
        &self.ports
    }

    /// Makes `port` addressable without putting a photon in it.
    pub fn declare_port(&mut self, port: Port) -> OpticsResult<()> {
        if port as usize >= MAX_PORTS {
            return Err(OpticsError::PortLimit(port));
        }
        self.ports.insert(port);
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pattern, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, p: &Pattern) -> C64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(C64::norm_sqr).sum()
    }

    fn check_port(&self, p: Port) -> OpticsResult<()> {
        if self.ports.contains(&p) {
            Ok(())
        } else {
            Err(OpticsError::UnknownPort(p))
        }
    }

    /// Polarising beam splitter between ports `a` and `b`: H stays, V swaps
    /// ports. No phase on reflection.
    pub fn apply_pbs(&self, a: Port, b: Port) -> OpticsResult<Self> {
        self.check_port(a)?;
        self.check_port(b)?;
        if a == b {
            return Err(OpticsError::PortCollision(a));
        }
        let (va, vb) = (
            ModeLabel { port: a, pol: Polarization::V }.index(),
            ModeLabel { port: b, pol: Polarization::V }.index(),
        );
        // A mode permutation maps normalised Fock states to normalised Fock
        // states, so amplitudes are carried over unchanged.
        let terms = self
            .terms
            .iter()
            .map(|(p, &c)| {
                let mut q = *p;
                q.0.swap(va, vb);
                (q, c)
            })
            .collect();
        Ok(Self {
            terms,
            photons: self.photons,
            ports: self.ports.clone(),
        })
    }

    /// Half-wave plate at `angle` degrees on `port`:
    /// `H → cos2θ H + sin2θ V`, `V → sin2θ H − cos2θ V`.
    pub fn apply_hwp(&self, port: Port, angle: f64) -> OpticsResult<Self> {
        self.check_port(port)?;
        if !angle.is_finite() {
            return Err(OpticsError::UnsupportedAngle(angle));
        }
        let t = (2.0 * angle).to_radians();
        let (c, s) = snap(t.cos(), t.sin());
        self.apply_port_unitary(port, [[c, s], [s, -c]])
    }

    /// Applies a 2×2 unitary on the polarisation of every photon in `port`.
    /// Column `j` is the image of `H` (`j = 0`) or `V` (`j = 1`).
    pub fn apply_port_unitary(&self, port: Port, u: [[f64; 2]; 2]) -> OpticsResult<Self> {
        self.check_port(port)?;
        let mh = ModeLabel { port, pol: Polarization::H };
        let mv = ModeLabel { port, pol: Polarization::V };
        let mut out: BTreeMap<Pattern, C64> = BTreeMap::new();
        for (p, &amp) in &self.terms {
            let (nh, nv) = (p.count(mh), p.count(mv));
            if nh + nv == 0 {
                *out.entry(*p).or_default() += amp;
                continue;
            }
            let base = p.with(mh, 0).with(mv, 0);
            let pre = amp / (factorial(nh) * factorial(nv)).sqrt();
            // (u00 H + u10 V)^nh (u01 H + u11 V)^nv, expanded.
            for i in 0..=nh {
                for j in 0..=nv {
                    let coef = binomial(nh, i)
                        * binomial(nv, j)
                        * u[0][0].powi(i as i32)
                        * u[1][0].powi((nh - i) as i32)
                        * u[0][1].powi(j as i32)
                        * u[1][1].powi((nv - j) as i32);
                    if coef.abs() < ZERO {
                        continue;
                    }
                    let (h, v) = (i + j, nh - i + nv - j);
                    let fock = (factorial(h) * factorial(v)).sqrt();
                    *out.entry(base.with(mh, h).with(mv, v)).or_default() += pre * coef * fock;
                }
            }
        }
        out.retain(|_, a| a.norm() > ZERO);
        Ok(Self {
            terms: out,
            photons: self.photons,
            ports: self.ports.clone(),
        })
    }

    /// Keeps the patterns with exactly one photon in each listed port and
    /// none elsewhere. Returns the renormalised state and the probability of
    /// the kept component.
    pub fn postselect_coincidence(&self, ports: &[Port]) -> OpticsResult<(Self, f64)> {
        let want: BTreeSet<Port> = ports.iter().copied().collect();
        if want.len() != ports.len() {
            return Err(OpticsError::PortCollision(ports[0]));
        }
        for &p in ports {
            self.check_port(p)?;
        }
        let total = self.norm_sqr();
        let terms: BTreeMap<Pattern, C64> = self
            .terms
            .iter()
            .filter(|(p, _)| (0..MAX_PORTS as Port).all(|q| p.port_count(q) == u8::from(want.contains(&q))))
            .map(|(p, &a)| (*p, a))
            .collect();
        let mut s = Self {
            terms,
            photons: self.photons,
            ports: self.ports.clone(),
        };
        let kept = s.norm_sqr();
        let prob = if total > 0.0 { kept / total } else { 0.0 };
        s.normalize();
        Ok((s, prob))
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.terms.values_mut().for_each(|a| *a /= n);
        }
    }

    fn require_single(&self, port: Port) -> OpticsResult<()> {
        self.check_port(port)?;
        if self.terms.keys().all(|p| p.port_count(port) == 1) {
            Ok(())
        } else {
            Err(OpticsError::IndefinitePhotonNumber(port))
        }
    }

    /// Measures and absorbs the photon in `port`. Returns every outcome with
    /// its probability and the normalised post-measurement state (empty
    /// when the probability is zero).
    pub fn measure_polarization(&self, port: Port, basis: PolBasis) -> OpticsResult<Vec<PolBranch>> {
        self.require_single(port)?;
        let mh = ModeLabel { port, pol: Polarization::H };
        let mv = ModeLabel { port, pol: Polarization::V };
        let total = self.norm_sqr();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let outcomes = match basis {
            PolBasis::HV => [(PolOutcome::H, 1.0, 0.0), (PolOutcome::V, 0.0, 1.0)],
            PolBasis::PM => [(PolOutcome::Plus, r, r), (PolOutcome::Minus, r, -r)],
        };
        let mut ports = self.ports.clone();
        ports.remove(&port);
        let mut branches = Vec::with_capacity(2);
        for (outcome, eh, ev) in outcomes {
            let mut terms: BTreeMap<Pattern, C64> = BTreeMap::new();
            for (p, &a) in &self.terms {
                let rest = p.with(mh, 0).with(mv, 0);
                let w = if p.count(mh) == 1 { eh } else { ev };
                if w != 0.0 {
                    *terms.entry(rest).or_default() += a * w;
                }
            }
            terms.retain(|_, a| a.norm() > ZERO);
            let mut state = Self {
                terms,
                photons: self.photons - 1,
                ports: ports.clone(),
            };
            let probability = if total > 0.0 { state.norm_sqr() / total } else { 0.0 };
            state.normalize();
            branches.push(PolBranch {
                outcome,
                probability,
                state,
            });
        }
        Ok(branches)
    }

    /// Reads polarisation qubits off single-occupied ports (`H ↦ 0`,
    /// `V ↦ 1`). Every photon must sit in one of the listed ports.
    pub fn extract_logical(&self, port_to_qubit: &[(Port, Vertex)]) -> OpticsResult<StateVector> {
        for &(p, _) in port_to_qubit {
            self.require_single(p)?;
        }
        if port_to_qubit.len() != self.photons {
            return Err(OpticsError::Occupancy(format!(
                "{} ports listed for {} photons",
                port_to_qubit.len(),
                self.photons
            )));
        }
        let n = port_to_qubit.len();
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for (p, &a) in &self.terms {
            let mut idx = 0usize;
            for &(port, _) in port_to_qubit {
                let v = p.count(ModeLabel { port, pol: Polarization::V });
                idx = (idx << 1) | v as usize;
            }
            amps[idx] += a;
        }
        let mut sv = StateVector::new(port_to_qubit.iter().map(|&(_, q)| q).collect(), amps)
            .map_err(|e| OpticsError::Occupancy(e.to_string()))?;
        sv.normalize();
        Ok(sv)
    }

    /// Checks norm and photon-number bookkeeping.
    pub fn check_invariants(&self) -> OpticsResult<()> {
        if self.terms.keys().any(|p| p.total() != self.photons) {
            return Err(OpticsError::Occupancy("mixed photon numbers".into()));
        }
        if self.norm_sqr() > 1.0 + NORM_TOL {
            return Err(OpticsError::Occupancy("norm exceeds one".into()));
        }
        Ok(())
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            photons: self.photons,
            terms: self
                .terms
                .iter()
                .map(|(p, a)| DumpTerm {
                    modes: p
                        .modes()
                        .map(|(m, c)| DumpMode {
                            port: m.port,
                            pol: m.pol,
                            n: c,
                        })
                        .collect(),
                    amplitude: [a.re, a.im],
                })
                .collect(),
        }
    }
}

/// Removes floating noise from `cos`/`sin` of multiples of 45°.
fn snap(c: f64, s: f64) -> (f64, f64) {
    let fix = |x: f64| {
        for t in [0.0, 1.0, -1.0, std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2] {
            if (x - t).abs() < 1e-12 {
                return t;
            }
        }
        x
    };
    (fix(c), fix(s))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolBasis {
    HV,
    PM,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolOutcome {
    H,
    V,
    Plus,
    Minus,
}

impl PolOutcome {
    /// True for the `-1` eigenvalue (`V` or `−`).
    pub fn is_minus(self) -> bool {
        matches!(self, PolOutcome::V | PolOutcome::Minus)
    }
}

#[derive(Clone, Debug)]
pub struct PolBranch {
    pub outcome: PolOutcome,
    pub probability: f64,
    pub state: PhotonicState,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DumpMode {
    pub port: Port,
    pub pol: Polarization,
    pub n: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DumpTerm {
    pub modes: Vec<DumpMode>,
    pub amplitude: [f64; 2],
}

/// Serializable listing of a photonic state.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateDump {
    pub photons: usize,
    pub terms: Vec<DumpTerm>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus(p: Port) -> PhotonicState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PhotonicState::single(p, C64::new(r, 0.0), C64::new(r, 0.0)).unwrap()
    }

    fn h(p: Port) -> PhotonicState {
        PhotonicState::single(p, C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap()
    }

    fn v(p: Port) -> PhotonicState {
        PhotonicState::single(p, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn pbs_routes_by_polarisation() {
        let mut s = h(0);
        s.declare_port(1).unwrap();
        assert_eq!(s.apply_pbs(0, 1).unwrap(), s);
        let mut s = v(0);
        s.declare_port(1).unwrap();
        let out = s.apply_pbs(0, 1).unwrap();
        let (_, p) = out.postselect_coincidence(&[1]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pbs_on_two_plus_photons() {
        let s = plus(0).tensor(&plus(1)).unwrap();
        let (bell, p) = s.apply_pbs(0, 1).unwrap().postselect_coincidence(&[0, 1]).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let sv = bell.extract_logical(&[(0, 0), (1, 1)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sv.amplitude(&[0, 0]) - C64::new(r, 0.0)).norm() < 1e-12);
        assert!((sv.amplitude(&[1, 1]) - C64::new(r, 0.0)).norm() < 1e-12);
        assert!(sv.amplitude(&[0, 1]).norm() < 1e-12);
    }

    #[test]
    fn hwp_matrices() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = h(0).apply_hwp(0, 22.5).unwrap();
        let sv = s.extract_logical(&[(0, 0)]).unwrap();
        assert!((sv.amplitude(&[0]) - C64::new(r, 0.0)).norm() < 1e-12);
        assert!((sv.amplitude(&[1]) - C64::new(r, 0.0)).norm() < 1e-12);
        let s = v(0).apply_hwp(0, 0.0).unwrap();
        assert!((s.extract_logical(&[(0, 0)]).unwrap().amplitude(&[1]) + C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hwp_on_bunched_photons_is_unitary() {
        // Two photons H,V in port 0 after a PBS, then a Hadamard plate.
        let mut s = h(0).tensor(&v(1)).unwrap();
        s = s.apply_pbs(0, 1).unwrap();
        let t = s.apply_hwp(0, 22.5).unwrap();
        assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
        t.check_invariants().unwrap();
        // Hong–Ou–Mandel-like cancellation: H⊗V in one port → (H²−V²)/√2.
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn pm_measurement_of_plus() {
        let b = plus(0).tensor(&plus(1)).unwrap().measure_polarization(0, PolBasis::PM).unwrap();
        assert!((b[0].probability - 1.0).abs() < 1e-12);
        assert!(b[1].probability < 1e-12);
        assert_eq!(b[0].state.photons(), 1);
    }

    #[test]
    fn errors() {
        let s = plus(0);
        assert_eq!(s.apply_pbs(0, 3), Err(OpticsError::UnknownPort(3)));
        assert!(matches!(plus(0).tensor(&plus(0)), Err(OpticsError::PortCollision(0))));
        assert!(PhotonicState::vacuum([16]).is_err());
    }
}
