//! Dense state vectors, used as an independent oracle for the graph calculus.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;

use super::clifford::Matrix2;
use super::{Graph, GraphError, GraphResult, MeasurementBasis, Vertex, STATE_VECTOR_LIMIT};

/// Largest register [`state_locally_equivalent`] will search.
pub const LOCAL_SEARCH_LIMIT: usize = 12;

/// Pure state on labelled qubits.
///
/// Basis index `b` assigns qubit `qubits[i]` the value of bit `n-1-i`, so
/// the first listed qubit is the most significant, matching ket notation
/// `|q0 q1 …⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: Vec<Vertex>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(qubits: Vec<Vertex>, amps: Vec<C64>) -> GraphResult<Self> {
        let distinct: BTreeSet<_> = qubits.iter().collect();
        if distinct.len() != qubits.len() {
            return Err(GraphError::Invalid("repeated qubit label".into()));
        }
        if amps.len() != 1usize << qubits.len() {
            return Err(GraphError::Invalid(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                qubits.len()
            )));
        }
        Ok(Self { qubits, amps })
    }

    /// Graph state in ascending label order.
    pub fn from_graph(g: &Graph) -> GraphResult<Self> {
        let n = g.vertex_count();
        if n > STATE_VECTOR_LIMIT {
            return Err(GraphError::SizeLimit {
                what: "state vector",
                limit: STATE_VECTOR_LIMIT,
                actual: n,
            });
        }
        let qubits: Vec<Vertex> = g.vertices().collect();
        let index = |v: Vertex| qubits.binary_search(&v).unwrap();
        let masks: Vec<usize> = g
            .edges()
            .map(|(u, v)| (1 << (n - 1 - index(u))) | (1 << (n - 1 - index(v))))
            .collect();
        let a = (1usize << n) as f64;
        let a = 1.0 / a.sqrt();
        let amps = (0..1usize << n)
            .map(|b| {
                let odd = masks.iter().filter(|&&m| b & m == m).count() % 2 == 1;
                C64::new(if odd { -a } else { a }, 0.0)
            })
            .collect();
        Ok(Self { qubits, amps })
    }

    pub fn qubits(&self) -> &[Vertex] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    fn position(&self, q: Vertex) -> GraphResult<usize> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .ok_or(GraphError::UnknownVertex(q))
    }

    fn mask(&self, q: Vertex) -> GraphResult<usize> {
        Ok(1 << (self.qubits.len() - 1 - self.position(q)?))
    }

    /// Amplitude of the computational basis state with the given bits, in
    /// qubit order.
    pub fn amplitude(&self, bits: &[u8]) -> C64 {
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        self.amps[idx]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn apply_gate(&mut self, q: Vertex, m: &Matrix2) -> GraphResult<()> {
        let bit = self.mask(q)?;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, p: Vertex, q: Vertex) -> GraphResult<()> {
        let m = self.mask(p)? | self.mask(q)?;
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & m == m {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Projects qubit `q` onto the `±1` eigenstate of `basis` (`minus`
    /// selects `-1`) and removes it. Returns the branch probability and the
    /// normalised remaining state; the state is `None` when the branch has
    /// zero probability.
    pub fn project(
        &self,
        q: Vertex,
        basis: MeasurementBasis,
        minus: bool,
    ) -> GraphResult<(f64, Option<StateVector>)> {
        let pos = self.position(q)?;
        let n = self.qubits.len();
        let bit = 1usize << (n - 1 - pos);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = if minus { -1.0 } else { 1.0 };
        // Bra of the eigenvector: ⟨e| = conj(e0)⟨0| + conj(e1)⟨1|.
        let (e0, e1) = match basis {
            MeasurementBasis::Z => {
                if minus {
                    (C64::new(0.0, 0.0), C64::new(1.0, 0.0))
                } else {
                    (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
                }
            }
            MeasurementBasis::X => (C64::new(r, 0.0), C64::new(s * r, 0.0)),
            MeasurementBasis::Y => (C64::new(r, 0.0), C64::new(0.0, s * r)),
        };
        let low = bit - 1;
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        for k in 0..self.amps.len() / 2 {
            let b0 = ((k & !low) << 1) | (k & low);
            let b1 = b0 | bit;
            out.push(e0.conj() * self.amps[b0] + e1.conj() * self.amps[b1]);
        }
        let mut qubits = self.qubits.clone();
        qubits.remove(pos);
        let mut st = StateVector { qubits, amps: out };
        let p = st.norm_sqr() / self.norm_sqr();
        if p < 1e-14 {
            return Ok((0.0, None));
        }
        st.normalize();
        Ok((p, Some(st)))
    }

    /// `⟨ψ|P|ψ⟩` for a Pauli string given as `(qubit, axis)` pairs.
    pub fn pauli_expectation(&self, ops: &[(Vertex, MeasurementBasis)]) -> GraphResult<C64> {
        let mut xm = 0usize;
        let mut zm = 0usize;
        let mut ny = 0u32;
        for &(q, p) in ops {
            let m = self.mask(q)?;
            match p {
                MeasurementBasis::X => xm |= m,
                MeasurementBasis::Z => zm |= m,
                MeasurementBasis::Y => {
                    xm |= m;
                    zm |= m;
                    ny += 1;
                }
            }
        }
        Ok(expectation_masks(&self.amps, xm, zm, ny))
    }

    pub fn inner(&self, other: &StateVector) -> GraphResult<C64> {
        if self.qubits != other.qubits {
            return Err(GraphError::QubitOrderMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
    pub fn fidelity(&self, other: &StateVector) -> GraphResult<f64> {
        let ip = self.inner(other)?;
        Ok(ip.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Equality up to a global phase, amplitude-wise within `tol` after
    /// normalising both states.
    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        let Ok(ip) = self.inner(other) else {
            return false;
        };
        let (na, nb) = (self.norm_sqr().sqrt(), other.norm_sqr().sqrt());
        if na == 0.0 || nb == 0.0 || ip.norm() == 0.0 {
            return false;
        }
        let phase = ip / ip.norm();
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a * phase / na - b / nb).norm() <= tol)
    }

    /// Same state with the qubits listed in `order`.
    pub fn reorder(&self, order: &[Vertex]) -> GraphResult<StateVector> {
        let a: BTreeSet<_> = order.iter().collect();
        let b: BTreeSet<_> = self.qubits.iter().collect();
        if a != b || order.len() != self.qubits.len() {
            return Err(GraphError::QubitOrderMismatch);
        }
        let n = order.len();
        let src: Vec<usize> = order
            .iter()
            .map(|&q| self.position(q).unwrap())
            .collect();
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (b, slot) in amps.iter_mut().enumerate() {
            let mut old = 0usize;
            for (i, &p) in src.iter().enumerate() {
                if b >> (n - 1 - i) & 1 == 1 {
                    old |= 1 << (n - 1 - p);
                }
            }
            *slot = self.amps[old];
        }
        Ok(StateVector {
            qubits: order.to_vec(),
            amps,
        })
    }

    /// Schmidt rank across the cut `part | rest`.
    pub fn schmidt_rank(&self, part: &[Vertex]) -> GraphResult<usize> {
        let mut order: Vec<Vertex> = part.to_vec();
        order.extend(self.qubits.iter().filter(|q| !part.contains(q)));
        let st = self.reorder(&order)?;
        let rows = 1usize << part.len();
        let cols = st.amps.len() / rows;
        let mut m: Vec<Vec<C64>> = (0..rows)
            .map(|r| st.amps[r * cols..(r + 1) * cols].to_vec())
            .collect();
        Ok(rank(&mut m, 1e-9))
    }
}

fn expectation_masks(amps: &[C64], xm: usize, zm: usize, ny: u32) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (b, a) in amps.iter().enumerate() {
        let term = amps[b ^ xm].conj() * a;
        if (b & zm).count_ones() % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc * C64::new(0.0, 1.0).powu(ny)
}

fn rank(m: &mut [Vec<C64>], tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm()));
        let Some(piv) = piv else { break };
        if m[piv][c].norm() < tol {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][c];
        for i in 0..rows {
            if i != r {
                let f = m[i][c] / p;
                if f.norm() > 0.0 {
                    for j in c..cols {
                        let v = m[r][j];
                        m[i][j] -= f * v;
                    }
                }
            }
        }
        r += 1;
    }
    r
}

/// Decides whether `state` equals `C|G⟩` for some product `C` of
/// single-qubit Cliffords (up to global phase).
///
/// A local Clifford sends each stabiliser generator `X_v Z_{N(v)}` of `|G⟩`
/// to `±A_v ⊗ B_{N(v)}` where `(A_u, B_u)` are the images of `X` and `Z` on
/// qubit `u`. The search assigns one of the six ordered pairs of distinct
/// Pauli axes per qubit and accepts when every image is a stabiliser of
/// `state`, i.e. has expectation `±1`.
pub fn state_locally_equivalent(state: &StateVector, g: &Graph) -> GraphResult<bool> {
    let qs: BTreeSet<Vertex> = state.qubits.iter().copied().collect();
    if qs != g.vertex_set() || state.qubits.len() != g.vertex_count() {
        return Err(GraphError::VertexSetMismatch);
    }
    let n = qs.len();
    if n > LOCAL_SEARCH_LIMIT {
        return Err(GraphError::SizeLimit {
            what: "local-Clifford search",
            limit: LOCAL_SEARCH_LIMIT,
            actual: n,
        });
    }
    if n == 0 {
        return Ok(state.norm_sqr() > 0.0);
    }
    let mut st = state.clone();
    st.normalize();

    // Assign qubits in BFS order so constraints close early.
    let mut order: Vec<Vertex> = Vec::with_capacity(n);
    for comp in g.components() {
        let start = *comp
            .iter()
            .max_by_key(|&&v| (g.degree(v).unwrap(), std::cmp::Reverse(v)))
            .unwrap();
        let mut queue = std::collections::VecDeque::from([start]);
        let mut seen = BTreeSet::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in g.neighbors(v)? {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }
    let depth_of = |v: Vertex| order.iter().position(|&x| x == v).unwrap();
    let mut closing: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in g.vertices() {
        let d = g
            .neighbors(v)?
            .iter()
            .map(|&u| depth_of(u))
            .chain(std::iter::once(depth_of(v)))
            .max()
            .unwrap();
        closing[d].push(v);
    }
    let masks: Vec<usize> = order.iter().map(|&q| st.mask(q).unwrap()).collect();

    const PAIRS: [(MeasurementBasis, MeasurementBasis); 6] = {
        use MeasurementBasis::*;
        [(X, Z), (X, Y), (Y, X), (Y, Z), (Z, X), (Z, Y)]
    };

    struct Ctx<'a> {
        st: &'a StateVector,
        g: &'a Graph,
        order: &'a [Vertex],
        closing: &'a [Vec<Vertex>],
        masks: &'a [usize],
        choice: Vec<usize>,
    }

    fn check(ctx: &Ctx<'_>, v: Vertex, depth_of: &dyn Fn(Vertex) -> usize) -> bool {
        let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0u32);
        let mut add = |q: Vertex, p: MeasurementBasis| {
            let m = ctx.masks[depth_of(q)];
            match p {
                MeasurementBasis::X => xm |= m,
                MeasurementBasis::Z => zm |= m,
                MeasurementBasis::Y => {
                    xm |= m;
                    zm |= m;
                    ny += 1;
                }
            }
        };
        add(v, PAIRS[ctx.choice[depth_of(v)]].0);
        for &u in ctx.g.neighbors(v).unwrap() {
            add(u, PAIRS[ctx.choice[depth_of(u)]].1);
        }
        let e = expectation_masks(&ctx.st.amps, xm, zm, ny);
        (e.norm() - 1.0).abs() < 1e-7
    }

    fn search(ctx: &mut Ctx<'_>, depth: usize, depth_of: &dyn Fn(Vertex) -> usize) -> bool {
        if depth == ctx.order.len() {
            return true;
        }
        for c in 0..PAIRS.len() {
            ctx.choice[depth] = c;
            let ok = ctx.closing[depth].iter().all(|&v| check(ctx, v, depth_of));
            if ok && search(ctx, depth + 1, depth_of) {
                return true;
            }
        }
        false
    }

    let mut ctx = Ctx {
        st: &st,
        g,
        order: &order,
        closing: &closing,
        masks: &masks,
        choice: vec![0; n],
    };
    Ok(search(&mut ctx, 0, &depth_of))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::clifford::Gate;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bell_pair_amplitudes() {
        let sv = Graph::path(&[1, 2]).to_state_vector().unwrap();
        let want = [c(0.5), c(0.5), c(0.5), c(-0.5)];
        for (a, b) in sv.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn state_vector_limit() {
        let g = Graph::empty(0..15);
        assert!(matches!(g.to_state_vector(), Err(GraphError::SizeLimit { .. })));
    }

    #[test]
    fn star_is_locally_ghz() {
        // GHZ written in the computational basis.
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        amps[7] = c(std::f64::consts::FRAC_1_SQRT_2);
        let ghz = StateVector::new(vec![1, 2, 3], amps).unwrap();
        assert!(state_locally_equivalent(&ghz, &Graph::star(2, &[1, 3])).unwrap());
        assert!(state_locally_equivalent(&ghz, &Graph::complete(&[1, 2, 3])).unwrap());
        assert!(!state_locally_equivalent(&ghz, &Graph::path(&[1, 2]).disjoint_union(&Graph::empty([3])).unwrap()).unwrap());
    }

    #[test]
    fn product_state_is_not_path() {
        let sv = Graph::empty([1, 2, 3, 4]).to_state_vector().unwrap();
        assert!(!state_locally_equivalent(&sv, &Graph::path(&[1, 2, 3, 4])).unwrap());
        assert!(state_locally_equivalent(&sv, &Graph::empty([1, 2, 3, 4])).unwrap());
    }

    #[test]
    fn local_gates_preserve_equivalence() {
        let g = Graph::path(&[1, 2, 3, 4, 5]);
        let mut sv = g.to_state_vector().unwrap();
        sv.apply_gate(2, &Gate::H.matrix()).unwrap();
        sv.apply_gate(4, &Gate::SqrtX.matrix()).unwrap();
        sv.apply_gate(5, &Gate::S.matrix()).unwrap();
        assert!(state_locally_equivalent(&sv, &g).unwrap());
        assert!(!state_locally_equivalent(&sv, &Graph::star(1, &[2, 3, 4, 5])).unwrap());
    }

    #[test]
    fn projection_z_deletes() {
        let g = Graph::path(&[1, 2, 3]);
        let sv = g.to_state_vector().unwrap();
        let (p, rest) = sv.project(2, MeasurementBasis::Z, false).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let want = Graph::empty([1, 3]).to_state_vector().unwrap();
        assert!(rest.unwrap().equal_up_to_phase(&want, 1e-12));
    }

    #[test]
    fn schmidt_rank_of_cuts() {
        let sv = Graph::path(&[1, 2, 3, 4]).to_state_vector().unwrap();
        assert_eq!(sv.schmidt_rank(&[1]).unwrap(), 2);
        assert_eq!(sv.schmidt_rank(&[1, 2]).unwrap(), 2);
        assert_eq!(sv.schmidt_rank(&[1, 3]).unwrap(), 4);
    }

    #[test]
    fn reorder_round_trip() {
        let sv = Graph::path(&[1, 2, 3]).to_state_vector().unwrap();
        let r = sv.reorder(&[3, 1, 2]).unwrap();
        assert_eq!(r.reorder(&[1, 2, 3]).unwrap(), sv);
    }
}
