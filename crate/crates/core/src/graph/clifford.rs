//! The 24-element single-qubit Clifford group, modulo global phase.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::MeasurementBasis;

pub type Matrix2 = [[C64; 2]; 2];

const TOL: f64 = 1e-9;

/// Named gates used to spell out corrections.
///
/// `SqrtX` is `exp(-iπ/4 X)`, `SqrtY` is `exp(-iπ/4 Y)`; the daggered forms
/// rotate the other way.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    SqrtX,
    SqrtXdg,
    SqrtY,
    SqrtYdg,
}

impl Gate {
    pub fn matrix(self) -> Matrix2 {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = C64::new(r, 0.0);
        let ci = C64::new(0.0, r);
        match self {
            Gate::I => [[l, o], [o, l]],
            Gate::X => [[o, l], [l, o]],
            Gate::Y => [[o, -i], [i, o]],
            Gate::Z => [[l, o], [o, -l]],
            Gate::H => [[c, c], [c, -c]],
            Gate::S => [[l, o], [o, i]],
            Gate::Sdg => [[l, o], [o, -i]],
            Gate::SqrtX => [[c, -ci], [-ci, c]],
            Gate::SqrtXdg => [[c, ci], [ci, c]],
            Gate::SqrtY => [[c, -c], [c, c]],
            Gate::SqrtYdg => [[c, c], [-c, c]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::I => "I",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::S => "S",
            Gate::Sdg => "Sdg",
            Gate::SqrtX => "SqrtX",
            Gate::SqrtXdg => "SqrtXdg",
            Gate::SqrtY => "SqrtY",
            Gate::SqrtYdg => "SqrtYdg",
        }
    }

    pub fn pauli(b: MeasurementBasis) -> Gate {
        match b {
            MeasurementBasis::X => Gate::X,
            MeasurementBasis::Y => Gate::Y,
            MeasurementBasis::Z => Gate::Z,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn matmul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Returns the phase `p` with `a = p·b`, if one exists.
fn phase_between(a: &Matrix2, b: &Matrix2) -> Option<C64> {
    let (i, j) = (0..4)
        .map(|k| (k / 2, k % 2))
        .max_by(|&(i, j), &(k, l)| b[i][j].norm().total_cmp(&b[k][l].norm()))?;
    if b[i][j].norm() < TOL {
        return None;
    }
    let p = a[i][j] / b[i][j];
    let same = (0..2).all(|r| (0..2).all(|c| (a[r][c] - p * b[r][c]).norm() < TOL));
    same.then_some(p)
}

struct Table {
    mats: Vec<Matrix2>,
    words: Vec<Vec<Gate>>,
    mul: Vec<[u8; 24]>,
    dag: [u8; 24],
    /// conj[c][p] = (sign, q) with C† P C = sign·Q.
    conj: Vec<[(i8, MeasurementBasis); 3]>,
}

fn lookup(mats: &[Matrix2], m: &Matrix2) -> Option<usize> {
    mats.iter().position(|x| phase_between(m, x).is_some())
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        use Gate::*;
        // Breadth-first over words so each element keeps a shortest spelling.
        let gens = [X, Y, Z, H, S, Sdg, SqrtX, SqrtXdg, SqrtY, SqrtYdg];
        let mut mats = vec![I.matrix()];
        let mut words: Vec<Vec<Gate>> = vec![vec![]];
        let mut frontier = 0;
        while frontier < mats.len() {
            let base = mats[frontier];
            let word = words[frontier].clone();
            for g in gens {
                // Word order is time order: later gates multiply on the left.
                let m = matmul(&g.matrix(), &base);
                if lookup(&mats, &m).is_none() {
                    mats.push(m);
                    let mut w = word.clone();
                    w.push(g);
                    words.push(w);
                }
            }
            frontier += 1;
        }
        assert_eq!(mats.len(), 24, "single-qubit Clifford group has 24 elements mod phase");

        let mut mul = vec![[0u8; 24]; 24];
        for a in 0..24 {
            for b in 0..24 {
                mul[a][b] = lookup(&mats, &matmul(&mats[a], &mats[b])).unwrap() as u8;
            }
        }
        let mut dag = [0u8; 24];
        for (a, d) in dag.iter_mut().enumerate() {
            *d = lookup(&mats, &dagger(&mats[a])).unwrap() as u8;
        }
        let paulis = MeasurementBasis::ALL.map(|b| (b, Gate::pauli(b).matrix()));
        let conj = mats
            .iter()
            .map(|c| {
                MeasurementBasis::ALL.map(|p| {
                    let m = matmul(&dagger(c), &matmul(&Gate::pauli(p).matrix(), c));
                    paulis
                        .iter()
                        .find_map(|(q, qm)| {
                            phase_between(&m, qm).map(|ph| (if ph.re > 0.0 { 1 } else { -1 }, *q))
                        })
                        .expect("Clifford conjugation maps Paulis to Paulis")
                })
            })
            .collect();
        Table {
            mats,
            words,
            mul,
            dag,
            conj,
        }
    })
}

/// Single-qubit Clifford modulo global phase.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct Clifford1(u8);

impl Clifford1 {
    pub const IDENTITY: Clifford1 = Clifford1(0);

    pub fn from_gate(g: Gate) -> Self {
        Clifford1(lookup(&table().mats, &g.matrix()).unwrap() as u8)
    }

    /// Product of a time-ordered gate sequence.
    pub fn from_gates(gs: &[Gate]) -> Self {
        gs.iter()
            .fold(Self::IDENTITY, |acc, &g| Self::from_gate(g).compose(acc))
    }

    /// `exp(sign · iπ/4 · P)`.
    pub fn quarter_turn(axis: MeasurementBasis, sign: i8) -> Self {
        let p = Gate::pauli(axis).matrix();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = if sign >= 0 { 1.0 } else { -1.0 };
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                m[i][j] = C64::new(r * id, 0.0) + C64::new(0.0, s * r) * p[i][j];
            }
        }
        Clifford1(lookup(&table().mats, &m).unwrap() as u8)
    }

    pub fn pauli(b: MeasurementBasis) -> Self {
        Self::from_gate(Gate::pauli(b))
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(self, other: Clifford1) -> Clifford1 {
        Clifford1(table().mul[self.0 as usize][other.0 as usize])
    }

    pub fn dagger(self) -> Clifford1 {
        Clifford1(table().dag[self.0 as usize])
    }

    pub fn matrix(self) -> Matrix2 {
        table().mats[self.0 as usize]
    }

    /// Shortest time-ordered gate spelling of this element.
    pub fn gates(self) -> Vec<Gate> {
        table().words[self.0 as usize].clone()
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// True for the four Pauli operators (including identity).
    pub fn is_pauli(self) -> bool {
        MeasurementBasis::ALL
            .iter()
            .all(|&p| self.conjugate(p).1 == p)
    }

    /// True when the element commutes with Z up to phase.
    pub fn is_diagonal(self) -> bool {
        self.conjugate(MeasurementBasis::Z).1 == MeasurementBasis::Z
    }

    /// `(s, Q)` with `C† P C = s·Q`.
    pub fn conjugate(self, p: MeasurementBasis) -> (i8, MeasurementBasis) {
        let idx = match p {
            MeasurementBasis::X => 0,
            MeasurementBasis::Y => 1,
            MeasurementBasis::Z => 2,
        };
        table().conj[self.0 as usize][idx]
    }
}

impl fmt::Debug for Clifford1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.gates().iter().map(|g| g.name()).collect();
        if names.is_empty() {
            write!(f, "Clifford1(I)")
        } else {
            write!(f, "Clifford1({})", names.join("·"))
        }
    }
}
