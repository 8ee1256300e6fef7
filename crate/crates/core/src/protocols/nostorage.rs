//! Protocols that weave every photon in a single postselected shot.
//!
//! Labels: user `i` holds qubit `i`, its partner photon at the server is
//! `M + i`. Protocols with a server-owned pair use `2M` (the weaving photon)
//! and `2M + 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::program::{Fusion, GraphBranch, Program};
use super::{check_range, Correction, Outcomes, ProtocolError, ProtocolResult, Result};
use crate::graph::clifford::Gate;
use crate::graph::{state_locally_equivalent, Graph, MeasurementBasis, Vertex};
use crate::optics::SourceSpec;

use MeasurementBasis::{X, Z};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Spine,
    Leaf,
}

/// Per-user roles in a caterpillar. A leaf hangs off the next spine user
/// in order (cyclically when the caterpillar is closed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Layout(pub Vec<Role>);

impl Layout {
    pub fn all_spine(m: usize) -> Self {
        Layout(vec![Role::Spine; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spine(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == Role::Spine).collect()
    }

    /// Spine user a leaf at `i` attaches to.
    fn anchor(&self, i: usize, closed: bool) -> Option<usize> {
        let spine = self.spine();
        spine
            .iter()
            .copied()
            .find(|&s| s > i)
            .or_else(|| closed.then(|| spine.first().copied()).flatten())
    }

    fn validate(&self, closed: bool) -> Result<()> {
        check_range("caterpillar users", self.len(), 2, 7)?;
        let spine = self.spine();
        if closed && spine.len() < 2 {
            return Err(ProtocolError::Layout("a closed caterpillar needs two spine users".into()));
        }
        if !closed && self.0.last() != Some(&Role::Spine) {
            return Err(ProtocolError::Layout(format!(
                "leaf {} is attached to no spine user",
                self.len() - 1
            )));
        }
        Ok(())
    }
}

impl FromStr for Layout {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'S' => Ok(Role::Spine),
                'L' => Ok(Role::Leaf),
                _ => Err(ProtocolError::Layout(format!("unknown role {c:?} (use S or L)"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Layout)
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.0 {
            f.write_str(if *r == Role::Spine { "S" } else { "L" })?;
        }
        Ok(())
    }
}

impl TryFrom<String> for Layout {
    type Error = ProtocolError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Layout> for String {
    fn from(l: Layout) -> String {
        l.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Protocol {
    Ghz { users: usize, server: bool },
    Path { users: usize, server: bool },
    Cycle { users: usize },
    Caterpillar { layout: Layout, close: bool },
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Ghz { .. } => "ghz",
            Protocol::Path { .. } => "path",
            Protocol::Cycle { .. } => "cycle",
            Protocol::Caterpillar { .. } => "caterpillar",
        }
    }

    pub fn users(&self) -> usize {
        match self {
            Protocol::Ghz { users, .. } | Protocol::Path { users, .. } | Protocol::Cycle { users } => *users,
            Protocol::Caterpillar { layout, .. } => layout.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Protocol::Ghz { users, .. } => check_range("GHZ users", *users, 2, 8),
            Protocol::Path { users, .. } => check_range("path users", *users, 2, 7),
            Protocol::Cycle { users } => check_range("cycle users", *users, 3, 6),
            Protocol::Caterpillar { layout, close } => layout.validate(*close),
        }
    }

    /// Heralding probability exponent: `M − 1` for open shapes, `M + 1`
    /// for closed ones.
    pub fn exponent(&self) -> u32 {
        let m = self.users() as u32;
        match self {
            Protocol::Ghz { .. } | Protocol::Path { .. } => m - 1,
            Protocol::Cycle { .. } => m + 1,
            Protocol::Caterpillar { close, .. } => {
                if *close {
                    m + 1
                } else {
                    m - 1
                }
            }
        }
    }

    fn labels(&self) -> (Vec<Vertex>, Vec<Vertex>, Vertex, Vertex) {
        let m = self.users() as Vertex;
        ((0..m).collect(), (m..2 * m).collect(), 2 * m, 2 * m + 1)
    }

    /// Server photons that stay in the distributed state.
    pub fn server_kept(&self) -> Vec<Vertex> {
        let (_, b, _, c2) = self.labels();
        match self {
            Protocol::Ghz { server: true, .. } => vec![*b.last().unwrap()],
            Protocol::Path { server: true, .. } => vec![b[0]],
            Protocol::Cycle { .. } | Protocol::Caterpillar { close: true, .. } => vec![c2],
            _ => Vec::new(),
        }
    }

    pub fn program(&self) -> Result<Program> {
        self.validate()?;
        let (u, b, c1, c2) = self.labels();
        let mut sources: Vec<SourceSpec> = u.iter().zip(&b).map(|(&x, &y)| SourceSpec::GBell([x, y])).collect();
        let kept = self.server_kept();
        let detect = |v: &Vertex| !kept.contains(v);
        let (fusions, measure) = match self {
            Protocol::Ghz { .. } => (
                b.windows(2).map(|w| Fusion::ghz(w[1], w[0])).collect(),
                b.iter().filter(|v| detect(v)).map(|&v| (v, X)).collect(),
            ),
            Protocol::Path { .. } => (
                b[1..].iter().map(|&v| Fusion::weave(v, b[0])).collect(),
                Self::spine_readout(b[0], &b[1..], &kept),
            ),
            Protocol::Cycle { users } => {
                sources.push(SourceSpec::GBell([c1, c2]));
                let layout = Layout::all_spine(*users);
                (Self::caterpillar_fusions(&layout, true, &b, c1, c2), Self::spine_readout(c1, &b, &kept))
            }
            Protocol::Caterpillar { layout, close } => {
                if *close {
                    sources.push(SourceSpec::GBell([c1, c2]));
                    (Self::caterpillar_fusions(layout, true, &b, c1, c2), Self::spine_readout(c1, &b, &kept))
                } else {
                    (
                        Self::caterpillar_fusions(layout, false, &b, b[0], c2),
                        Self::spine_readout(b[0], &b[1..], &kept),
                    )
                }
            }
        };
        Ok(Program {
            sources,
            fusions,
            measure,
        })
    }

    /// The weaving photon is removed in H/V unless kept, the rest read in ±.
    fn spine_readout(weaver: Vertex, spine: &[Vertex], kept: &[Vertex]) -> Vec<(Vertex, MeasurementBasis)> {
        let mut m = Vec::with_capacity(spine.len() + 1);
        if !kept.contains(&weaver) {
            m.push((weaver, Z));
        }
        m.extend(spine.iter().map(|&v| (v, X)));
        m
    }

    /// Spine photons are woven by `w`; leaf photons are GHZ-fused onto the
    /// photon of their anchor. Closing weaves `w` back onto `c2`.
    fn caterpillar_fusions(layout: &Layout, closed: bool, b: &[Vertex], w: Vertex, c2: Vertex) -> Vec<Fusion> {
        let mut out = Vec::with_capacity(b.len() + 1);
        for i in layout.spine() {
            if b[i] != w {
                out.push(Fusion::weave(b[i], w));
            }
        }
        for (i, r) in layout.0.iter().enumerate() {
            if *r == Role::Leaf && b[i] != w {
                let a = layout.anchor(i, closed).expect("validated layout");
                out.push(Fusion::ghz(b[a], b[i]));
            }
        }
        if closed {
            out.push(Fusion::weave(c2, w));
        }
        out
    }

    /// The graph the distributed state is reported on.
    pub fn target(&self) -> Graph {
        let (u, b, _, c2) = self.labels();
        match self {
            Protocol::Ghz { server, .. } => {
                let mut leaves = u[1..].to_vec();
                if *server {
                    leaves.push(*b.last().unwrap());
                }
                Graph::star(u[0], &leaves)
            }
            Protocol::Path { server, .. } => {
                let mut order = u.clone();
                if *server {
                    order.push(b[0]);
                }
                Graph::path(&order)
            }
            Protocol::Cycle { .. } => {
                let mut order = vec![c2];
                order.extend(&u);
                Graph::cycle(&order)
            }
            Protocol::Caterpillar { layout, close } => {
                let mut spine: Vec<Vertex> = layout.spine().into_iter().map(|i| u[i]).collect();
                if *close {
                    spine.insert(0, c2);
                }
                let mut g = if *close { Graph::cycle(&spine) } else { Graph::path(&spine) };
                for (i, r) in layout.0.iter().enumerate() {
                    if *r == Role::Leaf {
                        let a = layout.anchor(i, *close).expect("validated layout");
                        g.add_vertex(u[i]).unwrap();
                        g.add_edge(u[a], u[i]).unwrap();
                    }
                }
                g
            }
        }
    }

    /// Graph after all fusions and before any detection: the comb of
    /// server photons with the users hanging off it.
    pub fn comb(&self) -> Result<Graph> {
        Ok(self.program()?.fused()?.into_graph())
    }

    fn finish(&self, branch: GraphBranch) -> Result<ProtocolResult> {
        let (u, ..) = self.labels();
        ProtocolResult::from_state(
            self.name(),
            branch.state,
            &self.target(),
            u,
            self.server_kept(),
            self.exponent(),
            branch.outcomes,
        )
    }

    /// One heralded run with detector outcomes drawn from `outcomes`.
    pub fn run(&self, outcomes: &mut dyn Outcomes) -> Result<ProtocolResult> {
        let branch = self.program()?.run_graph(outcomes)?;
        self.finish(branch)
    }

    /// Every detector outcome with its probability.
    pub fn branches(&self) -> Result<Vec<(f64, ProtocolResult)>> {
        self.program()?
            .graph_branches()?
            .into_iter()
            .map(|b| Ok((b.probability, self.finish(b)?)))
            .collect()
    }

    /// Runs the optical circuit and checks every detector branch against
    /// the graph engine: corrected photons must match the target graph
    /// state exactly.
    pub fn dual_check(&self, tol: f64) -> Result<DualCheck> {
        let program = self.program()?;
        let run = program.circuit()?.run()?;
        let target = self.target();
        let want = target.to_state_vector()?;
        let map: Vec<(u32, Vertex)> = target.vertices().map(|v| (v, v)).collect();
        let mut report = DualCheck {
            postselection_probability: run.postselection_probability,
            exponent: self.exponent(),
            branches: 0,
            exact: true,
            equivalent: true,
        };
        for ob in run.branches.iter().filter(|b| b.probability > tol) {
            let minus: Vec<bool> = ob.outcomes.iter().map(|(_, o)| o.is_minus()).collect();
            let mut script = super::Scripted::new(&[], &minus);
            let res = self.run(&mut script)?;
            let mut sv = ob.state.extract_logical(&map)?;
            report.equivalent &= state_locally_equivalent(&sv, &target)?;
            for c in &res.corrections {
                sv.apply_gate(c.vertex, &c.clifford().matrix())?;
            }
            report.exact &= sv.equal_up_to_phase(&want, tol);
            report.branches += 1;
        }
        Ok(report)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCheck {
    pub postselection_probability: f64,
    pub exponent: u32,
    pub branches: usize,
    /// Corrected optical output equals the target graph state.
    pub exact: bool,
    /// Uncorrected optical output is locally equivalent to the target.
    pub equivalent: bool,
}

impl DualCheck {
    pub fn agrees(&self, tol: f64) -> bool {
        self.exact
            && self.equivalent
            && self.branches > 0
            && (self.postselection_probability - 0.5f64.powi(self.exponent as i32)).abs() < tol
    }
}

/// Sign of the GHZ state in the ± basis, `(−1)^{M₋}`, and the user-side fix
/// when it is negative: a phase flip in the ± basis, which is a physical
/// `X` on the first user.
pub fn ghz_parity(m_minus: usize) -> (i8, Option<Correction>) {
    if m_minus.is_multiple_of(2) {
        (1, None)
    } else {
        (
            -1,
            Some(Correction {
                vertex: 0,
                gates: vec![Gate::X],
            }),
        )
    }
}

pub fn run_ghz(users: usize, server: bool) -> Result<ProtocolResult> {
    Protocol::Ghz { users, server }.run(&mut super::Heralded)
}

pub fn run_path(users: usize, server: bool) -> Result<ProtocolResult> {
    Protocol::Path { users, server }.run(&mut super::Heralded)
}

pub fn run_cycle(users: usize) -> Result<ProtocolResult> {
    Protocol::Cycle { users }.run(&mut super::Heralded)
}

pub fn run_caterpillar(layout: Layout, close: bool) -> Result<ProtocolResult> {
    Protocol::Caterpillar { layout, close }.run(&mut super::Heralded)
}
