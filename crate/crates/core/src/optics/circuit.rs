use serde::{Deserialize, Serialize};

use super::{prepare, OpticsError, OpticsResult, PhotonicState, PolBasis, PolOutcome, Port, SourceSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Pbs([Port; 2]),
    /// Port and angle in degrees.
    Hwp(Port, f64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub port: Port,
    pub basis: PolBasis,
}

/// A source → elements → postselection → measurement pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub elements: Vec<Element>,
    /// Ports that must each hold exactly one photon. Empty means no
    /// postselection.
    #[serde(default)]
    pub postselect: Vec<Port>,
    #[serde(default)]
    pub measure: Vec<MeasureSpec>,
    /// Extra empty ports.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ports: Vec<Port>,
}

#[derive(Clone, Debug)]
pub struct CircuitBranch {
    pub outcomes: Vec<(Port, PolOutcome)>,
    /// Probability conditioned on successful postselection.
    pub probability: f64,
    pub state: PhotonicState,
}

#[derive(Clone, Debug)]
pub struct CircuitRun {
    pub postselection_probability: f64,
    pub postselected: PhotonicState,
    pub branches: Vec<CircuitBranch>,
}

impl Circuit {
    pub fn from_json(s: &str) -> OpticsResult<Circuit> {
        serde_json::from_str(s).map_err(|e| OpticsError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn prepare(&self) -> OpticsResult<PhotonicState> {
        let mut s = prepare(&self.sources)?;
        for &p in &self.ports {
            s.declare_port(p)?;
        }
        Ok(s)
    }

    /// State after all elements, before postselection.
    pub fn evolve(&self) -> OpticsResult<PhotonicState> {
        let mut s = self.prepare()?;
        for e in &self.elements {
            s = apply(&s, e)?;
        }
        Ok(s)
    }

    pub fn run(&self) -> OpticsResult<CircuitRun> {
        let s = self.evolve()?;
        let (post, p) = if self.postselect.is_empty() {
            (s, 1.0)
        } else {
            s.postselect_coincidence(&self.postselect)?
        };
        let mut branches = vec![CircuitBranch {
            outcomes: Vec::new(),
            probability: 1.0,
            state: post.clone(),
        }];
        if p > 0.0 {
            for m in &self.measure {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    for pb in b.state.measure_polarization(m.port, m.basis)? {
                        let mut outcomes = b.outcomes.clone();
                        outcomes.push((m.port, pb.outcome));
                        next.push(CircuitBranch {
                            outcomes,
                            probability: b.probability * pb.probability,
                            state: pb.state,
                        });
                    }
                }
                branches = next;
            }
        }
        Ok(CircuitRun {
            postselection_probability: p,
            postselected: post,
            branches,
        })
    }
}

pub(crate) fn apply(s: &PhotonicState, e: &Element) -> OpticsResult<PhotonicState> {
    match *e {
        Element::Pbs([a, b]) => s.apply_pbs(a, b),
        Element::Hwp(p, angle) => s.apply_hwp(p, angle),
    }
}

/// GHZ postselection: `|+⟩` photons on ports `0..n` joined by a chain of
/// beam splitters `(i, i+1)`.
pub fn ghz_chain(n: usize) -> OpticsResult<Circuit> {
    if !(2..=super::MAX_PORTS).contains(&n) {
        return Err(OpticsError::Invalid(format!("GHZ chain of {n} photons")));
    }
    let ports: Vec<Port> = (0..n as Port).collect();
    Ok(Circuit {
        sources: ports.iter().map(|&p| SourceSpec::Plus(p)).collect(),
        elements: ports.windows(2).map(|w| Element::Pbs([w[0], w[1]])).collect(),
        postselect: ports,
        measure: Vec::new(),
        ports: Vec::new(),
    })
}

/// Photon weaving: `|+⟩` photons on ports `0..n` and an auxiliary `|+⟩` on
/// port `n` that passes a beam splitter with each photon in turn, followed
/// each time by a Hadamard plate. The postselected state is the path
/// `0 – 1 – … – (n−1) – aux`.
pub fn weaving_chain(n: usize) -> OpticsResult<Circuit> {
    if !(1..super::MAX_PORTS).contains(&n) {
        return Err(OpticsError::Invalid(format!("weaving chain of {n} photons")));
    }
    let aux = n as Port;
    let ports: Vec<Port> = (0..=aux).collect();
    let mut elements = Vec::with_capacity(2 * n);
    for p in 0..aux {
        elements.push(Element::Pbs([aux, p]));
        elements.push(Element::Hwp(aux, 22.5));
    }
    Ok(Circuit {
        sources: ports.iter().map(|&p| SourceSpec::Plus(p)).collect(),
        elements,
        postselect: ports,
        measure: Vec::new(),
        ports: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{state_locally_equivalent, Graph};

    #[test]
    fn ghz3_probability_and_state() {
        let run = ghz_chain(3).unwrap().run().unwrap();
        assert!((run.postselection_probability - 0.25).abs() < 1e-12);
        assert_eq!(run.postselected.len(), 2);
        let sv = run.postselected.extract_logical(&[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(state_locally_equivalent(&sv, &Graph::star(0, &[1, 2])).unwrap());
    }

    #[test]
    fn cz_gate_circuit() {
        let run = weaving_chain(2).unwrap().run().unwrap();
        assert!((run.postselection_probability - 0.25).abs() < 1e-12);
        let sv = run.postselected.extract_logical(&[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(sv.equal_up_to_phase(&Graph::path(&[0, 1, 2]).to_state_vector().unwrap(), 1e-12));
    }

    #[test]
    fn circuit_json_round_trip() {
        let c = weaving_chain(2).unwrap();
        let s = c.to_json();
        assert!(s.contains(r#"{"hwp":[2,22.5]}"#));
        assert_eq!(Circuit::from_json(&s).unwrap(), c);
    }

    #[test]
    fn measurement_branches_sum_to_one() {
        let mut c = ghz_chain(3).unwrap();
        c.measure = vec![MeasureSpec {
            port: 2,
            basis: PolBasis::PM,
        }];
        let run = c.run().unwrap();
        let total: f64 = run.branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(run.branches.len(), 2);
    }
}
