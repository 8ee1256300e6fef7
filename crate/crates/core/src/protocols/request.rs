//! JSON requests and responses.

use serde::{Deserialize, Serialize};

use super::montecarlo::{sample, trial_rng, Job, MonteCarloStats, Trial};
use super::{fuse_chain, BlockKind, ChainSpec, JointPlan, Layout, Protocol, ProtocolError, ProtocolResult, Result, Sampled};

/// Trial index reserved for the single reported run.
const REPORT_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolRequest {
    /// `ghz`, `path`, `cycle`, `caterpillar` or `chain`.
    pub protocol: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    #[serde(default)]
    pub server: bool,
    /// Caterpillar layout such as `"SLSS"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
    #[serde(default)]
    pub close: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plan: Vec<JointPlan>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolResponse {
    pub request: ProtocolRequest,
    pub result: ProtocolResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloStats>,
    #[serde(skip)]
    pub trials: Vec<Trial>,
}

impl ProtocolRequest {
    pub fn job(&self) -> Result<Job> {
        let users = || {
            self.users
                .ok_or_else(|| ProtocolError::Invalid(format!("{}: missing \"M\"", self.protocol)))
        };
        let job = match self.protocol.to_ascii_lowercase().as_str() {
            "ghz" => Job::Protocol(Protocol::Ghz {
                users: users()?,
                server: self.server,
            }),
            "path" => Job::Protocol(Protocol::Path {
                users: users()?,
                server: self.server,
            }),
            "cycle" => Job::Protocol(Protocol::Cycle { users: users()? }),
            "caterpillar" => {
                let layout = match (&self.layout, self.users) {
                    (Some(l), _) => l.clone(),
                    (None, Some(m)) => Layout::all_spine(m),
                    (None, None) => return Err(ProtocolError::Invalid("caterpillar: missing layout".into())),
                };
                if let Some(m) = self.users.filter(|&m| m != layout.len()) {
                    return Err(ProtocolError::Invalid(format!(
                        "caterpillar: M = {m} but layout has {} users",
                        layout.len()
                    )));
                }
                Job::Protocol(Protocol::Caterpillar {
                    layout,
                    close: self.close,
                })
            }
            "chain" => Job::Chain(ChainSpec::new(self.blocks.clone(), self.plan.clone(), self.close)),
            p => return Err(ProtocolError::Invalid(format!("unknown protocol {p:?}"))),
        };
        job.validate()?;
        Ok(job)
    }

    /// One seeded run, plus Monte Carlo statistics when `trials > 0`.
    pub fn execute(&self) -> Result<ProtocolResponse> {
        let job = self.job()?;
        let mut rng = Sampled(trial_rng(self.seed, REPORT_STREAM));
        let result = match &job {
            Job::Protocol(p) => p.run(&mut rng)?,
            Job::Chain(c) => fuse_chain(c, &mut rng)?,
        };
        let (monte_carlo, trials) = if self.trials > 0 {
            let t = sample(&job, self.trials, self.seed)?;
            let stats = MonteCarloStats::from_trials(
                &t,
                0.5f64.powi(job.exponent() as i32),
                job.expected_resources(),
                self.seed,
            );
            (Some(stats), t)
        } else {
            (None, Vec::new())
        };
        Ok(ProtocolResponse {
            request: self.clone(),
            result,
            monte_carlo,
            trials,
        })
    }
}

/// `index,success,resources` rows.
pub fn trials_csv(trials: &[Trial]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in trials {
        w.serialize(t).map_err(|e| ProtocolError::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| ProtocolError::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ProtocolError::Invalid(e.to_string()))
}
