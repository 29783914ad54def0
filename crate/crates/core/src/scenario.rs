//! Scenario documents: a TOML description of the field, network, protection
//! level, failure and data, validated into ready-to-run objects.
//!
//! ```toml
//! t = 1
//! convention = "matrix"        # or "eq12"
//!
//! [field]
//! p = 5
//! r = 1                        # optional, default 1
//! # poly = [1, 1, 0, 1]        # optional, constant term first
//!
//! [network]
//! sources = ["s1", "s2", "s3"]
//! receivers = ["r1", "r2", "r3"]
//! relays = ["a1", "a2", "a3"]
//! edges = [["s1", "a1"], ["a1", "r1"], ...]
//! paths = [["s1", "a1", "r1"], ...]
//!
//! [failure]                    # optional
//! node = "a2"
//! active_from = 1              # optional
//!
//! [data]                       # optional, default seed = 0
//! seed = 7
//! # rounds = [[3, 4], [1, 2], [0, 4]]
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfield::FieldSpec;
use crate::npsim::{inject_node_failure, run_session, DataSource, FailureScenario, RoundPlan, SessionReport};
use crate::protcode::{verify_recoverability, Convention, ProtectionMatrix, RecoverabilityReport};
use crate::topology::{Network, NetworkSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub p: u32,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureDoc {
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_from: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub t: usize,
    #[serde(default)]
    pub convention: Convention,
    pub field: FieldDoc,
    pub network: NetworkSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureDoc>,
    #[serde(default)]
    pub data: DataDoc,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    doc: ScenarioDoc,
    pub field: Arc<FieldSpec>,
    pub network: Network,
    pub plan: RoundPlan,
    pub matrix: ProtectionMatrix,
    pub failure: Option<FailureScenario>,
    pub data: DataSource,
}

fn diag(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

impl Scenario {
    pub fn from_doc(doc: ScenarioDoc) -> Result<Self> {
        let fd = &doc.field;
        let field = FieldSpec::new(fd.p, fd.r, fd.poly.as_deref())
            .map_err(|e| diag(format!("malformed field spec: {e}")))?;
        let network = Network::build(&doc.network)?;
        let n = network.n();
        if doc.t < 1 {
            return Err(diag("t must be >= 1"));
        }
        if doc.t >= n {
            return Err(diag(format!("t must be < n (t = {}, n = {n})", doc.t)));
        }
        let plan = RoundPlan::new(n, doc.t)?;
        let matrix = ProtectionMatrix::new(n, doc.t, &field, doc.convention)?;

        let failure = match &doc.failure {
            None => None,
            Some(f) => {
                let s = inject_node_failure(&network, &f.node, &plan)?;
                let from = f.active_from.unwrap_or(1);
                if from < 1 || from > plan.session_length() {
                    return Err(diag(format!(
                        "active_from = {from} outside the session (1..={})",
                        plan.session_length()
                    )));
                }
                Some(s.starting_at(from))
            }
        };

        let data = match (&doc.data.seed, &doc.data.rounds) {
            (Some(_), Some(_)) => return Err(diag("data: give either seed or rounds, not both")),
            (Some(seed), None) => DataSource::Seeded(*seed),
            (None, None) => DataSource::Seeded(0),
            (None, Some(rounds)) => {
                if rounds.len() != plan.session_length() {
                    return Err(diag(format!(
                        "data.rounds has {} rounds, the session has {}",
                        rounds.len(),
                        plan.session_length()
                    )));
                }
                for (k, values) in rounds.iter().enumerate() {
                    if values.len() != n - doc.t {
                        return Err(diag(format!(
                            "data.rounds[{k}] has {} values, expected n - t = {}",
                            values.len(),
                            n - doc.t
                        )));
                    }
                    if let Some(v) = values.iter().find(|&&v| v >= field.order()) {
                        return Err(diag(format!("data.rounds[{k}] value {v} not below q = {}", field.order())));
                    }
                }
                DataSource::Explicit(rounds.clone())
            }
        };

        Ok(Scenario { doc, field, network, plan, matrix, failure, data })
    }

    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.doc).expect("scenario documents always serialize")
    }

    fn rebuild(&self, edit: impl FnOnce(&mut ScenarioDoc)) -> Result<Self> {
        let mut doc = self.doc.clone();
        edit(&mut doc);
        Scenario::from_doc(doc)
    }

    /// Same scenario with seeded data.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        self.rebuild(|d| d.data = DataDoc { seed: Some(seed), rounds: None })
    }

    pub fn with_convention(&self, convention: Convention) -> Result<Self> {
        self.rebuild(|d| d.convention = convention)
    }

    /// Same scenario failing `node` (or nothing) from round 1.
    pub fn with_failure(&self, node: Option<&str>) -> Result<Self> {
        self.rebuild(|d| d.failure = node.map(|n| FailureDoc { node: n.to_owned(), active_from: None }))
    }

    pub fn recoverability(&self) -> RecoverabilityReport {
        verify_recoverability(&self.matrix)
    }

    pub fn run(&self) -> Result<SessionReport> {
        run_session(&self.network, &self.plan, &self.matrix, self.failure.as_ref(), &self.data)
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| diag(e.to_string()))?;
    Scenario::from_doc(doc)
}
