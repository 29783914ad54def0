use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schedule::RoundPlan;
use crate::error::{Error, Result};
use crate::gfield::FieldElement;
use crate::protcode::{decode, encode_window, ProtectionMatrix};
use crate::topology::Network;

/// Identifies a source by the label of the connection it originates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketKind {
    Plain,
    Coded,
}

/// Round `round` of session `session`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RoundTag {
    pub round: usize,
    pub session: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub source: SourceId,
    pub kind: PacketKind,
    pub payload: FieldElement,
    pub tag: RoundTag,
}

/// Builds the `n` packets of one round, ordered by connection label.
///
/// Sources are assumed to have exchanged their plain units beforehand so the
/// protection sources can form the coded units.
pub fn make_packets(
    plan: &RoundPlan,
    round: usize,
    matrix: &ProtectionMatrix,
    data: &BTreeMap<usize, FieldElement>,
    session: usize,
) -> Result<Vec<Packet>> {
    if plan.n() != matrix.n() || plan.t() != matrix.t() {
        return Err(Error::DataMismatch("plan and matrix disagree on n or t".into()));
    }
    let r = plan.round(round)?;
    let ys = encode_window(matrix, &r.protection, data)?;
    let tag = RoundTag { round, session };
    let mut packets: Vec<Packet> = data
        .iter()
        .map(|(&i, x)| Packet { source: SourceId(i), kind: PacketKind::Plain, payload: x.clone(), tag })
        .chain(
            r.protection
                .iter()
                .zip(ys)
                .map(|(&i, y)| Packet { source: SourceId(i), kind: PacketKind::Coded, payload: y, tag }),
        )
        .collect();
    packets.sort_by_key(|p| p.source);
    Ok(packets)
}

/// A single relay failure and the connections it takes down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureScenario {
    pub failed_node: String,
    pub failed_paths: BTreeSet<usize>,
    /// First affected round; the failure persists to the end of the session.
    pub active_from: usize,
}

impl FailureScenario {
    pub fn starting_at(mut self, round: usize) -> Self {
        self.active_from = round.max(1);
        self
    }

    pub fn active_in(&self, round: usize) -> bool {
        round >= self.active_from
    }
}

/// Fails relay `node`. Refuses relays carrying more than `t` connections.
pub fn inject_node_failure(net: &Network, node: &str, plan: &RoundPlan) -> Result<FailureScenario> {
    let failed_paths = net.paths_through(node)?;
    if failed_paths.len() > plan.t() {
        return Err(Error::Unprotectable { node: node.to_owned(), degree: failed_paths.len(), t: plan.t() });
    }
    Ok(FailureScenario { failed_node: node.to_owned(), failed_paths, active_from: 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailureCase {
    /// Every failed connection carries a plain unit this round.
    WorkingOnly,
    /// Every failed connection carries a coded unit; nothing to recover.
    ProtectionOnly,
    Mixed,
    NoFailure,
}

impl FailureCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureCase::WorkingOnly => "working-only",
            FailureCase::ProtectionOnly => "protection-only",
            FailureCase::Mixed => "mixed",
            FailureCase::NoFailure => "no-failure",
        }
    }
}

impl fmt::Display for FailureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_failure_case(scenario: Option<&FailureScenario>, plan: &RoundPlan, round: usize) -> FailureCase {
    let Some(s) = scenario.filter(|s| s.active_in(round) && !s.failed_paths.is_empty()) else {
        return FailureCase::NoFailure;
    };
    let Ok(r) = plan.round(round) else {
        return FailureCase::NoFailure;
    };
    let on_protection = s.failed_paths.iter().filter(|&&p| r.is_protection(p)).count();
    if on_protection == 0 {
        FailureCase::WorkingOnly
    } else if on_protection == s.failed_paths.len() {
        FailureCase::ProtectionOnly
    } else {
        FailureCase::Mixed
    }
}

/// Where the plain units come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    /// Uniform field elements from a ChaCha8 stream.
    Seeded(u64),
    /// One vector per round holding the plain units of that round's working
    /// connections in ascending label order.
    Explicit(Vec<Vec<u32>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub case: FailureCase,
    /// Working connections whose plain unit arrived directly.
    pub delivered: BTreeSet<usize>,
    /// Failed connections, working or protection.
    pub lost: BTreeSet<usize>,
    pub recovered: BTreeSet<usize>,
    pub decode_ok: bool,
    /// Recovered values equal what the sources sent.
    pub exact: bool,
    pub solver_calls: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryStatus {
    All,
    Partial,
    None,
    NoneNeeded,
}

impl RecoveryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecoveryStatus::All => "all",
            RecoveryStatus::Partial => "partial",
            RecoveryStatus::None => "none",
            RecoveryStatus::NoneNeeded => "none-needed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionReport {
    pub n: usize,
    pub t: usize,
    pub q: u32,
    pub failed_node: Option<String>,
    pub rounds: Vec<RoundRecord>,
    /// Plain units sent on working connections.
    pub offered: u64,
    /// Plain units available at the receivers, directly or by recovery.
    pub delivered: u64,
    pub recovered: u64,
    pub measured_capacity: Ratio<u64>,
    /// Plain units per round, in ascending working label order.
    pub sent: Vec<BTreeMap<usize, u32>>,
    /// What the receivers ended up with for each round.
    pub received: Vec<BTreeMap<usize, u32>>,
}

impl SessionReport {
    pub fn all_decoded(&self) -> bool {
        self.rounds.iter().all(|r| r.decode_ok && r.exact)
    }

    pub fn solver_calls(&self) -> usize {
        self.rounds.iter().map(|r| r.solver_calls).sum()
    }

    pub fn case_count(&self, case: FailureCase) -> usize {
        self.rounds.iter().filter(|r| r.case == case).count()
    }

    /// `working=..;protection=..;mixed=..;none=..`
    pub fn case_counts(&self) -> String {
        format!(
            "working={};protection={};mixed={};none={}",
            self.case_count(FailureCase::WorkingOnly),
            self.case_count(FailureCase::ProtectionOnly),
            self.case_count(FailureCase::Mixed),
            self.case_count(FailureCase::NoFailure),
        )
    }

    pub fn recovery_status(&self) -> RecoveryStatus {
        let lost_working: usize = self
            .rounds
            .iter()
            .zip(&self.sent)
            .map(|(r, sent)| r.lost.iter().filter(|p| sent.contains_key(p)).count())
            .sum();
        if lost_working == 0 {
            RecoveryStatus::NoneNeeded
        } else if self.all_decoded() {
            RecoveryStatus::All
        } else if self.recovered == 0 {
            RecoveryStatus::None
        } else {
            RecoveryStatus::Partial
        }
    }

    /// `capacity=<num>/<den> recovered=<status>`
    pub fn summary_line(&self) -> String {
        format!(
            "capacity={}/{} recovered={}",
            self.measured_capacity.numer(),
            self.measured_capacity.denom(),
            self.recovery_status().as_str()
        )
    }

    /// One line per round plus the summary line.
    pub fn to_text(&self) -> String {
        let set = |s: &BTreeSet<usize>| format!("{{{}}}", s.iter().join(","));
        let mut out = format!(
            "n={} t={} q={} failed_node={}\n",
            self.n,
            self.t,
            self.q,
            self.failed_node.as_deref().unwrap_or("-")
        );
        for r in &self.rounds {
            out.push_str(&format!(
                "round={} case={} delivered={} lost={} recovered={} decode_ok={} exact={} solver_calls={}",
                r.round,
                r.case,
                set(&r.delivered),
                set(&r.lost),
                set(&r.recovered),
                r.decode_ok,
                r.exact,
                r.solver_calls
            ));
            if let Some(e) = &r.error {
                out.push_str(&format!(" error=\"{e}\""));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "offered={} delivered={} recovered={}\n{}\n",
            self.offered,
            self.delivered,
            self.recovered,
            self.summary_line()
        ));
        out
    }
}

/// Runs one session of `plan`.
///
/// Packets on failed connections are dropped; the receivers pool what
/// survives and decode the lost working units each round. A failed decode is
/// recorded in the round and the session continues.
pub fn run_session(
    net: &Network,
    plan: &RoundPlan,
    matrix: &ProtectionMatrix,
    scenario: Option<&FailureScenario>,
    data: &DataSource,
) -> Result<SessionReport> {
    let (n, t) = (plan.n(), plan.t());
    if net.n() != n || matrix.n() != n || matrix.t() != t {
        return Err(Error::DataMismatch(format!(
            "network has {} connections, plan (n={n}, t={t}), matrix (n={}, t={})",
            net.n(),
            matrix.n(),
            matrix.t()
        )));
    }
    if let Some(s) = scenario {
        if s.failed_paths.len() > t {
            return Err(Error::Unprotectable { node: s.failed_node.clone(), degree: s.failed_paths.len(), t });
        }
        if s.failed_paths.iter().any(|&p| p < 1 || p > n) {
            return Err(Error::DataMismatch("failed path label out of range".into()));
        }
    }
    if let DataSource::Explicit(rounds) = data {
        if rounds.len() != plan.session_length() {
            return Err(Error::DataMismatch(format!(
                "{} rounds of data for a session of {}",
                rounds.len(),
                plan.session_length()
            )));
        }
    }

    let field = matrix.field();
    let mut rng = match data {
        DataSource::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        DataSource::Explicit(_) => None,
    };

    let mut records = Vec::with_capacity(plan.session_length());
    let (mut offered, mut delivered_total, mut recovered_total) = (0u64, 0u64, 0u64);
    let mut sent_log = Vec::new();
    let mut received_log = Vec::new();

    for (k, r) in plan.rounds().iter().enumerate() {
        let round = k + 1;
        let values: Vec<u32> = match (data, rng.as_mut()) {
            (DataSource::Explicit(rounds), _) => {
                let v = &rounds[k];
                if v.len() != r.working.len() {
                    return Err(Error::DataMismatch(format!(
                        "round {round} has {} values for {} working paths",
                        v.len(),
                        r.working.len()
                    )));
                }
                v.clone()
            }
            (_, Some(rng)) => r.working.iter().map(|_| rng.gen_range(0..field.order())).collect(),
            (DataSource::Seeded(_), None) => unreachable!(),
        };
        let sent = r
            .working
            .iter()
            .zip(&values)
            .map(|(&i, &v)| Ok((i, field.element(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        offered += sent.len() as u64;

        let packets = make_packets(plan, round, matrix, &sent, 1)?;
        let failed: BTreeSet<usize> = match scenario {
            Some(s) if s.active_in(round) => s.failed_paths.clone(),
            _ => BTreeSet::new(),
        };
        let case = classify_failure_case(scenario, plan, round);

        let mut plain = BTreeMap::new();
        let mut coded = BTreeMap::new();
        for p in packets.into_iter().filter(|p| !failed.contains(&p.source.0)) {
            match p.kind {
                PacketKind::Plain => plain.insert(p.source.0, p.payload),
                PacketKind::Coded => coded.insert(p.source.0, p.payload),
            };
        }
        let lost_working: BTreeSet<usize> = failed.iter().copied().filter(|p| !r.is_protection(*p)).collect();
        let delivered: BTreeSet<usize> = plain.keys().copied().collect();

        let mut record = RoundRecord {
            round,
            case,
            delivered: delivered.clone(),
            lost: failed.clone(),
            recovered: BTreeSet::new(),
            decode_ok: true,
            exact: true,
            solver_calls: 0,
            error: None,
        };
        let mut at_receivers: BTreeMap<usize, u32> = plain.iter().map(|(&i, x)| (i, x.value())).collect();

        if !lost_working.is_empty() {
            match decode(matrix, round, &plain, &coded, &lost_working) {
                Ok(out) => {
                    record.solver_calls = out.solver_calls;
                    record.exact = out.values.iter().all(|(i, v)| sent.get(i) == Some(v));
                    record.recovered = out.values.keys().copied().collect();
                    at_receivers.extend(out.values.iter().map(|(&i, v)| (i, v.value())));
                }
                Err(e) => {
                    log::warn!("round {round}: decode failed: {e}");
                    record.decode_ok = false;
                    record.exact = false;
                    record.error = Some(e.to_string());
                }
            }
        }

        delivered_total += delivered.len() as u64;
        if record.decode_ok && record.exact {
            recovered_total += record.recovered.len() as u64;
            delivered_total += record.recovered.len() as u64;
        }
        sent_log.push(sent.iter().map(|(&i, x)| (i, x.value())).collect());
        received_log.push(at_receivers);
        records.push(record);
    }

    let measured_capacity = Ratio::new(delivered_total, (n * plan.session_length()) as u64);
    Ok(SessionReport {
        n,
        t,
        q: field.order(),
        failed_node: scenario.map(|s| s.failed_node.clone()),
        rounds: records,
        offered,
        delivered: delivered_total,
        recovered: recovered_total,
        measured_capacity,
        sent: sent_log,
        received: received_log,
    })
}
