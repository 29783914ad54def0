//! Batch drivers behind the `verify` and `sweep` commands, and their CSV
//! records.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfield::{prime_power, FieldSpec};
use crate::npsim::SessionReport;
use crate::protcode::{field_size_bounds, verify_recoverability, Convention, ProtectionMatrix};
use crate::scenario::Scenario;

pub const MAX_VERIFY_N: usize = 12;
pub const MAX_VERIFY_T: usize = 4;
pub const MAX_VERIFY_Q: u32 = 64;

/// One `(n, t, q)` recoverability result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub n: usize,
    pub t: usize,
    pub q: u32,
    pub result: &'static str,
    pub subsets_checked: usize,
    pub failing_subsets: String,
    pub paper_lower: u64,
    pub paper_upper: u64,
}

/// Smallest passing field order per `(n, t)` next to the claimed bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundSummary {
    pub n: usize,
    pub t: usize,
    pub min_passing_q: Option<u32>,
    pub paper_lower: u64,
    pub paper_upper: u64,
    /// The claimed lower bound is not enough: the smallest passing order is
    /// above it, or every tested order at or above it failed.
    pub exceeds_paper_lower: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyOutput {
    pub rows: Vec<VerifyRow>,
    pub summary: Vec<BoundSummary>,
}

/// Checks every `(n, t, q)` combination with `1 <= t < n` and `q` a prime
/// power. Refuses ranges beyond `n <= 12`, `t <= 4`, `q <= 64`.
pub fn verify_grid(ns: &[usize], ts: &[usize], qs: &[u32], convention: Convention) -> Result<VerifyOutput> {
    if let Some(n) = ns.iter().find(|&&n| n > MAX_VERIFY_N) {
        return Err(Error::RangeTooLarge(format!("n = {n} exceeds {MAX_VERIFY_N}")));
    }
    if let Some(t) = ts.iter().find(|&&t| t > MAX_VERIFY_T) {
        return Err(Error::RangeTooLarge(format!("t = {t} exceeds {MAX_VERIFY_T}")));
    }
    if let Some(q) = qs.iter().find(|&&q| q > MAX_VERIFY_Q) {
        return Err(Error::RangeTooLarge(format!("q = {q} exceeds {MAX_VERIFY_Q}")));
    }

    let mut qs: Vec<u32> = qs.iter().copied().filter(|&q| prime_power(q).is_some()).collect();
    qs.sort_unstable();
    qs.dedup();
    let fields = qs.iter().map(|&q| FieldSpec::of_order(q)).collect::<Result<Vec<_>>>()?;

    let mut out = VerifyOutput::default();
    let mut pairs: Vec<(usize, usize)> =
        ns.iter().flat_map(|&n| ts.iter().map(move |&t| (n, t))).filter(|&(n, t)| t >= 1 && t < n).collect();
    pairs.sort_unstable();
    pairs.dedup();

    for (n, t) in pairs {
        let (lower, upper) = field_size_bounds(n, t);
        let mut passing = Vec::new();
        let mut failing_at_or_above_lower = false;
        for field in &fields {
            let report = verify_recoverability(&ProtectionMatrix::new(n, t, field, convention)?);
            if report.all_full_rank {
                passing.push(report.q);
            } else if report.q as u64 >= lower {
                failing_at_or_above_lower = true;
            }
            out.rows.push(VerifyRow {
                n,
                t,
                q: report.q,
                result: if report.all_full_rank { "pass" } else { "fail" },
                subsets_checked: report.subsets_checked,
                failing_subsets: report.failing_subsets_text(),
                paper_lower: lower,
                paper_upper: upper,
            });
        }
        let min_passing_q = passing.first().copied();
        let exceeds_paper_lower = match min_passing_q {
            Some(q) => q as u64 > lower,
            None => failing_at_or_above_lower,
        };
        out.summary.push(BoundSummary { n, t, min_passing_q, paper_lower: lower, paper_upper: upper, exceeds_paper_lower });
    }
    Ok(out)
}

/// Flat per-run record shared by `run` and `sweep`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionRow {
    pub n: usize,
    pub t: usize,
    pub q: u32,
    pub node: String,
    pub d: usize,
    pub case_counts: String,
    pub capacity_num: Option<u64>,
    pub capacity_den: Option<u64>,
    pub recovered_all: String,
}

pub const SKIPPED: &str = "skipped(d>t)";

impl SessionRow {
    pub fn from_report(report: &SessionReport, d: usize) -> Self {
        SessionRow {
            n: report.n,
            t: report.t,
            q: report.q,
            node: report.failed_node.clone().unwrap_or_else(|| "-".into()),
            d,
            case_counts: report.case_counts(),
            capacity_num: Some(*report.measured_capacity.numer()),
            capacity_den: Some(*report.measured_capacity.denom()),
            recovered_all: report.all_decoded().to_string(),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.recovered_all == "false"
    }
}

/// Fails `node` in `template` with seeded data and runs one session. Relays
/// carrying more than `t` connections produce a skipped row.
pub fn session_row(template: &Scenario, node: &str, seed: u64) -> Result<SessionRow> {
    let d = template.network.node_relay_degree(node)?;
    if d > template.plan.t() {
        return Ok(SessionRow {
            n: template.plan.n(),
            t: template.plan.t(),
            q: template.field.order(),
            node: node.to_owned(),
            d,
            case_counts: String::new(),
            capacity_num: None,
            capacity_den: None,
            recovered_all: SKIPPED.into(),
        });
    }
    let report = template.with_failure(Some(node))?.with_seed(seed)?.run()?;
    Ok(SessionRow::from_report(&report, d))
}

/// The `(node, seed)` pairs a sweep visits, node-major. Over-degree relays
/// appear once with no seed.
pub fn sweep_jobs(template: &Scenario, seeds: &[u64], nodes: Option<&[String]>) -> Result<Vec<(String, Option<u64>)>> {
    let nodes: Vec<String> = match nodes {
        Some(list) => list.to_vec(),
        None => template.network.relays().map(str::to_owned).collect(),
    };
    let mut jobs = Vec::new();
    for node in nodes {
        if template.network.node_relay_degree(&node)? > template.plan.t() {
            jobs.push((node, None));
        } else {
            jobs.extend(seeds.iter().map(|&s| (node.clone(), Some(s))));
        }
    }
    Ok(jobs)
}

pub fn run_job(template: &Scenario, node: &str, seed: Option<u64>) -> Result<SessionRow> {
    session_row(template, node, seed.unwrap_or(0))
}

/// Sequential sweep over every relay (or `nodes`) and seed.
pub fn sweep(template: &Scenario, seeds: &[u64], nodes: Option<&[String]>) -> Result<Vec<SessionRow>> {
    sweep_jobs(template, seeds, nodes)?
        .into_iter()
        .map(|(node, seed)| run_job(template, &node, seed))
        .collect()
}

/// Tally of sweep rows by `recovered_all` value.
pub fn sweep_tally(rows: &[SessionRow]) -> BTreeMap<String, usize> {
    let mut tally = BTreeMap::new();
    for r in rows {
        *tally.entry(r.recovered_all.clone()).or_insert(0) += 1;
    }
    tally
}

pub fn write_csv<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Output(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Output(e.to_string()))
}

/// Writes the header even when there are no rows.
pub fn write_session_csv<W: Write>(w: W, rows: &[SessionRow]) -> Result<()> {
    if rows.is_empty() {
        let mut w = w;
        return writeln!(w, "{}", SESSION_CSV_HEADER).map_err(|e| Error::Output(e.to_string()));
    }
    write_csv(w, rows)
}

pub const SESSION_CSV_HEADER: &str = "n,t,q,node,d,case_counts,capacity_num,capacity_den,recovered_all";

/// Recoverability rows, a blank line, then the per-`(n, t)` summary table.
pub fn write_verify_csv<W: Write>(mut w: W, out: &VerifyOutput) -> Result<()> {
    write_csv(&mut w, &out.rows)?;
    writeln!(w).map_err(|e| Error::Output(e.to_string()))?;
    write_csv(&mut w, &out.summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scenario::{DataDoc, FieldDoc, ScenarioDoc};

    fn template(t: usize, p: u32, spec: crate::topology::NetworkSpec) -> Scenario {
        Scenario::from_doc(ScenarioDoc {
            t,
            convention: Convention::Matrix,
            field: FieldDoc { p, r: 1, poly: None },
            network: spec,
            failure: None,
            data: DataDoc::default(),
        })
        .unwrap()
    }

    #[test]
    fn verify_small_grid() {
        let out = verify_grid(&[4, 5, 6], &[2], &[4, 5, 7, 8], Convention::Matrix).unwrap();
        assert_eq!(out.rows.len(), 12);
        let min: Vec<_> = out.summary.iter().map(|s| (s.n, s.min_passing_q)).collect();
        assert_eq!(min, vec![(4, Some(5)), (5, Some(7)), (6, Some(7))]);
        assert!(out.summary.iter().all(|s| s.exceeds_paper_lower));
    }

    #[test]
    fn verify_t1_always_passes() {
        let out = verify_grid(&[2, 5, 9], &[1], &[2, 3, 4, 5], Convention::Matrix).unwrap();
        assert!(out.rows.iter().all(|r| r.result == "pass"));
        assert!(out.summary.iter().all(|s| s.min_passing_q == Some(2)));
    }

    #[test]
    fn verify_refuses_large_ranges() {
        assert!(matches!(verify_grid(&[13], &[2], &[16], Convention::Matrix), Err(Error::RangeTooLarge(_))));
        assert!(matches!(verify_grid(&[8], &[5], &[16], Convention::Matrix), Err(Error::RangeTooLarge(_))));
        assert!(matches!(verify_grid(&[8], &[2], &[67], Convention::Matrix), Err(Error::RangeTooLarge(_))));
    }

    #[test]
    fn verify_csv_layout() {
        let out = verify_grid(&[10], &[3], &[11], Convention::Matrix).unwrap();
        let mut buf = Vec::new();
        write_verify_csv(&mut buf, &out).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,t,q,result,subsets_checked,failing_subsets,paper_lower,paper_upper");
        assert_eq!(lines[1], "10,3,11,pass,120,-,8,16");
        assert_eq!(lines[2], "");
        assert_eq!(lines[3], "n,t,min_passing_q,paper_lower,paper_upper,exceeds_paper_lower");
        assert_eq!(lines[4], "10,3,11,8,16,true");
    }

    #[test]
    fn sweep_skips_over_degree_relays() {
        let tpl = template(1, 7, fixtures::five_path_chain_spec());
        let rows = sweep(&tpl, &[1, 2], Some(&["x".to_string(), "a1".to_string()])).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].recovered_all, SKIPPED);
        assert_eq!(rows[0].d, 2);
        assert!(rows[1..].iter().all(|r| r.recovered_all == "true"));
    }

    #[test]
    fn empty_sweep_still_has_header() {
        let tpl = template(1, 7, fixtures::parallel_spec(3));
        let rows = sweep(&tpl, &[1], Some(&[])).unwrap();
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_session_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), SESSION_CSV_HEADER);
    }

    #[test]
    fn session_csv_header_matches() {
        let tpl = template(1, 5, fixtures::parallel_spec(3));
        let rows = sweep(&tpl, &[0], Some(&["a2".to_string()])).unwrap();
        let mut buf = Vec::new();
        write_session_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SESSION_CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "3,1,5,a2,1,working=2;protection=1;mixed=0;none=0,2,3,true");
    }
}
