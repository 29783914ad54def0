//! The protection code: coefficient matrix, per-round encoding, erasure
//! decoding and recoverability checks.
//!
//! Row `k` of the `t x n` matrix (0-based) belongs to the `k`-th protection
//! path of a round; column `i` (1-based connection label) holds the
//! coefficient applied to that connection's plain unit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, FieldSpec};
use crate::npsim::schedule::{check_nt, protection_window};

/// Exponent layout of the coefficient matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convention {
    /// `entry[k][i] = alpha^((i - 1) * k)`: first row and first column all ones.
    #[default]
    #[serde(rename = "matrix")]
    Matrix,
    /// `entry[k][i] = alpha^(i * k)`: same rows shifted by one column.
    #[serde(rename = "eq12")]
    Shifted,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Matrix => "matrix",
            Convention::Shifted => "eq12",
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(Convention::Matrix),
            "eq12" => Ok(Convention::Shifted),
            other => Err(Error::Scenario(format!("unknown convention `{other}` (expected matrix|eq12)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectionMatrix {
    field: Arc<FieldSpec>,
    n: usize,
    t: usize,
    convention: Convention,
    entries: Vec<Vec<u32>>,
}

impl ProtectionMatrix {
    pub fn new(n: usize, t: usize, field: &Arc<FieldSpec>, convention: Convention) -> Result<Self> {
        check_nt(n, t)?;
        let shift = match convention {
            Convention::Matrix => 0,
            Convention::Shifted => 1,
        };
        let entries = (0..t as u64)
            .map(|k| (0..n as u64).map(|i| field.alpha_pow((i + shift) * k)).collect())
            .collect();
        Ok(ProtectionMatrix { field: Arc::clone(field), n, t, convention, entries })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Raw rows, `t` vectors of `n` canonical values.
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.entries
    }

    /// Coefficient of connection `path` (1-based) in equation `row` (0-based).
    pub fn coefficient(&self, row: usize, path: usize) -> u32 {
        self.entries[row][path - 1]
    }

    pub fn entry(&self, row: usize, path: usize) -> FieldElement {
        self.field.element(self.coefficient(row, path)).expect("entries are canonical")
    }

    /// Square submatrix on the given rows (0-based) and columns (1-based).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<u32>> {
        rows.iter().map(|&r| cols.iter().map(|&c| self.coefficient(r, c)).collect()).collect()
    }
}

/// The coefficient matrix in the default layout.
pub fn build_coefficient_matrix(n: usize, t: usize, field: &Arc<FieldSpec>) -> Result<ProtectionMatrix> {
    ProtectionMatrix::new(n, t, field, Convention::Matrix)
}

fn check_window(matrix: &ProtectionMatrix, window: &[usize]) -> Result<()> {
    let distinct: BTreeSet<_> = window.iter().collect();
    if window.len() != matrix.t || distinct.len() != window.len() || window.iter().any(|&p| p < 1 || p > matrix.n) {
        return Err(Error::DataMismatch(format!("bad protection window {window:?}")));
    }
    Ok(())
}

fn raw(matrix: &ProtectionMatrix, e: &FieldElement) -> Result<u32> {
    if **e.field() != *matrix.field {
        return Err(Error::FieldMismatch);
    }
    Ok(e.value())
}

/// Coded units for `round`, one per protection path in window order.
pub fn encode_round(
    matrix: &ProtectionMatrix,
    round: usize,
    data: &BTreeMap<usize, FieldElement>,
) -> Result<Vec<FieldElement>> {
    if round < 1 {
        return Err(Error::RoundOutOfRange { round, len: 0 });
    }
    encode_window(matrix, &protection_window(matrix.n, matrix.t, round), data)
}

/// Encoding against an explicit protection window. `data` must cover exactly
/// the connections outside the window.
pub fn encode_window(
    matrix: &ProtectionMatrix,
    window: &[usize],
    data: &BTreeMap<usize, FieldElement>,
) -> Result<Vec<FieldElement>> {
    check_window(matrix, window)?;
    if let Some(p) = data.keys().find(|p| window.contains(p)) {
        return Err(Error::DataMismatch(format!("datum given for protection path {p}")));
    }
    if let Some(missing) = (1..=matrix.n).find(|i| !window.contains(i) && !data.contains_key(i)) {
        return Err(Error::DataMismatch(format!("missing datum for working path {missing}")));
    }
    if let Some(p) = data.keys().find(|&&p| p < 1 || p > matrix.n) {
        return Err(Error::DataMismatch(format!("path {p} out of range")));
    }
    let f = &matrix.field;
    let mut ys = Vec::with_capacity(matrix.t);
    for row in 0..matrix.t {
        let mut acc = 0;
        for (&path, x) in data {
            acc = f.add(acc, f.mul(matrix.coefficient(row, path), raw(matrix, x)?));
        }
        ys.push(f.element(acc)?);
    }
    Ok(ys)
}

/// Decoder output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub values: BTreeMap<usize, FieldElement>,
    /// Number of linear solves performed.
    pub solver_calls: usize,
}

/// Which received equations feed the square solve.
enum Selection<'a> {
    /// Lowest equation rows first, falling back to the next nonsingular
    /// combination.
    LowestFirst,
    /// Exactly these protection paths.
    Paths(&'a [usize]),
}

/// Recovers lost working units of `round` from the surviving plain and
/// coded units.
///
/// `received_y` is keyed by the protection path that carried the unit.
/// Every working path must appear in exactly one of `received_plain` and
/// `lost_working`. The solution is checked against every received equation.
pub fn decode(
    matrix: &ProtectionMatrix,
    round: usize,
    received_plain: &BTreeMap<usize, FieldElement>,
    received_y: &BTreeMap<usize, FieldElement>,
    lost_working: &BTreeSet<usize>,
) -> Result<Decoded> {
    let window = round_window(matrix, round)?;
    solve_lost(matrix, &window, received_plain, received_y, lost_working, Selection::LowestFirst)
}

/// Like [`decode`] but solves with exactly the coded units carried by
/// `equations` (protection path labels, `equations.len() == lost_working.len()`).
pub fn decode_with_equations(
    matrix: &ProtectionMatrix,
    round: usize,
    received_plain: &BTreeMap<usize, FieldElement>,
    received_y: &BTreeMap<usize, FieldElement>,
    lost_working: &BTreeSet<usize>,
    equations: &[usize],
) -> Result<Decoded> {
    let window = round_window(matrix, round)?;
    solve_lost(matrix, &window, received_plain, received_y, lost_working, Selection::Paths(equations))
}

fn round_window(matrix: &ProtectionMatrix, round: usize) -> Result<Vec<usize>> {
    if round < 1 {
        return Err(Error::RoundOutOfRange { round, len: 0 });
    }
    Ok(protection_window(matrix.n, matrix.t, round))
}

fn solve_lost(
    matrix: &ProtectionMatrix,
    window: &[usize],
    received_plain: &BTreeMap<usize, FieldElement>,
    received_y: &BTreeMap<usize, FieldElement>,
    lost_working: &BTreeSet<usize>,
    selection: Selection<'_>,
) -> Result<Decoded> {
    let f = &matrix.field;
    let n = matrix.n;

    if let Some(p) = lost_working.iter().find(|p| window.contains(p)) {
        return Err(Error::DataMismatch(format!("path {p} is a protection path this round")));
    }
    if let Some(p) = received_y.keys().find(|p| !window.contains(p)) {
        return Err(Error::DataMismatch(format!("coded unit from working path {p}")));
    }
    for i in (1..=n).filter(|i| !window.contains(i)) {
        match (received_plain.contains_key(&i), lost_working.contains(&i)) {
            (true, true) => return Err(Error::DataMismatch(format!("path {i} both received and lost"))),
            (false, false) => return Err(Error::DataMismatch(format!("path {i} neither received nor lost"))),
            _ => {}
        }
    }
    if let Some(p) = received_plain.keys().find(|p| **p < 1 || **p > n || window.contains(p)) {
        return Err(Error::DataMismatch(format!("plain unit from path {p}")));
    }

    // One equation per received coded unit, reduced by the known plain units.
    let lost: Vec<usize> = lost_working.iter().copied().collect();
    let mut equations: Vec<(usize, Vec<u32>, u32)> = Vec::with_capacity(received_y.len());
    for (row, &path) in window.iter().enumerate() {
        let Some(y) = received_y.get(&path) else { continue };
        let mut rhs = raw(matrix, y)?;
        for (&i, x) in received_plain {
            rhs = f.sub(rhs, f.mul(matrix.coefficient(row, i), raw(matrix, x)?));
        }
        let coeffs = lost.iter().map(|&c| matrix.coefficient(row, c)).collect();
        equations.push((path, coeffs, rhs));
    }

    let m = lost.len();
    let mut solver_calls = 0;
    let solution: Vec<u32> = if m == 0 {
        Vec::new()
    } else {
        let attempt = |subset: &[usize], calls: &mut usize| -> Result<Vec<u32>> {
            *calls += 1;
            let a = subset.iter().map(|&k| equations[k].1.clone()).collect();
            let b = subset.iter().map(|&k| equations[k].2).collect();
            f.solve(a, b)
        };
        match selection {
            Selection::Paths(paths) => {
                if paths.len() != m {
                    return Err(Error::DataMismatch(format!(
                        "{} equations chosen for {m} unknowns",
                        paths.len()
                    )));
                }
                let subset = paths
                    .iter()
                    .map(|p| {
                        equations
                            .iter()
                            .position(|(q, _, _)| q == p)
                            .ok_or_else(|| Error::DataMismatch(format!("no coded unit received from path {p}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                attempt(&subset, &mut solver_calls).map_err(|e| singular_to_unrecoverable(e, m))?
            }
            Selection::LowestFirst => {
                let rank = || f.rank(equations.iter().map(|e| e.1.clone()).collect());
                if equations.len() < m {
                    return Err(Error::Unrecoverable { unknowns: m, rank: rank() });
                }
                let mut found = None;
                for subset in (0..equations.len()).combinations(m) {
                    match attempt(&subset, &mut solver_calls) {
                        Ok(x) => {
                            found = Some(x);
                            break;
                        }
                        Err(Error::Singular { .. }) => {
                            log::debug!("equation subset {subset:?} singular, trying next");
                            if rank() < m {
                                break;
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                found.ok_or_else(|| Error::Unrecoverable { unknowns: m, rank: rank() })?
            }
        }
    };

    for (_, coeffs, rhs) in &equations {
        let lhs = coeffs.iter().zip(&solution).fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)));
        if lhs != *rhs {
            return Err(Error::Inconsistent);
        }
    }

    let values = lost
        .into_iter()
        .zip(solution)
        .map(|(path, v)| Ok((path, f.element(v)?)))
        .collect::<Result<_>>()?;
    Ok(Decoded { values, solver_calls })
}

fn singular_to_unrecoverable(e: Error, unknowns: usize) -> Error {
    match e {
        Error::Singular { rank, .. } => Error::Unrecoverable { unknowns, rank },
        other => other,
    }
}

/// Outcome of checking every `t`-column submatrix for full rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoverabilityReport {
    pub n: usize,
    pub t: usize,
    pub q: u32,
    pub all_full_rank: bool,
    /// Column label sets whose `t x t` submatrix is singular.
    pub failing_subsets: Vec<Vec<usize>>,
    pub subsets_checked: usize,
}

impl RecoverabilityReport {
    /// Failing subsets as `{1,4} {2,5}`, or `-` when there are none.
    pub fn failing_subsets_text(&self) -> String {
        if self.failing_subsets.is_empty() {
            return "-".into();
        }
        self.failing_subsets
            .iter()
            .map(|s| format!("{{{}}}", s.iter().join(",")))
            .join(" ")
    }
}

impl fmt::Display for RecoverabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} t={} q={} result={} subsets_checked={} failing={}",
            self.n,
            self.t,
            self.q,
            if self.all_full_rank { "pass" } else { "fail" },
            self.subsets_checked,
            self.failing_subsets_text()
        )
    }
}

/// Brute-force check that every choice of `t` columns gives a nonsingular
/// `t x t` submatrix, i.e. that any `t` lost working units are decodable
/// from all `t` coded units.
pub fn verify_recoverability(matrix: &ProtectionMatrix) -> RecoverabilityReport {
    let rows: Vec<usize> = (0..matrix.t).collect();
    let mut failing_subsets = Vec::new();
    let mut subsets_checked = 0;
    for cols in (1..=matrix.n).combinations(matrix.t) {
        subsets_checked += 1;
        if matrix.field.rank(matrix.submatrix(&rows, &cols)) < matrix.t {
            failing_subsets.push(cols);
        }
    }
    RecoverabilityReport {
        n: matrix.n,
        t: matrix.t,
        q: matrix.field.order(),
        all_full_rank: failing_subsets.is_empty(),
        failing_subsets,
        subsets_checked,
    }
}

/// Claimed field-size bounds `(n - t + 1, 2^ceil(log2(n + 1)))`.
pub fn field_size_bounds(n: usize, t: usize) -> (u64, u64) {
    let lower = (n - t + 1) as u64;
    let upper = (n as u64 + 1).next_power_of_two();
    (lower, upper)
}
