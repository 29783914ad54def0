//! Rotation of protection duty across rounds.

use num_rational::Ratio;

use crate::error::{Error, Result};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn check_nt(n: usize, t: usize) -> Result<()> {
    if t < 1 || t >= n {
        return Err(Error::InvalidProtection { n, t });
    }
    Ok(())
}

/// The `t` connections carrying coded units in `round` (1-based): `t`
/// consecutive labels starting at `((round - 1) * t mod n) + 1`, wrapping
/// past `n`.
pub fn protection_window(n: usize, t: usize, round: usize) -> Vec<usize> {
    debug_assert!(round >= 1 && t >= 1 && t < n);
    let start = ((round - 1) * t) % n;
    (0..t).map(|k| (start + k) % n + 1).collect()
}

/// Number of rounds after which every connection has served as a
/// protection path equally often: `lcm(n, t) / t`.
pub fn session_length(n: usize, t: usize) -> usize {
    n / gcd(n, t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    /// Connections carrying coded units, in equation order.
    pub protection: Vec<usize>,
    /// Connections carrying plain units, ascending.
    pub working: Vec<usize>,
}

impl Round {
    pub fn is_protection(&self, path: usize) -> bool {
        self.protection.contains(&path)
    }

    /// Equation row (0-based) used by protection path `path` this round.
    pub fn equation_row(&self, path: usize) -> Option<usize> {
        self.protection.iter().position(|&p| p == path)
    }
}

/// One session's schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundPlan {
    n: usize,
    t: usize,
    rounds: Vec<Round>,
}

impl RoundPlan {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        check_nt(n, t)?;
        let rounds = (1..=session_length(n, t))
            .map(|j| {
                let protection = protection_window(n, t, j);
                let working = (1..=n).filter(|i| !protection.contains(i)).collect();
                Round { protection, working }
            })
            .collect();
        Ok(RoundPlan { n, t, rounds })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn session_length(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Round `j`, 1-based.
    pub fn round(&self, j: usize) -> Result<&Round> {
        j.checked_sub(1)
            .and_then(|k| self.rounds.get(k))
            .ok_or(Error::RoundOutOfRange { round: j, len: self.rounds.len() })
    }

    /// How many rounds of the session put `path` on protection duty.
    pub fn protection_count(&self, path: usize) -> usize {
        self.rounds.iter().filter(|r| r.is_protection(path)).count()
    }

    /// Capacity the schedule offers with no failures: `(n - t) / n`.
    pub fn nominal_capacity(&self) -> Ratio<u64> {
        Ratio::new((self.n - self.t) as u64, self.n as u64)
    }
}

/// Convenience wrapper over [`RoundPlan::new`].
pub fn schedule_rounds(n: usize, t: usize) -> Result<RoundPlan> {
    RoundPlan::new(n, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn windows(plan: &RoundPlan) -> Vec<Vec<usize>> {
        plan.rounds().iter().map(|r| r.protection.clone()).collect()
    }

    #[test]
    fn examples() {
        let plan = schedule_rounds(4, 2).unwrap();
        assert_eq!(windows(&plan), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(plan.round(2).unwrap().working, vec![1, 2]);

        let plan = schedule_rounds(3, 1).unwrap();
        assert_eq!(windows(&plan), vec![vec![1], vec![2], vec![3]]);

        let plan = schedule_rounds(3, 2).unwrap();
        assert_eq!(windows(&plan), vec![vec![1, 2], vec![3, 1], vec![2, 3]]);
        assert!((1..=3).all(|i| plan.protection_count(i) == 2));
    }

    #[test]
    fn invalid_parameters() {
        assert_eq!(schedule_rounds(3, 3).unwrap_err(), Error::InvalidProtection { n: 3, t: 3 });
        assert_eq!(schedule_rounds(3, 0).unwrap_err(), Error::InvalidProtection { n: 3, t: 0 });
        let plan = schedule_rounds(4, 2).unwrap();
        assert!(plan.round(0).is_err());
        assert!(plan.round(3).is_err());
    }

    proptest! {
        #[test]
        fn windows_partition_and_rotate_fairly(n in 2usize..40, t_raw in 1usize..40) {
            let t = 1 + t_raw % (n - 1);
            let plan = schedule_rounds(n, t).unwrap();
            for r in plan.rounds() {
                prop_assert_eq!(r.protection.len(), t);
                prop_assert_eq!(r.working.len(), n - t);
                let mut all: Vec<usize> = r.protection.iter().chain(&r.working).copied().collect();
                all.sort();
                prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());
            }
            let per_path = plan.session_length() * t / n;
            prop_assert_eq!(plan.session_length() * t % n, 0);
            for i in 1..=n {
                prop_assert_eq!(plan.protection_count(i), per_path);
            }
            if n % t == 0 {
                prop_assert_eq!(plan.session_length(), n / t);
                prop_assert_eq!(per_path, 1);
            }
        }
    }
}
