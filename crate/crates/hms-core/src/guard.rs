//! Desk-scale resource guards.
//!
//! Every exhaustive routine in this crate is honest about being exponential:
//! before it starts, it checks the relevant limit below and aborts with
//! [`crate::Error::Guard`] instead of silently crunching forever. Limits can
//! be adjusted programmatically, via CLI flags, or through the
//! `HMS_GUARD_OVERRIDE` environment variable (a comma-separated list such as
//! `jobs=20,points=500000`).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const GUARD_ENV_VAR: &str = "HMS_GUARD_OVERRIDE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guards {
    /// Total job bound for the brute-force reference optimizer.
    pub brute_force_jobs: u64,
    /// Machine bound for the brute-force reference optimizer.
    pub brute_force_machines: u64,
    /// Distinct-type bound for the exact configuration solver (post-kernel).
    pub exact_types: u64,
    /// Processing-time bound for the exact configuration solver (post-kernel).
    pub exact_pmax: u64,
    /// Cap on enumerated lattice points (and on search nodes, scaled).
    pub lattice_points: u64,
    /// Cap on the multiplicity `m` handled by the polytope-pair solver.
    pub parts: u64,
    /// Cap on explicit machines when a compressed schedule is expanded.
    pub expanded_machines: u64,
    /// Cap on `(2Δ+1)^N` for exhaustive sign-preservation checks.
    pub sign_check_points: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            brute_force_jobs: 12,
            brute_force_machines: 5,
            exact_types: 6,
            exact_pmax: 8,
            lattice_points: 100_000,
            parts: 10_000,
            expanded_machines: 10_000,
            sign_check_points: 1_000_000,
        }
    }
}

impl Guards {
    /// Default guards with any `HMS_GUARD_OVERRIDE` entries applied.
    pub fn from_env() -> Self {
        let mut g = Guards::default();
        if let Ok(spec) = std::env::var(GUARD_ENV_VAR) {
            g.apply_overrides(&spec);
        }
        g
    }

    /// Applies a `key=value,key=value` override string, ignoring unknown
    /// keys and unparsable values (overrides are a CI affordance, not an
    /// input format worth hard failures).
    pub fn apply_overrides(&mut self, spec: &str) {
        for part in spec.split(',') {
            let part = part.trim();
            let Some((key, value)) = part.split_once('=') else {
                continue;
            };
            let Ok(v) = value.trim().parse::<u64>() else {
                continue;
            };
            match key.trim() {
                "jobs" => self.brute_force_jobs = v,
                "machines" => self.brute_force_machines = v,
                "types" => self.exact_types = v,
                "pmax" => self.exact_pmax = v,
                "points" => self.lattice_points = v,
                "parts" => self.parts = v,
                "expanded" => self.expanded_machines = v,
                "signcheck" => self.sign_check_points = v,
                _ => {}
            }
        }
    }

    pub fn check(&self, what: &str, value: u64, limit: u64) -> Result<()> {
        if value > limit {
            Err(Error::guard(format!("{what} = {value} exceeds limit {limit}")))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_apply() {
        let mut g = Guards::default();
        g.apply_overrides("jobs=20, points=500000, bogus=3, pmax=oops");
        assert_eq!(g.brute_force_jobs, 20);
        assert_eq!(g.lattice_points, 500_000);
        assert_eq!(g.exact_pmax, Guards::default().exact_pmax);
    }

    #[test]
    fn check_flags_excess() {
        let g = Guards::default();
        assert!(g.check("jobs", 12, g.brute_force_jobs).is_ok());
        let err = g.check("jobs", 13, g.brute_force_jobs).unwrap_err();
        assert!(matches!(err, Error::Guard(_)));
    }
}
