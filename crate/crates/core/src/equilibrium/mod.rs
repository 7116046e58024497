//! Exhaustive equilibrium verification.
//!
//! * [`bf_nash`]: pure Nash equilibria of the Bloc Formation mechanism.
//! * [`rc_spe`]: voting profiles sustainable in a subgame-perfect
//!   equilibrium of the Random Confirmations mechanism.
//! * [`oracle`]: a full strategy-space SPE enumeration at `n = 3`, used to
//!   cross-check the sustainability shortcut.
//! * [`report`]: implementation reports over every preference profile.

pub mod bf_nash;
pub mod oracle;
pub mod rc_spe;
pub mod report;

use std::fmt;

use crate::agent::AgentId;
use crate::model::{strictly_prefers, Alternative, Lottery};

pub use bf_nash::{enumerate_nash_bf, is_nash_bf, BfGame};
pub use oracle::spe_oracle_n3;
pub use rc_spe::{rc_sustainable_profiles, rc_voting_deviation, RcGame};
pub use report::{
    bf_profile_report, rc_profile_report, verify_implementation, ImplementationReport, Mechanism, ProfileReport,
};

/// A unilateral change of message that the deviating agent strictly prefers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationWitness<M> {
    pub agent: AgentId,
    pub from: M,
    pub to: M,
    pub before: Lottery,
    pub after: Lottery,
}

impl<M> DeviationWitness<M> {
    /// The SD improvement claimed by the witness, for an agent preferring `preferred`.
    pub fn is_improvement_for(&self, preferred: Alternative) -> bool {
        strictly_prefers(preferred, &self.after, &self.before)
    }
}

impl<M: fmt::Display> fmt::Display for DeviationWitness<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {} deviates {} -> {}: {} -> {}",
            self.agent, self.from, self.to, self.before, self.after
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Pass,
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

/// Limits on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of Bloc Formation message profiles, `(2 C(n-1,p))^n`.
    pub bf_profiles: u64,
    /// Maximum number of voting-stage profiles, `2^n` (or `3^n` with abstention).
    pub rc_profiles: u64,
}

impl Budget {
    /// Admits Bloc Formation up to `n = 5` and baseline Random Confirmations
    /// up to `n = 9`.
    pub const DEFAULT: Budget = Budget {
        bf_profiles: 1_000_000,
        rc_profiles: 1_000,
    };

    /// Both limits set to `limit`.
    pub fn uniform(limit: u64) -> Self {
        Budget {
            bf_profiles: limit,
            rc_profiles: limit,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
