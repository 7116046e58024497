//! Implementation checks over every preference profile of a population.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use super::{BfGame, Budget, RcGame};
use crate::error::Result;
use crate::model::{maj_k, majority_set, Alternative, Lottery, PreferenceProfile};
use crate::rc::{RcVariant, VotingProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    Bf,
    Rc(RcVariant),
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::Bf => write!(f, "bf"),
            Mechanism::Rc(v) => write!(f, "rc-{v}"),
        }
    }
}

/// Equilibria found at one preference profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    pub prefs: PreferenceProfile,
    pub equilibrium_count: usize,
    pub outcomes: BTreeSet<Lottery>,
    pub pass: bool,
    /// Reason for a failure, empty on success.
    pub note: String,
}

impl ProfileReport {
    /// Stable machine-readable line.
    pub fn machine_line(&self) -> String {
        let outcomes: Vec<String> = self
            .outcomes
            .iter()
            .map(|l| format!("{}/{}", l.pa().numer(), l.pa().denom()))
            .collect();
        format!(
            "R={} eq_count={} outcomes=[{}] pass={}",
            self.prefs,
            self.equilibrium_count,
            outcomes.join(","),
            self.pass
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplementationReport {
    pub mechanism: Mechanism,
    pub n: usize,
    pub profiles: Vec<ProfileReport>,
    pub pass: bool,
}

impl ImplementationReport {
    /// Machine-readable form: a `format: 1` header, one line per profile and
    /// a summary line.
    pub fn machine_lines(&self) -> String {
        let mut out = format!("format: 1\nmechanism={} n={}\n", self.mechanism, self.n);
        for p in &self.profiles {
            out.push_str(&p.machine_line());
            out.push('\n');
        }
        out.push_str(&format!("summary pass={}\n", self.pass));
        out
    }

    /// Human-readable table.
    pub fn table(&self) -> String {
        let width = self.n.max(5);
        let mut out = format!("{} at n = {}\n", self.mechanism, self.n);
        out.push_str(&format!("{:<width$}  {:>8}  {:<24}  {}\n", "R", "eq", "outcomes (pA)", "result"));
        for p in &self.profiles {
            let outcomes: Vec<String> = p.outcomes.iter().map(|l| l.pa().to_string()).collect();
            let result = if p.pass { "pass".to_string() } else { format!("FAIL {}", p.note) };
            out.push_str(&format!(
                "{:<width$}  {:>8}  {:<24}  {}\n",
                p.prefs.to_string(),
                p.equilibrium_count,
                outcomes.join(" "),
                result
            ));
        }
        let failures = self.profiles.iter().filter(|p| !p.pass).count();
        out.push_str(&format!(
            "{} profiles, {} failed: {}\n",
            self.profiles.len(),
            failures,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

impl fmt::Display for ImplementationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.table(), self.machine_lines())
    }
}

/// The outcome every equilibrium must produce, or `None` where only
/// existence is checked.
fn target(mechanism: Mechanism, prefs: &PreferenceProfile) -> Result<Option<Lottery>> {
    let winners = majority_set(prefs);
    let strict = winners.iter().next().copied().filter(|_| winners.len() == 1);
    Ok(match (mechanism, strict) {
        (Mechanism::Rc(RcVariant::Supermajority { k }), _) => Some(Lottery::degenerate(maj_k(prefs, k)?)),
        (_, Some(x)) => Some(Lottery::degenerate(x)),
        (Mechanism::Bf, None) => Some(Lottery::half()),
        (Mechanism::Rc(_), None) => None,
    })
}

fn judge(
    mechanism: Mechanism,
    prefs: &PreferenceProfile,
    equilibria: &[Lottery],
    tie_witnesses: impl FnOnce() -> (bool, bool),
) -> Result<ProfileReport> {
    let outcomes: BTreeSet<Lottery> = equilibria.iter().copied().collect();
    let (pass, note) = if equilibria.is_empty() {
        (false, "no equilibrium".to_string())
    } else {
        match target(mechanism, prefs)? {
            Some(t) => match outcomes.iter().find(|&&o| o != t) {
                None => (true, String::new()),
                Some(o) => (false, format!("outcome {o} differs from target {t}")),
            },
            None => {
                let (tie, unanimous) = tie_witnesses();
                match (tie, unanimous) {
                    (true, true) => (true, String::new()),
                    (false, _) => (false, "truthful tie profile not sustained".to_string()),
                    (true, false) => (false, "no unanimous profile sustained".to_string()),
                }
            }
        }
    };
    Ok(ProfileReport {
        prefs: prefs.clone(),
        equilibrium_count: equilibria.len(),
        outcomes,
        pass,
        note,
    })
}

/// Checks the Nash equilibria of `game` at `prefs` against the majority rule.
pub fn bf_profile_report(game: &BfGame, prefs: &PreferenceProfile) -> Result<ProfileReport> {
    let eq: Vec<Lottery> = game
        .equilibrium_indices(prefs)?
        .into_iter()
        .map(|idx| game.outcome(idx))
        .collect();
    judge(Mechanism::Bf, prefs, &eq, || (false, false))
}

/// Checks the sustainable voting profiles of `game` against the majority
/// rule (or its supermajority version).
pub fn rc_profile_report(game: &RcGame) -> Result<ProfileReport> {
    let prefs = game.prefs();
    let sustained = game.sustainable();
    let eq: Vec<Lottery> = sustained.iter().map(|(_, o)| *o).collect();
    judge(Mechanism::Rc(game.variant()), prefs, &eq, || {
        let truthful = VotingProfile::from_alternatives(prefs.as_slice());
        let tie = sustained
            .iter()
            .any(|(v, o)| *v == truthful && *o == Lottery::half());
        let unanimous = sustained
            .iter()
            .any(|(v, o)| v.is_unanimous() && Alternative::BOTH.iter().any(|&x| o.is_degenerate_on(x)));
        (tie, unanimous)
    })
}

/// Enumerates the equilibria at every preference profile of size `n` and
/// compares their outcomes with the majority rule (or its supermajority
/// version). At even `n` ties, Bloc Formation must give the even lottery and
/// Random Confirmations must sustain both the truthful tie profile and a
/// unanimous profile.
pub fn verify_implementation(mechanism: Mechanism, n: usize, budget: &Budget) -> Result<ImplementationReport> {
    let all: Vec<PreferenceProfile> = PreferenceProfile::all(n).collect();
    let profiles = match mechanism {
        Mechanism::Bf => {
            let game = BfGame::new(n, budget)?;
            all.iter()
                .map(|r| bf_profile_report(&game, r))
                .collect::<Result<Vec<_>>>()?
        }
        Mechanism::Rc(variant) => {
            variant.validate(n)?;
            all.par_iter()
                .map(|r| rc_profile_report(&RcGame::new(r, variant, budget)?))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let pass = profiles.iter().all(|p| p.pass);
    Ok(ImplementationReport {
        mechanism,
        n,
        profiles,
        pass,
    })
}
