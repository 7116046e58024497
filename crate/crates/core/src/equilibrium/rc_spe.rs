//! Voting profiles of the Random Confirmations mechanism that can be
//! extended to a subgame-perfect equilibrium.
//!
//! Every confirmation subgame is solved with the closed-form outcome, and
//! each use is checked against the set-valued backward induction: a subgame
//! with more than one SPE outcome, or one that disagrees with the closed
//! form, aborts the computation.

use std::collections::HashMap;

use super::{Budget, DeviationWitness};
use crate::agent::AgentSet;
use crate::error::{Error, Result};
use crate::model::{lottery_mix, strictly_prefers, Alternative, Lottery, PreferenceProfile, Prob};
use crate::rc::{
    beta_lottery, committee_size, lemma3_outcome, solve_confirmation, vote_winner, RcVariant, StageWinner,
    VoteAction, VotingProfile,
};

/// Checks the closed-form outcome against backward induction on each
/// committee, memoised on the subgame's payoff-relevant data.
#[derive(Default)]
struct SubgameCheck {
    solved: HashMap<(Alternative, Lottery, Vec<Alternative>), Option<Lottery>>,
}

impl SubgameCheck {
    fn expected_outcome(
        &mut self,
        v: &VotingProfile,
        prefs: &PreferenceProfile,
        variant: RcVariant,
    ) -> Result<Lottery> {
        let winner = match vote_winner(v, variant)? {
            StageWinner::Tie => return Ok(Lottery::half()),
            StageWinner::Winner(x) => x,
        };
        let beta = beta_lottery(v, variant)?;
        let size = committee_size(winner, variant, v.n())?;
        let committees = AgentSet::all(v.n()).subsets_of_size(size);
        let weight = Prob::new(1, committees.len() as i128);
        let mut parts = Vec::with_capacity(committees.len());
        for c in committees {
            let closed = lemma3_outcome(v, c, prefs, variant)?;
            let order: Vec<Alternative> = c.iter().map(|a| prefs.preferred(a)).collect();
            let solved = *self
                .solved
                .entry((winner, beta, order))
                .or_insert_with_key(|(w, b, o)| solve_confirmation(*w, *b, o).as_singleton());
            if solved != Some(closed) {
                return Err(Error::InvariantViolation(format!(
                    "confirmation subgame after {v} with committee {c}: backward induction gives {solved:?}, closed form {closed}"
                )));
            }
            parts.push((weight, closed));
        }
        lottery_mix(&parts)
    }
}

/// Expected outcome of every voting profile at a fixed preference profile.
pub struct RcGame {
    prefs: PreferenceProfile,
    variant: RcVariant,
    profiles: Vec<VotingProfile>,
    outcomes: Vec<Lottery>,
}

impl RcGame {
    pub fn new(prefs: &PreferenceProfile, variant: RcVariant, budget: &Budget) -> Result<Self> {
        let n = prefs.n();
        variant.validate(n)?;
        let count = (variant.vote_actions().len() as u128).pow(n as u32);
        if count > budget.rc_profiles as u128 {
            return Err(Error::Capacity(format!(
                "{count} voting profiles at n={n} exceed the budget of {}",
                budget.rc_profiles
            )));
        }
        let profiles = VotingProfile::all(n, variant);
        let mut check = SubgameCheck::default();
        let outcomes = profiles
            .iter()
            .map(|v| check.expected_outcome(v, prefs, variant))
            .collect::<Result<Vec<_>>>()?;
        Ok(RcGame {
            prefs: prefs.clone(),
            variant,
            profiles,
            outcomes,
        })
    }

    pub fn prefs(&self) -> &PreferenceProfile {
        &self.prefs
    }

    pub fn variant(&self) -> RcVariant {
        self.variant
    }

    pub fn profiles(&self) -> &[VotingProfile] {
        &self.profiles
    }

    pub fn outcome(&self, idx: usize) -> Lottery {
        self.outcomes[idx]
    }

    fn index_of(&self, v: &VotingProfile) -> usize {
        let actions = self.variant.vote_actions();
        v.actions().iter().rev().fold(0, |acc, a| {
            acc * actions.len() + actions.iter().position(|x| x == a).expect("valid action")
        })
    }

    /// First profitable voting-stage deviation from profile `idx`.
    pub fn deviation(&self, idx: usize) -> Option<DeviationWitness<VoteAction>> {
        let v = &self.profiles[idx];
        let before = self.outcomes[idx];
        for agent in self.prefs.agents() {
            let from = v.action(agent);
            for &to in self.variant.vote_actions().iter().filter(|&&a| a != from) {
                let after = self.outcomes[self.index_of(&v.with_action(agent, to))];
                if strictly_prefers(self.prefs.preferred(agent), &after, &before) {
                    return Some(DeviationWitness {
                        agent,
                        from,
                        to,
                        before,
                        after,
                    });
                }
            }
        }
        None
    }

    pub fn sustainable(&self) -> Vec<(VotingProfile, Lottery)> {
        (0..self.profiles.len())
            .filter(|&idx| self.deviation(idx).is_none())
            .map(|idx| (self.profiles[idx].clone(), self.outcomes[idx]))
            .collect()
    }
}

/// Voting profiles with no profitable voting-stage deviation, given optimal
/// play in every confirmation subgame, paired with their outcome.
pub fn rc_sustainable_profiles(
    prefs: &PreferenceProfile,
    variant: RcVariant,
    budget: &Budget,
) -> Result<Vec<(VotingProfile, Lottery)>> {
    Ok(RcGame::new(prefs, variant, budget)?.sustainable())
}

/// First profitable voting-stage deviation from `v` (agents in increasing
/// order, actions `a`, `b`, abstain), or `None` if `v` is sustainable.
pub fn rc_voting_deviation(
    v: &VotingProfile,
    prefs: &PreferenceProfile,
    variant: RcVariant,
) -> Result<Option<DeviationWitness<VoteAction>>> {
    if v.n() != prefs.n() {
        return Err(Error::Domain(format!("{} votes but {} preferences", v.n(), prefs.n())));
    }
    let mut check = SubgameCheck::default();
    let before = check.expected_outcome(v, prefs, variant)?;
    for agent in prefs.agents() {
        let from = v.action(agent);
        for &to in variant.vote_actions().iter().filter(|&&a| a != from) {
            let after = check.expected_outcome(&v.with_action(agent, to), prefs, variant)?;
            if strictly_prefers(prefs.preferred(agent), &after, &before) {
                return Ok(Some(DeviationWitness {
                    agent,
                    from,
                    to,
                    before,
                    after,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentId;
    use crate::model::maj_k;

    fn r(s: &str) -> PreferenceProfile {
        s.parse().unwrap()
    }

    #[test]
    fn baseline_sustains_only_majority() {
        let sustained = rc_sustainable_profiles(&r("aaabb"), RcVariant::Baseline, &Budget::DEFAULT).unwrap();
        assert!(!sustained.is_empty());
        assert!(sustained.iter().all(|(_, o)| *o == Lottery::degenerate(Alternative::A)));
    }

    #[test]
    fn unanimous_minority_vote_is_upset() {
        let v = VotingProfile::unanimous(5, Alternative::B);
        let w = rc_voting_deviation(&v, &r("aaabb"), RcVariant::Baseline).unwrap().unwrap();
        assert!([1, 2, 3].contains(&w.agent.number()));
        assert_eq!(w.to, VoteAction::Vote(Alternative::A));
        assert_eq!(w.after, Lottery::from_ratio(1, 50).unwrap());
        assert_eq!(w.agent, AgentId::new(1));
    }

    #[test]
    fn unanimity_supermajority_keeps_status_quo() {
        let variant = RcVariant::Supermajority { k: 3 };
        let prefs = r("abbbb");
        assert_eq!(maj_k(&prefs, 3).unwrap(), Alternative::SQ);
        let sustained = rc_sustainable_profiles(&prefs, variant, &Budget::DEFAULT).unwrap();
        assert!(!sustained.is_empty());
        assert!(sustained.iter().all(|(_, o)| *o == Lottery::degenerate(Alternative::SQ)));
    }

    #[test]
    fn game_deviation_matches_direct_scan() {
        let prefs = r("aabab");
        for variant in [RcVariant::Baseline, RcVariant::Abstention] {
            let game = RcGame::new(&prefs, variant, &Budget::DEFAULT).unwrap();
            for (idx, v) in game.profiles().iter().enumerate() {
                assert_eq!(game.deviation(idx), rc_voting_deviation(v, &prefs, variant).unwrap());
            }
        }
    }

    #[test]
    fn budget_guard() {
        let prefs = PreferenceProfile::from_index(11, 0);
        assert!(matches!(
            RcGame::new(&prefs, RcVariant::Baseline, &Budget::DEFAULT),
            Err(Error::Capacity(_))
        ));
    }
}
