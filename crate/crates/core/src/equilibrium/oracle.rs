//! Subgame-perfect equilibrium outcomes of the baseline Random Confirmations
//! game at `n = 3`, from pure strategy profiles over the whole game tree.
//!
//! A strategy profile fixes a vote for every agent and a reply at every
//! confirmation node `(v, order, position)`. Confirmation subgames that
//! follow different `(v, order)` never interact, so the set of SPE is the
//! product of each subgame's SPE set together with voting profiles that are
//! Nash given the selected continuations. Each subgame is solved by listing
//! all of its reply profiles and keeping those with no profitable one-shot
//! deviation at any node, reached or not. Orders are averaged one by one;
//! committees are never grouped into sets.

use std::collections::BTreeSet;

use crate::agent::AgentId;
use crate::error::{Error, Result};
use crate::model::{sd_compare, Alternative, Lottery, PreferenceProfile, Prob, SdComparison};
use crate::rc::{beta_lottery, vote_winner, RcVariant, StageWinner, VoteAction, VotingProfile};

/// Every ordered committee of `size` agents out of `n`.
fn ordered_committees(n: usize, size: usize) -> Vec<Vec<AgentId>> {
    fn extend(n: usize, size: usize, prefix: &mut Vec<AgentId>, out: &mut Vec<Vec<AgentId>>) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            let a = AgentId::from_index(i);
            if !prefix.contains(&a) {
                prefix.push(a);
                extend(n, size, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, size, &mut Vec::new(), &mut out);
    out
}

/// SPE outcomes of one confirmation subgame, by enumerating every reply
/// profile `replies` (bit `k` set = `Y` at the `k`-th node).
fn subgame_spe(winner: Alternative, beta: Lottery, speakers: &[Alternative]) -> BTreeSet<Lottery> {
    let t = speakers.len();
    let confirm = Lottery::degenerate(winner);
    let mut found = BTreeSet::new();
    for replies in 0u32..1 << t {
        // value[k]: outcome once node k is reached
        let mut value = vec![beta; t + 1];
        for k in (0..t).rev() {
            value[k] = if replies >> k & 1 == 1 { confirm } else { value[k + 1] };
        }
        let no_profitable_deviation = (0..t).all(|k| {
            let (chosen, other) = if replies >> k & 1 == 1 {
                (confirm, value[k + 1])
            } else {
                (value[k + 1], confirm)
            };
            sd_compare(speakers[k], &chosen, &other) != SdComparison::SecondStrictlyPreferred
        });
        if no_profitable_deviation {
            found.insert(value[0]);
        }
    }
    found
}

/// Expected outcomes achievable after `v` by selecting one SPE in each
/// ordered confirmation subgame.
fn continuation_outcomes(v: &VotingProfile, prefs: &PreferenceProfile) -> Result<BTreeSet<Lottery>> {
    let StageWinner::Winner(winner) = vote_winner(v, RcVariant::Baseline)? else {
        return Err(Error::InvariantViolation(format!("baseline tie at {v}")));
    };
    let beta = beta_lottery(v, RcVariant::Baseline)?;
    let orders = ordered_committees(v.n(), v.n() / 2 + 1);
    let weight = Prob::new(1, orders.len() as i128);
    let mut sums: BTreeSet<Prob> = BTreeSet::from([Prob::from_integer(0)]);
    for order in orders {
        let speakers: Vec<Alternative> = order.iter().map(|&a| prefs.preferred(a)).collect();
        let local = subgame_spe(winner, beta, &speakers);
        sums = sums
            .iter()
            .flat_map(|s| local.iter().map(move |l| *s + weight * l.pa()))
            .collect();
    }
    sums.into_iter().map(Lottery::new).collect()
}

/// Exact set of pure-strategy SPE outcomes of the baseline game at `n = 3`.
pub fn spe_oracle_n3(prefs: &PreferenceProfile, variant: RcVariant) -> Result<BTreeSet<Lottery>> {
    if prefs.n() != 3 {
        return Err(Error::Capacity(format!(
            "the full strategy-space oracle only runs at n = 3, got n = {}",
            prefs.n()
        )));
    }
    if variant != RcVariant::Baseline {
        return Err(Error::Domain(format!(
            "the full strategy-space oracle covers the baseline variant only, got {variant}"
        )));
    }
    let profiles = VotingProfile::all(3, RcVariant::Baseline);
    let continuations = profiles
        .iter()
        .map(|v| continuation_outcomes(v, prefs))
        .collect::<Result<Vec<_>>>()?;
    let lookup = |v: &VotingProfile| -> &BTreeSet<Lottery> {
        let idx = profiles.iter().position(|w| w == v).expect("enumerated profile");
        &continuations[idx]
    };

    let mut outcomes = BTreeSet::new();
    for (v, here) in profiles.iter().zip(&continuations) {
        for candidate in here {
            // Deviations lead to distinct profiles, so each can be punished
            // by its own continuation choice.
            let stable = prefs.agents().all(|agent| {
                let VoteAction::Vote(current) = v.action(agent) else {
                    unreachable!("baseline profiles have no abstention")
                };
                let deviated = v.with_action(agent, VoteAction::Vote(current.other()));
                lookup(&deviated).iter().any(|after| {
                    sd_compare(prefs.preferred(agent), after, candidate) != SdComparison::FirstStrictlyPreferred
                })
            });
            if stable {
                outcomes.insert(*candidate);
            }
        }
    }
    Ok(outcomes)
}
