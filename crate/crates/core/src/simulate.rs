//! Forward play of the Random Confirmations mechanism with a seeded draw.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agent::AgentId;
use crate::error::{Error, Result};
use crate::model::{Alternative, Lottery, PreferenceProfile};
use crate::rc::{
    beta_lottery, committee_size, vote_winner, ConfirmationAction, ConfirmationDraw, RcVariant, StageWinner,
    VotingProfile,
};

/// What a committee member sees when asked to confirm.
#[derive(Debug, Clone, Copy)]
pub struct ConfirmationContext<'a> {
    pub votes: &'a VotingProfile,
    pub winner: Alternative,
    pub draw: &'a ConfirmationDraw,
    /// Zero-based position of the speaker; everyone before answered `N`.
    pub position: usize,
}

impl ConfirmationContext<'_> {
    fn describe(&self) -> String {
        format!(
            "votes={} order={} stage={} after {} N",
            self.votes,
            self.draw,
            self.position + 2,
            self.position
        )
    }
}

pub trait ConfirmationStrategy {
    /// Reply of `agent`, or `None` where the strategy is undefined.
    fn reply(&self, agent: AgentId, ctx: &ConfirmationContext<'_>) -> Option<ConfirmationAction>;
}

/// Confirmation strategies used by the examples and the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfirmationPlan {
    /// `Y` exactly when the stage winner is the speaker's preferred option.
    Truthful(PreferenceProfile),
    /// Every agent gives the same reply everywhere.
    Always(ConfirmationAction),
    /// Per-agent constant replies; agents not listed are undefined.
    PerAgent(BTreeMap<AgentId, ConfirmationAction>),
}

impl ConfirmationStrategy for ConfirmationPlan {
    fn reply(&self, agent: AgentId, ctx: &ConfirmationContext<'_>) -> Option<ConfirmationAction> {
        match self {
            ConfirmationPlan::Truthful(prefs) => Some(if prefs.prefers(agent, ctx.winner) {
                ConfirmationAction::Yes
            } else {
                ConfirmationAction::No
            }),
            ConfirmationPlan::Always(a) => Some(*a),
            ConfirmationPlan::PerAgent(map) => map.get(&agent).copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub stage: usize,
    pub agent: AgentId,
    pub action: String,
}

/// Stage-by-stage record of one play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    pub draw: Option<ConfirmationDraw>,
    pub outcome: Lottery,
}

impl Transcript {
    /// Number of distinct stages played, voting stage included.
    pub fn stages(&self) -> usize {
        self.entries.last().map_or(0, |e| e.stage)
    }

    /// Entries that are actual votes or replies, abstentions excluded.
    pub fn votes_cast(&self) -> usize {
        self.entries.iter().filter(|e| e.action != "abs").count()
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "stage {}: agent {} -> {}", e.stage, e.agent, e.action)?;
        }
        writeln!(
            f,
            "outcome: pA={}/{}",
            self.outcome.pa().numer(),
            self.outcome.pa().denom()
        )
    }
}

/// Uniformly drawn ordered committee of `size` agents out of `n`.
///
/// The stream is ChaCha8 keyed by `seed`; `stream` selects an independent
/// substream so that many games can share one seed.
pub fn draw_committee(n: usize, size: usize, seed: u64, stream: u64) -> ConfirmationDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut agents: Vec<AgentId> = (0..n).map(AgentId::from_index).collect();
    let (chosen, _) = agents.partial_shuffle(&mut rng, size);
    ConfirmationDraw::new(chosen.to_vec()).expect("partial shuffle yields distinct agents")
}

/// Plays one game: the committee is drawn from `seed` (substream 0).
pub fn play_rc(
    votes: &VotingProfile,
    confirmation: &dyn ConfirmationStrategy,
    variant: RcVariant,
    seed: u64,
) -> Result<Transcript> {
    match vote_winner(votes, variant)? {
        StageWinner::Tie => play_with_draw(votes, confirmation, variant, None),
        StageWinner::Winner(w) => {
            let size = committee_size(w, variant, votes.n())?;
            let draw = draw_committee(votes.n(), size, seed, 0);
            play_with_draw(votes, confirmation, variant, Some(draw))
        }
    }
}

/// Plays one game with a given committee order.
pub fn play_with_draw(
    votes: &VotingProfile,
    confirmation: &dyn ConfirmationStrategy,
    variant: RcVariant,
    draw: Option<ConfirmationDraw>,
) -> Result<Transcript> {
    let mut entries: Vec<TranscriptEntry> = votes
        .actions()
        .iter()
        .enumerate()
        .map(|(i, a)| TranscriptEntry {
            stage: 1,
            agent: AgentId::from_index(i),
            action: a.to_string(),
        })
        .collect();

    let winner = match vote_winner(votes, variant)? {
        StageWinner::Tie => {
            return Ok(Transcript {
                entries,
                draw: None,
                outcome: Lottery::half(),
            })
        }
        StageWinner::Winner(w) => w,
    };
    let draw = draw.ok_or_else(|| Error::Precondition("a committee draw is needed after a stage winner".into()))?;
    let size = committee_size(winner, variant, votes.n())?;
    if draw.len() != size || draw.order().iter().any(|a| a.index() >= votes.n()) {
        return Err(Error::Domain(format!(
            "committee {draw} does not fit the {variant} variant (size {size})"
        )));
    }

    let mut outcome = None;
    for (position, &agent) in draw.order().iter().enumerate() {
        let ctx = ConfirmationContext {
            votes,
            winner,
            draw: &draw,
            position,
        };
        let reply = confirmation.reply(agent, &ctx).ok_or_else(|| Error::Simulation {
            history: format!("{} (agent {agent})", ctx.describe()),
        })?;
        if reply == ConfirmationAction::Abstain && !variant.allows_abstention() {
            return Err(Error::Validation {
                agent: agent.number(),
                reason: format!("confirmation abstention is not available in the {variant} variant"),
            });
        }
        let reply = reply.canonical();
        entries.push(TranscriptEntry {
            stage: position + 2,
            agent,
            action: reply.to_string(),
        });
        if reply == ConfirmationAction::Yes {
            outcome = Some(Lottery::degenerate(winner));
            break;
        }
    }
    let outcome = match outcome {
        Some(o) => o,
        None => beta_lottery(votes, variant)?,
    };
    Ok(Transcript {
        entries,
        draw: Some(draw),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_valid() {
        for seed in 0..50 {
            let a = draw_committee(7, 4, seed, 0);
            assert_eq!(a, draw_committee(7, 4, seed, 0));
            assert_eq!(a.members().len(), 4);
        }
        assert_ne!(
            (0..20).map(|s| draw_committee(9, 5, s, 0)).collect::<Vec<_>>(),
            (0..20).map(|s| draw_committee(9, 5, s, 1)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn truthful_play_elects_majority() {
        let prefs: PreferenceProfile = "aaabb".parse().unwrap();
        let votes = VotingProfile::from_alternatives(prefs.as_slice());
        let plan = ConfirmationPlan::Truthful(prefs);
        for seed in 0..30 {
            let t = play_rc(&votes, &plan, RcVariant::Baseline, seed).unwrap();
            assert_eq!(t.outcome, Lottery::degenerate(Alternative::A));
            assert!(t.stages() <= 1 + 3);
        }
    }

    #[test]
    fn undefined_strategy_names_history() {
        let votes: VotingProfile = "abbbb".parse().unwrap();
        let plan = ConfirmationPlan::PerAgent(BTreeMap::from([(AgentId::new(1), ConfirmationAction::No)]));
        let draw = ConfirmationDraw::from_numbers(&[1, 2, 3]).unwrap();
        let err = play_with_draw(&votes, &plan, RcVariant::Baseline, Some(draw)).unwrap_err();
        match err {
            Error::Simulation { history } => {
                assert!(history.contains("votes=abbbb"), "{history}");
                assert!(history.contains("agent 2"), "{history}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn transcript_format() {
        let prefs: PreferenceProfile = "aaabb".parse().unwrap();
        let votes: VotingProfile = "abbbb".parse().unwrap();
        let draw = ConfirmationDraw::from_numbers(&[1, 2, 3]).unwrap();
        let t = play_with_draw(&votes, &ConfirmationPlan::Truthful(prefs), RcVariant::Baseline, Some(draw)).unwrap();
        let text = t.to_string();
        assert!(text.starts_with("stage 1: agent 1 -> a\nstage 1: agent 2 -> b\n"));
        assert!(text.contains("stage 2: agent 1 -> N\nstage 3: agent 2 -> N\nstage 4: agent 3 -> N\n"));
        assert!(text.ends_with("outcome: pA=1/5\n"));
    }
}
