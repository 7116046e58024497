//! Majority voting with Random Confirmations.
//!
//! A voting stage picks a stage winner; then a uniformly drawn, ordered
//! committee is asked in turn to confirm it. The first `Y` elects the stage
//! winner; if everybody answers `N` the outcome is the vote-share lottery.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;


use crate::agent::{AgentId, AgentSet, MAX_AGENTS};
use crate::error::{Error, Result};
use crate::model::{lottery_mix, sd_compare, Alternative, Lottery, PreferenceProfile, Prob, SdComparison};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RcVariant {
    Baseline,
    Abstention,
    /// Supermajority rule with threshold `p + k` for the policy `X`.
    Supermajority { k: usize },
    EvenN,
}

impl RcVariant {
    /// Checks that the variant is defined for a population of size `n`.
    pub fn validate(self, n: usize) -> Result<()> {
        if !(2..=MAX_AGENTS).contains(&n) {
            return Err(Error::Domain(format!("population size {n} outside 2..={MAX_AGENTS}")));
        }
        let odd = n % 2 == 1;
        match self {
            RcVariant::EvenN if odd => Err(Error::Parity(format!("even-n variant needs even n, got {n}"))),
            RcVariant::EvenN => Ok(()),
            _ if !odd => Err(Error::Parity(format!("{self} needs odd n, got {n}"))),
            RcVariant::Supermajority { k } if k < 1 || k > n / 2 + 1 => Err(Error::Domain(format!(
                "supermajority k={k} outside 1..={}",
                n / 2 + 1
            ))),
            _ => Ok(()),
        }
    }

    pub fn allows_abstention(self) -> bool {
        self == RcVariant::Abstention
    }

    /// Voting-stage actions available to every agent.
    pub fn vote_actions(self) -> &'static [VoteAction] {
        const TWO: [VoteAction; 2] = [VoteAction::Vote(Alternative::A), VoteAction::Vote(Alternative::B)];
        const THREE: [VoteAction; 3] = [
            VoteAction::Vote(Alternative::A),
            VoteAction::Vote(Alternative::B),
            VoteAction::Abstain,
        ];
        if self.allows_abstention() {
            &THREE
        } else {
            &TWO
        }
    }
}

impl fmt::Display for RcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RcVariant::Baseline => write!(f, "baseline"),
            RcVariant::Abstention => write!(f, "abstention"),
            RcVariant::Supermajority { k } => write!(f, "supermajority(k={k})"),
            RcVariant::EvenN => write!(f, "even"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VoteAction {
    Vote(Alternative),
    Abstain,
}

impl VoteAction {
    pub fn as_char(self) -> char {
        match self {
            VoteAction::Vote(x) => x.as_char(),
            VoteAction::Abstain => '-',
        }
    }
}

impl fmt::Display for VoteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoteAction::Vote(x) => write!(f, "{x}"),
            VoteAction::Abstain => write!(f, "abs"),
        }
    }
}

/// Voting-stage actions of all agents. Written as a string over `a`, `b`
/// and `-` (abstain).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VotingProfile {
    votes: Vec<VoteAction>,
}

impl VotingProfile {
    pub fn new(votes: Vec<VoteAction>) -> Self {
        VotingProfile { votes }
    }

    pub fn from_alternatives(votes: &[Alternative]) -> Self {
        VotingProfile {
            votes: votes.iter().map(|&x| VoteAction::Vote(x)).collect(),
        }
    }

    pub fn unanimous(n: usize, x: Alternative) -> Self {
        VotingProfile {
            votes: vec![VoteAction::Vote(x); n],
        }
    }

    /// Every voting profile of the variant, in a fixed order.
    pub fn all(n: usize, variant: RcVariant) -> Vec<VotingProfile> {
        let actions = variant.vote_actions();
        let base = actions.len();
        let total = base.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let votes = (0..n)
                    .map(|_| {
                        let a = actions[idx % base];
                        idx /= base;
                        a
                    })
                    .collect();
                VotingProfile { votes }
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.votes.len()
    }

    pub fn action(&self, agent: AgentId) -> VoteAction {
        self.votes[agent.index()]
    }

    pub fn actions(&self) -> &[VoteAction] {
        &self.votes
    }

    pub fn count(&self, x: Alternative) -> usize {
        self.votes.iter().filter(|&&v| v == VoteAction::Vote(x)).count()
    }

    pub fn participants(&self) -> usize {
        self.votes.iter().filter(|&&v| v != VoteAction::Abstain).count()
    }

    pub fn is_unanimous(&self) -> bool {
        Alternative::BOTH.iter().any(|&x| self.count(x) == self.n())
    }

    pub fn with_action(&self, agent: AgentId, action: VoteAction) -> Self {
        let mut votes = self.votes.clone();
        votes[agent.index()] = action;
        VotingProfile { votes }
    }

    pub fn validate(&self, variant: RcVariant) -> Result<()> {
        variant.validate(self.n())?;
        if !variant.allows_abstention() {
            if let Some(i) = self.votes.iter().position(|&v| v == VoteAction::Abstain) {
                return Err(Error::Validation {
                    agent: i + 1,
                    reason: format!("abstention is not available in the {variant} variant"),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for VotingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.votes {
            write!(f, "{}", v.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for VotingProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let votes = s
            .trim()
            .chars()
            .filter(|c| *c != ',')
            .enumerate()
            .map(|(i, c)| match c {
                '-' | '_' | '0' => Ok(VoteAction::Abstain),
                c => Alternative::from_char(c)
                    .map(VoteAction::Vote)
                    .ok_or_else(|| Error::Validation {
                        agent: i + 1,
                        reason: format!("vote '{c}' is not a, b or -"),
                    }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VotingProfile { votes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageWinner {
    Winner(Alternative),
    Tie,
}

/// Winner of the voting stage. For the supermajority variant the policy `X`
/// wins only with at least `p + k` votes.
pub fn vote_winner(v: &VotingProfile, variant: RcVariant) -> Result<StageWinner> {
    v.validate(variant)?;
    let (na, nb) = (v.count(Alternative::A), v.count(Alternative::B));
    let winner = match variant {
        RcVariant::Supermajority { k } => {
            if nb >= v.n() / 2 + k {
                StageWinner::Winner(Alternative::X)
            } else {
                StageWinner::Winner(Alternative::SQ)
            }
        }
        _ if na > nb => StageWinner::Winner(Alternative::A),
        _ if nb > na => StageWinner::Winner(Alternative::B),
        _ => StageWinner::Tie,
    };
    if winner == StageWinner::Tie && matches!(variant, RcVariant::Baseline) {
        return Err(Error::InvariantViolation(format!("tie in baseline profile {v}")));
    }
    Ok(winner)
}

/// Vote-share lottery used when the whole committee rejects the stage winner.
pub fn beta_lottery(v: &VotingProfile, variant: RcVariant) -> Result<Lottery> {
    v.validate(variant)?;
    let na = v.count(Alternative::A) as i128;
    let den = if variant.allows_abstention() {
        v.participants() as i128
    } else {
        v.n() as i128
    };
    if den == 0 {
        return Err(Error::Precondition(
            "vote-share lottery undefined when every agent abstains".into(),
        ));
    }
    Lottery::from_ratio(na, den)
}

/// Committee size for the supermajority variant: `p + k` when the status quo
/// wins the voting stage, `p + 2 - k` when the policy does.
pub fn t_bar(winner: Alternative, variant: RcVariant, n: usize) -> Result<usize> {
    let RcVariant::Supermajority { k } = variant else {
        return Err(Error::Domain(format!("t_bar is only defined for the supermajority variant, got {variant}")));
    };
    variant.validate(n)?;
    let p = n / 2;
    Ok(if winner == Alternative::SQ { p + k } else { p + 2 - k })
}

/// Size of the confirmation committee after `winner` takes the voting stage.
pub fn committee_size(winner: Alternative, variant: RcVariant, n: usize) -> Result<usize> {
    match variant {
        RcVariant::Supermajority { .. } => t_bar(winner, variant, n),
        _ => {
            variant.validate(n)?;
            Ok(n / 2 + 1)
        }
    }
}

/// Ordered confirmation committee.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfirmationDraw {
    order: Vec<AgentId>,
}

impl ConfirmationDraw {
    pub fn new(order: Vec<AgentId>) -> Result<Self> {
        let set: AgentSet = order.iter().copied().collect();
        if set.len() != order.len() {
            return Err(Error::Domain("confirmation order repeats an agent".into()));
        }
        Ok(ConfirmationDraw { order })
    }

    pub fn from_numbers(numbers: &[usize]) -> Result<Self> {
        ConfirmationDraw::new(numbers.iter().map(|&k| AgentId::new(k)).collect())
    }

    /// Members in increasing order.
    pub fn sorted(committee: AgentSet) -> Self {
        ConfirmationDraw {
            order: committee.iter().collect(),
        }
    }

    pub fn order(&self) -> &[AgentId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn members(&self) -> AgentSet {
        self.order.iter().copied().collect()
    }
}

impl fmt::Display for ConfirmationDraw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.order.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", list.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfirmationAction {
    Yes,
    No,
    /// Only available with abstention; treated exactly like `No`.
    Abstain,
}

impl ConfirmationAction {
    pub fn canonical(self) -> Self {
        match self {
            ConfirmationAction::Abstain => ConfirmationAction::No,
            a => a,
        }
    }
}

impl fmt::Display for ConfirmationAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfirmationAction::Yes => write!(f, "Y"),
            ConfirmationAction::No => write!(f, "N"),
            ConfirmationAction::Abstain => write!(f, "Abs"),
        }
    }
}

/// Set of subgame-perfect outcomes of a subgame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSet(BTreeSet<Lottery>);

impl OutcomeSet {
    pub fn singleton(l: Lottery) -> Self {
        OutcomeSet(BTreeSet::from([l]))
    }

    pub fn as_singleton(&self) -> Option<Lottery> {
        if self.0.len() == 1 {
            self.0.iter().next().copied()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Lottery> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Set-valued backward induction over a confirmation sequence. `prefs` lists
/// the preferred alternative of each committee member in speaking order.
pub(crate) fn solve_confirmation(winner: Alternative, beta: Lottery, prefs: &[Alternative]) -> OutcomeSet {
    let confirm = Lottery::degenerate(winner);
    let mut continuation = BTreeSet::from([beta]);
    for &pref in prefs.iter().rev() {
        let mut here = BTreeSet::new();
        for reject in &continuation {
            match sd_compare(pref, &confirm, reject) {
                SdComparison::FirstStrictlyPreferred => {
                    here.insert(confirm);
                }
                SdComparison::SecondStrictlyPreferred => {
                    here.insert(*reject);
                }
                SdComparison::Indifferent => {
                    here.insert(confirm);
                    here.insert(*reject);
                }
            }
        }
        continuation = here;
    }
    OutcomeSet(continuation)
}

/// Subgame-perfect outcomes of the confirmation stage that follows `v` with
/// the committee speaking in the order of `draw`.
pub fn confirmation_spe(
    v: &VotingProfile,
    draw: &ConfirmationDraw,
    prefs: &PreferenceProfile,
    variant: RcVariant,
) -> Result<OutcomeSet> {
    check_population(v, prefs)?;
    let StageWinner::Winner(winner) = vote_winner(v, variant)? else {
        return Err(Error::Precondition(format!(
            "voting profile {v} is tied; the game ends before confirmation"
        )));
    };
    let size = committee_size(winner, variant, v.n())?;
    if draw.len() != size {
        return Err(Error::Domain(format!(
            "committee of {} agents, the {variant} variant needs {size}",
            draw.len()
        )));
    }
    if draw.order().iter().any(|a| a.index() >= v.n()) {
        return Err(Error::Domain(format!("committee {draw} names an agent outside 1..={}", v.n())));
    }
    let beta = beta_lottery(v, variant)?;
    let order_prefs: Vec<Alternative> = draw.order().iter().map(|&a| prefs.preferred(a)).collect();
    Ok(solve_confirmation(winner, beta, &order_prefs))
}

/// Closed-form confirmation outcome: the stage winner if some committee
/// member prefers it, the vote-share lottery otherwise, an even lottery on a
/// tie.
pub fn lemma3_outcome(
    v: &VotingProfile,
    committee: AgentSet,
    prefs: &PreferenceProfile,
    variant: RcVariant,
) -> Result<Lottery> {
    check_population(v, prefs)?;
    let winner = match vote_winner(v, variant)? {
        StageWinner::Tie => return Ok(Lottery::half()),
        StageWinner::Winner(x) => x,
    };
    let size = committee_size(winner, variant, v.n())?;
    if committee.len() != size || !committee.is_subset(AgentSet::all(v.n())) {
        return Err(Error::Domain(format!(
            "committee {committee} does not have the required {size} members"
        )));
    }
    if committee.iter().any(|i| prefs.prefers(i, winner)) {
        Ok(Lottery::degenerate(winner))
    } else {
        beta_lottery(v, variant)
    }
}

/// Expected outcome of the whole game after the voting stage, averaging the
/// confirmation outcome uniformly over all committees.
pub fn expected_outcome(v: &VotingProfile, prefs: &PreferenceProfile, variant: RcVariant) -> Result<Lottery> {
    check_population(v, prefs)?;
    let winner = match vote_winner(v, variant)? {
        StageWinner::Tie => return Ok(Lottery::half()),
        StageWinner::Winner(x) => x,
    };
    let size = committee_size(winner, variant, v.n())?;
    let committees = AgentSet::all(v.n()).subsets_of_size(size);
    let weight = Prob::new(1, committees.len() as i128);
    let parts = committees
        .into_iter()
        .map(|c| Ok((weight, lemma3_outcome(v, c, prefs, variant)?)))
        .collect::<Result<Vec<_>>>()?;
    lottery_mix(&parts)
}

fn check_population(v: &VotingProfile, prefs: &PreferenceProfile) -> Result<()> {
    if v.n() != prefs.n() {
        return Err(Error::Domain(format!(
            "{} votes but {} preferences",
            v.n(),
            prefs.n()
        )));
    }
    Ok(())
}
