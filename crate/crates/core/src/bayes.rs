//! Random Confirmations when preferences are private.
//!
//! Every other agent prefers `a` independently with probability `q`. The
//! committee order is public once drawn; what agents learn about the vote is
//! either the full profile or only the number of votes for each option. The
//! confirmation stage outcome follows the incomplete-information version of
//! the confirmation lemma: the stage winner is elected when some committee
//! member truly prefers it (or the vote was unanimous), otherwise the
//! vote-share lottery. That continuation is the same under both disclosure
//! modes, so payoffs at the voting stage do not depend on the mode.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::agent::{AgentId, AgentSet};
use crate::error::{Error, Result};
use crate::model::{sd_compare, strictly_prefers, Alternative, Lottery, PreferenceProfile, Prob, SdComparison};
use crate::rc::{expected_outcome, ConfirmationAction, ConfirmationDraw, RcVariant, VoteAction, VotingProfile};

/// Independent prior over the other agents' types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeliefModel {
    qa: Prob,
}

impl BeliefModel {
    /// Largest accepted denominator of `q`; keeps every exact sum within
    /// `i128` up to `n = 7`.
    pub const MAX_DENOMINATOR: i128 = 1000;

    pub fn new(qa: Prob) -> Result<Self> {
        if qa <= Prob::zero() || qa >= Prob::one() {
            return Err(Error::Domain(format!(
                "belief q = {qa} must lie strictly between 0 and 1"
            )));
        }
        if *qa.denom() > Self::MAX_DENOMINATOR {
            return Err(Error::Capacity(format!(
                "belief q = {qa} has a denominator above {}",
                Self::MAX_DENOMINATOR
            )));
        }
        Ok(BeliefModel { qa })
    }

    pub fn from_ratio(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        BeliefModel::new(Prob::new(num, den))
    }

    pub fn qa(&self) -> Prob {
        self.qa
    }

    pub fn prob(&self, t: Alternative) -> Prob {
        match t {
            Alternative::A => self.qa,
            Alternative::B => Prob::one() - self.qa,
        }
    }

    /// The same belief with the labels of the alternatives swapped.
    pub fn swapped(&self) -> Self {
        BeliefModel {
            qa: Prob::one() - self.qa,
        }
    }
}

impl fmt::Display for BeliefModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}", self.qa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DisclosureMode {
    FullProfile,
    SharesOnly,
}

impl DisclosureMode {
    pub const BOTH: [DisclosureMode; 2] = [DisclosureMode::FullProfile, DisclosureMode::SharesOnly];
}

impl fmt::Display for DisclosureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisclosureMode::FullProfile => write!(f, "full"),
            DisclosureMode::SharesOnly => write!(f, "shares"),
        }
    }
}

/// Vote as a function of the agent's own type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VotingRule {
    Truthful,
    Inverted,
    Always(Alternative),
}

impl VotingRule {
    pub const ALL: [VotingRule; 4] = [
        VotingRule::Truthful,
        VotingRule::Inverted,
        VotingRule::Always(Alternative::A),
        VotingRule::Always(Alternative::B),
    ];

    pub fn vote(self, own_type: Alternative) -> Alternative {
        match self {
            VotingRule::Truthful => own_type,
            VotingRule::Inverted => own_type.other(),
            VotingRule::Always(x) => x,
        }
    }

    /// Whether the vote reveals the type.
    pub fn is_revealing(self) -> bool {
        matches!(self, VotingRule::Truthful | VotingRule::Inverted)
    }
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VotingRule::Truthful => write!(f, "truthful"),
            VotingRule::Inverted => write!(f, "inverted"),
            VotingRule::Always(x) => write!(f, "always-{x}"),
        }
    }
}

/// Confirmation reply as a function of the agent's own type and the stage
/// winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfirmationRule {
    /// `Y` exactly when the stage winner is the agent's type.
    Truthful,
    AlwaysYes,
    AlwaysNo,
}

impl ConfirmationRule {
    pub fn reply(self, own_type: Alternative, winner: Alternative) -> ConfirmationAction {
        match self {
            ConfirmationRule::Truthful if own_type == winner => ConfirmationAction::Yes,
            ConfirmationRule::Truthful => ConfirmationAction::No,
            ConfirmationRule::AlwaysYes => ConfirmationAction::Yes,
            ConfirmationRule::AlwaysNo => ConfirmationAction::No,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypeStrategy {
    pub voting: VotingRule,
    pub confirmation: ConfirmationRule,
}

impl TypeStrategy {
    pub const TRUTHFUL: TypeStrategy = TypeStrategy {
        voting: VotingRule::Truthful,
        confirmation: ConfirmationRule::Truthful,
    };
}

/// What a committee member knows about the voting stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disclosure {
    Profile(VotingProfile),
    /// Number of votes for `a`, plus the agent's own vote.
    Shares { a_votes: usize, own_vote: Alternative },
}

impl Disclosure {
    pub fn mode(&self) -> DisclosureMode {
        match self {
            Disclosure::Profile(_) => DisclosureMode::FullProfile,
            Disclosure::Shares { .. } => DisclosureMode::SharesOnly,
        }
    }

    /// What `agent` learns from `votes` under `mode`.
    pub fn of(votes: &VotingProfile, agent: AgentId, mode: DisclosureMode) -> Result<Self> {
        Ok(match mode {
            DisclosureMode::FullProfile => Disclosure::Profile(votes.clone()),
            DisclosureMode::SharesOnly => Disclosure::Shares {
                a_votes: votes.count(Alternative::A),
                own_vote: vote_of(votes, agent)?,
            },
        })
    }

    fn a_votes(&self) -> usize {
        match self {
            Disclosure::Profile(v) => v.count(Alternative::A),
            Disclosure::Shares { a_votes, .. } => *a_votes,
        }
    }
}

fn vote_of(votes: &VotingProfile, agent: AgentId) -> Result<Alternative> {
    match votes.action(agent) {
        VoteAction::Vote(x) => Ok(x),
        VoteAction::Abstain => Err(Error::Domain(format!(
            "agent {agent} abstained; private-information play has no abstention"
        ))),
    }
}

fn check_odd(n: usize) -> Result<()> {
    RcVariant::Baseline.validate(n)
}

/// Every assignment of types to the agents other than `agent`, with its
/// prior weight. Types of `agent` itself are set to `own_type`.
fn realizations(
    n: usize,
    agent: AgentId,
    own_type: Alternative,
    beliefs: &BeliefModel,
) -> impl Iterator<Item = (Vec<Alternative>, Prob)> + '_ {
    let others: Vec<usize> = (0..n).filter(|&j| j != agent.index()).collect();
    (0u64..1 << (n - 1)).map(move |bits| {
        let mut types = vec![own_type; n];
        let mut w = Prob::one();
        for (k, &j) in others.iter().enumerate() {
            let t = if bits >> k & 1 == 1 { Alternative::B } else { Alternative::A };
            types[j] = t;
            w *= beliefs.prob(t);
        }
        (types, w)
    })
}

/// Expected outcome for `agent` of type `own_type` casting `vote` when the
/// others follow `strategies` (the entry of `agent` is ignored).
pub fn expected_vote_payoff(
    agent: AgentId,
    own_type: Alternative,
    vote: Alternative,
    strategies: &[TypeStrategy],
    beliefs: &BeliefModel,
) -> Result<Lottery> {
    let n = strategies.len();
    check_odd(n)?;
    let mut total = Prob::zero();
    for (types, w) in realizations(n, agent, own_type, beliefs) {
        let votes: Vec<Alternative> = (0..n)
            .map(|j| {
                if j == agent.index() {
                    vote
                } else {
                    strategies[j].voting.vote(types[j])
                }
            })
            .collect();
        let prefs = PreferenceProfile::new(types)?;
        let o = expected_outcome(&VotingProfile::from_alternatives(&votes), &prefs, RcVariant::Baseline)?;
        total += w * o.pa();
    }
    Lottery::new(total)
}

/// Replies of `agent` at a confirmation node that are best responses under
/// Bayesian beliefs about the other types.
///
/// The node is given by the disclosure, the public committee order and the
/// speaker's `position` in it; every predecessor has answered `N`. Beliefs
/// condition on the disclosed votes and on those `N` replies; a node that
/// has zero probability under `strategies` is rejected.
pub fn confirmation_best_response_beliefs(
    agent: AgentId,
    own_type: Alternative,
    disclosed: &Disclosure,
    draw: &ConfirmationDraw,
    position: usize,
    strategies: &[TypeStrategy],
    beliefs: &BeliefModel,
) -> Result<BTreeSet<ConfirmationAction>> {
    let n = strategies.len();
    check_odd(n)?;
    let p = n / 2;
    if draw.order().get(position) != Some(&agent) {
        return Err(Error::Precondition(format!(
            "agent {agent} is not at position {} of {draw}",
            position + 1
        )));
    }
    if draw.len() != p + 1 || draw.order().iter().any(|a| a.index() >= n) {
        return Err(Error::Domain(format!("committee {draw} does not fit n = {n}")));
    }
    let own_vote = match disclosed {
        Disclosure::Profile(v) => {
            if v.n() != n {
                return Err(Error::Domain(format!("{} votes for {n} agents", v.n())));
            }
            for j in (0..n).map(AgentId::from_index) {
                vote_of(v, j)?;
            }
            vote_of(v, agent)?
        }
        Disclosure::Shares { a_votes, own_vote } => {
            let own_a = usize::from(*own_vote == Alternative::A);
            if *a_votes < own_a || *a_votes > n - 1 + own_a {
                return Err(Error::Domain(format!(
                    "{a_votes} votes for a do not fit n = {n} and own vote {own_vote}"
                )));
            }
            *own_vote
        }
    };
    let a_votes = disclosed.a_votes();
    let winner = if a_votes > n - a_votes { Alternative::A } else { Alternative::B };
    let beta = Lottery::new(Prob::new(a_votes as i128, n as i128))?;
    let confirm = Lottery::degenerate(winner);
    let predecessors = &draw.order()[..position];
    let successors = &draw.order()[position + 1..];

    let mut mass = Prob::zero();
    let mut pa_if_no = Prob::zero();
    for (types, w) in realizations(n, agent, own_type, beliefs) {
        let votes_fit = match disclosed {
            Disclosure::Profile(v) => (0..n)
                .filter(|&j| j != agent.index())
                .all(|j| v.actions()[j] == VoteAction::Vote(strategies[j].voting.vote(types[j]))),
            Disclosure::Shares { .. } => {
                let others_a = (0..n)
                    .filter(|&j| j != agent.index())
                    .filter(|&j| strategies[j].voting.vote(types[j]) == Alternative::A)
                    .count();
                others_a + usize::from(own_vote == Alternative::A) == a_votes
            }
        };
        let silent = predecessors
            .iter()
            .all(|j| strategies[j.index()].confirmation.reply(types[j.index()], winner) == ConfirmationAction::No);
        if !votes_fit || !silent {
            continue;
        }
        let confirmed_later = successors
            .iter()
            .any(|j| strategies[j.index()].confirmation.reply(types[j.index()], winner) == ConfirmationAction::Yes);
        mass += w;
        pa_if_no += w * if confirmed_later { confirm.pa() } else { beta.pa() };
    }
    if mass.is_zero() {
        return Err(Error::BeliefUndefined(format!(
            "agent {agent} of type {own_type} at position {} of {draw} after {}: zero probability under the strategies",
            position + 1,
            match disclosed {
                Disclosure::Profile(v) => format!("votes {v}"),
                Disclosure::Shares { a_votes, own_vote } => format!("{a_votes} a-votes (own {own_vote})"),
            }
        )));
    }
    let no = Lottery::new(pa_if_no / mass)?;
    Ok(match sd_compare(own_type, &confirm, &no) {
        SdComparison::FirstStrictlyPreferred => BTreeSet::from([ConfirmationAction::Yes]),
        SdComparison::SecondStrictlyPreferred => BTreeSet::from([ConfirmationAction::No]),
        SdComparison::Indifferent => BTreeSet::from([ConfirmationAction::Yes, ConfirmationAction::No]),
    })
}

/// Result of checking the truthful strategy profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthfulPbeReport {
    pub n: usize,
    pub beliefs: BeliefModel,
    pub mode: DisclosureMode,
    /// Gain in the probability of the own option from voting for it, per
    /// own type, `[a, b]`, for agent 1.
    pub voting_gain: [Prob; 2],
    pub voting_strict: bool,
    pub info_sets_checked: usize,
    pub info_sets_unreachable: usize,
    pub failures: Vec<String>,
}

impl TruthfulPbeReport {
    pub fn pass(&self) -> bool {
        self.voting_strict && self.failures.is_empty()
    }
}

impl fmt::Display for TruthfulPbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n={} {} mode={} gain_a={} gain_b={} strict={} info_sets={} unreachable={} pass={}",
            self.n,
            self.beliefs,
            self.mode,
            self.voting_gain[0],
            self.voting_gain[1],
            self.voting_strict,
            self.info_sets_checked,
            self.info_sets_unreachable,
            self.pass()
        )?;
        for failure in &self.failures {
            writeln!(f, "  {failure}")?;
        }
        Ok(())
    }
}

/// Checks that truthful voting followed by truthful confirmation is a
/// perfect Bayesian equilibrium: voting for the own option is strictly
/// better for both types, and the truthful reply is a best response at every
/// confirmation node reachable from any own vote.
pub fn verify_truthful_pbe(n: usize, beliefs: &BeliefModel, mode: DisclosureMode) -> Result<TruthfulPbeReport> {
    check_odd(n)?;
    if n > 7 {
        return Err(Error::Capacity(format!("truthful PBE check runs up to n = 7, got {n}")));
    }
    let strategies = vec![TypeStrategy::TRUTHFUL; n];
    let mut failures = Vec::new();
    let mut voting_gain = [Prob::zero(); 2];
    let mut voting_strict = true;
    for agent in (0..n).map(AgentId::from_index) {
        for (slot, own) in Alternative::BOTH.into_iter().enumerate() {
            let honest = expected_vote_payoff(agent, own, own, &strategies, beliefs)?;
            let other = expected_vote_payoff(agent, own, own.other(), &strategies, beliefs)?;
            if agent.index() == 0 {
                voting_gain[slot] = honest.prob(own) - other.prob(own);
            }
            if !strictly_prefers(own, &honest, &other) {
                voting_strict = false;
                failures.push(format!(
                    "agent {agent} of type {own}: voting {own} gives {honest}, voting {} gives {other}",
                    own.other()
                ));
            }
        }
    }

    let mut checked = 0;
    let mut unreachable = 0;
    let size = n / 2 + 1;
    let committees = ordered_committees(n, size);
    for agent in (0..n).map(AgentId::from_index) {
        for own in Alternative::BOTH {
            for own_vote in Alternative::BOTH {
                let mut seen = BTreeSet::new();
                for bits in 0u64..1 << (n - 1) {
                    let mut votes = Vec::with_capacity(n);
                    let mut k = 0;
                    for j in 0..n {
                        if j == agent.index() {
                            votes.push(own_vote);
                        } else {
                            votes.push(if bits >> k & 1 == 1 { Alternative::B } else { Alternative::A });
                            k += 1;
                        }
                    }
                    let v = VotingProfile::from_alternatives(&votes);
                    let disclosed = Disclosure::of(&v, agent, mode)?;
                    if !seen.insert(format!("{disclosed:?}")) {
                        continue;
                    }
                    let winner = if v.count(Alternative::A) > n / 2 { Alternative::A } else { Alternative::B };
                    let prescribed = ConfirmationRule::Truthful.reply(own, winner);
                    for order in committees.iter().filter(|o| o.contains(&agent)) {
                        let position = order.iter().position(|&a| a == agent).expect("member");
                        let draw = ConfirmationDraw::new(order.clone())?;
                        match confirmation_best_response_beliefs(
                            agent, own, &disclosed, &draw, position, &strategies, beliefs,
                        ) {
                            Ok(best) => {
                                checked += 1;
                                if !best.contains(&prescribed) {
                                    failures.push(format!(
                                        "agent {agent} of type {own}, votes {v}, order {draw}, position {}: reply {prescribed} not a best response",
                                        position + 1
                                    ));
                                }
                            }
                            Err(Error::BeliefUndefined(_)) => unreachable += 1,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
    }
    Ok(TruthfulPbeReport {
        n,
        beliefs: *beliefs,
        mode,
        voting_gain,
        voting_strict,
        info_sets_checked: checked,
        info_sets_unreachable: unreachable,
        failures,
    })
}

fn ordered_committees(n: usize, size: usize) -> Vec<Vec<AgentId>> {
    let mut out = Vec::new();
    for set in AgentSet::all(n).subsets_of_size(size) {
        let mut members: Vec<AgentId> = set.iter().collect();
        permutations(&mut members, 0, &mut out);
    }
    out.sort();
    out
}

fn permutations(items: &mut Vec<AgentId>, start: usize, out: &mut Vec<Vec<AgentId>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Probability that the other agents' truthful votes split evenly, so that
/// the agent's own vote decides the stage winner.
pub fn pivotal_probability(n: usize, beliefs: &BeliefModel) -> Result<Prob> {
    check_odd(n)?;
    let p = n / 2;
    let ways = Prob::from_integer(binomial(n - 1, p) as i128);
    let mut pr = ways;
    for _ in 0..p {
        pr *= beliefs.prob(Alternative::A) * beliefs.prob(Alternative::B);
    }
    Ok(pr)
}

/// A type with a profitable change of vote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BneDeviation {
    pub agent: AgentId,
    pub own_type: Alternative,
    pub from: Alternative,
    pub to: Alternative,
    pub before: Lottery,
    pub after: Lottery,
}

impl fmt::Display for BneDeviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {} of type {} votes {} instead of {}: {} -> {}",
            self.agent, self.own_type, self.to, self.from, self.before, self.after
        )
    }
}

/// First profitable voting deviation in a type-contingent voting profile
/// (agents in increasing order, type `a` first), with the confirmation
/// stage resolved by the confirmation lemma.
pub fn bne_deviation(rules: &[VotingRule], beliefs: &BeliefModel) -> Result<Option<BneDeviation>> {
    let strategies: Vec<TypeStrategy> = rules
        .iter()
        .map(|&voting| TypeStrategy {
            voting,
            confirmation: ConfirmationRule::Truthful,
        })
        .collect();
    for agent in (0..rules.len()).map(AgentId::from_index) {
        for own in Alternative::BOTH {
            let from = rules[agent.index()].vote(own);
            let to = from.other();
            let before = expected_vote_payoff(agent, own, from, &strategies, beliefs)?;
            let after = expected_vote_payoff(agent, own, to, &strategies, beliefs)?;
            if strictly_prefers(own, &after, &before) {
                return Ok(Some(BneDeviation {
                    agent,
                    own_type: own,
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

/// A Bayes-Nash equilibrium in type-contingent voting rules together with
/// the expected outcome at every type realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VotingEquilibrium {
    pub rules: Vec<VotingRule>,
    pub outcomes: Vec<(PreferenceProfile, Lottery)>,
}

/// Every pure Bayes-Nash equilibrium in voting rules at `n = 3`, scanning
/// all 64 profiles of type-contingent rules.
pub fn enumerate_bne_voting_n3(beliefs: &BeliefModel) -> Result<Vec<VotingEquilibrium>> {
    let n = 3;
    let mut found = Vec::new();
    for idx in 0..VotingRule::ALL.len().pow(n as u32) {
        let rules: Vec<VotingRule> = (0..n)
            .map(|i| VotingRule::ALL[idx / VotingRule::ALL.len().pow(i as u32) % VotingRule::ALL.len()])
            .collect();
        if bne_deviation(&rules, beliefs)?.is_some() {
            continue;
        }
        let outcomes = PreferenceProfile::all(n)
            .map(|r| {
                let votes: Vec<Alternative> = r.agents().map(|a| rules[a.index()].vote(r.preferred(a))).collect();
                let o = expected_outcome(&VotingProfile::from_alternatives(&votes), &r, RcVariant::Baseline)?;
                Ok((r, o))
            })
            .collect::<Result<Vec<_>>>()?;
        found.push(VotingEquilibrium { rules, outcomes });
    }
    Ok(found)
}
