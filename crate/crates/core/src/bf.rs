//! The Bloc Formation mechanism.
//!
//! Every agent sends a vote together with `p` nominations of other agents.
//! A *bloc* in favour of `x` is a set of at least `p + 1` agents who all
//! vote `x` and nominate only each other. If the profile admits a bloc, its
//! alternative wins outright; otherwise each alternative is drawn with the
//! nomination share of the agents voting for it.
//!
//! Nominations form a digraph with out-degree `p`. Blocs are exactly the
//! nonempty nomination-closed sets of same-vote agents (out-degree `p`
//! already forces size `p + 1`), so they are unions of reachability
//! closures, and the *effective* bloc is the unique sink strongly connected
//! component inside the largest closed set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::agent::{AgentId, AgentSet, MAX_AGENTS};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::model::{Alternative, Lottery, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BfMessage {
    pub vote: Alternative,
    pub nominations: AgentSet,
}

impl BfMessage {
    pub fn new(vote: Alternative, nominations: AgentSet) -> Self {
        BfMessage { vote, nominations }
    }

    /// Same nominations, opposite vote.
    pub fn vote_flipped(self) -> Self {
        BfMessage {
            vote: self.vote.other(),
            nominations: self.nominations,
        }
    }
}

impl fmt::Display for BfMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.vote, self.nominations)
    }
}

/// A validated message profile.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BfProfile {
    messages: Vec<BfMessage>,
}

impl BfProfile {
    pub fn new(messages: Vec<BfMessage>) -> Result<Self> {
        let n = messages.len();
        if !(2..=MAX_AGENTS).contains(&n) {
            return Err(Error::Domain(format!(
                "population size {n} outside 2..={MAX_AGENTS}"
            )));
        }
        let p = n / 2;
        let everyone = AgentSet::all(n);
        for (i, m) in messages.iter().enumerate() {
            let me = AgentId::from_index(i);
            let fail = |reason: String| Error::Validation {
                agent: me.number(),
                reason,
            };
            if m.nominations.contains(me) {
                return Err(fail("nominates herself".into()));
            }
            if !m.nominations.is_subset(everyone) {
                return Err(fail(format!("nominates an agent outside 1..={n}")));
            }
            if m.nominations.len() != p {
                return Err(fail(format!(
                    "nominates {} agents, expected p={p}",
                    m.nominations.len()
                )));
            }
        }
        Ok(BfProfile { messages })
    }

    /// Convenience constructor from a vote string and 1-based nomination lists.
    pub fn from_parts(votes: &str, nominations: &[&[usize]]) -> Result<Self> {
        let votes: Vec<Alternative> = votes
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Alternative::from_char(c).ok_or_else(|| Error::Validation {
                    agent: i + 1,
                    reason: format!("vote '{c}' is not a or b"),
                })
            })
            .collect::<Result<_>>()?;
        if votes.len() != nominations.len() {
            return Err(Error::Domain(format!(
                "{} votes but {} nomination lists",
                votes.len(),
                nominations.len()
            )));
        }
        let messages = votes
            .into_iter()
            .zip(nominations)
            .map(|(v, c)| BfMessage::new(v, AgentSet::from_numbers(c.iter().copied())))
            .collect();
        BfProfile::new(messages)
    }

    pub fn n(&self) -> usize {
        self.messages.len()
    }

    pub fn p(&self) -> usize {
        self.messages.len() / 2
    }

    pub fn message(&self, agent: AgentId) -> BfMessage {
        self.messages[agent.index()]
    }

    pub fn messages(&self) -> &[BfMessage] {
        &self.messages
    }

    pub fn vote(&self, agent: AgentId) -> Alternative {
        self.messages[agent.index()].vote
    }

    pub fn voters_for(&self, x: Alternative) -> AgentSet {
        self.agents().filter(|&i| self.vote(i) == x).collect()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n()).map(AgentId::from_index)
    }

    /// The profile after `agent` switches to `message`.
    pub fn with_message(&self, agent: AgentId, message: BfMessage) -> Result<Self> {
        let mut messages = self.messages.clone();
        messages[agent.index()] = message;
        BfProfile::new(messages)
    }

    fn digraph(&self) -> Digraph {
        Digraph::new(self.messages.iter().map(|m| m.nominations).collect())
    }

    /// Number of other agents nominating `agent`.
    pub fn nominations_received(&self, agent: AgentId) -> usize {
        self.messages
            .iter()
            .filter(|m| m.nominations.contains(agent))
            .count()
    }
}

/// Writes the line-oriented profile format: `votes: aabbb` followed by one
/// `i: j,k` line per agent.
impl fmt::Display for BfProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "votes: ")?;
        for m in &self.messages {
            write!(f, "{}", m.vote)?;
        }
        writeln!(f)?;
        for (i, m) in self.messages.iter().enumerate() {
            let list: Vec<String> = m.nominations.iter().map(|a| a.to_string()).collect();
            writeln!(f, "{}: {}", i + 1, list.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for BfProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut votes = None;
        let mut noms = Vec::new();
        for (k, raw) in s.lines().enumerate() {
            let line = k + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text.split_once(':').ok_or_else(|| Error::Parse {
                line,
                reason: format!("expected `key: value`, got `{text}`"),
            })?;
            let key = key.trim();
            if key == "votes" {
                votes = Some((line, value.trim().to_string()));
            } else {
                noms.push((line, key.to_string(), value.trim().to_string()));
            }
        }
        let (vline, votes) = votes.ok_or(Error::Parse {
            line: 0,
            reason: "missing `votes:` line".into(),
        })?;
        profile_from_fields(vline, &votes, &noms)
    }
}

/// Builds a profile from a parsed `votes` field and `(line, agent, list)`
/// nomination fields.
pub(crate) fn profile_from_fields(
    votes_line: usize,
    votes: &str,
    nominations: &[(usize, String, String)],
) -> Result<BfProfile> {
    let votes: Vec<Alternative> = votes
        .chars()
        .map(|c| {
            Alternative::from_char(c).ok_or_else(|| Error::Parse {
                line: votes_line,
                reason: format!("vote '{c}' is not a or b"),
            })
        })
        .collect::<Result<_>>()?;
    let n = votes.len();
    if !(2..=MAX_AGENTS).contains(&n) {
        return Err(Error::Parse {
            line: votes_line,
            reason: format!("population size {n} outside 2..={MAX_AGENTS}"),
        });
    }
    let mut lists: Vec<Option<AgentSet>> = vec![None; n];
    for (line, key, list) in nominations {
        let line = *line;
        let agent: usize = key.parse().map_err(|_| Error::Parse {
            line,
            reason: format!("unknown field `{key}`"),
        })?;
        if agent < 1 || agent > n {
            return Err(Error::Parse {
                line,
                reason: format!("agent {agent} outside 1..={n}"),
            });
        }
        if lists[agent - 1].is_some() {
            return Err(Error::Parse {
                line,
                reason: format!("duplicate nominations for agent {agent}"),
            });
        }
        let mut set = AgentSet::EMPTY;
        let mut count = 0;
        for item in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let j: usize = item.parse().map_err(|_| Error::Parse {
                line,
                reason: format!("nominee `{item}` is not an agent number"),
            })?;
            if j < 1 || j > n {
                return Err(Error::Parse {
                    line,
                    reason: format!("nominee {j} outside 1..={n}"),
                });
            }
            set = set.with(AgentId::new(j));
            count += 1;
        }
        if count != set.len() {
            return Err(Error::Parse {
                line,
                reason: format!("agent {agent} nominates the same agent twice"),
            });
        }
        if set.len() != n / 2 {
            return Err(Error::Parse {
                line,
                reason: format!(
                    "agent {agent} nominates {} agents, expected p={}",
                    set.len(),
                    n / 2
                ),
            });
        }
        lists[agent - 1] = Some(set);
    }
    let messages = votes
        .into_iter()
        .zip(lists)
        .enumerate()
        .map(|(i, (v, c))| {
            c.map(|c| BfMessage::new(v, c)).ok_or_else(|| Error::Parse {
                line: 0,
                reason: format!("missing nominations for agent {}", i + 1),
            })
        })
        .collect::<Result<_>>()?;
    BfProfile::new(messages)
}

/// The nomination digraph: entry `(i, j)` is set iff `i` nominates `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominationGraph {
    graph: Digraph,
}

impl NominationGraph {
    pub fn n(&self) -> usize {
        self.graph.len()
    }

    pub fn has_edge(&self, from: AgentId, to: AgentId) -> bool {
        self.graph.has_edge(from, to)
    }

    /// 0/1 adjacency matrix, rows indexed by nominator.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| u8::from(self.has_edge(AgentId::from_index(i), AgentId::from_index(j))))
                    .collect()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.adjacency()
            .iter()
            .map(|r| r.iter().map(|&x| x as usize).sum())
            .collect()
    }

    /// Nominations received by each agent.
    pub fn column_sums(&self) -> Vec<usize> {
        let adj = self.adjacency();
        (0..self.n())
            .map(|j| adj.iter().map(|r| r[j] as usize).sum())
            .collect()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.graph
    }
}

pub fn build_graph(profile: &BfProfile) -> NominationGraph {
    NominationGraph {
        graph: profile.digraph(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bloc {
    pub members: AgentSet,
    pub supports: Alternative,
}

impl fmt::Display for Bloc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} for {}", self.members, self.supports)
    }
}

/// Union of all blocs: the largest nomination-closed set of agents voting
/// for the same alternative, provided it is large enough.
pub fn maximal_bloc(profile: &BfProfile) -> Option<Bloc> {
    let graph = profile.digraph();
    let found: Vec<Bloc> = Alternative::BOTH
        .into_iter()
        .filter_map(|x| {
            let members = graph.largest_closed_subset(profile.voters_for(x));
            (members.len() > profile.p()).then_some(Bloc {
                members,
                supports: x,
            })
        })
        .collect();
    assert!(
        found.len() <= 1,
        "blocs for both alternatives in one profile: {found:?}"
    );
    found.into_iter().next()
}

/// Every bloc of the profile, sorted.
pub fn find_all_blocs(profile: &BfProfile) -> Vec<Bloc> {
    let Some(max) = maximal_bloc(profile) else {
        return Vec::new();
    };
    let graph = profile.digraph();
    let closures: BTreeSet<AgentSet> = max
        .members
        .iter()
        .map(|i| graph.closure_within(i, max.members))
        .collect();
    let mut unions: BTreeSet<AgentSet> = BTreeSet::new();
    for c in closures {
        let grown: Vec<AgentSet> = unions.iter().map(|u| u.union(c)).collect();
        unions.extend(grown);
        unions.insert(c);
    }
    unions
        .into_iter()
        .filter(|s| s.len() > profile.p())
        .map(|members| Bloc {
            members,
            supports: max.supports,
        })
        .collect()
}

/// `true` iff `members` satisfies the bloc definition in `profile`.
pub fn is_bloc(profile: &BfProfile, members: AgentSet, supports: Alternative) -> bool {
    members.len() > profile.p()
        && members.iter().all(|i| {
            let m = profile.message(i);
            m.vote == supports && m.nominations.is_subset(members)
        })
}

/// The effective bloc: the strongly connected bloc, which is also the
/// intersection of all blocs. Both characterisations are computed and must
/// agree.
pub fn find_effective_bloc(profile: &BfProfile) -> Result<Option<Bloc>> {
    let Some(max) = maximal_bloc(profile) else {
        return Ok(None);
    };
    let graph = profile.digraph();
    let sinks = graph.sink_components(max.members);
    let [sink] = sinks.as_slice() else {
        return Err(Error::InvariantViolation(format!(
            "expected one sink component inside {}, found {}",
            max.members,
            sinks.len()
        )));
    };
    let effective = Bloc {
        members: *sink,
        supports: max.supports,
    };

    let intersection = find_all_blocs(profile)
        .iter()
        .fold(max.members, |acc, b| acc.intersection(b.members));
    if intersection != effective.members {
        return Err(Error::InvariantViolation(format!(
            "sink component {} differs from bloc intersection {}",
            effective.members, intersection
        )));
    }
    if !is_bloc(profile, effective.members, effective.supports)
        || !graph.is_strongly_connected(effective.members)
    {
        return Err(Error::InvariantViolation(format!(
            "effective bloc {effective} is not a strongly connected bloc"
        )));
    }
    Ok(Some(effective))
}

/// Nomination share of `agent`, `|{j : agent ∈ c_j}| / (n p)`.
pub fn eta_agent(profile: &BfProfile, agent: AgentId) -> Prob {
    Prob::new(
        profile.nominations_received(agent) as i128,
        (profile.n() * profile.p()) as i128,
    )
}

/// Lottery weighting each alternative by the nomination shares of its voters.
pub fn eta_lottery(profile: &BfProfile) -> Lottery {
    let received: usize = profile
        .voters_for(Alternative::A)
        .iter()
        .map(|i| profile.nominations_received(i))
        .sum();
    Lottery::new(Prob::new(
        received as i128,
        (profile.n() * profile.p()) as i128,
    ))
    .expect("nomination shares sum to one")
}

/// Outcome of the mechanism.
pub fn bf_outcome(profile: &BfProfile) -> Lottery {
    match maximal_bloc(profile) {
        Some(bloc) => Lottery::degenerate(bloc.supports),
        None => eta_lottery(profile),
    }
}

/// Every message available to `agent`: vote `a` before `b`, nomination sets
/// in lexicographic order.
pub fn message_space(n: usize, agent: AgentId) -> Vec<BfMessage> {
    let others = AgentSet::all(n).without(agent);
    let noms = others.subsets_of_size(n / 2);
    Alternative::BOTH
        .into_iter()
        .flat_map(|v| noms.iter().map(move |&c| BfMessage::new(v, c)))
        .collect()
}

/// A single-message change by `agent` that leaves the profile without any
/// bloc. Members of the effective bloc always have one (flip the vote, keep
/// the nominations); for other agents the whole message space is searched.
pub fn bloc_breaking_deviation(profile: &BfProfile, agent: AgentId) -> Result<Option<BfMessage>> {
    let Some(effective) = find_effective_bloc(profile)? else {
        return Err(Error::Precondition(
            "bloc-breaking deviation requested for a profile without blocs".into(),
        ));
    };
    if effective.members.contains(agent) {
        let flipped = profile.message(agent).vote_flipped();
        let after = profile.with_message(agent, flipped)?;
        if let Some(b) = maximal_bloc(&after) {
            return Err(Error::InvariantViolation(format!(
                "agent {agent} of effective bloc {} flipped her vote but bloc {b} remains",
                effective.members
            )));
        }
        return Ok(Some(flipped));
    }
    for m in message_space(profile.n(), agent) {
        if maximal_bloc(&profile.with_message(agent, m)?).is_none() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example2() -> BfProfile {
        BfProfile::from_parts("bbbbb", &[&[4, 5], &[1, 3], &[1, 2], &[1, 5], &[1, 4]]).unwrap()
    }

    fn set(xs: &[usize]) -> AgentSet {
        AgentSet::from_numbers(xs.iter().copied())
    }

    #[test]
    fn example2_graph() {
        let g = build_graph(&example2());
        assert_eq!(g.column_sums(), vec![4, 1, 1, 2, 2]);
        assert_eq!(g.row_sums(), vec![2; 5]);
        assert!(g.has_edge(AgentId::new(1), AgentId::new(4)));
        assert!(!g.has_edge(AgentId::new(4), AgentId::new(2)));
    }

    #[test]
    fn three_cycle_graph() {
        let p = BfProfile::from_parts("aaa", &[&[2], &[3], &[1]]).unwrap();
        assert_eq!(
            build_graph(&p).adjacency(),
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]
        );
    }

    #[test]
    fn example2_blocs() {
        let blocs: Vec<AgentSet> = find_all_blocs(&example2()).iter().map(|b| b.members).collect();
        assert_eq!(blocs, vec![set(&[1, 4, 5]), set(&[1, 2, 3, 4, 5])]);
        let eff = find_effective_bloc(&example2()).unwrap().unwrap();
        assert_eq!(eff.members, set(&[1, 4, 5]));
        assert_eq!(eff.supports, Alternative::B);
    }

    #[test]
    fn no_bloc_profile() {
        let p = BfProfile::from_parts("aaabb", &[&[2, 5], &[1, 3], &[1, 4], &[1, 5], &[1, 4]])
            .unwrap();
        assert!(find_all_blocs(&p).is_empty());
        assert_eq!(find_effective_bloc(&p).unwrap(), None);
        assert!(matches!(
            bloc_breaking_deviation(&p, AgentId::new(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn small_unanimous_bloc() {
        let p = BfProfile::from_parts("aaa", &[&[2], &[1], &[1]]).unwrap();
        let blocs: Vec<AgentSet> = find_all_blocs(&p).iter().map(|b| b.members).collect();
        assert!(blocs.contains(&set(&[1, 2])));
        assert_eq!(bf_outcome(&p), Lottery::degenerate(Alternative::A));
    }

    #[test]
    fn eta_examples() {
        let m = example2();
        assert_eq!(eta_agent(&m, AgentId::new(1)), Prob::new(4, 10));
        let p = BfProfile::from_parts("aaa", &[&[2], &[1], &[1]]).unwrap();
        assert_eq!(eta_agent(&p, AgentId::new(3)), Prob::new(0, 1));
        // agent 1 nominated by all others: (n-1)/(n p)
        assert_eq!(eta_agent(&p, AgentId::new(1)), Prob::new(2, 3));
        let total: Prob = m.agents().map(|i| eta_agent(&m, i)).sum();
        assert_eq!(total, Prob::new(1, 1));
    }

    #[test]
    fn example2_deviation() {
        let m = example2();
        assert_eq!(bf_outcome(&m), Lottery::degenerate(Alternative::B));
        let dev = bloc_breaking_deviation(&m, AgentId::new(1)).unwrap().unwrap();
        assert_eq!(dev, BfMessage::new(Alternative::A, set(&[4, 5])));
        let after = m.with_message(AgentId::new(1), dev).unwrap();
        assert!(find_all_blocs(&after).is_empty());
        assert_eq!(eta_lottery(&after), Lottery::from_ratio(4, 10).unwrap());
        assert_eq!(bf_outcome(&after), Lottery::from_ratio(4, 10).unwrap());
    }

    #[test]
    fn outsider_cannot_break_blocs() {
        let m = example2();
        assert_eq!(message_space(5, AgentId::new(2)).len(), 12);
        assert_eq!(bloc_breaking_deviation(&m, AgentId::new(2)).unwrap(), None);
        for msg in message_space(5, AgentId::new(2)) {
            let after = m.with_message(AgentId::new(2), msg).unwrap();
            assert!(is_bloc(&after, set(&[1, 4, 5]), Alternative::B));
        }
    }

    #[test]
    fn three_cycle_flip_breaks_blocs() {
        let p = BfProfile::from_parts("aaa", &[&[2], &[3], &[1]]).unwrap();
        for i in p.agents() {
            let dev = bloc_breaking_deviation(&p, i).unwrap().unwrap();
            assert_eq!(dev.vote, Alternative::B);
            assert!(find_all_blocs(&p.with_message(i, dev).unwrap()).is_empty());
        }
    }

    #[test]
    fn validation_names_the_agent() {
        let err = BfProfile::from_parts("aaa", &[&[2], &[2], &[1]]).unwrap_err();
        assert_eq!(
            err,
            Error::Validation {
                agent: 2,
                reason: "nominates herself".into()
            }
        );
        let err = BfProfile::from_parts("aaaaa", &[&[2, 3], &[1], &[1, 2], &[1, 2], &[1, 2]])
            .unwrap_err();
        assert!(matches!(err, Error::Validation { agent: 2, .. }));
    }

    #[test]
    fn text_format_round_trip() {
        let m = example2();
        let text = m.to_string();
        assert!(text.starts_with("votes: bbbbb\n1: 4,5\n"));
        assert_eq!(text.parse::<BfProfile>().unwrap(), m);
        let bad = "votes: aaa\n1: 2,3\n2: 1\n3: 1\n";
        assert!(matches!(bad.parse::<BfProfile>(), Err(Error::Parse { line: 2, .. })));
    }
}
