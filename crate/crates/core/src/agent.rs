//! Agent identifiers and small agent sets.
//!
//! Agents are numbered from 1 in every external format; internally an
//! [`AgentId`] carries the zero-based index and an [`AgentSet`] is a bitmask
//! over those indices.

use std::fmt;

/// Largest population the bitmask representation supports.
pub const MAX_AGENTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(u8);

impl AgentId {
    /// Agent with the given 1-based number.
    ///
    /// # Panics
    /// If `number` is zero or exceeds [`MAX_AGENTS`].
    pub fn new(number: usize) -> Self {
        assert!(
            (1..=MAX_AGENTS).contains(&number),
            "agent number {number} out of range"
        );
        AgentId((number - 1) as u8)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < MAX_AGENTS, "agent index {index} out of range");
        AgentId(index as u8)
    }

    /// Zero-based index.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// One-based number, as printed.
    pub fn number(self) -> usize {
        self.0 as usize + 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentSet(u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn from_bits(bits: u32) -> Self {
        AgentSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The set {1, ..., n}.
    pub fn all(n: usize) -> Self {
        assert!(n <= MAX_AGENTS);
        if n == MAX_AGENTS {
            AgentSet(u32::MAX)
        } else {
            AgentSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(agent: AgentId) -> Self {
        AgentSet(1 << agent.index())
    }

    pub fn from_numbers<I: IntoIterator<Item = usize>>(numbers: I) -> Self {
        numbers
            .into_iter()
            .fold(AgentSet::EMPTY, |s, k| s.with(AgentId::new(k)))
    }

    pub fn contains(self, agent: AgentId) -> bool {
        self.0 & (1 << agent.index()) != 0
    }

    pub fn with(self, agent: AgentId) -> Self {
        AgentSet(self.0 | (1 << agent.index()))
    }

    pub fn without(self, agent: AgentId) -> Self {
        AgentSet(self.0 & !(1 << agent.index()))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: AgentSet) -> Self {
        AgentSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AgentSet) -> Self {
        AgentSet(self.0 & other.0)
    }

    pub fn difference(self, other: AgentSet) -> Self {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AgentSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = AgentId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(AgentId::from_index(i))
            }
        })
    }

    /// All subsets of `self` with exactly `k` members, in lexicographic order
    /// of their sorted member lists.
    pub fn subsets_of_size(self, k: usize) -> Vec<AgentSet> {
        let members: Vec<AgentId> = self.iter().collect();
        let mut out = Vec::new();
        if k > members.len() {
            return out;
        }
        let m = members.len();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().fold(AgentSet::EMPTY, |s, &j| s.with(members[j])));
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
                return out;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<AgentId> for AgentSet {
    fn from_iter<T: IntoIterator<Item = AgentId>>(iter: T) -> Self {
        iter.into_iter().fold(AgentSet::EMPTY, |s, a| s.with(a))
    }
}
