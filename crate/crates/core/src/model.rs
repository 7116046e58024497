//! Alternatives, preference profiles, exact lotteries and the majority rules.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::agent::{AgentId, MAX_AGENTS};
use crate::error::{Error, Result};

/// Exact probability.
pub type Prob = Ratio<i128>;

/// One of the two options. In the supermajority setting `A` is the status
/// quo and `B` the alternative policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Alternative {
    A,
    B,
}

impl Alternative {
    pub const BOTH: [Alternative; 2] = [Alternative::A, Alternative::B];

    /// Status quo of the supermajority rule.
    pub const SQ: Alternative = Alternative::A;
    /// Alternative policy of the supermajority rule.
    pub const X: Alternative = Alternative::B;

    pub fn other(self) -> Self {
        match self {
            Alternative::A => Alternative::B,
            Alternative::B => Alternative::A,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Alternative::A => 'a',
            Alternative::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a' | 'A' => Some(Alternative::A),
            'b' | 'B' => Some(Alternative::B),
            _ => None,
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Strict preferences of every agent over the two alternatives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreferenceProfile {
    prefs: Vec<Alternative>,
}

impl PreferenceProfile {
    pub fn new(prefs: Vec<Alternative>) -> Result<Self> {
        if prefs.len() < 2 || prefs.len() > MAX_AGENTS {
            return Err(Error::Domain(format!(
                "population size {} outside 2..={MAX_AGENTS}",
                prefs.len()
            )));
        }
        Ok(PreferenceProfile { prefs })
    }

    /// Profile from bit `i` of `bits` (set = prefers `B`), for enumeration.
    pub fn from_index(n: usize, bits: u64) -> Self {
        let prefs = (0..n)
            .map(|i| {
                if bits >> i & 1 == 1 {
                    Alternative::B
                } else {
                    Alternative::A
                }
            })
            .collect();
        PreferenceProfile { prefs }
    }

    /// Every profile of size `n`, starting from unanimous `a`.
    pub fn all(n: usize) -> impl Iterator<Item = PreferenceProfile> {
        (0..1u64 << n).map(move |bits| PreferenceProfile::from_index(n, bits))
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    /// `p` with `n = 2p + 1` (odd) or `n = 2p` (even).
    pub fn p(&self) -> usize {
        self.prefs.len() / 2
    }

    pub fn parity(&self) -> Parity {
        if self.prefs.len() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn preferred(&self, agent: AgentId) -> Alternative {
        self.prefs[agent.index()]
    }

    pub fn prefers(&self, agent: AgentId, x: Alternative) -> bool {
        self.preferred(agent) == x
    }

    pub fn as_slice(&self) -> &[Alternative] {
        &self.prefs
    }

    pub fn count(&self, x: Alternative) -> usize {
        self.prefs.iter().filter(|&&y| y == x).count()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.prefs.len()).map(AgentId::from_index)
    }

    /// Every agent's preference reversed.
    pub fn flipped(&self) -> Self {
        PreferenceProfile {
            prefs: self.prefs.iter().map(|x| x.other()).collect(),
        }
    }
}

impl fmt::Display for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.prefs {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for PreferenceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let prefs = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .enumerate()
            .map(|(i, c)| {
                Alternative::from_char(c).ok_or_else(|| Error::Validation {
                    agent: i + 1,
                    reason: format!("preference '{c}' is not a or b"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PreferenceProfile::new(prefs)
    }
}

/// A lottery over the two alternatives, stored as the probability of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lottery {
    pa: Prob,
}

impl Lottery {
    pub fn new(pa: Prob) -> Result<Self> {
        if pa < Prob::zero() || pa > Prob::one() {
            return Err(Error::Domain(format!("probability {pa} outside [0,1]")));
        }
        Ok(Lottery { pa })
    }

    pub fn from_ratio(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Lottery::new(Prob::new(num, den))
    }

    /// The lottery that selects `x` with certainty.
    pub fn degenerate(x: Alternative) -> Self {
        match x {
            Alternative::A => Lottery { pa: Prob::one() },
            Alternative::B => Lottery { pa: Prob::zero() },
        }
    }

    pub fn half() -> Self {
        Lottery {
            pa: Prob::new(1, 2),
        }
    }

    pub fn pa(&self) -> Prob {
        self.pa
    }

    pub fn pb(&self) -> Prob {
        Prob::one() - self.pa
    }

    pub fn prob(&self, x: Alternative) -> Prob {
        match x {
            Alternative::A => self.pa(),
            Alternative::B => self.pb(),
        }
    }

    /// The alternative selected with certainty, if any.
    pub fn certain(&self) -> Option<Alternative> {
        if self.pa.is_one() {
            Some(Alternative::A)
        } else if self.pa.is_zero() {
            Some(Alternative::B)
        } else {
            None
        }
    }

    pub fn is_degenerate_on(&self, x: Alternative) -> bool {
        self.certain() == Some(x)
    }

    /// Same lottery with the labels of the alternatives swapped.
    pub fn swapped(&self) -> Self {
        Lottery { pa: self.pb() }
    }
}

impl fmt::Display for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pA={}/{}", self.pa.numer(), self.pa.denom())
    }
}

/// Outcome of comparing two lotteries under the stochastic dominance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdComparison {
    FirstStrictlyPreferred,
    Indifferent,
    SecondStrictlyPreferred,
}

/// Compare `lhs` and `rhs` for an agent whose preferred alternative is
/// `preferred`: only the probability of that alternative matters.
pub fn sd_compare(preferred: Alternative, lhs: &Lottery, rhs: &Lottery) -> SdComparison {
    use std::cmp::Ordering::*;
    match lhs.prob(preferred).cmp(&rhs.prob(preferred)) {
        Greater => SdComparison::FirstStrictlyPreferred,
        Equal => SdComparison::Indifferent,
        Less => SdComparison::SecondStrictlyPreferred,
    }
}

/// `true` iff an agent preferring `preferred` strictly prefers `lhs` to `rhs`.
pub fn strictly_prefers(preferred: Alternative, lhs: &Lottery, rhs: &Lottery) -> bool {
    sd_compare(preferred, lhs, rhs) == SdComparison::FirstStrictlyPreferred
}

/// Compound lottery. Weights must be nonnegative and sum to exactly one.
pub fn lottery_mix(parts: &[(Prob, Lottery)]) -> Result<Lottery> {
    let mut total = Prob::zero();
    let mut pa = Prob::zero();
    for (w, l) in parts {
        if *w < Prob::zero() {
            return Err(Error::Normalization(format!("negative weight {w}")));
        }
        total += *w;
        pa += *w * l.pa();
    }
    if !total.is_one() {
        return Err(Error::Normalization(total.to_string()));
    }
    Lottery::new(pa)
}

/// Simple majority over an odd population.
pub fn maj(profile: &PreferenceProfile) -> Result<Alternative> {
    if profile.parity() != Parity::Odd {
        return Err(Error::Parity(format!(
            "maj needs an odd population, got n={} (use maj_even)",
            profile.n()
        )));
    }
    Ok(if profile.count(Alternative::A) > profile.p() {
        Alternative::A
    } else {
        Alternative::B
    })
}

/// Majority correspondence over an even population; both alternatives on a tie.
pub fn maj_even(profile: &PreferenceProfile) -> Result<BTreeSet<Alternative>> {
    if profile.parity() != Parity::Even {
        return Err(Error::Parity(format!(
            "maj_even needs an even population, got n={}",
            profile.n()
        )));
    }
    Ok(majority_set(profile))
}

/// Alternatives backed by at least `p + 1` agents, or both when none is.
pub(crate) fn majority_set(profile: &PreferenceProfile) -> BTreeSet<Alternative> {
    let threshold = profile.p() + 1;
    let winners: BTreeSet<_> = Alternative::BOTH
        .into_iter()
        .filter(|&x| profile.count(x) >= threshold)
        .collect();
    if winners.is_empty() {
        Alternative::BOTH.into_iter().collect()
    } else {
        winners
    }
}

/// Supermajority rule: the policy `X` needs at least `p + k` supporters,
/// otherwise the status quo `SQ` stays.
pub fn maj_k(profile: &PreferenceProfile, k: usize) -> Result<Alternative> {
    if profile.parity() != Parity::Odd {
        return Err(Error::Parity(format!(
            "maj_k needs an odd population, got n={}",
            profile.n()
        )));
    }
    let p = profile.p();
    if k < 1 || k > p + 1 {
        return Err(Error::Domain(format!("k={k} outside 1..={}", p + 1)));
    }
    Ok(if profile.count(Alternative::X) >= p + k {
        Alternative::X
    } else {
        Alternative::SQ
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(s: &str) -> PreferenceProfile {
        s.parse().unwrap()
    }

    fn lot(num: i128, den: i128) -> Lottery {
        Lottery::from_ratio(num, den).unwrap()
    }

    #[test]
    fn maj_examples() {
        assert_eq!(maj(&prof("aaabb")).unwrap(), Alternative::A);
        assert_eq!(maj(&prof("bbb")).unwrap(), Alternative::B);
        assert_eq!(maj(&prof("abbaaba")).unwrap(), Alternative::A);
        assert!(matches!(maj(&prof("aabb")), Err(Error::Parity(_))));
    }

    #[test]
    fn maj_even_examples() {
        let set = |s: &str| maj_even(&prof(s)).unwrap().into_iter().collect::<Vec<_>>();
        assert_eq!(set("aaab"), vec![Alternative::A]);
        assert_eq!(set("aabb"), vec![Alternative::A, Alternative::B]);
        assert_eq!(set("bbbb"), vec![Alternative::B]);
        assert!(matches!(maj_even(&prof("aab")), Err(Error::Parity(_))));
    }

    #[test]
    fn maj_k_examples() {
        for r in PreferenceProfile::all(5) {
            assert_eq!(maj_k(&r, 1).unwrap(), maj(&r).unwrap());
        }
        // three of five prefer x: 3 < p + k = 4
        assert_eq!(maj_k(&prof("aabbb"), 2).unwrap(), Alternative::SQ);
        assert_eq!(maj_k(&prof("bbbbb"), 3).unwrap(), Alternative::X);
        assert!(matches!(maj_k(&prof("bbbbb"), 0), Err(Error::Domain(_))));
        assert!(matches!(maj_k(&prof("bbbbb"), 4), Err(Error::Domain(_))));
    }

    #[test]
    fn sd_compare_examples() {
        use SdComparison::*;
        assert_eq!(sd_compare(Alternative::A, &lot(3, 5), &lot(2, 5)), FirstStrictlyPreferred);
        assert_eq!(sd_compare(Alternative::B, &lot(3, 5), &lot(2, 5)), SecondStrictlyPreferred);
        for x in Alternative::BOTH {
            assert_eq!(sd_compare(x, &lot(1, 2), &lot(1, 2)), Indifferent);
        }
    }

    #[test]
    fn lottery_mix_examples() {
        let mixed = lottery_mix(&[
            (Prob::new(1, 10), lot(1, 5)),
            (Prob::new(9, 10), lot(0, 1)),
        ])
        .unwrap();
        assert_eq!(mixed, lot(1, 50));
        let q = lot(3, 7);
        assert_eq!(lottery_mix(&[(Prob::one(), q)]).unwrap(), q);
        assert_eq!(
            lottery_mix(&[(Prob::new(1, 2), lot(1, 1)), (Prob::new(1, 2), lot(0, 1))]).unwrap(),
            Lottery::half()
        );
        assert!(matches!(
            lottery_mix(&[(Prob::new(1, 2), q)]),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn lottery_rejects_out_of_range() {
        assert!(Lottery::from_ratio(6, 5).is_err());
        assert!(Lottery::from_ratio(-1, 5).is_err());
        assert_eq!(lot(2, 5).pb(), Prob::new(3, 5));
    }

    #[test]
    fn display_is_num_over_den() {
        assert_eq!(lot(1, 5).to_string(), "pA=1/5");
        assert_eq!(Lottery::degenerate(Alternative::A).to_string(), "pA=1/1");
    }
}
