//! Pure Nash equilibria of the Bloc Formation mechanism.

use num_integer::binomial;
use rayon::prelude::*;

use super::{Budget, DeviationWitness, Verdict};
use crate::agent::AgentId;
use crate::bf::{bf_outcome, message_space, BfMessage, BfProfile};
use crate::error::{Error, Result};
use crate::model::{strictly_prefers, Alternative, Lottery, PreferenceProfile, Prob};

/// Deviations of `agent` in witness scan order: the vote flip that keeps her
/// nominations comes first, then every other message with vote `a` before
/// `b` and nominations in lexicographic order.
pub fn deviation_scan_order(profile: &BfProfile, agent: AgentId) -> Vec<BfMessage> {
    let current = profile.message(agent);
    let flip = current.vote_flipped();
    std::iter::once(flip)
        .chain(
            message_space(profile.n(), agent)
                .into_iter()
                .filter(|&m| m != current && m != flip),
        )
        .collect()
}

/// Checks every unilateral deviation; returns the first profitable one in
/// [`deviation_scan_order`] with agents in increasing order.
pub fn is_nash_bf(
    profile: &BfProfile,
    prefs: &PreferenceProfile,
) -> Result<Verdict<DeviationWitness<BfMessage>>> {
    if profile.n() != prefs.n() {
        return Err(Error::Domain(format!(
            "profile has {} agents, preferences {}",
            profile.n(),
            prefs.n()
        )));
    }
    let before = bf_outcome(profile);
    for agent in profile.agents() {
        let preferred = prefs.preferred(agent);
        for to in deviation_scan_order(profile, agent) {
            let after = bf_outcome(&profile.with_message(agent, to)?);
            if strictly_prefers(preferred, &after, &before) {
                return Ok(Verdict::Fail(DeviationWitness {
                    agent,
                    from: profile.message(agent),
                    to,
                    before,
                    after,
                }));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Every message profile of a population together with its outcome and, for
/// each agent, the best and worst probability of `a` she can reach by
/// changing only her own message. Building it once serves all preference
/// profiles of that size.
pub struct BfGame {
    n: usize,
    p: usize,
    messages: Vec<Vec<BfMessage>>,
    radix: usize,
    /// Numerator of the probability of `a` over `n p`.
    outcome: Vec<u16>,
    /// Indexed by `profile * n + agent`.
    reach_max: Vec<u16>,
    reach_min: Vec<u16>,
}

impl BfGame {
    pub fn new(n: usize, budget: &Budget) -> Result<Self> {
        if !(2..=16).contains(&n) {
            return Err(Error::Capacity(format!(
                "exhaustive Bloc Formation search supports 2 <= n <= 16, got {n}"
            )));
        }
        let p = n / 2;
        let radix = 2 * binomial(n - 1, p);
        let total = (radix as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > budget.bf_profiles as u128 {
            return Err(Error::Capacity(format!(
                "{total} message profiles at n={n} exceed the budget of {}; use sampled property tests instead",
                budget.bf_profiles
            )));
        }
        let total = total as usize;
        let messages: Vec<Vec<BfMessage>> = (0..n).map(|i| message_space(n, AgentId::from_index(i))).collect();

        let noms: Vec<Vec<u32>> = messages
            .iter()
            .map(|ms| ms.iter().map(|m| m.nominations.bits()).collect())
            .collect();
        let votes_a: Vec<Vec<bool>> = messages
            .iter()
            .map(|ms| ms.iter().map(|m| m.vote == Alternative::A).collect())
            .collect();

        let outcome: Vec<u16> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut rows = [0u32; 16];
                let mut a_mask = 0u32;
                let mut rest = idx;
                for i in 0..n {
                    let d = rest % radix;
                    rest /= radix;
                    rows[i] = noms[i][d];
                    if votes_a[i][d] {
                        a_mask |= 1 << i;
                    }
                }
                fast_outcome(n, p, a_mask, &rows[..n])
            })
            .collect();

        // Extremes along each agent's line of unilateral deviations.
        let mut reach_max = vec![0u16; total * n];
        let mut reach_min = vec![0u16; total * n];
        let mut stride = 1usize;
        for i in 0..n {
            for base in 0..total {
                if (base / stride) % radix != 0 {
                    continue;
                }
                let line = (0..radix).map(|d| outcome[base + d * stride]);
                let hi = line.clone().max().expect("radix > 0");
                let lo = line.min().expect("radix > 0");
                for d in 0..radix {
                    let idx = base + d * stride;
                    reach_max[idx * n + i] = hi;
                    reach_min[idx * n + i] = lo;
                }
            }
            stride *= radix;
        }

        Ok(BfGame {
            n,
            p,
            messages,
            radix,
            outcome,
            reach_max,
            reach_min,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profile_count(&self) -> usize {
        self.outcome.len()
    }

    pub fn profile(&self, idx: usize) -> BfProfile {
        let mut rest = idx;
        let msgs = (0..self.n)
            .map(|i| {
                let d = rest % self.radix;
                rest /= self.radix;
                self.messages[i][d]
            })
            .collect();
        BfProfile::new(msgs).expect("enumerated messages are valid")
    }

    pub fn outcome(&self, idx: usize) -> Lottery {
        Lottery::new(Prob::new(self.outcome[idx] as i128, (self.n * self.p) as i128))
            .expect("numerator within [0, n p]")
    }

    /// Indices of the message profiles that are Nash equilibria under `prefs`.
    pub fn equilibrium_indices(&self, prefs: &PreferenceProfile) -> Result<Vec<usize>> {
        if prefs.n() != self.n {
            return Err(Error::Domain(format!(
                "game has {} agents, preferences {}",
                self.n,
                prefs.n()
            )));
        }
        let likes_a: Vec<bool> = prefs.as_slice().iter().map(|&x| x == Alternative::A).collect();
        let n = self.n;
        Ok((0..self.outcome.len())
            .into_par_iter()
            .filter(|&idx| {
                let o = self.outcome[idx];
                (0..n).all(|i| {
                    if likes_a[i] {
                        o == self.reach_max[idx * n + i]
                    } else {
                        o == self.reach_min[idx * n + i]
                    }
                })
            })
            .collect())
    }

    pub fn equilibria(&self, prefs: &PreferenceProfile) -> Result<Vec<(BfProfile, Lottery)>> {
        Ok(self
            .equilibrium_indices(prefs)?
            .into_iter()
            .map(|idx| (self.profile(idx), self.outcome(idx)))
            .collect())
    }
}

/// Outcome numerator over `n p` for a profile given as an `a`-voter mask and
/// nomination rows.
fn fast_outcome(n: usize, p: usize, a_mask: u32, rows: &[u32]) -> u16 {
    let everyone = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for (mask, win) in [(a_mask, (n * p) as u16), (everyone & !a_mask, 0u16)] {
        let mut set = mask;
        loop {
            let mut leaking = 0u32;
            let mut bits = set;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if rows[i] & !set != 0 {
                    leaking |= 1 << i;
                }
            }
            if leaking == 0 {
                break;
            }
            set &= !leaking;
        }
        if set.count_ones() as usize > p {
            return win;
        }
    }
    rows.iter().map(|r| (r & a_mask).count_ones() as u16).sum()
}

/// Every pure Nash equilibrium at `prefs`, with its outcome.
pub fn enumerate_nash_bf(prefs: &PreferenceProfile, budget: &Budget) -> Result<Vec<(BfProfile, Lottery)>> {
    BfGame::new(prefs.n(), budget)?.equilibria(prefs)
}
