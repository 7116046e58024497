//! Line-oriented scenario files.
//!
//! ```text
//! # Example 2
//! mechanism: bf
//! prefs: aaabb
//! votes: bbbbb
//! 1: 4,5
//! 2: 1,3
//! 3: 1,2
//! 4: 1,5
//! 5: 1,4
//! ```
//!
//! Recognised keys are `n`, `prefs`, `mechanism` (`bf` or `rc`), `variant`
//! (`baseline`, `abstention`, `supermajority`, `even`), `k`, `q`, `mode`
//! (`full` or `shares`), `seed`, `budget`, `votes`, `order` (a committee
//! order such as `1,2,5`) and `confirm` (`truthful`, `yes`, `no`). Numeric
//! keys give an agent's nominations. `#` starts a comment.

use std::str::FromStr;

use crate::bayes::{BeliefModel, DisclosureMode};
use crate::bf::{profile_from_fields, BfProfile};
use crate::error::{Error, Result};
use crate::model::{PreferenceProfile, Prob};
use crate::rc::{ConfirmationAction, ConfirmationDraw, RcVariant, VotingProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechanismKind {
    Bf,
    Rc,
}

impl FromStr for MechanismKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bf" => Ok(MechanismKind::Bf),
            "rc" => Ok(MechanismKind::Rc),
            other => Err(format!("unknown mechanism `{other}`, expected bf or rc")),
        }
    }
}

/// Name of an RC variant before its `k` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantKind {
    Baseline,
    Abstention,
    Supermajority,
    Even,
}

impl FromStr for VariantKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "baseline" => Ok(VariantKind::Baseline),
            "abstention" => Ok(VariantKind::Abstention),
            "supermajority" => Ok(VariantKind::Supermajority),
            "even" => Ok(VariantKind::Even),
            other => Err(format!(
                "unknown variant `{other}`, expected baseline, abstention, supermajority or even"
            )),
        }
    }
}

impl VariantKind {
    pub fn with_k(self, k: Option<usize>) -> std::result::Result<RcVariant, String> {
        match (self, k) {
            (VariantKind::Supermajority, Some(k)) => Ok(RcVariant::Supermajority { k }),
            (VariantKind::Supermajority, None) => Err("the supermajority variant needs k".into()),
            (_, Some(_)) => Err("k only applies to the supermajority variant".into()),
            (VariantKind::Baseline, None) => Ok(RcVariant::Baseline),
            (VariantKind::Abstention, None) => Ok(RcVariant::Abstention),
            (VariantKind::Even, None) => Ok(RcVariant::EvenN),
        }
    }
}

pub fn parse_mode(s: &str) -> std::result::Result<DisclosureMode, String> {
    match s {
        "full" => Ok(DisclosureMode::FullProfile),
        "shares" => Ok(DisclosureMode::SharesOnly),
        other => Err(format!("unknown disclosure mode `{other}`, expected full or shares")),
    }
}

/// Parses `3/10`, `0.3` or `1`.
pub fn parse_prob(s: &str) -> std::result::Result<Prob, String> {
    let bad = || format!("`{s}` is not a probability");
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Prob::new(num, den));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i128.pow(frac.len() as u32);
    let int: i128 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: i128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Prob::new(int * den + frac, den))
}

pub fn parse_confirm(s: &str) -> std::result::Result<ConfirmChoice, String> {
    match s {
        "truthful" => Ok(ConfirmChoice::Truthful),
        "yes" | "Y" => Ok(ConfirmChoice::Always(ConfirmationAction::Yes)),
        "no" | "N" => Ok(ConfirmChoice::Always(ConfirmationAction::No)),
        "abstain" => Ok(ConfirmChoice::Always(ConfirmationAction::Abstain)),
        other => Err(format!("unknown confirmation plan `{other}`, expected truthful, yes, no or abstain")),
    }
}

/// Confirmation behaviour requested for a simulated play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfirmChoice {
    Truthful,
    Always(ConfirmationAction),
}

/// Values read from a scenario file; every field is optional so that
/// command-line flags can fill or override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub n: Option<usize>,
    pub prefs: Option<PreferenceProfile>,
    pub mechanism: Option<MechanismKind>,
    pub variant: Option<VariantKind>,
    pub k: Option<usize>,
    pub q: Option<Prob>,
    pub mode: Option<DisclosureMode>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub confirm: Option<ConfirmChoice>,
    pub order: Option<ConfirmationDraw>,
    /// The `votes` line with its line number.
    pub votes: Option<(usize, String)>,
    /// Nomination lines as `(line, agent, list)`.
    pub nominations: Vec<(usize, String, String)>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sc = Scenario::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once(':').ok_or_else(|| Error::Parse {
                line,
                reason: format!("expected `key: value`, got `{body}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let fail = |reason: String| Error::Parse { line, reason };
            let number = |what: &str| -> Result<u64> {
                value
                    .parse()
                    .map_err(|_| fail(format!("{what} `{value}` is not a non-negative integer")))
            };
            match key {
                "n" => sc.n = Some(number("n")? as usize),
                "prefs" => sc.prefs = Some(value.parse().map_err(|e: Error| fail(e.to_string()))?),
                "mechanism" => sc.mechanism = Some(value.parse().map_err(fail)?),
                "variant" => sc.variant = Some(value.parse().map_err(fail)?),
                "k" => sc.k = Some(number("k")? as usize),
                "q" => sc.q = Some(parse_prob(value).map_err(fail)?),
                "mode" => sc.mode = Some(parse_mode(value).map_err(fail)?),
                "seed" => sc.seed = Some(number("seed")?),
                "budget" => sc.budget = Some(number("budget")?),
                "confirm" => sc.confirm = Some(parse_confirm(value).map_err(fail)?),
                "order" => {
                    let numbers = value
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| fail(format!("order `{value}` is not a list of agents")))?;
                    if numbers.iter().any(|&a| a == 0 || a > crate::agent::MAX_AGENTS) {
                        return Err(fail(format!("order `{value}` names an agent outside the population")));
                    }
                    sc.order = Some(ConfirmationDraw::from_numbers(&numbers).map_err(|e| fail(e.to_string()))?);
                }
                "votes" => sc.votes = Some((line, value.to_string())),
                _ if key.chars().all(|c| c.is_ascii_digit()) => {
                    sc.nominations.push((line, key.to_string(), value.to_string()))
                }
                other => return Err(fail(format!("unknown field `{other}`"))),
            }
        }
        sc.check()?;
        Ok(sc)
    }

    fn check(&self) -> Result<()> {
        if let (Some(n), Some(prefs)) = (self.n, &self.prefs) {
            if prefs.n() != n {
                return Err(Error::Domain(format!("n is {n} but prefs has {} agents", prefs.n())));
            }
        }
        if let Some(variant) = self.variant {
            variant.with_k(self.k).map_err(Error::Domain)?;
        }
        Ok(())
    }

    /// Population size from `n`, `prefs` or `votes`, in that order.
    pub fn population(&self) -> Option<usize> {
        self.n
            .or(self.prefs.as_ref().map(|p| p.n()))
            .or(self.votes.as_ref().map(|(_, v)| v.chars().filter(|c| !c.is_whitespace() && *c != ',').count()))
    }

    pub fn rc_variant(&self) -> Result<RcVariant> {
        self.variant
            .unwrap_or(VariantKind::Baseline)
            .with_k(self.k)
            .map_err(Error::Domain)
    }

    pub fn beliefs(&self) -> Result<Option<BeliefModel>> {
        self.q.map(BeliefModel::new).transpose()
    }

    /// The message profile given by `votes` and the nomination lines.
    pub fn bf_profile(&self) -> Result<BfProfile> {
        let (line, votes) = self.votes.as_ref().ok_or(Error::Parse {
            line: 0,
            reason: "missing `votes:` line".into(),
        })?;
        profile_from_fields(*line, votes, &self.nominations)
    }

    /// The voting-stage profile given by `votes`.
    pub fn voting_profile(&self) -> Result<VotingProfile> {
        let (line, votes) = self.votes.as_ref().ok_or(Error::Parse {
            line: 0,
            reason: "missing `votes:` line".into(),
        })?;
        votes.parse().map_err(|e: Error| Error::Parse {
            line: *line,
            reason: e.to_string(),
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::parse(s)
    }
}
