// Private preferences: truthful play as a perfect Bayesian equilibrium under
// both disclosure modes, and the voting equilibria at n = 3.

use majority_mechanisms::bayes::{
    bne_deviation, enumerate_bne_voting_n3, verify_truthful_pbe, BeliefModel, DisclosureMode, VotingRule,
};
use majority_mechanisms::model::Alternative;
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let beliefs = BeliefModel::from_ratio(3, 10)?;
    for mode in DisclosureMode::BOTH {
        out.push_str(&verify_truthful_pbe(5, &beliefs, mode)?.to_string());
    }
    let equilibria = enumerate_bne_voting_n3(&beliefs)?;
    out.push_str(&format!("voting equilibria at n=3: {}\n", equilibria.len()));
    if let Some(w) = bne_deviation(&[VotingRule::Always(Alternative::B); 3], &beliefs)? {
        out.push_str(&format!("everybody voting b fails: {w}\n"));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
