// Supermajority confirmations: the policy needs p + k supporters, and the
// committee size depends on which option won the vote.

use majority_mechanisms::equilibrium::{rc_sustainable_profiles, Budget};
use majority_mechanisms::model::{maj_k, Alternative, PreferenceProfile};
use majority_mechanisms::rc::{t_bar, RcVariant};
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let prefs: PreferenceProfile = "abbba".parse()?;
    for k in 1..=3 {
        let variant = RcVariant::Supermajority { k };
        let sustained = rc_sustainable_profiles(&prefs, variant, &Budget::DEFAULT)?;
        out.push_str(&format!(
            "k={k}: rule selects {}, committee {} after sq wins and {} after x wins, {} sustained profiles, outcome {}\n",
            maj_k(&prefs, k)?,
            t_bar(Alternative::SQ, variant, 5)?,
            t_bar(Alternative::X, variant, 5)?,
            sustained.len(),
            sustained[0].1
        ));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
