// Even electorates: ties resolve to the even lottery under Bloc Formation,
// and Random Confirmations sustains both a tie and a unanimous vote.

use majority_mechanisms::equilibrium::{enumerate_nash_bf, rc_sustainable_profiles, Budget};
use majority_mechanisms::model::{Lottery, PreferenceProfile};
use majority_mechanisms::rc::RcVariant;
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let tie: PreferenceProfile = "abab".parse()?;
    let bf = enumerate_nash_bf(&tie, &Budget::DEFAULT)?;
    let all_half = bf.iter().all(|(_, o)| *o == Lottery::half());
    out.push_str(&format!("bloc formation at {tie}: {} equilibria, all pA=1/2: {all_half}\n", bf.len()));
    for (v, o) in rc_sustainable_profiles(&tie, RcVariant::EvenN, &Budget::DEFAULT)? {
        out.push_str(&format!("confirmations at {tie}: v={v} sustained with {o}\n"));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
