// Confirmations with abstention: two majority votes and a universal `Y`
// settle the decision after three votes.

use majority_mechanisms::equilibrium::{rc_voting_deviation, verify_implementation, Budget, Mechanism};
use majority_mechanisms::model::PreferenceProfile;
use majority_mechanisms::rc::{ConfirmationAction, RcVariant, VotingProfile};
use majority_mechanisms::simulate::{play_rc, ConfirmationPlan};
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let prefs: PreferenceProfile = "aaabb".parse()?;
    let votes: VotingProfile = "aa---".parse()?;
    let stable = rc_voting_deviation(&votes, &prefs, RcVariant::Abstention)?.is_none();
    let t = play_rc(&votes, &ConfirmationPlan::Always(ConfirmationAction::Yes), RcVariant::Abstention, 1)?;
    out.push_str(&t.to_string());
    out.push_str(&format!(
        "sustained={stable} votes={} stages={}\n",
        t.votes_cast(),
        t.stages()
    ));
    let report = verify_implementation(Mechanism::Rc(RcVariant::Abstention), 5, &Budget::DEFAULT)?;
    out.push_str(&format!("all profiles at n=5 pass: {}\n", report.pass));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
