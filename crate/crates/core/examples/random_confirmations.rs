// Random Confirmations: forward play with fixed and seeded committee orders,
// and the expected outcome of a voting profile.

use majority_mechanisms::model::PreferenceProfile;
use majority_mechanisms::rc::{expected_outcome, ConfirmationDraw, RcVariant, VotingProfile};
use majority_mechanisms::simulate::{play_rc, play_with_draw, ConfirmationPlan};
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let prefs: PreferenceProfile = "aaabb".parse()?;
    let plan = ConfirmationPlan::Truthful(prefs.clone());
    let deviation: VotingProfile = "abbbb".parse()?;

    for order in [[1, 2, 5], [1, 2, 3]] {
        let draw = ConfirmationDraw::from_numbers(&order)?;
        let t = play_with_draw(&deviation, &plan, RcVariant::Baseline, Some(draw))?;
        out.push_str(&t.to_string());
    }
    let t = play_rc(&deviation, &plan, RcVariant::Baseline, 7)?;
    out.push_str(&format!("seed 7 draws {}\n", t.draw.as_ref().expect("stage winner")));
    out.push_str(&format!(
        "expected outcome over all committees: {}\n",
        expected_outcome(&deviation, &prefs, RcVariant::Baseline)?
    ));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
