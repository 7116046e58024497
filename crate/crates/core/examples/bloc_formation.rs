// Bloc Formation: nomination graph, blocs, weights and a profitable
// bloc-breaking deviation.

use majority_mechanisms::bf::{bf_outcome, build_graph, find_all_blocs, find_effective_bloc, BfProfile};
use majority_mechanisms::equilibrium::{enumerate_nash_bf, is_nash_bf, Budget};
use majority_mechanisms::model::PreferenceProfile;
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    // agents 1-3 prefer a, yet everybody votes b
    let profile: BfProfile = "votes: bbbbb\n1: 4,5\n2: 1,3\n3: 1,2\n4: 1,5\n5: 1,4\n".parse()?;
    let prefs: PreferenceProfile = "aaabb".parse()?;

    out.push_str(&format!("nominations received: {:?}\n", build_graph(&profile).column_sums()));
    for bloc in find_all_blocs(&profile) {
        out.push_str(&format!("bloc {bloc}\n"));
    }
    if let Some(bloc) = find_effective_bloc(&profile)? {
        out.push_str(&format!("effective bloc {bloc}\n"));
    }
    out.push_str(&format!("outcome {}\n", bf_outcome(&profile)));
    if let Some(w) = is_nash_bf(&profile, &prefs)?.witness() {
        out.push_str(&format!("not an equilibrium: {w}\n"));
    }

    let equilibria = enumerate_nash_bf(&"aab".parse()?, &Budget::DEFAULT)?;
    out.push_str(&format!("n=3, R=aab: {} equilibria, first with outcome {}\n", equilibria.len(), equilibria[0].1));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
