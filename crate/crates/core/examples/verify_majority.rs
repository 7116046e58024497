// Exhaustive check that both mechanisms elect the majority option in every
// equilibrium, over every preference profile.

use majority_mechanisms::equilibrium::{verify_implementation, Budget, Mechanism};
use majority_mechanisms::rc::RcVariant;
use majority_mechanisms::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    let bf = verify_implementation(Mechanism::Bf, 3, &Budget::DEFAULT)?;
    out.push_str(&bf.table());
    let rc = verify_implementation(Mechanism::Rc(RcVariant::Baseline), 5, &Budget::DEFAULT)?;
    out.push_str(&rc.machine_lines());
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
