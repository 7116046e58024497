// Scenario files and the command-line front end driven from code.

use majority_mechanisms::cli::run;
use majority_mechanisms::scenario::Scenario;
use majority_mechanisms::Result;

const SCENARIO: &str = "\
# a bloc for b that a majority agent can break
mechanism: bf
prefs: aaabb
votes: bbbbb
1: 4,5
2: 1,3
3: 1,2
4: 1,5
5: 1,4
";

pub fn run_example() -> Result<String> {
    let scenario = Scenario::parse(SCENARIO)?;
    let mut out = format!("{}", scenario.bf_profile()?);
    let path = std::env::temp_dir().join(format!("majority-example-{}.txt", std::process::id()));
    std::fs::write(&path, SCENARIO).expect("temp file is writable");
    let result = run(["majority".as_ref(), "bf-outcome".as_ref(), path.as_os_str()]);
    std::fs::remove_file(&path).ok();
    out.push_str(&format!("exit code {}\n{}", result.code, result.text));
    let play = run(["majority", "rc-play", "--votes", "abbbb", "--prefs", "aaabb", "--seed", "3"]);
    out.push_str(&play.text);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
