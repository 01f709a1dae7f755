//! The named instances of the scheme, and classical logic programming as one of them.

use sqclp::frontend::{load_program, parse_goal, Preset};
use sqclp::sqchl::{solve, SearchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in Preset::ALL {
        println!("{:<6} {}", p.name(), p.signature());
    }
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/family.sqclp");
    let program = load_program(&std::fs::read_to_string(path)?).map_err(|d| format!("{d:?}"))?;
    let goal = parse_goal("?- ancestor(tom,D)#Q", &program.qdom)?;
    for s in solve(&program, &goal, &SearchOptions::default())? {
        println!("{s}");
    }
    let rejected = load_program("#preset QLP\n~(a,b) = (0.5,1)\np(a).\n");
    println!(
        "proximity under QLP: {:?}",
        rejected.err().map(|d| d[0].to_string())
    );
    Ok(())
}
