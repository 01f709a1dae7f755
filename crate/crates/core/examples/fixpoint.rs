//! Least-fixpoint iteration of the immediate consequence operator over a ground scope.

use sqclp::frontend::load_program;
use sqclp::frontend::parser::parse_constraints;
use sqclp::semantics::{lfp_bounded, GroundScope};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/running.sqclp");
    let program = load_program(&std::fs::read_to_string(path)?).map_err(|d| format!("{d:?}"))?;
    let pi = parse_constraints("cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,Y)")?;
    let scope = GroundScope::new(&program, 1, vec![pi])?;
    let fix = lfp_bounded(&program, &scope, 5)?;
    for (k, stage) in fix.stages.iter().enumerate().skip(1) {
        println!("T_P^{k}: {} atoms", stage.len());
        for (atom, _, degrees) in stage
            .iter()
            .filter(|(a, ..)| a.to_string().contains("c'"))
            .take(4)
        {
            let ds: Vec<String> = degrees.iter().map(ToString::to_string).collect();
            println!("  {atom} # {}", ds.join(" | "));
        }
    }
    println!(
        "converged: {} after {} steps",
        fix.converged,
        fix.iterations()
    );
    Ok(())
}
