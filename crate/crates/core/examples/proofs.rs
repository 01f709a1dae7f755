//! Building a proof tree, checking it, and seeing a tampered copy rejected.

use sqclp::frontend::json::{proof_from_json, proof_to_json};
use sqclp::frontend::load_program;
use sqclp::frontend::parser::{parse_atom, parse_constraints};
use sqclp::qualdom::QualValue;
use sqclp::rational::parse_rational;
use sqclp::semantics::QcAtom;
use sqclp::sqchl::{check_proof, prove};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/running.sqclp");
    let program = load_program(&std::fs::read_to_string(path)?).map_err(|d| format!("{d:?}"))?;
    let pi = parse_constraints("cp_>(X,1.0), op_+(A,A,X), op_*(2.0,A,Y)")?;
    let c = |s: &str| QualValue::certainty(parse_rational(s).unwrap());

    let phi = QcAtom::new(parse_atom("p'(c'(Y),c(X))")?, c("0.8"), pi);
    let tree = prove(&program, &phi, 2)?.ok_or("no proof within two steps")?;
    println!("{tree}");
    check_proof(&program, &tree)?;
    println!("accepted");

    let json = proof_to_json(&tree);
    println!("{}", serde_json::to_string_pretty(&json)?);
    let mut tampered = proof_from_json(&program.qdom, &json)?;
    tampered.conclusion_mut().degree = c("0.85");
    match check_proof(&program, &tampered) {
        Ok(()) => println!("tampered proof accepted?"),
        Err(e) => println!("tampered proof rejected: {e}"),
    }
    Ok(())
}
