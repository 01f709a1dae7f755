//! Satisfiability and entailment over Herbrand terms and linear real arithmetic.

use sqclp::cdom::{satisfiable, ConstraintDomain, ConstraintStore};
use sqclp::frontend::parser::{parse_atom, parse_constraints};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let herbrand = parse_constraints("X == f(Y), Y == a")?;
    println!(
        "{herbrand}: {:?}",
        satisfiable(ConstraintDomain::Herbrand, &herbrand)?
    );
    let clash = parse_constraints("X == f(X)")?;
    println!(
        "{clash}: {:?}",
        satisfiable(ConstraintDomain::Herbrand, &clash)?
    );

    let pi = parse_constraints("cp_>=(A,3.0), op_+(A,A,X), op_*(2.0,A,Y)")?;
    let store = ConstraintStore::new(ConstraintDomain::Real, &pi)?;
    println!("store {pi}: {:?}", store.status());
    for goal in ["c(X) == c(Y)", "cp_>=(X,6)", "cp_>(X,6)", "op_+(X,Y,Z)"] {
        println!("  entails {goal}: {:?}", store.entails(&parse_atom(goal)?)?);
    }
    let empty = parse_constraints("cp_<(X,1), cp_>(X,1/2), cp_>=(X, 1)")?;
    println!(
        "{empty}: {:?}",
        satisfiable(ConstraintDomain::Real, &empty)?
    );
    Ok(())
}
