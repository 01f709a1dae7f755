//! A non-transitive proximity relation and the closeness of terms under constraints.

use sqclp::cdom::{ConstraintDomain, ConstraintStore};
use sqclp::frontend::parser::{parse_constraints, parse_term};
use sqclp::proximity::{ProxSymbol, ProximityTable};
use sqclp::qualdom::{QualDomain, QualValue};
use sqclp::rational::parse_rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = |s: &str| QualValue::certainty(parse_rational(s).unwrap());
    let mut table = ProximityTable::new(QualDomain::Uncertainty);
    table.insert(ProxSymbol::name("colt"), ProxSymbol::name("cold"), c("0.9"))?;
    table.insert(ProxSymbol::name("cold"), ProxSymbol::name("gold"), c("0.9"))?;
    table.insert(ProxSymbol::name("colt"), ProxSymbol::name("gold"), c("0.4"))?;
    table.insert(ProxSymbol::name("c'"), ProxSymbol::name("c"), c("0.8"))?;

    for (a, b) in [("colt", "cold"), ("colt", "gold"), ("gold", "gold")] {
        println!(
            "R({a},{b}) = {}",
            table.sym_prox(&ProxSymbol::name(a), &ProxSymbol::name(b))
        );
    }

    let store = ConstraintStore::new(
        ConstraintDomain::Real,
        &parse_constraints("op_+(A,A,X), op_*(2.0,A,Y), Z == c(X,Y)")?,
    )?;
    let t = parse_term("c'(Y,X)")?;
    let z = parse_term("Z")?;
    for lambda in ["0.7", "0.8", "0.9"] {
        let (verdict, _) = table.close_at(&store, &c(lambda), &t, &z)?;
        println!("{t} close to {z} at {lambda}: {verdict:?}");
    }
    Ok(())
}
