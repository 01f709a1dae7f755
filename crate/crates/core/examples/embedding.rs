//! Qualification values as constraint terms: the encoding and the bound constraint.

use sqclp::cdom::{satisfiable, ConstraintDomain};
use sqclp::embed::{expressible, Embedding};
use sqclp::qualdom::{QualDomain, QualValue};
use sqclp::rational::parse_rational;
use sqclp::syntax::{Substitute, Substitution, Var, VarGen};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let uw = QualDomain::product(QualDomain::Uncertainty, QualDomain::Weight);
    println!(
        "U*W expressible in R: {}",
        expressible(&uw, ConstraintDomain::Real)
    );
    println!(
        "U*W expressible in H: {}",
        expressible(&uw, ConstraintDomain::Herbrand)
    );

    let emb = Embedding::new(uw.clone());
    let v = |c: &str, w: &str| {
        QualValue::pair(
            QualValue::certainty(parse_rational(c).unwrap()),
            QualValue::weight(parse_rational(w).unwrap()),
        )
    };
    let (x, y, z) = (Var::new("X"), Var::new("Y"), Var::new("Z"));
    let bound = emb.qbound_constraint(&x, &y, &z, &mut VarGen::default());
    println!("qBound(X,Y,Z) = {bound}");

    let (alpha, body) = (v("0.75", "3"), v("0.8", "2"));
    for d in [v("0.6", "5"), v("0.7", "5"), v("0.6", "4")] {
        let s: Substitution = [(x.clone(), &d), (y.clone(), &alpha), (z.clone(), &body)]
            .into_iter()
            .map(|(var, q)| (var, emb.encode_value(q).unwrap()))
            .collect();
        let sat = satisfiable(ConstraintDomain::Real, &bound.apply(&s))?;
        let direct = uw.leq(&d, &uw.attenuate(&alpha, &body)?)?;
        println!("{d} <= {alpha} o {body}: constraint {sat:?}, lattice {direct}");
    }
    Ok(())
}
