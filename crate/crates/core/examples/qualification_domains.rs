//! Lattice operations and attenuation in the certainty, weight and product domains.

use sqclp::qualdom::{QualDomain, QualValue, Weight};
use sqclp::rational::parse_rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = QualDomain::Uncertainty;
    let w = QualDomain::Weight;
    let uw = QualDomain::product(u.clone(), w.clone());

    let c = |s: &str| QualValue::certainty(parse_rational(s).unwrap());
    let d = |s: &str| QualValue::weight(parse_rational(s).unwrap());

    println!("U: 0.75 o 0.8 = {}", u.attenuate(&c("0.75"), &c("0.8"))?);
    println!("U: 0.9 /\\ 0.8 = {}", u.glb(&c("0.9"), &c("0.8"))?);
    // Weights are costs: the order is reversed and attenuation adds.
    println!("W: 3 o 2 = {}", w.attenuate(&d("3"), &d("2"))?);
    println!("W: 3 <= 2 ? {}", w.leq(&d("3"), &d("2"))?);
    println!("W: bottom = {}", QualValue::Weight(Weight::Infinite));

    let alpha = QualValue::pair(c("0.75"), d("3"));
    let body = uw.inf([
        &QualValue::pair(c("0.9"), d("1")),
        &QualValue::pair(c("0.8"), d("2")),
    ])?;
    println!("UxW: {alpha} o inf(...) = {}", uw.attenuate(&alpha, &body)?);
    println!(
        "UxW: (0.6, 5) >= (0.55, 30) ? {}",
        uw.leq(
            &QualValue::pair(c("0.55"), d("30")),
            &QualValue::pair(c("0.6"), d("5"))
        )?
    );
    Ok(())
}
