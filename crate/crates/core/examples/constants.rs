//! Exponents and boundary/origin constants for a few parameter sets, including an
//! exact rational evaluation.

use elliptic_blowup::params::{biharmonic_constant, derived_quantities, ratio, ProblemParams, RationalParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [
        ProblemParams::unweighted(3.0, 2.0, 2.0),
        ProblemParams::unweighted(8.0, 1.0, 3.0),
        ProblemParams::new(3.0, 1.0, 0.0, 2.0, 2.0),
    ] {
        println!("{}", serde_json::to_string(&derived_quantities(&p)?)?);
    }

    let exact = RationalParams::new(ratio(3, 1), ratio(1, 1), ratio(0, 1), ratio(2, 1), ratio(2, 1));
    let e = exact.exponents()?;
    println!("exact: gamma_ab = {}, xi_ab = {}", e.gamma_ab, e.xi_ab);

    let b = biharmonic_constant(3.0, 0.0)?;
    println!("biharmonic mu=3: A^2 = {} (the (3mu-1) variant would give {})", b.a_pow, b.printed_variant_a_pow);
    Ok(())
}
