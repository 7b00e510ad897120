//! Integrate a regular solution until it blows up and extrapolate the radius.

use elliptic_blowup::params::ProblemParams;
use elliptic_blowup::radial::{estimate_blowup_radius, IntegratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegratorConfig::default();
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    for (u0, v0) in [(1.0, 1.0), (1.0, 0.0), (0.3, 1.0), (4.0, 4.0)] {
        let est = estimate_blowup_radius(&p, u0, v0, &cfg)?;
        println!("(u0, v0) = ({u0}, {v0}):  R = {:.12}  (err {:.1e})", est.r_hat, est.err);
    }

    // N = 1 with δ = μ = 3 and equal data: the radius is a complete elliptic integral.
    let p = ProblemParams::unweighted(1.0, 3.0, 3.0);
    let est = estimate_blowup_radius(&p, 1.0, 1.0, &cfg)?;
    println!("N = 1: R = {:.13}", est.r_hat);
    for t in &est.trail {
        println!("  u = {:>8.1e} at r = {:.12}  ->  R_u = {:.13}", t.threshold, t.r, t.r_hat_u);
    }
    Ok(())
}
