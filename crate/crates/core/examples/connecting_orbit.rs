//! The orbit leaving M0 backward along its stable direction yields a solution defined
//! on all of (0, ∞), singular at the origin and decaying like the particular solution.

use elliptic_blowup::asymptotics::{fit_origin_behavior, keller_osserman_check};
use elliptic_blowup::manifolds::{connecting_orbit, OrbitOptions};
use elliptic_blowup::params::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [ProblemParams::unweighted(3.0, 2.0, 2.0), ProblemParams::unweighted(3.0, 1.2, 4.0)] {
        let o = connecting_orbit(&p, &OrbitOptions::default())?;
        println!("delta = {}, mu = {}: case {:?}, alpha-limit {:?}", p.delta, p.mu, o.case, o.alpha_limit_label);
        for c in &o.claims {
            println!("  [{}] {} ({:.2e})", if c.pass { "ok" } else { "FAIL" }, c.claim, c.value);
        }
        let fit = fit_origin_behavior(&o.log_solution, &p, 1e-2)?;
        println!("  origin behaviour {:?}: alpha = {:.5e}, beta = {:.5e}", fit.behavior, fit.alpha, fit.beta);
        let ko = keller_osserman_check(&o.log_solution, &p)?;
        println!("  sup r^gamma_ab u = {:.6}, sup r^xi_ab v = {:.6}", ko.max_u_weighted, ko.max_v_weighted);
    }
    Ok(())
}
