//! Fit the blow-up profile `u ≈ A (R − r)^{−γ}` of a computed solution.

use elliptic_blowup::asymptotics::fit_boundary_expansion;
use elliptic_blowup::params::{boundary_constants, ProblemParams};
use elliptic_blowup::radial::{estimate_blowup_radius_with, integrate_regular, IntegratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemParams::new(3.0, 0.5, 0.0, 2.0, 3.0);
    let traj = integrate_regular(&p, 1.0, 1.0, 100.0, &IntegratorConfig::default())?;
    let r = estimate_blowup_radius_with(&traj)?.r_hat;
    let fit = fit_boundary_expansion(&traj, r, 1e-2, 2e-2)?;
    let e = p.exponents()?;
    println!("R = {r:.10}");
    println!("u: exponent {:.6} (predicted {:.6}), constant {:.6} (predicted {:.6})",
        fit.u.fitted_exponent, e.gamma, fit.u.fitted_constant, fit.u.predicted_constant.unwrap());
    println!("v: exponent {:.6} (predicted {:.6}), constant {:.6} (predicted {:.6})",
        fit.v.fitted_exponent, e.xi, fit.v.fitted_constant, fit.v.predicted_constant.unwrap());
    println!("unit-radius constants A1 = {:.6}, B1 = {:.6}", boundary_constants(&p)?.a1, boundary_constants(&p)?.b1);
    println!("first-order correction bound {:.3e}, after halving {:.3e}", fit.correction_bound[0], fit.correction_bound[1]);
    println!("pass: {}", fit.pass());
    Ok(())
}
