//! Map a blowing-up solution into the boundary chart and reduce it to the plane.

use elliptic_blowup::params::ProblemParams;
use elliptic_blowup::phase::{reduce_to_2d, PhaseTrajectory};
use elliptic_blowup::radial::{estimate_blowup_radius_with, integrate_regular, IntegratorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemParams::unweighted(1.0, 2.0, 2.0);
    let traj = integrate_regular(&p, 1.0, 1.0, 100.0, &IntegratorConfig::default())?;
    let r = estimate_blowup_radius_with(&traj)?.r_hat;
    let phase = PhaseTrajectory::boundary_from_radial(&traj, r, 1e-6)?;
    println!("measured k = {:.6}", phase.measured_k(0.1f64.ln()));
    let reduced = reduce_to_2d(&phase)?;
    let pts = reduced.sorted_by_tau();
    for q in pts.iter().step_by(pts.len() / 8 + 1) {
        println!("tau = {:>9.4}  x = {:.8}  y = {:.8}", q.tau, q.x, q.y);
    }
    Ok(())
}
