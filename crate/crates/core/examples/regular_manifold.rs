//! Regular solutions with `v(0) = 0` leave the fixed point R0 along its unstable
//! direction. Launch from there and recover `u(0)` and the behaviour of `v` near 0.

use elliptic_blowup::manifolds::{launch, EigenSelector, FixedPoint, LaunchOptions};
use elliptic_blowup::params::ProblemParams;
use elliptic_blowup::phase::from_phase_origin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let opts = LaunchOptions { orient_by: Some(2), t_span: 30.0, ..Default::default() };
    let l = launch(&p, FixedPoint::R0, EigenSelector::MostPositive, &opts)?;
    println!(
        "eigenvalue {:.6}, initial rate {:.6}, fitted rate {:?}, stopped: {:?}",
        l.eigenvalue[0], l.initial_rate, l.fitted_rate, l.exit
    );
    let first = l.trajectory.points[0];
    let r = first.t.exp();
    let (u0, v) = from_phase_origin(&p, &first, r)?;
    println!("u(0) = {u0:.8e}; v/r^2 = {:.8e} vs u0^2/6 = {:.8e}", v / (r * r), u0 * u0 / 6.0);
    Ok(())
}
