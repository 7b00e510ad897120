//! Kelvin transform of a regular solution: the image solves the system with shifted
//! weights and has a singularity at the origin instead of at a finite radius.

use elliptic_blowup::params::ProblemParams;
use elliptic_blowup::radial::{integrate_regular, kelvin_jet, kelvin_transform, IntegratorConfig, RadialSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemParams::new(3.0, 0.5, 0.0, 2.0, 2.0);
    let traj = integrate_regular(&p, 1.0, 0.5, 1.0, &IntegratorConfig::default())?;
    let image = kelvin_transform(&traj);
    let k = p.kelvin();
    println!("weights after the transform: a = {}, b = {}", k.a, k.b);
    let sys = RadialSystem::cone(k);
    let worst = traj
        .samples
        .iter()
        .filter(|s| s.r > 0.0)
        .map(|s| sys.relative_defect(&kelvin_jet(&p, &traj.system.jet(&s.state()))))
        .fold(0.0, f64::max);
    println!("largest relative defect of the image: {worst:.2e}");
    for s in image.samples.iter().step_by(image.samples.len() / 6 + 1) {
        println!("r = {:>10.4e}  u = {:>12.6e}  v = {:>12.6e}", s.r, s.u, s.v);
    }
    Ok(())
}
