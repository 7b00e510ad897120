//! The curve of initial data whose solutions blow up exactly at radius 1.

use elliptic_blowup::blowcurve::{trace_s, CurveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = CurveOptions { n_points: 9, ..Default::default() };
    let t = trace_s(3.0, 2.0, 3.0, &opts)?;
    println!("endpoints {:?}", t.endpoints);
    for p in &t.points {
        println!("theta = {:.4}  (u0, v0) = ({:.6}, {:.6})  rho = {:.10}", p.theta, p.u0, p.v0, p.rho_check.unwrap());
    }
    println!("max |rho - 1| = {:.1e}", t.max_rho_residual.unwrap());
    Ok(())
}
