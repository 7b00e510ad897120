//! Catalog of the origin-chart fixed points with their spectra, and the quartic at M0.

use elliptic_blowup::manifolds::{fixed_point_catalog, m0_spectrum};
use elliptic_blowup::params::ProblemParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    for rec in fixed_point_catalog(&p)? {
        let spectrum: Vec<String> = rec
            .spectrum
            .iter()
            .map(|l| if l.im == 0.0 { format!("{:.4}", l.re) } else { format!("{:.4}{:+.4}i", l.re, l.im) })
            .collect();
        println!(
            "{:>3} {:?}  admissible={:<5} defective={:<5} [{}]",
            rec.label.to_string(),
            rec.coords,
            rec.admissible,
            rec.defective,
            spectrum.join(", ")
        );
    }
    let m = m0_spectrum(&p)?;
    println!("M0: lambda3 = {:.10}, lambda4 = {:.10}, pair = {:.6}", m.lambda3, m.lambda4, m.pair[0]);
    println!("stable eigenvector {:?}", m.eigenvector3);
    Ok(())
}
