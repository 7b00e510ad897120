//! Near the boundary the four-dimensional flow is driven by a planar system. Check the
//! Dulac certificate and watch random starts converge to its sink.

use elliptic_blowup::ode::Tolerances;
use elliptic_blowup::phase::{dulac_certificate, integrate_reduced2, m0_spectrum, reduced2_fixed_points, ReducedRegion};
use elliptic_blowup::params::ratio;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (d, m) = (2.0, 2.0);
    let exact = dulac_certificate(&ratio(2, 1), &ratio(2, 1))?;
    println!("Dulac weight x^{} (y - {})^(-{}), divergence factor M = {}", exact.p, exact.c, exact.q, exact.m);
    let fp = reduced2_fixed_points(&d, &m);
    println!("sink m0 = {:?}, eigenvalues {:?}", fp.m0, m0_spectrum(d, m)?);

    let region = ReducedRegion { k: 3.0, delta: d, mu: m };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    for _ in 0..5 {
        let s = region.sample(&mut rng);
        let path = integrate_reduced2(d, m, s, 60.0, &tol)?;
        let end = path.last().unwrap();
        println!("({:.3}, {:.3}) -> ({:.10}, {:.10})", s[0], s[1], end.x, end.y);
    }
    Ok(())
}
