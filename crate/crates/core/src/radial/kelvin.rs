use super::{RadialJet, RadialSystem, RadialTrajectory, Sample};
use crate::params::ProblemParams;

/// Kelvin image of a jet: `ū(ρ) = ρ^{2−N} u(1/ρ)` and likewise for `v`, at `ρ = 1/r`.
/// The image solves the system with weights `ā`, `b̄` from [`ProblemParams::kelvin`].
pub fn kelvin_jet(params: &ProblemParams, j: &RadialJet) -> RadialJet {
    let n = params.n;
    let rho = 1.0 / j.r;
    let k = 2.0 - n;
    let p_k = rho.powf(k);
    let p_1n = rho.powf(1.0 - n);
    let p_n = rho.powf(-n);
    let p_n1 = rho.powf(-n - 1.0);
    let p_n2 = rho.powf(-n - 2.0);
    let map = |w: f64, wp: f64, wpp: f64| {
        let f = p_k * w;
        let fp = k * p_1n * w - p_n * wp;
        let fpp = (n - 1.0) * (n - 2.0) * p_n * w + 2.0 * (n - 1.0) * p_n1 * wp + p_n2 * wpp;
        (f, fp, fpp)
    };
    let (u, up, upp) = map(j.u, j.up, j.upp);
    let (v, vp, vpp) = map(j.v, j.vp, j.vpp);
    RadialJet { r: rho, u, up, upp, v, vp, vpp }
}

/// Apply the Kelvin transform sample by sample. The grid is mapped in place, so an
/// outward trajectory becomes an inward one; transforming twice restores the input.
pub fn kelvin_transform(traj: &RadialTrajectory) -> RadialTrajectory {
    let params = &traj.system.params;
    let system = RadialSystem {
        params: params.kelvin(),
        mode: traj.system.mode,
    };
    let samples = traj
        .samples
        .iter()
        .filter(|s| s.r > 0.0)
        .map(|s| {
            let k = kelvin_jet(params, &traj.system.jet(&s.state()));
            Sample { r: k.r, u: k.u, up: k.up, v: k.v, vp: k.vp, err: s.err }
        })
        .collect();
    RadialTrajectory {
        system,
        initial_data: None,
        samples,
        crossings: vec![],
        termination: traj.termination,
    }
}
