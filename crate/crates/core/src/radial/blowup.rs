use serde::{Deserialize, Serialize};

use super::{integrate_regular, natural_length, IntegratorConfig, RadialSystem, RadialTrajectory, Termination};
use crate::error::{Error, Result};
use crate::params::{boundary_constants, general_r_correction, ProblemParams};

/// Extrapolated blow-up radius of a regular solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimate {
    #[serde(rename = "R_hat")]
    pub r_hat: f64,
    pub err: f64,
    pub trail: Vec<TrailEntry>,
}

/// One threshold crossing and the two radii extrapolated from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub threshold: f64,
    pub r: f64,
    pub u: f64,
    pub v: f64,
    #[serde(rename = "R_u")]
    pub r_hat_u: f64,
    #[serde(rename = "R_v")]
    pub r_hat_v: f64,
}

/// Relative spread above which the trail is declared non-convergent.
const SPREAD_LIMIT: f64 = 1e-3;
/// The spread of the trail underestimates the error once it reaches the accuracy of
/// the integration itself; never report less than this fraction of `R`.
const ERR_FLOOR: f64 = 1e-10;

/// Integrate regular data `(u0, v0)` until the last threshold and extrapolate the radius.
pub fn estimate_blowup_radius(
    params: &ProblemParams,
    u0: f64,
    v0: f64,
    config: &IntegratorConfig,
) -> Result<BlowupEstimate> {
    params.validate_blowup()?;
    if u0 < 0.0 || v0 < 0.0 {
        return Err(Error::InvalidArgument("regular data must be nonnegative".into()));
    }
    let sys = RadialSystem::cone(params.clone());
    let r_end = 1e6 * natural_length(&sys, u0, v0)?;
    let traj = integrate_regular(params, u0, v0, r_end, config)?;
    estimate_blowup_radius_with(&traj)
}

/// Extrapolate from the threshold crossings of an already computed trajectory.
///
/// At a crossing `(r_k, u_k, v_k)` the boundary behaviour `u ≈ A d^{-γ}` gives
/// `R ≈ r_k + (A/u_k)^{1/γ}`, with `A = A1·R^{γ−γ_ab}` when weights are present; the
/// weight factor depends on `R` itself, so each estimate is a short fixed-point iteration.
pub fn estimate_blowup_radius_with(traj: &RadialTrajectory) -> Result<BlowupEstimate> {
    let params = &traj.system.params;
    let e = params.exponents()?;
    let c = boundary_constants(params)?;
    if traj.termination == Termination::ReachedEnd && traj.crossings.len() < 2 {
        return Err(Error::NoBlowup(traj.last().r));
    }
    if traj.crossings.len() < 2 {
        return Err(Error::NonConvergence(format!(
            "only {} threshold crossings recorded",
            traj.crossings.len()
        )));
    }

    let mut trail = Vec::with_capacity(traj.crossings.len());
    for x in &traj.crossings {
        if !(x.u > 0.0 && x.v > 0.0) {
            return Err(Error::NonConvergence(format!(
                "crossing at r = {} has nonpositive component",
                x.r
            )));
        }
        let mut r_u = x.r;
        let mut r_v = x.r;
        for _ in 0..50 {
            let (fu, _) = general_r_correction(params, r_u)?;
            let (_, fv) = general_r_correction(params, r_v)?;
            let nu = x.r + (c.a1 * fu / x.u).powf(1.0 / e.gamma);
            let nv = x.r + (c.b1 * fv / x.v).powf(1.0 / e.xi);
            let done = (nu - r_u).abs() <= 1e-15 * nu && (nv - r_v).abs() <= 1e-15 * nv;
            r_u = nu;
            r_v = nv;
            if done {
                break;
            }
        }
        trail.push(TrailEntry {
            threshold: x.threshold,
            r: x.r,
            u: x.u,
            v: x.v,
            r_hat_u: r_u,
            r_hat_v: r_v,
        });
    }

    let n = trail.len();
    let (last, prev) = (trail[n - 1], trail[n - 2]);
    let r_hat = last.r_hat_u;
    let err = (last.r_hat_u - last.r_hat_v)
        .abs()
        .max((last.r_hat_u - prev.r_hat_u).abs())
        .max((last.r_hat_v - prev.r_hat_v).abs())
        .max(ERR_FLOOR * r_hat);
    if !(err <= SPREAD_LIMIT * r_hat) {
        return Err(Error::NonConvergence(format!(
            "extrapolation spread {err:e} exceeds {SPREAD_LIMIT:e}·R = {:e}",
            SPREAD_LIMIT * r_hat
        )));
    }
    Ok(BlowupEstimate { r_hat, err, trail })
}
