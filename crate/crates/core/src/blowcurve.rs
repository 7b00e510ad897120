//! The curve of unweighted regular data whose solutions blow up exactly at `R = 1`.
//!
//! Everything rests on the scaling law `ρ(λ^γ u0, λ^ξ v0) = ρ(u0, v0)/λ`: a single
//! radius computation normalizes any datum onto the curve.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::radial::{estimate_blowup_radius, BlowupEstimate, IntegratorConfig};

fn unweighted(n: f64, delta: f64, mu: f64) -> Result<ProblemParams> {
    let p = ProblemParams::unweighted(n, delta, mu);
    p.validate_blowup()?;
    Ok(p)
}

/// Blow-up radius of the regular solution with data `(u0, v0)`, without weights.
pub fn rho_estimate(n: f64, delta: f64, mu: f64, u0: f64, v0: f64, config: &IntegratorConfig) -> Result<BlowupEstimate> {
    if !(u0 >= 0.0 && v0 >= 0.0) || (u0 == 0.0 && v0 == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "data must be nonnegative and not both zero, got ({u0}, {v0})"
        )));
    }
    estimate_blowup_radius(&unweighted(n, delta, mu)?, u0, v0, config)
}

pub fn rho(n: f64, delta: f64, mu: f64, u0: f64, v0: f64, config: &IntegratorConfig) -> Result<f64> {
    rho_estimate(n, delta, mu, u0, v0, config).map(|e| e.r_hat)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Angle of the scaling orbit through the point where it meets the unit circle.
    pub theta: f64,
    /// `ρ(cos θ, sin θ)`.
    pub rho_at_angle: f64,
    pub u0: f64,
    pub v0: f64,
    /// `ρ(u0, v0)` recomputed from scratch; 1 up to integration error.
    pub rho_check: Option<f64>,
}

/// The `λ > 0` with `(λ^γ u0)² + (λ^ξ v0)² = 1`. The left side is increasing in `λ`.
fn unit_circle_scale(gamma: f64, xi: f64, u0: f64, v0: f64) -> f64 {
    let g = |l: f64| {
        let (a, b) = (l * gamma + u0.ln(), l * xi + v0.ln());
        let m = a.max(b);
        m + ((a - m).exp() * (a - m).exp() + (b - m).exp() * (b - m).exp()).ln() / 2.0
    };
    // Bisection on ln λ; `g` is the log of the Euclidean norm.
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) > 0.0 {
        lo *= 2.0;
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn normalize_inner(
    p: &ProblemParams,
    u0: f64,
    v0: f64,
    config: &IntegratorConfig,
    check: bool,
) -> Result<CurvePoint> {
    let e = p.exponents()?;
    let lambda = rho(p.n, p.delta, p.mu, u0, v0, config)?;
    let (pu, pv) = (lambda.powf(e.gamma) * u0, lambda.powf(e.xi) * v0);
    let s = unit_circle_scale(e.gamma, e.xi, u0, v0);
    let (cu, cv) = (s.powf(e.gamma) * u0, s.powf(e.xi) * v0);
    let theta = cv.atan2(cu);
    let rho_check = if check { Some(rho(p.n, p.delta, p.mu, pu, pv, config)?) } else { None };
    Ok(CurvePoint { theta, rho_at_angle: lambda / s, u0: pu, v0: pv, rho_check })
}

/// Move `(u0, v0)` along its scaling orbit onto the curve; the scale is `λ = ρ(u0, v0)`.
pub fn normalize_to_s(n: f64, delta: f64, mu: f64, u0: f64, v0: f64, config: &IntegratorConfig) -> Result<CurvePoint> {
    normalize_inner(&unweighted(n, delta, mu)?, u0, v0, config, true)
}

#[derive(Clone, Debug)]
pub struct CurveOptions {
    pub n_points: usize,
    /// Insert a midpoint wherever consecutive points are more than twice the median
    /// chord apart (one pass).
    pub refine: bool,
    /// Recompute `ρ` at every traced point.
    pub check: bool,
    pub config: IntegratorConfig,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions { n_points: 33, refine: false, check: true, config: IntegratorConfig::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveTrace {
    #[serde(skip)]
    pub points: Vec<CurvePoint>,
    /// `(ū₀, 0)` and `(0, v̄₀)`.
    pub endpoints: [[f64; 2]; 2],
    /// `max |ρ(point) − 1|`, when checks were run.
    pub max_rho_residual: Option<f64>,
    /// Largest excursion outside `[0, ū₀] × [0, v̄₀]`.
    pub containment_excess: f64,
    pub n_points: usize,
}

impl CurveTrace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,u0,v0,rho_check")?;
        for p in &self.points {
            let rc = p.rho_check.map(|x| format!("{x:.17e}")).unwrap_or_default();
            writeln!(w, "{:.17e},{:.17e},{:.17e},{}", p.theta, p.u0, p.v0, rc)?;
        }
        Ok(())
    }

    /// Largest mismatch between the point at `θ` and the swapped point at `π/2 − θ`.
    /// Meaningful for `δ = μ` on a grid symmetric about `π/4`.
    pub fn mirror_defect(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&self.points[i], &self.points[n - 1 - i]);
                (a.u0 - b.v0).abs().max((a.v0 - b.u0).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn run_batch(p: &ProblemParams, data: &[(f64, f64)], opts: &CurveOptions) -> Result<Vec<CurvePoint>> {
    let results: Vec<Result<CurvePoint>> =
        data.par_iter().map(|&(u, v)| normalize_inner(p, u, v, &opts.config, opts.check)).collect();
    let mut points = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(c) => points.push(c),
            Err(e) => failures.push((i, e)),
        }
    }
    if failures.is_empty() {
        Ok(points)
    } else {
        Err(Error::Batch(failures))
    }
}

/// Trace the curve on a uniform θ grid over `[0, π/2]`, endpoints included, in θ order.
/// Requires `min{δ, μ} ≥ 1`, under which the radius is continuous in the data.
pub fn trace_s(n: f64, delta: f64, mu: f64, opts: &CurveOptions) -> Result<CurveTrace> {
    let p = unweighted(n, delta, mu)?;
    if delta.min(mu) < 1.0 {
        return Err(Error::invalid(
            "continuity of the blow-up radius, min{δ, μ} ≥ 1",
            format!("δ = {delta}, μ = {mu}"),
        ));
    }
    if opts.n_points < 2 {
        return Err(Error::InvalidArgument("the curve needs at least 2 points".into()));
    }
    let m = opts.n_points - 1;
    let data: Vec<(f64, f64)> = (0..=m)
        .map(|i| {
            if i == 0 {
                (1.0, 0.0)
            } else if i == m {
                (0.0, 1.0)
            } else {
                let th = FRAC_PI_2 * i as f64 / m as f64;
                (th.cos(), th.sin())
            }
        })
        .collect();
    let mut points = run_batch(&p, &data, opts)?;

    if opts.refine && points.len() > 2 {
        let chord = |a: &CurvePoint, b: &CurvePoint| (a.u0 - b.u0).hypot(a.v0 - b.v0);
        let mut chords: Vec<f64> = points.windows(2).map(|w| chord(&w[0], &w[1])).collect();
        let (_, median, _) = chords.select_nth_unstable_by(points.len() / 2 - 1, f64::total_cmp);
        let median = *median;
        let mids: Vec<(f64, f64)> = points
            .windows(2)
            .filter(|w| chord(&w[0], &w[1]) > 2.0 * median)
            .map(|w| {
                let th = 0.5 * (w[0].theta + w[1].theta);
                (th.cos(), th.sin())
            })
            .collect();
        points.extend(run_batch(&p, &mids, opts)?);
        points.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    }

    let first = points[0];
    let last = points[points.len() - 1];
    let (ubar, vbar) = (first.u0, last.v0);
    let containment_excess = points
        .iter()
        .map(|c| (c.u0 - ubar).max(c.v0 - vbar).max(-c.u0).max(-c.v0).max(0.0))
        .fold(0.0, f64::max);
    let max_rho_residual = opts
        .check
        .then(|| points.iter().filter_map(|c| c.rho_check).map(|r| (r - 1.0).abs()).fold(0.0, f64::max));
    Ok(CurveTrace {
        endpoints: [[ubar, 0.0], [0.0, vbar]],
        max_rho_residual,
        containment_excess,
        n_points: points.len(),
        points,
    })
}

/// `ρ(s·d)` for each scale `s` along a fixed direction `d`, with the largest relative
/// increase between consecutive scales (positive means `ρ` went up).
pub fn rho_along_ray(
    n: f64,
    delta: f64,
    mu: f64,
    direction: (f64, f64),
    scales: &[f64],
    config: &IntegratorConfig,
) -> Result<(Vec<(f64, f64)>, f64)> {
    let p = unweighted(n, delta, mu)?;
    let rhos: Vec<Result<f64>> = scales
        .par_iter()
        .map(|&s| rho(p.n, p.delta, p.mu, s * direction.0, s * direction.1, config))
        .collect();
    let mut out = Vec::with_capacity(scales.len());
    let mut failures = Vec::new();
    for (i, (s, r)) in scales.iter().zip(rhos).enumerate() {
        match r {
            Ok(r) => out.push((*s, r)),
            Err(e) => failures.push((i, e)),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Batch(failures));
    }
    let max_increase = out.windows(2).map(|w| (w[1].1 - w[0].1) / w[0].1).fold(f64::NEG_INFINITY, f64::max);
    Ok((out, max_increase))
}
