use num_complex::Complex64;
use serde::Serialize;

use super::{fixed_point_coords, linearization, FixedPoint};
use crate::error::{Error, Result};
use crate::fit::log_linear_rate;
use crate::ode::Tolerances;
use crate::params::ProblemParams;
use crate::phase::{origin_field, Chart, PhaseTrajectory};

/// Which eigen-direction to launch along.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigenSelector {
    /// Eigenvalue closest to the given real number.
    NearestTo(f64),
    MostNegative,
    MostPositive,
    /// Index into the sorted spectrum of [`linearization`].
    Index(usize),
}

#[derive(Clone, Debug)]
pub struct LaunchOptions {
    /// Initial offset; defaults to `1e-6·max(1, ‖coords‖)`.
    pub eps: Option<f64>,
    /// Flip the eigenvector so this component is positive before applying `sign`.
    pub orient_by: Option<usize>,
    pub sign: f64,
    pub t0: f64,
    /// Signed integration length; negative integrates backward in `t`.
    pub t_span: f64,
    pub tol: Tolerances,
    /// Stop with a diagnostic once `XZ > 0` or `YW > 0`.
    pub require_admissible: bool,
    /// Stop once the norm exceeds this.
    pub max_norm: f64,
    /// Relative mismatch allowed between the initial growth rate and the eigenvalue.
    pub rate_tol: f64,
    pub max_halvings: usize,
}

impl Default for LaunchOptions {
    fn default() -> Self {
        LaunchOptions {
            eps: None,
            orient_by: None,
            sign: 1.0,
            t0: 0.0,
            t_span: 40.0,
            tol: Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() },
            require_admissible: true,
            max_norm: 1e6,
            rate_tol: 0.05,
            max_halvings: 30,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LaunchResult {
    pub label: FixedPoint,
    pub eigenvalue: [f64; 2],
    pub eigenvector: [f64; 4],
    pub eps: f64,
    pub halvings: usize,
    /// Growth rate of the field along the initial offset; equals the eigenvalue in the
    /// linear regime.
    pub initial_rate: f64,
    /// Rate fitted to the distance from the fixed point over the first part of the path.
    pub fitted_rate: Option<f64>,
    /// Why the integration stopped before `t_span`, if it did.
    pub exit: Option<String>,
    pub trajectory: PhaseTrajectory,
}

fn select(eigs: &[Complex64], s: EigenSelector) -> Result<usize> {
    let idx = match s {
        EigenSelector::Index(i) => i,
        EigenSelector::MostNegative => eigs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .map(|x| x.0)
            .unwrap_or(0),
        EigenSelector::MostPositive => eigs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .map(|x| x.0)
            .unwrap_or(0),
        EigenSelector::NearestTo(x) => eigs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).norm().total_cmp(&(b.1 - x).norm()))
            .map(|x| x.0)
            .unwrap_or(0),
    };
    if idx >= eigs.len() {
        return Err(Error::InvalidArgument(format!("eigenvalue index {idx} out of range")));
    }
    Ok(idx)
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integrate the origin field from `coords + ε·e`, with `e` the selected eigenvector
/// (real part for a complex pair). `ε` is halved until the field's growth rate along the
/// offset matches the eigenvalue within `rate_tol`.
pub fn launch(
    params: &ProblemParams,
    label: FixedPoint,
    selector: EigenSelector,
    opts: &LaunchOptions,
) -> Result<LaunchResult> {
    let lin = linearization(params, label)?;
    let i = select(&lin.eigenvalues, selector)?;
    let lambda = lin.eigenvalues[i];
    let mut e: [f64; 4] = std::array::from_fn(|k| lin.eigenvectors[i][k].re);
    let en = norm(&e);
    if en == 0.0 {
        return Err(Error::InvalidArgument("selected eigenvector has no real part".into()));
    }
    e.iter_mut().for_each(|x| *x /= en);
    if let Some(k) = opts.orient_by {
        if e[k] < 0.0 {
            e.iter_mut().for_each(|x| *x = -*x);
        }
    }
    e.iter_mut().for_each(|x| *x *= opts.sign.signum());

    let fp = lin.coords;
    let mut eps = opts.eps.unwrap_or(1e-6 * norm(&fp).max(1.0));
    let mut halvings = 0;
    let real = lambda.im == 0.0;
    let (start, initial_rate) = loop {
        let start: [f64; 4] = std::array::from_fn(|k| fp[k] + eps * e[k]);
        let f = origin_field(params, &start);
        let d: [f64; 4] = std::array::from_fn(|k| start[k] - fp[k]);
        let rate = (0..4).map(|k| f[k] * d[k]).sum::<f64>() / (0..4).map(|k| d[k] * d[k]).sum::<f64>();
        let ok = !real || (rate - lambda.re).abs() <= opts.rate_tol * lambda.re.abs().max(1e-12);
        if ok {
            break (start, rate);
        }
        if halvings >= opts.max_halvings {
            return Err(Error::NonConvergence(format!(
                "launch from {label}: growth rate {rate} never matched eigenvalue {lambda}"
            )));
        }
        eps *= 0.5;
        halvings += 1;
    };

    let mut exit = None;
    let trajectory = PhaseTrajectory::integrate_until(
        params,
        Chart::Origin,
        start,
        opts.t0,
        opts.t0 + opts.t_span,
        &opts.tol,
        |p| {
            if opts.require_admissible && !p.in_region_r() {
                exit = Some(format!("left the admissible region at t = {}", p.t));
                return true;
            }
            if norm(&p.coords()) > opts.max_norm {
                exit = Some(format!("norm exceeded {} at t = {}", opts.max_norm, p.t));
                return true;
            }
            false
        },
    )?;

    let near: Vec<(f64, f64)> = trajectory
        .points
        .iter()
        .map(|p| {
            let c = p.coords();
            (p.t, norm(&std::array::from_fn(|k| c[k] - fp[k])))
        })
        .take_while(|(_, d)| *d <= 100.0 * eps)
        .collect();
    let fitted_rate = if near.len() >= 3 {
        let (t, d): (Vec<f64>, Vec<f64>) = near.into_iter().unzip();
        log_linear_rate(&t, &d).map(|f| f.slope)
    } else {
        None
    };

    Ok(LaunchResult {
        label,
        eigenvalue: [lambda.re, lambda.im],
        eigenvector: e,
        eps,
        halvings,
        initial_rate,
        fitted_rate,
        exit,
        trajectory,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    Unbounded,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitClassification {
    pub status: LimitStatus,
    pub label: Option<FixedPoint>,
    /// Distance from the final point to the nearest cataloged point.
    pub distance: f64,
    /// Exponential rate of approach, `|d ln dist/dt|`, over the tail.
    pub rate: Option<f64>,
    pub admissible: Option<bool>,
    pub nearest: FixedPoint,
}

/// Limit of the path at its final sample: the nearest cataloged point, provided the
/// distance is below `tol` and has not been increasing over the last fifth of the path.
pub fn classify_limit(params: &ProblemParams, traj: &PhaseTrajectory, tol: f64) -> Result<LimitClassification> {
    let catalog = fixed_point_coords(params)?;
    let last = traj
        .points
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let dist_to = |p: &[f64; 4], c: &[f64; 4]| norm(&std::array::from_fn(|k| p[k] - c[k]));
    let (nearest, coords) = catalog
        .iter()
        .min_by(|a, b| dist_to(&last.coords(), &a.1).total_cmp(&dist_to(&last.coords(), &b.1)))
        .map(|(l, c)| (*l, *c))
        .unwrap();
    let distance = dist_to(&last.coords(), &coords);
    let admissible = !nearest.structurally_non_admissible()
        && coords[0] * coords[2] <= 0.0
        && coords[1] * coords[3] <= 0.0;

    if norm(&last.coords()) > 1e5 {
        return Ok(LimitClassification {
            status: LimitStatus::Unbounded,
            label: None,
            distance,
            rate: None,
            admissible: None,
            nearest,
        });
    }
    let n = traj.points.len();
    let tail_len = (n / 5).max(5).min(n);
    let tail = &traj.points[n - tail_len..];
    let dists: Vec<f64> = tail.iter().map(|p| dist_to(&p.coords(), &coords)).collect();
    // Once the path has converged to integration accuracy the distance only jitters, so
    // small increases relative to `tol` are not counted against convergence.
    let decreasing = dists.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-3 * tol);
    // The rate is fitted where the approach is linear and above round-off.
    let (ts, ds): (Vec<f64>, Vec<f64>) = traj
        .points
        .iter()
        .map(|p| (p.t, dist_to(&p.coords(), &coords)))
        .filter(|(_, d)| *d > 1e-9 && *d < 1e-2)
        .unzip();
    let rate = if ts.len() >= 3 {
        log_linear_rate(&ts, &ds).map(|f| f.slope.abs())
    } else {
        let ts: Vec<f64> = tail.iter().map(|p| p.t).collect();
        log_linear_rate(&ts, &dists).map(|f| f.slope.abs())
    };
    let converged = distance < tol && decreasing;
    Ok(LimitClassification {
        status: if converged { LimitStatus::Converged } else { LimitStatus::Undecided },
        label: converged.then_some(nearest),
        distance,
        rate,
        admissible: converged.then_some(admissible),
        nearest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;

    #[test]
    fn constant_trajectory_at_m0() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let pts = (0..10).map(|i| PhasePoint::new([2.0, 2.0, -1.0, -1.0], Chart::Origin, i as f64)).collect();
        let t = PhaseTrajectory { params: p.clone(), chart: Chart::Origin, points: pts };
        let c = classify_limit(&p, &t, 1e-6).unwrap();
        assert_eq!(c.label, Some(FixedPoint::M0));
        assert_eq!(c.distance, 0.0);
    }

    #[test]
    fn hyperplane_launch_from_k0_stays_non_admissible() {
        // On X = 0, Y = 0, W = 0 the Z equation is logistic, so the path returns to K0
        // backward in time... and forward from near O it reaches K0.
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let traj = PhaseTrajectory::integrate(
            &p,
            Chart::Origin,
            [0.0, 0.0, 0.1, 0.0],
            0.0,
            30.0,
            &Tolerances::default(),
        )
        .unwrap();
        let c = classify_limit(&p, &traj, 1e-6).unwrap();
        assert_eq!(c.label, Some(FixedPoint::K0), "{c:?} {:?}", traj.points.last());
        assert_eq!(c.admissible, Some(false));
        assert!((c.rate.unwrap() - 3.0).abs() < 0.1);
    }

    #[test]
    fn r0_unstable_launch_reaches_n0_with_rate_check() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let opts = LaunchOptions { orient_by: Some(2), t_span: 30.0, ..Default::default() };
        let r = launch(&p, FixedPoint::R0, EigenSelector::MostPositive, &opts).unwrap();
        assert!(r.exit.as_deref().unwrap_or("").contains("norm"), "{:?}", r.exit);
        assert!((r.initial_rate - 6.0).abs() < 0.05 * 6.0);
        assert!((r.fitted_rate.unwrap() - 6.0).abs() < 0.3);
        assert!(r.eigenvector[0] < 0.0 && r.eigenvector[2] > 0.0);
    }
}
