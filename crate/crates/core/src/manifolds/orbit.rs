use serde::Serialize;

use super::{classify_limit, launch, m0_spectrum, EigenSelector, FixedPoint, LaunchOptions, LimitClassification};
use crate::error::{Error, Result};
use crate::ode::Tolerances;
use crate::params::{singular_constants, ProblemParams};
use crate::phase::{Chart, PhasePoint, PhaseTrajectory};

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub eps: Option<f64>,
    /// Length of the backward run (towards `r → 0`).
    pub t_back: f64,
    /// Length of the forward run (towards `r → ∞`).
    pub t_fwd: f64,
    pub tol: Tolerances,
    /// Distance to the α-limit below which it counts as reached.
    pub classify_tol: f64,
    /// Relative variation allowed in the limits at 0 and ∞.
    pub limit_tol: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            eps: None,
            t_back: 60.0,
            t_fwd: 60.0,
            // Z and W decay to zero near the α-limit and carry the size of (u, v), so
            // they must be resolved in relative terms.
            tol: Tolerances { rtol: 1e-12, atol: 1e-300, ..Default::default() },
            classify_tol: 1e-3,
            limit_tol: 0.01,
        }
    }
}

impl OrbitOptions {
    /// Defaults adjusted to the parameters. For `N = 2` the orbit approaches its
    /// α-limit only algebraically in `t`, so the backward run is much longer.
    pub fn for_params(params: &ProblemParams) -> Self {
        let mut o = OrbitOptions::default();
        if params.n == 2.0 {
            o.t_back = 5000.0;
        }
        o
    }
}

/// Behaviour at the origin predicted for the global solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OriginCase {
    /// `μ < (N+b)/(N−2)`: `r^{N−2}u → α`, `r^{N−2}v → β`.
    A0,
    /// `μ > (N+b)/(N−2)`: `r^{N−2}u → α`, `r^{(N−2)μ−2−b} v → β(α)`.
    P0,
    /// `N = 2`: `u/|ln r| → α`, `v/|ln r| → β`.
    Logarithmic,
    /// `μ = (N+b)/(N−2)`: logarithmic correction in `v`; not asserted.
    Borderline,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ClaimCheck {
    fn below(claim: impl Into<String>, value: f64, threshold: f64) -> Self {
        ClaimCheck { claim: claim.into(), value, threshold, pass: value < threshold }
    }
}

/// Everything computed along the orbit leaving `M0` backwards along its stable direction.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectingOrbit {
    pub params: ProblemParams,
    /// The roles of `u` and `v` were exchanged so that `δ < (N+a)/(N−2)`; all fields below
    /// refer to the exchanged system.
    pub swapped: bool,
    pub case: OriginCase,
    pub lambda3: f64,
    pub eigenvector3: [f64; 4],
    pub eps: f64,
    pub expected_alpha_limit: FixedPoint,
    /// Label of the α-limit, when one was reached.
    #[serde(rename = "alpha_limit")]
    pub alpha_limit_label: Option<FixedPoint>,
    #[serde(rename = "alpha_limit_detail")]
    pub alpha_limit: LimitClassification,
    /// Sign changes of the discrete differences of `X, Y, Z, W` against the expected
    /// direction (`X, Y` increasing and `Z, W` decreasing in `t`).
    pub monotonicity_violations: [usize; 4],
    pub min_x_minus_n2: f64,
    pub min_y_minus_n2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_predicted: Option<f64>,
    pub origin_variation: [f64; 2],
    pub a_n: f64,
    pub b_n: f64,
    pub forward_limits: [f64; 2],
    pub forward_deviation: [f64; 2],
    pub claims: Vec<ClaimCheck>,
    #[serde(skip)]
    pub trajectory: PhaseTrajectory,
    /// `(ln r, ln u, ln v)` reconstructed along the orbit, increasing in `r`.
    #[serde(skip)]
    pub log_solution: Vec<[f64; 3]>,
}

impl ConnectingOrbit {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    /// `Err(StructureViolation)` naming every failed claim.
    pub fn require(&self) -> Result<()> {
        let failed: Vec<String> = self
            .claims
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} ({} vs {})", c.claim, c.value, c.threshold))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::StructureViolation(failed.join("; ")))
        }
    }
}

fn rel_variation(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (max - min) / mean.abs()
}

/// Compute the orbit from `M0` to its α-limit, reconstruct the solution, and check the
/// predicted limits at `0` and `∞`. Claims are recorded, not enforced; see
/// [`ConnectingOrbit::require`].
pub fn connecting_orbit(params: &ProblemParams, opts: &OrbitOptions) -> Result<ConnectingOrbit> {
    params.validate_regular()?;
    if params.n < 2.0 {
        return Err(Error::invalid("dimension N ≥ 2", format!("N = {}", params.n)));
    }
    params.check_singular_condition()?;
    let nm2 = params.n - 2.0;
    let swapped = nm2 > 0.0 && params.delta >= (params.n + params.a) / nm2;
    let p = if swapped { params.swapped() } else { params.clone() };

    let case = if nm2 == 0.0 {
        OriginCase::Logarithmic
    } else {
        let crit = (p.n + p.b) / nm2;
        if (p.mu - crit).abs() <= 1e-9 * crit {
            OriginCase::Borderline
        } else if p.mu < crit {
            OriginCase::A0
        } else {
            OriginCase::P0
        }
    };
    let expected_alpha_limit = match case {
        OriginCase::A0 | OriginCase::Borderline => FixedPoint::A0,
        OriginCase::P0 => FixedPoint::P0,
        OriginCase::Logarithmic => FixedPoint::O,
    };

    let spectrum = m0_spectrum(&p)?;
    let base = LaunchOptions {
        eps: opts.eps,
        orient_by: Some(2),
        sign: 1.0,
        t0: 0.0,
        t_span: -opts.t_back,
        tol: opts.tol.clone(),
        require_admissible: true,
        ..Default::default()
    };
    let back = launch(&p, FixedPoint::M0, EigenSelector::NearestTo(spectrum.lambda3), &base)?;
    if let Some(exit) = &back.exit {
        return Err(Error::RegionExit { t: back.trajectory.points.last().unwrap().t, detail: exit.clone() });
    }
    // Forward in t the orbit sits on the stable direction of M0, which also has three
    // unstable directions; integrating it would amplify round-off, so the tail uses the
    // linearization, accurate to O(ε²).
    let m0 = spectrum.coords;
    let e3 = back.eigenvector;
    let n_fwd = (opts.t_fwd * 8.0).ceil().max(16.0) as usize;
    let fwd_points: Vec<PhasePoint> = (1..=n_fwd)
        .map(|i| {
            let t = opts.t_fwd * i as f64 / n_fwd as f64;
            let g = back.eps * (spectrum.lambda3 * t).exp();
            PhasePoint::new(std::array::from_fn(|k| m0[k] + g * e3[k]), Chart::Origin, t)
        })
        .collect();

    let alpha_limit = classify_limit(&p, &back.trajectory, opts.classify_tol)?;

    let mut points: Vec<_> = back.trajectory.points.iter().rev().copied().collect();
    points.extend(fwd_points);
    let trajectory = PhaseTrajectory { params: p.clone(), chart: Chart::Origin, points };

    let mut violations = [0usize; 4];
    for w in trajectory.points.windows(2) {
        let (a, b) = (w[0].coords(), w[1].coords());
        for k in 0..4 {
            let d = b[k] - a[k];
            let tol = 1e-12 * (1.0 + a[k].abs());
            let wrong = if k < 2 { d < -tol } else { d > tol };
            if wrong {
                violations[k] += 1;
            }
        }
    }
    let min_x = trajectory.points.iter().map(|q| q.x - nm2).fold(f64::INFINITY, f64::min);
    let min_y = trajectory.points.iter().map(|q| q.y - nm2).fold(f64::INFINITY, f64::min);

    // Work in logarithms: for long backward runs r = e^t underflows.
    let ex = p.exponents()?;
    let mut solution = Vec::with_capacity(trajectory.points.len());
    for q in &trajectory.points {
        let (zx, wy) = (-(q.z * q.x), -(q.w * q.y));
        if zx > 0.0 && wy > 0.0 {
            let lu = -ex.gamma_ab * q.t + (zx.ln() + p.delta * wy.ln()) / ex.d;
            let lv = -ex.xi_ab * q.t + (wy.ln() + p.mu * zx.ln()) / ex.d;
            solution.push([q.t, lu, lv]);
        }
    }
    if solution.len() < 10 {
        return Err(Error::NonConvergence("too few reconstructable points on the orbit".into()));
    }

    // Limits at the origin over the innermost decade.
    let ln10 = std::f64::consts::LN_10;
    let t_min = solution[0][0];
    let inner: Vec<&[f64; 3]> = solution.iter().filter(|s| s[0] <= t_min + ln10).collect();
    let (qu, qv): (Vec<f64>, Vec<f64>) = match case {
        OriginCase::A0 | OriginCase::Borderline => inner
            .iter()
            .map(|s| ((nm2 * s[0] + s[1]).exp(), (nm2 * s[0] + s[2]).exp()))
            .unzip(),
        OriginCase::P0 => {
            let e = nm2 * p.mu - 2.0 - p.b;
            inner.iter().map(|s| ((nm2 * s[0] + s[1]).exp(), (e * s[0] + s[2]).exp())).unzip()
        }
        OriginCase::Logarithmic => inner
            .iter()
            .map(|s| (s[1].exp() / s[0].abs(), s[2].exp() / s[0].abs()))
            .unzip(),
    };
    let alpha = qu[0];
    let beta = qv[0];
    let origin_variation = [rel_variation(&qu), rel_variation(&qv)];
    let beta_predicted = (case == OriginCase::P0).then(|| {
        let k = nm2 * p.mu;
        alpha.powf(p.mu) / ((k - p.n - p.b) * (k - 2.0 - p.b))
    });

    // Limits at infinity over the outermost decade.
    let sc = singular_constants(&p)?;
    let t_max = solution.last().unwrap()[0];
    let outer: Vec<&[f64; 3]> = solution.iter().filter(|s| s[0] >= t_max - ln10).collect();
    let fu: Vec<f64> = outer.iter().map(|s| (ex.gamma_ab * s[0] + s[1]).exp()).collect();
    let fv: Vec<f64> = outer.iter().map(|s| (ex.xi_ab * s[0] + s[2]).exp()).collect();
    let dev = |v: &[f64], target: f64| v.iter().map(|x| (x / target - 1.0).abs()).fold(0.0, f64::max);
    let forward_deviation = [dev(&fu, sc.a_n), dev(&fv, sc.b_n)];
    let forward_limits = [*fu.last().unwrap(), *fv.last().unwrap()];

    let mut claims = vec![
        ClaimCheck {
            claim: format!("alpha-limit is {expected_alpha_limit}"),
            value: alpha_limit.distance,
            threshold: opts.classify_tol,
            pass: alpha_limit.label == Some(expected_alpha_limit),
        },
        ClaimCheck::below("monotone X, Y, Z, W (violations)", violations.iter().sum::<usize>() as f64, 0.5),
        ClaimCheck {
            claim: "X, Y > N-2 along the orbit".into(),
            value: min_x.min(min_y),
            threshold: -1e-12,
            pass: min_x.min(min_y) > -1e-12,
        },
        ClaimCheck::below("r^gamma_ab u -> A_N", forward_deviation[0], opts.limit_tol),
        ClaimCheck::below("r^xi_ab v -> B_N", forward_deviation[1], opts.limit_tol),
        ClaimCheck {
            claim: "positive limits at the origin".into(),
            value: alpha.min(beta),
            threshold: 0.0,
            pass: alpha > 0.0 && beta > 0.0,
        },
    ];
    if matches!(case, OriginCase::A0 | OriginCase::P0) {
        claims.push(ClaimCheck::below("u limit at 0 settles over the last decade", origin_variation[0], opts.limit_tol));
        claims.push(ClaimCheck::below("v limit at 0 settles over the last decade", origin_variation[1], opts.limit_tol));
    }
    if let Some(bp) = beta_predicted {
        claims.push(ClaimCheck::below("beta = beta(alpha)", (beta / bp - 1.0).abs(), 0.02));
    }

    Ok(ConnectingOrbit {
        params: params.clone(),
        swapped,
        case,
        lambda3: spectrum.lambda3,
        eigenvector3: spectrum.eigenvector3,
        eps: back.eps,
        expected_alpha_limit,
        alpha_limit_label: alpha_limit.label,
        alpha_limit,
        monotonicity_violations: violations,
        min_x_minus_n2: min_x,
        min_y_minus_n2: min_y,
        alpha,
        beta,
        beta_predicted,
        origin_variation,
        a_n: sc.a_n,
        b_n: sc.b_n,
        forward_limits,
        forward_deviation,
        claims,
        trajectory,
        log_solution: solution,
    })
}
