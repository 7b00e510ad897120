use serde::Serialize;

use super::series::PowerSeries;
use super::{Nonlinearity, RadialState, RadialSystem};
use crate::error::{Error, Result};

/// State at the series radius plus the Picard bookkeeping that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesStart {
    pub state: RadialState,
    /// Size of the next Picard correction at the start radius.
    pub remainder: f64,
    /// Second iterates as explicit series.
    #[serde(skip)]
    pub u_series: PowerSeries,
    #[serde(skip)]
    pub v_series: PowerSeries,
}

/// Length scale of regular data: the radius at which the scaling would map the data to
/// size one, `min(u0^{-1/γ_ab}, v0^{-1/ξ_ab})` over the nonzero components.
pub fn natural_length(sys: &RadialSystem, u0: f64, v0: f64) -> Result<f64> {
    let e = sys.params.exponents()?;
    let mut l = f64::INFINITY;
    if u0 != 0.0 {
        l = l.min(u0.abs().powf(-1.0 / e.gamma_ab));
    }
    if v0 != 0.0 {
        l = l.min(v0.abs().powf(-1.0 / e.xi_ab));
    }
    if !l.is_finite() {
        return Err(Error::InvalidArgument("regular data (0, 0) is the trivial solution".into()));
    }
    Ok(l)
}

fn source_series(
    sys: &RadialSystem,
    f: &PowerSeries,
    power: f64,
    r_max: f64,
) -> Option<PowerSeries> {
    match sys.mode {
        Nonlinearity::Biharmonic if power == 1.0 => Some(f.clone()),
        _ => {
            if sys.mode == Nonlinearity::Cone
                && f.terms().first().map(|t| t.1 < 0.0).unwrap_or(false)
            {
                return Some(PowerSeries::zero());
            }
            f.abs_pow(power, r_max)
        }
    }
}

/// One Picard sweep of `u = u0 + I_a[v^δ]`, `v = v0 + I_b[u^μ]`.
fn picard(
    sys: &RadialSystem,
    u0: f64,
    v0: f64,
    u: &PowerSeries,
    v: &PowerSeries,
    r_max: f64,
) -> Option<(PowerSeries, PowerSeries)> {
    let p = &sys.params;
    let su = source_series(sys, v, p.delta, r_max)?;
    let sv = source_series(sys, u, p.mu, r_max)?;
    let nu = PowerSeries::constant(u0).add(&su.radial_double_integral(p.n, p.a), r_max);
    let nv = PowerSeries::constant(v0).add(&sv.radial_double_integral(p.n, p.b), r_max);
    Some((nu, nv))
}

/// Regular solution at `r = eps` from two Picard iterations of the integral form.
/// Fails when the next correction exceeds `abs_tol + rel_tol·|value|`.
pub fn series_start(
    sys: &RadialSystem,
    u0: f64,
    v0: f64,
    eps: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<SeriesStart> {
    sys.params.validate_regular()?;
    if !(u0.is_finite() && v0.is_finite()) {
        return Err(Error::InvalidArgument(format!("regular data must be finite, got ({u0}, {v0})")));
    }
    if u0 == 0.0 && v0 == 0.0 {
        return Err(Error::InvalidArgument("regular data (0, 0) is the trivial solution".into()));
    }
    if sys.mode == Nonlinearity::Cone && (u0 < 0.0 || v0 < 0.0) {
        return Err(Error::InvalidArgument("nonnegative system needs u0, v0 ≥ 0".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("series radius must be positive".into()));
    }
    let fail = |rem: f64| Error::ContractionFailure {
        remainder: rem,
        tol: abs_tol,
        radius: eps,
    };
    let (c_u, c_v) = (PowerSeries::constant(u0), PowerSeries::constant(v0));
    let (u1, v1) = picard(sys, u0, v0, &c_u, &c_v, eps).ok_or_else(|| fail(f64::INFINITY))?;
    let (u2, v2) = picard(sys, u0, v0, &u1, &v1, eps).ok_or_else(|| fail(f64::INFINITY))?;
    let (u3, v3) = picard(sys, u0, v0, &u2, &v2, eps).ok_or_else(|| fail(f64::INFINITY))?;

    let state = RadialState {
        r: eps,
        u: u2.eval(eps),
        up: u2.eval_deriv(eps),
        v: v2.eval(eps),
        vp: v2.eval_deriv(eps),
    };
    let du = (u3.eval(eps) - state.u).abs();
    let dv = (v3.eval(eps) - state.v).abs();
    let dup = (u3.eval_deriv(eps) - state.up).abs();
    let dvp = (v3.eval_deriv(eps) - state.vp).abs();
    let ok = |d: f64, x: f64| d <= abs_tol + rel_tol * x.abs();
    let remainder = du.max(dv);
    if !(ok(du, state.u) && ok(dv, state.v) && ok(dup, state.up) && ok(dvp, state.vp)) {
        return Err(fail(remainder.max(dup).max(dvp)));
    }
    Ok(SeriesStart {
        state,
        remainder,
        u_series: u2,
        v_series: v2,
    })
}

/// [`series_start`] at `eps_rel` natural lengths, halving the radius until the
/// Picard correction passes.
pub fn series_start_auto(
    sys: &RadialSystem,
    u0: f64,
    v0: f64,
    eps_rel: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<SeriesStart> {
    let mut eps = eps_rel * natural_length(sys, u0, v0)?;
    let mut last_err = None;
    for _ in 0..60 {
        match series_start(sys, u0, v0, eps, rel_tol, abs_tol) {
            Ok(s) => return Ok(s),
            Err(e @ Error::ContractionFailure { .. }) => {
                last_err = Some(e);
                eps *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;

    #[test]
    fn first_picard_term_n3() {
        let sys = RadialSystem::cone(ProblemParams::unweighted(3.0, 2.0, 2.0));
        let eps = 1e-3;
        let s = series_start(&sys, 1.0, 1.0, eps, 1e-12, 1e-15).unwrap();
        assert!((s.state.u - 1.0 - eps * eps / 6.0).abs() < 1e-12);
        assert!((s.state.up - eps / 3.0).abs() < 1e-10);
        assert_eq!(s.state.u, s.state.v);
    }

    #[test]
    fn one_sided_data_leading_orders() {
        let p = ProblemParams::new(3.0, 0.5, -0.5, 1.5, 2.5);
        let sys = RadialSystem::cone(p.clone());
        let u0 = 1.3;
        let eps = 1e-3;
        let s = series_start(&sys, u0, 0.0, eps, 1e-12, 1e-30).unwrap();
        let (n, a, b, d, m) = (p.n, p.a, p.b, p.delta, p.mu);
        let v_lead = u0.powf(m) * eps.powf(2.0 + b) / ((n + b) * (2.0 + b));
        assert!((s.state.v / v_lead - 1.0).abs() < 1e-6);
        let k = 2.0 + a + (2.0 + b) * d;
        let up_lead = u0.powf(d * m) * eps.powf(k - 1.0)
            / (((n + b) * (2.0 + b)).powf(d) * (n + a + (2.0 + b) * d));
        assert!((s.state.up / up_lead - 1.0).abs() < 1e-6);
    }

    #[test]
    fn trivial_data_rejected() {
        let sys = RadialSystem::cone(ProblemParams::unweighted(3.0, 2.0, 2.0));
        assert!(series_start(&sys, 0.0, 0.0, 1e-3, 1e-12, 1e-14).is_err());
    }

    #[test]
    fn too_large_radius_fails_then_auto_shrinks() {
        let sys = RadialSystem::cone(ProblemParams::unweighted(3.0, 2.0, 2.0));
        let err = series_start(&sys, 1.0, 1.0, 2.0, 1e-12, 1e-14).unwrap_err();
        assert!(matches!(err, Error::ContractionFailure { .. }));
        let s = series_start_auto(&sys, 1.0, 1.0, 0.5, 1e-12, 1e-14).unwrap();
        assert!(s.state.r < 0.5);
    }
}
