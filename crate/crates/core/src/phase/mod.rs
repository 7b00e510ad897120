//! Phase-space reductions of the radial system.
//!
//! Two charts are used. Near the origin, with `t = ln r`,
//! `X = −r u'/u`, `Y = −r v'/v`, `Z = r^{1+a} v^δ / u'`, `W = r^{1+b} u^μ / v'`
//! turn the radial system into the autonomous quartic field [`origin_field`].
//! Near a blow-up radius rescaled to 1, the coordinate `s` from [`psi_inv`] and
//! `t = ln s` give `X = −s u_s/u`, `Y = −s v_s/v`, `Z = s F v^δ / u_s`,
//! `W = s G u^μ / v_s` with the nonautonomous field [`boundary_field`].
//! The two charts are kept apart by [`Chart`]; their `Z`, `W` have different meanings.

mod reduced;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Control, Tolerances};
use crate::params::{Params, ProblemParams, Scalar};
use crate::radial::{RadialState, RadialTrajectory};

pub use reduced::{
    dulac_certificate, dulac_divergence, integrate_reduced2, m0_spectrum, reduce_to_2d,
    reduced2_field, reduced2_fixed_points, reduced2_jacobian, DulacCertificate, ReducedFixedPoints,
    ReducedPath, ReducedPoint, ReducedRegion,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Origin,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub chart: Chart,
    pub t: f64,
}

impl PhasePoint {
    pub fn new(c: [f64; 4], chart: Chart, t: f64) -> Self {
        PhasePoint { x: c[0], y: c[1], z: c[2], w: c[3], chart, t }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    /// `XZ ≤ 0` and `YW ≤ 0`.
    pub fn in_region_r(&self) -> bool {
        self.x * self.z <= 0.0 && self.y * self.w <= 0.0
    }
}

/// Signed power that stays odd for `p = 1`, so `δ = 1` keeps the sign of `v`.
fn spow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else {
        x.abs().powf(p)
    }
}

/// `r = ψ(s) = (1 + (N−2)s)^{−1/(N−2)}`, `e^{−s}` for `N = 2`; `ψ(s) = 1 − s` when `N = 1`.
/// It satisfies `dr/ds = −r^{N−1}`.
pub fn psi(n: f64, s: f64) -> Result<f64> {
    if n == 2.0 {
        return Ok((-s).exp());
    }
    let base = 1.0 + (n - 2.0) * s;
    if !(base > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ψ undefined at s = {s} for N = {n} (need 1 + (N−2)s > 0)"
        )));
    }
    Ok(base.powf(-1.0 / (n - 2.0)))
}

/// Inverse of [`psi`]: `s = (r^{2−N} − 1)/(N−2)`, `−ln r` for `N = 2`.
pub fn psi_inv(n: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("ψ⁻¹ needs r > 0, got {r}")));
    }
    if n == 2.0 {
        return Ok(-r.ln());
    }
    Ok((r.powf(2.0 - n) - 1.0) / (n - 2.0))
}

fn nonzero(q: f64, name: &'static str, r: f64) -> Result<f64> {
    if q == 0.0 || !q.is_finite() {
        Err(Error::VanishingQuantity { quantity: name, r })
    } else {
        Ok(q)
    }
}

/// Origin-chart coordinates of a radial state, at `t = ln r`.
pub fn to_phase_origin(params: &ProblemParams, s: &RadialState) -> Result<PhasePoint> {
    let r = s.r;
    let u = nonzero(s.u, "u", r)?;
    let v = nonzero(s.v, "v", r)?;
    let up = nonzero(s.up, "u'", r)?;
    let vp = nonzero(s.vp, "v'", r)?;
    Ok(PhasePoint {
        x: -r * up / u,
        y: -r * vp / v,
        z: r.powf(1.0 + params.a) * spow(v, params.delta) / up,
        w: r.powf(1.0 + params.b) * spow(u, params.mu) / vp,
        chart: Chart::Origin,
        t: r.ln(),
    })
}

/// Recover `(u, v)` at radius `r` from an admissible origin-chart point:
/// `u = r^{−γ_ab} |ZX|^{1/D} |WY|^{δ/D}`, `v = r^{−ξ_ab} |WY|^{1/D} |ZX|^{μ/D}`.
pub fn from_phase_origin(params: &ProblemParams, p: &PhasePoint, r: f64) -> Result<(f64, f64)> {
    let e = params.exponents()?;
    let zx = p.z * p.x;
    let wy = p.w * p.y;
    if !(zx < 0.0 && wy < 0.0) || !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "point ({}, {}, {}, {}) is not strictly admissible (need XZ < 0, YW < 0)",
            p.x, p.y, p.z, p.w
        )));
    }
    let (zx, wy) = (zx.abs(), wy.abs());
    let u = r.powf(-e.gamma_ab) * zx.powf(1.0 / e.d) * wy.powf(params.delta / e.d);
    let v = r.powf(-e.xi_ab) * wy.powf(1.0 / e.d) * zx.powf(params.mu / e.d);
    Ok((u, v))
}

/// Full radial state, with `u' = −X u/r` and `v' = −Y v/r`.
pub fn state_from_phase_origin(params: &ProblemParams, p: &PhasePoint, r: f64) -> Result<RadialState> {
    let (u, v) = from_phase_origin(params, p, r)?;
    Ok(RadialState { r, u, up: -p.x * u / r, v, vp: -p.y * v / r })
}

/// The autonomous field in the origin chart.
pub fn origin_field<T: Scalar>(p: &Params<T>, c: &[T; 4]) -> [T; 4] {
    let nm2 = p.n.clone() - T::int(2);
    let [x, y, z, w] = c.clone();
    [
        x.clone() * (x.clone() - nm2.clone() + z.clone()),
        y.clone() * (y.clone() - nm2 + w.clone()),
        z.clone() * (p.n.clone() + p.a.clone() - p.delta.clone() * y.clone() - z.clone()),
        w.clone() * (p.n.clone() + p.b.clone() - p.mu.clone() * x - w.clone()),
    ]
}

/// Jacobian of [`origin_field`], row-major.
pub fn origin_jacobian(p: &ProblemParams, c: &[f64; 4]) -> [[f64; 4]; 4] {
    let [x, y, z, w] = *c;
    let nm2 = p.n - 2.0;
    [
        [2.0 * x - nm2 + z, 0.0, x, 0.0],
        [0.0, 2.0 * y - nm2 + w, 0.0, y],
        [0.0, -p.delta * z, p.n + p.a - p.delta * y - 2.0 * z, 0.0],
        [-p.mu * w, 0.0, 0.0, p.n + p.b - p.mu * x - 2.0 * w],
    ]
}

/// `α(t) = (2N−2+a)e^t / (1+(N−2)e^t)` and `β(t)` with `b`.
pub fn alpha_beta(params: &ProblemParams, t: f64) -> (f64, f64) {
    let s = t.exp();
    let den = 1.0 + (params.n - 2.0) * s;
    (
        (2.0 * params.n - 2.0 + params.a) * s / den,
        (2.0 * params.n - 2.0 + params.b) * s / den,
    )
}

/// The field in the boundary chart at time `t = ln s`.
pub fn boundary_field(params: &ProblemParams, c: &[f64; 4], t: f64) -> [f64; 4] {
    let (al, be) = alpha_beta(params, t);
    let mut f = frozen_field(params, c);
    f[2] -= al * c[2];
    f[3] -= be * c[3];
    f
}

/// Limit of [`boundary_field`] as `t → −∞`: the origin field with `N = 1`, `a = b = 0`.
pub fn frozen_field(params: &ProblemParams, c: &[f64; 4]) -> [f64; 4] {
    origin_field(&ProblemParams::new(1.0, 0.0, 0.0, params.delta, params.mu), c)
}

/// `(μ+1)(XY + XZ/(δ+1) + YW/(μ+1))`.
pub fn varpi<T: Scalar>(delta: &T, mu: &T, c: &[T; 4]) -> T {
    let [x, y, z, w] = c.clone();
    let one = T::one();
    let inner = x.clone() * y.clone()
        + x * z / (delta.clone() + one.clone())
        + y * w / (mu.clone() + one.clone());
    (mu.clone() + one) * inner
}

/// Inputs of the `H_{σ,θ}` functional: values and `s`-derivatives at `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryJet {
    pub s: f64,
    pub u: f64,
    pub us: f64,
    pub v: f64,
    pub vs: f64,
}

fn weights_at(params: &ProblemParams, s: f64) -> Result<(f64, f64, f64)> {
    let r = psi(params.n, s)?;
    let f = r.powf(2.0 * params.n - 2.0 + params.a);
    let g = r.powf(2.0 * params.n - 2.0 + params.b);
    Ok((r, f, g))
}

/// `H_{σ,θ}(s) = r^{2−N}(u_s v_s − F v^{δ+1}/(δ+1) − G u^{μ+1}/(μ+1) − (σ v u_s + θ u v_s)/(1+(N−2)s))`.
pub fn h_sigma_theta(params: &ProblemParams, sigma: f64, theta: f64, j: &BoundaryJet) -> Result<f64> {
    let (r, f, g) = weights_at(params, j.s)?;
    let (d1, m1) = (params.delta + 1.0, params.mu + 1.0);
    let inner = j.us * j.vs
        - f * j.v.abs().powf(d1) / d1
        - g * j.u.abs().powf(m1) / m1
        - (sigma * j.v * j.us + theta * j.u * j.vs) / (1.0 + (params.n - 2.0) * j.s);
    Ok(r.powf(2.0 - params.n) * inner)
}

/// `dH_{σ,θ}/ds` from the closed-form identity
/// `(N−2−σ−θ)u_s v_s + F v^{δ+1}(N+a−σ(δ+1))/(δ+1) + G u^{μ+1}(N+b−θ(μ+1))/(μ+1)`.
pub fn h_sigma_theta_derivative(
    params: &ProblemParams,
    sigma: f64,
    theta: f64,
    j: &BoundaryJet,
) -> Result<f64> {
    let (_, f, g) = weights_at(params, j.s)?;
    let (d1, m1) = (params.delta + 1.0, params.mu + 1.0);
    Ok((params.n - 2.0 - sigma - theta) * j.us * j.vs
        + f * j.v.abs().powf(d1) / d1 * (params.n + params.a - sigma * d1)
        + g * j.u.abs().powf(m1) / m1 * (params.n + params.b - theta * m1))
}

/// Boundary jet of a radial state for blow-up at radius `big_r`, after rescaling the
/// solution so that the blow-up happens at 1: `ũ(ρ) = R^{γ_ab} u(Rρ)`, `ṽ(ρ) = R^{ξ_ab} v(Rρ)`.
pub fn boundary_jet(params: &ProblemParams, st: &RadialState, big_r: f64) -> Result<BoundaryJet> {
    let e = params.exponents()?;
    if !(big_r > 0.0) {
        return Err(Error::InvalidArgument("blow-up radius must be positive".into()));
    }
    let rho = st.r / big_r;
    let su = big_r.powf(e.gamma_ab);
    let sv = big_r.powf(e.xi_ab);
    let s = psi_inv(params.n, rho)?;
    let k = -rho.powf(params.n - 1.0);
    Ok(BoundaryJet {
        s,
        u: su * st.u,
        us: k * su * big_r * st.up,
        v: sv * st.v,
        vs: k * sv * big_r * st.vp,
    })
}

/// Boundary-chart coordinates of a radial state, for blow-up at radius `big_r`.
pub fn to_phase_boundary(params: &ProblemParams, st: &RadialState, big_r: f64) -> Result<PhasePoint> {
    let j = boundary_jet(params, st, big_r)?;
    let s = j.s;
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "r = {} is not inside the blow-up radius {big_r}",
            st.r
        )));
    }
    let (_, f, g) = weights_at(params, s)?;
    let us = nonzero(j.us, "u_s", st.r)?;
    let vs = nonzero(j.vs, "v_s", st.r)?;
    let u = nonzero(j.u, "u", st.r)?;
    let v = nonzero(j.v, "v", st.r)?;
    Ok(PhasePoint {
        x: -s * us / u,
        y: -s * vs / v,
        z: s * f * spow(v, params.delta) / us,
        w: s * g * spow(u, params.mu) / vs,
        chart: Chart::Boundary,
        t: s.ln(),
    })
}

/// Rescaled `(ũ, ṽ)` at `s = e^t` from a boundary-chart point:
/// `ũ^D = |ZX| |WY|^δ / (s^{2+2δ} F G^δ)` and symmetrically for `ṽ`.
pub fn from_phase_boundary(params: &ProblemParams, p: &PhasePoint) -> Result<(f64, f64)> {
    let e = params.exponents()?;
    let s = p.t.exp();
    let (_, f, g) = weights_at(params, s)?;
    let zx = (p.z * p.x).abs();
    let wy = (p.w * p.y).abs();
    if zx == 0.0 || wy == 0.0 {
        return Err(Error::InvalidArgument("XZ and YW must be nonzero".into()));
    }
    let (d, m) = (params.delta, params.mu);
    let u = (zx * wy.powf(d) / (s.powf(2.0 + 2.0 * d) * f * g.powf(d))).powf(1.0 / e.d);
    let v = (wy * zx.powf(m) / (s.powf(2.0 + 2.0 * m) * g * f.powf(m))).powf(1.0 / e.d);
    Ok((u, v))
}

/// A sampled path in one chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub params: ProblemParams,
    pub chart: Chart,
    pub points: Vec<PhasePoint>,
}

impl PhaseTrajectory {
    /// Map every sample (with `r > 0`) of a radial trajectory into the origin chart.
    pub fn origin_from_radial(traj: &RadialTrajectory) -> Result<Self> {
        let params = traj.system.params.clone();
        let points = traj
            .samples
            .iter()
            .filter(|s| s.r > 0.0)
            .map(|s| to_phase_origin(&params, &s.state()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhaseTrajectory { params, chart: Chart::Origin, points })
    }

    /// Map the samples with `r < big_r` into the boundary chart. Samples closer to the
    /// blow-up radius than `min_s` (in the rescaled `s`) are dropped, since their
    /// coordinates are dominated by the uncertainty in `big_r`.
    pub fn boundary_from_radial(traj: &RadialTrajectory, big_r: f64, min_s: f64) -> Result<Self> {
        let params = traj.system.params.clone();
        let mut points = Vec::new();
        for s in traj.samples.iter().filter(|s| s.r > 0.0 && s.r < big_r) {
            let p = to_phase_boundary(&params, &s.state(), big_r)?;
            if p.t.exp() >= min_s {
                points.push(p);
            }
        }
        Ok(PhaseTrajectory { params, chart: Chart::Boundary, points })
    }

    /// Field of the chart this path lives in.
    pub fn field(&self, c: &[f64; 4], t: f64) -> [f64; 4] {
        match self.chart {
            Chart::Origin => origin_field(&self.params, c),
            Chart::Boundary => boundary_field(&self.params, c, t),
        }
    }

    /// Integrate the chart's field from `p0` to `t_end`, recording every step.
    pub fn integrate(
        params: &ProblemParams,
        chart: Chart,
        p0: [f64; 4],
        t0: f64,
        t_end: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        Self::integrate_until(params, chart, p0, t0, t_end, tol, |_| false)
    }

    /// As [`PhaseTrajectory::integrate`], stopping early once `stop` returns true.
    pub fn integrate_until<S: FnMut(&PhasePoint) -> bool>(
        params: &ProblemParams,
        chart: Chart,
        p0: [f64; 4],
        t0: f64,
        t_end: f64,
        tol: &Tolerances,
        mut stop: S,
    ) -> Result<Self> {
        let mut traj = PhaseTrajectory { params: params.clone(), chart, points: vec![PhasePoint::new(p0, chart, t0)] };
        let field = |t: f64, y: &[f64; 4]| match chart {
            Chart::Origin => origin_field(params, y),
            Chart::Boundary => boundary_field(params, y, t),
        };
        let points = &mut traj.points;
        ode::integrate(field, t0, p0, t_end, tol, |step| {
            let p = PhasePoint::new(step.y1, chart, step.t1);
            points.push(p);
            if stop(&p) {
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        Ok(traj)
    }

    /// Largest `k` with `1/k ≤ X, Y, |Z|, |W| ≤ k` over the points with `t ≤ t_bar`.
    /// Infinite if some coordinate vanishes or has the wrong sign for `X, Y`.
    pub fn measured_k(&self, t_bar: f64) -> f64 {
        let mut k: f64 = 1.0;
        for p in self.points.iter().filter(|p| p.t <= t_bar) {
            if !(p.x > 0.0 && p.y > 0.0) {
                return f64::INFINITY;
            }
            for q in [p.x, p.y, p.z.abs(), p.w.abs()] {
                k = k.max(q).max(1.0 / q);
            }
        }
        k
    }

    /// `ϖ` along the path.
    pub fn varpi_series(&self) -> Vec<f64> {
        let (d, m) = (self.params.delta, self.params.mu);
        self.points.iter().map(|p| varpi(&d, &m, &p.coords())).collect()
    }

    /// CSV with columns `t,X,Y,Z,W,x,y,tau,varpi`. The reduced columns are empty where
    /// `Z` does not keep a negative sign.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,X,Y,Z,W,x,y,tau,varpi")?;
        let reduced = reduce_to_2d(self).ok();
        let varpi = self.varpi_series();
        for (i, p) in self.points.iter().enumerate() {
            write!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", p.t, p.x, p.y, p.z, p.w)?;
            match reduced.as_ref().and_then(|r| r.point_at_index(i)) {
                Some(q) => write!(out, ",{:.17e},{:.17e},{:.17e}", q.x, q.y, q.tau)?,
                None => write!(out, ",,,")?,
            }
            writeln!(out, ",{:.17e}", varpi[i])?;
        }
        Ok(())
    }
}
