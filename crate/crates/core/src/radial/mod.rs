//! Radial form of the system and its numerical integration.
//!
//! `u'' + (N−1)/r u' = r^a v^δ`, `v'' + (N−1)/r v' = r^b u^μ`, started either
//! from regular data at the origin (through a Picard series) or from any state.

mod blowup;
mod integrate;
mod kelvin;
pub mod series;
mod start;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::ProblemParams;

pub use blowup::{estimate_blowup_radius, estimate_blowup_radius_with, BlowupEstimate, TrailEntry};
pub use integrate::{integrate, integrate_biharmonic, integrate_regular, integrate_system};
pub use kelvin::{kelvin_jet, kelvin_transform};
pub use start::{natural_length, series_start, series_start_auto, SeriesStart};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub r: f64,
    pub u: f64,
    pub up: f64,
    pub v: f64,
    pub vp: f64,
}

/// A state together with second derivatives, for defect evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialJet {
    pub r: f64,
    pub u: f64,
    pub up: f64,
    pub upp: f64,
    pub v: f64,
    pub vp: f64,
    pub vpp: f64,
}

impl RadialJet {
    pub fn state(&self) -> RadialState {
        RadialState {
            r: self.r,
            u: self.u,
            up: self.up,
            v: self.v,
            vp: self.vp,
        }
    }
}

/// How the nonlinearities treat signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// Nonnegative solutions: `v^δ`, `u^μ`.
    Cone,
    /// `Δu = v`, `Δv = r^b |u|^μ` (δ = 1, a = 0); signs of `u`, `v` are free.
    Biharmonic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSystem {
    pub params: ProblemParams,
    pub mode: Nonlinearity,
}

impl RadialSystem {
    pub fn cone(params: ProblemParams) -> Self {
        RadialSystem {
            params,
            mode: Nonlinearity::Cone,
        }
    }

    pub fn biharmonic(n: f64, mu: f64, b: f64) -> Self {
        RadialSystem {
            params: ProblemParams::new(n, 0.0, b, 1.0, mu),
            mode: Nonlinearity::Biharmonic,
        }
    }

    /// Right-hand sides `(r^a g(v), r^b h(u))` of the two Laplacians.
    pub fn sources(&self, r: f64, u: f64, v: f64) -> (f64, f64) {
        let p = &self.params;
        let wa = if p.a == 0.0 { 1.0 } else { r.powf(p.a) };
        let wb = if p.b == 0.0 { 1.0 } else { r.powf(p.b) };
        match self.mode {
            Nonlinearity::Cone => (wa * v.max(0.0).powf(p.delta), wb * u.max(0.0).powf(p.mu)),
            Nonlinearity::Biharmonic => (wa * v, wb * u.abs().powf(p.mu)),
        }
    }

    /// Second derivatives `(u'', v'')` from the system.
    pub fn second_derivatives(&self, r: f64, u: f64, up: f64, v: f64, vp: f64) -> (f64, f64) {
        let (fu, fv) = self.sources(r, u, v);
        let k = self.params.n - 1.0;
        if k == 0.0 {
            (fu, fv)
        } else {
            (fu - k / r * up, fv - k / r * vp)
        }
    }

    pub fn jet(&self, s: &RadialState) -> RadialJet {
        let (upp, vpp) = self.second_derivatives(s.r, s.u, s.up, s.v, s.vp);
        RadialJet {
            r: s.r,
            u: s.u,
            up: s.up,
            upp,
            v: s.v,
            vp: s.vp,
            vpp,
        }
    }

    /// `(Δu − r^a g(v), Δv − r^b h(u))` for a candidate jet.
    pub fn defect(&self, j: &RadialJet) -> (f64, f64) {
        let k = self.params.n - 1.0;
        let (fu, fv) = self.sources(j.r, j.u, j.v);
        (j.upp + k / j.r * j.up - fu, j.vpp + k / j.r * j.vp - fv)
    }

    /// Defect divided by the size of the terms it balances.
    pub fn relative_defect(&self, j: &RadialJet) -> f64 {
        let k = self.params.n - 1.0;
        let (fu, fv) = self.sources(j.r, j.u, j.v);
        let (du, dv) = self.defect(j);
        let su = j.upp.abs() + (k / j.r * j.up).abs() + fu.abs();
        let sv = j.vpp.abs() + (k / j.r * j.vp).abs() + fv.abs();
        let ru = if su > 0.0 { du.abs() / su } else { du.abs() };
        let rv = if sv > 0.0 { dv.abs() / sv } else { dv.abs() };
        ru.max(rv)
    }
}

/// Defect of the nonnegative system at a jet.
pub fn ode_defect(params: &ProblemParams, jet: &RadialJet) -> (f64, f64) {
    RadialSystem::cone(params.clone()).defect(jet)
}

/// Integration settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Increasing `u` levels recorded as threshold crossings; the last one ends the run.
    pub blowup_threshold_schedule: Vec<f64>,
    /// Series start radius, in units of the data's natural length.
    pub series_start_radius: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_step: f64::INFINITY,
            blowup_threshold_schedule: (3..=9).map(|k| 10f64.powi(k)).collect(),
            series_start_radius: 1e-3,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidArgument("max_step must be positive".into()));
        }
        if self
            .blowup_threshold_schedule
            .windows(2)
            .any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidArgument(
                "threshold schedule must be strictly increasing".into(),
            ));
        }
        if !(self.series_start_radius > 0.0) {
            return Err(Error::InvalidArgument("series start radius must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn tolerances(&self) -> crate::ode::Tolerances {
        crate::ode::Tolerances {
            rtol: self.rel_tol,
            atol: self.abs_tol,
            max_step: self.max_step,
            h_init: None,
            max_steps: self.max_steps,
            min_rel_step: 1e-15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub up: f64,
    pub v: f64,
    pub vp: f64,
    /// Weighted local error estimate of the step that produced the sample.
    pub err: f64,
}

impl Sample {
    pub fn state(&self) -> RadialState {
        RadialState {
            r: self.r,
            u: self.u,
            up: self.up,
            v: self.v,
            vp: self.vp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub threshold: f64,
    pub r: f64,
    pub u: f64,
    pub up: f64,
    pub v: f64,
    pub vp: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    /// The last threshold was crossed.
    BlowUp,
    /// Step size collapsed before the schedule finished; treated as a blow-up event.
    StepUnderflow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialTrajectory {
    pub system: RadialSystem,
    /// Regular data at the origin, when the run started there.
    pub initial_data: Option<(f64, f64)>,
    pub samples: Vec<Sample>,
    pub crossings: Vec<Crossing>,
    pub termination: Termination,
}

impl RadialTrajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn is_outward(&self) -> bool {
        self.samples.len() < 2 || self.samples[1].r > self.samples[0].r
    }

    pub fn jets(&self) -> Vec<RadialJet> {
        self.samples.iter().map(|s| self.system.jet(&s.state())).collect()
    }

    /// Cubic Hermite interpolation between samples (uses `u''`, `v''` from the system
    /// for the derivative columns). `None` outside the sampled range.
    pub fn interpolate(&self, r: f64) -> Option<RadialState> {
        let n = self.samples.len();
        if n == 0 {
            return None;
        }
        let out = self.is_outward();
        let key = |s: &Sample| if out { s.r } else { -s.r };
        let x = if out { r } else { -r };
        let (lo, hi) = (key(&self.samples[0]), key(&self.samples[n - 1]));
        if x < lo || x > hi {
            return None;
        }
        let idx = self.samples.partition_point(|s| key(s) <= x);
        let i = idx.clamp(1, n - 1);
        let (s0, s1) = (&self.samples[i - 1], &self.samples[i]);
        let h = s1.r - s0.r;
        if h == 0.0 {
            return Some(s0.state());
        }
        let th = (r - s0.r) / h;
        let j0 = self.system.jet(&s0.state());
        let j1 = self.system.jet(&s1.state());
        let herm = |y0: f64, d0: f64, y1: f64, d1: f64| {
            let h00 = (1.0 + 2.0 * th) * (1.0 - th).powi(2);
            let h10 = th * (1.0 - th).powi(2);
            let h01 = th * th * (3.0 - 2.0 * th);
            let h11 = th * th * (th - 1.0);
            h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
        };
        Some(RadialState {
            r,
            u: herm(s0.u, s0.up, s1.u, s1.up),
            up: herm(s0.up, j0.upp, s1.up, j1.upp),
            v: herm(s0.v, s0.vp, s1.v, s1.vp),
            vp: herm(s0.vp, j0.vpp, s1.vp, j1.vpp),
        })
    }

    /// Relative drift of `u'v' − u^{μ+1}/(μ+1) − v^{δ+1}/(δ+1)` (exact first integral
    /// for `N = 1`, `a = b = 0`), measured against the size of its terms.
    pub fn first_integral_drift(&self) -> f64 {
        let p = &self.system.params;
        let value = |s: &Sample| {
            let t1 = s.up * s.vp;
            let t2 = s.u.abs().powf(p.mu + 1.0) / (p.mu + 1.0);
            let t3 = s.v.abs().powf(p.delta + 1.0) / (p.delta + 1.0);
            (t1 - t2 - t3, t1.abs() + t2 + t3)
        };
        let (c0, s0) = value(self.first());
        self.samples
            .iter()
            .map(|s| {
                let (c, sc) = value(s);
                (c - c0).abs() / (sc.max(s0))
            })
            .fold(0.0, f64::max)
    }

    /// Largest decrease of `r^{N−1} u'` between consecutive samples, relative to its size
    /// (zero when the quantity is nondecreasing).
    pub fn flux_monotonicity_violation(&self) -> f64 {
        let n1 = self.system.params.n - 1.0;
        let flux: Vec<f64> = self.samples.iter().map(|s| s.r.powf(n1) * s.up).collect();
        flux.windows(2)
            .map(|w| {
                let drop = w[0] - w[1];
                if drop > 0.0 {
                    drop / w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE)
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,u,up,v,vp,err")?;
        for s in &self.samples {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}", s.r, s.u, s.up, s.v, s.vp, s.err)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::singular_constants;

    fn particular_jet(r: f64) -> RadialJet {
        // u* = v* = 2 r^{-2}, N = 3, δ = μ = 2.
        RadialJet {
            r,
            u: 2.0 / (r * r),
            up: -4.0 / r.powi(3),
            upp: 12.0 / r.powi(4),
            v: 2.0 / (r * r),
            vp: -4.0 / r.powi(3),
            vpp: 12.0 / r.powi(4),
        }
    }

    #[test]
    fn particular_solution_has_zero_defect() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let sys = RadialSystem::cone(p.clone());
        for r in [0.01, 0.3, 1.0, 7.0] {
            let (du, dv) = ode_defect(&p, &particular_jet(r));
            let scale = 12.0 / r.powi(4);
            assert!(du.abs() < 1e-12 * scale && dv.abs() < 1e-12 * scale);
            assert!(sys.relative_defect(&particular_jet(r)) < 1e-14);
        }
    }

    #[test]
    fn weighted_particular_solution_has_zero_defect() {
        let p = ProblemParams::new(3.0, 1.0, -0.5, 2.0, 1.5);
        let e = p.exponents().unwrap();
        let c = singular_constants(&p).unwrap();
        let sys = RadialSystem::cone(p.clone());
        for r in [0.05, 0.5, 3.0] {
            let (g, x) = (e.gamma_ab, e.xi_ab);
            let jet = RadialJet {
                r,
                u: c.a_n * r.powf(-g),
                up: -g * c.a_n * r.powf(-g - 1.0),
                upp: g * (g + 1.0) * c.a_n * r.powf(-g - 2.0),
                v: c.b_n * r.powf(-x),
                vp: -x * c.b_n * r.powf(-x - 1.0),
                vpp: x * (x + 1.0) * c.b_n * r.powf(-x - 2.0),
            };
            assert!(sys.relative_defect(&jet) < 1e-13);
        }
    }

    #[test]
    fn zero_state_has_zero_defect() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let z = RadialJet { r: 0.5, u: 0.0, up: 0.0, upp: 0.0, v: 0.0, vp: 0.0, vpp: 0.0 };
        assert_eq!(ode_defect(&p, &z), (0.0, 0.0));
    }

    #[test]
    fn perturbed_particular_solution_defect_is_first_order() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let c = 1e-3;
        for r in [0.5, 1.0, 2.0] {
            let mut j = particular_jet(r);
            let ustar = j.u;
            j.u += c;
            let (_, dv) = ode_defect(&p, &j);
            let predicted = -p.mu * ustar.powf(p.mu - 1.0) * c;
            assert!((dv - predicted).abs() < 1e-3 * predicted.abs() + c * c * 2.0, "{dv} vs {predicted}");
        }
    }

    #[test]
    fn config_validation() {
        let mut c = IntegratorConfig::default();
        assert!(c.validate().is_ok());
        c.blowup_threshold_schedule = vec![1e3, 1e3];
        assert!(c.validate().is_err());
        let c = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
