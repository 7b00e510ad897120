//! The planar system obtained from the boundary chart through `x = −X/Z`, `y = −Y/Z`,
//! `τ = ∫_t^{t̄} |Z|`, and the Bendixson–Dulac function that rules out cycles in it.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{alpha_beta, varpi, Chart, PhaseTrajectory};
use crate::error::{Error, Result};
use crate::ode::{self, Control, Tolerances};
use crate::params::Scalar;

/// `x' = x(2 − x − δy)`, `y' = (y − 1/(δ+1))((μ+1)x − (δ+1)y)`.
pub fn reduced2_field<T: Scalar>(delta: &T, mu: &T, xy: &[T; 2]) -> [T; 2] {
    let [x, y] = xy.clone();
    let one = T::one();
    let d1 = delta.clone() + one.clone();
    let m1 = mu.clone() + one.clone();
    [
        x.clone() * (T::int(2) - x.clone() - delta.clone() * y.clone()),
        (y.clone() - one / d1.clone()) * (m1 * x - d1 * y),
    ]
}

pub fn reduced2_jacobian(delta: f64, mu: f64, xy: [f64; 2]) -> [[f64; 2]; 2] {
    let [x, y] = xy;
    let (d1, m1) = (delta + 1.0, mu + 1.0);
    let c = 1.0 / d1;
    [
        [2.0 - 2.0 * x - delta * y, -delta * x],
        [m1 * (y - c), (m1 * x - d1 * y) - d1 * (y - c)],
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedFixedPoints<T> {
    pub o: [T; 2],
    pub j0: [T; 2],
    pub l0: [T; 2],
    pub m0: [T; 2],
}

impl<T: Clone> ReducedFixedPoints<T> {
    pub fn all(&self) -> [(&'static str, [T; 2]); 4] {
        [
            ("O", self.o.clone()),
            ("j0", self.j0.clone()),
            ("l0", self.l0.clone()),
            ("m0", self.m0.clone()),
        ]
    }
}

/// `O`, `j₀ = (0, 1/(δ+1))`, `ℓ₀ = ((δ+2)/(δ+1), 1/(δ+1))` and
/// `m₀ = (2(δ+1), 2(μ+1)) / (μδ + 2δ + 1)`.
pub fn reduced2_fixed_points<T: Scalar>(delta: &T, mu: &T) -> ReducedFixedPoints<T> {
    let one = T::one();
    let two = T::int(2);
    let d1 = delta.clone() + one.clone();
    let den = mu.clone() * delta.clone() + two.clone() * delta.clone() + one.clone();
    ReducedFixedPoints {
        o: [T::zero(), T::zero()],
        j0: [T::zero(), one.clone() / d1.clone()],
        l0: [(delta.clone() + two.clone()) / d1.clone(), one.clone() / d1.clone()],
        m0: [
            two.clone() * d1 / den.clone(),
            two * (mu.clone() + one) / den,
        ],
    }
}

/// Roots of `(γ+1)ℓ² + (γ+ξ+1)ℓ + 2(ξ+1) = 0`, the eigenvalues of the planar field at `m₀`.
pub fn m0_spectrum(delta: f64, mu: f64) -> Result<[Complex64; 2]> {
    let d = mu * delta - 1.0;
    if !(d > 0.0) {
        return Err(Error::invalid("superlinearity D = μδ − 1 > 0", format!("D = {d}")));
    }
    let g = 2.0 * (1.0 + delta) / d;
    let x = 2.0 * (1.0 + mu) / d;
    let (a, b, c) = (g + 1.0, g + x + 1.0, 2.0 * (x + 1.0));
    let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    Ok([(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)])
}

/// Dulac function `B = x^p (y − c)^{−q}` with `c = 1/(δ+1)`, for which
/// `div(B·f) = M·B` with a constant `M < 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DulacCertificate<T> {
    pub p: T,
    pub q: T,
    pub m: T,
    pub c: T,
}

pub fn dulac_certificate<T: Scalar>(delta: &T, mu: &T) -> Result<DulacCertificate<T>> {
    let one = T::one();
    let two = T::int(2);
    let md = mu.clone() * delta.clone();
    if md.clone() - one.clone() <= T::zero() {
        return Err(Error::invalid(
            "superlinearity D = μδ − 1 > 0",
            format!("D = {}", (md - one).to_f64()),
        ));
    }
    let d1 = delta.clone() + one.clone();
    let den = md.clone() + two.clone() * delta.clone() + one.clone();
    let q = (md.clone() + two.clone() * delta.clone() + two.clone()) / den.clone();
    let p = mu.clone() - one.clone() - q.clone() * (mu.clone() + one.clone());
    let m = -((md + two.clone() * mu.clone() + one.clone()) / den + delta.clone() + two) / d1.clone();
    Ok(DulacCertificate { p, q, m, c: one / d1 })
}

impl DulacCertificate<f64> {
    pub fn weight(&self, x: f64, y: f64) -> f64 {
        x.powf(self.p) * (y - self.c).powf(-self.q)
    }
}

/// `div(B·f)` by the product rule, with `f` the planar field; equals `M·B` identically.
pub fn dulac_divergence(delta: f64, mu: f64, cert: &DulacCertificate<f64>, x: f64, y: f64) -> f64 {
    let [f, g] = reduced2_field(&delta, &mu, &[x, y]);
    let j = reduced2_jacobian(delta, mu, [x, y]);
    let b = cert.weight(x, y);
    b * (cert.p / x * f + j[0][0] - cert.q / (y - cert.c) * g + j[1][1])
}

/// A point of the planar path, with the residuals that separate the reduced boundary
/// dynamics from the autonomous planar field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedPoint {
    pub x: f64,
    pub y: f64,
    pub tau: f64,
    /// Boundary-chart time the point came from (`NaN` for planar integrations).
    pub t: f64,
    pub varpi1: f64,
    pub varpi2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedPath {
    /// One point per input sample, in the input order.
    pub points: Vec<ReducedPoint>,
}

impl ReducedPath {
    pub fn point_at_index(&self, i: usize) -> Option<&ReducedPoint> {
        self.points.get(i)
    }

    /// Points ordered by increasing `τ`.
    pub fn sorted_by_tau(&self) -> Vec<ReducedPoint> {
        let mut v = self.points.clone();
        v.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        v
    }
}

/// Reduce a boundary-chart path to the plane. `τ = ∫_t^{t̄} |Z| dσ` with `t̄` the latest
/// time on the path, accumulated with the cubic Hermite rule (fourth order, matching the
/// integrator's dense output).
pub fn reduce_to_2d(traj: &PhaseTrajectory) -> Result<ReducedPath> {
    if traj.chart != Chart::Boundary {
        return Err(Error::InvalidArgument("reduction needs a boundary-chart path".into()));
    }
    let n = traj.points.len();
    if let Some(p) = traj.points.iter().find(|p| !(p.z < 0.0)) {
        return Err(Error::ZSignChange(p.t));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| traj.points[j].t.total_cmp(&traj.points[i].t));
    let mut tau = vec![0.0; n];
    for w in order.windows(2) {
        let (hi, lo) = (&traj.points[w[0]], &traj.points[w[1]]);
        let h = hi.t - lo.t;
        let dz_lo = traj.field(&lo.coords(), lo.t)[2];
        let dz_hi = traj.field(&hi.coords(), hi.t)[2];
        // ∫_lo^hi Z dt, Hermite
        let int_z = 0.5 * h * (lo.z + hi.z) + h * h / 12.0 * (dz_lo - dz_hi);
        tau[w[1]] = tau[w[0]] - int_z;
    }
    let (d, m) = (traj.params.delta, traj.params.mu);
    let points = traj
        .points
        .iter()
        .zip(&tau)
        .map(|(p, &tau)| {
            let (al, _) = alpha_beta(&traj.params, p.t);
            let z2 = p.z * p.z;
            ReducedPoint {
                x: -p.x / p.z,
                y: -p.y / p.z,
                tau,
                t: p.t,
                varpi1: -al * p.x / z2,
                varpi2: (varpi(&d, &m, &p.coords()) - al * p.y) / z2,
            }
        })
        .collect();
    Ok(ReducedPath { points })
}

/// Integrate the planar field from `(x0, y0)` over `[0, tau_end]`.
pub fn integrate_reduced2(
    delta: f64,
    mu: f64,
    xy0: [f64; 2],
    tau_end: f64,
    tol: &Tolerances,
) -> Result<Vec<ReducedPoint>> {
    let pt = |tau: f64, xy: [f64; 2]| ReducedPoint { x: xy[0], y: xy[1], tau, t: f64::NAN, varpi1: 0.0, varpi2: 0.0 };
    let mut out = vec![pt(0.0, xy0)];
    ode::integrate(
        |_, xy: &[f64; 2]| reduced2_field(&delta, &mu, xy),
        0.0,
        xy0,
        tau_end,
        tol,
        |step| {
            out.push(pt(step.t1, step.y1));
            Control::Continue
        },
    )?;
    Ok(out)
}

/// The box `1/k² ≤ x ≤ k²`, `1/(δ+1) + 1/(2(μ+1)k⁴) ≤ y ≤ k²` that traps the reduced path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedRegion {
    pub k: f64,
    pub delta: f64,
    pub mu: f64,
}

impl ReducedRegion {
    pub fn x_range(&self) -> (f64, f64) {
        (self.k.powi(-2), self.k * self.k)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (
            1.0 / (self.delta + 1.0) + 1.0 / (2.0 * (self.mu + 1.0) * self.k.powi(4)),
            self.k * self.k,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    }

    /// Uniform sample of the box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        [rng.random_range(x0..=x1), rng.random_range(y0..=y1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ratio;
    use num_rational::BigRational;
    use num_traits::Zero;

    #[test]
    fn fixed_points_annihilate_field_exactly() {
        for (d, m) in [(2, 2), (3, 1), (5, 7)] {
            let (d, m) = (ratio(d, 1), ratio(m, 1));
            let fp = reduced2_fixed_points(&d, &m);
            for (_, p) in fp.all() {
                assert!(reduced2_field(&d, &m, &p).iter().all(BigRational::is_zero));
            }
        }
        let fp = reduced2_fixed_points(&ratio(2, 1), &ratio(2, 1));
        assert_eq!(fp.m0, [ratio(2, 3), ratio(2, 3)]);
    }

    #[test]
    fn spectrum_of_symmetric_case() {
        let s = m0_spectrum(2.0, 2.0).unwrap();
        let want = Complex64::new(-5.0 / 6.0, 47f64.sqrt() / 6.0);
        assert!((s[0] - want).norm() < 1e-14 || (s[1] - want).norm() < 1e-14);
        assert!(s.iter().all(|l| l.re < 0.0));
    }

    #[test]
    fn spectrum_matches_jacobian() {
        for (d, m) in [(2.0, 2.0), (1.3, 3.7), (4.0, 0.6)] {
            let fp = reduced2_fixed_points(&d, &m);
            let j = reduced2_jacobian(d, m, fp.m0);
            let tr = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let s = m0_spectrum(d, m).unwrap();
            assert!(((s[0] + s[1]).re - tr).abs() < 1e-12);
            assert!(((s[0] * s[1]).re - det).abs() < 1e-12);
        }
    }

    #[test]
    fn dulac_symmetric_case_exact() {
        let c = dulac_certificate(&ratio(2, 1), &ratio(2, 1)).unwrap();
        assert_eq!(c.q, ratio(10, 9));
        assert_eq!(c.p, ratio(-7, 3));
        assert_eq!(c.m, ratio(-5, 3));
    }

    #[test]
    fn dulac_divergence_is_constant_multiple() {
        for (d, m) in [(2.0, 2.0), (0.7, 3.0), (4.5, 1.1)] {
            let c = dulac_certificate(&d, &m).unwrap();
            for (x, y) in [(0.3, 0.9), (1.5, 2.0), (0.05, 0.6)] {
                let div = dulac_divergence(d, m, &c, x, y);
                let want = c.m * c.weight(x, y);
                assert!((div - want).abs() < 1e-12 * want.abs());
            }
        }
    }

    #[test]
    fn planar_flow_reaches_m0() {
        let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let path = integrate_reduced2(2.0, 2.0, [1.5, 2.0], 80.0, &tol).unwrap();
        let last = path.last().unwrap();
        assert!((last.x - 2.0 / 3.0).abs() < 1e-9 && (last.y - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn region_membership() {
        let r = ReducedRegion { k: 2.0, delta: 2.0, mu: 2.0 };
        assert!(r.contains(1.0, 1.0));
        assert!(!r.contains(1.0, 1.0 / 3.0));
        assert!(!r.contains(5.0, 1.0));
    }
}
