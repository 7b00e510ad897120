//! Dormand–Prince 5(4) with Hairer's continuous extension.
//!
//! Fixed-size state (`[f64; D]`), forward or backward in time. The caller sees
//! every accepted step through a callback that may stop the integration; the
//! step carries its dense-output polynomial so events can be located inside it.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub max_step: f64,
    /// Initial |h|; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub max_steps: usize,
    /// Smallest |h| relative to |t| before giving up.
    pub min_rel_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            h_init: None,
            max_steps: 1_000_000,
            min_rel_step: 1e-14,
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Clone, Debug)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    pub f0: [f64; D],
    pub f1: [f64; D],
    /// Weighted RMS local error estimate (≤ 1 for accepted steps).
    pub err: f64,
    rcont: [[f64; D]; 5],
}

impl<const D: usize> Step<D> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Dense output at `t` (4th order inside the step).
    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h();
        let th1 = 1.0 - th;
        let mut y = [0.0; D];
        for i in 0..D {
            let r = &self.rcont;
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }

    /// Locate `t` in the step where `g(t, y(t)) = 0`, given a sign change between the ends.
    pub fn find_root<G: Fn(f64, &[f64; D]) -> f64>(&self, g: G) -> Option<f64> {
        let (mut lo, mut hi) = (self.t0, self.t1);
        let mut glo = g(lo, &self.y0);
        let ghi = g(hi, &self.y1);
        if glo == 0.0 {
            return Some(lo);
        }
        if glo.signum() == ghi.signum() {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let gm = g(mid, &self.eval(mid));
            if gm == 0.0 {
                return Some(mid);
            }
            if gm.signum() == glo.signum() {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Callback verdict after each accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub steps: usize,
    pub rejected: usize,
    /// True when the callback requested the stop before `t_end`.
    pub stopped: bool,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

fn all_finite<const D: usize>(y: &[f64; D]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn initial_step<const D: usize, F>(f: &mut F, t0: f64, y0: &[f64; D], f0: &[f64; D], dir: f64, tol: &Tolerances) -> f64
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    let sc: Vec<f64> = y0.iter().map(|y| tol.atol + tol.rtol * y.abs()).collect();
    let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / D as f64).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / D as f64).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(tol.max_step);
    let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
    let f1 = f(t0 + dir * h0, &y1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / D as f64)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    if !h1.is_finite() {
        return h0;
    }
    (100.0 * h0).min(h1).min(tol.max_step)
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`. `on_step` sees each accepted
/// step and may stop the run.
pub fn integrate<const D: usize, F, C>(
    mut f: F,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    tol: &Tolerances,
    mut on_step: C,
) -> Result<Outcome<D>>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
    C: FnMut(&Step<D>) -> Control,
{
    if !(tol.rtol > 0.0 && tol.atol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if !all_finite(&k1) || !all_finite(&y) {
        return Err(Error::NonFinite(t));
    }
    let mut h = tol
        .h_init
        .unwrap_or_else(|| initial_step(&mut f, t, &y, &k1, dir, tol))
        .abs()
        .min(tol.max_step);
    let mut steps = 0;
    let mut rejected = 0;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        if steps + rejected >= tol.max_steps {
            return Err(Error::TooManySteps(tol.max_steps));
        }
        let min_h = tol.min_rel_step * t.abs().max(1e-300);
        if h < min_h {
            return Err(Error::StepUnderflow { t, h });
        }
        let mut last = false;
        if (t + dir * h - t_end) * dir >= 0.0 {
            h = (t_end - t).abs();
            last = true;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t1 = if last { t_end } else { t + hs };
        let k7 = f(t1, &y1);

        let finite = all_finite(&y1) && all_finite(&k7);
        let mut err = f64::INFINITY;
        if finite {
            let mut acc = 0.0;
            for i in 0..D {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(y1[i].abs());
                acc += (e / sc).powi(2);
            }
            err = (acc / D as f64).sqrt();
        }
        if !err.is_finite() {
            h *= 0.25;
            rejected += 1;
            last_rejected = true;
            continue;
        }

        // Lund-stabilised step size control (Hairer's dopri5 defaults).
        let fac11 = err.powf(0.2 - 0.04 * 0.75);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(0.1, 5.0);
        let h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            steps += 1;
            let mut rcont = [[0.0; D]; 5];
            for i in 0..D {
                let ydiff = y1[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - hs * k7[i] - bspl;
                rcont[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = Step {
                t0: t,
                t1,
                y0: y,
                y1,
                f0: k1,
                f1: k7,
                err,
                rcont,
            };
            t = t1;
            y = y1;
            k1 = k7;
            if on_step(&step) == Control::Stop {
                return Ok(Outcome {
                    t,
                    y,
                    steps,
                    rejected,
                    stopped: true,
                });
            }
            h = if last_rejected { h_new.min(h) } else { h_new };
            h = h.min(tol.max_step);
            last_rejected = false;
        } else {
            h /= (fac11 / 0.9).min(5.0);
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(Outcome {
        t,
        y,
        steps,
        rejected,
        stopped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_forward_and_backward() {
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let out = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &tol, |_| Control::Continue).unwrap();
        assert!((out.y[0] - 2f64.exp()).abs() < 1e-10 * 2f64.exp());
        let back = integrate(|_, y: &[f64; 1]| [y[0]], 2.0, out.y, 0.0, &tol, |_| Control::Continue).unwrap();
        assert!((back.y[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let tol = Tolerances {
            rtol: 1e-11,
            atol: 1e-13,
            ..Default::default()
        };
        let mut worst: f64 = 0.0;
        integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &tol,
            |s| {
                for j in 1..4 {
                    let t = s.t0 + s.h() * j as f64 / 4.0;
                    worst = worst.max((s.eval(t)[0] - t.sin()).abs());
                }
                Control::Continue
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "dense output error {worst}");
    }

    #[test]
    fn event_location_and_stop() {
        let tol = Tolerances::default();
        let mut hit = None;
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &tol,
            |s| match s.find_root(|_, y| y[0]) {
                Some(t) => {
                    hit = Some(t);
                    Control::Stop
                }
                None => Control::Continue,
            },
        )
        .unwrap();
        assert!(out.stopped);
        assert!((hit.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn finite_time_blowup_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let tol = Tolerances::default();
        let err = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, &tol, |_| Control::Continue).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. } | Error::NonFinite(_) | Error::TooManySteps(_)));
    }
}
