//! Power-law fits of computed profiles against their predicted behaviour near the
//! blow-up radius and near the origin.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::params::{boundary_constants, general_r_correction, ProblemParams};
use crate::radial::RadialTrajectory;

const LN10: f64 = std::f64::consts::LN_10;
/// Samples placed on each fit window.
const WINDOW_SAMPLES: usize = 64;
/// Allowance for round-off when comparing the full and the halved window.
const HALVING_FLOOR: f64 = 1e-6;

/// Outcome of fitting `y ≈ C x^p` on one window.
#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub claim: String,
    pub fitted_exponent: f64,
    pub fitted_constant: f64,
    pub predicted_exponent: f64,
    pub predicted_constant: Option<f64>,
    pub exponent_rel_err: f64,
    pub constant_rel_err: Option<f64>,
    /// The fit variable's range, `[lo, hi]`.
    pub window: [f64; 2],
    pub samples: usize,
    /// The larger of the two relative errors on the full window and on the halved one.
    pub full_window_err: f64,
    pub half_window_err: f64,
    pub exponent_tol: f64,
    pub constant_tol: f64,
    pub pass: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Exponent errors are relative unless the prediction is near zero.
fn exp_err(fit: f64, pred: f64) -> f64 {
    (fit - pred).abs() / pred.abs().max(1.0)
}

/// Weighted fit of `ln y = ln C + p ln x`; returns `(p, C)`.
fn power_fit(lx: &[f64], ly: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    line_fit(lx, ly, Some(w)).map(|f| (f.slope, f.intercept.exp()))
}

struct Window {
    lx: Vec<f64>,
    ly: Vec<f64>,
    w: Vec<f64>,
}

impl Window {
    /// Keep the samples whose `ln x` is within `[lo, hi]`.
    fn restrict(&self, lo: f64, hi: f64) -> Window {
        let keep: Vec<usize> = (0..self.lx.len()).filter(|&i| self.lx[i] >= lo && self.lx[i] <= hi).collect();
        Window {
            lx: keep.iter().map(|&i| self.lx[i]).collect(),
            ly: keep.iter().map(|&i| self.ly[i]).collect(),
            w: keep.iter().map(|&i| self.w[i]).collect(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    claim: &str,
    full: &Window,
    half: &Window,
    predicted_exponent: f64,
    predicted_constant: Option<f64>,
    exponent_tol: f64,
    constant_tol: f64,
) -> Result<FitReport> {
    let (p, c) = power_fit(&full.lx, &full.ly, &full.w)
        .ok_or_else(|| Error::InsufficientRange(format!("{claim}: degenerate window")))?;
    let (ph, ch) = power_fit(&half.lx, &half.ly, &half.w)
        .ok_or_else(|| Error::InsufficientRange(format!("{claim}: degenerate half window")))?;
    let e_err = exp_err(p, predicted_exponent);
    let c_err = predicted_constant.map(|k| rel(c, k));
    let full_err = e_err.max(c_err.unwrap_or(0.0));
    let half_err = exp_err(ph, predicted_exponent).max(predicted_constant.map_or(0.0, |k| rel(ch, k)));
    let pass = e_err < exponent_tol
        && c_err.is_none_or(|e| e < constant_tol)
        && half_err <= 2.0 * full_err + HALVING_FLOOR;
    let lo = full.lx.iter().copied().fold(f64::INFINITY, f64::min).exp();
    let hi = full.lx.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(FitReport {
        claim: claim.to_string(),
        fitted_exponent: p,
        fitted_constant: c,
        predicted_exponent,
        predicted_constant,
        exponent_rel_err: e_err,
        constant_rel_err: c_err,
        window: [lo, hi],
        samples: full.lx.len(),
        full_window_err: full_err,
        half_window_err: half_err,
        exponent_tol,
        constant_tol,
        pass,
    })
}

/// Fits of `u ≈ A d^{−γ}`, `v ≈ B d^{−ξ}` with `d = R − r`, plus the size of the
/// first-order correction `(u d^γ/A − 1)/d`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryFit {
    #[serde(rename = "R")]
    pub r_blow: f64,
    pub u: FitReport,
    pub v: FitReport,
    /// `max |(u d^γ/A − 1)/d|` over the full window and the halved one.
    pub correction_bound: [f64; 2],
    /// The halved window's bound does not exceed twice the full one.
    pub correction_bounded: bool,
}

impl BoundaryFit {
    pub fn pass(&self) -> bool {
        self.u.pass && self.v.pass && self.correction_bounded
    }
}

/// Fit the expansion at the blow-up radius `r_blow` over the last decade of `d`.
/// Exponents are checked to `exponent_tol`, constants to `constant_tol`.
pub fn fit_boundary_expansion(
    traj: &RadialTrajectory,
    r_blow: f64,
    exponent_tol: f64,
    constant_tol: f64,
) -> Result<BoundaryFit> {
    let params = &traj.system.params;
    let e = params.exponents()?;
    let bc = boundary_constants(params)?;
    let (fa, fb) = general_r_correction(params, r_blow)?;
    let (a_pred, b_pred) = (bc.a1 * fa, bc.b1 * fb);

    let u_max = traj.samples.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max);
    if !(u_max > 1e6) {
        return Err(Error::InsufficientRange(format!("u only reaches {u_max:e}; need more than 1e6")));
    }
    let r_last = traj.samples.iter().map(|s| s.r).filter(|r| *r < r_blow).fold(f64::NEG_INFINITY, f64::max);
    let d_min = r_blow - r_last;
    if !(d_min > 0.0) || 10.0 * d_min >= r_blow {
        return Err(Error::InsufficientRange(format!("last decade of d below d = {d_min:e} is not sampled")));
    }
    // Dense-output samples, log-spaced in d over [d_min, 10 d_min].
    let mut lx = Vec::with_capacity(WINDOW_SAMPLES);
    let mut lu = Vec::with_capacity(WINDOW_SAMPLES);
    let mut lv = Vec::with_capacity(WINDOW_SAMPLES);
    let mut w = Vec::with_capacity(WINDOW_SAMPLES);
    let mut corr = Vec::with_capacity(WINDOW_SAMPLES);
    for i in 0..WINDOW_SAMPLES {
        let ld = d_min.ln() + LN10 * i as f64 / (WINDOW_SAMPLES - 1) as f64;
        let d = ld.exp();
        let Some(s) = traj.interpolate(r_blow - d) else { continue };
        if !(s.u > 0.0 && s.v > 0.0) {
            continue;
        }
        lx.push(ld);
        lu.push(s.u.ln());
        lv.push(s.v.ln());
        w.push(1.0 / d);
        corr.push((ld, ((s.u * d.powf(e.gamma) / a_pred) - 1.0) / d));
    }
    if lx.len() < 50 {
        return Err(Error::InsufficientRange(format!("only {} samples in the last decade", lx.len())));
    }
    let wu = Window { lx: lx.clone(), ly: lu, w: w.clone() };
    let wv = Window { lx, ly: lv, w };
    let ld_min = d_min.ln();
    let ld_half = (5.0 * d_min).ln();
    let u = report("u ~ A d^-gamma", &wu, &wu.restrict(ld_min, ld_half), -e.gamma, Some(a_pred), exponent_tol, constant_tol)?;
    let v = report("v ~ B d^-xi", &wv, &wv.restrict(ld_min, ld_half), -e.xi, Some(b_pred), exponent_tol, constant_tol)?;

    let bound = |hi: f64| corr.iter().filter(|(l, _)| *l <= hi).map(|(_, c)| c.abs()).fold(0.0, f64::max);
    let correction_bound = [bound(f64::INFINITY), bound(ld_half)];
    let correction_bounded = correction_bound[1] <= 2.0 * correction_bound[0] + HALVING_FLOOR;

    // Flip the sign so exponents are reported as the positive blow-up rates.
    let flip = |mut r: FitReport| {
        r.fitted_exponent = -r.fitted_exponent;
        r.predicted_exponent = -r.predicted_exponent;
        r
    };
    Ok(BoundaryFit { r_blow, u: flip(u), v: flip(v), correction_bound, correction_bounded })
}

/// `(ln r, ln u, ln v)` for every sample with positive `u`, `v`, ordered by `r`.
pub fn log_samples(traj: &RadialTrajectory) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = traj
        .samples
        .iter()
        .filter(|s| s.r > 0.0 && s.u > 0.0 && s.v > 0.0)
        .map(|s| [s.r.ln(), s.u.ln(), s.v.ln()])
        .collect();
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    out
}

/// Candidate behaviours at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginBehavior {
    /// `u`, `v` bounded.
    Regular,
    /// `r^{N−2}u → α`, `r^{N−2}v → β`.
    BothFundamental,
    /// `r^{N−2}u → α`, `r^{(N−2)μ−2−b} v → β(α)`.
    UFundamental,
    /// The mirror image: `r^{(N−2)δ−2−a} u → α(β)`, `r^{N−2}v → β`.
    VFundamental,
    /// `u/|ln r| → α`, `v/|ln r| → β`.
    Logarithmic,
}

#[derive(Clone, Debug, Serialize)]
pub struct OriginFit {
    pub behavior: OriginBehavior,
    pub alpha: f64,
    pub beta: f64,
    /// `β(α)` (or `α(β)`) when one constant is determined by the other.
    pub slaved_predicted: Option<f64>,
    pub slaved_rel_err: Option<f64>,
    pub u: FitReport,
    pub v: FitReport,
    pub pass: bool,
}

/// Classify the behaviour at `r → 0` from `(ln r, ln u, ln v)` samples reaching
/// `r ≤ 1e−4`, over the innermost decade. `tol` bounds exponent errors and the error of a
/// slaved constant.
pub fn fit_origin_behavior(samples: &[[f64; 3]], params: &ProblemParams, tol: f64) -> Result<OriginFit> {
    let Some(first) = samples.first() else {
        return Err(Error::InsufficientRange("no samples".into()));
    };
    let lr_min = first[0];
    if lr_min > 1e-4f64.ln() {
        return Err(Error::InsufficientRange(format!("samples only reach r = {:e}; need 1e-4", lr_min.exp())));
    }
    let inner: Vec<&[f64; 3]> = samples.iter().filter(|s| s[0] <= lr_min + LN10).collect();
    if inner.len() < 5 {
        return Err(Error::InsufficientRange(format!("only {} samples in the innermost decade", inner.len())));
    }
    let lx: Vec<f64> = inner.iter().map(|s| s[0]).collect();
    let ones = vec![1.0; lx.len()];
    let wu = Window { lx: lx.clone(), ly: inner.iter().map(|s| s[1]).collect(), w: ones.clone() };
    let wv = Window { lx: lx.clone(), ly: inner.iter().map(|s| s[2]).collect(), w: ones.clone() };
    let half = |w: &Window| w.restrict(lr_min, lr_min + 0.5 * LN10);

    let nm2 = params.n - 2.0;
    let (pu, _) = power_fit(&wu.lx, &wu.ly, &wu.w).ok_or_else(|| Error::InsufficientRange("degenerate window".into()))?;
    let (pv, _) = power_fit(&wv.lx, &wv.ly, &wv.w).ok_or_else(|| Error::InsufficientRange("degenerate window".into()))?;

    let mut candidates: Vec<(OriginBehavior, f64, f64)> = vec![(OriginBehavior::Regular, 0.0, 0.0)];
    if nm2 > 0.0 {
        let ku = nm2 * params.mu - 2.0 - params.b;
        let kv = nm2 * params.delta - 2.0 - params.a;
        candidates.push((OriginBehavior::BothFundamental, -nm2, -nm2));
        candidates.push((OriginBehavior::UFundamental, -nm2, -ku));
        candidates.push((OriginBehavior::VFundamental, -kv, -nm2));
    }
    let mut matching: Vec<(OriginBehavior, f64, f64)> = Vec::new();
    for c in candidates {
        if exp_err(pu, c.1) < tol && exp_err(pv, c.2) < tol && !matching.iter().any(|m| m.1 == c.1 && m.2 == c.2) {
            matching.push(c);
        }
    }

    // Power laws that fail but with a slowly drifting slope: try the logarithmic form,
    // ln u = ln α + ln|ln r|.
    if matching.is_empty() {
        let llx: Vec<f64> = lx.iter().map(|l| l.abs().ln()).collect();
        let lu = Window { lx: llx.clone(), ly: wu.ly.clone(), w: ones.clone() };
        let lv = Window { lx: llx, ly: wv.ly.clone(), w: ones };
        let (qu, au) = power_fit(&lu.lx, &lu.ly, &lu.w).unwrap_or((f64::NAN, f64::NAN));
        let (qv, av) = power_fit(&lv.lx, &lv.ly, &lv.w).unwrap_or((f64::NAN, f64::NAN));
        if (qu - 1.0).abs() < 10.0 * tol && (qv - 1.0).abs() < 10.0 * tol {
            let alpha = (inner[0][1]).exp() / inner[0][0].abs();
            let beta = (inner[0][2]).exp() / inner[0][0].abs();
            let mk = |claim: &str, q: f64, a: f64, w: &Window| -> Result<FitReport> {
                let hi = w.lx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = w.lx.iter().copied().fold(f64::INFINITY, f64::min);
                let hw = w.restrict(hi - 0.5 * (hi - lo), hi);
                let mut r = report(claim, w, &hw, 1.0, None, 10.0 * tol, f64::INFINITY)?;
                r.fitted_exponent = q;
                r.fitted_constant = a;
                Ok(r)
            };
            let u = mk("u ~ alpha |ln r|", qu, au, &lu)?;
            let v = mk("v ~ beta |ln r|", qv, av, &lv)?;
            let pass = u.pass && v.pass;
            return Ok(OriginFit {
                behavior: OriginBehavior::Logarithmic,
                alpha,
                beta,
                slaved_predicted: None,
                slaved_rel_err: None,
                u,
                v,
                pass,
            });
        }
        return Err(Error::AmbiguousClassification(vec![format!(
            "no candidate matches fitted exponents ({pu:.4}, {pv:.4})"
        )]));
    }
    if matching.len() > 1 {
        return Err(Error::AmbiguousClassification(
            matching.iter().map(|m| format!("{:?}", m.0)).collect(),
        ));
    }
    let (behavior, eu, ev) = matching[0];
    let u = report("u exponent at the origin", &wu, &half(&wu), eu, None, tol, f64::INFINITY)?;
    let v = report("v exponent at the origin", &wv, &half(&wv), ev, None, tol, f64::INFINITY)?;
    // Constants at the innermost sample, with the predicted exponents.
    let alpha = (inner[0][1] - eu * inner[0][0]).exp();
    let beta = (inner[0][2] - ev * inner[0][0]).exp();
    let (slaved_predicted, slaved_rel_err) = match behavior {
        OriginBehavior::UFundamental => {
            let k = nm2 * params.mu;
            let pred = alpha.powf(params.mu) / ((k - params.n - params.b) * (k - 2.0 - params.b));
            (Some(pred), Some(rel(beta, pred)))
        }
        OriginBehavior::VFundamental => {
            let k = nm2 * params.delta;
            let pred = beta.powf(params.delta) / ((k - params.n - params.a) * (k - 2.0 - params.a));
            (Some(pred), Some(rel(alpha, pred)))
        }
        _ => (None, None),
    };
    let pass = u.pass && v.pass && slaved_rel_err.is_none_or(|e| e < tol.max(0.02));
    Ok(OriginFit { behavior, alpha, beta, slaved_predicted, slaved_rel_err, u, v, pass })
}

/// Suprema of `u r^{γ_ab}` and `v r^{ξ_ab}` over the samples.
#[derive(Clone, Debug, Serialize)]
pub struct KellerOssermanReport {
    pub max_u_weighted: f64,
    pub max_v_weighted: f64,
    pub argmax_r: [f64; 2],
    /// Each maximum lies strictly inside the sampled range.
    pub interior: [bool; 2],
    /// Some weighted quantity is still growing at the innermost sample.
    pub growing_at_origin: bool,
    pub finite: bool,
}

/// Scan `(ln r, ln u, ln v)` samples for the scale-invariant bounds `u ≤ C r^{−γ_ab}`,
/// `v ≤ C r^{−ξ_ab}`.
pub fn keller_osserman_check(samples: &[[f64; 3]], params: &ProblemParams) -> Result<KellerOssermanReport> {
    if samples.len() < 3 {
        return Err(Error::InsufficientRange("need at least 3 samples".into()));
    }
    let e = params.exponents()?;
    let wu: Vec<f64> = samples.iter().map(|s| s[1] + e.gamma_ab * s[0]).collect();
    let wv: Vec<f64> = samples.iter().map(|s| s[2] + e.xi_ab * s[0]).collect();
    let argmax = |v: &[f64]| {
        v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap()
    };
    let (iu, iv) = (argmax(&wu), argmax(&wv));
    let n = samples.len();
    let interior = |i: usize| i > 0 && i + 1 < n;
    // Samples are ordered by increasing r; the innermost is index 0.
    let growing_at_origin = wu[0] > wu[1] + 1e-12 || wv[0] > wv[1] + 1e-12;
    let (mu_, mv_) = (wu[iu].exp(), wv[iv].exp());
    Ok(KellerOssermanReport {
        max_u_weighted: mu_,
        max_v_weighted: mv_,
        argmax_r: [samples[iu][0].exp(), samples[iv][0].exp()],
        interior: [interior(iu), interior(iv)],
        growing_at_origin,
        finite: mu_.is_finite() && mv_.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{
        integrate_regular, IntegratorConfig, RadialSystem, Sample, Termination,
    };

    fn synthetic_boundary(params: ProblemParams, a: f64, b: f64, g: f64, x: f64) -> RadialTrajectory {
        let samples = (0..2000)
            .map(|i| {
                let d = 10f64.powf(-1.0 - 5.0 * i as f64 / 1999.0);
                let r = 1.0 - d;
                Sample {
                    r,
                    u: a * d.powf(-g),
                    up: a * g * d.powf(-g - 1.0),
                    v: b * d.powf(-x),
                    vp: b * x * d.powf(-x - 1.0),
                    err: 0.0,
                }
            })
            .collect();
        RadialTrajectory {
            system: RadialSystem::cone(params),
            initial_data: None,
            samples,
            crossings: vec![],
            termination: Termination::BlowUp,
        }
    }

    #[test]
    fn exact_profile_fits_without_error() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let t = synthetic_boundary(p, 6.0, 6.0, 2.0, 2.0);
        let f = fit_boundary_expansion(&t, 1.0, 1e-2, 2e-2).unwrap();
        assert!(f.u.exponent_rel_err < 1e-6, "{:?}", f.u);
        assert!(f.u.constant_rel_err.unwrap() < 1e-5);
        assert!(f.pass());
    }

    #[test]
    fn regular_solution_fits_boundary_constants() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let t = integrate_regular(&p, 1.0, 1.0, 10.0, &IntegratorConfig::default()).unwrap();
        let r = crate::radial::estimate_blowup_radius_with(&t).unwrap().r_hat;
        let f = fit_boundary_expansion(&t, r, 1e-2, 2e-2).unwrap();
        assert!(f.pass(), "{f:#?}");
        assert!((f.u.fitted_exponent - 2.0).abs() < 0.02);
    }

    #[test]
    fn synthetic_origin_power_is_exact() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let s: Vec<[f64; 3]> = (0..100)
            .map(|i| {
                let lr = -12.0 + 0.1 * i as f64;
                [lr, 2f64.ln() - lr, 3f64.ln() - lr]
            })
            .collect();
        let f = fit_origin_behavior(&s, &p, 1e-2).unwrap();
        assert_eq!(f.behavior, OriginBehavior::BothFundamental);
        assert!((f.u.fitted_exponent + 1.0).abs() < 1e-10);
        assert!((f.alpha - 2.0).abs() < 1e-10 && (f.beta - 3.0).abs() < 1e-10);
    }

    #[test]
    fn short_range_is_rejected() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let s = vec![[-1.0, 0.0, 0.0]; 10];
        assert!(matches!(fit_origin_behavior(&s, &p, 1e-2), Err(Error::InsufficientRange(_))));
    }

    #[test]
    fn ko_maxima_of_particular_solution() {
        let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
        let s: Vec<[f64; 3]> = (0..50).map(|i| {
            let lr = -5.0 + 0.2 * i as f64;
            [lr, 2f64.ln() - 2.0 * lr, 2f64.ln() - 2.0 * lr]
        }).collect();
        let k = keller_osserman_check(&s, &p).unwrap();
        assert!((k.max_u_weighted - 2.0).abs() < 1e-12);
        assert!(!k.growing_at_origin);
    }
}
