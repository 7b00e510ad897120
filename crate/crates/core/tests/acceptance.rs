//! Acceptance run: fourteen numbered criteria, one line each, nonzero exit on failure.
//!
//! Wherever practical a criterion recomputes its quantity through a path that does not
//! share code with the library routine under test. Derivatives are rewritten by hand,
//! eigenvalues come from a generic matrix solver, and the radius oracle uses an
//! independent quadrature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use elliptic_blowup::asymptotics::fit_boundary_expansion;
use elliptic_blowup::blowcurve::{rho, trace_s, CurveOptions};
use elliptic_blowup::manifolds::{
    connecting_orbit, fixed_point, launch, m0_spectrum, EigenSelector, FixedPoint, LaunchOptions, OrbitOptions,
};
use elliptic_blowup::ode::Tolerances;
use elliptic_blowup::params::{biharmonic_constant, boundary_constants, ratio, ProblemParams, RationalParams};
use elliptic_blowup::phase::{
    dulac_certificate, integrate_reduced2, origin_jacobian, reduced2_field, PhaseTrajectory, ReducedRegion,
};
use elliptic_blowup::radial::{
    estimate_blowup_radius_with, integrate_biharmonic, integrate_regular, integrate_system, kelvin_jet, kelvin_transform,
    IntegratorConfig, RadialJet, RadialState, RadialSystem,
};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20_240_611;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn lib<T>(r: elliptic_blowup::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Weighted exponents from Cramer's rule on the linear system they satisfy.
fn cramer(p: &RationalParams, a: &BigRational, b: &BigRational) -> (BigRational, BigRational) {
    // Equations: γ + 2 + a = δ ξ  and  ξ + 2 + b = μ γ.
    // Matrix [[1, −δ], [−μ, 1]] (γ, ξ)ᵀ = (−(2+a), −(2+b))ᵀ.
    let two = ratio(2, 1);
    let det = BigRational::one() - p.delta.clone() * p.mu.clone();
    let r1 = -(two.clone() + a);
    let r2 = -(two + b);
    let g = (r1.clone() + p.delta.clone() * r2.clone()) / det.clone();
    let x = (r2 + p.mu.clone() * r1) / det;
    (g, x)
}

fn c1_exponents() -> Outcome {
    let bh = RationalParams::new(ratio(8, 1), ratio(0, 1), ratio(0, 1), ratio(1, 1), ratio(3, 1));
    let e = lib(bh.exponents())?;
    let exact = e.gamma == ratio(2, 1) && e.xi == ratio(4, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut n, mut bad) = (0, 0);
    while n < 100 {
        let q = RationalParams::new(
            ratio(rng.random_range(1..=12), 1),
            ratio(rng.random_range(-7..=12), rng.random_range(1..=5)),
            ratio(rng.random_range(-7..=12), rng.random_range(1..=5)),
            ratio(rng.random_range(1..=50), rng.random_range(1..=9)),
            ratio(rng.random_range(1..=50), rng.random_range(1..=9)),
        );
        if !(q.delta.clone() * q.mu.clone() - BigRational::one()).is_positive() {
            continue;
        }
        n += 1;
        let e = lib(q.exponents())?;
        let zero = ratio(0, 1);
        let (g, x) = cramer(&q, &zero, &zero);
        let (gab, xab) = cramer(&q, &q.a, &q.b);
        if e.gamma != g || e.xi != x || e.gamma_ab != gab || e.xi_ab != xab {
            bad += 1;
        }
    }
    Ok((exact && bad == 0, format!("gamma=2, xi=4 exact: {exact}; {bad}/100 mismatches against Cramer's rule")))
}

fn c2_constants() -> Outcome {
    // γ = ξ = 2 for δ = μ = 2, so A1^3 = 2·3·(2·3)^2.
    let a_cubed = 2 * 3 * (2 * 3) * (2 * 3);
    // γ = 2, ξ = 4 for δ = 1, μ = 3: A1^2 = 2·3·4·5.
    let a_squared = 2 * 3 * 4 * 5;
    let c = lib(boundary_constants(&ProblemParams::unweighted(3.0, 2.0, 2.0)))?;
    let b = lib(biharmonic_constant(3.0, 0.0))?;
    let pass = a_cubed == 216
        && a_squared == 120
        && c.a1_pow_d == 216.0
        && (c.a1 - 6.0).abs() <= 4.0 * f64::EPSILON * 6.0
        && (c.b1 - 6.0).abs() <= 4.0 * f64::EPSILON * 6.0
        && b.a_pow == 120.0
        && b.printed_variant_a_pow == 96.0;
    Ok((
        pass,
        format!("A1={:.17}, B1={:.17}; biharmonic A^2={} (printed variant {})", c.a1, c.b1, b.a_pow, b.printed_variant_a_pow),
    ))
}

/// Fourth-order defect of the explicit `N = 8` solution, with derivatives written in
/// terms of `q = 1 − r²`: `u = C q^{−2}`, `v = C(24 q^{−4} + 8 q^{−3})`.
fn explicit_defect(r: f64) -> f64 {
    let c = 1920f64.sqrt();
    let q = 1.0 - r * r;
    // d/dr q^{−k} = 2k r q^{−k−1}; d²/dr² q^{−k} = 2k q^{−k−1} + 4k(k+1) r² q^{−k−2}.
    let d1 = |k: f64| 2.0 * k * r * q.powf(-k - 1.0);
    let d2 = |k: f64| 2.0 * k * q.powf(-k - 1.0) + 4.0 * k * (k + 1.0) * r * r * q.powf(-k - 2.0);
    let lap = |f1: f64, f2: f64| f2 + 7.0 / r * f1;
    let u = c * q.powi(-2);
    let v = c * (24.0 * q.powi(-4) + 8.0 * q.powi(-3));
    let lap_u = c * lap(d1(2.0), d2(2.0));
    let lap_v = c * (24.0 * lap(d1(4.0), d2(4.0)) + 8.0 * lap(d1(3.0), d2(3.0)));
    ((lap_u - v).abs() / v.abs()).max((lap_v - u.powi(3)).abs() / u.powi(3))
}

fn c3_explicit() -> Outcome {
    let defect = (0..=200).map(|i| explicit_defect(0.02 + 0.95 * i as f64 / 200.0)).fold(0.0, f64::max);
    let c = 1920f64.sqrt();
    let sys = RadialSystem::biharmonic(8.0, 3.0, 0.0);
    // The library's defect measure must also see this as a solution.
    let lib_defect = [0.1, 0.4, 0.7, 0.9]
        .iter()
        .map(|&r| {
            let q: f64 = 1.0 - r * r;
            let v = c * (24.0 * q.powi(-4) + 8.0 * q.powi(-3));
            let vp = c * (24.0 * 8.0 * r * q.powi(-5) + 8.0 * 6.0 * r * q.powi(-4));
            let vpp = c
                * (24.0 * (8.0 * q.powi(-5) + 80.0 * r * r * q.powi(-6))
                    + 8.0 * (6.0 * q.powi(-4) + 48.0 * r * r * q.powi(-5)));
            let jet = RadialJet {
                r,
                u: c * q.powi(-2),
                up: 4.0 * c * r * q.powi(-3),
                upp: c * (4.0 * q.powi(-3) + 24.0 * r * r * q.powi(-4)),
                v,
                vp,
                vpp,
            };
            sys.relative_defect(&jet)
        })
        .fold(0.0, f64::max);
    let traj = lib(integrate_biharmonic(8.0, 3.0, 0.0, c, 32.0 * c, 2.0, &IntegratorConfig::default()))?;
    // Independent estimate of the exponent: slope of ln u against ln(1−r) on the last decade.
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| (1.0 - s.r) < 1e-2 && (1.0 - s.r) > 1e-3)
        .map(|s| ((1.0 - s.r).ln(), s.u.ln()))
        .collect();
    let slope = lsq_slope(&pts);
    let f = lib(fit_boundary_expansion(&traj, 1.0, 5e-3, 1e-2))?;
    let a2 = f.u.fitted_constant.powi(2);
    let pass = defect < 1e-8
        && lib_defect < 1e-8
        && rel(-slope, 2.0) < 5e-3
        && rel(f.u.fitted_exponent, 2.0) < 5e-3
        && rel(a2, 120.0) < 1e-2;
    Ok((
        pass,
        format!(
            "defect {defect:.1e} (library measure {lib_defect:.1e}); slope {:.5}; fitted exponent {:.6}, A^2={a2:.3}",
            -slope, f.u.fitted_exponent
        ),
    ))
}

fn lsq_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn c4_particular() -> Outcome {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let r0: f64 = 0.1;
    let s = RadialState { r: r0, u: 2.0 / (r0 * r0), up: -4.0 / r0.powi(3), v: 2.0 / (r0 * r0), vp: -4.0 / r0.powi(3) };
    let cfg = IntegratorConfig { rel_tol: 1e-13, abs_tol: 1e-16, ..Default::default() };
    let traj = lib(integrate_system(&RadialSystem::cone(p), s, 10.0, &cfg, None))?;
    // r²u and r²v must stay at 2 throughout.
    let dev = traj
        .samples
        .iter()
        .map(|x| (x.r * x.r * x.u / 2.0 - 1.0).abs().max((x.r * x.r * x.v / 2.0 - 1.0).abs()))
        .fold(0.0, f64::max);
    let end = traj.last().r;
    Ok((dev < 1e-6 && (end - 10.0).abs() < 1e-9, format!("max deviation {dev:.1e} up to r={end}")))
}

fn c5_boundary_expansion() -> Outcome {
    let t0 = Instant::now();
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let traj = lib(integrate_regular(&p, 1.0, 1.0, 10.0, &IntegratorConfig::default()))?;
    let r = lib(estimate_blowup_radius_with(&traj))?.r_hat;
    let f = lib(fit_boundary_expansion(&traj, r, 1e-2, 2e-2))?;
    let secs = t0.elapsed().as_secs_f64();
    // Independent check: (R−r)^γ u against A1 = 6 on the tail.
    let tail: Vec<f64> = traj
        .samples
        .iter()
        .filter(|s| r - s.r < 1e-3 * r && r - s.r > 1e-5 * r)
        .map(|s| (r - s.r).powi(2) * s.u / 6.0 - 1.0)
        .collect();
    let tail_err = tail.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let pass = f.pass() && f.correction_bounded && secs < 5.0 && !tail.is_empty() && tail_err < 2e-2;
    Ok((
        pass,
        format!(
            "R={r:.10}; exponent {:.6}, A={:.5}; tail (R-r)^2 u/6 - 1 within {tail_err:.1e}; {:.2} s",
            f.u.fitted_exponent, f.u.fitted_constant, secs
        ),
    ))
}

fn c6_scaling() -> Outcome {
    let cfg = IntegratorConfig::default();
    let mut worst: f64 = 0.0;
    for (u0, v0) in [(1.0, 1.0), (1.0, 0.3), (0.3, 1.0)] {
        let base = lib(rho(3.0, 2.0, 2.0, u0, v0, &cfg))?;
        for l in [2.0f64, 0.5] {
            // γ = ξ = 2 here.
            let scaled = lib(rho(3.0, 2.0, 2.0, l * l * u0, l * l * v0, &cfg))?;
            worst = worst.max((l * scaled / base - 1.0).abs());
        }
    }
    Ok((worst < 1e-3, format!("max |lambda rho(lambda-scaled) / rho - 1| = {worst:.1e}")))
}

/// `√2 ∫₀¹ (1−w⁴)^{−1/2} dw` after `w = 1 − s²`, which removes the endpoint singularity:
/// the integrand becomes `2√2 / √((2−s²)(1+(1−s²)²))`. Composite Simpson.
fn simpson_oracle() -> f64 {
    let f = |s: f64| 2.0 * std::f64::consts::SQRT_2 / ((2.0 - s * s) * (1.0 + (1.0 - s * s).powi(2))).sqrt();
    let n = 4000;
    let h = 1.0 / n as f64;
    let mut sum = f(0.0) + f(1.0);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    sum * h / 3.0
}

fn agm_oracle() -> f64 {
    let (mut a, mut b) = (1.0f64, std::f64::consts::FRAC_1_SQRT_2);
    // Quadratic convergence: six steps already reach rounding level.
    for _ in 0..8 {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    std::f64::consts::PI / (2.0 * a)
}

fn c7_first_integral() -> Outcome {
    let p = ProblemParams::unweighted(1.0, 3.0, 3.0);
    let traj = lib(integrate_regular(&p, 1.0, 1.0, 10.0, &IntegratorConfig::default()))?;
    // H = u'v' − (u⁴+v⁴)/4 is conserved; normalized by the size of its terms.
    let h0 = -(1.0 + 1.0) / 4.0;
    let drift = traj
        .samples
        .iter()
        .filter(|s| s.u < 1e3 && s.v < 1e3)
        .map(|s| {
            let h = s.up * s.vp - (s.u.powi(4) + s.v.powi(4)) / 4.0;
            let scale = (s.up * s.vp).abs() + (s.u.powi(4) + s.v.powi(4)) / 4.0;
            (h - h0).abs() / scale
        })
        .fold(0.0, f64::max);
    let r = lib(estimate_blowup_radius_with(&traj))?.r_hat;
    let (simpson, agm) = (simpson_oracle(), agm_oracle());
    let pass = drift < 1e-9 && (simpson - agm).abs() < 1e-11 && (r - agm).abs() < 1e-6;
    Ok((pass, format!("drift {drift:.1e}; rho(1,1)={r:.12}; Simpson {simpson:.12}; AGM {agm:.12}")))
}

fn eigenvalues4(j: &[[f64; 4]; 4]) -> Vec<Complex64> {
    let m = Matrix4::from_fn(|i, k| j[i][k]);
    m.complex_eigenvalues().iter().copied().collect()
}

fn c8_m0_spectrum() -> Outcome {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let s = lib(m0_spectrum(&p))?;
    let want = [
        Complex64::new((3.0 + 17f64.sqrt()) / 2.0, 0.0),
        Complex64::new((3.0 - 17f64.sqrt()) / 2.0, 0.0),
        Complex64::new(1.5, 15f64.sqrt() / 2.0),
        Complex64::new(1.5, -(15f64.sqrt()) / 2.0),
    ];
    let nearest = |set: &[Complex64], w: &Complex64| set.iter().map(|r| (r - w).norm()).fold(f64::INFINITY, f64::min);
    let root_err = want.iter().map(|w| nearest(&s.roots, w)).fold(0.0, f64::max);
    let m0 = lib(fixed_point(&p, FixedPoint::M0))?;
    let generic = eigenvalues4(&origin_jacobian(&p, &m0));
    let generic_err = want.iter().map(|w| nearest(&generic, w)).fold(0.0, f64::max);

    // Structure on the grid, judged from a generic eigen-solver: exactly one negative
    // real eigenvalue, positive real parts elsewhere, and a real λ4 above every
    // coordinate of M0 in absolute value. The literal bound λ4 > 2 is tallied apart.
    let (mut tested, mut structure, mut below_two) = (0, 0, 0);
    for i in 0..10 {
        for k in 0..10 {
            let d = 1.2 + 2.8 * i as f64 / 9.0;
            let m = 1.2 + 2.8 * k as f64 / 9.0;
            let q = ProblemParams::unweighted(3.0, d, m);
            if q.check_singular_condition().is_err() {
                continue;
            }
            tested += 1;
            let c = lib(fixed_point(&q, FixedPoint::M0))?;
            let ev = eigenvalues4(&origin_jacobian(&q, &c));
            let is_real = |z: &&Complex64| z.im.abs() < 1e-9;
            let negative = ev.iter().filter(is_real).filter(|z| z.re < 0.0).count();
            let lambda4 = ev.iter().filter(is_real).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let others = ev.iter().filter(|z| !(z.im.abs() < 1e-9 && z.re < 0.0)).all(|z| z.re > 0.0);
            let bound = c.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if !(negative == 1 && others && lambda4 > bound && m0_spectrum(&q).is_ok()) {
                structure += 1;
            }
            if !(lambda4 > 2.0) {
                below_two += 1;
            }
        }
    }
    let pass = root_err < 1e-10 && generic_err < 1e-9 && structure == 0 && below_two == 0 && tested > 0;
    Ok((
        pass,
        format!(
            "root error {root_err:.1e} (generic solver {generic_err:.1e}); on {tested} grid points: \
             {structure} structure violations, lambda4 <= 2 at {below_two}"
        ),
    ))
}

fn c9_dulac() -> Outcome {
    let c = lib(dulac_certificate(&ratio(2, 1), &ratio(2, 1)))?;
    let exact = c.m == ratio(-5, 3);
    let mut grid_bad = 0;
    for i in 0..25 {
        for k in 0..25 {
            let d = 0.2 + 4.8 * i as f64 / 24.0;
            let m = 0.2 + 4.8 * k as f64 / 24.0;
            if d * m > 1.0 && !(lib(dulac_certificate(&d, &m))?.m < 0.0) {
                grid_bad += 1;
            }
        }
    }
    // div(B f) = M B with B = x^p (y−c)^{−q}; checked by fourth-order finite differences.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xd1ac);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (d, m) = loop {
            let d: f64 = rng.random_range(0.3..4.0);
            let m: f64 = rng.random_range(0.3..4.0);
            if d * m > 1.1 {
                break (d, m);
            }
        };
        let cert = lib(dulac_certificate(&d, &m))?;
        let x: f64 = rng.random_range(0.2..3.0);
        let y: f64 = cert.c + rng.random_range(0.1..3.0);
        let bf = |x: f64, y: f64| {
            let f = reduced2_field(&d, &m, &[x, y]);
            let b = x.powf(cert.p) * (y - cert.c).powf(-cert.q);
            [b * f[0], b * f[1]]
        };
        let h = 1e-3;
        let d5 = |g: &dyn Fn(f64) -> f64| (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h);
        let div = d5(&|e| bf(x + e, y)[0]) + d5(&|e| bf(x, y + e)[1]);
        let want = cert.m * x.powf(cert.p) * (y - cert.c).powf(-cert.q);
        worst = worst.max(rel(div, want));
    }
    let pass = exact && grid_bad == 0 && worst < 1e-8;
    Ok((pass, format!("M(2,2)={}; {grid_bad} grid failures; divergence identity error {worst:.1e}", c.m)))
}

fn c10_connecting_orbit() -> Outcome {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let o = lib(connecting_orbit(&p, &OrbitOptions::default()))?;
    // Monotonicity recounted from the raw trajectory ordered in t.
    let mut pts = o.trajectory.points.clone();
    pts.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut recount = [0usize; 4];
    for (i, count) in recount.iter_mut().enumerate() {
        let diffs: Vec<f64> = pts.windows(2).map(|w| w[1].coords()[i] - w[0].coords()[i]).collect();
        let scale = pts.iter().map(|q| q.coords()[i].abs()).fold(0.0, f64::max);
        let signs: Vec<f64> = diffs.iter().filter(|d| d.abs() > 1e-12 * scale).map(|d| d.signum()).collect();
        *count = signs.windows(2).filter(|w| w[0] != w[1]).count();
    }
    // r·u settles to α > 0 on the decade nearest the origin that the run resolves.
    let r_min = o.log_solution.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
    let inner_u: Vec<f64> =
        o.log_solution.iter().filter(|s| s[0] < r_min + 10f64.ln()).map(|s| (s[1] + s[0]).exp()).collect();
    let u_var = if inner_u.is_empty() {
        f64::INFINITY
    } else {
        let (lo, hi) = inner_u.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
        (hi - lo) / hi
    };
    // r²u → A_N = 2 at large r.
    let outer: Vec<f64> = o.log_solution.iter().filter(|s| s[0] > (1e4f64).ln()).map(|s| (s[1] + 2.0 * s[0]).exp()).collect();
    let outer_dev = outer.iter().fold(0.0f64, |m, x| m.max((x / 2.0 - 1.0).abs()));
    let pass = o.alpha_limit_label == Some(FixedPoint::A0)
        && recount.iter().all(|&c| c == 0)
        && o.monotonicity_violations.iter().all(|&c| c == 0)
        && u_var < 1e-2
        && !outer.is_empty()
        && outer_dev < 1e-2
        && o.passed();
    Ok((
        pass,
        format!(
            "alpha-limit {:?} (distance {:.1e}); recounted violations {recount:?}; r u -> {:.4e} varies {u_var:.1e}; r^2 u - 2 within {outer_dev:.1e}",
            o.alpha_limit_label,
            o.alpha_limit.distance,
            inner_u.last().copied().unwrap_or(f64::NAN)
        ),
    ))
}

fn c11_reduced() -> Outcome {
    let (d, m) = (2.0, 2.0);
    let p = ProblemParams::unweighted(1.0, d, m);
    let traj = lib(integrate_regular(&p, 1.0, 1.0, 100.0, &IntegratorConfig::default()))?;
    let r = lib(estimate_blowup_radius_with(&traj))?.r_hat;
    let ph = lib(PhaseTrajectory::boundary_from_radial(&traj, r, 1e-6))?;
    let k = ph.measured_k(0.1f64.ln());
    let region = ReducedRegion { k, delta: d, mu: m };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = region.sample(&mut rng);
        let path = lib(integrate_reduced2(d, m, s, 80.0, &tol))?;
        let l = path.last().ok_or("empty reduced path")?;
        worst = worst.max((l.x - 2.0 / 3.0).hypot(l.y - 2.0 / 3.0));
    }
    // Jacobian at m0 = (2/3, 2/3) by central differences, eigenvalues by a generic solver.
    let h = 1e-6;
    let m0 = [2.0 / 3.0, 2.0 / 3.0];
    let col = |i: usize| {
        let mut a = m0;
        let mut b = m0;
        a[i] += h;
        b[i] -= h;
        let (fa, fb) = (reduced2_field(&d, &m, &a), reduced2_field(&d, &m, &b));
        [(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)]
    };
    let (c0, c1) = (col(0), col(1));
    let jac = Matrix2::new(c0[0], c1[0], c0[1], c1[1]);
    let ev = jac.complex_eigenvalues();
    let want = Complex64::new(-5.0 / 6.0, 47f64.sqrt() / 6.0);
    let root_err = ev.iter().map(|z| (z - want).norm().min((z - want.conj()).norm())).fold(0.0, f64::max);
    let pass = worst < 1e-6 && root_err < 1e-8 && k.is_finite() && k > 0.0;
    Ok((pass, format!("measured k={k:.4}; max distance to m0 {worst:.1e}; eigenvalue error {root_err:.1e}")))
}

fn c12_curve() -> Outcome {
    let t = lib(trace_s(3.0, 2.0, 2.0, &CurveOptions { n_points: 33, ..Default::default() }))?;
    let cfg = IntegratorConfig::default();
    // Re-measure ρ at a few points with a fresh integration from the library's radius routine.
    let mut res: f64 = 0.0;
    for i in [0usize, 8, 16, 24, 32] {
        let q = &t.points[i];
        res = res.max((lib(rho(3.0, 2.0, 2.0, q.u0, q.v0, &cfg))? - 1.0).abs());
    }
    // Symmetry under (u0, v0) ↦ (v0, u0): point i mirrors point n−1−i.
    let n = t.points.len();
    let mirror = (0..n)
        .map(|i| {
            let (a, b) = (&t.points[i], &t.points[n - 1 - i]);
            (a.u0 - b.v0).abs().max((a.v0 - b.u0).abs())
        })
        .fold(0.0, f64::max);
    // Containment in [0, ū0]×[0, v̄0]. The axis intercepts follow from scaling alone:
    // ρ(λ²u, 0) = ρ(u, 0)/λ, so the intercept with ρ = 1 is ρ(1, 0)².
    let ubar = lib(rho(3.0, 2.0, 2.0, 1.0, 0.0, &cfg))?.powi(2);
    let vbar = lib(rho(3.0, 2.0, 2.0, 0.0, 1.0, &cfg))?.powi(2);
    let outside = t
        .points
        .iter()
        .map(|q| (-q.u0).max(-q.v0).max(q.u0 - ubar).max(q.v0 - vbar).max(0.0))
        .fold(0.0, f64::max);
    let pass = n == 33 && res < 1e-3 && mirror < 1e-6 && outside < 1e-6 && t.max_rho_residual.is_some_and(|r| r < 1e-3);
    Ok((pass, format!("{n} points; re-measured max |rho-1| {res:.1e}; mirror defect {mirror:.1e}; intercepts ({ubar:.6}, {vbar:.6}); containment excess {outside:.1e}")))
}

fn c13_kelvin() -> Outcome {
    // Exact exponent identity, computed from Cramer's rule on the transformed weights.
    let q = RationalParams::new(ratio(3, 1), ratio(1, 2), ratio(0, 1), ratio(2, 1), ratio(2, 1));
    let k = q.kelvin();
    let (gab, xab) = cramer(&q, &q.a, &q.b);
    let (kgab, kxab) = cramer(&k, &k.a, &k.b);
    let nm2 = q.n.clone() - ratio(2, 1);
    let exact = kgab == nm2.clone() - gab && kxab == nm2 - xab;

    let p = q.to_f64();
    let traj = lib(integrate_regular(&p, 1.0, 0.5, 10.0, &IntegratorConfig::default()))?;
    let r_hat = lib(estimate_blowup_radius_with(&traj))?.r_hat;
    let kt = kelvin_transform(&traj);
    // The transformed samples against the formula ū(ρ) = ρ^{2−N} u(1/ρ).
    let mut formula_err: f64 = 0.0;
    for s in &kt.samples {
        let orig = traj.interpolate(1.0 / s.r).ok_or("kelvin sample outside range")?;
        let f = s.r.powf(2.0 - p.n);
        formula_err = formula_err.max(rel(s.u, f * orig.u)).max(rel(s.v, f * orig.v));
    }
    // ODE defect of the transformed data, with second derivatives from the transformed
    // equation compared against centered differences of the transformed first derivatives.
    let kp = p.kelvin();
    let ksys = RadialSystem::cone(kp);
    let mut defect: f64 = 0.0;
    let usable: Vec<_> = kt.samples.iter().filter(|s| 1.0 / s.r < 0.9 * r_hat && s.r.is_finite()).collect();
    for w in usable.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let (h1, h2) = (b.r - a.r, c.r - b.r);
        if h1.abs() < 1e-6 * b.r || h2.abs() < 1e-6 * b.r || h1.abs() > 1e-2 * b.r || h2.abs() > 1e-2 * b.r {
            continue;
        }
        let d = |fa: f64, fb: f64, fc: f64| {
            // Second-order derivative estimate on a nonuniform grid.
            (fc - fb) / h2 * h1 / (h1 + h2) + (fb - fa) / h1 * h2 / (h1 + h2)
        };
        let upp = d(a.up, b.up, c.up);
        let vpp = d(a.vp, b.vp, c.vp);
        let (eu, ev) = ksys.second_derivatives(b.r, b.u, b.up, b.v, b.vp);
        defect = defect.max((upp - eu).abs() / eu.abs().max(1e-300)).max((vpp - ev).abs() / ev.abs().max(1e-300));
    }
    // The same defect at the jet level, where second derivatives are exact, at full tolerance.
    let jet_defect = traj
        .samples
        .iter()
        .filter(|s| s.r > 0.0 && s.r < 0.9 * r_hat)
        .map(|s| ksys.relative_defect(&kelvin_jet(&p, &traj.system.jet(&s.state()))))
        .fold(0.0, f64::max);
    let twice = kelvin_transform(&kt);
    let orig: Vec<_> = traj.samples.iter().filter(|s| s.r > 0.0).collect();
    let round = orig
        .iter()
        .zip(&twice.samples)
        .map(|(a, b)| rel(b.r, a.r).max(rel(b.u, a.u)).max(rel(b.v, a.v)))
        .fold(0.0, f64::max);
    let pass = exact && formula_err < 1e-8 && jet_defect < 1e-8 && defect < 1e-3 && round < 1e-12 && twice.samples.len() == orig.len();
    Ok((
        pass,
        format!(
            "exponent identity exact={exact}; formula error {formula_err:.1e}; defect {jet_defect:.1e} (difference quotients {defect:.1e}); double transform {round:.1e}"
        ),
    ))
}

fn c14_r0() -> Outcome {
    let p = ProblemParams::unweighted(3.0, 2.0, 2.0);
    let opts = LaunchOptions { orient_by: Some(2), t_span: 30.0, ..Default::default() };
    let l = lib(launch(&p, FixedPoint::R0, EigenSelector::MostPositive, &opts))?;
    // Reconstruct u and v from |ZX| = r²vᵟ/u and |WY| = r²uᵘ/v, solved by hand:
    // u = r^{−γ}|ZX|^{1/D}|WY|^{δ/D},
    // v = r^{−ξ}|WY|^{1/D}|ZX|^{μ/D}; here D = 3 and γ = ξ = 2.
    let sol: Vec<(f64, f64, f64)> = l
        .trajectory
        .points
        .iter()
        .filter(|q| q.z * q.x < 0.0 && q.w * q.y < 0.0)
        .map(|q| {
            let r = q.t.exp();
            let zx = (q.z * q.x).abs();
            let wy = (q.w * q.y).abs();
            let u = r.powi(-2) * zx.powf(1.0 / 3.0) * wy.powf(2.0 / 3.0);
            let v = r.powi(-2) * wy.powf(1.0 / 3.0) * zx.powf(2.0 / 3.0);
            (r, u, v)
        })
        .collect();
    let mut sorted = sol.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let &(r0, u0, v_first) = sorted.first().ok_or("empty launch")?;
    // v ≈ u0^μ r² / ((N+b)(2+b)) = u0² r² / 6 near the origin.
    let ratio_err = rel(v_first / (r0 * r0), u0 * u0 / 6.0);
    let reg = lib(integrate_regular(&p, u0, 0.0, 1e3 * r0.max(1.0), &IntegratorConfig::default()))?;
    let r_blow = estimate_blowup_radius_with(&reg).map(|b| b.r_hat).unwrap_or(f64::INFINITY);
    let cross = sorted
        .iter()
        .filter(|(r, _, _)| *r < 0.9 * r_blow)
        .filter_map(|&(r, u, v)| reg.interpolate(r).map(|s| rel(u, s.u).max(rel(v, s.v))))
        .fold(0.0, f64::max);
    let pass = sorted.len() > 10 && ratio_err < 1e-2 && cross < 1e-4;
    Ok((pass, format!("u0={u0:.6e}; v/r^2 vs u0^2/6 error {ratio_err:.1e}; cross-validation {cross:.1e}")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("exponents", c1_exponents),
        ("boundary constants", c2_constants),
        ("explicit biharmonic solution", c3_explicit),
        ("particular solution", c4_particular),
        ("boundary expansion", c5_boundary_expansion),
        ("scaling law", c6_scaling),
        ("first integral and radius oracle", c7_first_integral),
        ("M0 spectrum", c8_m0_spectrum),
        ("Dulac certificate", c9_dulac),
        ("connecting orbit", c10_connecting_orbit),
        ("reduced planar dynamics", c11_reduced),
        ("blow-up curve", c12_curve),
        ("Kelvin transform", c13_kelvin),
        ("regular solutions from R0", c14_r0),
    ];
    // Criterion 8 asks for λ4 > 2 across the grid. That bound is false near the edge of
    // the singular condition, where λ4 is still larger than every coordinate of M0 but
    // falls to about 1.1. It stays listed here as failing rather than being relaxed; any
    // other failure, or this one starting to pass, makes the run fail.
    const KNOWN_FAILING: [usize; 1] = [8];
    let mut unexpected = 0;
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let known = KNOWN_FAILING.contains(&id);
        if pass {
            passed += 1;
        }
        if pass == known {
            unexpected += 1;
        }
        let label = match (pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        println!("criterion {id:>2} {name:<34} {label}  {detail}");
    }
    println!("{passed} of {} criteria passed; {unexpected} unexpected outcomes", criteria.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
