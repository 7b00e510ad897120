use super::start::series_start_auto;
use super::{
    Crossing, IntegratorConfig, Nonlinearity, RadialState, RadialSystem, RadialTrajectory, Sample,
    Termination,
};
use crate::error::{Error, Result};
use crate::ode::{self, Control, Step};
use crate::params::ProblemParams;

/// Integrate the nonnegative system from `state` towards `r_end`, stopping at the
/// last blow-up threshold if `u` gets there first.
pub fn integrate(
    params: &ProblemParams,
    state: RadialState,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<RadialTrajectory> {
    params.validate_regular()?;
    integrate_system(&RadialSystem::cone(params.clone()), state, r_end, config, None)
}

/// Regular solution with data `(u0, v0)` at the origin, from the series start to `r_end`.
pub fn integrate_regular(
    params: &ProblemParams,
    u0: f64,
    v0: f64,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<RadialTrajectory> {
    let sys = RadialSystem::cone(params.clone());
    run_from_origin(&sys, u0, v0, r_end, config)
}

/// `Δu = v`, `Δv = r^b |u|^μ` from regular data `(u0, v0)`; signs are not constrained.
pub fn integrate_biharmonic(
    n: f64,
    mu: f64,
    b: f64,
    u0: f64,
    v0: f64,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<RadialTrajectory> {
    if !(mu > 1.0) {
        return Err(Error::invalid("biharmonic exponent μ > 1", format!("μ = {mu}")));
    }
    let sys = RadialSystem::biharmonic(n, mu, b);
    sys.params.check_weights()?;
    run_from_origin(&sys, u0, v0, r_end, config)
}

fn run_from_origin(
    sys: &RadialSystem,
    u0: f64,
    v0: f64,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<RadialTrajectory> {
    config.validate()?;
    if u0 == 0.0 && v0 == 0.0 {
        let zero = RadialState { r: 0.0, u: 0.0, up: 0.0, v: 0.0, vp: 0.0 };
        let mut t = integrate_system(sys, RadialState { r: r_end.min(1.0) * 1e-3, ..zero }, r_end, config, Some((0.0, 0.0)))?;
        t.samples.insert(0, Sample { r: 0.0, u: 0.0, up: 0.0, v: 0.0, vp: 0.0, err: 0.0 });
        return Ok(t);
    }
    let start = series_start_auto(sys, u0, v0, config.series_start_radius, config.rel_tol, config.abs_tol)?;
    let mut traj = integrate_system(sys, start.state, r_end, config, Some((u0, v0)))?;
    traj.samples.insert(0, Sample { r: 0.0, u: u0, up: 0.0, v: v0, vp: 0.0, err: 0.0 });
    Ok(traj)
}

fn sample(r: f64, y: &[f64; 4], err: f64) -> Sample {
    Sample { r, u: y[0], up: y[1], v: y[2], vp: y[3], err }
}

/// Core driver. Phase one integrates in `r`; once `u` crosses the first threshold
/// while increasing, the independent variable becomes `η = u^{-1/γ}`, which tends to
/// zero linearly at a blow-up point, and the remaining thresholds are hit exactly.
pub fn integrate_system(
    sys: &RadialSystem,
    state: RadialState,
    r_end: f64,
    config: &IntegratorConfig,
    initial_data: Option<(f64, f64)>,
) -> Result<RadialTrajectory> {
    config.validate()?;
    if !(state.r > 0.0) || !(r_end > 0.0) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    let dir = if r_end >= state.r { 1.0 } else { -1.0 };
    let thresholds = &config.blowup_threshold_schedule;
    let neg_tol = 1e3 * config.abs_tol;

    let mut samples = vec![Sample {
        r: state.r,
        u: state.u,
        up: state.up,
        v: state.v,
        vp: state.vp,
        err: 0.0,
    }];
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut switch_at: Option<(f64, [f64; 4])> = None;
    let mut failure: Option<Error> = None;

    let rhs = |r: f64, y: &[f64; 4]| {
        let (upp, vpp) = sys.second_derivatives(r, y[0], y[1], y[2], y[3]);
        [y[1], upp, y[3], vpp]
    };
    let y0 = [state.u, state.up, state.v, state.vp];
    let tol = config.tolerances();

    let result = ode::integrate(rhs, state.r, y0, r_end, &tol, |step: &Step<4>| {
        if sys.mode == Nonlinearity::Cone {
            for (name, val) in [("u", step.y1[0]), ("v", step.y1[2])] {
                if val < -neg_tol {
                    failure = Some(Error::Negativity { component: name, value: val, r: step.t1 });
                    return Control::Stop;
                }
            }
        }
        samples.push(sample(step.t1, &step.y1, step.err));
        if let Some(&thr) = thresholds.first() {
            let increasing = step.y1[1] * dir > 0.0;
            if step.y1[0] >= thr && step.y0[0] < thr && increasing {
                let rc = step.find_root(|_, y| y[0] - thr).unwrap_or(step.t1);
                let y = step.eval(rc);
                crossings.push(Crossing { threshold: thr, r: rc, u: thr, up: y[1], v: y[2], vp: y[3] });
                // Replace the overshooting sample by the crossing point.
                samples.pop();
                samples.push(sample(rc, &[thr, y[1], y[2], y[3]], step.err));
                switch_at = Some((rc, [thr, y[1], y[2], y[3]]));
                return Control::Stop;
            }
        }
        Control::Continue
    });

    if let Some(e) = failure {
        return Err(e);
    }
    let termination = match result {
        Ok(out) if !out.stopped => Termination::ReachedEnd,
        Ok(_) => Termination::BlowUp,
        Err(Error::StepUnderflow { .. }) | Err(Error::NonFinite(_))
            if samples.last().map(|s| s.u.abs() > 1e3).unwrap_or(false) =>
        {
            Termination::StepUnderflow
        }
        Err(e) => return Err(e),
    };

    let mut traj = RadialTrajectory {
        system: sys.clone(),
        initial_data,
        samples,
        crossings,
        termination,
    };
    if let Some((r_switch, y_switch)) = switch_at {
        if thresholds.len() == 1 {
            traj.termination = Termination::BlowUp;
        } else {
            endgame(sys, &mut traj, r_switch, y_switch, r_end, dir, config)?;
        }
    }
    Ok(traj)
}

fn endgame(
    sys: &RadialSystem,
    traj: &mut RadialTrajectory,
    r_switch: f64,
    y_switch: [f64; 4],
    r_end: f64,
    dir: f64,
    config: &IntegratorConfig,
) -> Result<()> {
    let gamma = sys.params.exponents()?.gamma;
    if !(gamma > 0.0) {
        return Err(Error::invalid("superlinearity D = μδ − 1 > 0", "blow-up endgame needs γ > 0"));
    }
    let thresholds = &config.blowup_threshold_schedule;
    let eta_of = |u: f64| u.powf(-1.0 / gamma);
    let eta0 = eta_of(y_switch[0]);
    let eta_end = eta_of(*thresholds.last().unwrap());
    let mut next = 1usize;
    let mut lost_monotonicity = false;
    let mut reached_end = false;

    let rhs = |eta: f64, w: &[f64; 4]| {
        let u = eta.powf(-gamma);
        let (upp, vpp) = sys.second_derivatives(w[0], u, w[1], w[2], w[3]);
        let drdeta = -gamma * eta.powf(-gamma - 1.0) / w[1];
        [drdeta, upp * drdeta, w[3] * drdeta, vpp * drdeta]
    };
    let w0 = [r_switch, y_switch[1], y_switch[2], y_switch[3]];
    let tol = crate::ode::Tolerances {
        max_step: f64::INFINITY,
        min_rel_step: 1e-15,
        ..config.tolerances()
    };
    let to_sample = |eta: f64, w: &[f64; 4], err: f64| Sample {
        r: w[0],
        u: eta.powf(-gamma),
        up: w[1],
        v: w[2],
        vp: w[3],
        err,
    };

    let out = ode::integrate(rhs, eta0, w0, eta_end, &tol, |step: &Step<4>| {
        if step.y1[1] * dir <= 0.0 {
            lost_monotonicity = true;
            return Control::Stop;
        }
        if (step.y1[0] - r_end) * dir >= 0.0 {
            let eta_c = step.find_root(|_, w| w[0] - r_end).unwrap_or(step.t1);
            let w = step.eval(eta_c);
            traj.samples.push(to_sample(eta_c, &[r_end, w[1], w[2], w[3]], step.err));
            reached_end = true;
            return Control::Stop;
        }
        while next < thresholds.len() {
            let thr = thresholds[next];
            let eta_k = eta_of(thr);
            if eta_k < step.t1 {
                break;
            }
            let w = if next == thresholds.len() - 1 { step.y1 } else { step.eval(eta_k) };
            traj.crossings.push(Crossing { threshold: thr, r: w[0], u: thr, up: w[1], v: w[2], vp: w[3] });
            next += 1;
        }
        traj.samples.push(to_sample(step.t1, &step.y1, step.err));
        Control::Continue
    });
    match out {
        Ok(_) => {}
        Err(Error::StepUnderflow { .. }) | Err(Error::NonFinite(_)) => {
            traj.termination = Termination::StepUnderflow;
            return Ok(());
        }
        Err(e) => return Err(e),
    }
    if lost_monotonicity {
        return Err(Error::NonConvergence(
            "u stopped increasing after crossing the first blow-up threshold".into(),
        ));
    }
    traj.termination = if reached_end { Termination::ReachedEnd } else { Termination::BlowUp };
    Ok(())
}
