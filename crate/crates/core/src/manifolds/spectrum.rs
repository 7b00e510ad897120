use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use serde::Serialize;

use super::{fixed_point, FixedPoint};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::phase::origin_jacobian;

/// Eigen-data of the origin field at a fixed point.
#[derive(Clone, Debug, Serialize)]
pub struct Linearization {
    pub label: FixedPoint,
    pub coords: [f64; 4],
    pub jacobian: [[f64; 4]; 4],
    /// Sorted by decreasing real part, then decreasing imaginary part.
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    /// Unit eigenvectors aligned with `eigenvalues`. For a defective eigenvalue the
    /// available vectors are repeated to fill its multiplicity.
    #[serde(skip)]
    pub eigenvectors: Vec<[Complex64; 4]>,
    /// Closed-form real spectrum, where one is known.
    pub closed_form: Option<Vec<f64>>,
    pub defective: bool,
}

impl Linearization {
    /// Real eigenvector for a real eigenvalue near `lambda`.
    pub fn real_eigenvector(&self, lambda: f64) -> Option<[f64; 4]> {
        let (i, l) = self
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lambda).norm().total_cmp(&(b.1 - lambda).norm()))?;
        if l.im.abs() > 1e-9 * (1.0 + l.norm()) {
            return None;
        }
        let v = self.eigenvectors[i];
        Some([v[0].re, v[1].re, v[2].re, v[3].re])
    }
}

fn closed_form_spectrum(p: &ProblemParams, label: FixedPoint) -> Option<Vec<f64>> {
    let (n, a, b, d, m) = (p.n, p.a, p.b, p.delta, p.mu);
    let nm2 = n - 2.0;
    let y_star = nm2 * m - 2.0 - b;
    let w_star = n + b - nm2 * m;
    let x_star = nm2 * d - 2.0 - a;
    let z_star = n + a - nm2 * d;
    use FixedPoint::*;
    Some(match label {
        O => vec![-nm2, -nm2, n + a, n + b],
        N0 => vec![2.0 + a, 2.0 + b, -(n + a), -(n + b)],
        R0 => vec![2.0 + a + d * (2.0 + b), -(2.0 + b), -(n + a + (2.0 + b) * d), -(n + b)],
        S0 => vec![2.0 + b + m * (2.0 + a), -(2.0 + a), -(n + b + (2.0 + a) * m), -(n + a)],
        A0 => vec![nm2, nm2, n + a - nm2 * d, n + b - nm2 * m],
        G0 => vec![nm2, 2.0 + b - nm2 * m, n + a, nm2 * m - n - b],
        H0 => vec![nm2, 2.0 + a - nm2 * d, n + b, nm2 * d - n - a],
        P0 => vec![nm2, y_star, n + a - d * y_star, -w_star],
        Q0 => vec![nm2, x_star, n + b - m * x_star, -z_star],
        _ => return None,
    })
}

fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
}

/// Orthonormal basis of the null space of `J − λI`.
fn null_space(j: &[[f64; 4]; 4], lambda: Complex64) -> Vec<[Complex64; 4]> {
    let m = Matrix4::<Complex64>::from_fn(|r, c| {
        let v = Complex64::new(j[r][c], 0.0);
        if r == c {
            v - lambda
        } else {
            v
        }
    });
    let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let svd = m.svd(true, true);
    let vt = svd.v_t.expect("requested");
    let mut out = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= 1e-7 * scale {
            let mut v = [Complex64::new(0.0, 0.0); 4];
            for (k, vk) in v.iter_mut().enumerate() {
                *vk = vt[(i, k)].conj();
            }
            out.push(normalize(v));
        }
    }
    out
}

/// Unit length, with the largest component real and positive.
fn normalize(mut v: [Complex64; 4]) -> [Complex64; 4] {
    let big = *v.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let phase = big.conj() / big.norm();
    for c in &mut v {
        *c = *c * phase / norm;
        if c.im.abs() < 1e-15 {
            c.im = 0.0;
        }
    }
    v
}

fn numeric_eigenvalues(j: &[[f64; 4]; 4]) -> Vec<Complex64> {
    let m = SMatrix::<f64, 4, 4>::from_fn(|r, c| j[r][c]);
    m.complex_eigenvalues().iter().copied().collect()
}

pub fn linearization(params: &ProblemParams, label: FixedPoint) -> Result<Linearization> {
    let coords = fixed_point(params, label)?;
    let jacobian = origin_jacobian(params, &coords);
    let closed_form = closed_form_spectrum(params, label);
    let mut eigenvalues: Vec<Complex64> = match &closed_form {
        Some(v) => v.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
        None => numeric_eigenvalues(&jacobian),
    };
    sort_spectrum(&mut eigenvalues);
    for l in &mut eigenvalues {
        if l.im.abs() <= 1e-10 * (1.0 + l.norm()) {
            l.im = 0.0;
        }
    }

    let mut eigenvectors = Vec::with_capacity(4);
    let mut defective = false;
    let mut i = 0;
    while i < 4 {
        let l = eigenvalues[i];
        let mult = eigenvalues[i..]
            .iter()
            .take_while(|x| (*x - l).norm() <= 1e-7 * (1.0 + l.norm()))
            .count();
        let basis = null_space(&jacobian, l);
        if basis.is_empty() {
            return Err(Error::StructureViolation(format!(
                "no eigenvector found for eigenvalue {l} of {label}"
            )));
        }
        if basis.len() < mult {
            defective = true;
        }
        for k in 0..mult {
            eigenvectors.push(basis[k.min(basis.len() - 1)]);
        }
        i += mult;
    }
    Ok(Linearization { label, coords, jacobian, eigenvalues, eigenvectors, closed_form, defective })
}

/// Spectrum of the linearization at `M0`, from the quartic
/// `f(λ) = (λ−X0)(λ+Z0)(λ−Y0)(λ+W0) − δμ X0 Y0 Z0 W0`.
#[derive(Clone, Debug, Serialize)]
pub struct M0Spectrum {
    pub coords: [f64; 4],
    /// Monic coefficients `[c0, c1, c2, c3]` of `λ⁴ + c3 λ³ + c2 λ² + c1 λ + c0`.
    pub coefficients: [f64; 4],
    #[serde(skip)]
    pub roots: [Complex64; 4],
    /// The unique negative real root.
    pub lambda3: f64,
    /// The dominant real root.
    pub lambda4: f64,
    #[serde(skip)]
    pub pair: [Complex64; 2],
    /// Real eigenvector for `λ3` with sign pattern `(−, −, +, +)`.
    pub eigenvector3: [f64; 4],
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn horner(c: &[f64; 5], z: Complex64) -> (Complex64, Complex64) {
    // c[k] multiplies λ^k
    let mut p = Complex64::new(c[4], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..4).rev() {
        dp = dp * z + p;
        p = p * z + c[k];
    }
    (p, dp)
}

pub fn m0_spectrum(params: &ProblemParams) -> Result<M0Spectrum> {
    params.validate_regular()?;
    params.check_singular_condition()?;
    let coords = fixed_point(params, FixedPoint::M0)?;
    let [x0, y0, z0, w0] = coords;
    // (λ−X0)(λ+Z0)(λ−Y0)(λ+W0), coefficients in increasing degree
    let mut c = poly_mul(&poly_mul(&[-x0, 1.0], &[z0, 1.0]), &poly_mul(&[-y0, 1.0], &[w0, 1.0]));
    c[0] -= params.delta * params.mu * x0 * y0 * z0 * w0;
    let c5 = [c[0], c[1], c[2], c[3], c[4]];

    let companion = SMatrix::<f64, 4, 4>::from_fn(|r, col| {
        if col == 3 {
            -c5[r]
        } else if r == col + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    for z in &mut roots {
        for _ in 0..8 {
            let (p, dp) = horner(&c5, *z);
            if dp.norm() == 0.0 {
                break;
            }
            *z -= p / dp;
        }
        if z.im.abs() <= 1e-10 * (1.0 + z.norm()) {
            z.im = 0.0;
        }
    }
    sort_spectrum(&mut roots);

    let reals: Vec<f64> = roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
    let negatives: Vec<f64> = reals.iter().copied().filter(|&x| x < 0.0).collect();
    if negatives.len() != 1 {
        return Err(Error::StructureViolation(format!(
            "expected exactly one negative real eigenvalue at M0, found {negatives:?} (roots {roots:?})"
        )));
    }
    let lambda3 = negatives[0];
    let bound = x0.max(y0).max(z0.abs()).max(w0.abs());
    let lambda4 = reals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lambda4 > bound) {
        return Err(Error::StructureViolation(format!(
            "dominant real eigenvalue {lambda4} does not exceed max(X0, Y0, |Z0|, |W0|) = {bound}"
        )));
    }
    let rest: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|z| !(z.im == 0.0 && (z.re == lambda3 || z.re == lambda4)))
        .collect();
    if rest.len() != 2 || rest.iter().any(|z| !(z.re > 0.0)) {
        return Err(Error::StructureViolation(format!(
            "remaining eigenvalues {rest:?} at M0 should have positive real parts"
        )));
    }

    let lin = linearization(params, FixedPoint::M0)?;
    let ev = null_space(&lin.jacobian, Complex64::new(lambda3, 0.0));
    let mut e3 = ev
        .first()
        .map(|v| [v[0].re, v[1].re, v[2].re, v[3].re])
        .ok_or_else(|| Error::StructureViolation("no eigenvector for λ3".into()))?;
    if e3[0] > 0.0 {
        e3.iter_mut().for_each(|x| *x = -*x);
    }
    let pattern_ok = e3[0] < 0.0 && e3[1] < 0.0 && e3[2] > 0.0 && e3[3] > 0.0;
    if !pattern_ok {
        return Err(Error::StructureViolation(format!(
            "λ3 eigenvector {e3:?} lacks the sign pattern (−, −, +, +)"
        )));
    }
    Ok(M0Spectrum {
        coords,
        coefficients: [c[0], c[1], c[2], c[3]],
        roots: [roots[0], roots[1], roots[2], roots[3]],
        lambda3,
        lambda4,
        pair: [rest[0], rest[1]],
        eigenvector3: e3,
    })
}
