//! Fixed points of the origin-chart field, their linearizations, one-dimensional
//! manifold launches and the connecting orbit that produces global solutions.

mod launch;
mod orbit;
mod spectrum;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Params, ProblemParams, Scalar};

pub use launch::{classify_limit, launch, EigenSelector, LaunchOptions, LaunchResult, LimitClassification, LimitStatus};
pub use orbit::{connecting_orbit, ClaimCheck, ConnectingOrbit, OrbitOptions, OriginCase};
pub use spectrum::{linearization, m0_spectrum, Linearization, M0Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedPoint {
    O,
    M0,
    N0,
    R0,
    S0,
    A0,
    G0,
    H0,
    P0,
    Q0,
    I0,
    J0,
    K0,
    L0,
    C0,
    D0,
}

impl FixedPoint {
    pub const ALL: [FixedPoint; 16] = [
        FixedPoint::O,
        FixedPoint::M0,
        FixedPoint::N0,
        FixedPoint::R0,
        FixedPoint::S0,
        FixedPoint::A0,
        FixedPoint::G0,
        FixedPoint::H0,
        FixedPoint::P0,
        FixedPoint::Q0,
        FixedPoint::I0,
        FixedPoint::J0,
        FixedPoint::K0,
        FixedPoint::L0,
        FixedPoint::C0,
        FixedPoint::D0,
    ];

    /// Points that never correspond to positive solutions: the four axis points, and
    /// `C0`, `D0`, which cannot be reached as `t → −∞` by admissible trajectories.
    pub fn structurally_non_admissible(self) -> bool {
        matches!(
            self,
            FixedPoint::I0 | FixedPoint::J0 | FixedPoint::K0 | FixedPoint::L0 | FixedPoint::C0 | FixedPoint::D0
        )
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for FixedPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FixedPoint::ALL
            .iter()
            .copied()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown fixed point {s:?}")))
    }
}

/// Coordinates of all sixteen fixed points, exact when `T` is rational.
pub fn fixed_point_coords<T: Scalar>(p: &Params<T>) -> Result<Vec<(FixedPoint, [T; 4])>> {
    let e = p.exponents()?;
    let z = T::zero;
    let two = T::int(2);
    let nm2 = p.n.clone() - two.clone();
    let na = p.n.clone() + p.a.clone();
    let nb = p.n.clone() + p.b.clone();
    let ta = two.clone() + p.a.clone();
    let tb = two.clone() + p.b.clone();
    let y_star = nm2.clone() * p.mu.clone() - tb.clone();
    let w_star = nb.clone() - nm2.clone() * p.mu.clone();
    let x_star = nm2.clone() * p.delta.clone() - ta.clone();
    let z_star = na.clone() - nm2.clone() * p.delta.clone();
    use FixedPoint::*;
    Ok(vec![
        (O, [z(), z(), z(), z()]),
        (
            M0,
            [
                e.gamma_ab.clone(),
                e.xi_ab.clone(),
                nm2.clone() - e.gamma_ab,
                nm2.clone() - e.xi_ab,
            ],
        ),
        (N0, [z(), z(), na.clone(), nb.clone()]),
        (R0, [z(), -tb.clone(), na.clone() + tb.clone() * p.delta.clone(), nb.clone()]),
        (S0, [-ta.clone(), z(), na.clone(), nb.clone() + ta.clone() * p.mu.clone()]),
        (A0, [nm2.clone(), nm2.clone(), z(), z()]),
        (G0, [nm2.clone(), z(), z(), w_star.clone()]),
        (H0, [z(), nm2.clone(), z_star.clone(), z()]),
        (P0, [nm2.clone(), y_star, z(), w_star]),
        (Q0, [x_star, nm2.clone(), z_star, z()]),
        (I0, [nm2.clone(), z(), z(), z()]),
        (J0, [z(), nm2, z(), z()]),
        (K0, [z(), z(), na.clone(), z()]),
        (L0, [z(), z(), z(), nb.clone()]),
        (C0, [z(), -tb, z(), nb]),
        (D0, [-ta, z(), na, z()]),
    ])
}

pub fn fixed_point(params: &ProblemParams, label: FixedPoint) -> Result<[f64; 4]> {
    Ok(fixed_point_coords(params)?
        .into_iter()
        .find(|(l, _)| *l == label)
        .expect("catalog lists every label")
        .1)
}

fn complex_pairs<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

fn complex_vectors<S: serde::Serializer>(v: &[[Complex64; 4]], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for vec in v {
        let pairs: Vec<[f64; 2]> = vec.iter().map(|c| [c.re, c.im]).collect();
        seq.serialize_element(&pairs)?;
    }
    seq.end()
}

/// A cataloged fixed point with its linearization and flags. Complex numbers serialize
/// as `[re, im]`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointRecord {
    pub label: FixedPoint,
    pub coords: [f64; 4],
    #[serde(serialize_with = "complex_pairs")]
    pub spectrum: Vec<Complex64>,
    #[serde(serialize_with = "complex_vectors")]
    pub eigenvectors: Vec<[Complex64; 4]>,
    /// `XZ ≤ 0` and `YW ≤ 0`.
    pub in_region_r: bool,
    pub admissible: bool,
    /// Coordinates are finite for these parameters.
    pub exists_for_params: bool,
    /// Some eigenvalue has real part within `1e-9` of zero.
    pub limit_case: bool,
    /// Eigenvalue with fewer independent eigenvectors than its multiplicity.
    pub defective: bool,
}

/// All sixteen fixed points with spectra and flags.
pub fn fixed_point_catalog(params: &ProblemParams) -> Result<Vec<FixedPointRecord>> {
    fixed_point_coords(params)?
        .into_iter()
        .map(|(label, coords)| {
            let lin = linearization(params, label)?;
            let in_region_r = coords[0] * coords[2] <= 0.0 && coords[1] * coords[3] <= 0.0;
            Ok(FixedPointRecord {
                label,
                coords,
                limit_case: lin.eigenvalues.iter().any(|l| l.re.abs() < 1e-9),
                defective: lin.defective,
                spectrum: lin.eigenvalues,
                eigenvectors: lin.eigenvectors,
                in_region_r,
                admissible: in_region_r && !label.structurally_non_admissible(),
                exists_for_params: coords.iter().all(|c| c.is_finite()),
            })
        })
        .collect()
}
