//! Problem parameters and the closed-form exponents and constants they determine.
//!
//! The system is `Δu = |x|^a v^δ`, `Δv = |x|^b u^μ` in `R^N`. Everything here is
//! generic over [`Scalar`], so the algebraic identities can be checked in exact
//! rational arithmetic (`Params<BigRational>`) as well as in `f64`. Constants
//! that involve `D`-th roots only exist in floating point.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field-like scalar used by the exact/float generic formulas.
pub trait Scalar: Clone + PartialOrd + Debug + Num + Neg<Output = Self> {
    fn int(v: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn int(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// One instance of the weighted system: dimension `N`, weights `a`, `b`,
/// powers `δ`, `μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params<T = f64> {
    #[serde(rename = "N")]
    pub n: T,
    pub a: T,
    pub b: T,
    pub delta: T,
    pub mu: T,
}

pub type ProblemParams = Params<f64>;
pub type RationalParams = Params<BigRational>;

/// The exponents `γ, ξ` (boundary) and `γ_{a,b}, ξ_{a,b}` (origin / scaling).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exponents<T = f64> {
    #[serde(rename = "D")]
    pub d: T,
    pub gamma: T,
    pub xi: T,
    pub gamma_ab: T,
    pub xi_ab: T,
}

impl<T: Scalar> Params<T> {
    pub fn new(n: T, a: T, b: T, delta: T, mu: T) -> Self {
        Params { n, a, b, delta, mu }
    }

    /// `D = μδ − 1`.
    pub fn d(&self) -> T {
        self.mu.clone() * self.delta.clone() - T::one()
    }

    pub fn exponents(&self) -> Result<Exponents<T>> {
        let d = self.d();
        if d.is_zero() {
            return Err(Error::invalid(
                "superlinearity",
                "D = μδ − 1 = 0: the exponents are undefined",
            ));
        }
        let two = T::int(2);
        let one = T::one();
        let gamma = two.clone() * (one.clone() + self.delta.clone()) / d.clone();
        let xi = two.clone() * (one + self.mu.clone()) / d.clone();
        let ta = two.clone() + self.a.clone();
        let tb = two + self.b.clone();
        let gamma_ab = (ta.clone() + tb.clone() * self.delta.clone()) / d.clone();
        let xi_ab = (tb + ta * self.mu.clone()) / d.clone();
        Ok(Exponents {
            d,
            gamma,
            xi,
            gamma_ab,
            xi_ab,
        })
    }

    /// Weight bound `a, b > max{−2, −N}`.
    pub fn check_weights(&self) -> Result<()> {
        let lower = if self.n < T::int(2) {
            -self.n.clone()
        } else {
            T::int(-2)
        };
        for (name, w) in [("a", &self.a), ("b", &self.b)] {
            if *w <= lower {
                return Err(Error::invalid(
                    "weight bound a,b > max{-2,-N}",
                    format!("{name} = {:?} ≤ {:?}", w.to_f64(), lower.to_f64()),
                ));
            }
        }
        Ok(())
    }

    fn check_basic(&self) -> Result<()> {
        if self.delta <= T::zero() || self.mu <= T::zero() {
            return Err(Error::invalid(
                "positive powers",
                "δ and μ must be positive (the cooperative case is not supported)",
            ));
        }
        if self.n < T::one() {
            return Err(Error::invalid("dimension", "N must be at least 1"));
        }
        Ok(())
    }

    /// Preconditions for regular-solution operations: `D ≠ 0` and the weight bound.
    pub fn validate_regular(&self) -> Result<()> {
        self.check_basic()?;
        if self.d().is_zero() {
            return Err(Error::invalid("superlinearity", "D = μδ − 1 must be nonzero"));
        }
        self.check_weights()
    }

    /// Preconditions for blow-up operations: `D > 0` and the weight bound.
    pub fn validate_blowup(&self) -> Result<()> {
        self.check_basic()?;
        if self.d() <= T::zero() {
            return Err(Error::invalid(
                "superlinearity D = μδ − 1 > 0",
                format!("D = {:?}", self.d().to_f64()),
            ));
        }
        self.check_weights()
    }

    /// Existence condition of the power-law particular solution:
    /// `min{γ_{a,b}, ξ_{a,b}} > N − 2` or `N ∈ {1, 2}`.
    pub fn check_singular_condition(&self) -> Result<()> {
        if self.n == T::one() || self.n == T::int(2) {
            return Ok(());
        }
        let e = self.exponents()?;
        let nm2 = self.n.clone() - T::int(2);
        if e.gamma_ab <= nm2 {
            return Err(Error::invalid(
                "particular-solution condition min{γ_ab, ξ_ab} > N−2",
                format!(
                    "γ_ab = {} ≤ N−2 = {}",
                    e.gamma_ab.to_f64(),
                    nm2.to_f64()
                ),
            ));
        }
        if e.xi_ab <= nm2 {
            return Err(Error::invalid(
                "particular-solution condition min{γ_ab, ξ_ab} > N−2",
                format!("ξ_ab = {} ≤ N−2 = {}", e.xi_ab.to_f64(), nm2.to_f64()),
            ));
        }
        Ok(())
    }

    /// Weights of the Kelvin-transformed system:
    /// `ā = (N−2)δ − (N+2+a)`, `b̄ = (N−2)μ − (N+2+b)`.
    pub fn kelvin(&self) -> Params<T> {
        let nm2 = self.n.clone() - T::int(2);
        let np2 = self.n.clone() + T::int(2);
        Params {
            n: self.n.clone(),
            a: nm2.clone() * self.delta.clone() - (np2.clone() + self.a.clone()),
            b: nm2 * self.mu.clone() - (np2 + self.b.clone()),
            delta: self.delta.clone(),
            mu: self.mu.clone(),
        }
    }

    /// Exchange the roles of `u` and `v` (`a ↔ b`, `δ ↔ μ`).
    pub fn swapped(&self) -> Params<T> {
        Params {
            n: self.n.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
            delta: self.mu.clone(),
            mu: self.delta.clone(),
        }
    }

    pub fn to_f64(&self) -> ProblemParams {
        Params {
            n: self.n.to_f64(),
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            delta: self.delta.to_f64(),
            mu: self.mu.to_f64(),
        }
    }
}

impl<T: Scalar> Exponents<T> {
    /// Residuals of `γ+2 = δξ`, `ξ+2 = μγ`, `γ_ab+2+a = δξ_ab`, `ξ_ab+2+b = μγ_ab`.
    pub fn identity_residuals(&self, p: &Params<T>) -> [T; 4] {
        let two = T::int(2);
        [
            self.gamma.clone() + two.clone() - p.delta.clone() * self.xi.clone(),
            self.xi.clone() + two.clone() - p.mu.clone() * self.gamma.clone(),
            self.gamma_ab.clone() + two.clone() + p.a.clone()
                - p.delta.clone() * self.xi_ab.clone(),
            self.xi_ab.clone() + two + p.b.clone() - p.mu.clone() * self.gamma_ab.clone(),
        ]
    }
}

impl ProblemParams {
    /// Unweighted instance `(N, 0, 0, δ, μ)`.
    pub fn unweighted(n: f64, delta: f64, mu: f64) -> Self {
        Params::new(n, 0.0, 0.0, delta, mu)
    }

    /// Exact rational image of these parameters (each `f64` is dyadic, so this is lossless).
    pub fn to_rational(&self) -> RationalParams {
        let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Params {
            n: conv(self.n),
            a: conv(self.a),
            b: conv(self.b),
            delta: conv(self.delta),
            mu: conv(self.mu),
        }
    }
}

/// Leading boundary coefficients of `u` and `v` for blow-up at `R = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryConstants {
    pub a1: f64,
    pub b1: f64,
    /// `A1^D = γ(γ+1)(ξ(ξ+1))^δ`, exact whenever the inputs make it exact.
    pub a1_pow_d: f64,
    /// `B1^D = ξ(ξ+1)(γ(γ+1))^μ`.
    pub b1_pow_d: f64,
}

/// Coefficients of the particular solution `u* = A_N r^{-γ_ab}`, `v* = B_N r^{-ξ_ab}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularConstants {
    pub a_n: f64,
    pub b_n: f64,
    pub a_n_pow_d: f64,
    pub b_n_pow_d: f64,
}

pub fn derive_exponents(params: &ProblemParams) -> Result<Exponents> {
    params.exponents()
}

pub fn boundary_constants(params: &ProblemParams) -> Result<BoundaryConstants> {
    if params.d() <= 0.0 {
        return Err(Error::invalid(
            "superlinearity D = μδ − 1 > 0",
            format!("D = {}", params.d()),
        ));
    }
    let e = params.exponents()?;
    let gg = e.gamma * (e.gamma + 1.0);
    let xx = e.xi * (e.xi + 1.0);
    let a1_pow_d = gg * xx.powf(params.delta);
    let b1_pow_d = xx * gg.powf(params.mu);
    Ok(BoundaryConstants {
        a1: a1_pow_d.powf(1.0 / e.d),
        b1: b1_pow_d.powf(1.0 / e.d),
        a1_pow_d,
        b1_pow_d,
    })
}

pub fn singular_constants(params: &ProblemParams) -> Result<SingularConstants> {
    params.check_singular_condition()?;
    let e = params.exponents()?;
    let nm2 = params.n - 2.0;
    let g = e.gamma_ab * (e.gamma_ab - nm2);
    let x = e.xi_ab * (e.xi_ab - nm2);
    if !(g > 0.0 && x > 0.0) {
        return Err(Error::invalid(
            "particular-solution condition min{γ_ab, ξ_ab} > N−2",
            format!("γ_ab(γ_ab−N+2) = {g}, ξ_ab(ξ_ab−N+2) = {x}"),
        ));
    }
    let a_n_pow_d = g * x.powf(params.delta);
    let b_n_pow_d = x * g.powf(params.mu);
    Ok(SingularConstants {
        a_n: a_n_pow_d.powf(1.0 / e.d),
        b_n: b_n_pow_d.powf(1.0 / e.d),
        a_n_pow_d,
        b_n_pow_d,
    })
}

/// Boundary constant of `Δ²u = |x|^b |u|^μ`: `u ≈ A d^{-4/(μ−1)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiharmonicConstant {
    pub exponent: f64,
    /// Canonical constant, from the system constants with `δ = 1`.
    pub a: f64,
    /// `A^{μ−1} = 8(μ+3)(μ+1)(3μ+1)(μ−1)^{-4}`.
    pub a_pow: f64,
    /// Variant with the factor `(3μ−1)`, kept for comparison; not used downstream.
    pub printed_variant_a_pow: f64,
    pub printed_variant_a: f64,
}

/// The weight `b` does not enter the leading boundary behaviour at `R = 1`; it is
/// accepted for interface symmetry and checked against the weight bound only by callers.
pub fn biharmonic_constant(mu: f64, b: f64) -> Result<BiharmonicConstant> {
    if !(mu > 1.0) {
        return Err(Error::invalid(
            "biharmonic exponent μ > 1",
            format!("μ = {mu}"),
        ));
    }
    let p = ProblemParams::new(1.0, 0.0, b, 1.0, mu);
    let e = p.exponents()?;
    let c = boundary_constants(&p)?;
    let m1 = mu - 1.0;
    let printed = 8.0 * (mu + 3.0) * (mu + 1.0) * (3.0 * mu - 1.0) / m1.powi(4);
    Ok(BiharmonicConstant {
        exponent: e.gamma,
        a: c.a1,
        a_pow: c.a1_pow_d,
        printed_variant_a_pow: printed,
        printed_variant_a: printed.powf(1.0 / m1),
    })
}

/// Factors multiplying `A1` and `B1` when blow-up happens at radius `R` instead of 1:
/// `(R^{γ−γ_ab}, R^{ξ−ξ_ab})`. Both are 1 without weights.
pub fn general_r_correction(params: &ProblemParams, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let e = params.exponents()?;
    Ok((r.powf(e.gamma - e.gamma_ab), r.powf(e.xi - e.xi_ab)))
}

/// Flat record of every derived quantity, for the `constants` report.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedQuantities {
    #[serde(rename = "N")]
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub mu: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub gamma: f64,
    pub xi: f64,
    pub gamma_ab: f64,
    pub xi_ab: f64,
    #[serde(rename = "A1")]
    pub a1: Option<f64>,
    #[serde(rename = "B1")]
    pub b1: Option<f64>,
    #[serde(rename = "A1_pow_D")]
    pub a1_pow_d: Option<f64>,
    #[serde(rename = "B1_pow_D")]
    pub b1_pow_d: Option<f64>,
    pub singular_condition: bool,
    #[serde(rename = "A_N")]
    pub a_n: Option<f64>,
    #[serde(rename = "B_N")]
    pub b_n: Option<f64>,
    pub kelvin_a: f64,
    pub kelvin_b: f64,
    /// Present when δ = 1 and μ > 1 (biharmonic specialisation).
    pub biharmonic_a_pow: Option<f64>,
    pub biharmonic_printed_variant_a_pow: Option<f64>,
}

pub fn derived_quantities(params: &ProblemParams) -> Result<DerivedQuantities> {
    params.validate_regular()?;
    if params.d() <= 0.0 {
        return Err(Error::invalid("superlinearity D = μδ − 1 > 0", format!("D = {}", params.d())));
    }
    let e = params.exponents()?;
    let bc = boundary_constants(params).ok();
    let sc = singular_constants(params).ok();
    let k = params.kelvin();
    let bih = if params.delta == 1.0 && params.mu > 1.0 {
        biharmonic_constant(params.mu, params.b).ok()
    } else {
        None
    };
    Ok(DerivedQuantities {
        n: params.n,
        a: params.a,
        b: params.b,
        delta: params.delta,
        mu: params.mu,
        d: e.d,
        gamma: e.gamma,
        xi: e.xi,
        gamma_ab: e.gamma_ab,
        xi_ab: e.xi_ab,
        a1: bc.as_ref().map(|c| c.a1),
        b1: bc.as_ref().map(|c| c.b1),
        a1_pow_d: bc.as_ref().map(|c| c.a1_pow_d),
        b1_pow_d: bc.as_ref().map(|c| c.b1_pow_d),
        singular_condition: sc.is_some(),
        a_n: sc.as_ref().map(|c| c.a_n),
        b_n: sc.as_ref().map(|c| c.b_n),
        kelvin_a: k.a,
        kelvin_b: k.b,
        biharmonic_a_pow: bih.as_ref().map(|c| c.a_pow),
        biharmonic_printed_variant_a_pow: bih.as_ref().map(|c| c.printed_variant_a_pow),
    })
}
