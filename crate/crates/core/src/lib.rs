//! Radial large solutions of the weighted Lane–Emden system
//! `Δu = |x|^a v^δ`, `Δv = |x|^b u^μ`.
//!
//! The crate covers the whole pipeline for this system: exact exponents and boundary
//! constants ([`params`]), stiff radial integration with blow-up extrapolation
//! ([`radial`]), the logarithmic phase charts ([`phase`]), fixed points, invariant
//! manifolds and connecting orbits ([`manifolds`]), the curve of data that blow up at a
//! given radius ([`blowcurve`]) and asymptotic fits near the singularities
//! ([`asymptotics`]). [`verify`] bundles numbered self-checks and [`cli`] drives the
//! `blowup-lab` binary.

// Guards are written as `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ode;
pub mod params;
pub mod radial;
pub mod fit;
pub mod phase;
pub mod manifolds;
pub mod blowcurve;
pub mod asymptotics;
pub mod verify;
pub mod cli;
