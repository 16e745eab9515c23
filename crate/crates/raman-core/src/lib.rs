//! Two-mode Gaussian model of Stokes/anti-Stokes photon pairing in the Raman
//! process with a classical pump and a damped, thermally populated vibrational
//! mode.
//!
//! The crate is organized in layers:
//!
//! * [`params`] — physical input parameters and regime classification.
//! * [`solution`] — coefficients of the operator solution of the spatial
//!   Heisenberg equations, with the vibrational-reservoir sums resolved
//!   through the bosonic commutation identities.
//! * [`moments`] — the Gaussian-state descriptors `B_S`, `B_A`, `D_SA`
//!   (and `B_V` where defined) in every regime: lossless, thermally seeded,
//!   damped, and asymptotic, plus cross-position correlators and parameter
//!   fits.
//! * [`measures`] — intensity cross-correlation, noise-reduction factor,
//!   principal squeezing, logarithmic negativity, purity, nonclassicality
//!   depth, Gaussian steering, displaced-parity expectations and the Bell
//!   parameter with its optimizer.
//! * [`distributions`] — joint photon-number distributions, `s`-ordered
//!   quasi-distributions of integrated intensities, the multimode
//!   noise-reduction factor, and the balanced-point statistical operator.
//! * [`spdc`] — the ideal twin-beam reference model used for comparisons.
//! * [`fock`] — an independent truncated Fock-space oracle that evolves the
//!   three-mode state directly and extracts the same observables.
//!
//! All computations are pure functions of their value inputs; the crate is
//! `no_std` (with `alloc`) and safe for concurrent use.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod distributions;
pub mod fock;
pub mod math;
pub mod measures;
pub mod moments;
pub mod params;
pub mod solution;
pub mod spdc;

pub use moments::TwoModeMoments;
pub use params::{RamanParams, Regime};
pub use solution::SolutionCoefficients;

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
