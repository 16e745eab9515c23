//! Coefficients of the operator solution of the spatial Heisenberg equations.
//!
//! With the pump phase chosen so both couplings are real, the interaction
//! mixes the envelope triple `(A_V, A_S†, A_A)` through two decay/oscillation
//! exponents `λ± = (-γ ± Γ)/4`, `Γ = √(γ² - 16Ω²)`, `Ω² = |g_A|² - |g_S|²`.
//! Everything is evaluated in complex arithmetic so the hyperbolic (`ε ≤ 1`,
//! or overdamped) and trigonometric (`ε > 1`) branches share one code path;
//! the removable singularities at `Γ → 0` and `Ω → 0` are handled by series.
//!
//! The sign convention matches the closed-form coefficients of the model
//! (cross-correlation `D_SA < 0` at the default pump phase): the anti-Stokes
//! mode carries a fixed phase flip relative to the bare interaction operator.

use crate::math::{expm1c_dd, sinhc};
use crate::params::{check_zfrac, ParamError, RamanParams};
use crate::C64;

/// Solution coefficients at a fixed position, together with the vibrational
/// reservoir sums resolved through the equal-position commutation identities.
#[derive(Clone, Copy, Debug)]
pub struct SolutionCoefficients {
    pub f1: C64,
    pub f2_s: C64,
    pub f2_a: C64,
    pub f3_s: C64,
    pub f3_a: C64,
    pub f4_s: C64,
    pub f4_a: C64,
    /// `Σ_l |f_{2,l}|² = |f_{3,S}|² - 1 - |f_{2,S}|² - |f_{4,S}|²`.
    pub sum_f2l_sq: f64,
    /// `Σ_l |f_{3,l}|² = 1 - |f_{2,A}|² - |f_{3,A}|² + |f_{4,A}|²`.
    pub sum_f3l_sq: f64,
    /// `Σ_l f_{2,l} f_{3,l} = -f_{2,S}f_{2,A} - f_{3,S}f_{4,A} + f_{4,S}f_{3,A}`.
    pub sum_f2l_f3l: C64,
}

/// Evaluates the solution coefficients at `z/L = zfrac`.
///
/// The couplings enter only through the products `g_S z = pump_amp · zfrac`
/// and `γ z = gamma_n · zfrac`.
pub fn solution_coefficients(params: &RamanParams, zfrac: f64) -> Result<SolutionCoefficients, ParamError> {
    params.validate()?;
    check_zfrac(zfrac)?;
    Ok(solution_coefficients_unchecked(params, zfrac))
}

pub(crate) fn solution_coefficients_unchecked(params: &RamanParams, zfrac: f64) -> SolutionCoefficients {
    let gs = params.pump_amp * zfrac;
    let ga = libm::sqrt(params.epsilon) * gs;
    let gz = params.gamma_n * zfrac;
    let omega_sq = ga * ga - gs * gs;

    let r = -gz / 4.0;
    let d = C64::new(gz * gz - 16.0 * omega_sq, 0.0).sqrt() / 4.0;
    let er = libm::exp(r);

    let sc = sinhc(d);
    let f1 = (d.cosh() + sc * r) * er;
    let f2_s = C64::new(0.0, gs * er) * sc;
    let f2_a = C64::new(0.0, ga * er) * sc;

    // w = (1 - [cosh(d) - r sinhc(d)] e^r)/Ω² as a divided difference of
    // (e^x - 1)/x at the exponents λ± = r ± d; removes the Ω² cancellation.
    let rr = C64::new(r, 0.0);
    let w = expm1c_dd(rr + d, rr - d);

    let f3_s = C64::new(1.0, 0.0) + w * (gs * gs);
    let f3_a = w * (ga * ga) - 1.0;
    let f4 = w * (gs * ga);

    let sum_f2l_sq = f3_s.norm_sqr() - 1.0 - f2_s.norm_sqr() - f4.norm_sqr();
    let sum_f3l_sq = 1.0 - f2_a.norm_sqr() - f3_a.norm_sqr() + f4.norm_sqr();
    let sum_f2l_f3l = -f2_s * f2_a - f3_s * f4 + f4 * f3_a;

    SolutionCoefficients {
        f1,
        f2_s,
        f2_a,
        f3_s,
        f3_a,
        f4_s: f4,
        f4_a: f4,
        sum_f2l_sq,
        sum_f3l_sq,
        sum_f2l_f3l,
    }
}
