//! Gaussian-state moment coefficients `B_S`, `B_A`, `D_SA` (and `B_V` where
//! defined) in every regime of the model, plus the parameter-estimation
//! helpers built on them.

use core::fmt;

use crate::params::{check_zfrac, ParamError, RamanParams, DEFAULT_PUMP_PHASE};
use crate::solution::solution_coefficients_unchecked;
use crate::C64;

use alloc::vec::Vec;

/// Tolerance on spurious imaginary parts of quantities that are real by
/// construction.
const IM_TOL: f64 = 1e-10;

/// Second-moment descriptor of the zero-mean two-mode Gaussian state of the
/// Stokes and anti-Stokes fields.
#[derive(Clone, Copy, Debug)]
pub struct TwoModeMoments {
    /// Mean Stokes photon number `⟨A_S†A_S⟩`.
    pub b_s: f64,
    /// Mean anti-Stokes photon number `⟨A_A†A_A⟩`.
    pub b_a: f64,
    /// Anomalous cross-correlation `⟨A_S A_A⟩`; real and negative at the
    /// default pump phase.
    pub d_sa: C64,
    /// Mean vibrational phonon number, available only where the model
    /// defines it (no damping).
    pub b_v: Option<f64>,
}

impl TwoModeMoments {
    pub fn new(b_s: f64, b_a: f64, d_sa: C64) -> Self {
        Self { b_s, b_a, d_sa, b_v: None }
    }

    pub fn abs_d(&self) -> f64 {
        self.d_sa.norm()
    }

    /// Checks the positivity constraints of a physical two-mode Gaussian
    /// state: nonnegative means and `|D|² ≤ min[B_S(B_A+1), B_A(B_S+1)]`.
    pub fn check_physical(&self, tol: f64) -> Result<(), ModelError> {
        let d2 = self.d_sa.norm_sqr();
        if self.b_s < -tol
            || self.b_a < -tol
            || d2 > self.b_s * (self.b_a + 1.0) + tol
            || d2 > self.b_a * (self.b_s + 1.0) + tol
        {
            Err(ModelError::Unphysical)
        } else {
            Ok(())
        }
    }
}

/// Errors of the moment-level operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelError {
    Param(ParamError),
    /// The requested closed form only exists in the oscillatory regime.
    OscillatoryOnly { epsilon: f64 },
    /// Preconditions of a restricted closed form were violated.
    Precondition(&'static str),
    /// Reservoir cross sums at unequal positions are not available for a
    /// populated reservoir.
    ReservoirCrossSums,
    /// Moments violate the two-mode Gaussian positivity constraints.
    Unphysical,
    /// The linear-fit inversion is singular at this input.
    SingularFit,
    /// Asymptotic photon-number ratio outside `(1/2, 1]`.
    RatioOutOfRange(f64),
    /// The vibrational mean is not defined for these moments.
    MissingVibrational,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Param(e) => write!(f, "{e}"),
            ModelError::OscillatoryOnly { epsilon } => {
                write!(f, "closed form requires epsilon > 1 (oscillatory regime), got {epsilon}")
            }
            ModelError::Precondition(what) => write!(f, "precondition violated: {what}"),
            ModelError::ReservoirCrossSums => write!(
                f,
                "reservoir cross sums at unequal positions are not available for n_t > 0"
            ),
            ModelError::Unphysical => write!(f, "moments violate two-mode Gaussian positivity"),
            ModelError::SingularFit => write!(f, "ratio fit is singular (r_a = 1 or r_b = 0)"),
            ModelError::RatioOutOfRange(r) => {
                write!(f, "asymptotic ratio must lie in (1/2, 1], got {r}")
            }
            ModelError::MissingVibrational => write!(f, "vibrational mean is not defined here"),
        }
    }
}

impl From<ParamError> for ModelError {
    fn from(e: ParamError) -> Self {
        ModelError::Param(e)
    }
}

/// Phase factor applied to `D_SA` for a pump phase away from the default.
fn pump_phase_factor(phi_l: f64) -> C64 {
    if phi_l == DEFAULT_PUMP_PHASE {
        C64::new(1.0, 0.0)
    } else {
        C64::from_polar(1.0, 2.0 * (phi_l - DEFAULT_PUMP_PHASE))
    }
}

fn real_part_checked(z: C64, what: &'static str) -> f64 {
    debug_assert!(
        z.im.abs() <= IM_TOL * (1.0 + z.re.abs()),
        "residual imaginary part in {what}: {z}"
    );
    let _ = what;
    z.re
}

/// Ideal-case building blocks shared by the lossless and thermal closed
/// forms: `τ = (1 - cos W)/(ε - 1)` and `cos W` for `W = pump·zfrac·√(ε-1)`,
/// evaluated in complex arithmetic so both regimes share one path.
fn lossless_blocks(epsilon: f64, pump: f64, zfrac: f64) -> (C64, C64) {
    let gz = pump * zfrac;
    let w = C64::new(epsilon - 1.0, 0.0).sqrt() * gz;
    let tau = crate::math::cosm1c(w) * (gz * gz);
    (tau, w.cos())
}

/// Moments of the lossless model with an initially empty vibrational mode
/// (`γⁿ = 0`, `n_V = n_T = 0`), continuous across `ε = 1`.
pub fn moments_lossless(params: &RamanParams, zfrac: f64) -> Result<TwoModeMoments, ModelError> {
    params.validate()?;
    check_zfrac(zfrac)?;
    if params.gamma_n != 0.0 || params.n_v != 0.0 || params.n_t != 0.0 {
        return Err(ModelError::Precondition("moments_lossless requires gamma_n = n_v = n_t = 0"));
    }
    let (tau, cw) = lossless_blocks(params.epsilon, params.pump_amp, zfrac);
    let sqrt_eps = libm::sqrt(params.epsilon);
    let b_a = real_part_checked(tau * tau * params.epsilon, "b_a");
    let b_s = real_part_checked(tau * tau * params.epsilon + tau * (cw + 1.0), "b_s");
    let d = -(tau * (tau + 1.0)) * sqrt_eps;
    let d = C64::new(real_part_checked(d, "d_sa"), 0.0) * pump_phase_factor(params.phi_l);
    Ok(TwoModeMoments { b_s, b_a, d_sa: d, b_v: Some(b_s - b_a) })
}

/// Moments of the lossless model with a thermally populated vibrational mode
/// (`γⁿ = 0`, `n_T = 0`), given in the oscillatory regime `ε > 1`.
///
/// The thermal correction to the cross-correlation is `-√ε n_V β(z)`; the
/// `2√ε` appearing in some statements of this formula is inconsistent with
/// the general solution and with state positivity.
pub fn moments_thermal(params: &RamanParams, zfrac: f64) -> Result<TwoModeMoments, ModelError> {
    params.validate()?;
    check_zfrac(zfrac)?;
    if params.gamma_n != 0.0 || params.n_t != 0.0 {
        return Err(ModelError::Precondition("moments_thermal requires gamma_n = n_t = 0"));
    }
    if params.epsilon <= 1.0 {
        return Err(ModelError::OscillatoryOnly { epsilon: params.epsilon });
    }
    let (tau, cw) = lossless_blocks(params.epsilon, params.pump_amp, zfrac);
    let tau = real_part_checked(tau, "tau");
    let cw = real_part_checked(cw, "cos W");
    let sqrt_eps = libm::sqrt(params.epsilon);
    let beta = tau * (1.0 + cw);
    let b_a_id = params.epsilon * tau * tau;
    let b_s_id = b_a_id + beta;
    let b_s = b_s_id + params.n_v * beta;
    let b_a = b_a_id + params.epsilon * params.n_v * beta;
    let d_id = -sqrt_eps * tau * (1.0 + tau);
    let d = C64::new(d_id - sqrt_eps * params.n_v * beta, 0.0) * pump_phase_factor(params.phi_l);
    let b_v = params.n_v * cw * cw + beta;
    Ok(TwoModeMoments { b_s, b_a, d_sa: d, b_v: Some(b_v) })
}

/// Equal-position moments of the full model (damping, thermal vibrational
/// mode and thermal reservoir) from the solution coefficients.
pub fn moments_general(params: &RamanParams, zfrac: f64) -> Result<TwoModeMoments, ModelError> {
    params.validate()?;
    check_zfrac(zfrac)?;
    let c = solution_coefficients_unchecked(params, zfrac);
    let (n_v, n_t) = (params.n_v, params.n_t);
    let b_s = (n_v + 1.0) * c.f2_s.norm_sqr() + c.f4_s.norm_sqr() + (n_t + 1.0) * c.sum_f2l_sq;
    let b_a = n_v * c.f2_a.norm_sqr() + c.f4_a.norm_sqr() + n_t * c.sum_f3l_sq;
    let d = c.f2_s * c.f2_a * n_v - c.f3_s * c.f4_a + c.sum_f2l_f3l * n_t;
    let d = C64::new(real_part_checked(d, "d_sa"), 0.0) * pump_phase_factor(params.phi_l);
    let b_v = if params.gamma_n * zfrac == 0.0 {
        Some(b_s - b_a + n_v)
    } else {
        None
    };
    Ok(TwoModeMoments { b_s, b_a, d_sa: d, b_v })
}

/// Asymptotic moments of the damped model in the strong-pump limit
/// (`|α_Lⁿ| → ∞`), defined for `ε > 1`.
pub fn moments_asymptotic(epsilon: f64, n_t: f64) -> Result<TwoModeMoments, ModelError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(ParamError::Epsilon(epsilon).into());
    }
    if !(n_t.is_finite() && n_t >= 0.0) {
        return Err(ParamError::Nonnegative("n_t", n_t).into());
    }
    if epsilon <= 1.0 {
        return Err(ModelError::OscillatoryOnly { epsilon });
    }
    let denom = (epsilon - 1.0) * (epsilon - 1.0);
    let npt = (epsilon - 1.0) * n_t;
    let b_a = (epsilon * npt + epsilon) / denom;
    let b_s = (npt + 2.0 * epsilon - 1.0) / denom;
    let d = -libm::sqrt(epsilon) * (npt + epsilon) / denom;
    Ok(TwoModeMoments { b_s, b_a, d_sa: C64::new(d, 0.0), b_v: None })
}

/// Asymptotic anti-Stokes/Stokes mean photon-number ratio.
pub fn asymptotic_ratio(epsilon: f64, n_t: f64) -> Result<f64, ModelError> {
    let m = moments_asymptotic(epsilon, n_t)?;
    Ok(m.b_a / m.b_s)
}

/// Cross-position correlation coefficient `d_SA(z_S, z_A)`.
///
/// Defined for an unpopulated reservoir only: the reservoir cross sums at
/// unequal positions are not fixed by the equal-position commutation
/// identities (they enter with a factor `n_T` and vanish for `n_T = 0`).
pub fn cross_position_correlator(
    params: &RamanParams,
    z_s: f64,
    z_a: f64,
) -> Result<C64, ModelError> {
    params.validate()?;
    check_zfrac(z_s)?;
    check_zfrac(z_a)?;
    if params.n_t != 0.0 {
        return Err(ModelError::ReservoirCrossSums);
    }
    let cs = solution_coefficients_unchecked(params, z_s);
    let ca = solution_coefficients_unchecked(params, z_a);
    let d = cs.f2_s * ca.f2_a * params.n_v - cs.f3_s * ca.f4_a;
    Ok(C64::new(real_part_checked(d, "d_sa(z,z')"), 0.0) * pump_phase_factor(params.phi_l))
}

/// Correlation of the Stokes and anti-Stokes intensity fluctuations at two
/// positions, `⟨ΔI_S(z_S) ΔI_A(z_A)⟩ = |d_SA(z_S, z_A)|²`.
pub fn intensity_cross_correlation(
    params: &RamanParams,
    z_s: f64,
    z_a: f64,
) -> Result<f64, ModelError> {
    Ok(cross_position_correlator(params, z_s, z_a)?.norm_sqr())
}

/// Pump amplitudes of perfect pairing `|α_{L,m}ⁿ| = (2m-1)π/√(ε-1)` and of
/// the vacuum returns `|α̃_{L,m}ⁿ| = 2mπ/√(ε-1)`, for `m = 1..m_max`.
pub fn balanced_pump_amplitudes(epsilon: f64, m_max: usize) -> Result<Vec<(f64, f64)>, ModelError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(ModelError::OscillatoryOnly { epsilon });
    }
    if m_max == 0 {
        return Err(ModelError::Precondition("m_max must be >= 1"));
    }
    let scale = core::f64::consts::PI / libm::sqrt(epsilon - 1.0);
    Ok((1..=m_max)
        .map(|m| ((2 * m - 1) as f64 * scale, (2 * m) as f64 * scale))
        .collect())
}

/// Residual of the photon/phonon-number conservation law for an empty
/// reservoir: `(B_S - B_A - B_V) + n_V`; vanishes along the lossless flow.
pub fn conservation_residual(moments: &TwoModeMoments, n_v: f64) -> Result<f64, ModelError> {
    let b_v = moments.b_v.ok_or(ModelError::MissingVibrational)?;
    Ok(moments.b_s - moments.b_a - b_v + n_v)
}

/// Inverts the small-pump Taylor expansion of the photon-number ratio
/// `ℛ ≈ r_a + r_b |α_Lⁿ|²` into `(ε, n_V)`.
pub fn fit_epsilon_nv(r_a: f64, r_b: f64) -> Result<(f64, f64), ModelError> {
    if !(r_a.is_finite() && r_b.is_finite()) || r_a == 1.0 || r_b == 0.0 {
        return Err(ModelError::SingularFit);
    }
    let epsilon = r_a + 4.0 * r_b / (1.0 - r_a);
    let n_v = r_a * (1.0 - r_a) / (4.0 * r_b);
    Ok((epsilon, n_v))
}

/// Small-pump Taylor coefficients `(r_a, r_b)` of the photon-number ratio
/// for given `(ε, n_V)`; the forward map inverted by [`fit_epsilon_nv`].
pub fn ratio_taylor_coefficients(epsilon: f64, n_v: f64) -> (f64, f64) {
    let r_a = epsilon * n_v / (n_v + 1.0);
    let r_b = epsilon / (4.0 * (n_v + 1.0)) * (1.0 - epsilon * n_v / (n_v + 1.0));
    (r_a, r_b)
}

/// Recovers `ε` from the asymptotic photon-number ratio, neglecting
/// reservoir phonons: `ε = ℛ/(2ℛ - 1)` for `ℛ ∈ (1/2, 1]`.
pub fn epsilon_from_asymptotic_ratio(r_asym: f64) -> Result<f64, ModelError> {
    if !(r_asym.is_finite() && r_asym > 0.5 && r_asym <= 1.0) {
        return Err(ModelError::RatioOutOfRange(r_asym));
    }
    Ok(r_asym / (2.0 * r_asym - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn p(eps: f64, pump: f64) -> RamanParams {
        RamanParams::lossless(eps, pump).unwrap()
    }

    #[test]
    fn balanced_point_matches_closed_form() {
        let m = moments_lossless(&p(4.0, PI / libm::sqrt(3.0)), 1.0).unwrap();
        assert!((m.b_s - 16.0 / 9.0).abs() < 1e-12);
        assert!((m.b_a - 16.0 / 9.0).abs() < 1e-12);
        assert!((m.d_sa.re + 20.0 / 9.0).abs() < 1e-12);
        assert!(m.d_sa.im.abs() < 1e-14);
        assert!(m.b_v.unwrap().abs() < 1e-12);
        m.check_physical(1e-10).unwrap();
    }

    #[test]
    fn vacuum_return_at_doubled_pump() {
        let m = moments_lossless(&p(4.0, 2.0 * PI / libm::sqrt(3.0)), 1.0).unwrap();
        assert!(m.b_s.abs() < 1e-12 && m.b_a.abs() < 1e-12 && m.d_sa.norm() < 1e-12);
    }

    #[test]
    fn exponential_regime_point() {
        // frozen from a 30-digit evaluation of the closed form
        let m = moments_lossless(&p(0.25, 1.0), 1.0).unwrap();
        assert!((m.b_s - 1.347_152_079_582_922_6).abs() < 1e-12);
        assert!((m.b_a - 0.070_767_119_465_637_53).abs() < 1e-12);
        assert!((m.d_sa.re - (-0.407_555_139_361_368_2)).abs() < 1e-12);
    }

    #[test]
    fn lossless_is_continuous_across_unit_ratio() {
        let a = 1.1_f64;
        let lo = moments_lossless(&p(1.0 - 1e-6, a), 1.0).unwrap();
        let hi = moments_lossless(&p(1.0 + 1e-6, a), 1.0).unwrap();
        assert!((lo.b_s - hi.b_s).abs() / hi.b_s < 1e-4);
        assert!((lo.b_a - hi.b_a).abs() / hi.b_a < 1e-4);
        assert!((lo.d_sa.re - hi.d_sa.re).abs() / hi.d_sa.norm() < 1e-4);
        // series limit at ε = 1
        let m = moments_lossless(&p(1.0, a), 1.0).unwrap();
        assert!((m.b_a - a.powi(4) / 4.0).abs() < 1e-10);
        assert!((m.b_s - (a.powi(4) / 4.0 + a * a)).abs() < 1e-10);
        assert!((m.d_sa.re + (a * a / 2.0) * (1.0 + a * a / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn thermal_point_values() {
        let params = RamanParams::new(4.0, PI / (2.0 * libm::sqrt(3.0)), 0.0, 0.5, 0.0).unwrap();
        let m = moments_thermal(&params, 1.0).unwrap();
        assert!((m.b_s - 17.0 / 18.0).abs() < 1e-12);
        assert!((m.b_a - 10.0 / 9.0).abs() < 1e-12);
        assert!((m.d_sa.re + 11.0 / 9.0).abs() < 1e-12);
        assert!((m.b_v.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        m.check_physical(1e-10).unwrap();
        assert!(conservation_residual(&m, 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn thermal_balanced_pump_matches_lossless() {
        let pump = PI / libm::sqrt(3.0);
        let thermal = RamanParams::new(4.0, pump, 0.0, 0.5, 0.0).unwrap();
        let mt = moments_thermal(&thermal, 1.0).unwrap();
        let ml = moments_lossless(&p(4.0, pump), 1.0).unwrap();
        assert!((mt.b_s - ml.b_s).abs() < 1e-12);
        assert!((mt.b_a - ml.b_a).abs() < 1e-12);
        assert!((mt.d_sa - ml.d_sa).norm() < 1e-12);
        assert!((mt.b_v.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thermal_rejects_exponential_regime() {
        let params = RamanParams::new(0.5, 1.0, 0.0, 0.5, 0.0).unwrap();
        assert!(matches!(
            moments_thermal(&params, 1.0),
            Err(ModelError::OscillatoryOnly { .. })
        ));
    }

    #[test]
    fn general_reduces_to_lossless_and_thermal() {
        for &(eps, pump, nv, z) in &[
            (4.0, 1.2, 0.0, 1.0),
            (0.3, 0.8, 0.0, 0.7),
            (4.0, PI / (2.0 * libm::sqrt(3.0)), 0.5, 1.0),
            (2.5, 2.0, 1.3, 0.4),
        ] {
            let params = RamanParams::new(eps, pump, 0.0, nv, 0.0).unwrap();
            let g = moments_general(&params, z).unwrap();
            let reference = if nv == 0.0 {
                moments_lossless(&params, z).unwrap()
            } else if eps > 1.0 {
                moments_thermal(&params, z).unwrap()
            } else {
                continue;
            };
            assert!((g.b_s - reference.b_s).abs() < 1e-10, "eps={eps} pump={pump}");
            assert!((g.b_a - reference.b_a).abs() < 1e-10);
            assert!((g.d_sa - reference.d_sa).norm() < 1e-10);
            assert!((g.b_v.unwrap() - reference.b_v.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn general_no_interaction_is_vacuum() {
        let params = RamanParams::new(4.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let m = moments_general(&params, 1.0).unwrap();
        assert!(m.b_s.abs() < 1e-14 && m.b_a.abs() < 1e-14 && m.d_sa.norm() < 1e-14);
    }

    #[test]
    fn general_converges_to_asymptote() {
        let asym = moments_asymptotic(4.0, 0.0).unwrap();
        let params = RamanParams::new(4.0, 40.0, 40.0, 0.0, 0.0).unwrap();
        let m = moments_general(&params, 1.0).unwrap();
        assert!((m.b_s - asym.b_s).abs() < 1e-4);
        assert!((m.b_a - asym.b_a).abs() < 1e-4);
        assert!((m.d_sa - asym.d_sa).norm() < 1e-4);
    }

    #[test]
    fn asymptotic_values_and_decay() {
        let m = moments_asymptotic(4.0, 0.0).unwrap();
        assert!((m.b_a - 4.0 / 9.0).abs() < 1e-15);
        assert!((m.b_s - 7.0 / 9.0).abs() < 1e-15);
        assert!((m.d_sa.re + 8.0 / 9.0).abs() < 1e-15);
        // 1/ε decay of every coefficient for an empty reservoir
        let far = moments_asymptotic(1e9, 0.0).unwrap();
        assert!(far.b_s < 1e-8 && far.b_a < 1e-8 && far.d_sa.norm() < 1e-4);
        // with reservoir phonons the anti-Stokes mode thermalizes instead
        let far = moments_asymptotic(1e9, 0.7).unwrap();
        assert!((far.b_a - 0.7).abs() < 1e-6 && far.b_s < 1e-8);
        assert!(moments_asymptotic(0.8, 0.0).is_err());
    }

    #[test]
    fn cross_position_reduces_and_factorizes() {
        let params = RamanParams::new(4.0, 5.0 * PI / libm::sqrt(3.0), 0.0, 0.0, 0.0).unwrap();
        for &z in &[0.2, 0.55, 1.0] {
            let d = cross_position_correlator(&params, z, z).unwrap();
            let scaled = RamanParams::lossless(4.0, params.pump_amp).unwrap();
            let m = moments_lossless(&scaled, z).unwrap();
            assert!((d - m.d_sa).norm() < 1e-10, "z={z}");
        }
        // n_V = 0: |d(z_S, z_A)|² factorizes
        let (z1, z2, z3, z4) = (0.21, 0.43, 0.67, 0.89);
        let c = |a, b| intensity_cross_correlation(&params, a, b).unwrap();
        let lhs = c(z1, z3) * c(z2, z4);
        let rhs = c(z1, z4) * c(z2, z3);
        assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()));
        // n_V = 1: interference of two factorized terms; not factorizable
        let thermal = RamanParams::new(4.0, params.pump_amp, 0.0, 1.0, 0.0).unwrap();
        let ct = |a, b| intensity_cross_correlation(&thermal, a, b).unwrap();
        let lhs = ct(z1, z3) * ct(z2, z4);
        let rhs = ct(z1, z4) * ct(z2, z3);
        assert!((lhs - rhs).abs() > 1e-6 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn cross_position_rejects_populated_reservoir() {
        let params = RamanParams::new(4.0, 1.0, 0.5, 0.0, 0.2).unwrap();
        assert_eq!(
            cross_position_correlator(&params, 0.3, 0.7),
            Err(ModelError::ReservoirCrossSums)
        );
    }

    #[test]
    fn balanced_amplitude_table() {
        let v = balanced_pump_amplitudes(4.0, 1).unwrap();
        assert!((v[0].0 - PI / libm::sqrt(3.0)).abs() < 1e-15);
        assert!((v[0].1 - 2.0 * PI / libm::sqrt(3.0)).abs() < 1e-15);
        let v = balanced_pump_amplitudes(2.0, 2).unwrap();
        assert!((v[1].0 - 3.0 * PI).abs() < 1e-12);
        assert!((v[1].1 - 4.0 * PI).abs() < 1e-12);
        let v = balanced_pump_amplitudes(5.0, 1).unwrap();
        assert!((v[0].0 - PI / 2.0).abs() < 1e-15);
        assert!((v[0].1 - PI).abs() < 1e-15);
        assert!(balanced_pump_amplitudes(1.0, 3).is_err());
    }

    #[test]
    fn conservation_examples() {
        // initial condition, no interaction
        let m = moments_general(&RamanParams::new(2.0, 0.0, 0.0, 0.3, 0.0).unwrap(), 1.0).unwrap();
        assert!((conservation_residual(&m, 0.3).unwrap()).abs() < 1e-14);
        // balanced lossless point
        let m = moments_lossless(&p(4.0, PI / libm::sqrt(3.0)), 1.0).unwrap();
        assert!(conservation_residual(&m, 0.0).unwrap().abs() < 1e-12);
        // missing vibrational mean
        let m = moments_asymptotic(4.0, 0.0).unwrap();
        assert_eq!(conservation_residual(&m, 0.0), Err(ModelError::MissingVibrational));
    }

    #[test]
    fn ratio_fit_examples() {
        let (eps, nv) = fit_epsilon_nv(4.0 / 3.0, -2.0 / 9.0).unwrap();
        assert!((eps - 4.0).abs() < 1e-12 && (nv - 0.5).abs() < 1e-12);
        let (eps, nv) = fit_epsilon_nv(0.0, 1.75).unwrap();
        assert!((eps - 7.0).abs() < 1e-12 && nv.abs() < 1e-12);
        assert_eq!(fit_epsilon_nv(1.0, 0.3), Err(ModelError::SingularFit));
        assert_eq!(fit_epsilon_nv(0.4, 0.0), Err(ModelError::SingularFit));
    }

    #[test]
    fn asymptotic_ratio_inversion() {
        assert!((epsilon_from_asymptotic_ratio(4.0 / 7.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((epsilon_from_asymptotic_ratio(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((epsilon_from_asymptotic_ratio(0.55).unwrap() - 5.5).abs() < 1e-12);
        assert!(epsilon_from_asymptotic_ratio(0.5).is_err());
        assert!(epsilon_from_asymptotic_ratio(0.49).is_err());
        // cross-check against the asymptotic ratio itself
        let r = asymptotic_ratio(4.0, 0.0).unwrap();
        assert!((r - 4.0 / 7.0).abs() < 1e-14);
        assert!((epsilon_from_asymptotic_ratio(r).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pump_phase_rotates_cross_correlation() {
        let base = p(4.0, 1.0);
        let rotated = base.with_phase(0.0);
        let m0 = moments_lossless(&base, 1.0).unwrap();
        let m1 = moments_lossless(&rotated, 1.0).unwrap();
        assert!((m0.b_s - m1.b_s).abs() < 1e-14);
        // e^{2i(0 + π/2)} = e^{iπ} = -1
        assert!((m1.d_sa - (-m0.d_sa)).norm() < 1e-12);
        let m2 = moments_lossless(&base.with_phase(0.7), 1.0).unwrap();
        assert!((m2.d_sa.norm() - m0.d_sa.norm()).abs() < 1e-12);
        let expected_arg = m0.d_sa.arg() + 2.0 * (0.7 + PI / 2.0);
        let diff = (m2.d_sa.arg() - expected_arg).rem_euclid(2.0 * PI);
        assert!(diff < 1e-10 || (2.0 * PI - diff) < 1e-10);
    }
}
