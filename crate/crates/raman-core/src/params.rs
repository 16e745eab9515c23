//! Physical input parameters of the Raman model.

use core::fmt;

/// Default pump phase; makes both nonlinear coupling constants real and
/// maximizes the quantum correlations.
pub const DEFAULT_PUMP_PHASE: f64 = -core::f64::consts::FRAC_PI_2;

/// Inputs of the model in normalized units.
///
/// All dimensional constants enter only through the products
/// `pump_amp = g̃_S|α_L|L` and `gamma_n = γL`; positions are given as the
/// fraction `z/L ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamanParams {
    /// Ratio of the squared anti-Stokes and Stokes coupling moduli,
    /// `ε = |g_A|²/|g_S|²`.
    pub epsilon: f64,
    /// Normalized nonlinear pump amplitude `|α_Lⁿ| = g̃_S|α_L|L`.
    pub pump_amp: f64,
    /// Normalized damping constant of the vibrational mode, `γⁿ = γL`.
    pub gamma_n: f64,
    /// Initial mean phonon number of the vibrational mode.
    pub n_v: f64,
    /// Mean phonon number of the vibrational reservoir.
    pub n_t: f64,
    /// Pump phase in radians.
    pub phi_l: f64,
}

impl RamanParams {
    /// Parameters with the default pump phase; validates the physical domain.
    pub fn new(epsilon: f64, pump_amp: f64, gamma_n: f64, n_v: f64, n_t: f64) -> Result<Self, ParamError> {
        let p = Self { epsilon, pump_amp, gamma_n, n_v, n_t, phi_l: DEFAULT_PUMP_PHASE };
        p.validate()?;
        Ok(p)
    }

    /// Lossless parameters (`γⁿ = 0`, empty reservoir, vacuum vibrational mode).
    pub fn lossless(epsilon: f64, pump_amp: f64) -> Result<Self, ParamError> {
        Self::new(epsilon, pump_amp, 0.0, 0.0, 0.0)
    }

    /// Replaces the pump phase.
    pub fn with_phase(mut self, phi_l: f64) -> Self {
        self.phi_l = phi_l;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(ParamError::Epsilon(self.epsilon));
        }
        if !(self.pump_amp.is_finite() && self.pump_amp >= 0.0) {
            return Err(ParamError::Nonnegative("pump_amp", self.pump_amp));
        }
        if !(self.gamma_n.is_finite() && self.gamma_n >= 0.0) {
            return Err(ParamError::Nonnegative("gamma_n", self.gamma_n));
        }
        if !(self.n_v.is_finite() && self.n_v >= 0.0) {
            return Err(ParamError::Nonnegative("n_v", self.n_v));
        }
        if !(self.n_t.is_finite() && self.n_t >= 0.0) {
            return Err(ParamError::Nonnegative("n_t", self.n_t));
        }
        if !self.phi_l.is_finite() {
            return Err(ParamError::Nonnegative("phi_l", self.phi_l));
        }
        Ok(())
    }

    /// Dynamical regime selector for `ε`.
    pub fn regime(&self) -> Regime {
        Regime::from_epsilon(self.epsilon)
    }
}

/// The two qualitative branches of the lossless dynamics.
///
/// Metadata only: every computation runs through a single complex-valued
/// code path that is continuous across `ε = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `ε ≤ 1`: mode intensities grow exponentially.
    Exponential,
    /// `ε > 1`: mode intensities oscillate periodically.
    Oscillatory,
}

impl Regime {
    pub fn from_epsilon(epsilon: f64) -> Self {
        if epsilon > 1.0 {
            Regime::Oscillatory
        } else {
            Regime::Exponential
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Exponential => write!(f, "exponential"),
            Regime::Oscillatory => write!(f, "oscillatory"),
        }
    }
}

/// Validation failure for [`RamanParams`] or a position argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamError {
    /// `ε` must be finite and strictly positive.
    Epsilon(f64),
    /// Named field must be finite and nonnegative.
    Nonnegative(&'static str, f64),
    /// Position fraction must lie in `[0, 1]`.
    ZFrac(f64),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::Epsilon(v) => write!(f, "epsilon must be finite and > 0, got {v}"),
            ParamError::Nonnegative(name, v) => write!(f, "{name} must be finite and >= 0, got {v}"),
            ParamError::ZFrac(v) => write!(f, "zfrac must lie in [0, 1], got {v}"),
        }
    }
}

/// Checks a normalized position argument.
pub fn check_zfrac(zfrac: f64) -> Result<(), ParamError> {
    if zfrac.is_finite() && (0.0..=1.0).contains(&zfrac) {
        Ok(())
    } else {
        Err(ParamError::ZFrac(zfrac))
    }
}
