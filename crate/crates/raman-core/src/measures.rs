//! Correlation and nonclassicality measures of the two-mode Gaussian state:
//! intensity cross-correlation, noise-reduction factor, principal squeezing,
//! covariance-matrix quantities (logarithmic negativity, purity, steering),
//! the Lee nonclassicality depth, displaced-parity expectations and the Bell
//! parameter, plus the closed-form balanced-point and asymptotic reports.

use core::fmt;

use crate::math::{nelder_mead_max2, Maximum2};
use crate::moments::{moments_asymptotic, ModelError, TwoModeMoments};
use crate::C64;

/// Below this total intensity the normalized correlation quantities are
/// reported as ill-conditioned instead of returning huge floats.
pub const ILL_CONDITIONED_INTENSITY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureError {
    /// Mean photon numbers too small for normalized correlation functions.
    IllConditioned,
    /// Moments fail the two-mode Gaussian positivity constraints.
    Unphysical,
    /// Closed form defined only for `ε > 1`.
    OscillatoryOnly { epsilon: f64 },
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::IllConditioned => {
                write!(f, "mean photon numbers too small; normalized correlations undefined")
            }
            MeasureError::Unphysical => write!(f, "moments are not a physical Gaussian state"),
            MeasureError::OscillatoryOnly { epsilon } => {
                write!(f, "closed form requires epsilon > 1, got {epsilon}")
            }
        }
    }
}

impl From<ModelError> for MeasureError {
    fn from(_: ModelError) -> Self {
        MeasureError::Unphysical
    }
}

/// Moments with the cross-correlation rotated real nonnegative by a local
/// phase; all covariance-based measures are invariant under this rotation.
/// Returns the rotated moments and the removed phase.
pub fn rotate_to_real(m: &TwoModeMoments) -> (TwoModeMoments, f64) {
    let phase = m.d_sa.arg();
    (
        TwoModeMoments { d_sa: C64::new(m.d_sa.norm(), 0.0), ..*m },
        phase,
    )
}

/// 4×4 quadrature covariance matrix (vacuum = identity).
#[derive(Clone, Copy, Debug)]
pub struct CovarianceMatrix(pub [[f64; 4]; 4]);

impl CovarianceMatrix {
    /// Covariance of the state after the local phase rotation making `D`
    /// real nonnegative.
    pub fn from_moments(m: &TwoModeMoments) -> Self {
        let (rot, _) = rotate_to_real(m);
        let a = 1.0 + 2.0 * rot.b_s;
        let b = 1.0 + 2.0 * rot.b_a;
        let c = 2.0 * rot.d_sa.re;
        CovarianceMatrix([
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, -c],
            [c, 0.0, b, 0.0],
            [0.0, -c, 0.0, b],
        ])
    }

    /// Partial transposition of the anti-Stokes mode (momentum sign flip).
    pub fn ppt(&self) -> Self {
        let mut out = self.0;
        for i in 0..4 {
            if i != 3 {
                out[i][3] = -out[i][3];
                out[3][i] = -out[3][i];
            }
        }
        CovarianceMatrix(out)
    }

    /// Determinant by LU elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut m = self.0;
        let mut det = 1.0;
        for k in 0..4 {
            let mut piv = k;
            for r in (k + 1)..4 {
                if m[r][k].abs() > m[piv][k].abs() {
                    piv = r;
                }
            }
            if m[piv][k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                m.swap(piv, k);
                det = -det;
            }
            det *= m[k][k];
            for r in (k + 1)..4 {
                let f = m[r][k] / m[k][k];
                for c in k..4 {
                    m[r][c] -= f * m[k][c];
                }
            }
        }
        det
    }

    /// Symplectic spectrum `(ν₋, ν₊)` from the trace invariants of
    /// `(Ω σ)²`, independent of any closed-form algebra.
    pub fn symplectic_spectrum(&self) -> (f64, f64) {
        // M = Ω σ with Ω = J ⊕ J, J = [[0, 1], [-1, 0]]
        let s = &self.0;
        let mut m = [[0.0; 4]; 4];
        for c in 0..4 {
            m[0][c] = s[1][c];
            m[1][c] = -s[0][c];
            m[2][c] = s[3][c];
            m[3][c] = -s[2][c];
        }
        // B = -(M M); eigenvalues {ν₋², ν₋², ν₊², ν₊²}
        let mut b = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += m[i][k] * m[k][j];
                }
                b[i][j] = -acc;
            }
        }
        let tr: f64 = (0..4).map(|i| b[i][i]).sum();
        let mut tr2 = 0.0;
        for i in 0..4 {
            for k in 0..4 {
                tr2 += b[i][k] * b[k][i];
            }
        }
        let s1 = tr / 2.0; // ν₋² + ν₊²
        let s2 = tr2 / 2.0; // ν₋⁴ + ν₊⁴
        let disc = (2.0 * s2 - s1 * s1).max(0.0);
        let root = libm::sqrt(disc);
        let lo = ((s1 - root) / 2.0).max(0.0);
        let hi = ((s1 + root) / 2.0).max(0.0);
        (libm::sqrt(lo), libm::sqrt(hi))
    }
}

/// Covariance matrix of the (rotated) state.
pub fn covariance(m: &TwoModeMoments) -> CovarianceMatrix {
    CovarianceMatrix::from_moments(m)
}

/// Closed-form symplectic eigenvalues `(ξ₋, ξ₊)` of the partially transposed
/// covariance matrix, after the rotation making `D` real.
pub fn ppt_symplectic_closed(m: &TwoModeMoments) -> (f64, f64) {
    ppt_symplectic_re_d2(m.b_s, m.b_a, m.d_sa.norm_sqr())
}

/// Literal evaluation using `Re{D²}` on the unrotated cross-correlation.
pub fn ppt_symplectic_raw(m: &TwoModeMoments) -> (f64, f64) {
    ppt_symplectic_re_d2(m.b_s, m.b_a, (m.d_sa * m.d_sa).re)
}

fn ppt_symplectic_re_d2(b_s: f64, b_a: f64, re_d2: f64) -> (f64, f64) {
    let a = 1.0 + 2.0 * b_s;
    let b = 1.0 + 2.0 * b_a;
    let sum_sq = a * a + b * b + 8.0 * re_d2;
    let root = libm::sqrt(((b_s - b_a) * (b_s - b_a) + 4.0 * re_d2).max(0.0));
    let cross = 4.0 * (1.0 + b_s + b_a) * root;
    let hi = ((sum_sq + cross) / 2.0).max(0.0);
    // ξ₋² through ξ₊² det σ̃ = (ab - 4 Re D²)²: avoids the cancellation in
    // sum_sq - cross for strongly squeezed states
    let det_root = a * b - 4.0 * re_d2;
    let lo = if hi > 0.0 && det_root > 0.0 {
        det_root * det_root / hi
    } else {
        ((sum_sq - cross) / 2.0).max(0.0)
    };
    (libm::sqrt(lo), libm::sqrt(hi))
}

/// Logarithmic negativity `E_N = max(0, -ln ξ₋)`.
pub fn log_negativity(m: &TwoModeMoments) -> f64 {
    let (xi_minus, _) = ppt_symplectic_closed(m);
    (-libm::log(xi_minus)).max(0.0)
}

/// Purity `μ = 1/√det σ` of the rotated state.
pub fn purity(m: &TwoModeMoments) -> f64 {
    1.0 / ((1.0 + 2.0 * m.b_s) * (1.0 + 2.0 * m.b_a) - 4.0 * m.d_sa.norm_sqr())
}

/// Purity evaluated literally with `Re{D²}` on the unrotated moments.
pub fn purity_raw(m: &TwoModeMoments) -> f64 {
    1.0 / ((1.0 + 2.0 * m.b_s) * (1.0 + 2.0 * m.b_a) - 4.0 * (m.d_sa * m.d_sa).re)
}

/// Normalized intensity cross-correlation `g²_SA = 1 + |D|²/(B_S B_A)`.
pub fn g2(m: &TwoModeMoments) -> Result<f64, MeasureError> {
    g2_cross(m.b_s, m.b_a, m.d_sa)
}

/// Cross-position variant from `B_S(z)`, `B_A(z')` and `d_SA(z, z')`.
pub fn g2_cross(b_s: f64, b_a: f64, d_sa: C64) -> Result<f64, MeasureError> {
    if b_s <= 0.0 || b_a <= 0.0 || b_s + b_a < ILL_CONDITIONED_INTENSITY {
        return Err(MeasureError::IllConditioned);
    }
    Ok(1.0 + d_sa.norm_sqr() / (b_s * b_a))
}

/// Cauchy–Schwarz violation flag for chaotic marginals: `g² > 2`.
pub fn cs_violated(m: &TwoModeMoments) -> Result<bool, MeasureError> {
    Ok(g2(m)? > 2.0)
}

/// Noise-reduction factor `R = 1 + (B_S² + B_A² - 2|D|²)/(B_S + B_A)`.
pub fn nrf(m: &TwoModeMoments) -> Result<f64, MeasureError> {
    let total = m.b_s + m.b_a;
    if total < ILL_CONDITIONED_INTENSITY {
        return Err(MeasureError::IllConditioned);
    }
    Ok(1.0 + (m.b_s * m.b_s + m.b_a * m.b_a - 2.0 * m.d_sa.norm_sqr()) / total)
}

/// Two-mode principal squeezing variance `λ = 1 + B_S + B_A - 2|D|`.
pub fn squeezing_variance(m: &TwoModeMoments) -> f64 {
    1.0 + m.b_s + m.b_a - 2.0 * m.abs_d()
}

/// Lee nonclassicality depth
/// `τ = max{0, -(B_S+B_A)/2 + √((B_S-B_A)² + 4|D|²)/2}`.
pub fn nonclassicality_depth(m: &TwoModeMoments) -> f64 {
    let root = libm::sqrt((m.b_s - m.b_a) * (m.b_s - m.b_a) + 4.0 * m.d_sa.norm_sqr());
    (0.5 * (root - m.b_s - m.b_a)).max(0.0)
}

/// Gaussian steering parameters `(S_{S→A}, S_{A→S})`.
pub fn steering(m: &TwoModeMoments) -> (f64, f64) {
    let a = 1.0 + 2.0 * m.b_s;
    let b = 1.0 + 2.0 * m.b_a;
    let det = a * b - 4.0 * m.d_sa.norm_sqr();
    let s_to_a = libm::log(a / det).max(0.0);
    let a_to_s = libm::log(b / det).max(0.0);
    (s_to_a, a_to_s)
}

/// Expectation of the joint displaced parity operator.
///
/// Closed-form Gaussian Fourier transform of the symmetrically ordered
/// characteristic function (`B ← B + 1/2`); equals `(π²/4)W(β_S, β_A)` and
/// reduces to the purity at zero displacement.
pub fn parity_expectation(m: &TwoModeMoments, beta_s: C64, beta_a: C64) -> f64 {
    let bs = m.b_s + 0.5;
    let ba = m.b_a + 0.5;
    let k = bs * ba - m.d_sa.norm_sqr();
    let quad = ba * beta_s.norm_sqr() + bs * beta_a.norm_sqr()
        - 2.0 * (m.d_sa.conj() * beta_s * beta_a).re;
    libm::exp(-quad / k) / (4.0 * k)
}

/// Displacement pattern of the Bell test: `β_{S1} = -β_{A1} = i√𝒥`,
/// `β_{S2} = -β_{A2} = -q β_{S1}`, with only `(𝒥, q)` free. The imaginary
/// phases compensate the negative sign of the cross-correlation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellConfig {
    /// Squared displacement magnitude `𝒥 ≥ 0`.
    pub j: f64,
    /// Displacement ratio `q ≥ 0`.
    pub q: f64,
}

impl BellConfig {
    pub fn new(j: f64, q: f64) -> Self {
        Self { j, q }
    }

    pub fn beta_s1(&self) -> C64 {
        C64::new(0.0, libm::sqrt(self.j))
    }

    pub fn beta_a1(&self) -> C64 {
        -self.beta_s1()
    }

    pub fn beta_s2(&self) -> C64 {
        -self.beta_s1() * self.q
    }

    pub fn beta_a2(&self) -> C64 {
        self.beta_s1() * self.q
    }
}

/// Four-term CHSH combination of displaced-parity expectations.
pub fn bell_parameter(m: &TwoModeMoments, config: &BellConfig) -> f64 {
    let (s1, s2) = (config.beta_s1(), config.beta_s2());
    let (a1, a2) = (config.beta_a1(), config.beta_a2());
    parity_expectation(m, s1, a1) + parity_expectation(m, s2, a1)
        + parity_expectation(m, s1, a2)
        - parity_expectation(m, s2, a2)
}

/// Outcome of the Bell-parameter maximization over `(𝒥, q)`.
#[derive(Clone, Copy, Debug)]
pub struct BellOptimum {
    pub config: BellConfig,
    pub value: f64,
    /// False when the local refinement hit its iteration cap; the best point
    /// found is still reported.
    pub converged: bool,
}

const BELL_GRID: usize = 64;
const BELL_J_MAX: f64 = 0.05;
const BELL_Q_RANGE: (f64, f64) = (0.5, 6.0);

/// Deterministic maximization of the Bell parameter: a coarse grid over
/// `𝒥 ∈ [0, 0.05] × q ∈ [0.5, 6]` refined by Nelder–Mead.
pub fn bell_optimize(m: &TwoModeMoments) -> BellOptimum {
    bell_optimize_fn(|j, q| bell_parameter(m, &BellConfig::new(j, q)))
}

/// Same search applied to an arbitrary `(𝒥, q) → ℬ` function (used for the
/// balanced-point closed form).
pub fn bell_optimize_fn<F>(f: F) -> BellOptimum
where
    F: Fn(f64, f64) -> f64,
{
    let mut best = (f(0.0, BELL_Q_RANGE.0), 0.0, BELL_Q_RANGE.0);
    for i in 0..BELL_GRID {
        let j = BELL_J_MAX * i as f64 / (BELL_GRID - 1) as f64;
        for k in 0..BELL_GRID {
            let q = BELL_Q_RANGE.0
                + (BELL_Q_RANGE.1 - BELL_Q_RANGE.0) * k as f64 / (BELL_GRID - 1) as f64;
            let v = f(j, q);
            if v > best.0 {
                best = (v, j, q);
            }
        }
    }
    let Maximum2 { x, value, converged } = nelder_mead_max2(
        &f,
        [best.1, best.2],
        [BELL_J_MAX / (BELL_GRID as f64), 0.05],
        [0.0, 0.0],
        600,
    );
    if value >= best.0 {
        BellOptimum { config: BellConfig::new(x[0], x[1]), value, converged }
    } else {
        BellOptimum { config: BellConfig::new(best.1, best.2), value: best.0, converged: false }
    }
}

/// Aggregate of all measures for one state.
#[derive(Clone, Copy, Debug)]
pub struct MeasureReport {
    /// `None` when the intensities are too small (ill-conditioned).
    pub g2: Option<f64>,
    pub cs_violated: Option<bool>,
    /// `None` when the intensities are too small (ill-conditioned).
    pub nrf: Option<f64>,
    pub lambda_sq: f64,
    pub log_neg: f64,
    pub purity: f64,
    pub tau: f64,
    pub steer_s_to_a: f64,
    pub steer_a_to_s: f64,
    pub bell: Option<f64>,
}

/// Generic measure pipeline applied to moments. The Bell optimization is
/// optional since it dominates the cost of a scan point.
pub fn report_from_moments(m: &TwoModeMoments, with_bell: bool) -> MeasureReport {
    let g2v = g2(m).ok();
    let (s_to_a, a_to_s) = steering(m);
    MeasureReport {
        g2: g2v,
        cs_violated: g2v.map(|v| v > 2.0),
        nrf: nrf(m).ok(),
        lambda_sq: squeezing_variance(m),
        log_neg: log_negativity(m),
        purity: purity(m),
        tau: nonclassicality_depth(m),
        steer_s_to_a: s_to_a,
        steer_a_to_s: a_to_s,
        bell: with_bell.then(|| bell_optimize(m).value),
    }
}

/// Moments at the perfect-pairing pump amplitudes: `B_S = B_A = 4ε/(ε-1)²`,
/// `D = -2√ε(ε+1)/(ε-1)²`.
pub fn balanced_moments(epsilon: f64) -> Result<TwoModeMoments, MeasureError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(MeasureError::OscillatoryOnly { epsilon });
    }
    let denom = (epsilon - 1.0) * (epsilon - 1.0);
    let b = 4.0 * epsilon / denom;
    let d = -2.0 * libm::sqrt(epsilon) * (epsilon + 1.0) / denom;
    Ok(TwoModeMoments { b_s: b, b_a: b, d_sa: C64::new(d, 0.0), b_v: Some(0.0) })
}

/// Closed-form Bell parameter of the balanced-point state for a given
/// displacement pattern.
pub fn bell_balanced_closed(epsilon: f64, j: f64, q: f64) -> f64 {
    let lambda = balanced_squeezing(epsilon);
    let denom = (epsilon - 1.0) * (epsilon - 1.0);
    let cross = (q * q + 1.0) * (epsilon * epsilon + 6.0 * epsilon + 1.0)
        - 8.0 * q * libm::sqrt(epsilon) * (epsilon + 1.0);
    libm::exp(-4.0 * j / lambda) - libm::exp(-4.0 * q * q * j / lambda)
        + 2.0 * libm::exp(-2.0 * j * cross / denom)
}

fn balanced_squeezing(epsilon: f64) -> f64 {
    let s = libm::sqrt(epsilon);
    (s - 1.0) * (s - 1.0) / ((s + 1.0) * (s + 1.0))
}

/// Closed-form measures at the perfect-pairing pump amplitudes.
///
/// Each entry matches the generic pipeline applied to [`balanced_moments`].
pub fn balanced_point_report(epsilon: f64) -> Result<MeasureReport, MeasureError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(MeasureError::OscillatoryOnly { epsilon });
    }
    let g2v = (epsilon * epsilon + 6.0 * epsilon + 1.0) / (4.0 * epsilon);
    let lambda = balanced_squeezing(epsilon);
    let steering_val =
        libm::log((epsilon * epsilon + 6.0 * epsilon + 1.0) / ((epsilon - 1.0) * (epsilon - 1.0)))
            .max(0.0);
    let bell = bell_optimize_fn(|j, q| bell_balanced_closed(epsilon, j, q));
    Ok(MeasureReport {
        g2: Some(g2v),
        cs_violated: Some(g2v > 2.0),
        nrf: Some(0.0),
        lambda_sq: lambda,
        log_neg: (-libm::log(lambda)).max(0.0),
        purity: 1.0,
        tau: (0.5 * (1.0 - lambda)).max(0.0),
        steer_s_to_a: steering_val,
        steer_a_to_s: steering_val,
        bell: Some(bell.value),
    })
}

/// Reservoir occupation below which the asymptotic noise-reduction factor
/// stays nonclassical (`R < 1`).
pub fn asymptotic_nrf_window(epsilon: f64) -> f64 {
    (libm::sqrt(2.0 * epsilon) + 1.0) / (epsilon - 1.0)
}

/// Reservoir occupation below which the asymptotic principal squeezing stays
/// nonclassical (`λ < 1`).
pub fn asymptotic_squeezing_window(epsilon: f64) -> f64 {
    (2.0 * libm::sqrt(epsilon) + 1.0) / (epsilon - 1.0)
}

/// Reservoir occupation below which the asymptotic state is steerable in
/// both directions.
pub fn asymptotic_steering_window(epsilon: f64) -> f64 {
    1.0 / (epsilon - 1.0)
}

/// Closed-form measures of the strong-pump asymptotic state.
///
/// The logarithmic negativity and nonclassicality depth come from the
/// covariance invariants `s₁ = a² + b² + 2c²`, `s₂ = 4(1 + B_S + B_A)`,
/// `s₃ = (B_S - B_A)² + 4D²` with `2ξ₋² = s₁ - s₂√s₃`.
pub fn asymptotic_report(epsilon: f64, n_t: f64) -> Result<MeasureReport, MeasureError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(MeasureError::OscillatoryOnly { epsilon });
    }
    if !(n_t.is_finite() && n_t >= 0.0) {
        return Err(MeasureError::Unphysical);
    }
    let e = epsilon;
    let np = (e - 1.0) * n_t;
    let d4 = (e - 1.0) * (e - 1.0) * (e - 1.0) * (e - 1.0);
    let g2v = (e * e + 2.0 * e - 1.0 + 4.0 * e * np + 2.0 * np * np)
        / ((np + 1.0) * (np + 2.0 * e - 1.0));
    let r = (e + (e - 1.0) * np + np * np) / (3.0 * e - 1.0 + (e + 1.0) * np);
    let lambda = (e + np) / ((libm::sqrt(e) + 1.0) * (libm::sqrt(e) + 1.0));
    let mu = (e - 1.0) * (e - 1.0) / ((e + 1.0) * (e - 1.0 + 2.0 * np));
    let s1 = 2.0 * (e + 1.0)
        * ((e * e * e + 5.0 * e * e - 3.0 * e + 1.0)
            + 2.0 * (e * e + 4.0 * e - 1.0) * np
            + 2.0 * (e + 1.0) * np * np)
        / d4;
    let s2 = 4.0 * (e + 1.0) * (e + np) / ((e - 1.0) * (e - 1.0));
    let s3 = ((4.0 * e * e * e + e * e - 2.0 * e + 1.0)
        + 2.0 * (e + 1.0) * (3.0 * e - 1.0) * np
        + (e + 1.0) * (e + 1.0) * np * np)
        / d4;
    let xi_minus_sq = 0.5 * (s1 - s2 * libm::sqrt(s3));
    let log_neg = (-0.5 * libm::log(xi_minus_sq)).max(0.0);
    let tau = (0.5 * (1.0 - 0.25 * s2 + libm::sqrt(s3))).max(0.0);
    let denom_steer = (e + 1.0) * (e - 1.0 + 2.0 * np);
    let s_to_a = libm::log((e * e + 2.0 * e - 1.0 + 2.0 * np) / denom_steer).max(0.0);
    let a_to_s = libm::log((e * e + 1.0 + 2.0 * e * np) / denom_steer).max(0.0);
    let bell = bell_optimize(&moments_asymptotic(epsilon, n_t)?);
    Ok(MeasureReport {
        g2: Some(g2v),
        cs_violated: Some(g2v > 2.0),
        nrf: Some(r),
        lambda_sq: lambda,
        log_neg,
        purity: mu,
        tau,
        steer_s_to_a: s_to_a,
        steer_a_to_s: a_to_s,
        bell: Some(bell.value),
    })
}
