//! Photon-number statistics and phase-space quasi-distributions: the joint
//! Stokes/anti-Stokes photon-number distribution in its ideal-paired,
//! lossless (`n_V = 0`) and fully general Gaussian forms, the `s`-ordered
//! quasi-distribution of integrated intensities, the multimode
//! noise-reduction factor, and the balanced-point statistical operator.

use core::fmt;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{gauss_legendre, laguerre_all};
use crate::moments::{moments_lossless, moments_thermal, ModelError, TwoModeMoments};
use crate::params::RamanParams;

/// Largest supported truncation of the generating-function recursion.
pub const MAX_PND_TRUNCATION: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistError {
    /// `pnd_nv0` requires the lossless pairing relation `|D|² = B_A(1+B_S)`
    /// and `B_S ≥ B_A`; use `pnd_general` otherwise.
    PairingViolated,
    /// Requested truncation beyond [`MAX_PND_TRUNCATION`].
    Truncation(usize),
    /// The quasi-distribution series does not settle at this ordering and
    /// truncation; decrease `s` or increase `n_max`.
    Instability { tail: f64, scale: f64 },
    /// Invalid scalar argument.
    Domain(&'static str),
    Model(ModelError),
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::PairingViolated => write!(
                f,
                "pairing relation |D|^2 = B_A(1+B_S) violated; use pnd_general"
            ),
            DistError::Truncation(n) => {
                write!(f, "truncation {n} exceeds the stable recursion limit {MAX_PND_TRUNCATION}")
            }
            DistError::Instability { tail, scale } => write!(
                f,
                "quasi-distribution series unstable (tail {tail:.3e} vs scale {scale:.3e}); \
                 decrease s or increase n_max"
            ),
            DistError::Domain(what) => write!(f, "invalid argument: {what}"),
            DistError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModelError> for DistError {
    fn from(e: ModelError) -> Self {
        DistError::Model(e)
    }
}

/// Joint photon-number probabilities on the grid `[0..n_max]²`.
#[derive(Clone, Debug)]
pub struct JointPND {
    probs: Vec<f64>,
    n_max: usize,
    tail_mass: f64,
}

impl JointPND {
    /// Wraps a row-major `(n_max+1)²` probability matrix.
    pub fn from_probs(probs: Vec<f64>, n_max: usize) -> Self {
        assert_eq!(probs.len(), (n_max + 1) * (n_max + 1));
        let sum: f64 = probs.iter().sum();
        Self { probs, n_max, tail_mass: 1.0 - sum }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Probability mass missing beyond the truncation grid.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn prob(&self, n_s: usize, n_a: usize) -> f64 {
        self.probs[n_s * (self.n_max + 1) + n_a]
    }

    /// Marginal mean Stokes and anti-Stokes photon numbers on the grid.
    pub fn marginal_means(&self) -> (f64, f64) {
        let mut ms = 0.0;
        let mut ma = 0.0;
        for ns in 0..=self.n_max {
            for na in 0..=self.n_max {
                let p = self.prob(ns, na);
                ms += ns as f64 * p;
                ma += na as f64 * p;
            }
        }
        (ms, ma)
    }

    /// Photon-number covariance `⟨Δn_S Δn_A⟩` on the grid.
    pub fn number_covariance(&self) -> f64 {
        let (ms, ma) = self.marginal_means();
        let mut c = 0.0;
        for ns in 0..=self.n_max {
            for na in 0..=self.n_max {
                c += (ns as f64 - ms) * (na as f64 - ma) * self.prob(ns, na);
            }
        }
        c
    }

    /// Noise-reduction factor evaluated directly from the grid moments.
    pub fn nrf_from_counts(&self) -> f64 {
        let (ms, ma) = self.marginal_means();
        let mut var = 0.0;
        for ns in 0..=self.n_max {
            for na in 0..=self.n_max {
                let d = ns as f64 - na as f64 - (ms - ma);
                var += d * d * self.prob(ns, na);
            }
        }
        var / (ms + ma)
    }
}

/// Truncation at which the geometric tail `(B/(1+B))^n` drops below 1e-10,
/// clamped to the stable recursion range.
pub fn default_n_max(b_max: f64) -> usize {
    if b_max <= 0.0 {
        return 8;
    }
    let x = b_max / (1.0 + b_max);
    let n = libm::ceil(libm::log(1e-10) / libm::log(x)) as usize;
    n.clamp(8, MAX_PND_TRUNCATION)
}

/// Ideal paired state: `p(n, n) = Bⁿ/(1+B)^{1+n}`, zero elsewhere.
pub fn pnd_ideal_paired(b: f64, n_max: usize) -> Result<JointPND, DistError> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(DistError::Domain("mean pair number must be >= 0"));
    }
    if n_max > MAX_PND_TRUNCATION {
        return Err(DistError::Truncation(n_max));
    }
    let mut probs = vec![0.0; (n_max + 1) * (n_max + 1)];
    let ratio = b / (1.0 + b);
    let mut p = 1.0 / (1.0 + b);
    for n in 0..=n_max {
        probs[n * (n_max + 1) + n] = p;
        p *= ratio;
    }
    Ok(JointPND::from_probs(probs, n_max))
}

/// Lossless `n_V = 0` distribution, nonzero only for `n_S ≥ n_A`:
/// `p(n_S, n_A) = C(n_S, n_A) B_A^{n_A} (B_S - B_A)^{n_S - n_A} / (1+B_S)^{1+n_S}`.
pub fn pnd_nv0(m: &TwoModeMoments, n_max: usize) -> Result<JointPND, DistError> {
    if n_max > MAX_PND_TRUNCATION {
        return Err(DistError::Truncation(n_max));
    }
    let d2 = m.d_sa.norm_sqr();
    let pairing = m.b_a * (1.0 + m.b_s);
    if (d2 - pairing).abs() > 1e-8 * (1.0 + pairing) || m.b_s < m.b_a - 1e-12 {
        return Err(DistError::PairingViolated);
    }
    let (bs, ba) = (m.b_s, m.b_a);
    let diff = (bs - ba).max(0.0);
    let mut probs = vec![0.0; (n_max + 1) * (n_max + 1)];
    for ns in 0..=n_max {
        // p(ns, 0) = diff^ns / (1+bs)^(1+ns), then binomial ladder in n_a
        let mut p = libm::pow(diff, ns as f64) / libm::pow(1.0 + bs, 1.0 + ns as f64);
        for na in 0..=ns {
            probs[ns * (n_max + 1) + na] = p;
            if na < ns && diff > 0.0 {
                // C(ns, na+1)/C(ns, na) = (ns-na)/(na+1)
                p *= (ns - na) as f64 * ba / ((na + 1) as f64 * diff);
            } else if na < ns {
                p = if na + 1 == ns {
                    libm::pow(ba, ns as f64) / libm::pow(1.0 + bs, 1.0 + ns as f64)
                } else {
                    0.0
                };
            }
        }
        if diff == 0.0 {
            // balanced case: only the diagonal survives
            for na in 0..ns {
                probs[ns * (n_max + 1) + na] = 0.0;
            }
            probs[ns * (n_max + 1) + ns] =
                libm::pow(ba, ns as f64) / libm::pow(1.0 + bs, 1.0 + ns as f64);
        }
    }
    Ok(JointPND::from_probs(probs, n_max))
}

/// Joint distribution of an arbitrary zero-displacement two-mode Gaussian
/// state via the photodetection generating function
/// `G(λ_S, λ_A) = [(1+λ_S B_S)(1+λ_A B_A) - λ_S λ_A |D|²]⁻¹`.
///
/// The Taylor coefficients of `G` around `λ = 1` obey an exact three-term
/// recursion in the coefficients of `1/G`, avoiding finite differences.
pub fn pnd_general(m: &TwoModeMoments, n_max: usize) -> Result<JointPND, DistError> {
    if n_max > MAX_PND_TRUNCATION {
        return Err(DistError::Truncation(n_max));
    }
    m.check_physical(1e-10)?;
    let (bs, ba) = (m.b_s, m.b_a);
    let d2 = m.d_sa.norm_sqr();
    let q1 = (1.0 + bs) * (1.0 + ba) - d2;
    let qu = bs * (1.0 + ba) - d2;
    let qv = ba * (1.0 + bs) - d2;
    let quv = bs * ba - d2;
    let w = n_max + 1;
    let mut s = vec![0.0; w * w];
    s[0] = 1.0 / q1;
    for ns in 0..=n_max {
        for na in 0..=n_max {
            if ns == 0 && na == 0 {
                continue;
            }
            let mut acc = 0.0;
            if ns >= 1 {
                acc += qu * s[(ns - 1) * w + na];
            }
            if na >= 1 {
                acc += qv * s[ns * w + na - 1];
            }
            if ns >= 1 && na >= 1 {
                acc += quv * s[(ns - 1) * w + na - 1];
            }
            s[ns * w + na] = -acc / q1;
        }
    }
    for ns in 0..=n_max {
        for na in 0..=n_max {
            if (ns + na) % 2 == 1 {
                s[ns * w + na] = -s[ns * w + na];
            }
        }
    }
    Ok(JointPND::from_probs(s, n_max))
}

/// Report on the negative regions of a sampled quasi-distribution.
#[derive(Clone, Copy, Debug)]
pub struct NegativeRegionReport {
    pub min_value: f64,
    /// Intensities `(W_S, W_A)` at the sampled minimum.
    pub argmin: (f64, f64),
    /// Fraction of grid points below `-1e-6`.
    pub area_fraction: f64,
}

/// Sampled `s`-ordered quasi-distribution of integrated intensities.
#[derive(Clone, Debug)]
pub struct QuasiDistribution {
    pub s: f64,
    pub ws_grid: Vec<f64>,
    pub wa_grid: Vec<f64>,
    /// Row-major over `(ws, wa)`.
    pub values: Vec<f64>,
    /// Number of photon-number layers actually summed.
    pub n_used: usize,
    /// Sup-norm of the last included layer: the truncation error scale.
    pub tail_estimate: f64,
    /// True when the series settled (tail negligible against the values).
    pub converged: bool,
}

impl QuasiDistribution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.wa_grid.len() + j]
    }

    /// Trapezoidal integral over the sampled domain.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.ws_grid.len() - 1 {
            for j in 0..self.wa_grid.len() - 1 {
                let cell = self.value(i, j)
                    + self.value(i + 1, j)
                    + self.value(i, j + 1)
                    + self.value(i + 1, j + 1);
                total += 0.25
                    * cell
                    * (self.ws_grid[i + 1] - self.ws_grid[i])
                    * (self.wa_grid[j + 1] - self.wa_grid[j]);
            }
        }
        total
    }

    pub fn negative_region(&self) -> NegativeRegionReport {
        let mut min_value = f64::INFINITY;
        let mut argmin = (0.0, 0.0);
        let mut below = 0usize;
        for i in 0..self.ws_grid.len() {
            for j in 0..self.wa_grid.len() {
                let v = self.value(i, j);
                if v < min_value {
                    min_value = v;
                    argmin = (self.ws_grid[i], self.wa_grid[j]);
                }
                if v < -1e-6 {
                    below += 1;
                }
            }
        }
        NegativeRegionReport {
            min_value,
            argmin,
            area_fraction: below as f64 / (self.ws_grid.len() * self.wa_grid.len()) as f64,
        }
    }
}

/// Uniform grid `[0, 5(1+B)]` with 101 points, the default sampling window.
pub fn default_intensity_grid(b: f64) -> Vec<f64> {
    let hi = 5.0 * (1.0 + b.max(0.0));
    (0..101).map(|i| hi * i as f64 / 100.0).collect()
}

/// Strict evaluation of the quasi-distribution: errors when the truncated
/// series has not settled at the distribution's `n_max`.
pub fn quasi_distribution(
    pnd: &JointPND,
    s: f64,
    ws_grid: &[f64],
    wa_grid: &[f64],
) -> Result<QuasiDistribution, DistError> {
    let q = quasi_distribution_truncated(pnd, s, ws_grid, wa_grid, pnd.n_max())?;
    if !q.converged {
        let scale = q.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        return Err(DistError::Instability { tail: q.tail_estimate, scale });
    }
    Ok(q)
}

/// Truncated-series evaluation at an explicit photon-number cutoff.
///
/// For orderings above the Gaussian regularity threshold the series is
/// asymptotic; the result is then the standard finite-truncation
/// regularization, with the tail scale reported instead of an error.
pub fn quasi_distribution_truncated(
    pnd: &JointPND,
    s: f64,
    ws_grid: &[f64],
    wa_grid: &[f64],
    n_max: usize,
) -> Result<QuasiDistribution, DistError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(DistError::Domain("ordering parameter must satisfy 0 < s < 1"));
    }
    if ws_grid.is_empty() || wa_grid.is_empty() {
        return Err(DistError::Domain("intensity grid must be nonempty"));
    }
    if ws_grid.iter().chain(wa_grid).any(|&w| !(w.is_finite() && w >= 0.0)) {
        return Err(DistError::Domain("intensities must be nonnegative"));
    }
    let n_max = n_max.min(pnd.n_max());
    let xi = (s + 1.0) / (s - 1.0);
    let scale_x = 4.0 / (1.0 - s * s);
    // Laguerre tables per grid axis
    let ls: Vec<Vec<f64>> = ws_grid.iter().map(|&w| laguerre_all(n_max, scale_x * w)).collect();
    let la: Vec<Vec<f64>> = wa_grid.iter().map(|&w| laguerre_all(n_max, scale_x * w)).collect();
    let pref: Vec<f64> = ws_grid
        .iter()
        .map(|&w| 4.0 / ((1.0 - s) * (1.0 - s)) * libm::exp(-2.0 * w / (1.0 - s)))
        .collect();
    let prefa: Vec<f64> = wa_grid.iter().map(|&w| libm::exp(-2.0 * w / (1.0 - s))).collect();

    let nw = ws_grid.len();
    let na_len = wa_grid.len();
    let mut values = vec![0.0; nw * na_len];
    let mut xi_pow = vec![1.0; 2 * n_max + 1];
    for k in 1..=2 * n_max {
        xi_pow[k] = xi_pow[k - 1] * xi;
    }
    // sum by total-degree layers, recording each layer's sup norm
    let mut layer_norms = Vec::with_capacity(2 * n_max + 1);
    for layer in 0..=2 * n_max {
        let mut sup = 0.0_f64;
        let lo = layer.saturating_sub(n_max);
        let hi = layer.min(n_max);
        let mut any = false;
        for ns in lo..=hi {
            let na = layer - ns;
            let p = pnd.prob(ns, na);
            if p == 0.0 {
                continue;
            }
            any = true;
            let coeff = p * xi_pow[layer];
            for (i, lsi) in ls.iter().enumerate() {
                let base = coeff * lsi[ns] * pref[i];
                for (j, laj) in la.iter().enumerate() {
                    let contrib = base * laj[na] * prefa[j];
                    values[i * na_len + j] += contrib;
                    sup = sup.max(contrib.abs());
                }
            }
        }
        layer_norms.push(if any { sup } else { -1.0 });
    }
    // only layers at the truncation horizon indicate an unfinished series;
    // a distribution whose support ends early terminates the sum exactly
    let horizon = (2 * n_max).saturating_sub(2);
    let tail_estimate = layer_norms
        .iter()
        .skip(horizon)
        .filter(|&&n| n >= 0.0)
        .fold(0.0_f64, |m, &n| m.max(n));
    let scale = values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let converged = tail_estimate <= 1e-6 * scale.max(1e-30);
    Ok(QuasiDistribution {
        s,
        ws_grid: ws_grid.to_vec(),
        wa_grid: wa_grid.to_vec(),
        values,
        n_used: n_max,
        tail_estimate,
        converged,
    })
}

/// Closed-form multimode noise-reduction factor for the ideal lossless case,
/// with a constant density of modes on `|α_Lⁿ| ∈ |α_{L,1}ⁿ|[1-δ/2, 1+δ/2]`.
pub fn multimode_nrf_closed(epsilon: f64, delta: f64) -> Result<f64, DistError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(DistError::Domain("epsilon must exceed 1"));
    }
    if !(delta > 0.0 && delta < 2.0) {
        return Err(DistError::Domain("delta must lie in (0, 2)"));
    }
    let pd = core::f64::consts::PI * delta;
    let num = 2.0 * pd * (4.0 * epsilon - 1.0) - 8.0 * epsilon * libm::sin(pd) + libm::sin(2.0 * pd);
    let den = 8.0
        * (pd * (7.0 * epsilon - 1.0)
            + 16.0 * epsilon * libm::sin(pd / 2.0)
            + (epsilon + 1.0) * libm::sin(pd));
    Ok(num / den)
}

/// Multimode noise-reduction factor by Gauss–Legendre quadrature of the
/// per-mode moments; valid for a thermally populated vibrational mode too.
pub fn multimode_nrf_numeric(
    params: &RamanParams,
    delta: f64,
    n_quad: usize,
) -> Result<f64, DistError> {
    params.validate().map_err(ModelError::from)?;
    if !(delta > 0.0 && delta < 2.0) {
        return Err(DistError::Domain("delta must lie in (0, 2)"));
    }
    if params.epsilon <= 1.0 {
        return Err(DistError::Domain("epsilon must exceed 1"));
    }
    if params.gamma_n != 0.0 || params.n_t != 0.0 {
        return Err(DistError::Domain("multimode NRF is defined for gamma_n = n_t = 0"));
    }
    let n_quad = n_quad.max(8);
    let alpha1 = core::f64::consts::PI / libm::sqrt(params.epsilon - 1.0);
    let (nodes, weights) = gauss_legendre(n_quad);
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &w) in nodes.iter().zip(&weights) {
        // x ∈ [-1, 1] → pump multiplier in [1-δ/2, 1+δ/2]
        let pump = alpha1 * (1.0 + 0.5 * delta * x);
        let p = RamanParams { pump_amp: pump, ..*params };
        let m = if params.n_v == 0.0 {
            moments_lossless(&p, 1.0)?
        } else {
            moments_thermal(&p, 1.0)?
        };
        let var = m.b_s + m.b_a + m.b_s * m.b_s + m.b_a * m.b_a - 2.0 * m.d_sa.norm_sqr();
        num += w * var;
        den += w * (m.b_s + m.b_a);
    }
    Ok(num / den)
}

/// Fock-basis elements of the balanced-point statistical operator.
#[derive(Clone, Debug)]
pub struct RhoElements {
    /// Mean photon-pair number `B` at the balanced point.
    pub b: f64,
    /// Nonzero elements `(m_S, m_A, n_S, n_A) → value`; the operator is
    /// diagonal in `m_S = m_A`, `n_S = n_A`.
    pub elements: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl RhoElements {
    pub fn element(&self, m_s: usize, m_a: usize, n_s: usize, n_a: usize) -> f64 {
        self.elements.get(&(m_s, m_a, n_s, n_a)).copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> f64 {
        self.elements
            .iter()
            .filter(|((ms, ma, ns, na), _)| ms == ns && ma == na)
            .map(|(_, v)| v)
            .sum()
    }
}

/// Statistical operator at the perfect-pairing pump amplitudes:
/// `⟨m m|ρ|n n⟩ = (-1)^{m+n} B^{(m+n)/2}/(1+B)^{(m+n)/2+1}`.
pub fn rho_balanced(epsilon: f64, n_max: usize) -> Result<RhoElements, DistError> {
    if !(epsilon.is_finite() && epsilon > 1.0) {
        return Err(DistError::Domain("epsilon must exceed 1"));
    }
    let b = 4.0 * epsilon / ((epsilon - 1.0) * (epsilon - 1.0));
    let mut elements = BTreeMap::new();
    // amplitude of |n, n⟩ is (-1)^n sqrt(B^n/(1+B)^{n+1})
    let amp = |n: usize| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * libm::sqrt(libm::pow(b / (1.0 + b), n as f64) / (1.0 + b))
    };
    for m in 0..=n_max {
        for n in 0..=n_max {
            let v = amp(m) * amp(n);
            if v != 0.0 {
                elements.insert((m, m, n, n), v);
            }
        }
    }
    Ok(RhoElements { b, elements })
}
