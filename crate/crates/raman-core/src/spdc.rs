//! Ideal twin-beam reference from spontaneous parametric down-conversion,
//! used as the comparison model for the Raman pairing curves.

use crate::moments::TwoModeMoments;
use crate::C64;

/// Signal/idler moments of an ideal twin beam: `B_s = B_i`, `D² = B(B+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdcMoments {
    /// Mean signal (= idler) photon number.
    pub b: f64,
    /// Cross coefficient, stored positive.
    pub d: f64,
}

impl SpdcMoments {
    /// View as generic two-mode moments for the measures pipeline.
    pub fn as_two_mode(&self) -> TwoModeMoments {
        TwoModeMoments::new(self.b, self.b, C64::new(self.d, 0.0))
    }
}

/// Twin-beam moments at interaction strength `g z`:
/// `B = sinh²(gz)`, `D = sinh(gz) cosh(gz)`.
pub fn spdc_moments(gz: f64) -> SpdcMoments {
    let s = libm::sinh(gz);
    let c = libm::cosh(gz);
    SpdcMoments { b: s * s, d: s * c }
}

/// Twin beam matched to a given mean signal/idler photon number.
pub fn spdc_matched(n_mean: f64) -> SpdcMoments {
    SpdcMoments { b: n_mean, d: libm::sqrt(n_mean * (n_mean + 1.0)) }
}
