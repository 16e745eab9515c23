//! Sparse operators on the truncated three-mode Fock space and the
//! interaction generator.
//!
//! Basis ordering: `index = (n_S · dim_A + n_A) · dim_V + n_V`, the
//! vibrational index fastest.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::assoc_laguerre_all;
use crate::params::RamanParams;
use crate::C64;

/// Per-mode truncation dimensions `(dim_S, dim_A, dim_V)`.
pub type Dims = (usize, usize, usize);

pub fn hilbert_dim(dims: Dims) -> usize {
    dims.0 * dims.1 * dims.2
}

#[inline]
pub fn pack(dims: Dims, ns: usize, na: usize, nv: usize) -> usize {
    (ns * dims.1 + na) * dims.2 + nv
}

#[inline]
pub fn unpack(dims: Dims, idx: usize) -> (usize, usize, usize) {
    let nv = idx % dims.2;
    let rest = idx / dims.2;
    (rest / dims.1, rest % dims.1, nv)
}

/// Compressed sparse rows over complex entries.
#[derive(Clone, Debug)]
pub struct SparseOp {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    /// Builds from unsorted triplets; repeated `(row, col)` pairs simply
    /// contribute additively.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOp { dim, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }

    /// `Out = A · Rho` for a dense row-major square matrix.
    pub fn apply_left(&self, rho: &[C64], out: &mut [C64]) {
        let n = self.dim;
        for o in out.iter_mut() {
            *o = C64::new(0.0, 0.0);
        }
        for r in 0..n {
            let orow = &mut out[r * n..(r + 1) * n];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.vals[k];
                let src = &rho[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (o, s) in orow.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }

    /// Entry lookup (zero when absent).
    pub fn get(&self, r: usize, c: usize) -> C64 {
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            if self.cols[k] == c {
                return self.vals[k];
            }
        }
        C64::new(0.0, 0.0)
    }

    /// Largest deviation from Hermiticity, `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

/// Interaction generator in normalized units: the Stokes term creates a
/// phonon/Stokes-photon pair, the anti-Stokes term converts a phonon into
/// an anti-Stokes photon. The anti-Stokes coupling carries a phase flip of
/// `π` relative to the bare momentum operator so the cross-correlation comes
/// out negative at the default pump phase, matching the analytic solution.
pub fn build_generator(params: &RamanParams, dims: Dims) -> SparseOp {
    let n = hilbert_dim(dims);
    let gs = C64::from_polar(params.pump_amp, params.phi_l);
    let ga = -C64::from_polar(libm::sqrt(params.epsilon) * params.pump_amp, params.phi_l);
    let mut trip = Vec::with_capacity(4 * n);
    for idx in 0..n {
        let (ns, na, nv) = unpack(dims, idx);
        // g_S e^{iφ} a_V† a_S†  : |ns, na, nv⟩ → |ns+1, na, nv+1⟩
        if ns + 1 < dims.0 && nv + 1 < dims.2 {
            let amp = gs * libm::sqrt(((ns + 1) * (nv + 1)) as f64);
            trip.push((pack(dims, ns + 1, na, nv + 1), idx, amp));
            trip.push((idx, pack(dims, ns + 1, na, nv + 1), amp.conj()));
        }
        // -g_A e^{iφ} a_V a_A† : |ns, na, nv⟩ → |ns, na+1, nv-1⟩
        if na + 1 < dims.1 && nv >= 1 {
            let amp = ga * libm::sqrt(((na + 1) * nv) as f64);
            trip.push((pack(dims, ns, na + 1, nv - 1), idx, amp));
            trip.push((idx, pack(dims, ns, na + 1, nv - 1), amp.conj()));
        }
    }
    SparseOp::from_triplets(n, trip)
}

/// Dense truncated displacement operator `⟨m|D(β)|n⟩` for one mode
/// (row-major `dim × dim`), from the associated-Laguerre closed form.
pub fn displacement_matrix(dim: usize, beta: C64) -> Vec<C64> {
    let x = beta.norm_sqr();
    let gauss = libm::exp(-0.5 * x);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for d in 0..dim {
        let lag = assoc_laguerre_all(dim - 1 - d, d as f64, x);
        // factor(n, d) = sqrt(n!/(n+d)!) β^d, built incrementally
        let mut factor = C64::new(1.0, 0.0);
        for j in 1..=d {
            factor = factor * beta / libm::sqrt(j as f64);
        }
        for n in 0..dim - d {
            let m = n + d;
            // √(n!/m!) β^d  with m = n + d
            let val = factor * gauss * lag[n];
            out[m * dim + n] = val;
            // ⟨n|D|m⟩ = (-β*)^{d} √(n!/m!) e^{-x/2} L_n^{(d)}(x) for m = n + d
            let mirror = if d % 2 == 0 { 1.0 } else { -1.0 };
            out[n * dim + m] = factor.conj() * mirror * gauss * lag[n];
            // advance factor from n to n+1: multiply by √((n+1)/(n+1+d)) per
            // the √(n!/(n+d)!) ratio
            factor *= libm::sqrt((n + 1) as f64 / (n + 1 + d) as f64);
        }
    }
    out
}

/// Displaced parity operator `D(β) (-1)^{n} D†(β)` for one mode.
pub fn displaced_parity_matrix(dim: usize, beta: C64) -> Vec<C64> {
    let d = displacement_matrix(dim, beta);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += d[r * dim + k] * sign * d[c * dim + k].conj();
            }
            out[r * dim + c] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RamanParams;

    #[test]
    fn generator_is_hermitian_and_couples_single_excitation() {
        let p = RamanParams::new(4.0, 0.7, 0.0, 0.0, 0.0).unwrap();
        let dims = (4, 4, 4);
        let k = build_generator(&p, dims);
        assert!(k.hermiticity_defect() < 1e-14);
        // ⟨1_S 0_A 1_V| K |0 0 0⟩ ∝ g_S
        let elem = k.get(pack(dims, 1, 0, 1), pack(dims, 0, 0, 0));
        assert!((elem.norm() - 0.7).abs() < 1e-14);
        // pump off → zero generator
        let p0 = RamanParams::new(4.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let k0 = build_generator(&p0, dims);
        for r in 0..k0.dim {
            for c in 0..k0.dim {
                assert_eq!(k0.get(r, c), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn displacement_is_unitary_within_truncation() {
        let dim = 30;
        let beta = C64::new(0.11, -0.07);
        let d = displacement_matrix(dim, beta);
        // D† D ≈ I away from the truncation boundary; rows near the cut are
        // polluted by the missing |β|^{2(dim-r)}-scale couplings
        for r in 0..dim - 10 {
            for c in 0..dim - 10 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += d[k * dim + r].conj() * d[k * dim + c];
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!(
                    (acc - expect).norm() < 1e-9,
                    "r={r} c={c} acc={acc}"
                );
            }
        }
        // column 0 is the coherent state: ⟨n|D|0⟩ = e^{-|β|²/2} βⁿ/√(n!)
        let mut expect = C64::new(libm::exp(-0.5 * beta.norm_sqr()), 0.0);
        for n in 0..8 {
            assert!((d[n * dim] - expect).norm() < 1e-12, "n={n}");
            expect = expect * beta / libm::sqrt((n + 1) as f64);
        }
    }

    #[test]
    fn displaced_parity_reduces_to_parity_at_zero() {
        let dim = 10;
        let m = displaced_parity_matrix(dim, C64::new(0.0, 0.0));
        for r in 0..dim {
            for c in 0..dim {
                let expect = if r == c {
                    if r % 2 == 0 { 1.0 } else { -1.0 }
                } else {
                    0.0
                };
                assert!((m[r * dim + c] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_state_parity_expectation() {
        // ⟨α|D(β)(-1)ⁿD†(β)|α⟩ = exp(-2|α-β|²)
        let dim = 48;
        let alpha = C64::new(0.4, 0.2);
        let beta = C64::new(0.1, -0.3);
        let m = displaced_parity_matrix(dim, beta);
        let mut coh = vec![C64::new(0.0, 0.0); dim];
        let mut amp = C64::new(libm::exp(-0.5 * alpha.norm_sqr()), 0.0);
        for n in 0..dim {
            coh[n] = amp;
            amp = amp * alpha / libm::sqrt((n + 1) as f64);
        }
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                acc += coh[r].conj() * m[r * dim + c] * coh[c];
            }
        }
        let expect = libm::exp(-2.0 * (alpha - beta).norm_sqr());
        assert!((acc.re - expect).abs() < 1e-10 && acc.im.abs() < 1e-12);
    }
}
