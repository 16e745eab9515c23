//! Numeric primitives shared across the crate: stable special-function
//! evaluations, Laguerre polynomials, Gauss–Legendre quadrature and a small
//! deterministic Nelder–Mead refiner.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// `sinh(z)/z`, series-stabilized near the origin.
pub fn sinhc(z: C64) -> C64 {
    if z.norm_sqr() < 1e-2 {
        let y = z * z;
        C64::new(1.0, 0.0)
            + y / 6.0
            + y * y / 120.0
            + y * y * y / 5040.0
            + y * y * y * y / 362_880.0
    } else {
        z.sinh() / z
    }
}

/// `(1 - cos z)/z²`, series-stabilized near the origin.
pub fn cosm1c(z: C64) -> C64 {
    if z.norm_sqr() < 1e-2 {
        let y = z * z;
        C64::new(0.5, 0.0) - y / 24.0 + y * y / 720.0 - y * y * y / 40_320.0
            + y * y * y * y / 3_628_800.0
    } else {
        (C64::new(1.0, 0.0) - z.cos()) / (z * z)
    }
}

/// `φ(z) = (e^z - 1)/z`.
pub fn expm1c(z: C64) -> C64 {
    if z.norm_sqr() < 0.0625 {
        // Σ z^n/(n+1)!
        let mut sum = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for n in 1..=18u32 {
            sum += term;
            term = term * z / ((n + 1) as f64);
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `n`-th derivative of `φ(z) = (e^z - 1)/z`.
///
/// Series for moderate `|z|`; for large `|z|` the recurrence
/// `φ⁽ⁿ⁾(z) = (e^z - n φ⁽ⁿ⁻¹⁾(z))/z` from `z φ(z) = e^z - 1`.
fn expm1c_deriv(n: u32, z: C64) -> C64 {
    if z.norm() <= 20.0 {
        // φ⁽ⁿ⁾(z) = Σ_i ((i+n)!/i!) z^i/(i+n+1)!
        let mut sum = C64::new(0.0, 0.0);
        // i = 0 coefficient: n!/(n+1)! = 1/(n+1)
        let mut coeff = 1.0 / ((n + 1) as f64);
        let mut zpow = C64::new(1.0, 0.0);
        for i in 0..120u32 {
            let term = zpow * coeff;
            sum += term;
            if term.norm_sqr() < 1e-64 * sum.norm_sqr().max(1e-300) {
                break;
            }
            // coeff_{i+1}/coeff_i = (i+1+n)/((i+1)(i+n+2))
            coeff *= (i + 1 + n) as f64 / (((i + 1) as f64) * ((i + n + 2) as f64));
            zpow *= z;
        }
        sum
    } else {
        let mut d = expm1c(z);
        let ez = z.exp();
        for k in 1..=n {
            d = (ez - d * (k as f64)) / z;
        }
        d
    }
}

/// Divided difference `φ[a, b] = (φ(a) - φ(b))/(a - b)` of `φ = (e^z - 1)/z`,
/// stable when `a` and `b` coincide.
pub fn expm1c_dd(a: C64, b: C64) -> C64 {
    let diff = a - b;
    if diff.norm() > 0.25 {
        (expm1c(a) - expm1c(b)) / diff
    } else {
        let c = (a + b) * 0.5;
        let d2 = diff * diff * 0.25;
        expm1c_deriv(1, c)
            + expm1c_deriv(3, c) * d2 / 6.0
            + expm1c_deriv(5, c) * d2 * d2 / 120.0
            + expm1c_deriv(7, c) * d2 * d2 * d2 / 5040.0
    }
}

/// Laguerre polynomials `L_0(x) … L_n(x)` by the upward recurrence
/// `(n+1) L_{n+1} = (2n+1-x) L_n - n L_{n-1}`.
pub fn laguerre_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    out[0] = 1.0;
    if n_max == 0 {
        return out;
    }
    out[1] = 1.0 - x;
    for n in 1..n_max {
        out[n + 1] = ((2 * n + 1) as f64 - x) * out[n] / ((n + 1) as f64)
            - (n as f64) * out[n - 1] / ((n + 1) as f64);
    }
    out
}

/// Unevaluated double-double value `hi + lo`.
#[derive(Clone, Copy)]
struct DD(f64, f64);

impl DD {
    fn from(x: f64) -> Self {
        DD(x, 0.0)
    }

    fn add(self, other: DD) -> DD {
        let (s, e) = two_sum(self.0, other.0);
        let lo = e + self.1 + other.1;
        let (hi, lo) = quick_two_sum(s, lo);
        DD(hi, lo)
    }

    fn mul_f64(self, b: f64) -> DD {
        let (p, e) = two_prod(self.0, b);
        let lo = e + self.1 * b;
        let (hi, lo) = quick_two_sum(p, lo);
        DD(hi, lo)
    }

    fn div_f64(self, b: f64) -> DD {
        let q0 = self.0 / b;
        // one refinement: r = self - q0*b computed exactly
        let (p, e) = two_prod(q0, b);
        let r = (self.0 - p) - e + self.1;
        let q1 = r / b;
        let (hi, lo) = quick_two_sum(q0, q1);
        DD(hi, lo)
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// `L_n(x)` evaluated from its explicit monomial coefficients.
///
/// Reference implementation for cross-checking the recurrence. The monomial
/// basis is ill-conditioned already for moderate `n·x` (intermediate terms
/// exceed the result by many orders), so coefficients and the Horner sweep
/// run in double-double arithmetic.
pub fn laguerre_direct(n: usize, x: f64) -> f64 {
    // c_{k+1} = -c_k (n-k)/((k+1)^2), c_0 = 1
    let mut coeffs = vec![DD::from(0.0); n + 1];
    coeffs[0] = DD::from(1.0);
    for k in 0..n {
        coeffs[k + 1] = coeffs[k]
            .mul_f64(-((n - k) as f64))
            .div_f64(((k + 1) * (k + 1)) as f64);
    }
    let mut acc = coeffs[n];
    for &c in coeffs[..n].iter().rev() {
        acc = acc.mul_f64(x).add(c);
    }
    acc.value()
}

/// Associated Laguerre polynomials `L_0^{(α)}(x) … L_n^{(α)}(x)`.
pub fn assoc_laguerre_all(n_max: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    out[0] = 1.0;
    if n_max == 0 {
        return out;
    }
    out[1] = 1.0 + alpha - x;
    for n in 1..n_max {
        let nf = n as f64;
        out[n + 1] =
            ((2.0 * nf + 1.0 + alpha - x) * out[n] - (nf + alpha) * out[n - 1]) / (nf + 1.0);
    }
    out
}

/// Nodes and weights of `n`-point Gauss–Legendre quadrature on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if libm::fabs(dx) < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` via the standard recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of a two-parameter Nelder–Mead maximization.
pub struct Maximum2 {
    pub x: [f64; 2],
    pub value: f64,
    pub converged: bool,
}

/// Deterministic Nelder–Mead maximization of `f` over two variables, with a
/// componentwise lower-bound clamp.
pub fn nelder_mead_max2<F>(f: F, start: [f64; 2], scale: [f64; 2], lower: [f64; 2], iters: usize) -> Maximum2
where
    F: Fn(f64, f64) -> f64,
{
    let clamp = |p: [f64; 2]| [p[0].max(lower[0]), p[1].max(lower[1])];
    let eval = |p: [f64; 2]| f(p[0], p[1]);
    let mut simplex = [
        clamp(start),
        clamp([start[0] + scale[0], start[1]]),
        clamp([start[0], start[1] + scale[1]]),
    ];
    let mut values = [eval(simplex[0]), eval(simplex[1]), eval(simplex[2])];
    let mut converged = false;
    for _ in 0..iters {
        // order descending (maximization: best first)
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(core::cmp::Ordering::Equal));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        values = [values[idx[0]], values[idx[1]], values[idx[2]]];
        let spread = values[0] - values[2];
        let size = (simplex[0][0] - simplex[2][0]).abs().max((simplex[0][1] - simplex[2][1]).abs())
            + (simplex[1][0] - simplex[2][0]).abs().max((simplex[1][1] - simplex[2][1]).abs());
        if spread.abs() < 1e-14 && size < 1e-12 {
            converged = true;
            break;
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let worst = simplex[2];
        let refl = clamp([2.0 * centroid[0] - worst[0], 2.0 * centroid[1] - worst[1]]);
        let fr = eval(refl);
        if fr > values[0] {
            let exp = clamp([3.0 * centroid[0] - 2.0 * worst[0], 3.0 * centroid[1] - 2.0 * worst[1]]);
            let fe = eval(exp);
            if fe > fr {
                simplex[2] = exp;
                values[2] = fe;
            } else {
                simplex[2] = refl;
                values[2] = fr;
            }
        } else if fr > values[1] {
            simplex[2] = refl;
            values[2] = fr;
        } else {
            let contr = clamp([
                0.5 * (centroid[0] + worst[0]),
                0.5 * (centroid[1] + worst[1]),
            ]);
            let fc = eval(contr);
            if fc > values[2] {
                simplex[2] = contr;
                values[2] = fc;
            } else {
                // shrink toward best
                for k in 1..3 {
                    simplex[k] = clamp([
                        0.5 * (simplex[0][0] + simplex[k][0]),
                        0.5 * (simplex[0][1] + simplex[k][1]),
                    ]);
                    values[k] = eval(simplex[k]);
                }
            }
        }
    }
    let mut best = 0;
    for k in 1..3 {
        if values[k] > values[best] {
            best = k;
        }
    }
    Maximum2 { x: simplex[best], value: values[best], converged }
}
