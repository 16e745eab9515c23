//! Adaptive Dormand–Prince 5(4) integration of `dy/dz = f(y)` for complex
//! state vectors and vectorized density operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];

const ERR: [f64; 7] = [
    71.0 / 57_600.0,
    0.0,
    -71.0 / 16_695.0,
    71.0 / 1_920.0,
    -17_253.0 / 339_200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct IntegrateError {
    pub steps_taken: usize,
}

/// Integrates to `z_end`, overwriting `y`. `rhs(y, out)` must fill `out`
/// with the derivative. Errors when the accepted-step budget is exhausted.
pub fn integrate<F>(
    y: &mut Vec<C64>,
    mut rhs: F,
    z_end: f64,
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> Result<(), IntegrateError>
where
    F: FnMut(&[C64], &mut [C64]),
{
    if z_end == 0.0 {
        return Ok(());
    }
    let n = y.len();
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];

    rhs(y, &mut k[0]);
    // conservative initial step from the derivative scale
    let ynorm = max_abs(y).max(atol);
    let dnorm = max_abs(&k[0]).max(1e-30);
    let mut h = (0.01 * ynorm / dnorm).min(z_end * 0.1).max(z_end * 1e-8);
    let mut z = 0.0_f64;
    let mut steps = 0usize;

    while z < z_end {
        if steps >= max_steps {
            return Err(IntegrateError { steps_taken: steps });
        }
        if z + h > z_end {
            h = z_end - z;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s - 1][j];
                    if a != 0.0 {
                        acc += kj[i] * a;
                    }
                }
                stage[i] = y[i] + acc * h;
            }
            if s < 6 {
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                rhs(&stage, &mut tail[0]);
            } else {
                // stage 6 evaluates at the 5th-order solution point
                ynew.copy_from_slice(&stage);
                rhs(&ynew, &mut k[6]);
            }
        }
        // the B5 combination equals the last stage vector by construction
        debug_assert_eq!(B5[6], 0.0);
        // error estimate and PI step control
        let mut err = 0.0_f64;
        for i in 0..n {
            let mut e = C64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if ERR[j] != 0.0 {
                    e += kj[i] * ERR[j];
                }
            }
            let scale = atol + rtol * y[i].norm().max(ynew[i].norm());
            err = err.max((e * h).norm() / scale);
        }
        if err <= 1.0 {
            z += h;
            core::mem::swap(y, &mut ynew);
            k.swap(0, 6); // FSAL
            steps += 1;
        }
        let factor = if err.is_finite() {
            if err > 0.0 {
                (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            }
        } else {
            0.2
        };
        h *= factor;
    }
    Ok(())
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0_f64, |m, c| m.max(c.norm()))
}
