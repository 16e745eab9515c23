//! Invariant and property tests across randomly drawn parameters.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raman_core::math::{laguerre_all, laguerre_direct};
use raman_core::measures::{
    balanced_moments, balanced_point_report, bell_optimize, covariance, log_negativity,
    nonclassicality_depth, parity_expectation, ppt_symplectic_closed, purity, squeezing_variance,
    steering,
};
use raman_core::moments::{
    fit_epsilon_nv, moments_general, moments_lossless, moments_thermal, ratio_taylor_coefficients,
};
use raman_core::solution::solution_coefficients;
use raman_core::{C64, RamanParams, TwoModeMoments};

fn draw_params(rng: &mut ChaCha8Rng) -> RamanParams {
    RamanParams::new(
        rng.gen_range(0.05..8.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.0..1.5),
    )
    .unwrap()
}

#[test]
fn reduction_lattice_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let eps = rng.gen_range(0.05..8.0);
        let pump = rng.gen_range(0.0..3.0);
        let n_v = rng.gen_range(0.0..2.0);
        let z = rng.gen_range(0.0..1.0);
        let lossless = RamanParams::lossless(eps, pump).unwrap();
        let g = moments_general(&lossless, z).unwrap();
        let l = moments_lossless(&lossless, z).unwrap();
        assert!((g.b_s - l.b_s).abs() < 1e-10, "eps={eps} pump={pump} z={z}");
        assert!((g.b_a - l.b_a).abs() < 1e-10);
        assert!((g.d_sa - l.d_sa).norm() < 1e-10);
        assert!((g.b_v.unwrap() - l.b_v.unwrap()).abs() < 1e-10);
        if eps > 1.0 {
            let thermal = RamanParams::new(eps, pump, 0.0, n_v, 0.0).unwrap();
            let g = moments_general(&thermal, z).unwrap();
            let t = moments_thermal(&thermal, z).unwrap();
            assert!((g.b_s - t.b_s).abs() < 1e-10);
            assert!((g.b_a - t.b_a).abs() < 1e-10);
            assert!((g.d_sa - t.d_sa).norm() < 1e-10);
            assert!((g.b_v.unwrap() - t.b_v.unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn produced_states_are_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let m = moments_general(&p, z).unwrap();
        m.check_physical(1e-9).unwrap_or_else(|_| {
            panic!("unphysical moments at {p:?} z={z}: {m:?}");
        });
    }
}

#[test]
fn reservoir_sums_nonnegative_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let c = solution_coefficients(&p, z).unwrap();
        assert!(c.sum_f2l_sq >= -1e-10, "{p:?} z={z}: {}", c.sum_f2l_sq);
        assert!(c.sum_f3l_sq >= -1e-10, "{p:?} z={z}: {}", c.sum_f3l_sq);
        // Cauchy-Schwarz among the reservoir sums, |Σ f₂f₃|² ≤ Σ|f₂|² Σ|f₃|²
        let cs = c.sum_f2l_sq.max(0.0) * c.sum_f3l_sq.max(0.0) - c.sum_f2l_f3l.norm_sqr();
        assert!(cs >= -1e-10, "{p:?} z={z}: cs={cs}");
    }
}

#[test]
fn pairing_relation_on_lossless_manifold() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let eps = rng.gen_range(0.05..8.0);
        let pump = rng.gen_range(0.0..3.0);
        let z = rng.gen_range(0.0..1.0);
        let p = RamanParams::lossless(eps, pump).unwrap();
        let m = moments_lossless(&p, z).unwrap();
        let rel = m.d_sa.norm_sqr() - m.b_a * (1.0 + m.b_s);
        assert!(rel.abs() < 1e-10 * (1.0 + m.b_s) * (1.0 + m.b_a), "eps={eps} pump={pump}");
    }
}

#[test]
fn balanced_point_relation_and_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let eps = rng.gen_range(1.02..40.0);
        let m = balanced_moments(eps).unwrap();
        let b = m.b_s;
        assert!((m.d_sa.norm_sqr() - b * (b + 1.0)).abs() < 1e-10 * (1.0 + b * b));
        assert!(m.d_sa.re < 0.0 && m.d_sa.im == 0.0);
    }
}

#[test]
fn closed_forms_match_generic_pipeline_on_500_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..500 {
        let eps = rng.gen_range(1.01..30.0);
        let n_t = rng.gen_range(0.0..4.0);
        let rep = raman_core::measures::asymptotic_report(eps, n_t).unwrap();
        let m = raman_core::moments::moments_asymptotic(eps, n_t).unwrap();
        assert!((rep.g2.unwrap() - raman_core::measures::g2(&m).unwrap()).abs() < 1e-10);
        assert!((rep.nrf.unwrap() - raman_core::measures::nrf(&m).unwrap()).abs() < 1e-10);
        assert!((rep.lambda_sq - squeezing_variance(&m)).abs() < 1e-10);
        assert!((rep.purity - purity(&m)).abs() < 1e-10, "eps={eps} nt={n_t}");
        assert!((rep.log_neg - log_negativity(&m)).abs() < 1e-10, "eps={eps} nt={n_t}");
        assert!((rep.tau - nonclassicality_depth(&m)).abs() < 1e-10);
        let (sa, as_) = steering(&m);
        assert!((rep.steer_s_to_a - sa).abs() < 1e-10);
        assert!((rep.steer_a_to_s - as_).abs() < 1e-10);

        // near ε = 1 the moments grow as (ε-1)⁻² and the pure-state symplectic
        // eigenvalue is no longer resolvable to 1e-10 from f64 moments, so the
        // draws stay clear of that corner
        let eps_b = rng.gen_range(1.35..30.0);
        let rep = balanced_point_report(eps_b).unwrap();
        let m = balanced_moments(eps_b).unwrap();
        assert!((rep.g2.unwrap() - raman_core::measures::g2(&m).unwrap()).abs() < 1e-10);
        assert!((rep.nrf.unwrap() - raman_core::measures::nrf(&m).unwrap()).abs() < 1e-10);
        assert!((rep.lambda_sq - squeezing_variance(&m)).abs() < 1e-10);
        assert!((rep.log_neg - log_negativity(&m)).abs() < 1e-10, "eps={eps_b}");
        assert!((rep.tau - nonclassicality_depth(&m)).abs() < 1e-10);
        assert!((rep.purity - purity(&m)).abs() < 1e-10);
    }
}

#[test]
fn ppt_consistency_and_determinant_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let m = moments_general(&p, z).unwrap();
        let (xi_minus, xi_plus) = ppt_symplectic_closed(&m);
        let en = log_negativity(&m);
        assert_eq!(en > 0.0, xi_minus < 1.0);
        let det = covariance(&m).det();
        let prod = xi_minus * xi_minus * xi_plus * xi_plus;
        assert!(
            (prod - det).abs() <= 1e-10 * det.abs().max(1.0) * (1.0 + prod),
            "prod={prod} det={det}"
        );
    }
}

#[test]
fn parity_bounded_and_reduces_to_purity() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..300 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let m = moments_general(&p, z).unwrap();
        let pi0 = parity_expectation(&m, C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        assert!((pi0 - purity(&m)).abs() < 1e-12);
        for _ in 0..5 {
            let bs = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let ba = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let v = parity_expectation(&m, bs, ba);
            assert!(v.abs() <= 1.0 + 1e-12, "Pi={v}");
        }
    }
}

#[test]
fn bell_never_exceeds_tsirelson() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let cap = 2.0 * std::f64::consts::SQRT_2 + 1e-9;
    for _ in 0..60 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let m = moments_general(&p, z).unwrap();
        let opt = bell_optimize(&m);
        assert!(opt.value <= cap, "B={} at {p:?}", opt.value);
    }
    // and right at the strongest produced states
    for &eps in &[1.01, 1.1, 2.0, 4.0] {
        let opt = bell_optimize(&balanced_moments(eps).unwrap());
        assert!(opt.value <= cap, "balanced eps={eps}: {}", opt.value);
    }
}

#[test]
fn balanced_monotonicity_in_epsilon() {
    let mut prev_lambda = -1.0;
    let mut prev_en = f64::INFINITY;
    for k in 0..200 {
        let eps = 1.0001 + (100.0 - 1.0001) * k as f64 / 199.0;
        let rep = balanced_point_report(eps).unwrap();
        assert!(rep.lambda_sq > prev_lambda, "lambda not increasing at eps={eps}");
        assert!(rep.log_neg < prev_en, "E_N not decreasing at eps={eps}");
        prev_lambda = rep.lambda_sq;
        prev_en = rep.log_neg;
    }
}

#[test]
fn classicality_flags_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..500 {
        let p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let m = moments_general(&p, z).unwrap();
        if nonclassicality_depth(&m) == 0.0 {
            assert!(
                log_negativity(&m) <= 1e-10,
                "tau = 0 but E_N = {} at {p:?}",
                log_negativity(&m)
            );
        }
    }
}

#[test]
fn pnd_equivalences_on_validity_domains() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        // lossless manifold: general == nv0; balanced: both == ideal paired
        let eps = rng.gen_range(1.2..6.0);
        let pump = rng.gen_range(0.2..1.6);
        let p = RamanParams::lossless(eps, pump).unwrap();
        let m = moments_lossless(&p, 1.0).unwrap();
        if m.b_s > 2.5 {
            continue;
        }
        let n_max = 30;
        let a = raman_core::distributions::pnd_general(&m, n_max).unwrap();
        let b = raman_core::distributions::pnd_nv0(&m, n_max).unwrap();
        for ns in 0..=n_max {
            for na in 0..=n_max {
                assert!(
                    (a.prob(ns, na) - b.prob(ns, na)).abs() < 1e-10,
                    "eps={eps} pump={pump} ns={ns} na={na}"
                );
            }
        }
    }
    for _ in 0..50 {
        let eps = rng.gen_range(1.5..8.0);
        let m = balanced_moments(eps).unwrap();
        let n_max = 40;
        let a = raman_core::distributions::pnd_general(&m, n_max).unwrap();
        let c = raman_core::distributions::pnd_ideal_paired(m.b_s, n_max).unwrap();
        for ns in 0..=n_max {
            for na in 0..=n_max {
                assert!((a.prob(ns, na) - c.prob(ns, na)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn pnd_nrf_matches_moment_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let eps = rng.gen_range(1.5..6.0);
        let n_t = rng.gen_range(0.0..0.3);
        let m = raman_core::moments::moments_asymptotic(eps, n_t).unwrap();
        if m.b_s.max(m.b_a) > 1.2 {
            continue;
        }
        let pnd = raman_core::distributions::pnd_general(&m, 45).unwrap();
        let from_counts = pnd.nrf_from_counts();
        let from_moments = raman_core::measures::nrf(&m).unwrap();
        let tol = (pnd.tail_mass().abs() * 2000.0).max(1e-7);
        assert!(
            (from_counts - from_moments).abs() < tol,
            "eps={eps} nt={n_t}: {from_counts} vs {from_moments} (tol {tol})"
        );
    }
}

proptest! {
    #[test]
    fn laguerre_recurrence_matches_direct(n in 0usize..=20, x in -50.0f64..50.0) {
        let rec = laguerre_all(n, x);
        let direct = laguerre_direct(n, x);
        let scale = direct.abs().max(1.0);
        prop_assert!((rec[n] - direct).abs() <= 1e-9 * scale,
            "n={} x={} rec={} direct={}", n, x, rec[n], direct);
    }

    #[test]
    fn ratio_fit_roundtrip(eps in 0.2f64..8.0, n_v in 0.001f64..3.0) {
        let (ra, rb) = ratio_taylor_coefficients(eps, n_v);
        prop_assume!(rb != 0.0 && (ra - 1.0).abs() > 1e-9);
        let (eps_back, nv_back) = fit_epsilon_nv(ra, rb).unwrap();
        prop_assert!((eps_back - eps).abs() < 1e-12 * eps.max(1.0));
        prop_assert!((nv_back - n_v).abs() < 1e-12 * n_v.max(1.0));
    }

    #[test]
    fn lossless_moments_continuous_at_unit_ratio(pump in 0.05f64..2.0, z in 0.05f64..1.0) {
        let lo = moments_lossless(&RamanParams::lossless(1.0 - 1e-6, pump).unwrap(), z).unwrap();
        let hi = moments_lossless(&RamanParams::lossless(1.0 + 1e-6, pump).unwrap(), z).unwrap();
        let scale = hi.b_s.abs().max(1e-6);
        prop_assert!((lo.b_s - hi.b_s).abs() <= 1e-4 * scale);
        prop_assert!((lo.b_a - hi.b_a).abs() <= 1e-4 * hi.b_a.abs().max(1e-6));
        prop_assert!((lo.d_sa - hi.d_sa).norm() <= 1e-4 * hi.d_sa.norm().max(1e-6));
    }
}

#[test]
fn spdc_matches_balanced_raman_measures() {
    // equal mean photon number → all six measures coincide, D-sign aside
    for &eps in &[1.3, 2.0, 4.0, 9.0] {
        let raman = balanced_moments(eps).unwrap();
        let twin = raman_core::spdc::spdc_matched(raman.b_s).as_two_mode();
        assert!(
            (raman_core::measures::g2(&raman).unwrap() - raman_core::measures::g2(&twin).unwrap())
                .abs()
                < 1e-10
        );
        assert!((raman_core::measures::nrf(&raman).unwrap()
            - raman_core::measures::nrf(&twin).unwrap())
        .abs()
            < 1e-10);
        assert!((squeezing_variance(&raman) - squeezing_variance(&twin)).abs() < 1e-10);
        assert!((log_negativity(&raman) - log_negativity(&twin)).abs() < 1e-10);
        assert!((nonclassicality_depth(&raman) - nonclassicality_depth(&twin)).abs() < 1e-10);
        let (sa_r, as_r) = steering(&raman);
        let (sa_t, as_t) = steering(&twin);
        assert!((sa_r - sa_t).abs() < 1e-10 && (as_r - as_t).abs() < 1e-10);
        assert!(raman.d_sa.re < 0.0 && twin.d_sa.re > 0.0);
    }
}

#[test]
fn thermal_moments_stay_physical_with_correct_cross_coefficient() {
    // the (corrected) thermal cross-coefficient keeps every produced state
    // inside the Gaussian positivity domain
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..500 {
        let eps = rng.gen_range(1.01..8.0);
        let pump = rng.gen_range(0.0..3.0);
        let n_v = rng.gen_range(0.0..3.0);
        let p = RamanParams::new(eps, pump, 0.0, n_v, 0.0).unwrap();
        let m = moments_thermal(&p, 1.0).unwrap();
        m.check_physical(1e-9)
            .unwrap_or_else(|_| panic!("unphysical thermal state at eps={eps} pump={pump} nv={n_v}"));
    }
}

#[test]
fn general_handles_phase_rotation_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..200 {
        let mut p = draw_params(&mut rng);
        let z = rng.gen_range(0.0..1.0);
        let base = moments_general(&p, z).unwrap();
        let phi = rng.gen_range(-3.0..3.0);
        p = p.with_phase(phi);
        let rot = moments_general(&p, z).unwrap();
        assert!((base.b_s - rot.b_s).abs() < 1e-12);
        assert!((base.b_a - rot.b_a).abs() < 1e-12);
        assert!((base.d_sa.norm() - rot.d_sa.norm()).abs() < 1e-10);
        // covariance-based measures invariant under the pump phase
        assert!((log_negativity(&base) - log_negativity(&rot)).abs() < 1e-10);
        assert!((purity(&base) - purity(&rot)).abs() < 1e-10);
    }
}

#[test]
fn moments_match_eq38_taylor_at_small_pump() {
    // forward Taylor coefficients reproduce the ratio B_A/B_S for small pump
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let eps = rng.gen_range(1.2..6.0);
        let n_v = rng.gen_range(0.05..1.5);
        let (ra, rb) = ratio_taylor_coefficients(eps, n_v);
        let pump = 1e-3;
        let p = RamanParams::new(eps, pump, 0.0, n_v, 0.0).unwrap();
        let m = moments_thermal(&p, 1.0).unwrap();
        let ratio = m.b_a / m.b_s;
        let taylor = ra + rb * pump * pump;
        assert!(
            (ratio - taylor).abs() < 1e-9 + 1e-6 * pump.powi(4) / pump / pump,
            "eps={eps} nv={n_v}: {ratio} vs {taylor}"
        );
    }
}
