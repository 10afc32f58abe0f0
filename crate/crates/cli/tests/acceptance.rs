//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test -p odemimo-cli --test acceptance -- --nocapture`
//! to see them). Tolerances are pinned in the assertions.
//!
//! Statistical criteria use fixed seeds, so every run is deterministic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use odemimo::analytic::{
    equilibrium, grid_search, mse_asymptotic, mse_gap, mse_mmse, mse_ode,
    mse_ode_spectrum, mse_tode,
};
use odemimo::channel::{draw_noise, gen_iid_channel, ChannelInstance, SystemConfig, TransmitBlock};
use odemimo::euler::{
    euler_iterations_to_tolerance, euler_trajectory, monte_carlo_mse, EulerConfig,
};
use odemimo::modulation::{gen_symbols_with, Modulation};
use odemimo::regularizer::Regularizer;
use odemimo::rkcd::{
    chebyshev_t, make_rkcd_params, rkcd_detect, rkcd_iterations_to_tolerance, rkcd_times,
    InitialValue,
};

fn pass(n: u32, what: &str) {
    println!("[acceptance {n}] PASS - {what}");
}

/// Exact expectation of the Euler-discretized flow MSE with constant eta:
/// the continuous formula with e^{-(lambda+eta)t} replaced by the
/// discrete per-step factor (1 - delta (lambda+eta))^k.
fn discrete_euler_mse(lambda: &[f64], eta: f64, sigma2: f64, delta: f64, k: usize) -> f64 {
    lambda
        .iter()
        .map(|&l| {
            let a = l + eta;
            let p = (1.0 - delta * a).powi(k as i32);
            (l * (a - 1.0) * (a - 1.0) * (l + sigma2) * p * p
                - 2.0 * l * (a - 1.0) * (eta - sigma2) * p
                + (eta * eta + sigma2 * l))
                / (a * a)
        })
        .sum()
}

/// Same discrete-exact expectation for a time-dependent schedule: the
/// per-mode gain follows g_j = (1 - delta (lambda + etabar_j)) g_{j-1}
/// + delta from g_0 = 1, with the step-averaged etabar the integrator uses.
fn discrete_tode_mse(
    lambda: &[f64],
    reg: &Regularizer,
    sigma2: f64,
    delta: f64,
    k: usize,
) -> f64 {
    let mut mse = lambda.len() as f64;
    for &l in lambda {
        let mut g = 1.0;
        let mut xi_prev = 0.0;
        for j in 1..=k {
            let xi_j = reg.xi(j as f64 * delta);
            let etabar = (xi_j - xi_prev) / delta;
            xi_prev = xi_j;
            g = (1.0 - delta * (l + etabar)) * g + delta;
        }
        mse += l * (l + sigma2) * g * g - 2.0 * l * g;
    }
    mse
}

#[test]
fn criterion_01_scalar_closed_form() {
    // n = m = 1, H = 1, eta = sigma2 = 1: MSE(t) = 0.5 + 0.5 e^{-4t}.
    let ch = ChannelInstance::from_matrix(DMatrix::from_element(1, 1, Complex64::ONE)).unwrap();
    for t in [0.0f64, 0.1, 0.5, 2.0] {
        let expected = 0.5 + 0.5 * (-4.0 * t).exp();
        let via_channel = mse_ode(&ch, 1.0, 1.0, t).unwrap();
        let via_spectrum = mse_ode_spectrum(&[1.0], 1.0, 1.0, t);
        assert!((via_channel - expected).abs() < 1e-12, "t={t}: {via_channel}");
        assert!((via_spectrum - expected).abs() < 1e-12);
    }
    // MSE(0) is the matched-filter error, which equals sigma2 here.
    assert!((mse_ode(&ch, 1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
    pass(1, "scalar MSE(t) = 0.5 + 0.5 exp(-4t) to 1e-12, MSE(0) = sigma2");
}

#[test]
fn criterion_02_theory_vs_simulation() {
    // Fixed-seed 8x8 iid channel, sigma2 = 1, eta = 0.5, delta = 0.005,
    // 1000 trials, QPSK and 64QAM, stride 0.05 on [0, 3].
    //
    // Two checks per modulation. First, at standard-error resolution the
    // Monte Carlo mean must match the exact expectation of the
    // delta = 0.005 Euler dynamics (this is the sharp statistical test;
    // the continuous formula itself sits ~11 stderr away at early times
    // because explicit Euler carries an O(delta lambda^2) bias, ~9% at
    // t = 0.05 on this spectrum). Second, the empirical curve must stay
    // inside the 3-sample-standard-deviation error-bar band of the
    // continuous formula at every recorded time, which is the resolution
    // at which the theory and the emulation are claimed to coincide.
    let ch = gen_iid_channel(8, 8, 1.0, 2024).unwrap();
    let (eta, sigma2, delta) = (0.5, 1.0, 0.005);
    let reg = Regularizer::constant(eta).unwrap();
    let cfg = EulerConfig::new(delta, 3.0, 10).unwrap();
    let lambda: Vec<f64> = ch.lambda().iter().copied().collect();
    for (mc_seed, modulation) in [(11u64, Modulation::Qpsk), (12u64, Modulation::Qam64)] {
        let system = SystemConfig::new(8, 8, sigma2, modulation).unwrap();
        let mc = monte_carlo_mse(&ch, &reg, &system, &cfg, 1000, mc_seed).unwrap();
        assert_eq!(mc.times.len(), 61);
        for (i, &t) in mc.times.iter().enumerate() {
            let k = (t / delta).round() as usize;
            let discrete = discrete_euler_mse(&lambda, eta, sigma2, delta, k);
            let zd = (mc.mean[i] - discrete).abs() / mc.std_error(i);
            assert!(
                zd < 3.5,
                "{modulation} t={t}: z={zd:.2} against the discrete-exact expectation \
                 ({} vs {discrete})",
                mc.mean[i]
            );

            let theory = mse_ode(&ch, eta, sigma2, t).unwrap();
            let band = 3.0 * mc.std_dev[i];
            assert!(
                (mc.mean[i] - theory).abs() < band,
                "{modulation} t={t}: empirical {} outside theory {theory} +/- {band}",
                mc.mean[i]
            );
        }
    }
    pass(
        2,
        "emulation matches the discrete-exact expectation at z<3.5 and the \
         continuous formula within the 3-sigma error-bar band (QPSK and 64QAM)",
    );
}

#[test]
fn criterion_03_optimality_gap_identity() {
    // On 20 random instances the asymptotic-minus-MMSE difference matches
    // the closed-form gap to 1e-10, and vanishes iff eta = sigma2.
    for seed in 0..20u64 {
        let ch = gen_iid_channel(8, 8, 1.0, 3000 + seed).unwrap();
        let sigma2 = 0.5 + (seed as f64) * 0.05;
        for eta in [0.25, sigma2, 2.0 * sigma2 + 0.3] {
            let direct = mse_asymptotic(&ch, eta, sigma2) - mse_mmse(&ch, sigma2);
            let formula = mse_gap(&ch, eta, sigma2);
            assert!(
                (direct - formula).abs() < 1e-10,
                "seed {seed} eta {eta}: {direct} vs {formula}"
            );
            if eta == sigma2 {
                assert!(formula.abs() < 1e-12);
            } else {
                assert!(formula > 1e-12, "gap must be strictly positive off the match");
            }
        }
    }
    pass(3, "asymptotic-MMSE gap matches the closed form to 1e-10; zero iff eta = sigma2");
}

#[test]
fn criterion_04_time_dependent_theory() {
    // Constant-schedule reduction on a 5x4 (t, eta) grid to 1e-6.
    let ch = gen_iid_channel(8, 8, 1.0, 4100).unwrap();
    let sigma2 = 1.0;
    for &eta in &[0.3, 0.5, 1.0, 4.0] {
        let reg = Regularizer::constant(eta).unwrap();
        for &t in &[0.0, 0.3, 0.8, 1.5, 3.0] {
            let tode = mse_tode(&ch, &reg, sigma2, t, 1e-8).unwrap();
            let ode = mse_ode(&ch, eta, sigma2, t).unwrap();
            assert!((tode - ode).abs() < 1e-6, "eta={eta} t={t}: {tode} vs {ode}");
        }
    }

    // Inverse-decay schedule with alpha = 500: the emulation is checked
    // at standard-error resolution against the discrete-exact expectation
    // of the stepped dynamics, and at error-bar resolution against the
    // quadrature formula (the O(delta) integrator bias again dominates
    // the Monte Carlo noise at 1000 trials).
    let delta = 0.005;
    let reg = Regularizer::inverse_decay(500.0, sigma2).unwrap();
    let system = SystemConfig::new(8, 8, sigma2, Modulation::Qpsk).unwrap();
    let cfg = EulerConfig::new(delta, 3.0, 10).unwrap();
    let mc = monte_carlo_mse(&ch, &reg, &system, &cfg, 1000, 13).unwrap();
    let lambda: Vec<f64> = ch.lambda().iter().copied().collect();
    let theory: Vec<f64> = mc
        .times
        .par_iter()
        .map(|&t| mse_tode(&ch, &reg, sigma2, t, 1e-8).unwrap())
        .collect();
    for (i, &t) in mc.times.iter().enumerate() {
        let k = (t / delta).round() as usize;
        let discrete = discrete_tode_mse(&lambda, &reg, sigma2, delta, k);
        let zd = (mc.mean[i] - discrete).abs() / mc.std_error(i);
        assert!(
            zd < 3.5,
            "t={t}: z={zd:.2} against the discrete-exact expectation \
             ({} vs {discrete})",
            mc.mean[i]
        );
        let band = 3.0 * mc.std_dev[i];
        assert!(
            (mc.mean[i] - theory[i]).abs() < band,
            "t={t}: empirical {} outside theory {} +/- {band}",
            mc.mean[i],
            theory[i]
        );
    }
    pass(
        4,
        "constant reduction to 1e-6 on the (t, eta) grid; inverse-decay emulation \
         exact at z<3.5 and inside the formula's 3-sigma error-bar band",
    );
}

#[test]
fn criterion_05_grid_search_self_consistency() {
    // T = 0.8, sigma2 = 1, alpha in {1, 10, 50, 100} on a fixed-seed 8x8
    // instance. The argmin must agree with an independently integrated F
    // vector, and an interior candidate beats both extremes.
    let ch = gen_iid_channel(8, 8, 1.0, 5001).unwrap();
    let sigma2 = 1.0;
    let horizon = 0.8;
    let alphas = [1.0, 10.0, 50.0, 100.0];
    let candidates: Vec<Regularizer> = alphas
        .iter()
        .map(|&a| Regularizer::inverse_decay(a, sigma2).unwrap())
        .collect();
    let outcome = grid_search(&ch, &candidates, sigma2, horizon, 1e-8).unwrap();

    // Independent recomputation of the functional's defining quadrature
    // (401-point composite Simpson), written out by hand here.
    let recomputed: Vec<f64> = candidates
        .iter()
        .map(|reg| {
            let points = 401;
            let h = horizon / (points - 1) as f64;
            let mut sum = 0.0;
            for i in 0..points {
                let weight = if i == 0 || i == points - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                sum += weight * mse_tode(&ch, reg, sigma2, h * i as f64, 1e-8).unwrap();
            }
            sum * h / 3.0
        })
        .collect();
    let argmin = recomputed
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(outcome.best_index, argmin, "recomputed F vector: {recomputed:?}");

    for (i, v) in outcome.values.iter().enumerate() {
        let f = v.as_ref().unwrap();
        assert!(f.is_finite());
        assert!(
            (f - recomputed[i]).abs() < 1e-10 * recomputed[i].abs().max(1.0),
            "alpha={}: {f} vs recomputed {}",
            alphas[i],
            recomputed[i]
        );
    }

    // The candidates must also rank identically under an adaptive outer
    // quadrature, confirming the ordering is not a grid artifact.
    let adaptive: Vec<f64> = candidates
        .iter()
        .map(|reg| {
            odemimo::quad::adaptive_simpson(
                |t| mse_tode(&ch, reg, sigma2, t, 1e-9).unwrap(),
                0.0,
                horizon,
                1e-6,
            )
            .unwrap()
        })
        .collect();
    let adaptive_argmin = adaptive
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(outcome.best_index, adaptive_argmin, "adaptive F vector: {adaptive:?}");

    // Interior optimum on this instance.
    let f = |i: usize| *outcome.values[i].as_ref().unwrap();
    assert!(
        outcome.best_index == 1 || outcome.best_index == 2,
        "expected an interior argmin, got alpha={} (F = {:?})",
        alphas[outcome.best_index],
        outcome.values
    );
    assert!(f(outcome.best_index) < f(0) && f(outcome.best_index) < f(3));
    pass(5, "grid-search argmin matches an independent quadrature; interior alpha wins");
}

#[test]
fn criterion_06_stabilized_descent_beats_euler() {
    // (n, m, sigma2, eta) = (60, 80, 0.1, 0.1), damping 2.3, exact
    // eigen-bounds: the stabilized iteration reaches a 1e-6 relative
    // distance to the equilibrium within budget and in strictly fewer
    // iterations than Euler at delta = 0.001, on every one of 200 draws.
    let (n, m, sigma2, eta) = (60usize, 80usize, 0.1, 0.1);
    let draws = 200u64;
    let tol = 1e-6;

    let results: Vec<(usize, usize)> = (0..draws)
        .into_par_iter()
        .map(|draw| {
            let ch = gen_iid_channel(n, m, 1.0, 60_000 + draw).unwrap();
            let mut sym_rng = ChaCha8Rng::seed_from_u64(61_000 + draw);
            let mut noise_rng = ChaCha8Rng::seed_from_u64(62_000 + draw);
            let s = gen_symbols_with(Modulation::Qam16, n, &mut sym_rng);
            let w = draw_noise(m, sigma2, &mut noise_rng);
            let block = TransmitBlock::new(&ch, s, w).unwrap();
            let x_star = equilibrium(&ch, &block.y, eta);

            let params = make_rkcd_params(ch.lambda_min(), ch.lambda_max(), 2.3, eta).unwrap();
            let fast =
                rkcd_iterations_to_tolerance(&ch, &block.y, eta, &params, &x_star, tol, 20_000)
                    .unwrap()
                    .expect("stabilized iteration must converge within budget");
            let slow = euler_iterations_to_tolerance(
                &ch, &block.y, eta, 0.001, &x_star, tol, 200_000,
            )
            .unwrap()
            .expect("Euler must converge within budget");
            (fast, slow)
        })
        .collect();

    for (draw, (fast, slow)) in results.iter().enumerate() {
        assert!(fast < slow, "draw {draw}: stabilized {fast} !< euler {slow}");
    }
    let avg_fast = results.iter().map(|r| r.0).sum::<usize>() as f64 / draws as f64;
    let avg_slow = results.iter().map(|r| r.1).sum::<usize>() as f64 / draws as f64;
    pass(
        6,
        &format!(
            "stabilized descent converged on all {draws} draws \
             (mean {avg_fast:.0} vs Euler {avg_slow:.0} iterations)"
        ),
    );
}

/// Per-mode error polynomial of the stabilized iteration (scalar mirror of
/// the vector recurrence), used as the discrete-exact oracle.
fn stage_polynomial(params: &odemimo::rkcd::RkcdParams, a: f64, k_max: usize) -> Vec<f64> {
    let mut values = vec![1.0];
    let (mut prev2, mut prev) = (1.0, 1.0);
    for k in 1..=k_max {
        let j = (k - 1) % params.s + 1;
        let next = if j == 1 {
            (1.0 - params.h * params.omega1 / params.omega0 * a) * prev
        } else {
            let mu = 2.0 * params.omega1 * chebyshev_t(j - 1, params.omega0)
                / chebyshev_t(j, params.omega0);
            let nu = 2.0 * params.omega0 * chebyshev_t(j - 1, params.omega0)
                / chebyshev_t(j, params.omega0);
            (nu - params.h * mu * a) * prev - (nu - 1.0) * prev2
        };
        values.push(next);
        prev2 = std::mem::replace(&mut prev, next);
    }
    values
}

/// The rejected literal reading of the time recursion, in which the
/// "otherwise" branch adds the sweep base on top of absolute predecessor
/// times (so bases get double-counted and the times blow up).
fn double_counted_times(params: &odemimo::rkcd::RkcdParams, k_max: usize) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut base = 0.0;
    for k in 1..=k_max {
        let j = (k - 1) % params.s + 1;
        let t = if j == 1 {
            base + params.h * params.omega1 / params.omega0
        } else {
            let mu = 2.0 * params.omega1 * chebyshev_t(j - 1, params.omega0)
                / chebyshev_t(j, params.omega0);
            let nu = 2.0 * params.omega0 * chebyshev_t(j - 1, params.omega0)
                / chebyshev_t(j, params.omega0);
            base + nu * times[k - 1] + (1.0 - nu) * times[k - 2] + params.h * mu
        };
        times.push(t);
        if k % params.s == 0 {
            base += t;
        }
    }
    times
}

#[test]
fn criterion_07_mse_at_mapped_times() {
    // (n, m, sigma2, eta) = (20, 50, 1, 1), QPSK, h = 0.03185, 100 trials,
    // matched-filter start. Verifiable parts first: the Monte Carlo mean
    // matches the discrete-exact per-mode-polynomial expectation at
    // standard-error resolution, each sweep advances the mapped time by
    // exactly h, and the implemented time reading beats the rejected
    // double-counted literal reading by orders of magnitude (the
    // disambiguation this criterion exists for). The final stated band --
    // arithmetic MSE within 3 standard errors of MSE(T_k) for all k -- is
    // then asserted as written; see the failure message for why no
    // configuration can attain it.
    let (n, m, sigma2, eta) = (20usize, 50usize, 1.0, 1.0);
    let ch = gen_iid_channel(n, m, 1.0, 7007).unwrap();
    let params = make_rkcd_params(ch.lambda_min(), ch.lambda_max(), 2.0, eta)
        .unwrap()
        .with_step(0.03185)
        .unwrap();
    let iterations = 10 * params.s;
    let times = rkcd_times(&params, iterations);
    let trials = 100u64;

    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut sym_rng = ChaCha8Rng::seed_from_u64(90_000);
            sym_rng.set_stream(2 * trial);
            let mut noise_rng = ChaCha8Rng::seed_from_u64(90_000);
            noise_rng.set_stream(2 * trial + 1);
            let s = gen_symbols_with(Modulation::Qpsk, n, &mut sym_rng);
            let w = draw_noise(m, sigma2, &mut noise_rng);
            let block = TransmitBlock::new(&ch, s, w).unwrap();
            let run = rkcd_detect(
                &ch,
                &block.y,
                eta,
                &params,
                iterations,
                InitialValue::MatchedFilter,
                Modulation::Qpsk,
            )
            .unwrap();
            run.estimates
                .iter()
                .map(|x| (x - &block.s).norm_squared())
                .collect::<Vec<f64>>()
        })
        .collect();

    let mut mean = vec![0.0; iterations + 1];
    let mut stderr = vec![0.0; iterations + 1];
    for k in 0..=iterations {
        let mu = per_trial.iter().map(|c| c[k]).sum::<f64>() / trials as f64;
        let var = per_trial.iter().map(|c| (c[k] - mu) * (c[k] - mu)).sum::<f64>()
            / (trials - 1) as f64;
        mean[k] = mu;
        stderr[k] = (var / trials as f64).sqrt();
    }

    // Discrete-exact oracle at standard-error resolution.
    let lambda: Vec<f64> = ch.lambda().iter().copied().collect();
    let polys: Vec<Vec<f64>> = lambda
        .iter()
        .map(|&l| stage_polynomial(&params, l + eta, iterations))
        .collect();
    for k in 0..=iterations {
        let predicted: f64 = lambda
            .iter()
            .zip(polys.iter())
            .map(|(&l, poly)| {
                let a = l + eta;
                let p = poly[k];
                (l * (a - 1.0) * (a - 1.0) * (l + sigma2) * p * p
                    - 2.0 * l * (a - 1.0) * (eta - sigma2) * p
                    + (eta * eta + sigma2 * l))
                    / (a * a)
            })
            .sum();
        let z = (mean[k] - predicted).abs() / stderr[k];
        assert!(z < 3.0, "k={k}: z={z:.2} against the discrete-exact oracle");
    }

    // Each completed sweep advances the mapped time by exactly h.
    for sweep in 1..=iterations / params.s {
        let t = times[sweep * params.s];
        assert!(
            (t - sweep as f64 * params.h).abs() < 1e-10 * t,
            "sweep {sweep}: T = {t}"
        );
    }

    // Disambiguation: worst log10 deviation of the empirical mean from
    // MSE(T_k) under each reading of the recursion.
    let log_dev = |ts: &[f64]| -> f64 {
        (1..=iterations)
            .map(|k| {
                let theory = mse_ode(&ch, eta, sigma2, ts[k]).unwrap();
                (mean[k] / theory).log10().abs()
            })
            .fold(0.0, f64::max)
    };
    let implemented_dev = log_dev(&times);
    let rejected_dev = log_dev(&double_counted_times(&params, iterations));
    assert!(
        implemented_dev < 1.0,
        "implemented reading must overlay within one decade, got \
         10^{implemented_dev:.2}"
    );
    assert!(
        rejected_dev > 1.5 && rejected_dev > 2.0 * implemented_dev,
        "rejected reading should be visibly broken: 10^{rejected_dev:.2} vs \
         10^{implemented_dev:.2}"
    );

    // The stated band, as written.
    let mut worst = (0usize, 0.0f64);
    for k in 0..=iterations {
        let theory = mse_ode(&ch, eta, sigma2, times[k]).unwrap();
        let z = (mean[k] - theory).abs() / stderr[k];
        if z > worst.1 {
            worst = (k, z);
        }
    }
    if worst.1 >= 3.0 {
        println!(
            "[acceptance 7] FAIL - stated 3-stderr band: max z = {:.1} at k = {}",
            worst.1, worst.0
        );
        panic!(
            "the 3-standard-error overlay of MSE(T_k) cannot hold at h = 0.03185: \
             the iterates' error is a per-stage Chebyshev polynomial in the Hessian \
             eigenvalues, and at h*(lambda_max+eta) ~ 3.5 it deviates from \
             exp(-(lambda+eta)T_k) on stiff modes by far more than the Monte Carlo \
             noise floor of 100 trials (max z = {:.1} at k = {}; the same gap \
             persists for every damping/stage-count choice and both readings of \
             the time recursion, while the discrete-exact oracle above matches at \
             z < 3). The overlay holds at plot resolution: max log10 deviation \
             {implemented_dev:.2} decades across the budget.",
            worst.1, worst.0
        );
    }
    pass(7, "iterate MSE overlays MSE(T_k) within 3 stderr across the budget");
}

#[test]
fn criterion_08_chebyshev_identity() {
    for s in 1..=20usize {
        for i in 0..50 {
            let theta = std::f64::consts::PI * i as f64 / 49.0;
            let d = (chebyshev_t(s, theta.cos()) - (s as f64 * theta).cos()).abs();
            assert!(d < 1e-10, "s={s} theta={theta}: {d}");
        }
    }
    pass(8, "|T_s(cos t) - cos(st)| < 1e-10 for s in 1..=20, 50 angles");
}

#[test]
fn criterion_09_gradient_check() {
    // Central finite differences of the objective match the analytic
    // gradient shared by both solvers; the stacked-real gradient is twice
    // the complex-form coefficient.
    for seed in [900u64, 901] {
        let ch = gen_iid_channel(6, 9, 1.0, seed).unwrap();
        let eta = 0.4;
        let y = {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 10);
            draw_noise(9, 2.0, &mut rng)
        };
        let matched = ch.matched_filter(&y);
        let f = |x: &DVector<Complex64>| -> f64 {
            (&y - ch.matrix() * x).norm_squared() + eta * x.norm_squared()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 20);
        let step = 1e-5;
        for point in 0..10 {
            let x = draw_noise(6, 1.0, &mut rng);
            let grad = ch.flow_gradient(&x, eta, &matched);
            for i in 0..6 {
                for part in 0..2 {
                    let bump = if part == 0 {
                        Complex64::new(step, 0.0)
                    } else {
                        Complex64::new(0.0, step)
                    };
                    let mut plus = x.clone();
                    plus[i] += bump;
                    let mut minus = x.clone();
                    minus[i] -= bump;
                    let fd = (f(&plus) - f(&minus)) / (2.0 * step);
                    let analytic = 2.0 * if part == 0 { grad[i].re } else { grad[i].im };
                    let rel = (fd - analytic).abs() / analytic.abs().max(1e-9);
                    assert!(rel < 1e-6, "seed {seed} point {point} coord {i}/{part}: {rel}");
                }
            }
        }
    }
    pass(9, "finite differences match the solver gradient to 1e-6 relative");
}

#[test]
fn criterion_10_euler_first_order() {
    // Halving delta from 1e-3 to 5e-4 shrinks the max deviation from the
    // closed form by a first-order factor.
    let ch = gen_iid_channel(8, 8, 1.0, 1010).unwrap();
    let eta = 0.5;
    let y = {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        draw_noise(8, 1.0, &mut rng)
    };
    let reg = Regularizer::constant(eta).unwrap();
    let max_dev = |delta: f64, stride: usize| -> f64 {
        let cfg = EulerConfig::new(delta, 1.0, stride).unwrap();
        let traj = euler_trajectory(&ch, &y, &reg, &cfg).unwrap();
        traj.times
            .iter()
            .zip(traj.states.iter())
            .map(|(t, x)| {
                (x - odemimo::analytic::closed_form_estimate(&ch, &y, eta, *t).unwrap()).norm()
            })
            .fold(0.0, f64::max)
    };
    let ratio = max_dev(1e-3, 100) / max_dev(5e-4, 200);
    assert!((1.5..=2.5).contains(&ratio), "convergence ratio {ratio}");
    pass(10, &format!("halving delta shrank the deviation by {ratio:.2} (in [1.5, 2.5])"));
}

#[test]
fn criterion_11_byte_identical_reruns() {
    // Identical spec and seed give byte-identical CSV output, including
    // across different thread counts.
    use odemimo_cli::config::{ExperimentKind, ExperimentSpec};

    let dir = tempfile::tempdir().unwrap();
    let run_with = |kind: ExperimentKind, threads: usize, tag: &str| -> Vec<u8> {
        let mut spec = ExperimentSpec::defaults(kind);
        spec.n = 6;
        spec.m = 6;
        spec.trials = 120;
        spec.t_max = 0.5;
        spec.seed = 99;
        spec.iters = 20;
        spec.threads = threads;
        spec.eta = Some(0.5);
        spec.out = dir.path().join(format!("{}-{tag}.csv", kind.name()));
        odemimo_cli::run(&spec).unwrap();
        std::fs::read(&spec.out).unwrap()
    };

    for kind in [
        ExperimentKind::AnalyticVsSim,
        ExperimentKind::DetectorRace,
        ExperimentKind::TodeVsOde,
    ] {
        let one = run_with(kind, 1, "t1");
        let two = run_with(kind, 2, "t2");
        let again = run_with(kind, 2, "t2b");
        assert_eq!(one, two, "{}: thread count changed the bytes", kind.name());
        assert_eq!(two, again, "{}: rerun changed the bytes", kind.name());
        assert!(!one.is_empty());
    }
    pass(11, "CSV bytes identical across reruns and thread counts (3 experiment kinds)");
}
