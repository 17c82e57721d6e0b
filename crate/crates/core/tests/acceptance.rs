// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts. Run with `cargo test -p wpecm --test acceptance -- --nocapture`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wpecm::ecm::{pauli_settings, QAxisPairSearch};
use wpecm::error_model::{geometric_grid, log_log_slope};
use wpecm::photon_sim::{repeated_runs, statistical_floor, ExperimentConfig};
use wpecm::recipes::{run_fig2, run_fig3, Fig2Recipe, Fig3Recipe};
use wpecm::report::{csv_string, Provenance};
use wpecm::tomography::fit_quadratic_coefficient;
use wpecm::*;

fn verdict(id: &str, what: &str, ok: bool, detail: String) {
    println!("[{}] {id}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {what} ({detail})");
}

fn deg(x: f64) -> f64 {
    x.to_radians()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn within_rel(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

#[test]
fn ac01_closed_form_measurement_vector() {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let [q, dq, h, dh] = [0; 4].map(|_| r.random_range(-2.0 * PI..2.0 * PI));
        let closed = measured_bloch_general(q, dq, h, dh);
        let via_jones = bloch_from_jones(&propagate(q, dq, h, dh)).unwrap();
        worst = worst.max((closed - via_jones).max_abs());
    }
    let mut worst_reduction = 0.0f64;
    for _ in 0..1000 {
        let (q, h) = (r.random_range(-PI..PI), r.random_range(-PI..PI));
        worst_reduction = worst_reduction.max((measured_bloch_general(q, FRAC_PI_2, h, PI) - ideal_vector(q, h)).max_abs());
    }
    verdict(
        "AC1",
        "closed form == Jones propagation, QWP/HWP reduction",
        worst <= 1e-12 && worst_reduction <= 1e-12,
        format!("max diff {worst:.2e}, reduction {worst_reduction:.2e}, tol 1e-12"),
    );
}

#[test]
fn ac02_derivative_oracle_and_pauli_matrices() {
    let mut worst = 0.0f64;
    for i in 0..36 {
        for j in 0..36 {
            let (q, h) = (deg(5.0 * i as f64), deg(5.0 * j as f64));
            for c in ErrorChannel::ALL {
                let an = analytic_partial(q, h, c);
                let fd = fd_partial(q, h, c, 1e-5).unwrap();
                worst = worst.max((an - fd).norm() / an.norm().max(1.0));
            }
        }
    }

    let s = pauli_settings::<f64>();
    let r = FRAC_1_SQRT_2;
    let printed: [(ErrorChannel, [[f64; 3]; 3]); 4] = [
        (ErrorChannel::HAxis, [[0., 0., 0.], [4., 0., 4.], [0., -4., 0.]]),
        (ErrorChannel::QPhase, [[0., -1., 0.], [0., 0., 0.], [0., 0., 0.]]),
        (ErrorChannel::HPhase, [[0., -r, 0.], [0., 0., 0.], [r, 0., 0.]]),
        (ErrorChannel::QAxis, [[0., 0., 2.], [-2., 0., -2.], [-2., 2., 0.]]),
    ];
    let mut worst_matrix = 0.0f64;
    for (c, m) in printed {
        let d = Mat3::from_columns(s.map(|x| x.partial(c)));
        worst_matrix = worst_matrix.max(d.max_abs_diff(&Mat3 { m }));
    }
    verdict(
        "AC2",
        "analytic partials vs central differences on 36x36 grid; Pauli derivative matrices",
        worst <= 1e-6 && worst_matrix <= 1e-12,
        format!("max rel diff {worst:.2e} (tol 1e-6), matrix diff {worst_matrix:.2e} (tol 1e-12)"),
    );
}

#[test]
fn ac03_ecm_cancellation() {
    let mut r = rng(3);
    let (mut worst_zero, mut worst_q) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let seed = AngleSetting::new(r.random_range(0.0..PI), r.random_range(0.0..PI));
        let cm = ecm4(seed);
        for c in ErrorChannel::COMPENSABLE {
            worst_zero = worst_zero.max(summed_sensitivity(&cm, c).max_abs());
        }
        let want = u0::<f64>().mul_vec(seed.ideal_vector()) * 2.0;
        worst_q = worst_q.max((summed_sensitivity(&cm, ErrorChannel::QAxis) - want).max_abs());
    }
    verdict(
        "AC3",
        "ECM sums vanish for h, dq, dh and equal 2 U0 r0 for q",
        worst_zero <= 1e-12 && worst_q <= 1e-12,
        format!("max |sum| {worst_zero:.2e}, max q mismatch {worst_q:.2e}, tol 1e-12"),
    );
}

#[test]
fn ac04_mub_totals() {
    let (ecm, ncm) = mub_q_sensitivity_totals::<f64>();
    verdict(
        "AC4",
        "QWP-axis sensitivity totals over the Pauli triple",
        (ecm - 8.0).abs() <= 1e-12 && (ncm - 20.0).abs() <= 1e-12,
        format!("ecm {ecm}, ncm {ncm}, ratio {}", ecm / ncm),
    );
}

#[test]
fn ac05_scaling_exponents() {
    let out = run_fig2(&Fig2Recipe::default()).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for s in &out.slopes {
        let (want, tol) = match (s.scheme.as_str(), s.channel.as_str()) {
            ("ecm", "q") | ("ncm", _) => (1.0, 0.05),
            _ => (2.0, 0.10),
        };
        ok &= (s.slope - want).abs() <= tol;
        detail.push(format!("{}/{}={:.4}", s.scheme, s.channel, s.slope));
    }
    verdict("AC5", "log-log slopes at (30°, 13°) over [0.01°, 2°]", ok, detail.join(" "));
}

#[test]
fn ac06a_ncm_coefficients_s1() {
    let c = ncm_quadratic_coefficients(&QubitState::<f64>::s1());
    let pairs = [(c.h, 9.2), (c.dh, 0.15), (c.dq, 0.12), (c.q, 3.2)];
    let ok = pairs.iter().all(|(g, w)| (g - w).abs() <= 0.05);
    verdict(
        "AC6a",
        "NCM coefficients for s1 = (9.2, 0.15, 0.12, 3.2) ± 0.05",
        ok,
        format!("got h={:.4} dh={:.4} dq={:.4} q={:.4}", c.h, c.dh, c.dq, c.q),
    );
}

#[test]
fn ac06b_ncm_coefficients_s2() {
    let c = ncm_quadratic_coefficients(&QubitState::<f64>::s2());
    let pairs = [(c.h, 16.0), (c.dh, 0.0), (c.dq, 0.0), (c.q, 4.0)];
    let ok = pairs.iter().all(|(g, w)| (g - w).abs() <= 0.05);
    verdict(
        "AC6b",
        "NCM coefficients for s2 = (16, 0, 0, 4) ± 0.05",
        ok,
        format!("got h={:.4} dh={:.4} dq={:.4} q={:.4}", c.h, c.dh, c.dq, c.q),
    );
}

#[test]
fn ac06c_fitted_coefficients() {
    let scheme = pauli_scheme::<f64>(Mode::Ncm);
    let mut r = rng(6);
    let mut states = vec![QubitState::s1(), QubitState::s2()];
    while states.len() < 102 {
        let v = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        if v.norm() <= 1.0 {
            states.push(QubitState::new(v).unwrap());
        }
    }
    let mut worst = 0.0f64;
    for s in &states {
        let closed = ncm_quadratic_coefficients(s);
        for c in ErrorChannel::ALL {
            let fit = fit_quadratic_coefficient(&scheme, s, c);
            assert!(fit.consistent(1e-2, 1e-8), "{c}: {fit:?}");
            let want = closed.get(c);
            worst = worst.max((fit.three_point - want).abs() / want.abs().max(1e-6));
        }
    }
    verdict(
        "AC6c",
        "fitted quadratic coefficients from exact error vs closed form",
        worst <= 0.01,
        format!("max rel diff {worst:.2e} over {} states x 4 channels, tol 1%", states.len()),
    );
}

#[test]
fn ac07_error_budgets() {
    let mags = DeviceError::uniform(deg(0.1), deg(1.2));
    let b1 = predicted_error_budget(&QubitState::s1(), &mags).unwrap();
    let b2 = predicted_error_budget(&QubitState::s2(), &mags).unwrap();
    let checks = [
        ("s1 total", b1.ncm_total, 1.6e-4),
        ("s2 total", b2.ncm_total, 6.1e-5),
        ("s1 h", b1.ncm.h, 2.8e-5),
        ("s1 q", b1.ncm.q, 9.8e-6),
        ("s1 dq", b1.ncm.dq, 5.3e-5),
        ("s1 dh", b1.ncm.dh, 6.6e-5),
    ];
    let ok = checks.iter().all(|(_, g, w)| within_rel(*g, *w, 0.05));
    let detail = checks.iter().map(|(n, g, w)| format!("{n} {g:.3e}/{w:.1e}")).collect::<Vec<_>>().join(", ");
    verdict("AC7", "NCM error budgets at 0.1° angle, 1.2° phase errors", ok, detail);
}

#[test]
fn ac08_ecm_coefficient() {
    let c1 = ecm_quadratic_coefficient(&QubitState::<f64>::s1());
    let at_01 = c1 * deg(0.1).powi(2);
    let c2 = ecm_quadratic_coefficient(&QubitState::<f64>::s2());

    let scheme = pauli_scheme::<f64>(Mode::Ecm);
    let eps = geometric_grid(deg(0.01), deg(2.0), 20);
    let ys: Vec<f64> = eps
        .iter()
        .map(|&e| systematic_error_exact(&scheme, &QubitState::s2(), &DeviceError::along(ErrorChannel::QAxis, e)).norm_sq())
        .collect();
    let slope = log_log_slope(&eps, &ys).unwrap();

    let ok = (c1 - 1.2).abs() <= 0.05 && within_rel(at_01, 3.7e-6, 0.05) && c2 == 0.0 && (slope - 4.0).abs() <= 0.2;
    verdict(
        "AC8",
        "ECM coefficient 4(sx²+sz²)",
        ok,
        format!("s1 {c1:.4}, at 0.1° {at_01:.3e}, s2 {c2}, s2 q-slope {slope:.3}"),
    );
}

fn mc_config(mode: Mode, state: State, err: Device, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(pauli_scheme(mode), state, err, seed)
}

#[test]
fn ac09a_statistical_floor() {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, state) in [("s1", QubitState::s1()), ("s2", QubitState::s2())] {
        for mode in [Mode::Ncm, Mode::Ecm] {
            let cfg = mc_config(mode, state, DeviceError::ideal(), 90);
            let (mean, std) = repeated_runs(&cfg, 0).unwrap();
            let theory = statistical_floor(&cfg.scheme, &state, &cfg.err, cfg.photons_per_arm).unwrap();
            ok &= (2e-6..=2e-5).contains(&mean);
            detail.push(format!("{name}/{mode} mean {mean:.2e} ± {std:.1e} (binomial {theory:.2e})"));
        }
    }
    verdict("AC9a", "err = 0 floor in [2e-6, 2e-5] at N = 3e6, 5 runs", ok, detail.join("; "));
}

#[test]
fn ac09b_ncm_phase_error_monte_carlo() {
    let err = DeviceError::along(ErrorChannel::HPhase, deg(1.2));
    let cfg = mc_config(Mode::Ncm, QubitState::s1(), err, 91);
    let (mean, std) = repeated_runs(&cfg, 0).unwrap();
    let floor = statistical_floor(&cfg.scheme, &cfg.state, &cfg.err, cfg.photons_per_arm).unwrap();
    let target = 6.6e-5 + floor;
    verdict(
        "AC9b",
        "NCM, s1, dh = 1.2°: mean within 3 run-std of 6.6e-5 + floor",
        (mean - target).abs() <= 3.0 * std,
        format!("mean {mean:.3e}, std {std:.2e}, target {target:.3e}"),
    );
}

#[test]
fn ac09c_twenty_fold_improvement() {
    let err = DeviceError::uniform(deg(0.1), deg(1.2));
    let (ncm, _) = repeated_runs(&mc_config(Mode::Ncm, QubitState::s1(), err, 92), 0).unwrap();
    let (ecm, _) = repeated_runs(&mc_config(Mode::Ecm, QubitState::s1(), err, 92), 1).unwrap();
    verdict(
        "AC9c",
        "NCM/ECM mean error ratio at 0.1°/1.2° errors ≥ 10",
        ncm / ecm >= 10.0,
        format!("ncm {ncm:.3e}, ecm {ecm:.3e}, ratio {:.1}", ncm / ecm),
    );
}

#[test]
fn ac10_q_axis_infeasibility() {
    let search = QAxisPairSearch::new(721);
    let mut r = rng(10);
    let mut hits = Vec::new();
    let mut smallest = f64::INFINITY;
    for _ in 0..100 {
        let seed = AngleSetting::new(r.random_range(0.0..PI), r.random_range(0.0..PI));
        let out = search.probe(seed);
        smallest = smallest.min(out.residual);
        if out.is_hit(1e-3) {
            hits.push(out);
        }
    }
    for h in &hits {
        println!(
            "  special-value candidate: seed ({:.4}°, {:.4}°) partner ({:.4}°, {:.4}°) residual {:.2e}",
            h.seed.q.to_degrees(),
            h.seed.h.to_degrees(),
            h.best.q.to_degrees(),
            h.best.h.to_degrees(),
            h.residual
        );
    }
    verdict(
        "AC10",
        "no QWP-axis compensating pair for ≥ 95 of 100 random seeds (721² grid)",
        hits.len() <= 5,
        format!("{} hits, smallest residual {smallest:.2e}", hits.len()),
    );
}

#[test]
fn ac11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut recipe = Fig3Recipe::lower(2024);
    recipe.grid_deg = vec![0.2, 1.0, 3.0];
    let write = |tag: &str| {
        let out = run_fig3(&recipe).unwrap();
        let csv_path = dir.path().join(format!("{tag}.csv"));
        let json_path = dir.path().join(format!("{tag}.json"));
        std::fs::write(&csv_path, csv_string(&out.monte_carlo).unwrap()).unwrap();
        let doc = Provenance { config: &recipe, data: &out };
        std::fs::write(&json_path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
        (std::fs::read(csv_path).unwrap(), std::fs::read(json_path).unwrap())
    };
    let a = write("first");
    let b = write("second");
    verdict(
        "AC11",
        "same seed reproduces bit-identical CSV and JSON",
        a == b,
        format!("csv {} bytes, json {} bytes", a.0.len(), a.1.len()),
    );
}
