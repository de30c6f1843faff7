// SPDX-License-Identifier: Apache-2.0
use std::time::Instant;

use pcircuit::device::{
    effective_field, mtj_conductance, run_trajectory, sigmoid_response, sllg_step, thermal_field,
    MacrospinSimulator, DEFAULT_TIME_STEP,
};
use pcircuit::{MagnetParams, MagnetState, MtjParams, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;

const DT: f64 = DEFAULT_TIME_STEP;

fn disk() -> MagnetParams<f64> {
    MagnetParams::low_barrier_disk()
}

fn along_y() -> MagnetState<f64> {
    MagnetState::new(Vec3::unit_y()).unwrap()
}

/// Integrated autocorrelation time of `x`, by summing the autocorrelation
/// until it first turns negative.
fn autocorrelation_time(x: &[f64]) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let mut tau = 1.0;
    for lag in 1..n / 10 {
        let c = (0..n - lag).map(|k| (x[k] - mean) * (x[k + lag] - mean)).sum::<f64>()
            / ((n - lag) as f64 * var);
        if c <= 0.0 {
            break;
        }
        tau += 2.0 * c;
    }
    tau
}

#[test]
fn thermal_field_statistics() {
    let p = disk();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1_000_000;
    let std = p.thermal_field_std(DT);
    let (mut sum, mut sq) = (Vec3::zero(), 0.0);
    for _ in 0..n {
        let h = thermal_field(&p, DT, &mut rng);
        sum = sum + h;
        sq += h.x * h.x;
    }
    let mean = sum * (1.0 / n as f64);
    for c in [mean.x, mean.y, mean.z] {
        assert!(c.abs() < 4.0 * std / 1000.0, "mean component {c}");
    }
    assert!(((sq / n as f64).sqrt() / std - 1.0).abs() < 5e-3);
}

#[test]
fn demag_field_reference() {
    let h = effective_field(Vec3::unit_x(), &disk(), Vec3::zero());
    assert!((h.x + 4.0 * std::f64::consts::PI * 1100.0).abs() < 1e-9);
    assert!((h.x + 13823.0).abs() < 1.0);
    let h = effective_field(Vec3::new(0.0, 0.6, 0.8), &disk(), Vec3::zero());
    assert_eq!(h, Vec3::zero());
}

#[test]
fn mtj_conductance_reference() {
    let mtj = MtjParams::<f64>::new(1.0, 1.10).unwrap();
    assert_eq!(mtj_conductance(0.0, &mtj).unwrap(), 1.0);
    assert!((mtj_conductance(1.0, &mtj).unwrap() / 1.3548 - 1.0).abs() < 1e-4);
    assert!((mtj_conductance(-1.0, &mtj).unwrap() / 0.6452 - 1.0).abs() < 1e-4);
    assert!(mtj_conductance(1.5, &mtj).is_err());
}

#[test]
fn norm_conserved_every_step() {
    let p = disk();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut m = Vec3::new(0.3, 0.4, (0.75f64).sqrt());
    for k in 0..200_000 {
        let current = if k % 2 == 0 { 1e-4 } else { -3e-4 };
        m = sllg_step(m, current, &p, DT, &mut rng).unwrap().vector();
        assert!((m.norm() - 1.0).abs() < 1e-12, "step {k}: |m| = {}", m.norm());
    }
    assert!(sllg_step(Vec3::new(1.0, 1.0, 0.0), 0.0, &p, DT, &mut rng).is_err());
}

#[test]
fn cold_magnet_in_plane_is_stationary() {
    let cold = disk().with_temperature(0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let m0 = Vec3::new(0.0, 0.6, 0.8);
    let m = sllg_step(m0, 0.0, &cold, DT, &mut rng).unwrap().vector();
    assert!((m.y - 0.6).abs() < 1e-15 && (m.z - 0.8).abs() < 1e-15 && m.x == 0.0);
}

#[test]
fn cold_demag_energy_non_increasing() {
    let cold = disk().with_temperature(0.0).unwrap();
    let start = MagnetState::normalized(Vec3::new(0.7, 0.5, 0.5)).unwrap();
    let trajectory = run_trajectory(&cold, 0.0, 5e-9, DT, 0, start).unwrap();
    let scale = cold.demag_energy(Vec3::unit_x());
    let mut previous = cold.demag_energy(start.vector());
    for point in &trajectory {
        let e = cold.demag_energy(point.m);
        assert!(e <= previous + 1e-12 * scale, "energy rose at t = {}", point.time);
        previous = e;
    }
    assert!(previous < 1e-3 * cold.demag_energy(start.vector()));
}

#[test]
fn trajectory_is_reproducible() {
    let a = run_trajectory(&disk(), 1e-5, 1e-9, DT, 77, along_y()).unwrap();
    let b = run_trajectory(&disk(), 1e-5, 1e-9, DT, 77, along_y()).unwrap();
    assert_eq!(a.len(), 1000);
    assert_eq!(a, b);
}

/// Out-of-plane component sampled every nanosecond (about two relaxation
/// times of `m_x`) against `p(x) ~ exp(-kappa x^2)` on `[-1, 1]`.
#[test]
fn out_of_plane_marginal_is_boltzmann() {
    let p = disk();
    let kappa = 2.0 * std::f64::consts::PI * p.saturation_magnetization.powi(2) * p.volume
        / p.thermal_energy();
    let spacing = 1000;
    let n_samples = 100_000;
    let mut sim = MacrospinSimulator::new(p, 0.0, DT, along_y(), 5).unwrap();
    for _ in 0..10_000 {
        sim.step();
    }
    let mut xs: Vec<f64> = (0..n_samples)
        .map(|_| {
            for _ in 1..spacing {
                sim.step();
            }
            sim.step().x
        })
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let root = kappa.sqrt();
    let cdf = |x: f64| (erf(root * x) + erf(root)) / (2.0 * erf(root));
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    println!("kappa = {kappa:.2}, KS = {ks:.5}");
    assert!(ks < 0.05, "KS statistic {ks}");
}

#[test]
fn unbiased_magnet_has_zero_mean_and_stays_in_plane() {
    let started = Instant::now();
    let mut sim = MacrospinSimulator::new(disk(), 0.0, DT, along_y(), 8).unwrap();
    let steps = 10_000_000;
    let stride = 100;
    let mut mz = Vec::with_capacity(steps / stride);
    let (mut mx2, mut mz2) = (0.0, 0.0);
    for k in 0..steps {
        let m = sim.step();
        mx2 += m.x * m.x;
        mz2 += m.z * m.z;
        if k % stride == 0 {
            mz.push(m.z);
        }
    }
    let elapsed = started.elapsed();
    let mean = mz.iter().sum::<f64>() / mz.len() as f64;
    let var = mz.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / mz.len() as f64;
    let tau = autocorrelation_time(&mz);
    let se = (var * tau / mz.len() as f64).sqrt();
    println!("<m_z> = {mean:.4} +- {se:.4} (tau = {tau:.1} samples), 1e7 steps in {elapsed:?}");
    assert!(mean.abs() < 0.05);
    assert!(mean.abs() < 4.0 * se);
    assert!(mx2 < 0.05 * mz2, "<m_x^2> = {}, <m_z^2> = {}", mx2 / steps as f64, mz2 / steps as f64);
    assert!(elapsed.as_secs() < 600);
}

#[test]
fn strong_spin_current_pins_along_z() {
    let mut sim = MacrospinSimulator::new(disk(), 1e-3, DT, along_y(), 3).unwrap();
    let steps = 1_000_000;
    let mean = (0..steps).map(|_| sim.step().z).sum::<f64>() / steps as f64;
    assert!(mean > 0.95, "<m_z> = {mean}");
}

#[test]
fn sigmoid_sweep_is_antisymmetric_tanh() {
    let magnitudes = [2.5e-5, 5e-5, 1e-4, 2e-4, 4e-4];
    let mut currents: Vec<f64> = magnitudes.iter().rev().map(|i| -i).collect();
    currents.push(0.0);
    currents.extend(magnitudes);
    let sweep = sigmoid_response(&disk(), &currents, 1e-6, DT, 12).unwrap();
    let y: Vec<f64> = sweep.points.iter().map(|p| p.1).collect();
    let se = &sweep.std_errors;
    let mid = magnitudes.len();
    println!("scale = {:.3e} A, R^2 = {:.4}", sweep.current_scale, sweep.r_squared);
    for (k, (i, v)) in sweep.points.iter().enumerate() {
        println!("  I = {i:+.2e}: {v:+.4} +- {:.4}", se[k]);
    }

    assert!(!sweep.insufficient_flips, "{} flips", sweep.zero_bias_flips);
    assert!(y[mid].abs() < 0.05);
    // Antisymmetry: RMS of (y(I) + y(-I)) in units of its standard error.
    let z2: f64 = (1..=mid)
        .map(|k| {
            let (a, b) = (mid + k, mid - k);
            let var = se[a].powi(2) + se[b].powi(2);
            if var == 0.0 {
                // Both points fully saturated.
                assert_eq!(y[a], -y[b]);
                0.0
            } else {
                (y[a] + y[b]).powi(2) / var
            }
        })
        .sum::<f64>()
        / mid as f64;
    assert!(z2.sqrt() <= 2.0, "antisymmetry RMS z = {}", z2.sqrt());
    for k in 1..y.len() {
        let tol = 3.0 * (se[k].powi(2) + se[k - 1].powi(2)).sqrt();
        assert!(y[k] >= y[k - 1] - tol, "not monotone at {}", currents[k]);
    }
    assert!(sweep.r_squared >= 0.98);
}
