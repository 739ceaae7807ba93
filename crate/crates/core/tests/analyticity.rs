use std::f64::consts::TAU;

use gevrey_beam::analyticity::*;
use gevrey_beam::initial::{periodic_lorentzian, InitialData};
use gevrey_beam::lab::{stream, FieldSampler};
use gevrey_beam::oracle::naive_np_residual;
use gevrey_beam::solver::*;
use gevrey_beam::spectral::{forward_transform, RealField};
use gevrey_beam::stats::log_log_slope;
use gevrey_beam::{Grid, SpectralField};
use proptest::prelude::*;

fn random_field(n: usize, band: usize, seed: u64) -> SpectralField {
    let g = Grid::new(1, n, TAU).unwrap();
    FieldSampler::new(g, band)
        .unwrap()
        .normalized(1.0)
        .sample(&mut stream(seed, 0))
}

#[test]
fn residual_matches_convolution_oracle() {
    let v = random_field(64, 10, 3);
    let fast = np_residual(&v, 1e-2, 3).unwrap();
    let slow = naive_np_residual(&v, 1e-2, 3);
    let err = fast.sub(&slow).unwrap().max_abs();
    assert!(err < 1e-11, "err {err:e}");
}

#[test]
fn residual_has_sigma_squared_law() {
    for seed in 0..5 {
        let v = random_field(64, 8, seed);
        for sigma in [1e-2, 3e-3] {
            let a = residual_ratio(&v, sigma, 3).unwrap();
            let b = residual_ratio(&v, sigma / 2.0, 3).unwrap();
            assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
        }
        let sig: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 / 5.0)).collect();
        let norms: Vec<f64> = sig
            .iter()
            .map(|&s| np_residual(&v, s, 3).unwrap().l2_norm())
            .collect();
        let slope = log_log_slope(&sig, &norms).unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }
}

#[test]
fn linear_flow_preserves_lifted_energy() {
    let g = Grid::new(1, 128, 30.0).unwrap();
    let u = InitialData::LorentzPole { amplitude: 1.0, a: 0.7 }.build(&g).unwrap();
    let st = State::new(u.clone(), u.scale(0.2), 0.0, Params::linear(1.0, 3).unwrap()).unwrap();
    let traj = integrate(&st, &IntegrateOptions::strang(1.0, 0.01)).unwrap();
    let table = sigma_drift_sweep(&traj.states, &[0.0, 0.01, 0.1, 0.3], 1.0).unwrap();
    for row in &table.rows {
        let e0 = modified_energy(&st, row.sigma).unwrap().value;
        assert!(row.sup_drift < 1e-10 * e0.max(1.0), "{row:?}");
    }
}

#[test]
fn zero_sigma_row_is_the_energy_error() {
    let g = Grid::new(1, 128, 30.0).unwrap();
    let u = InitialData::GaussianBump { amplitude: 0.8, width: 1.0 }.build(&g).unwrap();
    let st = State::new(u, SpectralField::zeros(g), 0.0, Params::new(1.0, 3).unwrap()).unwrap();
    let traj = integrate(&st, &IntegrateOptions::strang(0.5, 0.01)).unwrap();
    let table = sigma_drift_sweep(&traj.states, &[0.0, 1e-2], 0.5).unwrap();
    let e0 = traj.energies[0].total;
    let baseline = traj.energies.iter().map(|e| (e.total - e0).abs()).fold(0.0, f64::max);
    assert_eq!(table.rows[0].sup_drift, baseline);
    assert!(table.rows[0].ratio.is_nan());
    assert!(sigma_drift_sweep(&traj.states, &[0.1, 0.01], 0.5).is_err());
}

#[test]
fn overflowing_rows_are_marked_not_fatal() {
    let g = Grid::new(1, 64, 4.0).unwrap();
    let st = State::zeros(g, Params::new(1.0, 3).unwrap());
    let traj = integrate(&st, &IntegrateOptions::strang(0.1, 0.05)).unwrap();
    let table = sigma_drift_sweep(&traj.states, &[0.1, 100.0], 0.1).unwrap();
    assert!(table.rows[0].is_valid());
    assert!(!table.rows[1].is_valid());
}

#[test]
fn sampled_pole_profile_gives_its_radius() {
    for a in [0.2, 0.35, 0.5, 0.75, 1.0] {
        let l = 40.0 * a;
        let g = Grid::new(1, 1024, l).unwrap();
        let f = RealField::from_fn(g, |x| periodic_lorentzian(x[0], a, l)).unwrap();
        let est = estimate_radius(&forward_transform(&f), &FitPolicy::default()).unwrap();
        assert!(!est.capped);
        assert!((est.sigma_est / a - 1.0).abs() < 0.05, "a {a}: {est:?}");
    }
}

#[test]
fn linear_flow_keeps_the_radius() {
    let g = Grid::new(1, 512, 20.0).unwrap();
    let u = InitialData::LorentzPole { amplitude: 1.0, a: 0.5 }.build(&g).unwrap();
    let st = State::new(u, SpectralField::zeros(g), 0.0, Params::linear(1.0, 3).unwrap()).unwrap();
    let setup = TrackSetup {
        initial: st,
        integrate: IntegrateOptions {
            output_stride: 100,
            ..IntegrateOptions::strang(5.0, 0.01)
        },
        policy: FitPolicy::default(),
        sigma0: 0.25,
        c_fit: 1.0,
    };
    let track = track_radius_over_time(&setup).unwrap();
    for s in &track.samples {
        let est = s.estimate.expect("estimable");
        assert!((est.sigma_est - 0.5).abs() < 0.02, "{s:?}");
    }
    assert!(track.verdict);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exponential_spectra_are_recovered(a in 0.1..1.0f64, scale in -8.0..8.0f64) {
        let g = Grid::new(1, 256, TAU).unwrap();
        let c = InitialData::ExpDecaySpectrum { amplitude: 10f64.powf(scale), a }.build(&g).unwrap();
        let est = estimate_radius(&c, &FitPolicy::default()).unwrap();
        prop_assert!((est.sigma_est - a).abs() <= 1e-6);
        prop_assert!(!est.capped);
    }

    #[test]
    fn lifted_energy_is_monotone_in_sigma(seed in 0u64..1000, s1 in 0.0..0.5f64, ds in 0.0..0.5f64) {
        let u = random_field(32, 6, seed);
        let ut = random_field(32, 6, seed + 1);
        let st = State::new(u, ut, 0.0, Params::new(1.0, 3).unwrap()).unwrap();
        let a = modified_energy(&st, s1).unwrap().value;
        let b = modified_energy(&st, s1 + ds).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-14));
    }

    #[test]
    fn residual_vanishes_for_degenerate_cases(seed in 0u64..1000, sigma in 0.0..0.5f64) {
        let v = random_field(32, 6, seed);
        prop_assert_eq!(np_residual(&v, 0.0, 3).unwrap().max_abs(), 0.0);
        prop_assert!(np_residual(&v, sigma, 1).unwrap().max_abs() <= 1e-14 * v.max_abs());
    }
}
