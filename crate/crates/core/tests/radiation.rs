use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use quasilattice::radiation::{l_values, pv_exact, pv_integral, pv_integral_check, PvControls};
use quasilattice::{chi, chi_closed_form, decay_rate, ground_transition_element, quasi_period, s_factor, CavitySpec, Error, LatticeSpec};

const OMEGA_C: f64 = 6.729;

fn cavity() -> CavitySpec {
    CavitySpec::new(OMEGA_C, 0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_sum_equals_closed_form(n in 2usize..=8, ell in 0.01f64..=1.0) {
        let lat = LatticeSpec::new(n, ell, OMEGA_C).unwrap();
        let cav = cavity();
        for &l in &l_values(n) {
            for i in 0..2000 {
                let k = 30.0 * (i as f64 + 0.5) / 2000.0;
                // Cancellation in the summed series grows as 1 / |denominator|.
                let z = Complex64::from_polar(1.0, PI * ell * k / OMEGA_C);
                if (1.0 + z * z - z * 2.0 * (l * PI).cos()).norm() < 1e-3 {
                    continue;
                }
                match chi_closed_form(&lat, &cav, l, k) {
                    Ok(z) => prop_assert!((z - chi(&lat, &cav, l, k)).norm() < 1e-11, "N={n} l={l} k={k}"),
                    Err(Error::NearSingular { .. }) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }

    #[test]
    fn quasi_periodic(n in 2usize..=8, ell in 0.05f64..=1.0, k in 0.0f64..30.0) {
        let lat = LatticeSpec::new(n, ell, OMEGA_C).unwrap();
        let cav = cavity();
        let period = quasi_period(&lat, &cav).unwrap();
        for &l in &l_values(n) {
            let a = chi(&lat, &cav, l, k);
            let b = chi(&lat, &cav, l, k + period);
            prop_assert!((a.norm() - b.norm()).abs() < 1e-10);
            if a.norm() > 1e-6 {
                let d = (b / a).arg();
                prop_assert!(d.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn phase_jumps_sit_at_magnitude_zeros() {
    let lat = LatticeSpec::new(4, 2.0 / 3.0, OMEGA_C).unwrap();
    let cav = cavity();
    let grid: Vec<f64> = (1..=3000).map(|i| i as f64 * 0.01).collect();
    for &l in &l_values(4) {
        let values: Vec<Complex64> = grid.iter().map(|&k| chi(&lat, &cav, l, k)).collect();
        let mags: Vec<f64> = values.iter().map(|z| z.norm()).collect();
        let peak = mags.iter().cloned().fold(0.0, f64::max);
        for i in 0..values.len() - 1 {
            let jump = (values[i + 1] / values[i]).arg().abs();
            if jump > PI / 2.0 {
                let lo = i.saturating_sub(1);
                let hi = (i + 2).min(values.len() - 1);
                let near = mags[lo..=hi].iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(near < 0.05 * peak, "l = {l}: jump at k = {} with |chi| = {near}", grid[i]);
            }
        }
    }
}

#[test]
fn chi_is_real_at_symmetric_points() {
    // At phi = m pi the sum is real for every l.
    let lat = LatticeSpec::new(4, 2.0 / 3.0, OMEGA_C).unwrap();
    let cav = cavity();
    let step = quasi_period(&lat, &cav).unwrap() / 2.0;
    for m in 0..3 {
        for &l in &l_values(4) {
            assert!(chi(&lat, &cav, l, m as f64 * step).im.abs() < 1e-12);
        }
    }
}

#[test]
fn chi_never_exceeds_chain_length() {
    let lat = LatticeSpec::new(4, 2.0 / 3.0, OMEGA_C).unwrap();
    let cav = cavity();
    for i in 1..=3000 {
        for &l in &l_values(4) {
            assert!(chi(&lat, &cav, l, i as f64 * 0.01).norm() <= 4.0 + 1e-12);
        }
    }
}

#[test]
fn decay_rate_symmetric_when_qubit_frequency_is_even_multiple_of_cavity() {
    // gamma(ell) = gamma(1 - ell) requires pi omega_q / omega_c to be a multiple of 2 pi.
    let cav = cavity();
    for i in 0..=100 {
        let ell = i as f64 / 100.0;
        let a = decay_rate(&LatticeSpec::new(4, ell, 2.0 * OMEGA_C).unwrap(), &cav, None).unwrap();
        let b = decay_rate(&LatticeSpec::new(4, 1.0 - ell, 2.0 * OMEGA_C).unwrap(), &cav, None).unwrap();
        assert!((a.gamma_normalized - b.gamma_normalized).abs() < 1e-10);
    }
}

#[test]
fn s_factor_limits() {
    // Above resonance the lowest first-excited branch is the bare photon.
    let above = LatticeSpec::new(4, 2.0 / 3.0, 7.0).unwrap();
    let decoupled = cavity().with_eta(0.0).unwrap();
    let s = ground_transition_element(&above, &decoupled, 0).unwrap();
    assert_eq!(s_factor(&above, &decoupled, 7.0, s).norm(), 0.0);

    let lat = LatticeSpec::new(4, 2.0 / 3.0, OMEGA_C).unwrap();
    let homogeneous = lat.with_relative_spacing(0.0).unwrap();
    let s = ground_transition_element(&homogeneous, &cavity(), 0).unwrap();
    let a = s_factor(&homogeneous, &cavity(), OMEGA_C, s);
    let b = s_factor(&homogeneous, &cavity(), 0.0, s);
    assert!((a - b).norm() < 1e-15);

    let s = ground_transition_element(&lat, &cavity(), 0).unwrap();
    let period = quasi_period(&lat, &cavity()).unwrap();
    assert!((period - 20.2).abs() < 0.1);
    for k in [0.5, 3.3, 8.0] {
        let d = s_factor(&lat, &cavity(), k, s).norm() - s_factor(&lat, &cavity(), k + period, s).norm();
        assert!(d.abs() < 1e-12);
    }
}

#[test]
fn principal_value_of_constant_profile_has_no_real_part() {
    let controls = PvControls { exclusion: 0.6, cutoff: 400.0, step: 0.01, window_points: 200, max_halvings: 6, tolerance: 2e-3 };
    let (v, _, change) = pv_integral(|_| 2.25, OMEGA_C, &controls).unwrap();
    assert_eq!(v.re, 0.0);
    assert!(change < 2e-3);
    let truncation = 2.25 * ((400.0 - OMEGA_C) / (400.0 + OMEGA_C)).ln() / OMEGA_C;
    assert!((v.im + truncation).abs() < 1e-6);
}

#[test]
fn principal_value_matches_fourier_oracle() {
    for ell in [0.25, 2.0 / 3.0, 0.9] {
        let lat = LatticeSpec::new(4, ell, OMEGA_C).unwrap();
        let cav = cavity();
        let check = pv_integral_check(&lat, &cav, None).unwrap();
        let exact = pv_exact(&lat, &cav, ground_transition_element(&lat, &cav, 0).unwrap());
        let got = Complex64::new(check.numeric, check.numeric_imag) + check.tail_estimate;
        assert!((got - exact).norm() < 2e-3 * exact.norm().max(1e-3), "ell = {ell}: {got} vs {exact}");
        assert!(exact.re.abs() < 1e-12);
    }
}
