use num_complex::Complex64;

use super::state::{DensityMatrix, StateVector};
use crate::error::{Error, Result};
use crate::params::KerrParams;

/// Eigenenergy of level `n`: `ħω(n+½) + Λ²(ħω)²(n+½)²` with `ω = √(k/M)`;
/// in atomic units `(n+½) + Λ²(n+½)²`.
pub fn kerr_energy(n: usize, params: &KerrParams) -> Result<f64> {
    params.require_kerr()?;
    Ok(energy_unchecked(n, params))
}

fn energy_unchecked(n: usize, params: &KerrParams) -> f64 {
    let e0 = params.hbar * params.omega() * (n as f64 + 0.5);
    e0 + params.lambda2() * e0 * e0
}

/// Exact evolution `c_n(t) = c_n(0) e^{-i E_n t/ħ}`.
pub fn evolve(state: &StateVector, t: f64, params: &KerrParams) -> Result<StateVector> {
    params.require_kerr()?;
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| c * phase(n, t, params))
        .collect();
    Ok(StateVector::from_normalized(amps, state.truncation_residual()))
}

/// Same evolution applied to a density matrix.
pub fn evolve_density(rho: &DensityMatrix, t: f64, params: &KerrParams) -> Result<DensityMatrix> {
    params.require_kerr()?;
    let n = rho.dim();
    let phases: Vec<Complex64> = (0..n).map(|k| phase(k, t, params)).collect();
    let mut entries = rho.entries().clone();
    for ((m, k), z) in entries.indexed_iter_mut() {
        *z *= phases[m] * phases[k].conj();
    }
    DensityMatrix::from_entries(entries)
}

fn phase(n: usize, t: f64, params: &KerrParams) -> Complex64 {
    let angle = -energy_unchecked(n, params) * t / params.hbar;
    Complex64::from_polar(1.0, angle.rem_euclid(std::f64::consts::TAU))
}

/// Quantum recurrence time `π / (|Λ²| ħ ω²)`, i.e. `π/|Λ²|` in atomic units.
pub fn recurrence_time(params: &KerrParams) -> Result<f64> {
    params.validate()?;
    if params.lambda2() == 0.0 {
        return Err(Error::Harmonic);
    }
    let w = params.omega();
    Ok(std::f64::consts::PI / (params.lambda2().abs() * params.hbar * w * w))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::kerr::{coherent_state, density_matrix, fock_superposition, squeezed_vacuum};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn energies() {
        assert_eq!(kerr_energy(0, &KerrParams::atomic(0.0)).unwrap(), 0.5);
        assert_eq!(kerr_energy(0, &KerrParams::atomic(0.25)).unwrap(), 0.5625);
        assert_eq!(kerr_energy(1, &KerrParams::atomic(1.0 / 16.0)).unwrap(), 1.640625);
        let mut p = KerrParams::atomic(0.25);
        p.lambda2_x = Some(0.5);
        assert!(kerr_energy(0, &p).is_err());
    }

    #[test]
    fn recurrence_times() {
        assert!((recurrence_time(&KerrParams::atomic(1.0 / 16.0)).unwrap() - 16.0 * PI).abs() < 1e-12);
        assert!((recurrence_time(&KerrParams::atomic(0.25)).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((recurrence_time(&KerrParams::atomic(1.0)).unwrap() - PI).abs() < 1e-15);
        assert!((recurrence_time(&KerrParams::atomic(-1.0 / 16.0)).unwrap() - 16.0 * PI).abs() < 1e-12);
        assert_eq!(recurrence_time(&KerrParams::atomic(0.0)), Err(Error::Harmonic));
    }

    #[test]
    fn zero_time_is_identity() {
        let s = coherent_state(c(0.7, -0.2), 20).unwrap();
        let e = evolve(&s, 0.0, &KerrParams::atomic(0.1)).unwrap();
        assert_eq!(e.amplitudes(), s.amplitudes());
    }

    #[test]
    fn vacuum_is_stationary() {
        let s = coherent_state(c(0.0, 0.0), 3).unwrap();
        let e = evolve(&s, 7.3, &KerrParams::atomic(0.3)).unwrap();
        assert!((e.fidelity(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_restores_density_matrix() {
        for lambda2 in [0.25, 1.0 / 16.0, 1.0 / 6.0] {
            let p = KerrParams::atomic(lambda2);
            let s = coherent_state(c(7.0 / 12.0, 0.0), 16).unwrap();
            let t = recurrence_time(&p).unwrap();
            let e = evolve(&s, t, &p).unwrap();
            let d = density_matrix(&e).max_abs_diff(&density_matrix(&s));
            assert!(d < 1e-12, "lambda2 = {lambda2}: {d}");
        }
    }

    #[test]
    fn harmonic_evolution_keeps_populations() {
        let s = squeezed_vacuum(0.4, 40).unwrap();
        let e = evolve(&s, 2.1, &KerrParams::atomic(0.0)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(e.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert!((s.mean_photon_number() - e.mean_photon_number()).abs() < 1e-13);
    }

    #[test]
    fn density_evolution_matches_state_evolution() {
        let s = fock_superposition(&[(0, c(1.0, 0.0)), (3, c(0.5, 0.5))], 4).unwrap();
        let p = KerrParams::atomic(0.2);
        let a = density_matrix(&evolve(&s, 1.7, &p).unwrap());
        let b = evolve_density(&density_matrix(&s), 1.7, &p).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unitary(re in -1.5f64..1.5, im in -1.5f64..1.5, t in -100.0f64..100.0, l in -0.5f64..0.5) {
                let s = coherent_state(c(re, im), 40).unwrap();
                let e = evolve(&s, t, &KerrParams::atomic(l)).unwrap();
                prop_assert!((e.norm_sqr() - 1.0).abs() < 1e-14);
            }

            #[test]
            fn group_property(t1 in -20.0f64..20.0, t2 in -20.0f64..20.0, l in -0.5f64..0.5) {
                let p = KerrParams::atomic(l);
                let s = coherent_state(c(1.0, 0.3), 30).unwrap();
                let a = evolve(&evolve(&s, t1, &p).unwrap(), t2, &p).unwrap();
                let b = evolve(&s, t1 + t2, &p).unwrap();
                for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                    prop_assert!((x - y).norm() < 1e-12);
                }
            }

            #[test]
            fn fock_states_are_stationary(n in 0usize..20, t in -50.0f64..50.0, l in -0.5f64..0.5) {
                let s = fock_superposition(&[(n, c(1.0, 0.0))], 20).unwrap();
                let e = evolve(&s, t, &KerrParams::atomic(l)).unwrap();
                prop_assert!((e.fidelity(&s) - 1.0).abs() < 1e-14);
            }
        }
    }
}
