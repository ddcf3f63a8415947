//! Finite-dimensional statistical-operator demonstration: time-averaging
//! a pure-state density matrix suppresses the off-diagonal (coherence)
//! entries by `sinc(Delta E T / 2)`, leaving the energy-diagonal mixed
//! state in the long-window limit.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatopsError {
    #[error("coefficient and energy lists must have equal nonzero length")]
    ShapeMismatch,
    #[error("coefficients must be normalized: sum |c_n|^2 = {0}")]
    NotNormalized(f64),
    #[error("degenerate energies at indices {0} and {1} (unsupported)")]
    DegenerateEnergies(usize, usize),
    #[error("averaging window must be positive")]
    NonPositiveWindow,
}

/// Pure state expanded over a finite set of energy eigenstates.
#[derive(Debug, Clone)]
pub struct DiscreteState {
    pub coefficients: Vec<Complex64>,
    pub energies: Vec<f64>,
}

impl DiscreteState {
    pub fn new(coefficients: Vec<Complex64>, energies: Vec<f64>) -> Result<Self, StatopsError> {
        if coefficients.is_empty() || coefficients.len() != energies.len() {
            return Err(StatopsError::ShapeMismatch);
        }
        let total: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(StatopsError::NotNormalized(total));
        }
        for i in 0..energies.len() {
            for j in i + 1..energies.len() {
                if energies[i] == energies[j] {
                    return Err(StatopsError::DegenerateEnergies(i, j));
                }
            }
        }
        Ok(DiscreteState {
            coefficients,
            energies,
        })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }
}

/// Instantaneous pure-state density matrix
/// `rho_nm(t) = c_n c_m* e^{-i(E_n - E_m)t}` (row-major).
pub fn density_at(state: &DiscreteState, t: f64) -> Vec<Vec<Complex64>> {
    let n = state.dim();
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for r in 0..n {
        for c in 0..n {
            let phase = -Complex64::i() * (state.energies[r] - state.energies[c]) * t;
            rho[r][c] = state.coefficients[r] * state.coefficients[c].conj() * phase.exp();
        }
    }
    rho
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Density matrix averaged over the window `[0, T]`:
/// `rho_nm(T) = c_n c_m* sinc(Delta_{m,n} T / 2)` with
/// `Delta_{m,n} = E_n - E_m`; diagonal entries are unchanged, coherences
/// decay toward the mixed state `diag(|c_n|^2)`.
pub fn time_averaged_density(
    state: &DiscreteState,
    big_t: f64,
) -> Result<Vec<Vec<Complex64>>, StatopsError> {
    if !(big_t > 0.0) {
        return Err(StatopsError::NonPositiveWindow);
    }
    let n = state.dim();
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for r in 0..n {
        for c in 0..n {
            let delta = state.energies[r] - state.energies[c];
            // integral of e^{-i delta t} over [0,T] is T sinc(delta T/2)
            // times a phase; the sinc carries the suppression
            let phase = -Complex64::i() * delta * big_t / 2.0;
            rho[r][c] = state.coefficients[r]
                * state.coefficients[c].conj()
                * sinc(delta * big_t / 2.0)
                * phase.exp();
        }
    }
    Ok(rho)
}

/// Trace of a square complex matrix.
pub fn trace(m: &[Vec<Complex64>]) -> Complex64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

/// Purity `trace(rho^2)`.
pub fn purity(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += m[r][c] * m[c][r];
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample_state() -> DiscreteState {
        let c = 1.0 / 3f64.sqrt();
        DiscreteState::new(
            vec![
                Complex64::new(c, 0.0),
                Complex64::new(0.0, c),
                Complex64::new(c, 0.0),
            ],
            vec![0.5, 1.5, 3.5],
        )
        .unwrap()
    }

    #[test]
    fn construction_validates() {
        assert_eq!(
            DiscreteState::new(vec![], vec![]).unwrap_err(),
            StatopsError::ShapeMismatch
        );
        assert!(matches!(
            DiscreteState::new(
                vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
                vec![0.0, 1.0]
            ),
            Err(StatopsError::NotNormalized(_))
        ));
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert_eq!(
            DiscreteState::new(vec![c, c], vec![1.0, 1.0]).unwrap_err(),
            StatopsError::DegenerateEnergies(0, 1)
        );
    }

    #[test]
    fn single_state_density() {
        let s = DiscreteState::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![0.0, 1.0],
        )
        .unwrap();
        let rho = density_at(&s, 3.7);
        assert_eq!(rho[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(rho[1][1], Complex64::new(0.0, 0.0));
        assert_eq!(rho[0][1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn equal_pair_at_zero_time() {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = DiscreteState::new(vec![c, c], vec![0.0, 1.0]).unwrap();
        let rho = density_at(&s, 0.0);
        for r in 0..2 {
            for col in 0..2 {
                assert_abs_diff_eq!(rho[r][col].re, 0.5, epsilon = 1e-14);
                assert_abs_diff_eq!(rho[r][col].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pure_density_is_projector() {
        let s = sample_state();
        for &t in &[0.0, 1.3, 17.0] {
            let rho = density_at(&s, t);
            assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(purity(&rho), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn averaged_diagonal_unchanged() {
        let s = sample_state();
        for &t in &[0.1, 5.0, 500.0] {
            let rho = time_averaged_density(&s, t).unwrap();
            for n in 0..s.dim() {
                assert_abs_diff_eq!(rho[n][n].re, s.coefficients[n].norm_sqr(), epsilon = 1e-12);
                assert_abs_diff_eq!(rho[n][n].im, 0.0, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(trace(&rho).re, 1.0, epsilon = 1e-12);
            // Hermitian
            for r in 0..s.dim() {
                for c in 0..s.dim() {
                    assert!((rho[r][c] - rho[c][r].conj()).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sinc_zero_kills_off_diagonal() {
        let s = sample_state();
        // Delta_{1,0} = 1.0; window with Delta T/2 = pi
        let big_t = 2.0 * std::f64::consts::PI;
        let rho = time_averaged_density(&s, big_t).unwrap();
        assert!(rho[0][1].norm() < 1e-14);
        assert!(rho[1][0].norm() < 1e-14);
    }

    #[test]
    fn long_window_limit_is_diagonal_mixture() {
        let s = sample_state();
        let rho = time_averaged_density(&s, 1e8).unwrap();
        for r in 0..s.dim() {
            for c in 0..s.dim() {
                if r == c {
                    assert_abs_diff_eq!(
                        rho[r][c].re,
                        s.coefficients[r].norm_sqr(),
                        epsilon = 1e-12
                    );
                } else {
                    assert!(rho[r][c].norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn purity_non_increasing_along_commensurate_windows() {
        let s = sample_state();
        let min_gap = 1.0; // smallest |E_n - E_m| of the sample state
        let mut last = purity(&density_at(&s, 0.0));
        for m in 1..=6 {
            let big_t = 2.0 * std::f64::consts::PI * m as f64 / min_gap;
            let p = purity(&time_averaged_density(&s, big_t).unwrap());
            assert!(p <= last + 1e-12, "purity rose at m={m}: {last} -> {p}");
            last = p;
        }
    }
}
