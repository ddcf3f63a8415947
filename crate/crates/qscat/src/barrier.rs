//! Piecewise-constant barrier profiles and the per-bin index of refraction.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BarrierError {
    #[error("bin {0} has non-positive or non-finite width")]
    NonPositiveWidth(usize),
    #[error("bin {0} has non-finite scattering length density")]
    NonFiniteDensity(usize),
    #[error("fronting/backing density is not finite")]
    NonFiniteMedium,
    #[error("wave vector must be positive")]
    ZeroWaveVector,
    #[error("no samples supplied")]
    EmptySamples,
}

/// One constant-density slab: scattering length density `q` (inverse
/// length squared, `q = 4 pi rho`) over a width `w > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub q: f64,
    pub width: f64,
}

/// Ordered contiguous bins supported on `[0, L]`, with semi-infinite
/// fronting (`x < 0`) and backing (`x > L`) media. An empty bin list is a
/// pure Fresnel step between fronting and backing.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierProfile {
    pub bins: Vec<Bin>,
    pub q_fronting: f64,
    pub q_backing: f64,
}

impl BarrierProfile {
    /// Validates and returns the profile. Vacuum fronting and backing.
    pub fn new(bins: Vec<Bin>) -> Result<Self, BarrierError> {
        Self::with_media(bins, 0.0, 0.0)
    }

    pub fn with_media(
        bins: Vec<Bin>,
        q_fronting: f64,
        q_backing: f64,
    ) -> Result<Self, BarrierError> {
        let profile = BarrierProfile {
            bins,
            q_fronting,
            q_backing,
        };
        profile.validate()
    }

    /// Checks the profile invariants, returning the profile unchanged when
    /// they hold. Errors name the offending bin index.
    pub fn validate(self) -> Result<Self, BarrierError> {
        for (j, bin) in self.bins.iter().enumerate() {
            if !(bin.width > 0.0) || !bin.width.is_finite() {
                return Err(BarrierError::NonPositiveWidth(j));
            }
            if !bin.q.is_finite() {
                return Err(BarrierError::NonFiniteDensity(j));
            }
        }
        if !self.q_fronting.is_finite() || !self.q_backing.is_finite() {
            return Err(BarrierError::NonFiniteMedium);
        }
        Ok(self)
    }

    /// Total barrier length `L`.
    pub fn total_length(&self) -> f64 {
        self.bins.iter().map(|b| b.width).sum()
    }

    /// Left edges of each bin plus the final edge `L`.
    pub fn edges(&self) -> Vec<f64> {
        let mut edges = Vec::with_capacity(self.bins.len() + 1);
        let mut x = 0.0;
        edges.push(x);
        for bin in &self.bins {
            x += bin.width;
            edges.push(x);
        }
        edges
    }

    /// Density at position `x` (fronting for `x < 0`, backing for `x >= L`).
    pub fn q_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            return self.q_fronting;
        }
        let mut left = 0.0;
        for bin in &self.bins {
            if x < left + bin.width {
                return bin.q;
            }
            left += bin.width;
        }
        self.q_backing
    }
}

/// Index of refraction `n(k) = sqrt(1 - q/k^2)`.
///
/// Below the critical wave vector (`k^2 < q`) the branch with positive
/// imaginary part is taken, so that `exp(i n k x)` decays into the medium.
pub fn refractive_index(q: f64, k: f64) -> Result<Complex64, BarrierError> {
    if !(k > 0.0) {
        return Err(BarrierError::ZeroWaveVector);
    }
    let s = 1.0 - q / (k * k);
    if s >= 0.0 {
        Ok(Complex64::new(s.sqrt(), 0.0))
    } else {
        Ok(Complex64::new(0.0, (-s).sqrt()))
    }
}

/// Collapses point samples of `q(x)` into `n_bins` equal-width bins, each
/// carrying the mean of `q` over its interval (trapezoid average of the
/// piecewise-linear interpolant through the samples).
pub fn discretize(samples: &[(f64, f64)], n_bins: usize) -> Result<BarrierProfile, BarrierError> {
    if samples.len() < 2 || n_bins == 0 {
        return Err(BarrierError::EmptySamples);
    }
    let x0 = samples[0].0;
    let x1 = samples[samples.len() - 1].0;
    if !(x1 > x0) {
        return Err(BarrierError::EmptySamples);
    }
    let width = (x1 - x0) / n_bins as f64;
    let qs: Vec<f64> = (0..n_bins)
        .map(|i| {
            let a = x0 + i as f64 * width;
            let b = a + width;
            mean_over(samples, a, b)
        })
        .collect();
    BarrierProfile::new(qs.into_iter().map(|q| Bin { q, width }).collect())
}

/// Mean of the piecewise-linear interpolant of `samples` over `[a, b]`.
fn mean_over(samples: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let interp = |x: f64| -> f64 {
        match samples.iter().position(|&(sx, _)| sx >= x) {
            Some(0) => samples[0].1,
            None => samples[samples.len() - 1].1,
            Some(i) => {
                let (xl, ql) = samples[i - 1];
                let (xr, qr) = samples[i];
                if xr > xl {
                    ql + (qr - ql) * (x - xl) / (xr - xl)
                } else {
                    qr
                }
            }
        }
    };
    // integrate the interpolant over [a,b]: breakpoints are the sample
    // abscissae inside the interval, the interpolant is linear between them
    let mut pts: Vec<f64> = vec![a];
    for &(sx, _) in samples {
        if sx > a && sx < b {
            pts.push(sx);
        }
    }
    pts.push(b);
    let mut integral = 0.0;
    for w in pts.windows(2) {
        integral += 0.5 * (interp(w[0]) + interp(w[1])) * (w[1] - w[0]);
    }
    integral / (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn well_formed_profile_validates() {
        let p = BarrierProfile::new(vec![Bin { q: 1.0, width: 2.0 }]).unwrap();
        assert_eq!(p.total_length(), 2.0);
    }

    #[test]
    fn zero_width_bin_rejected() {
        let err = BarrierProfile::new(vec![Bin { q: 1.0, width: 0.0 }]).unwrap_err();
        assert_eq!(err, BarrierError::NonPositiveWidth(0));
    }

    #[test]
    fn non_finite_density_rejected() {
        let err = BarrierProfile::new(vec![
            Bin { q: 0.0, width: 1.0 },
            Bin {
                q: f64::NAN,
                width: 1.0,
            },
        ])
        .unwrap_err();
        assert_eq!(err, BarrierError::NonFiniteDensity(1));
    }

    #[test]
    fn empty_profile_is_fresnel_step() {
        let p = BarrierProfile::with_media(vec![], 0.0, 0.5).unwrap();
        assert_eq!(p.total_length(), 0.0);
    }

    #[test]
    fn refractive_index_vacuum() {
        assert_eq!(refractive_index(0.0, 0.7).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn refractive_index_direct_values() {
        let n = refractive_index(0.75, 1.0).unwrap();
        assert_abs_diff_eq!(n.re, 0.5, epsilon = 1e-15);
        assert_eq!(n.im, 0.0);
        let n = refractive_index(2.0, 1.0).unwrap();
        assert_eq!(n.re, 0.0);
        assert_abs_diff_eq!(n.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn refractive_index_rejects_bad_k() {
        assert_eq!(
            refractive_index(1.0, 0.0).unwrap_err(),
            BarrierError::ZeroWaveVector
        );
        assert_eq!(
            refractive_index(1.0, -1.0).unwrap_err(),
            BarrierError::ZeroWaveVector
        );
    }

    #[test]
    fn refractive_index_continuous_at_critical_point() {
        let q: f64 = 1.3;
        let kc = q.sqrt();
        for eps in [1e-3f64, 1e-5, 1e-7] {
            let above = refractive_index(q, kc * (1.0 + eps)).unwrap();
            let below = refractive_index(q, kc * (1.0 - eps)).unwrap();
            assert!(above.norm() < 2.0 * eps.sqrt());
            assert!(below.norm() < 2.0 * eps.sqrt());
        }
    }

    #[test]
    fn attractive_well_index_exceeds_one() {
        for k in [0.1, 0.5, 1.0, 4.0] {
            let n = refractive_index(-0.8, k).unwrap();
            assert!(n.im == 0.0 && n.re > 1.0);
        }
    }

    #[test]
    fn discretize_constant_profile() {
        let samples: Vec<(f64, f64)> = (0..=40).map(|i| (i as f64 * 0.1, 1.0)).collect();
        let p = discretize(&samples, 4).unwrap();
        assert_eq!(p.bins.len(), 4);
        for bin in &p.bins {
            assert_abs_diff_eq!(bin.q, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(bin.width, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn discretize_linear_ramp_means() {
        let samples: Vec<(f64, f64)> = (0..=200).map(|i| {
            let x = i as f64 * 0.01;
            (x, x)
        }).collect();
        let p = discretize(&samples, 2).unwrap();
        assert_abs_diff_eq!(p.bins[0].q, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(p.bins[1].q, 1.5, epsilon = 1e-10);
    }

    #[test]
    fn discretize_single_bin_collapse() {
        let samples = vec![(0.0, 2.0), (1.0, 4.0)];
        let p = discretize(&samples, 1).unwrap();
        assert_eq!(p.bins.len(), 1);
        assert_abs_diff_eq!(p.bins[0].q, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn discretize_idempotent_on_aligned_piecewise_constant() {
        // samples already piecewise constant on bins aligned with edges
        let mut samples = Vec::new();
        for i in 0..=100 {
            let x = i as f64 * 0.02; // [0, 2]
            let q = if x < 1.0 { 0.3 } else { 0.9 };
            samples.push((x, q));
        }
        // sampling is dense so the jump contributes O(dx) to one bin mean only
        let p = discretize(&samples, 2).unwrap();
        assert_abs_diff_eq!(p.bins[0].q, 0.3, epsilon = 0.01);
        assert_abs_diff_eq!(p.bins[1].q, 0.9, epsilon = 0.01);
    }

    #[test]
    fn q_at_regions() {
        let p = BarrierProfile::with_media(
            vec![Bin { q: 1.0, width: 1.0 }, Bin { q: 2.0, width: 1.0 }],
            -0.5,
            0.25,
        )
        .unwrap();
        assert_eq!(p.q_at(-1.0), -0.5);
        assert_eq!(p.q_at(0.5), 1.0);
        assert_eq!(p.q_at(1.5), 2.0);
        assert_eq!(p.q_at(2.5), 0.25);
    }
}
