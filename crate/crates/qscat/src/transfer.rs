//! Transfer matrices, plane-wave reflection/transmission amplitudes and
//! stationary wave functions for piecewise-constant barriers.
//!
//! The matrix `M(x)` propagates the phase-space state
//! `chi = (psi, psi'/k)` from `x = 0` to `x`. Its entries are real for
//! real scattering length densities: below the critical wave vector the
//! trigonometric entries turn into hyperbolic ones with real coefficients,
//! which is handled analytically here so no complex matrix algebra is
//! needed anywhere in the composition.

use num_complex::Complex64;
use thiserror::Error;

use crate::barrier::{refractive_index, BarrierError, BarrierProfile};

#[derive(Debug, Error, PartialEq)]
pub enum TransferError {
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error("position {0} outside [0, L]")]
    OutOfRange(f64),
    #[error("fronting medium is evanescent at k = {0} (k^2 <= q_fronting)")]
    EvanescentFronting(f64),
}

/// Real 2x2 unimodular transfer matrix with entries A, B, C, D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Applies the matrix to a phase-space state.
    pub fn apply(&self, chi: &PhaseSpaceState) -> PhaseSpaceState {
        PhaseSpaceState {
            psi: self.a * chi.psi + self.b * chi.dpsi_over_k,
            dpsi_over_k: self.c * chi.psi + self.d * chi.dpsi_over_k,
        }
    }
}

/// The pair `(psi, psi'/k)` at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceState {
    pub psi: Complex64,
    pub dpsi_over_k: Complex64,
}

/// Flux diagnostics `alpha`, `beta`, `gamma`, `Sigma` of the scaled matrix;
/// defined only when both fronting and backing propagate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDiagnostics {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma_sum: f64,
}

/// Plane-wave solution at one wave vector.
#[derive(Debug, Clone)]
pub struct PlaneWaveSolution {
    pub k: f64,
    /// reflection amplitude (incident phase 1 at x = 0)
    pub r: Complex64,
    /// transmission amplitude
    pub t: Complex64,
    /// fronting index (real by construction)
    pub f: f64,
    /// backing index; positive-imaginary when evanescent
    pub b: Complex64,
    /// false when the backing is evanescent (`k^2 <= q_backing`); then `t`
    /// carries no flux and `|r| = 1`
    pub propagating_backing: bool,
    pub diagnostics: Option<FluxDiagnostics>,
}

impl PlaneWaveSolution {
    pub fn reflectivity(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmissivity(&self) -> f64 {
        if self.propagating_backing {
            self.t.norm_sqr()
        } else {
            0.0
        }
    }
}

// cos(sqrt(z)) continued to negative z as cosh(sqrt(-z))
fn cos_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        1.0 - z / 2.0 + z * z / 24.0
    } else if z > 0.0 {
        z.sqrt().cos()
    } else {
        (-z).sqrt().cosh()
    }
}

// sin(sqrt(z))/sqrt(z) continued to negative z as sinh(sqrt(-z))/sqrt(-z)
fn sinc_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        1.0 - z / 6.0 + z * z / 120.0
    } else if z > 0.0 {
        let s = z.sqrt();
        s.sin() / s
    } else {
        let s = (-z).sqrt();
        s.sinh() / s
    }
}

/// Transfer matrix of a single constant-density bin of the given width.
///
/// Entries are `[[cos(nkw), sin(nkw)/n], [-n sin(nkw), cos(nkw)]]`,
/// evaluated through `theta^2 = (k^2 - q) w^2` so they stay real on both
/// sides of the critical point and pass smoothly through it.
pub fn bin_matrix(q: f64, width: f64, k: f64) -> Result<TransferMatrix, TransferError> {
    if !(k > 0.0) {
        return Err(BarrierError::ZeroWaveVector.into());
    }
    let theta_sq = (k * k - q) * width * width;
    let c = cos_sqrt(theta_sq);
    let s = sinc_sqrt(theta_sq);
    Ok(TransferMatrix {
        a: c,
        b: k * width * s,
        c: (q / k - k) * width * s,
        d: c,
    })
}

/// Full transfer matrix `M(L) = M_J ... M_2 M_1` (first bin applied first).
pub fn compose(profile: &BarrierProfile, k: f64) -> Result<TransferMatrix, TransferError> {
    let mut m = TransferMatrix::IDENTITY;
    for bin in &profile.bins {
        m = bin_matrix(bin.q, bin.width, k)?.mul(&m);
    }
    Ok(m)
}

/// Transfer matrix from 0 to an interior position `x` in `[0, L]`:
/// completed bins to the left of `x`, plus a partial-width matrix for the
/// bin containing `x`.
pub fn partial_matrix(
    profile: &BarrierProfile,
    k: f64,
    x: f64,
) -> Result<TransferMatrix, TransferError> {
    let total = profile.total_length();
    if !(0.0..=total + 1e-12).contains(&x) {
        return Err(TransferError::OutOfRange(x));
    }
    let mut m = TransferMatrix::IDENTITY;
    let mut left = 0.0;
    for bin in &profile.bins {
        let right = left + bin.width;
        if x >= right {
            m = bin_matrix(bin.q, bin.width, k)?.mul(&m);
        } else {
            if x > left {
                m = bin_matrix(bin.q, x - left, k)?.mul(&m);
            }
            return Ok(m);
        }
        left = right;
    }
    Ok(m)
}

/// Solves the plane-wave problem at wave vector `k`:
/// `r = (fbB + C + i(fD - bA)) / (fbB - C + i(fD + bA))` and
/// `t = 2if e^{-ibkL} / (fbB - C + i(fD + bA))`.
pub fn plane_wave_amplitudes(
    profile: &BarrierProfile,
    k: f64,
) -> Result<PlaneWaveSolution, TransferError> {
    let nf = refractive_index(profile.q_fronting, k)?;
    if nf.im != 0.0 || nf.re == 0.0 {
        return Err(TransferError::EvanescentFronting(k));
    }
    let f = nf.re;
    let b = refractive_index(profile.q_backing, k)?;
    let propagating_backing = b.im == 0.0 && b.re > 0.0;
    let m = compose(profile, k)?;
    let (ma, mb, mc, md) = (m.a, m.b, m.c, m.d);
    let i = Complex64::i();
    let num = f * b * mb + mc + i * (f * md - b * ma);
    let den = f * b * mb - mc + i * (f * md + b * ma);
    let r = num / den;
    let length = profile.total_length();
    let t = 2.0 * i * f * (-i * b * k * length).exp() / den;
    let diagnostics = if propagating_backing {
        let br = b.re;
        let alpha = (br * ma * ma + mc * mc / br) / f;
        let beta = f * (br * mb * mb + md * md / br);
        let gamma = br * ma * mb + mc * md / br;
        Some(FluxDiagnostics {
            alpha,
            beta,
            gamma,
            sigma_sum: alpha + beta,
        })
    } else {
        None
    };
    Ok(PlaneWaveSolution {
        k,
        r,
        t,
        f,
        b,
        propagating_backing,
        diagnostics,
    })
}

/// Reflectivity from the Hilbert-Schmidt norm of the scaled matrix
/// `M~ = diag(sqrt b, 1/sqrt b) M diag(1/sqrt f, sqrt f)`:
/// `R = (Sigma - 2) / (Sigma + 2)` with `Sigma = ||M~||_HS^2`.
///
/// Independent of the amplitude route in [`plane_wave_amplitudes`]; both
/// must agree for propagating fronting and backing.
pub fn reflectivity_via_norm(profile: &BarrierProfile, k: f64) -> Result<f64, TransferError> {
    let nf = refractive_index(profile.q_fronting, k)?;
    if nf.im != 0.0 || nf.re == 0.0 {
        return Err(TransferError::EvanescentFronting(k));
    }
    let nb = refractive_index(profile.q_backing, k)?;
    if nb.im != 0.0 || nb.re == 0.0 {
        // total reflection from an evanescent backing
        return Ok(1.0);
    }
    let f = nf.re;
    let b = nb.re;
    let m = compose(profile, k)?;
    let at = (b / f).sqrt() * m.a;
    let bt = (b * f).sqrt() * m.b;
    let ct = m.c / (b * f).sqrt();
    let dt = (f / b).sqrt() * m.d;
    let sigma = at * at + bt * bt + ct * ct + dt * dt;
    Ok((sigma - 2.0) / (sigma + 2.0))
}

/// Stationary scattering state at any position on the axis.
///
/// Region I (`x < 0`): `e^{ifkx} + r e^{-ifkx}`; region III (`x > L`):
/// `t e^{ibkx}`; region II: the first component of
/// `M(x) chi_I(0)` with `chi_I(0) = (1 + r, i f (1 - r))`.
pub fn psi_stationary(
    profile: &BarrierProfile,
    pw: &PlaneWaveSolution,
    x: f64,
) -> Result<Complex64, TransferError> {
    let k = pw.k;
    let i = Complex64::i();
    let length = profile.total_length();
    if x < 0.0 {
        let phase = i * pw.f * k * x;
        Ok(phase.exp() + pw.r * (-phase).exp())
    } else if x > length {
        Ok(pw.t * (i * pw.b * k * x).exp())
    } else {
        let m = partial_matrix(profile, k, x)?;
        let chi0 = PhaseSpaceState {
            psi: 1.0 + pw.r,
            dpsi_over_k: i * pw.f * (1.0 - pw.r),
        };
        Ok(m.apply(&chi0).psi)
    }
}
