//! Gaussian wave-packet construction and propagation.
//!
//! Packets are superpositions of exact stationary scattering states,
//! `Psi(x,t) = integral p(k) e^{-ik x0} psi_k(x) e^{-ik^2 (t-t0)} dk`,
//! discretized on a composite-Simpson wave-vector grid. The free-space
//! closed form, the free propagator kernel, and the packet
//! autocorrelation `Delta(X,T)` provide independent cross-checks.
//!
//! Packets follow the unnormalized convention `p(kbar) = 1`; physical
//! ratios are always formed norm-relative.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::barrier::BarrierProfile;
use crate::transfer::{plane_wave_amplitudes, psi_stationary, TransferError};

#[derive(Debug, Error, PartialEq)]
pub enum PacketError {
    #[error("mean wave vector must be positive")]
    NonPositiveKbar,
    #[error("wave-vector spread must be positive")]
    NonPositiveDk,
    #[error("wave-vector grid needs at least 16 nodes")]
    TooFewNodes,
    #[error("x nodes must be strictly increasing")]
    NonMonotonicGrid,
    #[error("field domain too small: edge tail fraction {0:.3e} exceeds 1e-4")]
    DomainTooSmall(f64),
    #[error("x grids of the two fields differ")]
    GridMismatch,
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

/// Gaussian packet class parameters: mean wave vector, spread, initial
/// center and initial time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub kbar: f64,
    pub dk: f64,
    pub x0: f64,
    pub t0: f64,
}

impl PacketSpec {
    pub fn new(kbar: f64, dk: f64, x0: f64) -> Result<Self, PacketError> {
        if !(kbar > 0.0) {
            return Err(PacketError::NonPositiveKbar);
        }
        if !(dk > 0.0) {
            return Err(PacketError::NonPositiveDk);
        }
        Ok(PacketSpec {
            kbar,
            dk,
            x0,
            t0: 0.0,
        })
    }

    /// Initial spatial width `sigma_0 = 1/dk`.
    pub fn sigma0(&self) -> f64 {
        1.0 / self.dk
    }

    /// True when `kbar < 3 dk`; the negative-k truncation is then no
    /// longer negligible and callers should warn.
    pub fn is_broadband(&self) -> bool {
        self.kbar < 3.0 * self.dk
    }
}

/// Quadrature grid over wave vectors: strictly increasing positive nodes
/// with positive weights.
#[derive(Debug, Clone)]
pub struct KGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Complex field samples on an ordered position grid at one time.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub x_nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl WaveField {
    /// Trapezoid-rule norm `integral |psi|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        trapezoid_norm_sq(&self.x_nodes, &self.values)
    }
}

fn trapezoid_norm_sq(xs: &[f64], vals: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..xs.len() {
        let dx = xs[i] - xs[i - 1];
        acc += 0.5 * dx * (vals[i].norm_sqr() + vals[i - 1].norm_sqr());
    }
    acc
}

/// Unnormalized Gaussian weight `p(k) = exp(-(k-kbar)^2/(2 dk^2))`,
/// truncated to zero for `k <= 0`.
pub fn gaussian_weight(k: f64, spec: &PacketSpec) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    let u = (k - spec.kbar) / spec.dk;
    (-0.5 * u * u).exp()
}

/// Normalized class density `P(k) = exp(-(k-kbar)^2/dk^2) / (sqrt(pi) dk)`,
/// unit integral over the real line.
pub fn normalized_pdf(k: f64, spec: &PacketSpec) -> f64 {
    let u = (k - spec.kbar) / spec.dk;
    (-u * u).exp() / (std::f64::consts::PI.sqrt() * spec.dk)
}

const K_FLOOR: f64 = 1e-4;

/// Uniform composite-Simpson grid on
/// `[max(kbar - h dk, 1e-4), kbar + h dk]`; node count rounded up to odd.
pub fn kgrid(spec: &PacketSpec, n_nodes: usize, half_width_in_sigmas: f64) -> Result<KGrid, PacketError> {
    if n_nodes < 16 {
        return Err(PacketError::TooFewNodes);
    }
    let n = if n_nodes % 2 == 0 { n_nodes + 1 } else { n_nodes };
    let lo = (spec.kbar - half_width_in_sigmas * spec.dk).max(K_FLOOR);
    let hi = spec.kbar + half_width_in_sigmas * spec.dk;
    let h = (hi - lo) / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
    // Trapezoid weights: uniform interior weights keep the spatial replica
    // period at the full 2*pi/h. Alternating (Simpson-style) weights would add
    // a half-period sideband at 1/3 amplitude, contaminating wide windows.
    let weights: Vec<f64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    Ok(KGrid { nodes, weights })
}

/// Spread width `sigma(t) = sqrt(sigma0^2 + 4 T^2 / sigma0^2)`, `T = t - t0`.
pub fn sigma_t(t: f64, spec: &PacketSpec) -> f64 {
    let s0 = spec.sigma0();
    let big_t = t - spec.t0;
    (s0 * s0 + 4.0 * big_t * big_t / (s0 * s0)).sqrt()
}

/// Closed-form free packet
/// `Psi = sqrt(pi/A) exp(-(X - 2 kbar T)^2/(4A)) exp(i(kbar X - kbar^2 T))`
/// with `A = 1/(2 dk^2) + iT`, `X = x - x0`, `T = t - t0`.
///
/// This is the exact Gaussian integral of the plane-wave superposition
/// over the full k-line (no positivity truncation); peak modulus at the
/// initial instant is `sqrt(2 pi) dk`, matching the plain-dk measure used
/// by [`assemble_packet`].
pub fn free_packet_closed(x: f64, t: f64, spec: &PacketSpec) -> Complex64 {
    let big_x = x - spec.x0;
    let big_t = t - spec.t0;
    let a = Complex64::new(1.0 / (2.0 * spec.dk * spec.dk), big_t);
    let shift = big_x - 2.0 * spec.kbar * big_t;
    let envelope = (std::f64::consts::PI / a).sqrt() * (-(shift * shift) / (4.0 * a)).exp();
    let phase = Complex64::i() * (spec.kbar * big_x - spec.kbar * spec.kbar * big_t);
    envelope * phase.exp()
}

fn check_x_nodes(x_nodes: &[f64]) -> Result<(), PacketError> {
    if x_nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PacketError::NonMonotonicGrid);
    }
    Ok(())
}

// quadrature coefficient per node: w_i p(k_i) e^{-i k_i x0} e^{-i k_i^2 (t - t0)}
fn node_coefficients(spec: &PacketSpec, kg: &KGrid, t: f64) -> Vec<Complex64> {
    let big_t = t - spec.t0;
    kg.nodes
        .iter()
        .zip(&kg.weights)
        .map(|(&k, &w)| {
            let phase = -Complex64::i() * (k * spec.x0 + k * k * big_t);
            w * gaussian_weight(k, spec) * phase.exp()
        })
        .collect()
}

/// Superposes stationary scattering states into the packet field
/// `Psi(x,t)` on the given position grid.
pub fn assemble_packet(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    x_nodes: &[f64],
    t: f64,
) -> Result<WaveField, PacketError> {
    check_x_nodes(x_nodes)?;
    let pws: Vec<_> = kg
        .nodes
        .iter()
        .map(|&k| plane_wave_amplitudes(profile, k))
        .collect::<Result<_, _>>()?;
    let coefs = node_coefficients(spec, kg, t);
    let values: Vec<Complex64> = x_nodes
        .par_iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (pw, c) in pws.iter().zip(&coefs) {
                acc += c * psi_stationary(profile, pw, x).expect("x validated");
            }
            acc
        })
        .collect();
    Ok(WaveField {
        x_nodes: x_nodes.to_vec(),
        values,
        time: t,
    })
}

/// Region-restricted decomposition of the packet: (incident, reflected,
/// barrier, transmitted), each supported only on its region, summing
/// pointwise to the full field of [`assemble_packet`].
pub fn functional_split(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    x_nodes: &[f64],
    t: f64,
) -> Result<[WaveField; 4], PacketError> {
    check_x_nodes(x_nodes)?;
    let length = profile.total_length();
    let pws: Vec<_> = kg
        .nodes
        .iter()
        .map(|&k| plane_wave_amplitudes(profile, k))
        .collect::<Result<_, _>>()?;
    let coefs = node_coefficients(spec, kg, t);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::i();
    let parts: Vec<[Complex64; 4]> = x_nodes
        .par_iter()
        .map(|&x| {
            let mut out = [zero; 4];
            if x < 0.0 {
                for (pw, c) in pws.iter().zip(&coefs) {
                    let ph = i * pw.f * pw.k * x;
                    out[0] += c * ph.exp();
                    out[1] += c * pw.r * (-ph).exp();
                }
            } else if x <= length {
                for (pw, c) in pws.iter().zip(&coefs) {
                    out[2] += c * psi_stationary(profile, pw, x).expect("x validated");
                }
            } else {
                for (pw, c) in pws.iter().zip(&coefs) {
                    out[3] += c * pw.t * (i * pw.b * pw.k * x).exp();
                }
            }
            out
        })
        .collect();
    let field = |j: usize| WaveField {
        x_nodes: x_nodes.to_vec(),
        values: parts.iter().map(|p| p[j]).collect(),
        time: t,
    };
    Ok([field(0), field(1), field(2), field(3)])
}

/// Propagates a field freely from its own time to `t2` by convolution with
/// the free kernel `K0(x,t) = e^{i x^2/(4t)} / sqrt(4 pi i t)` (trapezoid
/// rule on the input grid).
///
/// Errors with `DomainTooSmall` when the outermost 2% of the input domain
/// on either side holds more than 1e-4 of the field norm, since the
/// truncated convolution tail is then no longer negligible.
pub fn propagate_free_kernel(
    field: &WaveField,
    t2: f64,
    x_out: &[f64],
) -> Result<WaveField, PacketError> {
    check_x_nodes(x_out)?;
    let dt = t2 - field.time;
    if dt.abs() < 1e-12 {
        return Ok(WaveField {
            x_nodes: x_out.to_vec(),
            values: resample_nearest(field, x_out),
            time: t2,
        });
    }
    let total = field.norm_sq();
    if total > 0.0 {
        let n = field.x_nodes.len();
        let edge = ((n as f64 * 0.02).ceil() as usize).max(2);
        let left = trapezoid_norm_sq(&field.x_nodes[..edge], &field.values[..edge]);
        let right = trapezoid_norm_sq(&field.x_nodes[n - edge..], &field.values[n - edge..]);
        let fraction = (left + right) / total;
        if fraction > 1e-4 {
            return Err(PacketError::DomainTooSmall(fraction));
        }
    }
    let norm = (Complex64::new(0.0, 4.0 * std::f64::consts::PI * dt)).sqrt();
    let xs = &field.x_nodes;
    let vals = &field.values;
    let values: Vec<Complex64> = x_out
        .par_iter()
        .map(|&xp| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..xs.len() {
                let dl = xp - xs[j - 1];
                let dr = xp - xs[j];
                let kl = (Complex64::i() * dl * dl / (4.0 * dt)).exp() * vals[j - 1];
                let kr = (Complex64::i() * dr * dr / (4.0 * dt)).exp() * vals[j];
                acc += 0.5 * (xs[j] - xs[j - 1]) * (kl + kr);
            }
            acc / norm
        })
        .collect();
    Ok(WaveField {
        x_nodes: x_out.to_vec(),
        values,
        time: t2,
    })
}

fn resample_nearest(field: &WaveField, x_out: &[f64]) -> Vec<Complex64> {
    x_out
        .iter()
        .map(|&x| {
            let idx = match field
                .x_nodes
                .binary_search_by(|p| p.partial_cmp(&x).unwrap())
            {
                Ok(i) => i,
                Err(i) => {
                    if i == 0 {
                        0
                    } else if i >= field.x_nodes.len() {
                        field.x_nodes.len() - 1
                    } else if x - field.x_nodes[i - 1] <= field.x_nodes[i] - x {
                        i - 1
                    } else {
                        i
                    }
                }
            };
            field.values[idx]
        })
        .collect()
}

/// Closed-form packet autocorrelation
/// `Delta(X,T) = (1/sqrt(2 pi s^2)) sqrt(pi/A') exp(-(X-2 kbar T)^2/(4A'))
///  exp(i(kbar X - kbar^2 T))` with `s = dk`, `A' = 1/(2 s^2) + iT`.
///
/// Normalization is fixed by `integral |w(k)|^2 dk = 1` for the class
/// density, which makes `Delta(0,0) = 1`.
pub fn delta_closed(big_x: f64, big_t: f64, spec: &PacketSpec) -> Complex64 {
    let s2 = spec.dk * spec.dk;
    let a = Complex64::new(1.0 / (2.0 * s2), big_t);
    let shift = big_x - 2.0 * spec.kbar * big_t;
    let pref = 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt();
    let envelope = (std::f64::consts::PI / a).sqrt() * (-(shift * shift) / (4.0 * a)).exp();
    let phase = Complex64::i() * (spec.kbar * big_x - spec.kbar * spec.kbar * big_t);
    pref * envelope * phase.exp()
}

/// Quadrature route to `Delta(X,T)`: integrates
/// `e^{i(kX - k^2 T)} |w(k)|^2 dk` with the normalized class density
/// `|w(k)|^2 = exp(-(k-kbar)^2/(2 dk^2)) / (sqrt(2 pi) dk)` over the
/// packet's k-grid support.
pub fn delta_quadrature(big_x: f64, big_t: f64, spec: &PacketSpec) -> Complex64 {
    let kg = kgrid(spec, 4097, 7.0).expect("static node count");
    let s = spec.dk;
    let pref = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * s);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&k, &w) in kg.nodes.iter().zip(&kg.weights) {
        let u = (k - spec.kbar) / s;
        let density = pref * (-0.5 * u * u).exp();
        let phase = Complex64::i() * (k * big_x - k * k * big_t);
        acc += w * density * phase.exp();
    }
    acc
}
