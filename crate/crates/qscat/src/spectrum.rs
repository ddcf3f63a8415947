//! Reflection/transmission spectra: finite-time projection amplitudes,
//! their analytic asymptotes, the coherent reflectivity of a packet class,
//! and instrument-resolution smearing.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::barrier::BarrierProfile;
use crate::packet::{assemble_packet, gaussian_weight, normalized_pdf, sigma_t, KGrid, PacketSpec, PacketError};
use crate::transfer::{plane_wave_amplitudes, TransferError};

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("k values must be strictly increasing")]
    NonMonotonicK,
    #[error("reflectivity bound violated at k = {k}: value {value}")]
    BoundViolated { k: f64, value: f64 },
    #[error("x window too small: truncation tail fraction {0:.3e} exceeds 1e-3")]
    WindowTooSmall(f64),
    #[error("spectrum grid too coarse for convolution: spacing {spacing} > dk_inst/10 = {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("instrument kernel undefined for dk_inst = 0; use the delta path")]
    ZeroWidth,
    #[error("k_m = {0} outside the sampled spectrum range; extrapolation forbidden")]
    ExtrapolationForbidden(f64),
    #[error("backing medium does not propagate at k = {0}")]
    NonPropagatingBacking(f64),
    #[error(
        "k grid too coarse for this window: replica period {period} < window span {span}; \
         increase the quadrature node count"
    )]
    KGridAliased { period: f64, span: f64 },
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Packet(#[from] PacketError),
}

/// What a [`Spectrum`]'s values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// plane-wave reflectivity |r_pw|^2
    PlaneWaveReflectivity,
    /// plane-wave transmissivity |t_pw|^2
    PlaneWaveTransmissivity,
    /// finite-time complex reflection amplitude r(k,t)
    TimedReflection,
    /// finite-time complex transmission amplitude t(k,t)
    TimedTransmission,
    /// coherent packet-class reflectivity R_coh
    CoherentReflectivity,
    /// resolution-convolved measured reflectivity R_meas
    MeasuredReflectivity,
}

impl SpectrumKind {
    /// Kinds whose values are probabilities bounded by 1.
    pub fn is_bounded_real(self) -> bool {
        matches!(
            self,
            SpectrumKind::PlaneWaveReflectivity
                | SpectrumKind::CoherentReflectivity
                | SpectrumKind::MeasuredReflectivity
        )
    }
}

/// Packet-class and run metadata carried alongside spectrum samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpectrumMeta {
    pub kbar: Option<f64>,
    pub dk: Option<f64>,
    pub gamma: Option<f64>,
    pub t: Option<f64>,
    pub dk_inst: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub k_values: Vec<f64>,
    pub values: Vec<Complex64>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    pub fn new(
        kind: SpectrumKind,
        k_values: Vec<f64>,
        values: Vec<Complex64>,
        meta: SpectrumMeta,
    ) -> Result<Spectrum, SpectrumError> {
        if k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpectrumError::NonMonotonicK);
        }
        if kind.is_bounded_real() {
            for (&k, v) in k_values.iter().zip(&values) {
                if !((-1e-9..=1.0 + 1e-9).contains(&v.re)) || v.im != 0.0 {
                    return Err(SpectrumError::BoundViolated { k, value: v.re });
                }
            }
        }
        Ok(Spectrum {
            kind,
            k_values,
            values,
            meta,
        })
    }
}

/// Plane-wave `R(k)` and `T(k)` over the given wave vectors.
pub fn plane_wave_spectra(
    profile: &BarrierProfile,
    ks: &[f64],
) -> Result<(Spectrum, Spectrum), SpectrumError> {
    let mut r_vals = Vec::with_capacity(ks.len());
    let mut t_vals = Vec::with_capacity(ks.len());
    for &k in ks {
        let pw = plane_wave_amplitudes(profile, k)?;
        r_vals.push(Complex64::new(pw.reflectivity(), 0.0));
        t_vals.push(Complex64::new(pw.transmissivity(), 0.0));
    }
    Ok((
        Spectrum::new(
            SpectrumKind::PlaneWaveReflectivity,
            ks.to_vec(),
            r_vals,
            SpectrumMeta::default(),
        )?,
        Spectrum::new(
            SpectrumKind::PlaneWaveTransmissivity,
            ks.to_vec(),
            t_vals,
            SpectrumMeta::default(),
        )?,
    ))
}

// Shared machinery for finite-time projections: assemble the packet once
// on a window-spanning Simpson grid, then project every requested k.
fn timed_projection(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    ks: &[f64],
    t: f64,
    x_window: (f64, f64),
    sign: f64,
) -> Result<Vec<Complex64>, SpectrumError> {
    let (x_lo, x_hi) = x_window;
    // the discrete k quadrature replicates the field with period
    // 2 pi / (k spacing); the window must fit inside one replica cell
    let k_spacing = kg
        .nodes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let period = 2.0 * std::f64::consts::PI / k_spacing;
    if period < x_hi - x_lo {
        return Err(SpectrumError::KGridAliased {
            period,
            span: x_hi - x_lo,
        });
    }
    let k_content = kg.nodes.last().copied().unwrap_or(spec.kbar + 6.0 * spec.dk);
    let k_query = ks.iter().cloned().fold(0.0f64, f64::max);
    // highest beat frequency in the projected integrand
    let freq = k_content + k_query;
    let dx_max = (2.0 * std::f64::consts::PI / freq) / 16.0;
    let mut n = ((x_hi - x_lo) / dx_max).ceil() as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    let h = (x_hi - x_lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| x_lo + h * i as f64).collect();
    let field = assemble_packet(profile, spec, kg, &xs, t)?;
    // truncation audit: field norm leaking past the window edges
    let total = field.norm_sq();
    if total > 0.0 {
        let edge = ((n as f64 * 0.02).ceil() as usize).max(2);
        let part = |lo: usize, hi: usize| {
            let mut acc = 0.0;
            for i in lo + 1..hi {
                acc += 0.5 * h * (field.values[i].norm_sqr() + field.values[i - 1].norm_sqr());
            }
            acc
        };
        let fraction = (part(0, edge) + part(n - edge, n)) / total;
        if fraction > 1e-3 {
            return Err(SpectrumError::WindowTooSmall(fraction));
        }
    }
    Ok(ks
        .par_iter()
        .map(|&k| {
            // composite Simpson of e^{+-ikx} Psi(x,t)
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, (&x, v)) in xs.iter().zip(&field.values).enumerate() {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += c * (Complex64::i() * sign * k * x).exp() * v;
            }
            acc * h / 3.0
        })
        .collect())
}

/// Default projection window for time `t`: generous envelopes around the
/// incident/reflected and transmitted packet centers.
pub fn default_window(profile: &BarrierProfile, spec: &PacketSpec, t: f64) -> (f64, f64) {
    let sig = sigma_t(t, spec);
    let v = 2.0 * spec.kbar;
    (
        spec.x0 - 8.0 * sig - v * t,
        profile.total_length() + v * t + 8.0 * sig,
    )
}

/// Finite-time reflection amplitude `r(k,t) = integral e^{ikx} Psi(x,t) dx`
/// for a batch of wave vectors; the packet is assembled once.
pub fn timed_reflection_spectrum(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    ks: &[f64],
    t: f64,
    x_window: (f64, f64),
) -> Result<Spectrum, SpectrumError> {
    let values = timed_projection(profile, spec, kg, ks, t, x_window, 1.0)?;
    Spectrum::new(
        SpectrumKind::TimedReflection,
        ks.to_vec(),
        values,
        SpectrumMeta {
            kbar: Some(spec.kbar),
            dk: Some(spec.dk),
            t: Some(t),
            ..Default::default()
        },
    )
}

/// Single-k convenience wrapper around [`timed_reflection_spectrum`].
pub fn reflection_amplitude_timed(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    k: f64,
    t: f64,
    x_window: (f64, f64),
) -> Result<Complex64, SpectrumError> {
    Ok(timed_projection(profile, spec, kg, &[k], t, x_window, 1.0)?[0])
}

/// Finite-time transmission amplitude `t(k,t) = integral e^{-ikx} Psi dx`.
pub fn timed_transmission_spectrum(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    kg: &KGrid,
    ks: &[f64],
    t: f64,
    x_window: (f64, f64),
) -> Result<Spectrum, SpectrumError> {
    let values = timed_projection(profile, spec, kg, ks, t, x_window, -1.0)?;
    Spectrum::new(
        SpectrumKind::TimedTransmission,
        ks.to_vec(),
        values,
        SpectrumMeta {
            kbar: Some(spec.kbar),
            dk: Some(spec.dk),
            t: Some(t),
            ..Default::default()
        },
    )
}

/// Long-time limit of the reflection projection:
/// `2 pi e^{-i k x0} p(k) r_pw(k)` (up to the free phase `e^{-ik^2 t}`,
/// which drops out of the modulus).
pub fn reflection_amplitude_asymptotic(
    spec: &PacketSpec,
    profile: &BarrierProfile,
    k: f64,
) -> Result<Complex64, SpectrumError> {
    let pw = plane_wave_amplitudes(profile, k)?;
    let phase = (-Complex64::i() * k * spec.x0).exp();
    Ok(2.0 * std::f64::consts::PI * gaussian_weight(k, spec) * phase * pw.r)
}

/// Transmission analog of [`reflection_amplitude_asymptotic`]:
/// `2 pi e^{-i k x0} p(k) t_pw(k)`. Derived by analogy and cross-checked
/// against the finite-time projection; requires a propagating backing.
pub fn transmission_amplitude_asymptotic(
    spec: &PacketSpec,
    profile: &BarrierProfile,
    k: f64,
) -> Result<Complex64, SpectrumError> {
    let pw = plane_wave_amplitudes(profile, k)?;
    if !pw.propagating_backing {
        return Err(SpectrumError::NonPropagatingBacking(k));
    }
    let phase = (-Complex64::i() * k * spec.x0).exp();
    Ok(2.0 * std::f64::consts::PI * gaussian_weight(k, spec) * phase * pw.t)
}

/// Class normalization `gamma = dk / (4 pi^{3/2})`, chosen so the peak of
/// `4 pi^2 gamma P(k)` is exactly 1.
pub fn gamma_norm(dk: f64) -> f64 {
    dk / (4.0 * std::f64::consts::PI.powf(1.5))
}

/// Coherent packet-class reflectivity
/// `R_coh(k) = 4 pi^2 gamma P(k) R_pw(k) = e^{-(k-kbar)^2/dk^2} R_pw(k)`.
pub fn reflectivity_coherent(
    profile: &BarrierProfile,
    spec: &PacketSpec,
    k_values: &[f64],
) -> Result<Spectrum, SpectrumError> {
    let gamma = gamma_norm(spec.dk);
    let scale = 4.0 * std::f64::consts::PI * std::f64::consts::PI * gamma;
    let mut values = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let pw = plane_wave_amplitudes(profile, k)?;
        let v = scale * normalized_pdf(k, spec) * pw.reflectivity();
        values.push(Complex64::new(v, 0.0));
    }
    Spectrum::new(
        SpectrumKind::CoherentReflectivity,
        k_values.to_vec(),
        values,
        SpectrumMeta {
            kbar: Some(spec.kbar),
            dk: Some(spec.dk),
            gamma: Some(gamma),
            ..Default::default()
        },
    )
}

/// Detector-side resolution: Gaussian spread of assigned wave vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionModel {
    pub dk_inst: f64,
}

/// Un-normalized instrument kernel `exp(-eps^2 / dk_inst^2)`.
pub fn instrument_kernel(eps_offset: f64, model: &ResolutionModel) -> Result<f64, SpectrumError> {
    if model.dk_inst == 0.0 {
        return Err(SpectrumError::ZeroWidth);
    }
    let u = eps_offset / model.dk_inst;
    Ok((-u * u).exp())
}

/// Measured spectrum `R_meas(k_m) = integral P_inst(k_m - k) R_coh(k) dk`
/// by the trapezoid rule on the input spectrum's grid. `dk_inst = 0`
/// resamples the input (delta-kernel limit). `km_values` must lie within
/// the sampled range.
pub fn resolution_convolve(
    rcoh: &Spectrum,
    model: &ResolutionModel,
    km_values: &[f64],
) -> Result<Spectrum, SpectrumError> {
    let ks = &rcoh.k_values;
    let lo = ks[0];
    let hi = *ks.last().unwrap();
    for &km in km_values {
        if km < lo || km > hi {
            return Err(SpectrumError::ExtrapolationForbidden(km));
        }
    }
    let meta = SpectrumMeta {
        dk_inst: Some(model.dk_inst),
        ..rcoh.meta
    };
    if model.dk_inst == 0.0 {
        let values = km_values.iter().map(|&km| interp(rcoh, km)).collect();
        return Spectrum::new(SpectrumKind::MeasuredReflectivity, km_values.to_vec(), values, meta);
    }
    let max_spacing = ks
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let limit = model.dk_inst / 10.0;
    if max_spacing > limit {
        return Err(SpectrumError::GridTooCoarse {
            spacing: max_spacing,
            limit,
        });
    }
    let values: Vec<Complex64> = km_values
        .iter()
        .map(|&km| {
            let mut acc = 0.0;
            for i in 1..ks.len() {
                let fl = instrument_kernel(km - ks[i - 1], model).unwrap() * rcoh.values[i - 1].re;
                let fr = instrument_kernel(km - ks[i], model).unwrap() * rcoh.values[i].re;
                acc += 0.5 * (ks[i] - ks[i - 1]) * (fl + fr);
            }
            Complex64::new(acc, 0.0)
        })
        .collect();
    Spectrum::new(SpectrumKind::MeasuredReflectivity, km_values.to_vec(), values, meta)
}

fn interp(s: &Spectrum, k: f64) -> Complex64 {
    let ks = &s.k_values;
    match ks.binary_search_by(|p| p.partial_cmp(&k).unwrap()) {
        Ok(i) => s.values[i],
        Err(i) => {
            let (i0, i1) = (i - 1, i);
            let w = (k - ks[i0]) / (ks[i1] - ks[i0]);
            s.values[i0] * (1.0 - w) + s.values[i1] * w
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::Bin;
    use crate::packet::kgrid;
    use approx::assert_abs_diff_eq;

    fn default_barrier() -> BarrierProfile {
        BarrierProfile::new(vec![
            Bin { q: 1.0, width: 1.0 },
            Bin { q: 0.0, width: 4.0 },
            Bin { q: 1.0, width: 1.0 },
        ])
        .unwrap()
    }

    fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + h * i as f64).collect()
    }

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(gamma_norm(0.025), 0.0011220, epsilon = 1e-6);
        assert_abs_diff_eq!(gamma_norm(0.25), 0.011220, epsilon = 1e-5);
        // peak enforcement: 4 pi^2 gamma P(kbar) = 1
        let spec = PacketSpec::new(1.0, 0.25, -15.0).unwrap();
        let peak = 4.0 * std::f64::consts::PI * std::f64::consts::PI
            * gamma_norm(spec.dk)
            * normalized_pdf(spec.kbar, &spec);
        assert_abs_diff_eq!(peak, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_reflectivity_bounded_and_zeroed() {
        let p = default_barrier();
        for &dk in &[0.025, 0.25] {
            let spec = PacketSpec::new(1.0, dk, -15.0).unwrap();
            let ks = linspace(0.05, 2.0, 800);
            let s = reflectivity_coherent(&p, &spec, &ks).unwrap();
            for v in &s.values {
                assert!(v.re <= 1.0 + 1e-9 && v.re >= 0.0);
            }
        }
        // zeros of R_pw are zeros of R_coh
        let spec = PacketSpec::new(1.0, 0.25, -15.0).unwrap();
        let mut k_zero = 0.0;
        let mut best = f64::INFINITY;
        for &k in &linspace(0.9, 1.2, 4001) {
            let r = plane_wave_amplitudes(&p, k).unwrap().reflectivity();
            if r < best {
                best = r;
                k_zero = k;
            }
        }
        assert!(best < 1e-6, "expected an R_pw zero near k=1, got {best}");
        let s = reflectivity_coherent(&p, &spec, &[k_zero]).unwrap();
        assert!(s.values[0].re < 1e-6);
    }

    #[test]
    fn asymptotic_amplitude_properties() {
        let p = default_barrier();
        let spec = PacketSpec::new(1.0, 0.4, -15.0).unwrap();
        let a = reflection_amplitude_asymptotic(&spec, &p, spec.kbar).unwrap();
        let pw = plane_wave_amplitudes(&p, spec.kbar).unwrap();
        assert_abs_diff_eq!(
            a.norm(),
            2.0 * std::f64::consts::PI * pw.r.norm(),
            epsilon = 1e-12
        );
        // modulus independent of x0
        let spec2 = PacketSpec::new(1.0, 0.4, -42.0).unwrap();
        let a2 = reflection_amplitude_asymptotic(&spec2, &p, 0.8).unwrap();
        let a1 = reflection_amplitude_asymptotic(&spec, &p, 0.8).unwrap();
        assert_abs_diff_eq!(a1.norm(), a2.norm(), epsilon = 1e-12);
    }

    #[test]
    fn empty_barrier_timed_reflection_vanishes() {
        let p = BarrierProfile::new(vec![]).unwrap();
        let spec = PacketSpec::new(1.0, 0.4, -15.0).unwrap();
        let kg = kgrid(&spec, 513, 6.0).unwrap();
        let t = 10.0;
        let w = default_window(&p, &spec, t);
        let r = reflection_amplitude_timed(&p, &spec, &kg, 1.0, t, w).unwrap();
        // scale: asymptotic transmitted amplitude is 2 pi at its peak
        assert!(r.norm() < 0.05, "got {}", r.norm());
    }

    #[test]
    fn window_too_small_detected() {
        let p = default_barrier();
        let spec = PacketSpec::new(1.0, 0.4, -15.0).unwrap();
        let kg = kgrid(&spec, 257, 6.0).unwrap();
        let result = reflection_amplitude_timed(&p, &spec, &kg, 1.0, 0.0, (-18.0, -12.0));
        assert!(matches!(result, Err(SpectrumError::WindowTooSmall(_))));
    }

    #[test]
    fn timed_reflection_approaches_asymptote() {
        let p = default_barrier();
        let spec = PacketSpec::new(1.0, 0.4, -15.0).unwrap();
        // 2049 nodes keep the replica period beyond the t=150 window
        let kg = kgrid(&spec, 2049, 6.0).unwrap();
        let ks = linspace(0.6, 1.4, 33);
        let asym: Vec<f64> = ks
            .iter()
            .map(|&k| {
                reflection_amplitude_asymptotic(&spec, &p, k)
                    .unwrap()
                    .norm()
            })
            .collect();
        let max_asym = asym.iter().cloned().fold(0.0f64, f64::max);
        let deviation = |t: f64| {
            let s =
                timed_reflection_spectrum(&p, &spec, &kg, &ks, t, default_window(&p, &spec, t))
                    .unwrap();
            s.values
                .iter()
                .zip(&asym)
                .map(|(v, &a)| (v.norm() - a).abs())
                .fold(0.0f64, f64::max)
                / max_asym
        };
        let d30 = deviation(30.0);
        let d150 = deviation(150.0);
        assert!(d150 < d30, "deviation should shrink: {d30} -> {d150}");
        assert!(d150 < 0.05, "t=150 deviation {d150}");
    }

    #[test]
    fn timed_transmission_matches_asymptote_single_bin() {
        let p = BarrierProfile::new(vec![Bin { q: 1.0, width: 2.0 }]).unwrap();
        let spec = PacketSpec::new(1.3, 0.4, -15.0).unwrap();
        let kg = kgrid(&spec, 2049, 6.0).unwrap();
        let t = 150.0;
        let s = timed_transmission_spectrum(
            &p,
            &spec,
            &kg,
            &[spec.kbar],
            t,
            default_window(&p, &spec, t),
        )
        .unwrap();
        let asym = transmission_amplitude_asymptotic(&spec, &p, spec.kbar).unwrap();
        let rel = (s.values[0].norm() - asym.norm()).abs() / asym.norm();
        assert!(rel < 0.05, "relative deviation {rel}");
    }

    #[test]
    fn instrument_kernel_values() {
        let m = ResolutionModel { dk_inst: 0.05 };
        assert_eq!(instrument_kernel(0.0, &m).unwrap(), 1.0);
        assert_abs_diff_eq!(
            instrument_kernel(0.05, &m).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-14
        );
        assert_eq!(
            instrument_kernel(0.02, &m).unwrap(),
            instrument_kernel(-0.02, &m).unwrap()
        );
        assert_eq!(
            instrument_kernel(0.1, &ResolutionModel { dk_inst: 0.0 }).unwrap_err(),
            SpectrumError::ZeroWidth
        );
    }

    #[test]
    fn convolve_constant_spectrum() {
        let ks = linspace(0.2, 1.8, 2001);
        let values = vec![Complex64::new(0.5, 0.0); ks.len()];
        let s = Spectrum::new(
            SpectrumKind::CoherentReflectivity,
            ks,
            values,
            SpectrumMeta::default(),
        )
        .unwrap();
        let m = ResolutionModel { dk_inst: 0.05 };
        let out = resolution_convolve(&s, &m, &[1.0]).unwrap();
        let expected = 0.5 * std::f64::consts::PI.sqrt() * m.dk_inst;
        assert_abs_diff_eq!(out.values[0].re, expected, epsilon = 1e-6);
    }

    #[test]
    fn convolve_delta_limit_resamples() {
        let p = default_barrier();
        let spec = PacketSpec::new(1.0, 0.25, -15.0).unwrap();
        let ks = linspace(0.2, 1.8, 801);
        let s = reflectivity_coherent(&p, &spec, &ks).unwrap();
        let m = ResolutionModel { dk_inst: 0.0 };
        let out = resolution_convolve(&s, &m, &ks).unwrap();
        for (a, b) in out.values.iter().zip(&s.values) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn convolve_fills_zeros() {
        let p = default_barrier();
        let spec = PacketSpec::new(1.0, 0.025, -15.0).unwrap();
        let ks = linspace(0.85, 1.15, 3001);
        let s = reflectivity_coherent(&p, &spec, &ks).unwrap();
        let min_coh = s.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        assert!(min_coh < 1e-9);
        let m = ResolutionModel { dk_inst: 0.05 };
        let out = resolution_convolve(&s, &m, &linspace(0.95, 1.1, 31)).unwrap();
        let min_meas = out.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        assert!(min_meas > 1e-6, "zeros should be filled, min {min_meas}");
    }

    #[test]
    fn convolve_rejects_coarse_grid() {
        let ks = linspace(0.2, 1.8, 41);
        let s = Spectrum::new(
            SpectrumKind::CoherentReflectivity,
            ks.clone(),
            vec![Complex64::new(0.1, 0.0); ks.len()],
            SpectrumMeta::default(),
        )
        .unwrap();
        let m = ResolutionModel { dk_inst: 0.05 };
        assert!(matches!(
            resolution_convolve(&s, &m, &[1.0]),
            Err(SpectrumError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn convolve_rejects_extrapolation() {
        let ks = linspace(0.2, 1.8, 2001);
        let s = Spectrum::new(
            SpectrumKind::CoherentReflectivity,
            ks.clone(),
            vec![Complex64::new(0.1, 0.0); ks.len()],
            SpectrumMeta::default(),
        )
        .unwrap();
        let m = ResolutionModel { dk_inst: 0.05 };
        assert!(matches!(
            resolution_convolve(&s, &m, &[2.5]),
            Err(SpectrumError::ExtrapolationForbidden(_))
        ));
    }

    #[test]
    fn convolve_is_linear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let ks = linspace(0.2, 1.8, 501);
        let mk = |vals: Vec<Complex64>| {
            Spectrum::new(
                SpectrumKind::CoherentReflectivity,
                ks.clone(),
                vals,
                SpectrumMeta::default(),
            )
            .unwrap()
        };
        let a_vals: Vec<Complex64> = (0..ks.len())
            .map(|_| Complex64::new(rng.gen_range(0.0..0.5), 0.0))
            .collect();
        let b_vals: Vec<Complex64> = (0..ks.len())
            .map(|_| Complex64::new(rng.gen_range(0.0..0.5), 0.0))
            .collect();
        let sum_vals: Vec<Complex64> = a_vals
            .iter()
            .zip(&b_vals)
            .map(|(u, v)| u + v)
            .collect();
        let m = ResolutionModel { dk_inst: 0.05 };
        let kms = [0.5, 1.0, 1.5];
        let ca = resolution_convolve(&mk(a_vals), &m, &kms).unwrap();
        let cb = resolution_convolve(&mk(b_vals), &m, &kms).unwrap();
        let cs = resolution_convolve(&mk(sum_vals), &m, &kms).unwrap();
        for i in 0..kms.len() {
            assert_abs_diff_eq!(
                cs.values[i].re,
                ca.values[i].re + cb.values[i].re,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn spectrum_bound_enforced() {
        let result = Spectrum::new(
            SpectrumKind::CoherentReflectivity,
            vec![1.0],
            vec![Complex64::new(1.5, 0.0)],
            SpectrumMeta::default(),
        );
        assert!(matches!(result, Err(SpectrumError::BoundViolated { .. })));
    }
}
