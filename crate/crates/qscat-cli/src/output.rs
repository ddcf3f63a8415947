//! Atomic CSV/JSON artifact writing with bit-stable float formatting.

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::json;
use std::path::{Path, PathBuf};

use qscat::packet::WaveField;
use qscat::spectrum::{Spectrum, SpectrumKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// 17 significant digits: round-trips f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes via a temp file in the same directory followed by a rename, so
/// readers never observe a partial artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().unwrap_or_default().to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn kind_label(kind: SpectrumKind) -> &'static str {
    match kind {
        SpectrumKind::PlaneWaveReflectivity => "R_pw",
        SpectrumKind::PlaneWaveTransmissivity => "T_pw",
        SpectrumKind::TimedReflection => "r_t",
        SpectrumKind::TimedTransmission => "t_t",
        SpectrumKind::CoherentReflectivity => "R_coh",
        SpectrumKind::MeasuredReflectivity => "R_meas",
    }
}

fn meta_pairs(s: &Spectrum) -> Vec<(&'static str, f64)> {
    let mut pairs = Vec::new();
    if let Some(v) = s.meta.kbar {
        pairs.push(("kbar", v));
    }
    if let Some(v) = s.meta.dk {
        pairs.push(("dk", v));
    }
    if let Some(v) = s.meta.gamma {
        pairs.push(("gamma", v));
    }
    if let Some(v) = s.meta.t {
        pairs.push(("t", v));
    }
    if let Some(v) = s.meta.dk_inst {
        pairs.push(("dk_inst", v));
    }
    pairs
}

fn spectrum_is_complex(kind: SpectrumKind) -> bool {
    matches!(
        kind,
        SpectrumKind::TimedReflection | SpectrumKind::TimedTransmission
    )
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::new();
    out.push_str(&format!("# kind={}", kind_label(s.kind)));
    for (k, v) in meta_pairs(s) {
        out.push_str(&format!(" {k}={}", fmt_f64(v)));
    }
    out.push('\n');
    if spectrum_is_complex(s.kind) {
        out.push_str("k,re,im,abs\n");
        for (k, v) in s.k_values.iter().zip(&s.values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(*k),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(v.norm())
            ));
        }
    } else {
        out.push_str("k,value\n");
        for (k, v) in s.k_values.iter().zip(&s.values) {
            out.push_str(&format!("{},{}\n", fmt_f64(*k), fmt_f64(v.re)));
        }
    }
    out
}

pub fn spectrum_json(s: &Spectrum) -> String {
    let meta: serde_json::Map<String, serde_json::Value> = meta_pairs(s)
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let values: Vec<serde_json::Value> = if spectrum_is_complex(s.kind) {
        s.values
            .iter()
            .map(|v| json!({"re": v.re, "im": v.im}))
            .collect()
    } else {
        s.values.iter().map(|v| json!(v.re)).collect()
    };
    serde_json::to_string_pretty(&json!({
        "kind": kind_label(s.kind),
        "meta": meta,
        "k": s.k_values,
        "values": values,
    }))
    .expect("serializable")
        + "\n"
}

pub fn field_csv(f: &WaveField) -> String {
    let mut out = String::new();
    out.push_str(&format!("# t={}\n", fmt_f64(f.time)));
    out.push_str("x,re,im,abs\n");
    for (x, v) in f.x_nodes.iter().zip(&f.values) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(*x),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm())
        ));
    }
    out
}

pub fn field_json(f: &WaveField) -> String {
    serde_json::to_string_pretty(&json!({
        "t": f.time,
        "x": f.x_nodes,
        "values": f.values.iter().map(|v| json!({"re": v.re, "im": v.im})).collect::<Vec<_>>(),
    }))
    .expect("serializable")
        + "\n"
}

pub fn write_spectrum(dir: &Path, stem: &str, s: &Spectrum, format: Format) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let body = match format {
        Format::Csv => spectrum_csv(s),
        Format::Json => spectrum_json(s),
    };
    write_atomic(&path, &body)?;
    Ok(path)
}

pub fn write_field(dir: &Path, stem: &str, f: &WaveField, format: Format) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let body = match format {
        Format::Csv => field_csv(f),
        Format::Json => field_json(f),
    };
    write_atomic(&path, &body)?;
    Ok(path)
}

/// Stable file-name fragment for a float parameter (e.g. `t12p5`).
pub fn tag(prefix: &str, v: f64) -> String {
    let s = format!("{v}").replace('.', "p").replace('-', "m");
    format!("{prefix}{s}")
}
