//! TOML run-configuration schema and conversion into library types.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use qscat::oracle::{Boundary, GridConfig};
use qscat::packet::{kgrid, KGrid, PacketSpec};
use qscat::spectrum::ResolutionModel;
use qscat::{BarrierProfile, Bin};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub barrier: BarrierBlock,
    pub packet: Option<PacketBlock>,
    #[serde(default)]
    pub kgrid: KGridBlock,
    pub krange: Option<KRangeBlock>,
    pub xgrid: Option<XGridBlock>,
    #[serde(default)]
    pub times: Vec<f64>,
    pub resolution: Option<ResolutionBlock>,
    pub reflectivity: Option<ReflectivityBlock>,
    pub statops: Option<StatopsBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierBlock {
    #[serde(default)]
    pub bins: Vec<BinBlock>,
    #[serde(default)]
    pub q_fronting: f64,
    #[serde(default)]
    pub q_backing: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinBlock {
    pub q: f64,
    pub width: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketBlock {
    pub kbar: f64,
    pub dk: f64,
    pub x0: f64,
    #[serde(default)]
    pub t0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGridBlock {
    pub n_nodes: usize,
    pub half_width: f64,
}

impl Default for KGridBlock {
    fn default() -> Self {
        KGridBlock {
            n_nodes: 2049,
            half_width: 6.0,
        }
    }
}

/// Output wave-vector range for spectra.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KRangeBlock {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XGridBlock {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub absorber: Option<AbsorberBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorberBlock {
    pub width_fraction: f64,
    pub strength: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionBlock {
    pub dk_inst: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectivityBlock {
    pub kbar_list: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatopsBlock {
    /// complex coefficients as [re, im] pairs
    pub coefficients: Vec<[f64; 2]>,
    pub energies: Vec<f64>,
    pub windows: Vec<f64>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.times.iter().any(|&t| t < 0.0) {
            bail!("config field `times`: times must be non-negative");
        }
        Ok(cfg)
    }

    pub fn profile(&self) -> Result<BarrierProfile> {
        let bins = self
            .barrier
            .bins
            .iter()
            .map(|b| Bin {
                q: b.q,
                width: b.width,
            })
            .collect();
        BarrierProfile::with_media(bins, self.barrier.q_fronting, self.barrier.q_backing)
            .context("config block [barrier]")
    }

    pub fn packet_spec(&self) -> Result<PacketSpec> {
        let block = self
            .packet
            .as_ref()
            .context("config block [packet] is required for this command")?;
        let mut spec =
            PacketSpec::new(block.kbar, block.dk, block.x0).context("config block [packet]")?;
        spec.t0 = block.t0;
        if spec.is_broadband() {
            eprintln!(
                "warning: kbar = {} < 3 dk = {}; negative-k truncation is not negligible",
                block.kbar,
                3.0 * block.dk
            );
        }
        Ok(spec)
    }

    pub fn quadrature_grid(&self, spec: &PacketSpec) -> Result<KGrid> {
        kgrid(spec, self.kgrid.n_nodes, self.kgrid.half_width).context("config block [kgrid]")
    }

    pub fn k_values(&self) -> Result<Vec<f64>> {
        let r = self
            .krange
            .as_ref()
            .context("config block [krange] is required for this command")?;
        if r.n < 2 || !(r.k_max > r.k_min) || !(r.k_min > 0.0) {
            bail!("config block [krange]: need 0 < k_min < k_max and n >= 2");
        }
        let h = (r.k_max - r.k_min) / (r.n - 1) as f64;
        Ok((0..r.n).map(|i| r.k_min + h * i as f64).collect())
    }

    pub fn grid_config(&self) -> Result<GridConfig> {
        let x = self
            .xgrid
            .as_ref()
            .context("config block [xgrid] is required for this command")?;
        let dt = x.dt.unwrap_or(x.dx * x.dx);
        let boundary = match &x.absorber {
            None => Boundary::HardWall,
            Some(a) => Boundary::Absorbing {
                width_fraction: a.width_fraction,
                strength: a.strength,
            },
        };
        Ok(GridConfig {
            x_min: x.x_min,
            x_max: x.x_max,
            dx: x.dx,
            dt,
            boundary,
        })
    }

    pub fn resolution(&self) -> Option<ResolutionModel> {
        self.resolution.as_ref().map(|r| ResolutionModel {
            dk_inst: r.dk_inst,
        })
    }
}
