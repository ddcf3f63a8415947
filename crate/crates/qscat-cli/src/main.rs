mod config;
mod output;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::path::PathBuf;

use config::RunConfig;
use output::{fmt_f64, tag, write_atomic, write_field, write_spectrum, Format};
use qscat::oracle::{compare_fields, evolve};
use qscat::packet::assemble_packet;
use qscat::spectrum::{
    default_window, plane_wave_spectra, reflection_amplitude_asymptotic, reflectivity_coherent,
    resolution_convolve, timed_reflection_spectrum,
};
use qscat::statops::{density_at, time_averaged_density, DiscreteState};
use qscat::transfer::plane_wave_amplitudes;
use qscat::PacketSpec;

/// Exact 1-D quantum scattering of Gaussian wave packets from
/// piecewise-constant barriers.
#[derive(Parser)]
#[command(name = "qscat", version, about)]
struct Cli {
    /// Path to the TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Artifact format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Cross-check snapshots against the finite-difference solver
    #[arg(long, global = true)]
    oracle: bool,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Plane-wave reflectivity and transmissivity spectra
    Planewave,
    /// Wave-packet field snapshots at the configured times
    Snapshot,
    /// Coherent (and optionally resolution-smeared) reflectivity spectra
    Reflectivity,
    /// Finite-time reflection amplitudes vs the asymptotic spectrum
    Convergence,
    /// Off-diagonal sinc-decay table for the statistical-operator demo
    StatopsDemo,
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("rayon pool");
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .context("--config PATH is required for this command")?;
    RunConfig::load(path)
}

fn run(cli: &Cli) -> Result<()> {
    let format: Format = cli.format.into();
    match cli.cmd {
        Cmd::Planewave => cmd_planewave(cli, format),
        Cmd::Snapshot => cmd_snapshot(cli, format),
        Cmd::Reflectivity => cmd_reflectivity(cli, format),
        Cmd::Convergence => cmd_convergence(cli, format),
        Cmd::StatopsDemo => cmd_statops_demo(cli),
    }
}

fn cmd_planewave(cli: &Cli, format: Format) -> Result<()> {
    let cfg = load_config(cli)?;
    let profile = cfg.profile()?;
    let ks = cfg.k_values()?;
    let (r_spec, t_spec) = plane_wave_spectra(&profile, &ks)
        .map_err(|e| anyhow::anyhow!("invariant violated: reflectivity-bound ({e})"))?;
    // per-row flux audit plus evanescent-backing flags
    let mut rows = String::from("k,R,T,propagating\n");
    for &k in &ks {
        let pw = plane_wave_amplitudes(&profile, k)?;
        let (r, t) = (pw.reflectivity(), pw.transmissivity());
        if pw.propagating_backing {
            let flux = r + pw.b.re / pw.f * t;
            if (flux - 1.0).abs() > 1e-10 {
                bail!("invariant violated: flux-conservation at k={k} (R + (b/f)T = {flux})");
            }
        } else if (pw.r.norm() - 1.0).abs() > 1e-10 {
            bail!(
                "invariant violated: total-reflection at k={k} (|r| = {})",
                pw.r.norm()
            );
        }
        rows.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(k),
            fmt_f64(r),
            fmt_f64(t),
            u8::from(pw.propagating_backing)
        ));
    }
    let combined = cli.out.join(format!("planewave.{}", Format::Csv.extension()));
    write_atomic(&combined, &rows)?;
    let p1 = write_spectrum(&cli.out, "r_pw", &r_spec, format)?;
    let p2 = write_spectrum(&cli.out, "t_pw", &t_spec, format)?;
    println!(
        "planewave: wrote {}, {}, {}",
        combined.display(),
        p1.display(),
        p2.display()
    );
    Ok(())
}

fn cmd_snapshot(cli: &Cli, format: Format) -> Result<()> {
    let cfg = load_config(cli)?;
    let profile = cfg.profile()?;
    let spec = cfg.packet_spec()?;
    let kg = cfg.quadrature_grid(&spec)?;
    let grid = cfg.grid_config()?;
    let xs = grid.x_nodes();
    if cfg.times.is_empty() {
        bail!("config field `times` must list at least one snapshot time");
    }
    let mut norms: Vec<(f64, f64)> = Vec::new();
    let mut fields = Vec::new();
    for &t in &cfg.times {
        let field = assemble_packet(&profile, &spec, &kg, &xs, t)?;
        norms.push((t, field.norm_sq()));
        let path = write_field(&cli.out, &tag("snapshot_t", t), &field, format)?;
        println!("snapshot: wrote {}", path.display());
        fields.push(field);
    }
    let n0 = norms[0].1;
    for &(t, n) in &norms[1..] {
        if (n - n0).abs() / n0 > 1e-3 {
            bail!(
                "invariant violated: norm-conservation at t={t} (relative drift {:.3e}); \
                 enlarge [xgrid]",
                (n - n0).abs() / n0
            );
        }
    }
    if cli.oracle {
        grid.validate(&profile, &spec)
            .map_err(|e| anyhow::anyhow!("invariant violated: oracle-grid ({e})"))?;
        let initial = assemble_packet(&profile, &spec, &kg, &xs, 0.0)?;
        let mut rows = String::from("t,distance\n");
        for (&t, field) in cfg.times.iter().zip(&fields) {
            if t == 0.0 {
                continue;
            }
            let n_steps = (t / grid.dt).round() as usize;
            let cn = evolve(&profile, &initial, &grid, n_steps)?;
            let d = compare_fields(&cn, field)?;
            if d > 1e-2 {
                bail!("invariant violated: oracle-agreement at t={t} (distance {d:.3e})");
            }
            rows.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(d)));
        }
        let path = cli.out.join("oracle_distance.csv");
        write_atomic(&path, &rows)?;
        println!("snapshot: wrote {}", path.display());
    }
    Ok(())
}

fn cmd_reflectivity(cli: &Cli, format: Format) -> Result<()> {
    let cfg = load_config(cli)?;
    let profile = cfg.profile()?;
    let base = cfg.packet_spec()?;
    let ks = cfg.k_values()?;
    let kbars = cfg
        .reflectivity
        .as_ref()
        .map(|r| r.kbar_list.clone())
        .unwrap_or_else(|| vec![base.kbar]);
    for &kbar in &kbars {
        let mut spec = PacketSpec::new(kbar, base.dk, base.x0)?;
        spec.t0 = base.t0;
        let rcoh = reflectivity_coherent(&profile, &spec, &ks)
            .map_err(|e| anyhow::anyhow!("invariant violated: reflectivity-bound ({e})"))?;
        let path = write_spectrum(&cli.out, &tag("rcoh_kbar", kbar), &rcoh, format)?;
        println!("reflectivity: wrote {}", path.display());
        if let Some(model) = cfg.resolution() {
            let rmeas = resolution_convolve(&rcoh, &model, &ks)
                .map_err(|e| anyhow::anyhow!("invariant violated: resolution-grid ({e})"))?;
            let path = write_spectrum(&cli.out, &tag("rmeas_kbar", kbar), &rmeas, format)?;
            println!("reflectivity: wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_convergence(cli: &Cli, format: Format) -> Result<()> {
    let cfg = load_config(cli)?;
    let profile = cfg.profile()?;
    let spec = cfg.packet_spec()?;
    let kg = cfg.quadrature_grid(&spec)?;
    let ks = cfg.k_values()?;
    if cfg.times.is_empty() {
        bail!("config field `times` must list at least one projection time");
    }
    let asym: Vec<Complex64> = ks
        .iter()
        .map(|&k| reflection_amplitude_asymptotic(&spec, &profile, k))
        .collect::<Result<_, _>>()?;
    let mut rows = String::from("k,abs\n");
    for (&k, a) in ks.iter().zip(&asym) {
        rows.push_str(&format!("{},{}\n", fmt_f64(k), fmt_f64(a.norm())));
    }
    let asym_path = cli.out.join(format!("r_asym.{}", Format::Csv.extension()));
    write_atomic(&asym_path, &rows)?;
    println!("convergence: wrote {}", asym_path.display());
    let max_asym = asym.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
    let mut summary = String::from("t,max_rel_deviation\n");
    let mut deviations = Vec::new();
    for &t in &cfg.times {
        let window = default_window(&profile, &spec, t);
        let s = timed_reflection_spectrum(&profile, &spec, &kg, &ks, t, window)?;
        let dev = s
            .values
            .iter()
            .zip(&asym)
            .map(|(v, a)| (v.norm() - a.norm()).abs())
            .fold(0.0f64, f64::max)
            / max_asym;
        deviations.push((t, dev));
        summary.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(dev)));
        let path = write_spectrum(&cli.out, &tag("r_t", t), &s, format)?;
        println!("convergence: wrote {} (max rel deviation {dev:.4})", path.display());
    }
    let sum_path = cli.out.join("convergence_summary.csv");
    write_atomic(&sum_path, &summary)?;
    println!("convergence: wrote {}", sum_path.display());
    for w in deviations.windows(2) {
        if w[1].0 > w[0].0 && w[1].1 >= w[0].1 {
            bail!(
                "invariant violated: asymptotic-convergence (deviation rose from {:.4} at t={} \
                 to {:.4} at t={})",
                w[0].1,
                w[0].0,
                w[1].1,
                w[1].0
            );
        }
    }
    Ok(())
}

fn cmd_statops_demo(cli: &Cli) -> Result<()> {
    // built-in 3-level sample unless the config supplies one
    let (state, windows) = match cli.config.as_ref() {
        Some(_) => {
            let cfg = load_config(cli)?;
            match cfg.statops {
                Some(block) => {
                    let coeffs = block
                        .coefficients
                        .iter()
                        .map(|&[re, im]| Complex64::new(re, im))
                        .collect();
                    (
                        DiscreteState::new(coeffs, block.energies.clone())
                            .context("config block [statops]")?,
                        block.windows,
                    )
                }
                None => default_statops(),
            }
        }
        None => default_statops(),
    };
    let rho0 = density_at(&state, 0.0);
    println!("statops demo: {}-level pure state", state.dim());
    println!("diagonal |c_n|^2: {:?}", diag(&rho0));
    println!("{:>12} {:>22}", "T", "max |off-diagonal|");
    for &t in &windows {
        let rho = time_averaged_density(&state, t)?;
        println!("{:>12.4} {:>22.12e}", t, max_offdiag(&rho));
        for n in 0..state.dim() {
            let expect = state.coefficients[n].norm_sqr();
            if (rho[n][n].re - expect).abs() > 1e-12 {
                bail!("invariant violated: diagonal-constancy at T={t}");
            }
        }
    }
    let limit = time_averaged_density(&state, 1e9)?;
    println!("T -> infinity diagonal: {:?}", diag(&limit));
    println!("T -> infinity max |off-diagonal|: {:.3e}", max_offdiag(&limit));
    Ok(())
}

fn default_statops() -> (DiscreteState, Vec<f64>) {
    let c = 1.0 / 3f64.sqrt();
    let state = DiscreteState::new(
        vec![
            Complex64::new(c, 0.0),
            Complex64::new(0.0, c),
            Complex64::new(c, 0.0),
        ],
        vec![0.5, 1.5, 2.75],
    )
    .expect("valid sample state");
    let pi = std::f64::consts::PI;
    (state, vec![0.5, 1.0, 2.0 * pi, 4.0 * pi, 20.0, 100.0])
}

fn diag(rho: &[Vec<Complex64>]) -> Vec<f64> {
    (0..rho.len()).map(|i| rho[i][i].re).collect()
}

fn max_offdiag(rho: &[Vec<Complex64>]) -> f64 {
    let mut best = 0.0f64;
    for r in 0..rho.len() {
        for c in 0..rho.len() {
            if r != c {
                best = best.max(rho[r][c].norm());
            }
        }
    }
    best
}
