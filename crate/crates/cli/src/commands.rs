//! Subcommand implementations. Each fills its defaults into the config (so
//! the echo is complete), runs the library, writes files, and returns the
//! report text.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::sync::Arc;

use chemospec::algebra::{critical_points, depressed_coeffs, ferrari_real_roots, DepressedQuartic, QuarticRoots};
use chemospec::dynamics::{
    fit_rate, instability_experiment, integrate, FitMode, InstabilityConfig, RateFit, SimConfig, TimeSeries,
};
use chemospec::kernels::{bessel_pointwise, BesselKernel};
use chemospec::numfmt::sig17;
use chemospec::raster::{RasterWindow, RegionRaster};
use chemospec::regions::{analyze, g_double_prime, g_of_tau, spectral_bound_m, threshold_a_star};
use chemospec::spectral::io::{read_snapshot, write_field_csv, write_snapshot};
use chemospec::spectral::{
    inverse_transform, lp_norm, transform, wave_packet, Field, GridSpec, LinearPropagator, SpectralGrid,
};
use chemospec::sweep::{run_sweep, write_sweep_csv, SimSummarySpec, SweepParam, SweepSpec};
use chemospec::{Exec, Extended};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{default_to, ExperimentConfig, InitialCondition};
use crate::error::CliError;
use crate::report::{output_file, write_report};

pub struct Outcome {
    pub report: String,
    /// Deferred failure reported after all files are written.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { report, failure: None }
    }
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<std::path::PathBuf, CliError> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn grid_spec(cfg: &mut ExperimentConfig, n: usize, points: usize, length: f64) -> GridSpec {
    GridSpec::new(
        default_to(&mut cfg.n, n),
        default_to(&mut cfg.points, points),
        default_to(&mut cfg.length, length),
    )
}

fn norm_list(cfg: &mut ExperimentConfig) -> Vec<f64> {
    default_to(
        &mut cfg.norms,
        vec![Extended::Finite(1.0), Extended::Finite(2.0), Extended::Unbounded],
    )
    .into_iter()
    .map(Extended::to_f64)
    .collect()
}

fn log_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| {
            let s = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
            (t0.ln() + s * (t1.ln() - t0.ln())).exp()
        })
        .collect()
}

fn lin_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| t0 + (t1 - t0) * if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 })
        .collect()
}

fn gaussian(grid: &Arc<SpectralGrid>, width: f64, l1_mass: f64) -> Result<Field, CliError> {
    let c = 0.5 * grid.length();
    let dim = grid.dim() as i32;
    let norm = l1_mass / (width * (2.0 * std::f64::consts::PI).sqrt()).powi(dim);
    Ok(Field::from_fn(grid.clone(), |x, y| {
        let r2 = (x - c).powi(2) + if dim == 2 { (y - c).powi(2) } else { 0.0 };
        norm * (-r2 / (2.0 * width * width)).exp()
    })?)
}

fn random_field(grid: &Arc<SpectralGrid>, width: f64, l1_mass: f64, seed: u64) -> Result<Field, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let smooth = transform(&Field::new(grid.clone(), noise)?).map_radial(|xi_sq| (-0.5 * width * width * xi_sq).exp());
    let f = inverse_transform(&smooth);
    let m = lp_norm(&f, 1.0);
    if m == 0.0 {
        return Ok(f);
    }
    Ok(f.scaled(l1_mass / m))
}

struct IcDefaults {
    ic: InitialCondition,
    mass: f64,
    width: f64,
}

/// Builds the initial field; `ic = file` replaces the grid keys with the snapshot's.
fn initial_field(
    cfg: &mut ExperimentConfig,
    spec: GridSpec,
    d: IcDefaults,
    tau_star: Option<f64>,
    packet_p: f64,
) -> Result<Field, CliError> {
    let ic = default_to(&mut cfg.ic, d.ic);
    if ic == InitialCondition::File {
        let path = cfg
            .ic_file
            .clone()
            .ok_or_else(|| CliError::Config("ic = file needs `ic_file`".into()))?;
        let field = read_snapshot(std::io::BufReader::new(File::open(&path)?))?;
        let g = field.grid().spec();
        if (cfg.n, cfg.points, cfg.length) != (Some(g.dim), Some(g.points), Some(g.length)) {
            return Err(CliError::Config(format!(
                "snapshot grid (n={}, N={}, L={}) differs from the configured grid",
                g.dim, g.points, g.length
            )));
        }
        return Ok(field);
    }
    let grid = spec.build()?;
    if ic == InitialCondition::Zero {
        return Ok(Field::zeros(grid));
    }
    let mass = default_to(&mut cfg.ic_mass, d.mass);
    let width = default_to(&mut cfg.ic_width, d.width);
    match ic {
        InitialCondition::Bump => gaussian(&grid, width, mass),
        InitialCondition::Random => random_field(&grid, width, mass, default_to(&mut cfg.seed, 0)),
        InitialCondition::Packet => {
            let tau = tau_star.ok_or_else(|| CliError::Config("ic = packet needs A > A* (a growing mode)".into()))?;
            Ok(wave_packet(&grid, tau, width, packet_p, mass)?)
        }
        InitialCondition::Zero | InitialCondition::File => unreachable!(),
    }
}

/// Grid keys that can be filled from a snapshot file before validation.
fn adopt_snapshot_grid(cfg: &mut ExperimentConfig) -> Result<(), CliError> {
    if cfg.ic == Some(InitialCondition::File) {
        if let Some(path) = &cfg.ic_file {
            let field = read_snapshot(std::io::BufReader::new(File::open(path)?))?;
            let g = field.grid().spec();
            cfg.n.get_or_insert(g.dim);
            cfg.points.get_or_insert(g.points);
            cfg.length.get_or_insert(g.length);
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ classify

pub fn classify(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let a = cfg.amplitude()?;
    let dir = prepare_dir(&cfg)?;
    default_to(&mut cfg.seed, 0);
    let report = analyze(&params, a)?;
    Ok(Outcome::ok(write_report(&dir, "classify", "classify", &cfg, &report)?))
}

// ---------------------------------------------------------------- region-map

#[derive(Serialize)]
struct LegendEntry {
    tag: u8,
    label: &'static str,
    rgb: [u8; 3],
}

#[derive(Serialize)]
struct RegionMapResult {
    mode: chemospec::raster::RasterMode,
    window: RasterWindow,
    counts: [usize; 3],
    legend: Vec<LegendEntry>,
    files: Vec<String>,
}

pub fn region_map(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let d = RasterWindow::default();
    let window = RasterWindow {
        lambda_min: default_to(&mut cfg.lambda_min, d.lambda_min),
        lambda_max: default_to(&mut cfg.lambda_max, d.lambda_max),
        beta_min: default_to(&mut cfg.beta_min, d.beta_min),
        beta_max: default_to(&mut cfg.beta_max, d.beta_max),
        resolution: default_to(&mut cfg.resolution, d.resolution),
    };
    let mode = default_to(&mut cfg.mode, Default::default());
    let svg = default_to(&mut cfg.svg, false);
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;
    let raster = RegionRaster::compute(window, mode, Exec::Parallel)?;
    let mut files = vec!["region_map.ppm".to_string()];
    let mut out = BufWriter::new(File::create(output_file(&dir, "region_map.ppm"))?);
    raster.write_ppm(&mut out)?;
    out.flush()?;
    if svg {
        std::fs::write(output_file(&dir, "region_map.svg"), raster.to_svg())?;
        files.push("region_map.svg".into());
    }
    let result = RegionMapResult {
        mode,
        window,
        counts: raster.counts(),
        legend: raster
            .legend()
            .into_iter()
            .map(|(tag, label, rgb)| LegendEntry { tag, label, rgb })
            .collect(),
        files,
    };
    Ok(Outcome::ok(write_report(&dir, "region_map", "region-map", &cfg, &result)?))
}

// --------------------------------------------------------------------- roots

#[derive(Serialize)]
struct CriticalPoint {
    tau: f64,
    g: f64,
    g_double_prime: f64,
}

#[derive(Serialize)]
struct RootsResult {
    depressed: DepressedQuartic,
    shift: f64,
    ferrari: QuarticRoots,
    critical_points: Vec<CriticalPoint>,
    big_m: f64,
    tau_star: Option<f64>,
}

pub fn roots(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let a = cfg.amplitude()?;
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;
    let dq = depressed_coeffs(&params, a);
    let ferrari = ferrari_real_roots(&dq)?;
    let crit = critical_points(&params, a)?
        .into_iter()
        .map(|tau| CriticalPoint {
            tau,
            g: g_of_tau(&params, a, tau),
            g_double_prime: g_double_prime(&params, a, tau),
        })
        .collect();
    let bound = spectral_bound_m(&params, a)?;
    let result = RootsResult {
        depressed: dq,
        shift: 0.5 * (params.lambda1() + params.lambda2()),
        ferrari,
        critical_points: crit,
        big_m: bound.big_m,
        tau_star: bound.tau_star,
    };
    Ok(Outcome::ok(write_report(&dir, "roots", "roots", &cfg, &result)?))
}

// -------------------------------------------------------------------- kernel

#[derive(Serialize)]
struct KernelResult {
    lambda: f64,
    n: usize,
    tol: f64,
    points: usize,
    /// Against `e^{−√λ r}/(2√λ)` (n=1) or `e^{−√λ r}/(4πr)` (n=3).
    max_relative_error_vs_closed_form: Option<f64>,
    /// `Σ B(x_i) hⁿ` on the configured grid, when `N` and `L` are given.
    grid_mass: Option<f64>,
    expected_mass: f64,
}

fn closed_form(lambda: f64, n: usize, r: f64) -> Option<f64> {
    let a = lambda.sqrt();
    match n {
        1 => Some((-a * r).exp() / (2.0 * a)),
        3 => Some((-a * r).exp() / (4.0 * std::f64::consts::PI * r)),
        _ => None,
    }
}

pub fn kernel(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let lambda = match (cfg.lambda, cfg.lambda1) {
        (Some(l), _) | (None, Some(l)) => l,
        _ => return Err(CliError::Config("missing required field `lambda`".into())),
    };
    cfg.lambda = Some(lambda);
    let n = default_to(&mut cfg.n, 1);
    let tol = default_to(&mut cfg.tol, 1e-13);
    let radii = default_to(&mut cfg.radii, log_times(1e-2, 10.0, 50));
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;
    let k = BesselKernel::new(lambda, n)?;
    let values: Vec<f64> = Exec::Parallel
        .map_slice(&radii, |&r| bessel_pointwise(&k, r, tol))
        .into_iter()
        .collect::<chemospec::Result<_>>()?;

    let mut out = BufWriter::new(File::create(output_file(&dir, "kernel.csv"))?);
    let has_closed = closed_form(lambda, n, 1.0).is_some();
    writeln!(out, "{}", if has_closed { "r,value,closed_form" } else { "r,value" })?;
    let mut worst: Option<f64> = None;
    for (&r, &v) in radii.iter().zip(&values) {
        match closed_form(lambda, n, r) {
            Some(e) => {
                writeln!(out, "{},{},{}", sig17(r), sig17(v), sig17(e))?;
                let rel = ((v - e) / e).abs();
                worst = Some(worst.map_or(rel, |w| w.max(rel)));
            }
            None => writeln!(out, "{},{}", sig17(r), sig17(v))?,
        }
    }
    out.flush()?;

    let grid_mass = match (cfg.points, cfg.length) {
        (Some(np), Some(l)) if n <= 2 => {
            let grid = chemospec::spectral::make_grid(n, np, l)?;
            let f = k.sample_on_grid(&grid, tol, Exec::Parallel)?;
            Some(f.values().iter().sum::<f64>() * grid.cell_volume())
        }
        _ => None,
    };
    let result = KernelResult {
        lambda,
        n,
        tol,
        points: radii.len(),
        max_relative_error_vs_closed_form: worst,
        grid_mass,
        expected_mass: 1.0 / lambda,
    };
    Ok(Outcome::ok(write_report(&dir, "kernel", "kernel", &cfg, &result)?))
}

// ----------------------------------------------------------------- propagate

#[derive(Serialize)]
struct PropagateResult {
    a_star: Extended,
    big_m: f64,
    tau_star: Option<f64>,
    stable: bool,
    fit: RateFit,
    fit_mode: FitMode,
    fit_p: Extended,
    fit_window: [f64; 2],
    samples: usize,
}

fn to_extended(p: f64) -> Extended {
    if p.is_infinite() {
        Extended::Unbounded
    } else {
        Extended::Finite(p)
    }
}

fn with_fit_norm(mut norms: Vec<f64>, p: f64) -> Vec<f64> {
    if !norms.contains(&p) {
        norms.push(p);
    }
    norms
}

pub fn propagate(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let a = cfg.amplitude()?;
    let a_star = threshold_a_star(&params)?;
    let bound = spectral_bound_m(&params, a)?;
    let stable = a_star.admits(a);
    adopt_snapshot_grid(&mut cfg)?;
    let spec = grid_spec(&mut cfg, 1, 4096, 400.0);
    let (times, defaults, mode, p) = if stable {
        let t0 = default_to(&mut cfg.t_start, 1.0);
        let t1 = default_to(&mut cfg.t_end, 100.0);
        let n = default_to(&mut cfg.samples, 60);
        let ic = IcDefaults { ic: InitialCondition::Bump, mass: 1.0, width: 1.5 };
        (log_times(t0, t1, n), ic, FitMode::Algebraic, Extended::Unbounded)
    } else {
        let t0 = default_to(&mut cfg.t_start, 0.0);
        let t1 = default_to(&mut cfg.t_end, 2.0 / bound.big_m);
        let n = default_to(&mut cfg.samples, 41);
        let ic = IcDefaults { ic: InitialCondition::Packet, mass: 1.0, width: spec.length / 10.0 };
        (lin_times(t0, t1, n), ic, FitMode::Exponential, Extended::Finite(2.0))
    };
    let mode = default_to(&mut cfg.fit_mode, mode);
    let p = default_to(&mut cfg.fit_p, p).to_f64();
    if let Some(first) = times.first() {
        if mode == FitMode::Algebraic && *first <= 0.0 {
            return Err(CliError::Config("algebraic fits need t_start > 0".into()));
        }
    }
    let window = default_to(
        &mut cfg.fit_window,
        [*times.first().unwrap_or(&0.0), *times.last().unwrap_or(&0.0)],
    );
    let norms = with_fit_norm(norm_list(&mut cfg), p);
    let f = initial_field(&mut cfg, spec, defaults, bound.tau_star, 2.0)?;
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;

    let prop = LinearPropagator::new(&params, a, f.grid().clone())?;
    let states = Exec::Parallel.map_slice(&times, |&t| prop.apply(&f, t));
    let mut series = TimeSeries {
        times: times.clone(),
        norm_ps: norms.clone(),
        norms: vec![Vec::with_capacity(times.len()); norms.len()],
        mean_trace: Vec::with_capacity(times.len()),
        blow_up_time: None,
    };
    for state in states {
        let u = state?;
        for (j, &q) in norms.iter().enumerate() {
            series.norms[j].push(lp_norm(&u, q));
        }
        series.mean_trace.push(u.mean());
    }
    let mut out = BufWriter::new(File::create(output_file(&dir, "propagate.csv"))?);
    series.write_csv(&mut out)?;
    out.flush()?;
    let fit = fit_rate(&series, p, (window[0], window[1]), mode)?;
    let result = PropagateResult {
        a_star,
        big_m: bound.big_m,
        tau_star: bound.tau_star,
        stable,
        fit,
        fit_mode: mode,
        fit_p: to_extended(p),
        fit_window: window,
        samples: times.len(),
    };
    Ok(Outcome::ok(write_report(&dir, "propagate", "propagate", &cfg, &result)?))
}

// ------------------------------------------------------------------ simulate

#[derive(Serialize)]
struct SimulateResult {
    samples: usize,
    t_final: f64,
    blow_up: bool,
    blow_up_time: Option<f64>,
    initial_norms: Vec<(String, f64)>,
    final_norms: Vec<(String, f64)>,
    sup_ratios: Vec<(String, f64)>,
    mean_drift: f64,
    fit: Option<RateFit>,
    files: Vec<String>,
}

#[derive(Serialize)]
struct InstabilityResult {
    big_m: f64,
    tau_star: f64,
    t_star: f64,
    early_rate: f64,
    early_r_squared: f64,
    escape_time: Option<f64>,
    escaped_before_2t_star: bool,
    half_time: Option<f64>,
    deviation_held_until: f64,
    deviation_held_to_escape: bool,
    blow_up: bool,
    blow_up_time: Option<f64>,
    files: Vec<String>,
}

fn labeled(norms: &[f64], values: impl Iterator<Item = f64>) -> Vec<(String, f64)> {
    norms.iter().map(|&p| chemospec::dynamics::norm_label(p)).zip(values).collect()
}

fn write_series(dir: &std::path::Path, name: &str, series: &TimeSeries) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(output_file(dir, name))?);
    series.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn simulate(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let a = cfg.amplitude()?;
    let bound = spectral_bound_m(&params, a)?;
    adopt_snapshot_grid(&mut cfg)?;
    let spec = grid_spec(&mut cfg, 1, 1024, 200.0);
    let dt_default = if bound.big_m > 0.0 { 0.05 / bound.big_m } else { 0.05 };
    let dt = default_to(&mut cfg.dt, dt_default);
    let scheme = default_to(&mut cfg.scheme, Default::default());

    if default_to(&mut cfg.instability, false) {
        return simulate_instability(cfg, params, a, spec, dt, scheme);
    }

    let t_end = default_to(&mut cfg.t_end, 10.0);
    let norms = norm_list(&mut cfg);
    let ic = IcDefaults { ic: InitialCondition::Bump, mass: 1e-2, width: 1.0 };
    let v0 = initial_field(&mut cfg, spec, ic, bound.tau_star, 2.0)?;
    let mut sim = SimConfig::new(params, a, spec, t_end, dt);
    sim.scheme = scheme;
    sim.dealias = default_to(&mut cfg.dealias, true);
    sim.stride = default_to(&mut cfg.stride, 1);
    sim.norms = norms.clone();
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;

    let (series, last) = integrate(&sim, &v0)?;
    write_series(&dir, "simulate.csv", &series)?;
    let mut files = vec!["simulate.csv".to_string()];
    write_snapshot(&last, BufWriter::new(File::create(output_file(&dir, "final.bin"))?))?;
    let mut out = BufWriter::new(File::create(output_file(&dir, "final.csv"))?);
    write_field_csv(&last, &mut out)?;
    out.flush()?;
    files.extend(["final.bin".to_string(), "final.csv".to_string()]);

    let initial: Vec<f64> = norms.iter().map(|&p| lp_norm(&v0, p)).collect();
    let sup_ratios = series.norms.iter().zip(&initial).map(|(trace, &n0)| {
        let sup = trace.iter().cloned().fold(0.0, f64::max);
        if n0 > 0.0 { sup / n0 } else { 0.0 }
    });
    let m0 = series.mean_trace.first().copied().unwrap_or(0.0);
    let mean_drift = series.mean_trace.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max);
    let fit = match (cfg.fit_window, cfg.fit_p) {
        (Some(w), Some(p)) => {
            let mode = default_to(&mut cfg.fit_mode, FitMode::Algebraic);
            Some(fit_rate(&series, p.to_f64(), (w[0], w[1]), mode)?)
        }
        _ => None,
    };
    let result = SimulateResult {
        samples: series.len(),
        t_final: *series.times.last().unwrap_or(&0.0),
        blow_up: series.blow_up_time.is_some(),
        blow_up_time: series.blow_up_time,
        initial_norms: labeled(&norms, initial.iter().copied()),
        final_norms: labeled(&norms, series.norms.iter().map(|t| *t.last().unwrap_or(&0.0))),
        sup_ratios: labeled(&norms, sup_ratios),
        mean_drift,
        fit,
        files,
    };
    Ok(Outcome::ok(write_report(&dir, "simulate", "simulate", &cfg, &result)?))
}

fn simulate_instability(
    mut cfg: ExperimentConfig,
    params: chemospec::ChemoParams,
    a: f64,
    spec: GridSpec,
    dt: f64,
    scheme: chemospec::dynamics::Scheme,
) -> Result<Outcome, CliError> {
    let bound = spectral_bound_m(&params, a)?;
    if bound.big_m <= 0.0 {
        return Err(CliError::Config(format!("instability needs A > A*; M({a}) = 0")));
    }
    let delta = default_to(&mut cfg.delta, 1e-3);
    let t_star = (2.0 / delta).ln() / bound.big_m;
    let t_end = default_to(&mut cfg.t_end, 2.0 * t_star);
    let width = default_to(&mut cfg.ic_width, spec.length / 10.0);
    cfg.ic = Some(InitialCondition::Packet);
    default_to(&mut cfg.seed, 0);
    let mut ic = InstabilityConfig::new(params, a, spec, delta, t_end);
    ic.dt = Some(dt);
    ic.width = Some(width);
    ic.scheme = scheme;
    let dir = prepare_dir(&cfg)?;
    let rep = instability_experiment(&ic)?;
    write_series(&dir, "instability.csv", &rep.series)?;
    let result = InstabilityResult {
        big_m: rep.big_m,
        tau_star: rep.tau_star,
        t_star: rep.t_star,
        early_rate: rep.early_fit.rate,
        early_r_squared: rep.early_fit.r_squared,
        escape_time: rep.escape_time,
        escaped_before_2t_star: rep.escape_time.is_some_and(|t| t < 2.0 * rep.t_star),
        half_time: rep.half_time,
        deviation_held_until: rep.deviation_held_until,
        deviation_held_to_escape: rep.deviation_held_to_escape,
        blow_up: rep.blow_up_time.is_some(),
        blow_up_time: rep.blow_up_time,
        files: vec!["instability.csv".into()],
    };
    Ok(Outcome::ok(write_report(&dir, "simulate", "simulate", &cfg, &result)?))
}

// ----------------------------------------------------------------------- fit

fn parse_label(label: &str) -> Option<f64> {
    match label {
        "L1" => Some(1.0),
        "L2" => Some(2.0),
        "Linf" => Some(f64::INFINITY),
        other => other.strip_prefix("Lq:").and_then(|q| q.parse().ok()),
    }
}

/// Reads a time-series CSV (`t, mean, <norm labels>`).
pub fn read_series(path: &std::path::Path) -> Result<TimeSeries, CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("t") || headers.get(1) != Some("mean") {
        return Err(CliError::Config(format!("{}: expected columns t,mean,...", path.display())));
    }
    let norm_ps: Vec<f64> = headers
        .iter()
        .skip(2)
        .map(|h| parse_label(h).ok_or_else(|| CliError::Config(format!("unknown norm column {h:?}"))))
        .collect::<Result<_, _>>()?;
    let mut series = TimeSeries {
        times: Vec::new(),
        norms: vec![Vec::new(); norm_ps.len()],
        norm_ps,
        mean_trace: Vec::new(),
        blow_up_time: None,
    };
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let num = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::Config(format!("{}: bad number in row {}, column {}", path.display(), line + 2, k + 1)))
        };
        series.times.push(num(0)?);
        series.mean_trace.push(num(1)?);
        for j in 0..series.norm_ps.len() {
            series.norms[j].push(num(j + 2)?);
        }
    }
    Ok(series)
}

pub fn fit(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| CliError::Config("missing required field `input`".into()))?;
    let series = read_series(&input)?;
    let p = default_to(&mut cfg.fit_p, Extended::Finite(2.0)).to_f64();
    let mode = default_to(&mut cfg.fit_mode, FitMode::Algebraic);
    let first = *series.times.first().unwrap_or(&0.0);
    let last = *series.times.last().unwrap_or(&0.0);
    let window = default_to(&mut cfg.fit_window, [first, last]);
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;
    if series.norm(p).is_none() {
        return Err(CliError::Config(format!(
            "input has no {} column",
            chemospec::dynamics::norm_label(p)
        )));
    }
    let result = fit_rate(&series, p, (window[0], window[1]), mode)?;
    Ok(Outcome::ok(write_report(&dir, "fit", "fit", &cfg, &result)?))
}

// --------------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepResult {
    rows: usize,
    errors: usize,
    files: Vec<String>,
}

pub fn sweep(mut cfg: ExperimentConfig) -> Result<Outcome, CliError> {
    let axes_cfg = cfg.sweep.clone().unwrap_or_default();
    let mut axes = Vec::new();
    for (name, values) in &axes_cfg {
        let p = SweepParam::parse(name).ok_or_else(|| {
            CliError::Config(format!(
                "sweep: unknown axis `{name}` (expected A, beta1, beta2, lambda1, lambda2)"
            ))
        })?;
        axes.push((p, values.values()?));
    }
    let swept = |p: SweepParam| axes.iter().any(|(q, _)| *q == p);
    let base_value = |v: Option<f64>, p: SweepParam, name: &str| -> Result<f64, CliError> {
        match v {
            Some(x) => Ok(x),
            None if swept(p) => Ok(f64::NAN),
            None => Err(CliError::Config(format!("sweep: `{name}` is neither set nor swept"))),
        }
    };
    let base = [
        base_value(cfg.beta1, SweepParam::Beta1, "beta1")?,
        base_value(cfg.beta2, SweepParam::Beta2, "beta2")?,
        base_value(cfg.lambda1, SweepParam::Lambda1, "lambda1")?,
        base_value(cfg.lambda2, SweepParam::Lambda2, "lambda2")?,
        base_value(cfg.amplitude, SweepParam::Amplitude, "A")?,
    ];
    let mut spec = SweepSpec::new(base);
    spec.axes = axes;
    if default_to(&mut cfg.sweep_simulate, false) {
        let grid = grid_spec(&mut cfg, 1, 256, 50.0);
        spec.simulate = Some(SimSummarySpec {
            grid,
            t_end: default_to(&mut cfg.t_end, 1.0),
            dt: default_to(&mut cfg.dt, 0.01),
            mass: default_to(&mut cfg.ic_mass, 1e-2),
            width: default_to(&mut cfg.ic_width, 1.0),
        });
    }
    default_to(&mut cfg.seed, 0);
    let dir = prepare_dir(&cfg)?;
    let rows = run_sweep(&spec, Exec::Parallel);
    let mut out = BufWriter::new(File::create(output_file(&dir, "sweep.csv"))?);
    write_sweep_csv(&rows, &mut out)?;
    out.flush()?;
    let errors = rows.iter().filter(|r| r.outcome.is_err()).count();
    let result = SweepResult {
        rows: rows.len(),
        errors,
        files: vec!["sweep.csv".into()],
    };
    let report = write_report(&dir, "sweep", "sweep", &cfg, &result)?;
    Ok(Outcome {
        report,
        failure: (errors > 0).then_some(CliError::SweepFailures(errors)),
    })
}
