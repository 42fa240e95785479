//! Command-line driver.
//!
//! ```text
//! helix-euler [--config PATH] [--out DIR] [--seed N] [--threads N] <command> [key=value | --key value]...
//! ```
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 numerical failure
//! (including a failed check in `kernel-verify` or `velocity-probe`). Errors are
//! written to stderr as one JSON object `{"error": code, "message": text}`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::biotsavart::{closest_approach, diff, particle_support_radius, VelocityEvalConfig};
use crate::error::{Error, Result};
use crate::geometry::{helicality_residual, screw, swirl, xi, HelixParams, Vec3};
use crate::io::{emit_csv, emit_json, fmt_f64, read_snapshots, write_snapshots, SnapshotIndex};
use crate::kernel::{biot_savart_kernel, green_images, green_series, kernel_bound_ratio, KernelConfig, Representation};
use crate::kernel::biot_savart_kernel_with;
use crate::rng::{cylinder_points, CounterRng};
use crate::scenario::{self, Scenario, ScenarioKind};
use crate::transport::{run, state_velocity, SimulationConfig, TrajectoryState};
use crate::weakform::{delta_scaling, splitting_report, weak_residual_with, CutoffPair};

pub const OUT_ENV: &str = "HELIX_EULER_OUT";

#[derive(Debug, Parser)]
#[command(name = "helix-euler", version, about = "Helical Euler flows: kernels, velocity recovery, particle transport")]
struct Cli {
    /// Scenario JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overridden by HELIX_EULER_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the probe-point generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Green's function and kernel at seeded points, both representations.
    KernelTable(Overrides),
    /// Series vs image agreement and kernel bound stability.
    KernelVerify(Overrides),
    /// Velocity, swirl, divergence and helicality at probe points.
    VelocityProbe(Overrides),
    /// Far-field decay exponent of the velocity.
    DecayStudy(Overrides),
    /// Particle transport with snapshots and diagnostics.
    Simulate(Overrides),
    /// Weak-formulation residual of a snapshot series.
    WeakformCheck(Overrides),
}

#[derive(Debug, clap::Args)]
struct Overrides {
    /// Scenario overrides as `key=value` or `--key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    args: Vec<String>,
}

impl Command {
    fn kind(&self) -> ScenarioKind {
        match self {
            Command::KernelTable(_) => ScenarioKind::KernelTable,
            Command::KernelVerify(_) => ScenarioKind::KernelVerify,
            Command::VelocityProbe(_) => ScenarioKind::VelocityProbe,
            Command::DecayStudy(_) => ScenarioKind::DecayStudy,
            Command::Simulate(_) => ScenarioKind::Simulate,
            Command::WeakformCheck(_) => ScenarioKind::WeakformCheck,
        }
    }

    fn args(&self) -> &[String] {
        match self {
            Command::KernelTable(o)
            | Command::KernelVerify(o)
            | Command::VelocityProbe(o)
            | Command::DecayStudy(o)
            | Command::Simulate(o)
            | Command::WeakformCheck(o) => &o.args,
        }
    }
}

#[derive(Debug, Default)]
struct Globals {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
}

fn flag_value<T: std::str::FromStr>(name: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::invalid("invalid_arguments", format!("--{name}: cannot parse {v:?}")))
}

/// Splits trailing arguments into global flags and `key=value` overrides.
fn split_args(args: &[String], g: &mut Globals) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.strip_prefix("--") else {
            out.push(a.clone());
            continue;
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Error::invalid("invalid_arguments", format!("--{flag} needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        match key.as_str() {
            "config" => g.config = Some(PathBuf::from(value)),
            "out" => g.out = Some(PathBuf::from(value)),
            "seed" => g.seed = Some(flag_value("seed", &value)?),
            "threads" => g.threads = Some(flag_value("threads", &value)?),
            _ => out.push(format!("{}={value}", key.replace('-', "_"))),
        }
    }
    Ok(out)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Csv(_) => 3,
        Error::InvalidConfig { .. }
        | Error::ResolutionTooCoarse { .. }
        | Error::InsufficientSnapshots(_)
        | Error::UnbalancedVorticity { .. }
        | Error::Normalization { .. }
        | Error::EmptyParticleSet
        | Error::Json(_) => 2,
        Error::QuadratureNonconvergence { .. }
        | Error::StepRejected { .. }
        | Error::SingularInput(..)
        | Error::OnFilament
        | Error::Domain { .. } => 4,
    }
}

fn report_error(code: &str, message: &str) {
    eprintln!("{}", json!({ "error": code, "message": message }));
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            report_error("invalid_arguments", e.to_string().trim_end());
            return 2;
        }
    };
    match execute(cli) {
        Ok(Outcome { passed: true }) => 0,
        Ok(Outcome { passed: false }) => 4,
        Err(e) => {
            report_error(e.code(), &e.to_string());
            exit_code(&e)
        }
    }
}

struct Outcome {
    passed: bool,
}

fn execute(cli: Cli) -> Result<Outcome> {
    let mut g = Globals {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
    };
    let kind = cli.command.kind();
    let overrides = split_args(cli.command.args(), &mut g)?;
    let text = match &g.config {
        Some(p) => Some(fs::read_to_string(p)?),
        None => None,
    };
    let sc = scenario::load(kind, text.as_deref(), &overrides)?;
    let out = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .or(g.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = g.seed.or(sc.seed).unwrap_or(0);
    let task = || dispatch(&sc, &out, seed);
    match g.threads {
        Some(0) => Err(Error::invalid("invalid_threads", "--threads must be >= 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid("invalid_threads", e.to_string()))?
            .install(task),
        None => task(),
    }
}

fn dispatch(sc: &Scenario, out: &Path, seed: u64) -> Result<Outcome> {
    let h = sc.helix()?;
    let passed = match sc.kind {
        ScenarioKind::KernelTable => kernel_table(sc, h, out, seed)?,
        ScenarioKind::KernelVerify => kernel_verify(sc, h, out, seed)?,
        ScenarioKind::VelocityProbe => velocity_probe(sc, h, out, seed)?,
        ScenarioKind::DecayStudy => decay_study(sc, h, out)?,
        ScenarioKind::Simulate => simulate(sc, h, out)?,
        ScenarioKind::WeakformCheck => weakform_check(sc, h, out)?,
    };
    let mut resolved = sc.clone();
    resolved.seed = Some(seed);
    emit_json(&out.join("scenario.json"), &resolved)?;
    Ok(Outcome { passed })
}

fn kernel_table(sc: &Scenario, h: HelixParams, out: &Path, seed: u64) -> Result<bool> {
    let p = sc.kernel_table.as_ref().expect("block filled");
    let cfg = p.kernel_cfg(h)?;
    let k = h.kappa();
    let xs = cylinder_points(seed, p.points, p.r_min * k, p.r_max * k, h.half_period());
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let kv = biot_savart_kernel(x, &cfg)?;
        rows.push(vec![
            fmt_f64(x.x),
            fmt_f64(x.y),
            fmt_f64(x.z),
            fmt_f64(green_series(x, &cfg)?),
            fmt_f64(green_images(x, &cfg)?),
            fmt_f64(kv.value.x),
            fmt_f64(kv.value.y),
            fmt_f64(kv.value.z),
            fmt_f64(kernel_bound_ratio(x, &cfg)?),
            kv.representation_used.as_str().to_string(),
        ]);
    }
    emit_csv(
        &out.join("kernel_table.csv"),
        &["x1", "x2", "x3", "G_series", "G_images", "K1", "K2", "K3", "bound_ratio", "repr"],
        &rows,
    )?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct BoundStability {
    points_small: usize,
    points_large: usize,
    sup_small: f64,
    sup_large: f64,
    relative_change: f64,
    all_finite: bool,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct KernelVerifyReport {
    kappa: f64,
    seed: u64,
    points: usize,
    max_series_vs_images: f64,
    max_path_relative: f64,
    series_tolerance: f64,
    path_tolerance: f64,
    bound: Option<BoundStability>,
    pass: bool,
}

fn bound_sup(xs: &[Vec3], cfg: &KernelConfig) -> Result<(f64, bool)> {
    use rayon::prelude::*;
    let rs: Vec<f64> = xs.par_iter().map(|&x| kernel_bound_ratio(x, cfg)).collect::<Result<_>>()?;
    let finite = rs.iter().all(|r| r.is_finite());
    Ok((rs.iter().copied().fold(0.0, f64::max), finite))
}

fn kernel_verify(sc: &Scenario, h: HelixParams, out: &Path, seed: u64) -> Result<bool> {
    let p = sc.kernel_verify.as_ref().expect("block filled");
    let cfg = p.kernel_cfg(h)?;
    let k = h.kappa();
    let xs = cylinder_points(seed, p.points, p.r_min * k, p.r_max * k, h.half_period());
    let mut gap: f64 = 0.0;
    let mut path: f64 = 0.0;
    for &x in &xs {
        gap = gap.max((green_series(x, &cfg)? - green_images(x, &cfg)?).abs());
        let a = biot_savart_kernel_with(x, &cfg, Representation::BesselSeries)?.value;
        let b = biot_savart_kernel_with(x, &cfg, Representation::ImageSum)?.value;
        path = path.max((a - b).norm() / a.norm().max(b.norm()));
    }
    let bound = if p.bound_points_large > 0 {
        let ys = cylinder_points(
            seed.wrapping_add(1),
            p.bound_points_large,
            p.bound_r_min * k,
            p.bound_r_max * k,
            h.half_period(),
        );
        let (small, f1) = bound_sup(&ys[..p.bound_points_small], &cfg)?;
        let (large, f2) = bound_sup(&ys, &cfg)?;
        let rel = (large - small).abs() / large;
        Some(BoundStability {
            points_small: p.bound_points_small,
            points_large: p.bound_points_large,
            sup_small: small,
            sup_large: large,
            relative_change: rel,
            all_finite: f1 && f2,
            pass: f1 && f2 && rel <= p.bound_stability,
        })
    } else {
        None
    };
    let pass = gap <= p.series_tolerance && path <= p.path_tolerance && bound.as_ref().is_none_or(|b| b.pass);
    let report = KernelVerifyReport {
        kappa: k,
        seed,
        points: p.points,
        max_series_vs_images: gap,
        max_path_relative: path,
        series_tolerance: p.series_tolerance,
        path_tolerance: p.path_tolerance,
        bound,
        pass,
    };
    emit_json(&out.join("kernel_verify.json"), &report)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(pass)
}

#[derive(Debug, Serialize)]
struct ProbeSummary {
    probes: usize,
    blob_epsilon: f64,
    min_distance: f64,
    max_swirl: f64,
    max_div_fd: f64,
    max_helicality_residual: f64,
    swirl_tolerance: f64,
    div_tolerance: f64,
    helicality_tolerance: f64,
    pass: bool,
}

pub const SWIRL_TOLERANCE: f64 = 1e-6;
pub const DIV_TOLERANCE: f64 = 1e-5;

fn velocity_probe(sc: &Scenario, h: HelixParams, out: &Path, seed: u64) -> Result<bool> {
    let p = sc.velocity_probe.as_ref().expect("block filled");
    let setup = p.setup(h)?;
    let eps = setup.eval_cfg.blob_epsilon;
    let dmin = p.min_distance.max(4.0 * eps);
    let zs = setup.particles.positions();
    let clear = |x: Vec3| zs.iter().all(|&z| closest_approach(x, z, &h).1 >= dmin);
    let mut rng = CounterRng::new(seed);
    let mut probes = Vec::new();
    if p.points.is_empty() {
        let mut tries = 0usize;
        while probes.len() < p.probes {
            tries += 1;
            if tries > 1000 * p.probes {
                return Err(Error::invalid(
                    "probe_region_blocked",
                    "could not place probes away from the filaments",
                ));
            }
            let r = p.probe_radius * rng.next_f64().sqrt();
            let a = std::f64::consts::TAU * rng.next_f64();
            let x = Vec3::new(r * a.cos(), r * a.sin(), rng.range(-h.half_period(), h.half_period()));
            let theta = rng.range(-std::f64::consts::PI, std::f64::consts::PI);
            if clear(x) && clear(screw(theta, x, &h)) {
                probes.push((x, theta));
            }
        }
    } else {
        for &x in &p.points {
            let theta = rng.range(-std::f64::consts::PI, std::f64::consts::PI);
            probes.push((x, theta));
        }
    }
    let mut sim = SimulationConfig::new(1.0, 2.0, setup.eval_cfg);
    sim.background_mode = setup.mode;
    let field = |x: Vec3| -> Result<Vec3> {
        Ok(state_velocity(&setup.particles, setup.background.as_ref(), &[x], &sim)?[0])
    };
    let xs: Vec<Vec3> = probes.iter().map(|q| q.0).collect();
    let us = state_velocity(&setup.particles, setup.background.as_ref(), &xs, &sim)?;
    let mut rows = Vec::with_capacity(probes.len());
    let (mut msw, mut mdiv, mut mhel): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (&(x, theta), &u) in probes.iter().zip(&us) {
        let un = u.norm();
        let sw = if un > 0.0 { swirl(u, x, &h).abs() / (un * xi(x, &h).norm()) } else { 0.0 };
        let div = diff::relative_divergence(field, x, p.fd_step)?;
        let hr = helicality_residual(field, x, theta, &h)?.norm();
        let hel = if un > 0.0 { hr / un } else { hr };
        msw = msw.max(sw);
        mdiv = mdiv.max(div);
        mhel = mhel.max(hel);
        rows.push(vec![
            fmt_f64(x.x),
            fmt_f64(x.y),
            fmt_f64(x.z),
            fmt_f64(u.x),
            fmt_f64(u.y),
            fmt_f64(u.z),
            fmt_f64(sw),
            fmt_f64(div),
            fmt_f64(hel),
        ]);
    }
    emit_csv(
        &out.join("probe.csv"),
        &["x1", "x2", "x3", "u1", "u2", "u3", "swirl", "div_fd", "helicality_residual_norm"],
        &rows,
    )?;
    let hel_tol = 10.0 * setup.eval_cfg.quad_tolerance;
    let pass = msw <= SWIRL_TOLERANCE && mdiv <= DIV_TOLERANCE && mhel <= hel_tol;
    let summary = ProbeSummary {
        probes: probes.len(),
        blob_epsilon: eps,
        min_distance: dmin,
        max_swirl: msw,
        max_div_fd: mdiv,
        max_helicality_residual: mhel,
        swirl_tolerance: SWIRL_TOLERANCE,
        div_tolerance: DIV_TOLERANCE,
        helicality_tolerance: hel_tol,
        pass,
    };
    emit_json(&out.join("probe.json"), &summary)?;
    Ok(pass)
}

fn decay_study(sc: &Scenario, h: HelixParams, out: &Path) -> Result<bool> {
    let p = sc.decay_study.as_ref().expect("block filled");
    let setup = p.setup(h)?;
    let fit = crate::biotsavart::decay_fit(&setup.particles, &setup.eval_cfg, p.radii)?;
    let rows: Vec<Vec<String>> = fit
        .radii
        .iter()
        .zip(&fit.magnitudes)
        .map(|(r, m)| vec![fmt_f64(*r), fmt_f64(*m)])
        .collect();
    emit_csv(&out.join("decay.csv"), &["r", "mean_abs_u"], &rows)?;
    let within = fit.exponent >= p.expected_min && fit.exponent <= p.expected_max;
    let r_max = fit.radii.last().copied().unwrap_or(0.0);
    emit_json(
        &out.join("decay.json"),
        &json!({
            "exponent": fit.exponent,
            "support_radius": particle_support_radius(&setup.particles)?,
            "particles": setup.particles.len(),
            "blob_epsilon": setup.eval_cfg.blob_epsilon,
            "r_min": fit.radii.first(),
            "r_max": r_max,
            // Beyond |x̃| ~ κ the helical modes decay exponentially, steeper than −2.
            "r_max_over_kappa": r_max / h.kappa(),
            "expected_min": p.expected_min,
            "expected_max": p.expected_max,
            "within_expected": within,
        }),
    )?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    particles: usize,
    tracers: usize,
    steps: usize,
    t_end: f64,
    blob_epsilon: f64,
    initial_support_radius: f64,
    final_support_radius: f64,
    /// `max_j ||z_j(T)| − |z_j(0)||` over vorticity-carrying particles.
    max_radius_drift: f64,
    /// `max ||z(T)| − |z(0)||` over the tracers.
    max_tracer_drift: Option<f64>,
    circulation_constant: bool,
    linf_constant: bool,
    lp_constant: bool,
    warnings: Vec<String>,
}

fn simulate(sc: &Scenario, h: HelixParams, out: &Path) -> Result<bool> {
    let p = sc.simulate.as_ref().expect("block filled");
    let (initial, cfg) = p.setup(h)?;
    let res = run(&initial, &cfg)?;
    let nt = p.tracers.len();
    let n = initial.particles.len();
    let drift = |range: std::ops::Range<usize>| {
        range
            .map(|j| {
                let a = initial.particles.particles()[j].z.norm();
                let b = res.final_state.particles.particles()[j].z.norm();
                (b - a).abs()
            })
            .fold(0.0, f64::max)
    };
    let index = SnapshotIndex {
        kappa: h.kappa(),
        dt: cfg.dt,
        blob_epsilon: cfg.eval_cfg.blob_epsilon,
        quad_tolerance: cfg.eval_cfg.quad_tolerance,
        lp_exponent: cfg.lp_exponent,
        background_mode: cfg.background_mode,
        profile: initial.background.map(|b| b.profile),
        entries: Vec::new(),
    };
    let steps: Vec<usize> = res.report.records.iter().map(|r| r.step).collect();
    write_snapshots(&out.join("snapshots"), &res.snapshots, index, &steps)?;
    emit_json(&out.join("diagnostics.json"), &res.report)?;
    let summary = SimulateSummary {
        particles: n - nt,
        tracers: nt,
        steps: cfg.n_steps(),
        t_end: res.final_state.t,
        blob_epsilon: cfg.eval_cfg.blob_epsilon,
        initial_support_radius: particle_support_radius(&initial.particles)?,
        final_support_radius: particle_support_radius(&res.final_state.particles)?,
        max_radius_drift: drift(0..n - nt),
        max_tracer_drift: (nt > 0).then(|| drift(n - nt..n)),
        circulation_constant: res.report.circulation_constant,
        linf_constant: res.report.linf_constant,
        lp_constant: res.report.lp_constant,
        warnings: res.report.warnings.clone(),
    };
    emit_json(&out.join("summary.json"), &summary)?;
    Ok(true)
}

fn eval_cfg_of(index: &SnapshotIndex, h: HelixParams) -> Result<VelocityEvalConfig> {
    let c = VelocityEvalConfig::new(h)
        .with_blob(index.blob_epsilon)
        .with_tolerance(index.quad_tolerance);
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Serialize)]
struct RefinementRow {
    snapshots: String,
    particles: usize,
    dt: f64,
    residual: f64,
    relative: f64,
    residual_with_diagonal: Option<f64>,
    /// Residual divided by the previous row's.
    ratio: Option<f64>,
}

fn load_series(dir: &Path, h: HelixParams) -> Result<(SnapshotIndex, Vec<TrajectoryState>)> {
    let (index, states) = read_snapshots(dir)?;
    if (index.kappa - h.kappa()).abs() > 1e-14 * h.kappa() {
        return Err(Error::invalid(
            "kappa_mismatch",
            format!("{} was written with kappa = {}", dir.display(), index.kappa),
        ));
    }
    Ok((index, states))
}

fn weakform_check(sc: &Scenario, h: HelixParams, out: &Path) -> Result<bool> {
    let p = sc.weakform_check.as_ref().expect("block filled");
    p.validate()?;
    let (index, states) = load_series(&p.snapshots, h)?;
    let last_t = states.last().map(|s| s.t).unwrap_or(0.0);
    let psi = p.test_function.build(h, last_t)?;
    let cfg = eval_cfg_of(&index, h)?;
    let mode = index.background_mode;
    let res = weak_residual_with(&states, &psi, &cfg, mode)?;
    let radius = CutoffPair::minimal_radius(&psi, p.radius_factor);
    let cuts = CutoffPair::new(p.deltas[0], radius, &psi)?;
    let split = splitting_report(&states, &psi, &cuts, &cfg)?;
    let scaling = if p.deltas.len() >= 2 {
        let s = states.get(p.scaling_snapshot).ok_or_else(|| {
            Error::invalid("invalid_scaling_snapshot", format!("no snapshot {}", p.scaling_snapshot))
        })?;
        let d = delta_scaling(s, &psi, &p.deltas, radius, p.p, &cfg)?;
        let within = d
            .ratios
            .iter()
            .zip(&d.predicted_ratios)
            .all(|(m, q)| ((m - q) / q).abs() <= p.scaling_tolerance);
        Some(json!({ "study": d, "tolerance": p.scaling_tolerance, "within_tolerance": within }))
    } else {
        None
    };
    let mut table = vec![RefinementRow {
        snapshots: p.snapshots.display().to_string(),
        particles: states[0].particles.len(),
        dt: index.dt,
        residual: res.residual,
        relative: res.relative,
        residual_with_diagonal: res.residual_with_diagonal,
        ratio: None,
    }];
    for dir in &p.refinement {
        let (ix, ss) = load_series(dir, h)?;
        let c = eval_cfg_of(&ix, h)?;
        let r = weak_residual_with(&ss, &psi, &c, ix.background_mode)?;
        let prev = table.last().map(|t| t.residual).unwrap_or(f64::NAN);
        table.push(RefinementRow {
            snapshots: dir.display().to_string(),
            particles: ss[0].particles.len(),
            dt: ix.dt,
            residual: r.residual,
            relative: r.relative,
            residual_with_diagonal: r.residual_with_diagonal,
            ratio: Some(r.residual / prev),
        });
    }
    emit_json(
        &out.join("weakform.json"),
        &json!({
            "test_function": psi,
            "residual": res.residual,
            "relative": res.relative,
            "terms": {
                "time": res.time_term,
                "nonlinear": res.nonlinear_term,
                "initial": res.initial_term,
            },
            "diagonal": res.diagonal,
            "residual_with_diagonal": res.residual_with_diagonal,
            "parts": {
                "near": split.parts.near,
                "bulk": split.parts.bulk,
                "far": split.parts.far,
                "total": split.parts.total,
                "near_abs": split.parts.near_abs,
            },
            "cutoffs": split.cuts,
            "partition_error": split.partition_error,
            "delta_scaling": scaling,
            "refinement_table": table,
        }),
    )?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_flags_split() {
        let mut g = Globals::default();
        let args: Vec<String> = ["--points", "10", "--seed", "7", "dt=0.1", "--out=x", "--mollifier-n", "4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let o = split_args(&args, &mut g).unwrap();
        assert_eq!(o, vec!["points=10", "dt=0.1", "mollifier_n=4"]);
        assert_eq!(g.seed, Some(7));
        assert_eq!(g.out, Some(PathBuf::from("x")));
        assert!(split_args(&["--points".to_string()], &mut g).is_err());
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(run_command(["helix-euler", "no-such-command"]), 2);
        assert_eq!(run_command(["helix-euler", "--threads", "x", "kernel-table"]), 2);
    }
}
