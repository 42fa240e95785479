//! Scenario files: versioned JSON with one parameter block per command.
//!
//! ```json
//! { "schema_version": 1, "kappa": 1.0, "kind": "simulate",
//!   "simulate": { "initial": { "preset": "dipole" }, "dt": 0.02 } }
//! ```
//!
//! Unknown keys are rejected. Command-line `key=value` overrides address the
//! command's block by dotted path (`dt=0.01`, `initial.dipole.separation=1.2`);
//! `kappa` and `seed` address the top level, and keys of the `initial` block may
//! be given without the prefix (`preset=radial-steady`). Values are parsed as
//! JSON when possible and taken as strings otherwise.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::biotsavart::{Particle, RadialProfile, SteadyBackground, VelocityEvalConfig, VorticityParticles};
use crate::error::{Error, Result};
use crate::geometry::{HelixParams, Vec2, Vec3};
use crate::kernel::{KernelConfig, Normalization};
use crate::transport::mollify::MIN_ACROSS;
use crate::transport::{
    default_blob_epsilon, mollify_initial, radial_steady, BackgroundMode, Integrator, MollifierSpec, RadialSteadySpec,
    SimulationConfig, SliceField,
};
use crate::weakform::TestFunction;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    KernelTable,
    KernelVerify,
    VelocityProbe,
    DecayStudy,
    Simulate,
    WeakformCheck,
}

impl ScenarioKind {
    pub fn block(self) -> &'static str {
        match self {
            ScenarioKind::KernelTable => "kernel_table",
            ScenarioKind::KernelVerify => "kernel_verify",
            ScenarioKind::VelocityProbe => "velocity_probe",
            ScenarioKind::DecayStudy => "decay_study",
            ScenarioKind::Simulate => "simulate",
            ScenarioKind::WeakformCheck => "weakform_check",
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default = "one")]
    pub kappa: f64,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_table: Option<KernelTableParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_verify: Option<KernelVerifyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_probe: Option<VelocityProbeParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_study: Option<DecayStudyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakform_check: Option<WeakformCheckParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelTableParams {
    pub points: usize,
    /// `|x̃|` range in units of `κ`.
    pub r_min: f64,
    pub r_max: f64,
    pub normalization: Normalization,
    pub image_truncation: usize,
    /// In units of `κ`.
    pub switch_radius: f64,
}

impl Default for KernelTableParams {
    fn default() -> Self {
        KernelTableParams {
            points: 64,
            r_min: 0.05,
            r_max: 10.0,
            normalization: Normalization::Paper,
            image_truncation: 24,
            switch_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelVerifyParams {
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub normalization: Normalization,
    pub image_truncation: usize,
    pub switch_radius: f64,
    /// Sizes of the two nested sample sets for the bound-ratio supremum; 0 skips.
    pub bound_points_small: usize,
    pub bound_points_large: usize,
    pub bound_r_min: f64,
    pub bound_r_max: f64,
    pub series_tolerance: f64,
    pub path_tolerance: f64,
    pub bound_stability: f64,
}

impl Default for KernelVerifyParams {
    fn default() -> Self {
        KernelVerifyParams {
            points: 1000,
            r_min: 0.05,
            r_max: 10.0,
            normalization: Normalization::Paper,
            image_truncation: 24,
            switch_radius: 0.5,
            bound_points_small: 10_000,
            bound_points_large: 100_000,
            bound_r_min: 1e-3,
            bound_r_max: 100.0,
            series_tolerance: 1e-8,
            path_tolerance: 1e-7,
            bound_stability: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    DiscPatch,
    Dipole,
    Ring,
    RadialSteady,
    /// Explicit filaments from `particles`.
    Particles,
    /// No vorticity; only tracers.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscParams {
    pub center: Vec2,
    pub radius: f64,
    pub amplitude: f64,
}

impl Default for DiscParams {
    fn default() -> Self {
        DiscParams {
            center: Vec2::ZERO,
            radius: 0.25,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DipoleParams {
    pub separation: f64,
    pub radius: f64,
    pub amplitude: f64,
}

impl Default for DipoleParams {
    fn default() -> Self {
        DipoleParams {
            separation: 1.0,
            radius: 0.25,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingParams {
    pub r_inner: f64,
    pub r_outer: f64,
    pub amplitude: f64,
}

impl Default for RingParams {
    fn default() -> Self {
        RingParams {
            r_inner: 0.2,
            r_outer: 0.5,
            amplitude: 1.0,
        }
    }
}

/// Initial slice vorticity and its particle discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSpec {
    pub preset: Preset,
    pub disc: DiscParams,
    pub dipole: DipoleParams,
    pub ring: RingParams,
    pub radial_steady: RadialSteadySpec,
    pub particles: Vec<Particle>,
    /// Mollifier index `n` for the disc-based presets.
    pub mollifier_n: usize,
    pub mollifier_radius: f64,
    /// Grid spacing of the particle seeding; by default the mollified support
    /// is `MIN_ACROSS + ½` spacings across.
    pub spacing: Option<f64>,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            preset: Preset::Dipole,
            disc: DiscParams::default(),
            dipole: DipoleParams::default(),
            ring: RingParams::default(),
            radial_steady: RadialSteadySpec::default(),
            particles: Vec::new(),
            mollifier_n: 8,
            mollifier_radius: 1.0,
            spacing: None,
        }
    }
}

impl InitialSpec {
    pub fn slice_field(&self) -> Result<Option<SliceField>> {
        Ok(match self.preset {
            Preset::DiscPatch => Some(SliceField::disc_patch(self.disc.center, self.disc.radius, self.disc.amplitude)?),
            Preset::Dipole => Some(SliceField::dipole(
                self.dipole.separation,
                self.dipole.radius,
                self.dipole.amplitude,
            )?),
            Preset::Ring => Some(SliceField::ring(self.ring.r_inner, self.ring.r_outer, self.ring.amplitude)?),
            _ => None,
        })
    }

    /// Builds the particles and the default blob radius for them
    /// (`½·mean spacing` for mollified presets, 0 for explicit filaments).
    pub fn build(&self, h: HelixParams) -> Result<(VorticityParticles, f64)> {
        if let Some(field) = self.slice_field()? {
            let m = MollifierSpec {
                n: self.mollifier_n,
                base_radius: self.mollifier_radius,
            };
            m.validate()?;
            let spacing = self.spacing.unwrap_or_else(|| {
                let (lo, hi) = field.bounds();
                let extent = (hi.x - lo.x).max(hi.y - lo.y) + 2.0 * m.support_radius();
                extent / (MIN_ACROSS as f64 + 0.5)
            });
            let w = mollify_initial(&field, &m, spacing, h)?;
            let eps = default_blob_epsilon(&w);
            return Ok((w, eps));
        }
        match self.preset {
            Preset::RadialSteady => {
                let w = radial_steady(h, &self.radial_steady)?;
                let eps = default_blob_epsilon(&w);
                Ok((w, eps))
            }
            Preset::Particles => {
                if self.particles.is_empty() {
                    return Err(Error::invalid("invalid_particles", "preset 'particles' needs a non-empty list"));
                }
                Ok((VorticityParticles::new(h, self.particles.clone())?, 0.0))
            }
            _ => Ok((VorticityParticles::empty(h), 0.0)),
        }
    }
}

/// Radial background profile. Under `xi` the amplitude is fixed by the balance
/// condition `2π∫φ r dr = ΣΓ` and `amplitude` must be absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSpec {
    pub mode: BackgroundMode,
    pub r_inner: f64,
    pub r_outer: f64,
    pub amplitude: Option<f64>,
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        BackgroundSpec {
            mode: BackgroundMode::Additive,
            r_inner: 0.1,
            r_outer: 1.5,
            amplitude: None,
        }
    }
}

impl BackgroundSpec {
    pub fn build(&self, w: &VorticityParticles) -> Result<SteadyBackground> {
        let profile = match (self.mode, self.amplitude) {
            (BackgroundMode::Xi, None) => RadialProfile::balancing(self.r_inner, self.r_outer, w.total_circulation())?,
            (BackgroundMode::Xi, Some(_)) => {
                return Err(Error::invalid(
                    "invalid_background_amplitude",
                    "the xi background amplitude is fixed by the balance condition",
                ))
            }
            (BackgroundMode::Additive, a) => RadialProfile::new(self.r_inner, self.r_outer, a.unwrap_or(1.0))?,
        };
        Ok(SteadyBackground::new(profile, w.h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VelocityProbeParams {
    pub initial: InitialSpec,
    pub background: Option<BackgroundSpec>,
    /// Overrides the preset's default blob radius.
    pub blob_epsilon: Option<f64>,
    pub quad_tolerance: f64,
    /// Random probes in `|x̃| ≤ probe_radius`, `|x₃| ≤ πκ`; ignored when `points` is non-empty.
    pub probes: usize,
    pub probe_radius: f64,
    /// Probes keep a distance of `max(min_distance, 4ε)` from every filament.
    pub min_distance: f64,
    pub points: Vec<Vec3>,
    pub fd_step: f64,
    pub theta: f64,
}

impl Default for VelocityProbeParams {
    fn default() -> Self {
        VelocityProbeParams {
            initial: InitialSpec::default(),
            background: None,
            blob_epsilon: None,
            quad_tolerance: 1e-8,
            probes: 20,
            probe_radius: 1.5,
            min_distance: 0.05,
            points: Vec::new(),
            fd_step: 1e-3,
            theta: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayStudyParams {
    pub initial: InitialSpec,
    pub blob_epsilon: Option<f64>,
    pub quad_tolerance: f64,
    pub radii: usize,
    pub expected_min: f64,
    pub expected_max: f64,
}

impl Default for DecayStudyParams {
    fn default() -> Self {
        DecayStudyParams {
            initial: InitialSpec::default(),
            blob_epsilon: None,
            quad_tolerance: 1e-8,
            radii: 12,
            expected_min: -2.2,
            expected_max: -1.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateParams {
    pub initial: InitialSpec,
    pub background: Option<BackgroundSpec>,
    /// Passive particles appended to the initial set.
    pub tracers: Vec<Vec2>,
    pub blob_epsilon: Option<f64>,
    pub quad_tolerance: f64,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub reproject_each_step: bool,
    pub diagnostics_every: usize,
    pub lp_exponent: f64,
    pub diagnostic_probes: usize,
}

impl Default for SimulateParams {
    fn default() -> Self {
        SimulateParams {
            initial: InitialSpec::default(),
            background: None,
            tracers: Vec::new(),
            blob_epsilon: None,
            quad_tolerance: 1e-8,
            dt: 0.01,
            t_end: 0.2,
            integrator: Integrator::Rk4,
            reproject_each_step: true,
            diagnostics_every: 1,
            lp_exponent: 2.0,
            diagnostic_probes: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunctionPreset {
    HelicalBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestFunctionSpec {
    pub preset: TestFunctionPreset,
    pub center: Vec2,
    pub radius: f64,
    pub amplitude: f64,
    /// Defaults to the last snapshot time.
    pub horizon: Option<f64>,
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec {
            preset: TestFunctionPreset::HelicalBump,
            center: Vec2::new(0.4, 0.1),
            radius: 0.6,
            amplitude: 1.0,
            horizon: None,
        }
    }
}

impl TestFunctionSpec {
    pub fn build(&self, h: HelixParams, last_t: f64) -> Result<TestFunction> {
        match self.preset {
            TestFunctionPreset::HelicalBump => {
                TestFunction::helical_bump(h, self.center, self.radius, self.amplitude, self.horizon.unwrap_or(last_t))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeakformCheckParams {
    /// Snapshot directory written by `simulate`.
    pub snapshots: PathBuf,
    /// Further snapshot directories, listed in the refinement table after `snapshots`.
    pub refinement: Vec<PathBuf>,
    pub test_function: TestFunctionSpec,
    /// Near-diagonal widths; the first is used for the splitting report.
    pub deltas: Vec<f64>,
    /// `R` as a multiple of the smallest admissible radius `2·max(ρ, 2πκ)`.
    pub radius_factor: f64,
    /// Integrability exponent `p` selecting the predicted δ-scaling.
    pub p: f64,
    /// Snapshot used for the δ-scaling study.
    pub scaling_snapshot: usize,
    pub scaling_tolerance: f64,
}

impl Default for WeakformCheckParams {
    fn default() -> Self {
        WeakformCheckParams {
            snapshots: PathBuf::from("snapshots"),
            refinement: Vec::new(),
            test_function: TestFunctionSpec::default(),
            deltas: vec![0.25, 0.125],
            radius_factor: 1.1,
            p: 2.0,
            scaling_snapshot: 0,
            scaling_tolerance: 0.3,
        }
    }
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        let mut s = Scenario {
            schema_version: SCHEMA_VERSION,
            kappa: 1.0,
            kind,
            seed: None,
            kernel_table: None,
            kernel_verify: None,
            velocity_probe: None,
            decay_study: None,
            simulate: None,
            weakform_check: None,
        };
        s.fill_block();
        s
    }

    fn fill_block(&mut self) {
        match self.kind {
            ScenarioKind::KernelTable => {
                self.kernel_table.get_or_insert_with(Default::default);
            }
            ScenarioKind::KernelVerify => {
                self.kernel_verify.get_or_insert_with(Default::default);
            }
            ScenarioKind::VelocityProbe => {
                self.velocity_probe.get_or_insert_with(Default::default);
            }
            ScenarioKind::DecayStudy => {
                self.decay_study.get_or_insert_with(Default::default);
            }
            ScenarioKind::Simulate => {
                self.simulate.get_or_insert_with(Default::default);
            }
            ScenarioKind::WeakformCheck => {
                self.weakform_check.get_or_insert_with(Default::default);
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::invalid("invalid_scenario", e.to_string()))?;
        Self::from_value(v)
    }

    fn from_value(v: Value) -> Result<Self> {
        if let Some(ver) = v.get("schema_version") {
            if ver.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(Error::invalid(
                    "unsupported_schema_version",
                    format!("schema_version must be {SCHEMA_VERSION}, got {ver}"),
                ));
            }
        }
        let mut s: Scenario = serde_json::from_value(v).map_err(|e| Error::invalid("invalid_scenario", e.to_string()))?;
        s.fill_block();
        Ok(s)
    }

    /// Applies `key=value` overrides; see the module documentation for key resolution.
    pub fn with_overrides(self, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self);
        }
        let block = self.kind.block();
        let mut v = serde_json::to_value(&self)?;
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::invalid("invalid_override", format!("expected key=value, got {o:?}")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::invalid("invalid_override", format!("empty key in {o:?}")));
            }
            let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let path: Vec<String> = if matches!(key, "kappa" | "seed" | "schema_version") {
                vec![key.to_string()]
            } else {
                let mut p = vec![block.to_string()];
                let first = key.split('.').next().unwrap_or(key);
                let in_block = v[block].get(first).is_some();
                let in_initial = v[block].get("initial").and_then(|i| i.get(first)).is_some();
                if !in_block && in_initial {
                    p.push("initial".to_string());
                }
                p.extend(key.split('.').map(str::to_string));
                p
            };
            set_path(&mut v, &path, value);
        }
        Self::from_value(v)
    }

    pub fn check_kind(&self, kind: ScenarioKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::invalid(
                "kind_mismatch",
                format!("scenario kind is {:?}, command is {:?}", self.kind, kind),
            ));
        }
        let blocks = [
            (ScenarioKind::KernelTable, self.kernel_table.is_some()),
            (ScenarioKind::KernelVerify, self.kernel_verify.is_some()),
            (ScenarioKind::VelocityProbe, self.velocity_probe.is_some()),
            (ScenarioKind::DecayStudy, self.decay_study.is_some()),
            (ScenarioKind::Simulate, self.simulate.is_some()),
            (ScenarioKind::WeakformCheck, self.weakform_check.is_some()),
        ];
        for (k, present) in blocks {
            if present && k != kind {
                return Err(Error::invalid(
                    "unused_block",
                    format!("block '{}' does not belong to a {} scenario", k.block(), kind.block()),
                ));
            }
        }
        Ok(())
    }

    pub fn helix(&self) -> Result<HelixParams> {
        HelixParams::new(self.kappa)
    }
}

fn set_path(v: &mut Value, path: &[String], value: Value) {
    let mut cur = v;
    for (i, k) in path.iter().enumerate() {
        if !cur.is_object() {
            *cur = Value::Object(Default::default());
        }
        let obj = cur.as_object_mut().expect("object");
        if i + 1 == path.len() {
            obj.insert(k.clone(), value);
            return;
        }
        cur = obj.entry(k.clone()).or_insert(Value::Null);
    }
}

fn positive(v: f64, code: &'static str, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(code, format!("{what} must be positive and finite, got {v}")))
    }
}

fn kernel_cfg(h: HelixParams, n: Normalization, images: usize, switch: f64) -> Result<KernelConfig> {
    positive(switch, "invalid_switch_radius", "switch_radius")?;
    let c = KernelConfig {
        image_truncation: images,
        switch_radius: switch * h.kappa(),
        ..KernelConfig::new(h).with_normalization(n)
    };
    c.validate()?;
    Ok(c)
}

fn sample_range(r_min: f64, r_max: f64) -> Result<()> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::invalid("invalid_sample_range", "need 0 < r_min < r_max"));
    }
    Ok(())
}

impl KernelTableParams {
    pub fn kernel_cfg(&self, h: HelixParams) -> Result<KernelConfig> {
        if self.points == 0 {
            return Err(Error::invalid("invalid_points", "points must be >= 1"));
        }
        sample_range(self.r_min, self.r_max)?;
        kernel_cfg(h, self.normalization, self.image_truncation, self.switch_radius)
    }
}

impl KernelVerifyParams {
    pub fn kernel_cfg(&self, h: HelixParams) -> Result<KernelConfig> {
        if self.points == 0 {
            return Err(Error::invalid("invalid_points", "points must be >= 1"));
        }
        if self.bound_points_small > self.bound_points_large {
            return Err(Error::invalid(
                "invalid_bound_points",
                "bound_points_small must not exceed bound_points_large",
            ));
        }
        sample_range(self.r_min, self.r_max)?;
        sample_range(self.bound_r_min, self.bound_r_max)?;
        positive(self.series_tolerance, "invalid_tolerance", "series_tolerance")?;
        positive(self.path_tolerance, "invalid_tolerance", "path_tolerance")?;
        positive(self.bound_stability, "invalid_tolerance", "bound_stability")?;
        kernel_cfg(h, self.normalization, self.image_truncation, self.switch_radius)
    }
}

fn eval_cfg(h: HelixParams, eps: f64, tol: f64) -> Result<VelocityEvalConfig> {
    let c = VelocityEvalConfig::new(h).with_blob(eps).with_tolerance(tol);
    c.validate()?;
    Ok(c)
}

/// Particles, background and velocity configuration of a probe or decay scenario.
pub struct FieldSetup {
    pub particles: VorticityParticles,
    pub background: Option<SteadyBackground>,
    pub mode: BackgroundMode,
    pub eval_cfg: VelocityEvalConfig,
}

impl VelocityProbeParams {
    pub fn setup(&self, h: HelixParams) -> Result<FieldSetup> {
        let (w, eps0) = self.initial.build(h)?;
        if w.is_empty() {
            return Err(Error::EmptyParticleSet);
        }
        let background = self.background.map(|b| b.build(&w)).transpose()?;
        let mode = self.background.map(|b| b.mode).unwrap_or_default();
        match (&background, mode) {
            (Some(bg), BackgroundMode::Xi) => crate::biotsavart::check_profile_normalization(&w, bg)?,
            _ => w.check_balanced()?,
        }
        if self.points.is_empty() && self.probes == 0 {
            return Err(Error::invalid("invalid_probes", "need probes >= 1 or explicit points"));
        }
        positive(self.probe_radius, "invalid_probe_radius", "probe_radius")?;
        positive(self.fd_step, "invalid_fd_step", "fd_step")?;
        if !(self.min_distance >= 0.0) {
            return Err(Error::invalid("invalid_min_distance", "min_distance must be >= 0"));
        }
        if self.points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("invalid_points", "probe points must be finite"));
        }
        Ok(FieldSetup {
            eval_cfg: eval_cfg(h, self.blob_epsilon.unwrap_or(eps0), self.quad_tolerance)?,
            particles: w,
            background,
            mode,
        })
    }
}

impl DecayStudyParams {
    pub fn setup(&self, h: HelixParams) -> Result<FieldSetup> {
        let (w, eps0) = self.initial.build(h)?;
        if w.is_empty() {
            return Err(Error::EmptyParticleSet);
        }
        w.check_balanced()?;
        if self.radii < 2 {
            return Err(Error::invalid("invalid_radii", "need at least 2 radii"));
        }
        Ok(FieldSetup {
            eval_cfg: eval_cfg(h, self.blob_epsilon.unwrap_or(eps0), self.quad_tolerance)?,
            particles: w,
            background: None,
            mode: BackgroundMode::Additive,
        })
    }
}

impl SimulateParams {
    /// Initial state and simulation configuration.
    pub fn setup(&self, h: HelixParams) -> Result<(crate::transport::TrajectoryState, SimulationConfig)> {
        let (mut w, eps0) = self.initial.build(h)?;
        if !self.tracers.is_empty() {
            let t = crate::transport::tracers(h, &self.tracers)?;
            w.extend(t.particles().iter().copied());
        }
        if w.is_empty() {
            return Err(Error::EmptyParticleSet);
        }
        let background = self.background.map(|b| b.build(&w)).transpose()?;
        let mode = self.background.map(|b| b.mode).unwrap_or_default();
        let mut cfg = SimulationConfig::new(self.dt, self.t_end, eval_cfg(h, self.blob_epsilon.unwrap_or(eps0), self.quad_tolerance)?);
        cfg.integrator = self.integrator;
        cfg.reproject_each_step = self.reproject_each_step;
        cfg.diagnostics_every = self.diagnostics_every;
        cfg.lp_exponent = self.lp_exponent;
        cfg.background_mode = mode;
        cfg.diagnostic_probes = self.diagnostic_probes;
        cfg.validate()?;
        match (&background, mode) {
            (Some(bg), BackgroundMode::Xi) => crate::biotsavart::check_profile_normalization(&w, bg)?,
            _ => w.check_balanced()?,
        }
        Ok((crate::transport::TrajectoryState::new(w, background), cfg))
    }
}

impl WeakformCheckParams {
    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::invalid("invalid_delta_sequence", "need at least one delta"));
        }
        for &d in &self.deltas {
            positive(d, "invalid_cutoff_delta", "delta")?;
        }
        if !(self.radius_factor > 1.0 && self.radius_factor.is_finite()) {
            return Err(Error::invalid("invalid_cutoff_radius", "radius_factor must exceed 1"));
        }
        crate::weakform::near_exponent(self.p)?;
        positive(self.scaling_tolerance, "invalid_tolerance", "scaling_tolerance")?;
        Ok(())
    }
}

/// Default scenario for `kind` with `overrides` applied, or the given file's.
pub fn load(kind: ScenarioKind, file: Option<&str>, overrides: &[String]) -> Result<Scenario> {
    let base = match file {
        Some(text) => Scenario::from_json(text)?,
        None => Scenario::new(kind),
    };
    let s = base.with_overrides(overrides)?;
    s.check_kind(kind)?;
    s.helix()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(text: &str) -> String {
        Scenario::from_json(text).unwrap_err().code().to_string()
    }

    #[test]
    fn defaults_round_trip() {
        for k in [
            ScenarioKind::KernelTable,
            ScenarioKind::KernelVerify,
            ScenarioKind::VelocityProbe,
            ScenarioKind::DecayStudy,
            ScenarioKind::Simulate,
            ScenarioKind::WeakformCheck,
        ] {
            let s = Scenario::new(k);
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(Scenario::from_json(&text).unwrap(), s);
        }
    }

    #[test]
    fn unknown_keys_and_versions() {
        assert_eq!(codes(r#"{"schema_version":1,"kind":"simulate","bogus":1}"#), "invalid_scenario");
        assert_eq!(
            codes(r#"{"schema_version":1,"kind":"simulate","simulate":{"dtt":0.1}}"#),
            "invalid_scenario"
        );
        assert_eq!(codes(r#"{"schema_version":2,"kind":"simulate"}"#), "unsupported_schema_version");
        assert_eq!(codes(r#"{"kind":"simulate"}"#), "invalid_scenario");
    }

    #[test]
    fn negative_kappa() {
        let e = load(ScenarioKind::Simulate, Some(r#"{"schema_version":1,"kind":"simulate","kappa":-1}"#), &[]).unwrap_err();
        assert_eq!(e.code(), "invalid_kappa");
        let e = load(ScenarioKind::Simulate, None, &["kappa=-2".into()]).unwrap_err();
        assert_eq!(e.code(), "invalid_kappa");
    }

    #[test]
    fn overrides_resolve_initial_keys() {
        let s = load(
            ScenarioKind::Simulate,
            None,
            &["preset=radial-steady".into(), "dt=0.005".into(), "initial.dipole.separation=1.5".into()],
        )
        .unwrap();
        let b = s.simulate.unwrap();
        assert_eq!(b.initial.preset, Preset::RadialSteady);
        assert_eq!(b.dt, 0.005);
        assert_eq!(b.initial.dipole.separation, 1.5);
        let e = load(ScenarioKind::Simulate, None, &["nonsense=1".into()]).unwrap_err();
        assert_eq!(e.code(), "invalid_scenario");
        let e = load(ScenarioKind::Simulate, None, &["dt".into()]).unwrap_err();
        assert_eq!(e.code(), "invalid_override");
    }

    #[test]
    fn kind_and_block_checks() {
        let text = r#"{"schema_version":1,"kind":"simulate"}"#;
        assert_eq!(load(ScenarioKind::KernelTable, Some(text), &[]).unwrap_err().code(), "kind_mismatch");
        let text = r#"{"schema_version":1,"kind":"simulate","kernel_table":{}}"#;
        assert_eq!(load(ScenarioKind::Simulate, Some(text), &[]).unwrap_err().code(), "unused_block");
    }

    #[test]
    fn setup_validation_codes() {
        let h = HelixParams::new(1.0).unwrap();
        let mut p = SimulateParams::default();
        p.dt = -1.0;
        assert_eq!(p.setup(h).unwrap_err().code(), "invalid_dt");
        let mut p = SimulateParams::default();
        p.initial.mollifier_n = 0;
        assert_eq!(p.setup(h).unwrap_err().code(), "invalid_mollifier_index");
        let mut p = SimulateParams::default();
        p.initial.spacing = Some(0.5);
        assert_eq!(p.setup(h).unwrap_err().code(), "resolution_too_coarse");
        let mut p = SimulateParams::default();
        p.initial.preset = Preset::DiscPatch;
        assert_eq!(p.setup(h).unwrap_err().code(), "unbalanced_vorticity");
        p.background = Some(BackgroundSpec {
            mode: BackgroundMode::Xi,
            ..Default::default()
        });
        assert!(p.setup(h).is_ok());
        let mut t = KernelTableParams::default();
        t.switch_radius = 0.0;
        assert_eq!(t.kernel_cfg(h).unwrap_err().code(), "invalid_switch_radius");
        let mut w = WeakformCheckParams::default();
        w.p = 1.0;
        assert_eq!(w.validate().unwrap_err().code(), "invalid_lp_exponent");
    }
}
