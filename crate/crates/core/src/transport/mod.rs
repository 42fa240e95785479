//! Vortex-particle transport of the helical scalar vorticity.

pub mod mollify;
pub mod presets;
pub mod sim;

pub use mollify::{mollify_initial, particle_lq_norm, Disc, MollifierSpec, SliceField};
pub use presets::{radial_steady, tracers, RadialSteadySpec};
pub use sim::{
    conservation_report, default_blob_epsilon, run, state_velocity, step, support_radius, BackgroundMode,
    DiagnosticsRecord, DiagnosticsReport, Integrator, RunOutput, SimulationConfig, TrajectoryState,
};
