//! Velocity recovery from helical scalar vorticity.

pub mod decay;
pub mod diff;
pub mod filament;
pub mod oracle;
pub mod particles;
pub mod profile;
pub mod smooth;
pub mod xi;

pub use decay::{decay_exponent, decay_fit, fit_decay, particle_support_radius, DecayFit};
pub use filament::{
    closest_approach, filament_integral, velocity_filament, velocity_filament_many, ThetaRule, VelocityEvalConfig,
};
pub use oracle::{velocity_oracle_3d, velocity_oracle_3d_with, OracleConfig, OracleValue};
pub use particles::{Particle, VorticityParticles};
pub use profile::{background_velocity, RadialProfile, SteadyBackground};
pub use smooth::{velocity_smooth, SmoothQuadrature};
pub use xi::{check_profile_normalization, profile_particles, xi_operator, xi_operator_many, xi_operator_with, PhiSubtraction};
