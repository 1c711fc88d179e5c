//! Velocity-space utilities: the discrete velocity box, Maxwellians and
//! moments, the macroscopic basis and projections, Burnett functions, the
//! Landau collision frequency and the weighted dissipation norms.

pub mod grid;
pub mod moments;
pub mod sigma;
pub mod weights;

pub use grid::{reference_maxwellian, VelocityGrid};
pub use moments::{
    burnett_hat, chi_basis, gram_matrix, maxwellian, maxwellian_field, moments, project_p0,
    project_p1, Burnett, ChiBasis, MacroState, Moments,
};
pub use sigma::{
    collision_frequency, sigma_norm, sigma_norm_equivalent, sigma_radial, SigmaTable,
};
pub use weights::{q3_from_fields, q3_from_scaled_norms, q_of_tau, PhiSnapshot, QOfTau, WeightSpec};
