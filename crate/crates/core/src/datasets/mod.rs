//! Synthetic data: circle samples under arbitrary densities, additive
//! noise, Radon projections of an ellipse phantom, and landmark selection.
//! Every generator is a pure function of its parameters and RNG state.

mod circle;
mod density;
mod landmarks;
mod phantom;

pub use circle::{
    add_gaussian_noise, add_uniform_noise, embed_angles, default_noise_variance, sample_angles,
    sample_circle, CircleSample,
};
pub use density::{design_landmark_density, Density, DensitySpec, CDF_KNOTS};
pub use landmarks::{pick_landmarks, LandmarkSource, Landmarks};
pub use phantom::{phantom_radon_dataset, radon_projection, radon_rows, Ellipse, PhantomSpec};
