//! Ground truth and metrics: the circle's Laplacian spectrum, eigenpair
//! errors, phase and amplitude of eigenvector pairs, geodesic distance
//! recovery and the grid-sampling concentration experiment.

mod concentration;
mod geodesic;
mod phase;
mod truth;

pub use concentration::{grid_concentration_experiment, ConcentrationRow, ConcentrationTable, TestFunction};
pub use geodesic::{arc_distance, geodesic_recovery_error, geodesic_recovery_errors, GeodesicErrors, NeighborMode};
pub use phase::{circular_rank_correlation, coefficient_of_variation, phase_amplitude, PhaseAmplitude};
pub use truth::{
    align_and_score, align_and_score_vectors, circle_eigenfunction, circle_eigenvalue, circle_ground_truth,
    CircleGroundTruth, EigenReport,
};
