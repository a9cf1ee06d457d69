//! Entanglement entropy and spectrum diagnostics, spacing-ratio statistics
//! against the GUE surmise, and the curve fits used by the experiments.

mod entropy;
mod fit;
mod spectrum;
mod surmise;

pub use entropy::{entanglement_entropy, entropy_from_eigenvalues, EntropyOrder, NEGATIVE_EIG_TOL};
pub use fit::{
    entanglement_velocity, fit_exp_decay, fit_linear, ExpFit, LinearFit, VelocityFit, GROWTH_WINDOW,
};
pub use spectrum::{spacing_ratios, EntanglementSpectrum, SpectrumStats, DEFAULT_CUTOFF, DEGENERATE_GAP};
pub use surmise::{
    adaptive_simpson, gue_bin_masses, gue_mean_r, gue_normalization, gue_surmise_pdf, kl_to_gue,
    poisson_surmise_pdf, ratio_histogram, HistogramRow, DEFAULT_BINS, POISSON_MEAN_R,
};
