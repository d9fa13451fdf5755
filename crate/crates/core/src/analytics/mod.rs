//! Closed-form predictions: initial decay rates, one-body decay laws, the
//! single-qubit dephasing channel, and the curve fits used on simulated data.

mod closed_form;
mod dephasing;
pub mod fit;
mod gamma;

pub use closed_form::{
    closed_form_curve, closed_form_params, fidelity_closed_form, product_closed_form, DecayLaw,
    DecayLawParams,
};
pub use dephasing::{appendix_a_kraus, appendix_a_state, transverse_decay};
pub use fit::{
    fit_gamma_curve, fit_quadratic_law, least_squares_line, CurveFit, CurveFitMethod, LineFit,
    QuadraticLawFit,
};
pub use gamma::{
    gamma_for_config, gamma_general, gamma_subset_formulas, gamma_terms, overlap_weight, GammaPrediction,
    GammaTerm, PurityVector,
};
