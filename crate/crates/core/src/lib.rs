//! Numerical fractional calculus on the half line.

pub mod error;
pub mod experiments;
pub mod fracops;
pub mod grid;
pub mod mellin;
pub mod norms;
pub mod quad;
pub mod report;
pub mod specialfn;

pub use error::{Error, Result};
pub use experiments::{
    holder_exponent, holder_loss_probe, identity_suite, interpolation_consistency_probe, mellin_probe,
    power_law_oracle_suite, sobolev_mapping_probe, weight_probe, FamilyKind, MappingRoute, TestFunctionFamily,
    MELLIN_PROBE_XS, WEIGHT_PROBE_XS,
};
pub use fracops::{
    apply, caputo, censored, even_ext_derivative, marchaud_plus, rl_derivative, rl_integral, OperatorKind, TailPolicy,
};
pub use grid::{extend, restrict, sample, Exponent, FracParams, OutsideBehavior, SampledFunction, UniformGrid};
pub use mellin::{
    censor_kernel, censoring_residual, default_abscissa, inverse_mellin, kernel_mellin_closed_form, mellin_transform,
    reconstruct_left_extension, reconstruct_left_extension_adaptive, synthesize_u_from_v, InverseValue, MellinLine,
    MellinSamples, MellinValue, Reconstruction,
};
pub use norms::{
    gagliardo_seminorm, gagliardo_seminorm_on_line, holder_seminorm, lp_norm, sobolev_norm, sobolev_norm_with_order,
    weight_class_margin, NormReport, WeightFunction, WeightMargin,
};
pub use report::{ReportRow, Summary, VerificationReport, CSV_HEADER};
pub use specialfn::{beta, beta_complex, gamma, gamma_complex, log_gamma_complex, ComplexValue};
