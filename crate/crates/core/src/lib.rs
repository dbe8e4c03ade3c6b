pub mod chart;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod holo;
pub mod linalg;
pub mod operators;
pub mod points;
pub mod quadrature;
pub mod reflect;

pub use error::{Error, Result};
pub use geometry::{quasidisk_constant, BoundaryPoint, DomainSpec, ExtPoint, Membership, MoebiusMap};
pub use hilbert::{
    hilbert_transform, surjectivity_diagnostic, transform_norm_ratio, Normalization, NormRatio, SpreadReport, TransformConfig,
};
pub use holo::{inner_b2, kernel, norm_b2, section_family, transfer_isometry, ClosedForm, Estimate, HoloFun};
pub use operators::{
    apply_b, build_finite_model, gram_positivity, kernel_integral_identity, norm_equivalence, orthosimilar_reconstruct, parseval_check,
    reflection_principle, FiniteModel, ModelConfig,
};
pub use quadrature::{
    integrate_domain, integrate_domain_vec, try_integrate_domain, try_integrate_domain_vec, QuadConfig, QuadResult,
    UnboundedChart, VecQuadResult,
};
pub use reflect::{bilipschitz_estimate, pullback_inner, reflect, BiLipschitz, Reflection, SampleWindow};
