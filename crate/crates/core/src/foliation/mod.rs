//! Polynomial foliations of the projective plane in affine normal form.

mod chart;
mod classify;
pub mod io;
mod normal_form;
pub mod samples;
mod singularity;

pub use chart::{Chart, ChartField};
pub use classify::{
    class_membership, classify_lambda, classify_singularity, default_max_denom, ClassMembership,
    ClassifyOptions, FoliationAnalysis, SingularityClass,
};
pub use normal_form::{FoliationNormalForm, InvariantLine, Line, ValidationError};
pub use singularity::{eigenvalues_2x2, AffineSearch, SearchRegion, Singularity, SingularityError};
