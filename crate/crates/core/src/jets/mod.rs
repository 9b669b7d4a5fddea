//! Exact truncated jets of maps `(C^n, 0) -> (C^n, 0)`, the groups they
//! generate, derived series, growth functions and the limit homomorphism.
//! Every statement here holds modulo order-`k` jets.

mod group;
pub mod io;
mod jet;

pub use group::{
    ball_size_bound, classify_growth, derived_series, free_abelian_growth_formula, growth_function, limit_homomorphism,
    BudgetExceeded, ClassifyGrowthOptions, DerivedSeriesReport, GeneratorSet, GrowthClass, GrowthRow, GrowthTable,
    GrowthVerdict, LimitError, LimitHomomorphismEstimate, LimitSample, LineFit, SeriesLevel, DEFAULT_SERIES_CAP,
};
pub use jet::{invert_matrix, matrix_product, InvertibleJet, Jet, JetError, MultiIndex, Powers, Series};
