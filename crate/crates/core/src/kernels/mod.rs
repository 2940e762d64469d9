//! Kernel families: text specs, pointwise evaluation, Taylor series at 0 and
//! expansions at the endpoints `±1`.

mod eval;
mod expansion;
mod series;
mod spec;

pub use eval::{eval_arg, kappa0_arg, kappa0_eval, kappa1_arg, kappa1_eval, kernel_eval};
pub(crate) use eval::eval_smooth_unchecked;
pub use expansion::{
    decay_prediction, deep_rf_minus, endpoint_expansion, ntk_constants, DecayPrediction, EndpointExpansion,
    KAPPA0_ENDPOINT, KAPPA1_ENDPOINT,
};
pub use series::{
    arccos_series, compose_kappa0, compose_kappa1, kernel_series, series_compose, series_product, PowerSeries,
    DEFAULT_SERIES_ORDER,
};
pub use spec::KernelSpec;
