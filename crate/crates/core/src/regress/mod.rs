//! Regression on the sphere: synthetic targets, Gram matrices, kernel ridge
//! regression with a floor `λ_min` on the regularization grid, random-feature
//! models with one or two layers, and CSV ingestion.

mod dataset;
mod experiment;
mod features;
mod gram;
mod ridge;
mod target;

pub use dataset::{ingest_csv, LabelColumn, Provenance, SphereDataset, NORM_TOLERANCE};
pub use experiment::{
    cell_seed, experiment_random_features, experiment_synthetic, CurveRow, CurveTable, KrrExperiment, Protocol,
    RfExperiment, WidthSchedule,
};
pub use features::{rf_features, Activation, RfModel};
pub use gram::gram_matrix;
pub use ridge::{
    filter_grid, krr_fit, krr_solve, lambda_sweep, log_grid, mean_squared_error, model_select, predict_many,
    solve_shifted, RidgeModel, ShiftedSolve, RESIDUAL_TOLERANCE,
};
pub use target::{target_eval, TargetKind, TargetSpec};
