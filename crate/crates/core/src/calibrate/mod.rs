//! Nested OLS calibration of a performance variable against signal columns.

mod ols;
mod table;

use thiserror::Error;

pub use ols::{adjusted_r2, fit_ols, DesignMatrix, RegressionResult};
pub use table::{
    nested_model_table, parse_model_specs, read_performance_csv, read_performance_csv_from, resolve_term,
    significance_stars, CalibrationTable, FittedModel, ModelSpec, TableOptions, DEFAULT_MODELS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrateError {
    #[error("collinear predictors: column {column:?} is a linear combination of earlier columns")]
    CollinearPredictors { column: String },
    #[error("insufficient degrees of freedom: n = {n}, p = {p}, need n > p + 1")]
    InsufficientDof { n: usize, p: usize },
    #[error("model {model}: {rows} usable row(s), need at least {needed}")]
    InsufficientRows { model: usize, rows: usize, needed: usize },
    #[error("design matrix: {0}")]
    Design(String),
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("unit {0:?} appears in more than one signal row; calibrate needs one period per unit")]
    DuplicateUnit(String),
    #[error("{0}")]
    Input(String),
}
