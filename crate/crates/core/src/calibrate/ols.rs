use statrs::distribution::{ContinuousCDF, StudentsT};

use super::CalibrateError;

/// Rows are units; column 0 is the intercept.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    pub row_labels: Vec<String>,
    /// `"intercept"` followed by predictor names.
    pub columns: Vec<String>,
    /// Row-major, `rows[i].len() == columns.len()`.
    pub rows: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl DesignMatrix {
    /// Prepends the intercept column and checks shape, finiteness and
    /// `n >= p + 2`.
    pub fn new(
        row_labels: Vec<String>,
        predictors: Vec<String>,
        predictor_rows: Vec<Vec<f64>>,
        y: Vec<f64>,
    ) -> Result<Self, CalibrateError> {
        let n = y.len();
        let p = predictors.len();
        if predictor_rows.len() != n || row_labels.len() != n {
            return Err(CalibrateError::Design(format!(
                "{} labels, {} predictor rows, {} responses",
                row_labels.len(),
                predictor_rows.len(),
                n
            )));
        }
        if let Some(i) = predictor_rows.iter().position(|r| r.len() != p) {
            return Err(CalibrateError::Design(format!(
                "row {i} has {} values, expected {p}",
                predictor_rows[i].len()
            )));
        }
        if predictor_rows.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(CalibrateError::Design("non-finite value".into()));
        }
        if n < p + 2 {
            return Err(CalibrateError::InsufficientDof { n, p });
        }
        let mut columns = vec!["intercept".to_string()];
        columns.extend(predictors);
        let rows = predictor_rows
            .into_iter()
            .map(|r| std::iter::once(1.0).chain(r).collect())
            .collect();
        Ok(DesignMatrix {
            row_labels,
            columns,
            rows,
            y,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of predictors, excluding the intercept.
    pub fn p(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionResult {
    /// Term names, `"intercept"` first.
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Two-sided, Student t with `n - p - 1` degrees of freedom.
    pub p_values: Vec<f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
    pub p: usize,
    pub residual_variance: f64,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    fn index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn coefficient(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.std_errors[i])
    }

    pub fn p_value(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.p_values[i])
    }
}

/// `1 - (1 - r2)(n - 1)/(n - p - 1)`.
pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> Result<f64, CalibrateError> {
    if n <= p + 1 {
        return Err(CalibrateError::InsufficientDof { n, p });
    }
    Ok(1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p - 1) as f64)
}

// Relative size of a Householder diagonal below which the column is treated
// as dependent on the ones before it.
const RANK_TOL: f64 = 1e-10;

/// Least squares through a Householder QR factorization of the design.
pub fn fit_ols(x: &DesignMatrix) -> Result<RegressionResult, CalibrateError> {
    let n = x.n();
    let k = x.columns.len();
    if n <= x.p() + 1 {
        return Err(CalibrateError::InsufficientDof { n, p: x.p() });
    }

    // column-major working copy
    let mut a: Vec<Vec<f64>> = (0..k).map(|j| x.column(j)).collect();
    let col_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut qty = x.y.clone();

    for j in 0..k {
        let sub_norm = norm(&a[j][j..]);
        if sub_norm <= RANK_TOL * col_norms[j] || col_norms[j] == 0.0 {
            return Err(CalibrateError::CollinearPredictors {
                column: x.columns[j].clone(),
            });
        }
        let alpha = if a[j][j] > 0.0 { -sub_norm } else { sub_norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vv;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            reflect(&mut col[j..]);
        }
        reflect(&mut qty[j..]);
    }

    // back substitution: R beta = (Q^T y)[..k]
    let r = |i: usize, j: usize| a[j][i];
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r(i, j) * beta[j]).sum();
        beta[i] = (qty[i] - s) / r(i, i);
    }

    // R^{-1}, upper triangular; diag of (X'X)^{-1} = row norms squared
    let mut r_inv = vec![vec![0.0; k]; k];
    #[allow(clippy::needless_range_loop)]
    for col in 0..k {
        for i in (0..=col).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=col).map(|j| r(i, j) * r_inv[j][col]).sum();
            r_inv[i][col] = (rhs - s) / r(i, i);
        }
    }

    let fitted: Vec<f64> = x
        .rows
        .iter()
        .map(|row| row.iter().zip(&beta).map(|(a, b)| a * b).sum())
        .collect();
    let residuals: Vec<f64> = x.y.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let y_mean = x.y.iter().sum::<f64>() / n as f64;
    let sst: f64 = x.y.iter().map(|y| (y - y_mean).powi(2)).sum();
    // an intercept-only fit explains nothing by definition
    let r2 = if sst > 0.0 && x.p() > 0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let p = x.p();
    let df = (n - p - 1) as f64;
    let residual_variance = sse / df;
    let t_dist = StudentsT::new(0.0, 1.0, df).map_err(|e| CalibrateError::Input(e.to_string()))?;
    let mut std_errors = Vec::with_capacity(k);
    let mut t_values = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for (j, b) in beta.iter().enumerate() {
        let se = (residual_variance * r_inv[j].iter().map(|v| v * v).sum::<f64>()).sqrt();
        let (t, pv) = if se > 0.0 {
            let t = b / se;
            (t, (2.0 * t_dist.sf(t.abs())).min(1.0))
        } else if *b == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(*b), 0.0)
        };
        std_errors.push(se);
        t_values.push(t);
        p_values.push(pv);
    }

    Ok(RegressionResult {
        terms: x.columns.clone(),
        coefficients: beta,
        std_errors,
        t_values,
        p_values,
        r2,
        adj_r2: adjusted_r2(r2, n, p)?,
        n,
        p,
        residual_variance,
        fitted,
        residuals,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}
