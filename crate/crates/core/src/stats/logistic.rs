//! L2-regularized logistic regression fitted by damped Newton steps.
//!
//! Objective: mean negative log-likelihood plus `(l2 / 2) * |w|^2`; the
//! intercept is not penalized.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticOptions {
    pub l2: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            l2: 1e-2,
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub iterations: usize,
    pub grad_norm: f64,
    /// Penalized loss after each accepted step, starting from the initial point.
    pub loss_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub columns: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub l2: f64,
    pub convergence: Convergence,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Penalized objective over `theta = [intercept, w...]`.
pub struct LogisticObjective<'a> {
    x: &'a DMatrix<f64>,
    y: DVector<f64>,
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a DMatrix<f64>, y: &[bool], l2: f64) -> Self {
        let y = DVector::from_iterator(y.len(), y.iter().map(|&b| f64::from(u8::from(b))));
        LogisticObjective { x, y, l2 }
    }

    fn scores(&self, theta: &DVector<f64>) -> DVector<f64> {
        let w = theta.rows(1, theta.len() - 1);
        let mut z = self.x * w;
        z.add_scalar_mut(theta[0]);
        z
    }

    pub fn loss(&self, theta: &DVector<f64>) -> f64 {
        let n = self.y.len() as f64;
        let z = self.scores(theta);
        let nll: f64 = z
            .iter()
            .zip(self.y.iter())
            .map(|(&z, &y)| softplus(z) - y * z)
            .sum();
        let w = theta.rows(1, theta.len() - 1);
        nll / n + 0.5 * self.l2 * w.norm_squared()
    }

    pub fn gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        let n = self.y.len() as f64;
        let resid = self.scores(theta).map(sigmoid) - &self.y;
        let mut g = DVector::zeros(theta.len());
        g[0] = resid.sum() / n;
        let gw = self.x.tr_mul(&resid) / n + theta.rows(1, theta.len() - 1) * self.l2;
        g.rows_mut(1, theta.len() - 1).copy_from(&gw);
        g
    }

    fn hessian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let n = self.y.len() as f64;
        let p = self.x.ncols();
        let weights = self.scores(theta).map(|z| {
            let s = sigmoid(z);
            s * (1.0 - s)
        });
        let mut h = DMatrix::zeros(p + 1, p + 1);
        h[(0, 0)] = weights.sum() / n;
        let xw = self.x.tr_mul(&weights) / n;
        for j in 0..p {
            h[(0, j + 1)] = xw[j];
            h[(j + 1, 0)] = xw[j];
        }
        let mut scaled = self.x.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= weights[i];
        }
        let block = self.x.tr_mul(&scaled) / n;
        h.view_mut((1, 1), (p, p)).copy_from(&block);
        for j in 0..p {
            h[(j + 1, j + 1)] += self.l2;
        }
        h
    }
}

/// Fails when the design (with intercept) is rank-deficient.
fn check_identifiable(x: &DMatrix<f64>) -> Result<()> {
    let n = x.nrows();
    let p = x.ncols();
    let mut aug = DMatrix::from_element(n, p + 1, 1.0);
    aug.view_mut((0, 1), (n, p)).copy_from(x);
    let gram = aug.tr_mul(&aug);
    let eig = gram.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || min <= max * 1e-12 {
        return Err(Error::IllPosed(
            "design matrix is rank-deficient; use l2 > 0".into(),
        ));
    }
    Ok(())
}

pub fn fit_logistic_matrix(
    x: &DMatrix<f64>,
    columns: &[String],
    y: &[bool],
    opts: &LogisticOptions,
) -> Result<LogisticModel> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.nrows(),
            right: y.len(),
        });
    }
    if columns.len() != x.ncols() {
        return Err(Error::ColumnMismatch(format!(
            "{} names for {} columns",
            columns.len(),
            x.ncols()
        )));
    }
    if y.is_empty() {
        return Err(Error::DegenerateInput("no training rows".into()));
    }
    if !(opts.l2 >= 0.0) {
        return Err(Error::Config(format!("l2 = {} must be >= 0", opts.l2)));
    }
    if opts.l2 == 0.0 {
        check_identifiable(x)?;
    }

    let obj = LogisticObjective::new(x, y, opts.l2);
    let mut theta = DVector::zeros(x.ncols() + 1);
    let mut loss = obj.loss(&theta);
    let mut trace = vec![loss];
    let mut grad = obj.gradient(&theta);
    let mut iterations = 0;

    while grad.norm() > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                grad_norm: grad.norm(),
            });
        }
        iterations += 1;
        let h = obj.hessian(&theta);
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&(-&grad)),
            None if opts.l2 == 0.0 => {
                return Err(Error::IllPosed("singular Hessian with l2 = 0".into()))
            }
            None => h
                .lu()
                .solve(&(-&grad))
                .ok_or_else(|| Error::IllPosed("singular Hessian".into()))?,
        };
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = &theta + &step * t;
            let cl = obj.loss(&cand);
            if cl <= loss + 1e-4 * t * slope {
                accepted = Some((cand, cl));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, cl)) => {
                theta = cand;
                loss = cl;
                trace.push(loss);
                grad = obj.gradient(&theta);
            }
            None => {
                // No representable decrease left along the Newton direction.
                return Err(Error::NonConvergence {
                    iterations,
                    grad_norm: grad.norm(),
                });
            }
        }
    }

    Ok(LogisticModel {
        columns: columns.to_vec(),
        coefficients: theta.iter().skip(1).copied().collect(),
        intercept: theta[0],
        l2: opts.l2,
        convergence: Convergence {
            iterations,
            grad_norm: grad.norm(),
            loss_trace: trace,
        },
    })
}

pub fn fit_logistic(x: &FeatureMatrix, y: &[bool], opts: &LogisticOptions) -> Result<LogisticModel> {
    fit_logistic_matrix(&x.values, &x.columns, y, opts)
}

impl LogisticModel {
    pub fn theta(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.coefficients.len() + 1,
            std::iter::once(self.intercept).chain(self.coefficients.iter().copied()),
        )
    }

    pub fn predict_matrix(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.coefficients.len() {
            return Err(Error::ColumnMismatch(format!(
                "model has {} coefficients, matrix has {} columns",
                self.coefficients.len(),
                x.ncols()
            )));
        }
        Ok(x
            .row_iter()
            .map(|row| {
                let z = row
                    .iter()
                    .zip(&self.coefficients)
                    .fold(self.intercept, |acc, (x, w)| acc + x * w);
                sigmoid(z)
            })
            .collect())
    }

    /// Text serialization; floats use shortest round-trip formatting so a
    /// reloaded model predicts bit-identically.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# revaudit logistic model v1\n");
        let c = &self.convergence;
        let _ = writeln!(s, "intercept\t{}", self.intercept);
        let _ = writeln!(s, "l2\t{}", self.l2);
        let _ = writeln!(s, "iterations\t{}", c.iterations);
        let _ = writeln!(s, "grad_norm\t{}", c.grad_norm);
        let _ = writeln!(s, "columns\t{}", self.columns.len());
        for (name, w) in self.columns.iter().zip(&self.coefficients) {
            let _ = writeln!(s, "coef\t{name}\t{w}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut intercept = None;
        let mut l2 = None;
        let mut iterations = None;
        let mut grad_norm = None;
        let mut expected = None;
        let mut columns = Vec::new();
        let mut coefficients = Vec::new();
        let num = |v: &str, what: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse(format!("bad {what} `{v}`")))
        };
        for line in text.lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            match parts.as_slice() {
                ["intercept", v] => intercept = Some(num(v, "intercept")?),
                ["l2", v] => l2 = Some(num(v, "l2")?),
                ["iterations", v] => {
                    iterations = Some(v.parse().map_err(|_| Error::Parse(format!("bad iterations `{v}`")))?)
                }
                ["grad_norm", v] => grad_norm = Some(num(v, "grad_norm")?),
                ["columns", v] => {
                    expected = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("bad column count `{v}`")))?)
                }
                ["coef", name, v] => {
                    columns.push(name.to_string());
                    coefficients.push(num(v, "coefficient")?);
                }
                _ => return Err(Error::Parse(format!("unrecognized model line `{line}`"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("model file lacks `{k}`"));
        if expected.ok_or_else(|| missing("columns"))? != columns.len() {
            return Err(Error::Parse("column count does not match coefficient lines".into()));
        }
        Ok(LogisticModel {
            columns,
            coefficients,
            intercept: intercept.ok_or_else(|| missing("intercept"))?,
            l2: l2.ok_or_else(|| missing("l2"))?,
            convergence: Convergence {
                iterations: iterations.ok_or_else(|| missing("iterations"))?,
                grad_norm: grad_norm.ok_or_else(|| missing("grad_norm"))?,
                loss_trace: Vec::new(),
            },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Predicted acceptance probabilities; column names must match the model.
pub fn predict_proba(model: &LogisticModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    if x.columns != model.columns {
        return Err(Error::ColumnMismatch(
            "feature matrix columns differ from the model's".into(),
        ));
    }
    model.predict_matrix(&x.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn logit(p: f64) -> f64 {
        (p / (1.0 - p)).ln()
    }

    #[test]
    fn intercept_only_recovers_logit_of_mean() {
        let x = DMatrix::zeros(8, 0);
        let y = [true, false, false, false, true, false, false, false];
        let opts = LogisticOptions { l2: 0.0, ..Default::default() };
        let m = fit_logistic_matrix(&x, &[], &y, &opts).unwrap();
        assert!((m.intercept - logit(0.25)).abs() < 1e-9);
        assert!((m.intercept - (-1.0986122886681098)).abs() < 1e-9);
    }

    #[test]
    fn constant_labels_give_zero_weights() {
        let x = DMatrix::from_row_slice(4, 1, &[-1.5, -0.5, 0.5, 1.5]);
        let y = [true, true, true, true];
        // The intercept walks out until its gradient drops below tol; centered
        // columns see a zero gradient throughout, so the weight stays at 0.
        let m = fit_logistic_matrix(&x, &["a".into()], &y, &LogisticOptions::default()).unwrap();
        assert!(m.coefficients[0].abs() < 1e-12);
        assert!(m.intercept > 15.0);
        assert!(m.convergence.grad_norm <= 1e-8);
        let y = [true, false, true, false];
        let x = DMatrix::from_row_slice(4, 1, &[1.0, 1.0, -1.0, -1.0]);
        let m = fit_logistic_matrix(&x, &["a".into()], &y, &LogisticOptions::default()).unwrap();
        assert!(m.coefficients[0].abs() < 1e-12);
        assert!(m.intercept.abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_without_penalty_is_ill_posed() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0, 4.0, 8.0]);
        let y = [true, false, true, false];
        let opts = LogisticOptions { l2: 0.0, ..Default::default() };
        assert!(matches!(
            fit_logistic_matrix(&x, &["a".into(), "b".into()], &y, &opts),
            Err(Error::IllPosed(_))
        ));
        assert!(fit_logistic_matrix(&x, &["a".into(), "b".into()], &y, &LogisticOptions::default()).is_ok());
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        // Separable without a penalty: the weight diverges and the gradient
        // only shrinks geometrically.
        let x = DMatrix::from_row_slice(4, 1, &[-2.0, -1.0, 1.0, 2.0]);
        let y = [false, false, true, true];
        let opts = LogisticOptions { l2: 0.0, max_iter: 5, ..Default::default() };
        assert!(matches!(
            fit_logistic_matrix(&x, &["a".into()], &y, &opts),
            Err(Error::NonConvergence { iterations: 5, .. })
        ));
    }

    #[test]
    fn loss_trace_is_non_increasing() {
        let x = DMatrix::from_row_slice(6, 2, &[0.1, 1.0, -0.3, 0.2, 1.2, -0.7, 0.5, 0.5, -1.0, 0.0, 0.4, -0.2]);
        let y = [true, false, true, true, false, false];
        let m = fit_logistic_matrix(&x, &["a".into(), "b".into()], &y, &LogisticOptions::default()).unwrap();
        for w in m.convergence.loss_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(m.convergence.grad_norm <= 1e-8);
    }

    #[test]
    fn predict_examples() {
        let m = LogisticModel {
            columns: vec!["x".into()],
            coefficients: vec![0.0],
            intercept: 0.0,
            l2: 0.0,
            convergence: Convergence { iterations: 0, grad_norm: 0.0, loss_trace: vec![] },
        };
        let x = DMatrix::from_row_slice(2, 1, &[3.0, -7.0]);
        assert_eq!(m.predict_matrix(&x).unwrap(), vec![0.5, 0.5]);

        let big = LogisticModel { intercept: 20.0, ..m.clone() };
        assert!(big.predict_matrix(&x).unwrap().iter().all(|&p| p > 0.999999));

        let one = LogisticModel { coefficients: vec![1.0], ..m.clone() };
        let p = one.predict_matrix(&DMatrix::from_row_slice(1, 1, &[logit(0.8)])).unwrap()[0];
        assert!((p - 0.8).abs() < 1e-15);

        assert!(matches!(
            m.predict_matrix(&DMatrix::zeros(1, 2)),
            Err(Error::ColumnMismatch(_))
        ));
    }

    #[test]
    fn text_round_trip_is_bit_identical() {
        let x = DMatrix::from_row_slice(5, 2, &[0.3, 1.1, -0.2, 0.4, 1.7, -0.9, 0.05, 0.5, -1.3, 0.25]);
        let y = [true, false, true, false, false];
        let cols = vec!["alpha".to_string(), "beta".to_string()];
        let m = fit_logistic_matrix(&x, &cols, &y, &LogisticOptions::default()).unwrap();
        let back = LogisticModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back.coefficients, m.coefficients);
        assert_eq!(back.intercept.to_bits(), m.intercept.to_bits());
        let a = m.predict_matrix(&x).unwrap();
        let b = back.predict_matrix(&x).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    fn central_difference(obj: &LogisticObjective<'_>, theta: &DVector<f64>, h: f64) -> DVector<f64> {
        DVector::from_fn(theta.len(), |i, _| {
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[i] += h;
            down[i] -= h;
            (obj.loss(&up) - obj.loss(&down)) / (2.0 * h)
        })
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 60;
        let x = DMatrix::from_fn(n, 3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y: Vec<bool> = (0..n).map(|i| x[(i, 0)] + 0.5 * x[(i, 1)] + 0.7 * (rng.random::<f64>() - 0.5) > 0.0).collect();
        let cols: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let model = fit_logistic_matrix(&x, &cols, &y, &LogisticOptions::default()).unwrap();
        let obj = LogisticObjective::new(&x, &y, model.l2);
        let at_optimum = obj.gradient(&model.theta());
        let fd = central_difference(&obj, &model.theta(), 1e-5);
        assert!((&at_optimum - &fd).norm() <= 1e-5 * fd.norm().max(1.0));
        for _ in 0..20 {
            let theta = DVector::from_fn(4, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let g = obj.gradient(&theta);
            let fd = central_difference(&obj, &theta, 1e-5);
            assert!((&g - &fd).norm() <= 1e-5 * fd.norm(), "{g} vs {fd}");
        }
    }

    #[test]
    fn penalized_one_feature_matches_grid_search() {
        // Symmetric about zero, so the intercept is exactly zero at the optimum.
        let x = DMatrix::from_row_slice(6, 1, &[-3.0, -2.0, -0.5, 0.5, 2.0, 3.0]);
        let y = [false, false, false, true, true, true];
        let l2 = 1.0;
        let model = fit_logistic_matrix(&x, &["x".into()], &y, &LogisticOptions { l2, ..Default::default() }).unwrap();
        assert!(model.intercept.abs() < 1e-8);
        let obj = LogisticObjective::new(&x, &y, l2);
        let loss_at = |w: f64| obj.loss(&DVector::from_vec(vec![0.0, w]));
        let (mut best_w, mut best) = (0.0, f64::INFINITY);
        let step = 1e-5;
        for i in 0..=500_000 {
            let w = i as f64 * step;
            let l = loss_at(w);
            if l < best {
                best = l;
                best_w = w;
            }
        }
        assert!((model.coefficients[0] - best_w).abs() < 1e-4, "{} vs {best_w}", model.coefficients[0]);
    }
}
