//! One-class SVM in the nu-formulation, trained by sequential two-coordinate
//! updates on the dual:
//!
//! minimize `0.5 * sum_ij alpha_i alpha_j k(x_i, x_j)`
//! subject to `0 <= alpha_i <= 1/(nu*l)` and `sum_i alpha_i = 1`.
//!
//! The decision function is `f(x) = sum_i alpha_i k(x_i, x) - rho`; a
//! non-negative value classifies as normal. Pair selection always takes the
//! maximal-KKT-violating pair with ties broken by lowest index, so training
//! is deterministic and permutation of the inputs leaves the decision
//! function unchanged up to the solver tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Verdict;
use crate::vectorspace::{SparseVector, Vocabulary};

/// Hard cap on pair updates; hitting it yields a model flagged as not
/// converged instead of an error.
pub const MAX_PAIR_UPDATES: usize = 100_000;

/// Kernel selection. RBF is `exp(-gamma * |a - b|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } if *gamma > 0.0 && gamma.is_finite() => Ok(()),
            KernelSpec::Rbf { gamma } => Err(Error::InvalidArgument(format!(
                "rbf gamma must be positive and finite, got {gamma}"
            ))),
        }
    }
}

/// Evaluate the kernel on two sparse vectors. `rbf(a, a)` is exactly 1.
pub fn kernel_eval(a: &SparseVector, b: &SparseVector, kernel: &KernelSpec) -> f64 {
    match kernel {
        KernelSpec::Linear => a.dot(b),
        KernelSpec::Rbf { gamma } => (-gamma * a.distance_squared(b)).exp(),
    }
}

/// Raw solver output: one coefficient per training point.
#[derive(Debug, Clone)]
pub struct OcsvmFit {
    pub alphas: Vec<f64>,
    pub rho: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn validate_params(len: usize, nu: f64, tol: f64, kernel: &KernelSpec) -> Result<()> {
    if len == 0 {
        return Err(Error::EmptyCorpus);
    }
    if nu.is_nan() || nu <= 0.0 || nu > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "nu must lie in (0, 1], got {nu}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    kernel.validate()
}

/// Train the dual problem. Terminates when the largest KKT violation
/// (`max_{alpha_j > 0} g_j - min_{alpha_i < C} g_i` with `g = K alpha`)
/// drops to `tol`, or after [`MAX_PAIR_UPDATES`] updates.
pub fn train_ocsvm(
    vectors: &[SparseVector],
    nu: f64,
    kernel: &KernelSpec,
    tol: f64,
) -> Result<OcsvmFit> {
    validate_params(vectors.len(), nu, tol, kernel)?;
    let len = vectors.len();
    let cap = 1.0 / (nu * len as f64);

    // Feasible start: the first floor(nu*l) points at the box cap, one
    // fractional remainder, the rest zero.
    let mut alphas = vec![0.0; len];
    let n_full = ((nu * len as f64).floor() as usize).min(len);
    for a in alphas.iter_mut().take(n_full) {
        *a = cap;
    }
    let remainder = nu * len as f64 - n_full as f64;
    if n_full < len && remainder > 0.0 {
        alphas[n_full] = remainder * cap;
    }

    let diag: Vec<f64> = vectors.iter().map(|v| kernel_eval(v, v, kernel)).collect();

    // Gradient g = K alpha.
    let mut gradient = vec![0.0; len];
    for (j, &alpha_j) in alphas.iter().enumerate() {
        if alpha_j > 0.0 {
            for (i, g) in gradient.iter_mut().enumerate() {
                *g += alpha_j * kernel_eval(&vectors[i], &vectors[j], kernel);
            }
        }
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_PAIR_UPDATES {
        // Most violating pair: smallest gradient among coordinates with
        // headroom, largest among those with mass. Ties keep the lowest
        // index so runs are reproducible.
        let mut up: Option<(usize, f64)> = None;
        let mut down: Option<(usize, f64)> = None;
        for (idx, (&alpha, &g)) in alphas.iter().zip(&gradient).enumerate() {
            if alpha < cap && up.is_none_or(|(_, best)| g < best) {
                up = Some((idx, g));
            }
            if alpha > 0.0 && down.is_none_or(|(_, best)| g > best) {
                down = Some((idx, g));
            }
        }
        let (Some((i, g_i)), Some((j, g_j))) = (up, down) else {
            converged = true;
            break;
        };
        if g_j - g_i <= tol {
            converged = true;
            break;
        }

        let eta = diag[i] + diag[j] - 2.0 * kernel_eval(&vectors[i], &vectors[j], kernel);
        let unconstrained = if eta > 0.0 {
            (g_j - g_i) / eta
        } else {
            f64::INFINITY
        };
        let room = cap - alphas[i];
        let delta = unconstrained.min(room).min(alphas[j]);

        // Land exactly on the box so bound membership stays an exact test.
        if delta == room {
            alphas[i] = cap;
        } else {
            alphas[i] = (alphas[i] + delta).min(cap);
        }
        if delta == alphas[j] {
            alphas[j] = 0.0;
        } else {
            alphas[j] = (alphas[j] - delta).max(0.0);
        }

        for (k, g) in gradient.iter_mut().enumerate() {
            let k_i = kernel_eval(&vectors[k], &vectors[i], kernel);
            let k_j = kernel_eval(&vectors[k], &vectors[j], kernel);
            *g += delta * (k_i - k_j);
        }
        iterations += 1;
    }

    let rho = offset_from_gradient(&alphas, &gradient, cap);
    Ok(OcsvmFit {
        alphas,
        rho,
        converged,
        iterations,
    })
}

/// rho is the gradient averaged over margin support vectors; without any,
/// the midpoint of the KKT-feasible interval.
fn offset_from_gradient(alphas: &[f64], gradient: &[f64], cap: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for (&alpha, &g) in alphas.iter().zip(gradient) {
        if alpha == 0.0 {
            upper = upper.min(g);
        } else if alpha == cap {
            lower = lower.max(g);
        } else {
            free_sum += g;
            free_count += 1;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    }
}

/// Dual objective `0.5 * alpha' K alpha`.
pub fn objective_value(vectors: &[SparseVector], kernel: &KernelSpec, alphas: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &alpha_i) in alphas.iter().enumerate() {
        if alpha_i == 0.0 {
            continue;
        }
        for (j, &alpha_j) in alphas.iter().enumerate() {
            if alpha_j != 0.0 {
                total += alpha_i * alpha_j * kernel_eval(&vectors[i], &vectors[j], kernel);
            }
        }
    }
    0.5 * total
}

/// Largest per-point KKT residual of `(alphas, rho)` for the given training
/// set, recomputing the gradient from scratch.
pub fn kkt_residual(
    vectors: &[SparseVector],
    kernel: &KernelSpec,
    alphas: &[f64],
    rho: f64,
    nu: f64,
) -> f64 {
    let len = vectors.len();
    let cap = 1.0 / (nu * len as f64);
    let mut worst = 0.0f64;
    for (i, &alpha) in alphas.iter().enumerate() {
        let mut g = 0.0;
        for (j, &alpha_j) in alphas.iter().enumerate() {
            if alpha_j != 0.0 {
                g += alpha_j * kernel_eval(&vectors[i], &vectors[j], kernel);
            }
        }
        let residual = if alpha == 0.0 {
            (rho - g).max(0.0)
        } else if alpha == cap {
            (g - rho).max(0.0)
        } else {
            (g - rho).abs()
        };
        worst = worst.max(residual);
    }
    worst
}

/// A retained training point with nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub alpha: f64,
    pub vector: SparseVector,
}

/// Trained one-class SVM packaged with its vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct OcsvmModel {
    nu: f64,
    kernel: KernelSpec,
    rho: f64,
    support: Vec<SupportVector>,
    vocab: Vocabulary,
    train_size: usize,
    converged: bool,
}

impl OcsvmModel {
    /// Train on vectors embedded in `vocab` and retain the support vectors.
    pub fn train(
        vectors: &[SparseVector],
        nu: f64,
        kernel: KernelSpec,
        tol: f64,
        vocab: Vocabulary,
    ) -> Result<OcsvmModel> {
        let fit = train_ocsvm(vectors, nu, &kernel, tol)?;
        let support = fit
            .alphas
            .iter()
            .zip(vectors)
            .filter(|(&alpha, _)| alpha > 0.0)
            .map(|(&alpha, vector)| SupportVector {
                alpha,
                vector: vector.clone(),
            })
            .collect();
        Ok(OcsvmModel {
            nu,
            kernel,
            rho: fit.rho,
            support,
            vocab,
            train_size: vectors.len(),
            converged: fit.converged,
        })
    }

    /// Assemble from stored parts, validating what the serialized form can
    /// express. `train_size` is taken to be the number of support vectors,
    /// which only loosens the box bound check.
    pub fn from_parts(
        nu: f64,
        kernel: KernelSpec,
        rho: f64,
        support: Vec<SupportVector>,
        vocab: Vocabulary,
    ) -> Result<OcsvmModel> {
        if nu.is_nan() || nu <= 0.0 || nu > 1.0 {
            return Err(Error::ModelFormat(format!("nu {nu} outside (0, 1]")));
        }
        kernel
            .validate()
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        if !rho.is_finite() {
            return Err(Error::ModelFormat("rho is not finite".into()));
        }
        if support.is_empty() {
            return Err(Error::ModelFormat("model has no support vectors".into()));
        }
        let sum: f64 = support.iter().map(|s| s.alpha).sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::ModelFormat(format!(
                "support coefficients sum to {sum}, expected 1"
            )));
        }
        let loose_cap = 1.0 / (nu * support.len() as f64);
        for s in &support {
            if s.alpha <= 0.0 || s.alpha > loose_cap + 1e-12 {
                return Err(Error::ModelFormat(format!(
                    "support coefficient {} outside (0, {loose_cap}]",
                    s.alpha
                )));
            }
        }
        Ok(OcsvmModel {
            nu,
            kernel,
            rho,
            train_size: support.len(),
            support,
            vocab,
            converged: true,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn support(&self) -> &[SupportVector] {
        &self.support
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// `f(x) = sum_i alpha_i k(x_i, x) - rho`; positive means normal.
    pub fn decision_value(&self, doc: &SparseVector) -> f64 {
        let mut sum = 0.0;
        for s in &self.support {
            sum += s.alpha * kernel_eval(&s.vector, doc, &self.kernel);
        }
        sum - self.rho
    }

    /// Novelty score oriented like the centroid classifier: larger is more
    /// anomalous. This is simply the negated decision value.
    pub fn novelty_score(&self, doc: &SparseVector) -> f64 {
        -self.decision_value(doc)
    }

    /// The boundary (decision value exactly 0) counts as normal.
    pub fn classify(&self, doc: &SparseVector) -> Verdict {
        if self.decision_value(doc) >= 0.0 {
            Verdict::Normal
        } else {
            Verdict::Anomalous
        }
    }
}
