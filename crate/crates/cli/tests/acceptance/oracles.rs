//! Independent reference implementations the acceptance suite checks the
//! library against. Everything here recomputes from first principles and
//! stays off the library's code paths for the quantity under test.

use threatsift_core::vectorspace::SparseVector;

/// Densify a sparse vector to a fixed dimension.
pub fn densify(v: &SparseVector, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for &(i, w) in v.entries() {
        out[i] = w;
    }
    out
}

/// Dense cosine over full vectors, ascending index, sequential adds. Mirrors
/// the documented zero-norm and clamping conventions.
pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    let norm_a = norm_a.sqrt();
    let norm_b = norm_b.sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_a * norm_b)).clamp(-1.0, 1.0)
}

/// Brute-force centroid novelty: densify the document, take dense cosine
/// against the centroid, novelty = 1 - cosine clamped into [0, 1], normal
/// iff novelty <= threshold.
pub fn dense_centroid_verdict(doc: &SparseVector, centroid: &[f64], threshold: f64) -> (f64, bool) {
    let dense_doc = densify(doc, centroid.len());
    let cos = dense_cosine(&dense_doc, centroid);
    let score = if dense_doc.iter().all(|&x| x == 0.0) || centroid.iter().all(|&x| x == 0.0) {
        1.0
    } else {
        (1.0 - cos).clamp(0.0, 1.0)
    };
    (score, score <= threshold)
}

/// Solution of the one-class SVM dual found by exhaustive active-set
/// enumeration.
pub struct QpSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
    pub rho: f64,
}

/// Solve `min 0.5 a'Ka  s.t.  0 <= a_i <= cap, sum a_i = 1` by enumerating
/// every assignment of variables to {at zero, at cap, free}, solving the
/// stationarity system on the free set, and keeping the best feasible
/// candidate. Exact (up to linear-solve precision) for these problem sizes.
pub fn solve_qp_by_enumeration(kmat: &[Vec<f64>], cap: f64) -> QpSolution {
    let n = kmat.len();
    let assignments = 3usize.pow(n as u32);
    let mut best: Option<(Vec<f64>, f64)> = None;
    const FEAS_EPS: f64 = 1e-9;

    for code in 0..assignments {
        let mut digits = code;
        let mut state = vec![0u8; n]; // 0 = at zero, 1 = at cap, 2 = free
        for s in state.iter_mut() {
            *s = (digits % 3) as u8;
            digits /= 3;
        }
        let at_cap: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let fixed_sum = at_cap.len() as f64 * cap;
        if fixed_sum > 1.0 + FEAS_EPS {
            continue;
        }

        let mut alphas = vec![0.0; n];
        for &i in &at_cap {
            alphas[i] = cap;
        }

        if free.is_empty() {
            if (fixed_sum - 1.0).abs() > FEAS_EPS {
                continue;
            }
        } else {
            // Stationarity on the face: K_FF a_F - rho 1 = -K_F,cap * cap,
            // plus the mass constraint sum a_F = 1 - fixed_sum.
            let f = free.len();
            let mut matrix = vec![vec![0.0; f + 1]; f + 1];
            let mut rhs = vec![0.0; f + 1];
            for (row, &i) in free.iter().enumerate() {
                for (col, &j) in free.iter().enumerate() {
                    matrix[row][col] = kmat[i][j];
                }
                matrix[row][f] = -1.0;
                rhs[row] = -cap * at_cap.iter().map(|&j| kmat[i][j]).sum::<f64>();
            }
            for cell in matrix[f].iter_mut().take(f) {
                *cell = 1.0;
            }
            rhs[f] = 1.0 - fixed_sum;

            let Some(solution) = solve_linear(matrix, rhs) else {
                continue; // singular face; the KKT certificate guards coverage
            };
            let mut feasible = true;
            for (&slot, &i) in solution.iter().zip(&free) {
                if slot < -FEAS_EPS || slot > cap + FEAS_EPS {
                    feasible = false;
                    break;
                }
                alphas[i] = slot.clamp(0.0, cap);
            }
            if !feasible {
                continue;
            }
        }

        let objective = qp_objective(kmat, &alphas);
        if best.as_ref().is_none_or(|(_, obj)| objective < *obj) {
            best = Some((alphas, objective));
        }
    }

    let (alphas, objective) = best.expect("the feasible set is never empty");
    let rho = qp_rho(kmat, &alphas, cap);
    QpSolution {
        alphas,
        objective,
        rho,
    }
}

/// `0.5 a' K a`.
pub fn qp_objective(kmat: &[Vec<f64>], alphas: &[f64]) -> f64 {
    let n = kmat.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += alphas[i] * alphas[j] * kmat[i][j];
        }
    }
    0.5 * total
}

/// Offset with the same convention as the trainer: gradient averaged over
/// margin vectors, else the midpoint of the feasible interval.
pub fn qp_rho(kmat: &[Vec<f64>], alphas: &[f64], cap: f64) -> f64 {
    let grad = gradient(kmat, alphas);
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    const BOUND_EPS: f64 = 1e-10;
    for (&a, &g) in alphas.iter().zip(&grad) {
        if a <= BOUND_EPS {
            upper = upper.min(g);
        } else if a >= cap - BOUND_EPS {
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
    } else {
        upper
    }
}

/// Worst per-point KKT residual of `(alphas, rho)`; certifies optimality of
/// the enumeration result on its own.
pub fn qp_kkt_residual(kmat: &[Vec<f64>], alphas: &[f64], rho: f64, cap: f64) -> f64 {
    let grad = gradient(kmat, alphas);
    let mut worst = 0.0f64;
    const BOUND_EPS: f64 = 1e-10;
    for (&a, &g) in alphas.iter().zip(&grad) {
        let residual = if a <= BOUND_EPS {
            (rho - g).max(0.0)
        } else if a >= cap - BOUND_EPS {
            (g - rho).max(0.0)
        } else {
            (g - rho).abs()
        };
        worst = worst.max(residual);
    }
    worst
}

fn gradient(kmat: &[Vec<f64>], alphas: &[f64]) -> Vec<f64> {
    kmat.iter()
        .map(|row| row.iter().zip(alphas).map(|(k, a)| k * a).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting; None on (near-)singularity.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[col];
            for (cell, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *cell -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Some(x)
}

/// Exhaustive top-k by dense cosine with the linker's tie rule (score
/// descending, CVE id ascending). Returns (cve_id, score) pairs.
pub fn exhaustive_link_scan(
    query: &SparseVector,
    entries: &[(String, SparseVector)],
    dim: usize,
    k: usize,
) -> Vec<(String, f64)> {
    let dense_query = densify(query, dim);
    let mut scored: Vec<(String, f64)> = entries
        .iter()
        .map(|(id, v)| {
            let score = dense_cosine(&dense_query, &densify(v, dim)).max(0.0);
            (id.clone(), score)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    scored
}
