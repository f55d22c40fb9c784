//! Normalized probabilists' Hermite polynomials and Gauss-Hermite quadrature
//! for the standard Gaussian probability measure.
//!
//! The polynomials are orthonormal with respect to the standard normal
//! density: `E[H_j(X) H_k(X)] = delta_{jk}` for `X ~ N(0,1)`. Evaluation uses
//! the normalized three-term recurrence
//!
//! ```text
//! H_0 = 1,  H_1(x) = x,  H_{m+1}(x) = (x H_m(x) - sqrt(m) H_{m-1}(x)) / sqrt(m+1)
//! ```
//!
//! which is forward-stable and never forms factorials, so degrees far beyond
//! the overflow point of `k!` stay representable. The validated range is
//! degrees `k <= 200` and arguments `|x| <= 10`; outside it results are
//! returned unchanged but accuracy is not documented.

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

/// Largest degree covered by the documented accuracy guarantees.
pub const VALIDATED_DEGREE: u32 = 200;

/// Largest `|x|` covered by the documented accuracy guarantees.
pub const VALIDATED_RANGE: f64 = 10.0;

/// One step of the normalized recurrence: given `H_m` and `H_{m-1}` at `x`,
/// returns `H_{m+1}(x)`.
#[inline]
fn recurrence_step(x: f64, h_m: f64, h_m_prev: f64, m: u32) -> f64 {
    let m = f64::from(m);
    (x * h_m - m.sqrt() * h_m_prev) / (m + 1.0).sqrt()
}

/// Evaluates the normalized Hermite polynomial `H_k(x)`.
///
/// Panics if `x` is not finite; that is a caller contract violation.
pub fn eval(k: u32, x: f64) -> f64 {
    assert!(x.is_finite(), "Hermite evaluation requires finite x, got {x}");
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = x;
    for m in 1..k {
        let next = recurrence_step(x, cur, prev, m);
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `H_0(x), ..., H_{k_max}(x)` in one recurrence pass.
///
/// Entry `m` is bit-for-bit equal to `eval(m, x)`: both run the same
/// recurrence step in the same order.
pub fn eval_batch(k_max: u32, x: f64) -> Vec<f64> {
    assert!(x.is_finite(), "Hermite evaluation requires finite x, got {x}");
    let mut values = Vec::with_capacity(k_max as usize + 1);
    values.push(1.0);
    if k_max == 0 {
        return values;
    }
    values.push(x);
    for m in 1..k_max {
        let next = recurrence_step(x, values[m as usize], values[m as usize - 1], m);
        values.push(next);
    }
    values
}

/// Evaluates the tensor-product polynomial `H_k(x) = prod_j H_{k_j}(x_j)`.
///
/// Coordinates with `k_j = 0` contribute a factor of one and are skipped.
/// Panics if the point dimension does not match `k.dim()`.
pub fn eval_multi(k: &MultiIndex, x: &[f64]) -> f64 {
    assert_eq!(
        x.len(),
        k.dim(),
        "point dimension {} does not match index dimension {}",
        x.len(),
        k.dim()
    );
    let mut product = 1.0;
    for (j, kj) in k.nonzero() {
        product *= eval(kj, x[j - 1]);
    }
    product
}

/// Gauss-Hermite quadrature rule for the standard Gaussian probability
/// measure: `integral f(x) phi(x) dx ~ sum_i w_i f(x_i)`.
///
/// An `m`-point rule integrates polynomials of degree `<= 2m - 1` exactly.
/// Nodes are ascending and exactly symmetric about zero; weights are
/// positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Approximates `integral f(x) phi(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the `m`-point Gauss-Hermite rule for the Gaussian probability
/// measure.
///
/// Nodes are the roots of the degree-`m` Hermite polynomial, located by
/// Sturm-sequence bisection on the probabilists' Jacobi matrix (zero
/// diagonal, off-diagonal `sqrt(k)`) and polished by Newton steps on the
/// normalized recurrence until the step is below one ulp of the node. The
/// refined nodes satisfy the weighted residual bound
/// `|H_m(x_i)| exp(-x_i^2 / 4) <= 1e-13`; the Gaussian half-weight is the
/// scale on which the polynomial is O(1), so this is the machine-precision
/// criterion (the raw polynomial reaches `exp(x^2/4)` at the outer nodes,
/// where no absolute residual is representable).
/// Weights come from the Christoffel identity
/// `w_i = 1 / sum_{k<m} H_k(x_i)^2`, which is exact at the Gauss nodes.
pub fn gauss_hermite_rule(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::param("m", "quadrature order must be >= 1"));
    }
    if m == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![1.0],
        });
    }

    // Off-diagonal entries of the Jacobi matrix: beta_k = sqrt(k).
    let offdiag: Vec<f64> = (1..m).map(|k| (k as f64).sqrt()).collect();
    // Gershgorin bound on the spectrum.
    let radius = 2.0 * (m as f64 - 1.0).sqrt() + 1.0;

    let mut nodes = Vec::with_capacity(m);
    for i in 0..m {
        let approx = bisect_eigenvalue(&offdiag, m, i, radius);
        nodes.push(newton_polish(m as u32, approx));
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("nodes are finite"));

    // Christoffel weights from the orthonormal polynomial values.
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let values = eval_batch(m as u32 - 1, x);
            1.0 / values.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();

    symmetrize(&mut nodes, &mut weights);
    Ok(QuadratureRule { nodes, weights })
}

/// Number of sign agreements `< 0` in the Sturm sequence of `J - x I`,
/// which equals the number of eigenvalues strictly below `x`.
fn sturm_count(offdiag: &[f64], m: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for e in offdiag.iter().take(m - 1) {
        if q == 0.0 {
            q = 1e-300;
        }
        q = -x - e * e / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bisects for the `i`-th smallest eigenvalue of the Jacobi matrix.
fn bisect_eigenvalue(offdiag: &[f64], m: usize, i: usize, radius: f64) -> f64 {
    let mut lo = -radius;
    let mut hi = radius;
    // 64 halvings reach ~1e-17 relative to the spectral radius, far inside
    // the Newton basin of each simple root.
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(offdiag, m, mid) <= i {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Newton refinement of a root of `H_m` using `H_m'(x) = sqrt(m) H_{m-1}(x)`.
fn newton_polish(m: u32, start: f64) -> f64 {
    let mut x = start;
    for _ in 0..32 {
        let values = eval_batch(m, x);
        let h_m = values[m as usize];
        if h_m == 0.0 {
            break;
        }
        let derivative = f64::from(m).sqrt() * values[m as usize - 1];
        let step = h_m / derivative;
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Enforces exact node symmetry `x_i = -x_{m+1-i}`, equal mirrored weights,
/// and unit weight sum.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let m = nodes.len();
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}
