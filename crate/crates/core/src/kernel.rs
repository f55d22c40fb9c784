//! Coefficient-space representation of functions, the reproducing-kernel
//! inner product, synthesis back to point evaluations, a Gauss-Hermite
//! coefficient oracle, and truncated evaluation of the kernel series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{self, VALIDATED_RANGE};
use crate::multi_index::MultiIndex;
use crate::numeric::neumaier_sum;
use crate::space::{AnalyticSpace, HermiteSpace};

/// Coefficients with magnitude below this are dropped on construction to
/// keep denormals out of inner products.
const MIN_COEFFICIENT: f64 = 1e-300;

/// A function given by its finitely many nonzero Hermite coefficients.
///
/// Queries for absent indices return zero. Stored values are finite and
/// have magnitude at least `1e-300`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientFunctionRepr", into = "CoefficientFunctionRepr")]
pub struct CoefficientFunction {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientEntry {
    k: Vec<u32>,
    v: f64,
}

/// Wire form: `{"dim": s, "coeffs": [{"k": [k_1,...,k_s], "v": value}, ...]}`.
#[derive(Serialize, Deserialize)]
struct CoefficientFunctionRepr {
    dim: usize,
    coeffs: Vec<CoefficientEntry>,
}

impl TryFrom<CoefficientFunctionRepr> for CoefficientFunction {
    type Error = Error;
    fn try_from(repr: CoefficientFunctionRepr) -> Result<Self> {
        let entries = repr
            .coeffs
            .into_iter()
            .map(|e| Ok((MultiIndex::from_dense(&e.k)?, e.v)))
            .collect::<Result<Vec<_>>>()?;
        CoefficientFunction::new(repr.dim, entries)
    }
}

impl From<CoefficientFunction> for CoefficientFunctionRepr {
    fn from(f: CoefficientFunction) -> Self {
        CoefficientFunctionRepr {
            dim: f.dim,
            coeffs: f
                .coeffs
                .into_iter()
                .map(|(k, v)| CoefficientEntry { k: k.to_dense(), v })
                .collect(),
        }
    }
}

impl CoefficientFunction {
    /// Builds a coefficient function, dropping entries below the magnitude
    /// floor. Duplicate indices and dimension mismatches are rejected.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "dimension must be >= 1"));
        }
        let mut coeffs = BTreeMap::new();
        for (k, v) in entries {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("coefficient value"));
            }
            if v.abs() < MIN_COEFFICIENT {
                continue;
            }
            if coeffs.insert(k, v).is_some() {
                return Err(Error::param("coeffs", "duplicate multi-index"));
            }
        }
        Ok(Self { dim, coeffs })
    }

    /// The zero function in dimension `dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, [])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient at `k`; zero when absent.
    pub fn coefficient(&self, k: &MultiIndex) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Stored entries in graded-lex index order.
    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Inner product `sum_k fhat(k) ghat(k) / r(k)` over the indices present
    /// in both coefficient maps. Exact finite sum, accumulated in graded-lex
    /// index order.
    ///
    /// Panics on dimension mismatch.
    pub fn inner_product(&self, space: &HermiteSpace, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "coefficient functions differ in dimension");
        assert_eq!(self.dim, space.dim(), "space dimension mismatch");
        let (small, large) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        neumaier_sum(small.coeffs.iter().filter_map(|(k, &v)| {
            large
                .coeffs
                .get(k)
                .map(|&w| v * w / space.r_value(k))
        }))
    }

    /// Norm induced by the inner product.
    pub fn norm(&self, space: &HermiteSpace) -> f64 {
        self.inner_product(space, self).sqrt()
    }

    /// Builds an evaluator for `x -> sum_k fhat(k) H_k(x)`.
    pub fn synthesize(&self) -> Synthesized {
        let mut max_degree = vec![0u32; self.dim];
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (k, &v) in &self.coeffs {
            let support: Vec<(usize, u32)> = k.nonzero().collect();
            for &(j, kj) in &support {
                max_degree[j - 1] = max_degree[j - 1].max(kj);
            }
            terms.push((support, v));
        }
        Synthesized {
            dim: self.dim,
            max_degree,
            terms,
        }
    }
}

/// Reusable point evaluator of a finite Hermite expansion. Immutable and
/// freely shareable across threads.
#[derive(Debug, Clone)]
pub struct Synthesized {
    dim: usize,
    max_degree: Vec<u32>,
    terms: Vec<(Vec<(usize, u32)>, f64)>,
}

impl Synthesized {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates the expansion at `x`. Panics on dimension mismatch.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.dim,
            "point dimension {} does not match function dimension {}",
            x.len(),
            self.dim
        );
        match self.terms.as_slice() {
            [] => 0.0,
            // Single term: product over its sparse support, no table setup.
            // This is the shape of every worst-case integrand, so the Monte
            // Carlo hot loop takes this path.
            [(support, v)] => {
                let mut product = *v;
                for &(j, kj) in support {
                    product *= hermite::eval(kj, x[j - 1]);
                }
                product
            }
            _ => {
                let tables: Vec<Vec<f64>> = (0..self.dim)
                    .map(|i| hermite::eval_batch(self.max_degree[i], x[i]))
                    .collect();
                neumaier_sum(self.terms.iter().map(|(support, v)| {
                    let mut product = *v;
                    for &(j, kj) in support {
                        product *= tables[j - 1][kj as usize];
                    }
                    product
                }))
            }
        }
    }
}

/// The unit-norm extremal integrand `sqrt(r(k*)) H_{k*}` at the maximizer
/// `k*` of `r` over nonzero indices. Its norm is one and its variance under
/// the Gaussian measure equals `r(k*)`, so it attains the error bound.
pub fn worst_case_function(space: &HermiteSpace) -> CoefficientFunction {
    let max_r = space.max_r_nonzero();
    CoefficientFunction::new(space.dim(), [(max_r.argmax, max_r.value.sqrt())])
        .expect("worst-case coefficient is finite and nonzero")
}

/// Tensor Gauss-Hermite approximation of the Hermite coefficient
/// `integral f(x) H_k(x) phi_s(x) dx` with `m` nodes per coordinate.
///
/// Exact up to roundoff whenever `f * H_k` has per-coordinate degree at
/// most `2m - 1`. Costs `m^s` evaluations of `f`.
pub fn hermite_coefficient<F: Fn(&[f64]) -> f64>(
    f: F,
    k: &MultiIndex,
    m: usize,
) -> Result<f64> {
    let rule = hermite::gauss_hermite_rule(m)?;
    let s = k.dim();
    // Per-coordinate tables of w_i * H_{k_j}(x_i); the grid product of these
    // equals the full tensor weight times the polynomial value.
    let tables: Vec<Vec<f64>> = (1..=s)
        .map(|j| {
            let kj = k.exponent(j);
            rule.nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| w * hermite::eval(kj, x))
                .collect()
        })
        .collect();

    let mut point = vec![0.0f64; s];
    let mut digits = vec![0usize; s];
    let mut sum = 0.0;
    let mut compensation = 0.0;
    loop {
        let mut weight = 1.0;
        for j in 0..s {
            point[j] = rule.nodes()[digits[j]];
            weight *= tables[j][digits[j]];
        }
        // Neumaier accumulation in odometer order; the grid can be large,
        // so terms are consumed as they are produced.
        let term = weight * f(&point);
        let t = sum + term;
        compensation += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;

        // advance odometer
        let mut pos = 0;
        while pos < s {
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if pos == s {
            break;
        }
    }
    Ok(sum + compensation)
}

/// Result of a truncated kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    /// Truncated series value; within `tol` of the exact kernel.
    pub value: f64,
    /// Set when any coordinate of either point lies outside the validated
    /// range `|x| <= 10`. The value is still returned.
    pub out_of_range: bool,
}

/// Hard cap on per-coordinate series length.
const MAX_CUTOFF: u64 = 50_000_000;

/// Cramer bound constant: `|H_k(t)| <= 1.086435 * exp(t^2/4)` for all `k, t`.
const CRAMER: f64 = 1.086435;

/// Bulk amplitude constant `2^(3/4) pi^(-1/4) ~= 1.2632` with 25% headroom.
/// In the oscillatory region the normalized Hermite values obey
/// `|H_k(t)| <~ 2^(3/4) pi^(-1/4) (4k + 2 - t^2)^(-1/4) exp(t^2/4)`,
/// which this module verifies numerically through large degrees (see tests).
const BULK_CONSTANT: f64 = 1.58;

/// Upper envelope for `|H_k(t)|`: the Cramer bound, tightened by the bulk
/// amplitude away from the turning point. Nonincreasing in `k`.
fn hermite_envelope(k: u64, t: f64) -> f64 {
    let gap = 4.0 * k as f64 + 2.0 - t * t;
    let factor = if gap >= 4.0 {
        CRAMER.min(BULK_CONSTANT * gap.powf(-0.25))
    } else {
        CRAMER
    };
    factor * (t * t / 4.0).exp()
}

/// Upper bound on the coordinate weight tail `sum_{k > cutoff} r_j(k)`.
fn coordinate_r_tail(space: &HermiteSpace, j: usize, cutoff: u64) -> f64 {
    match space {
        HermiteSpace::FiniteSmoothness(sp) => {
            let gamma = sp.gammas()[j - 1];
            let alpha = sp.alpha();
            gamma * (cutoff as f64).powf(1.0 - alpha) / (alpha - 1.0)
        }
        HermiteSpace::Analytic(sp) => {
            let a = sp.a()[j - 1];
            let b = sp.b()[j - 1];
            let ratio = sp.omega().powf(a);
            sp.omega().powf(a * ((cutoff + 1) as f64).powf(b)) / (1.0 - ratio)
        }
    }
}

/// Smallest per-coordinate cutoff whose neglected tail, bounded by the
/// factorized weight tail times the Hermite envelope at both points, is at
/// most `eps`.
fn find_cutoff(space: &HermiteSpace, j: usize, xj: f64, yj: f64, eps: f64) -> Result<u64> {
    let bound = |cutoff: u64| {
        hermite_envelope(cutoff + 1, xj)
            * hermite_envelope(cutoff + 1, yj)
            * coordinate_r_tail(space, j, cutoff)
    };
    let mut hi = 8u64;
    while bound(hi) > eps {
        hi *= 2;
        if hi > MAX_CUTOFF {
            return Err(Error::TruncationLimit {
                coordinate: j,
                limit: MAX_CUTOFF as usize,
            });
        }
    }
    let mut lo = 0u64;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One factor of the product kernel: `sum_{k=0}^{cutoff} r_j(k) H_k(x) H_k(y)`,
/// accumulated in ascending `k` with rolling recurrences (no tables).
fn coordinate_factor(space: &HermiteSpace, j: usize, xj: f64, yj: f64, cutoff: u64) -> f64 {
    let mut sum = 1.0; // k = 0 term: r = 1, H_0 H_0 = 1
    let mut compensation = 0.0;
    let add = |sum: &mut f64, compensation: &mut f64, value: f64| {
        let t = *sum + value;
        *compensation += if sum.abs() >= value.abs() {
            (*sum - t) + value
        } else {
            (value - t) + *sum
        };
        *sum = t;
    };

    let (mut hx_prev, mut hx) = (1.0, xj);
    let (mut hy_prev, mut hy) = (1.0, yj);
    for k in 1..=cutoff {
        // Grouped so that swapping x and y cannot change the rounding.
        let term = space.coordinate_weight(j, k as u32) * (hx * hy);
        add(&mut sum, &mut compensation, term);
        let m = k as f64;
        let scale = (m + 1.0).sqrt();
        let hx_next = (xj * hx - m.sqrt() * hx_prev) / scale;
        hx_prev = hx;
        hx = hx_next;
        let hy_next = (yj * hy - m.sqrt() * hy_prev) / scale;
        hy_prev = hy;
        hy = hy_next;
    }
    sum + compensation
}

/// Truncated evaluation of the kernel series `sum_k r(k) H_k(x) H_k(y)`.
///
/// Both weight families factor over coordinates, so the series is evaluated
/// as a product of one-dimensional sums over the grid `{0..K_j}^s`; the
/// per-coordinate cutoffs are chosen so the total neglected mass stays below
/// `tol`. The summation order is fixed, making the result exactly symmetric
/// in `x` and `y`.
pub fn kernel_eval(space: &HermiteSpace, x: &[f64], y: &[f64], tol: f64) -> Result<KernelValue> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::param("tol", format!("must be > 0, got {tol}")));
    }
    let s = space.dim();
    for point in [x, y] {
        if point.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: point.len(),
            });
        }
        if point.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("kernel evaluation point"));
        }
    }
    let out_of_range = x
        .iter()
        .chain(y.iter())
        .any(|&c| c.abs() > VALIDATED_RANGE);

    // First pass: equal split of the error budget.
    let eps0 = tol / (2.0 * s as f64);
    let mut factors = vec![0.0f64; s];
    let mut achieved = vec![eps0; s];
    for j in 1..=s {
        let cutoff = find_cutoff(space, j, x[j - 1], y[j - 1], eps0)?;
        factors[j - 1] = coordinate_factor(space, j, x[j - 1], y[j - 1], cutoff);
    }

    // Error propagation through the product: a per-factor error eps_j
    // contributes at most eps_j * prod_{i != j} (|F_i| + eps0). Tighten any
    // factor whose share overshoots the budget (only matters when factors
    // exceed one in magnitude).
    if s > 1 {
        let partner = |j: usize, factors: &[f64]| -> f64 {
            factors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j - 1)
                .map(|(_, f)| f.abs() + eps0)
                .product()
        };
        let total: f64 = (1..=s).map(|j| achieved[j - 1] * partner(j, &factors)).sum();
        if total > tol {
            for j in 1..=s {
                let target = 0.9 * tol / (s as f64 * partner(j, &factors));
                if target < achieved[j - 1] {
                    let cutoff = find_cutoff(space, j, x[j - 1], y[j - 1], target)?;
                    factors[j - 1] = coordinate_factor(space, j, x[j - 1], y[j - 1], cutoff);
                    achieved[j - 1] = target;
                }
            }
        }
    }

    Ok(KernelValue {
        value: factors.iter().product(),
        out_of_range,
    })
}

/// Closed-form kernel for analytic spaces whose `b_j` all equal one, where
/// each coordinate series is a geometric Hermite sum with parameter
/// `omega^(a_j)`. Returns `None` for every other space.
///
/// Used as an independent cross-check of the truncated series, never as the
/// evaluation path.
pub fn mehler_kernel(space: &HermiteSpace, x: &[f64], y: &[f64]) -> Option<f64> {
    let HermiteSpace::Analytic(sp) = space else {
        return None;
    };
    if !sp.all_b_one() {
        return None;
    }
    assert_eq!(x.len(), sp.dim(), "point dimension mismatch");
    assert_eq!(y.len(), sp.dim(), "point dimension mismatch");
    let mut product = 1.0;
    for j in 0..sp.dim() {
        product *= mehler_factor(sp, j, x[j], y[j]);
    }
    Some(product)
}

fn mehler_factor(sp: &AnalyticSpace, j: usize, u: f64, v: f64) -> f64 {
    let w = sp.omega().powf(sp.a()[j]);
    let denom = 1.0 - w * w;
    ((2.0 * w * u * v - w * w * (u * u + v * v)) / (2.0 * denom)).exp() / denom.sqrt()
}
