//! Weighted Hermite spaces: the finite-smoothness family with polynomially
//! decaying coefficient weights and the analytic family with exponentially
//! decaying coefficient weights.
//!
//! A space is identified by its weight function `r` on multi-indices. Both
//! built-in families factor over coordinates, which the kernel evaluation
//! and the worst-case analysis rely on throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;

/// Parametric generator for a weight sequence `(w_1, w_2, ...)`.
///
/// Used for the coefficient weights `gamma` of the finite-smoothness family
/// and for the exponent sequences `a` and `b` of the analytic family.
/// All families generate strictly positive values for every `j >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequenceSpec {
    /// `w_j = c`.
    Constant { c: f64 },
    /// `w_j = c * j^(-beta)`.
    PolynomialDecay { c: f64, beta: f64 },
    /// `w_j = c * q^j`.
    Geometric { c: f64, q: f64 },
    /// `w_j = c^(1/j)`.
    RootGeometric { c: f64 },
    /// `w_j = 1 + c * j^(-beta)`; weights above one that decay to one.
    ShiftedPolynomial { c: f64, beta: f64 },
    /// Explicit finite list with a declared tail rule.
    Table { values: Vec<f64>, tail: TailRule },
}

/// Continuation rule for `Table` sequences past the listed values. Spelled
/// out in configurations because the tractability verdict depends on the
/// tail behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Continue with the last listed value for all larger `j`.
    ConstantLast,
}

impl WeightSequenceSpec {
    pub fn constant(c: f64) -> Result<Self> {
        let spec = WeightSequenceSpec::Constant { c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn polynomial_decay(c: f64, beta: f64) -> Result<Self> {
        let spec = WeightSequenceSpec::PolynomialDecay { c, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn geometric(c: f64, q: f64) -> Result<Self> {
        let spec = WeightSequenceSpec::Geometric { c, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn root_geometric(c: f64) -> Result<Self> {
        let spec = WeightSequenceSpec::RootGeometric { c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn shifted_polynomial(c: f64, beta: f64) -> Result<Self> {
        let spec = WeightSequenceSpec::ShiftedPolynomial { c, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let spec = WeightSequenceSpec::Table {
            values,
            tail: TailRule::ConstantLast,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks strict positivity (and finiteness) of every generated value.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        match self {
            WeightSequenceSpec::Constant { c } => positive("c", *c),
            WeightSequenceSpec::PolynomialDecay { c, beta } => {
                positive("c", *c)?;
                if beta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("beta", "must be finite"))
                }
            }
            WeightSequenceSpec::Geometric { c, q } => {
                positive("c", *c)?;
                positive("q", *q)
            }
            WeightSequenceSpec::RootGeometric { c } => positive("c", *c),
            WeightSequenceSpec::ShiftedPolynomial { c, beta } => {
                positive("c", *c)?;
                positive("beta", *beta)
            }
            WeightSequenceSpec::Table { values, .. } => {
                if values.is_empty() {
                    return Err(Error::InvalidWeights("table must list at least one value".into()));
                }
                for (i, &v) in values.iter().enumerate() {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::InvalidWeights(format!(
                            "table entry {} must be finite and > 0, got {v}",
                            i + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Checks the additional requirement for use as a `gamma` sequence:
    /// values nonincreasing in `j`. Decided per family, not by sampling.
    pub fn validate_gamma(&self) -> Result<()> {
        self.validate()?;
        let fail = |msg: String| Err(Error::InvalidWeights(msg));
        match self {
            WeightSequenceSpec::Constant { .. } | WeightSequenceSpec::ShiftedPolynomial { .. } => {
                Ok(())
            }
            WeightSequenceSpec::PolynomialDecay { beta, .. } => {
                if *beta >= 0.0 {
                    Ok(())
                } else {
                    fail(format!("polynomial_decay with beta={beta} < 0 is increasing"))
                }
            }
            WeightSequenceSpec::Geometric { q, .. } => {
                if *q <= 1.0 {
                    Ok(())
                } else {
                    fail(format!("geometric with q={q} > 1 is increasing"))
                }
            }
            WeightSequenceSpec::RootGeometric { c } => {
                if *c >= 1.0 {
                    Ok(())
                } else {
                    fail(format!("root_geometric with c={c} < 1 is increasing"))
                }
            }
            WeightSequenceSpec::Table { values, .. } => {
                if values.windows(2).all(|w| w[0] >= w[1]) {
                    Ok(())
                } else {
                    fail("table values are not nonincreasing".into())
                }
            }
        }
    }

    /// Value `w_j` for a 1-based index `j >= 1`.
    pub fn value(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        let jf = j as f64;
        match self {
            WeightSequenceSpec::Constant { c } => *c,
            WeightSequenceSpec::PolynomialDecay { c, beta } => c * jf.powf(-beta),
            WeightSequenceSpec::Geometric { c, q } => c * q.powf(jf),
            WeightSequenceSpec::RootGeometric { c } => c.powf(1.0 / jf),
            WeightSequenceSpec::ShiftedPolynomial { c, beta } => 1.0 + c * jf.powf(-beta),
            WeightSequenceSpec::Table { values, .. } => values[j.min(values.len()) - 1],
        }
    }

    /// First `s` values as a vector.
    pub fn values(&self, s: usize) -> Vec<f64> {
        (1..=s).map(|j| self.value(j)).collect()
    }
}

impl fmt::Display for WeightSequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSequenceSpec::Constant { c } => write!(f, "constant({c})"),
            WeightSequenceSpec::PolynomialDecay { c, beta } => {
                write!(f, "polynomial_decay(c={c},beta={beta})")
            }
            WeightSequenceSpec::Geometric { c, q } => write!(f, "geometric(c={c},q={q})"),
            WeightSequenceSpec::RootGeometric { c } => write!(f, "root_geometric(c={c})"),
            WeightSequenceSpec::ShiftedPolynomial { c, beta } => {
                write!(f, "shifted_polynomial(c={c},beta={beta})")
            }
            WeightSequenceSpec::Table { values, .. } => {
                write!(f, "table[")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Hermite space of finite smoothness: coordinate weight
/// `r_j(k) = 1` for `k = 0` and `gamma_j * k^(-alpha)` for `k >= 1`,
/// with `alpha > 1` and nonincreasing positive `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSmoothnessSpace {
    dim: usize,
    alpha: f64,
    gamma: WeightSequenceSpec,
    gammas: Vec<f64>,
}

impl FiniteSmoothnessSpace {
    pub fn new(dim: usize, alpha: f64, gamma: WeightSequenceSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("s", "dimension must be >= 1"));
        }
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::param("alpha", format!("must be in (1, inf), got {alpha}")));
        }
        gamma.validate_gamma()?;
        let gammas = gamma.values(dim);
        Ok(Self {
            dim,
            alpha,
            gamma,
            gammas,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_spec(&self) -> &WeightSequenceSpec {
        &self.gamma
    }

    /// Materialized `gamma_1, ..., gamma_s`.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Coordinate weight `r_{alpha, gamma_j}(k)`.
    pub fn coordinate_weight(&self, j: usize, k: u32) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.gammas[j - 1] * f64::from(k).powf(-self.alpha)
        }
    }
}

/// Hermite space of analytic functions: `r(k) = omega^(sum_j a_j k_j^(b_j))`
/// with `omega` in (0,1), `a_j > 0` and `b_j >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpace {
    dim: usize,
    omega: f64,
    a_spec: WeightSequenceSpec,
    b_spec: WeightSequenceSpec,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl AnalyticSpace {
    pub fn new(
        dim: usize,
        omega: f64,
        a: WeightSequenceSpec,
        b: WeightSequenceSpec,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("s", "dimension must be >= 1"));
        }
        if !(omega.is_finite() && omega > 0.0 && omega < 1.0) {
            return Err(Error::param("omega", format!("must be in (0, 1), got {omega}")));
        }
        a.validate()?;
        b.validate()?;
        let a_values = a.values(dim);
        let b_values = b.values(dim);
        for (j, &bj) in b_values.iter().enumerate() {
            if bj < 1.0 {
                return Err(Error::param(
                    "b",
                    format!("b_{} = {bj} violates b_j >= 1", j + 1),
                ));
            }
        }
        Ok(Self {
            dim,
            omega,
            a_spec: a,
            b_spec: b,
            a: a_values,
            b: b_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn a_spec(&self) -> &WeightSequenceSpec {
        &self.a_spec
    }

    pub fn b_spec(&self) -> &WeightSequenceSpec {
        &self.b_spec
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Smallest exponent weight over the realized coordinates,
    /// `min_{j <= s} a_j`, together with the smallest attaining `j`.
    pub fn min_a(&self) -> (f64, usize) {
        let mut best = (self.a[0], 1);
        for (i, &aj) in self.a.iter().enumerate().skip(1) {
            if aj < best.0 {
                best = (aj, i + 1);
            }
        }
        best
    }

    /// Coordinate weight `omega^(a_j k^(b_j))`.
    pub fn coordinate_weight(&self, j: usize, k: u32) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.omega
                .powf(self.a[j - 1] * f64::from(k).powf(self.b[j - 1]))
        }
    }

    /// True when every realized `b_j` equals one, the case with a closed-form
    /// kernel used as a cross-check.
    pub fn all_b_one(&self) -> bool {
        self.b.iter().all(|&bj| bj == 1.0)
    }
}

/// A Hermite space: one of the two built-in weight families.
#[derive(Debug, Clone, PartialEq)]
pub enum HermiteSpace {
    FiniteSmoothness(FiniteSmoothnessSpace),
    Analytic(AnalyticSpace),
}

/// Maximum of the weight function over nonzero multi-indices, the quantity
/// driving both the randomized error and the information complexity.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxR {
    /// `max_{k != 0} r(k)`; may overflow to infinity for strongly
    /// intractable weights at large dimension.
    pub value: f64,
    /// Natural log of the maximum, computed in log space so it stays finite
    /// when `value` does not.
    pub ln_value: f64,
    /// Smallest maximizing index in graded lexicographic order.
    pub argmax: MultiIndex,
}

impl HermiteSpace {
    pub fn dim(&self) -> usize {
        match self {
            HermiteSpace::FiniteSmoothness(sp) => sp.dim(),
            HermiteSpace::Analytic(sp) => sp.dim(),
        }
    }

    /// Coordinate weight `r_j(k)` of the factorized weight function.
    pub fn coordinate_weight(&self, j: usize, k: u32) -> f64 {
        match self {
            HermiteSpace::FiniteSmoothness(sp) => sp.coordinate_weight(j, k),
            HermiteSpace::Analytic(sp) => sp.coordinate_weight(j, k),
        }
    }

    /// Weight `r(k)` of a multi-index. `r(0) = 1` for both families.
    ///
    /// Panics if `k.dim() != self.dim()`.
    pub fn r_value(&self, k: &MultiIndex) -> f64 {
        assert_eq!(
            k.dim(),
            self.dim(),
            "index dimension {} does not match space dimension {}",
            k.dim(),
            self.dim()
        );
        match self {
            HermiteSpace::FiniteSmoothness(sp) => {
                let mut product = 1.0;
                for (j, kj) in k.nonzero() {
                    product *= sp.coordinate_weight(j, kj);
                }
                product
            }
            HermiteSpace::Analytic(sp) => {
                let mut exponent = 0.0;
                for (j, kj) in k.nonzero() {
                    exponent += sp.a[j - 1] * f64::from(kj).powf(sp.b[j - 1]);
                }
                sp.omega.powf(exponent)
            }
        }
    }

    /// Maximum of `r` over nonzero indices with the smallest maximizer.
    ///
    /// Finite smoothness: the maximum of the prefix products of `gamma`,
    /// attained at the all-ones index of the shortest maximizing prefix.
    /// Analytic: `omega^(min_j a_j)`, attained at the unit index of the
    /// smallest minimizing coordinate.
    pub fn max_r_nonzero(&self) -> MaxR {
        match self {
            HermiteSpace::FiniteSmoothness(sp) => {
                let mut best_ln = f64::NEG_INFINITY;
                let mut best_len = 1;
                let mut running_ln = 0.0;
                for (i, &g) in sp.gammas.iter().enumerate() {
                    running_ln += g.ln();
                    if running_ln > best_ln {
                        best_ln = running_ln;
                        best_len = i + 1;
                    }
                }
                // Direct product for the value (exact for short prefixes,
                // overflows honestly); the log tracks it either way.
                let value: f64 = sp.gammas[..best_len].iter().product();
                MaxR {
                    value,
                    ln_value: best_ln,
                    argmax: MultiIndex::ones_prefix(sp.dim, best_len)
                        .expect("prefix length <= dim"),
                }
            }
            HermiteSpace::Analytic(sp) => {
                let (a_min, j_min) = sp.min_a();
                MaxR {
                    // Same power path as `r_value` at the unit index.
                    value: sp.omega.powf(a_min),
                    ln_value: a_min * sp.omega.ln(),
                    argmax: MultiIndex::unit(sp.dim, j_min).expect("coordinate <= dim"),
                }
            }
        }
    }

    /// Total mass `sum_k r(k)` of the weight function, computed from the
    /// per-coordinate factorization with truncation error at most `tol`.
    ///
    /// Finite smoothness uses the closed form
    /// `prod_j (1 + gamma_j zeta(alpha))`; analytic sums the per-coordinate
    /// geometric-dominated series directly.
    pub fn summability_constant(&self, tol: f64) -> f64 {
        assert!(tol > 0.0, "tolerance must be positive, got {tol}");
        match self {
            HermiteSpace::FiniteSmoothness(sp) => {
                let zeta_alpha = zeta(sp.alpha, (tol * 1e-3).max(1e-15));
                sp.gammas.iter().map(|&g| 1.0 + g * zeta_alpha).product()
            }
            HermiteSpace::Analytic(sp) => {
                let per_coord_tol = (tol / sp.dim as f64).max(1e-16);
                (1..=sp.dim)
                    .map(|j| analytic_coordinate_mass(sp.omega, sp.a[j - 1], sp.b[j - 1], per_coord_tol))
                    .product()
            }
        }
    }
}

impl fmt::Display for HermiteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HermiteSpace::FiniteSmoothness(sp) => write!(
                f,
                "finite_smoothness(s={},alpha={},gamma={})",
                sp.dim, sp.alpha, sp.gamma
            ),
            HermiteSpace::Analytic(sp) => write!(
                f,
                "analytic(s={},omega={},a={},b={})",
                sp.dim, sp.omega, sp.a_spec, sp.b_spec
            ),
        }
    }
}

/// A space family with the dimension left free, used by sweeps that vary `s`
/// while holding the weight parameters fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceFamily {
    FiniteSmoothness {
        alpha: f64,
        gamma: WeightSequenceSpec,
    },
    Analytic {
        omega: f64,
        a: WeightSequenceSpec,
        b: WeightSequenceSpec,
    },
}

impl SpaceFamily {
    /// Realizes the family at dimension `s`.
    pub fn instantiate(&self, s: usize) -> Result<HermiteSpace> {
        match self {
            SpaceFamily::FiniteSmoothness { alpha, gamma } => Ok(HermiteSpace::FiniteSmoothness(
                FiniteSmoothnessSpace::new(s, *alpha, gamma.clone())?,
            )),
            SpaceFamily::Analytic { omega, a, b } => Ok(HermiteSpace::Analytic(
                AnalyticSpace::new(s, *omega, a.clone(), b.clone())?,
            )),
        }
    }
}

/// Riemann zeta function for `alpha > 1` by direct summation with an
/// Euler-Maclaurin tail correction; the correction remainder is below `tol`.
pub(crate) fn zeta(alpha: f64, tol: f64) -> f64 {
    debug_assert!(alpha > 1.0 && tol > 0.0);
    // Remainder after the first derivative correction is bounded by
    // |f'''(J)| / 720 with f(x) = x^(-alpha); pick J so that twice that
    // bound is below tol.
    let c3 = alpha * (alpha + 1.0) * (alpha + 2.0);
    let j_real = (c3 / (360.0 * tol)).powf(1.0 / (alpha + 3.0));
    let j = (j_real.ceil() as usize).clamp(16, 2_000_000);

    let mut sum = 0.0;
    let mut compensation = 0.0;
    for i in 1..=j {
        // Neumaier-compensated accumulation.
        let term = (i as f64).powf(-alpha);
        let t = sum + term;
        compensation += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    let a = (j + 1) as f64;
    let tail = a.powf(1.0 - alpha) / (alpha - 1.0) + 0.5 * a.powf(-alpha)
        + alpha * a.powf(-alpha - 1.0) / 12.0;
    sum + compensation + tail
}

/// Per-coordinate mass `sum_{k >= 0} omega^(a k^b)` of the analytic family.
///
/// For `b = 1` the series is geometric and summed in closed form. Otherwise
/// successive terms shrink by at least `omega^a`, so summation stops once
/// the geometric tail bound drops below `tol`; the bound itself is added as
/// the tail completion, which keeps the error within `tol` and one-sided.
fn analytic_coordinate_mass(omega: f64, a: f64, b: f64, tol: f64) -> f64 {
    let ratio = omega.powf(a);
    if b == 1.0 {
        return 1.0 / (1.0 - ratio);
    }
    let tail_factor = ratio / (1.0 - ratio);
    let mut sum = 1.0;
    let mut k = 1u32;
    loop {
        let term = omega.powf(a * f64::from(k).powf(b));
        sum += term;
        let tail_bound = term * tail_factor;
        if tail_bound <= tol || term == 0.0 || k >= 10_000_000 {
            return sum + tail_bound;
        }
        k += 1;
    }
}
