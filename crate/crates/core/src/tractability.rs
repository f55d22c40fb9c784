//! Information complexity of Monte Carlo integration and the tractability
//! classification of weight sequences.
//!
//! The driving quantity is `S(s) = sum_{j<=s} max(log gamma_j, 0)`:
//! bounded `S` gives strong polynomial tractability, `S / log s` bounded
//! gives polynomial tractability, and `S / s -> 0` gives weak tractability.
//! For the built-in parametric families these conditions are decided in
//! closed form; explicit tables get a trend-based verdict over a dyadic
//! grid, flagged as heuristic because no finite computation decides a
//! genuine limit for a black-box sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
use crate::space::{AnalyticSpace, HermiteSpace, SpaceFamily, WeightSequenceSpec};

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Threshold of the trend test: the last three dyadic values of a ratio
/// must vary by less than 1% for it to be deemed convergent.
const TREND_SPREAD: f64 = 0.01;

/// Threshold below which the final `S(s)/s` value is treated as vanishing.
const WEAK_RATIO_CUTOFF: f64 = 0.01;

/// Smallest node count with randomized error at most `eps`:
/// `ceil(max_{k != 0} r(k) / eps^2)`. Saturates at `u64::MAX` when the
/// weight maximum overflows the integer range.
pub fn n_mc(space: &HermiteSpace, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must be in (0,1), got {eps}")));
    }
    let raw = (space.max_r_nonzero().value / (eps * eps)).ceil();
    if !raw.is_finite() || raw >= u64::MAX as f64 {
        Ok(u64::MAX)
    } else {
        Ok((raw as u64).max(1))
    }
}

/// `log n_mc`, computed in log space so it stays meaningful when the node
/// count saturates.
fn ln_n_mc(space: &HermiteSpace, eps: f64) -> Result<f64> {
    let n = n_mc(space, eps)?;
    if n == u64::MAX {
        let ln_eps_inv = (1.0 / eps).ln();
        Ok((space.max_r_nonzero().ln_value + 2.0 * ln_eps_inv).max(0.0))
    } else {
        Ok((n as f64).ln())
    }
}

/// One row of the partial-sum diagnostic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub s: u64,
    /// `S(s) = sum_{j<=s} max(log gamma_j, 0)`.
    pub partial_sum: f64,
    /// `S(s) / log s`.
    pub per_log_s: f64,
    /// `S(s) / s`.
    pub per_s: f64,
}

/// Evidence backing a tractability verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `C = sup_s prod_{j<=s} gamma_j`; present iff strongly polynomial.
    pub sup_prefix_product: Option<f64>,
    /// `A = limsup_s S(s) / log s`; present iff polynomial.
    pub log_ratio_limsup: Option<f64>,
    /// Partial sums over the default dyadic grid.
    pub diagnostic: Vec<DiagnosticRow>,
    /// Set when the verdict comes from finite trends instead of closed forms.
    pub heuristic: bool,
}

/// Verdict on the three tractability notions. The flags are monotone:
/// strong polynomial implies polynomial implies weak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractabilityVerdict {
    pub strong_polynomial: bool,
    pub polynomial: bool,
    pub weak: bool,
    pub certificate: Certificate,
}

/// The dyadic dimension grid `2^4, ..., 2^20` used for diagnostics and
/// trend tests.
pub fn dyadic_grid() -> Vec<u64> {
    (4..=20).map(|p| 1u64 << p).collect()
}

/// Partial sums `S(s)` with the two normalized ratios, for ascending
/// dimensions `s >= 2`.
pub fn partial_sum_diagnostic(
    gamma: &WeightSequenceSpec,
    s_values: &[u64],
) -> Result<Vec<DiagnosticRow>> {
    gamma.validate()?;
    if s_values.is_empty() {
        return Err(Error::param("s_values", "grid must be nonempty"));
    }
    for pair in s_values.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::param("s_values", "grid must be strictly ascending"));
        }
    }
    if s_values[0] < 2 {
        return Err(Error::param("s_values", "dimensions must be >= 2"));
    }
    Ok(s_values
        .iter()
        .map(|&s| {
            let partial_sum = partial_sum_max_log(gamma, s);
            DiagnosticRow {
                s,
                partial_sum,
                per_log_s: partial_sum / (s as f64).ln(),
                per_s: partial_sum / s as f64,
            }
        })
        .collect())
}

/// `S(s) = sum_{j<=s} max(log gamma_j, 0)` via per-family closed forms,
/// with direct summation where the family has no closed form.
pub fn partial_sum_max_log(gamma: &WeightSequenceSpec, s: u64) -> f64 {
    match gamma {
        WeightSequenceSpec::Constant { c } => s as f64 * c.ln().max(0.0),
        WeightSequenceSpec::PolynomialDecay { c, beta } => {
            if *beta == 0.0 {
                return s as f64 * c.ln().max(0.0);
            }
            // gamma_j >= 1 iff j <= c^(1/beta).
            let above_one = if *c >= 1.0 {
                c.powf(1.0 / beta).floor() as u64
            } else {
                0
            };
            let m = s.min(above_one);
            if m == 0 {
                0.0
            } else {
                m as f64 * c.ln() - beta * ln_factorial(m)
            }
        }
        WeightSequenceSpec::Geometric { c, q } => {
            if *q == 1.0 {
                return s as f64 * c.ln().max(0.0);
            }
            // log gamma_j = log c + j log q >= 0 iff j <= log c / (-log q).
            let above_one = if *c > 1.0 {
                (c.ln() / -q.ln()).floor() as u64
            } else {
                0
            };
            let m = s.min(above_one);
            if m == 0 {
                0.0
            } else {
                m as f64 * c.ln() + q.ln() * (m as f64) * (m as f64 + 1.0) / 2.0
            }
        }
        WeightSequenceSpec::RootGeometric { c } => c.ln().max(0.0) * harmonic(s),
        WeightSequenceSpec::ShiftedPolynomial { c, beta } => {
            // Every term log(1 + c j^(-beta)) is positive.
            const DIRECT_LIMIT: u64 = 1 << 22;
            let direct_to = s.min(DIRECT_LIMIT);
            let head = neumaier_sum(
                (1..=direct_to).map(|j| (1.0 + c * (j as f64).powf(-beta)).ln()),
            );
            if s <= DIRECT_LIMIT {
                head
            } else {
                // Beyond the direct range the terms are tiny; integrate the
                // two-term expansion log(1+u) ~ u - u^2/2 of c x^(-beta).
                head + shifted_tail(*c, *beta, direct_to as f64, s as f64)
            }
        }
        WeightSequenceSpec::Table { values, .. } => {
            let listed = values.len() as u64;
            let head = neumaier_sum(
                values
                    .iter()
                    .take(s.min(listed) as usize)
                    .map(|v| v.ln().max(0.0)),
            );
            if s <= listed {
                head
            } else {
                let tail_value = values[values.len() - 1].ln().max(0.0);
                head + (s - listed) as f64 * tail_value
            }
        }
    }
}

/// `integral_a^b (c x^(-beta) - c^2 x^(-2 beta) / 2) dx`.
fn shifted_tail(c: f64, beta: f64, a: f64, b: f64) -> f64 {
    let antiderivative = |coeff: f64, exponent: f64, x: f64| {
        if (exponent - 1.0).abs() < 1e-12 {
            coeff * x.ln()
        } else {
            coeff * x.powf(1.0 - exponent) / (1.0 - exponent)
        }
    };
    antiderivative(c, beta, b) - antiderivative(c, beta, a)
        - (antiderivative(c * c / 2.0, 2.0 * beta, b) - antiderivative(c * c / 2.0, 2.0 * beta, a))
}

fn ln_factorial(m: u64) -> f64 {
    if m <= 1024 {
        (2..=m).map(|j| (j as f64).ln()).sum()
    } else {
        // Stirling series for ln Gamma(m + 1); error below 1e-16 here.
        let x = m as f64 + 1.0;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

fn harmonic(s: u64) -> f64 {
    if s <= 65_536 {
        neumaier_sum((1..=s).map(|j| 1.0 / j as f64))
    } else {
        let x = s as f64;
        x.ln() + EULER_MASCHERONI + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x)
    }
}

/// `C = sup_{s >= 1} prod_{j<=s} gamma_j` for a sequence already known to
/// have that supremum finite. The maximizing prefix ends at the last index
/// with `gamma_j >= 1`, or at the first index when no weight reaches one.
/// `Table` sequences use the listed values only (callers reach here exactly
/// when the continuation tail stays at or below one).
fn sup_prefix_product(gamma: &WeightSequenceSpec) -> f64 {
    let best_ln = match gamma {
        // Only reached with c <= 1, where the first prefix is largest.
        WeightSequenceSpec::Constant { c } => c.ln(),
        WeightSequenceSpec::PolynomialDecay { c, beta } => {
            if *c < 1.0 || *beta == 0.0 {
                c.ln()
            } else {
                let m = c.powf(1.0 / beta).floor().max(1.0) as u64;
                m as f64 * c.ln() - beta * ln_factorial(m)
            }
        }
        WeightSequenceSpec::Geometric { c, q } => {
            if *q == 1.0 || c * q <= 1.0 {
                // gamma_1 = c q; the products never rise above it.
                (c * q).ln()
            } else {
                let m = (c.ln() / -q.ln()).floor().max(1.0) as u64;
                m as f64 * c.ln() + q.ln() * (m as f64) * (m as f64 + 1.0) / 2.0
            }
        }
        // Only reached with c = 1.
        WeightSequenceSpec::RootGeometric { c } => c.ln(),
        WeightSequenceSpec::ShiftedPolynomial { c, beta } => {
            // All weights exceed one: the supremum is the full infinite
            // product, summed directly with an integral tail estimate.
            let cutoff = 2_000_000u64;
            let head =
                neumaier_sum((1..=cutoff).map(|j| (1.0 + c * (j as f64).powf(-beta)).ln()));
            head + shifted_tail(*c, *beta, cutoff as f64, f64::INFINITY)
        }
        WeightSequenceSpec::Table { values, .. } => {
            let mut best = f64::NEG_INFINITY;
            let mut running = 0.0;
            for v in values {
                running += v.ln();
                best = best.max(running);
            }
            best
        }
    };
    best_ln.exp()
}

/// Classifies a `gamma` sequence per the three tractability conditions.
///
/// Built-in parametric families are decided in closed form. `Table`
/// sequences get a trend verdict over the dyadic grid, flagged heuristic:
/// a ratio is deemed convergent when its last three dyadic values vary by
/// less than 1%, and `S(s)/s` is deemed vanishing below 0.01.
pub fn classify_finite(gamma: &WeightSequenceSpec) -> Result<TractabilityVerdict> {
    gamma.validate_gamma()?;
    let diagnostic = partial_sum_diagnostic(gamma, &dyadic_grid())?;

    let closed_form: Option<(bool, bool, bool, Option<f64>)> = match gamma {
        WeightSequenceSpec::Constant { c } => {
            if *c <= 1.0 {
                Some((true, true, true, Some(0.0)))
            } else {
                Some((false, false, false, None))
            }
        }
        WeightSequenceSpec::PolynomialDecay { c, beta } => {
            if *beta == 0.0 {
                if *c <= 1.0 {
                    Some((true, true, true, Some(0.0)))
                } else {
                    Some((false, false, false, None))
                }
            } else {
                // Only finitely many weights exceed one.
                Some((true, true, true, Some(0.0)))
            }
        }
        WeightSequenceSpec::Geometric { c, q } => {
            if *q == 1.0 {
                if *c <= 1.0 {
                    Some((true, true, true, Some(0.0)))
                } else {
                    Some((false, false, false, None))
                }
            } else {
                Some((true, true, true, Some(0.0)))
            }
        }
        WeightSequenceSpec::RootGeometric { c } => {
            if *c == 1.0 {
                Some((true, true, true, Some(0.0)))
            } else {
                // S(s) = log(c) H_s grows like log(c) log(s): polynomial
                // with exponent certificate A = log c, never strong.
                Some((false, true, true, Some(c.ln())))
            }
        }
        WeightSequenceSpec::ShiftedPolynomial { c, beta } => {
            if *beta > 1.0 {
                Some((true, true, true, Some(0.0)))
            } else if *beta == 1.0 {
                Some((false, true, true, Some(*c)))
            } else {
                Some((false, false, true, None))
            }
        }
        WeightSequenceSpec::Table { .. } => None,
    };

    let verdict = match closed_form {
        Some((strong, polynomial, weak, log_ratio)) => {
            let sup = if strong { Some(sup_prefix_product(gamma)) } else { None };
            TractabilityVerdict {
                strong_polynomial: strong,
                polynomial,
                weak,
                certificate: Certificate {
                    sup_prefix_product: sup,
                    log_ratio_limsup: if polynomial { log_ratio } else { None },
                    diagnostic,
                    heuristic: false,
                },
            }
        }
        None => classify_table_trend(gamma, diagnostic),
    };
    debug_assert!(
        (!verdict.strong_polynomial || verdict.polynomial)
            && (!verdict.polynomial || verdict.weak),
        "tractability hierarchy violated"
    );
    Ok(verdict)
}

fn classify_table_trend(
    gamma: &WeightSequenceSpec,
    diagnostic: Vec<DiagnosticRow>,
) -> TractabilityVerdict {
    let converged = |values: Vec<f64>| -> bool {
        let tail = &values[values.len() - 3..];
        let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) <= TREND_SPREAD * tail[2].abs().max(1.0)
    };
    let strong = converged(diagnostic.iter().map(|r| r.partial_sum).collect());
    let polynomial = strong || converged(diagnostic.iter().map(|r| r.per_log_s).collect());
    let weak =
        polynomial || diagnostic.last().map(|r| r.per_s < WEAK_RATIO_CUTOFF).unwrap_or(false);

    let sup = if strong { Some(sup_prefix_product(gamma)) } else { None };
    let log_ratio = if polynomial {
        if strong {
            Some(0.0)
        } else {
            diagnostic.last().map(|r| r.per_log_s)
        }
    } else {
        None
    };
    TractabilityVerdict {
        strong_polynomial: strong,
        polynomial,
        weak,
        certificate: Certificate {
            sup_prefix_product: sup,
            log_ratio_limsup: log_ratio,
            diagnostic,
            heuristic: true,
        },
    }
}

/// The analytic family is tractable in all three senses for every choice of
/// exponent sequences; the certificate carries `C = omega^(min_j a_j)`.
pub fn classify_analytic(space: &AnalyticSpace) -> TractabilityVerdict {
    let (a_min, _) = space.min_a();
    TractabilityVerdict {
        strong_polynomial: true,
        polynomial: true,
        weak: true,
        certificate: Certificate {
            sup_prefix_product: Some(space.omega().powf(a_min)),
            log_ratio_limsup: Some(0.0),
            diagnostic: Vec::new(),
            heuristic: false,
        },
    }
}

/// Least-squares slope of `log n_mc(eps)` against `log eps^-1`. The grid
/// must hold at least four values in (0,1) spanning two decades.
pub fn epsilon_exponent_fit(space: &HermiteSpace, eps_grid: &[f64]) -> Result<f64> {
    if eps_grid.len() < 4 {
        return Err(Error::param("eps_grid", "need at least 4 epsilon values"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &eps in eps_grid {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param("eps_grid", format!("epsilon {eps} outside (0,1)")));
        }
        lo = lo.min(eps);
        hi = hi.max(eps);
    }
    if hi / lo < 100.0 {
        return Err(Error::param("eps_grid", "grid must span at least two decades"));
    }

    let points: Vec<(f64, f64)> = eps_grid
        .iter()
        .map(|&eps| Ok(((1.0 / eps).ln(), ln_n_mc(space, eps)?)))
        .collect::<Result<_>>()?;
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let covariance: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let variance: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    Ok(covariance / variance)
}

/// One point of the exponential-convergence weak-tractability diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcWtRow {
    pub eps: f64,
    pub s: usize,
    pub n_mc: u64,
    /// `log n_mc / (s + log eps^-1)`.
    pub ratio: f64,
}

/// Evaluates `log n_mc / (s + log eps^-1)` along a path of `(eps, s)`
/// points, instantiating the space family at each dimension.
///
/// Along `eps -> 0` with `s` fixed the ratio tends to 2, not 0, which is
/// how the node-count formula rules out exponential-convergence weak
/// tractability for plain Monte Carlo.
pub fn ec_wt_diagnostic(family: &SpaceFamily, path: &[(f64, usize)]) -> Result<Vec<EcWtRow>> {
    if path.is_empty() {
        return Err(Error::param("path", "need at least one (eps, s) point"));
    }
    path.iter()
        .map(|&(eps, s)| {
            let space = family.instantiate(s)?;
            let n = n_mc(&space, eps)?;
            let ln_n = ln_n_mc(&space, eps)?;
            Ok(EcWtRow {
                eps,
                s,
                n_mc: n,
                ratio: ln_n / (s as f64 + (1.0 / eps).ln()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteSmoothnessSpace, TailRule};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn finite(alpha: f64, gammas: &[f64]) -> HermiteSpace {
        HermiteSpace::FiniteSmoothness(
            FiniteSmoothnessSpace::new(
                gammas.len(),
                alpha,
                WeightSequenceSpec::table(gammas.to_vec()).unwrap(),
            )
            .unwrap(),
        )
    }

    fn analytic_space(omega: f64, a: &[f64], b: &[f64]) -> AnalyticSpace {
        AnalyticSpace::new(
            a.len(),
            omega,
            WeightSequenceSpec::table(a.to_vec()).unwrap(),
            WeightSequenceSpec::table(b.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn n_mc_frozen_examples() {
        assert_eq!(n_mc(&finite(2.0, &[0.9, 0.5]), 0.1).unwrap(), 90);
        assert_eq!(n_mc(&finite(2.0, &[1.0, 1.0]), 0.5).unwrap(), 4);
        let sp = HermiteSpace::Analytic(analytic_space(0.5, &[1.0, 2.0], &[1.0, 3.0]));
        assert_eq!(n_mc(&sp, 0.1).unwrap(), 50);
        assert!(n_mc(&sp, 0.0).is_err());
        assert!(n_mc(&sp, 1.0).is_err());
    }

    #[test]
    fn n_mc_is_the_linear_scan_minimum() {
        use crate::mc::theoretical_error;
        let spaces = [
            finite(2.0, &[0.9, 0.5]),
            finite(3.0, &[2.0, 1.5, 0.5]),
            HermiteSpace::Analytic(analytic_space(0.5, &[2.0, 1.0], &[1.0, 3.0])),
        ];
        for space in &spaces {
            for &eps in &[0.9, 0.5, 0.2, 0.11, 0.07] {
                let formula = n_mc(space, eps).unwrap();
                let mut scan = 1u64;
                while theoretical_error(space, scan) > eps {
                    scan += 1;
                }
                assert_eq!(formula, scan, "eps={eps} space={space}");
            }
        }
    }

    #[test]
    fn n_mc_monotone_in_eps() {
        let sp = finite(2.0, &[0.9, 0.5]);
        let mut prev = u64::MAX;
        for i in 1..100 {
            let eps = i as f64 / 100.0;
            let n = n_mc(&sp, eps).unwrap();
            assert!(n <= prev, "n_mc must not increase with eps");
            prev = n;
        }
    }

    #[test]
    fn classify_constant_families() {
        let unit = classify_finite(&WeightSequenceSpec::constant(1.0).unwrap()).unwrap();
        assert!(unit.strong_polynomial && unit.polynomial && unit.weak);
        assert_eq!(unit.certificate.sup_prefix_product, Some(1.0));
        assert!(!unit.certificate.heuristic);
        for row in &unit.certificate.diagnostic {
            assert_eq!(row.partial_sum, 0.0);
        }

        let two = classify_finite(&WeightSequenceSpec::constant(2.0).unwrap()).unwrap();
        assert!(!two.strong_polynomial && !two.polynomial && !two.weak);
        assert_eq!(two.certificate.sup_prefix_product, None);
        let last = two.certificate.diagnostic.last().unwrap();
        assert_relative_eq!(last.per_s, std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn classify_root_geometric_two() {
        let v = classify_finite(&WeightSequenceSpec::root_geometric(2.0).unwrap()).unwrap();
        assert!(!v.strong_polynomial && v.polynomial && v.weak);
        assert_relative_eq!(
            v.certificate.log_ratio_limsup.unwrap(),
            std::f64::consts::LN_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn classify_one_plus_inverse_square() {
        let v = classify_finite(&WeightSequenceSpec::shifted_polynomial(1.0, 2.0).unwrap())
            .unwrap();
        assert!(v.strong_polynomial && v.polynomial && v.weak);
        // Oracle: direct comparison sum of log(1 + 1/j^2) converges; the
        // certificate must match it.
        let direct: f64 = (1..2_000_000u64)
            .map(|j| (1.0 + 1.0 / (j as f64 * j as f64)).ln())
            .sum();
        assert_abs_diff_eq!(
            v.certificate.sup_prefix_product.unwrap().ln(),
            direct,
            epsilon = 1e-5
        );
    }

    #[test]
    fn classify_polynomial_decay_below_one() {
        let v = classify_finite(&WeightSequenceSpec::polynomial_decay(0.9, 1.5).unwrap())
            .unwrap();
        assert!(v.strong_polynomial && v.polynomial && v.weak);
        // All weights below one: the best prefix is the first weight.
        assert_relative_eq!(v.certificate.sup_prefix_product.unwrap(), 0.9, max_relative = 1e-12);
    }

    #[test]
    fn classify_polynomial_decay_above_one_start() {
        // gamma_j = 4 j^(-2): weights 4, 1, 4/9, ... with C = 4 * 1 = 4.
        let v = classify_finite(&WeightSequenceSpec::polynomial_decay(4.0, 2.0).unwrap())
            .unwrap();
        assert!(v.strong_polynomial);
        assert_relative_eq!(v.certificate.sup_prefix_product.unwrap(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn classify_geometric_below_one() {
        let v = classify_finite(&WeightSequenceSpec::geometric(1.0, 0.5).unwrap()).unwrap();
        assert!(v.strong_polynomial);
        // gamma_1 = 0.5 is the largest prefix product.
        assert_relative_eq!(v.certificate.sup_prefix_product.unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn classify_table_is_heuristic() {
        let gamma = WeightSequenceSpec::Table {
            values: vec![1.5, 1.2, 1.0, 0.8],
            tail: TailRule::ConstantLast,
        };
        let v = classify_finite(&gamma).unwrap();
        assert!(v.certificate.heuristic);
        assert!(v.strong_polynomial && v.polynomial && v.weak);
        // C = 1.5 * 1.2 * 1.0 = 1.8, attained before the sub-one tail.
        assert_relative_eq!(v.certificate.sup_prefix_product.unwrap(), 1.8, max_relative = 1e-12);

        let growing = WeightSequenceSpec::Table {
            values: vec![2.0],
            tail: TailRule::ConstantLast,
        };
        let v = classify_finite(&growing).unwrap();
        assert!(v.certificate.heuristic);
        assert!(!v.strong_polynomial && !v.polynomial && !v.weak);
    }

    #[test]
    fn classifier_rejects_increasing_gamma() {
        assert!(classify_finite(&WeightSequenceSpec::root_geometric(0.5).unwrap()).is_err());
    }

    #[test]
    fn partial_sums_frozen_values() {
        let two = WeightSequenceSpec::constant(2.0).unwrap();
        let rows = partial_sum_diagnostic(&two, &[1024]).unwrap();
        assert_relative_eq!(rows[0].partial_sum, 1024.0 * std::f64::consts::LN_2, max_relative = 1e-13);
        assert_relative_eq!(rows[0].per_s, std::f64::consts::LN_2, max_relative = 1e-13);

        let root_two = WeightSequenceSpec::root_geometric(2.0).unwrap();
        let rows = partial_sum_diagnostic(&root_two, &[1_000_000]).unwrap();
        let expected = std::f64::consts::LN_2;
        assert!(
            (rows[0].per_log_s - expected).abs() / expected < 0.05,
            "S/log s = {} should be within 5% of log 2",
            rows[0].per_log_s
        );

        let unit = WeightSequenceSpec::constant(1.0).unwrap();
        for row in partial_sum_diagnostic(&unit, &[2, 4, 8]).unwrap() {
            assert_eq!((row.partial_sum, row.per_log_s, row.per_s), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn partial_sum_closed_forms_match_direct_summation() {
        let specs = [
            WeightSequenceSpec::polynomial_decay(4.0, 0.7).unwrap(),
            WeightSequenceSpec::geometric(8.0, 0.8).unwrap(),
            WeightSequenceSpec::root_geometric(3.0).unwrap(),
            WeightSequenceSpec::shifted_polynomial(2.0, 1.0).unwrap(),
        ];
        for spec in &specs {
            for s in [5u64, 100, 4097] {
                let direct: f64 = (1..=s).map(|j| spec.value(j as usize).ln().max(0.0)).sum();
                let fast = partial_sum_max_log(spec, s);
                assert_abs_diff_eq!(fast, direct, epsilon = 1e-8 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn diagnostic_grid_validation() {
        let gamma = WeightSequenceSpec::constant(1.0).unwrap();
        assert!(partial_sum_diagnostic(&gamma, &[]).is_err());
        assert!(partial_sum_diagnostic(&gamma, &[1, 2]).is_err());
        assert!(partial_sum_diagnostic(&gamma, &[4, 4]).is_err());
        assert!(partial_sum_diagnostic(&gamma, &[8, 4]).is_err());
    }

    #[test]
    fn analytic_always_fully_tractable() {
        for (omega, a, b) in [
            (0.9, vec![0.001, 0.001], vec![1.0, 1.0]),
            (0.5, vec![2.0, 1.0], vec![1.0, 3.0]),
        ] {
            let sp = analytic_space(omega, &a, &b);
            let v = classify_analytic(&sp);
            assert!(v.strong_polynomial && v.polynomial && v.weak);
            assert!(!v.certificate.heuristic);
        }
        let v = classify_analytic(&analytic_space(0.5, &[2.0, 1.0], &[1.0, 3.0]));
        assert_relative_eq!(v.certificate.sup_prefix_product.unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn epsilon_exponent_is_two() {
        let grid = [1e-1, 1e-2, 1e-3, 1e-4];
        for space in [
            finite(2.0, &[1.0, 1.0, 1.0]),
            finite(2.0, &[0.9, 0.5]),
            HermiteSpace::Analytic(analytic_space(0.5, &[1.0, 1.0], &[1.0, 1.0])),
        ] {
            let slope = epsilon_exponent_fit(&space, &grid).unwrap();
            assert!((slope - 2.0).abs() <= 0.01, "slope {slope} for {space}");
        }
    }

    #[test]
    fn epsilon_exponent_grid_validation() {
        let sp = finite(2.0, &[1.0]);
        assert!(epsilon_exponent_fit(&sp, &[0.1, 0.01]).is_err());
        assert!(epsilon_exponent_fit(&sp, &[0.1, 0.1, 0.1, 0.1]).is_err());
        assert!(epsilon_exponent_fit(&sp, &[0.5, 0.4, 0.3, 0.2]).is_err());
    }

    #[test]
    fn ec_wt_single_point_direct_arithmetic() {
        let family = SpaceFamily::FiniteSmoothness {
            alpha: 2.0,
            gamma: WeightSequenceSpec::constant(1.0).unwrap(),
        };
        let rows = ec_wt_diagnostic(&family, &[(0.1, 1)]).unwrap();
        assert_eq!(rows[0].n_mc, 100);
        let expected = 100f64.ln() / (1.0 + 10f64.ln());
        assert_relative_eq!(rows[0].ratio, expected, max_relative = 1e-14);
    }

    #[test]
    fn ec_wt_ratios_increase_toward_two_in_eps() {
        let family = SpaceFamily::Analytic {
            omega: 0.5,
            a: WeightSequenceSpec::constant(1.0).unwrap(),
            b: WeightSequenceSpec::constant(1.0).unwrap(),
        };
        let path: Vec<(f64, usize)> = (2..=8).map(|m| (10f64.powi(-m), 5)).collect();
        let rows = ec_wt_diagnostic(&family, &path).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].ratio > pair[0].ratio, "ratios must increase along eps -> 0");
        }
        let last = rows.last().unwrap();
        assert!(last.ratio < 2.0);
        // Closed-form cross-check: log(ceil(0.5 eps^-2)) / (5 + log eps^-1).
        let expected = (0.5f64 * 1e16).ceil().ln() / (5.0 + 1e8f64.ln());
        assert_relative_eq!(last.ratio, expected, max_relative = 1e-12);
    }

    #[test]
    fn ec_wt_ratio_vanishes_in_s() {
        let family = SpaceFamily::Analytic {
            omega: 0.5,
            a: WeightSequenceSpec::constant(1.0).unwrap(),
            b: WeightSequenceSpec::constant(1.0).unwrap(),
        };
        let rows = ec_wt_diagnostic(&family, &[(0.1, 10), (0.1, 1000), (0.1, 1_000_000)]).unwrap();
        assert!(rows[0].ratio > rows[1].ratio && rows[1].ratio > rows[2].ratio);
        assert!(rows[2].ratio < 1e-4);
    }
}
