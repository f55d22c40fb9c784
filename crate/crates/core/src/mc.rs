//! The Monte Carlo estimator, its exact randomized error, and seeded
//! replication studies that verify the closed form empirically.
//!
//! Replications are independent: replication `i` owns the stream derived
//! from `(master_seed, i)`, and the per-replication results are collected
//! into a vector indexed by `i` before a sequential compensated reduction.
//! Any parallel schedule therefore produces bit-identical reports.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{worst_case_function, CoefficientFunction};
use crate::multi_index::MultiIndex;
use crate::numeric::{format_sig12, neumaier_sum};
use crate::rng::{stream_seed, SplitMix64};
use crate::space::HermiteSpace;

/// `n` points in `R^s`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Iterates points as coordinate slices.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Draws `n` i.i.d. standard normal points in `R^s` from the stream with the
/// given seed. Output is a pure function of `(dim, n, stream_seed)`;
/// variates fill each point's coordinates in order.
pub fn sample_gaussian(dim: usize, n: usize, stream_seed: u64) -> PointSet {
    assert!(dim >= 1, "dimension must be >= 1");
    assert!(n >= 1, "sample count must be >= 1");
    let mut rng = SplitMix64::new(stream_seed);
    let data = (0..dim * n).map(|_| rng.next_standard_normal()).collect();
    PointSet { dim, data }
}

/// Equal-weight Monte Carlo estimate together with a non-finite diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Arithmetic mean of `f` over the nodes (compensated summation).
    pub value: f64,
    /// Set when `f` produced a non-finite value at some node; `value` then
    /// carries the propagated non-finite result.
    pub non_finite: bool,
}

/// The plain Monte Carlo rule: the mean of `f` over the given nodes.
///
/// Panics on an empty node set.
pub fn mc_estimate<F: Fn(&[f64]) -> f64>(f: F, nodes: &PointSet) -> McEstimate {
    assert!(!nodes.is_empty(), "Monte Carlo estimate needs at least one node");
    let mut non_finite = false;
    let sum = neumaier_sum(nodes.rows().map(|x| {
        let value = f(x);
        non_finite |= !value.is_finite();
        value
    }));
    McEstimate {
        value: sum / nodes.len() as f64,
        non_finite,
    }
}

/// Exact Gaussian integral of a coefficient function: the coefficient at
/// the zero index.
pub fn true_integral(f: &CoefficientFunction) -> f64 {
    let zero = MultiIndex::zero(f.dim()).expect("dim >= 1 by construction");
    f.coefficient(&zero)
}

/// The exact randomized error of the `n`-node Monte Carlo rule over the
/// unit ball of the space: `sqrt(max_{k != 0} r(k) / n)`.
pub fn theoretical_error(space: &HermiteSpace, n: u64) -> f64 {
    assert!(n >= 1, "node count must be >= 1");
    (space.max_r_nonzero().value / n as f64).sqrt()
}

/// Outcome of one seeded replication study at fixed `(space, n)`.
///
/// The serialized form is a pure function of
/// `(space, n, s, replications, master_seed)`; the wall-clock time is kept
/// on the struct for logging but never serialized, so repeated runs emit
/// identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Human-readable space description.
    pub space: String,
    /// Nodes per estimate.
    pub n: u64,
    /// Dimension.
    pub s: usize,
    /// Number of replications.
    pub replications: u64,
    /// Seed all replication streams derive from.
    pub master_seed: u64,
    /// Exact error `sqrt(max_r / n)`.
    pub theoretical_error: f64,
    /// Root mean squared error across replications.
    pub empirical_rmse: f64,
    /// Standard error of the mean squared error estimate.
    pub empirical_stderr: f64,
    /// Wall-clock duration of the study; excluded from serialization.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl ErrorReport {
    /// Mean squared error across replications (`empirical_rmse` squared).
    pub fn empirical_mse(&self) -> f64 {
        self.empirical_rmse * self.empirical_rmse
    }

    pub fn csv_header() -> &'static str {
        "space,n,s,replications,master_seed,theoretical_error,empirical_rmse,empirical_stderr"
    }

    pub fn csv_row(&self) -> String {
        // The space description contains commas, so it is quoted.
        format!(
            "\"{}\",{},{},{},{},{},{},{}",
            self.space,
            self.n,
            self.s,
            self.replications,
            self.master_seed,
            format_sig12(self.theoretical_error),
            format_sig12(self.empirical_rmse),
            format_sig12(self.empirical_stderr),
        )
    }
}

/// Runs `replications` independent Monte Carlo estimates of the worst-case
/// integrand with `n` nodes each and compares the replicated mean squared
/// error against the closed form.
///
/// Replication `i` draws its nodes from `stream_seed(master_seed, i)`. The
/// squared errors are aggregated in index order, so the report does not
/// depend on the execution schedule.
pub fn empirical_randomized_error(
    space: &HermiteSpace,
    n: u64,
    replications: u64,
    master_seed: u64,
) -> Result<ErrorReport> {
    if n < 1 {
        return Err(Error::param("n", "node count must be >= 1"));
    }
    if replications < 2 {
        return Err(Error::param(
            "replications",
            "standard error needs at least 2 replications",
        ));
    }
    let start = Instant::now();
    let s = space.dim();
    let f_star = worst_case_function(space);
    let exact = true_integral(&f_star);
    let evaluator = f_star.synthesize();

    let squared_errors: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let nodes = sample_gaussian(s, n as usize, stream_seed(master_seed, i));
            let estimate = mc_estimate(|x| evaluator.eval(x), &nodes);
            let difference = exact - estimate.value;
            difference * difference
        })
        .collect();

    if squared_errors.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("replication squared error"));
    }

    let r = replications as f64;
    let mean = neumaier_sum(squared_errors.iter().copied()) / r;
    let variance =
        neumaier_sum(squared_errors.iter().map(|&d| (d - mean) * (d - mean))) / (r - 1.0);

    Ok(ErrorReport {
        space: space.to_string(),
        n,
        s,
        replications,
        master_seed,
        theoretical_error: theoretical_error(space, n),
        empirical_rmse: mean.sqrt(),
        empirical_stderr: (variance / r).sqrt(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteSmoothnessSpace, HermiteSpace, WeightSequenceSpec};
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

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_gaussian(2, 1000, 77);
        let b = sample_gaussian(2, 1000, 77);
        assert_eq!(a, b);
        let c = sample_gaussian(2, 1000, 78);
        assert_ne!(a, c);
        assert_eq!(a.len(), 1000);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn single_draw_is_finite() {
        let p = sample_gaussian(1, 1, 5);
        assert_eq!(p.len(), 1);
        assert!(p.data()[0].is_finite());
    }

    #[test]
    fn sample_moments_match_clt_bands() {
        let n = 100_000usize;
        let points = sample_gaussian(2, n, 42);
        for coord in 0..2 {
            let values: Vec<f64> = points.rows().map(|row| row[coord]).collect();
            let mean = neumaier_sum(values.iter().copied()) / n as f64;
            let var =
                neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n as f64 - 1.0);
            assert!(
                mean.abs() <= 4.0 / (n as f64).sqrt(),
                "coordinate {coord} mean {mean} outside CLT band"
            );
            assert!((var - 1.0).abs() <= 0.05, "coordinate {coord} variance {var}");
        }
    }

    #[test]
    fn estimator_trivial_cases() {
        let nodes = sample_gaussian(1, 50, 3);
        let constant = mc_estimate(|_| 2.5, &nodes);
        assert_eq!(constant.value, 2.5);
        assert!(!constant.non_finite);

        // H_1 over the nodes {-1, 1} averages to zero.
        let pair = PointSet {
            dim: 1,
            data: vec![-1.0, 1.0],
        };
        assert_eq!(mc_estimate(|x| x[0], &pair).value, 0.0);
    }

    #[test]
    fn estimator_flags_non_finite() {
        let nodes = sample_gaussian(1, 4, 3);
        let e = mc_estimate(|x| 1.0 / (x[0] - x[0]), &nodes);
        assert!(e.non_finite);
        assert!(!e.value.is_finite());
    }

    #[test]
    fn true_integral_reads_zero_coefficient() {
        let f = CoefficientFunction::new(
            2,
            [
                (MultiIndex::zero(2).unwrap(), 3.2),
                (MultiIndex::from_dense(&[1, 0]).unwrap(), 7.0),
            ],
        )
        .unwrap();
        assert_eq!(true_integral(&f), 3.2);
        assert_eq!(true_integral(&worst_case_function(&finite(2.0, &[0.9, 0.5]))), 0.0);
        assert_eq!(true_integral(&CoefficientFunction::empty(3).unwrap()), 0.0);
    }

    #[test]
    fn theoretical_error_closed_forms() {
        assert_relative_eq!(
            theoretical_error(&finite(2.0, &[0.9, 0.5]), 100),
            0.09486832980505139,
            max_relative = 1e-14
        );
        let unweighted = finite(2.0, &[1.0, 1.0, 1.0, 1.0]);
        for n in [1u64, 7, 100] {
            assert_relative_eq!(
                theoretical_error(&unweighted, n),
                1.0 / (n as f64).sqrt(),
                max_relative = 1e-15
            );
        }
        let analytic = crate::space::AnalyticSpace::new(
            2,
            0.5,
            WeightSequenceSpec::table(vec![1.0, 3.0]).unwrap(),
            WeightSequenceSpec::table(vec![2.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(
            theoretical_error(&HermiteSpace::Analytic(analytic), 4),
            0.3535533905932738,
            max_relative = 1e-14
        );
    }

    #[test]
    fn replication_study_matches_theory_within_bands() {
        // Unweighted s=1: the worst-case integrand is H_1 with variance 1,
        // so the replicated MSE estimates 1/n.
        let space = finite(2.0, &[1.0]);
        let report = empirical_randomized_error(&space, 100, 10_000, 42).unwrap();
        let predicted = 0.01;
        assert!(
            (report.empirical_mse() - predicted).abs() <= 3.0 * report.empirical_stderr,
            "MSE {} vs predicted {predicted} (stderr {})",
            report.empirical_mse(),
            report.empirical_stderr
        );
        assert_abs_diff_eq!(report.theoretical_error, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn replication_study_is_reproducible() {
        let space = finite(2.0, &[0.9, 0.5]);
        let a = empirical_randomized_error(&space, 50, 200, 7).unwrap();
        let b = empirical_randomized_error(&space, 50, 200, 7).unwrap();
        assert_eq!(a.empirical_rmse.to_bits(), b.empirical_rmse.to_bits());
        assert_eq!(a.empirical_stderr.to_bits(), b.empirical_stderr.to_bits());
        let c = empirical_randomized_error(&space, 50, 200, 8).unwrap();
        assert_ne!(a.empirical_rmse.to_bits(), c.empirical_rmse.to_bits());
    }

    #[test]
    fn replication_study_rejects_degenerate_inputs() {
        let space = finite(2.0, &[1.0]);
        assert!(empirical_randomized_error(&space, 10, 1, 42).is_err());
        assert!(empirical_randomized_error(&space, 0, 10, 42).is_err());
    }

    #[test]
    fn report_serialization_omits_wall_time() {
        let space = finite(2.0, &[1.0]);
        let report = empirical_randomized_error(&space, 10, 5, 1).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("wall_time"));
        assert!(json.contains("theoretical_error"));
        let row = report.csv_row();
        assert!(row.starts_with("\"finite_smoothness"));
        // The seven numeric fields follow the closing quote.
        let numeric_part = row.rsplit('"').next().unwrap();
        assert_eq!(numeric_part.split(',').skip(1).count(), 7);
    }
}
