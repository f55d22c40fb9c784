//! Cross-module invariants: identities between the coefficient-space and
//! point-space views of a function, positive semidefiniteness of the
//! kernel, and the statistical behaviour of the estimator.

use proptest::prelude::*;

use hermite_mc::{
    hermite, hermite_coefficient, kernel_eval, mc, mc_estimate, sample_gaussian,
    true_integral, worst_case_function, CoefficientFunction, FiniteSmoothnessSpace, HermiteSpace,
    MultiIndex, WeightSequenceSpec,
};

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

fn analytic(omega: f64, a: &[f64], b: &[f64]) -> HermiteSpace {
    HermiteSpace::Analytic(
        hermite_mc::AnalyticSpace::new(
            a.len(),
            omega,
            WeightSequenceSpec::table(a.to_vec()).unwrap(),
            WeightSequenceSpec::table(b.to_vec()).unwrap(),
        )
        .unwrap(),
    )
}

/// Coefficient functions over a fixed small index set in dimension 2, with
/// bounded coefficients.
fn coefficient_function_strategy() -> impl Strategy<Value = CoefficientFunction> {
    let indices = [
        [0u32, 0],
        [1, 0],
        [0, 1],
        [2, 0],
        [1, 1],
        [0, 2],
        [3, 1],
        [2, 2],
    ];
    proptest::collection::vec(-3.0f64..3.0, indices.len()).prop_map(move |values| {
        let entries = indices
            .iter()
            .zip(values)
            .map(|(k, v)| (MultiIndex::from_dense(k).unwrap(), v));
        CoefficientFunction::new(2, entries).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cauchy_schwarz(f in coefficient_function_strategy(), g in coefficient_function_strategy()) {
        let space = finite(2.0, &[0.9, 0.5]);
        let fg = f.inner_product(&space, &g);
        let ff = f.inner_product(&space, &f);
        let gg = g.inner_product(&space, &g);
        prop_assert!(fg * fg <= ff * gg * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn parseval_at_finite_support(f in coefficient_function_strategy()) {
        // sum of squared coefficients equals the quadrature value of
        // integral f^2 phi once the rule is exact for f^2.
        let coefficient_sum: f64 = f.entries().map(|(_, v)| v * v).sum();
        let synthesized = f.synthesize();
        let quadrature = hermite_coefficient(
            |x| synthesized.eval(x) * synthesized.eval(x),
            &MultiIndex::zero(2).unwrap(),
            5, // per-coordinate degree of f^2 is at most 6 <= 2*5 - 1
        )
        .unwrap();
        prop_assert!(
            (coefficient_sum - quadrature).abs() <= 1e-10 * coefficient_sum.max(1.0),
            "coefficients {coefficient_sum} vs quadrature {quadrature}"
        );
    }

    #[test]
    fn variance_bound_of_unit_ball_members(f in coefficient_function_strategy()) {
        // integral f^2 - (integral f)^2 <= ||f||^2 max_(k != 0) r(k),
        // with the left side computed by quadrature, not from coefficients.
        let space = finite(2.0, &[0.9, 0.5]);
        let synthesized = f.synthesize();
        let second_moment = hermite_coefficient(
            |x| synthesized.eval(x) * synthesized.eval(x),
            &MultiIndex::zero(2).unwrap(),
            5,
        )
        .unwrap();
        let mean = true_integral(&f);
        let variance = second_moment - mean * mean;
        let bound = f.inner_product(&space, &f) * space.max_r_nonzero().value;
        prop_assert!(variance <= bound + 1e-9, "variance {variance} exceeds bound {bound}");
    }

    #[test]
    fn synthesis_matches_manual_expansion(f in coefficient_function_strategy(),
                                          x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        let point = [x0, x1];
        let manual: f64 = f
            .entries()
            .map(|(k, v)| v * hermite::eval_multi(k, &point))
            .sum();
        let synthesized = f.synthesize().eval(&point);
        prop_assert!((manual - synthesized).abs() <= 1e-10 * manual.abs().max(1.0));
    }

    #[test]
    fn coefficient_function_serde_roundtrip(f in coefficient_function_strategy()) {
        let json = serde_json::to_string(&f).unwrap();
        let back: CoefficientFunction = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn kernel_is_symmetric(x0 in -2.0f64..2.0, x1 in -2.0f64..2.0,
                           y0 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
        let space = analytic(0.6, &[1.0, 2.0], &[1.0, 2.0]);
        let a = kernel_eval(&space, &[x0, x1], &[y0, y1], 1e-9).unwrap().value;
        let b = kernel_eval(&space, &[y0, y1], &[x0, x1], 1e-9).unwrap().value;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn multi_index_order_matches_dense_reference(a in proptest::collection::vec(0u32..4, 4),
                                                 b in proptest::collection::vec(0u32..4, 4)) {
        // Reference comparator on dense vectors: total degree first, then
        // the larger exponent at the first differing coordinate sorts first.
        let reference = {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| {
                for (ka, kb) in a.iter().zip(&b) {
                    if ka != kb {
                        return kb.cmp(ka);
                    }
                }
                std::cmp::Ordering::Equal
            })
        };
        let ka = MultiIndex::from_dense(&a).unwrap();
        let kb = MultiIndex::from_dense(&b).unwrap();
        prop_assert_eq!(ka.cmp(&kb), reference, "{} vs {}", ka, kb);
        prop_assert_eq!(kb.cmp(&ka), reference.reverse());
    }
}

/// Reproducing identity at the truncated level: for coefficients supported
/// inside the grid, the inner product against the kernel section
/// `{k: r(k) H_k(x)}` recovers the point value.
#[test]
fn reproducing_property_on_truncated_grid() {
    let space = finite(2.0, &[0.9, 0.5]);
    let tol = 1e-9;
    let f = CoefficientFunction::new(
        2,
        [
            (MultiIndex::from_dense(&[0, 0]).unwrap(), 0.5),
            (MultiIndex::from_dense(&[2, 1]).unwrap(), -1.25),
            (MultiIndex::from_dense(&[1, 3]).unwrap(), 2.0),
        ],
    )
    .unwrap();
    let synthesized = f.synthesize();

    for point in [[0.0, 0.0], [1.2, -0.8], [2.5, 2.5]] {
        // Kernel section over the grid {0..5}^2 covering the support of f.
        let mut section = Vec::new();
        for k0 in 0..=5u32 {
            for k1 in 0..=5u32 {
                let k = MultiIndex::from_dense(&[k0, k1]).unwrap();
                let value = space.r_value(&k) * hermite::eval_multi(&k, &point);
                section.push((k, value));
            }
        }
        let section = CoefficientFunction::new(2, section).unwrap();
        let reproduced = f.inner_product(&space, &section);
        let direct = synthesized.eval(&point);
        assert!(
            (reproduced - direct).abs() <= 10.0 * tol,
            "reproducing identity off at {point:?}: {reproduced} vs {direct}"
        );
    }
}

/// Jacobi eigenvalue iteration for small symmetric matrices; test-local
/// oracle for the Gram positive semidefiniteness check.
#[allow(clippy::needless_range_loop)]
fn min_eigenvalue_jacobi(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

#[test]
fn gram_matrices_are_positive_semidefinite() {
    let spaces = [
        analytic(0.8, &[1.0, 1.0], &[1.0, 2.0]),
        finite(3.0, &[0.9, 0.5]),
    ];
    let points: Vec<[f64; 2]> = vec![
        [0.0, 0.0],
        [0.5, -0.5],
        [1.0, 1.0],
        [-1.5, 0.3],
        [2.0, -2.0],
        [0.1, 1.9],
        [-0.7, -1.1],
        [1.3, 0.8],
    ];
    for space in &spaces {
        let n = points.len();
        let mut gram = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = kernel_eval(space, &points[i], &points[j], 1e-9)
                    .unwrap()
                    .value;
            }
        }
        let min_eig = min_eigenvalue_jacobi(gram);
        assert!(
            min_eig >= -1e-8,
            "Gram matrix of {space} has negative eigenvalue {min_eig}"
        );
    }
}

/// Unbiasedness: the replicated mean of the plain estimator on the
/// worst-case integrand sits within the CLT band around the true integral.
#[test]
fn estimator_is_unbiased_on_worst_case_integrand() {
    let space = finite(2.0, &[0.9, 0.5]);
    let f_star = worst_case_function(&space);
    let exact = true_integral(&f_star);
    let evaluator = f_star.synthesize();

    let replications = 10_000u64;
    let n = 100usize;
    let mut errors = Vec::with_capacity(replications as usize);
    for i in 0..replications {
        let nodes = sample_gaussian(2, n, hermite_mc::rng::stream_seed(4242, i));
        errors.push(mc_estimate(|x| evaluator.eval(x), &nodes).value - exact);
    }
    let r = replications as f64;
    let mean = errors.iter().sum::<f64>() / r;
    let sd = (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (r - 1.0)).sqrt();
    assert!(
        mean.abs() <= 4.0 * sd / r.sqrt(),
        "sample mean {mean} outside the 4-sigma CLT band {}",
        4.0 * sd / r.sqrt()
    );
}

/// MSE over theory-squared stays within the self-calibrated band
/// `1 +- 4 kappa / sqrt(R)` with `kappa` the coefficient of variation of
/// the squared errors.
#[test]
fn replicated_mse_matches_theory_with_self_calibrated_band() {
    for space in [finite(2.0, &[0.9, 0.5]), analytic(0.5, &[2.0, 1.0], &[1.0, 3.0])] {
        let report = mc::empirical_randomized_error(&space, 250, 4000, 99).unwrap();
        let theory_squared = report.theoretical_error * report.theoretical_error;
        let mse = report.empirical_mse();
        // stderr / mse = kappa / sqrt(R).
        let band = 4.0 * report.empirical_stderr / mse;
        let ratio = mse / theory_squared;
        assert!(
            (ratio - 1.0).abs() <= band,
            "ratio {ratio} outside 1 +- {band} for {space}"
        );
    }
}
