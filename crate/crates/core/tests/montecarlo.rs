use kaclab::gauss::expected_roots_gaussian;
use kaclab::montecarlo::*;
use kaclab::{CoefficientLaw, Error, IntervalSpec};
use num_rational::BigRational;

fn law(name: &str) -> CoefficientLaw {
    CoefficientLaw::by_name(name).unwrap()
}

fn iv(s: &str) -> IntervalSpec {
    s.parse().unwrap()
}

fn threads(t: usize) -> RunOptions {
    RunOptions {
        threads: Some(t),
        ..Default::default()
    }
}

#[test]
fn rademacher_degree_one_half_on_unit_interval() {
    let e = estimate_expected_roots(&law("rademacher"), 1, &iv("(0,1]"), 20_000, 3).unwrap();
    assert!((e.mean - 0.5).abs() <= 3.0 * e.stderr, "{e:?}");
    assert_eq!(e.degenerate_samples, 0);
    let exact = enumerate_expected_roots(&law("rademacher"), 1, &iv("(0,1]")).unwrap();
    assert_eq!(exact, BigRational::new(1.into(), 2.into()));
}

#[test]
fn enumeration_matches_monte_carlo_for_small_discrete_laws() {
    for (name, n, interval) in [("rademacher", 6, "R"), ("ternary(1/3)", 4, "[-1,1]"), ("four-moment", 3, "(0,1]")] {
        let exact = rational_to_f64(&enumerate_expected_roots(&law(name), n, &iv(interval)).unwrap());
        let e = estimate_expected_roots(&law(name), n, &iv(interval), 20_000, 9).unwrap();
        assert!((e.mean - exact).abs() <= 4.0 * e.stderr, "{name}: {} vs {exact}", e.mean);
    }
}

#[test]
fn constant_polynomial_has_no_roots() {
    let e = estimate_expected_roots(&law("zero-atom(1/2)"), 0, &iv("(0,1]"), 2_000, 1).unwrap();
    assert_eq!(e.mean, 0.0);
    assert!(e.degenerate_samples > 800 && e.degenerate_samples < 1200, "{e:?}");
    assert_eq!(e.uncertified_samples, 0);
}

#[test]
fn zero_trials_rejected() {
    assert!(matches!(
        estimate_expected_roots(&law("gaussian"), 4, &iv("R"), 0, 1),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn gaussian_matches_quadrature_oracle() {
    for interval in ["R", "(0,1]", "[1,inf)"] {
        let e = estimate_expected_roots(&law("gaussian"), 32, &iv(interval), 20_000, 5).unwrap();
        let q = expected_roots_gaussian(32, &iv(interval)).value;
        assert!((e.mean - q).abs() <= 3.0 * e.stderr, "{interval}: {} vs {q}", e.mean);
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let a = estimate_expected_roots_with(&law("gaussian"), 64, &iv("R"), 500, 42, &threads(1)).unwrap();
    let b = estimate_expected_roots_with(&law("gaussian"), 64, &iv("R"), 500, 42, &threads(3)).unwrap();
    assert_eq!(a, b);
    let sched = [8, 16, 32];
    let c = estimate_constant_with(&law("four-moment"), &iv("R"), &sched, 300, 2, &threads(1)).unwrap();
    let d = estimate_constant_with(&law("four-moment"), &iv("R"), &sched, 300, 2, &threads(4)).unwrap();
    assert_eq!(c, d);
}

#[test]
fn schedule_must_increase() {
    for bad in [&[8u64, 8, 16][..], &[8, 16], &[16, 8, 32]] {
        assert!(matches!(
            estimate_constant(&law("rademacher"), &iv("R"), bad, 10, 1),
            Err(Error::Schedule(_))
        ));
    }
}

#[test]
fn constant_centers_by_log_growth() {
    let e = estimate_constant(&law("gaussian"), &iv("R"), &[16, 32, 64], 4_000, 8).unwrap();
    for (&(n, c), se) in e.per_n_values.iter().zip(&e.per_n_stderr) {
        let q = expected_roots_gaussian(n as u64, &iv("R")).value - 2.0 / std::f64::consts::PI * n.ln();
        assert!((c - q).abs() <= 4.0 * se, "n = {n}: {c} vs {q}");
    }
    assert_eq!(e.value, e.per_n_values[2].1);
    assert!(e.cauchy_gap >= 0.0);
}

#[test]
fn zero_multiplicity_matches_formula() {
    for p in ["3/10", "1/2"] {
        let pf: f64 = if p == "3/10" { 0.3 } else { 0.5 };
        let e = estimate_expected_roots(&law(&format!("zero-atom({p})")), 64, &IntervalSpec::zero_point(), 20_000, 4)
            .unwrap();
        let expect = zero_multiplicity_conditional(pf, 64).unwrap();
        assert!((e.mean - expect).abs() <= 3.0 * e.stderr, "p = {p}: {} vs {expect}", e.mean);
    }
}

#[test]
fn stderr_scales_with_trials() {
    let a = estimate_expected_roots(&law("rademacher"), 40, &iv("R"), 2_000, 6).unwrap();
    let b = estimate_expected_roots(&law("rademacher"), 40, &iv("R"), 8_000, 6).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn decomposition_conserves_counts() {
    for name in ["rademacher", "gaussian", "zero-atom(1/2)"] {
        let r = decomposition_report(&law(name), 128, 8.0, 0.25, 2_000, 12, &RunOptions::default()).unwrap();
        assert_eq!(r.conservation_violations, 0, "{name}");
        assert!(r.conservation_residual().abs() < 1e-12, "{name}");
        assert_eq!(r.near_zero.trials, 2_000);
    }
    assert!(decomposition_report(&law("gaussian"), 8, 2.0, 0.6, 10, 1, &RunOptions::default()).is_err());
}

#[test]
fn corollary_near_degenerate_cutoff() {
    // (0, 1 - 1/C) is nearly empty, so the centered value is the offset minus (1/2pi) log C
    let c = 1.0 + 1e-6;
    let e = estimate_constant_corollary(&law("rademacher"), &[c], 200, 1, &RunOptions::default()).unwrap();
    let offset = kaclab::gauss::gaussian_unit_constant() - 2f64.ln() / (2.0 * std::f64::consts::PI);
    assert!((e.value - offset + c.ln() / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn corollary_rejects_bad_cutoffs() {
    let run = RunOptions::default();
    assert!(estimate_constant_corollary(&law("gaussian"), &[8.0, 4.0], 10, 1, &run).is_err());
    assert!(estimate_constant_corollary(&law("gaussian"), &[1.0], 10, 1, &run).is_err());
}

#[test]
fn identical_laws_have_zero_gaps() {
    let g = law("gaussian");
    let r = coupled_continuity_experiment(
        &[g.clone(), g.clone()],
        &g,
        &iv("(0,1]"),
        &[8, 16, 32],
        300,
        3,
        Coupling::CommonRandomNumbers,
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(r.gaps, vec![0.0, 0.0]);
    assert_eq!(r.estimates[0], r.limit);
}

#[test]
fn independent_coupling_changes_streams() {
    let g = law("gaussian");
    let r = coupled_continuity_experiment(
        std::slice::from_ref(&g),
        &g,
        &iv("R"),
        &[8, 16, 32],
        300,
        3,
        Coupling::Independent,
        &RunOptions::default(),
    )
    .unwrap();
    assert!(r.gaps[0] > 0.0);
    assert_ne!(independent_seed(3, 0), 3);
}
