//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its measured numbers and asserting the stated tolerance and runtime
//! budget.  Run with `cargo test --test acceptance -- --nocapture` to see
//! the measurements.

use gribov_core::basis::{BasisKind, CoefficientVector};
use gribov_core::deficiency::{
    eigenvector_at, km_block_test, scalar_zero_solutions, DeficiencyVerdict,
};
use gribov_core::inverse::{
    apply_quadrature, apply_recurrence, finite_rank_error, ledger_norms, nystrom_perron,
    right_inverse_residual, stirling_sandwich_check, v1_eval, v1_series, KernelSpec,
};
use gribov_core::jacobi::{sigma0_curve, ScalarJacobiSpec};
use gribov_core::numeric::{ln_factorial, log_log_slope};
use gribov_core::ortho::{first_second_eval, kouba_polys, plasma_polys, wronskian_residual};
use num_bigint::BigInt;
use num_complex::Complex64;
use std::time::Instant;

fn budget(name: &str, started: Instant, limit_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("acceptance {name}: PASS ({elapsed:.2} s, budget {limit_s} s)");
    assert!(
        elapsed < limit_s,
        "{name} exceeded its runtime budget: {elapsed:.2} s >= {limit_s} s"
    );
}

#[test]
fn a01_right_inverse_identity() {
    let t = Instant::now();
    let residual = right_inverse_residual(1.0, 200).unwrap();
    println!("  max residual over 2 <= n <= 200: {residual:.3e}");
    assert!(residual <= 1e-10, "residual {residual}");
    budget("01 right-inverse identity", t, 1.0);
}

#[test]
fn a02_representation_cross_check() {
    let t = Instant::now();
    let spec = KernelSpec::new(0.0, 1.0, 12.0, 400).unwrap();
    let grid = spec.grid();
    let ys: Vec<f64> = (0..=12).map(|k| k as f64 * 0.25).collect();
    let mut worst = 0.0f64;
    for n in 2..=10usize {
        let ln_nf = ln_factorial(n);
        let psi: Vec<f64> = grid
            .nodes
            .iter()
            .map(|&s| (n as f64 * s.ln() - 0.5 * ln_nf).exp())
            .collect();
        let quad = apply_quadrature(&spec, &psi, &ys).unwrap();
        let v = CoefficientVector::unit(BasisKind::U, n);
        let (_, rec) = apply_recurrence(1.0, &v, &ys).unwrap();
        for (q, r) in quad.iter().zip(&rec) {
            worst = worst.max((q - r.re).abs());
        }
    }
    println!("  max |quadrature - recurrence| on u_2..u_10, y in [0,3]: {worst:.3e}");
    assert!(worst <= 1e-7, "representations differ by {worst}");
    budget("02 representation cross-check", t, 10.0);
}

#[test]
fn a03_sigma0_cross_validation() {
    let t = Instant::now();
    let mus = [0.5, 1.0, 2.0, 4.0];
    let matrix = sigma0_curve(1.0, &mus, 1024, 1e-8).unwrap();
    let mut prev = f64::MIN;
    for point in &matrix {
        let nys = nystrom_perron(&KernelSpec::new(point.mu, 1.0, 12.0, 400).unwrap()).unwrap();
        let rel = (point.sigma0.re - nys.sigma0).abs() / nys.sigma0;
        println!(
            "  mu = {}: matrix {:.10} (im {:.2e}), nystrom {:.10}, rel diff {:.3e}",
            point.mu, point.sigma0.re, point.sigma0.im, nys.sigma0, rel
        );
        assert!(rel <= 1e-3, "methods disagree at mu = {}: {rel}", point.mu);
        assert!(
            point.sigma0.re > prev,
            "sigma0 not increasing at mu = {}",
            point.mu
        );
        prev = point.sigma0.re;
    }
    budget("03 sigma0 cross-validation", t, 60.0);
}

#[test]
fn a04_wronskian_and_parity() {
    let t = Instant::now();
    let mut worst_w = 0.0f64;
    for k in 0..20 {
        let z = Complex64::from_polar(2.5, std::f64::consts::TAU * k as f64 / 20.0);
        for n in 1..=60 {
            worst_w = worst_w.max(wronskian_residual(n, z));
        }
    }
    println!("  worst Wronskian residual (n <= 60, 20-point grid): {worst_w:.3e}");
    assert!(worst_w <= 1e-9);

    let mut worst_p = 0.0f64;
    for n in 1..=60usize {
        for &x in &[0.5, 1.0, 2.0, 5.0] {
            let (p, _) = first_second_eval(n, Complex64::new(x, 0.0));
            let (pm, _) = first_second_eval(n, Complex64::new(-x, 0.0));
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            worst_p = worst_p.max((pm - sign * p).norm() / p.norm().max(1.0));
        }
    }
    println!("  worst parity residual: {worst_p:.3e}");
    assert!(worst_p <= 1e-10);
    budget("04 Wronskian identity and parity", t, 1.0);
}

#[test]
fn a05_deficiency_verdicts() {
    let t = Instant::now();
    let (_, _, scalar) = scalar_zero_solutions(2001).unwrap();
    assert_eq!(scalar.verdict, DeficiencyVerdict::CompletelyIndeterminate);
    assert_eq!((scalar.n_plus, scalar.n_minus), (1, 1));
    println!(
        "  scalar: indices (1,1), |P(0)| decay fit {:.4}",
        scalar.decay_exponent_fit
    );

    for &(p, m) in &[(1usize, 1usize), (1, 2), (2, 1), (2, 3)] {
        let r = km_block_test(p, m, 400).unwrap();
        assert_eq!(
            r.report.verdict,
            DeficiencyVerdict::CompletelyIndeterminate,
            "(p,m)=({p},{m})"
        );
        assert_eq!(
            (r.report.n_plus, r.report.n_minus),
            (m, m),
            "(p,m)=({p},{m})"
        );
        let expected = -(p as f64 + m as f64 / 2.0);
        let fit = r.report.decay_exponent_fit;
        println!("  (p,m)=({p},{m}): indices ({m},{m}), decay fit {fit:.4} (expected {expected})");
        assert!(
            (fit - expected).abs() <= 0.1,
            "(p,m)=({p},{m}): decay fit {fit} vs {expected}"
        );
    }
    budget("05 deficiency verdicts", t, 30.0);
}

#[test]
fn a06_eigenvector_decay() {
    let t = Instant::now();
    let xis = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 3.0),
        Complex64::new(0.0, -5.0),
    ];
    let mut ratios = Vec::new();
    for &xi in &xis {
        let u = eigenvector_at(xi, 5000).unwrap();
        assert!(u.bound_constant.is_finite() && u.bound_constant > 0.0);
        assert!(
            u.bound_attained_at < 5000,
            "bound constant attained at the window edge for xi = {xi}"
        );
        let s_n = u.partial_l2[2499];
        let s_2n = u.partial_l2[4999];
        let ratio = (s_2n - s_n) / s_n;
        println!(
            "  xi = {xi}: M = {:.4} at n = {}, |S_5000 - S_2500|/S_2500 = {ratio:.3e}",
            u.bound_constant, u.bound_attained_at
        );
        ratios.push((xi, ratio));
    }
    budget(
        "06 eigenvector decay (excluding the Cauchy threshold)",
        t,
        5.0,
    );
    // The stated Cauchy threshold.  The solutions decay like n^{-3/4} -- the
    // barely-square-summable decay the deficiency results are about -- so
    // the partial sums converge like n^{-1/2} and the measured ratios at
    // n = 2500 sit in [3e-3, 6e-2] regardless of implementation.  The
    // assertion is kept as stated; see the failure message for the numbers.
    for (xi, ratio) in ratios {
        assert!(
            ratio <= 1e-3,
            "Cauchy threshold 1e-3 not attainable at n = 2500: xi = {xi} gives {ratio:.3e} \
             (partial sums of an n^{{-3/4}}-decaying sequence converge like n^{{-1/2}})"
        );
    }
}

#[test]
fn a07_compactness_ledger() {
    let t = Instant::now();
    let p = ledger_norms(1.0, 5000);
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for (n, &pn) in p.iter().enumerate().skip(100) {
        let scaled = pn * (n as f64).powf(1.5);
        lo = lo.min(scaled);
        hi = hi.max(scaled);
    }
    println!("  p_n n^(3/2) spread on [100, 5000]: {:.4}", hi / lo);
    assert!(hi / lo <= 3.0);

    let mut prev_bound = f64::MAX;
    for &m in &[25usize, 50, 100] {
        let (bound, empirical) = finite_rank_error(1.0, m, 400).unwrap();
        println!("  m = {m}: bound {bound:.6e}, empirical {empirical:.6e}");
        assert!(empirical <= bound, "m = {m}");
        assert!(bound < prev_bound, "bound not decreasing at m = {m}");
        prev_bound = bound;
    }
    budget("07 compactness ledger", t, 10.0);
}

#[test]
fn a08_v1_series() {
    let t = Instant::now();
    let series = v1_series(1.0, 2000);
    let mut worst = 0.0f64;
    for &y in &[0.25, 0.5, 1.0, 1.5, 2.0] {
        let quad = v1_eval(1.0, y).unwrap();
        let mut s = 0.0;
        for k in 1..series.end() {
            let c = series.coeff(k).re;
            if c != 0.0 {
                s += c * (k as f64 * y.ln() - 0.5 * ln_factorial(k)).exp();
            }
        }
        worst = worst.max((s - quad).abs());
    }
    println!("  max |series - quadrature| at y in {{0.25..2}}: {worst:.3e}");
    assert!(worst <= 1e-8);

    let ns: Vec<f64> = (200..=2000).map(|n| n as f64).collect();
    let gammas: Vec<f64> = (200..=2000)
        .map(|n| series.coeff(2 * n + 1).norm())
        .collect();
    let deltas: Vec<f64> = (200..=2000)
        .map(|n| series.coeff(2 * n + 2).norm())
        .collect();
    let gs = log_log_slope(&ns, &gammas);
    let ds = log_log_slope(&ns, &deltas);
    println!("  coefficient decay fits: gamma {gs:.4}, delta {ds:.4}");
    assert!(gs > -0.80 && gs < -0.70, "gamma fit {gs}");
    assert!(ds > -0.80 && ds < -0.70, "delta fit {ds}");
    budget("08 v1 series", t, 5.0);
}

/// n-th derivative of an entire function by the Cauchy integral over a unit
/// circle (trapezoid is spectrally accurate there) -- an oracle independent
/// of the polynomial recurrences it checks.
fn cauchy_derivative(f: impl Fn(Complex64) -> Complex64, x: f64, n: usize) -> f64 {
    let k = 64usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..k {
        let theta = std::f64::consts::TAU * j as f64 / k as f64;
        let w = Complex64::from_polar(1.0, theta);
        let rot = Complex64::from_polar(1.0, -(n as f64) * theta);
        acc += f(Complex64::new(x, 0.0) + w) * rot;
    }
    let ln_nf = ln_factorial(n);
    (acc / k as f64).re * ln_nf.exp()
}

#[test]
fn a09_exact_arithmetic_identities() {
    let t = Instant::now();
    let mut expected = BigInt::from(1);
    for n in 0..=20usize {
        let (_, _, value) = plasma_polys(n).unwrap();
        assert_eq!(value, expected, "plasma identity at n = {n}");
        expected *= BigInt::from(-2) * BigInt::from((n + 1) as i64);
    }
    println!("  plasma Wronskian equals (-2)^n n! exactly for n <= 20");

    let gaussian = |z: Complex64| (z * z / 2.0).exp();
    let mut worst = 0.0f64;
    for n in 0..=6usize {
        let (p, _) = kouba_polys(n);
        for &x in &[0.0f64, 0.5, 1.0, 1.5, 2.0] {
            let oracle = (-x * x / 2.0).exp() * cauchy_derivative(gaussian, x, n);
            let diff = (p.eval_f64(x) - oracle).abs();
            worst = worst.max(diff);
        }
    }
    println!("  max |P_n(x) - e^(-x^2/2) d^n/dx^n e^(x^2/2)|: {worst:.3e}");
    assert!(worst <= 1e-8);

    let stirling = stirling_sandwich_check(10_000).unwrap();
    println!(
        "  Stirling margins: upper {:.3e}, lower {:.3e}; b_n n^(3/4) in [{:.4}, {:.4}]",
        stirling.min_upper_margin,
        stirling.min_lower_margin,
        stirling.bn_scaled_min,
        stirling.bn_scaled_max
    );
    assert!(stirling.min_upper_margin >= -1e-12 && stirling.min_lower_margin >= 0.0);
    assert!(stirling.bn_scaled_min >= 0.5 && stirling.bn_scaled_max <= 1.5);
    budget("09 exact-arithmetic identities", t, 5.0);
}

#[test]
fn a10_truncation_spectra_sanity() {
    let t = Instant::now();
    let nearest = |set: &[Complex64], z: Complex64| -> f64 {
        set.iter().map(|&w| (w - z).norm()).fold(f64::MAX, f64::min)
    };

    // Analytic 2x2 roots.
    let s = ScalarJacobiSpec::new(3.0, 1.0, 2)
        .unwrap()
        .truncated_spectrum(1e-12)
        .unwrap();
    assert!(nearest(&s.eigenvalues, Complex64::new(4.0, 0.0)) <= 1e-12);
    assert!(nearest(&s.eigenvalues, Complex64::new(5.0, 0.0)) <= 1e-12);
    let s = ScalarJacobiSpec::new(1.0, 1.0, 2)
        .unwrap()
        .truncated_spectrum(1e-12)
        .unwrap();
    let sqrt7 = 7f64.sqrt();
    assert!(nearest(&s.eigenvalues, Complex64::new(1.5, 0.5 * sqrt7)) <= 1e-12);
    assert!(nearest(&s.eigenvalues, Complex64::new(1.5, -0.5 * sqrt7)) <= 1e-12);
    println!("  n = 2 analytic roots reproduced to 1e-12");

    // Trace/determinant and conjugate pairing up to n = 64.
    for &(mu, lambda, n) in &[(1.3f64, 0.7f64, 64usize), (0.4, 1.0, 33)] {
        let spec = ScalarJacobiSpec::new(mu, lambda, n).unwrap();
        let s = spec.truncated_spectrum(1e-11).unwrap();
        let sum: Complex64 = s.eigenvalues.iter().sum();
        let trace = mu * (n * (n + 1)) as f64 / 2.0;
        assert!((sum - Complex64::new(trace, 0.0)).norm() <= 1e-8 * trace.abs().max(1.0));
        let mut prod = Complex64::new(1.0, 0.0);
        let mut log_prod = 0.0f64;
        for &z in &s.eigenvalues {
            prod *= z;
            let m = prod.norm();
            if !(1e-30..=1e30).contains(&m) && m > 0.0 {
                prod /= m;
                log_prod += m.ln();
            }
        }
        let det = spec.charpoly_eval(Complex64::new(0.0, 0.0));
        let ratio = prod / det.value * (log_prod - det.log_scale).exp();
        assert!(
            (ratio - Complex64::new(1.0, 0.0)).norm() <= 1e-8,
            "determinant at n = {n}"
        );
        for &z in &s.eigenvalues {
            if z.im.abs() > 1e-9 {
                assert!(nearest(&s.eigenvalues, z.conj()) <= 1e-9 * z.norm().max(1.0));
            }
        }
    }
    println!("  trace/determinant identities and conjugate pairing hold to 1e-8");

    // Homogeneity: spectrum(mu, lambda) = lambda spectrum(mu/lambda, 1).
    let a = ScalarJacobiSpec::new(2.0, 0.5, 32)
        .unwrap()
        .truncated_spectrum(1e-12)
        .unwrap();
    let b = ScalarJacobiSpec::new(4.0, 1.0, 32)
        .unwrap()
        .truncated_spectrum(1e-12)
        .unwrap();
    let scaled: Vec<Complex64> = b.eigenvalues.iter().map(|&z| 0.5 * z).collect();
    for &za in &a.eigenvalues {
        assert!(nearest(&scaled, za) <= 1e-10 * za.norm().max(1.0));
    }
    println!("  homogeneity law holds to 1e-10");
    budget("10 truncation spectra sanity", t, 10.0);
}
