//! Numerical deficiency-index tests.
//!
//! The scalar operator with entries `b_n = n sqrt(n+1)` and the block
//! operators of `H^{p,m}` are probed through the same route: build the
//! zero-energy solution chains, check square-summability with a
//! Raabe-Duhamel ratio classifier, and report the deficiency verdict.
//! Eigenvector decay at arbitrary complex spectral parameter and the
//! Hellinger uniform-tail check round out the picture.

use crate::basis::gribov_offdiag;
use crate::jacobi::BlockJacobiSpec;
use crate::numeric::{linear_fit, log_log_slope, CompensatedSum};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::Serialize;

/// Fixed upper summation limit for Hellinger tail sums.
const HELLINGER_CUTOFF: usize = 10_000;

/// Outcome of the ratio test on a positive series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Convergent,
    Divergent,
    Indeterminate,
}

/// Raabe-Duhamel classification: `a_{n+1}/a_n = 1 - alpha/n + o(1/n)` with
/// the two-sigma decision rule on the fitted `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesClassification {
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub verdict: SeriesVerdict,
}

/// Deficiency verdict for an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficiencyVerdict {
    CompletelyIndeterminate,
    NotIndeterminate,
    Inconclusive,
}

/// Summary of a deficiency computation.
///
/// `tail_sum_odd` / `tail_sum_even` are the squared-norm sums of the two
/// zero-energy solution chains, named for the index parity carrying their
/// mass (first-kind mass sits on odd indices, second-kind on even ones).
/// For the block test `decay_exponent_fit` is the log-log slope of the
/// squared block norms against the block counter (about `-(p + m/2)`); the
/// scalar routine instead fits the magnitudes `|P_{2k+1}(0)|` (about `-3/4`).
#[derive(Debug, Clone, Copy)]
pub struct DeficiencyReport {
    pub p: usize,
    pub m: usize,
    pub criterion: f64,
    pub tail_sum_even: f64,
    pub tail_sum_odd: f64,
    pub decay_exponent_fit: f64,
    pub verdict: DeficiencyVerdict,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Serialize for DeficiencyReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DeficiencyReport", 9)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("criterion", &self.criterion)?;
        st.serialize_field("tail_even", &self.tail_sum_even)?;
        st.serialize_field("tail_odd", &self.tail_sum_odd)?;
        st.serialize_field("decay_fit", &self.decay_exponent_fit)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("n_plus", &self.n_plus)?;
        st.serialize_field("n_minus", &self.n_minus)?;
        st.end()
    }
}

/// Samples of one solution sequence with its running square sums and the
/// smallest constant `M` for which `|u_n| <= M / (sqrt(n) ln n)` holds over
/// the observed window `n >= 10`.
#[derive(Debug, Clone)]
pub struct SolutionTail {
    pub values: Vec<Complex64>,
    pub partial_l2: Vec<f64>,
    pub bound_constant: f64,
    pub bound_attained_at: usize,
}

impl SolutionTail {
    fn from_values(values: Vec<Complex64>) -> Self {
        let mut partial = Vec::with_capacity(values.len());
        let mut acc = CompensatedSum::new();
        for v in &values {
            acc.add(v.norm_sqr());
            partial.push(acc.value());
        }
        let mut bound = 0.0f64;
        let mut at = 0usize;
        for (idx, v) in values.iter().enumerate() {
            let n = idx + 1;
            if n >= 10 {
                let scaled = v.norm() * (n as f64).sqrt() * (n as f64).ln();
                if scaled > bound {
                    bound = scaled;
                    at = n;
                }
            }
        }
        Self {
            values,
            partial_l2: partial,
            bound_constant: bound,
            bound_attained_at: at,
        }
    }

    /// Value at index `n >= 1`.
    pub fn value(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    pub fn l2_sum(&self) -> f64 {
        *self.partial_l2.last().unwrap_or(&0.0)
    }
}

/// Classifies `sum f(n)` for positive `f` by fitting
/// `n (1 - f(n+1)/f(n)) = alpha + c/n` over `n in [n_min, n_max]`.
///
/// The reported uncertainty is the regression standard error of `alpha`
/// floored at `|c| / n_max`: the ratio hypothesis only controls terms up to
/// `o(1/n)`, so the influence of the fitted drift at the far end of the
/// window is the honest resolution limit.  A boundary series like `1/n`
/// therefore lands on `indeterminate` rather than on a coin flip.
pub fn classify_series<F: Fn(usize) -> f64>(
    terms: F,
    n_min: usize,
    n_max: usize,
) -> Result<SeriesClassification> {
    assert!(n_min >= 1 && n_max >= 4 * n_min, "need n_max >= 4 n_min");
    let mut xs = Vec::with_capacity(n_max - n_min);
    let mut ys = Vec::with_capacity(n_max - n_min);
    let mut a_n = terms(n_min);
    for n in n_min..n_max {
        let a_next = terms(n + 1);
        if !a_n.is_finite() || a_n <= 0.0 {
            return Err(Error::NonPositiveTerm { n });
        }
        if !a_next.is_finite() || a_next <= 0.0 {
            return Err(Error::NonPositiveTerm { n: n + 1 });
        }
        xs.push(1.0 / n as f64);
        ys.push(n as f64 * (1.0 - a_next / a_n));
        a_n = a_next;
    }
    let (alpha, c, se) = linear_fit(&xs, &ys);
    let alpha_stderr = se.max(c.abs() / n_max as f64);
    let verdict = if alpha - 2.0 * alpha_stderr > 1.0 {
        SeriesVerdict::Convergent
    } else if alpha + 2.0 * alpha_stderr < 1.0 {
        SeriesVerdict::Divergent
    } else {
        SeriesVerdict::Indeterminate
    };
    Ok(SeriesClassification {
        alpha,
        alpha_stderr,
        verdict,
    })
}

/// Zero-energy solutions of the scalar recurrence.
///
/// With zero diagonal the recurrence decouples by parity, so the values are
/// plain products of `b`-ratios, accumulated in the log domain:
/// `P_{2k+1}(0) = (-1)^k prod b_{2j-1}/b_{2j}` and
/// `Q_{2k+2}(0) = (-1)^k (1/b_1) prod b_{2j}/b_{2j+1}`.
pub fn scalar_zero_solutions(
    n_max: usize,
) -> Result<(SolutionTail, SolutionTail, DeficiencyReport)> {
    if n_max < 100 {
        return Err(Error::Domain("need at least 100 terms".into()));
    }
    let mut p_values = vec![Complex64::new(0.0, 0.0); n_max];
    let mut q_values = vec![Complex64::new(0.0, 0.0); n_max];
    p_values[0] = Complex64::new(1.0, 0.0);
    q_values[1] = Complex64::new(1.0 / gribov_offdiag(1), 0.0);

    let ln_b = |k: usize| gribov_offdiag(k).ln();
    let mut log_p = 0.0f64;
    let mut sign_p = 1.0f64;
    let mut k = 1usize;
    while 2 * k < n_max {
        log_p += ln_b(2 * k - 1) - ln_b(2 * k);
        sign_p = -sign_p;
        p_values[2 * k] = Complex64::new(sign_p * log_p.exp(), 0.0);
        k += 1;
    }
    let mut log_q = -ln_b(1);
    let mut sign_q = 1.0f64;
    let mut k = 1usize;
    while 2 * k + 2 <= n_max {
        log_q += ln_b(2 * k) - ln_b(2 * k + 1);
        sign_q = -sign_q;
        q_values[2 * k + 1] = Complex64::new(sign_q * log_q.exp(), 0.0);
        k += 1;
    }

    let p_tail = SolutionTail::from_values(p_values);
    let q_tail = SolutionTail::from_values(q_values);

    // Classify the squared odd/even subsequences.
    let odd_count = (n_max - 1) / 2; // k with 2k+1 <= n_max
    let even_count = n_max / 2 - 1; // k with 2k+2 <= n_max
    let p_class = classify_series(
        |k| p_tail.value(2 * k + 1).norm_sqr(),
        (odd_count / 4).max(2),
        odd_count,
    )?;
    let q_class = classify_series(
        |k| q_tail.value(2 * k + 2).norm_sqr(),
        (even_count / 4).max(2),
        even_count,
    )?;

    // Decay exponent of |P_{2k+1}(0)| over the upper half of the range.
    let ks: Vec<f64> = (odd_count / 2..=odd_count).map(|k| k as f64).collect();
    let vs: Vec<f64> = (odd_count / 2..=odd_count)
        .map(|k| p_tail.value(2 * k + 1).norm())
        .collect();
    let decay = log_log_slope(&ks, &vs);

    let both_converge = p_class.verdict == SeriesVerdict::Convergent
        && q_class.verdict == SeriesVerdict::Convergent;
    let any_diverges =
        p_class.verdict == SeriesVerdict::Divergent || q_class.verdict == SeriesVerdict::Divergent;
    let verdict = if both_converge {
        DeficiencyVerdict::CompletelyIndeterminate
    } else if any_diverges {
        DeficiencyVerdict::NotIndeterminate
    } else {
        DeficiencyVerdict::Inconclusive
    };
    let (n_plus, n_minus) = match verdict {
        DeficiencyVerdict::CompletelyIndeterminate => (1, 1),
        _ => (0, 0),
    };
    let report = DeficiencyReport {
        p: 1,
        m: 1,
        criterion: 1.5,
        tail_sum_even: q_tail.l2_sum(),
        tail_sum_odd: p_tail.l2_sum(),
        decay_exponent_fit: decay,
        verdict,
        n_plus,
        n_minus,
    };
    Ok((p_tail, q_tail, report))
}

/// Forward solution of `(n-1) sqrt(n) u_{n-1} + n sqrt(n+1) u_{n+1} = xi u_n`
/// from `u_1 = 1`, `u_2 = xi / sqrt(2)`.
pub fn eigenvector_at(xi: Complex64, n_max: usize) -> Result<SolutionTail> {
    if n_max < 10 {
        return Err(Error::Domain("need at least 10 terms".into()));
    }
    let mut values = Vec::with_capacity(n_max);
    values.push(Complex64::new(1.0, 0.0));
    values.push(xi / 2f64.sqrt());
    for n in 2..n_max {
        let prev = values[n - 2];
        let here = values[n - 1];
        let next = (xi * here - gribov_offdiag(n - 1) * prev) / gribov_offdiag(n);
        if next.norm() > 1e300 {
            return Err(Error::Overflow { n: n + 1 });
        }
        values.push(next);
    }
    Ok(SolutionTail::from_values(values))
}

/// Sup over a disc grid of the tail sums of both solution families.
#[derive(Debug, Clone)]
pub struct HellingerReport {
    pub radius: f64,
    pub tail_start: usize,
    pub cutoff: usize,
    pub grid_size: usize,
    /// sup over the grid of `sum_{n > N} |P_n(z)|^2`.
    pub sup_first: f64,
    /// Same for the second-kind family.
    pub sup_second: f64,
}

/// Tail sums `T_N(z) = sum_{n=N+1}^{cutoff} |phi_n(z)|^2` for both solution
/// families of the spectral equation, maximised over `z = 0` and
/// `grid_size` points of the circle `|z| = radius`.
pub fn hellinger_disc_check(radius: f64, tail_start: usize, grid_size: usize) -> HellingerReport {
    assert!(radius >= 0.0 && tail_start < HELLINGER_CUTOFF);
    let mut grid = vec![Complex64::new(0.0, 0.0)];
    if radius > 0.0 {
        for k in 0..grid_size {
            let theta = std::f64::consts::TAU * k as f64 / grid_size as f64;
            grid.push(Complex64::from_polar(radius, theta));
        }
    }
    let tails: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&z| solution_tails_at(z, tail_start, HELLINGER_CUTOFF))
        .collect();
    let mut sup_first = 0.0f64;
    let mut sup_second = 0.0f64;
    for (p, q) in tails {
        sup_first = sup_first.max(p);
        sup_second = sup_second.max(q);
    }
    HellingerReport {
        radius,
        tail_start,
        cutoff: HELLINGER_CUTOFF,
        grid_size,
        sup_first,
        sup_second,
    }
}

fn solution_tails_at(z: Complex64, tail_start: usize, cutoff: usize) -> (f64, f64) {
    let b1 = gribov_offdiag(1);
    let mut p = (Complex64::new(1.0, 0.0), z / b1);
    let mut q = (Complex64::new(0.0, 0.0), Complex64::new(1.0 / b1, 0.0));
    let mut tail_p = CompensatedSum::new();
    let mut tail_q = CompensatedSum::new();
    if tail_start < 1 {
        tail_p.add(p.0.norm_sqr());
        tail_q.add(q.0.norm_sqr());
    }
    if tail_start < 2 {
        tail_p.add(p.1.norm_sqr());
        tail_q.add(q.1.norm_sqr());
    }
    for n in 3..=cutoff {
        let k = n - 1;
        let bk = gribov_offdiag(k);
        let bk1 = gribov_offdiag(k - 1);
        p = (p.1, (z * p.1 - bk1 * p.0) / bk);
        q = (q.1, (z * q.1 - bk1 * q.0) / bk);
        if n > tail_start {
            tail_p.add(p.1.norm_sqr());
            tail_q.add(q.1.norm_sqr());
        }
    }
    (tail_p.value(), tail_q.value())
}

/// Full result of the block complete-indeterminacy test.
#[derive(Debug, Clone)]
pub struct KmBlockReport {
    pub report: DeficiencyReport,
    /// Squared block norms of the first-kind chain (odd blocks), by step.
    pub first_chain_sq: Vec<f64>,
    /// Squared block norms of the second-kind chain (even blocks), by step.
    pub second_chain_sq: Vec<f64>,
    /// Partial sum of `1 / ||B_i||` over the block range.
    pub inv_norm_partial_sum: f64,
    /// Ratio-test classification of `sum 1/||B_i||`.
    pub inv_norm_class: SeriesClassification,
    /// First index from which the exact-norm two-sided inequality
    /// `||B_{i-1}|| ||B_{i+1}|| <= 1/||B_i^{-1}||^2` holds through the range.
    pub log_concavity_exact_from: Option<usize>,
    /// Same with the scalar-style simplification `||B_i^{-1}|| = 1/||B_i||`.
    pub log_concavity_scalar_from: Option<usize>,
}

/// Complete-indeterminacy test for `H^{p,m}` via its zero-energy solution
/// chains.  The blocks are diagonal, so both chains reduce to per-coordinate
/// products of entry ratios, taken in the log domain.
pub fn km_block_test(p: usize, m: usize, blocks: usize) -> Result<KmBlockReport> {
    if blocks < 50 {
        return Err(Error::Domain("need at least 50 blocks".into()));
    }
    let spec = BlockJacobiSpec::new(p, m, blocks)?;
    let ln_beta = |c: usize| spec.beta(c).ln();

    // First-kind chain: blocks 1, 3, 5, ...; step j multiplies coordinate r
    // by beta_{(2j-2)m+r} / beta_{(2j-1)m+r}.
    let mut first_sq = Vec::new();
    {
        let mut log_w = vec![0.0f64; m];
        first_sq.push(m as f64); // block 1: unit in every coordinate
        let mut j = 1usize;
        while 2 * j < blocks {
            let mut h = CompensatedSum::new();
            for (r, lw) in log_w.iter_mut().enumerate() {
                *lw += ln_beta((2 * j - 2) * m + r + 1) - ln_beta((2 * j - 1) * m + r + 1);
                h.add((2.0 * *lw).exp());
            }
            first_sq.push(h.value());
            j += 1;
        }
    }

    // Second-kind chain: blocks 2, 4, ...; seeded with B_1^{-1}.
    let mut second_sq = Vec::new();
    {
        let mut log_w: Vec<f64> = (0..m).map(|r| -ln_beta(r + 1)).collect();
        let mut h0 = CompensatedSum::new();
        for lw in &log_w {
            h0.add((2.0 * lw).exp());
        }
        second_sq.push(h0.value());
        let mut j = 2usize;
        while 2 * j <= blocks {
            let mut h = CompensatedSum::new();
            for (r, lw) in log_w.iter_mut().enumerate() {
                *lw += ln_beta((2 * j - 3) * m + r + 1) - ln_beta((2 * j - 2) * m + r + 1);
                h.add((2.0 * *lw).exp());
            }
            second_sq.push(h.value());
            j += 1;
        }
    }

    let sum_sq = |v: &[f64]| {
        let mut acc = CompensatedSum::new();
        for &x in v {
            acc.add(x);
        }
        acc.value()
    };
    let tail_odd = sum_sq(&first_sq);
    let tail_even = sum_sq(&second_sq);

    let jc_first = first_sq.len() - 1;
    let jc_second = second_sq.len() - 1;
    let first_class = classify_series(|j| first_sq[j], (jc_first / 4).max(2), jc_first)?;
    let second_class = classify_series(|j| second_sq[j], (jc_second / 4).max(2), jc_second)?;

    // Decay of the squared block norms over the upper half of the range.
    let js: Vec<f64> = (jc_first / 2..=jc_first).map(|j| j as f64).collect();
    let hs: Vec<f64> = (jc_first / 2..=jc_first).map(|j| first_sq[j]).collect();
    let decay = log_log_slope(&js, &hs);

    let criterion = p as f64 + m as f64 / 2.0;
    let both_converge = first_class.verdict == SeriesVerdict::Convergent
        && second_class.verdict == SeriesVerdict::Convergent;
    let any_diverges = first_class.verdict == SeriesVerdict::Divergent
        || second_class.verdict == SeriesVerdict::Divergent;
    let verdict = if both_converge && criterion > 1.0 {
        DeficiencyVerdict::CompletelyIndeterminate
    } else if any_diverges {
        DeficiencyVerdict::NotIndeterminate
    } else {
        DeficiencyVerdict::Inconclusive
    };
    let (n_plus, n_minus) = match verdict {
        DeficiencyVerdict::CompletelyIndeterminate => (m, m),
        _ => (0, 0),
    };

    let mut inv_sum = CompensatedSum::new();
    for i in 1..=blocks {
        inv_sum.add(1.0 / spec.block_entries(i).norm);
    }
    let inv_norm_class = classify_series(
        |i| 1.0 / spec.block_entries(i).norm,
        (blocks / 4).max(2),
        blocks,
    )?;

    Ok(KmBlockReport {
        report: DeficiencyReport {
            p,
            m,
            criterion,
            tail_sum_even: tail_even,
            tail_sum_odd: tail_odd,
            decay_exponent_fit: decay,
            verdict,
            n_plus,
            n_minus,
        },
        first_chain_sq: first_sq,
        second_chain_sq: second_sq,
        inv_norm_partial_sum: inv_sum.value(),
        inv_norm_class,
        log_concavity_exact_from: spec.log_concavity_start(true),
        log_concavity_scalar_from: spec.log_concavity_start(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_zeta_like_series() {
        let c = classify_series(|n| 1.0 / (n as f64).powi(2), 1000, 10_000).unwrap();
        assert!((c.alpha - 2.0).abs() < 0.05);
        assert_eq!(c.verdict, SeriesVerdict::Convergent);

        let c = classify_series(|n| 1.0 / n as f64, 1000, 10_000).unwrap();
        assert!((c.alpha - 1.0).abs() < 0.05);
        assert_eq!(c.verdict, SeriesVerdict::Indeterminate);

        let c = classify_series(|n| 1.0 / gribov_offdiag(n), 1000, 10_000).unwrap();
        assert!((c.alpha - 1.5).abs() < 0.05);
        assert_eq!(c.verdict, SeriesVerdict::Convergent);
    }

    #[test]
    fn classify_zeta_exponent_recovery() {
        for &alpha in &[0.5, 1.5, 2.0, 3.0] {
            let c = classify_series(|n| (n as f64).powf(-alpha), 1000, 10_000).unwrap();
            assert!(
                (c.alpha - alpha).abs() <= 0.05,
                "alpha {alpha}: fitted {}",
                c.alpha
            );
            let expected = if alpha > 1.0 {
                SeriesVerdict::Convergent
            } else {
                SeriesVerdict::Divergent
            };
            assert_eq!(c.verdict, expected, "alpha {alpha}");
        }
    }

    #[test]
    fn classify_rejects_nonpositive() {
        let e = classify_series(|n| 1.0 - n as f64 / 8.0, 2, 16);
        assert!(matches!(e, Err(Error::NonPositiveTerm { .. })));
    }

    #[test]
    fn scalar_zero_solution_values() {
        let (p, q, report) = scalar_zero_solutions(2001).unwrap();
        assert_eq!(p.value(1), Complex64::new(1.0, 0.0));
        assert_eq!(p.value(2), Complex64::new(0.0, 0.0));
        // P_3(0) = -b_1/b_2 = -1/sqrt(6).
        assert!((p.value(3).re + 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(q.value(1), Complex64::new(0.0, 0.0));
        assert!((q.value(2).re - 1.0 / 2f64.sqrt()).abs() < 1e-15);

        assert_eq!(report.verdict, DeficiencyVerdict::CompletelyIndeterminate);
        assert_eq!((report.n_plus, report.n_minus), (1, 1));
        assert!(
            report.decay_exponent_fit > -0.80 && report.decay_exponent_fit < -0.70,
            "decay fit {}",
            report.decay_exponent_fit
        );
    }

    #[test]
    fn eigenvector_at_zero_matches_first_kind() {
        let (p, _, _) = scalar_zero_solutions(1000).unwrap();
        let u = eigenvector_at(Complex64::new(0.0, 0.0), 1000).unwrap();
        assert_eq!(u.value(2), Complex64::new(0.0, 0.0));
        assert!((u.value(3).re + 1.0 / 6f64.sqrt()).abs() < 1e-15);
        for n in 1..=1000 {
            assert!((u.value(n) - p.value(n)).norm() <= 1e-12);
        }
    }

    #[test]
    fn eigenvector_linear_in_seed() {
        // Scaling the seed by a power of two commutes with every operation.
        let xi = Complex64::new(1.25, -0.5);
        let u = eigenvector_at(xi, 400).unwrap();
        let mut values = Vec::with_capacity(400);
        let c = Complex64::new(2.0, 0.0);
        values.push(c);
        values.push(c * xi / 2f64.sqrt());
        for n in 2..400 {
            let next =
                (xi * values[n - 1] - gribov_offdiag(n - 1) * values[n - 2]) / gribov_offdiag(n);
            values.push(next);
        }
        for n in 1..=400 {
            assert_eq!(values[n - 1], c * u.value(n), "n={n}");
        }
    }

    #[test]
    fn eigenvector_tail_vanishes_at_the_sqrt_rate() {
        // Solutions decay like n^{-3/4}, so the Cauchy increments
        // S_{2n} - S_n shrink like n^{-1/2}: each doubling of n multiplies
        // the relative increment by about 1/sqrt(2).
        let u = eigenvector_at(Complex64::new(2.0, 3.0), 10_000).unwrap();
        let ratio = |n: usize| {
            let s_n = u.partial_l2[n - 1];
            (u.partial_l2[2 * n - 1] - s_n) / s_n
        };
        let (r1, r2, r3) = (ratio(1250), ratio(2500), ratio(5000));
        assert!(
            r1 > r2 && r2 > r3,
            "increments not shrinking: {r1} {r2} {r3}"
        );
        let halving = r3 / r1;
        assert!(
            (halving - 0.5).abs() < 0.1,
            "quadrupling n should halve the increment, got factor {halving}"
        );
        assert!(u.bound_constant.is_finite() && u.bound_constant > 0.0);
        assert!(u.bound_attained_at < 5000, "bound attained at the edge");
    }

    #[test]
    fn hellinger_tails_decrease_in_n() {
        let r200 = hellinger_disc_check(2.0, 200, 8);
        let r400 = hellinger_disc_check(2.0, 400, 8);
        let r800 = hellinger_disc_check(2.0, 800, 8);
        assert!(r200.sup_first > r400.sup_first && r400.sup_first > r800.sup_first);
        assert!(r200.sup_second > r400.sup_second && r400.sup_second > r800.sup_second);
    }

    #[test]
    fn hellinger_zero_radius_is_the_origin_tail() {
        let r = hellinger_disc_check(0.0, 300, 8);
        let (p, q, _) = scalar_zero_solutions(HELLINGER_CUTOFF).unwrap();
        let tail_p = p.l2_sum() - p.partial_l2[299];
        let tail_q = q.l2_sum() - q.partial_l2[299];
        assert!((r.sup_first - tail_p).abs() <= 1e-12 * tail_p);
        assert!((r.sup_second - tail_q).abs() <= 1e-12 * tail_q);
    }

    #[test]
    fn hellinger_grid_refinement_is_stable() {
        let r8 = hellinger_disc_check(2.0, 400, 8);
        let r16 = hellinger_disc_check(2.0, 400, 16);
        let rel = (r16.sup_first - r8.sup_first).abs() / r8.sup_first;
        assert!(rel <= 0.10, "sup moved by {rel} under grid refinement");
    }

    #[test]
    fn km_verdicts_and_indices() {
        for &(p, m) in &[(1usize, 1usize), (1, 2), (2, 1), (2, 3)] {
            let r = km_block_test(p, m, 400).unwrap();
            assert_eq!(
                r.report.verdict,
                DeficiencyVerdict::CompletelyIndeterminate,
                "(p,m)=({p},{m})"
            );
            assert_eq!((r.report.n_plus, r.report.n_minus), (m, m));
            assert!((r.report.criterion - (p as f64 + m as f64 / 2.0)).abs() == 0.0);
            let expected = -(p as f64 + m as f64 / 2.0);
            assert!(
                (r.report.decay_exponent_fit - expected).abs() <= 0.1,
                "(p,m)=({p},{m}): fit {} vs {expected}",
                r.report.decay_exponent_fit
            );
        }
    }

    #[test]
    fn km_scalar_case_matches_scalar_routine() {
        let km = km_block_test(1, 1, 400).unwrap();
        let (_, _, scalar) = scalar_zero_solutions(801).unwrap();
        assert_eq!(km.report.verdict, scalar.verdict);
        assert_eq!(
            (km.report.n_plus, km.report.n_minus),
            (scalar.n_plus, scalar.n_minus)
        );
        // Same chains: block norms are the squared scalar solution values.
        assert!((km.first_chain_sq[1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn km_norm_side_conditions() {
        let r = km_block_test(1, 1, 400).unwrap();
        assert_eq!(r.log_concavity_exact_from, Some(2));
        assert!(r.inv_norm_partial_sum.is_finite());
        assert_eq!(r.inv_norm_class.verdict, SeriesVerdict::Convergent);
        assert!((r.inv_norm_class.alpha - 1.5).abs() < 0.05);

        let r = km_block_test(2, 3, 400).unwrap();
        assert_eq!(r.log_concavity_exact_from, None);
        assert!(r.log_concavity_scalar_from.is_some());
        assert!((r.inv_norm_class.alpha - 3.5).abs() < 0.05);
    }

    #[test]
    fn offdiag_inverse_partial_sums_bounded() {
        let mut acc = CompensatedSum::new();
        for n in 1..=100_000usize {
            acc.add(1.0 / gribov_offdiag(n));
        }
        assert!(acc.value() < 2.7);
    }

    #[test]
    fn report_json_schema() {
        let (_, _, report) = scalar_zero_solutions(500).unwrap();
        let v = serde_json::to_value(report).unwrap();
        assert_eq!(v["verdict"], "completely_indeterminate");
        assert_eq!(v["n_plus"], 1);
        assert!(v["tail_even"].as_f64().unwrap() > 0.0);
        assert!(v["decay_fit"].as_f64().unwrap() < 0.0);
    }
}
