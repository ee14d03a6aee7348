//! Shared numeric helpers: overflow-safe log-factorials, compensated sums,
//! least-squares fits and the deterministic test-vector generator.

use std::sync::OnceLock;

/// Largest index covered by the cached `ln(n!)` table.  Everything the crate
/// computes stays far below this; beyond it a Stirling series takes over.
const LNFACT_TABLE_LEN: usize = 1 << 17;

fn lnfact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Compensated cumulative sum of ln k.  Ratios of nearby entries then
        // cancel their shared prefix exactly, which matters for the factorial
        // quotients sqrt(k!(k+m)!)/(k-p)! evaluated up to k ~ 1e4.
        let mut table = Vec::with_capacity(LNFACT_TABLE_LEN + 1);
        table.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=LNFACT_TABLE_LEN {
            let term = (k as f64).ln() + comp;
            let new_sum = sum + term;
            comp = term - (new_sum - sum);
            sum = new_sum;
            table.push(sum);
        }
        table
    })
}

/// `ln(n!)` with absolute error at the rounding level of the result.
pub fn ln_factorial(n: usize) -> f64 {
    let table = lnfact_table();
    if n < table.len() {
        return table[n];
    }
    // Stirling series; the n^-7 remainder is far below rounding here.
    let x = n as f64;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Neumaier-compensated accumulator for long fixed-order sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Deterministic linear congruential generator for reproducible test vectors.
///
/// state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64),
/// and `next_f64` maps the top 53 bits into [0, 1).  The constants are fixed
/// as part of the output contract (see docs/io.md in the workspace root).
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Ordinary least squares for y = a + b x.  Returns (a, b, stderr_a).
///
/// `stderr_a` is the usual regression standard error of the intercept with
/// N - 2 residual degrees of freedom; zero when the fit is exact.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    assert!(n >= 3, "need at least three points for a fit with stderr");
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let b = sxy / sxx;
    let a = mean_y - b * mean_x;
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - a - b * x;
        rss += r * r;
    }
    let s2 = rss / (nf - 2.0);
    let var_a = s2 * (1.0 / nf + mean_x * mean_x / sxx);
    (a, b, var_a.max(0.0).sqrt())
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (_, slope, _) = linear_fit(&lx, &ly);
    slope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        assert!((ln_factorial(20) - 2.43290200817664e18f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_factorial_matches_stirling_past_table() {
        // The table/Stirling seam must be smooth.
        let n = LNFACT_TABLE_LEN;
        let inside = ln_factorial(n);
        let outside = ln_factorial(n + 1);
        let expected_step = ((n + 1) as f64).ln();
        assert!((outside - inside - expected_step).abs() < 1e-9);
    }

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg::new(17);
        let mut b = Lcg::new(17);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Lcg::new(17);
        let x = c.next_f64();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (1..50).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let (a, b, se) = linear_fit(&xs, &ys);
        assert!((a - 3.0).abs() < 1e-12);
        assert!((b + 2.0).abs() < 1e-13);
        assert!(se < 1e-12);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10_000_000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-9)).abs() < 1e-15);
    }
}
