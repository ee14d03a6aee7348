//! Coefficient-space actions on Fock expansions.
//!
//! A function is carried as a finite window of coefficients against either
//! the Bargmann basis `e_n(z) = z^n / sqrt(n!)` or its imaginary-axis
//! counterpart `u_n(y) = y^n / sqrt(n!)`.  All operators here act linearly on
//! that window; factorial ratios are taken through log-gamma sums so entries
//! stay finite well past the `n ~ 85` overflow point of direct factorials.

use crate::numeric::ln_factorial;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which basis the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    #[serde(rename = "e")]
    E,
    #[serde(rename = "u")]
    U,
}

/// A finite complex coefficient window: entry `j` is the coefficient of the
/// basis element with index `start + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    basis: BasisKind,
    start: usize,
    entries: Vec<Complex64>,
}

/// Serialized form: `{"basis": "e"|"u", "start": int, "re": [..], "im": [..]}`.
#[derive(Serialize, Deserialize)]
struct CoefficientVectorRepr {
    basis: BasisKind,
    start: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CoefficientVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoefficientVectorRepr {
            basis: self.basis,
            start: self.start,
            re: self.entries.iter().map(|c| c.re).collect(),
            im: self.entries.iter().map(|c| c.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoefficientVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CoefficientVectorRepr::deserialize(d)?;
        if repr.re.len() != repr.im.len() {
            return Err(serde::de::Error::custom("re/im arrays differ in length"));
        }
        let entries = repr
            .re
            .iter()
            .zip(&repr.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        CoefficientVector::new(repr.basis, repr.start, entries).map_err(serde::de::Error::custom)
    }
}

impl CoefficientVector {
    /// Builds a vector, rejecting non-finite entries.
    pub fn new(basis: BasisKind, start: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Domain("coefficient entries must be finite".into()));
        }
        Ok(Self {
            basis,
            start,
            entries,
        })
    }

    pub fn zero(basis: BasisKind) -> Self {
        Self {
            basis,
            start: 0,
            entries: Vec::new(),
        }
    }

    /// The basis vector with a single unit coefficient at `index`.
    pub fn unit(basis: BasisKind, index: usize) -> Self {
        Self {
            basis,
            start: index,
            entries: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// One past the largest index in the window.
    pub fn end(&self) -> usize {
        self.start + self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Coefficient at absolute index `n` (zero outside the window).
    pub fn coeff(&self, n: usize) -> Complex64 {
        if n < self.start || n >= self.end() {
            Complex64::new(0.0, 0.0)
        } else {
            self.entries[n - self.start]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// self += alpha * other (windows are merged as needed).
    pub fn add_scaled(&mut self, alpha: Complex64, other: &Self) {
        assert_eq!(self.basis, other.basis, "basis mismatch in add_scaled");
        if other.entries.is_empty() || alpha == Complex64::new(0.0, 0.0) {
            return;
        }
        if self.entries.is_empty() {
            self.start = other.start;
            self.entries = other.entries.iter().map(|&c| alpha * c).collect();
            return;
        }
        let start = self.start.min(other.start);
        let end = self.end().max(other.end());
        let mut entries = vec![Complex64::new(0.0, 0.0); end - start];
        for (j, &c) in self.entries.iter().enumerate() {
            entries[self.start + j - start] = c;
        }
        for (j, &c) in other.entries.iter().enumerate() {
            entries[other.start + j - start] += alpha * c;
        }
        self.start = start;
        self.entries = entries;
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            basis: self.basis,
            start: self.start,
            entries: self.entries.iter().map(|&c| alpha * c).collect(),
        }
    }

    /// Drops exactly-zero coefficients at both window edges.
    pub fn trimmed(mut self) -> Self {
        while let Some(last) = self.entries.last() {
            if last.norm_sqr() == 0.0 {
                self.entries.pop();
            } else {
                break;
            }
        }
        let lead = self
            .entries
            .iter()
            .take_while(|c| c.norm_sqr() == 0.0)
            .count();
        if lead > 0 {
            self.entries.drain(..lead);
            self.start += lead;
        }
        if self.entries.is_empty() {
            self.start = 0;
        }
        self
    }

    /// Largest coefficient difference against another vector, window-blind.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.basis, other.basis);
        let start = self.start.min(other.start);
        let end = self.end().max(other.end());
        let mut worst = 0.0f64;
        for n in start..end {
            worst = worst.max((self.coeff(n) - other.coeff(n)).norm());
        }
        worst
    }
}

/// Parameters of the operator family: `mu`, `lambda` for the cubic
/// Hamiltonian, `p`, `m` for the generalized Heun operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub mu: f64,
    pub lambda: f64,
    pub p: usize,
    pub m: usize,
}

impl OperatorParams {
    pub fn new(mu: f64, lambda: f64, p: usize, m: usize) -> Result<Self> {
        if p < 1 || m < 1 {
            return Err(Error::Domain("p and m must be at least 1".into()));
        }
        Ok(Self { mu, lambda, p, m })
    }

    pub fn gribov(mu: f64, lambda: f64) -> Self {
        Self {
            mu,
            lambda,
            p: 1,
            m: 1,
        }
    }

    pub fn heun(p: usize, m: usize) -> Result<Self> {
        Self::new(0.0, 1.0, p, m)
    }
}

/// Off-diagonal entry of the Jacobi-Gribov matrix, `b_n = n sqrt(n+1)`.
pub fn gribov_offdiag(n: usize) -> f64 {
    n as f64 * ((n + 1) as f64).sqrt()
}

/// `sqrt(k!(k+m)!)/(k-p)!` through log-gamma sums; `None` when `k < p`.
pub fn heun_up_coefficient(k: usize, p: usize, m: usize) -> Option<f64> {
    if k < p {
        return None;
    }
    Some((0.5 * (ln_factorial(k) + ln_factorial(k + m)) - ln_factorial(k - p)).exp())
}

/// `sqrt(k!(k-m)!)/(k-p-m)!`; `None` when `k < p + m`.
pub fn heun_down_coefficient(k: usize, p: usize, m: usize) -> Option<f64> {
    if k < p + m {
        return None;
    }
    Some((0.5 * (ln_factorial(k) + ln_factorial(k - m)) - ln_factorial(k - p - m)).exp())
}

/// Annihilation: `A e_n = sqrt(n) e_{n-1}`, `A e_0 = 0`.
pub fn ladder_down(v: &CoefficientVector) -> CoefficientVector {
    assert_eq!(v.basis(), BasisKind::E, "ladder_down acts on the e-basis");
    let mut out = CoefficientVector::zero(BasisKind::E);
    for (j, &c) in v.entries().iter().enumerate() {
        let n = v.start() + j;
        if n >= 1 && c != Complex64::new(0.0, 0.0) {
            out.add_scaled(
                c * (n as f64).sqrt(),
                &CoefficientVector::unit(BasisKind::E, n - 1),
            );
        }
    }
    out.trimmed()
}

/// Creation: `A* e_n = sqrt(n+1) e_{n+1}`.
pub fn ladder_up(v: &CoefficientVector) -> CoefficientVector {
    assert_eq!(v.basis(), BasisKind::E, "ladder_up acts on the e-basis");
    let mut out = CoefficientVector::zero(BasisKind::E);
    for (j, &c) in v.entries().iter().enumerate() {
        let n = v.start() + j;
        if c != Complex64::new(0.0, 0.0) {
            out.add_scaled(
                c * ((n + 1) as f64).sqrt(),
                &CoefficientVector::unit(BasisKind::E, n + 1),
            );
        }
    }
    out.trimmed()
}

/// Tridiagonal action of `H_{mu,lambda}` on coefficients supported on
/// indices >= 1:
/// `out_n = mu n v_n + i lambda (b_{n-1} v_{n-1} + b_n v_{n+1})`.
pub fn gribov_apply(params: &OperatorParams, v: &CoefficientVector) -> CoefficientVector {
    assert_eq!(v.basis(), BasisKind::E, "gribov_apply acts on the e-basis");
    assert!(
        v.entries().is_empty() || v.start() >= 1,
        "gribov_apply needs start_index >= 1 (vacuum excluded)"
    );
    let i_lambda = Complex64::new(0.0, params.lambda);
    let mut out = CoefficientVector::zero(BasisKind::E);
    for (j, &c) in v.entries().iter().enumerate() {
        let n = v.start() + j;
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        out.add_scaled(
            c * params.mu * n as f64,
            &CoefficientVector::unit(BasisKind::E, n),
        );
        out.add_scaled(
            c * i_lambda * gribov_offdiag(n),
            &CoefficientVector::unit(BasisKind::E, n + 1),
        );
        if n >= 2 {
            out.add_scaled(
                c * i_lambda * gribov_offdiag(n - 1),
                &CoefficientVector::unit(BasisKind::E, n - 1),
            );
        }
    }
    out.trimmed()
}

/// Action of `H^{p,m} = A*^p (A^m + A*^m) A^p`:
/// zero below `p`, up-shift alone on `p <= k < p+m`, up- and down-shift from
/// `k >= p+m`.
pub fn heun_pm_apply(params: &OperatorParams, v: &CoefficientVector) -> CoefficientVector {
    assert_eq!(v.basis(), BasisKind::E, "heun_pm_apply acts on the e-basis");
    let (p, m) = (params.p, params.m);
    let mut out = CoefficientVector::zero(BasisKind::E);
    for (j, &c) in v.entries().iter().enumerate() {
        let k = v.start() + j;
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        if let Some(up) = heun_up_coefficient(k, p, m) {
            out.add_scaled(c * up, &CoefficientVector::unit(BasisKind::E, k + m));
        }
        if let Some(down) = heun_down_coefficient(k, p, m) {
            out.add_scaled(c * down, &CoefficientVector::unit(BasisKind::E, k - m));
        }
    }
    out.trimmed()
}

/// Weighted down-shift: coefficient at `k` feeds index `k-1` with weight
/// `omega_{k-1} = sqrt((k-1)!(k-1-m)!)/(k-1-p)!`.  Indices that would put a
/// negative integer under a factorial annihilate the term, matching the
/// `e_{-1} = 0` convention.
pub fn shift_apply(params: &OperatorParams, v: &CoefficientVector) -> CoefficientVector {
    assert_eq!(v.basis(), BasisKind::E, "shift_apply acts on the e-basis");
    let (p, m) = (params.p, params.m);
    let mut out = CoefficientVector::zero(BasisKind::E);
    for (j, &c) in v.entries().iter().enumerate() {
        let k = v.start() + j;
        if c == Complex64::new(0.0, 0.0) || k == 0 {
            continue;
        }
        let t = k - 1;
        if t < m || t < p {
            continue;
        }
        let w = (0.5 * (ln_factorial(t) + ln_factorial(t - m)) - ln_factorial(t - p)).exp();
        out.add_scaled(c * w, &CoefficientVector::unit(BasisKind::E, t));
    }
    out.trimmed()
}
