//! Scalar and block Jacobi truncations of the operator family.
//!
//! The scalar truncation is the n x n complex-symmetric tridiagonal matrix
//! with diagonal `mu k` and off-diagonal `i lambda b_k`, `b_k = k sqrt(k+1)`.
//! Its characteristic polynomial obeys
//!
//! `p_k(x) = (mu k - x) p_{k-1}(x) + lambda^2 b_{k-1}^2 p_{k-2}(x)`
//!
//! (the off-diagonal product is `(i lambda b)^2 = -lambda^2 b^2`, hence the
//! plus sign), which evaluates in O(n) with a running rescale.  Eigenvalues
//! come from simultaneous Aberth-Ehrlich iteration on that recurrence; the
//! truncations are complex symmetric, not Hermitian, so the usual symmetric
//! eigensolvers do not apply.

use crate::basis::gribov_offdiag;
use crate::numeric::ln_factorial;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

/// Rescale whenever the recurrence magnitude crosses 2^100.
const RESCALE_LIMIT: f64 = 1.2676506002282294e30;
const MAX_SWEEPS: usize = 3000;
/// Stop sweeping once this many consecutive sweeps convert no further root;
/// past moderate sizes the mid-spectrum roots of these non-normal
/// truncations sit inside the machine-epsilon pseudospectrum and will never
/// polish, while the extremal ones converge long before this fires.
const STALE_SWEEP_LIMIT: usize = 60;

/// Generator of the scalar truncation: diagonal `a_k = mu k`, off-diagonal
/// `i lambda b_k` with `b_k = k sqrt(k+1)`, indices `k = 1..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarJacobiSpec {
    pub mu: f64,
    pub lambda: f64,
    pub n: usize,
}

/// Characteristic polynomial value at a point, in scaled form:
/// `p_n(x) = value * exp(log_scale)` and likewise for the derivative.
#[derive(Debug, Clone, Copy)]
pub struct CharpolyEval {
    pub value: Complex64,
    pub derivative: Complex64,
    pub log_scale: f64,
}

/// Eigenvalues of one truncation, sorted by (real, imaginary) part, with the
/// scaled Newton residual `|p/p'| / max(1, |z|)` for every root.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

impl Serialize for SpectrumResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SpectrumResult", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("lambda", &self.lambda)?;
        let re: Vec<f64> = self.eigenvalues.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.eigenvalues.iter().map(|z| z.im).collect();
        st.serialize_field("eig_re", &re)?;
        st.serialize_field("eig_im", &im)?;
        st.serialize_field("residual", &self.residuals)?;
        st.end()
    }
}

/// One point of the `sigma_0(mu)` curve.
#[derive(Debug, Clone, Copy)]
pub struct Sigma0Point {
    pub mu: f64,
    pub sigma0: Complex64,
    pub residual: f64,
}

impl ScalarJacobiSpec {
    pub fn new(mu: f64, lambda: f64, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("truncation size must be at least 1".into()));
        }
        Ok(Self { mu, lambda, n })
    }

    pub fn diagonal(&self, k: usize) -> f64 {
        self.mu * k as f64
    }

    /// Radius of a disc containing every eigenvalue (row-sum bound).
    pub fn gershgorin_radius(&self) -> f64 {
        let mut r = 0.0f64;
        for k in 1..=self.n {
            let below = if k > 1 { gribov_offdiag(k - 1) } else { 0.0 };
            let above = if k < self.n { gribov_offdiag(k) } else { 0.0 };
            r = r.max(self.diagonal(k).abs() + self.lambda.abs() * (below + above));
        }
        r
    }

    /// Evaluates `det(H_n - x I)` and its x-derivative by the three-term
    /// recurrence, rescaling on the fly.
    pub fn charpoly_eval(&self, x: Complex64) -> CharpolyEval {
        let zero = Complex64::new(0.0, 0.0);
        let lam2 = self.lambda * self.lambda;
        // p_0 = 1, p_1 = a_1 - x; derivatives d_0 = 0, d_1 = -1.
        let mut p_prev = Complex64::new(1.0, 0.0);
        let mut p = Complex64::new(self.diagonal(1), 0.0) - x;
        let mut d_prev = zero;
        let mut d = Complex64::new(-1.0, 0.0);
        let mut log_scale = 0.0f64;
        for k in 2..=self.n {
            let ak = Complex64::new(self.diagonal(k), 0.0) - x;
            let b2 = lam2 * gribov_offdiag(k - 1).powi(2);
            let p_next = ak * p + b2 * p_prev;
            let d_next = ak * d - p + b2 * d_prev;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            let mag = p.norm().max(p_prev.norm());
            if mag > RESCALE_LIMIT || (mag > 0.0 && mag < 1.0 / RESCALE_LIMIT) {
                let inv = 1.0 / mag;
                p *= inv;
                p_prev *= inv;
                d *= inv;
                d_prev *= inv;
                log_scale += mag.ln();
            }
        }
        CharpolyEval {
            value: p,
            derivative: d,
            log_scale,
        }
    }

    /// Scaled Newton residual of a candidate root.
    fn root_residual(&self, z: Complex64) -> f64 {
        let ev = self.charpoly_eval(z);
        if ev.derivative.norm() == 0.0 {
            return ev.value.norm();
        }
        (ev.value / ev.derivative).norm() / z.norm().max(1.0)
    }

    /// The Aberth-Ehrlich iteration itself: starts on the Gershgorin circle
    /// (rotated off the real axis to break conjugation symmetry), sweeps in
    /// Gauss-Seidel order, freezes converged roots and stops early when a
    /// run of sweeps converts nothing more.  Returns every root candidate
    /// with its scaled residual, sorted by (real, imaginary) part.
    ///
    /// Sequential with a fixed update order, hence bit-deterministic.
    fn aberth(&self, tol: f64) -> (Vec<Complex64>, Vec<f64>) {
        let n = self.n;
        if n == 1 {
            return (vec![Complex64::new(self.diagonal(1), 0.0)], vec![0.0]);
        }
        let radius = self.gershgorin_radius().max(1.0);
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64 + 0.41;
                Complex64::from_polar(radius, theta)
            })
            .collect();
        let mut converged = vec![false; n];
        let mut stale = 0usize;

        for _sweep in 0..MAX_SWEEPS {
            let mut newly = 0usize;
            let mut all_done = true;
            for i in 0..n {
                if converged[i] {
                    continue;
                }
                let zi = z[i];
                let ev = self.charpoly_eval(zi);
                let newton = if ev.derivative.norm() > 0.0 {
                    ev.value / ev.derivative
                } else {
                    Complex64::new(1.0, 1.0)
                };
                if newton.norm() <= tol * zi.norm().max(1.0) {
                    converged[i] = true;
                    newly += 1;
                    continue;
                }
                all_done = false;
                let mut repulsion = Complex64::new(0.0, 0.0);
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        let diff = zi - zj;
                        if diff.norm() > 1e-300 {
                            repulsion += diff.inv();
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
                let step = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                z[i] = zi - step;
            }
            if all_done {
                break;
            }
            stale = if newly == 0 { stale + 1 } else { 0 };
            if stale >= STALE_SWEEP_LIMIT {
                break;
            }
        }

        let mut paired: Vec<(Complex64, f64)> = z
            .into_iter()
            .map(|zi| (zi, self.root_residual(zi)))
            .collect();
        paired.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        paired.into_iter().unzip()
    }

    /// All `n` eigenvalues by simultaneous Aberth-Ehrlich iteration, each
    /// polished to the scaled residual `tol`; [`Error::NonConvergence`] if
    /// any root stalls, which for these non-normal truncations signals
    /// eigenvalues beyond double-precision resolution rather than a fixable
    /// iteration budget.  `n` is capped at 4096.
    pub fn truncated_spectrum(&self, tol: f64) -> Result<SpectrumResult> {
        if tol <= 0.0 {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if self.n > 4096 {
            return Err(Error::Domain(
                "truncation size exceeds the 4096 ceiling".into(),
            ));
        }
        let (eigenvalues, residuals) = self.aberth(tol);
        for (i, &r) in residuals.iter().enumerate() {
            if r.is_nan() || r > tol {
                return Err(Error::NonConvergence {
                    index: i,
                    sweeps: MAX_SWEEPS,
                });
            }
        }
        Ok(SpectrumResult {
            n: self.n,
            mu: self.mu,
            lambda: self.lambda,
            eigenvalues,
            residuals,
        })
    }

    /// Newton polish of a seed root; returns the refined root and residual.
    fn newton_polish(&self, seed: Complex64, tol: f64) -> (Complex64, f64) {
        let mut z = seed;
        for _ in 0..100 {
            let ev = self.charpoly_eval(z);
            if ev.derivative.norm() == 0.0 {
                break;
            }
            let step = ev.value / ev.derivative;
            z -= step;
            if step.norm() <= 0.1 * tol * z.norm().max(1.0) {
                break;
            }
        }
        (z, self.root_residual(z))
    }
}

/// Direct Aberth runs are used up to this size; beyond it the bottom of the
/// spectrum is continued from a half-sized run and Newton-polished.
const SIGMA0_DIRECT_CEILING: usize = 600;
const SIGMA0_SEED_SIZE: usize = 512;
const SIGMA0_SEED_COUNT: usize = 24;

/// `sigma_0(mu)` over a grid: for each `mu`, the eigenvalue of minimal real
/// part of the n-truncation on the complement of the vacuum, taken over the
/// roots that reached the residual tolerance.  The imaginary part is carried
/// along, never dropped.
///
/// Bulk eigenvalues of large truncations sit inside the machine-epsilon
/// pseudospectrum and cannot be polished, but the extremal ones converge
/// exponentially in `n`; for `n` past the direct ceiling the lowest roots of
/// a 512-truncation (already converged to far below any `tol` of interest)
/// seed a Newton polish against the full-size characteristic polynomial, and
/// the reported residual is measured at the full size.
pub fn sigma0_curve(lambda: f64, mu_grid: &[f64], n: usize, tol: f64) -> Result<Vec<Sigma0Point>> {
    if tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let mut out = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        let spec = ScalarJacobiSpec::new(mu, lambda, n)?;
        let (roots, residuals) = if n <= SIGMA0_DIRECT_CEILING {
            spec.aberth(tol)
        } else {
            let base = ScalarJacobiSpec::new(mu, lambda, SIGMA0_SEED_SIZE)?;
            let (base_roots, base_res) = base.aberth(tol);
            let seeds: Vec<Complex64> = base_roots
                .iter()
                .zip(&base_res)
                .filter(|(_, &r)| r <= tol)
                .map(|(&z, _)| z)
                .take(SIGMA0_SEED_COUNT)
                .collect();
            let polished: Vec<(Complex64, f64)> = seeds
                .iter()
                .map(|&seed| spec.newton_polish(seed, tol))
                .collect();
            polished.into_iter().unzip()
        };
        let best = roots
            .iter()
            .zip(&residuals)
            .filter(|(_, &r)| r <= tol)
            .min_by(|a, b| a.0.re.total_cmp(&b.0.re));
        match best {
            Some((&sigma0, &residual)) => out.push(Sigma0Point {
                mu,
                sigma0,
                residual,
            }),
            None => {
                return Err(Error::NonConvergence {
                    index: 0,
                    sweeps: MAX_SWEEPS,
                })
            }
        }
    }
    Ok(out)
}

/// Generator of the block Jacobi matrix of `H^{p,m}`: zero diagonal blocks
/// and diagonal off-diagonal blocks `B_i` of order `m`.
///
/// Coordinates are counted along the operator's domain, whose basis starts at
/// `e_p`; coordinate `c >= 1` refers to `e_{p+c-1}`, so block entries are
/// `beta_c = sqrt(k!(k+m)!)/(k-p)!` with `k = p + c - 1`.  This keeps every
/// `B_i` invertible for all `p` (all entries strictly positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockJacobiSpec {
    pub p: usize,
    pub m: usize,
    pub blocks: usize,
}

/// Diagonal entries of one off-diagonal block with its exact norms: the
/// spectral norm of a positive diagonal matrix is its largest entry, and the
/// norm of the inverse is the reciprocal of the smallest.
#[derive(Debug, Clone)]
pub struct BlockEntries {
    pub entries: Vec<f64>,
    pub norm: f64,
    pub inv_norm: f64,
}

impl BlockJacobiSpec {
    pub fn new(p: usize, m: usize, blocks: usize) -> Result<Self> {
        if p < 1 || m < 1 {
            return Err(Error::Domain("p and m must be at least 1".into()));
        }
        if blocks < 1 {
            return Err(Error::Domain("need at least one block".into()));
        }
        Ok(Self { p, m, blocks })
    }

    /// Entry at coordinate `c >= 1`.
    pub fn beta(&self, c: usize) -> f64 {
        assert!(c >= 1);
        let k = self.p + c - 1;
        (0.5 * (ln_factorial(k) + ln_factorial(k + self.m)) - ln_factorial(k - self.p)).exp()
    }

    pub fn block_entries(&self, i: usize) -> BlockEntries {
        assert!(
            (1..=self.blocks).contains(&i),
            "block index {i} outside 1..={}",
            self.blocks
        );
        let entries: Vec<f64> = (1..=self.m)
            .map(|r| self.beta((i - 1) * self.m + r))
            .collect();
        let norm = entries.iter().cloned().fold(f64::MIN, f64::max);
        let min = entries.iter().cloned().fold(f64::MAX, f64::min);
        BlockEntries {
            entries,
            norm,
            inv_norm: 1.0 / min,
        }
    }

    /// Smallest tested index `i0 >= 2` from which
    /// `||B_{i-1}|| ||B_{i+1}|| <= 1 / ||B_i^{-1}||^2` holds through the end
    /// of the block range, with either the exact inverse norm (1/min entry)
    /// or the scalar-style simplification `||B_i^{-1}|| = 1/||B_i||`.
    ///
    /// With exact norms the inequality is genuinely false for m >= 2 at every
    /// large i (the blocks are not scalar), so `None` is a meaningful answer.
    pub fn log_concavity_start(&self, exact_inverse_norm: bool) -> Option<usize> {
        if self.blocks < 3 {
            return None;
        }
        let mut last_violation = None;
        for i in 2..=self.blocks - 1 {
            let prev = self.block_entries(i - 1);
            let here = self.block_entries(i);
            let next = self.block_entries(i + 1);
            let rhs = if exact_inverse_norm {
                1.0 / (here.inv_norm * here.inv_norm)
            } else {
                here.norm * here.norm
            };
            if prev.norm * next.norm > rhs {
                last_violation = Some(i);
            }
        }
        match last_violation {
            None => Some(2),
            Some(v) if v < self.blocks - 1 => Some(v + 1),
            Some(_) => None,
        }
    }
}
