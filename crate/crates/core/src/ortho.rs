//! Polynomial families attached to the Jacobi-Gribov matrix and the
//! Gaussian-tail function.
//!
//! Three distinct P/Q pairs live here and are kept apart by [`PolyKind`]:
//!
//! * first/second kind polynomials of the Jacobi matrix with entries
//!   `b_n = n sqrt(n+1)` (evaluated in doubles by forward recurrence; the
//!   square roots rule out exact arithmetic);
//! * the derivative polynomials of `phi(u) = e^{u^2/2} int_u^inf e^{-s^2/2} ds`
//!   with `phi^(n) = P_n phi - Q_n` ("kouba" family, exact integers);
//! * the derivative polynomials of the plasma-dispersion generating function
//!   `e^{u^2} int_u^inf e^{-s^2} ds` ("plasma" family, exact integers).

use crate::basis::gribov_offdiag;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;

/// Which polynomial family a coefficient list belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    First,
    Second,
    KoubaP,
    KoubaQ,
    PlasmaP,
    PlasmaQ,
}

impl PolyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolyKind::First => "first",
            PolyKind::Second => "second",
            PolyKind::KoubaP => "kouba_P",
            PolyKind::KoubaQ => "kouba_Q",
            PolyKind::PlasmaP => "plasma_P",
            PolyKind::PlasmaQ => "plasma_Q",
        }
    }
}

/// Exact integer-coefficient polynomial, ascending powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySeq {
    pub kind: PolyKind,
    pub coeffs: Vec<BigInt>,
}

impl PolySeq {
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != BigInt::from(0))
            .unwrap_or(0)
    }

    /// Horner evaluation in doubles (tests only need moderate degrees).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + bigint_to_f64(c);
        }
        acc
    }
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    // Adequate for the degrees exercised here; coefficients stay well inside
    // the f64 exponent range for n <= 60.
    x.to_string().parse::<f64>().unwrap()
}

/// First- and second-kind polynomials at `x`, by forward three-term
/// recurrence from `P_1 = 1, P_2 = x/b_1` and `Q_1 = 0, Q_2 = 1/b_1`.
pub fn first_second_eval(n: usize, x: Complex64) -> (Complex64, Complex64) {
    assert!(n >= 1);
    let b1 = gribov_offdiag(1);
    let mut p = (Complex64::new(1.0, 0.0), x / b1);
    let mut q = (Complex64::new(0.0, 0.0), Complex64::new(1.0 / b1, 0.0));
    if n == 1 {
        return (p.0, q.0);
    }
    for k in 2..n {
        let bk = gribov_offdiag(k);
        let bk1 = gribov_offdiag(k - 1);
        p = (p.1, (x * p.1 - bk1 * p.0) / bk);
        q = (q.1, (x * q.1 - bk1 * q.0) / bk);
    }
    (p.1, q.1)
}

/// `|b_n (P_n Q_{n+1} - P_{n+1} Q_n) - 1|`: the discrete Wronskian of the
/// first/second-kind pair is `1/b_n` for every argument.
pub fn wronskian_residual(n: usize, x: Complex64) -> f64 {
    assert!(n >= 1);
    let (pn, qn) = first_second_eval(n, x);
    let (pn1, qn1) = first_second_eval(n + 1, x);
    let w = gribov_offdiag(n) * (pn * qn1 - pn1 * qn);
    (w - Complex64::new(1.0, 0.0)).norm()
}

/// Gaussian tail `phi(u) = e^{u^2/2} int_u^inf e^{-s^2/2} ds` for `u >= 0`.
///
/// Maclaurin series of the inner integral up to `u = 2`, and the Mills-ratio
/// continued fraction `phi = 1/(u + 1/(u + 2/(u + 3/(u + ...))))` beyond;
/// both truncated at a 1e-15 term ratio.  Satisfies `phi' = u phi - 1`.
pub fn phi_tail(u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("phi_tail needs u >= 0, got {u}")));
    }
    if u <= 2.0 {
        // int_0^u e^{-s^2/2} ds as an alternating series; at u = 2 the
        // cancellation against sqrt(pi/2) costs under two digits.
        let half_pi_sqrt = (std::f64::consts::PI / 2.0).sqrt();
        let mut term = u;
        let mut sum = u;
        let mut k = 1usize;
        loop {
            term *= -u * u / (2.0 * k as f64);
            let contrib = term / (2 * k + 1) as f64;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
            k += 1;
        }
        Ok((u * u / 2.0).exp() * (half_pi_sqrt - sum))
    } else {
        // Modified Lentz on F = u + 1/(u + 2/(u + 3/(...))); phi = 1/F.
        let tiny = 1e-300;
        let mut f = u.max(tiny);
        let mut c = f;
        let mut d = 0.0f64;
        let mut k = 1usize;
        loop {
            let a = k as f64;
            let b = u;
            d = b + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
            k += 1;
            if k > 10_000 {
                break;
            }
        }
        Ok(1.0 / f)
    }
}

/// Derivative polynomials of `phi`: `(P_0, Q_0) = (1, 0)`,
/// `P_{n+1} = x P_n + P_n'`, `Q_{n+1} = P_n + Q_n'`, exact integers.
pub fn kouba_polys(n: usize) -> (PolySeq, PolySeq) {
    assert!(n <= 60, "kouba coefficients are kept exact up to n = 60");
    let mut p = vec![BigInt::from(1)];
    let mut q = vec![BigInt::from(0)];
    for _ in 0..n {
        let p_next = poly_add(&shift_up(&p), &derivative(&p));
        let q_next = poly_add(&p, &derivative(&q));
        p = p_next;
        q = q_next;
    }
    (
        PolySeq {
            kind: PolyKind::KoubaP,
            coeffs: p,
        },
        PolySeq {
            kind: PolyKind::KoubaQ,
            coeffs: q,
        },
    )
}

/// Plasma-dispersion derivative polynomials `(P_n, Q_n)` from
/// `P_0 = 1, P_1 = 2x`, `Q_0 = 0, Q_1 = 1` and
/// `X_{n+1} = 2x X_n + 2n X_{n-1}`, together with the exact Wronskian-type
/// constant `Q_{n+1} P_n - P_{n+1} Q_n` (one further step is taken
/// internally to form it).
///
/// Fails with [`Error::IdentityViolation`] if that combination is not a
/// constant polynomial, which would signal an implementation bug.
pub fn plasma_polys(n: usize) -> Result<(PolySeq, PolySeq, BigInt)> {
    assert!(n <= 20, "plasma coefficients are kept exact up to n = 20");
    let mut p_pair = (
        vec![BigInt::from(1)],
        vec![BigInt::from(0), BigInt::from(2)],
    );
    let mut q_pair = (vec![BigInt::from(0)], vec![BigInt::from(1)]);
    for k in 1..=n {
        let step = |pair: &(Vec<BigInt>, Vec<BigInt>)| {
            let doubled: Vec<BigInt> = shift_up(&pair.1).iter().map(|c| c * 2).collect();
            let lagged: Vec<BigInt> = pair.0.iter().map(|c| c * (2 * k as i64)).collect();
            poly_add(&doubled, &lagged)
        };
        p_pair = (p_pair.1.clone(), step(&p_pair));
        q_pair = (q_pair.1.clone(), step(&q_pair));
    }
    // After the loop the pairs hold (X_n, X_{n+1}).
    let (pn, pn1) = (&p_pair.0, &p_pair.1);
    let (qn, qn1) = (&q_pair.0, &q_pair.1);
    let combo = poly_sub(&poly_mul(qn1, pn), &poly_mul(pn1, qn));
    for (deg, c) in combo.iter().enumerate().skip(1) {
        if *c != BigInt::from(0) {
            return Err(Error::IdentityViolation {
                n,
                detail: format!("degree-{deg} coefficient {c} is nonzero"),
            });
        }
    }
    let value = combo.first().cloned().unwrap_or_else(|| BigInt::from(0));
    Ok((
        PolySeq {
            kind: PolyKind::PlasmaP,
            coeffs: p_pair.0,
        },
        PolySeq {
            kind: PolyKind::PlasmaQ,
            coeffs: q_pair.0,
        },
        value,
    ))
}

fn shift_up(p: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(BigInt::from(0));
    out.extend_from_slice(p);
    out
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::from(0)];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * (k as i64))
        .collect()
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(|| BigInt::from(0));
            let y = b.get(k).cloned().unwrap_or_else(|| BigInt::from(0));
            x + y
        })
        .collect()
}

fn poly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(|| BigInt::from(0));
            let y = b.get(k).cloned().unwrap_or_else(|| BigInt::from(0));
            x - y
        })
        .collect()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn first_kind_seeds() {
        let (p1, q1) = first_second_eval(1, Complex64::new(7.0, 0.0));
        assert_eq!(p1, Complex64::new(1.0, 0.0));
        assert_eq!(q1, Complex64::new(0.0, 0.0));

        let (p2, q2) = first_second_eval(2, Complex64::new(5.0, 0.0));
        assert!((p2 - Complex64::new(5.0 / SQRT2, 0.0)).norm() < 1e-15);
        assert!((q2 - Complex64::new(1.0 / SQRT2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian_residual(1, Complex64::new(123.0, -4.0)), 0.0);
        assert!(wronskian_residual(20, Complex64::new(3.0, 0.0)) <= 1e-10);
        assert!(wronskian_residual(40, Complex64::new(0.0, 2.0)) <= 1e-9);
    }

    #[test]
    fn wronskian_over_complex_grid() {
        let grid: Vec<Complex64> = (0..20)
            .map(|k| {
                let t = k as f64 / 20.0 * std::f64::consts::TAU;
                Complex64::from_polar(2.5, t)
            })
            .collect();
        for n in 1..=60 {
            for &z in &grid {
                let r = wronskian_residual(n, z);
                assert!(r <= 1e-9, "n={n}, z={z}: residual {r}");
            }
        }
    }

    #[test]
    fn parity_of_first_kind() {
        // P_n(-x) = (-1)^{n-1} P_n(x).
        for n in 1..=60 {
            for &x in &[0.5, 1.0, 2.0, 5.0] {
                let (pn, _) = first_second_eval(n, Complex64::new(x, 0.0));
                let (pm, _) = first_second_eval(n, Complex64::new(-x, 0.0));
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                let err = (pm - sign * pn).norm();
                assert!(err <= 1e-10 * pn.norm().max(1.0), "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn canonical_recurrence_residual() {
        // b_{n-1} P_{n-1} + b_n P_{n+1} = x P_n with c_n = b_n.
        let x = Complex64::new(1.7, 0.0);
        for n in 2..=60 {
            let (pm, _) = first_second_eval(n - 1, x);
            let (pn, _) = first_second_eval(n, x);
            let (pp, _) = first_second_eval(n + 1, x);
            let resid = (gribov_offdiag(n - 1) * pm + gribov_offdiag(n) * pp - x * pn).norm();
            assert!(resid <= 1e-10 * pn.norm().max(1.0), "n={n}");
        }
    }

    #[test]
    fn phi_at_zero_and_large_argument() {
        let phi0 = phi_tail(0.0).unwrap();
        assert!((phi0 - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-14);

        let phi10 = phi_tail(10.0).unwrap();
        assert!(phi10 * 10.0 > 0.99 && phi10 * 10.0 < 1.0);

        assert!(phi_tail(-0.1).is_err());
    }

    #[test]
    fn phi_against_quadrature_oracle() {
        // Direct high-accuracy quadrature of the defining integral.
        for &u in &[0.3, 1.0, 1.9, 2.0, 2.1, 3.5, 6.0] {
            let tail = adaptive_simpson(&|s: f64| (-s * s / 2.0).exp(), u, u + 40.0, 1e-13);
            let expected = (u * u / 2.0).exp() * tail;
            let got = phi_tail(u).unwrap();
            assert!(
                (got - expected).abs() <= 1e-12 * expected,
                "u={u}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn phi_derivative_relation() {
        // phi' = u phi - 1 via a centred difference.
        let h = 1e-5;
        let lhs = (phi_tail(1.0 + h).unwrap() - phi_tail(1.0 - h).unwrap()) / (2.0 * h);
        let rhs = phi_tail(1.0).unwrap() - 1.0;
        assert!((lhs - rhs).abs() <= 1e-6);
    }

    #[test]
    fn phi_monotone_and_sandwiched() {
        let mut prev = phi_tail(0.0).unwrap();
        let mut u = 0.05;
        while u <= 20.0 {
            let v = phi_tail(u).unwrap();
            assert!(v > 0.0 && v < prev, "monotonicity fails at u={u}");
            if u >= 1.0 {
                assert!(u * v < 1.0, "upper sandwich fails at u={u}");
                assert!((u + 1.0 / u) * v > 1.0, "lower sandwich fails at u={u}");
            }
            prev = v;
            u += 0.05;
        }
    }

    #[test]
    fn kouba_small_cases() {
        let (p1, q1) = kouba_polys(1);
        assert_eq!(p1.coeffs, vec![BigInt::from(0), BigInt::from(1)]);
        assert_eq!(q1.coeffs, vec![BigInt::from(1)]);

        let (p2, _) = kouba_polys(2);
        assert_eq!(
            p2.coeffs,
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)]
        );
        // Second derivative of e^{x^2/2} is (1 + x^2) e^{x^2/2}.
        assert!((p2.eval_f64(1.5) - 3.25).abs() < 1e-12);
    }

    #[test]
    fn kouba_coefficients_nonnegative() {
        for n in 0..=60 {
            let (p, _) = kouba_polys(n);
            assert!(p.coeffs.iter().all(|c| *c >= BigInt::from(0)), "n={n}");
        }
    }

    #[test]
    fn plasma_identity_small_cases() {
        let (p0, q0, v0) = plasma_polys(0).unwrap();
        assert_eq!(v0, BigInt::from(1));
        assert_eq!(p0.coeffs, vec![BigInt::from(1)]);
        assert_eq!(q0.coeffs, vec![BigInt::from(0)]);

        // Identity at n = 1 uses P_2 = 4x^2 + 2 and Q_2 = 2x internally:
        // Q_2 P_1 - P_2 Q_1 = 4x^2 - (4x^2 + 2) = -2.
        let (p1, q1, v1) = plasma_polys(1).unwrap();
        assert_eq!(v1, BigInt::from(-2));
        assert_eq!(p1.coeffs, vec![BigInt::from(0), BigInt::from(2)]);
        assert_eq!(q1.coeffs, vec![BigInt::from(1)]);

        let (p2, _, _) = plasma_polys(2).unwrap();
        assert_eq!(
            p2.coeffs,
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(4)]
        );

        let (_, _, v5) = plasma_polys(5).unwrap();
        assert_eq!(v5, BigInt::from(-3840));
    }

    #[test]
    fn plasma_identity_to_20_and_parity() {
        let mut expected = BigInt::from(1);
        for n in 0..=20 {
            let (p, _, v) = plasma_polys(n).unwrap();
            assert_eq!(v, expected, "identity value at n={n}");
            expected *= BigInt::from(-2) * BigInt::from((n + 1) as i64);
            // P_n carries only every other power.
            for (deg, c) in p.coeffs.iter().enumerate() {
                if (p.degree() - deg) % 2 == 1 {
                    assert_eq!(*c, BigInt::from(0), "parity gap at n={n}, deg={deg}");
                }
            }
            assert!(p.coeffs.iter().all(|c| *c >= BigInt::from(0)));
        }
    }
}
