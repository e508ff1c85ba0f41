//! Legendre symbols, quadratic Gauss sums, p-adic valuations, the
//! Eisenstein–Dumas criterion, and checks on the quadratic matrix `M(p)`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{root_power, CycInt};
use crate::error::{Error, Result};
use crate::galois::is_prime;
use crate::recurrence::IntPolynomial;
use crate::transfer::quadratic_matrix;

/// Largest prime accepted by [`eigen_check`].
pub const EIGEN_MAX_P: u64 = 101;

/// Tolerance used when comparing numeric eigenvalues with the closed form.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

fn odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::OutOfRange("p must be an odd prime".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    odd_prime(p)?;
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(0);
    }
    let mut acc = 1u128;
    let mut base = a as u128;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    Ok(if acc == 1 { 1 } else { -1 })
}

/// `g(a; p) = Σ_{k mod p} ζ^{a k^2}` exactly.
pub fn gauss_sum(a: i64, p: u64) -> Result<CycInt> {
    odd_prime(p)?;
    let a = a.rem_euclid(p as i64) as u64;
    let mut counts = vec![0u64; p as usize];
    for k in 0..p {
        counts[((a as u128 * k as u128 * k as u128) % p as u128) as usize] += 1;
    }
    Ok(CycInt::from_histogram(p, &counts))
}

/// Closed form of `g(1; p)`: `√p` when `p ≡ 1 (mod 4)`, else `i√p`.
pub fn gauss_sum_closed_form(p: u64) -> Complex64 {
    let r = (p as f64).sqrt();
    if p % 4 == 1 {
        Complex64::new(r, 0.0)
    } else {
        Complex64::new(0.0, r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Largest `e` with `p^e | m`; infinite for `m = 0`.
pub fn valuation(m: &BigInt, p: u64) -> Valuation {
    if m.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p);
    let mut m = m.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Valuation::Finite(e);
        }
        m = q;
        e += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrreducibilityVerdict {
    Irreducible,
    NotApplicable,
}

/// Eisenstein–Dumas: `f` of degree `n` is irreducible over `Q` when
/// `ν(a_n) = 0`, `ν(a_{n-i}) / i > ν(a_0) / n` for `1 <= i < n`, and
/// `gcd(ν(a_0), n) = 1`. Failing any condition yields `NotApplicable`.
pub fn eisenstein_dumas(f: &IntPolynomial, p: u64) -> Result<IrreducibilityVerdict> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = f.degree();
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let a = f.coeffs();
    let na = IrreducibilityVerdict::NotApplicable;
    if valuation(&a[n], p) != Valuation::Finite(0) {
        return Ok(na);
    }
    let Some(v0) = valuation(&a[0], p).finite() else {
        return Ok(na);
    };
    if (v0 as usize).gcd(&n) != 1 {
        return Ok(na);
    }
    for i in 1..n {
        if let Valuation::Finite(v) = valuation(&a[n - i], p) {
            if v as usize * n <= v0 as usize * i {
                return Ok(na);
            }
        }
    }
    Ok(IrreducibilityVerdict::Irreducible)
}

fn c64(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Numeric eigenvalues of `M(p)` against `λ_a = (-2/p) g(1;p) ζ^{-s a^2}`, `s = (p-1)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub p: u64,
    /// `(λ_a, expected multiplicity)` for `a = 0..=s`.
    pub predicted: Vec<([f64; 2], usize)>,
    pub numeric: Vec<[f64; 2]>,
    /// Numeric eigenvalues matched to each predicted value, in the same order.
    pub matched_multiplicities: Vec<usize>,
    pub max_deviation: f64,
    pub max_modulus_error: f64,
    pub tolerance: f64,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
            && self.max_modulus_error <= self.tolerance
            && self.predicted.iter().map(|(_, m)| *m).eq(self.matched_multiplicities.iter().copied())
    }
}

pub fn eigen_check(p: u64) -> Result<EigenReport> {
    odd_prime(p)?;
    if p > EIGEN_MAX_P {
        return Err(Error::OutOfRange(format!("eigen_check supports p <= {EIGEN_MAX_P}")));
    }
    let m = quadratic_matrix(p)?;
    let n = p as usize;
    let dm = DMatrix::from_fn(n, n, |i, j| m[i][j].to_complex());
    let numeric: Vec<Complex64> = dm
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Consistency("Schur decomposition did not converge".into()))?
        .iter()
        .copied()
        .collect();

    let s = (p - 1) / 2;
    let g = gauss_sum_closed_form(p) * legendre(-2, p)? as f64;
    let predicted: Vec<(Complex64, usize)> = (0..=s)
        .map(|a| {
            let e = -((s * a * a % p) as i64);
            (g * root_power(p, e).to_complex(), if a == 0 { 1 } else { 2 })
        })
        .collect();

    // greedy nearest-neighbour pairing against the multiset of predictions
    let mut remaining: Vec<usize> = predicted.iter().map(|(_, m)| *m).collect();
    let mut matched = vec![0usize; predicted.len()];
    let mut max_dev = 0f64;
    let mut order: Vec<Complex64> = numeric.clone();
    order.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)));
    for z in &order {
        let best = (0..predicted.len())
            .filter(|&i| remaining[i] > 0)
            .min_by(|&i, &j| (z - predicted[i].0).norm().partial_cmp(&(z - predicted[j].0).norm()).unwrap_or(Ordering::Equal));
        match best {
            Some(i) => {
                remaining[i] -= 1;
                matched[i] += 1;
                max_dev = max_dev.max((z - predicted[i].0).norm());
            }
            None => max_dev = f64::INFINITY,
        }
    }
    let sqrt_p = (p as f64).sqrt();
    let max_modulus_error = predicted.iter().map(|(l, _)| (l.norm() - sqrt_p).abs()).fold(0.0, f64::max);
    Ok(EigenReport {
        p,
        predicted: predicted.iter().map(|(l, m)| (c64(*l), *m)).collect(),
        numeric: order.into_iter().map(c64).collect(),
        matched_multiplicities: matched,
        max_deviation: max_dev,
        max_modulus_error,
        tolerance: EIGEN_TOLERANCE,
    })
}

/// True iff every entry is `±ζ^e` and `M · conj(M)^T = n I` exactly.
pub fn hadamard_check(m: &[Vec<CycInt>]) -> Result<bool> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::NotSquare);
    }
    if n == 0 {
        return Ok(true);
    }
    if m.iter().flatten().any(|e| e.as_signed_root().is_none()) {
        return Ok(false);
    }
    let p = m[0][0].p();
    for i in 0..n {
        for j in 0..n {
            let mut acc = CycInt::zero(p);
            for k in 0..n {
                acc += &(&m[i][k] * &m[j][k].conj());
            }
            let want = if i == j { CycInt::from_int(p, n as i64) } else { CycInt::zero(p) };
            if acc != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn primes_to(n: u64) -> Vec<u64> {
        (3..=n).filter(|&p| is_prime(p)).collect()
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(1, 7).unwrap(), 1);
        assert_eq!(legendre(-1, 3).unwrap(), -1);
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(14, 7).unwrap(), 0);
        assert!(legendre(1, 2).is_err());
        assert!(legendre(1, 9).is_err());
    }

    #[test]
    fn gauss_sums_numeric() {
        assert!((gauss_sum(1, 5).unwrap().to_complex() - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-9);
        assert!((gauss_sum(1, 3).unwrap().to_complex() - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-9);
        let g = gauss_sum(3, 7).unwrap();
        assert_eq!(&g * &g, CycInt::from_int(7, -7));
    }

    #[test]
    fn gauss_sum_identities() {
        for p in primes_to(50) {
            let g1 = gauss_sum(1, p).unwrap();
            assert_eq!(&g1 * &g1, CycInt::from_int(p, legendre(-1, p).unwrap() as i64 * p as i64));
            for a in 0..p as i64 {
                let l = BigInt::from(legendre(a, p).unwrap());
                let want = if a == 0 { CycInt::from_int(p, p as i64) } else { g1.scale(&l) };
                assert_eq!(gauss_sum(a, p).unwrap(), want, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(0), 5), Valuation::Infinite);
        assert_eq!(valuation(&BigInt::from(12), 2), Valuation::Finite(2));
        assert_eq!(valuation(&BigInt::from(7), 3), Valuation::Finite(0));
        assert_eq!(valuation(&BigInt::from(-81), 3), Valuation::Finite(4));
    }

    #[test]
    fn eisenstein() {
        use IrreducibilityVerdict::*;
        assert_eq!(eisenstein_dumas(&poly(&[-2, 0, 1]), 2).unwrap(), Irreducible);
        assert_eq!(eisenstein_dumas(&poly(&[-6, -3, 0, 1]), 3).unwrap(), Irreducible);
        assert_eq!(eisenstein_dumas(&poly(&[-4, 0, 1]), 2).unwrap(), NotApplicable);
        assert_eq!(eisenstein_dumas(&poly(&[0, 0, 1]), 2).unwrap(), NotApplicable);
        assert_eq!(eisenstein_dumas(&poly(&[-2, 0, 2]), 2).unwrap(), NotApplicable);
        assert_eq!(eisenstein_dumas(&poly(&[5]), 5).unwrap_err(), Error::ConstantPolynomial);
    }

    #[test]
    fn hadamard() {
        for p in [3, 5, 7] {
            assert!(hadamard_check(&quadratic_matrix(p).unwrap()).unwrap());
        }
        let id = vec![
            vec![CycInt::one(3), CycInt::zero(3)],
            vec![CycInt::zero(3), CycInt::one(3)],
        ];
        assert!(!hadamard_check(&id).unwrap());
        assert_eq!(hadamard_check(&[vec![CycInt::one(3)], vec![]]).unwrap_err(), Error::NotSquare);
    }

    #[test]
    fn eigenvalues_of_small_cases() {
        let r3 = eigen_check(3).unwrap();
        assert_eq!(r3.predicted.len(), 2);
        let r5 = eigen_check(5).unwrap();
        assert!(r5.passed(), "{r5:?}");
        for z in &r5.numeric {
            assert!((Complex64::new(z[0], z[1]).norm() - 5f64.sqrt()).abs() < 1e-9);
        }
        let mut m7 = eigen_check(7).unwrap().matched_multiplicities;
        m7.sort();
        assert_eq!(m7, vec![1, 2, 2, 2]);
        assert!(eigen_check(103).is_err());
    }
}
