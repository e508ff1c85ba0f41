//! Exact arithmetic in the cyclotomic integers `Z[ζ_p]`.
//!
//! Values are kept in the power basis `1, ζ, ..., ζ^{p-2}`, so two values are
//! equal exactly when their coefficient vectors are equal. For `p = 2` there is a
//! single coefficient and `ζ = -1`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::is_prime;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u64) -> CycInt {
        CycInt { p, coeffs: vec![BigInt::zero(); (p - 1) as usize] }
    }

    pub fn one(p: u64) -> CycInt {
        CycInt::from_int(p, 1)
    }

    pub fn from_int<T: Into<BigInt>>(p: u64, n: T) -> CycInt {
        let mut c = CycInt::zero(p);
        c.coeffs[0] = n.into();
        c
    }

    /// Builds a value from power-basis coefficients; `p` must be prime and the
    /// vector must have length `p - 1`.
    pub fn from_coeffs(p: u64, coeffs: Vec<BigInt>) -> Result<CycInt> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if coeffs.len() as u64 != p - 1 {
            return Err(Error::Dimension { expected: (p - 1) as usize, got: coeffs.len() });
        }
        Ok(CycInt { p, coeffs })
    }

    /// Reduces a length-`p` vector of coefficients of `1, ζ, ..., ζ^{p-1}`.
    pub fn from_full(p: u64, full: &[BigInt]) -> CycInt {
        debug_assert_eq!(full.len() as u64, p);
        let top = &full[(p - 1) as usize];
        let coeffs = full[..(p - 1) as usize].iter().map(|c| c - top).collect();
        CycInt { p, coeffs }
    }

    /// Reduces a histogram `counts[e] = #{x : character exponent e}`.
    pub fn from_histogram(p: u64, counts: &[u64]) -> CycInt {
        let full: Vec<BigInt> = counts.iter().map(|&c| BigInt::from(c)).collect();
        CycInt::from_full(p, &full)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `c_0` when every other coefficient vanishes.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn try_add(&self, other: &CycInt) -> Result<CycInt> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn try_sub(&self, other: &CycInt) -> Result<CycInt> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn try_mul(&self, other: &CycInt) -> Result<CycInt> {
        self.check(other)?;
        let p = self.p as usize;
        if p == 2 {
            return Ok(CycInt::from_int(2, &self.coeffs[0] * &other.coeffs[0]));
        }
        // multiply in Z[X]/(X^p - 1) then eliminate ζ^{p-1}
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    full[(i + j) % p] += a * b;
                }
            }
        }
        Ok(CycInt::from_full(self.p, &full))
    }

    pub fn scale(&self, k: &BigInt) -> CycInt {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Multiplies by `ζ^e`.
    pub fn mul_root(&self, e: i64) -> CycInt {
        let p = self.p as usize;
        let e = e.rem_euclid(p as i64) as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(i + e) % p] += c;
        }
        CycInt::from_full(self.p, &full)
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> CycInt {
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(p - i) % p] += c;
        }
        CycInt::from_full(self.p, &full)
    }

    pub fn pow(&self, mut e: u32) -> CycInt {
        let mut acc = CycInt::one(self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// If the value is `±ζ^e`, returns `(sign, e)` with `e` in `[0, p)`.
    pub fn as_signed_root(&self) -> Option<(i8, u64)> {
        let p = self.p;
        for e in 0..p {
            for sign in [1i8, -1] {
                if *self == root_power(p, e as i64).scale(&BigInt::from(sign)) {
                    return Some((sign, e));
                }
            }
        }
        None
    }

    pub fn to_complex(&self) -> Complex64 {
        let p = self.p as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / p;
                Complex64::from_polar(1.0, theta) * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }

    /// Matrix of multiplication by `self` on the power basis. Column `j` holds the
    /// coordinates of `self * ζ^j`.
    pub fn regular_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = (self.p - 1) as usize;
        let cols: Vec<CycInt> = (0..d).map(|j| self.mul_root(j as i64)).collect();
        (0..d).map(|i| (0..d).map(|j| cols[j].coeffs[i].clone()).collect()).collect()
    }

    fn check(&self, other: &CycInt) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.p, other.p))
        }
    }
}

/// `ζ_p^{e mod p}` in canonical form.
pub fn root_power(p: u64, e: i64) -> CycInt {
    CycInt::one(p).mul_root(e)
}

/// Complex value of a power-basis vector; errors when `p` is not prime.
pub fn to_complex(p: u64, coeffs: &[BigInt]) -> Result<Complex64> {
    Ok(CycInt::from_coeffs(p, coeffs.to_vec())?.to_complex())
}

const MISMATCH: &str = "cyclotomic integers over different primes";

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.try_add(rhs).expect(MISMATCH)
    }
}

impl Add for CycInt {
    type Output = CycInt;
    fn add(self, rhs: CycInt) -> CycInt {
        &self + &rhs
    }
}

impl AddAssign<&CycInt> for CycInt {
    fn add_assign(&mut self, rhs: &CycInt) {
        assert_eq!(self.p, rhs.p, "{MISMATCH}");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.try_sub(rhs).expect(MISMATCH)
    }
}

impl Sub for CycInt {
    type Output = CycInt;
    fn sub(self, rhs: CycInt) -> CycInt {
        &self - &rhs
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.try_mul(rhs).expect(MISMATCH)
    }
}

impl Mul for CycInt {
    type Output = CycInt;
    fn mul(self, rhs: CycInt) -> CycInt {
        &self * &rhs
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_integer() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let unit = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if i == 0 {
                write!(f, "{sign}{mag}")?;
            } else if mag.is_one() {
                write!(f, "{sign}{unit}")?;
            } else {
                write!(f, "{sign}{mag}{unit}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycIntRecord {
    p: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycIntRecord { p: self.p, coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<CycInt, D::Error> {
        use serde::de::Error as _;
        let rec = CycIntRecord::deserialize(d)?;
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycInt::from_coeffs(rec.p, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(p: u64, c: &[i64]) -> CycInt {
        CycInt::from_coeffs(p, c.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
    }

    #[test]
    fn reduction_for_p3() {
        let z = root_power(3, 1);
        assert_eq!(&z + &root_power(3, 2), cyc(3, &[-1, 0]));
        assert_eq!(&z * &z, cyc(3, &[-1, -1]));
        assert_eq!(root_power(3, 0), CycInt::one(3));
        assert_eq!(root_power(2, 1), CycInt::from_int(2, -1));
    }

    #[test]
    fn roots_of_unity_sum_to_minus_one() {
        let s = (1..5).fold(CycInt::zero(5), |acc, e| acc + root_power(5, e));
        assert_eq!(s, CycInt::from_int(5, -1));
    }

    #[test]
    fn integer_detection() {
        assert_eq!(CycInt::from_int(3, 5).as_integer(), Some(BigInt::from(5)));
        assert_eq!(root_power(3, 1).as_integer(), None);
        let v = &(&-&CycInt::one(3) - &root_power(3, 1)) - &root_power(3, 2);
        assert_eq!((&v + &CycInt::one(3)).as_integer(), Some(BigInt::from(1)));
    }

    #[test]
    fn complex_values() {
        let z = root_power(3, 1).to_complex();
        assert!((z - Complex64::new(-0.5, 0.8660254037844386)).norm() < 1e-12);
        assert!((CycInt::one(7).to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(to_complex(4, &[BigInt::from(1), BigInt::from(0), BigInt::from(0)]).is_err());
    }

    #[test]
    fn regular_matrix_of_zeta() {
        let m = root_power(3, 1).regular_matrix();
        let want: Vec<Vec<BigInt>> =
            vec![vec![0.into(), (-1).into()], vec![1.into(), (-1).into()]];
        assert_eq!(m, want);
        assert_eq!(CycInt::one(5).regular_matrix()[2][2], BigInt::from(1));
    }

    #[test]
    fn mismatched_primes() {
        assert_eq!(CycInt::one(3).try_add(&CycInt::one(5)).unwrap_err(), Error::PrimeMismatch(3, 5));
    }

    #[test]
    fn serde_round_trip() {
        let v = cyc(5, &[1, -2, 0, 123456789012]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"p":5,"coeffs":["1","-2","0","123456789012"]}"#);
        assert_eq!(serde_json::from_str::<CycInt>(&s).unwrap(), v);
    }

    #[test]
    fn signed_roots() {
        assert_eq!(root_power(5, 3).as_signed_root(), Some((1, 3)));
        assert_eq!((-&root_power(7, 2)).as_signed_root(), Some((-1, 2)));
        assert_eq!(CycInt::from_int(3, 2).as_signed_root(), None);
    }

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
            .collect()
    }

    fn arb_cyc(p: u64) -> impl Strategy<Value = CycInt> {
        proptest::collection::vec(-20i64..20, (p - 1) as usize).prop_map(move |v| cyc(p, &v))
    }

    fn arb_triple() -> impl Strategy<Value = (CycInt, CycInt, CycInt)> {
        prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
            .prop_flat_map(|p| (arb_cyc(p), arb_cyc(p), arb_cyc(p)))
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn regular_matrix_is_multiplicative((a, b, _c) in arb_triple()) {
            prop_assert_eq!((&a * &b).regular_matrix(), mat_mul(&a.regular_matrix(), &b.regular_matrix()));
        }

        #[test]
        fn roots_have_unit_modulus(p in prop_oneof![Just(2u64), Just(3), Just(5), Just(11), Just(13)], e in -40i64..40) {
            prop_assert!((root_power(p, e).to_complex().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn conjugation_matches_complex((a, _b, _c) in arb_triple()) {
            prop_assert!((a.conj().to_complex() - a.to_complex().conj()).norm() < 1e-6);
        }
    }
}
