//! Integer characteristic polynomials and the sequences they govern.
//!
//! A polynomial `c_0 + c_1 X + ... + c_d X^d` annihilates a sequence `s` when
//! `Σ c_i s(n + i) = 0` for every window that fits in the data. Sequence values
//! are cyclotomic integers and the integer coefficients act on them
//! coefficientwise, so every check here is exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::galois::FieldSpec;
use crate::numtheory::legendre;

/// Nonzero integer polynomial, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<IntPolynomial> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<IntPolynomial> {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> IntPolynomial {
        IntPolynomial { coeffs: vec![BigInt::one()] }
    }

    /// `X - a`.
    pub fn linear(a: BigInt) -> IntPolynomial {
        IntPolynomial { coeffs: vec![-a, BigInt::one()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial { coeffs: out }
    }

    pub fn pow(&self, e: u32) -> IntPolynomial {
        (0..e).fold(IntPolynomial::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Primitive integer multiple of a rational polynomial, with positive leading coefficient.
    fn from_rational(coeffs: &[BigRational]) -> Result<IntPolynomial> {
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let mut p = IntPolynomial::new(ints.into_iter().map(|c| c / &g).collect())?;
        if p.leading().is_negative() {
            p.coeffs.iter_mut().for_each(|c| *c = -&*c);
        }
        Ok(p)
    }

    /// Rational remainder of `self` modulo `divisor`.
    fn rem_rational(&self, divisor: &IntPolynomial) -> Vec<BigRational> {
        rat_rem(&self.to_rational(), &divisor.to_rational())
    }

    /// Parses ascending comma-separated coefficients, e.g. `-2,-2,0,1`.
    pub fn parse_ascending(s: &str) -> Result<IntPolynomial> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Syntax { pos: 0, msg: format!("bad coefficient `{}`", t.trim()) })
            })
            .collect::<Result<Vec<_>>>()?;
        IntPolynomial::new(coeffs)
    }
}

fn rat_trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let b = rat_trim(b.to_vec());
    let mut a = rat_trim(a.to_vec());
    let db = b.len() - 1;
    while a.len() > db && !a.is_empty() {
        let shift = a.len() - 1 - db;
        let c = a.last().unwrap() / b.last().unwrap();
        for (i, bi) in b.iter().enumerate() {
            a[shift + i] -= &c * bi;
        }
        a.pop();
        a = rat_trim(a);
    }
    a
}

fn rat_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut a, mut b) = (rat_trim(a.to_vec()), rat_trim(b.to_vec()));
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn rat_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut a = rat_trim(a.to_vec());
    let b = rat_trim(b.to_vec());
    let db = b.len() - 1;
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while a.len() > db {
        let shift = a.len() - 1 - db;
        let c = a.last().unwrap() / b.last().unwrap();
        for (i, bi) in b.iter().enumerate() {
            a[shift + i] -= &c * bi;
        }
        q[shift] = c;
        a.pop();
    }
    q
}

/// True when `a` divides `b` over the rationals.
pub fn divides(a: &IntPolynomial, b: &IntPolynomial) -> bool {
    b.rem_rational(a).is_empty()
}

/// Greatest common divisor over the rationals, as a primitive integer polynomial.
pub fn gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    IntPolynomial::from_rational(&rat_gcd(&a.to_rational(), &b.to_rational()))
        .expect("gcd of nonzero polynomials is nonzero")
}

/// Least common multiple over the rationals, as a primitive integer polynomial.
pub fn lcm(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let g = rat_gcd(&a.to_rational(), &b.to_rational());
    let quotient = rat_div_exact(&a.to_rational(), &g);
    let prod = IntPolynomial::from_rational(&quotient).unwrap().mul(b);
    IntPolynomial::from_rational(&prod.to_rational()).unwrap()
}

/// Exact quotient `b / a` when `a` divides `b` over the rationals.
pub fn quotient(b: &IntPolynomial, a: &IntPolynomial) -> Option<IntPolynomial> {
    divides(a, b).then(|| IntPolynomial::from_rational(&rat_div_exact(&b.to_rational(), &a.to_rational())).unwrap())
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mag = c.abs();
            let unit = match i {
                0 => String::new(),
                1 => "X".into(),
                _ => format!("X^{i}"),
            };
            if i > 0 && mag.is_one() {
                write!(f, "{sign}{unit}")?;
            } else {
                write!(f, "{sign}{mag}{unit}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<IntPolynomial, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<String>::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntPolynomial::new(coeffs).map_err(D::Error::custom)
    }
}

/// Named polynomial families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `X^k - 2(X^{k-2} + ... + X + 1)`.
    PK,
    /// `X^k - q Σ_{l=0}^{k-2} (q-1)^l X^{k-2-l}`.
    QTrap,
    /// `X^{k+1} - 2X^{k-1} - ... - 2X^3 - 4`.
    QK,
    /// `X^4 - p^2`.
    Rot2,
    /// `X^{2p} - (-1/p) p^p`.
    QuadSym,
    /// `X^k - 2X^{k-1} + 2`.
    Mix1,
    /// `X^k - 2X^{k-1} + 2X - 2`.
    Mix2,
    /// `X^k - 2(X^{k-2} + ... + X^2 + 1)`.
    Mix3,
}

impl Family {
    pub const ALL: [Family; 8] =
        [Family::PK, Family::QTrap, Family::QK, Family::Rot2, Family::QuadSym, Family::Mix1, Family::Mix2, Family::Mix3];

    pub fn name(self) -> &'static str {
        match self {
            Family::PK => "P_K",
            Family::QTrap => "Q_TRAP",
            Family::QK => "Q_K",
            Family::Rot2 => "ROT2",
            Family::QuadSym => "QUADSYM",
            Family::Mix1 => "MIX1",
            Family::Mix2 => "MIX2",
            Family::Mix3 => "MIX3",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm || f.name().replace('_', "") == norm)
            .ok_or_else(|| Error::OutOfRange(format!("unknown family `{s}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The polynomial of `family` at parameter `k` over `field`.
///
/// `ROT2` and `QUADSYM` ignore `k` and require an odd prime field.
pub fn family_poly(family: Family, k: usize, field: &FieldSpec) -> Result<IntPolynomial> {
    let need_k = |min: usize| {
        if k < min {
            Err(Error::OutOfRange(format!("{family} needs k >= {min}, got {k}")))
        } else {
            Ok(())
        }
    };
    let two = BigInt::from(2);
    let mut c = vec![BigInt::zero(); k + 1];
    match family {
        Family::PK => {
            need_k(2)?;
            c[k] = BigInt::one();
            c[..=k - 2].iter_mut().for_each(|x| *x = -&two);
        }
        Family::QTrap => {
            need_k(2)?;
            let q = BigInt::from(field.q());
            let qm1 = &q - 1;
            c[k] = BigInt::one();
            let mut pow = BigInt::one();
            for l in 0..=k - 2 {
                c[k - 2 - l] = -(&q * &pow);
                pow *= &qm1;
            }
        }
        Family::QK => {
            need_k(4)?;
            c = vec![BigInt::zero(); k + 2];
            c[k + 1] = BigInt::one();
            c[3..k].iter_mut().for_each(|x| *x = -&two);
            c[0] = BigInt::from(-4);
        }
        Family::Rot2 | Family::QuadSym => {
            let p = field.p();
            if !field.is_prime_field() || p == 2 {
                return Err(Error::Unsupported(format!("{family} needs an odd prime field")));
            }
            let pb = BigInt::from(p);
            if family == Family::Rot2 {
                c = vec![-(&pb * &pb), BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::one()];
            } else {
                let d = 2 * p as usize;
                c = vec![BigInt::zero(); d + 1];
                c[d] = BigInt::one();
                c[0] = -BigInt::from(legendre(-1, p)?) * num_traits::pow(pb, p as usize);
            }
        }
        Family::Mix1 => {
            need_k(3)?;
            c[k] = BigInt::one();
            c[k - 1] = -&two;
            c[0] = two;
        }
        Family::Mix2 => {
            need_k(4)?;
            c[k] = BigInt::one();
            c[k - 1] = -&two;
            c[1] = two.clone();
            c[0] = -two;
        }
        Family::Mix3 => {
            need_k(4)?;
            c[k] = BigInt::one();
            c[0] = -&two;
            c[2..=k - 2].iter_mut().for_each(|x| *x = -&two);
        }
    }
    IntPolynomial::new(c)
}

/// How the values in a [`Sequence`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Brute,
    Transfer,
    Recurrence,
    Conjecture,
}

/// Values `s(n_min), s(n_min + 1), ...` in `Z[ζ_p]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    pub p: u64,
    pub n_min: i64,
    pub values: Vec<CycInt>,
    pub provenance: Provenance,
}

impl Sequence {
    pub fn new(p: u64, n_min: i64, values: Vec<CycInt>, provenance: Provenance) -> Result<Sequence> {
        if let Some(v) = values.iter().find(|v| v.p() != p) {
            return Err(Error::PrimeMismatch(p, v.p()));
        }
        Ok(Sequence { p, n_min, values, provenance })
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(p: u64, n_min: i64, values: &[T], provenance: Provenance) -> Sequence {
        let values = values.iter().map(|v| CycInt::from_int(p, v.clone())).collect();
        Sequence { p, n_min, values, provenance }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last index.
    pub fn n_end(&self) -> i64 {
        self.n_min + self.values.len() as i64
    }

    pub fn get(&self, n: i64) -> Option<&CycInt> {
        if n < self.n_min {
            return None;
        }
        self.values.get((n - self.n_min) as usize)
    }

    /// Integer values, when every term is rational.
    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        self.values.iter().map(|v| v.as_integer()).collect()
    }

    /// The terms with index in `[lo, hi)`.
    pub fn window(&self, lo: i64, hi: i64) -> Sequence {
        let lo = lo.max(self.n_min);
        let hi = hi.min(self.n_end()).max(lo);
        let values = self.values[(lo - self.n_min) as usize..(hi - self.n_min) as usize].to_vec();
        Sequence { p: self.p, n_min: lo, values, provenance: self.provenance }
    }
}

fn combination(poly: &IntPolynomial, window: &[CycInt]) -> CycInt {
    let p = window[0].p();
    window.iter().zip(poly.coeffs()).fold(CycInt::zero(p), |acc, (v, c)| {
        if c.is_zero() {
            acc
        } else {
            acc + v.scale(c)
        }
    })
}

/// True iff every window of `s` is annihilated by `poly`.
pub fn satisfies(s: &Sequence, poly: &IntPolynomial) -> Result<bool> {
    let d = poly.degree();
    if s.len() < d + 1 {
        return Err(Error::TooFewTerms { needed: d + 1, have: s.len() });
    }
    Ok(s.values.windows(d + 1).all(|w| combination(poly, w).is_zero()))
}

/// Extends `init` with the recurrence of `poly` so that it covers `n_target`.
///
/// Forward steps need a monic polynomial. Backward steps divide by the constant
/// coefficient and fail with [`Error::NonIntegral`] when that is inexact.
pub fn extend(init: &Sequence, poly: &IntPolynomial, n_target: i64) -> Result<Sequence> {
    let d = poly.degree();
    if d == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if init.len() < d {
        return Err(Error::TooFewTerms { needed: d, have: init.len() });
    }
    let c = poly.coeffs();
    let p = init.p;
    let mut values = init.values.clone();
    let mut n_min = init.n_min;
    if n_target >= init.n_end() {
        if !poly.is_monic() {
            return Err(Error::NotMonic);
        }
        while n_min + (values.len() as i64) <= n_target {
            let w = &values[values.len() - d..];
            let next = w.iter().zip(c).fold(CycInt::zero(p), |acc, (v, ci)| acc - v.scale(ci));
            values.push(next);
        }
    }
    if n_target < n_min {
        let c0 = &c[0];
        if c0.is_zero() {
            return Err(Error::NonIntegral(n_min - 1));
        }
        let mut front: Vec<CycInt> = Vec::new();
        while n_min > n_target {
            // c_0 s(n) = -Σ_{i≥1} c_i s(n+i)
            let ahead: Vec<&CycInt> = front.iter().rev().chain(values.iter()).take(d).collect();
            let rhs = ahead
                .iter()
                .zip(&c[1..])
                .fold(CycInt::zero(p), |acc, (v, ci)| acc - v.scale(ci));
            let mut coeffs = Vec::with_capacity(rhs.coeffs().len());
            for x in rhs.coeffs() {
                let (q, r) = x.div_rem(c0);
                if !r.is_zero() {
                    return Err(Error::NonIntegral(n_min - 1));
                }
                coeffs.push(q);
            }
            front.push(CycInt::from_coeffs(p, coeffs)?);
            n_min -= 1;
        }
        front.reverse();
        front.extend(values);
        values = front;
    }
    Ok(Sequence { p, n_min, values, provenance: Provenance::Recurrence })
}

/// Row-reduces `rows` (each `[a_0 .. a_{m-1} | b]`) and returns one solution, if consistent.
fn solve_rational(rows: Vec<Vec<BigRational>>, m: usize) -> Option<Vec<BigRational>> {
    let mut rows = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][col].recip();
        rows[r].iter_mut().for_each(|x| *x *= &inv);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); m];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][m].clone();
    }
    Some(sol)
}

/// Least-degree recurrence of order at most `max_order`, fitted exactly on a
/// prefix and validated on every window of `s`.
///
/// Needs at least `2 * max_order + holdout` terms; `holdout` defaults to `max_order`.
/// The result is the monic polynomial when the fit is integral, and otherwise
/// the primitive integer multiple of the rational fit.
pub fn discover(s: &Sequence, max_order: usize, holdout: Option<usize>) -> Result<IntPolynomial> {
    let holdout = holdout.unwrap_or(max_order);
    let needed = 2 * max_order + holdout;
    if s.len() < needed || max_order == 0 {
        return Err(Error::InsufficientData { needed: needed.max(1), have: s.len() });
    }
    if s.values.iter().all(|v| v.is_zero()) {
        return Ok(IntPolynomial::one());
    }
    let prefix = s.len() - holdout;
    let to_rat = |x: &BigInt| BigRational::from_integer(x.clone());
    for d in 1..=max_order {
        // s(n+d) = Σ a_i s(n+i), one equation per window and power-basis coordinate
        let mut rows = Vec::new();
        for n in 0..prefix.saturating_sub(d) {
            for coord in 0..(s.p - 1) as usize {
                let mut row: Vec<BigRational> = (0..d).map(|i| to_rat(&s.values[n + i].coeffs()[coord])).collect();
                row.push(to_rat(&s.values[n + d].coeffs()[coord]));
                rows.push(row);
            }
        }
        let Some(a) = solve_rational(rows, d) else {
            continue;
        };
        let mut coeffs: Vec<BigRational> = a.iter().map(|x| -x).collect();
        coeffs.push(BigRational::one());
        let poly = IntPolynomial::from_rational(&coeffs)?;
        if satisfies(s, &poly)? {
            return Ok(poly);
        }
    }
    Err(Error::NoRecurrence(max_order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn f(p: u64, r: usize) -> FieldSpec {
        make_field(p, r, None).unwrap()
    }

    #[test]
    fn families() {
        assert_eq!(family_poly(Family::PK, 3, &f(2, 1)).unwrap(), poly(&[-2, -2, 0, 1]));
        assert_eq!(family_poly(Family::QTrap, 3, &f(3, 1)).unwrap(), poly(&[-6, -3, 0, 1]));
        assert_eq!(family_poly(Family::QuadSym, 0, &f(3, 1)).unwrap(), poly(&[27, 0, 0, 0, 0, 0, 1]));
        assert_eq!(family_poly(Family::QuadSym, 0, &f(5, 1)).unwrap().coeffs()[0], BigInt::from(-3125));
        assert_eq!(family_poly(Family::QK, 4, &f(2, 1)).unwrap(), poly(&[-4, 0, 0, -2, 0, 1]));
        assert_eq!(family_poly(Family::QK, 5, &f(2, 1)).unwrap(), poly(&[-4, 0, 0, -2, -2, 0, 1]));
        assert_eq!(family_poly(Family::Rot2, 0, &f(5, 1)).unwrap(), poly(&[-25, 0, 0, 0, 1]));
        assert_eq!(family_poly(Family::Mix1, 3, &f(2, 1)).unwrap(), poly(&[2, 0, -2, 1]));
        assert_eq!(family_poly(Family::Mix2, 4, &f(2, 1)).unwrap(), poly(&[-2, 2, 0, -2, 1]));
        assert_eq!(family_poly(Family::Mix3, 4, &f(2, 1)).unwrap(), poly(&[-2, 0, -2, 0, 1]));
        assert_eq!(family_poly(Family::Mix3, 5, &f(2, 1)).unwrap(), poly(&[-2, 0, -2, -2, 0, 1]));
        assert!(family_poly(Family::QK, 3, &f(2, 1)).is_err());
        assert!(family_poly(Family::Rot2, 0, &f(3, 2)).is_err());
        assert!(family_poly(Family::QuadSym, 0, &f(2, 1)).is_err());
        assert_eq!("q_trap".parse::<Family>().unwrap(), Family::QTrap);
        assert_eq!("PK".parse::<Family>().unwrap(), Family::PK);
    }

    #[test]
    fn qtrap_over_f2_is_pk() {
        for k in 2..=12 {
            assert_eq!(family_poly(Family::QTrap, k, &f(2, 1)).unwrap(), family_poly(Family::PK, k, &f(2, 1)).unwrap());
        }
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[18, 9, 0, -9, -3, 0, 1]).to_string(), "X^6 - 3X^4 - 9X^3 + 9X + 18");
        assert_eq!(poly(&[-1, 1]).to_string(), "X - 1");
        assert_eq!(poly(&[3]).to_string(), "3");
    }

    #[test]
    fn divisibility() {
        let big = poly(&[18, 9, 0, -9, -3, 0, 1]);
        assert!(divides(&poly(&[-6, -3, 0, 1]), &big));
        assert_eq!(quotient(&big, &poly(&[-6, -3, 0, 1])).unwrap(), poly(&[-3, 0, 0, 1]));
        assert!(divides(&poly(&[-5, 1]), &poly(&[-25, 0, 1])));
        assert!(!divides(&poly(&[1, 0, 1]), &poly(&[1, 0, 0, 1])));
        assert_eq!(lcm(&poly(&[-1, 1]), &poly(&[-1, 0, 1])), poly(&[-1, 0, 1]));
        assert_eq!(gcd(&poly(&[-1, 0, 1]), &poly(&[1, 2, 1])), poly(&[1, 1]));
    }

    #[test]
    fn satisfies_powers() {
        let s = Sequence::from_integers(2, 0, &[1i64, 3, 9, 27, 81], Provenance::Brute);
        assert!(satisfies(&s, &poly(&[-3, 1])).unwrap());
        assert!(!satisfies(&s, &poly(&[-2, 1])).unwrap());
        assert!(matches!(satisfies(&s, &poly(&[0, 0, 0, 0, 0, 1])), Err(Error::TooFewTerms { .. })));
    }

    #[test]
    fn extend_steps() {
        let pk3 = poly(&[-2, -2, 0, 1]);
        let init = Sequence::from_integers(2, 0, &[1i64, 2, 4], Provenance::Brute);
        let s = extend(&init, &pk3, 3).unwrap();
        assert_eq!(s.get(3).unwrap().as_integer().unwrap(), BigInt::from(6));
        let c = Sequence::from_integers(3, 5, &[7i64], Provenance::Brute);
        let s = extend(&c, &poly(&[-1, 1]), 9).unwrap();
        assert_eq!(s.as_integers().unwrap(), vec![BigInt::from(7); 5]);
        assert_eq!(extend(&init, &poly(&[-2, 2]), 5).unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn extend_backwards() {
        let s = Sequence::from_integers(2, 3, &[8i64, 16, 32], Provenance::Brute);
        let back = extend(&s, &poly(&[-2, 1]), 0).unwrap();
        assert_eq!(back.n_min, 0);
        assert_eq!(back.get(0).unwrap().as_integer().unwrap(), BigInt::from(1));
        let odd = Sequence::from_integers(2, 0, &[3i64, 6], Provenance::Brute);
        assert_eq!(extend(&odd, &poly(&[-2, 1]), -1).unwrap_err(), Error::NonIntegral(-1));
    }

    #[test]
    fn discovery() {
        let c = Sequence::from_integers(2, 0, &[5i64; 4], Provenance::Brute);
        assert_eq!(discover(&c, 1, None).unwrap(), poly(&[-1, 1]));
        let short = Sequence::from_integers(2, 0, &[1i64; 6], Provenance::Brute);
        assert!(matches!(discover(&short, 8, None), Err(Error::InsufficientData { .. })));
        let fib = extend(&Sequence::from_integers(2, 0, &[0i64, 1], Provenance::Brute), &poly(&[-1, -1, 1]), 12).unwrap();
        assert_eq!(discover(&fib, 3, None).unwrap(), poly(&[-1, -1, 1]));
        let half = Sequence::from_integers(2, 0, &[16i64, 8, 4, 2, 1], Provenance::Brute);
        assert_eq!(discover(&half, 1, None).unwrap(), poly(&[-1, 2]));
    }

    fn arb_poly() -> impl Strategy<Value = IntPolynomial> {
        proptest::collection::vec(-4i64..5, 1..5).prop_map(|mut v| {
            v.push(1);
            poly(&v)
        })
    }

    proptest! {
        #[test]
        fn extend_round_trip(pl in arb_poly(), init in proptest::collection::vec(-20i64..20, 5), extra in 0i64..12) {
            let d = pl.degree();
            let s0 = Sequence::from_integers(3, 1, &init[..d], Provenance::Brute);
            let s = extend(&s0, &pl, d as i64 + extra + 1).unwrap();
            prop_assert!(satisfies(&s, &pl).unwrap());
        }

        #[test]
        fn discovered_divides_generator(pl in arb_poly(), init in proptest::collection::vec(-20i64..20, 5)) {
            let d = pl.degree();
            let s0 = Sequence::from_integers(2, 0, &init[..d], Provenance::Brute);
            let s = extend(&s0, &pl, 3 * d as i64 + 2).unwrap();
            match discover(&s, d, None) {
                Ok(found) => {
                    if found.degree() > 0 {
                        prop_assert!(divides(&found, &pl), "{} does not divide {}", found, pl);
                    }
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn lcm_is_common_multiple(a in arb_poly(), b in arb_poly()) {
            let l = lcm(&a, &b);
            prop_assert!(divides(&a, &l) && divides(&b, &l));
            prop_assert!(l.degree() <= a.degree() + b.degree());
        }
    }
}
