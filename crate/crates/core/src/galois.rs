//! Arithmetic in finite fields `F_{p^r}`.
//!
//! Elements are stored as polynomials of degree `< r` over `F_p`, packed into a
//! single integer by reading the coefficient vector in base `p` with the
//! constant term least significant. That packed value doubles as the element's
//! position in [`FieldSpec::enumerate`], so `0` is the zero element and `1` is
//! the identity.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order accepted by [`make_field`].
pub const MAX_ORDER: u64 = 1 << 40;

/// Largest field order for which [`ArithTables`] are built.
pub const MAX_TABLE_ORDER: u64 = 1024;

/// A concrete Galois field `F_{p^r}` together with its defining modulus.
///
/// Cloning is cheap; equality compares `(p, r, modulus)` by content.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

struct FieldInner {
    p: u64,
    r: usize,
    modulus: Vec<u64>,
    // Tr(X^i) for the power basis, so the trace is a dot product.
    basis_trace: Vec<u64>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.r == other.0.r && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p(), self.r(), self.modulus())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r() == 1 {
            write!(f, "{}", self.p())
        } else {
            write!(f, "{}^{}", self.p(), self.r())
        }
    }
}

/// Builds `F_{p^r}`. Without an explicit modulus the monic irreducible of
/// degree `r` with the smallest base-`p` value is used (for `r = 1` that is `X`).
///
/// `modulus` lists coefficients in ascending order and must have length `r + 1`.
pub fn make_field(p: u64, r: usize, modulus: Option<&[u64]>) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = checked_pow(p, r).filter(|&q| q <= MAX_ORDER);
    if q.is_none() {
        return Err(Error::FieldTooLarge(format!("{p}^{r}")));
    }
    let modulus = match modulus {
        Some(m) => {
            if m.len() != r + 1 {
                return Err(Error::InvalidModulus(format!(
                    "expected {} coefficients, got {}",
                    r + 1,
                    m.len()
                )));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::InvalidModulus("coefficient not reduced mod p".into()));
            }
            if m[r] != 1 {
                return Err(Error::InvalidModulus("modulus is not monic".into()));
            }
            if !is_irreducible(m, p) {
                return Err(Error::InvalidModulus("modulus is reducible".into()));
            }
            m.to_vec()
        }
        None => default_modulus(p, r),
    };
    let basis_trace = (0..r)
        .map(|i| {
            let mut xi = vec![0u64; r];
            xi[i] = 1;
            trace_by_frobenius(&xi, &modulus, p)
        })
        .collect();
    Ok(FieldSpec(Arc::new(FieldInner { p, r, modulus, basis_trace })))
}

impl FieldSpec {
    /// Parses `p^r`, a prime `p`, or a prime power `q` written in decimal.
    pub fn parse(spec: &str, modulus: Option<&[u64]>) -> Result<FieldSpec> {
        let spec = spec.trim();
        let bad = || Error::InvalidFieldSpec(spec.to_string());
        let (p, r) = match spec.split_once('^') {
            Some((p, r)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                r.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            None => {
                let q = spec.parse::<u64>().map_err(|_| bad())?;
                prime_power(q).ok_or_else(bad)?
            }
        };
        make_field(p, r, modulus)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn r(&self) -> usize {
        self.0.r
    }

    /// The field order `p^r`.
    pub fn q(&self) -> u64 {
        self.0.p.pow(self.0.r as u32)
    }

    /// Ascending coefficients of the modulus, length `r + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.r == 1
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), value: 1 }
    }

    /// The element whose packed base-`p` value is `value`.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        let q = self.q();
        if value >= q {
            return Err(Error::ElementOutOfRange { value, q });
        }
        Ok(FieldElement { field: self.clone(), value })
    }

    /// Element from ascending coefficients, reduced mod `p`; missing entries are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.r() {
            return Err(Error::Dimension { expected: self.r(), got: coeffs.len() });
        }
        let mut v = coeffs.to_vec();
        v.iter_mut().for_each(|c| *c %= self.p());
        v.resize(self.r(), 0);
        Ok(FieldElement { field: self.clone(), value: self.pack(&v) })
    }

    /// All `q` elements in ascending packed order; zero comes first.
    pub fn enumerate(&self) -> Vec<FieldElement> {
        (0..self.q()).map(|value| FieldElement { field: self.clone(), value }).collect()
    }

    pub(crate) fn unpack(&self, mut value: u64) -> Vec<u64> {
        let p = self.p();
        (0..self.r())
            .map(|_| {
                let c = value % p;
                value /= p;
                c
            })
            .collect()
    }

    pub(crate) fn pack(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p() + c)
    }

    /// Sum of two packed elements.
    pub fn add_value(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if self.r() == 1 {
            return (a + b) % p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.r() {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg_value(&self, a: u64) -> u64 {
        let p = self.p();
        let c: Vec<u64> = self.unpack(a).into_iter().map(|c| (p - c) % p).collect();
        self.pack(&c)
    }

    /// Product of two packed elements.
    pub fn mul_value(&self, a: u64, b: u64) -> u64 {
        let p = self.p();
        if self.r() == 1 {
            return ((a as u128 * b as u128) % p as u128) as u64;
        }
        let prod = poly_mulmod(&self.unpack(a), &self.unpack(b), self.modulus(), p);
        self.pack(&prod)
    }

    pub fn pow_value(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_value(acc, base);
            }
            base = self.mul_value(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace `Tr_{F_q/F_p}` of a packed element.
    pub fn trace_value(&self, a: u64) -> u64 {
        let p = self.p();
        let mut a = a;
        let mut t = 0u128;
        for &bt in &self.0.basis_trace {
            t += (a % p) as u128 * bt as u128;
            a /= p;
        }
        (t % p as u128) as u64
    }
}

/// An element of a [`FieldSpec`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: FieldSpec,
    value: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.r() == 1 {
            return write!(f, "{}", self.value);
        }
        let terms: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "X".to_string(),
                (1, c) => format!("{c}X"),
                (i, 1) => format!("X^{i}"),
                (i, c) => format!("{c}X^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Packed base-`p` value, also the position in [`FieldSpec::enumerate`].
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Ascending polynomial coefficients, each in `[0, p)`.
    pub fn coeffs(&self) -> Vec<u64> {
        self.field.unpack(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.field.add_value(self.value, other.value)))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        let neg = self.field.neg_value(other.value);
        Ok(self.with(self.field.add_value(self.value, neg)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.field.mul_value(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg_value(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.field.q() - 2))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.field.pow_value(self.value, e))
    }

    /// The Frobenius image `x^p`.
    pub fn frobenius(&self) -> FieldElement {
        self.pow(self.field.p())
    }

    /// `Tr_{F_q/F_p}(x) = x + x^p + ... + x^{p^{r-1}}`, returned as a residue mod `p`.
    pub fn trace(&self) -> u64 {
        self.field.trace_value(self.value)
    }

    fn with(&self, value: u64) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }
}

/// Operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// Dispatches one field operation; binary operations require `y`.
pub fn arith(op: ArithOp, x: &FieldElement, y: Option<&FieldElement>) -> Result<FieldElement> {
    let need_y = || y.ok_or_else(|| Error::OutOfRange("binary operation needs two operands".into()));
    match op {
        ArithOp::Add => x.try_add(need_y()?),
        ArithOp::Mul => x.try_mul(need_y()?),
        ArithOp::Neg => Ok(x.neg()),
        ArithOp::Inv => x.inv(),
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $via:ident) => {
        impl std::ops::$tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$via(rhs).expect("operands belong to different fields")
            }
        }
        impl std::ops::$tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$via(&rhs).expect("operands belong to different fields")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// Dense lookup tables over packed values for fields with `q <= MAX_TABLE_ORDER`.
pub struct ArithTables {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    trace: Vec<u32>,
}

impl ArithTables {
    pub fn new(field: &FieldSpec) -> Option<ArithTables> {
        let q = field.q();
        if q > MAX_TABLE_ORDER {
            return None;
        }
        let q = q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = field.add_value(a as u64, b as u64) as u32;
                mul[a * q + b] = field.mul_value(a as u64, b as u64) as u32;
            }
        }
        let trace = (0..q).map(|a| field.trace_value(a as u64) as u32).collect();
        Some(ArithTables { q, add, mul, trace })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    pub fn order(&self) -> usize {
        self.q
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits `q = p^r` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut rest, mut r) = (q, 0usize);
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

fn checked_pow(p: u64, r: usize) -> Option<u64> {
    (0..r).try_fold(1u64, |acc, _| acc.checked_mul(p))
}

fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut b = base as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    base = acc as u64;
    base
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo the monic `m`, over `F_p`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = mod_pow(m[dm], p - 2, p);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = (a[top] as u128 * lead_inv as u128 % p as u128) as u64;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = top - dm + i;
                let sub = (c as u128 * mi as u128 % p as u128) as u64;
                a[idx] = (a[idx] + p - sub) % p;
            }
        }
        a = trim(a);
    }
    a
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    out.into_iter().map(|c| c as u64).collect()
}

/// `a * b mod m` over `F_p`, padded to length `deg m`.
fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = poly_rem(&poly_mul(a, b, p), m, p);
    r.resize(m.len() - 1, 0);
    r
}

fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![0u64; m.len() - 1];
    acc[0] = 1;
    let mut base = poly_rem(a, m, p);
    base.resize(m.len() - 1, 0);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let inv = mod_pow(*b.last().unwrap(), p - 2, p);
        let monic_b: Vec<u64> = b.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
        let r = poly_rem(&a, &monic_b, p);
        a = monic_b;
        b = r;
    }
    a
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let r = m.len() - 1;
    if r == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    // frob[i] = X^{p^i} mod m
    let mut frob = vec![poly_rem(&x, m, p)];
    for i in 1..=r {
        let next = poly_powmod(&frob[i - 1], p, m, p);
        frob.push(trim(next));
    }
    if trim(frob[r].clone()) != x {
        return false;
    }
    prime_factors(r).into_iter().all(|d| {
        let mut h = frob[r / d].clone();
        h.resize(2.max(h.len()), 0);
        h[1] = (h[1] + p - 1) % p;
        poly_gcd(m, &h, p).len() == 1
    })
}

fn default_modulus(p: u64, r: usize) -> Vec<u64> {
    if r == 1 {
        return vec![0, 1];
    }
    let count = p.pow(r as u32);
    (0..count)
        .map(|lower| {
            let mut m = Vec::with_capacity(r + 1);
            let mut v = lower;
            for _ in 0..r {
                m.push(v % p);
                v /= p;
            }
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial of every degree exists")
}

/// Trace of a coefficient vector straight from the definition `Σ x^{p^i}`.
fn trace_by_frobenius(x: &[u64], m: &[u64], p: u64) -> u64 {
    let r = m.len() - 1;
    if r == 1 {
        return x[0] % p;
    }
    let mut acc = vec![0u64; r];
    let mut cur = x.to_vec();
    for _ in 0..r {
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a = (*a + c) % p;
        }
        cur = poly_powmod(&cur, p, m, p);
    }
    debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must lie in the prime field");
    acc[0]
}
