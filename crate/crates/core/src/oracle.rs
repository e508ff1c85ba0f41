//! Exponential sums by exhaustive enumeration.
//!
//! `S(g) = Σ_{x ∈ F_q^n} ζ_p^{Tr(g(x))}`. The enumeration walks the variables
//! in order, finalizing each monomial as soon as its largest variable is fixed.
//! The last variable enters every remaining monomial linearly, so for fixed
//! `x_1..x_{n-1}` the inner sum is `q ζ^{Tr A}` when the linear coefficient
//! vanishes and `0` otherwise. Results are accumulated as per-exponent counts,
//! which makes partitioned and parallel runs bit-identical.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::funcalg::{instantiate, FunctionExpr, InstantiatedFunction};
use crate::galois::{ArithTables, FieldSpec};
use crate::recurrence::{extend, IntPolynomial, Provenance, Sequence};

/// Default limit on `q^n`.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone)]
pub struct ExpSumOptions {
    /// Largest `q^n` that may be enumerated.
    pub budget: u128,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ExpSumOptions {
    fn default() -> Self {
        ExpSumOptions { budget: DEFAULT_BUDGET, workers: None }
    }
}

impl ExpSumOptions {
    pub fn with_budget(budget: u128) -> Self {
        ExpSumOptions { budget, ..Default::default() }
    }
}

trait Arith: Sync {
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn trace(&self, a: u32) -> u32;
}

impl Arith for ArithTables {
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        ArithTables::add(self, a, b)
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        ArithTables::mul(self, a, b)
    }
    #[inline]
    fn trace(&self, a: u32) -> u32 {
        ArithTables::trace(self, a)
    }
}

impl Arith for FieldSpec {
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add_value(a as u64, b as u64) as u32
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_value(a as u64, b as u64) as u32
    }
    fn trace(&self, a: u32) -> u32 {
        self.trace_value(a as u64) as u32
    }
}

/// Monomials grouped by their largest variable (0-based); each entry keeps the
/// coefficient and the remaining variables.
struct Plan {
    n: usize,
    q: u32,
    p: usize,
    constant: u32,
    levels: Vec<Vec<(u32, Vec<usize>)>>,
}

impl Plan {
    fn new(g: &InstantiatedFunction) -> Plan {
        let n = g.n();
        let mut levels = vec![Vec::new(); n];
        let mut constant = 0u32;
        let f = g.field();
        for (c, m) in g.terms() {
            match m.last() {
                None => constant = f.add_value(constant as u64, c.value()) as u32,
                Some(&top) => {
                    let others = m[..m.len() - 1].iter().map(|i| i - 1).collect();
                    levels[top - 1].push((c.value() as u32, others));
                }
            }
        }
        Plan { n, q: f.q() as u32, p: f.p() as usize, constant, levels }
    }

    #[inline]
    fn linear_coeff<A: Arith>(&self, a: &A, d: usize, x: &[u32]) -> u32 {
        let mut acc = 0u32;
        for (c, others) in &self.levels[d] {
            let mut t = *c;
            for &o in others {
                if t == 0 {
                    break;
                }
                t = a.mul(t, x[o]);
            }
            acc = a.add(acc, t);
        }
        acc
    }

    fn walk<A: Arith>(&self, a: &A, d: usize, partial: u32, x: &mut [u32], hist: &mut [u64]) {
        let c = self.linear_coeff(a, d, x);
        if d + 1 == self.n {
            if c == 0 {
                hist[a.trace(partial) as usize] += self.q as u64;
            }
            return;
        }
        for v in 0..self.q {
            x[d] = v;
            let next = if c == 0 { partial } else { a.add(partial, a.mul(v, c)) };
            self.walk(a, d + 1, next, x, hist);
        }
    }

    /// Histogram of the points whose first `m` coordinates encode `block`.
    fn block<A: Arith>(&self, a: &A, m: usize, block: u64) -> Vec<u64> {
        let mut x = vec![0u32; self.n];
        let mut partial = self.constant;
        let mut b = block;
        for d in 0..m {
            let v = (b % self.q as u64) as u32;
            b /= self.q as u64;
            let c = self.linear_coeff(a, d, &x);
            x[d] = v;
            partial = a.add(partial, a.mul(v, c));
        }
        let mut hist = vec![0u64; self.p];
        self.walk(a, m, partial, &mut x, &mut hist);
        hist
    }

    fn run<A: Arith>(&self, a: &A, m: usize) -> Vec<u64> {
        let blocks = (self.q as u64).pow(m as u32);
        (0..blocks)
            .into_par_iter()
            .map(|b| self.block(a, m, b))
            .reduce(
                || vec![0u64; self.p],
                |mut acc, h| {
                    acc.iter_mut().zip(&h).for_each(|(x, y)| *x += y);
                    acc
                },
            )
    }
}

fn points(q: u64, n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, _| acc.checked_mul(q as u128))
}

/// `S(g)` with the default options.
pub fn exp_sum(g: &InstantiatedFunction) -> Result<CycInt> {
    exp_sum_with(g, &ExpSumOptions::default())
}

pub fn exp_sum_with(g: &InstantiatedFunction, opts: &ExpSumOptions) -> Result<CycInt> {
    let f = g.field();
    let n = g.n();
    let total = points(f.q(), n).filter(|&t| t <= opts.budget && t <= u64::MAX as u128);
    let Some(total) = total else {
        return Err(Error::BudgetExceeded {
            points: points(f.q(), n).unwrap_or(u128::MAX),
            budget: opts.budget,
        });
    };
    if n == 0 {
        let mut hist = vec![0u64; f.p() as usize];
        let c = g.terms().first().map(|(c, _)| c.trace()).unwrap_or(0);
        hist[c as usize] = total as u64;
        return Ok(CycInt::from_histogram(f.p(), &hist));
    }
    let plan = Plan::new(g);
    // enough prefix blocks to keep the workers busy, never the last variable
    let mut m = 0;
    while m + 1 < n && (f.q() as u128).pow(m as u32) < 256 {
        m += 1;
    }
    let compute = || match ArithTables::new(f) {
        Some(t) => plan.run(&t, m),
        None => plan.run(f, m),
    };
    let hist = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(compute),
        None => compute(),
    };
    Ok(CycInt::from_histogram(f.p(), &hist))
}

/// `S` of `e` realized in `n` variables over `f`.
pub fn exp_sum_expr(e: &FunctionExpr, n: usize, f: &FieldSpec, opts: &ExpSumOptions) -> Result<CycInt> {
    exp_sum_with(&instantiate(e, n, f)?, opts)
}

/// Number of points where a Boolean function equals 1, `(2^n - S) / 2`.
pub fn weight(g: &InstantiatedFunction) -> Result<BigInt> {
    let f = g.field();
    if f.p() != 2 || f.r() != 1 {
        return Err(Error::NotBoolean);
    }
    let s = exp_sum(g)?.as_integer().expect("sums over F_2 are integers");
    Ok(((BigInt::from(1) << g.n()) - s) / 2)
}

/// True iff `S(g) = 0`.
pub fn is_balanced(g: &InstantiatedFunction) -> Result<bool> {
    Ok(exp_sum(g)?.is_zero())
}

/// How [`sum_sequence`] obtains its values.
#[derive(Debug, Clone)]
pub enum Method {
    Brute,
    Transfer,
    Recurrence { init: Sequence, poly: IntPolynomial },
}

/// `S(e(n))` for every `n` in `range`.
pub fn sum_sequence(
    e: &FunctionExpr,
    f: &FieldSpec,
    range: RangeInclusive<usize>,
    method: &Method,
    opts: &ExpSumOptions,
) -> Result<Sequence> {
    let (lo, hi) = (*range.start(), *range.end());
    let p = f.p();
    if lo > hi {
        let prov = match method {
            Method::Brute => Provenance::Brute,
            Method::Transfer => Provenance::Transfer,
            Method::Recurrence { .. } => Provenance::Recurrence,
        };
        return Sequence::new(p, lo as i64, Vec::new(), prov);
    }
    match method {
        Method::Brute => {
            let values = range.map(|n| exp_sum_expr(e, n, f, opts)).collect::<Result<Vec<_>>>()?;
            Sequence::new(p, lo as i64, values, Provenance::Brute)
        }
        Method::Transfer => {
            let sys = crate::transfer::build_for_expr(e, f, &crate::transfer::TransferOptions::from_oracle(opts))?;
            let run = sys.run(hi)?;
            let mut values = Vec::with_capacity(hi + 1 - lo);
            for n in lo..=hi {
                match run.get(n as i64) {
                    Some(v) => values.push(v.clone()),
                    None => values.push(exp_sum_expr(e, n, f, opts)?),
                }
            }
            Sequence::new(p, lo as i64, values, Provenance::Transfer)
        }
        Method::Recurrence { init, poly } => {
            let mut s = extend(init, poly, hi as i64)?;
            if (lo as i64) < s.n_min {
                s = extend(&s, poly, lo as i64)?;
            }
            Ok(s.window(lo as i64, hi as i64 + 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::parse;
    use crate::galois::make_field;
    use proptest::prelude::*;

    fn f(p: u64, r: usize) -> FieldSpec {
        make_field(p, r, None).unwrap()
    }

    fn int(v: i64, p: u64) -> CycInt {
        CycInt::from_int(p, v)
    }

    /// Direct definition: evaluate at every point and accumulate characters.
    fn naive(g: &InstantiatedFunction) -> CycInt {
        let fs = g.field();
        let q = fs.q();
        let n = g.n();
        let mut hist = vec![0u64; fs.p() as usize];
        for mut i in 0..q.pow(n as u32) {
            let x: Vec<u64> = (0..n)
                .map(|_| {
                    let d = i % q;
                    i /= q;
                    d
                })
                .collect();
            hist[fs.trace_value(g.evaluate_values(&x)) as usize] += 1;
        }
        CycInt::from_histogram(fs.p(), &hist)
    }

    #[test]
    fn small_sums() {
        let f2 = f(2, 1);
        let zero = InstantiatedFunction::from_terms(&f2, 4, []).unwrap();
        assert_eq!(exp_sum(&zero).unwrap(), int(16, 2));
        let cube = instantiate(&FunctionExpr::tau(3), 3, &f2).unwrap();
        assert_eq!(exp_sum(&cube).unwrap(), int(6, 2));
        let t = instantiate(&parse("T(2,3)").unwrap(), 3, &f(3, 2)).unwrap();
        assert_eq!(exp_sum(&t).unwrap(), int(153, 3));
        let r = instantiate(&parse("R(2,3)").unwrap(), 3, &f(3, 1)).unwrap();
        assert_eq!(exp_sum(&r).unwrap(), int(27, 3));
    }

    #[test]
    fn weights_and_balance() {
        let f2 = f(2, 1);
        let zero = InstantiatedFunction::from_terms(&f2, 3, []).unwrap();
        assert_eq!(weight(&zero).unwrap(), BigInt::from(0));
        let cube = instantiate(&FunctionExpr::tau(3), 3, &f2).unwrap();
        assert_eq!(weight(&cube).unwrap(), BigInt::from(1));
        let t7 = instantiate(&FunctionExpr::tau(3), 7, &f2).unwrap();
        let ones = (0..128u64)
            .filter(|&i| {
                let x: Vec<u64> = (0..7).map(|b| (i >> b) & 1).collect();
                t7.evaluate_values(&x) == 1
            })
            .count();
        assert_eq!(weight(&t7).unwrap(), BigInt::from(ones));
        let lin = InstantiatedFunction::from_terms(&f2, 1, [(f2.one(), vec![1])]).unwrap();
        assert!(is_balanced(&lin).unwrap());
        let x1x2 = instantiate(&FunctionExpr::Sigma(2), 2, &f2).unwrap();
        assert!(!is_balanced(&x1x2).unwrap());
        let f3 = f(3, 1);
        let s22 = instantiate(&FunctionExpr::Sigma(2), 2, &f3).unwrap();
        assert_eq!(exp_sum(&s22).unwrap(), naive(&s22));
        assert!(!is_balanced(&s22).unwrap());
        assert_eq!(weight(&s22).unwrap_err(), Error::NotBoolean);
    }

    #[test]
    fn budget() {
        let g = instantiate(&FunctionExpr::tau(3), 10, &f(3, 1)).unwrap();
        let opts = ExpSumOptions::with_budget(1000);
        assert!(matches!(exp_sum_with(&g, &opts), Err(Error::BudgetExceeded { points: 59049, budget: 1000 })));
    }

    #[test]
    fn sequences() {
        let f2 = f(2, 1);
        let opts = ExpSumOptions::default();
        let s = sum_sequence(&FunctionExpr::tau(3), &f2, 3..=6, &Method::Brute, &opts).unwrap();
        let want: Vec<BigInt> = [6, 12, 20, 36].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(s.as_integers().unwrap(), want);
        let s = sum_sequence(&parse("T(2,3)").unwrap(), &f(3, 2), 3..=5, &Method::Brute, &opts).unwrap();
        let want: Vec<BigInt> = [153, 1377, 7209].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(s.as_integers().unwrap(), want);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = sum_sequence(&FunctionExpr::tau(3), &f2, 5..=4, &Method::Brute, &opts).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let g = instantiate(&parse("R(2,3) + e2*sigma(2)").unwrap(), 7, &f(5, 1)).unwrap();
        let one = exp_sum_with(&g, &ExpSumOptions { workers: Some(1), ..Default::default() }).unwrap();
        let three = exp_sum_with(&g, &ExpSumOptions { workers: Some(3), ..Default::default() }).unwrap();
        assert_eq!(one, three);
        assert_eq!(one, naive(&g));
    }

    fn max_scalar(e: &FunctionExpr) -> u64 {
        match e {
            FunctionExpr::ScalarMul(c, inner) => (*c).max(max_scalar(inner)),
            FunctionExpr::Sum(parts) => parts.iter().map(max_scalar).max().unwrap_or(0),
            _ => 0,
        }
    }

    fn arb_case() -> impl Strategy<Value = (FunctionExpr, usize, usize)> {
        let exprs = prop::sample::select(vec![
            "R(2)", "R(2,3)", "T(2,4)", "tau(3)", "sigma(2)", "sigma(3)", "R(3) + e1*sigma(1)",
            "e2*R(2) + T(2,3)", "R(2,3) + R(3)", "T(3) + sigma(2)",
        ]);
        (exprs, 0usize..5, 0usize..3).prop_map(|(s, fi, extra)| (parse(s).unwrap(), fi, extra))
    }

    const FIELDS: [(u64, usize); 5] = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn matches_direct_definition((e, fi, extra) in arb_case()) {
            let (p, r) = FIELDS[fi];
            let fs = f(p, r);
            let n = e.min_n() + extra;
            prop_assume!(fs.q().pow(n as u32) <= 20_000);
            let g = match instantiate(&e, n, &fs) { Ok(g) => g, Err(_) => return Ok(()) };
            let s = exp_sum(&g).unwrap();
            prop_assert_eq!(&s, &naive(&g));
            let bound = (fs.q() as f64).powi(n as i32);
            prop_assert!(s.to_complex().norm() <= bound + 1e-6);
            if p == 2 && r == 1 {
                let v = s.as_integer().unwrap();
                prop_assert_eq!(v % 2u32, BigInt::from(if n == 0 { 1 } else { 0 }));
            }
        }

        #[test]
        fn modulus_independence((e, which, extra) in arb_case()) {
            // alternative irreducible moduli for F_4, F_8, F_9
            let (p, r, alt): (u64, usize, &[u64]) = [(2, 2, &[1u64, 1, 1][..]), (2, 3, &[1, 0, 1, 1][..]), (3, 2, &[2, 2, 1][..])][which % 3];
            let n = e.min_n() + extra % 2;
            prop_assume!(p.pow((r * n) as u32) <= 50_000);
            // a scalar names an element by its packed value, which only means the same element under both moduli inside F_p
            prop_assume!(max_scalar(&e) < p);
            let std = f(p, r);
            let other = make_field(p, r, Some(alt)).unwrap();
            let a = exp_sum_expr(&e, n, &std, &ExpSumOptions::default());
            let b = exp_sum_expr(&e, n, &other, &ExpSumOptions::default());
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn scaling_permutes_characters(c in 1u64..5, n in 2usize..6) {
            let fs = f(5, 1);
            let base = instantiate(&FunctionExpr::Sigma(2), n, &fs).unwrap();
            let scaled = instantiate(&FunctionExpr::ScalarMul(c, Box::new(FunctionExpr::Sigma(2))), n, &fs).unwrap();
            let a = exp_sum(&base).unwrap();
            let b = exp_sum(&scaled).unwrap();
            // σ_c: ζ ↦ ζ^c sends S(g) to S(c g)
            let mut full = vec![BigInt::from(0); 5];
            for (i, v) in a.coeffs().iter().enumerate() {
                full[(i as u64 * c % 5) as usize] += v;
            }
            prop_assert_eq!(CycInt::from_full(5, &full), b);
        }
    }
}
