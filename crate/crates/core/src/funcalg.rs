//! Symbolic polynomial families and their realization in `n` variables.
//!
//! The expression grammar is
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := [scalar '*'] atom
//! scalar := ['e'] digits          -- a field element by enumeration index
//! atom   := 'R(' offsets ')' | 'T(' offsets ')' | 'tau(' k ')' | 'sigma(' k ')' | '(' expr ')'
//! ```
//!
//! `offsets` lists `j_1 < ... < j_s`, all greater than 1; the leading variable `X_1`
//! is implicit. Whitespace is ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};

/// Offsets `(1, j_1, ..., j_s)` of a monomial `X_1 X_{j_1} ... X_{j_s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialPattern {
    offsets: Vec<usize>,
}

impl MonomialPattern {
    /// Takes the full offset list, which must start at 1 and be strictly increasing.
    pub fn new(offsets: Vec<usize>) -> Result<MonomialPattern> {
        if offsets.first() != Some(&1) {
            return Err(Error::InvalidPattern("first offset must be 1".into()));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPattern("offsets must be strictly increasing".into()));
        }
        Ok(MonomialPattern { offsets })
    }

    /// `(1, 2, ..., k)`.
    pub fn consecutive(k: usize) -> MonomialPattern {
        MonomialPattern { offsets: (1..=k).collect() }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn degree(&self) -> usize {
        self.offsets.len()
    }

    /// The largest offset `j_s`.
    pub fn span(&self) -> usize {
        *self.offsets.last().unwrap()
    }
}

impl fmt::Display for MonomialPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail: Vec<String> = self.offsets[1..].iter().map(|o| o.to_string()).collect();
        write!(f, "{}", tail.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionExpr {
    Rotation(MonomialPattern),
    Trapezoid(MonomialPattern),
    Sigma(usize),
    /// Scalar given by its enumeration index in the field.
    ScalarMul(u64, Box<FunctionExpr>),
    Sum(Vec<FunctionExpr>),
}

/// A single family with no scalar or sum structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Rotation(MonomialPattern),
    Trapezoid(MonomialPattern),
    Sigma(usize),
}

impl Atom {
    pub fn min_n(&self) -> usize {
        match self {
            Atom::Rotation(pat) | Atom::Trapezoid(pat) => pat.span(),
            Atom::Sigma(k) => *k,
        }
    }

    /// Literal monomials in `n` variables, with repetition.
    fn monomials(&self, n: usize) -> Vec<Vec<usize>> {
        match self {
            Atom::Rotation(pat) => {
                (0..n).map(|k| shift_unchecked(pat.offsets(), k, n)).collect()
            }
            Atom::Trapezoid(pat) => (0..=n - pat.span())
                .map(|i| pat.offsets().iter().map(|o| o + i).collect())
                .collect(),
            Atom::Sigma(k) => combinations(n, *k),
        }
    }
}

impl FunctionExpr {
    pub fn tau(k: usize) -> FunctionExpr {
        FunctionExpr::Trapezoid(MonomialPattern::consecutive(k))
    }

    pub fn rotation(k: usize) -> FunctionExpr {
        FunctionExpr::Rotation(MonomialPattern::consecutive(k))
    }

    /// Smallest `n` accepted by [`instantiate`].
    pub fn min_n(&self) -> usize {
        match self {
            FunctionExpr::Rotation(pat) | FunctionExpr::Trapezoid(pat) => pat.span(),
            FunctionExpr::Sigma(k) => *k,
            FunctionExpr::ScalarMul(_, e) => e.min_n(),
            FunctionExpr::Sum(es) => es.iter().map(|e| e.min_n()).max().unwrap_or(1),
        }
    }

    /// Flattens into `Σ c_i · atom_i` with scalars multiplied out in `f`.
    /// Equal atoms are merged and zero coefficients dropped.
    pub fn atoms(&self, f: &FieldSpec) -> Result<Vec<(FieldElement, Atom)>> {
        let mut acc: BTreeMap<Atom, FieldElement> = BTreeMap::new();
        self.collect_atoms(&f.one(), f, &mut acc)?;
        Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(a, c)| (c, a)).collect())
    }

    fn collect_atoms(
        &self,
        scale: &FieldElement,
        f: &FieldSpec,
        acc: &mut BTreeMap<Atom, FieldElement>,
    ) -> Result<()> {
        let mut push = |atom: Atom| {
            let entry = acc.entry(atom).or_insert_with(|| f.zero());
            *entry = &*entry + scale;
        };
        match self {
            FunctionExpr::Rotation(pat) => push(Atom::Rotation(pat.clone())),
            FunctionExpr::Trapezoid(pat) => push(Atom::Trapezoid(pat.clone())),
            FunctionExpr::Sigma(k) => push(Atom::Sigma(*k)),
            FunctionExpr::ScalarMul(c, e) => {
                let c = f.element(*c)?;
                e.collect_atoms(&(scale * &c), f, acc)?;
            }
            FunctionExpr::Sum(es) => {
                for e in es {
                    e.collect_atoms(scale, f, acc)?;
                }
            }
        }
        Ok(())
    }

    fn literal_monomials(&self, n: usize, out: &mut Vec<Vec<usize>>) {
        match self {
            FunctionExpr::Rotation(pat) => out.extend(Atom::Rotation(pat.clone()).monomials(n)),
            FunctionExpr::Trapezoid(pat) => out.extend(Atom::Trapezoid(pat.clone()).monomials(n)),
            FunctionExpr::Sigma(k) => out.extend(Atom::Sigma(*k).monomials(n)),
            FunctionExpr::ScalarMul(_, e) => e.literal_monomials(n, out),
            FunctionExpr::Sum(es) => es.iter().for_each(|e| e.literal_monomials(n, out)),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        let min = self.min_n();
        if n < min {
            return Err(Error::TooFewVariables { n, min });
        }
        Ok(())
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::Rotation(pat) => write!(f, "R({pat})"),
            FunctionExpr::Trapezoid(pat) => write!(f, "T({pat})"),
            FunctionExpr::Sigma(k) => write!(f, "sigma({k})"),
            FunctionExpr::ScalarMul(c, e) => match **e {
                FunctionExpr::Sum(_) | FunctionExpr::ScalarMul(..) => write!(f, "e{c}*({e})"),
                _ => write!(f, "e{c}*{e}"),
            },
            FunctionExpr::Sum(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

impl FromStr for FunctionExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<FunctionExpr> {
        parse(s)
    }
}

/// Parses an expression in the grammar described in the module docs.
pub fn parse(s: &str) -> Result<FunctionExpr> {
    let mut parser = Parser { src: s.as_bytes(), pos: 0 };
    let e = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Syntax { pos: start, msg: "number too large".into() })
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn expr(&mut self) -> Result<FunctionExpr> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { FunctionExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<FunctionExpr> {
        let save = self.pos;
        let scalar = match self.peek() {
            Some(c) if c.is_ascii_digit() => Some(self.number()?),
            Some(b'e') => {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_digit() => Some(self.number()?),
                    _ => {
                        self.pos = save;
                        None
                    }
                }
            }
            _ => None,
        };
        match scalar {
            Some(c) => {
                self.expect(b'*')?;
                Ok(FunctionExpr::ScalarMul(c, Box::new(self.atom()?)))
            }
            None => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<FunctionExpr> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        let name = self.word();
        match name.as_str() {
            "R" | "T" => {
                self.expect(b'(')?;
                let mut offsets = vec![1usize];
                loop {
                    let at = self.pos;
                    let j = self.number()? as usize;
                    if j <= *offsets.last().unwrap() {
                        return Err(Error::InvalidPattern(format!(
                            "offset {j} at position {at} must exceed {}",
                            offsets.last().unwrap()
                        )));
                    }
                    offsets.push(j);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected `,` or `)`")),
                    }
                }
                let pat = MonomialPattern { offsets };
                Ok(if name == "R" { FunctionExpr::Rotation(pat) } else { FunctionExpr::Trapezoid(pat) })
            }
            "tau" | "sigma" => {
                self.expect(b'(')?;
                let at = self.pos;
                let k = self.number()? as usize;
                self.expect(b')')?;
                if name == "tau" {
                    if k < 2 {
                        return Err(Error::InvalidPattern(format!("tau({k}) at position {at}: degree must be at least 2")));
                    }
                    Ok(FunctionExpr::tau(k))
                } else {
                    if k < 1 {
                        return Err(Error::InvalidPattern(format!("sigma({k}) at position {at}: degree must be at least 1")));
                    }
                    Ok(FunctionExpr::Sigma(k))
                }
            }
            "" => Err(self.error("expected an expression")),
            _ => Err(Error::Syntax { pos: start, msg: format!("unknown family `{name}`") }),
        }
    }
}

/// Applies `E_n^k`: each index `i` goes to `i + k`, wrapping past `n`.
pub fn shift(m: &[usize], k: usize, n: usize) -> Result<Vec<usize>> {
    if k < 1 || k > n {
        return Err(Error::ShiftOutOfRange { k, n });
    }
    if let Some(&index) = m.iter().find(|&&i| i < 1 || i > n) {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(shift_unchecked(m, k, n))
}

fn shift_unchecked(m: &[usize], k: usize, n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = m.iter().map(|&i| (i - 1 + k) % n + 1).collect();
    out.sort_unstable();
    out
}

/// Distinct shifts of `m` as sorted index sets, and the lexicographically first.
pub fn orbit(m: &[usize], n: usize) -> Result<(BTreeSet<Vec<usize>>, Vec<usize>)> {
    let mut set = BTreeSet::new();
    for k in 1..=n {
        set.insert(shift(m, k, n)?);
    }
    let rep = set.iter().next().cloned().unwrap_or_default();
    Ok((set, rep))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

/// A concrete polynomial in `X_1, ..., X_n` over a field.
///
/// Terms are squarefree monomials given as sorted index sets, kept in ascending
/// order with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantiatedFunction {
    field: FieldSpec,
    n: usize,
    terms: Vec<(FieldElement, Vec<usize>)>,
}

impl InstantiatedFunction {
    /// Collects terms, adding coefficients of repeated monomials.
    pub fn from_terms(
        field: &FieldSpec,
        n: usize,
        terms: impl IntoIterator<Item = (FieldElement, Vec<usize>)>,
    ) -> Result<InstantiatedFunction> {
        let mut acc: BTreeMap<Vec<usize>, FieldElement> = BTreeMap::new();
        for (c, mut m) in terms {
            if c.field() != field {
                return Err(Error::FieldMismatch);
            }
            m.sort_unstable();
            m.dedup();
            if let Some(&index) = m.iter().find(|&&i| i < 1 || i > n) {
                return Err(Error::IndexOutOfRange { index, n });
            }
            let entry = acc.entry(m).or_insert_with(|| field.zero());
            *entry = &*entry + &c;
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect();
        Ok(InstantiatedFunction { field: field.clone(), n, terms })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(FieldElement, Vec<usize>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `x`, which must have length `n`.
    pub fn evaluate(&self, x: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if x.iter().any(|xi| xi.field() != &self.field) {
            return Err(Error::FieldMismatch);
        }
        let values: Vec<u64> = x.iter().map(|e| e.value()).collect();
        self.field.element(self.evaluate_values(&values))
    }

    /// [`evaluate`](Self::evaluate) on packed values, without checks.
    pub fn evaluate_values(&self, x: &[u64]) -> u64 {
        let f = &self.field;
        self.terms.iter().fold(0, |acc, (c, m)| {
            let prod = m.iter().fold(c.value(), |p, &i| f.mul_value(p, x[i - 1]));
            f.add_value(acc, prod)
        })
    }
}

/// Realizes `e` in `n` variables over `f`.
pub fn instantiate(e: &FunctionExpr, n: usize, f: &FieldSpec) -> Result<InstantiatedFunction> {
    e.check_n(n)?;
    let mut terms = Vec::new();
    for (c, atom) in e.atoms(f)? {
        terms.extend(atom.monomials(n).into_iter().map(|m| (c.clone(), m)));
    }
    InstantiatedFunction::from_terms(f, n, terms)
}

/// For each variable, the number of literal monomials of `e` in `n` variables containing it.
pub fn occurrence_profile(e: &FunctionExpr, n: usize) -> Result<Vec<usize>> {
    e.check_n(n)?;
    let mut monomials = Vec::new();
    e.literal_monomials(n, &mut monomials);
    let mut counts = vec![0usize; n];
    for m in monomials {
        for i in m {
            counts[i - 1] += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;
    use proptest::prelude::*;

    fn pat(o: &[usize]) -> MonomialPattern {
        MonomialPattern::new(o.to_vec()).unwrap()
    }

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse("R(2,3) + R(3)").unwrap(),
            FunctionExpr::Sum(vec![
                FunctionExpr::Rotation(pat(&[1, 2, 3])),
                FunctionExpr::Rotation(pat(&[1, 3]))
            ])
        );
        assert_eq!(parse("tau(3)").unwrap(), FunctionExpr::Trapezoid(pat(&[1, 2, 3])));
        assert_eq!(parse(" e2 * sigma( 2 ) ").unwrap(), FunctionExpr::ScalarMul(2, Box::new(FunctionExpr::Sigma(2))));
        assert_eq!(parse("2*(R(2)+T(2,4))").unwrap().to_string(), "e2*(R(2) + T(2,4))");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("R(2,"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("R(3,2)"), Err(Error::InvalidPattern(_))));
        assert!(matches!(parse("R(1)"), Err(Error::InvalidPattern(_))));
        assert!(matches!(parse("Q(2)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("R(2) +"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("R(2))"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("sigma(0)"), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn shifts() {
        assert_eq!(shift(&[1, 2, 3], 1, 5).unwrap(), vec![2, 3, 4]);
        assert_eq!(shift(&[1, 2, 3], 4, 5).unwrap(), vec![1, 2, 5]);
        assert_eq!(shift(&[2, 4], 7, 7).unwrap(), vec![2, 4]);
        assert!(shift(&[6], 1, 5).is_err());
        assert!(shift(&[1], 0, 5).is_err());
    }

    #[test]
    fn orbits() {
        let (set, rep) = orbit(&[1, 2, 3], 5).unwrap();
        assert_eq!((set.len(), rep), (5, vec![1, 2, 3]));
        let (set, _) = orbit(&[1, 3], 4).unwrap();
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec![vec![1, 3], vec![2, 4]]);
        assert_eq!(orbit(&[1], 6).unwrap().0.len(), 6);
    }

    #[test]
    fn instantiations() {
        let f2 = make_field(2, 1, None).unwrap();
        let f3 = make_field(3, 1, None).unwrap();
        let t = instantiate(&FunctionExpr::tau(3), 7, &f2).unwrap();
        assert_eq!(t.terms().len(), 5);
        assert_eq!(t.terms()[4].1, vec![5, 6, 7]);
        assert_eq!(instantiate(&FunctionExpr::Sigma(3), 4, &f2).unwrap().terms().len(), 4);
        assert!(instantiate(&parse("R(2,3)").unwrap(), 3, &f3).unwrap().is_zero());
        assert_eq!(instantiate(&parse("R(2,3)").unwrap(), 3, &f2).unwrap().terms().len(), 1);
        assert!(matches!(
            instantiate(&FunctionExpr::tau(4), 3, &f2),
            Err(Error::TooFewVariables { n: 3, min: 4 })
        ));
    }

    #[test]
    fn evaluations() {
        let f2 = make_field(2, 1, None).unwrap();
        let f3 = make_field(3, 1, None).unwrap();
        let t = instantiate(&FunctionExpr::tau(3), 3, &f2).unwrap();
        assert_eq!(t.evaluate(&vec![f2.one(); 3]).unwrap(), f2.one());
        assert_eq!(t.evaluate(&vec![f2.zero(); 3]).unwrap(), f2.zero());
        let s = instantiate(&FunctionExpr::Sigma(3), 4, &f3).unwrap();
        assert_eq!(s.evaluate(&vec![f3.one(); 4]).unwrap(), f3.one());
        assert!(matches!(s.evaluate(&[f3.one()]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn profiles() {
        assert_eq!(occurrence_profile(&FunctionExpr::tau(3), 7).unwrap(), vec![1, 2, 3, 3, 3, 2, 1]);
        assert_eq!(occurrence_profile(&FunctionExpr::tau(4), 6).unwrap(), vec![1, 2, 3, 3, 2, 1]);
        assert_eq!(occurrence_profile(&parse("R(2,3)").unwrap(), 5).unwrap(), vec![3; 5]);
    }

    fn arb_expr() -> impl Strategy<Value = FunctionExpr> {
        let pattern = proptest::collection::btree_set(2usize..6, 1..3).prop_map(|s| {
            let mut o = vec![1];
            o.extend(s);
            MonomialPattern::new(o).unwrap()
        });
        let leaf = prop_oneof![
            pattern.clone().prop_map(FunctionExpr::Rotation),
            pattern.prop_map(FunctionExpr::Trapezoid),
            (1usize..4).prop_map(FunctionExpr::Sigma),
        ];
        leaf.prop_recursive(2, 6, 3, |inner| {
            prop_oneof![
                (0u64..3, inner.clone()).prop_map(|(c, e)| FunctionExpr::ScalarMul(c, Box::new(e))),
                proptest::collection::vec(inner, 2..4).prop_map(FunctionExpr::Sum),
            ]
        })
    }

    fn points(q: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
        (0..q.pow(n as u32)).map(move |mut i| {
            (0..n)
                .map(|_| {
                    let d = i % q;
                    i /= q;
                    d
                })
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn display_round_trips(e in arb_expr()) {
            let back = parse(&e.to_string()).unwrap();
            let f = make_field(3, 1, None).unwrap();
            let n = e.min_n().max(5);
            prop_assert_eq!(instantiate(&back, n, &f).unwrap(), instantiate(&e, n, &f).unwrap());
        }

        #[test]
        fn rotations_are_shift_invariant(
            offs in proptest::collection::btree_set(2usize..5, 1..3),
            k in 1usize..6,
            which in 0usize..3,
        ) {
            let mut o = vec![1];
            o.extend(offs);
            let e = FunctionExpr::Rotation(MonomialPattern::new(o).unwrap());
            let (f, n) = [(make_field(2, 1, None).unwrap(), 7usize), (make_field(3, 1, None).unwrap(), 5), (make_field(2, 2, None).unwrap(), 5)][which].clone();
            let n = n.max(e.min_n());
            let g = instantiate(&e, n, &f).unwrap();
            let k = (k - 1) % n + 1;
            for x in points(f.q(), n) {
                let mut y = vec![0; n];
                for i in 0..n {
                    y[(i + k) % n] = x[i];
                }
                prop_assert_eq!(g.evaluate_values(&x), g.evaluate_values(&y));
            }
        }

        #[test]
        fn sigma_is_symmetric(k in 1usize..4, n in 4usize..7, x in proptest::collection::vec(0u64..9, 6), i in 0usize..6, j in 0usize..6) {
            let f = make_field(3, 2, None).unwrap();
            let g = instantiate(&FunctionExpr::Sigma(k), n, &f).unwrap();
            let mut x = x[..n].to_vec();
            let before = g.evaluate_values(&x);
            x.swap(i % n, j % n);
            prop_assert_eq!(before, g.evaluate_values(&x));
        }

        #[test]
        fn tau_is_consecutive_trapezoid(k in 2usize..6, extra in 0usize..6) {
            let f = make_field(2, 1, None).unwrap();
            let n = k + extra;
            let offs: Vec<String> = (2..=k).map(|o| o.to_string()).collect();
            let t = parse(&format!("T({})", offs.join(","))).unwrap();
            prop_assert_eq!(instantiate(&FunctionExpr::tau(k), n, &f).unwrap(), instantiate(&t, n, &f).unwrap());
        }

        #[test]
        fn trapezoid_profile_shape(k in 2usize..7, extra in 0usize..10) {
            let n = k + extra;
            let prof = occurrence_profile(&FunctionExpr::tau(k), n).unwrap();
            let rev: Vec<usize> = prof.iter().rev().cloned().collect();
            prop_assert_eq!(&prof, &rev);
            let peak = prof.iter().position(|&c| c == *prof.iter().max().unwrap()).unwrap();
            for w in prof[..=peak].windows(2) {
                prop_assert!(w[1] >= w[0] && w[1] - w[0] <= 1);
            }
            for w in prof[peak..].windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
