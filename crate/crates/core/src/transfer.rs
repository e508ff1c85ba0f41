//! Transfer systems: finite families of decorated exponential sums closed under
//! removing one variable.
//!
//! A system holds a square matrix `M` over `Z[ζ_p]`, a state vector `v(n_0)`
//! computed by enumeration, and a projection `π` with
//! `v(n + 1) = M v(n)` and `S(n + shift) = π · v(n)` for `n >= n_0`.
//!
//! Rotation and trapezoid patterns share one construction. A state is a pair of
//! decorations added to the trapezoid part `T(n)`: a polynomial in the first
//! `w - 1` variables (the front) and one in the last `w - 1` variables (the
//! back), `w` being the largest pattern span. Summing over `X_n = x` turns each
//! state into `q` states one variable shorter, every monomial that collapses to a
//! constant contributing the character `ζ^{Tr(c)}`. The wrapped rotation terms
//! mix front and back variables; they are expanded for `w - 1` steps into pure
//! states before the matrix begins, which is where the projection shift comes from.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{root_power, CycInt};
use crate::error::{Error, Result};
use crate::funcalg::{instantiate, Atom, FunctionExpr, InstantiatedFunction, MonomialPattern};
use crate::galois::{FieldElement, FieldSpec};
use crate::oracle::{exp_sum_with, ExpSumOptions, DEFAULT_BUDGET};
use crate::recurrence::{discover, lcm, IntPolynomial, Provenance, Sequence};

pub const DEFAULT_STATE_LIMIT: usize = 4096;
pub const DEFAULT_BLOWUP_LIMIT: usize = 8192;
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Largest `q^n` enumerated when checking a freshly built system.
const CHECK_POINTS: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct TransferOptions {
    pub state_limit: usize,
    /// Enumeration budget for initial vectors.
    pub budget: u128,
    /// Merge states that provably stay equal.
    pub collapse: bool,
    /// Compare against enumeration right after construction.
    pub check: bool,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { state_limit: DEFAULT_STATE_LIMIT, budget: DEFAULT_BUDGET, collapse: true, check: true }
    }
}

impl TransferOptions {
    pub fn from_oracle(opts: &ExpSumOptions) -> Self {
        TransferOptions { budget: opts.budget, ..Default::default() }
    }

    fn oracle(&self) -> ExpSumOptions {
        ExpSumOptions::with_budget(self.budget)
    }
}

/// A set of states that only feed each other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub label: String,
    pub states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSystem {
    pub kind: String,
    pub expr: String,
    pub p: u64,
    pub states: Vec<String>,
    /// How `states` is ordered.
    pub ordering: String,
    rows: Vec<Vec<(usize, CycInt)>>,
    pub init: Vec<CycInt>,
    pub n0: usize,
    pub projection: Vec<CycInt>,
    pub shift: usize,
    pub blocks: Vec<Block>,
}

/// Serializable form of a [`TransferSystem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDump {
    pub kind: String,
    pub expr: String,
    pub p: u64,
    pub ordering: String,
    pub states: Vec<String>,
    pub matrix: Vec<Vec<CycInt>>,
    pub init: Vec<CycInt>,
    pub n0: usize,
    pub projection: Vec<CycInt>,
    pub shift: usize,
    pub blocks: Vec<Block>,
}

impl TransferSystem {
    #[allow(clippy::too_many_arguments)]
    fn from_dense(
        kind: &str,
        expr: String,
        p: u64,
        states: Vec<String>,
        ordering: &str,
        matrix: Vec<Vec<CycInt>>,
        init: Vec<CycInt>,
        n0: usize,
        projection: Vec<CycInt>,
        shift: usize,
    ) -> TransferSystem {
        let rows = matrix
            .into_iter()
            .map(|row| row.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        let blocks = vec![Block { label: String::new(), states: (0..states.len()).collect() }];
        TransferSystem { kind: kind.into(), expr, p, states, ordering: ordering.into(), rows, init, n0, projection, shift, blocks }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> CycInt {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| CycInt::zero(self.p))
    }

    pub fn matrix(&self) -> Vec<Vec<CycInt>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Square submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Vec<Vec<CycInt>> {
        idx.iter().map(|&i| idx.iter().map(|&j| self.entry(i, j)).collect()).collect()
    }

    /// `M v`.
    pub fn step(&self, v: &[CycInt]) -> Result<Vec<CycInt>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut acc = CycInt::zero(self.p);
                for (j, a) in row {
                    if !v[*j].is_zero() {
                        acc += &(a * &v[*j]);
                    }
                }
                acc
            })
            .collect())
    }

    fn project(&self, v: &[CycInt]) -> CycInt {
        let mut acc = CycInt::zero(self.p);
        for (c, x) in self.projection.iter().zip(v) {
            if !c.is_zero() && !x.is_zero() {
                acc += &(c * x);
            }
        }
        acc
    }

    /// First index of the target sequence produced by [`run`](Self::run).
    pub fn first_n(&self) -> usize {
        self.n0 + self.shift
    }

    /// Target values from [`first_n`](Self::first_n) through `n_target`.
    pub fn run(&self, n_target: usize) -> Result<Sequence> {
        let mut values = Vec::new();
        let mut v = self.init.clone();
        let mut n = self.first_n();
        while n <= n_target {
            values.push(self.project(&v));
            n += 1;
            if n <= n_target {
                v = self.step(&v)?;
            }
        }
        Sequence::new(self.p, self.first_n() as i64, values, Provenance::Transfer)
    }

    pub fn dump(&self) -> SystemDump {
        SystemDump {
            kind: self.kind.clone(),
            expr: self.expr.clone(),
            p: self.p,
            ordering: self.ordering.clone(),
            states: self.states.clone(),
            matrix: self.matrix(),
            init: self.init.clone(),
            n0: self.n0,
            projection: self.projection.clone(),
            shift: self.shift,
            blocks: self.blocks.clone(),
        }
    }

    pub fn from_dump(d: SystemDump) -> Result<TransferSystem> {
        let n = d.states.len();
        if d.matrix.len() != n || d.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        if d.init.len() != n || d.projection.len() != n {
            return Err(Error::Dimension { expected: n, got: d.init.len().min(d.projection.len()) });
        }
        let mut sys = TransferSystem::from_dense(
            &d.kind, d.expr, d.p, d.states, &d.ordering, d.matrix, d.init, d.n0, d.projection, d.shift,
        );
        sys.blocks = d.blocks;
        Ok(sys)
    }

    /// Merges states whose values agree for every `n >= n_0`.
    ///
    /// Starts from classes of equal block and equal initial value, then splits
    /// classes until every member of a class sends the same total weight into
    /// each class. Such a partition is exact: equal on `v(n_0)` and preserved
    /// by every step.
    pub fn lumped(&self) -> TransferSystem {
        let n = self.dim();
        let mut block_of = vec![0usize; n];
        for (b, blk) in self.blocks.iter().enumerate() {
            for &s in &blk.states {
                block_of[s] = b;
            }
        }
        let mut class = assign_classes((0..n).map(|i| (block_of[i], self.init[i].clone())).collect::<Vec<_>>());
        loop {
            let sigs: Vec<_> = (0..n)
                .map(|i| {
                    let mut sums: BTreeMap<usize, CycInt> = BTreeMap::new();
                    for (j, a) in &self.rows[i] {
                        *sums.entry(class[*j]).or_insert_with(|| CycInt::zero(self.p)) += a;
                    }
                    let sums: Vec<(usize, Vec<BigInt>)> =
                        sums.into_iter().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.coeffs().to_vec())).collect();
                    (class[i], sums)
                })
                .collect();
            let next = assign_classes(sigs);
            let done = next.iter().max() == class.iter().max();
            class = next;
            if done {
                break;
            }
        }
        let m = class.iter().max().map_or(0, |c| c + 1);
        let mut members = vec![Vec::new(); m];
        for (i, &c) in class.iter().enumerate() {
            members[c].push(i);
        }
        let rows = members
            .iter()
            .map(|mem| {
                let mut sums: BTreeMap<usize, CycInt> = BTreeMap::new();
                for (j, a) in &self.rows[mem[0]] {
                    *sums.entry(class[*j]).or_insert_with(|| CycInt::zero(self.p)) += a;
                }
                sums.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        let states = members
            .iter()
            .map(|mem| match mem.len() {
                1 => self.states[mem[0]].clone(),
                k => format!("{} (+{} merged)", self.states[mem[0]], k - 1),
            })
            .collect();
        let projection = members
            .iter()
            .map(|mem| mem.iter().fold(CycInt::zero(self.p), |acc, &i| acc + self.projection[i].clone()))
            .collect();
        let mut blocks: Vec<Block> =
            self.blocks.iter().map(|b| Block { label: b.label.clone(), states: Vec::new() }).collect();
        for (c, mem) in members.iter().enumerate() {
            blocks[block_of[mem[0]]].states.push(c);
        }
        TransferSystem {
            kind: self.kind.clone(),
            expr: self.expr.clone(),
            p: self.p,
            states,
            ordering: format!("{}; merged classes ordered by first member", self.ordering),
            rows,
            init: members.iter().map(|mem| self.init[mem[0]].clone()).collect(),
            n0: self.n0,
            projection,
            shift: self.shift,
            blocks,
        }
    }

    /// Enumerates the target at the first few indices and compares.
    fn check_against_oracle(&self, e: &FunctionExpr, f: &FieldSpec) -> Result<()> {
        let first = self.first_n();
        let mut last = first;
        while last < first + 2 && (f.q() as u128).pow(last as u32 + 1) <= CHECK_POINTS {
            last += 1;
        }
        if (f.q() as u128).pow(first as u32) > CHECK_POINTS {
            return Ok(());
        }
        let run = self.run(last)?;
        for n in first..=last {
            let want = exp_sum_with(&instantiate(e, n, f)?, &ExpSumOptions::default())?;
            if run.get(n as i64) != Some(&want) {
                return Err(Error::Consistency(format!("transfer system for {e} disagrees with enumeration at n = {n}")));
            }
        }
        Ok(())
    }
}

/// Numbers distinct keys in order of first appearance.
fn assign_classes<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.into_iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

fn character(f: &FieldSpec, c: u64) -> CycInt {
    root_power(f.p(), f.trace_value(c) as i64)
}

/// `X_{n-l+1} ... X_n` for `l = k - 1, ..., k - j`, each scaled by `betas`.
///
/// With all `betas` equal to one this is the decoration of the `j`-th trapezoid state.
pub fn decorated_trapezoid(k: usize, n: usize, betas: &[FieldElement], f: &FieldSpec) -> Result<InstantiatedFunction> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("trapezoid degree must be at least 2, got {k}")));
    }
    if betas.len() > k - 1 {
        return Err(Error::OutOfRange(format!("at most {} decorations, got {}", k - 1, betas.len())));
    }
    let base = instantiate(&FunctionExpr::tau(k), n, f)?;
    let mut terms = base.terms().to_vec();
    for (s, b) in betas.iter().enumerate() {
        let len = k - 1 - s;
        terms.push((b.clone(), (n + 1 - len..=n).collect()));
    }
    InstantiatedFunction::from_terms(f, n, terms)
}

/// The `k`-state system for `τ_{n,k}` over `F_q`.
///
/// State `j` is `S(T(n) + P_{k-1} + ... + P_{k-j})`, where `P_l` is the product of
/// the last `l` variables. Nonzero decoration coefficients are all normalized
/// to 1, which is what keeps the state count at `k`.
pub fn build_trapezoid_system(k: usize, f: &FieldSpec) -> Result<TransferSystem> {
    build_trapezoid_system_with(k, f, &TransferOptions::default())
}

pub fn build_trapezoid_system_with(k: usize, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("trapezoid degree must be at least 2, got {k}")));
    }
    let p = f.p();
    let q = f.q() as i64;
    let int = |v: i64| CycInt::from_int(p, v);
    let mut m = vec![vec![int(0); k]; k];
    for (j, row) in m.iter_mut().enumerate() {
        row[0] = int(1);
        if j + 1 < k {
            row[j + 1] = int(q - 1);
        } else {
            row[k - 1] = &row[k - 1] - &int(1);
        }
    }
    let ones = vec![f.one(); k - 1];
    let init = (0..k)
        .map(|j| exp_sum_with(&decorated_trapezoid(k, k, &ones[..j], f)?, &opts.oracle()))
        .collect::<Result<Vec<_>>>()?;
    let states = (0..k)
        .map(|j| match j {
            0 => "T(n)".to_string(),
            _ => {
                let parts: Vec<String> = (k - j..k).rev().map(|l| format!("P{l}")).collect();
                format!("T(n) + {}", parts.join(" + "))
            }
        })
        .collect();
    let mut proj = vec![int(0); k];
    proj[0] = int(1);
    let e = FunctionExpr::tau(k);
    let sys = TransferSystem::from_dense(
        "trapezoid",
        e.to_string(),
        p,
        states,
        "by number of suffix-product decorations",
        m,
        init,
        k,
        proj,
        0,
    );
    if opts.check {
        sys.check_against_oracle(&e, f)?;
    }
    Ok(sys)
}

/// Decorations in the front/back picture. Masks index coefficient slots; a back
/// mask has bit `d` for `X_{n-d}`, a front mask has bit `i` for `X_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Deco {
    front: Vec<u64>,
    back: Vec<u64>,
    mixed: BTreeMap<(u32, u32), u64>,
}

struct Engine<'a> {
    f: &'a FieldSpec,
    w: usize,
    /// `(back mask, coefficient)` of the new trapezoid terms ending at `X_n`.
    top: Vec<(u32, u64)>,
}

impl Engine<'_> {
    fn slots(&self) -> usize {
        1 << (self.w - 1)
    }

    fn empty(&self) -> Deco {
        Deco { front: vec![0; self.slots()], back: vec![0; self.slots()], mixed: BTreeMap::new() }
    }

    /// Sets `X_n = x` and renames `X_{n-d}` to distance `d - 1`; returns the constant split off.
    fn step(&self, d: &Deco, x: u64) -> (u64, Deco) {
        let f = self.f;
        let mut back = vec![0u64; 1 << self.w];
        back[..d.back.len()].copy_from_slice(&d.back);
        for &(m, c) in &self.top {
            back[m as usize] = f.add_value(back[m as usize], c);
        }
        let mut out = Deco { front: d.front.clone(), back: vec![0; self.slots()], mixed: BTreeMap::new() };
        let mut constant = 0u64;
        for (m, &c) in back.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = if m & 1 == 1 { f.mul_value(c, x) } else { c };
            let rest = m >> 1;
            if c == 0 {
                continue;
            }
            if rest == 0 {
                constant = f.add_value(constant, c);
            } else {
                out.back[rest] = f.add_value(out.back[rest], c);
            }
        }
        for (&(bm, fm), &c) in &d.mixed {
            let c = if bm & 1 == 1 { f.mul_value(c, x) } else { c };
            if c == 0 {
                continue;
            }
            let rest = bm >> 1;
            if rest == 0 {
                out.front[fm as usize] = f.add_value(out.front[fm as usize], c);
            } else {
                let slot = out.mixed.entry((rest, fm)).or_insert(0);
                *slot = f.add_value(*slot, c);
                if *slot == 0 {
                    out.mixed.remove(&(rest, fm));
                }
            }
        }
        (constant, out)
    }

    fn describe(&self, d: &Deco) -> String {
        let fmt_part = |v: &[u64], var: &dyn Fn(usize) -> String| {
            let terms: Vec<String> = v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(m, &c)| {
                    let vars: Vec<String> = (0..self.w).filter(|b| m >> b & 1 == 1).map(var).collect();
                    let mono = vars.join("*");
                    if c == 1 {
                        mono
                    } else {
                        format!("e{c}*{mono}")
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        let front = fmt_part(&d.front, &|b| format!("X{}", b + 1));
        let back = fmt_part(&d.back, &|b| if b == 0 { "Xn".to_string() } else { format!("X(n-{b})") });
        format!("F[{front}] B[{back}]")
    }

    fn front_label(&self, d: &Deco) -> String {
        let s = self.describe(&Deco { back: vec![0; self.slots()], ..d.clone() });
        s.split(" B[").next().unwrap().to_string()
    }

    /// Decoration as monomials on `X_1..X_n`.
    fn terms(&self, d: &Deco, n: usize) -> Vec<(u64, Vec<usize>)> {
        let mut out = Vec::new();
        for (m, &c) in d.front.iter().enumerate() {
            if c != 0 {
                out.push((c, (0..self.w).filter(|b| m >> b & 1 == 1).map(|b| b + 1).collect()));
            }
        }
        for (m, &c) in d.back.iter().enumerate() {
            if c != 0 {
                out.push((c, (0..self.w).filter(|b| m >> b & 1 == 1).map(|b| n - b).collect()));
            }
        }
        out
    }
}

fn is_consecutive_unit_tau(atoms: &[(FieldElement, Atom)]) -> Option<usize> {
    match atoms {
        [(c, Atom::Trapezoid(pat))] if c.value() == 1 && pat.offsets().iter().enumerate().all(|(i, &o)| o == i + 1) => {
            Some(pat.degree())
        }
        _ => None,
    }
}

/// System for any linear combination of rotation and trapezoid patterns.
pub fn build_pattern_system(e: &FunctionExpr, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    let atoms = e.atoms(f)?;
    let mut pats: Vec<(u64, MonomialPattern, bool)> = Vec::new();
    for (c, a) in &atoms {
        match a {
            Atom::Rotation(p) => pats.push((c.value(), p.clone(), true)),
            Atom::Trapezoid(p) => pats.push((c.value(), p.clone(), false)),
            Atom::Sigma(_) => {
                return Err(Error::Unsupported("symmetric terms cannot be combined with rotation or trapezoid patterns".into()))
            }
        }
    }
    if pats.is_empty() {
        return Err(Error::Unsupported("expression vanishes identically over this field".into()));
    }
    let w = pats.iter().map(|(_, p, _)| p.span()).max().unwrap();
    let rotation = pats.iter().any(|(_, _, r)| *r);
    let top = {
        let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
        for (c, pat, _) in &pats {
            let wm = pat.span();
            let mask = pat.offsets().iter().fold(0u32, |m, &o| m | 1 << (wm - o));
            let slot = acc.entry(mask).or_insert(0);
            *slot = f.add_value(*slot, *c);
        }
        acc.into_iter().filter(|(_, c)| *c != 0).collect()
    };
    let engine = Engine { f, w, top };

    // wrapped rotation terms, then expansion into pure states
    let mut start = engine.empty();
    for (c, pat, rot) in &pats {
        if !rot {
            continue;
        }
        let wm = pat.span();
        for s in 1..wm {
            let mut bm = 0u32;
            let mut fm = 0u32;
            for &o in pat.offsets() {
                if o <= wm - s {
                    bm |= 1 << (wm - s - o);
                } else {
                    fm |= 1 << (s + o - wm - 1);
                }
            }
            let slot = start.mixed.entry((bm, fm)).or_insert(0);
            *slot = f.add_value(*slot, *c);
        }
    }
    start.mixed.retain(|_, c| *c != 0);
    let shift = if rotation { w - 1 } else { 0 };
    let n0 = if rotation { 2 * w - 2 } else { w };
    let mut frontier: BTreeMap<Deco, CycInt> = BTreeMap::new();
    frontier.insert(start, CycInt::one(f.p()));
    for _ in 0..shift {
        let mut next: BTreeMap<Deco, CycInt> = BTreeMap::new();
        for (d, wgt) in &frontier {
            for x in 0..f.q() {
                let (c, d2) = engine.step(d, x);
                *next.entry(d2).or_insert_with(|| CycInt::zero(f.p())) += &(wgt * &character(f, c));
            }
        }
        next.retain(|_, v| !v.is_zero());
        frontier = next;
    }
    debug_assert!(frontier.keys().all(|d| d.mixed.is_empty()));

    // breadth-first closure under one step
    let mut index: HashMap<Deco, usize> = HashMap::new();
    let mut order: Vec<Deco> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut edges: Vec<Vec<(usize, CycInt)>> = Vec::new();
    let intern = |d: Deco, index: &mut HashMap<Deco, usize>, order: &mut Vec<Deco>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = index.get(&d) {
            return Ok(i);
        }
        if order.len() >= opts.state_limit {
            return Err(Error::StateLimit { states: order.len() + 1, limit: opts.state_limit });
        }
        let i = order.len();
        index.insert(d.clone(), i);
        order.push(d);
        queue.push_back(i);
        Ok(i)
    };
    for d in frontier.keys() {
        intern(d.clone(), &mut index, &mut order, &mut queue)?;
    }
    while let Some(i) = queue.pop_front() {
        let d = order[i].clone();
        let mut row: BTreeMap<usize, CycInt> = BTreeMap::new();
        for x in 0..f.q() {
            let (c, d2) = engine.step(&d, x);
            let j = intern(d2, &mut index, &mut order, &mut queue)?;
            *row.entry(j).or_insert_with(|| CycInt::zero(f.p())) += &character(f, c);
        }
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }

    // canonical order: lexicographic over (front, back) coefficient slots
    let mut perm: Vec<usize> = (0..order.len()).collect();
    perm.sort_by(|&a, &b| order[a].cmp(&order[b]));
    let mut pos = vec![0usize; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }
    let rows: Vec<Vec<(usize, CycInt)>> = perm
        .iter()
        .map(|&old| {
            let mut r: Vec<(usize, CycInt)> = edges[old].iter().map(|(j, v)| (pos[*j], v.clone())).collect();
            r.sort_by_key(|(j, _)| *j);
            r
        })
        .collect();
    let decos: Vec<Deco> = perm.iter().map(|&old| order[old].clone()).collect();
    let projection: Vec<CycInt> =
        decos.iter().map(|d| frontier.get(d).cloned().unwrap_or_else(|| CycInt::zero(f.p()))).collect();

    // initial values by enumeration at n0
    let mut base_terms: Vec<(u64, Vec<usize>)> = Vec::new();
    for (c, pat, _) in &pats {
        let t = instantiate(&FunctionExpr::Trapezoid(pat.clone()), n0, f)?;
        base_terms.extend(t.terms().iter().map(|(_, m)| (*c, m.clone())));
    }
    let oracle = opts.oracle();
    let init = decos
        .iter()
        .map(|d| {
            let terms = base_terms
                .iter()
                .cloned()
                .chain(engine.terms(d, n0))
                .map(|(c, m)| (f.element(c).unwrap(), m));
            exp_sum_with(&InstantiatedFunction::from_terms(f, n0, terms)?, &oracle)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut block_ids: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut block_order: Vec<String> = Vec::new();
    for (i, d) in decos.iter().enumerate() {
        let label = engine.front_label(d);
        if !block_ids.contains_key(&label) {
            block_order.push(label.clone());
        }
        block_ids.entry(label).or_default().push(i);
    }
    let blocks = block_order.into_iter().map(|l| Block { states: block_ids.remove(&l).unwrap(), label: l }).collect();

    let mut sys = TransferSystem {
        kind: if rotation { "rotation".into() } else { "trapezoid".into() },
        expr: e.to_string(),
        p: f.p(),
        states: decos.iter().map(|d| engine.describe(d)).collect(),
        ordering: "lexicographic over (front, back) coefficient slots; slots by monomial mask, coefficients by enumeration index".into(),
        rows,
        init,
        n0,
        projection,
        shift,
        blocks,
    };
    if opts.collapse {
        sys = sys.lumped();
    }
    if opts.check {
        sys.check_against_oracle(e, f)?;
    }
    Ok(sys)
}

/// System for `R_{pattern}(n)` over `f`.
pub fn build_rotation_system(pattern: &MonomialPattern, f: &FieldSpec) -> Result<TransferSystem> {
    build_rotation_system_with(pattern, f, &TransferOptions::default())
}

pub fn build_rotation_system_with(pattern: &MonomialPattern, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    build_pattern_system(&FunctionExpr::Rotation(pattern.clone()), f, opts)
}

/// Symmetric states `a_β(n) = S(σ_{n,k} + Σ_j β_j σ_{n,k-j})` over all `β ∈ F_q^{k-1}`,
/// ordered by `Σ_j β_j q^{j-1}` (so `β_1` varies fastest).
pub fn build_symmetric_system(k: usize, f: &FieldSpec) -> Result<TransferSystem> {
    build_symmetric_system_with(k, f, &TransferOptions::default())
}

pub fn build_symmetric_system_with(k: usize, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    if k < 1 {
        return Err(Error::OutOfRange("symmetric degree must be at least 1".into()));
    }
    let q = f.q();
    let count = (q as u128).checked_pow(k as u32 - 1).filter(|&c| c <= opts.state_limit as u128);
    let Some(count) = count else {
        return Err(Error::StateLimit { states: usize::MAX, limit: opts.state_limit });
    };
    let count = count as usize;
    let decode = |mut i: usize| -> Vec<u64> {
        (0..k - 1)
            .map(|_| {
                let d = i as u64 % q;
                i /= q as usize;
                d
            })
            .collect()
    };
    let encode = |b: &[u64]| b.iter().rev().fold(0usize, |acc, &d| acc * q as usize + d as usize);
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let beta = decode(i);
        let mut row: BTreeMap<usize, CycInt> = BTreeMap::new();
        for x in 0..q {
            // β'_j = β_j + x β_{j-1} with β_0 = 1; weight ζ^{Tr(x β_{k-1})}
            let mut next = beta.clone();
            for j in 0..k - 1 {
                let prev = if j == 0 { 1 } else { beta[j - 1] };
                next[j] = f.add_value(beta[j], f.mul_value(x, prev));
            }
            let last = if k == 1 { 1 } else { beta[k - 2] };
            let c = f.mul_value(x, last);
            *row.entry(encode(&next)).or_insert_with(|| CycInt::zero(f.p())) += &character(f, c);
        }
        rows.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>());
    }
    let oracle = opts.oracle();
    let init = (0..count)
        .map(|i| {
            let beta = decode(i);
            let mut terms = instantiate(&FunctionExpr::Sigma(k), k, f)?.terms().to_vec();
            for (j, &b) in beta.iter().enumerate() {
                if b != 0 && k > j + 1 {
                    let s = instantiate(&FunctionExpr::Sigma(k - j - 1), k, f)?;
                    terms.extend(s.terms().iter().map(|(_, m)| (f.element(b).unwrap(), m.clone())));
                }
            }
            exp_sum_with(&InstantiatedFunction::from_terms(f, k, terms)?, &oracle)
        })
        .collect::<Result<Vec<_>>>()?;
    let states = (0..count)
        .map(|i| {
            let b: Vec<String> = decode(i).iter().map(|d| d.to_string()).collect();
            format!("beta=({})", b.join(","))
        })
        .collect();
    let mut projection = vec![CycInt::zero(f.p()); count];
    projection[0] = CycInt::one(f.p());
    let e = FunctionExpr::Sigma(k);
    let sys = TransferSystem {
        kind: "symmetric".into(),
        expr: e.to_string(),
        p: f.p(),
        states,
        ordering: "index = sum of beta_j q^(j-1), beta_1 least significant".into(),
        rows,
        init,
        n0: k,
        projection,
        shift: 0,
        blocks: vec![Block { label: String::new(), states: (0..count).collect() }],
    };
    if opts.check {
        sys.check_against_oracle(&e, f)?;
    }
    Ok(sys)
}

/// System for `Σ_m c_m σ_{n,m}`, reachable coefficient tuples only.
fn build_symmetric_combination(e: &FunctionExpr, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    let atoms = e.atoms(f)?;
    let top = atoms
        .iter()
        .map(|(_, a)| match a {
            Atom::Sigma(k) => *k,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    if top == 0 {
        return Err(Error::Unsupported("expression vanishes identically over this field".into()));
    }
    // gamma[m-1] is the coefficient of σ_{n,m}
    let mut start = vec![0u64; top];
    for (c, a) in &atoms {
        if let Atom::Sigma(k) = a {
            start[k - 1] = c.value();
        }
    }
    let step = |g: &[u64], x: u64| -> (u64, Vec<u64>) {
        let c = f.mul_value(x, g[0]);
        let next = (0..top)
            .map(|m| if m + 1 < top { f.add_value(g[m], f.mul_value(x, g[m + 1])) } else { g[m] })
            .collect();
        (c, next)
    };
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut order = vec![start.clone()];
    index.insert(start, 0);
    let mut edges: Vec<Vec<(usize, CycInt)>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let g = order[i].clone();
        let mut row: BTreeMap<usize, CycInt> = BTreeMap::new();
        for x in 0..f.q() {
            let (c, g2) = step(&g, x);
            let j = match index.get(&g2) {
                Some(&j) => j,
                None => {
                    if order.len() >= opts.state_limit {
                        return Err(Error::StateLimit { states: order.len() + 1, limit: opts.state_limit });
                    }
                    index.insert(g2.clone(), order.len());
                    order.push(g2);
                    order.len() - 1
                }
            };
            *row.entry(j).or_insert_with(|| CycInt::zero(f.p())) += &character(f, c);
        }
        edges.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        i += 1;
    }
    let oracle = opts.oracle();
    let init = order
        .iter()
        .map(|g| {
            let mut terms = Vec::new();
            for (m, &c) in g.iter().enumerate() {
                if c != 0 {
                    let s = instantiate(&FunctionExpr::Sigma(m + 1), top, f)?;
                    terms.extend(s.terms().iter().map(|(_, mono)| (f.element(c).unwrap(), mono.clone())));
                }
            }
            exp_sum_with(&InstantiatedFunction::from_terms(f, top, terms)?, &oracle)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = order.len();
    let mut projection = vec![CycInt::zero(f.p()); n];
    projection[0] = CycInt::one(f.p());
    let sys = TransferSystem {
        kind: "symmetric".into(),
        expr: e.to_string(),
        p: f.p(),
        states: order
            .iter()
            .map(|g| format!("gamma=({})", g.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")))
            .collect(),
        ordering: "breadth-first from the target; gamma_m is the coefficient of sigma(m)".into(),
        rows: edges,
        init,
        n0: top,
        projection,
        shift: 0,
        blocks: vec![Block { label: String::new(), states: (0..n).collect() }],
    };
    if opts.check {
        sys.check_against_oracle(e, f)?;
    }
    Ok(sys)
}

/// `M(p)` with `(j, k)` entry `ζ^{j(k-j)}`, `0 <= j, k < p`.
pub fn quadratic_matrix(p: u64) -> Result<Vec<Vec<CycInt>>> {
    if p == 2 {
        return Err(Error::Unsupported("M(2) is not defined; use the symmetric system".into()));
    }
    if !crate::galois::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((0..p)
        .map(|j| (0..p).map(|k| root_power(p, (j * ((k + p - j) % p)) as i64)).collect())
        .collect())
}

/// The system `a_s(n) = S(σ_{n,2} + s σ_{n,1})` over `F_p` with matrix `M(p)`.
pub fn build_quadratic_matrix(p: u64) -> Result<TransferSystem> {
    let m = quadratic_matrix(p)?;
    let f = crate::galois::make_field(p, 1, None)?;
    let init = (0..p)
        .map(|s| {
            let e = FunctionExpr::Sum(vec![
                FunctionExpr::Sigma(2),
                FunctionExpr::ScalarMul(s, Box::new(FunctionExpr::Sigma(1))),
            ]);
            exp_sum_with(&instantiate(&e, 2, &f)?, &ExpSumOptions::default())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut proj = vec![CycInt::zero(p); p as usize];
    proj[0] = CycInt::one(p);
    let sys = TransferSystem::from_dense(
        "quadratic",
        FunctionExpr::Sigma(2).to_string(),
        p,
        (0..p).map(|s| format!("s={s}")).collect(),
        "by s",
        m,
        init,
        2,
        proj,
        0,
    );
    sys.check_against_oracle(&FunctionExpr::Sigma(2), &f)?;
    Ok(sys)
}

/// Picks the construction that fits `e`.
pub fn build_for_expr(e: &FunctionExpr, f: &FieldSpec, opts: &TransferOptions) -> Result<TransferSystem> {
    let atoms = e.atoms(f)?;
    if atoms.is_empty() {
        return Err(Error::Unsupported("expression vanishes identically over this field".into()));
    }
    if atoms.iter().all(|(_, a)| matches!(a, Atom::Sigma(_))) {
        if let [(c, Atom::Sigma(k))] = atoms.as_slice() {
            if c.value() == 1 && (f.q() as u128).pow(*k as u32 - 1) <= opts.state_limit as u128 {
                return build_symmetric_system_with(*k, f, opts);
            }
        }
        return build_symmetric_combination(e, f, opts);
    }
    if let Some(k) = is_consecutive_unit_tau(&atoms) {
        return build_trapezoid_system_with(k, f, opts);
    }
    build_pattern_system(e, f, opts)
}

#[derive(Debug, Clone, Copy)]
pub struct AnnihilatorOptions {
    pub degree_cap: usize,
    pub blowup_limit: usize,
}

impl Default for AnnihilatorOptions {
    fn default() -> Self {
        AnnihilatorOptions { degree_cap: DEFAULT_DEGREE_CAP, blowup_limit: DEFAULT_BLOWUP_LIMIT }
    }
}

type SparseInt = Vec<Vec<(usize, BigInt)>>;

/// Integer matrix of the `Z`-linear map `M` on `Z[ζ_p]^n`, restricted to `idx`.
fn blow_up(sys: &TransferSystem, idx: &[usize]) -> SparseInt {
    let d = (sys.p - 1) as usize;
    let local: HashMap<usize, usize> = idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut out: SparseInt = vec![Vec::new(); idx.len() * d];
    for (a, &i) in idx.iter().enumerate() {
        for (j, v) in &sys.rows[i] {
            let Some(&b) = local.get(j) else { continue };
            let reg = v.regular_matrix();
            for r in 0..d {
                for c in 0..d {
                    if !reg[r][c].is_zero() {
                        out[a * d + r].push((b * d + c, reg[r][c].clone()));
                    }
                }
            }
        }
    }
    for row in &mut out {
        row.sort_by_key(|(c, _)| *c);
    }
    out
}

fn sparse_mul(b: &SparseInt, v: &[BigInt]) -> Vec<BigInt> {
    b.iter().map(|row| row.iter().map(|(j, a)| a * &v[*j]).sum()).collect()
}

fn content_reduce(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        row.iter_mut().for_each(|x| *x /= &g);
    }
}

/// Fraction-free row echelon form tracked with pivot columns.
struct Echelon {
    rows: Vec<(usize, Vec<BigInt>)>,
    width: usize,
}

impl Echelon {
    fn new(width: usize) -> Self {
        Echelon { rows: Vec::new(), width }
    }

    /// Reduces `v` in place against the basis; only the first `width` entries select pivots.
    fn reduce(&self, v: &mut [BigInt]) {
        for (pc, row) in &self.rows {
            if v[*pc].is_zero() {
                continue;
            }
            let a = row[*pc].clone();
            let b = v[*pc].clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            for (x, y) in v.iter_mut().zip(row) {
                *x = &*x * &a - y * &b;
            }
            content_reduce(v);
        }
    }

    fn pivot(&self, v: &[BigInt]) -> Option<usize> {
        v[..self.width].iter().position(|x| !x.is_zero())
    }

    fn insert(&mut self, v: Vec<BigInt>) -> bool {
        match self.pivot(&v) {
            Some(pc) => {
                self.rows.push((pc, v));
                true
            }
            None => false,
        }
    }
}

/// Minimal polynomial of `v` under `b`: the least monic `g` with `g(b) v = 0`.
fn local_minpoly(b: &SparseInt, v: Vec<BigInt>, cap: usize) -> Result<(IntPolynomial, Vec<Vec<BigInt>>)> {
    let n = v.len();
    let mut ech = Echelon::new(n);
    let mut krylov = Vec::new();
    let mut cur = v;
    for deg in 0..=cap {
        krylov.push(cur.clone());
        let mut aug = cur.clone();
        aug.resize(n + cap + 1, BigInt::zero());
        aug[n + deg] = BigInt::one();
        ech.reduce(&mut aug);
        if ech.pivot(&aug).is_none() {
            let lead = aug[n + deg].clone();
            let coeffs: Vec<BigInt> = aug[n..=n + deg]
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(&lead);
                    debug_assert!(r.is_zero(), "minimal polynomial of an integer matrix has integer coefficients");
                    q
                })
                .collect();
            krylov.pop();
            return Ok((IntPolynomial::new(coeffs)?, krylov));
        }
        ech.insert(aug);
        cur = sparse_mul(b, &cur);
    }
    Err(Error::DegreeCap(cap))
}

fn minpoly_of_block(b: &SparseInt, cap: usize) -> Result<IntPolynomial> {
    let n = b.len();
    let mut span = Echelon::new(n);
    let mut acc = IntPolynomial::one();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        let mut probe = e.clone();
        span.reduce(&mut probe);
        if span.pivot(&probe).is_none() {
            continue;
        }
        let (g, krylov) = local_minpoly(b, e, cap)?;
        acc = lcm(&acc, &g);
        if acc.degree() > cap {
            return Err(Error::DegreeCap(cap));
        }
        for mut k in krylov {
            span.reduce(&mut k);
            span.insert(k);
        }
        if span.rows.len() == n {
            break;
        }
    }
    Ok(acc)
}

/// Splits the states into groups with no matrix entries between them.
fn components(sys: &TransferSystem) -> Vec<Vec<usize>> {
    let n = sys.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for (j, _) in &sys.rows[i] {
            let (a, b) = (find(&mut parent, i), find(&mut parent, *j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Minimal polynomial over `Q` of the integer matrix obtained by replacing each
/// entry with its regular representation. It is monic with integer coefficients
/// and annihilates every sequence the system projects.
pub fn integer_annihilator(sys: &TransferSystem, opts: &AnnihilatorOptions) -> Result<IntPolynomial> {
    let dim = sys.dim() * (sys.p - 1) as usize;
    if dim > opts.blowup_limit {
        return Err(Error::BlowupLimit { dim, limit: opts.blowup_limit });
    }
    // block-diagonal pieces with identical matrices share a minimal polynomial
    let mut seen: Vec<Vec<Vec<CycInt>>> = Vec::new();
    let mut acc = IntPolynomial::one();
    for comp in components(sys) {
        let sub = sys.submatrix(&comp);
        if seen.contains(&sub) {
            continue;
        }
        let g = minpoly_of_block(&blow_up(sys, &comp), opts.degree_cap)?;
        acc = lcm(&acc, &g);
        if acc.degree() > opts.degree_cap {
            return Err(Error::DegreeCap(opts.degree_cap));
        }
        seen.push(sub);
    }
    Ok(acc)
}

/// Minimal recurrence of the projected sequence itself, which divides
/// [`integer_annihilator`] and is often much smaller.
pub fn sequence_annihilator(sys: &TransferSystem, opts: &AnnihilatorOptions) -> Result<IntPolynomial> {
    let dim = sys.dim() * (sys.p - 1) as usize;
    if dim > opts.blowup_limit {
        return Err(Error::BlowupLimit { dim, limit: opts.blowup_limit });
    }
    let all: Vec<usize> = (0..sys.dim()).collect();
    let b = blow_up(sys, &all);
    let v: Vec<BigInt> = sys.init.iter().flat_map(|c| c.coeffs().to_vec()).collect();
    let (g, _) = local_minpoly(&b, v, opts.degree_cap)?;
    let d = g.degree();
    if d == 0 {
        return Ok(g);
    }
    let s = sys.run(sys.first_n() + 3 * d + 1)?;
    discover(&s, d, Some(d))
}
