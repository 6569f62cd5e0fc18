//! Structural computations on finite groups: subgroup closure, lower central
//! series, centers (closed form and brute force), central quotients, exponents
//! and presentation checks.
//!
//! Everything runs on [`FiniteGroup`], whose elements are dense `u64` codes
//! with the identity at 0. Nilpotent products are encoded mixed-radix by their
//! normal-form exponents ([`NilCodes`]); quotients are built lazily on top of
//! any parent ([`QuotientGroup`]); finitely presented groups come from coset
//! enumeration ([`TableGroup`]).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{self, Evaluate, Syntax, SyntaxError};
use crate::nilprod::{self, Element, NilGroup, NilprodError, Regime};

/// Default brute-force cap.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cap exceeded: {what} needs {needed} elements, cap is {cap}")]
    CapExceeded { what: &'static str, needed: String, cap: u64 },
    #[error("{0} is infinite; enumeration needs a finite group")]
    Infinite(String),
    #[error("subgroup is not central: {0} does not commute with every generator")]
    NotCentral(String),
    #[error("no closed-form center for {0}")]
    NoClosedForm(String),
    #[error("coset enumeration exceeded {0} cosets")]
    Enumeration(usize),
    #[error("unknown generator x{index}: the group has {r} generators")]
    UnknownGenerator { index: usize, r: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Nilprod(#[from] NilprodError),
}

/// A finite group on the codes `0..order()`, identity `0`.
pub trait FiniteGroup: Send + Sync {
    fn order(&self) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> u64;
    fn generators(&self) -> Vec<u64>;
    fn label(&self, a: u64) -> String;

    fn comm(&self, a: u64, b: u64) -> u64 {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    fn pow(&self, a: u64, n: i64) -> u64 {
        let (mut base, mut n) = if n < 0 { (self.inv(a), n.unsigned_abs()) } else { (a, n as u64) };
        let mut acc = 0;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    fn element_order(&self, a: u64) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

fn check_cap(what: &'static str, needed: u64, cap: u64) -> Result<(), GroupError> {
    if needed > cap {
        return Err(GroupError::CapExceeded { what, needed: needed.to_string(), cap });
    }
    Ok(())
}

/// The same group presented on a different generating list.
pub struct Relabeled {
    pub inner: Arc<dyn FiniteGroup>,
    pub gens: Vec<u64>,
}

impl FiniteGroup for Relabeled {
    fn order(&self) -> u64 {
        self.inner.order()
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.inner.mul(a, b)
    }
    fn inv(&self, a: u64) -> u64 {
        self.inner.inv(a)
    }
    fn generators(&self) -> Vec<u64> {
        self.gens.clone()
    }
    fn label(&self, a: u64) -> String {
        self.inner.label(a)
    }
}

/// Elements as sorted codes together with a generating set; equality is
/// equality of element sets.
#[derive(Debug, Clone)]
pub struct Subgroup {
    generators: Vec<u64>,
    elements: Vec<u64>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn trivial() -> Subgroup {
        Subgroup { generators: Vec::new(), elements: vec![0] }
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&a| other.contains(a))
    }
}

/// Subgroup generated by `gens`; fails once it would exceed `cap`.
pub fn closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[u64], cap: u64) -> Result<Subgroup, GroupError> {
    let gens: Vec<u64> = gens.iter().copied().filter(|&x| x != 0).collect();
    let mut seen: HashSet<u64> = HashSet::from([0]);
    let mut queue = VecDeque::from([0u64]);
    while let Some(a) = queue.pop_front() {
        for &s in &gens {
            let b = g.mul(a, s);
            if seen.insert(b) {
                check_cap("subgroup closure", seen.len() as u64, cap)?;
                queue.push_back(b);
            }
        }
    }
    let mut elements: Vec<u64> = seen.into_iter().collect();
    elements.par_sort_unstable();
    let mut generators = gens;
    generators.sort_unstable();
    generators.dedup();
    Ok(Subgroup { generators, elements })
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[u64], cap: u64) -> Result<Subgroup, GroupError> {
    let group_gens = g.generators();
    let mut gens: Vec<u64> = gens.to_vec();
    let mut sub = closure(g, &gens, cap)?;
    loop {
        let mut extra = Vec::new();
        for &a in &gens {
            for &t in &group_gens {
                let conj = g.mul(g.mul(g.inv(t), a), t);
                if !sub.contains(conj) && !extra.contains(&conj) {
                    extra.push(conj);
                }
            }
        }
        if extra.is_empty() {
            return Ok(sub);
        }
        gens.extend(extra);
        sub = closure(g, &gens, cap)?;
    }
}

/// `G_i` by iterated commutators: `G_{i+1}` is the normal closure of
/// `[a, x]` over generators `a` of `G_i` and `x` of `G`.
pub fn lower_central<G: FiniteGroup + ?Sized>(g: &G, i: usize, cap: u64) -> Result<Subgroup, GroupError> {
    let group_gens = g.generators();
    let mut term = closure(g, &group_gens, cap)?;
    for _ in 1..i.max(1) {
        if term.is_trivial() {
            break;
        }
        let comms: Vec<u64> = term
            .generators
            .iter()
            .flat_map(|&a| group_gens.iter().map(move |&x| (a, x)))
            .map(|(a, x)| g.comm(a, x))
            .collect();
        term = normal_closure(g, &comms, cap)?;
    }
    Ok(term)
}

/// Nilpotency class: least `c` with `G_{c+1} = 1`.
pub fn nilpotency_class<G: FiniteGroup + ?Sized>(g: &G, max: usize, cap: u64) -> Result<Option<usize>, GroupError> {
    for c in 0..=max {
        if lower_central(g, c + 1, cap)?.is_trivial() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Elements commuting with every generator, which is the center since the
/// generators generate.
pub fn center_bruteforce<G: FiniteGroup + ?Sized>(g: &G, cap: u64) -> Result<Subgroup, GroupError> {
    check_cap("brute-force center", g.order(), cap)?;
    let gens = g.generators();
    let elements: Vec<u64> = (0..g.order())
        .into_par_iter()
        .filter(|&a| gens.iter().all(|&x| g.mul(a, x) == g.mul(x, a)))
        .collect();
    Ok(Subgroup { generators: small_generating_set(g, &elements), elements })
}

/// Elements commuting with every element; the definitional center.
pub fn center_full<G: FiniteGroup + ?Sized>(g: &G, cap: u64) -> Result<Vec<u64>, GroupError> {
    check_cap("full-commuting center", g.order().saturating_mul(g.order()), cap)?;
    let n = g.order();
    Ok((0..n).into_par_iter().filter(|&a| (0..n).all(|b| g.mul(a, b) == g.mul(b, a))).collect())
}

/// Greedy generators for a subgroup given by its sorted elements.
fn small_generating_set<G: FiniteGroup + ?Sized>(g: &G, elements: &[u64]) -> Vec<u64> {
    let mut gens = Vec::new();
    let mut span: HashSet<u64> = HashSet::from([0]);
    for &a in elements {
        if span.contains(&a) {
            continue;
        }
        gens.push(a);
        let sub = closure(g, &gens, u64::MAX).expect("no cap");
        span = sub.elements.into_iter().collect();
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

/// Least common multiple of the element orders.
pub fn exponent_of<G: FiniteGroup + ?Sized>(g: &G, s: &Subgroup) -> u64 {
    s.elements.par_iter().map(|&a| g.element_order(a)).reduce(|| 1, |a, b| a.lcm(&b))
}

struct CodeEval<'a, G: ?Sized>(&'a G, Vec<u64>);

impl<G: FiniteGroup + ?Sized> Evaluate for CodeEval<'_, G> {
    type Elem = u64;
    type Error = GroupError;

    fn identity(&self) -> u64 {
        0
    }

    fn generator(&self, i: usize) -> Result<u64, GroupError> {
        self.1.get(i.wrapping_sub(1)).copied().ok_or(GroupError::UnknownGenerator { index: i, r: self.1.len() })
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.0.mul(*a, *b)
    }

    fn pow(&self, a: &u64, n: &BigInt) -> u64 {
        let m = BigInt::from(self.0.order());
        self.0.pow(*a, n.mod_floor(&m).to_i64().expect("reduced"))
    }

    fn comm(&self, a: &u64, b: &u64) -> u64 {
        self.0.comm(*a, *b)
    }
}

/// Evaluate a relator word (relator grammar) on the group's generators.
pub fn evaluate_word<G: FiniteGroup + ?Sized>(g: &G, word: &str) -> Result<u64, GroupError> {
    let factors = expr::parse(word, Syntax::RELATOR)?;
    expr::evaluate(&CodeEval(g, g.generators()), &factors)
}

/// True iff every relation holds on the generators and the order is as
/// expected; an epimorphic image of the presented group with the same finite
/// order is isomorphic to it.
pub fn matches_presentation<G: FiniteGroup + ?Sized>(g: &G, relations: &[String], expected_order: u64) -> Result<bool, GroupError> {
    for r in relations {
        if evaluate_word(g, r)? != 0 {
            return Ok(false);
        }
    }
    Ok(g.order() == expected_order)
}

/// Mixed-radix codes for a finite nilpotent product.
#[derive(Debug, Clone)]
pub struct NilCodes {
    group: Arc<NilGroup>,
    order: u64,
}

impl NilCodes {
    pub fn new(group: &Arc<NilGroup>) -> Result<NilCodes, GroupError> {
        let order = group.order().ok_or_else(|| GroupError::Infinite(group.spec().to_string()))?;
        let order = order.to_u64().ok_or(GroupError::CapExceeded {
            what: "element coding",
            needed: order.to_string(),
            cap: u64::MAX,
        })?;
        Ok(NilCodes { group: group.clone(), order })
    }

    pub fn group(&self) -> &Arc<NilGroup> {
        &self.group
    }

    pub fn encode(&self, a: &Element) -> u64 {
        nilprod::encode(a)
    }

    pub fn decode(&self, code: u64) -> Element {
        nilprod::decode(&self.group, code)
    }

    pub fn parse(&self, src: &str) -> Result<u64, GroupError> {
        Ok(self.encode(&nilprod::parse(&self.group, src)?))
    }

    /// Codes of the elements whose exponents vanish below weight `i`.
    pub fn weight_span(&self, i: usize) -> Vec<u64> {
        let g = &self.group;
        let mut out = vec![0u64];
        let mut stride = 1u64;
        for idx in 0..g.len() {
            let m = g.moduli()[idx].to_u64().expect("finite");
            if g.weight(idx) >= i {
                out = out.iter().flat_map(|&c| (0..m).map(move |e| c + e * stride)).collect();
            }
            stride *= m;
        }
        out.sort_unstable();
        out
    }
}

impl FiniteGroup for NilCodes {
    fn order(&self) -> u64 {
        self.order
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        nilprod::encode(&self.decode(a).mul(&self.decode(b)).expect("same group"))
    }

    fn inv(&self, a: u64) -> u64 {
        nilprod::encode(&self.decode(a).inv())
    }

    fn comm(&self, a: u64, b: u64) -> u64 {
        nilprod::encode(&self.decode(a).comm(&self.decode(b)).expect("same group"))
    }

    fn generators(&self) -> Vec<u64> {
        (1..=self.group.rank()).map(|i| nilprod::encode(&nilprod::generator(&self.group, i).expect("in range"))).collect()
    }

    fn label(&self, a: u64) -> String {
        let s = nilprod::format(&self.decode(a));
        if s.is_empty() { "e".into() } else { s }
    }
}

/// `G_i` of a nilpotent product, compared with the span of basis items of
/// weight at least `i` (generic regime).
#[derive(Debug, Clone)]
pub struct LowerCentralTerm {
    pub subgroup: Subgroup,
    /// An element in exactly one of the two sets, if they differ.
    pub counterexample: Option<u64>,
}

pub fn lower_central_checked(codes: &NilCodes, i: usize, cap: u64) -> Result<LowerCentralTerm, GroupError> {
    let subgroup = lower_central(codes, i, cap)?;
    let counterexample = if codes.group.spec().regime() == Regime::Special23 {
        None
    } else {
        let span = codes.weight_span(i.max(1));
        if span == subgroup.elements {
            None
        } else {
            let a: HashSet<u64> = span.iter().copied().collect();
            let b: HashSet<u64> = subgroup.elements.iter().copied().collect();
            a.symmetric_difference(&b).min().copied()
        }
    };
    Ok(LowerCentralTerm { subgroup, counterexample })
}

/// Generators of `Z(G)` from the center theorems: `x_r^{p^{a_{r-1}}}` and the
/// weight-k items for single-prime products with `p >= k`; for the class-3
/// 2-group basis, `x_r^{2^{a_{r-1}+1}}`, `G_3` and `[x_j,x_i]^{2^{a_i}}`.
pub fn center_formula(g: &Arc<NilGroup>) -> Result<Vec<Element>, GroupError> {
    let spec = g.spec();
    let no_form = || GroupError::NoClosedForm(spec.to_string());
    let (p, alphas) = match (spec.prime(), spec.alphas()) {
        (Some(p), Some(a)) => (p, a),
        _ => return Err(no_form()),
    };
    let r = spec.rank();
    let k = spec.class_k();
    if r == 1 {
        return Ok(vec![nilprod::generator(g, 1)?]);
    }
    let xr = nilprod::generator(g, r)?;
    let pow_p = |e: u32| BigInt::from(p).pow(e);
    let mut out = Vec::new();
    match spec.regime() {
        Regime::Abelian => out.extend((1..=r).map(|i| nilprod::generator(g, i).expect("in range"))),
        Regime::Generic => {
            if (p as usize) < k {
                return Err(no_form());
            }
            out.push(xr.pow(&pow_p(alphas[r - 2])));
            out.extend((0..g.len()).filter(|&i| g.weight(i) == k).map(|i| nilprod::basis_element(g, i)));
        }
        Regime::Special23 => {
            out.push(xr.pow(&pow_p(alphas[r - 2] + 1)));
            let gens: Vec<Element> = (1..=r).map(|i| nilprod::generator(g, i).expect("in range")).collect();
            for i in 0..r {
                for j in i + 1..r {
                    let c = gens[j].comm(&gens[i])?;
                    out.push(c.pow(&pow_p(alphas[i])));
                    for x in &gens {
                        out.push(c.comm(x)?);
                    }
                }
            }
        }
    }
    out.retain(|z| !z.is_identity());
    out.dedup();
    Ok(out)
}

/// Quotient of a finite group by a central subgroup; cosets are numbered in
/// order of their least parent code, so the identity coset is 0.
pub struct QuotientGroup {
    parent: Arc<dyn FiniteGroup>,
    kernel: Subgroup,
    coset_of: Vec<u32>,
    reps: Vec<u64>,
}

impl fmt::Debug for QuotientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuotientGroup(order {}, kernel {})", self.reps.len(), self.kernel.len())
    }
}

impl QuotientGroup {
    pub fn new(parent: Arc<dyn FiniteGroup>, kernel: Subgroup, cap: u64) -> Result<QuotientGroup, GroupError> {
        check_cap("quotient coset table", parent.order(), cap)?;
        let gens = parent.generators();
        for &z in &kernel.generators {
            if gens.iter().any(|&x| parent.mul(z, x) != parent.mul(x, z)) {
                return Err(GroupError::NotCentral(parent.label(z)));
            }
        }
        let n = parent.order() as usize;
        let mut coset_of = vec![u32::MAX; n];
        let mut reps = Vec::with_capacity(n / kernel.len());
        for a in 0..n as u64 {
            if coset_of[a as usize] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(a);
            for &z in &kernel.elements {
                coset_of[parent.mul(a, z) as usize] = idx;
            }
        }
        Ok(QuotientGroup { parent, kernel, coset_of, reps })
    }

    /// Quotient by the subgroup generated by `gens` (parent codes).
    pub fn by_generators(parent: Arc<dyn FiniteGroup>, gens: &[u64], cap: u64) -> Result<QuotientGroup, GroupError> {
        let kernel = closure(parent.as_ref(), gens, cap)?;
        QuotientGroup::new(parent, kernel, cap)
    }

    pub fn parent(&self) -> &Arc<dyn FiniteGroup> {
        &self.parent
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn project(&self, a: u64) -> u64 {
        self.coset_of[a as usize] as u64
    }

    pub fn representative(&self, c: u64) -> u64 {
        self.reps[c as usize]
    }
}

impl FiniteGroup for QuotientGroup {
    fn order(&self) -> u64 {
        self.reps.len() as u64
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.project(self.parent.mul(self.reps[a as usize], self.reps[b as usize]))
    }

    fn inv(&self, a: u64) -> u64 {
        self.project(self.parent.inv(self.reps[a as usize]))
    }

    fn generators(&self) -> Vec<u64> {
        self.parent.generators().into_iter().map(|x| self.project(x)).collect()
    }

    fn label(&self, a: u64) -> String {
        format!("{}Z", self.parent.label(self.reps[a as usize]))
    }
}

/// A finitely presented group enumerated by Todd–Coxeter; elements are the
/// cosets of the trivial subgroup, multiplied by tracing words.
#[derive(Debug, Clone)]
pub struct TableGroup {
    rank: usize,
    /// `table[c * 2r + col]`, column `2g` for `x_{g+1}`, `2g+1` for its inverse.
    table: Vec<u32>,
    words: Vec<Vec<usize>>,
    inverses: Vec<u32>,
}

/// Letters of a relator word: column indices.
fn word_letters(factors: &[expr::Factor], rank: usize, out: &mut Vec<usize>) -> Result<(), GroupError> {
    for f in factors {
        let mut base = Vec::new();
        match &f.atom {
            expr::Atom::Gen(i) => {
                if *i > rank {
                    return Err(GroupError::UnknownGenerator { index: *i, r: rank });
                }
                base.push(2 * (i - 1));
            }
            expr::Atom::Paren(inner) => word_letters(inner, rank, &mut base)?,
            expr::Atom::Bracket(parts) => {
                let mut acc = Vec::new();
                word_letters(std::slice::from_ref(&parts[0]), rank, &mut acc)?;
                for p in &parts[1..] {
                    let mut b = Vec::new();
                    word_letters(std::slice::from_ref(p), rank, &mut b)?;
                    let mut next = invert_word(&acc);
                    next.extend(invert_word(&b));
                    next.extend(&acc);
                    next.extend(&b);
                    acc = next;
                }
                base = acc;
            }
        }
        let n = f.exp.to_i64().ok_or_else(|| GroupError::Enumeration(usize::MAX))?;
        let piece = if n < 0 { invert_word(&base) } else { base };
        for _ in 0..n.unsigned_abs() {
            out.extend(&piece);
        }
    }
    free_reduce(out);
    Ok(())
}

fn invert_word(w: &[usize]) -> Vec<usize> {
    w.iter().rev().map(|&c| c ^ 1).collect()
}

fn free_reduce(w: &mut Vec<usize>) {
    let mut out: Vec<usize> = Vec::with_capacity(w.len());
    for &c in w.iter() {
        if out.last() == Some(&(c ^ 1)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    *w = out;
}

const NONE: u32 = u32::MAX;

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
    max_cosets: usize,
}

impl Enumerator {
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    fn set(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.cols + x] = v;
    }

    fn count(&self) -> usize {
        self.parent.len()
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), GroupError> {
        if self.count() >= self.max_cosets {
            return Err(GroupError::Enumeration(self.max_cosets));
        }
        let n = self.count() as u32;
        self.parent.push(n);
        self.table.extend(std::iter::repeat_n(NONE, self.cols));
        self.set(c, x, n);
        self.set(n, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
            self.queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                self.set(f, x ^ 1, NONE);
                let (e1, f1) = (self.rep(e), self.rep(f));
                let ex = self.get(e1, x);
                if ex != NONE {
                    self.merge(f1, ex);
                } else {
                    let fx = self.get(f1, x ^ 1);
                    if fx != NONE {
                        self.merge(e1, fx);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<(), GroupError> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, w.len() as isize - 1);
        loop {
            while i <= j && self.get(f, w[i as usize]) != NONE {
                f = self.get(f, w[i as usize]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, w[j as usize] ^ 1) != NONE {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.set(f, w[i as usize], b);
                self.set(b, w[i as usize] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i as usize])?;
        }
    }
}

impl TableGroup {
    /// Enumerate `<x_1..x_rank | relators>` (relator grammar), which must be
    /// finite with at most `max_cosets` intermediate cosets.
    pub fn from_presentation(rank: usize, relators: &[String], max_cosets: usize) -> Result<TableGroup, GroupError> {
        let mut words = Vec::new();
        for r in relators {
            let mut w = Vec::new();
            word_letters(&expr::parse(r, Syntax::RELATOR)?, rank, &mut w)?;
            // cyclically reduce
            while w.len() >= 2 && w[0] == w[w.len() - 1] ^ 1 {
                w.pop();
                w.remove(0);
            }
            words.push(w);
        }
        let cols = 2 * rank;
        let mut en = Enumerator { cols, table: vec![NONE; cols], parent: vec![0], queue: Vec::new(), max_cosets };
        let mut c = 0u32;
        while (c as usize) < en.count() {
            for w in &words {
                if !en.alive(c) {
                    break;
                }
                en.scan_and_fill(c, w)?;
            }
            for x in 0..cols {
                if en.alive(c) && en.get(c, x) == NONE {
                    en.define(c, x)?;
                }
            }
            c += 1;
        }
        // compact the live cosets
        let mut new_index = vec![NONE; en.count()];
        let mut n = 0u32;
        for c in 0..en.count() as u32 {
            if en.alive(c) {
                new_index[c as usize] = n;
                n += 1;
            }
        }
        let mut table = vec![NONE; n as usize * cols];
        for c in 0..en.count() as u32 {
            if en.alive(c) {
                for x in 0..cols {
                    let t = en.get(c, x);
                    let t = en.rep(t);
                    table[new_index[c as usize] as usize * cols + x] = new_index[t as usize];
                }
            }
        }
        // shortest words by breadth-first search
        let mut words_of: Vec<Option<Vec<usize>>> = vec![None; n as usize];
        words_of[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0u32]);
        while let Some(a) = queue.pop_front() {
            for x in 0..cols {
                let b = table[a as usize * cols + x];
                if words_of[b as usize].is_none() {
                    let mut w = words_of[a as usize].clone().expect("visited");
                    w.push(x);
                    words_of[b as usize] = Some(w);
                    queue.push_back(b);
                }
            }
        }
        let words: Vec<Vec<usize>> = words_of.into_iter().map(|w| w.expect("connected")).collect();
        let mut g = TableGroup { rank, table, words, inverses: Vec::new() };
        g.inverses = (0..n as usize).map(|a| g.trace(0, &invert_word(&g.words[a])) as u32).collect();
        Ok(g)
    }

    fn trace(&self, mut c: u64, w: &[usize]) -> u64 {
        let cols = 2 * self.rank;
        for &x in w {
            c = self.table[c as usize * cols + x] as u64;
        }
        c
    }
}

impl FiniteGroup for TableGroup {
    fn order(&self) -> u64 {
        self.words.len() as u64
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.trace(a, &self.words[b as usize])
    }

    fn inv(&self, a: u64) -> u64 {
        self.inverses[a as usize] as u64
    }

    fn generators(&self) -> Vec<u64> {
        (0..self.rank).map(|g| self.table[2 * g] as u64).collect()
    }

    fn label(&self, a: u64) -> String {
        let w = &self.words[a as usize];
        if w.is_empty() {
            return "e".into();
        }
        w.iter()
            .map(|&x| if x % 2 == 0 { format!("x{}", x / 2 + 1) } else { format!("x{}^-1", x / 2 + 1) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `|Z(H)|` for a finite generic-regime product of class `c >= 2`, without
/// enumerating `H`.
///
/// `H_c` is central, so `|Z| = |H_c| * #{cosets aH_c central}`. Writing
/// `a = b d` with `b` supported below weight `c-1` and `d` in `H_{c-1}`,
/// `[bd, x] = [b, x][d, x]` and `d -> ([d, x_i])_i` is a homomorphism `phi`
/// into `H_c^r`; so the count is the number of `b` with every `[b, x_i]` in
/// `H_c` and the tuple in `Im phi`, times `|ker phi|`.
pub fn center_order_layered(h: &Arc<NilGroup>, cap: u64) -> Result<BigUint, GroupError> {
    let spec = h.spec();
    if !spec.is_finite() {
        return Err(GroupError::Infinite(spec.to_string()));
    }
    if spec.regime() == Regime::Special23 {
        return Err(GroupError::NoClosedForm(format!("layered center of {spec}")));
    }
    let c = spec.class_k();
    if c == 1 {
        return Ok(h.order().expect("finite"));
    }
    let n = h.len();
    let top: Vec<usize> = (0..n).filter(|&i| h.weight(i) == c).collect();
    let layer: Vec<usize> = (0..n).filter(|&i| h.weight(i) == c - 1).collect();
    let low: Vec<usize> = (0..n).filter(|&i| h.weight(i) < c - 1).collect();
    let modulus = |i: usize| h.moduli()[i].to_u64().expect("finite");
    let gens: Vec<Element> = (1..=h.rank()).map(|i| nilprod::generator(h, i).expect("in range")).collect();

    // H_c^r as residue tuples
    let tuple = |e: &Element| -> Option<Vec<u64>> {
        let ex = e.exponents();
        if (0..n).any(|i| h.weight(i) < c && !ex[i].is_zero()) {
            return None;
        }
        Some(top.iter().map(|&i| ex[i].to_u64().expect("reduced")).collect())
    };
    let phi = |e: &Element| -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(top.len() * gens.len());
        for x in &gens {
            out.extend(tuple(&e.comm(x).expect("same group"))?);
        }
        Some(out)
    };
    let mods: Vec<u64> = gens.iter().flat_map(|_| top.iter().map(|&i| modulus(i))).collect();
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).zip(&mods).map(|((x, y), m)| (x + y) % m).collect() };

    let images: Vec<Vec<u64>> = layer
        .iter()
        .map(|&i| phi(&nilprod::basis_element(h, i)).expect("weight c-1 commutes into H_c"))
        .collect();
    let mut image: HashSet<Vec<u64>> = HashSet::from([vec![0; mods.len()]]);
    let mut queue: VecDeque<Vec<u64>> = image.iter().cloned().collect();
    while let Some(v) = queue.pop_front() {
        for g in &images {
            let w = add(&v, g);
            if image.insert(w.clone()) {
                check_cap("layered center image", image.len() as u64, cap)?;
                queue.push_back(w);
            }
        }
    }
    let layer_order: u64 = layer.iter().map(|&i| modulus(i)).product();
    let kernel = layer_order / image.len() as u64;

    let low_count: u64 = low.iter().map(|&i| modulus(i)).product();
    check_cap("layered center candidates", low_count, cap)?;
    let valid = (0..low_count)
        .into_par_iter()
        .filter(|&code| {
            let mut exps = vec![BigInt::zero(); n];
            let mut rest = code;
            for &i in &low {
                let m = modulus(i);
                exps[i] = BigInt::from(rest % m);
                rest /= m;
            }
            let b = nilprod::reduce(h, exps).expect("length");
            match phi(&b) {
                Some(v) => {
                    let neg: Vec<u64> = v.iter().zip(&mods).map(|(x, m)| (m - x) % m).collect();
                    image.contains(&neg)
                }
                None => false,
            }
        })
        .count() as u64;
    let top_order: BigUint = top.iter().map(|&i| BigUint::from(modulus(i))).product();
    Ok(top_order * BigUint::from(valid) * BigUint::from(kernel))
}

/// Brute-force center as elements of the nilpotent product.
pub fn center_elements(codes: &NilCodes, cap: u64) -> Result<Vec<Element>, GroupError> {
    Ok(center_bruteforce(codes, cap)?.elements.iter().map(|&c| codes.decode(c)).collect())
}

/// Subgroup of a nilpotent product generated by elements.
pub fn closure_of_elements(codes: &NilCodes, gens: &[Element], cap: u64) -> Result<Subgroup, GroupError> {
    let gens: Vec<u64> = gens.iter().map(|e| codes.encode(e)).collect();
    closure(codes, &gens, cap)
}

/// Lookup from code to position in a sorted element list.
pub fn index_map(s: &Subgroup) -> HashMap<u64, usize> {
    s.elements.iter().enumerate().map(|(i, &c)| (c, i)).collect()
}
