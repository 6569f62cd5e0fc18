//! Exact arithmetic in the free nilpotent group `F/F_{k+1}` on `r` generators.
//!
//! Elements are normal forms `prod c_i^{e_i}` over the basic commutators of
//! weight `<= k` (Hall basis theorem). Products are formed by collection from
//! the left: multiplying `g = P c_i^{g_i} Q` by `c_i^e` rewrites it as
//! `P c_i^{g_i+e} (Q^{c_i^e})`, and the conjugates `c_i^{-e} c_j^s c_i^e` are
//! taken from a shared cache. Cache misses are filled exactly in the Magnus
//! model on just the generators occurring in `c_i` and `c_j`; basic
//! commutators on a subset of the generators are the basic commutators of a
//! smaller free group after order-preserving renaming.

pub mod magnus;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::basiccomm::{enumerate_basic, BasicError, BasicSequence, CommutatorTree, Tree};
use crate::expr::{self, Atom, Evaluate, Factor, Syntax, SyntaxError};
use magnus::{MagnusModel, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollectError {
    #[error(transparent)]
    Basic(#[from] BasicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("letter refers to x{index} but the group has only {r} generators")]
    UnknownGenerator { index: usize, r: usize },
    #[error("elements belong to different groups: (r={0}, k={1}) vs (r={2}, k={3})")]
    BasisMismatch(usize, usize, usize, usize),
    #[error("exponent vector has length {got}, basis has {expected}")]
    Length { got: usize, expected: usize },
    #[error("word letters must be generators or brackets of them: {0}")]
    NotALetter(String),
}

/// Smallest weight with a nonzero exponent; `Infinite` for the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Weight {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => f.write_str("infinite"),
        }
    }
}

type ConjKey = (u32, u32, BigInt, BigInt);
type Sparse = Arc<[(usize, BigInt)]>;

pub struct FreeNilpotentGroup {
    basis: Arc<BasicSequence>,
    supports: Vec<Vec<usize>>,
    conj: RwLock<HashMap<ConjKey, Sparse>>,
    /// For each support set, the sub-basis to full-basis index map.
    relabels: RwLock<HashMap<Vec<usize>, Arc<Vec<usize>>>>,
}

impl fmt::Debug for FreeNilpotentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeNilpotentGroup(r={}, k={})", self.generators(), self.class())
    }
}

/// The shared free nilpotent group of class `k` on `r` generators.
pub fn free_group(r: usize, k: usize) -> Result<Arc<FreeNilpotentGroup>, CollectError> {
    static GROUPS: OnceLock<RwLock<HashMap<(usize, usize), Arc<FreeNilpotentGroup>>>> = OnceLock::new();
    let cache = GROUPS.get_or_init(Default::default);
    if let Some(g) = cache.read().expect("group registry poisoned").get(&(r, k)) {
        return Ok(g.clone());
    }
    let basis = Arc::new(enumerate_basic(r, k)?);
    let supports = basis.items().iter().map(|t| t.support()).collect();
    let g = Arc::new(FreeNilpotentGroup {
        basis,
        supports,
        conj: RwLock::new(HashMap::new()),
        relabels: RwLock::new(HashMap::new()),
    });
    let mut w = cache.write().expect("group registry poisoned");
    Ok(w.entry((r, k)).or_insert(g).clone())
}

impl FreeNilpotentGroup {
    pub fn basis(&self) -> &Arc<BasicSequence> {
        &self.basis
    }

    pub fn generators(&self) -> usize {
        self.basis.generators()
    }

    pub fn class(&self) -> usize {
        self.basis.max_weight()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    fn sub_index_map(&self, support: &[usize], model: &MagnusModel) -> Arc<Vec<usize>> {
        if let Some(m) = self.relabels.read().expect("relabel cache poisoned").get(support) {
            return m.clone();
        }
        let map: Vec<usize> = model
            .basis()
            .items()
            .iter()
            .map(|t| {
                let full = t.relabel(&|i| support[i - 1]);
                self.basis.index_of(&full).expect("sub-basis item lies in the full basis")
            })
            .collect();
        let map = Arc::new(map);
        self.relabels
            .write()
            .expect("relabel cache poisoned")
            .entry(support.to_vec())
            .or_insert(map)
            .clone()
    }

    /// Normal form of `c_i^{-e} c_j^s c_i^e` as sparse (index, exponent) pairs.
    fn conj_power(&self, i: usize, j: usize, s: &BigInt, e: &BigInt) -> Result<Sparse, CollectError> {
        let key = (i as u32, j as u32, s.clone(), e.clone());
        if let Some(v) = self.conj.read().expect("conjugation cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let mut support = self.supports[i].clone();
        support.extend_from_slice(&self.supports[j]);
        support.sort_unstable();
        support.dedup();
        let model = magnus::model(support.len(), self.class())?;
        let map = self.sub_index_map(&support, &model);
        let local = |idx: usize| {
            let pos = |g: usize| support.binary_search(&g).expect("in support") + 1;
            let t = self.basis.item(idx).relabel(&pos);
            model.basis().index_of(&t).expect("item lies in the sub-basis")
        };
        let (li, lj) = (local(i), local(j));
        let a = model.mul(&model.power(li, &-e), &model.power(lj, s));
        let a = model.mul(&a, &model.power(li, e));
        let exps = model.to_exponents(a);
        let mut out: Vec<(usize, BigInt)> = exps
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(l, v)| (map[l], v))
            .collect();
        out.sort_by_key(|(idx, _)| *idx);
        let out: Sparse = out.into();
        self.conj
            .write()
            .expect("conjugation cache poisoned")
            .insert(key, out.clone());
        Ok(out)
    }

    /// `g <- g * c_i^e`, collecting from the left.
    fn mul_gen_pow(&self, g: &mut [BigInt], i: usize, e: &BigInt) {
        if e.is_zero() {
            return;
        }
        let limit = self.class() - self.basis.weight(i);
        let n = g.len();
        let interacts = (i + 1..n).any(|j| !g[j].is_zero() && self.basis.weight(j) <= limit);
        if !interacts {
            g[i] += e;
            return;
        }
        let mut suffix: Vec<(usize, BigInt)> = Vec::new();
        for (j, slot) in g.iter_mut().enumerate().skip(i + 1) {
            if !slot.is_zero() {
                suffix.push((j, std::mem::take(slot)));
            }
        }
        g[i] += e;
        for (j, s) in suffix {
            if self.basis.weight(j) > limit {
                self.mul_gen_pow(g, j, &s);
            } else {
                let conj = self
                    .conj_power(i, j, &s, e)
                    .expect("support models stay within the size limit of the full group");
                for (m, f) in conj.iter() {
                    self.mul_gen_pow(g, *m, f);
                }
            }
        }
    }

    fn check_model(&self) -> Result<(), CollectError> {
        // The largest support model ever needed has min(r, k) letters.
        magnus::check_dim(self.generators().min(self.class()), self.class())?;
        Ok(())
    }

    pub fn identity(self: &Arc<Self>) -> FreeNilElement {
        FreeNilElement { group: self.clone(), exps: vec![BigInt::zero(); self.len()] }
    }

    /// `x_i`, 1-based.
    pub fn generator(self: &Arc<Self>, i: usize) -> Result<FreeNilElement, CollectError> {
        if i == 0 || i > self.generators() {
            return Err(CollectError::UnknownGenerator { index: i, r: self.generators() });
        }
        Ok(self.basis_element(i - 1))
    }

    /// The basic commutator `c_idx` (0-based position in the basis).
    pub fn basis_element(self: &Arc<Self>, idx: usize) -> FreeNilElement {
        let mut e = self.identity();
        e.exps[idx] = BigInt::one();
        e
    }

    pub fn element(self: &Arc<Self>, exps: Vec<BigInt>) -> Result<FreeNilElement, CollectError> {
        if exps.len() != self.len() {
            return Err(CollectError::Length { got: exps.len(), expected: self.len() });
        }
        self.check_model()?;
        Ok(FreeNilElement { group: self.clone(), exps })
    }

    /// Evaluate a commutator tree, discarding anything of weight above `k`.
    pub fn eval_tree(self: &Arc<Self>, t: &CommutatorTree) -> Result<FreeNilElement, CollectError> {
        let top = t.max_generator();
        if top > self.generators() {
            return Err(CollectError::UnknownGenerator { index: top, r: self.generators() });
        }
        if t.weight() > self.class() {
            return Ok(self.identity());
        }
        if let Some(idx) = self.basis.index_of(t) {
            return Ok(self.basis_element(idx));
        }
        match t {
            CommutatorTree::Leaf(i) => self.generator(*i),
            CommutatorTree::Node(l, r, _) => Ok(self.eval_tree(l)?.commutator(&self.eval_tree(r)?)?),
        }
    }
}

/// An element of a free nilpotent group in normal form.
#[derive(Clone)]
pub struct FreeNilElement {
    group: Arc<FreeNilpotentGroup>,
    exps: Vec<BigInt>,
}

impl PartialEq for FreeNilElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.exps == other.exps
    }
}

impl Eq for FreeNilElement {}

impl fmt::Debug for FreeNilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FreeNilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format_normal_form(&self.group.basis.labels(), &self.exps);
        f.write_str(if s.is_empty() { "e" } else { &s })
    }
}

/// `label^e` terms in basis order, zero exponents omitted, `^1` elided.
pub fn format_normal_form(labels: &[String], exps: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (l, e) in labels.iter().zip(exps) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            parts.push(l.clone());
        } else {
            parts.push(format!("{l}^{e}"));
        }
    }
    parts.join(" ")
}

impl FreeNilElement {
    pub fn group(&self) -> &Arc<FreeNilpotentGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn into_exponents(self) -> Vec<BigInt> {
        self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|e| e.is_zero())
    }

    fn same_group(&self, other: &Self) -> Result<(), CollectError> {
        if Arc::ptr_eq(&self.group, &other.group) {
            Ok(())
        } else {
            Err(CollectError::BasisMismatch(
                self.group.generators(),
                self.group.class(),
                other.group.generators(),
                other.group.class(),
            ))
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, CollectError> {
        self.same_group(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut g = self.exps.clone();
        for (m, e) in other.exps.iter().enumerate() {
            self.group.mul_gen_pow(&mut g, m, e);
        }
        FreeNilElement { group: self.group.clone(), exps: g }
    }

    pub fn inverse(&self) -> Self {
        let mut g = vec![BigInt::zero(); self.exps.len()];
        for (m, e) in self.exps.iter().enumerate().rev() {
            self.group.mul_gen_pow(&mut g, m, &-e);
        }
        FreeNilElement { group: self.group.clone(), exps: g }
    }

    /// `a^n` by square-and-multiply.
    pub fn power(&self, n: &BigInt) -> Self {
        let (mut base, mut n) = if n.is_negative() { (self.inverse(), -n) } else { (self.clone(), n.clone()) };
        let mut acc = self.group.identity();
        let two = BigInt::from(2);
        while !n.is_zero() {
            if n.is_odd() {
                acc = acc.mul_unchecked(&base);
            }
            n /= &two;
            if !n.is_zero() {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, other: &Self) -> Result<Self, CollectError> {
        self.same_group(other)?;
        let lhs = self.inverse().mul_unchecked(&other.inverse());
        Ok(lhs.mul_unchecked(self).mul_unchecked(other))
    }

    pub fn weight_of(&self) -> Weight {
        self.exps
            .iter()
            .position(|e| !e.is_zero())
            .map_or(Weight::Infinite, |i| Weight::Finite(self.group.basis.weight(i)))
    }
}

/// `[x^n, y]`; kept separate so the power-commutator expansions can be
/// compared against it.
pub fn expand_power_commutator(x: &FreeNilElement, y: &FreeNilElement, n: &BigInt) -> Result<FreeNilElement, CollectError> {
    x.power(n).commutator(y)
}

/// A product of commutator-tree powers, the input form before collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<(Tree, BigInt)>,
}

impl Word {
    pub fn new(letters: impl IntoIterator<Item = (Tree, BigInt)>) -> Word {
        Word { letters: letters.into_iter().filter(|(_, e)| !e.is_zero()).collect() }
    }

    pub fn letters(&self) -> &[(Tree, BigInt)] {
        &self.letters
    }

    /// Parse the element grammar into letters (no evaluation yet).
    pub fn parse(src: &str) -> Result<Word, CollectError> {
        let factors = expr::parse(src, Syntax::ELEMENT)?;
        let letters = factors
            .iter()
            .map(|f| Ok((factor_tree(f)?, f.exp.clone())))
            .collect::<Result<Vec<_>, CollectError>>()?;
        Ok(Word::new(letters))
    }
}

fn factor_tree(f: &Factor) -> Result<Tree, CollectError> {
    match &f.atom {
        Atom::Gen(i) => Ok(CommutatorTree::leaf(*i)),
        Atom::Bracket(parts) => {
            let trees = parts
                .iter()
                .map(|p| {
                    if !p.exp.is_one() {
                        return Err(CollectError::NotALetter(format!("{p:?}")));
                    }
                    factor_tree(p)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CommutatorTree::left_normed(&trees))
        }
        Atom::Paren(_) => Err(CollectError::NotALetter("parenthesised group".into())),
    }
}

/// Normal form of a word's product in `F/F_{k+1}`.
pub fn collect(w: &Word, r: usize, k: usize) -> Result<FreeNilElement, CollectError> {
    let g = free_group(r, k)?;
    g.check_model()?;
    let mut acc = g.identity();
    for (t, e) in &w.letters {
        let v = g.eval_tree(t)?.power(e);
        acc = acc.mul_unchecked(&v);
    }
    Ok(acc)
}

impl Evaluate for Arc<FreeNilpotentGroup> {
    type Elem = FreeNilElement;
    type Error = CollectError;

    fn identity(&self) -> FreeNilElement {
        FreeNilpotentGroup::identity(self)
    }

    fn generator(&self, i: usize) -> Result<FreeNilElement, CollectError> {
        FreeNilpotentGroup::generator(self, i)
    }

    fn mul(&self, a: &FreeNilElement, b: &FreeNilElement) -> FreeNilElement {
        a.mul_unchecked(b)
    }

    fn pow(&self, a: &FreeNilElement, n: &BigInt) -> FreeNilElement {
        a.power(n)
    }

    fn comm(&self, a: &FreeNilElement, b: &FreeNilElement) -> FreeNilElement {
        a.commutator(b).expect("same group")
    }
}

/// Parse and evaluate an element expression in the free group.
pub fn parse_element(g: &Arc<FreeNilpotentGroup>, src: &str) -> Result<FreeNilElement, CollectError> {
    g.check_model()?;
    let factors = expr::parse(src, Syntax::ELEMENT)?;
    expr::evaluate(g, &factors)
}

/// Independent product through the full Magnus model, for cross-checks.
pub fn magnus_multiply(a: &FreeNilElement, b: &FreeNilElement) -> Result<FreeNilElement, CollectError> {
    a.same_group(b)?;
    let g = &a.group;
    let m = magnus::model(g.generators(), g.class())?;
    let s = m.mul(&m.from_exponents(&a.exps), &m.from_exponents(&b.exps));
    Ok(FreeNilElement { group: g.clone(), exps: m.to_exponents(s) })
}
