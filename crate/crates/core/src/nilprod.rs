//! k-nilpotent products of cyclic groups: Struik normal forms with gcd moduli,
//! multiplication, and the special basis for class 3 over 2-groups.
//!
//! In the generic regime the product's exponents are the free nilpotent
//! group's structure polynomials evaluated modulo the `N_i` (Struik's
//! theorem), so products are taken by lifting residues to the free group,
//! collecting, and reducing. For classes 2 and 3 the closed multiplication
//! formulas are kept as an independent second path and cross-checked in debug
//! builds.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basiccomm::{CommutatorTree, MAX_GENERATORS, MAX_WEIGHT};
use crate::collector::{format_normal_form, free_group, CollectError, FreeNilpotentGroup};
use crate::expr::{self, Evaluate, Syntax, SyntaxError};
use crate::valuation::binom_signed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilprodError {
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("cyclic factor orders must be 0 (infinite) or at least 2, got {0}")]
    Order(u64),
    #[error("need between 1 and {MAX_GENERATORS} cyclic factors, got {0}")]
    Generators(usize),
    #[error("class must be between 1 and {MAX_WEIGHT}, got {0}")]
    Class(usize),
    #[error("elements belong to different groups")]
    SpecMismatch,
    #[error("operation needs a finite group, but {0} has infinite order")]
    Infinite(String),
    #[error("exponent vector has length {got}, basis has {expected}")]
    Length { got: usize, expected: usize },
    #[error("unknown generator x{index}: the group has {r} generators")]
    UnknownGenerator { index: usize, r: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Collect(#[from] CollectError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    #[serde(rename = "special_2_3")]
    Special23,
    Abelian,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Generic => "generic",
            Regime::Special23 => "special_2_3",
            Regime::Abelian => "abelian",
        })
    }
}

/// Distinct prime divisors, by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
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

/// `Some(e)` when `n = 2^e`.
fn log2_exact(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// The k-nilpotent product of cyclic groups of the given orders.
///
/// Generators are renumbered so that finite orders come first in
/// nondecreasing order and infinite factors last; `permutation[i]` is the
/// input position of the `i`-th sorted generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    class_k: usize,
    orders: Vec<u64>,
    regime: Regime,
    permutation: Vec<usize>,
}

impl GroupSpec {
    pub fn new(class_k: usize, orders: &[u64], regime: Regime) -> Result<GroupSpec, NilprodError> {
        if class_k == 0 || class_k > MAX_WEIGHT {
            return Err(NilprodError::Class(class_k));
        }
        if orders.is_empty() || orders.len() > MAX_GENERATORS {
            return Err(NilprodError::Generators(orders.len()));
        }
        if let Some(&m) = orders.iter().find(|&&m| m == 1) {
            return Err(NilprodError::Order(m));
        }
        let mut permutation: Vec<usize> = (0..orders.len()).collect();
        permutation.sort_by_key(|&i| (orders[i] == 0, orders[i], i));
        let sorted: Vec<u64> = permutation.iter().map(|&i| orders[i]).collect();

        match regime {
            Regime::Abelian if class_k != 1 => {
                return Err(NilprodError::Regime(format!("abelian regime requires class 1, got class {class_k}")));
            }
            Regime::Special23 => {
                if class_k != 3 {
                    return Err(NilprodError::Regime(format!("special_2_3 requires class 3, got class {class_k}")));
                }
                if let Some(&m) = sorted.iter().find(|&&m| log2_exact(m).is_none_or(|e| e == 0)) {
                    return Err(NilprodError::Regime(format!("special_2_3 requires orders 2^a with a >= 1, got {m}")));
                }
            }
            Regime::Generic if class_k >= 3 => {
                for &m in sorted.iter().filter(|&&m| m > 0) {
                    if let Some(&p) = prime_divisors(m).iter().find(|&&p| (p as usize) < class_k) {
                        return Err(NilprodError::Regime(format!(
                            "prime {p} < class {class_k} (order {m}); normal forms need every prime >= the class"
                        )));
                    }
                }
            }
            _ => {}
        }
        Ok(GroupSpec { class_k, orders: sorted, regime, permutation })
    }

    pub fn generic(class_k: usize, orders: &[u64]) -> Result<GroupSpec, NilprodError> {
        GroupSpec::new(class_k, orders, Regime::Generic)
    }

    pub fn special(orders: &[u64]) -> Result<GroupSpec, NilprodError> {
        GroupSpec::new(3, orders, Regime::Special23)
    }

    pub fn abelian(orders: &[u64]) -> Result<GroupSpec, NilprodError> {
        GroupSpec::new(1, orders, Regime::Abelian)
    }

    pub fn class_k(&self) -> usize {
        self.class_k
    }

    /// Sorted factor orders (0 = infinite).
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|&m| m > 0)
    }

    /// The single prime dividing every order, if there is one.
    pub fn prime(&self) -> Option<u64> {
        let mut primes = Vec::new();
        for &m in &self.orders {
            if m == 0 {
                return None;
            }
            primes.extend(prime_divisors(m));
        }
        primes.sort_unstable();
        primes.dedup();
        (primes.len() == 1).then(|| primes[0])
    }

    /// Exponents `a_i` with `m_i = p^{a_i}` for single-prime specs.
    pub fn alphas(&self) -> Option<Vec<u32>> {
        let p = self.prime()?;
        self.orders
            .iter()
            .map(|&m| {
                let mut a = 0;
                let mut v = m;
                while v % p == 0 {
                    v /= p;
                    a += 1;
                }
                (v == 1).then_some(a)
            })
            .collect()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let orders: Vec<String> = self
            .orders
            .iter()
            .map(|m| if *m == 0 { "inf".to_string() } else { m.to_string() })
            .collect();
        write!(f, "{}-nilpotent product of C({}) [{}]", self.class_k, orders.join(","), self.regime)
    }
}

fn gcd0(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Positions of the basis items the closed formulas refer to.
#[derive(Debug, Default)]
struct FormulaIndex {
    /// `[x_j,x_i]`, keyed by `(j, i)` 0-based with `i < j`.
    w2: HashMap<(usize, usize), usize>,
    /// `[x_j,x_i,x_k]`, keyed by `(j, i, k)` 0-based.
    w3: HashMap<(usize, usize, usize), usize>,
}

/// Basis and arithmetic of a nilpotent product.
pub struct NilGroup {
    spec: GroupSpec,
    labels: Vec<String>,
    moduli: Vec<BigInt>,
    weights: Vec<usize>,
    free: Arc<FreeNilpotentGroup>,
    index: FormulaIndex,
}

impl fmt::Debug for NilGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilGroup({})", self.spec)
    }
}

/// Build the basis (labels and moduli) and arithmetic for `spec`.
pub fn make_group(spec: &GroupSpec) -> Result<Arc<NilGroup>, NilprodError> {
    let r = spec.rank();
    let free = free_group(r, spec.class_k)?;
    let basis = free.basis().clone();
    let mut index = FormulaIndex::default();
    for idx in basis.weight_range(2).chain(basis.weight_range(3)) {
        let parts: Vec<usize> = basis
            .item(idx)
            .spine()
            .iter()
            .map(|t| match **t {
                CommutatorTree::Leaf(g) => g - 1,
                _ => usize::MAX,
            })
            .collect();
        match parts[..] {
            [j, i] => {
                index.w2.insert((j, i), idx);
            }
            [j, i, k] => {
                index.w3.insert((j, i, k), idx);
            }
            _ => {}
        }
    }

    let orders = &spec.orders;
    let mut labels = basis.labels();
    let weights: Vec<usize> = (0..basis.len()).map(|i| basis.weight(i)).collect();
    let mut moduli: Vec<BigInt> = basis
        .items()
        .iter()
        .map(|t| BigInt::from(t.support().iter().fold(0u64, |acc, &g| gcd0(acc, orders[g - 1]))))
        .collect();

    if spec.regime == Regime::Special23 {
        let alpha: Vec<u32> = orders.iter().map(|&m| log2_exact(m).expect("validated")).collect();
        let pow2 = |e: u32| BigInt::one() << e;
        for (&(_, i), &idx) in &index.w2 {
            moduli[idx] = pow2(alpha[i] + 1);
        }
        for (&(j, i, k), &idx) in &index.w3 {
            let lo = i.min(j).min(k);
            if k == i {
                labels[idx] = format!("[x{},x{}^2]", j + 1, i + 1);
                moduli[idx] = pow2(alpha[i] - 1);
            } else if k == j {
                labels[idx] = format!("[x{}^2,x{}]", j + 1, i + 1);
                moduli[idx] = if alpha[i] == alpha[j] { pow2(alpha[i] - 1) } else { pow2(alpha[i]) };
            } else {
                moduli[idx] = pow2(alpha[lo]);
            }
        }
    }
    Ok(Arc::new(NilGroup { spec: spec.clone(), labels, moduli, weights, free, index }))
}

impl NilGroup {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn weight(&self, idx: usize) -> usize {
        self.weights[idx]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.spec.rank()
    }

    pub fn free_group(&self) -> &Arc<FreeNilpotentGroup> {
        &self.free
    }

    /// Product of the moduli; `None` when the group is infinite.
    pub fn order(&self) -> Option<BigUint> {
        let mut acc = BigUint::one();
        for m in &self.moduli {
            if m.is_zero() {
                return None;
            }
            acc *= m.magnitude();
        }
        Some(acc)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|o| o.to_u64())
    }

    fn require_finite(&self) -> Result<BigUint, NilprodError> {
        self.order().ok_or_else(|| NilprodError::Infinite(self.spec.to_string()))
    }

    /// Index of the basis item with the given label.
    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn reduce_vec(&self, exps: &mut [BigInt]) {
        for (e, m) in exps.iter_mut().zip(&self.moduli) {
            if !m.is_zero() {
                *e = e.mod_floor(m);
            }
        }
    }
}

/// Canonical residues: entry `i` moved into `[0, N_i)` when `N_i > 0`.
pub fn reduce(g: &Arc<NilGroup>, exps: Vec<BigInt>) -> Result<Element, NilprodError> {
    if exps.len() != g.len() {
        return Err(NilprodError::Length { got: exps.len(), expected: g.len() });
    }
    let mut exps = exps;
    g.reduce_vec(&mut exps);
    Ok(Element { group: g.clone(), exps })
}

#[derive(Clone)]
pub struct Element {
    group: Arc<NilGroup>,
    exps: Vec<BigInt>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.exps == other.exps
    }
}

impl Eq for Element {}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format(self);
        f.write_str(if s.is_empty() { "e" } else { &s })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

fn c2(n: &BigInt) -> BigInt {
    binom_signed(n, 2)
}

impl Element {
    pub fn group(&self) -> &Arc<NilGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|e| e.is_zero())
    }

    fn check(&self, other: &Element) -> Result<(), NilprodError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group.spec == other.group.spec {
            Ok(())
        } else {
            Err(NilprodError::SpecMismatch)
        }
    }

    /// Free-group exponents of this element's representative.
    fn lift(&self) -> Vec<BigInt> {
        let mut v = self.exps.clone();
        if self.group.spec.regime == Regime::Special23 {
            for (&(j, i), &idx) in &self.group.index.w2 {
                let jii = self.group.index.w3[&(j, i, i)];
                let jij = self.group.index.w3[&(j, i, j)];
                v[idx] = &v[idx] + 2 * (&v[jii] + &v[jij]);
            }
        }
        v
    }

    /// Inverse of `lift`, followed by reduction.
    fn from_free(g: &Arc<NilGroup>, mut v: Vec<BigInt>) -> Element {
        if g.spec.regime == Regime::Special23 {
            for (&(j, i), &idx) in &g.index.w2 {
                let jii = g.index.w3[&(j, i, i)];
                let jij = g.index.w3[&(j, i, j)];
                v[idx] = &v[idx] - 2 * (&v[jii] + &v[jij]);
            }
        }
        g.reduce_vec(&mut v);
        Element { group: g.clone(), exps: v }
    }

    fn mul_lifted(&self, other: &Element) -> Element {
        let free = &self.group.free;
        let a = free.element(self.lift()).expect("length matches");
        let b = free.element(other.lift()).expect("length matches");
        let c = a.multiply(&b).expect("same free group");
        Element::from_free(&self.group, c.into_exponents())
    }

    pub fn mul(&self, other: &Element) -> Result<Element, NilprodError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Element) -> Element {
        match self.group.spec.regime {
            Regime::Special23 => {
                let out = self.mul_special_formulas(other);
                debug_assert_eq!(out, self.mul_lifted(other), "special formulas disagree with collection");
                out
            }
            _ => {
                let out = self.mul_lifted(other);
                #[cfg(debug_assertions)]
                if let Some(closed) = self.mul_closed(other) {
                    assert_eq!(out, closed, "closed formulas disagree with collection");
                }
                out
            }
        }
    }

    /// The class-2 and class-3 closed multiplication formulas (generic regime).
    pub fn mul_closed(&self, other: &Element) -> Option<Element> {
        let g = &self.group;
        let k = g.spec.class_k;
        if !(1..=3).contains(&k) || g.spec.regime == Regime::Special23 {
            return None;
        }
        let (a, b) = (&self.exps, &other.exps);
        let r = g.rank();
        let mut c: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let w2 = |j: usize, i: usize| g.index.w2[&(j, i)];
        let w3 = |j: usize, i: usize, k: usize| g.index.w3[&(j, i, k)];
        if k >= 2 {
            for i in 0..r {
                for j in i + 1..r {
                    c[w2(j, i)] += &a[j] * &b[i];
                }
            }
        }
        if k >= 3 {
            for i in 0..r {
                for j in i + 1..r {
                    let aji = &a[w2(j, i)];
                    c[w3(j, i, i)] += aji * &b[i] + &a[j] * c2(&b[i]);
                    c[w3(j, i, j)] += aji * &b[j] + &b[i] * c2(&a[j]) + &a[j] * &b[i] * &b[j];
                    for kk in j + 1..r {
                        c[w3(j, i, kk)] += aji * &b[kk] + &a[j] * &b[i] * &b[kk] + &a[j] * &a[kk] * &b[i]
                            - &a[w2(kk, j)] * &b[i];
                        c[w3(kk, i, j)] += &a[w2(kk, i)] * &b[j] + &a[kk] * &b[i] * &b[j] + &a[w2(kk, j)] * &b[i];
                    }
                }
            }
        }
        g.reduce_vec(&mut c);
        Some(Element { group: g.clone(), exps: c })
    }

    fn mul_special_formulas(&self, other: &Element) -> Element {
        Element { group: self.group.clone(), exps: special_product(&self.group, &self.exps, &other.exps) }
    }

    /// Product through the special formula block; errors outside that regime.
    pub fn mul_special_2_3(&self, other: &Element) -> Result<Element, NilprodError> {
        self.check(other)?;
        if self.group.spec.regime != Regime::Special23 {
            return Err(NilprodError::Regime(format!("{} is not in the special_2_3 regime", self.group.spec)));
        }
        Ok(self.mul_special_formulas(other))
    }

    /// Product via lifting to the free group, collecting, and reducing.
    pub fn mul_by_collection(&self, other: &Element) -> Result<Element, NilprodError> {
        self.check(other)?;
        Ok(self.mul_lifted(other))
    }

    pub fn inv(&self) -> Element {
        let free = &self.group.free;
        let a = free.element(self.lift()).expect("length matches");
        Element::from_free(&self.group, a.inverse().into_exponents())
    }

    pub fn pow(&self, n: &BigInt) -> Element {
        let (mut base, mut n) = if n.is_negative() { (self.inv(), -n) } else { (self.clone(), n.clone()) };
        let mut acc = identity(&self.group);
        while !n.is_zero() {
            if n.is_odd() {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if !n.is_zero() {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn pow_i(&self, n: i64) -> Element {
        self.pow(&BigInt::from(n))
    }

    /// `[a,b] = a^-1 b^-1 a b`.
    pub fn comm(&self, other: &Element) -> Result<Element, NilprodError> {
        self.check(other)?;
        Ok(self.inv().mul_unchecked(&other.inv()).mul_unchecked(self).mul_unchecked(other))
    }

    /// Least `n >= 1` with `a^n = e`.
    pub fn element_order(&self) -> Result<BigUint, NilprodError> {
        let order = self.group.require_finite()?;
        let mut primes: Vec<u64> = self.group.spec.orders.iter().flat_map(|&m| prime_divisors(m)).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut n = order;
        for p in primes {
            let p = BigUint::from(p);
            while (&n % &p).is_zero() {
                let cand = &n / &p;
                if self.pow(&BigInt::from_biguint(Sign::Plus, cand.clone())).is_identity() {
                    n = cand;
                } else {
                    break;
                }
            }
        }
        Ok(n)
    }
}

/// The multiplication formulas of the class-3 2-group basis on arbitrary
/// (not necessarily reduced) exponent vectors; the result is reduced.
pub fn special_product(g: &Arc<NilGroup>, c: &[BigInt], d: &[BigInt]) -> Vec<BigInt> {
    let r = g.rank();
    let w2 = |j: usize, i: usize| g.index.w2[&(j, i)];
    let w3 = |j: usize, i: usize, k: usize| g.index.w3[&(j, i, k)];
    // alpha(c_ji) = c_ji + 2 c_jii + 2 c_jij
    let alpha = |j: usize, i: usize| &c[w2(j, i)] + 2 * (&c[w3(j, i, i)] + &c[w3(j, i, j)]);
    let mut f: Vec<BigInt> = c.iter().zip(d).map(|(x, y)| x + y).collect();
    for i in 0..r {
        for j in i + 1..r {
            let al = alpha(j, i);
            let (cj, di, dj) = (&c[j], &d[i], &d[j]);
            f[w2(j, i)] += cj * di - 2 * &al * di - 2 * &al * dj - 2 * cj * c2(di) - 2 * di * c2(cj) - 2 * cj * di * dj;
            f[w3(j, i, i)] += &al * di + cj * c2(di);
            f[w3(j, i, j)] += &al * dj + cj * di * dj + di * c2(cj);
            for k in j + 1..r {
                let dk = &d[k];
                let ck = &c[k];
                // The alpha(c_jk) of the j<k formula is read as alpha(c_kj).
                f[w3(j, i, k)] += &al * dk + cj * di * dk + cj * ck * di - alpha(k, j) * di;
                f[w3(k, i, j)] += alpha(k, i) * dj + ck * di * dj + alpha(k, j) * di;
            }
        }
    }
    g.reduce_vec(&mut f);
    f
}

pub fn identity(g: &Arc<NilGroup>) -> Element {
    Element { group: g.clone(), exps: vec![BigInt::zero(); g.len()] }
}

/// `x_i`, 1-based in the sorted numbering.
pub fn generator(g: &Arc<NilGroup>, i: usize) -> Result<Element, NilprodError> {
    if i == 0 || i > g.rank() {
        return Err(NilprodError::UnknownGenerator { index: i, r: g.rank() });
    }
    Ok(basis_element(g, i - 1))
}

pub fn basis_element(g: &Arc<NilGroup>, idx: usize) -> Element {
    let mut e = identity(g);
    e.exps[idx] = BigInt::one();
    e.group.reduce_vec(&mut e.exps);
    e
}

impl Evaluate for Arc<NilGroup> {
    type Elem = Element;
    type Error = NilprodError;

    fn identity(&self) -> Element {
        identity(self)
    }

    fn generator(&self, i: usize) -> Result<Element, NilprodError> {
        generator(self, i)
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        a.mul_unchecked(b)
    }

    fn pow(&self, a: &Element, n: &BigInt) -> Element {
        a.pow(n)
    }

    fn comm(&self, a: &Element, b: &Element) -> Element {
        a.comm(b).expect("same group")
    }
}

/// Parse the element grammar; squared generators inside brackets are
/// accepted only in the special regime.
pub fn parse(g: &Arc<NilGroup>, src: &str) -> Result<Element, NilprodError> {
    let syntax = if g.spec.regime == Regime::Special23 { Syntax::SPECIAL } else { Syntax::ELEMENT };
    let factors = expr::parse(src, syntax)?;
    expr::evaluate(g, &factors)
}

/// Basis items in ascending order with nonzero exponents; `""` is the identity.
pub fn format(a: &Element) -> String {
    format_normal_form(&a.group.labels, &a.exps)
}

/// Mixed-radix code of a reduced element of a finite group.
pub fn encode(a: &Element) -> u64 {
    let mut code = 0u64;
    for (e, m) in a.exps.iter().zip(&a.group.moduli).rev() {
        let m = m.to_u64().expect("finite modulus fits");
        code = code * m + e.to_u64().expect("reduced");
    }
    code
}

pub fn decode(g: &Arc<NilGroup>, mut code: u64) -> Element {
    let exps = g
        .moduli
        .iter()
        .map(|m| {
            let m = m.to_u64().expect("finite modulus fits");
            let e = code % m;
            code /= m;
            BigInt::from(e)
        })
        .collect();
    Element { group: g.clone(), exps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(k: usize, orders: &[u64]) -> Arc<NilGroup> {
        make_group(&GroupSpec::generic(k, orders).unwrap()).unwrap()
    }

    fn special(orders: &[u64]) -> Arc<NilGroup> {
        make_group(&GroupSpec::special(orders).unwrap()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn el(g: &Arc<NilGroup>, s: &str) -> Element {
        parse(g, s).unwrap()
    }

    #[test]
    fn moduli_follow_gcd_rule() {
        let g = grp(2, &[3, 9]);
        assert_eq!(g.moduli(), &ints(&[3, 9, 3])[..]);
        assert_eq!(g.order_u64(), Some(81));
        let g = grp(2, &[9, 3]);
        assert_eq!(g.spec().permutation(), &[1, 0]);
        assert_eq!(g.moduli(), &ints(&[3, 9, 3])[..]);
        let g = grp(2, &[0, 4]);
        assert_eq!(g.moduli(), &ints(&[4, 0, 4])[..]);
        assert_eq!(g.order(), None);
    }

    #[test]
    fn special_basis() {
        let g = special(&[2, 2]);
        assert_eq!(g.labels(), ["x1", "x2", "[x2,x1]", "[x2,x1^2]", "[x2^2,x1]"]);
        assert_eq!(g.moduli(), &ints(&[2, 2, 4, 1, 1])[..]);
        let g = special(&[2, 4]);
        assert_eq!(g.moduli(), &ints(&[2, 4, 4, 1, 2])[..]);
        let g = special(&[4, 4, 8]);
        assert_eq!(g.len(), 14);
        assert_eq!(g.moduli()[g.position("[x3,x1,x2]").unwrap()], BigInt::from(4));
    }

    #[test]
    fn regime_violations() {
        let err = GroupSpec::generic(3, &[2, 2]).unwrap_err();
        assert!(err.to_string().contains("prime 2 < class 3"), "{err}");
        assert!(GroupSpec::generic(9, &[4, 4]).is_err());
        assert!(GroupSpec::generic(3, &[3, 9]).is_ok());
        assert!(GroupSpec::special(&[2, 6]).is_err());
        assert!(GroupSpec::new(2, &[2, 2], Regime::Special23).is_err());
        assert!(GroupSpec::new(2, &[2, 2], Regime::Abelian).is_err());
        assert_eq!(GroupSpec::generic(2, &[1, 2]).unwrap_err(), NilprodError::Order(1));
    }

    #[test]
    fn reduce_examples() {
        let g = grp(2, &[3, 9]);
        assert!(reduce(&g, ints(&[3, 0, 0])).unwrap().is_identity());
        assert_eq!(reduce(&g, ints(&[0, 0, 5])).unwrap().exponents(), &ints(&[0, 0, 2])[..]);
        assert_eq!(reduce(&g, ints(&[-1, 0, 0])).unwrap().exponents(), &ints(&[2, 0, 0])[..]);
    }

    #[test]
    fn dihedral_arithmetic() {
        let g = grp(2, &[2, 2]);
        let (x1, x2) = (el(&g, "x1"), el(&g, "x2"));
        assert_eq!(format(&x2.mul(&x1).unwrap()), "x1 x2 [x2,x1]");
        let r = el(&g, "x1 x2");
        assert_eq!(format(&r.pow_i(2)), "[x2,x1]");
        assert!(r.pow_i(4).is_identity());
        assert_eq!(r.element_order().unwrap(), BigUint::from(4u32));
        assert_eq!(identity(&g).element_order().unwrap(), BigUint::one());
    }

    #[test]
    fn class_three_example() {
        let g = grp(3, &[3, 3]);
        let p = el(&g, "x2^2").mul(&el(&g, "x1")).unwrap();
        assert_eq!(format(&p), "x1 x2^2 [x2,x1]^2 [x2,x1,x2]");
        assert_eq!(el(&g, "[x2,x1,x1]").exponents(), &ints(&[0, 0, 0, 1, 0])[..]);
    }

    #[test]
    fn special_examples() {
        let g = special(&[2, 2]);
        assert!(el(&g, "x2").mul_special_2_3(&el(&g, "x2")).unwrap().is_identity());
        assert_eq!(format(&el(&g, "x2").mul_special_2_3(&el(&g, "x1")).unwrap()), "x1 x2 [x2,x1]");
        let c2 = el(&g, "[x2,x1]^2");
        assert!(c2.mul_special_2_3(&c2).unwrap().is_identity());
        assert_eq!(el(&g, "[x2,x1]").element_order().unwrap(), BigUint::from(4u32));
        let h = grp(2, &[2, 2]);
        assert!(el(&h, "x1").mul_special_2_3(&el(&h, "x2")).is_err());
    }

    #[test]
    fn special_labels_evaluate_to_their_items() {
        let g = special(&[4, 8]);
        for (idx, label) in g.labels().iter().enumerate() {
            let e = el(&g, label);
            assert_eq!(e, basis_element(&g, idx), "{label}");
        }
    }

    #[test]
    fn parse_and_format() {
        let g = grp(2, &[3, 9]);
        assert_eq!(el(&g, "x2^2 [x2,x1]^3").exponents(), &ints(&[0, 2, 0])[..]);
        assert!(el(&g, "").is_identity());
        let g5 = grp(3, &[5, 5]);
        assert_eq!(el(&g5, "[x2,x1,x1]").exponents(), &ints(&[0, 0, 0, 1, 0])[..]);
        assert!(matches!(parse(&g, "x3"), Err(NilprodError::UnknownGenerator { index: 3, .. })));
        assert!(matches!(parse(&g, "[x2^2,x1]"), Err(NilprodError::Syntax(_))));
        let a = el(&g5, "x1^3 x2 [x2,x1]^4 [x2,x1,x2]^2");
        assert_eq!(el(&g5, &format(&a)), a);
    }

    #[test]
    fn comm_of_generators() {
        let g = grp(2, &[3, 9]);
        assert_eq!(el(&g, "x2").comm(&el(&g, "x1")).unwrap().exponents(), &ints(&[0, 0, 1])[..]);
        assert!(identity(&g).inv().is_identity());
    }

    #[test]
    fn closed_formulas_match_collection_three_generators() {
        let g = grp(3, &[5, 5, 25]);
        let n = g.len();
        let mk = |seed: i64| reduce(&g, (0..n as i64).map(|i| BigInt::from((i * seed + 3) % 11)).collect()).unwrap();
        for s in 1..6 {
            let (a, b) = (mk(s), mk(s + 4));
            assert_eq!(a.mul_closed(&b).unwrap(), a.mul_by_collection(&b).unwrap());
        }
    }

    #[test]
    fn codes_round_trip() {
        let g = grp(3, &[3, 9]);
        for code in 0..g.order_u64().unwrap() {
            assert_eq!(encode(&decode(&g, code)), code);
        }
    }

    #[test]
    fn infinite_order_rejected() {
        let g = grp(2, &[0, 3]);
        assert!(matches!(el(&g, "x1").element_order(), Err(NilprodError::Infinite(_))));
    }
}
