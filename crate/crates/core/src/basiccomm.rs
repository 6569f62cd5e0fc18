//! Hall basic commutators on generators `x1..xr`, enumerated up to a weight
//! cap in the canonical basic order.
//!
//! Order: by weight, then `[x1,y1] < [x2,y2]` iff `y1 < y2`, or `y1 = y2` and
//! `x1 < x2`. A bracket `[x,y]` of basic commutators is basic when `x > y` and,
//! if `x = [u,v]`, also `y >= v`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub const MAX_GENERATORS: usize = 16;
pub const MAX_WEIGHT: usize = 10;
/// Refuse to materialize sequences longer than this.
pub const MAX_SEQUENCE_LEN: u128 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasicError {
    #[error("generator count must be in 1..={MAX_GENERATORS}, got {0}")]
    Generators(usize),
    #[error("weight cap must be in 1..={MAX_WEIGHT}, got {0}")]
    Weight(usize),
    #[error("{count} basic commutators on {r} generators up to weight {k} is too many to enumerate")]
    TooLarge { r: usize, k: usize, count: u128 },
    #[error("{0} is not a basic commutator")]
    NotBasic(String),
    #[error("two-generator shape needs weight >= 3, got weight {0}")]
    ShapeWeight(usize),
    #[error("two-generator shape needs generators x1, x2 only: {0}")]
    ShapeGenerators(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CommutatorTree {
    /// Generator `x_i`, 1-based.
    Leaf(usize),
    /// `[left, right]` with its cached weight.
    Node(Arc<CommutatorTree>, Arc<CommutatorTree>, usize),
}

pub type Tree = Arc<CommutatorTree>;

impl CommutatorTree {
    pub fn leaf(i: usize) -> Tree {
        Arc::new(CommutatorTree::Leaf(i))
    }

    pub fn node(left: Tree, right: Tree) -> Tree {
        let w = left.weight() + right.weight();
        Arc::new(CommutatorTree::Node(left, right, w))
    }

    /// Left-normed bracket `[a1, a2, ..., an] = [[a1, a2], ..., an]`.
    pub fn left_normed(parts: &[Tree]) -> Tree {
        assert!(!parts.is_empty());
        let mut acc = parts[0].clone();
        for p in &parts[1..] {
            acc = CommutatorTree::node(acc, p.clone());
        }
        acc
    }

    pub fn weight(&self) -> usize {
        match self {
            CommutatorTree::Leaf(_) => 1,
            CommutatorTree::Node(_, _, w) => *w,
        }
    }

    pub fn children(&self) -> Option<(&Tree, &Tree)> {
        match self {
            CommutatorTree::Leaf(_) => None,
            CommutatorTree::Node(l, r, _) => Some((l, r)),
        }
    }

    pub fn max_generator(&self) -> usize {
        match self {
            CommutatorTree::Leaf(i) => *i,
            CommutatorTree::Node(l, r, _) => l.max_generator().max(r.max_generator()),
        }
    }

    /// Sorted, deduplicated generator indices occurring in the tree.
    pub fn support(&self) -> Vec<usize> {
        fn walk(t: &CommutatorTree, out: &mut Vec<usize>) {
            match t {
                CommutatorTree::Leaf(i) => out.push(*i),
                CommutatorTree::Node(l, r, _) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Rename generators through `f`.
    pub fn relabel(&self, f: &impl Fn(usize) -> usize) -> Tree {
        match self {
            CommutatorTree::Leaf(i) => CommutatorTree::leaf(f(*i)),
            CommutatorTree::Node(l, r, _) => CommutatorTree::node(l.relabel(f), r.relabel(f)),
        }
    }

    /// The left spine flattened: `[[a,b],c]` gives `[a, b, c]`.
    pub fn spine(self: &Arc<Self>) -> Vec<Tree> {
        let mut rights = Vec::new();
        let mut cur = self.clone();
        while let CommutatorTree::Node(l, r, _) = &*cur {
            rights.push(r.clone());
            let next = l.clone();
            cur = next;
        }
        rights.push(cur);
        rights.reverse();
        rights
    }
}

impl fmt::Display for CommutatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorTree::Leaf(i) => write!(f, "x{i}"),
            CommutatorTree::Node(..) => {
                let mut parts = Vec::new();
                let mut cur = self;
                while let CommutatorTree::Node(l, r, _) = cur {
                    parts.push(r.to_string());
                    cur = l;
                }
                parts.push(cur.to_string());
                parts.reverse();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl fmt::Debug for CommutatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether a tree satisfies the basic-commutator conditions recursively.
pub fn is_basic(t: &CommutatorTree) -> bool {
    match t {
        CommutatorTree::Leaf(i) => *i >= 1,
        CommutatorTree::Node(x, y, _) => {
            if !is_basic(x) || !is_basic(y) || order_unchecked(x, y) != Ordering::Greater {
                return false;
            }
            match x.children() {
                Some((_, v)) => order_unchecked(y, v) != Ordering::Less,
                None => true,
            }
        }
    }
}

fn order_unchecked(a: &CommutatorTree, b: &CommutatorTree) -> Ordering {
    a.weight().cmp(&b.weight()).then_with(|| match (a, b) {
        (CommutatorTree::Leaf(i), CommutatorTree::Leaf(j)) => i.cmp(j),
        (CommutatorTree::Node(x1, y1, _), CommutatorTree::Node(x2, y2, _)) => {
            order_unchecked(y1, y2).then_with(|| order_unchecked(x1, x2))
        }
        // Equal weight forces equal shape at the root.
        _ => unreachable!("leaf and node of equal weight"),
    })
}

/// Total order on basic commutators.
pub fn compare(a: &CommutatorTree, b: &CommutatorTree) -> Result<Ordering, BasicError> {
    for t in [a, b] {
        if !is_basic(t) {
            return Err(BasicError::NotBasic(t.to_string()));
        }
    }
    Ok(order_unchecked(a, b))
}

/// Number of basic commutators of weight exactly `n` on `r` generators
/// (Witt's necklace formula).
pub fn witt_count(r: u128, n: u32) -> u128 {
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            total += mobius(d) as i128 * (r.pow(n / d) as i128);
        }
    }
    (total / n as i128) as u128
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

#[derive(Clone, Serialize)]
pub struct BasicItem {
    pub index: usize,
    pub weight: usize,
    pub expr: String,
}

/// Basic commutators on `r` generators of weight `<= k`, in basic order.
pub struct BasicSequence {
    r: usize,
    k: usize,
    items: Vec<Tree>,
    weights: Vec<usize>,
    /// For an item `[x,y]`, the indices of `x` and `y`.
    parts: Vec<Option<(usize, usize)>>,
    /// `starts[w]..starts[w+1]` are the items of weight `w` (index 0 unused).
    starts: Vec<usize>,
    index: HashMap<Tree, usize>,
}

impl fmt::Debug for BasicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasicSequence")
            .field("r", &self.r)
            .field("k", &self.k)
            .field("len", &self.items.len())
            .finish()
    }
}

pub fn enumerate_basic(r: usize, k: usize) -> Result<BasicSequence, BasicError> {
    if r == 0 || r > MAX_GENERATORS {
        return Err(BasicError::Generators(r));
    }
    if k == 0 || k > MAX_WEIGHT {
        return Err(BasicError::Weight(k));
    }
    let count: u128 = (1..=k as u32).map(|n| witt_count(r as u128, n)).sum();
    if count > MAX_SEQUENCE_LEN {
        return Err(BasicError::TooLarge { r, k, count });
    }

    let mut items: Vec<Tree> = Vec::with_capacity(count as usize);
    let mut weights = Vec::with_capacity(count as usize);
    let mut parts = Vec::with_capacity(count as usize);
    let mut starts = vec![0usize, 0];
    for i in 1..=r {
        items.push(CommutatorTree::leaf(i));
        weights.push(1);
        parts.push(None);
    }
    starts.push(items.len());

    for n in 2..=k {
        // Candidates come out sorted by (index(y), index(x)) already.
        let mut fresh = Vec::new();
        for iy in 0..starts[n] {
            let wy = weights[iy];
            if wy >= n {
                break;
            }
            let wx = n - wy;
            for ix in starts[wx].max(iy + 1)..starts[wx + 1] {
                if let Some((_, iv)) = parts[ix] {
                    if iy < iv {
                        continue;
                    }
                }
                fresh.push((ix, iy));
            }
        }
        for (ix, iy) in fresh {
            items.push(CommutatorTree::node(items[ix].clone(), items[iy].clone()));
            weights.push(n);
            parts.push(Some((ix, iy)));
        }
        starts.push(items.len());
    }

    let index = items.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(BasicSequence { r, k, items, weights, parts, starts, index })
}

impl BasicSequence {
    pub fn generators(&self) -> usize {
        self.r
    }

    pub fn max_weight(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Tree] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &Tree {
        &self.items[i]
    }

    pub fn weight(&self, i: usize) -> usize {
        self.weights[i]
    }

    pub fn parts(&self, i: usize) -> Option<(usize, usize)> {
        self.parts[i]
    }

    /// Index range of the items of weight `w`.
    pub fn weight_range(&self, w: usize) -> std::ops::Range<usize> {
        if w == 0 || w > self.k {
            return 0..0;
        }
        self.starts[w]..self.starts[w + 1]
    }

    pub fn index_of(&self, t: &CommutatorTree) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.items.iter().map(|t| t.to_string()).collect()
    }

    pub fn listing(&self) -> Vec<BasicItem> {
        self.items
            .iter()
            .enumerate()
            .map(|(i, t)| BasicItem { index: i + 1, weight: self.weights[i], expr: t.to_string() })
            .collect()
    }
}

/// `[x2,x1,w,c4,...]` decomposition of a two-generator basic commutator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoGeneratorShape {
    /// `x1` or `x2`.
    pub prefix: Tree,
    pub tail: Vec<Tree>,
}

impl TwoGeneratorShape {
    pub fn rebuild(&self) -> Tree {
        let mut parts = vec![CommutatorTree::leaf(2), CommutatorTree::leaf(1), self.prefix.clone()];
        parts.extend(self.tail.iter().cloned());
        CommutatorTree::left_normed(&parts)
    }
}

pub fn two_generator_shape(c: &Tree) -> Result<TwoGeneratorShape, BasicError> {
    if c.weight() < 3 {
        return Err(BasicError::ShapeWeight(c.weight()));
    }
    if c.max_generator() > 2 {
        return Err(BasicError::ShapeGenerators(c.to_string()));
    }
    if !is_basic(c) {
        return Err(BasicError::NotBasic(c.to_string()));
    }
    let spine = c.spine();
    // A basic two-generator commutator always bottoms out in [x2,x1].
    debug_assert_eq!(*spine[0], CommutatorTree::Leaf(2));
    debug_assert_eq!(*spine[1], CommutatorTree::Leaf(1));
    Ok(TwoGeneratorShape { prefix: spine[2].clone(), tail: spine[3..].to_vec() })
}
