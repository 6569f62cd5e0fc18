//! Executable checks of the theorems behind the library, grouped into named
//! suites. Every suite is deterministic for a fixed seed.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::basiccomm::{is_basic, BasicError, CommutatorTree, Tree};
use crate::capability::{
    self, baer_abelian, baer_per_prime, capable_class2_2gen, capable_nilprod, dihedral_tightness, extraspecial_p5,
    invariant_factors, necessary_condition, verify_class2, verify_witness, CapabilityError, Class2Presentation, Decision,
};
use crate::collector::{self, expand_power_commutator, free_group, CollectError, FreeNilElement, FreeNilpotentGroup, Weight, Word};
use crate::grouptools::{
    center_bruteforce, center_formula, center_full, center_order_layered, closure, closure_of_elements, exponent_of,
    lower_central, lower_central_checked, FiniteGroup, GroupError, NilCodes, Relabeled, DEFAULT_CAP,
};
use crate::nilprod::{self, make_group, special_product, Element, GroupSpec, NilGroup, NilprodError};
use crate::valuation::{
    binom_sum_divisibility, carries_base_p, floor_log, is_prime, max_s_bound, ord_p, prime_power_binom_valuation,
    Valuation, ValuationError,
};

pub const SUITES: &[&str] = &[
    "kummer",
    "maxs",
    "axioms",
    "identities",
    "struik-lemma2",
    "hall-power",
    "jacobi-w",
    "center-2",
    "center-3",
    "center-k",
    "center-2-3special",
    "exponent-lemmas",
    "power-commutator",
    "capability",
    "dihedral-tightness",
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; known suites: {known}", known = SUITES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Basic(#[from] BasicError),
    #[error(transparent)]
    Collect(#[from] CollectError),
    #[error(transparent)]
    Nilprod(#[from] NilprodError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Capability(#[from] CapabilityError),
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Element cap for brute-force enumeration.
    pub cap: u64,
    /// Largest group order for the exhaustive center checks.
    pub max_order: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, cap: DEFAULT_CAP, max_order: 6561 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: String,
    pub inputs: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub citations: Vec<&'static str>,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<Failure>,
    /// Left out of JSON so that output is byte-stable.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite, self.seed)?;
        for c in &self.citations {
            writeln!(f, "  cites: {c}")?;
        }
        for x in &self.failures {
            writeln!(f, "  FAIL {}: inputs {}; expected {}; actual {}", x.case, x.inputs, x.expected, x.actual)?;
        }
        write!(
            f,
            "{} cases, {} failures, {:.2}s: {}",
            self.cases,
            self.failures.len(),
            self.wall_time.as_secs_f64(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Default)]
struct Run {
    cases: u64,
    failures: Vec<Failure>,
}

impl Run {
    /// Count a case; `what` is only evaluated on failure and gives (case id, inputs).
    fn eq<T: PartialEq + fmt::Debug>(&mut self, expected: T, actual: T, what: impl FnOnce() -> (String, String)) {
        self.cases += 1;
        if expected != actual {
            let (case, inputs) = what();
            self.failures.push(Failure { case, inputs, expected: format!("{expected:?}"), actual: format!("{actual:?}") });
        }
    }

    fn holds(&mut self, ok: bool, what: impl FnOnce() -> (String, String)) {
        self.eq(true, ok, what);
    }
}

fn citations(name: &str) -> Vec<&'static str> {
    match name {
        "kummer" => vec![
            "Kummer's theorem: ord_p C(n,m) is the number of carries when adding m and n-m in base p",
            "ord_p C(p^n, a) = n - ord_p(a) for 0 < a <= p^n",
            "p^(n - floor(log_p m)) divides a_1 C(p^n,1) + ... + a_m C(p^n,m)",
        ],
        "maxs" => vec!["max over s of floor((k-s)/(n-1)) + floor(log_n(s+1)) is floor(k/(n-1)), attained at s = n-1"],
        "axioms" => vec![
            "Hall basis theorem: each element of F/F_(k+1) is uniquely a product of basic commutator powers",
            "Struik's theorem: nilpotent products of cyclic groups have a unique reduced normal form",
        ],
        "identities" => vec![
            "[xy,z] = [x,z][[x,z],y][y,z] and [x,yz] = [x,z][z,[y,x]][x,y]",
            "[x_j,x_i,x_k] = [x_i,x_j,x_k]^-1 and [x_k,x_j,x_i] = [x_j,x_i,x_k]^-1 [x_k,x_i,x_j] modulo G_4",
        ],
        "struik-lemma2" => vec!["[a^r,b^s] = [a,b]^(rs) [a,b,a]^(s C(r,2)) [a,b,b]^(r C(s,2)) modulo G_4"],
        "hall-power" => vec!["Hall's power formula: (x_1...x_s)^n = x_1^n ... x_s^n c_1^f_1(n) ..., f_i of degree at most wt(c_i)"],
        "jacobi-w" => vec![
            "W([a,b]) >= W(a) + W(b); bilinearity modulo G_(w1+w2+1); [a,b,c][b,c,a][c,a,b] in G_(W(a)+W(b)+W(c)+1)",
            "[u,v,x_r] = [v,x_r,u]^-1 [u,x_r,v] for v > x_r",
            "[g,x_r] = prod d_i^a_i f_i^a_i modulo F_(k+2)",
        ],
        "center-2" => vec![
            "Z(G) = <x_r^(p^a_(r-1)), G_2> for 2-nilpotent products of cyclic p-groups",
            "Baer's centrality criterion: prod x_i^a_i is central when gcd(|x_i|,|x_j|) divides a_j",
        ],
        "center-3" => vec!["Z(G) = <x_r^(p^a_(r-1)), G_3> for 3-nilpotent products of cyclic p-groups, p >= 3"],
        "center-k" => vec!["Z(G) = <x_r^(p^a_(r-1)), G_k> for k-nilpotent products of cyclic p-groups, p >= k"],
        "center-2-3special" => {
            vec!["Z(G) = <x_r^(2^(a_(r-1)+1)), [x_j,x_i]^(2^a_i), G_3> for 3-nilpotent products of cyclic 2-groups"]
        }
        "exponent-lemmas" => vec![
            "if [z,y^(p^i),y] = [z,y^(p^i),z] = e for i >= a then <y,z>_k has exponent p^a and <y,z>_(k-1) exponent p^(a+floor(1/(p-1)))",
            "[z^(p^N),y] = [z,y]^(p^N) = [z,y^(p^N)] for N >= a + floor((k-1)/(p-1))",
        ],
        "power-commutator" => vec![
            "[x^n,y] = [x,y]^n c_1^f_1(n) ... with wt(c_i) >= 3 and f_i of degree below wt(c_i)",
            "[x^n,y] = [x,y]^n modulo commutators of weight above W(x) + W(y)",
        ],
        "capability" => vec![
            "Baer's theorem on capable abelian groups",
            "necessary condition: a_r <= a_(r-1) + floor((k-1)/(p-1))",
            "k-nilpotent products of cyclic p-groups, p > k: capable iff a_(r-1) = a_r",
            "Bacon-Kappe: a two-generator class-2 p-group, p odd, is capable iff a = b",
            "Beyl-Felgner-Schmid: the extraspecial group of order p^5 is not capable",
        ],
        "dihedral-tightness" => vec!["the bound a_r <= a_(r-1) + floor((k-1)/(p-1)) is attained by dihedral 2-groups"],
        _ => Vec::new(),
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut run = Run::default();
    match name {
        "kummer" => kummer(cfg, &mut rng, &mut run)?,
        "maxs" => maxs(&mut run)?,
        "axioms" => axioms(cfg, &mut rng, &mut run)?,
        "identities" => identities(&mut rng, &mut run)?,
        "struik-lemma2" => struik_lemma2(&mut rng, &mut run)?,
        "hall-power" => hall_power(&mut rng, &mut run)?,
        "jacobi-w" => jacobi_w(&mut rng, &mut run)?,
        "center-2" => centers(cfg, 2, &mut run)?,
        "center-3" => centers(cfg, 3, &mut run)?,
        "center-k" => center_k(cfg, &mut run)?,
        "center-2-3special" => center_special(cfg, &mut run)?,
        "exponent-lemmas" => exponent_lemmas(cfg, &mut rng, &mut run)?,
        "power-commutator" => power_commutator(&mut rng, &mut run)?,
        "capability" => capability_suite(cfg, &mut run)?,
        "dihedral-tightness" => dihedral(cfg, &mut run)?,
        other => return Err(SuiteError::Unknown(other.to_string())),
    }
    let mut failures = run.failures;
    failures.sort_by(|a, b| a.case.cmp(&b.case));
    Ok(SuiteReport {
        suite: name.to_string(),
        citations: citations(name),
        seed: cfg.seed,
        cases: run.cases,
        failures,
        wall_time: start.elapsed(),
    })
}

// ---------------------------------------------------------------- valuations

fn kummer(_cfg: &SuiteConfig, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for p in [2u64, 3, 5, 7] {
        let mut row = vec![BigUint::one()];
        for n in 0..=200u64 {
            for (m, c) in row.iter().enumerate() {
                let m = m as u64;
                let v = ord_p(p, &BigInt::from(c.clone()))?;
                let carries = carries_base_p(p, n - m, m)?;
                run.eq(Valuation::Finite(carries), v, || (format!("kummer/p{p}/n{n:03}/m{m:03}"), format!("C({n},{m})")));
            }
            let mut next = vec![BigUint::one(); row.len() + 1];
            for m in 1..row.len() {
                next[m] = &row[m - 1] + &row[m];
            }
            row = next;
        }
    }

    for p in [2u64, 3, 5] {
        for n in 1..=6u64 {
            let big = p.pow(n as u32);
            let mut c = BigUint::one();
            for a in 1..=big {
                c = c * (big - a + 1) / a;
                let expected = ord_p(p, &BigInt::from(c.clone()))?;
                let got = prime_power_binom_valuation(p, n, a)?;
                run.eq(expected, Valuation::Finite(got), || (format!("prime-power/p{p}/n{n}/a{a:05}"), format!("C({p}^{n},{a})")));
            }
        }
    }

    for p in [2u64, 3, 5] {
        for n in 1..=5u64 {
            let big = p.pow(n as u32);
            let mut binoms = Vec::with_capacity(big as usize);
            let mut c = BigInt::one();
            for i in 1..=big {
                c = c * (big - i + 1) / i;
                binoms.push(c.clone());
            }
            for trial in 0..100 {
                let mut sum = BigInt::zero();
                for m in 1..=big {
                    let a: i64 = rng.random_range(-1000..=1000);
                    sum += &binoms[m as usize - 1] * a;
                    let bound = binom_sum_divisibility(p, n, m)?;
                    let v = ord_p(p, &sum)?;
                    run.holds(v >= Valuation::Finite(bound), || {
                        (format!("binom-sum/p{p}/n{n}/t{trial:03}/m{m:05}"), format!("valuation {v} below bound {bound}"))
                    });
                }
            }
        }
    }

    for p in (2..1000).filter(|&p| is_prime(p)) {
        run.eq(1 / (p - 1), floor_log(p, 2), || (format!("floor-log/p{p:04}"), format!("floor(log_{p} 2)")));
    }
    Ok(())
}

fn maxs(run: &mut Run) -> Result<(), SuiteError> {
    for k in 1..=50u64 {
        for n in 2..=11u64 {
            let term = |s: u64| (k - s) / (n - 1) + floor_log(n, s + 1);
            let brute = (1..=k).map(term).max().expect("k >= 1");
            run.eq(brute, max_s_bound(k, n)?, || (format!("maxs/k{k:02}/n{n:02}"), "brute-force maximum".into()));
            // s ranges over 1..=k, so s = n-1 is only available when n-1 <= k.
            if n - 1 <= k {
                run.eq(brute, term(n - 1), || (format!("maxs-attained/k{k:02}/n{n:02}"), "value at s = n-1".into()));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------- free groups

fn int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigInt {
    BigInt::from(rng.random_range(lo..=hi))
}

/// Random element of `G_w`, with small exponents.
fn rand_free(rng: &mut ChaCha8Rng, g: &Arc<FreeNilpotentGroup>, w: usize) -> FreeNilElement {
    let b = g.basis();
    let exps = (0..g.len()).map(|i| if b.weight(i) >= w { int(rng, -3, 3) } else { BigInt::zero() }).collect();
    g.element(exps).expect("length matches")
}

/// Random element of weight exactly `w` (`w <= k`).
fn rand_free_exact(rng: &mut ChaCha8Rng, g: &Arc<FreeNilpotentGroup>, w: usize) -> FreeNilElement {
    let b = g.basis();
    let mut exps: Vec<BigInt> = rand_free(rng, g, w).into_exponents();
    let range = b.weight_range(w);
    if range.clone().all(|i| exps[i].is_zero()) {
        let i = rng.random_range(range);
        exps[i] = BigInt::one();
    }
    g.element(exps).expect("length matches")
}

fn mul(a: &FreeNilElement, b: &FreeNilElement) -> FreeNilElement {
    a.multiply(b).expect("same group")
}

fn comm(a: &FreeNilElement, b: &FreeNilElement) -> FreeNilElement {
    a.commutator(b).expect("same group")
}

fn product(g: &Arc<FreeNilpotentGroup>, xs: &[FreeNilElement]) -> FreeNilElement {
    xs.iter().fold(g.identity(), |acc, x| mul(&acc, x))
}

/// `a = b` modulo `G_m`.
fn congruent(a: &FreeNilElement, b: &FreeNilElement, m: usize) -> bool {
    mul(&a.inverse(), b).weight_of() >= Weight::Finite(m)
}

fn add_weights(a: Weight, b: Weight) -> Weight {
    match (a, b) {
        (Weight::Finite(x), Weight::Finite(y)) => Weight::Finite(x + y),
        _ => Weight::Infinite,
    }
}

fn small_free_groups() -> Vec<(usize, usize)> {
    (1..=3).flat_map(|r| (1..=5).map(move |k| (r, k))).collect()
}

fn axioms(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for (r, k) in small_free_groups() {
        let g = free_group(r, k)?;
        let e = g.identity();
        for t in 0..500 {
            let (a, b, c) = (rand_free(rng, &g, 1), rand_free(rng, &g, 1), rand_free(rng, &g, 1));
            let id = || format!("free/r{r}k{k}/t{t:03}");
            run.eq(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)), || (id() + "/assoc", format!("{a}; {b}; {c}")));
            run.eq(a.clone(), mul(&a, &e), || (id() + "/identity", a.to_string()));
            run.eq(a.clone(), mul(&e, &a), || (id() + "/identity-left", a.to_string()));
            run.eq(e.clone(), mul(&a, &a.inverse()), || (id() + "/inverse", a.to_string()));
        }
        // Collection is confluent: any split of a word collects to the same element.
        let b = g.basis();
        for t in 0..100 {
            let len = rng.random_range(1..=8);
            let letters: Vec<(Tree, BigInt)> =
                (0..len).map(|_| (b.item(rng.random_range(0..b.len())).clone(), int(rng, -4, 4))).collect();
            let whole = collector::collect(&Word::new(letters.clone()), r, k)?;
            let cut = rng.random_range(0..=letters.len());
            let left = collector::collect(&Word::new(letters[..cut].to_vec()), r, k)?;
            let right = collector::collect(&Word::new(letters[cut..].to_vec()), r, k)?;
            let by_letters: Vec<FreeNilElement> =
                letters.iter().map(|(tr, n)| g.eval_tree(tr).map(|x| x.power(n))).collect::<Result<_, _>>()?;
            let right_assoc = by_letters.iter().rev().fold(g.identity(), |acc, x| mul(x, &acc));
            let id = || format!("collect/r{r}k{k}/t{t:03}");
            run.eq(whole.clone(), mul(&left, &right), || (id() + "/split", format!("{letters:?} at {cut}")));
            run.eq(whole, right_assoc, || (id() + "/reassociate", format!("{letters:?}")));
        }
    }

    let specs: Vec<GroupSpec> = vec![
        GroupSpec::generic(2, &[2, 2])?,
        GroupSpec::generic(2, &[3, 3])?,
        GroupSpec::generic(2, &[3, 9])?,
        GroupSpec::generic(3, &[3, 3])?,
        GroupSpec::generic(3, &[5, 5])?,
        GroupSpec::special(&[2, 2])?,
        GroupSpec::special(&[2, 4])?,
    ];
    for spec in &specs {
        group_table_checks(spec, cfg, rng, run)?;
    }

    // Closed formulas against collection.
    let exhaustive = [(2, vec![2, 2]), (2, vec![3, 3]), (2, vec![3, 9]), (2, vec![5, 5]), (2, vec![9, 9]), (2, vec![3, 3, 3]), (3, vec![3, 3]), (3, vec![3, 9])];
    for (k, orders) in exhaustive {
        formula_agreement(&GroupSpec::generic(k, &orders)?, None, rng, run)?;
    }
    formula_agreement(&GroupSpec::generic(3, &[9, 9])?, Some(10_000), rng, run)?;
    formula_agreement(&GroupSpec::generic(3, &[5, 5])?, Some(10_000), rng, run)?;
    for orders in [[2u64, 2], [2, 4], [4, 4], [2, 8]] {
        let spec = GroupSpec::special(&orders)?;
        let n = make_group(&spec)?.order_u64().expect("finite");
        formula_agreement(&spec, (n > 729).then_some(10_000), rng, run)?;
    }

    // The special formulas do not depend on the residues chosen for x_i.
    for a in 1..=3u32 {
        for b in a..=3u32 {
            let spec = GroupSpec::special(&[1 << a, 1 << b])?;
            special_well_defined(&spec, rng, run)?;
        }
    }
    Ok(())
}

fn group_table_checks(spec: &GroupSpec, cfg: &SuiteConfig, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    let g = make_group(spec)?;
    let codes = NilCodes::new(&g)?;
    let n = codes.order();
    let tag = format!("table/{}/{}", spec.regime(), fmt_orders(spec));
    let mut seen = HashSet::new();
    for c in 0..n {
        let a = codes.decode(c);
        run.eq(c, codes.encode(&a), || (format!("{tag}/code{c:05}"), "decode then encode".into()));
        run.eq(&a, &nilprod::reduce(&g, a.exponents().to_vec())?, || (format!("{tag}/reduced{c:05}"), nilprod::format(&a)));
        seen.insert(a.exponents().to_vec());
        let back = nilprod::parse(&g, &nilprod::format(&a))?;
        run.eq(&a, &back, || (format!("{tag}/parse{c:05}"), nilprod::format(&a)));
        run.eq(c, codes.mul(c, 0), || (format!("{tag}/identity{c:05}"), nilprod::format(&a)));
        run.eq(0, codes.mul(c, codes.inv(c)), || (format!("{tag}/inverse{c:05}"), nilprod::format(&a)));
    }
    run.eq(n, seen.len() as u64, || (format!("{tag}/bijection"), "distinct normal forms".into()));
    if n <= 729 {
        let bad: Vec<u64> = (0..n)
            .into_par_iter()
            .filter(|&a| {
                let mut row = vec![false; n as usize];
                (0..n).for_each(|b| row[codes.mul(a, b) as usize] = true);
                !row.iter().all(|&x| x)
            })
            .collect();
        run.eq(Vec::<u64>::new(), bad, || (format!("{tag}/latin"), "rows that are not permutations".into()));
    }
    let triples: Vec<(u64, u64, u64)> = if n <= 64 {
        (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))).collect()
    } else {
        (0..100_000).map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))).collect()
    };
    let bad: Vec<(u64, u64, u64)> = triples
        .par_iter()
        .copied()
        .filter(|&(a, b, c)| codes.mul(codes.mul(a, b), c) != codes.mul(a, codes.mul(b, c)))
        .collect();
    run.cases += triples.len() as u64 - 1;
    run.eq(Vec::new(), bad, || (format!("{tag}/assoc"), format!("{} triples", triples.len())));
    let whole = closure(&codes, &codes.generators(), cfg.cap)?;
    run.eq(n, whole.len() as u64, || (format!("{tag}/generated"), "closure of the generators".into()));
    Ok(())
}

fn fmt_orders(spec: &GroupSpec) -> String {
    format!("k{}({})", spec.class_k(), spec.orders().iter().map(u64::to_string).collect::<Vec<_>>().join(","))
}

/// Closed (or special) formulas against lifting to the free group; all pairs
/// unless `sample` is given.
fn formula_agreement(spec: &GroupSpec, sample: Option<usize>, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    let g = make_group(spec)?;
    let codes = NilCodes::new(&g)?;
    let n = codes.order();
    let pairs: Vec<(u64, u64)> = match sample {
        None => (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect(),
        Some(m) => (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect(),
    };
    let special = spec.regime() == nilprod::Regime::Special23;
    let bad: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let (x, y) = (codes.decode(a), codes.decode(b));
            let formula = if special { x.mul_special_2_3(&y).ok() } else { x.mul_closed(&y) };
            let collected = x.mul_by_collection(&y).expect("same group");
            (formula.as_ref() != Some(&collected)).then(|| format!("{} * {}", nilprod::format(&x), nilprod::format(&y)))
        })
        .collect();
    run.cases += pairs.len() as u64 - 1;
    let tag = format!("formulas/{}/{}", spec.regime(), fmt_orders(spec));
    run.eq(Vec::<String>::new(), bad, || (tag, format!("{} pairs", pairs.len())));
    Ok(())
}

fn special_well_defined(spec: &GroupSpec, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    let g = make_group(spec)?;
    let codes = NilCodes::new(&g)?;
    let n = codes.order();
    let pairs: Vec<(u64, u64)> = if n <= 256 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        (0..4000).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
    };
    let shifts: Vec<(usize, BigInt)> = spec.orders().iter().enumerate().map(|(i, &m)| (i, BigInt::from(m))).collect();
    let tag = format!("well-defined/{}", fmt_orders(spec));
    for &(a, b) in &pairs {
        let (c, d) = (codes.decode(a).exponents().to_vec(), codes.decode(b).exponents().to_vec());
        let base = special_product(&g, &c, &d);
        for (i, m) in &shifts {
            let mut d2 = d.clone();
            d2[*i] += m;
            run.eq(&base, &special_product(&g, &c, &d2), || (format!("{tag}/d{i}/{a:05}x{b:05}"), format!("{c:?} * {d:?}")));
            let mut c2 = c.clone();
            c2[*i] += m;
            run.eq(&base, &special_product(&g, &c2, &d), || (format!("{tag}/c{i}/{a:05}x{b:05}"), format!("{c:?} * {d:?}")));
        }
    }
    Ok(())
}

fn identities(rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for (r, k) in small_free_groups() {
        let g = free_group(r, k)?;
        for t in 0..200 {
            let (x, y, z) = (rand_free(rng, &g, 1), rand_free(rng, &g, 1), rand_free(rng, &g, 1));
            let xz = comm(&x, &z);
            let lhs1 = comm(&mul(&x, &y), &z);
            let rhs1 = product(&g, &[xz.clone(), comm(&xz, &y), comm(&y, &z)]);
            let inputs = || format!("x={x}; y={y}; z={z}");
            run.eq(lhs1, rhs1, || (format!("identity1/r{r}k{k}/t{t:03}"), inputs()));
            let lhs2 = comm(&x, &mul(&y, &z));
            let rhs2 = product(&g, &[xz.clone(), comm(&z, &comm(&y, &x)), comm(&x, &y)]);
            run.eq(lhs2, rhs2, || (format!("identity2/r{r}k{k}/t{t:03}"), inputs()));
        }
    }

    // Translation identities, in the free group and in nilpotent products.
    let g = free_group(3, 3)?;
    let x = |i: usize| g.generator(i).expect("generator");
    for (i, j, k) in triples3() {
        let jik = comm(&comm(&x(j), &x(i)), &x(k));
        let ijk = comm(&comm(&x(i), &x(j)), &x(k));
        let kji = comm(&comm(&x(k), &x(j)), &x(i));
        let kij = comm(&comm(&x(k), &x(i)), &x(j));
        run.eq(jik.clone(), ijk.inverse(), || (format!("translation1/free/{i}{j}{k}"), String::new()));
        run.eq(kji, mul(&jik.inverse(), &kij), || (format!("translation2/free/{i}{j}{k}"), String::new()));
    }
    for orders in [[3u64, 3, 3], [5, 5, 5], [3, 9, 9]] {
        let h = make_group(&GroupSpec::generic(3, &orders)?)?;
        let tag = format!("k3({},{},{})", orders[0], orders[1], orders[2]);
        let e = |s: String| nilprod::parse(&h, &s);
        for (i, j, k) in triples3() {
            let jik = e(format!("[x{j},x{i},x{k}]"))?;
            let ijk = e(format!("[x{i},x{j},x{k}]"))?;
            let kji = e(format!("[x{k},x{j},x{i}]"))?;
            let kij = e(format!("[x{k},x{i},x{j}]"))?;
            run.eq(&jik, &ijk.inv(), || (format!("translation1/{tag}/{i}{j}{k}"), String::new()));
            run.eq(kji, jik.inv().mul(&kij)?, || (format!("translation2/{tag}/{i}{j}{k}"), String::new()));
        }
    }
    Ok(())
}

fn triples3() -> Vec<(usize, usize, usize)> {
    (1..=3).flat_map(|i| (1..=3).flat_map(move |j| (1..=3).map(move |k| (i, j, k)))).collect()
}

fn choose2(n: i64) -> BigInt {
    BigInt::from(n * (n - 1) / 2)
}

fn struik_lemma2(rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    let g = free_group(2, 3)?;
    let (x1, x2) = (g.generator(1)?, g.generator(2)?);
    let mut pairs = vec![(x1.clone(), x2.clone()), (x2, x1)];
    pairs.extend((0..10).map(|_| (rand_free(rng, &g, 1), rand_free(rng, &g, 1))));
    for (t, (a, b)) in pairs.iter().enumerate() {
        let ab = comm(a, b);
        let (aba, abb) = (comm(&ab, a), comm(&ab, b));
        for r in -6i64..=6 {
            for s in -6i64..=6 {
                let lhs = comm(&a.power(&r.into()), &b.power(&s.into()));
                let rhs = product(
                    &g,
                    &[ab.power(&BigInt::from(r * s)), aba.power(&(choose2(r) * s)), abb.power(&(choose2(s) * r))],
                );
                run.eq(lhs, rhs, || (format!("lemma2/pair{t:02}/r{r:+}/s{s:+}"), format!("a={a}; b={b}")));
            }
        }
    }
    Ok(())
}

/// `true` iff the `(d)`-th finite difference of `seq` vanishes.
fn difference_vanishes(seq: &[BigInt], d: usize) -> bool {
    let mut cur = seq.to_vec();
    for _ in 0..d {
        if cur.len() <= 1 {
            return true;
        }
        cur = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    cur.iter().all(Zero::is_zero)
}

fn hall_power(rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for (r, k) in small_free_groups() {
        let g = free_group(r, k)?;
        for t in 0..20 {
            let a = rand_free(rng, &g, 1);
            for n in -8i64..=8 {
                let copy = if n < 0 { a.inverse() } else { a.clone() };
                let repeated = product(&g, &vec![copy; n.unsigned_abs() as usize]);
                run.eq(repeated, a.power(&n.into()), || (format!("power/r{r}k{k}/t{t:02}/n{n:+}"), a.to_string()));
            }
            let powers: Vec<FreeNilElement> = (0..=k as i64 + 2).map(|n| a.power(&n.into())).collect();
            for idx in 0..g.len() {
                let w = g.basis().weight(idx);
                let seq: Vec<BigInt> = powers.iter().map(|x| x.exponents()[idx].clone()).collect();
                run.holds(difference_vanishes(&seq, w + 1), || {
                    (format!("degree/r{r}k{k}/t{t:02}/c{idx:03}"), format!("a={a}; exponents {seq:?} exceed degree {w}"))
                });
            }
        }
    }
    Ok(())
}

fn power_commutator(rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for r in 2..=3 {
        for k in 2..=5 {
            let g = free_group(r, k)?;
            for i in 1..=r {
                for j in (1..=r).filter(|&j| j != i) {
                    let (x, y) = (g.generator(i)?, g.generator(j)?);
                    let xy = comm(&x, &y);
                    let tag = format!("r{r}k{k}/x{i}x{j}");
                    for n in -6i64..=6 {
                        let lhs = expand_power_commutator(&x, &y, &n.into())?;
                        let rest = mul(&xy.power(&(-n).into()), &lhs);
                        run.holds(rest.weight_of() >= Weight::Finite(3), || {
                            (format!("h1-remainder/{tag}/n{n:+}"), format!("[x^n,y][x,y]^-n = {rest}"))
                        });
                    }
                    let values: Vec<FreeNilElement> =
                        (0..=k as i64 + 1).map(|n| comm(&x.power(&n.into()), &y)).collect();
                    for idx in 0..g.len() {
                        let w = g.basis().weight(idx);
                        let seq: Vec<BigInt> = values.iter().map(|v| v.exponents()[idx].clone()).collect();
                        run.holds(difference_vanishes(&seq, w), || {
                            (format!("h1-degree/{tag}/c{idx:03}"), format!("exponents {seq:?} exceed degree {}", w - 1))
                        });
                    }
                }
            }
            for t in 0..30 {
                let (w1, w2) = (rng.random_range(1..=k), rng.random_range(1..=k));
                let (x, y) = (rand_free_exact(rng, &g, w1), rand_free_exact(rng, &g, w2));
                let xy = comm(&x, &y);
                for n in -4i64..=4 {
                    let lhs = comm(&x.power(&n.into()), &y);
                    run.holds(congruent(&lhs, &xy.power(&n.into()), w1 + w2 + 1), || {
                        (format!("h2/r{r}k{k}/t{t:02}/n{n:+}"), format!("x={x}; y={y}"))
                    });
                }
            }
        }
    }
    let g = free_group(2, 3)?;
    let (x1, x2) = (g.generator(1)?, g.generator(2)?);
    let c = comm(&x1, &x2);
    let cx = comm(&c, &x1);
    for n in -6i64..=6 {
        let got = expand_power_commutator(&x1, &x2, &n.into())?;
        run.eq(comm(&x1.power(&n.into()), &x2), got.clone(), || (format!("expand/definition/n{n:+}"), String::new()));
        let closed = mul(&c.power(&n.into()), &cx.power(&choose2(n)));
        run.eq(closed, got, || (format!("expand/class3/n{n:+}"), "[x1,x2]^n [x1,x2,x1]^C(n,2)".into()));
    }
    Ok(())
}

fn jacobi_w(rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for r in 2..=3 {
        for k in 2..=5 {
            let g = free_group(r, k)?;
            for t in 0..200 {
                let ws: Vec<usize> = (0..3).map(|_| rng.random_range(1..=k)).collect();
                let (a, b, c) = (rand_free(rng, &g, ws[0]), rand_free(rng, &g, ws[1]), rand_free(rng, &g, ws[2]));
                let inputs = || format!("a={a}; b={b}; c={c}");
                let bound = add_weights(a.weight_of(), b.weight_of());
                run.holds(comm(&a, &b).weight_of() >= bound, || (format!("w-i/r{r}k{k}/t{t:03}"), inputs()));
                let jac = product(&g, &[comm(&comm(&a, &b), &c), comm(&comm(&b, &c), &a), comm(&comm(&c, &a), &b)]);
                let bound = match add_weights(add_weights(a.weight_of(), b.weight_of()), c.weight_of()) {
                    Weight::Finite(w) => Weight::Finite(w + 1),
                    w => w,
                };
                run.holds(jac.weight_of() >= bound, || (format!("w-iv/r{r}k{k}/t{t:03}"), inputs()));
            }
            for t in 0..100 {
                let (w1, w2) = (rng.random_range(1..=k), rng.random_range(1..=k));
                let a: Vec<FreeNilElement> = (0..2).map(|_| rand_free_exact(rng, &g, w1)).collect();
                let b: Vec<FreeNilElement> = (0..2).map(|_| rand_free_exact(rng, &g, w2)).collect();
                let al: Vec<i64> = (0..2).map(|_| rng.random_range(-3..=3)).collect();
                let be: Vec<i64> = (0..2).map(|_| rng.random_range(-3..=3)).collect();
                let lhs = comm(
                    &mul(&a[0].power(&al[0].into()), &a[1].power(&al[1].into())),
                    &mul(&b[0].power(&be[0].into()), &b[1].power(&be[1].into())),
                );
                let terms: Vec<FreeNilElement> = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| comm(&a[i], &b[j]).power(&(al[i] * be[j]).into()))
                    .collect();
                run.holds(congruent(&lhs, &product(&g, &terms), w1 + w2 + 1), || {
                    (format!("w-ii/r{r}k{k}/t{t:03}"), format!("a={a:?}^{al:?}; b={b:?}^{be:?}"))
                });
            }
        }
    }

    // Going down one weight with the last generator.
    for r in 2..=3 {
        for w in 2..=4 {
            let g = free_group(r, w + 1)?;
            let basis = g.basis().clone();
            let xr = CommutatorTree::leaf(r);
            let xr_elem = g.generator(r)?;
            let mut parts = Vec::new();
            let mut trees = Vec::new();
            for idx in basis.weight_range(w) {
                let (u, v) = basis.parts(idx).expect("weight >= 2");
                let (u, v) = (basis.item(u).clone(), basis.item(v).clone());
                let c = g.basis_element(idx);
                let tag = format!("r{r}w{w}/c{idx:03}");
                if v.weight() == 1 {
                    let uvx = CommutatorTree::node(basis.item(idx).clone(), xr.clone());
                    run.holds(is_basic(&uvx), || (format!("jacobigeneral-basic/{tag}"), uvx.to_string()));
                    parts.push((g.eval_tree(&uvx)?, g.identity()));
                    trees.push(uvx);
                } else {
                    let vxu = CommutatorTree::left_normed(&[v.clone(), xr.clone(), u.clone()]);
                    let uxv = CommutatorTree::left_normed(&[u, xr.clone(), v]);
                    run.holds(is_basic(&vxu) && is_basic(&uxv), || (format!("jacobigeneral-basic/{tag}"), format!("{vxu}, {uxv}")));
                    let (d, f) = (g.eval_tree(&vxu)?.inverse(), g.eval_tree(&uxv)?);
                    run.eq(comm(&c, &xr_elem), mul(&d, &f), || (format!("jacobigeneral/{tag}"), basis.item(idx).to_string()));
                    parts.push((d, f));
                    trees.push(vxu);
                    trees.push(uxv);
                }
            }
            let distinct: HashSet<&Tree> = trees.iter().collect();
            run.eq(trees.len(), distinct.len(), || (format!("wecangodown-distinct/r{r}w{w}"), String::new()));
            let s = parts.len();
            let mut vectors: Vec<Vec<i64>> = (0..s).map(|i| (0..s).map(|j| i64::from(i == j)).collect()).collect();
            vectors.extend((0..10).map(|_| (0..s).map(|_| rng.random_range(-3..=3)).collect()));
            let start = basis.weight_range(w).start;
            for (t, alphas) in vectors.iter().enumerate() {
                let gv: Vec<FreeNilElement> =
                    alphas.iter().enumerate().map(|(i, &a)| g.basis_element(start + i).power(&a.into())).collect();
                let lhs = comm(&product(&g, &gv), &xr_elem);
                let rhs: Vec<FreeNilElement> = parts
                    .iter()
                    .zip(alphas)
                    .flat_map(|((d, f), &a)| [d.power(&a.into()), f.power(&a.into())])
                    .collect();
                run.eq(lhs, product(&g, &rhs), || (format!("wecangodown/r{r}w{w}/t{t:03}"), format!("{alphas:?}")));
            }
        }
    }
    Ok(())
}

// ----------------------------------------------------------------- centers

fn prime_power_specs(k: usize, primes: &[u64], max_alpha: u32, ranks: &[usize], max_order: u64) -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for &p in primes {
        for &r in ranks {
            let mut alphas = vec![1u32; r];
            loop {
                let orders: Vec<u64> = alphas.iter().map(|&a| p.pow(a)).collect();
                if let Ok(spec) = GroupSpec::generic(k, &orders) {
                    let fits = make_group(&spec).ok().and_then(|g| g.order_u64()).is_some_and(|n| n <= max_order);
                    if fits {
                        out.push(spec);
                    }
                }
                // next nondecreasing tuple
                let Some(pos) = (0..r).rev().find(|&i| alphas[i] < max_alpha) else { break };
                let v = alphas[pos] + 1;
                alphas[pos..].iter_mut().for_each(|a| *a = v);
            }
        }
    }
    out
}

fn center_matches(spec: &GroupSpec, cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    let g = make_group(spec)?;
    let codes = NilCodes::new(&g)?;
    let tag = format!("{}/{}", spec.regime(), fmt_orders(spec));
    let brute = center_bruteforce(&codes, cfg.cap)?;
    let formula = closure_of_elements(&codes, &center_formula(&g)?, cfg.cap)?;
    let show = |s: &[u64]| s.iter().map(|&c| nilprod::format(&codes.decode(c))).collect::<Vec<_>>().join(" ");
    run.holds(brute == formula, || {
        (format!("center/{tag}"), format!("brute-force {}; formula {}", show(brute.elements()), show(formula.elements())))
    });
    run.eq(0, codes.order() % brute.len() as u64, || (format!("lagrange/{tag}"), String::new()));
    if codes.order() <= 512 {
        let full = center_full(&codes, cfg.cap)?;
        run.eq(brute.elements(), &full[..], || (format!("center-definition/{tag}"), String::new()));
    }
    Ok(())
}

fn centers(cfg: &SuiteConfig, k: usize, run: &mut Run) -> Result<(), SuiteError> {
    let primes: &[u64] = if k == 2 { &[2, 3, 5] } else { &[3, 5] };
    let specs = prime_power_specs(k, primes, 2, &[2, 3], cfg.max_order);
    for spec in &specs {
        center_matches(spec, cfg, run)?;
        let g = make_group(spec)?;
        let codes = NilCodes::new(&g)?;
        if spec.regime() == nilprod::Regime::Generic {
            for i in 2..=k {
                let term = lower_central_checked(&codes, i, cfg.cap)?;
                run.eq(None, term.counterexample, || (format!("lower-central/{}/G{i}", fmt_orders(spec)), String::new()));
            }
        }
        if k == 2 {
            central_sufficiency(&g, &codes, cfg, run)?;
        }
    }
    Ok(())
}

/// `prod x_i^a_i` is central exactly when `gcd(m_i, m_j) | a_j` for all `i != j`.
fn central_sufficiency(g: &Arc<NilGroup>, codes: &NilCodes, cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    let z = center_bruteforce(codes, cfg.cap)?;
    let m = g.spec().orders().to_vec();
    let r = m.len();
    let total: u64 = m.iter().product();
    for mut t in 0..total {
        let mut exps = vec![BigInt::zero(); g.len()];
        let mut a = vec![0u64; r];
        for i in 0..r {
            a[i] = t % m[i];
            t /= m[i];
            exps[i] = a[i].into();
        }
        let cond = (0..r).all(|i| (0..r).filter(|&j| j != i).all(|j| a[j] % m[i].gcd(&m[j]) == 0));
        let code = codes.encode(&nilprod::reduce(g, exps)?);
        run.eq(cond, z.contains(code), || (format!("central-criterion/{}/{a:?}", fmt_orders(g.spec())), String::new()));
    }
    Ok(())
}

fn center_k(cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    let mut specs = Vec::new();
    for (k, orders) in [(4usize, vec![5u64, 5]), (4, vec![5, 25]), (4, vec![25, 25]), (4, vec![5, 5, 5]), (5, vec![5, 5]), (5, vec![5, 25])] {
        specs.push(GroupSpec::generic(k, &orders)?);
    }
    for spec in &specs {
        let g = make_group(spec)?;
        let tag = fmt_orders(spec);
        let formula = center_formula(&g)?;
        let gens: Vec<Element> = (1..=g.rank()).map(|i| nilprod::generator(&g, i)).collect::<Result<_, _>>()?;
        for (n, z) in formula.iter().enumerate() {
            for x in &gens {
                run.eq(z.mul(x)?, x.mul(z)?, || (format!("center-k/{tag}/central{n:03}"), nilprod::format(z)));
            }
        }
        // The formula generators have disjoint supports and each lies in a
        // cyclic coordinate, so they generate their direct product.
        let supports: Vec<Vec<usize>> = formula
            .iter()
            .map(|z| z.exponents().iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, _)| i).collect())
            .collect();
        let mut used = HashSet::new();
        let disjoint = supports.iter().all(|s| s.len() <= 1 && s.iter().all(|&i| used.insert(i)));
        run.holds(disjoint, || (format!("center-k/{tag}/supports"), format!("{supports:?}")));
        let mut formula_order = BigUint::one();
        for z in &formula {
            formula_order *= z.element_order()?;
        }
        let layered = center_order_layered(&g, cfg.cap)?;
        run.eq(layered, formula_order, || (format!("center-k/{tag}/order"), String::new()));
    }
    Ok(())
}

fn special_specs(max_alpha: u32, max_order: u64) -> Result<Vec<GroupSpec>, SuiteError> {
    let mut out = Vec::new();
    for a in 1..=max_alpha {
        for b in a..=max_alpha {
            out.push(GroupSpec::special(&[1 << a, 1 << b])?);
            for c in b..=max_alpha {
                out.push(GroupSpec::special(&[1 << a, 1 << b, 1 << c])?);
            }
        }
    }
    let mut fits = Vec::new();
    for s in out {
        if make_group(&s)?.order_u64().is_some_and(|n| n <= max_order) {
            fits.push(s);
        }
    }
    Ok(fits)
}

fn center_special(cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    for spec in special_specs(3, 1 << 12)? {
        center_matches(&spec, cfg, run)?;
    }
    Ok(())
}

// ------------------------------------------------------- exponent lemmas

fn exponent_lemmas(cfg: &SuiteConfig, rng: &mut ChaCha8Rng, run: &mut Run) -> Result<(), SuiteError> {
    for spec in special_specs(3, u64::MAX)?.into_iter().filter(|s| s.rank() == 2) {
        let alphas = spec.alphas().expect("finite");
        if alphas[0] > 2 {
            continue;
        }
        let g = make_group(&spec)?;
        let codes = Arc::new(NilCodes::new(&g)?);
        let n = codes.order();
        let top = 64 - n.leading_zeros(); // 2^top > |G|, so y^(2^top) = e
        let p2 = |i: u32| 1i64 << i;
        let mut pairs: Vec<(u64, u64)> = vec![(codes.generators()[0], codes.generators()[1]), (codes.generators()[1], codes.generators()[0])];
        pairs.extend((0..40).map(|_| (rng.random_range(0..n), rng.random_range(0..n))));
        let tag = fmt_orders(&spec);
        for (t, &(y, z)) in pairs.iter().enumerate() {
            let hyp = |i: u32| {
                let c = codes.comm(z, codes.pow(y, p2(i)));
                codes.comm(c, y) == 0 && codes.comm(c, z) == 0
            };
            let a = (0..=top).find(|&a| (a..=top).all(hyp)).expect("holds at the top");
            let sub = Relabeled { inner: codes.clone(), gens: vec![y, z] };
            let inputs = || format!("y={}; z={}; a={a}", codes.label(y), codes.label(z));
            let g3 = lower_central(&sub, 3, cfg.cap)?;
            let g2 = lower_central(&sub, 2, cfg.cap)?;
            let (e3, e2) = (exponent_of(&sub, &g3), exponent_of(&sub, &g2));
            run.eq(0, (1u64 << a) % e3, || (format!("lemma-k/{tag}/pair{t:02}"), inputs()));
            // At a = 0 the second clause fails ([z,y] central of order 4 is
            // possible), so it is checked from a = 1, where the theorem uses it.
            run.eq(0, (1u64 << (a.max(1) + 1)) % e2, || (format!("lemma-k-1/{tag}/pair{t:02}"), inputs()));
            // The theorem needs a > 0; N >= a + floor((k-1)/(p-1)) = a + 1.
            for nn in a.max(1) + 1..=a.max(1) + 3 {
                let m = p2(nn);
                let left = codes.comm(codes.pow(z, m), y);
                let mid = codes.pow(codes.comm(z, y), m);
                let right = codes.comm(z, codes.pow(y, m));
                run.holds(left == mid && mid == right, || (format!("final-theorem/{tag}/pair{t:02}/N{nn}"), inputs()));
            }
        }
    }
    Ok(())
}

// -------------------------------------------------------------- capability

fn capability_suite(cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    // Round trips on the small decided grid.
    let mut grid: Vec<GroupSpec> = Vec::new();
    for p in [3u64, 5] {
        for r in 1..=3 {
            grid.extend(prime_power_specs(2, &[p], 2, &[r], u64::MAX));
        }
    }
    for a in 1..=2 {
        for b in a..=3 {
            grid.push(GroupSpec::generic(2, &[1 << a, 1 << b])?);
        }
    }
    for spec in &grid {
        let verdict = capable_nilprod(spec)?;
        let tag = fmt_orders(spec);
        let (p, alphas) = (spec.prime().expect("single prime"), spec.alphas().expect("finite"));
        if verdict.decision == Decision::Capable {
            run.holds(necessary_condition(p, 2, &alphas), || (format!("necessity/{tag}"), verdict.reason.clone()));
            let check = verify_witness(spec, &verdict, cfg.cap)?;
            run.holds(check.verified, || (format!("round-trip/{tag}"), format!("{check:?}")));
        }
    }
    for orders in abelian_order_lists(16) {
        let verdict = baer_abelian(&orders);
        let tag = format!("abelian/{orders:?}");
        if let (Decision::Capable, Some(_)) = (verdict.decision, &verdict.witness) {
            let chain = GroupSpec::abelian(&invariant_factors(&orders))?;
            let check = verify_witness(&chain, &verdict, cfg.cap)?;
            run.holds(check.verified, || (format!("round-trip/{tag}"), format!("{check:?}")));
        }
    }

    // Stated examples.
    run.eq(Decision::NotCapable, baer_abelian(&[2, 4]).decision, || ("example/abelian(2,4)".into(), String::new()));
    run.eq(Decision::Capable, baer_abelian(&[2, 2]).decision, || ("example/abelian(2,2)".into(), String::new()));
    let ex = capable_nilprod(&GroupSpec::generic(2, &[3, 9])?)?;
    run.eq(Decision::NotCapable, ex.decision, || ("example/k2(3,9)".into(), String::new()));
    let ex = capable_nilprod(&GroupSpec::generic(3, &[3, 3])?)?;
    run.eq(Decision::Undecided, ex.decision, || ("example/k3(3,3)".into(), String::new()));

    // Necessity is never contradicted by a decided instance.
    for k in 1..=4usize {
        for p in [2u64, 3, 5, 7] {
            for spec in prime_power_specs(k, &[p], 3, &[1, 2, 3], u64::MAX) {
                let v = capable_nilprod(&spec)?;
                let alphas = spec.alphas().expect("finite");
                if v.decision == Decision::Capable {
                    run.holds(necessary_condition(p, k as u64, &alphas), || (format!("necessity/{}", fmt_orders(&spec)), v.reason.clone()));
                }
            }
        }
    }

    // Baer's criterion through invariant factors against the per-prime reduction.
    let values: Vec<u64> = (2..=64).collect();
    let mut lists: Vec<Vec<u64>> = Vec::new();
    for len in 1..=4 {
        multisets(&values, len, 0, &mut Vec::new(), &mut lists);
    }
    let bad: Vec<String> = lists
        .par_iter()
        .filter_map(|orders| {
            let a = baer_abelian(orders).decision == Decision::Capable;
            (baer_per_prime(orders) != Some(a)).then(|| format!("{orders:?}"))
        })
        .collect();
    run.cases += lists.len() as u64 - 1;
    run.eq(Vec::<String>::new(), bad, || ("baer-two-paths".into(), format!("{} lists", lists.len())));

    // Two-generator class-2 presentations.
    let p = 3;
    for alpha in 0..=2 {
        for beta in 0..=2 {
            for gamma in 0..=2 {
                for sigma in 0..=2 {
                    let Ok(pres) = Class2Presentation::new(p, alpha, beta, gamma, sigma) else { continue };
                    let v = capable_class2_2gen(&pres);
                    let tag = format!("class2/a{alpha}b{beta}g{gamma}s{sigma}");
                    let expected = if alpha == beta { Decision::Capable } else { Decision::NotCapable };
                    run.eq(expected, v.decision, || (tag.clone(), pres.to_string()));
                    if v.decision == Decision::Capable {
                        let check = verify_class2(&pres, &v, cfg.cap)?;
                        run.holds(check.verified, || (tag.clone() + "/witness", format!("{check:?}")));
                    }
                }
            }
        }
    }

    let ex = extraspecial_p5(3, cfg.cap)?;
    run.eq((243, 3, 3, true, true), (ex.order, ex.center_order, ex.derived_order, ex.abelianization_exponent_p, ex.necessary_condition), || {
        ("extraspecial/p3".into(), String::new())
    });
    let claims = capability::capable_nilprod(&GroupSpec::generic(2, &[3; 4])?)?;
    run.eq(Decision::Capable, claims.decision, || ("extraspecial/abelianization-capable".into(), String::new()));
    Ok(())
}

fn multisets(values: &[u64], len: usize, from: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for i in from..values.len() {
        cur.push(values[i]);
        multisets(values, len, i, cur, out);
        cur.pop();
    }
}

/// Nondecreasing order lists with product at most `max`.
fn abelian_order_lists(max: u64) -> Vec<Vec<u64>> {
    fn go(min: u64, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for m in min..=left {
            cur.push(m);
            go(m, left / m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2, max, &mut Vec::new(), &mut out);
    out
}

fn dihedral(cfg: &SuiteConfig, run: &mut Run) -> Result<(), SuiteError> {
    for k in 2..=3usize {
        let t = dihedral_tightness(k, cfg.cap)?;
        let tag = format!("dihedral/k{k}");
        run.eq(1u64 << (k + 2), t.parent_order, || (tag.clone() + "/parent", String::new()));
        run.eq(1u64 << (k + 1), t.quotient_order, || (tag.clone() + "/quotient", String::new()));
        run.holds(t.presentation_ok, || (tag.clone() + "/presentation", String::new()));
        run.eq(vec![1, k as u32], t.exponents.clone(), || (tag.clone() + "/exponents", String::new()));
        run.eq(Some(k), t.class, || (tag.clone() + "/class", String::new()));
        run.holds(t.meets_bound, || (tag.clone() + "/bound", format!("{t:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &SuiteConfig::default()), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn abelian_lists() {
        let l = abelian_order_lists(8);
        assert!(l.contains(&vec![2, 2, 2]) && l.contains(&vec![8]) && l.contains(&vec![2, 4]));
        assert!(!l.contains(&vec![3, 3]));
    }

    #[test]
    fn cheap_suites_pass() {
        for s in ["maxs", "dihedral-tightness", "struik-lemma2"] {
            let rep = run_suite(s, &SuiteConfig::default()).unwrap();
            assert!(rep.passed(), "{rep}");
            assert!(!rep.citations.is_empty());
        }
    }
}
