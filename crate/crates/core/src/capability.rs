//! Capability: `G` is capable when `G = H/Z(H)` for some `H`.
//!
//! Decisions follow the known theorems (Baer for abelian groups, the
//! `a_{r-1} = a_r` criterion for k-nilpotent products of cyclic p-groups with
//! `p > k`, the `a_r <= a_{r-1} + 1` criterion for 2-nilpotent products of
//! cyclic 2-groups, the `a = b` criterion for two-generator class-2 p-groups),
//! always after the general necessary condition. Every capable verdict on a
//! finite group comes with a witness `H` given as a nilpotent product followed
//! by successive central quotients.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, Syntax};
use crate::grouptools::{
    center_bruteforce, center_order_layered, closure, matches_presentation, nilpotency_class, FiniteGroup, GroupError,
    NilCodes, QuotientGroup, Relabeled, Subgroup, TableGroup,
};
use crate::nilprod::{self, make_group, prime_divisors, GroupSpec, NilGroup, NilprodError, Regime};
use crate::valuation::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapabilityError {
    #[error("capability of nilpotent products needs a single prime; {0} mixes primes or has infinite factors (decompose it first)")]
    MixedPrimes(String),
    #[error("invalid presentation parameters: {0}")]
    Presentation(String),
    #[error("verdict has no finite witness to verify")]
    NoWitness,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Nilprod(#[from] NilprodError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Capable,
    NotCapable,
    Undecided,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A nilpotent product followed by central quotients; each kernel is a list
/// of element expressions in the base product's basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub base: GroupSpec,
    pub kernels: Vec<Vec<String>>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapabilityVerdict {
    pub decision: Decision,
    pub reason: String,
    pub citation: String,
    pub witness: Option<Witness>,
}

const CITE_NECESSITY: &str =
    "necessary condition for capable products of cyclic p-groups: r > 1 and a_r <= a_(r-1) + floor((k-1)/(p-1))";
const CITE_CENTER_BY_CYCLIC: &str = "a center-by-cyclic group is abelian";
const CITE_BAER: &str = "Baer's theorem: a finitely generated abelian group is capable iff r > 1 and its two largest invariant factors agree";
const CITE_MAIN: &str = "k-nilpotent products of cyclic p-groups, p > k: capable iff r > 1 and a_(r-1) = a_r";
const CITE_P2: &str = "2-nilpotent products of cyclic 2-groups: capable iff r > 1 and a_r <= a_(r-1) + 1 (Struik's class-3 2-group normal form supplies the witness)";
const CITE_OPEN: &str =
    "open problem: capability of k-nilpotent products of cyclic p-groups with p <= k (e.g. the p-nilpotent product) is not settled";
const CITE_CLASS2: &str = "two-generator p-groups of class 2, p odd: capable iff a = b (the Bacon-Kappe classification)";

/// `r > 1` and `a_r <= a_{r-1} + floor((k-1)/(p-1))`. False means not capable.
pub fn necessary_condition(p: u64, k: u64, alphas: &[u32]) -> bool {
    let r = alphas.len();
    if r < 2 || p < 2 {
        return false;
    }
    let slack = (k.saturating_sub(1) / (p - 1)) as u64;
    alphas[r - 1] as u64 <= alphas[r - 2] as u64 + slack
}

/// Invariant factors `d_1 | d_2 | ... ` of a finite abelian group, without 1s.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut primes: Vec<u64> = orders.iter().filter(|&&m| m > 1).flat_map(|&m| prime_divisors(m)).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut factors: Vec<u64> = Vec::new();
    for p in primes {
        let mut powers: Vec<u64> = orders
            .iter()
            .filter(|&&m| m > 1)
            .map(|&m| {
                let mut q = 1;
                let mut v = m;
                while v % p == 0 {
                    v /= p;
                    q *= p;
                }
                q
            })
            .filter(|&q| q > 1)
            .collect();
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in powers.into_iter().enumerate() {
            if i < factors.len() {
                factors[i] *= q;
            } else {
                factors.push(q);
            }
        }
    }
    factors.reverse();
    factors
}

/// Invariant-factor path: torsion factors ascending, then infinite factors.
fn baer_by_invariant_factors(orders: &[u64]) -> (bool, Vec<u64>) {
    let mut chain = invariant_factors(orders);
    chain.extend(orders.iter().filter(|&&m| m == 0));
    let r = chain.len();
    (r == 0 || (r > 1 && chain[r - 1] == chain[r - 2]), chain)
}

/// Per-prime path for finite groups: capable iff every primary component is.
pub fn baer_per_prime(orders: &[u64]) -> Option<bool> {
    if orders.contains(&0) {
        return None;
    }
    let mut primes: Vec<u64> = orders.iter().flat_map(|&m| prime_divisors(m)).collect();
    primes.sort_unstable();
    primes.dedup();
    Some(primes.into_iter().all(|p| {
        let mut exps: Vec<u32> = orders
            .iter()
            .map(|&m| {
                let mut a = 0;
                let mut v = m;
                while v % p == 0 {
                    v /= p;
                    a += 1;
                }
                a
            })
            .filter(|&a| a > 0)
            .collect();
        exps.sort_unstable();
        let r = exps.len();
        r > 1 && exps[r - 1] == exps[r - 2]
    }))
}

/// Baer's theorem on the invariant-factor chain; the trivial group counts as
/// capable. Finite inputs are cross-checked against the per-prime reduction.
pub fn baer_abelian(orders: &[u64]) -> CapabilityVerdict {
    let (capable, chain) = baer_by_invariant_factors(orders);
    if let Some(per_prime) = baer_per_prime(orders) {
        assert_eq!(capable, per_prime, "invariant-factor and per-prime decisions disagree on {orders:?}");
    }
    let chain_text: Vec<String> = chain.iter().map(|m| if *m == 0 { "inf".into() } else { m.to_string() }).collect();
    let chain_text = chain_text.join(" | ");
    if chain.is_empty() {
        return CapabilityVerdict {
            decision: Decision::Capable,
            reason: "trivial group (the center quotient of any abelian group)".into(),
            citation: CITE_BAER.into(),
            witness: None,
        };
    }
    if !capable {
        let reason = if chain.len() == 1 {
            format!("cyclic group ({chain_text}): {CITE_CENTER_BY_CYCLIC}")
        } else {
            format!("invariant factors {chain_text}: the two largest differ")
        };
        return CapabilityVerdict { decision: Decision::NotCapable, reason, citation: CITE_BAER.into(), witness: None };
    }
    let witness = (!chain.contains(&0)).then(|| {
        let base = GroupSpec::generic(2, &chain).expect("class 2 admits any orders");
        Witness {
            description: format!("2-nilpotent product of cyclic groups of orders {}", chain_text.replace(" | ", ",")),
            base,
            kernels: Vec::new(),
        }
    });
    CapabilityVerdict {
        decision: Decision::Capable,
        reason: format!("invariant factors {chain_text}: r > 1 and the two largest agree"),
        citation: CITE_BAER.into(),
        witness,
    }
}

/// Decide capability of a k-nilpotent product of cyclic p-groups.
pub fn capable_nilprod(spec: &GroupSpec) -> Result<CapabilityVerdict, CapabilityError> {
    let (p, alphas) = match (spec.prime(), spec.alphas()) {
        (Some(p), Some(a)) => (p, a),
        _ => return Err(CapabilityError::MixedPrimes(spec.to_string())),
    };
    capable_params(p, spec.class_k(), &alphas)
}

/// The decision from the parameters alone: `x_i` of order `p^{a_i}` in the
/// k-nilpotent product. Needs no normal form, so any class is accepted.
pub fn capable_params(p: u64, k: usize, alphas: &[u32]) -> Result<CapabilityVerdict, CapabilityError> {
    if !is_prime(p) {
        return Err(CapabilityError::Presentation(format!("{p} is not a prime")));
    }
    if k == 0 || alphas.is_empty() || alphas.contains(&0) {
        return Err(CapabilityError::Presentation("need k >= 1 and at least one exponent, all >= 1".into()));
    }
    let mut alphas = alphas.to_vec();
    alphas.sort_unstable();
    let orders: Vec<u64> = alphas
        .iter()
        .map(|&a| p.checked_pow(a).ok_or_else(|| CapabilityError::Presentation(format!("{p}^{a} overflows"))))
        .collect::<Result<_, _>>()?;
    let r = alphas.len();
    let alpha_text = alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
    if k == 1 {
        return Ok(baer_abelian(&orders));
    }
    if !necessary_condition(p, k as u64, &alphas) {
        let citation = if r == 1 { CITE_CENTER_BY_CYCLIC } else { CITE_NECESSITY };
        return Ok(CapabilityVerdict {
            decision: Decision::NotCapable,
            reason: format!("p={p}, k={k}, a=({alpha_text}) violates the necessary condition"),
            citation: citation.into(),
            witness: None,
        });
    }
    if p > k as u64 {
        let capable = r > 1 && alphas[r - 1] == alphas[r - 2];
        // No witness object past the largest supported class.
        let witness = GroupSpec::generic(k + 1, &orders).ok().filter(|_| capable).map(|base| Witness {
            base,
            kernels: Vec::new(),
            description: format!("{}-nilpotent product of the same cyclic factors", k + 1),
        });
        let decision = if capable { Decision::Capable } else { Decision::NotCapable };
        return Ok(CapabilityVerdict {
            decision,
            reason: format!("p={p} > k={k}, a=({alpha_text})"),
            citation: CITE_MAIN.into(),
            witness,
        });
    }
    if p == 2 && k == 2 {
        let capable = r > 1 && alphas[r - 1] <= alphas[r - 2] + 1;
        let witness = capable.then(|| Witness {
            base: GroupSpec::special(&orders).expect("2-power orders"),
            kernels: Vec::new(),
            description: "3-nilpotent product of the same cyclic 2-groups".into(),
        });
        let decision = if capable { Decision::Capable } else { Decision::NotCapable };
        return Ok(CapabilityVerdict { decision, reason: format!("p=2, k=2, a=({alpha_text})"), citation: CITE_P2.into(), witness });
    }
    Ok(CapabilityVerdict {
        decision: Decision::Undecided,
        reason: format!("p={p}, k={k}, a=({alpha_text}): no theorem covers p <= k here"),
        citation: CITE_OPEN.into(),
        witness: None,
    })
}

/// Defining relations of a nilpotent product, in its sorted generators:
/// generator orders, all left-normed commutators of weight k+1 in the
/// generators, and the modulus relations of the basis.
pub fn defining_relations(spec: &GroupSpec) -> Result<Vec<String>, CapabilityError> {
    let g = make_group(spec)?;
    let r = spec.rank();
    let k = spec.class_k();
    let mut rels: Vec<String> =
        spec.orders().iter().enumerate().filter(|(_, &m)| m > 0).map(|(i, m)| format!("x{}^{m}", i + 1)).collect();
    for n in 0..r.pow(k as u32 + 1) {
        let parts: Vec<String> = (0..=k).map(|d| format!("x{}", n / r.pow(d as u32) % r + 1)).collect();
        rels.push(format!("[{}]", parts.join(",")));
    }
    for (i, label) in g.labels().iter().enumerate() {
        let m = &g.moduli()[i];
        if g.weight(i) >= 2 && m.is_positive() {
            rels.push(format!("{label}^{m}"));
        }
    }
    Ok(rels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub verified: bool,
    pub method: &'static str,
    pub witness_order: String,
    pub center_order: String,
    pub quotient_order: String,
    pub expected_order: String,
}

/// A finite group with a chosen generator list.
/// Build `base / K_1 / K_2 / ...` with each kernel central in its step.
pub fn build_witness(w: &Witness, cap: u64) -> Result<Arc<dyn FiniteGroup>, CapabilityError> {
    let base = make_group(&w.base)?;
    let codes = NilCodes::new(&base)?;
    let mut group: Arc<dyn FiniteGroup> = Arc::new(codes.clone());
    let mut project: Vec<Arc<QuotientGroup>> = Vec::new();
    for kernel in &w.kernels {
        let mut gens = Vec::new();
        for src in kernel {
            let mut c = codes.encode(&parse_relator(&base, src)?);
            for q in &project {
                c = q.project(c);
            }
            gens.push(c);
        }
        let q = Arc::new(QuotientGroup::by_generators(group.clone(), &gens, cap)?);
        project.push(q.clone());
        group = q;
    }
    Ok(group)
}

fn parse_relator(g: &Arc<NilGroup>, src: &str) -> Result<nilprod::Element, CapabilityError> {
    let factors = expr::parse(src, Syntax::RELATOR).map_err(GroupError::from)?;
    Ok(expr::evaluate(g, &factors)?)
}

/// Check `H/Z(H)` against relations and an expected order. Small witnesses
/// are enumerated; a plain generic product above the cap is checked through
/// the layered center count, with the relations verified by centrality.
pub fn verify_presented(w: &Witness, relations: &[String], expected: &BigUint, cap: u64) -> Result<WitnessCheck, CapabilityError> {
    let base = make_group(&w.base)?;
    let base_order = base.order().ok_or_else(|| GroupError::Infinite(w.base.to_string()))?;
    if base_order > BigUint::from(cap) && w.kernels.is_empty() && w.base.regime() != Regime::Special23 {
        let z = center_order_layered(&base, cap)?;
        let gens: Vec<_> = (1..=base.rank()).map(|i| nilprod::generator(&base, i)).collect::<Result<_, _>>()?;
        let mut ok = true;
        for rel in relations {
            let e = parse_relator(&base, rel)?;
            if !gens.iter().all(|x| e.comm(x).expect("same group").is_identity()) {
                ok = false;
            }
        }
        let quotient = &base_order / &z;
        return Ok(WitnessCheck {
            verified: ok && &quotient == expected,
            method: "layered",
            witness_order: base_order.to_string(),
            center_order: z.to_string(),
            quotient_order: quotient.to_string(),
            expected_order: expected.to_string(),
        });
    }
    let h = build_witness(w, cap)?;
    let z = center_bruteforce(h.as_ref(), cap)?;
    let z_len = z.len() as u64;
    let q = QuotientGroup::new(h.clone(), z, cap)?;
    let verified = match expected.to_u64() {
        Some(e) => matches_presentation(&q, relations, e)?,
        None => false,
    };
    Ok(WitnessCheck {
        verified,
        method: "bruteforce",
        witness_order: h.order().to_string(),
        center_order: z_len.to_string(),
        quotient_order: q.order().to_string(),
        expected_order: expected.to_string(),
    })
}

/// Verify a capable verdict's witness for the product `g_spec`.
pub fn verify_witness(g_spec: &GroupSpec, verdict: &CapabilityVerdict, cap: u64) -> Result<WitnessCheck, CapabilityError> {
    let w = match (&verdict.decision, &verdict.witness) {
        (Decision::Capable, Some(w)) => w,
        _ => return Err(CapabilityError::NoWitness),
    };
    let g = make_group(g_spec)?;
    let expected = g.order().ok_or_else(|| GroupError::Infinite(g_spec.to_string()))?;
    verify_presented(w, &defining_relations(g_spec)?, &expected, cap)
}

/// `<a, b | a^{p^a}, b^{p^b}, [b,a]^{p^g}, [a,b,a], [a,b,b], a^{p^{a+s-g}} [b,a]^{p^s}>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Class2Presentation {
    pub p: u64,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub sigma: u32,
}

impl Class2Presentation {
    pub fn new(p: u64, alpha: u32, beta: u32, gamma: u32, sigma: u32) -> Result<Class2Presentation, CapabilityError> {
        let bad = |m: String| Err(CapabilityError::Presentation(m));
        if p == 2 || !is_prime(p) {
            return bad(format!("p = {p} must be an odd prime"));
        }
        if alpha + sigma < 2 * gamma {
            return bad(format!("alpha + sigma >= 2 gamma violated ({alpha} + {sigma} < 2*{gamma})"));
        }
        if !(beta >= gamma && gamma >= 1) {
            return bad(format!("beta >= gamma >= 1 violated (beta={beta}, gamma={gamma})"));
        }
        if alpha < gamma {
            return bad(format!("alpha >= gamma violated (alpha={alpha}, gamma={gamma})"));
        }
        if sigma > gamma {
            return bad(format!("sigma <= gamma violated (sigma={sigma}, gamma={gamma})"));
        }
        if sigma == gamma && alpha < beta {
            return bad(format!("sigma = gamma requires alpha >= beta (alpha={alpha}, beta={beta})"));
        }
        Ok(Class2Presentation { p, alpha, beta, gamma, sigma })
    }

    fn pp(&self, e: u32) -> u64 {
        self.p.pow(e)
    }

    /// Relations in `x1 = a`, `x2 = b`.
    pub fn relations(&self) -> Vec<String> {
        vec![
            format!("x1^{}", self.pp(self.alpha)),
            format!("x2^{}", self.pp(self.beta)),
            format!("[x2,x1]^{}", self.pp(self.gamma)),
            "[x1,x2,x1]".into(),
            "[x1,x2,x2]".into(),
            format!("x1^{} [x2,x1]^{}", self.pp(self.alpha + self.sigma - self.gamma), self.pp(self.sigma)),
        ]
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.alpha + self.beta + self.sigma)
    }
}

impl fmt::Display for Class2Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} alpha={} beta={} gamma={} sigma={}", self.p, self.alpha, self.beta, self.gamma, self.sigma)
    }
}

/// The presented group, realised as `(K / <[b,a]^{p^g}>) / <a^{p^{a+s-g}} [b,a]^{p^s}>`
/// with `K` the 2-nilpotent product of `C_{p^a}` and `C_{p^b}`.
pub struct PresentedGroup {
    pub group: Arc<dyn FiniteGroup>,
    pub relations: Vec<String>,
    pub order: BigUint,
}

pub fn presentation_group(pres: &Class2Presentation, cap: u64) -> Result<PresentedGroup, CapabilityError> {
    let spec = GroupSpec::generic(2, &[pres.pp(pres.alpha), pres.pp(pres.beta)])?;
    let k = make_group(&spec)?;
    let codes = NilCodes::new(&k)?;
    // sorted position of a (input 0) and b (input 1)
    let pos = |input: usize| spec.permutation().iter().position(|&i| i == input).expect("permutation") + 1;
    let a = nilprod::generator(&k, pos(0))?;
    let b = nilprod::generator(&k, pos(1))?;
    let ba = b.comm(&a)?;
    let first = codes.encode(&ba.pow_i(pres.pp(pres.gamma) as i64));
    let second = codes.encode(
        &a.pow_i(pres.pp(pres.alpha + pres.sigma - pres.gamma) as i64).mul(&ba.pow_i(pres.pp(pres.sigma) as i64))?,
    );
    let kk: Arc<dyn FiniteGroup> = Arc::new(codes.clone());
    let q1 = Arc::new(QuotientGroup::by_generators(kk, &[first], cap)?);
    let q2 = Arc::new(QuotientGroup::by_generators(q1.clone(), &[q1.project(second)], cap)?);
    let gens = vec![q2.project(q1.project(codes.encode(&a))), q2.project(q1.project(codes.encode(&b)))];
    Ok(PresentedGroup { group: Arc::new(Relabeled { inner: q2, gens }), relations: pres.relations(), order: pres.order() })
}

/// Capable iff `a = b`; the witness is a quotient of the 3-nilpotent product
/// of two copies of `C_{p^a}`.
pub fn capable_class2_2gen(pres: &Class2Presentation) -> CapabilityVerdict {
    let Class2Presentation { p, alpha, beta, gamma, sigma } = *pres;
    if alpha != beta {
        return CapabilityVerdict {
            decision: Decision::NotCapable,
            reason: format!("{pres}: alpha != beta, so the abelianization's two largest factors differ"),
            citation: CITE_CLASS2.into(),
            witness: None,
        };
    }
    let pp = |e: u32| p.pow(e);
    let base = GroupSpec::generic(3, &[pp(alpha), pp(alpha)]).expect("p odd, class 3");
    let mut kernels = vec![vec![format!("[x2,x1,x1]^{}", pp(gamma)), format!("[x2,x1,x2]^{}", pp(gamma))]];
    let description = if sigma < gamma {
        kernels.push(vec![format!("[x2,x1,x1]^{}", pp(sigma))]);
        kernels.push(vec![format!("[x2,x1]^{} [x2,x1,x2]^-{}", pp(alpha + sigma - gamma), pp(sigma))]);
        "3-nilpotent product of two copies of C_{p^alpha} modulo three successive central subgroups".to_string()
    } else {
        "3-nilpotent product of two copies of C_{p^alpha} modulo the p^gamma powers of its weight-3 commutators".to_string()
    };
    CapabilityVerdict {
        decision: Decision::Capable,
        reason: format!("{pres}: alpha = beta"),
        citation: CITE_CLASS2.into(),
        witness: Some(Witness { base, kernels, description }),
    }
}

/// Verify a class-2 verdict's witness against the presentation.
pub fn verify_class2(pres: &Class2Presentation, verdict: &CapabilityVerdict, cap: u64) -> Result<WitnessCheck, CapabilityError> {
    let w = verdict.witness.as_ref().ok_or(CapabilityError::NoWitness)?;
    verify_presented(w, &pres.relations(), &pres.order(), cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TightnessCheck {
    pub k: usize,
    pub parent_order: u64,
    pub center_order: u64,
    pub quotient_order: u64,
    pub presentation_ok: bool,
    /// Exponents of the generator orders, sorted.
    pub exponents: Vec<u32>,
    pub class: Option<usize>,
    pub meets_bound: bool,
}

/// `D_{2^{k+1}}` as `D_{2^{k+2}} / Z`, from the standard presentation: its
/// generator orders `2^1, 2^k` meet `a_r = a_{r-1} + (k-1)` for class k, p=2.
pub fn dihedral_tightness(k: usize, cap: u64) -> Result<TightnessCheck, CapabilityError> {
    let n = 1u64 << (k + 1);
    let rels = vec![format!("x1^{n}"), "x2^2".to_string(), "(x2x1)^2".to_string()];
    let d: Arc<dyn FiniteGroup> = Arc::new(TableGroup::from_presentation(2, &rels, 1 << 20)?);
    let z = center_bruteforce(d.as_ref(), cap)?;
    let center_order = z.len() as u64;
    let q = QuotientGroup::new(d.clone(), z, cap)?;
    let small = vec![format!("x1^{}", n / 2), "x2^2".to_string(), "(x2x1)^2".to_string()];
    let presentation_ok = matches_presentation(&q, &small, n)?;
    let mut exponents: Vec<u32> = q.generators().iter().map(|&x| q.element_order(x).trailing_zeros()).collect();
    exponents.sort_unstable();
    let class = nilpotency_class(&q, k + 2, cap)?;
    let meets_bound = exponents[1] == exponents[0] + (k as u32 - 1) && necessary_condition(2, k as u64, &exponents);
    Ok(TightnessCheck {
        k,
        parent_order: d.order(),
        center_order,
        quotient_order: q.order(),
        presentation_ok,
        exponents,
        class,
        meets_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtraspecialCheck {
    pub p: u64,
    pub order: u64,
    pub center_order: u64,
    pub derived_order: u64,
    pub abelianization_exponent_p: bool,
    pub necessary_condition: bool,
}

/// The extraspecial group of order `p^5` on four generators of order p,
/// as a quotient of the 2-nilpotent product of four copies of `C_p`. It meets
/// the necessary condition but is not capable (Beyl–Felgner–Schmid), so no
/// decision procedure here claims it.
pub fn extraspecial_p5(p: u64, cap: u64) -> Result<ExtraspecialCheck, CapabilityError> {
    let spec = GroupSpec::generic(2, &[p; 4])?;
    let g = make_group(&spec)?;
    let codes = NilCodes::new(&g)?;
    let rels = ["[x3,x1] [x3,x2]^-1", "[x3,x1] [x4,x1]^-1", "[x4,x2]", "[x4,x3]", "[x2,x1]"];
    let gens: Vec<u64> = rels.iter().map(|r| parse_relator(&g, r).map(|e| codes.encode(&e))).collect::<Result<_, _>>()?;
    let q = QuotientGroup::by_generators(Arc::new(codes), &gens, cap)?;
    let z = center_bruteforce(&q, cap)?;
    let qgens = q.generators();
    let comms: Vec<u64> = qgens.iter().flat_map(|&a| qgens.iter().map(move |&b| (a, b))).map(|(a, b)| q.comm(a, b)).collect();
    let derived: Subgroup = closure(&q, &comms, cap)?;
    let abelianization_exponent_p = qgens.iter().all(|&x| derived.contains(q.pow(x, p as i64)));
    Ok(ExtraspecialCheck {
        p,
        order: q.order(),
        center_order: z.len() as u64,
        derived_order: derived.len() as u64,
        abelianization_exponent_p,
        necessary_condition: necessary_condition(p, 2, &[1, 1, 1, 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouptools::DEFAULT_CAP;

    #[test]
    fn necessary_condition_examples() {
        assert!(!necessary_condition(3, 2, &[1, 2]));
        assert!(necessary_condition(2, 3, &[1, 1, 2]));
        assert!(!necessary_condition(5, 4, &[3]));
    }

    #[test]
    fn invariant_factor_chain() {
        assert_eq!(invariant_factors(&[2, 4]), [2, 4]);
        assert_eq!(invariant_factors(&[6, 4]), [2, 12]);
        assert_eq!(invariant_factors(&[2, 3]), [6]);
        assert!(invariant_factors(&[]).is_empty());
    }

    #[test]
    fn baer_examples() {
        let v = baer_abelian(&[2, 2]);
        assert_eq!(v.decision, Decision::Capable);
        assert_eq!(v.witness.as_ref().unwrap().base, GroupSpec::generic(2, &[2, 2]).unwrap());
        assert_eq!(baer_abelian(&[2, 4]).decision, Decision::NotCapable);
        assert_eq!(baer_abelian(&[0, 0]).decision, Decision::Capable);
        assert!(baer_abelian(&[0, 0]).witness.is_none());
        assert_eq!(baer_abelian(&[0, 3]).decision, Decision::NotCapable);
        assert_eq!(baer_abelian(&[2, 3]).decision, Decision::NotCapable);
        assert_eq!(baer_abelian(&[6, 6]).decision, Decision::Capable);
        assert_eq!(baer_abelian(&[]).decision, Decision::Capable);
    }

    #[test]
    fn nilprod_examples() {
        let v = capable_nilprod(&GroupSpec::generic(2, &[3, 3]).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Capable);
        assert_eq!(v.witness.as_ref().unwrap().base, GroupSpec::generic(3, &[3, 3]).unwrap());
        let v = capable_nilprod(&GroupSpec::generic(2, &[2, 4]).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Capable);
        assert_eq!(v.witness.as_ref().unwrap().base, GroupSpec::special(&[2, 4]).unwrap());
        let v = capable_nilprod(&GroupSpec::generic(3, &[3, 3]).unwrap()).unwrap();
        assert_eq!(v.decision, Decision::Undecided);
        assert_eq!(capable_nilprod(&GroupSpec::generic(2, &[3, 9]).unwrap()).unwrap().decision, Decision::NotCapable);
        assert_eq!(capable_nilprod(&GroupSpec::generic(2, &[2, 8]).unwrap()).unwrap().decision, Decision::NotCapable);
        assert!(capable_nilprod(&GroupSpec::generic(2, &[2, 3]).unwrap()).is_err());
    }

    #[test]
    fn witness_round_trips() {
        let g = GroupSpec::generic(2, &[3, 3]).unwrap();
        let check = verify_witness(&g, &capable_nilprod(&g).unwrap(), DEFAULT_CAP).unwrap();
        assert!(check.verified, "{check:?}");
        assert_eq!((check.witness_order.as_str(), check.center_order.as_str()), ("243", "9"));

        let g = GroupSpec::generic(2, &[2, 2]).unwrap();
        let check = verify_witness(&g, &capable_nilprod(&g).unwrap(), DEFAULT_CAP).unwrap();
        assert!(check.verified, "{check:?}");

        let g = GroupSpec::generic(2, &[3, 9]).unwrap();
        let forged = CapabilityVerdict {
            decision: Decision::Capable,
            reason: "forged".into(),
            citation: String::new(),
            witness: Some(Witness { base: GroupSpec::generic(3, &[3, 9]).unwrap(), kernels: vec![], description: String::new() }),
        };
        let check = verify_witness(&g, &forged, DEFAULT_CAP).unwrap();
        assert!(!check.verified);
        assert_eq!(check.quotient_order, "27");
    }

    #[test]
    fn layered_verification_agrees() {
        let g = GroupSpec::generic(2, &[3, 3]).unwrap();
        let v = capable_nilprod(&g).unwrap();
        let check = verify_witness(&g, &v, 100).unwrap();
        assert_eq!(check.method, "layered");
        assert!(check.verified);
    }

    #[test]
    fn class2_presentations() {
        let pres = Class2Presentation::new(3, 1, 1, 1, 1).unwrap();
        let g = presentation_group(&pres, DEFAULT_CAP).unwrap();
        assert_eq!(g.group.order(), 27);
        assert!(matches_presentation(g.group.as_ref(), &g.relations, 27).unwrap());
        let pres = Class2Presentation::new(3, 2, 2, 1, 0).unwrap();
        let g = presentation_group(&pres, DEFAULT_CAP).unwrap();
        assert_eq!(g.group.order(), 81);
        assert!(matches_presentation(g.group.as_ref(), &g.relations, 81).unwrap());
        assert!(Class2Presentation::new(3, 1, 1, 1, 0).is_err());

        let pres = Class2Presentation::new(3, 2, 2, 1, 0).unwrap();
        let v = capable_class2_2gen(&pres);
        assert_eq!(v.decision, Decision::Capable);
        assert!(verify_class2(&pres, &v, DEFAULT_CAP).unwrap().verified);
        assert_eq!(capable_class2_2gen(&Class2Presentation::new(3, 2, 1, 1, 1).unwrap()).decision, Decision::NotCapable);
        let pres = Class2Presentation::new(3, 1, 1, 1, 1).unwrap();
        assert!(verify_class2(&pres, &capable_class2_2gen(&pres), DEFAULT_CAP).unwrap().verified);
    }

    #[test]
    fn dihedral_is_tight() {
        for k in [2, 3] {
            let t = dihedral_tightness(k, DEFAULT_CAP).unwrap();
            assert_eq!(t.quotient_order, 1 << (k + 1));
            assert!(t.presentation_ok);
            assert_eq!(t.exponents, vec![1, k as u32]);
            assert_eq!(t.class, Some(k));
            assert!(t.meets_bound);
        }
    }

    #[test]
    fn extraspecial_order_243() {
        let e = extraspecial_p5(3, DEFAULT_CAP).unwrap();
        assert_eq!((e.order, e.center_order, e.derived_order), (243, 3, 3));
        assert!(e.abelianization_exponent_p);
        assert!(e.necessary_condition);
    }
}
