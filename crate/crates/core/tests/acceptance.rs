//! Acceptance criteria 1-8, one PASS/FAIL line each. Runs without the test
//! harness so that the lines are always printed.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilcap::capability::{
    baer_abelian, capable_class2_2gen, capable_nilprod, dihedral_tightness, invariant_factors, verify_class2,
    verify_witness, Class2Presentation, Decision,
};
use nilcap::grouptools::{
    center_bruteforce, center_formula, closure, closure_of_elements, matches_presentation, FiniteGroup, NilCodes,
    DEFAULT_CAP,
};
use nilcap::nilprod::{self, make_group, GroupSpec, NilGroup, Regime};
use nilcap::suites::{run_suite, SuiteConfig};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn codes(spec: &GroupSpec) -> (Arc<NilGroup>, NilCodes) {
    let g = make_group(spec).expect("valid spec");
    let c = NilCodes::new(&g).expect("finite");
    (g, c)
}

fn dihedral_8() -> Check {
    let (g, c) = codes(&GroupSpec::generic(2, &[2, 2]).unwrap());
    ensure(c.order() == 8, || format!("order {}", c.order()))?;
    let (x1, x2) = (c.generators()[0], c.generators()[1]);
    ensure(c.mul(x1, x2) != c.mul(x2, x1), || "abelian".into())?;
    let z = center_bruteforce(&c, DEFAULT_CAP).unwrap();
    ensure(z.len() == 2, || format!("center of order {}", z.len()))?;
    ensure((0..8).any(|a| c.element_order(a) == 4), || "no element of order 4".into())?;
    let rels = ["x1^2", "x2^2", "(x1 x2)^4"].map(String::from);
    ensure(matches_presentation(&c, &rels, 8).unwrap(), || "D8 presentation fails".into())?;
    Ok(format!("{} has order 8, |Z| = 2, satisfies <a,b | a^2, b^2, (ab)^4>", g.spec()))
}

fn axioms() -> Check {
    let specs = [
        GroupSpec::generic(2, &[2, 2]),
        GroupSpec::generic(2, &[3, 3]),
        GroupSpec::generic(2, &[3, 9]),
        GroupSpec::generic(3, &[3, 3]),
        GroupSpec::generic(3, &[5, 5]),
        GroupSpec::special(&[2, 2]),
        GroupSpec::special(&[2, 4]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut triples = 0u64;
    for spec in specs {
        let spec = spec.unwrap();
        let (g, c) = codes(&spec);
        let n = c.order();
        let mut seen = std::collections::HashSet::new();
        for code in 0..n {
            let a = c.decode(code);
            ensure(c.encode(&a) == code, || format!("{spec}: code {code} does not round-trip"))?;
            ensure(nilprod::parse(&g, &nilprod::format(&a)).unwrap() == a, || format!("{spec}: parse/format {code}"))?;
            seen.insert(a.exponents().to_vec());
        }
        ensure(seen.len() as u64 == n, || format!("{spec}: {} normal forms for order {n}", seen.len()))?;
        ensure(closure(&c, &c.generators(), DEFAULT_CAP).unwrap().len() as u64 == n, || format!("{spec}: not generated"))?;
        let assoc = |a: u64, b: u64, d: u64| c.mul(c.mul(a, b), d) == c.mul(a, c.mul(b, d));
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        ensure(assoc(a, b, d), || format!("{spec}: ({a},{b},{d}) not associative"))?;
                    }
                }
            }
            triples += n * n * n;
        } else {
            for _ in 0..100_000 {
                let (a, b, d) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                ensure(assoc(a, b, d), || format!("{spec}: ({a},{b},{d}) not associative"))?;
            }
            triples += 100_000;
        }
    }
    Ok(format!("7 specs: normal forms biject with elements; {triples} associativity triples"))
}

fn formulas() -> Check {
    let mut pairs = 0u64;
    let mut check = |spec: GroupSpec, sample: Option<usize>, rng: &mut ChaCha8Rng| -> Result<(), String> {
        let (_, c) = codes(&spec);
        let n = c.order();
        let list: Vec<(u64, u64)> = match sample {
            None => (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect(),
            Some(m) => (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect(),
        };
        for (a, b) in list {
            let (x, y) = (c.decode(a), c.decode(b));
            let formula = match spec.regime() {
                Regime::Special23 => x.mul_special_2_3(&y).ok(),
                _ => x.mul_closed(&y),
            };
            ensure(formula == Some(x.mul_by_collection(&y).unwrap()), || format!("{spec}: {a} * {b}"))?;
            pairs += 1;
        }
        Ok(())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (k, orders) in [(2, vec![3, 3]), (2, vec![3, 9]), (2, vec![9, 9]), (2, vec![3, 3, 3]), (3, vec![3, 3]), (3, vec![3, 9])] {
        check(GroupSpec::generic(k, &orders).unwrap(), None, &mut rng)?;
    }
    check(GroupSpec::generic(3, &[9, 9]).unwrap(), Some(10_000), &mut rng)?;
    for orders in [[2u64, 2], [2, 4], [4, 4]] {
        check(GroupSpec::special(&orders).unwrap(), None, &mut rng)?;
    }
    Ok(format!("{pairs} products agree between closed formulas and collection"))
}

fn centers() -> Check {
    let mut specs = Vec::new();
    for k in [2usize, 3] {
        for p in [3u64, 5] {
            for alphas in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 2], vec![2, 2, 2]] {
                let orders: Vec<u64> = alphas.iter().map(|&a| p.pow(a)).collect();
                let spec = GroupSpec::generic(k, &orders).unwrap();
                if make_group(&spec).unwrap().order_u64().is_some_and(|n| n <= 6561) {
                    specs.push(spec);
                }
            }
        }
    }
    for orders in [[2u64, 2], [2, 4], [4, 4]] {
        specs.push(GroupSpec::special(&orders).unwrap());
    }
    ensure(specs.contains(&GroupSpec::generic(3, &[3, 9]).unwrap()), || "(3,(3,9)) missing".into())?;
    for spec in &specs {
        let (g, c) = codes(spec);
        let formula = closure_of_elements(&c, &center_formula(&g).unwrap(), DEFAULT_CAP).unwrap();
        let brute = center_bruteforce(&c, DEFAULT_CAP).unwrap();
        ensure(formula == brute, || format!("{spec}: formula {} vs brute force {}", formula.len(), brute.len()))?;
    }
    let (g, _) = codes(&GroupSpec::generic(3, &[3, 9]).unwrap());
    let labels: Vec<String> = center_formula(&g).unwrap().iter().map(nilprod::format).collect();
    ensure(labels == ["x2^3", "[x2,x1,x1]", "[x2,x1,x2]"], || format!("(3,(3,9)) formula {labels:?}"))?;
    Ok(format!("{} specs: center formula equals the brute-force center", specs.len()))
}

fn capability_round_trips() -> Check {
    let mut verified = 0;
    let mut grid = Vec::new();
    for p in [3u64, 5] {
        for alphas in [vec![1], vec![2], vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 2], vec![2, 2, 2]] {
            grid.push(alphas.iter().map(|&a| p.pow(a)).collect::<Vec<u64>>());
        }
    }
    for a in 1..=2u32 {
        for b in a..=3u32 {
            grid.push(vec![1 << a, 1 << b]);
        }
    }
    for orders in grid {
        let spec = GroupSpec::generic(2, &orders).unwrap();
        let v = capable_nilprod(&spec).unwrap();
        if v.decision == Decision::Capable {
            let check = verify_witness(&spec, &v, DEFAULT_CAP).map_err(|e| format!("{spec}: {e}"))?;
            ensure(check.verified, || format!("{spec}: {check:?}"))?;
            verified += 1;
        }
    }
    let mut abelian = Vec::new();
    fn lists(min: u64, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for m in min..=left {
            cur.push(m);
            lists(m, left / m, cur, out);
            cur.pop();
        }
    }
    lists(2, 16, &mut Vec::new(), &mut abelian);
    for orders in abelian {
        let v = baer_abelian(&orders);
        if v.decision == Decision::Capable {
            let chain = GroupSpec::abelian(&invariant_factors(&orders)).unwrap();
            let check = verify_witness(&chain, &v, DEFAULT_CAP).map_err(|e| format!("{orders:?}: {e}"))?;
            ensure(check.verified, || format!("{orders:?}: {check:?}"))?;
            verified += 1;
        }
    }
    ensure(baer_abelian(&[2, 4]).decision == Decision::NotCapable, || "C2 x C4 capable".into())?;
    let ex = capable_nilprod(&GroupSpec::generic(2, &[3, 9]).unwrap()).unwrap();
    ensure(ex.decision == Decision::NotCapable, || "(k=2,p=3,(1,2)) capable".into())?;
    Ok(format!("{verified} capable verdicts verified; C2+C4 and (k=2,p=3,(1,2)) not capable"))
}

fn exponent_lemmas() -> Check {
    let cfg = SuiteConfig::default();
    let mut cases = 0;
    for s in ["kummer", "maxs", "struik-lemma2", "exponent-lemmas"] {
        let rep = run_suite(s, &cfg).map_err(|e| format!("{s}: {e}"))?;
        ensure(rep.passed(), || format!("{s}: {:?}", rep.failures.first()))?;
        cases += rep.cases;
    }
    // [z^(2^N),y] = [z,y]^(2^N) = [z,y^(2^N)] on generator pairs, N = a + 1.
    let mut checked = 0;
    for a1 in 1..=2u32 {
        for a2 in a1..=3u32 {
            let (_, c) = codes(&GroupSpec::special(&[1 << a1, 1 << a2]).unwrap());
            let g = c.generators();
            for (y, z) in [(g[0], g[1]), (g[1], g[0])] {
                let hyp = |i: u32| {
                    let t = c.comm(z, c.pow(y, 1 << i));
                    c.comm(t, y) == 0 && c.comm(t, z) == 0
                };
                let a = (1..=16).find(|&a| (a..=16).all(hyp)).unwrap();
                let m = 1i64 << (a + 1);
                let (l, mid, r) = (c.comm(c.pow(z, m), y), c.pow(c.comm(z, y), m), c.comm(z, c.pow(y, m)));
                ensure(l == mid && mid == r, || format!("({},{}): N = {}", 1 << a1, 1 << a2, a + 1))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{cases} lemma cases; final theorem on {checked} generator pairs"))
}

fn tightness() -> Check {
    for k in [2usize, 3] {
        let t = dihedral_tightness(k, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(t.parent_order == 1 << (k + 2) && t.quotient_order == 1 << (k + 1), || format!("{t:?}"))?;
        ensure(t.presentation_ok && t.exponents == [1, k as u32] && t.meets_bound, || format!("{t:?}"))?;
    }
    Ok("D8 = D16/Z and D16 = D32/Z with generator exponents (1,k)".into())
}

fn bacon_kappe() -> Check {
    let (mut tuples, mut verified) = (0, 0);
    let bound = BigUint::from(3u32).pow(7);
    for alpha in 0..=2 {
        for beta in 0..=2 {
            for gamma in 0..=2 {
                for sigma in 0..=2 {
                    let Ok(pres) = Class2Presentation::new(3, alpha, beta, gamma, sigma) else { continue };
                    tuples += 1;
                    let v = capable_class2_2gen(&pres);
                    let want = if alpha == beta { Decision::Capable } else { Decision::NotCapable };
                    ensure(v.decision == want, || format!("{pres}: {:?}", v.decision))?;
                    if v.decision == Decision::Capable {
                        let check = verify_class2(&pres, &v, DEFAULT_CAP).map_err(|e| format!("{pres}: {e}"))?;
                        let small = check.witness_order.parse::<BigUint>().unwrap() <= bound;
                        ensure(check.verified || !small, || format!("{pres}: {check:?}"))?;
                        verified += usize::from(check.verified);
                    }
                }
            }
        }
    }
    Ok(format!("{tuples} presentations decided as alpha = beta; {verified} witnesses verified"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("dihedral identification", dihedral_8),
        ("normal forms and group axioms", axioms),
        ("formula/collector agreement", formulas),
        ("center theorems", centers),
        ("capability round trips", capability_round_trips),
        ("valuation and exponent lemmas", exponent_lemmas),
        ("tightness witness", tightness),
        ("Bacon-Kappe reconstruction", bacon_kappe),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let secs = || start.elapsed().as_secs_f64();
        match f() {
            Ok(msg) => println!("criterion {} ({name}): PASS - {msg} [{:.1}s]", i + 1, secs()),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {msg} [{:.1}s]", i + 1, secs());
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
