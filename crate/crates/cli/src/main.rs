use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use nilcap::basiccomm::enumerate_basic;
use nilcap::capability::{
    self, baer_abelian, capable_class2_2gen, capable_params, invariant_factors, verify_class2, verify_witness,
    CapabilityVerdict, Class2Presentation, Decision, WitnessCheck,
};
use nilcap::collector::{self, Word};
use nilcap::grouptools::{
    center_bruteforce, center_formula, center_order_layered, closure_of_elements, lower_central_checked, FiniteGroup,
    NilCodes, QuotientGroup, DEFAULT_CAP,
};
use nilcap::nilprod::{self, make_group, Element, GroupSpec, NilGroup, Regime};
use nilcap::suites::{run_suite, SuiteConfig, SUITES};

#[derive(Parser)]
#[command(name = "nilcap", version, about = "Exact computation in nilpotent products of cyclic groups")]
struct Cli {
    /// Output format; defaults to $NILCAP_FORMAT, then text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the basic commutators of weight <= K on R generators.
    Basics {
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        class: usize,
    },
    /// Collect a word in the free nilpotent group.
    Collect {
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        class: usize,
        #[arg(long)]
        word: String,
    },
    /// Product lhs * rhs.
    Mul(ElemArgs),
    /// Power lhs^exp.
    Pow(ElemArgs),
    /// Commutator [lhs, rhs].
    Comm(ElemArgs),
    /// Order of lhs, or of the group without --lhs.
    Order(ElemArgs),
    /// Generators and order of the center.
    Center {
        #[command(flatten)]
        group: GroupArgs,
        /// Compare with the brute-force center.
        #[arg(long)]
        verify_brute: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// The i-th lower central term.
    Lcs {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        term: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Quotient by the normal closure of the given elements.
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
        /// Elements separated by ';'.
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Decide capability.
    Capable {
        #[command(subcommand)]
        target: Target,
    },
    /// Build and verify the witness of a capable group.
    Witness {
        #[command(subcommand)]
        target: Target,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name, or "all".
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 6561)]
        max_order: u64,
    },
}

#[derive(Args, Clone)]
struct GroupArgs {
    #[arg(long)]
    class: usize,
    /// Generator orders, 0 for infinite.
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<u64>,
    #[arg(long, value_enum, default_value = "generic")]
    regime: RegimeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Generic,
    #[value(name = "special23", alias = "special_2_3")]
    Special23,
    Abelian,
}

#[derive(Args)]
struct ElemArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, allow_hyphen_values = true)]
    lhs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    rhs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    exp: Option<BigInt>,
}

#[derive(Subcommand, Clone)]
enum Target {
    /// k-nilpotent product of cyclic p-groups of orders p^alphas.
    Nilprod {
        #[arg(long)]
        class: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u32>,
        /// Verify the witness by brute force.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Finitely generated abelian group; 0 is an infinite cyclic factor.
    Abelian {
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u64>,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// <a, b | a^(p^alpha), b^(p^beta), [b,a]^(p^gamma), class 2, a^(p^(alpha+sigma-gamma)) [b,a]^(p^sigma)>.
    Class2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        beta: u32,
        #[arg(long)]
        gamma: u32,
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
}

/// A computation error; exit code 3.
struct Failure {
    kind: &'static str,
    message: String,
}

fn fail(kind: &'static str, e: impl std::fmt::Display) -> Failure {
    Failure { kind, message: e.to_string() }
}

macro_rules! impl_from {
    ($($t:ty => $kind:literal),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                fail($kind, e)
            }
        }
    )*};
}

impl_from!(
    nilcap::nilprod::NilprodError => "nilprod",
    nilcap::grouptools::GroupError => "group",
    nilcap::capability::CapabilityError => "capability",
    nilcap::collector::CollectError => "collect",
    nilcap::basiccomm::BasicError => "basic",
    nilcap::suites::SuiteError => "suite"
);

/// What a command produces: the JSON document, its text rendering, and
/// whether the run counts as a failure (suites only).
struct Output {
    json: Value,
    text: String,
    failed: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Output {
        Output { json, text, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let format = match cli.format {
        Some(f) => f,
        None => match std::env::var("NILCAP_FORMAT").as_deref() {
            Err(_) | Ok("") | Ok("text") => Format::Text,
            Ok("json") => Format::Json,
            Ok(other) => {
                eprintln!("error: NILCAP_FORMAT must be text or json, got {other:?}");
                return ExitCode::from(2);
            }
        },
    };
    match run(cli.command) {
        Ok(out) => {
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Text => println!("{}", out.text),
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Computation(f)) => {
            match format {
                Format::Json => {
                    let doc = json!({"error": {"kind": f.kind, "message": f.message}});
                    eprintln!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                Format::Text => eprintln!("error ({}): {}", f.kind, f.message),
            }
            ExitCode::from(3)
        }
    }
}

enum RunError {
    Usage(String),
    Computation(Failure),
}
use RunError::{Computation, Usage};

impl<T: Into<Failure>> From<T> for RunError {
    fn from(e: T) -> RunError {
        Computation(e.into())
    }
}

fn run(cmd: Command) -> Result<Output, RunError> {
    match cmd {
        Command::Basics { gens, class } => {
            let seq = enumerate_basic(gens, class)?;
            let items = seq.listing();
            let text = items.iter().map(|b| format!("{:>4}  w{}  {}", b.index, b.weight, b.expr)).collect::<Vec<_>>().join("\n");
            Ok(Output::new(serde_json::to_value(&items).expect("serializable"), text))
        }
        Command::Collect { gens, class, word } => {
            let w = Word::parse(&word)?;
            let e = collector::collect(&w, gens, class)?;
            let labels = e.group().basis().labels();
            Ok(Output::new(element_json(&labels, e.exponents()), show(&e.to_string())))
        }
        Command::Mul(a) => {
            let (g, lhs, rhs) = (a.group()?, a.lhs_str()?, a.rhs_str()?);
            let x = nilprod::parse(&g, lhs)?.mul(&nilprod::parse(&g, rhs)?)?;
            Ok(element_output(&x))
        }
        Command::Comm(a) => {
            let (g, lhs, rhs) = (a.group()?, a.lhs_str()?, a.rhs_str()?);
            let x = nilprod::parse(&g, lhs)?.comm(&nilprod::parse(&g, rhs)?)?;
            Ok(element_output(&x))
        }
        Command::Pow(a) => {
            let g = a.group()?;
            let lhs = a.lhs_str()?;
            let n = a.exp.clone().ok_or_else(|| Usage("pow needs --exp".into()))?;
            Ok(element_output(&nilprod::parse(&g, lhs)?.pow(&n)))
        }
        Command::Order(a) => {
            let g = a.group()?;
            match &a.lhs {
                None => {
                    let order = g.order().map_or("infinite".to_string(), |n| n.to_string());
                    let text = format!("|G| = {order}");
                    Ok(Output::new(json!({"group": g.spec().to_string(), "order": order}), text))
                }
                Some(src) => {
                    let x = nilprod::parse(&g, src)?;
                    let order = x.element_order()?.to_string();
                    let text = format!("order of {} is {order}", show(&nilprod::format(&x)));
                    let mut doc = element_doc(&x);
                    doc["order"] = json!(order);
                    Ok(Output::new(doc, text))
                }
            }
        }
        Command::Center { group, verify_brute, cap } => center(&group, verify_brute, cap),
        Command::Lcs { group, term, cap } => {
            let g = group.build()?;
            let codes = NilCodes::new(&g)?;
            let t = lower_central_checked(&codes, term, cap)?;
            let gens: Vec<String> = t.subgroup.generators().iter().map(|&c| codes.label(c)).collect();
            let counter = t.counterexample.map(|c| codes.label(c));
            let mut text = format!("G_{term}: order {}, generated by {}", t.subgroup.len(), list(&gens));
            if let Some(c) = &counter {
                text += &format!("\nwarning: differs from the span of basic commutators of weight >= {term} at {c}");
            }
            let doc = json!({"term": term, "order": t.subgroup.len(), "generators": gens, "counterexample": counter});
            Ok(Output::new(doc, text))
        }
        Command::Quotient { group, kernel, cap } => {
            let g = group.build()?;
            let codes = Arc::new(NilCodes::new(&g)?);
            let srcs: Vec<&str> = kernel.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
            let gens: Vec<u64> = srcs.iter().map(|s| nilprod::parse(&g, s).map(|e| codes.encode(&e))).collect::<Result<_, _>>()?;
            let q = QuotientGroup::by_generators(codes.clone(), &gens, cap)?;
            let kern = q.kernel();
            let central = kern.elements().iter().all(|&k| codes.generators().iter().all(|&x| codes.mul(k, x) == codes.mul(x, k)));
            let text = format!(
                "kernel <<{}>>: order {}{}\nquotient order {}",
                srcs.join("; "),
                kern.len(),
                if central { " (central)" } else { "" },
                q.order()
            );
            let doc = json!({"kernel": srcs, "kernel_order": kern.len(), "central": central, "quotient_order": q.order(), "order": codes.order()});
            Ok(Output::new(doc, text))
        }
        Command::Capable { target } => capable(&target, false),
        Command::Witness { target } => capable(&target, true),
        Command::Verify { suite, seed, cap, max_order } => {
            let cfg = SuiteConfig { seed, cap, max_order };
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
                return Err(Usage(format!("unknown suite {bad:?}; known suites: {}", SUITES.join(", "))));
            }
            let reports = names.iter().map(|n| run_suite(n, &cfg)).collect::<Result<Vec<_>, _>>()?;
            let failed = reports.iter().any(|r| !r.passed());
            let text = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n\n");
            let json = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(&reports)
            }
            .expect("serializable");
            Ok(Output { json, text, failed })
        }
    }
}

impl GroupArgs {
    fn build(&self) -> Result<Arc<NilGroup>, RunError> {
        let regime = match self.regime {
            RegimeArg::Generic => Regime::Generic,
            RegimeArg::Special23 => Regime::Special23,
            RegimeArg::Abelian => Regime::Abelian,
        };
        Ok(make_group(&GroupSpec::new(self.class, &self.orders, regime)?)?)
    }
}

impl ElemArgs {
    /// The group is built first so that regime errors win over missing operands.
    fn group(&self) -> Result<Arc<NilGroup>, RunError> {
        self.group.build()
    }

    fn lhs_str(&self) -> Result<&str, RunError> {
        self.lhs.as_deref().ok_or_else(|| Usage("missing --lhs".into()))
    }

    fn rhs_str(&self) -> Result<&str, RunError> {
        self.rhs.as_deref().ok_or_else(|| Usage("missing --rhs".into()))
    }
}

fn show(s: &str) -> String {
    if s.is_empty() { "e".into() } else { s.into() }
}

fn list(xs: &[String]) -> String {
    if xs.is_empty() { "nothing".into() } else { xs.join(", ") }
}

fn int_json(n: &BigInt) -> Value {
    n.to_i64().map_or_else(|| json!(n.to_string()), |v| json!(v))
}

fn element_json(labels: &[String], exps: &[BigInt]) -> Value {
    json!({"exponents": exps.iter().map(int_json).collect::<Vec<_>>(), "basis": labels})
}

fn element_doc(x: &Element) -> Value {
    element_json(x.group().labels(), x.exponents())
}

fn element_output(x: &Element) -> Output {
    Output::new(element_doc(x), show(&nilprod::format(x)))
}

fn center(group: &GroupArgs, verify_brute: bool, cap: u64) -> Result<Output, RunError> {
    let g = group.build()?;
    let formula = center_formula(&g)?;
    let gens: Vec<String> = formula.iter().map(|z| show(&nilprod::format(z))).collect();
    let small = g.order_u64().is_some_and(|n| n <= cap);
    let (order, verified) = if small {
        let codes = NilCodes::new(&g)?;
        let sub = closure_of_elements(&codes, &formula, cap)?;
        let verified = if verify_brute { Some(center_bruteforce(&codes, cap)? == sub) } else { None };
        (sub.len().to_string(), verified)
    } else {
        if verify_brute {
            return Err(Computation(fail(
                "group",
                format!("brute-force center of {} exceeds the cap {cap}", g.spec()),
            )));
        }
        (center_order_layered(&g, cap)?.to_string(), None)
    };
    let mut text = format!("Z(G) = <{}>, order {order}", list(&gens));
    if let Some(v) = verified {
        text += if v { "\nbrute-force center agrees" } else { "\nbrute-force center DISAGREES" };
    }
    let doc = json!({"group": g.spec().to_string(), "generators": gens, "order": order, "verified": verified});
    Ok(Output { json: doc, text, failed: verified == Some(false) })
}

fn capable(target: &Target, witness_mode: bool) -> Result<Output, RunError> {
    let (verdict, verify, check): (CapabilityVerdict, bool, Box<dyn Fn(&CapabilityVerdict) -> Result<WitnessCheck, RunError>>) =
        match target.clone() {
            Target::Nilprod { class, prime, alphas, verify, cap } => {
                let v = capable_params(prime, class, &alphas)?;
                let check = move |v: &CapabilityVerdict| -> Result<WitnessCheck, RunError> {
                    let orders: Vec<u64> = alphas.iter().map(|&a| prime.pow(a)).collect();
                    let spec = if class == 1 { GroupSpec::abelian(&orders)? } else { GroupSpec::generic(class, &orders)? };
                    Ok(verify_witness(&spec, v, cap)?)
                };
                (v, verify, Box::new(check))
            }
            Target::Abelian { orders, verify, cap } => {
                if orders.contains(&1) {
                    return Err(Usage("orders must be 0 (infinite) or at least 2".into()));
                }
                let v = baer_abelian(&orders);
                let check = move |v: &CapabilityVerdict| -> Result<WitnessCheck, RunError> {
                    let spec = GroupSpec::abelian(&invariant_factors(&orders))?;
                    Ok(verify_witness(&spec, v, cap)?)
                };
                (v, verify, Box::new(check))
            }
            Target::Class2 { p, alpha, beta, gamma, sigma, verify, cap } => {
                let pres = Class2Presentation::new(p, alpha, beta, gamma, sigma)?;
                let v = capable_class2_2gen(&pres);
                let check = move |v: &CapabilityVerdict| -> Result<WitnessCheck, RunError> { Ok(verify_class2(&pres, v, cap)?) };
                (v, verify, Box::new(check))
            }
        };
    let has_witness = verdict.decision == Decision::Capable && verdict.witness.is_some();
    if witness_mode && !has_witness {
        return Err(Computation(fail("capability", capability::CapabilityError::NoWitness)));
    }
    let report = if (verify || witness_mode) && has_witness { Some(check(&verdict)?) } else { None };
    let verified = report.as_ref().map(|c| c.verified);
    let mut text = format!("{}\nreason: {}\ncitation: {}", verdict.decision, verdict.reason, verdict.citation);
    if let Some(w) = &verdict.witness {
        text += &format!("\nwitness: {} [{}]", w.description, w.base);
        for (i, k) in w.kernels.iter().enumerate() {
            text += &format!("\n  kernel {}: <{}>", i + 1, k.join(", "));
        }
    }
    if let Some(c) = &report {
        text += &format!(
            "\nverification ({}): |H| = {}, |Z(H)| = {}, |H/Z(H)| = {} (expected {}): {}",
            c.method,
            c.witness_order,
            c.center_order,
            c.quotient_order,
            c.expected_order,
            if c.verified { "verified" } else { "FAILED" }
        );
    }
    let mut doc = json!({
        "decision": verdict.decision,
        "reason": verdict.reason,
        "citation": verdict.citation,
        "witness": verdict.witness,
        "verified": verified,
    });
    if let Some(c) = &report {
        doc["verification"] = serde_json::to_value(c).expect("serializable");
    }
    Ok(Output { json: doc, text, failed: witness_mode && verified == Some(false) })
}
