//! Command line front end: solving, establishment, shape classification,
//! behavior tables, finite translation, type enumeration, fixtures, and
//! establishment benchmarks.
//!
//! Exit codes are a stable contract: 0 for satisfiable verdicts and
//! successful reports, 1 for unsatisfiable verdicts, 2 for usage or
//! input errors. All stdout output is byte-deterministic in the
//! arguments and seed; timings go to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use relwidth::behaviors::{parse_spec, Behavior, BinaryBehavior, TernaryBehavior};
use relwidth::entailment::{classify, default_catalog};
use relwidth::generator::{
    clique_instance, contradictory_pair, equality_chain, random_instance, seeded_rng,
    InstanceShape, Language,
};
use relwidth::graphs::{GraphFamily, Size};
use relwidth::instance::Instance;
use relwidth::minimality::{establish_minimality, verify_minimality};
use relwidth::orbits::{enumerate_types, OrbitLabel, OrbitRelation, QfType};
use relwidth::solver::{
    decide_width, default_width_parameters, oracle, realize_certificate, solve_search,
    solve_search_with_priority, verify_certificate, Status, Verdict,
};
use relwidth::typestructure::{default_m, refine_translation, translate_instance, FiniteInstance};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "relwidth", version, about = "Solver and analysis toolkit for constraint problems over forbidden-subgraph families", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance document; exit 0 sat, 1 unsat.
    Solve(SolveArgs),
    /// Establish (k,l)-minimality and report the result.
    Minimalize(MinimalizeArgs),
    /// Test a quaternary relation against the forbidden shape catalog.
    Classify(ClassifyArgs),
    /// Print or verify a behavior table.
    Behaviors(BehaviorsArgs),
    /// Compile an instance into its finite companion document.
    Translate(TranslateArgs),
    /// List every type of one arity over a family, one per line.
    EnumerateTypes(EnumerateArgs),
    /// Write the necessity fixtures as instance documents.
    Fixtures(FixturesArgs),
    /// Time establishment against variable count and cross-check solvers.
    Bench(BenchArgs),
}

/// Family selection shared by the subcommands that do not read it from a
/// document. `henson` takes --k; `cliques` takes --size and --count.
/// Inline forms `henson:4`, `cliques:omega:2`, and `complement:<inline>`
/// are accepted everywhere.
#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    family: String,
    /// Forbidden clique order for henson (at least 3).
    #[arg(long)]
    k: Option<u32>,
    /// Clique size for cliques: a number or omega.
    #[arg(long)]
    size: Option<String>,
    /// Clique count for cliques: a number or omega.
    #[arg(long)]
    count: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    /// Establishment only; satisfiability assumed where it survives.
    Width,
    /// Establishment plus branching on pair labels.
    Search,
    /// Exhaustive scan over all global types.
    Oracle,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance document to read.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMode::Search)]
    mode: SolveMode,
    /// Consistency parameter k for width mode; defaults to 2.
    #[arg(long)]
    k: Option<usize>,
    /// Consistency parameter l for width mode; defaults to the family's
    /// bound order.
    #[arg(long)]
    l: Option<usize>,
    /// Branching order for search mode, comma separated labels out of
    /// E, N, = (for example E,N,=).
    #[arg(long)]
    priority: Option<String>,
    /// Write the certificate and its realization as JSON on sat.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct MinimalizeArgs {
    /// Instance document to read.
    #[arg(long)]
    input: PathBuf,
    /// Defaults to 2.
    #[arg(long)]
    k: Option<usize>,
    /// Defaults to the family's bound order.
    #[arg(long)]
    l: Option<usize>,
    /// Write the established instance back out as a document.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Instance document holding the relation.
    #[arg(long, requires = "relation")]
    input: Option<PathBuf>,
    /// Relation name inside the document.
    #[arg(long)]
    relation: Option<String>,
    /// Inline orbit strings, semicolon separated; needs --family.
    #[arg(long, conflicts_with = "input")]
    orbits: Option<String>,
    /// Family for --orbits, inline form (for example random, henson:4).
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct BehaviorsArgs {
    /// Behavior spec: max:balanced, max:e_dominated, e_constant,
    /// min:balanced, min:n_dominated, n_constant, projection1:<flavor>,
    /// xor:<flavor>, majority:<binary spec>, minority:<binary spec>,
    /// h_c2omega.
    #[arg(long)]
    spec: String,
    /// Print the label table.
    #[arg(long)]
    print: bool,
    /// Check the table against the defining identities of its spec.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct TranslateArgs {
    /// Instance document to read.
    #[arg(long)]
    input: PathBuf,
    /// Companion structure arity: a number, or auto for the least sound
    /// choice.
    #[arg(long, default_value = "auto")]
    m: String,
    /// Strengthen the source to (2m,3m)-minimality and refine the
    /// translation into a (2,3)-minimal companion.
    #[arg(long)]
    refine: bool,
    /// Write the companion document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    arity: usize,
}

#[derive(Args)]
struct FixturesArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Directory the fixture documents are written into.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma separated variable counts to time establishment at.
    #[arg(long, default_value = "10,20,40,60")]
    variables: String,
    /// Instances per variable count.
    #[arg(long, default_value_t = 3)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Establishment parameter k; defaults to 2.
    #[arg(long)]
    establish_k: Option<usize>,
    /// Establishment parameter l; defaults to the family's bound order.
    #[arg(long)]
    establish_l: Option<usize>,
    /// Worker threads for independent instances.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Instances in the solver cross-check block; 0 disables it.
    #[arg(long, default_value_t = 50)]
    check_instances: usize,
}

/// Anything that stops a run: bad flags, unreadable files, or library
/// errors, all rendered as one message and exit code 2.
struct RunError(String);

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for RunError {
    fn from(e: E) -> Self {
        RunError(e.to_string())
    }
}

fn usage(message: impl Into<String>) -> RunError {
    RunError(message.into())
}

fn parse_size_token(text: &str) -> Result<Size, RunError> {
    if text == "omega" {
        return Ok(Size::Omega);
    }
    text.parse::<u32>()
        .map(Size::Finite)
        .map_err(|_| usage(format!("size must be a number or omega, not {text}")))
}

fn parse_family_inline(token: &str) -> Result<GraphFamily, RunError> {
    let family = match token.split_once(':') {
        None => match token {
            "random" => GraphFamily::Random,
            "henson" => return Err(usage("henson needs --k or the inline form henson:<k>")),
            "cliques" => {
                return Err(usage("cliques needs --size/--count or the inline form cliques:<size>:<count>"))
            }
            other => return Err(usage(format!("unknown family {other}"))),
        },
        Some(("henson", k)) => {
            GraphFamily::Henson(k.parse().map_err(|_| usage(format!("bad henson order {k}")))?)
        }
        Some(("cliques", rest)) => {
            let (size, count) = rest
                .split_once(':')
                .ok_or_else(|| usage("cliques takes two parameters, as in cliques:omega:2"))?;
            GraphFamily::Cliques { size: parse_size_token(size)?, count: parse_size_token(count)? }
        }
        Some(("complement", inner)) => {
            GraphFamily::Complement(Box::new(parse_family_inline(inner)?))
        }
        Some((other, _)) => return Err(usage(format!("unknown family {other}"))),
    };
    family.validate()?;
    Ok(family)
}

fn parse_family(args: &FamilyArgs) -> Result<GraphFamily, RunError> {
    let family = match args.family.as_str() {
        "henson" => {
            let k = args.k.ok_or_else(|| usage("henson needs --k"))?;
            GraphFamily::Henson(k)
        }
        "cliques" => {
            let size = args.size.as_deref().ok_or_else(|| usage("cliques needs --size"))?;
            let count = args.count.as_deref().ok_or_else(|| usage("cliques needs --count"))?;
            GraphFamily::Cliques { size: parse_size_token(size)?, count: parse_size_token(count)? }
        }
        token => return parse_family_inline(token),
    };
    family.validate()?;
    Ok(family)
}

fn read_instance(path: &Path) -> Result<Instance, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Instance::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Sat => ExitCode::SUCCESS,
        Status::Unsat => ExitCode::from(1),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, RunError> {
    let inst = read_instance(&args.input)?;
    let (dk, dl) = default_width_parameters(inst.family());
    let verdict: Verdict = match args.mode {
        SolveMode::Width => {
            decide_width(&inst, args.k.unwrap_or(dk), args.l.unwrap_or(dl))?
        }
        SolveMode::Search => match &args.priority {
            None => solve_search(&inst)?,
            Some(text) => {
                let labels = text
                    .split(',')
                    .map(|t| OrbitLabel::parse(t.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                solve_search_with_priority(&inst, &labels)?
            }
        },
        SolveMode::Oracle => oracle(&inst)?,
    };
    println!("family: {}", inst.family());
    println!("variables: {}", inst.variables().len());
    println!("constraints: {}", inst.constraints().len());
    println!("mode: {}", verdict.mode);
    if verdict.assumed_width {
        println!("status: {} (assumed from surviving establishment)", verdict.status);
    } else {
        println!("status: {}", verdict.status);
    }
    if let Some(cert) = &verdict.certificate {
        println!("certificate: {}", cert.encode());
        verify_certificate(&inst, cert)?;
        if let Some(path) = &args.cert {
            write_text(path, &(certificate_json(&inst, cert)? + "\n"))?;
        }
    } else if args.cert.is_some() && verdict.status == Status::Sat {
        return Err(usage("this verdict carries no certificate; use search or oracle mode"));
    }
    Ok(status_code(verdict.status))
}

fn certificate_json(inst: &Instance, cert: &QfType) -> Result<String, RunError> {
    let realization = realize_certificate(cert, inst.variables(), inst.family())?;
    let graph = &realization.graph;
    let mut edges = Vec::new();
    for i in 0..graph.order() {
        for j in (i + 1)..graph.order() {
            if graph.edge(i, j) {
                edges.push(serde_json::json!([i, j]));
            }
        }
    }
    let assignment: serde_json::Map<String, serde_json::Value> = realization
        .assignment
        .iter()
        .map(|(name, vertex)| (name.clone(), serde_json::json!(vertex)))
        .collect();
    let value = serde_json::json!({
        "orbit": cert.encode(),
        "vertices": graph.order(),
        "edges": edges,
        "assignment": assignment,
    });
    Ok(serde_json::to_string_pretty(&value).expect("certificate values serialize"))
}

fn cmd_minimalize(args: &MinimalizeArgs) -> Result<ExitCode, RunError> {
    let inst = read_instance(&args.input)?;
    let (dk, dl) = default_width_parameters(inst.family());
    let (k, l) = (args.k.unwrap_or(dk), args.l.unwrap_or(dl));
    let established = establish_minimality(&inst, k, l)?;
    println!("family: {}", inst.family());
    println!("parameters: ({k},{l})");
    println!(
        "constraints: {} ({} given, {} added)",
        established.constraints().len(),
        inst.constraints().len(),
        established.constraints().len() - inst.constraints().len()
    );
    let status = if established.is_trivial() {
        "trivial (a relation emptied; the instance has no solutions)"
    } else {
        "non-trivial"
    };
    println!("status: {status}");
    match verify_minimality(&established) {
        None => println!("verified: ({k},{l})-minimal"),
        Some(v) => println!("verified: VIOLATION {v}"),
    }
    if let Some(path) = &args.output {
        write_text(path, &established.to_instance().serialize())?;
    }
    if established.is_trivial() {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<ExitCode, RunError> {
    let rel: OrbitRelation = match (&args.input, &args.orbits) {
        (Some(path), None) => {
            let inst = read_instance(path)?;
            let name = args.relation.as_deref().expect("clap enforces --relation with --input");
            inst.relation(name)
                .ok_or_else(|| usage(format!("no relation named {name} in the document")))?
                .clone()
        }
        (None, Some(orbits)) => {
            let token = args
                .family
                .as_deref()
                .ok_or_else(|| usage("--orbits needs --family"))?;
            let family = parse_family_inline(token)?;
            let mut rel = OrbitRelation::new(4);
            for text in orbits.split(';') {
                rel.insert(QfType::parse(text.trim(), &family)?)?;
            }
            rel
        }
        _ => return Err(usage("classify needs either --input with --relation, or --orbits with --family")),
    };
    let reports = classify(&rel, &default_catalog())?;
    let mut hits = 0;
    for (shape, report) in &reports {
        let flags = format!(
            "entails {}, efficient {}, sides {}",
            if report.entails { "yes" } else { "no" },
            if report.efficient { "yes" } else { "no" },
            if report.side_conditions_hold { "yes" } else { "no" },
        );
        if report.instantiates() {
            hits += 1;
            println!("{}: INSTANTIATED ({flags})", shape.name);
        } else {
            println!("{}: not instantiated ({flags})", shape.name);
        }
    }
    println!("instantiated: {hits} of {}", reports.len());
    Ok(ExitCode::SUCCESS)
}

fn print_binary_table(b: &BinaryBehavior) {
    let labels = [OrbitLabel::Eq, OrbitLabel::E, OrbitLabel::N];
    println!("{:<12} | =  E  N", b.spec());
    println!("-------------+---------");
    for a in labels {
        let row: Vec<&str> = labels.iter().map(|&x| b.apply(a, x).token()).collect();
        println!("{:<12} | {}  {}  {}", a.token(), row[0], row[1], row[2]);
    }
}

fn print_ternary_table(b: &TernaryBehavior) {
    let labels = [OrbitLabel::Eq, OrbitLabel::E, OrbitLabel::N];
    println!("{}", b.spec());
    for a in labels {
        for x in labels {
            for y in labels {
                println!("({}, {}, {}) -> {}", a.token(), x.token(), y.token(), b.apply(a, x, y).token());
            }
        }
    }
}

/// Checks the table against the laws its spec promises: the equality
/// law, the min/max/constant clauses on mixed labels, and the flavor
/// clauses on pairs with one equality.
fn verify_behavior(spec: &str, behavior: &Behavior) -> Result<(), RunError> {
    use OrbitLabel::{Eq, E, N};
    if spec == "h_c2omega" {
        // This table is defined by absorption and parity, not by the
        // equality law (which it intentionally fails): any N argument
        // forces N, and otherwise the output is E exactly when an odd
        // number of arguments are E.
        let Behavior::Ternary(t) = behavior else {
            return Err(usage(format!("{spec}: expected a ternary table")));
        };
        for a in OrbitLabel::ALL {
            for b in OrbitLabel::ALL {
                for c in OrbitLabel::ALL {
                    let labels = [a, b, c];
                    let want = if labels.contains(&N) {
                        N
                    } else if labels.iter().filter(|&&l| l == E).count() % 2 == 1 {
                        E
                    } else {
                        Eq
                    };
                    let got = t.apply(a, b, c);
                    if got != want {
                        return Err(usage(format!(
                            "{spec}: ({}, {}, {}) maps to {} instead of {}",
                            a.token(),
                            b.token(),
                            c.token(),
                            got.token(),
                            want.token()
                        )));
                    }
                }
            }
        }
        return Ok(());
    }
    if !behavior.eq_law_holds() {
        return Err(usage(format!("{spec}: equality law fails")));
    }
    if let Behavior::Ternary(t) = behavior {
        let claims: Vec<([OrbitLabel; 3], OrbitLabel)> = match spec.split(':').next() {
            Some("majority") => vec![
                ([E, E, N], E),
                ([E, N, E], E),
                ([N, E, E], E),
                ([E, N, N], N),
                ([N, E, N], N),
                ([N, N, E], N),
                ([E, E, E], E),
                ([N, N, N], N),
            ],
            Some("minority") => vec![
                ([E, E, N], N),
                ([E, N, E], N),
                ([N, E, E], N),
                ([E, N, N], E),
                ([N, E, N], E),
                ([N, N, E], E),
                ([E, E, E], E),
                ([N, N, N], N),
            ],
            _ => Vec::new(),
        };
        for ([a, x, y], want) in claims {
            let got = t.apply(a, x, y);
            if got != want {
                return Err(usage(format!(
                    "{spec}: ({}, {}, {}) maps to {} instead of {}",
                    a.token(),
                    x.token(),
                    y.token(),
                    got.token(),
                    want.token()
                )));
            }
        }
    }
    if let Behavior::Binary(b) = behavior {
        let claims: Vec<(OrbitLabel, OrbitLabel, OrbitLabel)> = match spec.split(':').next() {
            Some("max") => vec![(E, N, E), (N, E, E), (E, E, E), (N, N, N)],
            Some("min") => vec![(E, N, N), (N, E, N), (E, E, E), (N, N, N)],
            Some("e_constant") => {
                vec![(E, N, E), (N, E, E), (E, E, E), (N, N, E), (Eq, E, E), (E, Eq, E), (Eq, N, E), (N, Eq, E)]
            }
            Some("n_constant") => {
                vec![(E, N, N), (N, E, N), (E, E, N), (N, N, N), (Eq, E, N), (E, Eq, N), (Eq, N, N), (N, Eq, N)]
            }
            _ => Vec::new(),
        };
        let flavored: Vec<(OrbitLabel, OrbitLabel, OrbitLabel)> = match spec.split(':').nth(1) {
            Some("balanced") => vec![(Eq, E, E), (E, Eq, E), (Eq, N, N), (N, Eq, N)],
            Some("e_dominated") => vec![(Eq, E, E), (E, Eq, E), (Eq, N, E), (N, Eq, E)],
            Some("n_dominated") => vec![(Eq, E, N), (E, Eq, N), (Eq, N, N), (N, Eq, N)],
            _ => Vec::new(),
        };
        for (a, x, want) in claims.into_iter().chain(flavored) {
            let got = b.apply(a, x);
            if got != want {
                return Err(usage(format!(
                    "{spec}: ({}, {}) maps to {} instead of {}",
                    a.token(),
                    x.token(),
                    got.token(),
                    want.token()
                )));
            }
        }
    }
    Ok(())
}

fn cmd_behaviors(args: &BehaviorsArgs) -> Result<ExitCode, RunError> {
    let behavior = parse_spec(&args.spec)?;
    if !args.print && !args.verify {
        return Err(usage("behaviors needs --print or --verify"));
    }
    if args.print {
        match &behavior {
            Behavior::Binary(b) => print_binary_table(b),
            Behavior::Ternary(t) => print_ternary_table(t),
        }
    }
    if args.verify {
        verify_behavior(&args.spec, &behavior)?;
        println!("verified: {} satisfies its defining identities", args.spec);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_translate(args: &TranslateArgs) -> Result<ExitCode, RunError> {
    let inst = read_instance(&args.input)?;
    let m = match args.m.as_str() {
        "auto" => default_m(&inst),
        text => text.parse::<usize>().map_err(|_| usage(format!("bad m {text}")))?,
    };
    let translated = translate_instance(&inst, m)?;
    let (document, code): (FiniteInstance, ExitCode) = if args.refine {
        let source = establish_minimality(&inst, 2 * m, 3 * m)?;
        if source.is_trivial() {
            eprintln!("({},{})-establishment already empties a relation; emitting the unrefined translation", 2 * m, 3 * m);
            (translated, ExitCode::from(1))
        } else {
            (refine_translation(&source, &translated)?, ExitCode::SUCCESS)
        }
    } else {
        (translated, ExitCode::SUCCESS)
    };
    let text = document.serialize();
    match &args.output {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<ExitCode, RunError> {
    let family = parse_family(&args.family)?;
    let types = enumerate_types(&family, args.arity)?;
    for t in &types {
        println!("{}", t.encode());
    }
    eprintln!("{} types of arity {} over {family}", types.len(), args.arity);
    Ok(ExitCode::SUCCESS)
}

fn cmd_fixtures(args: &FixturesArgs) -> Result<ExitCode, RunError> {
    let family = parse_family(&args.family)?;
    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| usage(format!("cannot create {}: {e}", out.display())))?;
    let emit = |name: String, inst: Instance| -> Result<(), RunError> {
        let path = out.join(name);
        write_text(&path, &inst.serialize())?;
        println!("{}", path.display());
        Ok(())
    };
    emit("contradictory-pair.json".into(), contradictory_pair(&family))?;
    if family.l_value() == 3 {
        emit("equality-chain.json".into(), equality_chain(&family))?;
    }
    if let GraphFamily::Henson(k) = family {
        emit(format!("clique{k}.json"), clique_instance(&family, k as usize))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, RunError> {
    let family = parse_family(&args.family)?;
    let (dk, dl) = default_width_parameters(&family);
    let (k, l) = (args.establish_k.unwrap_or(dk), args.establish_l.unwrap_or(dl));
    if args.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let counts = args
        .variables
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad variable count {t}"))))
        .collect::<Result<Vec<_>, _>>()?;
    println!("family: {family}");
    println!("establishment: ({k},{l})");
    let mut rng = seeded_rng(args.seed);
    for &n in &counts {
        let shape = InstanceShape {
            min_variables: n,
            max_variables: n,
            min_constraints: n,
            max_constraints: n,
        };
        let instances: Vec<Instance> = (0..args.instances)
            .map(|_| random_instance(&mut rng, &family, &Language::builtins(), &shape))
            .collect();
        // Establishment runs concurrently; verdicts and timings come
        // back in instance order.
        let mut results: Vec<Option<(bool, f64)>> = vec![None; instances.len()];
        std::thread::scope(|scope| {
            let mut pending: Vec<(usize, &Instance)> = instances.iter().enumerate().collect();
            let chunk = pending.len().div_ceil(args.threads);
            let mut handles = Vec::new();
            while !pending.is_empty() {
                let batch: Vec<(usize, &Instance)> =
                    pending.drain(..chunk.min(pending.len())).collect();
                handles.push(scope.spawn(move || {
                    batch
                        .into_iter()
                        .map(|(i, inst)| {
                            let start = Instant::now();
                            let established = establish_minimality(inst, k, l)
                                .expect("bench instances fit establishment");
                            (i, established.is_trivial(), start.elapsed().as_secs_f64())
                        })
                        .collect::<Vec<_>>()
                }));
            }
            for handle in handles {
                for (i, trivial, seconds) in handle.join().expect("bench workers do not panic") {
                    results[i] = Some((trivial, seconds));
                }
            }
        });
        let outcomes: Vec<(bool, f64)> = results.into_iter().map(|r| r.unwrap()).collect();
        let trivial = outcomes.iter().filter(|(t, _)| *t).count();
        println!("variables {n}: instances {}, trivial {trivial}", outcomes.len());
        let times: Vec<String> =
            outcomes.iter().map(|(_, s)| format!("{s:.3}s")).collect();
        eprintln!("variables {n}: {}", times.join(" "));
    }
    if args.check_instances > 0 {
        let shape =
            InstanceShape { min_variables: 2, max_variables: 6, min_constraints: 1, max_constraints: 8 };
        let mut sat = 0usize;
        let mut search_agree = 0usize;
        let mut width_agree = 0usize;
        for _ in 0..args.check_instances {
            let inst = random_instance(&mut rng, &family, &Language::builtins(), &shape);
            let want = oracle(&inst).expect("check instances fit the oracle").status;
            if want == Status::Sat {
                sat += 1;
            }
            if solve_search(&inst).expect("check instances fit search").status == want {
                search_agree += 1;
            }
            if decide_width(&inst, k, l).expect("check instances fit width").status == want {
                width_agree += 1;
            }
        }
        println!(
            "cross-check: {} instances, oracle sat {sat}, search agreements {search_agree}, width agreements {width_agree}",
            args.check_instances
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, RunError> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Minimalize(args) => cmd_minimalize(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Behaviors(args) => cmd_behaviors(args),
        Command::Translate(args) => cmd_translate(args),
        Command::EnumerateTypes(args) => cmd_enumerate(args),
        Command::Fixtures(args) => cmd_fixtures(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
