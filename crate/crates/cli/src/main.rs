use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hxproof::cutelim::{eliminate_cuts_traced, ReductionStep, DEFAULT_STEP_LIMIT};
use hxproof::gen::{random_model, ProofGen, Signature};
use hxproof::hylo::{is_hylo, prove_hylo};
use hxproof::kernel::{check_derivation, Derivation, Sequent, Step};
use hxproof::model::{find_countermodel, ingest_datagraph, DataGraph, HybridDataModel, ModelJson};
use hxproof::search::{prove, SearchConfig, SearchResult};
use hxproof::syntax::{
    parse_node, parse_path, parse_sequent, print_node_styled, print_path, print_sequent_styled, AstJson, Style,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// `print!` that ignores a closed stdout.
macro_rules! say_raw {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

const OK: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "hxproof", version, about = "Proof kernel, model checker and prover for hybrid XPath with data comparisons")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Emit::Text, global = true)]
    emit: Emit,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FragmentArg {
    Hylo,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Node,
    Path,
    Sequent,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and print it in canonical form.
    Parse {
        #[arg(long, value_enum, default_value_t = Kind::Node)]
        kind: Kind,
        text: String,
    },
    /// Evaluate a node expression in a model or data graph file.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Node name; without it the extension is printed.
        #[arg(long)]
        at: Option<String>,
        formula: String,
    },
    /// Check a sequent in a model, or look for a countermodel.
    Entail {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        countermodel_nodes: usize,
        sequent: String,
    },
    /// Search for a derivation.
    Prove {
        #[arg(long, value_enum)]
        fragment: Option<FragmentArg>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        fresh_budget: Option<usize>,
        #[arg(long)]
        countermodel_nodes: Option<usize>,
        /// Use only primitive comparison witnesses, so the proof has no cuts.
        #[arg(long)]
        cut_free: bool,
        sequent: String,
    },
    /// Check a derivation file.
    Check {
        #[arg(long, value_enum)]
        fragment: Option<FragmentArg>,
        file: PathBuf,
    },
    /// Eliminate the cuts of a derivation file.
    Cutfree {
        /// Print each reduction with its cut complexities.
        #[arg(long)]
        trace: bool,
        file: PathBuf,
    },
    /// Check every JSON file in a directory of golden derivations and models.
    Corpus {
        dir: PathBuf,
        /// Also check this many generated derivations against random models
        /// (seeded by HXPROOF_SEED).
        #[arg(long, default_value_t = 0)]
        fuzz: usize,
    },
}

struct Failure(u8, String);

type Outcome = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(USAGE, msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_derivation(path: &Path) -> Result<Derivation, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A model file holds either the model wire form or a data graph.
fn load_model(path: &Path) -> Result<HybridDataModel, Failure> {
    let text = read(path)?;
    if let Ok(m) = serde_json::from_str::<HybridDataModel>(&text) {
        return Ok(m);
    }
    let dg: DataGraph = serde_json::from_str(&text).map_err(|e| usage(format!("{}: not a model or data graph: {e}", path.display())))?;
    ingest_datagraph(&dg).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn sequent(text: &str) -> Result<Sequent, Failure> {
    parse_sequent(text).map_err(|e| usage(e.to_string()))
}

fn seq_json(s: &Sequent) -> Value {
    let side = |xs: &std::collections::BTreeSet<_>| xs.iter().map(AstJson::from).collect::<Vec<_>>();
    json!({ "ante": side(s.ante()), "succ": side(s.succ()) })
}

fn seq_text(s: &Sequent) -> String {
    print_sequent_styled(s, Style::Unicode)
}

/// Indented tree, root first, one sequent per line.
fn render(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let label = match &d.step {
            Step::Rule { inference, .. } => inference.rule().to_string(),
            Step::Derived { name, .. } => name.clone(),
            Step::Open => "open".into(),
        };
        out.push_str(&format!("{}{label}  {}\n", "  ".repeat(depth), seq_text(&d.conclusion)));
        for p in d.premisses() {
            go(p, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out
}

fn model_text(m: &HybridDataModel) -> String {
    serde_json::to_string(&ModelJson::from(m)).expect("models serialize")
}

fn emit_json(v: &Value) {
    say!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

fn run_parse(emit: Emit, kind: Kind, text: &str) -> Outcome {
    let (canon, ast) = match kind {
        Kind::Node => {
            let e = parse_node(text).map_err(|e| usage(e.to_string()))?;
            (print_node_styled(&e, Style::Unicode), to_value(&AstJson::from(&e)))
        }
        Kind::Path => {
            let p = parse_path(text).map_err(|e| usage(e.to_string()))?;
            (print_path(&p), to_value(&AstJson::from(&p)))
        }
        Kind::Sequent => {
            let s = sequent(text)?;
            (seq_text(&s), seq_json(&s))
        }
    };
    match emit {
        Emit::Json => emit_json(&ast),
        Emit::Text => say!("{canon}"),
    }
    Ok(OK)
}

fn run_eval(emit: Emit, model: &Path, at: Option<&str>, formula: &str) -> Outcome {
    let m = load_model(model)?;
    let phi = parse_node(formula).map_err(|e| usage(e.to_string()))?;
    let ext = m.extension(&phi).map_err(|e| usage(e.to_string()))?;
    match at {
        Some(name) => {
            let n = m.node(name).map_err(|e| usage(e.to_string()))?;
            let v = ext.contains(n);
            match emit {
                Emit::Json => emit_json(&json!({ "at": name, "value": v })),
                Emit::Text => say!("{v}"),
            }
        }
        None => {
            let names: Vec<&str> = ext.iter().map(|n| m.name(n)).collect();
            match emit {
                Emit::Json => emit_json(&json!({ "extension": names })),
                Emit::Text => say!("{{{}}}", names.join(", ")),
            }
        }
    }
    Ok(OK)
}

fn run_entail(emit: Emit, model: Option<&Path>, nodes: usize, text: &str) -> Outcome {
    let s = sequent(text)?;
    if let Some(path) = model {
        let m = load_model(path)?;
        let valid = m.check_sequent_validity(&s).map_err(|e| usage(e.to_string()))?;
        match emit {
            Emit::Json => emit_json(&json!({ "valid": valid })),
            Emit::Text => say!("{}", if valid { "valid" } else { "invalid" }),
        }
        return Ok(if valid { OK } else { NO });
    }
    match find_countermodel(&s, nodes) {
        Some(m) => {
            match emit {
                Emit::Json => emit_json(&json!({ "result": "refuted", "countermodel": to_value(&m) })),
                Emit::Text => say!("refuted\n{}", model_text(&m)),
            }
            Ok(NO)
        }
        None => {
            match emit {
                Emit::Json => emit_json(&json!({ "result": "unknown", "nodes": nodes })),
                Emit::Text => say!("unknown: no countermodel with at most {nodes} nodes"),
            }
            Ok(UNKNOWN)
        }
    }
}

struct ProveArgs<'a> {
    fragment: Option<FragmentArg>,
    max_depth: Option<usize>,
    fresh_budget: Option<usize>,
    countermodel_nodes: Option<usize>,
    cut_free: bool,
    sequent: &'a str,
}

fn run_prove(emit: Emit, a: ProveArgs) -> Outcome {
    let goal = sequent(a.sequent)?;
    let mut cfg = SearchConfig { cut_free: a.cut_free, ..SearchConfig::default() };
    if let Some(v) = a.max_depth {
        cfg.max_depth = v;
    }
    if let Some(v) = a.fresh_budget {
        cfg.max_fresh_nominals = v;
    }
    if let Some(v) = a.countermodel_nodes {
        cfg.countermodel_nodes = v;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let result = match a.fragment {
        Some(FragmentArg::Hylo) => prove_hylo(&goal, &cfg).map_err(|e| usage(e.to_string()))?,
        None => prove(&goal, &cfg),
    };
    let code = match &result {
        SearchResult::Proved(_) => OK,
        SearchResult::Refuted(_) => NO,
        SearchResult::Unknown(_) => UNKNOWN,
    };
    match (emit, &result) {
        (Emit::Json, SearchResult::Proved(d)) => emit_json(&json!({ "result": "proved", "derivation": to_value(d) })),
        (Emit::Json, SearchResult::Refuted(m)) => emit_json(&json!({ "result": "refuted", "countermodel": to_value(m) })),
        (Emit::Json, SearchResult::Unknown(r)) => emit_json(&json!({ "result": "unknown", "report": to_value(r) })),
        (Emit::Text, SearchResult::Proved(d)) => say_raw!("proved\n{}", render(d)),
        (Emit::Text, SearchResult::Refuted(m)) => say!("refuted\n{}", model_text(m)),
        (Emit::Text, SearchResult::Unknown(r)) => say!("unknown\n{}", serde_json::to_string(r).expect("reports serialize")),
    }
    Ok(code)
}

/// Problems with a derivation, empty when it checks.
fn derivation_problems(d: &Derivation, fragment: Option<FragmentArg>) -> Vec<String> {
    let mut out: Vec<String> = match check_derivation(d) {
        Ok(()) => Vec::new(),
        Err(vs) => vs.iter().map(ToString::to_string).collect(),
    };
    if fragment == Some(FragmentArg::Hylo) {
        if !is_hylo(d) {
            out.push("a sequent lies outside H(@)".into());
        }
        for r in d.rules_used().into_iter().filter(|r| r.is_comparison_rule()) {
            out.push(format!("comparison rule {r} used"));
        }
    }
    out
}

fn run_check(emit: Emit, file: &Path, fragment: Option<FragmentArg>) -> Outcome {
    let d = load_derivation(file)?;
    let problems = derivation_problems(&d, fragment);
    match emit {
        Emit::Json => emit_json(&json!({ "ok": problems.is_empty(), "violations": problems })),
        Emit::Text if problems.is_empty() => say!("ok  {}", seq_text(&d.conclusion)),
        Emit::Text => {
            for p in &problems {
                say!("violation: {p}");
            }
        }
    }
    Ok(if problems.is_empty() { OK } else { NO })
}

fn run_cutfree(emit: Emit, file: &Path, trace: bool) -> Outcome {
    let d = load_derivation(file)?;
    let (out, steps): (Derivation, Vec<ReductionStep>) =
        eliminate_cuts_traced(&d, DEFAULT_STEP_LIMIT).map_err(|e| Failure(NO, e.to_string()))?;
    match emit {
        Emit::Json if trace => emit_json(&json!({ "derivation": to_value(&out), "trace": to_value(&steps) })),
        Emit::Json => emit_json(&to_value(&out)),
        Emit::Text => {
            if trace {
                for s in &steps {
                    say!("{s}");
                }
            }
            say_raw!("{}", render(&out));
        }
    }
    Ok(OK)
}

/// Outcome for one corpus file: `None` when it passes.
fn corpus_entry(path: &Path) -> Option<String> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Some(e.to_string()),
    };
    if let Ok(d) = serde_json::from_str::<Derivation>(&text) {
        let problems = derivation_problems(&d, None);
        return (!problems.is_empty()).then(|| problems.join("; "));
    }
    if serde_json::from_str::<HybridDataModel>(&text).is_ok() {
        return None;
    }
    match serde_json::from_str::<DataGraph>(&text) {
        Ok(dg) => ingest_datagraph(&dg).err().map(|e| e.to_string()),
        Err(_) => Some("neither a derivation, a model nor a data graph".into()),
    }
}

fn fuzz_failures(n: usize) -> usize {
    let seed = std::env::var("HXPROOF_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::small();
    let mut failures = 0;
    for _ in 0..n {
        let d = ProofGen::new(&mut rng, &sig, 2).derivation(25);
        let noms = d.conclusion.nominals();
        let valid = (0..20).all(|_| random_model(&mut rng, &sig, 5, noms.iter()).check_sequent_validity(&d.conclusion).unwrap_or(false));
        if check_derivation(&d).is_err() || !valid {
            failures += 1;
        }
    }
    failures
}

fn run_corpus(emit: Emit, dir: &Path, fuzz: usize) -> Outcome {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<Option<String>> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || corpus_entry(f))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Some("checker panicked".into()))).collect()
    });
    let fuzz_failed = fuzz_failures(fuzz);
    let failed = results.iter().filter(|r| r.is_some()).count() + usize::from(fuzz_failed > 0);
    let name = |p: &PathBuf| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    match emit {
        Emit::Json => {
            let rows: Vec<Value> = files
                .iter()
                .zip(&results)
                .map(|(f, r)| json!({ "file": name(f), "ok": r.is_none(), "error": r }))
                .collect();
            emit_json(&json!({ "files": rows, "fuzz": { "cases": fuzz, "failures": fuzz_failed }, "ok": failed == 0 }));
        }
        Emit::Text => {
            if files.is_empty() {
                say!("warning: no JSON files in {}", dir.display());
            }
            for (f, r) in files.iter().zip(&results) {
                match r {
                    None => say!("pass  {}", name(f)),
                    Some(e) => say!("FAIL  {}: {e}", name(f)),
                }
            }
            if fuzz > 0 {
                say!("fuzz  {fuzz} cases, {fuzz_failed} failures");
            }
        }
    }
    Ok(if failed == 0 { OK } else { NO })
}

fn run(cli: Cli) -> Outcome {
    let emit = cli.emit;
    match cli.command {
        Command::Parse { kind, text } => run_parse(emit, kind, &text),
        Command::Eval { model, at, formula } => run_eval(emit, &model, at.as_deref(), &formula),
        Command::Entail { model, countermodel_nodes, sequent } => {
            run_entail(emit, model.as_deref(), countermodel_nodes, &sequent)
        }
        Command::Prove { fragment, max_depth, fresh_budget, countermodel_nodes, cut_free, sequent } => run_prove(
            emit,
            ProveArgs { fragment, max_depth, fresh_budget, countermodel_nodes, cut_free, sequent: &sequent },
        ),
        Command::Check { fragment, file } => run_check(emit, &file, fragment),
        Command::Cutfree { trace, file } => run_cutfree(emit, &file, trace),
        Command::Corpus { dir, fuzz } => run_corpus(emit, &dir, fuzz),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
