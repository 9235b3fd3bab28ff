use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pft_core::circuit::{plan_pieces, resource_metrics, schedule, synth_gamma, resource_comparison, Circuit, PieceableCircuit};
use pft_core::code::StabilizerCode;
use pft_core::par;
use pft_core::parsec::DecoderChoice;
use pft_core::pauli::Pauli;
use pft_core::verify::{
    check_logical_action, detect_nonstabilizer, oracle_agreement, search_min_pieces, verify_1ft, Options,
    PieceSearch, Pipeline,
};
use pft_core::window::{check_gamma_availability, check_window_implications, constant_stabilizer, is_error_correcting};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "pft", version, about = "Pieceable fault-tolerant gate synthesis and verification")]
struct Cli {
    /// Worker threads for parallel stages. PFT_WORKERS takes precedence.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Code properties and normalizer scans.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Synthesize and verify Γ gates.
    #[command(subcommand)]
    Gate(GateCmd),
    /// Resource counts.
    #[command(subcommand)]
    Resources(ResourcesCmd),
    /// Structural analyses of pieced circuits.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Minimum piece count by exhaustive search.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Parameters, CSS/degeneracy flags and Γ availability.
    Info { code: String },
    /// Every normalizer up to a weight with its window properties.
    Scan {
        code: String,
        #[arg(long)]
        max_weight: Option<usize>,
    },
}

#[derive(Args)]
struct CircuitArgs {
    /// Circuit file (text or JSON).
    circuit: PathBuf,
    /// One code per block, builtin name or file.
    #[arg(long, num_args = 1.., required = true)]
    codes: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decoder {
    Auto,
    Parsec,
    CssParsec,
    Lookup,
}

#[derive(Subcommand)]
enum GateCmd {
    /// Round-robin Γ circuit with composite-qubit piecing.
    Synth {
        #[arg(long, num_args = 1.., required = true)]
        codes: Vec<String>,
        /// Target letters, one per block, e.g. ZZ.
        #[arg(long)]
        target: String,
        /// Explicit normalizer per block, comma separated.
        #[arg(long, value_delimiter = ',')]
        normalizers: Vec<String>,
        /// Emit a single piece.
        #[arg(long)]
        unpieced: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive single-fault verification.
    Verify {
        #[command(flatten)]
        input: CircuitArgs,
        #[arg(long, value_enum, default_value = "auto")]
        decoder: Decoder,
        /// Also search for the minimum piece count, up to this many pieces.
        #[arg(long)]
        search_pieces: Option<usize>,
        /// Fraction of fault sites replayed on dense states.
        #[arg(long)]
        oracle_sample: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep round traces for failing sites.
        #[arg(long)]
        traces: bool,
        /// Skip the logical-action check.
        #[arg(long)]
        skip_action: bool,
    },
}

#[derive(Subcommand)]
enum ResourcesCmd {
    /// CX, CCZ, ancilla and volume of a circuit.
    Count { circuit: PathBuf },
    /// Pieceable CCZ against magic-state injection.
    #[command(alias = "table1")]
    Compare {
        #[arg(long)]
        markdown: bool,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Whether intermediate cuts leave the stabilizer formalism.
    Nonstabilizer {
        #[command(flatten)]
        input: CircuitArgs,
        /// Single cut; every cut when omitted.
        #[arg(long)]
        cut: Option<usize>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Fewest pieces for which some gate order and split passes.
    Pieces {
        #[command(flatten)]
        input: CircuitArgs,
        #[arg(long, default_value_t = 4)]
        max_pieces: usize,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

struct Run {
    out: Output,
    pass: bool,
}

impl Run {
    fn json(v: Value, pass: bool) -> Self {
        Run { out: Output::Json(v), pass }
    }
}

fn workers(cli: &Cli) -> Result<Option<usize>> {
    match std::env::var("PFT_WORKERS") {
        Ok(s) if !s.trim().is_empty() => {
            let w = s.trim().parse().with_context(|| format!("PFT_WORKERS={s}"))?;
            Ok(Some(w))
        }
        _ => Ok(cli.workers),
    }
}

fn load_codes(specs: &[String]) -> Result<Vec<StabilizerCode>> {
    specs
        .iter()
        .map(|s| StabilizerCode::load(s).with_context(|| format!("loading code {s}")))
        .collect()
}

fn load_pieceable(a: &CircuitArgs) -> Result<PieceableCircuit> {
    let text = fs::read_to_string(&a.circuit).with_context(|| format!("reading {}", a.circuit.display()))?;
    let c = Circuit::parse(&text)?;
    let codes = load_codes(&a.codes)?;
    Ok(PieceableCircuit::from_circuit(&c, &codes)?)
}

fn to_value<T: serde::Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn envelope(kind: &str, mut body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": kind });
    if let (Some(o), Some(b)) = (v.as_object_mut(), body.as_object_mut()) {
        o.append(b);
    }
    v
}

/// Lowest-weight representative of the coset of `letter`, preferring one
/// whose constant stabilizer corrects.
fn pick_normalizer(code: &StabilizerCode, letter: char) -> Result<Pauli> {
    let report = check_gamma_availability(code)?;
    if let Some(w) = report.gamma.iter().find(|g| g.logical == letter).and_then(|g| g.witness) {
        return Ok(w);
    }
    let id = code.coset_id(&code.logical(letter)?);
    let mut scan = code.normalizer_scan(code.n())?;
    scan.sort_by_key(|(p, w, _)| (*w, *p));
    scan.into_iter()
        .find(|(_, _, c)| *c == id)
        .map(|(p, _, _)| p)
        .context("no normalizer in the requested coset")
}

fn code_info(spec: &str) -> Result<Run> {
    let code = StabilizerCode::load(spec)?;
    let mut body = json!({
        "code": code.label(),
        "n": code.n(),
        "k": code.k(),
        "d": code.distance()?,
        "css": code.is_css()?,
        "nondegenerate": code.is_nondegenerate()?,
        "weight_two_stabilizer": code.has_weight_two_stabilizer()?,
        "stabilizers": code.gens().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    });
    if code.k() == 1 {
        let r = check_gamma_availability(&code)?;
        body["gamma"] = to_value(&r.gamma)?;
        body["anticommuting_pair"] = to_value(&r.anticommuting_pair)?;
        body["availability_consistent"] = json!(r.consistent());
    }
    Ok(Run::json(envelope("code info", body), true))
}

fn code_scan(spec: &str, max_weight: Option<usize>) -> Result<Run> {
    let code = StabilizerCode::load(spec)?;
    let d = code.distance()?;
    let scan = code.normalizer_scan(max_weight.unwrap_or(d))?;
    let mut rows = Vec::with_capacity(scan.len());
    let mut counterexamples = 0;
    for (p, w, coset) in &scan {
        let cs = constant_stabilizer(&code, p)?;
        let imp = check_window_implications(&code, p)?;
        counterexamples += usize::from(!imp.counterexamples().is_empty());
        rows.push(json!({
            "normalizer": p.to_string(),
            "weight": w,
            "coset": coset,
            "constant_stabilizer": cs.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "correcting": is_error_correcting(&code, p)?,
            "implication_parts": imp.parts.iter().map(|i| [i.hypothesis, i.conclusion]).collect::<Vec<_>>(),
        }));
    }
    let body = json!({
        "code": code.label(),
        "max_weight": max_weight.unwrap_or(d),
        "count": rows.len(),
        "implication_counterexamples": counterexamples,
        "normalizers": rows,
    });
    Ok(Run::json(envelope("code scan", body), counterexamples == 0))
}

fn gate_synth(codes: &[String], target: &str, normalizers: &[String], unpieced: bool, as_json: bool) -> Result<Run> {
    let loaded = load_codes(codes)?;
    let letters: Vec<char> = target.chars().collect();
    if letters.len() != loaded.len() {
        bail!("target {target} has {} letters for {} codes", letters.len(), loaded.len());
    }
    if !normalizers.is_empty() && normalizers.len() != loaded.len() {
        bail!("{} normalizers for {} codes", normalizers.len(), loaded.len());
    }
    let mut blocks = Vec::new();
    for (j, (code, letter)) in loaded.into_iter().zip(&letters).enumerate() {
        let p = match normalizers.get(j) {
            Some(s) => s.parse::<Pauli>()?,
            None => pick_normalizer(&code, *letter)?,
        };
        blocks.push((code, p));
    }
    let rr = synth_gamma(&blocks, target)?;
    let pc = if unpieced { rr } else { rr.with_pieces(plan_pieces(&rr)?.pieces)? };
    let c = pc.to_circuit();
    let out = if as_json {
        Output::Json(c.to_json())
    } else {
        Output::Text(c.to_text())
    };
    Ok(Run { out, pass: true })
}

struct VerifyArgs<'a> {
    input: &'a CircuitArgs,
    decoder: Decoder,
    search_pieces: Option<usize>,
    oracle_sample: Option<f64>,
    seed: u64,
    traces: bool,
    skip_action: bool,
}

fn choose_decoder(pc: &PieceableCircuit, d: Decoder) -> Result<DecoderChoice> {
    Ok(match d {
        Decoder::Parsec => DecoderChoice::Parsec,
        Decoder::CssParsec => DecoderChoice::CssParsec,
        Decoder::Lookup => DecoderChoice::Lookup,
        Decoder::Auto => {
            let mut css = true;
            for b in &pc.blocks {
                css &= b.code.is_css()?;
            }
            if css && Pipeline::new(pc, DecoderChoice::CssParsec).is_ok() {
                DecoderChoice::CssParsec
            } else {
                DecoderChoice::Parsec
            }
        }
    })
}

fn gate_verify(a: VerifyArgs, workers: Option<usize>, timing: bool) -> Result<Run> {
    let pc = load_pieceable(a.input)?;
    let choice = choose_decoder(&pc, a.decoder)?;
    let opts = Options { workers, traces: a.traces };
    let mut body = json!({ "circuit": a.input.circuit.display().to_string(), "qubits": pc.n_total() });
    let mut pass = true;

    match verify_1ft(&pc, choice, &opts) {
        Ok(mut r) => {
            if !timing {
                r.elapsed_ms = None;
            }
            pass &= r.pass;
            if let Some(f) = a.oracle_sample {
                let p = Pipeline::new(&pc, choice)?;
                let t = Instant::now();
                let o = par::with_workers(workers, || oracle_agreement(&p, &r.verdicts, f, a.seed))?;
                pass &= o.agree;
                let mut v = json!({
                    "seed": o.seed,
                    "fraction": o.fraction,
                    "checked": o.checks.len(),
                    "agree": o.agree,
                    "mismatches": to_value(&o.mismatches().collect::<Vec<_>>())?,
                });
                if timing {
                    v["elapsed_ms"] = json!(t.elapsed().as_millis() as u64);
                }
                body["oracle"] = v;
            }
            body["verification"] = to_value(&r)?;
        }
        // The decoder precondition can fail where a search is still meaningful.
        Err(e) if a.search_pieces.is_some() => {
            body["verification"] = json!({ "skipped": e.to_string() });
        }
        Err(e) => return Err(e.into()),
    }

    if !a.skip_action {
        let t = Instant::now();
        match check_logical_action(&pc) {
            Ok(r) => {
                pass &= r.pass;
                let mut v = to_value(&r)?;
                if timing {
                    v["elapsed_ms"] = json!(t.elapsed().as_millis() as u64);
                }
                body["logical_action"] = v;
            }
            Err(e) => body["logical_action"] = json!({ "skipped": e.to_string() }),
        }
    }

    if let Some(max) = a.search_pieces {
        let v = search_value(&pc, max, workers, timing)?;
        pass &= v["found"].as_bool().unwrap_or(false);
        body["search"] = v;
    }
    body["pass"] = json!(pass);
    Ok(Run::json(envelope("gate verify", body), pass))
}

fn search_value(pc: &PieceableCircuit, max: usize, workers: Option<usize>, timing: bool) -> Result<Value> {
    let s = PieceSearch::from_pieceable(pc)?;
    let t = Instant::now();
    let mut v = match par::with_workers(workers, || search_min_pieces(&s, max)) {
        Ok(o) => {
            let mut v = to_value(&o)?;
            v["found"] = json!(true);
            v
        }
        Err(e) => json!({ "found": false, "max_pieces": max, "reason": e.to_string() }),
    };
    if timing {
        v["elapsed_ms"] = json!(t.elapsed().as_millis() as u64);
    }
    Ok(v)
}

fn search_pieces(input: &CircuitArgs, max: usize, workers: Option<usize>, timing: bool) -> Result<Run> {
    let pc = load_pieceable(input)?;
    let mut body = search_value(&pc, max, workers, timing)?;
    body["circuit"] = json!(input.circuit.display().to_string());
    let found = body["found"].as_bool().unwrap_or(false);
    Ok(Run::json(envelope("search pieces", body), found))
}

fn analyze_nonstabilizer(input: &CircuitArgs, cut: Option<usize>) -> Result<Run> {
    let pc = load_pieceable(input)?;
    let cuts: Vec<usize> = match cut {
        Some(c) => vec![c],
        None => (0..=pc.pieces.len()).collect(),
    };
    let mut reports = Vec::new();
    let mut agree = true;
    for c in cuts {
        let r = detect_nonstabilizer(&pc, c)?;
        if let Some(o) = &r.oracle {
            agree &= o.nonstabilizer == r.criterion_nonstabilizer;
        }
        reports.push(to_value(&r)?);
    }
    let body = json!({
        "circuit": input.circuit.display().to_string(),
        "routes_agree": agree,
        "cuts": reports,
    });
    Ok(Run::json(envelope("analyze nonstabilizer", body), agree))
}

fn resources_count(path: &PathBuf) -> Result<Run> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c = Circuit::parse(&text)?;
    let scheduled = c.components.iter().any(|x| x.time.is_some());
    let m = if scheduled { resource_metrics(&c)? } else { resource_metrics(&schedule(&c))? };
    let body = json!({
        "circuit": path.display().to_string(),
        "scheduled_here": !scheduled,
        "metrics": to_value(&m)?,
    });
    Ok(Run::json(envelope("resources count", body), true))
}

fn resources_compare(markdown: bool) -> Result<Run> {
    let t = resource_comparison()?;
    let pass = t.identities_hold();
    if markdown {
        let row = |name: &str, m: &pft_core::circuit::ResourceMetrics| {
            format!("| {name} | {} | {} | {} | {} |\n", m.cx_count, m.ccz_count, m.ancilla_count, m.volume)
        };
        let mut s = String::from("| | CX | CCZ | ancilla | volume |\n|---|---|---|---|---|\n");
        s += &row("pieceable", &t.pieceable);
        s += &row("magic state", &t.magic_state);
        let [a, b, c, d] = t.improvement;
        s += &format!("| improvement | {a:.1}% | {b:.1}% | {c:.1}% | {d:.1}% |\n");
        return Ok(Run { out: Output::Text(s), pass });
    }
    let identities: Vec<Value> = t
        .identities
        .iter()
        .map(|(name, got, want)| json!({ "name": name, "computed": got, "stated": want, "hold": got == want }))
        .collect();
    let body = json!({
        "pieceable": to_value(&t.pieceable)?,
        "magic_state": to_value(&t.magic_state)?,
        "improvement_percent": t.improvement,
        "identities": identities,
        "identities_hold": pass,
    });
    Ok(Run::json(envelope("resources compare", body), pass))
}

fn run(cli: &Cli) -> Result<Run> {
    let w = workers(cli)?;
    match &cli.command {
        Command::Code(CodeCmd::Info { code }) => code_info(code),
        Command::Code(CodeCmd::Scan { code, max_weight }) => code_scan(code, *max_weight),
        Command::Gate(GateCmd::Synth {
            codes,
            target,
            normalizers,
            unpieced,
            json,
        }) => gate_synth(codes, target, normalizers, *unpieced, *json),
        Command::Gate(GateCmd::Verify {
            input,
            decoder,
            search_pieces,
            oracle_sample,
            seed,
            traces,
            skip_action,
        }) => gate_verify(
            VerifyArgs {
                input,
                decoder: *decoder,
                search_pieces: *search_pieces,
                oracle_sample: *oracle_sample,
                seed: *seed,
                traces: *traces,
                skip_action: *skip_action,
            },
            w,
            cli.timing,
        ),
        Command::Resources(ResourcesCmd::Count { circuit }) => resources_count(circuit),
        Command::Resources(ResourcesCmd::Compare { markdown }) => resources_compare(*markdown),
        Command::Analyze(AnalyzeCmd::Nonstabilizer { input, cut }) => analyze_nonstabilizer(input, *cut),
        Command::Search(SearchCmd::Pieces { input, max_pieces }) => search_pieces(input, *max_pieces, w, cli.timing),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            let text = match r.out {
                Output::Json(v) => serde_json::to_string_pretty(&v).expect("json values serialize") + "\n",
                Output::Text(s) => s,
            };
            let written = match &cli.output {
                Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if r.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
