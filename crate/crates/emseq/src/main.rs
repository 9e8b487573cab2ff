//! Command-line front end: reproducible batch runs over the sequence.
//!
//! Exit codes: 0 all requested gates pass, 1 gate failure, 2 usage error.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use emseq::config::Thresholds;
use emseq::engine::{alpha, EngineKind, Generator, StepTrace};
use emseq::index::count_occurrences;
use emseq::io::{load_bits, store_bits, store_trace_csv};
use emseq::rtree::{build_rn, build_tn, export_dot, zeta_stats, DotOptions};
use emseq::verify::{
    balance_report, check_first_two_complement, check_prop41, check_proximity_triangle,
    growth_report, prop31_residuals, scan_lemma, summary_csv, theorem1_residuals, LemmaId,
    VerdictReport,
};
use emseq::{BitSequence, EmError, Word};

const NAIVE_LIMIT: u64 = 100_000;

/// Lookahead bits generated beyond n so the b+ match lengths near position n
/// (and hence the x index of R_n) are not truncated by the sequence end.
const RN_LOOKAHEAD: u64 = 64;

#[derive(Parser)]
#[command(name = "emseq", version, about = "Generate and analyse the Ehrenfeucht-Mycielski binary sequence")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Fast,
    Naive,
}

impl Engine {
    fn kind(self) -> EngineKind {
        match self {
            Engine::Fast => EngineKind::Fast,
            Engine::Naive => EngineKind::Naive,
        }
    }

    fn name(self) -> &'static str {
        self.kind().name()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Binary,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the first n bits; optionally emit the step trace.
    Gen {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        /// Allow the naive engine beyond its quadratic-cost limit.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-step trace as CSV to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Occurrence counts, alpha(n), and the frequency report.
    Stats {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long)]
        force: bool,
        /// Words to count occurrences of (repeatable).
        #[arg(short, long)]
        word: Vec<String>,
        /// Word length for the frequency gate (1 or 2).
        #[arg(short = 'l', long, default_value_t = 1)]
        word_len: u32,
        /// Comma-separated checkpoints; defaults to powers of ten up to n.
        #[arg(long)]
        checkpoints: Option<String>,
        /// Threshold overrides, key=value lines.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Summary of the repeated-word set R_n.
    Rn {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Build the trie of R_n, export DOT, and report its statistics.
    Tree {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long)]
        force: bool,
        /// Write a Graphviz rendering of the trie to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Truncate the DOT rendering below this depth.
        #[arg(long)]
        max_depth: Option<u32>,
        /// Disable balance colouring in the DOT rendering.
        #[arg(long)]
        no_color: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Run the verifier suite: pattern scanners and residual gates.
    Verify {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long)]
        force: bool,
        /// Which forbidden pattern to scan: 4.1, 4.2, 4.3, 4.4, or all.
        #[arg(long, default_value = "all")]
        lemma: String,
        /// Longest word length examined by the scanners.
        #[arg(long, default_value_t = 10)]
        maxlen: u32,
        #[arg(long)]
        checkpoints: Option<String>,
        /// Occurrence triples sampled for the proximity check.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// RNG seed for the sampled checks; recorded in the report.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Summary table, one CSV line per check.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Growth gates: second-occurrence positions i_k and alpha(n)/log2(n).
    Growth {
        #[arg(short, long)]
        n: u64,
        #[arg(long, value_enum, default_value = "fast")]
        engine: Engine,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        checkpoints: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

/// Everything a run depends on; embedded in each JSON artifact so the run
/// can be reproduced from the artifact alone.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    n: u64,
    engine: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    word_len: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_word_len: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checkpoints: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    thresholds: Option<Thresholds>,
}

impl RunConfig {
    fn new(command: &str, n: u64, engine: Engine) -> Self {
        RunConfig {
            command: command.to_string(),
            n,
            engine: engine.name().to_string(),
            word_len: None,
            max_word_len: None,
            checkpoints: None,
            rng_seed: None,
            samples: None,
            thresholds: None,
        }
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("emseq: {msg}");
    ExitCode::from(2)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), EmError> {
    let tmp = path.with_extension(format!(
        "tmp.{}",
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), EmError> {
    match path {
        Some(p) => atomic_write(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn parse_checkpoints(spec: Option<&str>, n: u64) -> Result<Vec<u64>, String> {
    let cps = match spec {
        Some(text) => {
            let mut cps = Vec::new();
            for part in text.split(',') {
                let v: u64 = part
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad checkpoint {part:?}"))?;
                cps.push(v);
            }
            cps
        }
        None => {
            let mut cps: Vec<u64> = std::iter::successors(Some(1000u64), |c| c.checked_mul(10))
                .take_while(|&c| c <= n)
                .collect();
            if cps.last() != Some(&n) {
                cps.push(n);
            }
            cps
        }
    };
    if cps.is_empty() || cps.windows(2).any(|w| w[1] <= w[0]) {
        return Err("checkpoints must be strictly increasing and nonempty".into());
    }
    if *cps.last().unwrap() > n {
        return Err(format!("checkpoint beyond n={n}"));
    }
    Ok(cps)
}

fn load_thresholds(path: Option<&Path>) -> Result<Thresholds, EmError> {
    match path {
        Some(p) => Thresholds::from_file(p),
        None => Ok(Thresholds::default()),
    }
}

fn cache_path(n: u64) -> Option<PathBuf> {
    std::env::var_os("EMSEQ_CACHE_DIR").map(|dir| Path::new(&dir).join(format!("em_{n}.emsq")))
}

/// Returns the first n bits, using EMSEQ_CACHE_DIR when set. Traces are
/// reconstructed by validated replay when a cached file is used.
fn obtain(
    n: u64,
    kind: EngineKind,
    need_traces: bool,
) -> Result<(BitSequence, Vec<StepTrace>), EmError> {
    let path = cache_path(n);
    if let Some(p) = &path {
        if p.is_file() {
            let seq = load_bits(&mut File::open(p)?)?;
            if seq.len() == n {
                if !need_traces {
                    return Ok((seq, Vec::new()));
                }
                return Ok(Generator::from_sequence(&seq, kind)?.into_parts());
            }
        }
    }
    let (seq, traces) = Generator::generate(n, kind)?;
    if let Some(p) = path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut payload = Vec::new();
        store_bits(&seq, &mut payload)?;
        atomic_write(&p, &payload)?;
    }
    Ok((seq, traces))
}

fn json_artifact<T: Serialize>(config: &RunConfig, body_key: &str, body: &T) -> Vec<u8> {
    let mut root = BTreeMap::new();
    root.insert("config", serde_json::to_value(config).unwrap());
    root.insert(body_key, serde_json::to_value(body).unwrap());
    let mut bytes = serde_json::to_vec_pretty(&root).unwrap();
    bytes.push(b'\n');
    bytes
}

fn gate_exit(all_pass: bool) -> ExitCode {
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn check_common(n: u64, engine: Engine, force: bool) -> Option<ExitCode> {
    if n < 3 {
        return Some(usage(&format!("n must be at least 3, got {n}")));
    }
    if matches!(engine, Engine::Naive) && n > NAIVE_LIMIT && !force {
        return Some(usage(&format!(
            "naive engine is quadratic; refusing n > {NAIVE_LIMIT} without --force"
        )));
    }
    None
}

fn fail(err: EmError) -> ExitCode {
    eprintln!("emseq: {err}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(err) => fail(err),
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, EmError> {
    match cmd {
        Cmd::Gen { n, engine, force, format, out, trace } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            let need_traces = trace.is_some();
            let (seq, traces) = obtain(n, engine.kind(), need_traces)?;
            let mut payload = Vec::new();
            match format {
                Format::Text => {
                    payload.extend_from_slice(seq.to_string().as_bytes());
                    payload.push(b'\n');
                }
                Format::Binary => store_bits(&seq, &mut payload)?,
            }
            emit(out.as_deref(), &payload)?;
            if let Some(trace_path) = trace {
                let mut csv = Vec::new();
                store_trace_csv(&traces, &mut csv)?;
                atomic_write(&trace_path, &csv)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Stats { n, engine, force, word, word_len, checkpoints, config, json_out } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            if !(1..=2).contains(&word_len) {
                return Ok(usage("word length for the frequency gate must be 1 or 2"));
            }
            let cps = match parse_checkpoints(checkpoints.as_deref(), n) {
                Ok(c) => c,
                Err(e) => return Ok(usage(&e)),
            };
            let thresholds = load_thresholds(config.as_deref())?;
            let mut words = Vec::new();
            for w in &word {
                let parsed: Word = match w.parse() {
                    Ok(p) => p,
                    Err(_) => return Ok(usage(&format!("bad word {w:?}: expected 0/1 string of length 1..=63"))),
                };
                words.push(parsed);
            }
            let (seq, traces) = obtain(n, engine.kind(), true)?;
            let mut counts = BTreeMap::new();
            for w in &words {
                counts.insert(w.to_string(), count_occurrences(&seq, w, 1, n)?);
            }
            let balance = balance_report(&seq, word_len, &cps, &thresholds)?;

            #[derive(Serialize)]
            struct StatsBody {
                alpha: u32,
                counts: BTreeMap<String, u64>,
                balance: VerdictReport,
            }
            let body = StatsBody { alpha: alpha(&traces, n), counts, balance };
            let mut config = RunConfig::new("stats", n, engine);
            config.word_len = Some(word_len);
            config.checkpoints = Some(cps);
            config.thresholds = Some(thresholds);
            let pass = body.balance.pass;
            emit(json_out.as_deref(), &json_artifact(&config, "stats", &body))?;
            Ok(gate_exit(pass))
        }

        Cmd::Rn { n, engine, force, json_out } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            let (seq, _) = obtain(n + RN_LOOKAHEAD, engine.kind(), false)?;
            let build = build_rn(&seq, n)?;

            #[derive(Serialize)]
            struct RnBody {
                n: u64,
                size: u64,
                x_index: u64,
                identity_holds: bool,
                max_len: u32,
                ending_in_0: u64,
                ending_in_1: u64,
                bad_words: u64,
            }
            let body = RnBody {
                n,
                size: build.set.len(),
                x_index: build.x_index,
                identity_holds: build.identity_holds(),
                max_len: build.set.max_len(),
                ending_in_0: build.set.count_last_bit(0),
                ending_in_1: build.set.count_last_bit(1),
                bad_words: build.set.bad_word_count(&seq),
            };
            let pass = body.identity_holds;
            let config = RunConfig::new("rn", n, engine);
            emit(json_out.as_deref(), &json_artifact(&config, "rn", &body))?;
            Ok(gate_exit(pass))
        }

        Cmd::Tree { n, engine, force, dot, max_depth, no_color, json_out } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            let (seq, _) = obtain(n + RN_LOOKAHEAD, engine.kind(), false)?;
            let build = build_rn(&seq, n)?;
            let tree = build_tn(&build.set);
            let stats = zeta_stats(&tree, &build.set, &seq);
            if let Some(dot_path) = dot {
                let rendering = export_dot(
                    &tree,
                    &DotOptions { color_balance: !no_color, max_depth },
                );
                atomic_write(&dot_path, rendering.as_bytes())?;
            }
            let config = RunConfig::new("tree", n, engine);
            emit(json_out.as_deref(), &json_artifact(&config, "tree", &stats))?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Verify {
            n, engine, force, lemma, maxlen, checkpoints, samples, seed, config, json_out, csv_out,
        } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            let lemmas: Vec<LemmaId> = if lemma == "all" {
                LemmaId::ALL.to_vec()
            } else {
                match lemma.parse() {
                    Ok(id) => vec![id],
                    Err(_) => return Ok(usage(&format!("unknown lemma {lemma:?}: expected 4.1..4.4 or all"))),
                }
            };
            let cps = match parse_checkpoints(checkpoints.as_deref(), n) {
                Ok(c) => c,
                Err(e) => return Ok(usage(&e)),
            };
            let thresholds = load_thresholds(config.as_deref())?;
            let (seq, traces) = obtain(n, engine.kind(), true)?;

            let mut reports = Vec::new();
            for id in lemmas {
                reports.push(scan_lemma(&seq, id, maxlen, n)?);
            }
            reports.push(check_prop41(&seq, maxlen, n)?);
            reports.push(check_first_two_complement(&seq, maxlen, n)?);
            reports.push(check_proximity_triangle(&seq, samples, seed));
            reports.push(prop31_residuals(&seq, &traces, &cps, &thresholds)?);
            reports.push(theorem1_residuals(&seq, 1, &cps, &thresholds)?);
            reports.push(theorem1_residuals(&seq, 2, &cps, &thresholds)?);
            reports.push(balance_report(&seq, 1, &cps, &thresholds)?);
            reports.push(balance_report(&seq, 2, &cps, &thresholds)?);
            let all_pass = reports.iter().all(|r| r.pass);

            let mut run_config = RunConfig::new("verify", n, engine);
            run_config.max_word_len = Some(maxlen);
            run_config.checkpoints = Some(cps);
            run_config.rng_seed = Some(seed);
            run_config.samples = Some(samples);
            run_config.thresholds = Some(thresholds);
            if let Some(csv_path) = csv_out {
                atomic_write(&csv_path, summary_csv(&reports).as_bytes())?;
            }
            emit(json_out.as_deref(), &json_artifact(&run_config, "reports", &reports))?;
            Ok(gate_exit(all_pass))
        }

        Cmd::Growth { n, engine, force, checkpoints, config, json_out } => {
            if let Some(code) = check_common(n, engine, force) {
                return Ok(code);
            }
            let cps = match parse_checkpoints(checkpoints.as_deref(), n) {
                Ok(c) => c,
                Err(e) => return Ok(usage(&e)),
            };
            let thresholds = load_thresholds(config.as_deref())?;
            let (seq, traces) = obtain(n, engine.kind(), true)?;
            let report = growth_report(&seq, &traces, &cps, &thresholds);
            let pass = report.pass;
            let mut run_config = RunConfig::new("growth", n, engine);
            run_config.checkpoints = Some(cps);
            run_config.thresholds = Some(thresholds);
            emit(json_out.as_deref(), &json_artifact(&run_config, "growth", &report))?;
            Ok(gate_exit(pass))
        }
    }
}
