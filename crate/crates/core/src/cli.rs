//! The `disfix` command line: `correct`, `synth`, `eval` and `serve`.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for
//! bad input data.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{correct, DetectorConfig};
use crate::service::{self, BackendMode, CorrectionView, ServiceConfig};
use crate::synth::{
    builtin_seeds, engine_labeler, evaluate, generate_corpus, read_jsonl, read_seeds, write_jsonl, GeneratorConfig,
    Mix, SynthError,
};
use crate::text::{tokenize, LanguageTag};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Lines handed to the worker pool at a time under `--jobs`.
const BATCH_LINES: usize = 4096;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("output closed")]
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::BrokenPipe => EXIT_OK,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "disfix", version, about = "Disfluency correction for transcripts and speech")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correct transcripts, one utterance per line.
    Correct(CorrectArgs),
    /// Generate a synthetic annotated corpus as JSONL.
    Synth(SynthArgs),
    /// Score the rule engine against an annotated JSONL corpus.
    Eval(EvalArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Lexicon directory with `<lang>/fillers.txt` and `<lang>/editing_terms.txt`.
    #[arg(long, value_name = "DIR")]
    pub lexicons: Option<PathBuf>,
    /// Also treat context-dependent words such as "like" and "well" as fillers.
    #[arg(long)]
    pub ambiguous_fillers: bool,
}

impl LexiconArgs {
    fn detector(&self) -> Result<DetectorConfig, CliError> {
        let cfg = match &self.lexicons {
            Some(dir) => DetectorConfig::load_dir(dir).map_err(usage)?,
            None => DetectorConfig::default(),
        };
        Ok(if self.ambiguous_fillers { cfg.with_ambiguous_fillers() } else { cfg })
    }
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[arg(long, default_value = "en")]
    pub lang: LanguageTag,
    /// Input file; standard input when omitted.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// One JSON correction object per line.
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    /// Fluent text per line (the default).
    #[arg(long)]
    pub text: bool,
    /// Worker threads; output order always follows input order.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Seed sentences, one per line; the built-in set for --lang when omitted.
    #[arg(long, value_name = "PATH")]
    pub seeds: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Proportions such as `Filler=0.5,Repetition=0.5`; `Fluent` leaves seeds untouched.
    #[arg(long, default_value = "Filler=0.25,Repetition=0.25,Correction=0.25,FalseStart=0.25")]
    pub mix: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "en")]
    pub lang: LanguageTag,
    /// Draw fillers and editing phrases from held-out lists the detectors do not know.
    #[arg(long)]
    pub adversarial: bool,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "DISFIX_HOST", default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[arg(long, env = "DISFIX_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "DISFIX_BACKEND_MODE", value_enum, default_value = "mock")]
    pub backend_mode: BackendMode,
    #[arg(long, env = "DISFIX_ASR_URL")]
    pub asr_url: Option<String>,
    #[arg(long, env = "DISFIX_TTS_URL")]
    pub tts_url: Option<String>,
    /// JSON object mapping PCM digests to transcripts, for the mock ASR.
    #[arg(long, env = "DISFIX_ASR_FIXTURES", value_name = "PATH")]
    pub asr_fixtures: Option<PathBuf>,
    #[arg(long, env = "DISFIX_BACKEND_TIMEOUT_MS", default_value_t = 30_000)]
    pub backend_timeout_ms: u64,
    #[arg(long, env = "DISFIX_LEXICONS", value_name = "DIR")]
    pub lexicons: Option<PathBuf>,
    #[arg(long, env = "DISFIX_PROMPTS", value_name = "PATH")]
    pub prompts: Option<PathBuf>,
    /// Seconds an uploaded or synthesized clip stays retrievable.
    #[arg(long, env = "DISFIX_AUDIO_TTL", default_value_t = 900)]
    pub audio_ttl: u64,
    /// Largest accepted upload in bytes (at least 1 MiB).
    #[arg(long, env = "DISFIX_MAX_UPLOAD", default_value_t = service::config::DEFAULT_UPLOAD_BYTES)]
    pub max_upload: usize,
    /// Comma-separated language codes to enable.
    #[arg(long, env = "DISFIX_LANGUAGES", value_delimiter = ',', default_value = "en,hi")]
    pub languages: Vec<LanguageTag>,
    /// Allowed CORS origin; repeat for several, `*` for any.
    #[arg(long = "cors-origin", env = "DISFIX_CORS_ORIGINS", value_delimiter = ',', default_value = "*")]
    pub cors_origins: Vec<String>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl ServeArgs {
    pub fn to_config(&self) -> ServiceConfig {
        ServiceConfig {
            host: self.host,
            port: self.port,
            backend_mode: self.backend_mode,
            asr_url: self.asr_url.clone(),
            tts_url: self.tts_url.clone(),
            asr_fixtures: self.asr_fixtures.clone(),
            backend_timeout_ms: self.backend_timeout_ms,
            lexicon_dir: self.lexicons.clone(),
            prompt_bank_path: self.prompts.clone(),
            audio_ttl_seconds: self.audio_ttl,
            max_upload_bytes: self.max_upload,
            languages: self.languages.clone(),
            cors_origins: self.cors_origins.clone(),
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let result = match cli.command {
        Command::Correct(args) => cmd_correct(&args, &mut stdout.lock(), &mut stderr.lock()),
        Command::Synth(args) => cmd_synth(&args, &mut stdout.lock()),
        Command::Eval(args) => cmd_eval(&args, &mut stdout.lock()),
        Command::Serve(args) => cmd_serve(&args, &mut stdout.lock()),
    };
    match result {
        Ok(code) => code,
        Err(CliError::BrokenPipe) => EXIT_OK,
        Err(e) => {
            eprintln!("disfix: {e}");
            e.exit_code()
        }
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, CliError> {
    match path {
        Some(p) => {
            let f = File::open(p).map_err(|e| usage(format!("cannot open {}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(f)))
        }
        None => Ok(Box::new(BufReader::new(io::stdin()))),
    }
}

fn write_err(e: io::Error) -> CliError {
    if e.kind() == io::ErrorKind::BrokenPipe {
        return CliError::BrokenPipe;
    }
    CliError::Data(format!("write failed: {e}"))
}

fn render_line(line: &str, lang: LanguageTag, cfg: &DetectorConfig, json: bool) -> Result<String, String> {
    let result = correct(&tokenize(line, lang), cfg).map_err(|e| e.to_string())?;
    if json {
        serde_json::to_string(&CorrectionView::from(&result)).map_err(|e| e.to_string())
    } else {
        Ok(result.fluent_text())
    }
}

/// Corrects each input line. A line that fails (invalid UTF-8) is reported
/// on `err` and skipped; the exit code is then 2.
pub fn cmd_correct(args: &CorrectArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = args.lexicon.detector()?;
    cfg.lexicon(args.lang).map_err(usage)?;
    let mut input = open_input(args.input.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs as usize).build().map_err(usage)?;
    let batch_size = if args.jobs > 1 { BATCH_LINES } else { 1 };

    let mut failures = 0usize;
    let mut line_no = 0usize;
    let mut buf = Vec::new();
    let mut batch: Vec<(usize, Result<String, String>)> = Vec::with_capacity(batch_size);
    let mut out = BufWriter::new(out);
    loop {
        buf.clear();
        let read = input.read_until(b'\n', &mut buf).map_err(|e| CliError::Data(format!("read failed: {e}")))?;
        if read > 0 {
            line_no += 1;
            while buf.last().is_some_and(|b| *b == b'\n' || *b == b'\r') {
                buf.pop();
            }
            let line = String::from_utf8(buf.clone()).map_err(|e| format!("invalid UTF-8: {e}"));
            batch.push((line_no, line));
        }
        if batch.len() >= batch_size || (read == 0 && !batch.is_empty()) {
            let rendered: Vec<(usize, Result<String, String>)> = pool.install(|| {
                batch
                    .par_drain(..)
                    .map(|(n, line)| (n, line.and_then(|l| render_line(&l, args.lang, &cfg, args.json))))
                    .collect()
            });
            for (n, r) in rendered {
                match r {
                    Ok(s) => writeln!(out, "{s}").map_err(write_err)?,
                    Err(e) => {
                        failures += 1;
                        writeln!(err, "line {n}: {e}").map_err(write_err)?;
                    }
                }
            }
        }
        if read == 0 {
            break;
        }
    }
    out.flush().map_err(write_err)?;
    Ok(if failures > 0 { EXIT_DATA } else { EXIT_OK })
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mix = Mix::parse(&args.mix).map_err(usage)?;
    let seeds = match &args.seeds {
        Some(path) => read_seeds(path).map_err(usage)?,
        None => builtin_seeds(args.lang),
    };
    if seeds.is_empty() {
        return Err(usage(SynthError::NoSeeds));
    }
    let gen = if args.adversarial {
        GeneratorConfig::adversarial(args.lang)
    } else {
        GeneratorConfig::matched(&args.lexicon.detector()?, args.lang).map_err(usage)?
    };
    let corpus = generate_corpus(&seeds, &mix, args.n, args.seed, &gen).map_err(|e| CliError::Data(e.to_string()))?;
    match &args.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            write_jsonl(&mut w, &corpus).map_err(write_err)?;
            w.flush().map_err(write_err)?;
        }
        None => {
            let mut w = BufWriter::new(stdout);
            write_jsonl(&mut w, &corpus).map_err(write_err)?;
            w.flush().map_err(write_err)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = args.lexicon.detector()?;
    let f = File::open(&args.corpus).map_err(|e| usage(format!("cannot open {}: {e}", args.corpus.display())))?;
    let corpus = read_jsonl(BufReader::new(f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", args.corpus.display())))?;
    let report = match evaluate(&corpus, engine_labeler(&cfg)) {
        Ok(r) => r,
        Err(SynthError::EmptyCorpus) => return Err(usage("empty corpus")),
        Err(e) => return Err(CliError::Data(e.to_string())),
    };
    if args.json {
        let body = serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))?;
        writeln!(out, "{body}").map_err(write_err)?;
    } else {
        write!(out, "{}", report.to_table()).map_err(write_err)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_serve(args: &ServeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = args.to_config();
    config.validate().map_err(usage)?;
    if args.print_config {
        let body = serde_json::to_string_pretty(&config).map_err(usage)?;
        writeln!(out, "{body}").map_err(write_err)?;
        return Ok(EXIT_OK);
    }
    let runtime = tokio::runtime::Runtime::new().map_err(usage)?;
    runtime.block_on(service::serve(config)).map_err(usage)?;
    Ok(EXIT_OK)
}
