//! `heli`: train, identify, evaluate and corpus-pipeline subcommands.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use heli::eval::{self, ConfusionMatrix};
use heli::pipeline::{self, PipelineConfig};
use heli::{
    identify_stream, run_pipeline, train_models, Corpus, CorpusFormat, HeliParams, Identifier,
    LanguageCode, LanguageRegistry, ModelSet, StreamOptions,
};

#[derive(Parser, Debug)]
#[command(name = "heli", version, about = "HeLI language identification toolkit")]
struct Cli {
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true, env = "ULI_LOG", default_value = "warn")]
    log_level: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train language models from a directory of corpus files.
    Train(TrainArgs),
    /// Identify the language of each input line.
    Identify(IdentifyArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Build a labeled sentence corpus from crawled pages.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
struct ThreadArgs {
    /// Worker threads; 0 or unset uses every available core.
    #[arg(long, env = "ULI_THREADS")]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn count(&self) -> Option<usize> {
        self.threads.filter(|&n| n > 0)
    }

    fn install_global(&self) -> anyhow::Result<()> {
        if let Some(n) = self.count() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring worker threads")?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Indexed if every non-blank line starts with digits and a tab.
    Auto,
    /// One sentence per line.
    Plain,
    /// `number<TAB>sentence` per line.
    Indexed,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Registry TSV (`code<TAB>name<TAB>relevant`); the built-in registry if omitted.
    #[arg(long, env = "ULI_REGISTRY")]
    registry: Option<PathBuf>,
    /// Directory of corpus files named `<code>` or `<code>.<anything>`.
    #[arg(long, env = "ULI_CORPORA")]
    corpora: PathBuf,
    /// Output model directory.
    #[arg(long, env = "ULI_MODEL_DIR")]
    out: PathBuf,
    /// Longest character n-gram.
    #[arg(long, env = "ULI_N_MAX", default_value_t = HeliParams::default().n_max)]
    n_max: usize,
    /// Minimum relative frequency for a feature to be kept.
    #[arg(long, env = "ULI_CUTOFF", default_value_t = HeliParams::default().cutoff)]
    cutoff: f64,
    /// Score for a feature missing from a model.
    #[arg(long, env = "ULI_PENALTY", default_value_t = HeliParams::default().penalty)]
    penalty: f64,
    /// Disable the whole-word feature domain.
    #[arg(long, env = "ULI_NO_WORDS")]
    no_words: bool,
    /// Corpus file format.
    #[arg(long, value_enum, env = "ULI_FORMAT", default_value = "auto")]
    format: FormatArg,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args, Debug)]
struct IdentifyArgs {
    /// Model directory written by `train`.
    #[arg(long, env = "ULI_MODEL_DIR")]
    models: PathBuf,
    /// Input file with one sentence per line; standard input if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Append every language's score as `code<TAB>score` pairs.
    #[arg(long, env = "ULI_SCORES")]
    scores: bool,
    /// Lines read per parallel batch.
    #[arg(long, env = "ULI_BATCH_SIZE", default_value_t = StreamOptions::default().batch_size)]
    batch_size: usize,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["gold", "confusion"])))]
struct EvaluateArgs {
    /// Gold labels: `sentence<TAB>code` or one code per line.
    #[arg(long, requires = "pred")]
    gold: Option<PathBuf>,
    /// Predicted labels aligned with the gold file by line.
    #[arg(long, requires = "gold")]
    pred: Option<PathBuf>,
    /// A ready-made confusion matrix, as written to `confusion.tsv`.
    #[arg(long, conflicts_with_all = ["gold", "pred"])]
    confusion: Option<PathBuf>,
    /// Registry TSV; the built-in registry if omitted.
    #[arg(long, env = "ULI_REGISTRY")]
    registry: Option<PathBuf>,
    /// Directory for the confusion matrix, per-language and track tables.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// Pages as a `url<TAB>base64(text)` file or a directory of `.txt` files.
    #[arg(long)]
    pages: PathBuf,
    /// Model directory written by `train`.
    #[arg(long, env = "ULI_MODEL_DIR")]
    models: PathBuf,
    /// Output `sentence<TAB>code` file.
    #[arg(long)]
    out: PathBuf,
    /// Output per-stage count table.
    #[arg(long)]
    report: PathBuf,
    /// Smallest share of text a relevant language needs to count.
    #[arg(long, env = "ULI_MIN_SHARE", default_value_t = PipelineConfig::default().min_share)]
    min_share: f64,
    #[command(flatten)]
    threads: ThreadArgs,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .init();
    let outcome = match cli.command {
        Command::Train(a) => train(a),
        Command::Identify(a) => identify(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Pipeline(a) => run_pages(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_registry(path: Option<&Path>) -> anyhow::Result<LanguageRegistry> {
    match path {
        Some(p) => Ok(LanguageRegistry::load(p)?),
        None => Ok(LanguageRegistry::default_uli()),
    }
}

fn load_identifier(dir: &Path) -> anyhow::Result<Identifier> {
    let set =
        ModelSet::load(dir).with_context(|| format!("loading models from {}", dir.display()))?;
    log::info!(
        "loaded {} language models from {}",
        set.models().len(),
        dir.display()
    );
    Ok(Identifier::new(set))
}

fn detect_format(path: &Path) -> anyhow::Result<CorpusFormat> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut any = false;
    for line in BufReader::new(file).split(b'\n') {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        any = true;
        let digits = line.iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 || line.get(digits) != Some(&b'\t') {
            return Ok(CorpusFormat::Plain);
        }
    }
    Ok(if any {
        CorpusFormat::Indexed
    } else {
        CorpusFormat::Plain
    })
}

/// Groups corpus files by the language code before the first dot of their name.
fn corpus_files(dir: &Path) -> anyhow::Result<BTreeMap<LanguageCode, Vec<PathBuf>>> {
    let mut files = BTreeMap::<LanguageCode, Vec<PathBuf>>::new();
    let entries = std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))?;
    for entry in entries {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        let stem = name.split('.').next().unwrap_or_default();
        match LanguageCode::new(stem) {
            Ok(code) => files.entry(code).or_default().push(path),
            Err(_) => log::warn!(
                "skipping {}: name does not start with a language code",
                path.display()
            ),
        }
    }
    for paths in files.values_mut() {
        paths.sort();
    }
    Ok(files)
}

fn train(args: TrainArgs) -> Result<(), Failure> {
    let params = HeliParams {
        n_max: args.n_max,
        cutoff: args.cutoff,
        penalty: args.penalty,
        use_words: !args.no_words,
    };
    params.validate().map_err(|e| Failure::Usage(e.into()))?;
    args.threads.install_global()?;
    let registry = load_registry(args.registry.as_deref())?;
    let files = corpus_files(&args.corpora)?;
    if files.is_empty() {
        return Err(anyhow::anyhow!("no corpus files in {}", args.corpora.display()).into());
    }
    let mut corpora = Vec::with_capacity(files.len());
    for (code, paths) in files {
        let mut sentences = Vec::new();
        for path in &paths {
            let format = match args.format {
                FormatArg::Auto => detect_format(path)?,
                FormatArg::Plain => CorpusFormat::Plain,
                FormatArg::Indexed => CorpusFormat::Indexed,
            };
            let corpus = Corpus::load(path, code.clone(), format).map_err(anyhow::Error::from)?;
            log::info!(
                "{}: {} sentences ({format:?})",
                path.display(),
                corpus.len()
            );
            sentences.extend(corpus.sentences);
        }
        let mut corpus = Corpus::from_sentences(code, &sentences);
        corpus.source = args.corpora.display().to_string();
        corpora.push(corpus);
    }
    let set = train_models(&corpora, params, registry).map_err(anyhow::Error::from)?;
    set.save(&args.out).map_err(anyhow::Error::from)?;
    eprintln!(
        "trained {} languages from {} sentences into {}",
        set.models().len(),
        corpora.iter().map(Corpus::len).sum::<usize>(),
        args.out.display()
    );
    Ok(())
}

fn identify(args: IdentifyArgs) -> Result<(), Failure> {
    let id = load_identifier(&args.models)?;
    let input: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(BufReader::new(
            File::open(p).with_context(|| format!("opening {}", p.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let output: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut output = BufWriter::new(output);
    let options = StreamOptions {
        threads: args.threads.count(),
        batch_size: args.batch_size,
        with_scores: args.scores,
    };
    let stats = identify_stream(&id, input, &mut output, &options).map_err(anyhow::Error::from)?;
    output.flush().context("writing output")?;
    eprintln!(
        "identified {} sentences in {:.3}s ({:.1} sentences/s)",
        stats.sentences,
        stats.elapsed.as_secs_f64(),
        stats.sentences_per_second()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let registry = load_registry(args.registry.as_deref())?;
    let cm = match (&args.confusion, &args.gold, &args.pred) {
        (Some(path), _, _) => {
            ConfusionMatrix::load_tsv(path, registry).map_err(anyhow::Error::from)?
        }
        (None, Some(gold), Some(pred)) => {
            let golds = eval::read_labels(gold).map_err(anyhow::Error::from)?;
            let preds = eval::read_labels(pred).map_err(anyhow::Error::from)?;
            if golds.len() != preds.len() {
                return Err(anyhow::anyhow!(
                    "{} has {} labels but {} has {}",
                    gold.display(),
                    golds.len(),
                    pred.display(),
                    preds.len()
                )
                .into());
            }
            ConfusionMatrix::from_labels(&golds, &preds, registry).map_err(anyhow::Error::from)?
        }
        _ => {
            return Err(Failure::Usage(anyhow::anyhow!(
                "give --gold and --pred, or --confusion"
            )))
        }
    };
    let scores = cm.scores();
    print!("{}", scores.tracks_tsv());
    if let Some(dir) = &args.out {
        eval::write_report(&cm, &scores, dir).map_err(anyhow::Error::from)?;
    }
    Ok(())
}

fn run_pages(args: PipelineArgs) -> Result<(), Failure> {
    if !(args.min_share > 0.0 && args.min_share <= 1.0) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--min-share must be in (0, 1], got {}",
            args.min_share
        )));
    }
    args.threads.install_global()?;
    let id = load_identifier(&args.models)?;
    let pages = pipeline::read_pages(&args.pages).map_err(anyhow::Error::from)?;
    let config = PipelineConfig {
        min_share: args.min_share,
    };
    let (sentences, report) = run_pipeline(pages, &id, &config).map_err(anyhow::Error::from)?;
    pipeline::write_sentences(&sentences, &args.out).map_err(anyhow::Error::from)?;
    pipeline::write_report(&report, &args.report).map_err(anyhow::Error::from)?;
    for (name, count) in report.rows() {
        log::info!("{name}: {count}");
    }
    eprintln!(
        "labeled {} sentences from {} pages",
        report.sentences_labeled, report.pages_in
    );
    Ok(())
}
