mod config;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use structag::corpus::{
    default_chunk_categories, extract_chunks, load_corpus, make_folds, parse_pos_lines, write_columnar, write_corpus,
    write_corpus_to, Corpus, Format, TaggedSentence,
};
use structag::decoder::{parse_span, Parse, ViterbiOptions};
use structag::eval::{cross_validate, evaluate, CrossValConfig, EvalReport, Measure, Mode};
use structag::features::{default_patterns, parse_patterns};
use structag::maxent::IisConfig;
use structag::source::{save_source, ProbSource, Registry, TrainConfig};
use structag::synthetic::synthetic_treebank;
use structag::treebank::{ChunkTree, Child, PhraseCat};
use structag::vocab::Vocabulary;
use structag_server::AppState;

use config::FileConfig;

#[derive(Parser)]
#[command(name = "structag", version, about = "Partial parsing with structural tags")]
struct Cli {
    /// TOML file with defaults for the flags below; flags given explicitly win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a probability source on a treebank and write the model file.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Model file to write.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Decode POS-tagged spans, one per line, into trees.
    Parse {
        #[command(flatten)]
        decode: DecodeArgs,
        /// What to print for each input line.
        #[arg(long, value_enum, default_value_t = Output::Trees)]
        output: Output,
    },
    /// Chunk POS-tagged sentences, one per line, into major phrases.
    Chunk {
        #[command(flatten)]
        decode: DecodeArgs,
        /// Print `[NP der/ART Mann/NN] sieht/VVFIN` instead of full trees.
        #[arg(long)]
        flat: bool,
    },
    /// Score predictions against gold trees.
    Evaluate {
        /// Gold corpus.
        #[arg(long)]
        gold: PathBuf,
        /// Predicted trees, aligned one-to-one with the gold trees.
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        pred: Option<PathBuf>,
        /// Decode the gold POS sequences with this model instead of reading predictions.
        /// In treebank mode the gold corpus is cut into chunks first.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Format of both corpora; guessed from the extension if omitted.
        #[arg(long)]
        format: Option<Format>,
        /// treebank or chunking.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        beam: Option<usize>,
        /// Also print a machine-readable `key=value` block.
        #[arg(long)]
        key_values: bool,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// K-fold cross-validation with optional learning curve.
    Crossval {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Number of folds.
        #[arg(long)]
        folds: Option<usize>,
        /// Seed of the fold partition.
        #[arg(long)]
        seed: Option<u64>,
        /// treebank (cut into chunks first) or chunking (whole sentences).
        #[arg(long)]
        mode: Option<Mode>,
        /// Training sizes for a learning curve, e.g. `500,1000,2000`.
        #[arg(long, value_delimiter = ',')]
        curve: Vec<usize>,
        /// Directory receiving one `<measure>.dat` file per measure.
        #[arg(long, requires = "curve")]
        curve_out: Option<PathBuf>,
        #[arg(long)]
        beam: Option<usize>,
        /// Also print the averaged report as `key=value` lines.
        #[arg(long)]
        key_values: bool,
    },
    /// Cut every tree into its maximal chunks and write them as a corpus.
    ExtractChunks {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Chunk categories, e.g. `NP,PP,AP`.
        #[arg(long, value_delimiter = ',')]
        categories: Vec<String>,
        /// Output file; the format follows the extension, columnar otherwise.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the annotation server.
    Serve {
        /// Model to load; without one every decoding request fails with 503.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Enable `/v1/save`, appending accepted trees to this columnar file.
        #[arg(long, value_name = "FILE")]
        allow_write: Option<PathBuf>,
        #[arg(long)]
        beam: Option<usize>,
    },
    /// Generate a synthetic treebank.
    Synth {
        #[arg(long, default_value_t = 1000)]
        sentences: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Defaults to the extension of `--out`, else bracketed.
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Trees,
    Tags,
}

#[derive(Args)]
struct VocabArgs {
    /// File listing the allowed POS tags, one per line.
    #[arg(long)]
    tagset: Option<PathBuf>,
    /// File listing the allowed phrase labels, one per line.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Accept any tag or label.
    #[arg(long)]
    open_vocab: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// Treebank file.
    #[arg(long)]
    corpus: PathBuf,
    /// bracketed or columnar; guessed from the extension if omitted.
    #[arg(long)]
    format: Option<Format>,
    #[command(flatten)]
    vocab: VocabArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// maxent or interpolation.
    #[arg(long)]
    source: Option<String>,
    /// IIS iterations [default: 3].
    #[arg(long)]
    iterations: Option<usize>,
    /// Minimum training count of a feature [default: 1].
    #[arg(long)]
    cutoff: Option<usize>,
    /// Feature pattern file; the built-in patterns otherwise.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Variance of a Gaussian prior on the weights; none by default.
    #[arg(long)]
    prior_variance: Option<f64>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input file of `word/POS` or `POS` tokens; standard input if omitted.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file; standard output if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Keep only this many states per position.
    #[arg(long)]
    beam: Option<usize>,
}

fn vocabulary(args: &VocabArgs, file: &FileConfig) -> Result<Vocabulary> {
    if args.open_vocab || file.open_vocab == Some(true) {
        return Ok(Vocabulary::permissive());
    }
    let tags = args.tagset.as_deref().or(file.tagset.as_deref());
    let labels = args.labels.as_deref().or(file.labels.as_deref());
    Ok(Vocabulary::from_files(tags, labels)?)
}

fn format_of(path: &Path, given: Option<Format>) -> Result<Format> {
    given
        .or_else(|| Format::from_path(path))
        .with_context(|| format!("cannot tell the format of {}; pass --format", path.display()))
}

fn read_treebank(args: &CorpusArgs, file: &FileConfig) -> Result<Corpus> {
    let vocab = vocabulary(&args.vocab, file)?;
    let format = format_of(&args.corpus, args.format)?;
    let corpus = load_corpus(&args.corpus, format, &vocab).with_context(|| format!("loading {}", args.corpus.display()))?;
    ensure!(!corpus.is_empty(), "{} contains no sentences", args.corpus.display());
    Ok(corpus)
}

fn train_config(args: &TrainArgs, file: &FileConfig) -> Result<(String, TrainConfig)> {
    let source = args.source.clone().or(file.source.clone()).unwrap_or_else(|| "maxent".into());
    let iterations = args.iterations.or(file.iterations).unwrap_or(3);
    ensure!(iterations >= 1, "iterations must be at least 1");
    let patterns = match args.patterns.as_ref().or(file.patterns.as_ref()) {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_patterns(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => default_patterns(),
    };
    let cfg = TrainConfig {
        patterns,
        cutoff: args.cutoff.or(file.cutoff).unwrap_or(1),
        iis: IisConfig {
            max_iterations: iterations,
            prior_variance: args.prior_variance.or(file.prior_variance),
            ..IisConfig::default()
        },
    };
    Ok((source, cfg))
}

fn viterbi(beam: Option<usize>, file: &FileConfig) -> Result<ViterbiOptions> {
    let beam = beam.or(file.beam);
    ensure!(beam != Some(0), "beam must be at least 1");
    Ok(ViterbiOptions { beam })
}

fn mode(given: Option<Mode>, file: &FileConfig) -> Result<Mode> {
    match (given, &file.mode) {
        (Some(m), _) => Ok(m),
        (None, Some(s)) => s.parse().map_err(anyhow::Error::msg),
        (None, None) => Ok(Mode::Treebank),
    }
}

fn load_model(path: &Path) -> Result<Box<dyn ProbSource>> {
    Registry::standard()
        .load(path)
        .with_context(|| format!("loading model {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_train(corpus: &CorpusArgs, train: &TrainArgs, out: &Path, file: &FileConfig) -> Result<()> {
    let (source, cfg) = train_config(train, file)?;
    let corpus = read_treebank(corpus, file)?;
    let data: Vec<_> = corpus.tagged()?.into_iter().map(|s| s.tags).collect();
    let model = Registry::standard().train(&source, &data, &cfg)?;
    let info = model.info();
    println!("source: {source}");
    println!("sentences: {}", data.len());
    println!("structural tags: {}", info.futures);
    if let Some(n) = info.features {
        println!("features: {n}");
        if n == 0 {
            eprintln!(
                "warning: no feature pattern instance occurs at least {} times; the model is uniform",
                cfg.cutoff
            );
        }
    }
    for (i, ll) in info.log_likelihood.iter().enumerate() {
        println!("iteration {i}: log-likelihood {ll:.6}");
    }
    if let Some([l1, l2, l3]) = info.lambdas {
        println!("lambdas: {l1:.6} {l2:.6} {l3:.6}");
    }
    save_source(&*model, out).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn decode_input(args: &DecodeArgs, file: &FileConfig) -> Result<Vec<Parse>> {
    let model = load_model(&args.model)?;
    let opts = viterbi(args.beam, file)?;
    let text = match &args.input {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let (sentences, _) = parse_pos_lines(&text, &Vocabulary::permissive())?;
    let known = model.futures();
    let mut unseen = BTreeSet::new();
    let mut out = Vec::with_capacity(sentences.len());
    for (i, s) in sentences.iter().enumerate() {
        unseen.extend(s.tags.iter().filter(|t| known.with_pos(t).is_empty()).map(|t| t.to_string()));
        out.push(parse_span(&*model, &s.tags, &s.words, opts).with_context(|| format!("sentence {}", i + 1))?);
    }
    if !unseen.is_empty() {
        let list: Vec<_> = unseen.into_iter().collect();
        eprintln!("warning: POS tags not seen in training: {}", list.join(" "));
    }
    Ok(out)
}

fn cmd_parse(args: &DecodeArgs, what: Output, file: &FileConfig) -> Result<()> {
    let parses = decode_input(args, file)?;
    let mut w = output(args.out.as_deref())?;
    match what {
        Output::Trees => {
            for p in &parses {
                writeln!(w, "{}", p.tree.to_bracketed())?;
            }
        }
        Output::Tags => {
            let tagged: Vec<_> = parses
                .iter()
                .map(|p| TaggedSentence::new(p.tree.leaves.iter().map(|l| l.word.clone()).collect(), p.tags.clone()))
                .collect();
            write_columnar(&mut w, &tagged)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn token(t: &ChunkTree, leaf: usize) -> String {
    let l = &t.leaves[leaf];
    match &l.word {
        Some(w) => format!("{w}/{}", l.pos),
        None => l.pos.to_string(),
    }
}

fn leaves_of(t: &ChunkTree, c: Child, out: &mut Vec<usize>) {
    match c {
        Child::Leaf(l) => out.push(l),
        Child::Node(n) => {
            for &k in &t.nodes[n].children {
                leaves_of(t, k, out);
            }
        }
    }
}

fn flat_chunks(t: &ChunkTree) -> String {
    let mut parts = Vec::new();
    for &c in &t.top {
        match c {
            Child::Leaf(l) => parts.push(token(t, l)),
            Child::Node(n) => {
                let mut ls = Vec::new();
                leaves_of(t, c, &mut ls);
                let inner: Vec<_> = ls.into_iter().map(|l| token(t, l)).collect();
                parts.push(format!("[{} {}]", t.nodes[n].label, inner.join(" ")));
            }
        }
    }
    parts.join(" ")
}

fn cmd_chunk(args: &DecodeArgs, flat: bool, file: &FileConfig) -> Result<()> {
    let parses = decode_input(args, file)?;
    let mut w = output(args.out.as_deref())?;
    for p in &parses {
        let line = if flat { flat_chunks(&p.tree) } else { p.tree.to_bracketed() };
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    gold: &Path,
    pred: Option<&Path>,
    model: Option<&Path>,
    format: Option<Format>,
    mode_flag: Option<Mode>,
    beam: Option<usize>,
    key_values: bool,
    vocab: &VocabArgs,
    file: &FileConfig,
) -> Result<()> {
    let vocab = vocabulary(vocab, file)?;
    let mode = mode(mode_flag, file)?;
    let gold_corpus = load_corpus(gold, format_of(gold, format)?, &vocab).with_context(|| format!("loading {}", gold.display()))?;
    let report = match (pred, model) {
        (Some(p), _) => {
            let pred_corpus = load_corpus(p, format_of(p, format)?, &vocab).with_context(|| format!("loading {}", p.display()))?;
            ensure!(
                gold_corpus.len() == pred_corpus.len(),
                "{} has {} trees but {} has {}",
                gold.display(),
                gold_corpus.len(),
                p.display(),
                pred_corpus.len()
            );
            for (i, (g, q)) in gold_corpus.sentences.iter().zip(&pred_corpus.sentences).enumerate() {
                ensure!(g.len() == q.len(), "tree {}: {} gold tokens, {} predicted", i + 1, g.len(), q.len());
            }
            EvalReport::compute(&gold_corpus.sentences, &pred_corpus.sentences, mode)
        }
        (None, Some(m)) => {
            let source = load_model(m)?;
            let test = prepare(gold_corpus, mode);
            let refs: Vec<&ChunkTree> = test.sentences.iter().collect();
            evaluate(&*source, &refs, mode, viterbi(beam, file)?)?
        }
        (None, None) => bail!("either --pred or --model is required"),
    };
    print!("{}", report.to_table());
    if key_values {
        println!();
        print!("{}", report.to_key_values());
    }
    Ok(())
}

fn prepare(corpus: Corpus, mode: Mode) -> Corpus {
    match mode {
        Mode::Treebank => extract_chunks(&corpus, &default_chunk_categories()),
        Mode::Chunking => corpus,
    }
}

struct CrossvalArgs<'a> {
    folds: Option<usize>,
    seed: Option<u64>,
    mode: Option<Mode>,
    curve: &'a [usize],
    curve_out: Option<&'a Path>,
    beam: Option<usize>,
    key_values: bool,
}

fn cmd_crossval(corpus: &CorpusArgs, train: &TrainArgs, args: CrossvalArgs, file: &FileConfig) -> Result<()> {
    let mode = mode(args.mode, file)?;
    let corpus_path = corpus.corpus.display().to_string();
    let (source, train) = train_config(train, file)?;
    let items = prepare(read_treebank(corpus, file)?, mode);
    let folds = args.folds.or(file.folds).unwrap_or(10);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let plan = make_folds(items.len(), folds, seed)?;
    let cfg = CrossValConfig {
        source: source.clone(),
        train: train.clone(),
        mode,
        viterbi: viterbi(args.beam, file)?,
        curve: args.curve.to_vec(),
    };
    let result = cross_validate(&items.sentences, &plan, &Registry::standard(), &cfg)?;

    println!(
        "# crossval corpus={corpus_path} items={} folds={folds} seed={seed} source={source} mode={mode} iterations={} cutoff={}",
        items.len(),
        train.iis.max_iterations,
        train.cutoff
    );
    let sizes = plan.fold_sizes();
    for (i, r) in result.folds.iter().enumerate() {
        println!("\n## fold {} (test items {})", i + 1, sizes[i]);
        print!("{}", r.to_table());
    }
    println!("\n## average over {folds} folds");
    print!("{}", result.mean.to_table());
    if args.key_values {
        println!();
        print!("{}", result.mean.to_key_values());
    }
    if !result.curve.is_empty() {
        let measures: Vec<Measure> = result.mean.rows.iter().map(|r| r.measure).collect();
        println!("\n## learning curve (recall, %)");
        let header: Vec<&str> = measures.iter().map(|m| m.key()).collect();
        println!("size\t{}", header.join("\t"));
        for p in &result.curve {
            let cells: Vec<String> = measures
                .iter()
                .map(|&m| p.report.row(m).map(|r| format!("{:.2}", 100.0 * r.recall)).unwrap_or_default())
                .collect();
            println!("{}\t{}", p.size, cells.join("\t"));
        }
        if let Some(dir) = args.curve_out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for &m in &measures {
                let path = dir.join(format!("{}.dat", m.key()));
                let body = format!("# seed={seed} source={source} mode={mode}\n{}", result.curve_data(m));
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn cmd_extract_chunks(corpus: &CorpusArgs, categories: &[String], out: &Path, file: &FileConfig) -> Result<()> {
    let corpus = read_treebank(corpus, file)?;
    let cats = if categories.is_empty() {
        default_chunk_categories()
    } else {
        categories
            .iter()
            .map(|c| PhraseCat::label(c.as_str()).with_context(|| format!("bad category {c:?}")))
            .collect::<Result<_>>()?
    };
    let chunks = extract_chunks(&corpus, &cats);
    write_corpus(&chunks, out, Format::from_path(out).unwrap_or(Format::Columnar))
        .with_context(|| format!("writing {}", out.display()))?;
    println!("{} chunks from {} sentences", chunks.len(), corpus.len());
    Ok(())
}

fn cmd_serve(model: Option<&Path>, host: &str, port: u16, allow_write: Option<PathBuf>, beam: Option<usize>, file: &FileConfig) -> Result<()> {
    let source: Option<Arc<dyn ProbSource>> = match model {
        Some(p) => Some(Arc::from(load_model(p)?)),
        None => {
            eprintln!("warning: no model given; decoding requests will fail");
            None
        }
    };
    let mut state = AppState::new(source, allow_write);
    state.viterbi = viterbi(beam, file)?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .with_context(|| format!("binding {host}:{port}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        structag_server::serve(listener, state).await?;
        Ok(())
    })
}

fn cmd_synth(sentences: usize, seed: u64, out: Option<&Path>, format: Option<Format>) -> Result<()> {
    let corpus = Corpus::new(synthetic_treebank(sentences, seed), Vocabulary::permissive());
    let format = format.or_else(|| out.and_then(Format::from_path)).unwrap_or(Format::Bracketed);
    match out {
        Some(p) => write_corpus(&corpus, p, format).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut w = io::BufWriter::new(io::stdout().lock());
            write_corpus_to(&corpus, &mut w, format)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Train { corpus, train, out } => cmd_train(corpus, train, out, &file),
        Command::Parse { decode, output } => cmd_parse(decode, *output, &file),
        Command::Chunk { decode, flat } => cmd_chunk(decode, *flat, &file),
        Command::Evaluate {
            gold,
            pred,
            model,
            format,
            mode,
            beam,
            key_values,
            vocab,
        } => cmd_evaluate(gold, pred.as_deref(), model.as_deref(), *format, *mode, *beam, *key_values, vocab, &file),
        Command::Crossval {
            corpus,
            train,
            folds,
            seed,
            mode,
            curve,
            curve_out,
            beam,
            key_values,
        } => cmd_crossval(
            corpus,
            train,
            CrossvalArgs {
                folds: *folds,
                seed: *seed,
                mode: *mode,
                curve,
                curve_out: curve_out.as_deref(),
                beam: *beam,
                key_values: *key_values,
            },
            &file,
        ),
        Command::ExtractChunks { corpus, categories, out } => cmd_extract_chunks(corpus, categories, out, &file),
        Command::Serve {
            model,
            host,
            port,
            allow_write,
            beam,
        } => cmd_serve(model.as_deref(), host, *port, allow_write.clone(), *beam, &file),
        Command::Synth {
            sentences,
            seed,
            out,
            format,
        } => cmd_synth(*sentences, *seed, out.as_deref(), *format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
