//! Command-line front end for the detector pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use dgaembed::datagen::{self, synth_corpus, TrafficProfile, TruthLabel};
use dgaembed::error::Error;
use dgaembed::eval::{run_incremental_experiment, ExperimentConfig};
use dgaembed::persist::ModelFile;
use dgaembed::pipeline::{
    self, feedback_lists, normalize_list, score, train_all, update, LabelSources, RunConfig,
    ScoreInput,
};

#[derive(Parser)]
#[command(
    name = "dgaembed",
    about = "DGA detection via incremental domain embeddings",
    version
)]
struct Cli {
    /// Config file (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed override
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Verdict threshold override
    #[arg(long, global = true)]
    threshold: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled DNS corpus
    GenData(GenDataArgs),
    /// Parse and normalize logs into a document file
    Preprocess(PreprocessArgs),
    /// Train a fresh model from logs and optional labels
    Train(TrainArgs),
    /// Extend an existing model with new logs only
    Update(UpdateArgs),
    /// Score domains or logs against a trained model
    Score(ScoreArgs),
    /// Metrics against a truth file, or the incremental-vs-batch
    /// timing experiment
    Evaluate(EvaluateArgs),
    /// Dump embeddings as TSV for external tools
    ExportEmbeddings(ExportArgs),
    /// Normalize a raw domain list into token form
    NormalizeList(NormalizeArgs),
}

#[derive(Args)]
struct GenDataArgs {
    /// Output directory for logs.tsv, truth.tsv, blacklist.txt,
    /// whitelist.txt
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    benign_hosts: u32,
    #[arg(long, default_value_t = 10)]
    char_bots: u32,
    #[arg(long, default_value_t = 10)]
    word_bots: u32,
    #[arg(long, default_value_t = 5000)]
    benign_pool: u32,
    #[arg(long, default_value_t = 1.1)]
    zipf_exponent: f64,
    #[arg(long, default_value_t = 20.0)]
    queries_per_host_per_window: f64,
    #[arg(long, default_value_t = 144)]
    windows: u32,
    #[arg(long, default_value_t = 600)]
    window_size: i64,
    #[arg(long, default_value_t = 5)]
    dga_per_window: u32,
    #[arg(long, default_value_t = 0.3)]
    blacklist_coverage: f64,
    #[arg(long, default_value_t = 0.3)]
    whitelist_coverage: f64,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Input log files (.tsv or .tsv.gz)
    #[arg(long, required = true, num_args = 1..)]
    logs: Vec<PathBuf>,
    /// Output document file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, required = true, num_args = 1..)]
    logs: Vec<PathBuf>,
    #[arg(long)]
    blacklist: Option<PathBuf>,
    #[arg(long)]
    whitelist: Option<PathBuf>,
    /// Ground-truth labels used for classifier training
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output model file
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct UpdateArgs {
    #[arg(long)]
    model: PathBuf,
    /// New log files; previously trained logs are never re-read
    #[arg(long, required = true, num_args = 1..)]
    logs: Vec<PathBuf>,
    #[arg(long)]
    blacklist: Option<PathBuf>,
    #[arg(long)]
    whitelist: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    /// Plain domain list, one per line
    #[arg(long, conflicts_with = "logs")]
    domains: Option<PathBuf>,
    /// Log files to reduce to unique tokens
    #[arg(long, num_args = 1..)]
    logs: Vec<PathBuf>,
    /// Verdict TSV output (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also stage feedback list additions into this directory
    #[arg(long)]
    feedback_dir: Option<PathBuf>,
    /// Blacklist-addition score threshold
    #[arg(long, default_value_t = 0.95)]
    feedback_high: f64,
    /// Whitelist-addition score threshold
    #[arg(long, default_value_t = 0.05)]
    feedback_low: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    /// Trained model (metrics mode)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Restrict DGA tokens to one family: char_dga or word_dga
    #[arg(long)]
    family: Option<String>,
    /// Run the incremental-vs-batch experiment over these logs
    #[arg(long, num_args = 1..)]
    logs: Vec<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pieces: usize,
    /// Write the machine-readable experiment report here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.embed.seed = seed;
    }
    if let Some(threshold) = cli.threshold {
        cfg.threshold = threshold;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: &PathBuf, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::GenData(args) => {
            let profile = TrafficProfile {
                n_benign_hosts: args.benign_hosts,
                n_char_bots: args.char_bots,
                n_word_bots: args.word_bots,
                benign_pool_size: args.benign_pool,
                zipf_exponent: args.zipf_exponent,
                queries_per_host_per_window: args.queries_per_host_per_window,
                n_windows: args.windows,
                window_size: args.window_size,
                dga_domains_per_window: args.dga_per_window,
                blacklist_coverage: args.blacklist_coverage,
                whitelist_coverage: args.whitelist_coverage,
                seed: cli.seed.unwrap_or(1),
            };
            let corpus = synth_corpus(&profile)?;
            std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
            write_out(
                &args.out_dir.join("logs.tsv"),
                &(corpus.log_lines.join("\n") + "\n"),
            )?;
            write_out(
                &args.out_dir.join("truth.tsv"),
                &datagen::write_truth(&corpus.truth),
            )?;
            write_out(
                &args.out_dir.join("blacklist.txt"),
                &(corpus.blacklist.join("\n") + "\n"),
            )?;
            write_out(
                &args.out_dir.join("whitelist.txt"),
                &(corpus.whitelist.join("\n") + "\n"),
            )?;
            let dga = corpus.truth.values().filter(|l| l.is_dga()).count();
            println!(
                "wrote {} queries, {} unique tokens ({} DGA) to {}",
                corpus.log_lines.len(),
                corpus.truth.len(),
                dga,
                args.out_dir.display()
            );
            Ok(())
        }
        Command::Preprocess(args) => {
            let (docs, stats) = pipeline::load_documents(&cfg, &args.logs)?;
            write_out(&args.out, &dgaembed::preprocess::write_documents(&docs))?;
            eprintln!("{}", stats.summary());
            println!("wrote {} documents to {}", docs.len(), args.out.display());
            Ok(())
        }
        Command::Train(args) => {
            let labels = LabelSources {
                blacklist: args.blacklist,
                whitelist: args.whitelist,
                truth: args.truth,
            };
            let report = train_all(&cfg, &args.logs, &labels, &args.model)?;
            print!("{}", report.render());
            println!("model written to {}", args.model.display());
            Ok(())
        }
        Command::Update(args) => {
            let labels = LabelSources {
                blacklist: args.blacklist,
                whitelist: args.whitelist,
                truth: args.truth,
            };
            let report = update(&cfg, &args.model, &args.logs, &labels)?;
            print!("{}", report.render());
            println!("model updated at {}", args.model.display());
            Ok(())
        }
        Command::Score(args) => {
            let input = match (&args.domains, args.logs.is_empty()) {
                (Some(domains), _) => ScoreInput::Domains(domains.clone()),
                (None, false) => ScoreInput::Logs(args.logs.clone()),
                (None, true) => {
                    return Err(Error::Config("score needs --domains or --logs".into()))
                }
            };
            let verdicts = score(&cfg, &args.model, &input)?;
            let rendered = pipeline::write_verdicts(&verdicts);
            match &args.out {
                Some(path) => write_out(path, &rendered)?,
                None => print!("{rendered}"),
            }
            if let Some(dir) = &args.feedback_dir {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                let (black, white) =
                    feedback_lists(&verdicts, args.feedback_high, args.feedback_low)?;
                write_out(
                    &dir.join("blacklist_additions.txt"),
                    &(black.join("\n") + "\n"),
                )?;
                write_out(
                    &dir.join("whitelist_additions.txt"),
                    &(white.join("\n") + "\n"),
                )?;
                eprintln!(
                    "staged {} blacklist and {} whitelist additions for review",
                    black.len(),
                    white.len()
                );
            }
            Ok(())
        }
        Command::Evaluate(args) => {
            if !args.logs.is_empty() {
                // experiment mode
                let (docs, _) = pipeline::load_documents(&cfg, &args.logs)?;
                let truth_text =
                    std::fs::read_to_string(&args.truth).map_err(|e| Error::io(&args.truth, e))?;
                let truth = datagen::read_truth(&truth_text)?;
                let exp_cfg = ExperimentConfig {
                    embed: cfg.embed.clone(),
                    classifier: cfg.classifier.clone(),
                    threshold: cfg.threshold,
                    pieces: args.pieces,
                    seed: cfg.embed.seed,
                };
                let report = run_incremental_experiment::<f32>(&docs, &truth, &exp_cfg)?;
                print!("{}", report.render_table());
                if let Some(path) = &args.report {
                    write_out(path, &report.render_kv())?;
                }
                Ok(())
            } else {
                let model = args.model.ok_or_else(|| {
                    Error::Config("evaluate needs --model (or --logs for experiment mode)".into())
                })?;
                let family = match args.family.as_deref() {
                    None => None,
                    Some(f) => {
                        let label = TruthLabel::parse(f)?;
                        if !label.is_dga() {
                            return Err(Error::Config(
                                "family filter must be char_dga or word_dga".into(),
                            ));
                        }
                        Some(label)
                    }
                };
                let (cm, m) = pipeline::evaluate(&cfg, &model, &args.truth, family)?;
                println!(
                    "tokens={} tp={} fp={} tn={} fn={} unknown={}",
                    cm.total(),
                    cm.tp,
                    cm.fp,
                    cm.tn,
                    cm.fn_,
                    cm.unknown
                );
                println!(
                    "precision={:.4} recall={:.4} fpr={:.6} f1={:.4}{}",
                    m.precision,
                    m.recall,
                    m.fpr,
                    m.f1,
                    if m.degenerate { " (degenerate)" } else { "" }
                );
                Ok(())
            }
        }
        Command::ExportEmbeddings(args) => {
            let model = ModelFile::<f32>::load(&args.model)?;
            let mut buf = Vec::new();
            model
                .embedding
                .export_embeddings(&mut buf)
                .map_err(|e| Error::io(&args.out, e))?;
            std::fs::write(&args.out, buf).map_err(|e| Error::io(&args.out, e))?;
            println!(
                "exported {} vectors to {}",
                model.embedding.vocab().len(),
                args.out.display()
            );
            Ok(())
        }
        Command::NormalizeList(args) => {
            let text =
                std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
            let (tokens, skipped) = normalize_list(&text, &cfg.normalizer());
            write_out(&args.out, &(tokens.join("\n") + "\n"))?;
            eprintln!("{} tokens written, {} lines skipped", tokens.len(), skipped);
            Ok(())
        }
    }
}
