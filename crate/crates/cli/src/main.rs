use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use signed_embed::evalkit::{
    balance_audit, kfold_link_prediction, kfold_with_embeddings, sparsity_sweep, write_sweep_csv, EdgeFeatureMode,
    EmbeddingSource, KFoldConfig, Leakage, DEFAULT_FRACTIONS,
};
use signed_embed::sgraph::{load_edge_list, random_connected, synth_balanced, EdgeListSpec, SignColumn};
use signed_embed::trainer::{checkpoint, TrainConfig, TrainError, TrainState, Trainer};
use signed_embed::treewalk::{modified_softmax_all, BfsTree, RelevanceTable};
use signed_embed::{seeds, EmbeddingMatrix, SignedGraph};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "signed-embed", version, about = "Adversarial embeddings for signed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train generator and discriminator embeddings.
    Train(TrainArgs),
    /// k-fold link-sign prediction from trained or supplied embeddings.
    Predict(PredictArgs),
    /// Link-sign prediction under random edge removal.
    Sweep(SweepArgs),
    /// Mean endpoint distance of positive and negative edges.
    Audit(AuditArgs),
    /// Check normalization and decay of the tree distribution.
    CheckTheorems(CheckArgs),
    /// Write a synthetic community-structured signed graph.
    Synth(SynthArgs),
    /// Convert a ratings file into the canonical signed edge list.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct Common {
    /// Signed edge list (`u v sign` lines).
    #[arg(long)]
    graph: PathBuf,
    /// `key=value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct EvalFlags {
    #[arg(long, value_parser = parse_feature)]
    feature: Option<EdgeFeatureMode>,
    #[arg(long, value_parser = parse_leakage)]
    leakage: Option<Leakage>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Continue from a checkpoint written by an earlier run.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    eval: EvalFlags,
    /// Use a fixed embedding file instead of training.
    #[arg(long)]
    emb: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    eval: EvalFlags,
    /// Comma-separated fractions of edges to remove.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    common: Common,
    /// Embedding file; trained from the graph when absent.
    #[arg(long)]
    emb: Option<PathBuf>,
    /// Sampled share of the negative edges.
    #[arg(long, default_value_t = 0.4)]
    fraction: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// Graph to check; mutually exclusive with --synthetic.
    #[arg(long, conflicts_with = "synthetic")]
    graph: Option<PathBuf>,
    /// Random connected graph, e.g. `--synthetic n=100 seed=7`.
    #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
    synthetic: Option<Vec<String>>,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Standard deviation of the random embedding entries.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 2)]
    communities: usize,
    #[arg(long, default_value_t = 50)]
    size: usize,
    #[arg(long, default_value_t = 0.3)]
    p_intra: f64,
    #[arg(long, default_value_t = 0.2)]
    p_inter: f64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Ratings at or above this value become positive edges.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Treat the third column as an explicit +1/-1 sign instead of a rating.
    #[arg(long)]
    explicit_sign: bool,
}

fn parse_feature(s: &str) -> std::result::Result<EdgeFeatureMode, String> {
    s.parse().map_err(|e: signed_embed::Error| e.to_string())
}

fn parse_leakage(s: &str) -> std::result::Result<Leakage, String> {
    s.parse().map_err(|e: signed_embed::Error| e.to_string())
}

/// Training config plus the `eval.*` keys understood by the evaluation
/// commands.
struct Settings {
    kfold: KFoldConfig,
}

impl Settings {
    fn load(common: &Common, eval: Option<&EvalFlags>) -> Result<Settings> {
        let mut kfold = KFoldConfig::default();
        if let Some(path) = &common.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let mut train_lines = String::new();
            for (i, line) in text.lines().enumerate() {
                let trimmed = line.trim();
                match trimmed.strip_prefix("eval.").and_then(|rest| rest.split_once('=')) {
                    Some((k, v)) => set_eval(&mut kfold, k.trim(), v.trim())
                        .with_context(|| format!("{}:{}", path.display(), i + 1))?,
                    None => {
                        train_lines.push_str(line);
                        train_lines.push('\n');
                    }
                }
            }
            kfold
                .train
                .apply_text(&train_lines)
                .with_context(|| format!("config {}", path.display()))?;
        }
        if let Some(seed) = common.seed {
            kfold.train.seed = seed;
            kfold.seed = seed;
        }
        if let Some(t) = common.threads {
            kfold.train.threads = t;
        }
        if let Some(eval) = eval {
            if let Some(f) = eval.feature {
                kfold.feature_mode = f;
            }
            if let Some(l) = eval.leakage {
                kfold.leakage = l;
            }
        }
        kfold.train.validate().context("trainer config")?;
        Ok(Settings { kfold })
    }

    /// Every setting, defaults included, as `key=value` lines.
    fn effective_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.kfold.train.to_text().lines().map(str::to_owned).collect();
        let k = &self.kfold;
        lines.push(format!("eval.k_folds={}", k.k_folds));
        lines.push(format!("eval.feature={}", k.feature_mode));
        lines.push(format!("eval.leakage={}", k.leakage));
        lines.push(format!("eval.source={}", k.source));
        lines.push(format!("eval.seed={}", k.seed));
        lines.push(format!("eval.logreg_iterations={}", k.logreg.iterations));
        lines.push(format!("eval.logreg_learning_rate={}", k.logreg.learning_rate));
        lines
    }

    fn hash(&self) -> u64 {
        let text: String = self
            .effective_lines()
            .into_iter()
            .filter(|l| !l.starts_with("threads="))
            .collect::<Vec<_>>()
            .join("\n");
        seeds::checksum(text.as_bytes())
    }
}

fn set_eval(k: &mut KFoldConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "k_folds" => k.k_folds = value.parse()?,
        "feature" => k.feature_mode = value.parse()?,
        "leakage" => k.leakage = value.parse()?,
        "source" => k.source = value.parse::<EmbeddingSource>()?,
        "seed" => k.seed = value.parse()?,
        "logreg_iterations" => k.logreg.iterations = value.parse()?,
        "logreg_learning_rate" => k.logreg.learning_rate = value.parse()?,
        other => bail!("unknown config key `eval.{other}`"),
    }
    Ok(())
}

struct Provenance {
    lines: Vec<String>,
    json: serde_json::Value,
}

fn provenance(command: &str, settings: &Settings, inputs: &[(&str, u64)]) -> Provenance {
    let mut lines = vec![
        format!("tool=signed-embed {VERSION}"),
        format!("command={command}"),
        format!("config_hash={:016x}", settings.hash()),
    ];
    for (name, sum) in inputs {
        lines.push(format!("input_checksum.{name}={sum:016x}"));
    }
    let effective = settings.effective_lines();
    lines.extend(effective.iter().map(|l| format!("config {l}")));
    let json = json!({
        "tool": format!("signed-embed {VERSION}"),
        "command": command,
        "config_hash": format!("{:016x}", settings.hash()),
        "inputs": inputs.iter().map(|(n, s)| (n.to_string(), json!(format!("{s:016x}")))).collect::<serde_json::Map<_, _>>(),
        "config": effective,
    });
    Provenance { lines, json }
}

fn load_graph(path: &Path) -> Result<SignedGraph> {
    let (g, report) = load_edge_list(&EdgeListSpec::canonical(path)).with_context(|| format!("sgraph: loading {}", path.display()))?;
    report.log(path);
    Ok(g)
}

fn load_embedding(path: &Path) -> Result<EmbeddingMatrix> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    EmbeddingMatrix::read_text(BufReader::new(file)).with_context(|| format!("embedding: reading {}", path.display()))
}

fn file_checksum(path: &Path) -> Result<u64> {
    Ok(seeds::checksum(&fs::read(path).with_context(|| format!("reading {}", path.display()))?))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_embedding(dir: &Path, name: &str, emb: &EmbeddingMatrix, meta: &[String]) -> Result<()> {
    let mut out = create(dir, name)?;
    emb.write_text(&mut out, meta)?;
    out.flush()?;
    Ok(())
}

fn train_state(g: &SignedGraph, cfg: &TrainConfig, resume: Option<&Path>) -> Result<TrainState> {
    let mut state = match resume {
        Some(path) => {
            let state = checkpoint::load(path).with_context(|| format!("trainer: loading {}", path.display()))?;
            let mut stored = state.config.clone();
            stored.outer_epochs = cfg.outer_epochs;
            stored.threads = cfg.threads;
            if stored != *cfg {
                bail!("checkpoint {} was written with a different config", path.display());
            }
            state
        }
        None => TrainState::new(g, cfg.clone()).context("trainer")?,
    };
    state.config = cfg.clone();
    Ok(state)
}

fn run_training(g: &SignedGraph, cfg: &TrainConfig, resume: Option<&Path>, ckpt: Option<&Path>) -> Result<(TrainState, serde_json::Value)> {
    let mut state = train_state(g, cfg, resume)?;
    let trainer = Trainer::new(g, cfg).context("trainer")?;
    let result = trainer.run(&mut state, cfg.outer_epochs, |s, rec| {
        log::info!(
            "epoch {}: d_loss={:.5} g_reward={:.5} ({:.2}s)",
            rec.epoch,
            rec.d_loss,
            rec.g_reward,
            rec.wall_time_secs
        );
        match ckpt {
            Some(path) => checkpoint::save(s, path),
            None => Ok(()),
        }
    });
    match result {
        Ok(report) => Ok((state, serde_json::to_value(&report)?)),
        Err(TrainError::Diverged { epoch, phase, source, last_good }) => {
            if let Some(path) = ckpt {
                checkpoint::save(&last_good, path)?;
            }
            bail!("trainer: diverged in epoch {epoch} ({phase} phase): {source}")
        }
        Err(TrainError::Core(e)) => Err(e).context("trainer"),
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let settings = Settings::load(&args.common, None)?;
    let g = load_graph(&args.common.graph)?;
    let dir = &args.common.output_dir;
    fs::create_dir_all(dir)?;
    let prov = provenance("train", &settings, &[("graph", file_checksum(&args.common.graph)?)]);
    let ckpt = dir.join("checkpoint.bin");
    let (state, report) = run_training(&g, &settings.kfold.train, args.resume.as_deref(), Some(&ckpt))?;
    checkpoint::save(&state, &ckpt)?;
    write_embedding(dir, "generator.emb", &state.generator, &prov.lines)?;
    write_embedding(dir, "discriminator.emb", &state.discriminator, &prov.lines)?;
    write_json(dir, "train_report.json", &json!({ "metadata": prov.json, "report": report }))?;
    let mut cfg = create(dir, "effective.cfg")?;
    for line in settings.effective_lines() {
        writeln!(cfg, "{line}")?;
    }
    cfg.flush()?;
    println!("trained {} epochs; outputs in {}", state.epoch, dir.display());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let settings = Settings::load(&args.common, Some(&args.eval))?;
    let g = load_graph(&args.common.graph)?;
    let k = &settings.kfold;
    let mut inputs = vec![("graph", file_checksum(&args.common.graph)?)];
    let report = match &args.emb {
        Some(path) => {
            inputs.push(("emb", file_checksum(path)?));
            let emb = load_embedding(path)?;
            kfold_with_embeddings(&g, &emb, k.k_folds, k.feature_mode, k.logreg, k.seed)
        }
        None => kfold_link_prediction(&g, k),
    }
    .context("evalkit")?;
    let prov = provenance("predict", &settings, &inputs);
    let dir = &args.common.output_dir;
    write_json(dir, "metrics.json", &json!({ "metadata": prov.json, "metrics": report }))?;
    report.write_csv(create(dir, "metrics.csv")?)?;
    println!(
        "mean averaged_micro_f1={:.4} standard_micro_f1={:.4}",
        report.mean_averaged_micro_f1, report.mean_standard_micro_f1
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let settings = Settings::load(&args.common, Some(&args.eval))?;
    let g = load_graph(&args.common.graph)?;
    let fractions = args.fractions.unwrap_or_else(|| DEFAULT_FRACTIONS.to_vec());
    let rows = sparsity_sweep(&g, &fractions, args.repeats, &settings.kfold, settings.kfold.seed).context("evalkit")?;
    let prov = provenance("sweep", &settings, &[("graph", file_checksum(&args.common.graph)?)]);
    let dir = &args.common.output_dir;
    write_sweep_csv(&rows, create(dir, "sweep.csv")?)?;
    write_json(dir, "sweep.json", &json!({ "metadata": prov.json, "repeats": args.repeats, "rows": rows }))?;
    for r in &rows {
        println!("fraction {}: mean {:.4} std {:.4}", r.fraction, r.mean_averaged_micro_f1, r.std_averaged_micro_f1);
    }
    Ok(())
}

fn cmd_audit(args: AuditArgs) -> Result<()> {
    let settings = Settings::load(&args.common, None)?;
    let g = load_graph(&args.common.graph)?;
    let mut inputs = vec![("graph", file_checksum(&args.common.graph)?)];
    let emb = match &args.emb {
        Some(path) => {
            inputs.push(("emb", file_checksum(path)?));
            load_embedding(path)?
        }
        None => {
            let (state, _) = run_training(&g, &settings.kfold.train, None, None)?;
            match settings.kfold.source {
                EmbeddingSource::Discriminator => state.discriminator,
                EmbeddingSource::Generator => state.generator,
            }
        }
    };
    let audit = balance_audit(&emb, &g, args.fraction, settings.kfold.seed).context("evalkit")?;
    let prov = provenance("audit", &settings, &inputs);
    let value = json!({ "metadata": prov.json, "sample_fraction": args.fraction, "audit": audit });
    write_json(&args.common.output_dir, "audit.json", &value)?;
    println!("APED={:.6} ANED={:.6}", audit.aped, audit.aned);
    Ok(())
}

fn parse_synthetic(pairs: &[String]) -> Result<(usize, u64)> {
    let (mut n, mut seed) = (100, 0);
    for p in pairs {
        match p.split_once('=') {
            Some(("n", v)) => n = v.parse().with_context(|| format!("bad n `{v}`"))?,
            Some(("seed", v)) => seed = v.parse().with_context(|| format!("bad seed `{v}`"))?,
            _ => bail!("unknown synthetic parameter `{p}` (expected n=... or seed=...)"),
        }
    }
    if n < 2 {
        bail!("synthetic graph needs at least 2 nodes");
    }
    Ok((n, seed))
}

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn cmd_check(args: CheckArgs) -> Result<bool> {
    let (g, emb_seed) = match (&args.graph, &args.synthetic) {
        (Some(path), _) => (load_graph(path)?, args.seed),
        (None, pairs) => {
            let (n, seed) = parse_synthetic(pairs.as_deref().unwrap_or(&[]))?;
            (random_connected(n, 0.05, 0.4, seed), seed)
        }
    };
    let mut emb = EmbeddingMatrix::gaussian(g.node_count(), args.dim, emb_seed).context("embedding")?;
    let factor = args.scale / signed_embed::embedding::INIT_STD;
    emb.values_mut().iter_mut().for_each(|x| *x *= factor);

    let (mut worst, mut increases, mut worst_rise, mut roots) = (0.0f64, 0usize, 0.0f64, 0usize);
    for root in (0..g.node_count()).filter(|&r| g.degree(r) > 0) {
        let tree = BfsTree::build(&g, root);
        let table = RelevanceTable::build(&emb, &tree);
        let total: f64 = modified_softmax_all(&table, &tree).iter().map(|&(_, p, q)| p + q).sum();
        worst = worst.max((total - 1.0).abs());
        for &v in &tree.covered()[1..] {
            let rise = table.cum_total(v) - table.cum_total(tree.parent(v).expect("non-root"));
            if rise > 4.0 * f64::EPSILON * table.cum_total(tree.parent(v).expect("non-root")) {
                increases += 1;
                worst_rise = worst_rise.max(rise);
            }
        }
        roots += 1;
    }
    let normalized = worst <= NORMALIZATION_TOLERANCE;
    let decaying = increases == 0;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    println!(
        "graph: {} nodes, {} edges; {roots} roots checked",
        g.node_count(),
        g.edge_count()
    );
    println!(
        "[{}] normalization: max deviation {worst:.3e} (tolerance {NORMALIZATION_TOLERANCE:e})",
        verdict(normalized)
    );
    println!(
        "[{}] decay: {increases} depth increases of cumulative mass (max rise {worst_rise:.3e})",
        verdict(decaying)
    );
    Ok(normalized && decaying)
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    if args.communities == 0 || args.size == 0 {
        bail!("communities and size must be positive");
    }
    for (name, p) in [("p-intra", args.p_intra), ("p-inter", args.p_inter), ("noise", args.noise)] {
        if !(0.0..=1.0).contains(&p) {
            bail!("{name} must lie in [0, 1]");
        }
    }
    let g = synth_balanced(args.communities, args.size, args.p_intra, args.p_inter, args.noise, args.seed);
    let mut out = BufWriter::new(File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?);
    writeln!(out, "# tool=signed-embed {VERSION}")?;
    writeln!(
        out,
        "# synth communities={} size={} p_intra={} p_inter={} noise={} seed={}",
        args.communities, args.size, args.p_intra, args.p_inter, args.noise, args.seed
    )?;
    g.write_edge_list(&mut out)?;
    out.flush()?;
    println!(
        "wrote {} nodes, {} positive and {} negative edges to {}",
        g.node_count(),
        g.positive_edge_count(),
        g.negative_edge_count(),
        args.output.display()
    );
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    if args.input == args.output {
        bail!("refusing to overwrite the input file");
    }
    let mut spec = EdgeListSpec::ratings_csv(&args.input, args.threshold);
    spec.delimiter = Some(args.delimiter);
    if args.explicit_sign {
        spec.sign_column = SignColumn::ExplicitSign;
    }
    let (g, report) = load_edge_list(&spec).with_context(|| format!("sgraph: loading {}", args.input.display()))?;
    report.log(&args.input);
    let mut out = BufWriter::new(File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?);
    writeln!(out, "# tool=signed-embed {VERSION}")?;
    writeln!(out, "# input_checksum={:016x}", file_checksum(&args.input)?)?;
    writeln!(out, "# threshold={}", args.threshold)?;
    g.write_edge_list(&mut out)?;
    out.flush()?;
    println!(
        "{} nodes, {} positive, {} negative edges ({} duplicates, {} self-loops dropped)",
        g.node_count(),
        g.positive_edge_count(),
        g.negative_edge_count(),
        report.duplicate_lines,
        report.self_loops
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a).map(|_| true),
        Command::Predict(a) => cmd_predict(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::Audit(a) => cmd_audit(a).map(|_| true),
        Command::CheckTheorems(a) => cmd_check(a),
        Command::Synth(a) => cmd_synth(a).map(|_| true),
        Command::Convert(a) => cmd_convert(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
