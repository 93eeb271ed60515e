use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;
use shapecode::config::RunConfig;
use shapecode::experiments::{self, serial_trend_decreasing};
use shapecode::format::g6;
use shapecode::json::{
    tree_hash, CodeBookJson, MetricsJson, PipelineJson, SolutionJson, TreeJson, TreeSummary,
};
use shapecode::{rng, stream, CliError, Result};
use shapecode_core::bits::BitBuf;
use shapecode_core::metrics::evaluate;
use shapecode_core::optimizer::{dm_design, equivalent_cost_vector, min_avg_cost, optimal_expansion};
use shapecode_core::pipeline::{design, pipeline_report, shape_decode, shape_encode};
use shapecode_core::varn::{
    average_cost_bounds, modified_varn_bound, modified_varn_build, tree_to_codebook, varn_build,
    CodeTree,
};
use shapecode_core::{lz78, CodeBook, CostVector, Pmf, SourceSpec};

const DEFAULT_MESSAGES: usize = 100_000;

#[derive(Parser)]
#[command(name = "shapecode", version, about = "Shaping and distribution-matching codes for costly channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cost-minimizing symbol distribution at a given or optimal expansion factor
    Solve(Flags),
    /// Total-cost (or minimum-divergence) curve over a grid of expansion factors, as CSV
    Curve(Flags),
    /// Build a Varn (--K) or modified Varn (--k-bits) code tree
    Build(Flags),
    /// Compress a file and shape it with a tree
    Encode(Flags),
    /// Invert `encode`
    Decode(Flags),
    /// Metrics of a code book, a tree, or a full pipeline run
    Eval(Flags),
    /// Matcher convergence over codebook sizes with serial KL statistics, as CSV
    DmTest(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// JSON run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel costs, comma-separated
    #[arg(long, value_delimiter = ',')]
    costs: Option<Vec<f64>>,
    /// Target distribution, comma-separated
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<f64>>,
    /// Source symbol distribution, comma-separated
    #[arg(long = "source-pmf", value_delimiter = ',')]
    source_pmf: Option<Vec<f64>>,
    /// Source entropy in bits per symbol
    #[arg(long = "hsource")]
    h_source: Option<f64>,
    /// Source block length
    #[arg(long)]
    q: Option<usize>,
    /// Expansion factor
    #[arg(long)]
    f: Option<f64>,
    /// Overall expansion factor for the pipeline (default 1)
    #[arg(long = "f-target")]
    f_target: Option<f64>,
    /// Solve for the total-cost optimal expansion factor
    #[arg(long)]
    optimal: bool,
    /// Input block size of a modified Varn tree
    #[arg(long = "k-bits")]
    k_bits: Option<u32>,
    /// Codebook sizes, comma-separated
    #[arg(long = "K", value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid of expansion factors as a:b:n
    #[arg(long)]
    grid: Option<String>,
    /// Codewords per sampled stream
    #[arg(long)]
    messages: Option<usize>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Tree JSON file
    #[arg(long)]
    tree: Option<String>,
    /// Code book JSON file
    #[arg(long)]
    codebook: Option<String>,
    /// curve: minimum normalized I-divergence against --target instead of cost
    #[arg(long)]
    divergence: bool,
    /// build: print the codeword length histogram as CSV
    #[arg(long)]
    histogram: bool,
    /// encode: design the tree from the input and write it to --tree
    #[arg(long)]
    design: bool,
    /// eval: run the compress-then-shape pipeline on --input
    #[arg(long)]
    pipeline: bool,
}

impl Flags {
    fn config(&self) -> Result<RunConfig> {
        let flags = RunConfig {
            costs: self.costs.clone(),
            target: self.target.clone(),
            source_pmf: self.source_pmf.clone(),
            h_source: self.h_source,
            q: self.q,
            f: self.f,
            f_target: self.f_target,
            optimal: self.optimal.then_some(true),
            k_bits: self.k_bits,
            k: self.k.clone(),
            seed: self.seed,
            grid: self.grid.clone(),
            messages: self.messages,
            input: self.input.clone(),
            output: self.out.clone(),
            tree: self.tree.clone(),
            codebook: self.codebook.clone(),
        };
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(flags))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shapecode: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Solve(f) => solve(&f.config()?),
        Cmd::Curve(f) => curve(&f.config()?, f.divergence),
        Cmd::Build(f) => build(&f.config()?, f.histogram),
        Cmd::Encode(f) => encode(&f.config()?, f.design),
        Cmd::Decode(f) => decode(&f.config()?),
        Cmd::Eval(f) => eval(&f.config()?, f.pipeline),
        Cmd::DmTest(f) => dm_test(&f.config()?),
    }
}

fn read_file(path: &str) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_output(cfg: &RunConfig, bytes: &[u8]) -> Result<()> {
    match &cfg.output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p.as_str(), e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn emit_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_output(cfg, text.as_bytes())
}

fn emit_csv(cfg: &RunConfig, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    write_output(cfg, &bytes)
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| CliError::usage(format!("{flag} is required")))
}

fn load_tree(path: &str) -> Result<CodeTree> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str::<TreeJson>(&text)?.to_tree()
}

fn solve(cfg: &RunConfig) -> Result<()> {
    let h = cfg.source_entropy()?;
    if cfg.costs.is_none() && cfg.target.is_some() {
        #[derive(Serialize)]
        struct Design {
            costs: Vec<f64>,
            f_opt: f64,
        }
        let d = dm_design(&cfg.target_pmf()?, h)?;
        return emit_json(
            cfg,
            &Design {
                costs: d.costs.costs().to_vec(),
                f_opt: d.f_opt,
            },
        );
    }
    let c = cfg.cost_vector()?;
    if cfg.optimal.unwrap_or(false) {
        let o = optimal_expansion(&c, h)?;
        emit_json(cfg, &SolutionJson::from(&o))
    } else {
        let f = required(&cfg.f, "--f (or --optimal)")?;
        emit_json(cfg, &SolutionJson::from(&min_avg_cost(&c, h, f)?))
    }
}

fn curve(cfg: &RunConfig, divergence: bool) -> Result<()> {
    let h = cfg.source_entropy()?;
    let grid = cfg.f_grid()?;
    if divergence {
        let rows = experiments::divergence_curve(&cfg.target_pmf()?, h, &grid)?;
        let header = ["f", "mu", "i_min"].map(String::from);
        let rows: Vec<Vec<String>> = rows
            .into_iter()
            .map(|(f, mu, i)| vec![g6(f), g6(mu), g6(i)])
            .collect();
        return emit_csv(cfg, &header, &rows);
    }
    let pts = experiments::curve(&cfg.cost_vector()?, h, &grid)?;
    let header = ["f", "mu", "N", "entropy_h", "avg_cost", "total_cost"].map(String::from);
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| {
            [p.f, p.mu, p.normalizer, p.entropy, p.avg_cost, p.total_cost]
                .map(g6)
                .to_vec()
        })
        .collect();
    emit_csv(cfg, &header, &rows)
}

/// Costs from `--costs`, else the self-information costs of `--target`.
fn costs_or_target(cfg: &RunConfig) -> Result<CostVector> {
    if cfg.costs.is_some() {
        cfg.cost_vector()
    } else if cfg.target.is_some() {
        Ok(equivalent_cost_vector(&cfg.target_pmf()?)?)
    } else {
        Err(CliError::usage("--costs or --target is required"))
    }
}

fn build(cfg: &RunConfig, histogram: bool) -> Result<()> {
    let c = costs_or_target(cfg)?;
    let (tree, bounds) = match (cfg.k_bits, &cfg.k) {
        (Some(k_bits), None) => {
            let t = modified_varn_build(k_bits, &c)?;
            let b = modified_varn_bound(k_bits, &c)?;
            (t, Some([0.0, b]))
        }
        (None, Some(ks)) if ks.len() == 1 => {
            let t = varn_build(ks[0], &c)?;
            let b = average_cost_bounds(ks[0], &c).ok().map(|(lo, hi)| [lo, hi]);
            (t, b)
        }
        _ => return Err(CliError::usage("build needs exactly one of --K <k> or --k-bits <n>")),
    };
    if let Some(path) = &cfg.tree {
        let text = TreeJson::from_tree(&tree).canonical_string() + "\n";
        std::fs::write(path, text).map_err(|e| CliError::io(path.as_str(), e))?;
    }
    if histogram {
        let header = ["length", "count"].map(String::from);
        let rows: Vec<Vec<String>> = tree
            .length_histogram()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(d, n)| vec![d.to_string(), n.to_string()])
            .collect();
        return emit_csv(cfg, &header, &rows);
    }
    let summary = TreeSummary {
        leaves: tree.leaf_count(),
        avg_cost: tree.average_cost(),
        avg_length: tree.average_length(),
        max_leaf_cost: tree.max_leaf_cost(),
        expansion: cfg.q.map(|q| tree.average_length() / q as f64),
        mu: shapecode_core::optimizer::solve_mu_capacity(&c).ok(),
        cost_bounds: bounds,
        hash: format!("{:016x}", tree_hash(&tree)),
    };
    emit_json(cfg, &summary)
}

fn encode(cfg: &RunConfig, design_tree: bool) -> Result<()> {
    let input = required(&cfg.input, "--input")?;
    let tree_path = required(&cfg.tree, "--tree")?;
    let data = read_file(&input)?;
    let compressed = lz78::compress(&data);
    let tree = if design_tree {
        let c = cfg.cost_vector()?;
        let k_bits = required(&cfg.k_bits, "--k-bits")?;
        let d = design(
            data.len().max(1),
            compressed.len(),
            &c,
            k_bits,
            cfg.f_target.unwrap_or(1.0),
        )?;
        let text = TreeJson::from_tree(&d.tree).canonical_string() + "\n";
        std::fs::write(&tree_path, text).map_err(|e| CliError::io(tree_path.as_str(), e))?;
        d.tree
    } else {
        load_tree(&tree_path)?
    };
    let shaped = shape_encode(&compressed, &tree)?;
    write_output(cfg, &stream::write(&shaped, &tree))?;
    eprintln!(
        "{} bytes -> {} compressed bits -> {} symbols",
        data.len(),
        compressed.len(),
        shaped.symbols.len()
    );
    Ok(())
}

fn decode(cfg: &RunConfig) -> Result<()> {
    let input = required(&cfg.input, "--input")?;
    let tree = load_tree(&required(&cfg.tree, "--tree")?)?;
    let bytes = read_file(&input)?;
    let shaped = stream::read(&bytes, &tree)?;
    let bits: BitBuf = shape_decode(&shaped, &tree)?;
    let data = lz78::decompress(&bits)?;
    write_output(cfg, &data)
}

/// Concatenated codewords of `words` blocks drawn from `src`.
fn sample_stream(cb: &CodeBook, src: &SourceSpec, words: usize, seed: u64) -> Result<Vec<u8>> {
    let mut r = rng::stream(seed, 0);
    let pick = WeightedIndex::new(src.pmf().probs())
        .map_err(|_| CliError::usage("source pmf cannot be sampled"))?;
    let u = src.alphabet();
    let mut out = Vec::new();
    for _ in 0..words {
        let mut block = 0usize;
        for _ in 0..src.block_len() {
            block = block * u + pick.sample(&mut r);
        }
        out.extend_from_slice(cb.entry(block));
    }
    Ok(out)
}

fn integer_root(n: usize, q: usize) -> Option<usize> {
    let guess = (n as f64).powf(1.0 / q as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&u| u.checked_pow(q as u32) == Some(n))
}

fn eval(cfg: &RunConfig, pipeline: bool) -> Result<()> {
    if pipeline {
        let input = required(&cfg.input, "--input")?;
        let data = read_file(&input)?;
        let c = cfg.cost_vector()?;
        let k_bits = required(&cfg.k_bits, "--k-bits")?;
        let r = pipeline_report(&data, &c, k_bits, cfg.f_target.unwrap_or(1.0))?;
        return emit_json(cfg, &PipelineJson::from(&r));
    }
    let cb = match (&cfg.codebook, &cfg.tree) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.as_str(), e))?;
            serde_json::from_str::<CodeBookJson>(&text)?.to_codebook()?
        }
        (None, Some(path)) => {
            let tree = load_tree(path)?;
            let q = cfg.q.unwrap_or(1);
            let u = integer_root(tree.leaf_count(), q)
                .ok_or_else(|| CliError::usage("tree leaf count is not a q-th power"))?;
            tree_to_codebook(&tree, u, q)?
        }
        _ => return Err(CliError::usage("eval needs one of --codebook, --tree or --pipeline")),
    };
    let pmf = match cfg.source()? {
        Some(p) => p,
        None => Pmf::uniform(cb.source_alphabet()),
    };
    let src = SourceSpec::new(pmf, cb.block_len())?;
    let target = match &cfg.target {
        Some(_) => cfg.target_pmf()?,
        None => Pmf::uniform(cb.output_alphabet()),
    };
    let costs = cfg.costs.as_ref().map(|c| CostVector::new(c)).transpose()?;
    let stream = match cfg.seed {
        Some(seed) => Some(sample_stream(
            &cb,
            &src,
            cfg.messages.unwrap_or(DEFAULT_MESSAGES),
            seed,
        )?),
        None => None,
    };
    let m = evaluate(&cb, &src, &target, costs.as_ref(), stream.as_deref())?;
    emit_json(cfg, &MetricsJson::from(&m))
}

fn dm_test(cfg: &RunConfig) -> Result<()> {
    let target = cfg.target_pmf()?;
    let ks = required(&cfg.k, "--K")?;
    let seed = cfg.seed()?;
    let rows = experiments::dm_test(
        &target,
        &ks,
        seed,
        cfg.messages.unwrap_or(DEFAULT_MESSAGES),
    )?;
    let mut header = vec!["K".to_string()];
    header.extend((0..target.len()).map(|i| format!("p_hat_{i}")));
    header.extend(["f", "gef", "I_1", "I_2", "I_3", "stream_len"].map(String::from));
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.k.to_string()];
            row.extend(r.p_hat.iter().map(|&p| g6(p)));
            row.extend([r.f, r.gef].map(g6));
            row.extend(r.serial_kl.map(g6));
            row.push(r.stream_len.to_string());
            row
        })
        .collect();
    emit_csv(cfg, &header, &table)?;
    eprintln!(
        "serial KL trend over K: {}",
        if serial_trend_decreasing(&rows) {
            "decreasing"
        } else {
            "not monotone"
        }
    );
    Ok(())
}
