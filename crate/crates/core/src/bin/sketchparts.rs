use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sketchparts::dataset::{load_dataset, parse_strokes, write_atomic, epitome_path};
use sketchparts::model::{AnalysisParams, Canvas, CountMode, Normalization, StrokeOrdering, DEFAULT_CANVAS};
use sketchparts::ordering::{order_strokes, prefix_epitome};
use sketchparts::pipeline::{cmd_analyze, RunConfig};
use sketchparts::render::CloudStyle;
use sketchparts::service::{serve, ServiceConfig};
use sketchparts::synth::{write_synth, SynthConfig, MULTI_INSTANCE, SINGLE_INSTANCE};

#[derive(Parser)]
#[command(name = "sketchparts", version, about = "Semantic-part importance for sparsified sketches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every category and write reports, tables and word clouds
    Analyze(AnalyzeArgs),
    /// Print the stroke ids of one sketch file in the given order
    Order {
        sketch_file: PathBuf,
        #[arg(long, value_enum, default_value = "temporal")]
        ordering: OrderingArg,
        /// Canvas for files without a `canvas` line, WIDTHxHEIGHT
        #[arg(long, default_value_t = DEFAULT_CANVAS)]
        canvas: Canvas,
    },
    /// Run the local annotation service
    Serve {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8737")]
        bind: SocketAddr,
        /// Directory holding the built annotation UI
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CANVAS)]
        canvas: Canvas,
    },
    /// Write the deterministic synthetic dataset
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Categories to generate (default: the single-instance set)
        #[arg(long, value_delimiter = ',')]
        categories: Vec<String>,
        /// Also generate the categories with repeated parts
        #[arg(long)]
        multi_instance: bool,
        #[arg(long, default_value_t = 6)]
        sketches: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        keep_fraction: f64,
    },
    /// Regenerate prefix epitomes for every sketch in a dataset
    Epitomes {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_values_t = [OrderingArg::Temporal, OrderingArg::Length, OrderingArg::Alternate])]
        ordering: Vec<OrderingArg>,
        #[arg(long)]
        keep_fraction: f64,
        #[arg(long, default_value_t = DEFAULT_CANVAS)]
        canvas: Canvas,
    },
    /// Load and validate a dataset, reporting the first problem found
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CANVAS)]
        canvas: Canvas,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Stroke ordering(s); repeat or comma-separate. Default: all three.
    #[arg(long, value_enum, value_delimiter = ',')]
    ordering: Vec<OrderingArg>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 3.0)]
    dist_threshold: f64,
    #[arg(long, value_enum, default_value = "unique-boundary")]
    count_mode: CountModeArg,
    #[arg(long, value_enum, default_value = "max")]
    normalization: NormalizationArg,
    #[arg(long, default_value_t = DEFAULT_CANVAS)]
    canvas: Canvas,
    /// Word-cloud canvas, WIDTHxHEIGHT
    #[arg(long, default_value = "600x400")]
    cloud_size: Canvas,
    #[arg(long, default_value_t = 10.0)]
    min_pt: f64,
    #[arg(long, default_value_t = 56.0)]
    max_pt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score sketches on one thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Temporal,
    Length,
    Alternate,
}

impl From<OrderingArg> for StrokeOrdering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Temporal => StrokeOrdering::Temporal,
            OrderingArg::Length => StrokeOrdering::Length,
            OrderingArg::Alternate => StrokeOrdering::Alternate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CountModeArg {
    UniqueBoundary,
    MatchedPixels,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Max,
    Sum,
}

fn analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let orderings: Vec<StrokeOrdering> = if args.ordering.is_empty() {
        StrokeOrdering::ALL.to_vec()
    } else {
        args.ordering.iter().map(|&o| o.into()).collect()
    };
    let config = RunConfig {
        dataset_root: args.data,
        orderings,
        params: AnalysisParams {
            epsilon: args.epsilon,
            dist_threshold: args.dist_threshold,
            count_mode: match args.count_mode {
                CountModeArg::UniqueBoundary => CountMode::UniqueBoundary,
                CountModeArg::MatchedPixels => CountMode::MatchedPixels,
            },
            normalization: match args.normalization {
                NormalizationArg::Max => Normalization::Max,
                NormalizationArg::Sum => Normalization::Sum,
            },
        },
        output_dir: args.out,
        default_canvas: args.canvas,
        cloud: CloudStyle {
            width: args.cloud_size.width as f64,
            height: args.cloud_size.height as f64,
            min_pt: args.min_pt,
            max_pt: args.max_pt,
            seed: args.seed,
        },
        parallel: !args.sequential,
    };
    let out = cmd_analyze(&config)?;
    for (ordering, reports) in &out.reports {
        let warnings = out.warnings.get(ordering).map_or(0, Vec::len);
        println!("{ordering}: {} categor{}, {warnings} warning(s)", reports.len(), if reports.len() == 1 { "y" } else { "ies" });
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn order(sketch_file: &Path, ordering: StrokeOrdering, canvas: Canvas) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(sketch_file).with_context(|| format!("reading {}", sketch_file.display()))?;
    let id = sketch_file.file_stem().and_then(|s| s.to_str()).unwrap_or("sketch");
    let sketch = parse_strokes(&text, "", id, canvas, sketch_file)?;
    let ids: Vec<String> = order_strokes(&sketch, ordering).iter().map(u32::to_string).collect();
    println!("{}", ids.join(" "));
    Ok(())
}

fn epitomes(data: &Path, orderings: &[OrderingArg], keep_fraction: f64, canvas: Canvas) -> anyhow::Result<()> {
    let dataset = load_dataset(data, canvas)?;
    let mut written = 0;
    for category in &dataset.categories {
        let sketches = category.sketches.iter().map(|a| &a.sketch).chain(&category.pending);
        for sketch in sketches {
            for &o in orderings {
                let ordering = o.into();
                let e = prefix_epitome(sketch, ordering, keep_fraction)?;
                write_atomic(
                    &epitome_path(&category.dir, ordering, &sketch.sketch_id),
                    sketchparts::dataset::format_keep(&e).as_bytes(),
                )?;
                written += 1;
            }
        }
    }
    println!("wrote {written} epitome file(s)");
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Order { sketch_file, ordering, canvas } => order(&sketch_file, ordering.into(), canvas),
        Command::Serve { data, bind, assets, canvas } => {
            let config = ServiceConfig { dataset_root: data, default_canvas: canvas, assets };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(config, bind))?;
            Ok(())
        }
        Command::Synth { out, categories, multi_instance, sketches, seed, keep_fraction } => {
            let mut categories = categories;
            if categories.is_empty() {
                categories = SINGLE_INSTANCE.iter().map(|s| s.to_string()).collect();
            }
            if multi_instance {
                categories.extend(MULTI_INSTANCE.iter().map(|s| s.to_string()));
            }
            let config = SynthConfig { categories, sketches_per_category: sketches, seed, keep_fraction };
            let written = write_synth(&out, &config)?;
            for c in written {
                println!("{}: {} sketches -> {}", c.name(), c.sketches.len(), c.dir.display());
            }
            Ok(())
        }
        Command::Epitomes { data, ordering, keep_fraction, canvas } => epitomes(&data, &ordering, keep_fraction, canvas),
        Command::Validate { data, canvas } => {
            let dataset = load_dataset(&data, canvas)?;
            for c in &dataset.categories {
                let orderings: Vec<&str> = c.epitomes.keys().map(|o| o.as_str()).collect();
                println!(
                    "{}: {} parts, {} annotated, {} pending, epitomes [{}]",
                    c.name(),
                    c.parts.len(),
                    c.sketches.len(),
                    c.pending.len(),
                    orderings.join(", ")
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
