use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use meb_bench::{
    run_many, sweep_configs, write_dense_points, Dataset, Gamma, MetricRow, RunConfig, SpaceChoice,
    SweepAxis,
};

#[derive(Parser)]
#[command(name = "meb-bench", version, about = "Sliding-window MEB coreset experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more algorithms on a stream and write a CSV.
    Run {
        #[command(flatten)]
        common: Common,
        /// Output CSV; a `.manifest` file is written beside it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a run over a grid of window sizes or dimensions.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_axis)]
        over: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        /// Output directory; one CSV per grid value.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic stream in the dense text format.
    Gen {
        /// `n,m,seed`
        #[arg(long)]
        synthetic: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Euclidean,
    Gaussian,
}

#[derive(Args)]
struct Common {
    /// Comma-separated: coremeb, aomeb, swmeb, swmebplus, ssmeb.
    #[arg(long, value_delimiter = ',', default_value = "swmebplus")]
    algo: Vec<String>,
    #[arg(long, value_enum, default_value = "euclidean")]
    space: SpaceArg,
    /// `auto` or a positive value (Gaussian space only).
    #[arg(long, default_value = "auto")]
    gamma: String,
    #[arg(long, default_value_t = 100_000)]
    window: u64,
    /// SWMEB partition length (default: window / 10).
    #[arg(long)]
    partition: Option<u64>,
    #[arg(long, default_value_t = 100)]
    batch: u64,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long, default_value_t = 100)]
    checkpoints: usize,
    /// Synthetic stream `n,m,seed`.
    #[arg(long, conflicts_with = "data")]
    synthetic: Option<String>,
    /// Dense text point file.
    #[arg(long)]
    data: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: anyhow::Error| e.to_string())
}

impl Common {
    fn configs(&self, out: Option<PathBuf>) -> anyhow::Result<Vec<RunConfig>> {
        let dataset = match (&self.synthetic, &self.data) {
            (Some(s), None) => s.parse::<Dataset>()?,
            (None, Some(p)) => Dataset::File(p.clone()),
            _ => bail!("give exactly one of --synthetic n,m,seed or --data PATH"),
        };
        let space = match self.space {
            SpaceArg::Euclidean => SpaceChoice::Euclidean,
            SpaceArg::Gaussian => SpaceChoice::Gaussian(self.gamma.parse::<Gamma>()?),
        };
        self.algo
            .iter()
            .map(|a| {
                let mut c = RunConfig::new(a.parse()?, dataset.clone());
                c.space = space;
                c.window = self.window;
                c.partition_len = self.partition;
                c.batch = self.batch;
                c.eps1 = self.eps1;
                c.eps2 = self.eps2;
                c.checkpoints = self.checkpoints;
                c.out = out.clone();
                c.validate()?;
                Ok(c)
            })
            .collect()
    }
}

fn summarize(rows: &[MetricRow]) {
    println!("{:<10} {:>6} {:>12} {:>12} {:>10} {:>10}", "algorithm", "rows", "mean_error", "update_ms", "coreset", "stored");
    let mut names: Vec<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    names.dedup();
    for name in names {
        let rs: Vec<&MetricRow> = rows.iter().filter(|r| r.algorithm == name).collect();
        let k = rs.len() as f64;
        let mean = |f: fn(&MetricRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / k;
        println!(
            "{:<10} {:>6} {:>12.4e} {:>12.4} {:>10.1} {:>10.1}",
            name,
            rs.len(),
            mean(|r| r.error),
            mean(|r| r.update_ms),
            mean(|r| r.coreset_size as f64),
            mean(|r| r.stored_points as f64),
        );
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run { common, out } => {
            let rows = run_many(&common.configs(out.clone())?)?;
            summarize(&rows);
            if let Some(out) = out {
                println!("wrote {}", out.display());
            }
        }
        Command::Sweep { common, over, values, out } => {
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let base = common.configs(None)?;
            let per_algo: Vec<Vec<RunConfig>> =
                base.iter().map(|c| sweep_configs(c, over, &values, &out)).collect::<anyhow::Result<_>>()?;
            for (i, &v) in values.iter().enumerate() {
                let group: Vec<RunConfig> = per_algo.iter().map(|cs| cs[i].clone()).collect();
                let rows = run_many(&group)?;
                println!("-- {over:?} = {v}");
                summarize(&rows);
            }
        }
        Command::Gen { synthetic, out } => {
            let Dataset::Synthetic { n, m, seed } = synthetic.parse::<Dataset>()? else { unreachable!() };
            let pts = meb_bench::gen_synthetic(n, m, seed);
            let f = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_dense_points(BufWriter::new(f), &pts)?;
            println!("wrote {n} points of dimension {m} to {}", out.display());
        }
    }
    Ok(())
}
