//! Replays a stream in batches, sampling the error and per-batch update
//! time of one algorithm at evenly spaced checkpoints.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use sliding_meb::{
    core_meb_in, estimate_gamma, AomebState, Coreset, EpsSchedule, KernelSpec, Point, Space, SsmebState, Swmeb,
    SwmebPlus,
};

use crate::data::{gen_synthetic, parse_dense_points};
use crate::metrics::{coreset_error, exact_window_radius, radius_error, Reference};

/// Points used to estimate the Gaussian bandwidth when `--gamma auto`.
pub const GAMMA_SAMPLE: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    CoreMeb,
    Aomeb,
    Swmeb,
    SwmebPlus,
    Ssmeb,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::CoreMeb, Algorithm::Aomeb, Algorithm::Swmeb, Algorithm::SwmebPlus, Algorithm::Ssmeb];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::CoreMeb => "coremeb",
            Algorithm::Aomeb => "aomeb",
            Algorithm::Swmeb => "swmeb",
            Algorithm::SwmebPlus => "swmebplus",
            Algorithm::Ssmeb => "ssmeb",
        }
    }

    /// Sliding algorithms update incrementally; the others are re-run on
    /// the whole window.
    pub fn is_sliding(self) -> bool {
        matches!(self, Algorithm::Swmeb | Algorithm::SwmebPlus)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .with_context(|| format!("unknown algorithm {s:?} (expected coremeb|aomeb|swmeb|swmebplus|ssmeb)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gamma {
    Auto,
    Value(f64),
}

impl FromStr for Gamma {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Gamma::Auto);
        }
        let v: f64 = s.parse().with_context(|| format!("gamma must be `auto` or a number, got {s:?}"))?;
        ensure!(v > 0.0 && v.is_finite(), "gamma must be positive, got {v}");
        Ok(Gamma::Value(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceChoice {
    Euclidean,
    Gaussian(Gamma),
}

impl SpaceChoice {
    pub fn is_kernel(self) -> bool {
        matches!(self, SpaceChoice::Gaussian(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    File(PathBuf),
    Synthetic { n: usize, m: usize, seed: u64 },
}

impl Dataset {
    pub fn load(&self) -> anyhow::Result<Vec<Point>> {
        match self {
            Dataset::File(path) => {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                parse_dense_points(BufReader::new(f)).with_context(|| format!("parsing {}", path.display()))
            }
            &Dataset::Synthetic { n, m, seed } => {
                ensure!(n >= 1 && m >= 1, "synthetic stream needs n, m >= 1");
                Ok(gen_synthetic(n, m, seed))
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Dataset::File(p) => p.display().to_string(),
            Dataset::Synthetic { n, m, seed } => format!("synthetic(n={n},m={m},seed={seed})"),
        }
    }
}

impl FromStr for Dataset {
    type Err = anyhow::Error;
    /// `n,m,seed`
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        ensure!(parts.len() == 3, "synthetic spec must be `n,m,seed`, got {s:?}");
        Ok(Dataset::Synthetic { n: parts[0].parse()?, m: parts[1].parse()?, seed: parts[2].parse()? })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub space: SpaceChoice,
    pub window: u64,
    /// SWMEB partition length; a tenth of the window when unset.
    pub partition_len: Option<u64>,
    pub batch: u64,
    /// Defaults to 1e-3 in Euclidean space and 1e-4 with a kernel.
    pub eps1: Option<f64>,
    /// SWMEB's ε₂ (default 0.1). For SWMEB+ a value selects a constant
    /// schedule instead of the rank-dependent default.
    pub eps2: Option<f64>,
    pub dataset: Dataset,
    pub checkpoints: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, dataset: Dataset) -> Self {
        RunConfig {
            algorithm,
            space: SpaceChoice::Euclidean,
            window: 100_000,
            partition_len: None,
            batch: 100,
            eps1: None,
            eps2: None,
            dataset,
            checkpoints: 100,
            out: None,
        }
    }

    pub fn eps1(&self) -> f64 {
        self.eps1.unwrap_or(if self.space.is_kernel() { 1e-4 } else { 1e-3 })
    }

    pub fn partition_len(&self) -> u64 {
        self.partition_len.unwrap_or_else(|| Swmeb::default_partition_len(self.window))
    }

    pub fn schedule(&self) -> EpsSchedule {
        match self.eps2 {
            Some(e) => EpsSchedule::Constant(e),
            None => EpsSchedule::default_for(self.eps1()),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.window >= 1, "window must be positive");
        ensure!(self.batch >= 1, "batch must be positive");
        ensure!(self.checkpoints >= 1, "need at least one checkpoint");
        let e1 = self.eps1();
        ensure!(e1 > 0.0 && e1 < 1.0, "eps1 must lie in (0, 1), got {e1}");
        if let Some(e2) = self.eps2 {
            ensure!(e2 > 0.0 && e2 < 1.0, "eps2 must lie in (0, 1), got {e2}");
        }
        if self.algorithm == Algorithm::Swmeb {
            let l = self.partition_len();
            ensure!(l >= 1 && self.window % l == 0, "partition length {l} must divide window {}", self.window);
            ensure!(l % self.batch == 0, "batch {} must divide partition length {l}", self.batch);
        }
        Ok(())
    }
}

/// One sampled checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub algorithm: String,
    pub t: u64,
    pub error: f64,
    pub update_ms: f64,
    pub coreset_size: usize,
    pub stored_points: usize,
}

/// A loaded stream with its resolved space.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub points: Vec<Point>,
    pub space: Space,
    pub gamma: Option<f64>,
}

pub fn prepare(config: &RunConfig) -> anyhow::Result<Prepared> {
    let points = config.dataset.load()?;
    prepare_points(config, points)
}

pub fn prepare_points(config: &RunConfig, points: Vec<Point>) -> anyhow::Result<Prepared> {
    ensure!(!points.is_empty(), "stream is empty");
    let (space, gamma) = match config.space {
        SpaceChoice::Euclidean => (Space::Euclidean, None),
        SpaceChoice::Gaussian(g) => {
            let gamma = match g {
                Gamma::Value(v) => v,
                Gamma::Auto => estimate_gamma(&points[..points.len().min(GAMMA_SAMPLE)])?,
            };
            (Space::Kernel(KernelSpec::gaussian(gamma)?), Some(gamma))
        }
    };
    Ok(Prepared { points, space, gamma })
}

/// Exact window radii keyed by window end, shared across algorithms run on
/// the same stream and window size.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    radii: HashMap<(u64, u64), f64>,
}

impl ReferenceCache {
    fn radius(&mut self, window: &[Point], space: Space, end: u64) -> anyhow::Result<f64> {
        let key = (end, window.len() as u64);
        if let Some(&r) = self.radii.get(&key) {
            return Ok(r);
        }
        let r = exact_window_radius(window, space)?;
        self.radii.insert(key, r);
        Ok(r)
    }
}

/// First batch end with a full window, or the first batch end if the
/// window never fills.
fn first_full(n: usize, window: u64, batch: u64) -> u64 {
    if window <= n as u64 / batch * batch {
        window.div_ceil(batch) * batch
    } else {
        batch
    }
}

/// Checkpoint timestamps: `count` batch ends, evenly spaced over those at
/// which the window is full (or over all batch ends if it never fills).
pub fn checkpoint_schedule(n: usize, window: u64, batch: u64, count: usize) -> anyhow::Result<Vec<u64>> {
    let batches = n as u64 / batch;
    ensure!(batches >= 1, "stream of {n} points is shorter than one batch of {batch}");
    let full_from = first_full(n, window, batch);
    let eligible: Vec<u64> = (1..=batches).map(|k| k * batch).filter(|&t| t >= full_from).collect();
    let e = eligible.len();
    ensure!(
        count <= e,
        "{count} checkpoints requested but only {e} batch ends have a full window"
    );
    Ok((1..=count).map(|j| eligible[j * e / count - 1]).collect())
}

enum Sliding {
    Swmeb(Swmeb),
    Plus(SwmebPlus),
}

impl Sliding {
    fn insert(&mut self, batch: &[Point]) -> sliding_meb::Result<()> {
        match self {
            Sliding::Swmeb(s) => s.insert_batch(batch),
            Sliding::Plus(s) => s.insert_batch(batch),
        }
    }

    fn snapshot(&self) -> sliding_meb::Result<(Coreset, usize)> {
        match self {
            Sliding::Swmeb(s) => Ok((s.query()?, s.stored_points())),
            Sliding::Plus(s) => Ok((s.query()?, s.stored_points())),
        }
    }
}

/// Runs one algorithm over a prepared stream.
///
/// Sliding algorithms see every batch and are timed per batch; the row at
/// a checkpoint reports the mean over the batches since the previous one,
/// counting only batches with a full window. The other algorithms are
/// re-run from scratch on the window at each checkpoint, and the time of
/// that re-run is the per-batch cost.
pub fn run_prepared(
    config: &RunConfig,
    data: &Prepared,
    cache: &mut ReferenceCache,
) -> anyhow::Result<Vec<MetricRow>> {
    config.validate()?;
    let n = data.points.len();
    let b = config.batch as usize;
    let schedule = checkpoint_schedule(n, config.window, config.batch, config.checkpoints)?;
    let full_from = first_full(n, config.window, config.batch);
    let eps1 = config.eps1();
    let space = data.space;
    let name = config.algorithm.name().to_string();

    let window_at = |t: u64| {
        let t = t as usize;
        &data.points[t.saturating_sub(config.window as usize)..t]
    };

    let mut rows = Vec::with_capacity(schedule.len());
    if config.algorithm.is_sliding() {
        let mut algo = match config.algorithm {
            Algorithm::Swmeb => Sliding::Swmeb(Swmeb::with_batch(
                space,
                config.window,
                config.partition_len(),
                config.batch,
                eps1,
                config.eps2.unwrap_or(0.1),
            )?),
            _ => Sliding::Plus(SwmebPlus::new(space, config.window, eps1, config.schedule())?),
        };
        let mut next = schedule.iter().peekable();
        let mut spent = 0.0;
        let mut timed = 0usize;
        for (k, batch) in data.points.chunks_exact(b).enumerate() {
            let t = ((k + 1) * b) as u64;
            let start = Instant::now();
            algo.insert(batch)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if t >= full_from {
                spent += ms;
                timed += 1;
            }
            if next.peek() == Some(&&t) {
                next.next();
                let (coreset, stored) = algo.snapshot()?;
                let window = window_at(t);
                let exact = cache.radius(window, space, t)?;
                rows.push(MetricRow {
                    algorithm: name.clone(),
                    t,
                    error: coreset_error(window, coreset.ball(), exact)?,
                    update_ms: spent / timed.max(1) as f64,
                    coreset_size: coreset.len(),
                    stored_points: stored,
                });
                spent = 0.0;
                timed = 0;
            }
        }
    } else {
        for &t in &schedule {
            let window = window_at(t);
            let start = Instant::now();
            let outcome = rerun(config.algorithm, space, eps1, b, window)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let exact = cache.radius(window, space, t)?;
            let (error, coreset_size) = match &outcome {
                Rerun::Coreset(c) => (coreset_error(window, c.ball(), exact)?, c.len()),
                Rerun::Ball(s) => (radius_error(s.radius(), exact)?, s.stored_points()),
            };
            rows.push(MetricRow {
                algorithm: name.clone(),
                t,
                error,
                update_ms: ms,
                coreset_size,
                stored_points: window.len(),
            });
        }
    }
    Ok(rows)
}

enum Rerun {
    Coreset(Coreset),
    Ball(SsmebState),
}

fn rerun(algorithm: Algorithm, space: Space, eps1: f64, b: usize, window: &[Point]) -> anyhow::Result<Rerun> {
    Ok(match algorithm {
        Algorithm::CoreMeb => Rerun::Coreset(core_meb_in(space, window, eps1)?),
        Algorithm::Aomeb => {
            let mut chunks = window.chunks(b);
            let first = chunks.next().context("empty window")?;
            let mut state = AomebState::init_batch(space, eps1, first, 1)?;
            for chunk in chunks {
                state.update_batch(chunk)?;
            }
            Rerun::Coreset(state.coreset())
        }
        Algorithm::Ssmeb => {
            let mut state = SsmebState::new(space, window[0].clone());
            for p in &window[1..] {
                state.update(p.clone())?;
            }
            Rerun::Ball(state)
        }
        Algorithm::Swmeb | Algorithm::SwmebPlus => bail!("{algorithm} is not re-run"),
    })
}

/// Key/value description of a run, written beside its CSV.
pub fn manifest(configs: &[RunConfig], data: &Prepared) -> Vec<(String, String)> {
    let c = &configs[0];
    let dim = data.points[0].dim();
    let algos: Vec<&str> = configs.iter().map(|c| c.algorithm.name()).collect();
    let mut kv = vec![
        ("library".to_string(), format!("sliding-meb {}", env!("CARGO_PKG_VERSION"))),
        ("algorithms".into(), algos.join(",")),
        ("dataset".into(), c.dataset.describe()),
        ("points".into(), data.points.len().to_string()),
        ("points_replayed".into(), (data.points.len() as u64 / c.batch * c.batch).to_string()),
        ("dim".into(), dim.to_string()),
        ("space".into(), if c.space.is_kernel() { "gaussian".into() } else { "euclidean".into() }),
    ];
    if let Some(g) = data.gamma {
        let how = if matches!(c.space, SpaceChoice::Gaussian(Gamma::Auto)) {
            format!("estimated from first {} points", data.points.len().min(GAMMA_SAMPLE))
        } else {
            "given".into()
        };
        kv.push(("gamma".into(), format!("{g}")));
        kv.push(("gamma_source".into(), how));
    }
    kv.extend([
        ("window".into(), c.window.to_string()),
        ("partition_len".into(), c.partition_len().to_string()),
        ("batch".into(), c.batch.to_string()),
        ("eps1".into(), c.eps1().to_string()),
        ("eps2_swmeb".into(), c.eps2.unwrap_or(0.1).to_string()),
        ("eps2_swmebplus".into(), format!("{:?}", c.schedule())),
        ("checkpoints".into(), c.checkpoints.to_string()),
        ("reference_radius".into(), Reference::for_space(data.space, dim).describe()),
        ("timing".into(), "monotonic clock around update work, ms per batch, single thread".into()),
        ("rerun_algorithms".into(), "coremeb,aomeb,ssmeb re-run on the window at each checkpoint".into()),
    ]);
    kv
}

pub fn write_csv(path: &Path, rows: &[MetricRow]) -> anyhow::Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
        }
        _ => Ok(()),
    }
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest")
}

pub fn write_manifest(path: &Path, kv: &[(String, String)]) -> anyhow::Result<()> {
    ensure_parent(path)?;
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for (k, v) in kv {
        writeln!(w, "{k}={v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Runs several algorithms on one stream, sharing the reference radii, and
/// writes the CSV and manifest when the first config names an output.
pub fn run_many(configs: &[RunConfig]) -> anyhow::Result<Vec<MetricRow>> {
    let first = configs.first().context("no configuration given")?;
    let data = prepare(first)?;
    let mut cache = ReferenceCache::default();
    let mut rows = Vec::new();
    for c in configs {
        rows.extend(run_prepared(c, &data, &mut cache)?);
    }
    if let Some(out) = &first.out {
        write_csv(out, &rows)?;
        write_manifest(&manifest_path(out), &manifest(configs, &data))?;
    }
    Ok(rows)
}

/// Loads the data, runs the configured algorithm and, if an output path is
/// set, writes the CSV and its manifest.
pub fn run_experiment(config: &RunConfig) -> anyhow::Result<Vec<MetricRow>> {
    run_many(std::slice::from_ref(config))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Window,
    Dim,
}

impl FromStr for SweepAxis {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "window" | "n" => Ok(SweepAxis::Window),
            "dim" | "m" => Ok(SweepAxis::Dim),
            _ => bail!("sweep axis must be `window` or `dim`, got {s:?}"),
        }
    }
}

/// One config per grid value, each writing `<dir>/<axis>_<value>.csv`.
pub fn sweep_configs(base: &RunConfig, axis: SweepAxis, values: &[u64], dir: &Path) -> anyhow::Result<Vec<RunConfig>> {
    values
        .iter()
        .map(|&v| {
            let mut c = base.clone();
            let label = match axis {
                SweepAxis::Window => {
                    c.window = v;
                    c.partition_len = None;
                    "window"
                }
                SweepAxis::Dim => match &mut c.dataset {
                    Dataset::Synthetic { m, .. } => {
                        *m = v as usize;
                        "dim"
                    }
                    Dataset::File(_) => bail!("a dimension sweep needs a synthetic dataset"),
                },
            };
            c.out = Some(dir.join(format!("{label}_{v}.csv")));
            Ok(c)
        })
        .collect()
}
