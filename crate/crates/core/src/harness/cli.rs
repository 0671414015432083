use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::experiments::{noise_from_parts, run_msecurve, run_table1, ExperimentReport};
use crate::baselines::{
    build_gaussian_graph, default_graph_params, gft_downsample, gsp_tv_denoise, laplacian_reg_denoise,
    mls_denoise, GspGraph, DEFAULT_LR_ALPHA, DEFAULT_MLS_ITERATIONS, DEFAULT_MLS_STEP, DEFAULT_TV_ALPHA,
};
use crate::coeffopt::{fit_hypergraph, AdjacencyConstraint, CoeffConfig, DEFAULT_CUT_BUDGET, DEFAULT_MAX_ROUNDS};
use crate::denoise::{joint_denoise, DenoiseConfig};
use crate::error::{Error, Result};
use crate::pointcloud::{add_noise, error_metrics, generate_shape, load, save, Format, NoiseSpec, PointCloud, ShapeKind, ShapeParams};
use crate::sampling::{hgft_downsample, hpf_scores, keep_for_ratio, sample_top_k};
use crate::spectral::{estimate_spectrum, PairsFile, SpectralPairs};

#[derive(Parser, Debug)]
#[command(
    name = "hgsp",
    version,
    about = "Hypergraph spectral analysis for 3D point clouds",
    long_about = "Hypergraph spectral analysis for 3D point clouds.\n\n\
        Clouds are read and written as XYZ text or ASCII PLY, chosen by file extension.\n\
        Indices in every output are 0-based. Exit status: 0 success, 1 usage error, 2 runtime failure."
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic surface cloud.
    Synth(SynthArgs),
    /// Add seeded noise to a cloud.
    Noise(NoiseArgs),
    /// Estimate the hypergraph spectrum basis and write it as JSON.
    Spectrum(SpectrumArgs),
    /// Estimate spectrum and frequency coefficients; write spectral pairs JSON.
    Fit(FitArgs),
    /// Joint hypergraph estimation and denoising.
    Denoise(DenoiseArgs),
    /// Keep the k points with the largest high-pass response.
    SampleHpf(SampleHpfArgs),
    /// Bandlimited reconstruction from the first C hypergraph Fourier coefficients.
    SampleHgft(SampleHgftArgs),
    /// Graph total-variation denoising on a Gaussian-kernel graph.
    BaselineTv(BaselineArgs),
    /// Laplacian-regularized denoising on a Gaussian-kernel graph.
    BaselineLr(BaselineArgs),
    /// Iterative umbrella-operator smoothing (mesh Laplacian smoothing stand-in).
    BaselineMls(BaselineArgs),
    /// Bandlimited reconstruction from the first C graph Fourier coefficients.
    BaselineGft(BaselineGftArgs),
    /// Denoising comparison over the noise rows and methods.
    Table1(ExperimentArgs),
    /// Recovery error against sampling ratio for HGFT and GFT downsampling.
    Msecurve(ExperimentArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// cube, cylinder, planes or sphere.
    #[arg(long, default_value = "cube")]
    shape: String,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// uniform, gaussian or impulse.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = -0.03, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mean: f64,
    /// Gaussian variance (not standard deviation).
    #[arg(long, default_value_t = 0.0064)]
    variance: f64,
    /// Impulse hit probability per point.
    #[arg(long, default_value_t = 0.08)]
    p: f64,
    /// Impulse offsets are uniform in [-spread, spread] per coordinate.
    #[arg(long, default_value_t = crate::pointcloud::DEFAULT_IMPULSE_SPREAD)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Basis JSON [default: <input stem>.basis.json].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CoeffArgs {
    /// Smoothness weight of the coefficient problem.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Sparsity weight of the coefficient problem.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Adjacency nonnegativity handling: enforce, enforce-or-relax (fall back to the box-only problem when no candidate is feasible) or relax.
    #[arg(long, default_value = "enforce-or-relax")]
    adjacency: String,
    /// Cuts added per cutting-plane round.
    #[arg(long, default_value_t = DEFAULT_CUT_BUDGET)]
    cut_budget: usize,
    /// Cutting-plane round cap.
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: usize,
}

impl CoeffArgs {
    fn config(&self) -> Result<CoeffConfig> {
        let c = CoeffConfig {
            alpha: self.alpha,
            beta: self.beta,
            adjacency: AdjacencyConstraint::from_str(&self.adjacency)?,
            cut_budget: self.cut_budget,
            max_rounds: self.max_rounds,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Spectral pairs JSON [default: <input stem>.pairs.json].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the coefficient solution as JSON.
    #[arg(long)]
    solution_out: Option<PathBuf>,
    #[command(flatten)]
    coeff: CoeffArgs,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Denoised cloud [default: <input stem>.denoised.<ext>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Objective trace CSV [default: <input stem>.trace.csv].
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Final spectral pairs JSON [default: <input stem>.pairs.json].
    #[arg(long)]
    pairs_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Outer iterations.
    #[arg(long, default_value_t = 3)]
    iters: usize,
    /// enforce, enforce-or-relax or relax.
    #[arg(long, default_value = "enforce-or-relax")]
    adjacency: String,
    /// Stop early once the largest coordinate change falls below this value.
    #[arg(long)]
    early_stop: Option<f64>,
}

#[derive(Args, Debug)]
struct PairsSource {
    /// Precomputed spectral pairs JSON; fitted from the cloud when absent.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Smoothness weight when fitting.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// Sparsity weight when fitting.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Adjacency handling when fitting: enforce, enforce-or-relax or relax.
    #[arg(long, default_value = "relax")]
    adjacency: String,
}

impl PairsSource {
    fn resolve(&self, cloud: &PointCloud) -> Result<SpectralPairs> {
        match &self.pairs {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let file: PairsFile = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
                let (pairs, _) = file.into_pairs()?;
                if pairs.dim() != cloud.len() {
                    return Err(Error::DimensionMismatch {
                        expected: cloud.len(),
                        found: pairs.dim(),
                    });
                }
                Ok(pairs)
            }
            None => {
                let config = CoeffConfig {
                    alpha: self.alpha,
                    beta: self.beta,
                    adjacency: AdjacencyConstraint::from_str(&self.adjacency)?,
                    ..CoeffConfig::default()
                };
                Ok(fit_hypergraph(cloud, &config)?.pairs)
            }
        }
    }
}

#[derive(Args, Debug)]
struct SampleHpfArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Points to keep.
    #[arg(long, default_value_t = 500)]
    k: usize,
    /// Sampled cloud [default: <input stem>.hpf<k>.<ext>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Index list CSV, descending score [default: <input stem>.hpf<k>.indices.csv].
    #[arg(long)]
    indices_out: Option<PathBuf>,
    #[command(flatten)]
    pairs: PairsSource,
}

#[derive(Args, Debug)]
struct KeepArgs {
    /// Kept coefficient count C.
    #[arg(long, conflicts_with = "ratio")]
    keep: Option<usize>,
    /// Sampling ratio C / N [default: 0.5 when --keep is absent].
    #[arg(long)]
    ratio: Option<f64>,
}

impl KeepArgs {
    fn resolve(&self, n: usize) -> Result<usize> {
        match self.keep {
            Some(c) => Ok(c),
            None => keep_for_ratio(self.ratio.unwrap_or(0.5), n),
        }
    }
}

#[derive(Args, Debug)]
struct SampleHgftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    keep: KeepArgs,
    /// Recovered cloud [default: <input stem>.hgft<C>.<ext>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// MSE curve CSV with columns C,ratio,mse over --ratios.
    #[arg(long)]
    curve_out: Option<PathBuf>,
    /// Ratio grid for --curve-out.
    #[arg(long, value_delimiter = ',', default_values_t = super::config::DEFAULT_RATIOS.to_vec())]
    ratios: Vec<f64>,
    #[command(flatten)]
    pairs: PairsSource,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Kernel width [default: sqrt of the mean kept squared distance].
    #[arg(long)]
    delta: Option<f64>,
    /// Squared-distance threshold [default: median squared distance to the 8th nearest neighbour].
    #[arg(long)]
    t: Option<f64>,
    /// Also write the graph as an i,j,weight edge list CSV.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

impl GraphArgs {
    fn build(&self, cloud: &PointCloud) -> Result<GspGraph> {
        let (delta, t) = match (self.delta, self.t) {
            (Some(d), Some(t)) => (d, t),
            (d, t) => {
                let p = default_graph_params(cloud)?;
                (d.unwrap_or(p.delta), t.unwrap_or(p.t))
            }
        };
        let g = build_gaussian_graph(cloud, delta, t)?;
        if let Some(path) = &self.graph_out {
            write_text(path, &g.edge_list_csv())?;
        }
        Ok(g)
    }
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Denoised cloud [default: <input stem>.<method>.<ext>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Regularization weight for tv and lr [default: 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Smoothing iterations (mls).
    #[arg(long, default_value_t = DEFAULT_MLS_ITERATIONS)]
    iterations: usize,
    /// Step size in (0, 1] (mls).
    #[arg(long, default_value_t = DEFAULT_MLS_STEP)]
    step: f64,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args, Debug)]
struct BaselineGftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    keep: KeepArgs,
    /// Recovered cloud [default: <input stem>.gft<C>.<ext>].
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON config; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cloud file [default: synthetic --shape].
    #[arg(long = "input")]
    input: Option<PathBuf>,
    /// Synthetic shape when no input is given [default: sphere].
    #[arg(long)]
    shape: Option<String>,
    /// Cloud size; larger inputs are subsampled [default: 397].
    #[arg(long)]
    points: Option<usize>,
    /// Seeded repetitions per cell [default: 50].
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of HGSP,GSP-TV,MLS-standin,LR,Noisy [default: all].
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// HGSP smoothness weight [default: 0.5 for table1, 1e-3 for msecurve].
    #[arg(long)]
    alpha: Option<f64>,
    /// HGSP sparsity weight [default: 1].
    #[arg(long)]
    beta: Option<f64>,
    /// HGSP outer iterations [default: 3].
    #[arg(long)]
    iters: Option<usize>,
    /// HGSP adjacency handling: enforce, enforce-or-relax or relax [default: relax].
    #[arg(long)]
    adjacency: Option<String>,
    /// GSP-TV weight [default: 1].
    #[arg(long)]
    tv_alpha: Option<f64>,
    /// LR weight [default: 1].
    #[arg(long)]
    lr_alpha: Option<f64>,
    /// Graph kernel width [default: data-adaptive].
    #[arg(long)]
    delta: Option<f64>,
    /// Graph squared-distance threshold [default: data-adaptive].
    #[arg(long)]
    t: Option<f64>,
    /// Ratio grid [default: 0.3,0.5,0.7,0.9,0.98,1.0].
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    /// Record per-method runtimes (reports are then not byte-reproducible).
    #[arg(long)]
    timing: bool,
    /// Report CSV [default: <experiment>.csv].
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Report JSON [default: <experiment>.json].
    #[arg(long)]
    out_json: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.input {
            c.input = Some(v.clone());
        }
        if let Some(v) = &self.shape {
            c.shape = v.clone();
        }
        if let Some(v) = self.points {
            c.points = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.methods {
            c.methods = v.iter().map(|m| Method::from_str(m.trim())).collect::<Result<_>>()?;
        }
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.beta.is_some() {
            c.beta = self.beta;
        }
        if let Some(v) = self.iters {
            c.iters = v;
        }
        if let Some(v) = &self.adjacency {
            c.adjacency = AdjacencyConstraint::from_str(v)?;
        }
        if let Some(v) = self.tv_alpha {
            c.tv_alpha = v;
        }
        if let Some(v) = self.lr_alpha {
            c.lr_alpha = v;
        }
        if self.delta.is_some() {
            c.delta = self.delta;
        }
        if self.t.is_some() {
            c.t = self.t;
        }
        if let Some(v) = &self.ratios {
            c.ratios = v.clone();
        }
        if self.timing {
            c.timing = true;
        }
        c.validate()?;
        Ok(c)
    }

    fn write(&self, report: &ExperimentReport, name: &str) -> Result<()> {
        let csv = self.out_csv.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
        let json = self.out_json.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.json")));
        write_text(&csv, &report.to_csv())?;
        write_text(&json, &report.to_json())?;
        println!("wrote {} and {}", csv.display(), json.display());
        Ok(())
    }
}

/// Basis file written by `spectrum`: `V` row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BasisFile {
    version: u32,
    #[serde(rename = "N")]
    n: usize,
    source_rank: usize,
    #[serde(rename = "V")]
    v: Vec<f64>,
}

/// `<dir>/<stem><suffix>`, where `suffix` may end in `{ext}` to reuse the
/// input extension.
fn derived(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("cloud");
    let ext = input.extension().and_then(|s| s.to_str()).unwrap_or("xyz");
    input.with_file_name(format!("{stem}{}", suffix.replace("{ext}", ext)))
}

/// Writes `text`, refusing to overwrite the file a command read from.
fn guarded_output(out: &Path, input: &Path) -> Result<()> {
    let same = match (fs::canonicalize(out), fs::canonicalize(input)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    if same {
        return Err(Error::invalid(format!("output {} would overwrite the input", out.display())));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(value).expect("serializable") + "\n"))
}

fn save_cloud(cloud: &PointCloud, out: &Path, input: Option<&Path>) -> Result<()> {
    if let Some(input) = input {
        guarded_output(out, input)?;
    }
    save(cloud, out, Format::Auto)?;
    println!("wrote {} ({} points)", out.display(), cloud.len());
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => {
            let cloud = generate_shape(ShapeKind::from_str(&a.shape)?, a.n, &ShapeParams::default(), a.seed)?;
            save_cloud(&cloud, &a.out, None)
        }
        Command::Noise(a) => {
            let kind = noise_from_parts(&a.kind, a.lo, a.hi, a.mean, a.variance, a.p, a.spread)?;
            let cloud = load(&a.input, Format::Auto)?;
            let noisy = add_noise(&cloud, &NoiseSpec::new(kind, a.seed))?;
            save_cloud(&noisy, &a.out, Some(&a.input))
        }
        Command::Spectrum(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let basis = estimate_spectrum(&cloud);
            let m = basis.matrix();
            let n = m.nrows();
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                v.extend(m.row(i).iter());
            }
            let out = a.out.unwrap_or_else(|| derived(&a.input, ".basis.json"));
            guarded_output(&out, &a.input)?;
            write_json(
                &out,
                &BasisFile {
                    version: 1,
                    n,
                    source_rank: basis.source_rank(),
                    v,
                },
            )?;
            println!("wrote {} (N = {n}, source rank {})", out.display(), basis.source_rank());
            Ok(())
        }
        Command::Fit(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let fit = fit_hypergraph(&cloud, &a.coeff.config()?)?;
            let out = a.out.unwrap_or_else(|| derived(&a.input, ".pairs.json"));
            guarded_output(&out, &a.input)?;
            write_json(&out, &PairsFile::from_pairs(&fit.pairs, 3))?;
            if let Some(path) = &a.solution_out {
                write_json(path, &fit.estimate)?;
            }
            println!(
                "wrote {} (forced index {}, objective {:e}, relaxed {})",
                out.display(),
                fit.estimate.solution.forced_index,
                fit.estimate.solution.objective,
                fit.estimate.relaxed
            );
            Ok(())
        }
        Command::Denoise(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let config = DenoiseConfig {
                alpha: a.alpha,
                beta: a.beta,
                outer_iters: a.iters,
                adjacency: AdjacencyConstraint::from_str(&a.adjacency)?,
                early_stop: a.early_stop,
                ..DenoiseConfig::default()
            };
            let result = joint_denoise(&cloud, &config)?;
            let out = a.out.unwrap_or_else(|| derived(&a.input, ".denoised.{ext}"));
            let trace = a.trace_out.unwrap_or_else(|| derived(&a.input, ".trace.csv"));
            let pairs = a.pairs_out.unwrap_or_else(|| derived(&a.input, ".pairs.json"));
            for p in [&trace, &pairs] {
                guarded_output(p, &a.input)?;
            }
            save_cloud(&result.denoised, &out, Some(&a.input))?;
            write_text(&trace, &result.trace_csv())?;
            write_json(&pairs, &PairsFile::from_pairs(&result.pairs, 3))?;
            println!("wrote {} and {}", trace.display(), pairs.display());
            Ok(())
        }
        Command::SampleHpf(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let pairs = a.pairs.resolve(&cloud)?;
            let scores = hpf_scores(&cloud, &pairs.supporting_matrix())?;
            let (sampled, idx) = sample_top_k(&scores, &cloud, a.k)?;
            let out = a.out.unwrap_or_else(|| derived(&a.input, &format!(".hpf{}.{{ext}}", a.k)));
            let idx_out = a
                .indices_out
                .unwrap_or_else(|| derived(&a.input, &format!(".hpf{}.indices.csv", a.k)));
            guarded_output(&idx_out, &a.input)?;
            save_cloud(&sampled, &out, Some(&a.input))?;
            let mut csv = String::from("rank,index,score\n");
            for (rank, &i) in idx.iter().enumerate() {
                csv.push_str(&format!("{rank},{i},{}\n", scores.scores[i]));
            }
            write_text(&idx_out, &csv)?;
            println!("wrote {}", idx_out.display());
            Ok(())
        }
        Command::SampleHgft(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let n = cloud.len();
            let pairs = a.pairs.resolve(&cloud)?;
            let keep = a.keep.resolve(n)?;
            let down = hgft_downsample(&cloud, &pairs, keep)?;
            let out = a.out.unwrap_or_else(|| derived(&a.input, &format!(".hgft{keep}.{{ext}}")));
            save_cloud(&down.recovered, &out, Some(&a.input))?;
            if let Some(path) = &a.curve_out {
                guarded_output(path, &a.input)?;
                let mut csv = String::from("C,ratio,mse\n");
                for &r in &a.ratios {
                    let c = keep_for_ratio(r, n)?;
                    let mse = error_metrics(&hgft_downsample(&cloud, &pairs, c)?.recovered, &cloud)?.mse;
                    csv.push_str(&format!("{c},{},{mse}\n", c as f64 / n as f64));
                }
                write_text(path, &csv)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::BaselineTv(a) | Command::BaselineLr(a) | Command::BaselineMls(a) => unreachable!("{a:?}"),
        Command::BaselineGft(a) => {
            let cloud = load(&a.input, Format::Auto)?;
            let keep = a.keep.resolve(cloud.len())?;
            let graph = a.graph.build(&cloud)?;
            let rec = gft_downsample(&cloud, &graph, keep)?;
            let out = a.out.unwrap_or_else(|| derived(&a.input, &format!(".gft{keep}.{{ext}}")));
            save_cloud(&rec, &out, Some(&a.input))
        }
        Command::Table1(a) => {
            let report = run_table1(&a.config()?)?;
            a.write(&report, "table1")
        }
        Command::Msecurve(a) => {
            let report = run_msecurve(&a.config()?)?;
            a.write(&report, "msecurve")
        }
    }
}

fn run_baseline(name: &str, a: BaselineArgs) -> Result<()> {
    let cloud = load(&a.input, Format::Auto)?;
    let graph = a.graph.build(&cloud)?;
    let y = match name {
        "tv" => gsp_tv_denoise(&cloud, &graph, a.alpha.unwrap_or(DEFAULT_TV_ALPHA))?,
        "lr" => laplacian_reg_denoise(&cloud, &graph, a.alpha.unwrap_or(DEFAULT_LR_ALPHA))?,
        _ => mls_denoise(&cloud, &graph, a.iterations, a.step)?,
    };
    let out = a.out.unwrap_or_else(|| derived(&a.input, &format!(".{name}.{{ext}}")));
    save_cloud(&y, &out, Some(&a.input))
}

/// Runs the command line; returns the process exit code (0 success, 1 usage
/// error, 2 runtime failure).
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    info!("running {:?}", cli.command);
    let outcome = match cli.command {
        Command::BaselineTv(a) => run_baseline("tv", a),
        Command::BaselineLr(a) => run_baseline("lr", a),
        Command::BaselineMls(a) => run_baseline("mls", a),
        other => run(other),
    };
    match outcome {
        Ok(()) => 0,
        Err(e @ (Error::InvalidParameter(_) | Error::Config(_))) => {
            eprintln!("error: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
