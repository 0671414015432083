use std::str::FromStr;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::baselines::{
    build_gaussian_graph, default_graph_params, gft_basis, gft_project, gsp_tv_denoise,
    laplacian_reg_denoise, mls_denoise, GspGraph,
};
use crate::coeffopt::{fit_hypergraph, CoeffConfig};
use crate::denoise::{joint_denoise, DenoiseConfig, DenoiseResult};
use crate::error::{Error, Result};
use crate::pointcloud::{
    add_noise, cube_edge_distance, error_metrics, generate_shape, load, ErrorReport, Format, NoiseKind,
    NoiseSpec, PointCloud, ShapeKind, ShapeParams,
};
use crate::rng::derive_seed;
use crate::sampling::{hgft_downsample, hpf_scores, keep_for_ratio, sample_top_k};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One (noise row, method) cell, aggregated over the trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub noise: String,
    pub method: Method,
    pub trials: usize,
    /// Statistics are present only when every trial succeeded.
    pub mean_l1: Option<f64>,
    pub std_l1: Option<f64>,
    pub mean_mse: Option<f64>,
    pub std_mse: Option<f64>,
    pub runtime_ms: Option<f64>,
    pub failure: Option<String>,
}

/// Orderings between HGSP and the other columns in one noise row; `None`
/// when either side is missing or failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowOrdering {
    pub noise: String,
    pub hgsp_below_noisy: Option<bool>,
    pub hgsp_le_gsp_tv: Option<bool>,
    pub hgsp_le_lr: Option<bool>,
    pub hgsp_le_mls: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub ratio: f64,
    pub keep: usize,
    pub mse_hgsp: f64,
    pub mse_gsp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveChecks {
    pub hgsp_nonincreasing: bool,
    pub gsp_nonincreasing: bool,
    /// Grid points where HGSP has the smaller error. Reported, not asserted.
    pub hgsp_below_gsp: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub cloud_points: usize,
    pub table: Vec<TableCell>,
    pub orderings: Vec<RowOrdering>,
    pub curve: Vec<CurvePoint>,
    pub curve_checks: Option<CurveChecks>,
}

impl ExperimentReport {
    fn new(experiment: &str, config: &ExperimentConfig, cloud_points: usize) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: experiment.into(),
            crate_version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            cloud_points,
            table: Vec::new(),
            orderings: Vec::new(),
            curve: Vec::new(),
            curve_checks: None,
        }
    }

    pub fn cell(&self, noise: &str, method: Method) -> Option<&TableCell> {
        self.table.iter().find(|c| c.noise == noise && c.method == method)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Table CSV for comparison runs, curve CSV for sampling-curve runs.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::new();
        if self.experiment == "msecurve" {
            out.push_str("ratio,C,mse_hgsp,mse_gsp\n");
            for p in &self.curve {
                out.push_str(&format!("{},{},{},{}\n", p.ratio, p.keep, p.mse_hgsp, p.mse_gsp));
            }
        } else {
            out.push_str("noise,method,trials,mean_l1,std_l1,mean_mse,std_mse,runtime_ms,status\n");
            for c in &self.table {
                let status = match &c.failure {
                    None => "ok".to_string(),
                    Some(msg) => format!("\"failed: {}\"", msg.replace('"', "'")),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    c.noise,
                    c.method,
                    c.trials,
                    opt(c.mean_l1),
                    opt(c.std_l1),
                    opt(c.mean_mse),
                    opt(c.std_mse),
                    opt(c.runtime_ms),
                    status
                ));
            }
        }
        out
    }
}

/// Loads the configured input, or generates the configured shape, at
/// `config.points` points.
pub fn experiment_cloud(config: &ExperimentConfig) -> Result<PointCloud> {
    match &config.input {
        Some(path) => {
            let cloud = load(path, Format::Auto)?;
            if cloud.len() > config.points {
                cloud.subsample(config.points, derive_seed(config.seed, u64::MAX))
            } else {
                Ok(cloud)
            }
        }
        None => generate_shape(
            ShapeKind::from_str(&config.shape)?,
            config.points,
            &ShapeParams::default(),
            derive_seed(config.seed, u64::MAX),
        ),
    }
}

fn graph_for(cloud: &PointCloud, config: &ExperimentConfig) -> Result<GspGraph> {
    let p = match (config.delta, config.t) {
        (Some(_), Some(_)) => None,
        _ => Some(default_graph_params(cloud)?),
    };
    let delta = config.delta.or(p.map(|p| p.delta)).expect("delta resolved");
    let t = config.t.or(p.map(|p| p.t)).expect("t resolved");
    build_gaussian_graph(cloud, delta, t)
}

pub fn denoise_config(config: &ExperimentConfig) -> DenoiseConfig {
    DenoiseConfig {
        alpha: config.alpha.unwrap_or(0.5),
        beta: config.beta.unwrap_or(1.0),
        outer_iters: config.iters,
        adjacency: config.adjacency,
        ..DenoiseConfig::default()
    }
}

fn run_method(
    method: Method,
    noisy: &PointCloud,
    config: &ExperimentConfig,
    graph: &mut Option<GspGraph>,
    on_denoise: &mut dyn FnMut(&DenoiseResult),
) -> Result<PointCloud> {
    let mut graph_ref = || -> Result<GspGraph> {
        if graph.is_none() {
            *graph = Some(graph_for(noisy, config)?);
        }
        Ok(graph.clone().expect("graph built"))
    };
    match method {
        Method::Noisy => Ok(noisy.clone()),
        Method::Hgsp => {
            let result = joint_denoise(noisy, &denoise_config(config))?;
            on_denoise(&result);
            Ok(result.denoised)
        }
        Method::GspTv => gsp_tv_denoise(noisy, &graph_ref()?, config.tv_alpha),
        Method::Lr => laplacian_reg_denoise(noisy, &graph_ref()?, config.lr_alpha),
        Method::MlsStandin => mls_denoise(noisy, &graph_ref()?, config.mls_iterations, config.mls_step),
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Denoising comparison: every noise row times every method, `trials`
/// seeded repetitions each, scored by the l1 error against the clean cloud.
/// A failing method marks its cell failed and the run continues.
pub fn run_table1(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_table1_observed(config, |_| {})
}

/// [`run_table1`], handing every HGSP denoising result to `on_denoise`.
pub fn run_table1_observed(
    config: &ExperimentConfig,
    mut on_denoise: impl FnMut(&DenoiseResult),
) -> Result<ExperimentReport> {
    run_table1_with(config, &mut |m, x, c, g| run_method(m, x, c, g, &mut on_denoise))
}

type MethodRunner<'a> = dyn FnMut(Method, &PointCloud, &ExperimentConfig, &mut Option<GspGraph>) -> Result<PointCloud> + 'a;

fn run_table1_with(config: &ExperimentConfig, runner: &mut MethodRunner<'_>) -> Result<ExperimentReport> {
    config.validate()?;
    let clean = experiment_cloud(config)?;
    let mut report = ExperimentReport::new("table1", config, clean.len());
    for (row, kind) in config.noise_rows.iter().enumerate() {
        let noise = kind.label();
        let mut scores: Vec<Vec<ErrorReport>> = vec![Vec::new(); config.methods.len()];
        let mut failures: Vec<Option<String>> = vec![None; config.methods.len()];
        let mut elapsed = vec![0.0f64; config.methods.len()];
        for trial in 0..config.trials {
            let seed = derive_seed(config.seed, (row * config.trials + trial) as u64);
            let noisy = add_noise(&clean, &NoiseSpec::new(*kind, seed))?;
            let mut graph = None;
            for (m, &method) in config.methods.iter().enumerate() {
                if failures[m].is_some() {
                    continue;
                }
                let start = Instant::now();
                let outcome = runner(method, &noisy, config, &mut graph).and_then(|y| error_metrics(&y, &clean));
                elapsed[m] += start.elapsed().as_secs_f64() * 1e3;
                match outcome {
                    Ok(e) => scores[m].push(e),
                    Err(e) => failures[m] = Some(format!("trial {trial}: {e}")),
                }
            }
        }
        for (m, &method) in config.methods.iter().enumerate() {
            let ok = failures[m].is_none();
            let l1: Vec<f64> = scores[m].iter().map(|e| e.l1_error).collect();
            let mse: Vec<f64> = scores[m].iter().map(|e| e.mse).collect();
            let (ml, sl) = mean_std(&l1);
            let (mm, sm) = mean_std(&mse);
            report.table.push(TableCell {
                noise: noise.clone(),
                method,
                trials: config.trials,
                mean_l1: ok.then_some(ml),
                std_l1: ok.then_some(sl),
                mean_mse: ok.then_some(mm),
                std_mse: ok.then_some(sm),
                runtime_ms: (config.timing && ok).then_some(elapsed[m] / config.trials as f64),
                failure: failures[m].clone(),
            });
        }
        let l1 = |method: Method| report.cell(&noise, method).and_then(|c| c.mean_l1);
        let cmp = |other: Method, strict: bool| match (l1(Method::Hgsp), l1(other)) {
            (Some(h), Some(o)) => Some(if strict { h < o } else { h <= o }),
            _ => None,
        };
        let ordering = RowOrdering {
            noise: noise.clone(),
            hgsp_below_noisy: cmp(Method::Noisy, true),
            hgsp_le_gsp_tv: cmp(Method::GspTv, false),
            hgsp_le_lr: cmp(Method::Lr, false),
            hgsp_le_mls: cmp(Method::MlsStandin, false),
        };
        info!("{noise}: {ordering:?}");
        report.orderings.push(ordering);
    }
    Ok(report)
}

fn nonincreasing(points: &[(f64, f64)]) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) + 1e-15)
}

/// Recovery error against sampling ratio for HGFT and GFT downsampling of
/// the clean cloud.
pub fn run_msecurve(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let cloud = experiment_cloud(config)?;
    let n = cloud.len();
    let fit_config = CoeffConfig {
        alpha: config.alpha.unwrap_or(crate::coeffopt::CoeffConfig::default().alpha),
        beta: config.beta.unwrap_or(1.0),
        adjacency: config.adjacency,
        ..CoeffConfig::default()
    };
    let pairs = fit_hypergraph(&cloud, &fit_config)?.pairs;
    let gft = gft_basis(&graph_for(&cloud, config)?);
    let mut report = ExperimentReport::new("msecurve", config, n);
    for &ratio in &config.ratios {
        let keep = keep_for_ratio(ratio, n)?;
        let mse_hgsp = error_metrics(&hgft_downsample(&cloud, &pairs, keep)?.recovered, &cloud)?.mse;
        let mse_gsp = error_metrics(&gft_project(&cloud, &gft, keep)?, &cloud)?.mse;
        report.curve.push(CurvePoint {
            ratio,
            keep,
            mse_hgsp,
            mse_gsp,
        });
    }
    let h: Vec<(f64, f64)> = report.curve.iter().map(|p| (p.ratio, p.mse_hgsp)).collect();
    let g: Vec<(f64, f64)> = report.curve.iter().map(|p| (p.ratio, p.mse_gsp)).collect();
    report.curve_checks = Some(CurveChecks {
        hgsp_nonincreasing: nonincreasing(&h),
        gsp_nonincreasing: nonincreasing(&g),
        hgsp_below_gsp: report.curve.iter().filter(|p| p.mse_hgsp < p.mse_gsp).count(),
    });
    Ok(report)
}

/// Mean distance to the nearest cube edge for HPF-selected points and for a
/// uniform subset of the same size, on one seeded cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeConcentration {
    pub seed: u64,
    pub hpf_mean: f64,
    pub uniform_mean: f64,
}

impl EdgeConcentration {
    pub fn concentrated(&self) -> bool {
        self.hpf_mean < self.uniform_mean
    }
}

pub fn hpf_edge_trial(n: usize, k: usize, seed: u64, coeff: &CoeffConfig) -> Result<EdgeConcentration> {
    let params = ShapeParams::default();
    let cube = generate_shape(ShapeKind::Cube, n, &params, derive_seed(seed, 0))?;
    let pairs = fit_hypergraph(&cube, coeff)?.pairs;
    let scores = hpf_scores(&cube, &pairs.supporting_matrix())?;
    let (picked, _) = sample_top_k(&scores, &cube, k)?;
    let uniform = cube.subsample(k, derive_seed(seed, 1))?;
    let half = params.side / 2.0;
    let mean = |c: &PointCloud| c.points().map(|p| cube_edge_distance(p, half)).sum::<f64>() / c.len() as f64;
    Ok(EdgeConcentration {
        seed,
        hpf_mean: mean(&picked),
        uniform_mean: mean(&uniform),
    })
}

pub(crate) fn noise_from_parts(
    kind: &str,
    lo: f64,
    hi: f64,
    mean: f64,
    variance: f64,
    p: f64,
    spread: f64,
) -> Result<NoiseKind> {
    let k = match kind.to_ascii_lowercase().as_str() {
        "uniform" => NoiseKind::Uniform { lo, hi },
        "gaussian" => NoiseKind::Gaussian { mean, variance },
        "impulse" => NoiseKind::Impulse { p, spread },
        other => return Err(Error::invalid(format!("unknown noise kind '{other}'"))),
    };
    k.validate()?;
    Ok(k)
}
