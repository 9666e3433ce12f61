//! Monte Carlo designs with known frontiers and the coverage/length harness.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abc::{estimate_abc, AbcConfig};
use crate::error::{Error, Result};
use crate::evt::{default_tail_fraction, pickands_xi};
use crate::interval::{IntervalEstimate, Method};
use crate::rng::{self, tag};
use crate::sample::{effective_sample, Sample};
use crate::subsampling::{run_subsampling, SubsamplingConfig};
use crate::tuning::{subsample_size, Preset, DEFAULT_BURN_IN, DEFAULT_CHAIN_TOTAL, DEFAULT_SUBSAMPLES};

/// Simulation designs on inputs in `[0, 6]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dgp {
    /// `X ~ U(0, 6)`, `Y = sqrt(X) U`.
    Dgp1,
    /// Uniform on the triangle `0 <= y <= x <= 6`.
    Dgp2,
}

impl fmt::Display for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dgp::Dgp1 => "DGP1",
            Dgp::Dgp2 => "DGP2",
        })
    }
}

impl FromStr for Dgp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DGP1" | "1" => Ok(Dgp::Dgp1),
            "DGP2" | "2" => Ok(Dgp::Dgp2),
            other => Err(Error::InvalidConfig(format!("unknown design {other:?}"))),
        }
    }
}

/// How the triangle design is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TriangleSampler {
    /// `X = 6 sqrt(V1)`, `Y = X V2`.
    #[default]
    InverseCdf,
    /// Uniform points on the square, kept when `y <= x`.
    Rejection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub id: Dgp,
    pub n: usize,
    #[serde(default)]
    pub sampler: TriangleSampler,
}

impl DgpSpec {
    pub fn new(id: Dgp, n: usize) -> Self {
        Self {
            id,
            n,
            sampler: TriangleSampler::default(),
        }
    }

    pub fn true_frontier(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 6.0);
        match self.id {
            Dgp::Dgp1 => x.sqrt(),
            Dgp::Dgp2 => x,
        }
    }

    /// `P(X <= x)`.
    pub fn true_p0(&self, x: f64) -> f64 {
        let r = x.clamp(0.0, 6.0) / 6.0;
        match self.id {
            Dgp::Dgp1 => r,
            Dgp::Dgp2 => r * r,
        }
    }

    pub fn true_xi(&self) -> f64 {
        -0.5
    }
}

/// Draws `spec.n` observations from the stream of `seed`.
pub fn gen_dgp(spec: &DgpSpec, seed: u64) -> Sample {
    let mut rng = rng::stream(seed, &[tag::DGP]);
    let mut xs = Vec::with_capacity(spec.n);
    let mut ys = Vec::with_capacity(spec.n);
    while xs.len() < spec.n {
        let (x, y) = match (spec.id, spec.sampler) {
            (Dgp::Dgp1, _) => {
                let x = 6.0 * rng.random::<f64>();
                (x, x.sqrt() * rng.random::<f64>())
            }
            (Dgp::Dgp2, TriangleSampler::InverseCdf) => {
                let x = 6.0 * rng.random::<f64>().sqrt();
                (x, x * rng.random::<f64>())
            }
            (Dgp::Dgp2, TriangleSampler::Rejection) => {
                let x = 6.0 * rng.random::<f64>();
                let y = 6.0 * rng.random::<f64>();
                if y > x {
                    continue;
                }
                (x, y)
            }
        };
        xs.push(x);
        ys.push(y);
    }
    Sample::from_columns(1, xs, ys).expect("generated values are finite")
}

/// An inference engine with its tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MethodSpec {
    Sub {
        preset: Preset,
        subsamples: usize,
    },
    Abc {
        preset: Preset,
        l: usize,
        chain_total: usize,
        burn_in: usize,
        mc_draws: usize,
    },
}

impl MethodSpec {
    pub fn sub(preset: Preset) -> Self {
        MethodSpec::Sub {
            preset,
            subsamples: DEFAULT_SUBSAMPLES,
        }
    }

    pub fn abc(preset: Preset, l: usize) -> Self {
        MethodSpec::Abc {
            preset,
            l,
            chain_total: DEFAULT_CHAIN_TOTAL,
            burn_in: DEFAULT_BURN_IN,
            mc_draws: crate::abc::DEFAULT_DENSITY_DRAWS,
        }
    }

    pub fn method(&self) -> Method {
        match self {
            MethodSpec::Sub { .. } => Method::Sub,
            MethodSpec::Abc { .. } => Method::Abc,
        }
    }

    /// Short configuration label, e.g. `S1` or `S1-L3`.
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Sub { preset, .. } => preset.to_string(),
            MethodSpec::Abc { preset, l, .. } => format!("{preset}-L{l}"),
        }
    }

    /// Runs the engine on one sample with a shared extreme-value index.
    pub fn estimate(
        &self,
        sample: &Sample,
        x0: &[f64],
        xi_hat: f64,
        alpha: f64,
        seed: u64,
    ) -> Result<IntervalEstimate> {
        let es = effective_sample(sample, x0)?;
        match self {
            MethodSpec::Sub { preset, subsamples } => {
                let b = subsample_size(sample.len(), es.p_hat())?;
                let mut cfg = SubsamplingConfig::new(preset.grid_with(2)?, b, seed);
                cfg.subsamples = *subsamples;
                cfg.alpha = alpha;
                run_subsampling(sample, x0, &cfg, xi_hat)
            }
            MethodSpec::Abc {
                preset,
                l,
                chain_total,
                burn_in,
                mc_draws,
            } => {
                let mut cfg = AbcConfig::new(preset.grid_with(*l)?, seed);
                cfg.chain_total = *chain_total;
                cfg.burn_in = *burn_in;
                cfg.density_mc_draws = *mc_draws;
                estimate_abc(sample, x0, &cfg, xi_hat, alpha).map(|r| r.estimate)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub dgp: DgpSpec,
    pub x_list: Vec<f64>,
    pub methods: Vec<MethodSpec>,
    pub replications: usize,
    pub seed: u64,
    /// Miscoverage of each interval.
    pub alpha: f64,
    /// Tail fraction of the Pickands estimator; defaults from `n p`.
    pub tail_fraction: Option<f64>,
}

impl StudyConfig {
    pub fn new(dgp: DgpSpec, x_list: Vec<f64>, methods: Vec<MethodSpec>, replications: usize, seed: u64) -> Self {
        Self {
            dgp,
            x_list,
            methods,
            replications,
            seed,
            alpha: 0.05,
            tail_fraction: None,
        }
    }
}

/// One interval from one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub x: f64,
    pub method: Method,
    pub config: String,
    pub xi_hat: Option<f64>,
    pub point: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Posterior mean, for the Bayesian engine.
    pub mean: Option<f64>,
    pub error: Option<String>,
}

/// Summary over replications for one `(method, config, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub dgp: Dgp,
    pub n: usize,
    pub x: f64,
    pub method: Method,
    pub config: String,
    pub frontier: f64,
    pub replications: usize,
    pub failures: usize,
    pub coverage: f64,
    pub avg_length: f64,
    pub bias: f64,
    pub mad: f64,
    pub rmse: f64,
    /// Share of runs with `frontier <= point`.
    pub upper_fraction: f64,
    /// Metrics of the posterior mean, for the Bayesian engine.
    pub mean_bias: Option<f64>,
    pub mean_mad: Option<f64>,
    pub mean_rmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub records: Vec<ReplicationRecord>,
    /// Wall-clock time; not part of the reproducible output.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl StudyReport {
    pub fn row(&self, method: Method, config: &str, x: f64) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.config == config && r.x == x)
    }

    pub fn rows_csv(&self) -> Result<String> {
        to_csv(&self.rows)
    }

    pub fn records_csv(&self) -> Result<String> {
        to_csv(&self.records)
    }
}

fn to_csv<T: Serialize>(items: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for item in items {
        w.serialize(item).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Bias, MAD and RMSE of a set of errors.
pub fn error_metrics(errors: &[f64]) -> (f64, f64, f64) {
    let n = errors.len() as f64;
    let bias = errors.iter().sum::<f64>() / n;
    let mad = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    (bias, mad, rmse)
}

fn replication(cfg: &StudyConfig, r: usize) -> Vec<ReplicationRecord> {
    let sample = gen_dgp(&cfg.dgp, rng::derive_seed(cfg.seed, &[r as u64]));
    let mut out = Vec::with_capacity(cfg.x_list.len() * cfg.methods.len());
    for (xi_idx, &x) in cfg.x_list.iter().enumerate() {
        let x0 = [x];
        let xi_hat = effective_sample(&sample, &x0).and_then(|es| {
            let tau = cfg.tail_fraction.unwrap_or_else(|| default_tail_fraction(es.n_eff()));
            pickands_xi(&es, tau).map(|e| e.xi_hat)
        });
        for (j, m) in cfg.methods.iter().enumerate() {
            let seed = rng::derive_seed(cfg.seed, &[tag::METHOD, r as u64, xi_idx as u64, j as u64]);
            let result = xi_hat
                .clone()
                .and_then(|xi| m.estimate(&sample, &x0, xi, cfg.alpha, seed));
            let mut rec = ReplicationRecord {
                replication: r,
                x,
                method: m.method(),
                config: m.label(),
                xi_hat: xi_hat.as_ref().ok().copied(),
                point: None,
                lower: None,
                upper: None,
                mean: None,
                error: None,
            };
            match result {
                Ok(est) => {
                    rec.point = Some(est.point);
                    rec.lower = Some(est.lower);
                    rec.upper = Some(est.upper);
                    rec.mean = est.diagnostics.get("posterior_mean").copied();
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            out.push(rec);
        }
    }
    out
}

/// Runs every method at every `x` on `replications` independent samples.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    if cfg.replications == 0 {
        return Err(Error::InvalidConfig("a study needs at least one replication".into()));
    }
    if cfg.x_list.is_empty() || cfg.methods.is_empty() {
        return Err(Error::InvalidConfig("a study needs query points and methods".into()));
    }
    let start = Instant::now();
    let records: Vec<ReplicationRecord> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| replication(cfg, r))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut rows = Vec::new();
    for m in &cfg.methods {
        for &x in &cfg.x_list {
            let label = m.label();
            let mine: Vec<&ReplicationRecord> = records
                .iter()
                .filter(|r| r.method == m.method() && r.config == label && r.x == x)
                .collect();
            let ok: Vec<&ReplicationRecord> = mine.iter().copied().filter(|r| r.error.is_none()).collect();
            let failures = mine.len() - ok.len();
            if failures * 100 >= cfg.replications && failures > 0 {
                return Err(Error::StudyFailed {
                    failures,
                    replications: cfg.replications,
                });
            }
            let phi = cfg.dgp.true_frontier(x);
            let count = ok.len() as f64;
            let covered = ok
                .iter()
                .filter(|r| r.lower.unwrap() <= phi && phi <= r.upper.unwrap())
                .count();
            let errors: Vec<f64> = ok.iter().map(|r| r.point.unwrap() - phi).collect();
            let (bias, mad, rmse) = error_metrics(&errors);
            let means: Vec<f64> = ok.iter().filter_map(|r| r.mean.map(|v| v - phi)).collect();
            let (mean_bias, mean_mad, mean_rmse) = if !means.is_empty() && means.len() == ok.len() {
                let (b, a, r) = error_metrics(&means);
                (Some(b), Some(a), Some(r))
            } else {
                (None, None, None)
            };
            rows.push(StudyRow {
                dgp: cfg.dgp.id,
                n: cfg.dgp.n,
                x,
                method: m.method(),
                config: label,
                frontier: phi,
                replications: ok.len(),
                failures,
                coverage: covered as f64 / count,
                avg_length: ok.iter().map(|r| r.upper.unwrap() - r.lower.unwrap()).sum::<f64>() / count,
                bias,
                mad,
                rmse,
                upper_fraction: ok.iter().filter(|r| phi <= r.point.unwrap()).count() as f64 / count,
                mean_bias,
                mean_mad,
                mean_rmse,
            });
        }
    }
    Ok(StudyReport {
        rows,
        records,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelopes_hold() {
        for sampler in [TriangleSampler::InverseCdf, TriangleSampler::Rejection] {
            let s = gen_dgp(&DgpSpec { id: Dgp::Dgp2, n: 2000, sampler }, 1);
            assert!(s.observations().all(|o| 0.0 <= o.y && o.y <= o.x[0] && o.x[0] <= 6.0));
        }
        let s = gen_dgp(&DgpSpec::new(Dgp::Dgp1, 2000), 1);
        assert!(s.observations().all(|o| 0.0 <= o.y && o.y <= o.x[0].sqrt()));
    }

    #[test]
    fn dominance_probabilities() {
        for (id, expected) in [(Dgp::Dgp1, 0.5), (Dgp::Dgp2, 0.25)] {
            let spec = DgpSpec::new(id, 1_000_000);
            assert_eq!(spec.true_p0(3.0), expected);
            let s = gen_dgp(&spec, 7);
            let p = (0..s.len()).filter(|&i| s.x(i)[0] <= 3.0).count() as f64 / s.len() as f64;
            assert!((p - expected).abs() < 0.002, "{id}: {p}");
        }
    }

    #[test]
    fn metrics_of_one_error() {
        assert_eq!(error_metrics(&[-0.3]), (-0.3, 0.3, 0.3));
    }

    #[test]
    fn single_replication() {
        let cfg = StudyConfig::new(
            DgpSpec::new(Dgp::Dgp1, 3000),
            vec![3.3],
            vec![MethodSpec::Sub {
                preset: Preset::S1,
                subsamples: 100,
            }],
            1,
            5,
        );
        let report = run_study(&cfg).unwrap();
        let row = &report.rows[0];
        assert!(row.coverage == 0.0 || row.coverage == 1.0);
        assert_eq!(row.rmse, row.bias.abs());
        assert_eq!(row.mad, row.bias.abs());
        assert_eq!(report.records.len(), 1);
    }
}
