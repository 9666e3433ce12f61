//! Sample data model, effective samples and the check-function quantile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One input/output observation with a scalar output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Vec<f64>,
    pub y: f64,
}

/// An i.i.d. sample of observations sharing the same input dimension.
///
/// Stored column-wise: inputs are flattened row-major into `xs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    dim: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Sample {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        let dim = observations
            .first()
            .map(|o| o.x.len())
            .ok_or_else(|| Error::InvalidInput("sample is empty".into()))?;
        let mut xs = Vec::with_capacity(dim * observations.len());
        let mut ys = Vec::with_capacity(observations.len());
        for (i, obs) in observations.into_iter().enumerate() {
            if obs.x.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "observation {i} has {} inputs, expected {dim}",
                    obs.x.len()
                )));
            }
            xs.extend_from_slice(&obs.x);
            ys.push(obs.y);
        }
        Self::from_columns(dim, xs, ys)
    }

    /// Builds a sample from row-major inputs and outputs.
    pub fn from_columns(dim: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("input dimension must be at least 1".into()));
        }
        if ys.is_empty() {
            return Err(Error::InvalidInput("sample is empty".into()));
        }
        if xs.len() != dim * ys.len() {
            return Err(Error::InvalidInput(format!(
                "{} input values for {} observations of dimension {dim}",
                xs.len(),
                ys.len()
            )));
        }
        if let Some(i) = xs.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite input in observation {}",
                i / dim
            )));
        }
        if let Some(i) = ys.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite output in observation {i}")));
        }
        Ok(Self { dim, xs, ys })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Input dimension `p`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.ys[i]
    }

    pub fn outputs(&self) -> &[f64] {
        &self.ys
    }

    pub fn observations(&self) -> impl Iterator<Item = Observation> + '_ {
        (0..self.len()).map(|i| Observation {
            x: self.x(i).to_vec(),
            y: self.ys[i],
        })
    }

    /// True when observation `i` has every input coordinate at or below `x0`.
    #[inline]
    pub fn is_dominated(&self, i: usize, x0: &[f64]) -> bool {
        self.x(i).iter().zip(x0).all(|(xi, q)| xi <= q)
    }

    /// Applies `f` to every output, keeping the inputs.
    pub fn map_outputs(&self, f: impl Fn(f64) -> f64) -> Result<Sample> {
        Sample::from_columns(self.dim, self.xs.clone(), self.ys.iter().map(|&y| f(y)).collect())
    }

    /// Largest value of each input coordinate.
    pub fn input_max(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| {
                (0..self.len())
                    .map(|i| self.xs[i * self.dim + j])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

/// Productivity efficiency score: the largest output component.
pub fn efficiency_score(outputs: &[f64]) -> f64 {
    outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Reduces multi-output rows `(x, y_1..y_q)` to a scalar-output sample.
pub fn reduce_outputs<I>(rows: I) -> Result<Sample>
where
    I: IntoIterator<Item = (Vec<f64>, Vec<f64>)>,
{
    let observations = rows
        .into_iter()
        .enumerate()
        .map(|(i, (x, ys))| {
            if ys.is_empty() {
                return Err(Error::InvalidInput(format!("observation {i} has no outputs")));
            }
            Ok(Observation {
                x,
                y: efficiency_score(&ys),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Sample::new(observations)
}

/// Outputs of the observations whose inputs are dominated by a query point.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSample {
    y_sorted: Vec<f64>,
    n_total: usize,
    query_x: Vec<f64>,
}

impl EffectiveSample {
    /// Wraps already-filtered outputs drawn from a sample of size `n_total`.
    pub fn from_outputs(mut ys: Vec<f64>, n_total: usize, query_x: Vec<f64>) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::EmptyEffectiveSample);
        }
        if ys.len() > n_total {
            return Err(Error::InvalidInput(format!(
                "{} effective observations exceed the sample size {n_total}",
                ys.len()
            )));
        }
        ys.sort_unstable_by(f64::total_cmp);
        Ok(Self {
            y_sorted: ys,
            n_total,
            query_x,
        })
    }

    /// Effective outputs in ascending order.
    pub fn y_values(&self) -> &[f64] {
        &self.y_sorted
    }

    pub fn n_eff(&self) -> usize {
        self.y_sorted.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Empirical dominance probability `n_eff / n`.
    pub fn p_hat(&self) -> f64 {
        self.n_eff() as f64 / self.n_total as f64
    }

    pub fn query_x(&self) -> &[f64] {
        &self.query_x
    }

    pub fn max(&self) -> f64 {
        *self.y_sorted.last().expect("effective sample is nonempty")
    }

    /// Check-function quantile at level `tau`.
    pub fn quantile(&self, tau: f64) -> Result<f64> {
        check_quantile(self, tau)
    }

    /// Check-function quantile at the extreme level `1 - k / n_total`.
    pub fn upper_quantile(&self, k: f64) -> Result<f64> {
        self.quantile(1.0 - k / self.n_total as f64)
    }
}

/// Extracts the outputs of observations with `X <= x0` componentwise.
pub fn effective_sample(sample: &Sample, x0: &[f64]) -> Result<EffectiveSample> {
    if x0.len() != sample.dim() {
        return Err(Error::InvalidInput(format!(
            "query point has {} coordinates, sample inputs have {}",
            x0.len(),
            sample.dim()
        )));
    }
    let ys = (0..sample.len())
        .filter(|&i| sample.is_dominated(i, x0))
        .map(|i| sample.y(i))
        .collect();
    EffectiveSample::from_outputs(ys, sample.len(), x0.to_vec())
}

/// 1-based rank of the order statistic minimizing the check objective.
///
/// Returns `ceil(tau * n)`; when `tau * n` is integral the minimizer is an
/// interval and its lower endpoint, rank `tau * n`, is chosen. Products within
/// 1e-9 (relative) of an integer are treated as integral.
pub fn order_statistic_rank(tau: f64, n: usize) -> usize {
    let r = tau * n as f64;
    let nearest = r.round();
    let rank = if (r - nearest).abs() <= 1e-9 * r.max(1.0) {
        nearest
    } else {
        r.ceil()
    };
    (rank.max(1.0) as usize).min(n)
}

/// Check-function quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidLevel(tau));
    }
    if sorted.is_empty() {
        return Err(Error::EmptyEffectiveSample);
    }
    Ok(sorted[order_statistic_rank(tau, sorted.len()) - 1])
}

/// Minimizer of `sum rho_tau(Y_i - q)` over the effective sample.
pub fn check_quantile(es: &EffectiveSample, tau: f64) -> Result<f64> {
    quantile_sorted(&es.y_sorted, tau)
}

/// Koenker–Bassett check function `rho_tau(u) = (tau - 1{u <= 0}) u`.
#[inline]
pub fn check_loss(tau: f64, u: f64) -> f64 {
    if u <= 0.0 {
        (tau - 1.0) * u
    } else {
        tau * u
    }
}

/// Check objective `sum rho_tau(y_i - q)`.
pub fn check_objective(ys: &[f64], tau: f64, q: f64) -> f64 {
    ys.iter().map(|&y| check_loss(tau, y - q)).sum()
}
