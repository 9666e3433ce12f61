//! Rules of thumb for the effective-index grid, subsample size and run lengths.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::k_of_h;
use crate::limits::HGrid;

/// Named effective-index grids `(h(k0), h(m k0), h(k1), h(k2), h(k3))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    S1,
    S2,
}

impl Preset {
    pub fn indices(self) -> [usize; 5] {
        match self {
            Preset::S1 => [15, 21, 27, 33, 39],
            Preset::S2 => [10, 15, 20, 25, 30],
        }
    }

    /// Full five-index grid (three targets).
    pub fn grid(self) -> HGrid {
        HGrid::from_slice(&self.indices()).expect("preset grids are valid")
    }

    /// Grid with the first `l` targets.
    pub fn grid_with(self, l: usize) -> Result<HGrid> {
        self.grid().truncated(l)
    }

    /// Ratio `h(m k0) / h(k0)`, the nominal spacing constant.
    pub fn nominal_m(self) -> f64 {
        let [h0, hm0, ..] = self.indices();
        hm0 as f64 / h0 as f64
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::S1 => "S1",
            Preset::S2 => "S2",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Preset::S1),
            "S2" => Ok(Preset::S2),
            other => Err(Error::InvalidConfig(format!("unknown preset {other:?}"))),
        }
    }
}

pub fn preset_grid(preset: Preset) -> [usize; 5] {
    preset.indices()
}

/// Number of target quantiles for an effective sample size.
pub fn default_l(n_eff: usize) -> usize {
    if n_eff < 2000 {
        2
    } else {
        3
    }
}

/// `L + 2` equally spaced distinct integers in `[h1, h2]`.
///
/// Points are rounded to the nearest integer; a point that collides with its
/// predecessor is bumped up by one.
pub fn equally_spaced_grid(h1: usize, h2: usize, l: usize) -> Result<HGrid> {
    let needed = l + 2;
    if l == 0 || h1 == 0 || h2 < h1 || h2 - h1 + 1 < needed {
        return Err(Error::RangeTooNarrow { h1, h2, needed });
    }
    let step = (h2 - h1) as f64 / (needed - 1) as f64;
    let mut hs: Vec<usize> = Vec::with_capacity(needed);
    for i in 0..needed {
        let mut h = (h1 as f64 + step * i as f64).round() as usize;
        if let Some(&prev) = hs.last() {
            h = h.max(prev + 1);
        }
        hs.push(h);
    }
    if hs[needed - 1] > h2 {
        return Err(Error::RangeTooNarrow { h1, h2, needed });
    }
    HGrid::from_slice(&hs)
}

/// Upper bound `max(40, 0.1 b p)` of the effective-index range.
pub fn index_upper_bound(b: usize, p_hat: f64) -> usize {
    (0.1 * b as f64 * p_hat).max(40.0).floor() as usize
}

/// Equally spaced grid on `[h1, max(40, 0.1 b p)]`; `l` defaults from `n_eff`.
pub fn auto_grid(n_eff: usize, b: usize, p_hat: f64, l: Option<usize>, h1: usize) -> Result<HGrid> {
    let l = l.unwrap_or_else(|| default_l(n_eff));
    if !(2..=3).contains(&l) {
        return Err(Error::InvalidConfig(format!("L must be 2 or 3, got {l}")));
    }
    equally_spaced_grid(h1, index_upper_bound(b, p_hat), l)
}

/// Piecewise-linear bracket of the subsample-size rule, in effective units.
fn subsample_bracket(np: f64) -> f64 {
    let pos = |v: f64| v.max(0.0);
    let last = if np > 5000.0 {
        (7.0 / 40.0) * (1.0 - 5000f64.ln() / np.ln()) * (np - 5000.0)
    } else {
        0.0
    };
    0.4 * np - pos(np - 300.0) / 7.0 - (2.3 / 28.0) * pos(np - 1000.0) - last
}

/// Subsample size from the effective size `n p` and `p`.
pub fn subsample_size_effective(np: f64, p_hat: f64) -> Result<usize> {
    if !(np >= 1.0 && p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "subsample size needs n p >= 1 and p in (0, 1], got n p = {np}, p = {p_hat}"
        )));
    }
    let bracket = subsample_bracket(np);
    if bracket <= 0.0 {
        return Err(Error::NonPositiveB(bracket));
    }
    let b = (bracket / p_hat).floor();
    if b < 1.0 {
        return Err(Error::NonPositiveB(b));
    }
    Ok(b as usize)
}

/// Subsample size `b` for a sample of size `n` with dominance probability `p`.
pub fn subsample_size(n: usize, p_hat: f64) -> Result<usize> {
    subsample_size_effective(n as f64 * p_hat, p_hat)
}

/// True when `n p` lies where the subsample rule was calibrated.
pub fn subsample_rule_in_range(np: f64) -> bool {
    (300.0..=1e5).contains(&np)
}

pub const DEFAULT_SUBSAMPLES: usize = 5000;
pub const DEFAULT_CHAIN_TOTAL: usize = 20_000;
pub const DEFAULT_BURN_IN: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PresetTag {
    S1,
    S2,
    Custom,
}

impl From<Preset> for PresetTag {
    fn from(p: Preset) -> Self {
        match p {
            Preset::S1 => PresetTag::S1,
            Preset::S2 => PresetTag::S2,
        }
    }
}

/// Resolved tuning for one effective sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningConfig {
    pub h_grid: HGrid,
    /// `k` constants for `h0, hm0, h1, ..., hL` under the estimated `p`.
    pub k_values: Vec<f64>,
    /// `k(hm0) / k(h0)`.
    pub m: f64,
    pub b: usize,
    pub subsamples: usize,
    pub chain_total: usize,
    pub burn_in: usize,
    pub preset: PresetTag,
}

impl TuningConfig {
    pub fn new(h_grid: HGrid, n: usize, p_hat: f64, preset: PresetTag) -> Result<Self> {
        let b = subsample_size(n, p_hat)?;
        if b >= n {
            return Err(Error::InvalidConfig(format!("subsample size {b} is not below n = {n}")));
        }
        let k_values: Vec<f64> = h_grid.to_vec().iter().map(|&h| k_of_h(h, p_hat)).collect();
        let m = k_values[1] / k_values[0];
        Ok(Self {
            h_grid,
            k_values,
            m,
            b,
            subsamples: DEFAULT_SUBSAMPLES,
            chain_total: DEFAULT_CHAIN_TOTAL,
            burn_in: DEFAULT_BURN_IN,
            preset,
        })
    }

    pub fn from_preset(preset: Preset, l: usize, n: usize, p_hat: f64) -> Result<Self> {
        Self::new(preset.grid_with(l)?, n, p_hat, preset.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::h_of_k;

    #[test]
    fn presets() {
        assert_eq!(preset_grid(Preset::S1), [15, 21, 27, 33, 39]);
        assert_eq!(preset_grid(Preset::S2), [10, 15, 20, 25, 30]);
        assert!((Preset::S1.nominal_m() - 1.4).abs() < 1e-12);
        assert_eq!("s2".parse::<Preset>().unwrap(), Preset::S2);
        assert!("S3".parse::<Preset>().is_err());
    }

    #[test]
    fn equal_spacing_reproduces_presets() {
        assert_eq!(equally_spaced_grid(15, 39, 3).unwrap().to_vec(), vec![15, 21, 27, 33, 39]);
        assert_eq!(equally_spaced_grid(10, 30, 3).unwrap().to_vec(), vec![10, 15, 20, 25, 30]);
        assert_eq!(
            equally_spaced_grid(39, 40, 3),
            Err(Error::RangeTooNarrow { h1: 39, h2: 40, needed: 5 })
        );
        // Exactly enough room: consecutive integers.
        assert_eq!(equally_spaced_grid(5, 8, 2).unwrap().to_vec(), vec![5, 6, 7, 8]);
    }

    #[test]
    fn auto_grid_upper_bound() {
        // 0.1 * 1200 * 0.5 = 60 > 40
        let g = auto_grid(2750, 1200, 0.5, Some(2), 20).unwrap();
        assert_eq!(g.to_vec(), vec![20, 33, 47, 60]);
        // small b: bound stays at 40
        let g = auto_grid(1000, 300, 0.5, None, 16).unwrap();
        assert_eq!(g.l(), 2);
        assert_eq!(g.max_h(), 40);
        assert!(auto_grid(1000, 300, 0.5, Some(4), 16).is_err());
    }

    #[test]
    fn subsample_size_examples() {
        assert_eq!(subsample_size_effective(200.0, 0.5).unwrap(), 160);
        assert_eq!(subsample_size_effective(1833.0, 11.0 / 30.0).unwrap(), 1215);
        // At n p = 5000 the logarithmic term vanishes.
        let at = subsample_bracket(5000.0);
        let linear = 0.4 * 5000.0 - 4700.0 / 7.0 - (2.3 / 28.0) * 4000.0;
        assert_eq!(at, linear);
        assert!(matches!(subsample_size_effective(0.5, 0.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn subsample_size_is_monotone_in_n() {
        for &p in &[0.2, 0.55, 1.0] {
            let mut prev = 0;
            let mut np = 300.0;
            while np <= 1e5 {
                let b = subsample_size_effective(np, p).unwrap();
                assert!(b >= prev, "np={np} p={p}");
                assert!((b as f64) < np / p);
                prev = b;
                np *= 1.01;
            }
        }
    }

    #[test]
    fn preset_indices_survive_k_round_trip() {
        // p values produced by the simulation designs at their query points.
        let ps = [2.2 / 6.0, 3.3 / 6.0, 4.4 / 6.0, 5.5 / 6.0, 0.3025, 0.5378, 0.8402];
        for preset in [Preset::S1, Preset::S2] {
            for &p in &ps {
                let t = TuningConfig::from_preset(preset, 3, 5000, p).unwrap();
                let hs: Vec<usize> = t.k_values.iter().map(|&k| h_of_k(k, p).unwrap()).collect();
                assert_eq!(hs, preset.indices().to_vec());
                assert!(t.m * t.k_values[0] * p > t.k_values[0] * p + 1.0);
            }
        }
    }
}
