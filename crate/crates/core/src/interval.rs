use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Inference engine that produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sub,
    Abc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sub => "sub",
            Method::Abc => "abc",
        })
    }
}

/// Point estimate with a confidence interval.
///
/// `lower <= upper` always holds; the point is not guaranteed to lie inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage, e.g. 0.95.
    pub level: f64,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

impl IntervalEstimate {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}
