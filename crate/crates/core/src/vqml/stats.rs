use serde::{Deserialize, Serialize};

/// Median with the 16th and 84th percentiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub median: f64,
    pub p16: f64,
    pub p84: f64,
}

impl Band {
    pub fn of(values: &[f64]) -> Band {
        Band {
            median: percentile(values, 50.0),
            p16: percentile(values, 16.0),
            p84: percentile(values, 84.0),
        }
    }
}

/// Percentile with linear interpolation between order statistics.
/// NaN for an empty slice.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = (p / 100.0).clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn accuracy(predicted: &[u8], actual: &[u8]) -> f64 {
    assert_eq!(predicted.len(), actual.len());
    if actual.is_empty() {
        return f64::NAN;
    }
    let hits = predicted.iter().zip(actual).filter(|(a, b)| a == b).count();
    hits as f64 / actual.len() as f64
}

/// Coefficient of determination; `None` when the actual values are
/// constant.
pub fn r_squared(predicted: &[f64], actual: &[f64]) -> Option<f64> {
    assert_eq!(predicted.len(), actual.len());
    if actual.is_empty() {
        return None;
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return None;
    }
    let ss_res: f64 = predicted.iter().zip(actual).map(|(p, y)| (y - p).powi(2)).sum();
    Some(1.0 - ss_res / ss_tot)
}
