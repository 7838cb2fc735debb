use serde::{Deserialize, Serialize};

/// Least-squares line through `(ln x, ln |y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log coordinates.
    pub residual: f64,
}

pub fn loglog_fit(x: &[f64], y: &[f64]) -> LogLogFit {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && b.abs() > 0.0)
        .map(|(a, b)| (a.ln(), b.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return LogLogFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
        };
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    LogLogFit {
        slope,
        intercept,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        let f = loglog_fit(&x, &y);
        assert!((f.slope - 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }
}
