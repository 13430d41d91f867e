//! Small numeric helpers shared by experiments and acceptance checks:
//! geometric parameter grids, least-squares slope fits, and the
//! Kolmogorov–Smirnov distance for waiting-time validation.

use alloc::vec::Vec;

/// `points` values spaced geometrically from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "need at least two grid points");
    assert!(min > 0.0 && max > min, "grid bounds must satisfy 0 < min < max");
    let ratio = libm::pow(max / min, 1.0 / (points - 1) as f64);
    let mut out = Vec::with_capacity(points);
    let mut v = min;
    for k in 0..points {
        out.push(if k == points - 1 { max } else { v });
        v *= ratio;
    }
    out
}

/// Least-squares line `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points to fit a line");
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Log–log slope of `y` against `x` (both entry-wise positive).
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|&v| libm::log(v)).collect();
    let ly: Vec<f64> = y.iter().map(|&v| libm::log(v)).collect();
    linear_fit(&lx, &ly).0
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against the
/// continuous CDF `cdf`. `samples` must be sorted ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len();
    assert!(n > 0, "KS statistic needs samples");
    let mut d = 0.0_f64;
    for (i, &t) in samples.iter().enumerate() {
        let f = cdf(t);
        let below = f - i as f64 / n as f64;
        let above = (i + 1) as f64 / n as f64 - f;
        d = d.max(below).max(above);
    }
    d
}

/// Asymptotic critical KS distance at the 1 % significance level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.62762 / libm::sqrt(n as f64)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    assert!(n >= 2.0, "need at least two samples");
    let mean: f64 = samples.iter().sum::<f64>() / n;
    let var: f64 = samples.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_endpoints_and_ratio() {
        let g = geometric_grid(0.002, 0.2, 16);
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.002);
        assert_eq!(g[15], 0.2);
        let r0 = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (slope, intercept) = linear_fit(&x, &y);
        assert!((slope - 2.5).abs() < 1e-12);
        assert!((intercept + 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let x = [0.5, 1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v).collect();
        assert!((log_log_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_of_perfect_quantiles() {
        // Samples at exact quantile midpoints: D = 1/(2n).
        let n = 100;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&samples, |t| t);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_detects_bias() {
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| ((i as f64 + 0.5) / n as f64) * 0.5).collect();
        let d = ks_statistic(&samples, |t| t);
        assert!(d > ks_critical_1pct(n));
    }

    #[test]
    fn mean_and_se_basic() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-12);
        // var = 5/3, se = sqrt(5/12)
        assert!((se - libm::sqrt(5.0 / 12.0)).abs() < 1e-12);
    }
}
