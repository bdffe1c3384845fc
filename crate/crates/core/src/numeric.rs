//! Small numerical helpers shared by the kernel, region and Monte Carlo code.

/// `log Σ exp(v)`, shifted by the maximum. Returns `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `log(1 + Σ_j exp(s_j))`, i.e. `log(1 + ‖z‖²)` in log-squared-modulus coordinates.
pub fn softplus_logsum(s: &[f64]) -> f64 {
    log_sum_exp(std::iter::once(0.0).chain(s.iter().copied()))
}

/// Table of `ln k!` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    /// `ln` of the multinomial `n! / ((n - |α|)! α_1! ⋯ α_m!)`.
    pub fn ln_multinomial(&self, n: i64, alpha: &[i64]) -> f64 {
        let total: i64 = alpha.iter().sum();
        debug_assert!(total <= n && alpha.iter().all(|&a| a >= 0));
        let mut v = self.get(n as usize) - self.get((n - total) as usize);
        for &a in alpha {
            v -= self.get(a as usize);
        }
        v
    }
}

/// Composite Simpson weights for `intervals` (even) equal subintervals of `[a, b]`.
pub fn simpson_weights(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    assert!(intervals >= 2 && intervals.is_multiple_of(2), "Simpson needs an even interval count");
    let h = (b - a) / intervals as f64;
    (0..=intervals)
        .map(|i| {
            let c = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Ordinary least-squares fit `y ≈ intercept + slope·x`; returns `(slope, intercept)`.
pub fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Kolmogorov–Smirnov sup distance between the empirical distribution of `samples`
/// and a continuous distribution function `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_survives_large_arguments() {
        let v = log_sum_exp([1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_multinomial_small_cases() {
        let lf = LnFactorials::up_to(10);
        // 4!/(1! 1! 2!) = 12
        assert!((lf.ln_multinomial(4, &[1, 1]) - 12f64.ln()).abs() < 1e-13);
        assert!((lf.ln_multinomial(5, &[0]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let w = simpson_weights(0.0, 2.0, 4);
        let v: f64 = w.iter().enumerate().map(|(i, wi)| wi * (0.5 * i as f64).powi(3)).sum();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn ks_of_uniform_grid_is_small() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_distance(&xs, |x| x.clamp(0.0, 1.0)) <= 0.0005 + 1e-12);
    }
}
