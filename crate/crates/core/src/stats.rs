//! Small statistics toolkit for the Monte Carlo estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: xs.len().min(ys.len()),
        });
    }
    let n = T::of(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(Error::invalid("xs", "abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl Estimate {
    /// |estimate − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.estimate - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        self.z_score(target) <= n_se
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and its standard error s/√M.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    let m = xs.len() as f64;
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (m - 1.0);
    Estimate {
        estimate: mu,
        std_error: (var / m).sqrt(),
    }
}

/// E[X²] for a mean-zero law, with the standard error of the mean of squares.
pub fn second_moment(xs: &[f64]) -> Estimate {
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    mean_estimate(&sq)
}

/// Unbiased sample variance with delta-method standard error √((m₄ − s⁴)/M).
pub fn sample_variance(xs: &[f64]) -> Estimate {
    let m = xs.len() as f64;
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1.0);
    let m4 = xs.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / m;
    Estimate {
        estimate: var,
        std_error: ((m4 - var * var).max(0.0) / m).sqrt(),
    }
}

/// Sample covariance with the standard error of the mean of centred products.
pub fn covariance(xs: &[f64], ys: &[f64]) -> Estimate {
    let mx = mean(xs);
    let my = mean(ys);
    let prods: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let e = mean_estimate(&prods);
    let m = xs.len() as f64;
    Estimate {
        estimate: e.estimate * m / (m - 1.0),
        std_error: e.std_error,
    }
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Fraction of `xs` strictly above `threshold`, with binomial standard error.
pub fn exceedance(xs: &[f64], threshold: f64) -> Estimate {
    let m = xs.len() as f64;
    let p = xs.iter().filter(|&&x| x > threshold).count() as f64 / m;
    Estimate {
        estimate: p,
        std_error: (p * (1.0 - p) / m).sqrt(),
    }
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quantile estimate with a distribution-free standard error taken from the
/// order statistics at ranks Mq ± √(Mq(1−q)) (a ±1σ binomial band).
pub fn quantile_estimate(xs: &[f64], q: f64) -> Estimate {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let half_width = (m * q * (1.0 - q)).sqrt() / m;
    let lo = quantile_sorted(&sorted, (q - half_width).max(0.0));
    let hi = quantile_sorted(&sorted, (q + half_width).min(1.0));
    Estimate {
        estimate: quantile_sorted(&sorted, q),
        std_error: (hi - lo) / 2.0,
    }
}

/// Two-sample Kolmogorov–Smirnov statistic sup |F₁ − F₂|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`:
/// √(−ln(α/2)/2) · √((n+m)/(nm)).
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}
