//! Deterministic summation and trapezoidal weights.

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so the result is bit-stable however the terms were
/// produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Σ wᵢ fᵢ by pairwise summation.
pub fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let terms: Vec<f64> = weights.iter().zip(values).map(|(w, f)| w * f).collect();
    pairwise_sum(&terms)
}

/// Trapezoid weights for `n` nodes at spacing `h`: h·(½, 1, …, 1, ½).
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
    }
    w
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    weighted_sum(&trapezoid_weights(values.len(), h), values)
}

/// Composite Simpson rule for f on [a, b] with `panels` (rounded up to even)
/// subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let terms: Vec<f64> = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * f(a + i as f64 * h)
        })
        .collect();
    pairwise_sum(&terms) * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_sums() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn pairwise_beats_naive_on_small_terms() {
        let xs = vec![0.1; 1 << 20];
        let exact = 0.1 * (1u64 << 20) as f64;
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - exact).abs() < (naive - exact).abs());
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let n = 11;
        let h = 0.1;
        let f: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 * h + 1.0).collect();
        assert!((trapezoid(&f, h) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 3);
        assert!((v - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13, "{v}");
    }

    #[test]
    fn trapezoid_is_second_order() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).exp()).collect();
            (trapezoid(&f, h) - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(101) / err(201);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }
}
