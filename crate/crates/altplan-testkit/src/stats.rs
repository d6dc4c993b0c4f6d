//! Small statistics helpers for randomized behaviour tests.

/// True iff `count` successes out of `trials` lie within `sigmas` standard
/// deviations of a Binomial(trials, p) mean.
pub fn binomial_within(count: u64, trials: u64, p: f64, sigmas: f64) -> bool {
    let mean = trials as f64 * p;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= sigmas * sd
}

/// Pearson chi-square statistic against a uniform distribution over
/// `counts.len()` cells.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Acceptance threshold for a chi-square statistic with `dof` degrees of
/// freedom at `sigmas` standard deviations above the mean (the statistic has
/// mean `dof` and variance `2 * dof`).
pub fn chi_square_threshold(dof: usize, sigmas: f64) -> f64 {
    dof as f64 + sigmas * (2.0 * dof as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_of_exact_uniform_is_zero() {
        assert_eq!(chi_square_uniform(&[10, 10, 10, 10]), 0.0);
    }

    #[test]
    fn binomial_window_is_symmetric() {
        assert!(binomial_within(500, 1000, 0.5, 3.0));
        assert!(!binomial_within(700, 1000, 0.5, 3.0));
    }
}
