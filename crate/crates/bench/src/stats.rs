use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and 95% confidence half-width of `xs` using the Student t
/// quantile with `n - 1` degrees of freedom. The half-width is zero for
/// fewer than two samples.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.975);
    (mean, t * (var / n as f64).sqrt())
}
