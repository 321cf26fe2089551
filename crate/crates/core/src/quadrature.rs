//! Composite trapezoidal rule on uniform grids.

/// Trapezoidal integral of samples spaced `h` apart.
pub fn trapezoid(h: f64, values: &[f64]) -> f64 {
    trapezoid_by(h, values.len(), |k| values[k])
}

/// Trapezoidal integral of `f(k)` for `k` in `0..n`.
pub fn trapezoid_by<F: FnMut(usize) -> f64>(h: f64, n: usize, mut f: F) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.5 * (f(0) + f(n - 1));
    for k in 1..n - 1 {
        sum += f(k);
    }
    h * sum
}
