//! Classical fourth-order Runge-Kutta on fixed steps.
//!
//! The right-hand side receives the stage position as a fraction of the
//! step (0, 1/2 or 1) rather than an absolute time. Callers that carry
//! grid-sampled inputs (controls, or the state inside the adjoint sweep)
//! interpolate between the two bracketing nodes with it, so stage values at
//! the nodes are taken verbatim.

/// One RK4 step of size `h` (negative for backward integration).
pub fn rk4_step<const N: usize, E, F>(y: &[f64; N], h: f64, mut f: F) -> Result<[f64; N], E>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let k1 = f(0.0, y)?;
    let k2 = f(0.5, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(0.5, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(1.0, &axpy(y, h, &k3))?;
    let mut out = *y;
    for j in 0..N {
        out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    Ok(out)
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for j in 0..N {
        out[j] += h * k[j];
    }
    out
}

/// Integrates an autonomous-in-grid system over `n_steps` uniform steps and
/// returns all `n_steps + 1` nodes. `f(step, frac, y)` sees the index of the
/// step being taken.
pub fn integrate<const N: usize, E, F>(
    y0: [f64; N],
    h: f64,
    n_steps: usize,
    mut f: F,
) -> Result<Vec<[f64; N]>, E>
where
    F: FnMut(usize, f64, &[f64; N]) -> Result<[f64; N], E>,
{
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(y0);
    let mut y = y0;
    for step in 0..n_steps {
        y = rk4_step(&y, h, |frac, x| f(step, frac, x))?;
        out.push(y);
    }
    Ok(out)
}

/// Linear interpolation between two node values at fraction `frac`.
#[inline]
pub fn lerp(a: f64, b: f64, frac: f64) -> f64 {
    if frac == 0.0 {
        a
    } else if frac == 1.0 {
        b
    } else {
        (1.0 - frac) * a + frac * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_decay_fourth_order() {
        // y' = -y on [0, 1]; errors at three step sizes.
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let ys = integrate([1.0], h, n, |_, _, y: &[f64; 1]| Ok::<_, Infallible>([-y[0]]))
                .unwrap();
            (ys[n][0] - (-1.0f64).exp()).abs()
        };
        let (e1, e2, e3) = (err(10), err(20), err(40));
        assert!((e1 / e2).log2() > 3.9);
        assert!((e2 / e3).log2() > 3.9);
    }

    #[test]
    fn stage_fractions_reach_the_closure() {
        let mut seen = Vec::new();
        rk4_step(&[0.0], 1.0, |frac, _y: &[f64; 1]| {
            seen.push(frac);
            Ok::<_, Infallible>([1.0])
        })
        .unwrap();
        assert_eq!(seen, vec![0.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn time_dependent_forcing_is_exact_for_cubics() {
        // y' = t^3 through the fraction argument; RK4 (Simpson) is exact.
        let h = 0.25;
        let ys = integrate([0.0], h, 4, |step, frac, _y: &[f64; 1]| {
            let t = (step as f64 + frac) * h;
            Ok::<_, Infallible>([t * t * t])
        })
        .unwrap();
        assert!((ys[4][0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn backward_steps() {
        let ys = integrate([1.0], -0.01, 100, |_, _, y: &[f64; 1]| Ok::<_, Infallible>([y[0]]))
            .unwrap();
        assert!((ys[100][0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn lerp_is_exact_at_nodes() {
        assert_eq!(lerp(0.1, 0.7, 0.0), 0.1);
        assert_eq!(lerp(0.1, 0.7, 1.0), 0.7);
        assert!((lerp(0.0, 1.0, 0.5) - 0.5).abs() < 1e-16);
    }
}
