//! Small numerical helpers shared across modules.

use crate::error::{domain, Result};

/// Below this value of `|x·t|` the removable singularity of `sin(x t)/x`
/// is evaluated by its Taylor series.
pub const SERIES_SWITCH: f64 = 1e-3;

/// `sin(x t) / x`, with the limit `t` at `x = 0`.
///
/// Uses six terms of the Taylor series of `sin(z)/z` when `|x t| < 1e-3`.
pub fn sin_over(x: f64, t: f64) -> f64 {
    t * sinc(x * t)
}

/// `sin(z) / z` with `sinc(0) = 1`.
pub fn sinc(z: f64) -> f64 {
    if z.abs() < SERIES_SWITCH {
        let z2 = z * z;
        // 1 - z²/3! + z⁴/5! - z⁶/7! + z⁸/9! - z¹⁰/11!
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0 * (1.0 - z2 / 110.0))))
    } else {
        z.sin() / z
    }
}

/// Pairwise (cascade) summation. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns the final bracket `(lo, hi)`; its width is below `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo, hi)
}

/// `points` values from `t_min` to `t_max` inclusive, log- or linearly spaced.
pub fn grid(t_min: f64, t_max: f64, points: usize, log_spaced: bool) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(domain("points", points as f64, "a grid needs at least two points"));
    }
    if !(t_min.is_finite() && t_max.is_finite()) || t_min >= t_max {
        return Err(domain("t_min", t_min, "grid bounds must be finite with t_min < t_max"));
    }
    if log_spaced && t_min <= 0.0 {
        return Err(domain("t_min", t_min, "log-spaced grids need t_min > 0"));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let s = i as f64 / last;
            if i == 0 {
                t_min
            } else if i == points - 1 {
                t_max
            } else if log_spaced {
                (t_min.ln() + s * (t_max.ln() - t_min.ln())).exp()
            } else {
                t_min + s * (t_max - t_min)
            }
        })
        .collect())
}

/// Surface area of the unit sphere in `R^n`, with the two-point convention `ω₁ = 2`.
pub fn sphere_area(n: u32) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / libm::tgamma(half)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_series_matches_direct_at_switch() {
        let z = SERIES_SWITCH * 0.999;
        assert!((sinc(z) - z.sin() / z).abs() < 1e-16);
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sin_over(0.0, 3.5), 3.5);
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = grid(1e2, 1e5, 20, true).unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 1e2);
        assert_eq!(g[19], 1e5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(grid(1.0, 2.0, 1, true).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (lo, hi) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-9);
        assert!(lo <= 0.3 && 0.3 <= hi);
    }
}
