//! Frequency symbols of `u_tt + Au + log(I+A) u_t = 0`.
//!
//! In Fourier variables each mode obeys `û'' + log(1+r²) û' + r² û = 0`
//! with characteristic roots `λ± = -a ± i b`, where
//!
//! ```text
//! a(r) = log(1+r²)/2,   b(r) = r·sqrt(1 - g(r)),   g(r) = log²(1+r²)/(4r²).
//! ```
//!
//! Since `0 ≤ g < 1` for every `r > 0` the roots are never real, and
//! `a² + b² = r²`. The differences `b - r` and `1/b - 1/r` are evaluated in
//! forms that do not cancel as `r → 0`.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::util::golden_section_max;

/// Below this radius `g` is evaluated by its Taylor series.
pub const SERIES_RADIUS: f64 = 1e-4;

/// Evaluated symbols at one radius `r = |ξ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValues {
    pub r: f64,
    /// Damping rate `a = log(1+r²)/2`.
    pub a: f64,
    /// Oscillation frequency `b`.
    pub b: f64,
    /// `g = log²(1+r²)/(4r²)`, in `[0, 1)`.
    pub g: f64,
    /// `b - r`, never positive.
    pub b_minus_r: f64,
    /// `1/b - 1/r`, never negative; `0` at `r = 0`.
    pub inv_b_minus_inv_r: f64,
}

/// `log(1 + r²)` without overflow for large `r`.
pub fn log1p_sq(r: f64) -> f64 {
    if r < 1e100 {
        (r * r).ln_1p()
    } else {
        2.0 * r.ln() + (1.0 / r).powi(2).ln_1p()
    }
}

/// `g(r) = log²(1+r²)/(4r²)`.
pub fn g_of(r: f64) -> f64 {
    if r < SERIES_RADIUS {
        // r²/4 - r⁴/4 + 11 r⁶/48
        let x = r * r;
        x / 4.0 * (1.0 - x + 11.0 / 12.0 * x * x)
    } else {
        let half = log1p_sq(r) / (2.0 * r);
        half * half
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(domain("r", r, "radius must be finite and nonnegative"));
    }
    Ok(())
}

/// Evaluate all symbols at radius `r ≥ 0`.
pub fn eval_symbols(r: f64) -> Result<SymbolValues> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(SymbolValues {
            r,
            a: 0.0,
            b: 0.0,
            g: 0.0,
            b_minus_r: 0.0,
            inv_b_minus_inv_r: 0.0,
        });
    }
    let a = 0.5 * log1p_sq(r);
    let g = g_of(r);
    let root = (1.0 - g).sqrt();
    let b = r * root;
    let denom = 1.0 + root;
    Ok(SymbolValues {
        r,
        a,
        b,
        g,
        b_minus_r: -r * g / denom,
        // (r - b)/(r b) = g / ((1 + sqrt(1-g)) b)
        inv_b_minus_inv_r: g / (denom * b),
    })
}

/// Characteristic roots `(λ₊, λ₋) = (-a + ib, -a - ib)`.
pub fn lambda_pm(r: f64) -> Result<(Complex64, Complex64)> {
    let s = eval_symbols(r)?;
    Ok((Complex64::new(-s.a, s.b), Complex64::new(-s.a, -s.b)))
}

/// `φ(x) = log(1+x)/(1+x)`, whose maximum `1/e` at `x = e-1` bounds
/// `log(1+r²) ≤ (1+r²)/e`.
pub fn phi(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x, "phi is defined for x >= 0"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(x.ln_1p() / (1.0 + x))
}

/// Locate the maximiser of [`phi`] on `[0, hi]` by golden-section search.
///
/// Returns `(bracket_lo, bracket_hi, phi(midpoint))`.
pub fn phi_maximum(hi: f64, tol: f64) -> (f64, f64, f64) {
    let (lo, hi) = golden_section_max(|x| phi(x).unwrap_or(f64::NEG_INFINITY), 0.0, hi, tol);
    let mid = 0.5 * (lo + hi);
    (lo, hi, phi(mid).unwrap_or(f64::NAN))
}

/// Supremum of `g` over `r > 0` and the radius where it is attained.
pub fn g_supremum() -> (f64, f64) {
    let (lo, hi) = golden_section_max(g_of, 0.5, 10.0, 1e-10);
    let r = 0.5 * (lo + hi);
    (r, g_of(r))
}

/// Smallest radius at which `g` reaches `level`, or `None` when
/// `level ≥ sup g` and the bound `g(r) ≤ level` holds for every `r`.
///
/// `g` increases on `(0, argmax]`, so bisection on that branch suffices.
pub fn split_radius(level: f64) -> Option<f64> {
    let (r_max, g_max) = g_supremum();
    if level >= g_max {
        return None;
    }
    if level <= 0.0 {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (0.0, r_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g_of(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}
