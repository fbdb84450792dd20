//! Radial integrals of `(1+r²)^(-t) r^p` and the functions tied to them.
//!
//! * `I_p(t) = ∫₀¹ (1+r²)^(-t) r^p dr ~ t^(-(p+1)/2)`
//! * `J_p(t) = ∫₁^∞ (1+r²)^(-t) r^p dr ~ 2^(-t)/(t-1)`
//! * `₂F₁(t, (p+1)/2; (p+3)/2; -1) = (p+1) I_p(t)`
//! * `I_0(t) + J_0(t) = (√π/2) Γ(t-1/2)/Γ(t)`
//!
//! `(1+r²)^(-t)` is always formed as `exp(-t·log1p(r²))`.

use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::symbols::log1p_sq;

/// Relative tolerance used for the quadratures in this module.
pub const REL_TOL: f64 = 1e-13;

fn weight(r: f64, t: f64, p: f64) -> f64 {
    let damp = (-t * log1p_sq(r)).exp();
    if p == 0.0 {
        damp
    } else {
        damp * r.powf(p)
    }
}

/// `I_p(t) = ∫₀¹ (1+r²)^(-t) r^p dr`.
pub fn i_p(t: f64, p: f64) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(domain("p", p, "I_p needs p >= 0"));
    }
    if !t.is_finite() {
        return Err(domain("t", t, "t must be finite"));
    }
    let spec = QuadratureSpec::finite(0.0, 1.0)
        .tolerances(1e-300, REL_TOL)
        .concentrated_at(1.0 / t.max(1.0).sqrt());
    Ok(integrate(|r| weight(r, t, p), &spec)?.require_converged()?.value)
}

/// Middle-band integral `∫_η¹ (1+r²)^(-t) r^p dr`, bounded by `(1+η²)^(-t)`
/// for `p ≥ 0`.
pub fn middle_band(eta: f64, p: f64, t: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain("eta", eta, "eta must lie in (0, 1]"));
    }
    if !(t >= 0.0) || !t.is_finite() || !p.is_finite() {
        return Err(domain("t", t, "t must be finite and >= 0"));
    }
    if eta == 1.0 {
        return Ok(0.0);
    }
    let spec = QuadratureSpec::finite(eta, 1.0)
        .tolerances(1e-300, REL_TOL)
        .concentrated_at(1.0 / t.max(1.0));
    Ok(integrate(|r| weight(r, t, p), &spec)?.require_converged()?.value)
}

/// `J_p(t)·(t-1)·2^t`, which stays of order one for large `t`.
///
/// With `u = log(1+r²) = log 2 + v`,
///
/// ```text
/// J_p(t)·(t-1)·2^t = ∫₀^∞ (t-1) e^(-(t-1)v) (2e^v - 1)^((p-1)/2) dv,
/// ```
///
/// truncated at the `V` where the closed-form tail bound
/// `(t-1)·max(1, 2^((p-1)/2))·e^(-(t-κ)V)/(t-κ)`, with `κ = max(1, (p+1)/2)`,
/// drops below `1e-16` of the lower sandwich bound.
pub fn j_p_scaled(t: f64, p: f64) -> Result<f64> {
    if !p.is_finite() || !t.is_finite() || !(t > (p + 3.0) / 2.0) {
        return Err(domain("t", t, "J_p needs t > (p+3)/2"));
    }
    let tm1 = t - 1.0;
    let half_exp = (p - 1.0) / 2.0;
    let (kappa, coeff) = if p >= 1.0 {
        ((p + 1.0) / 2.0, 2f64.powf(half_exp))
    } else {
        (1.0, 1.0)
    };
    let rate = t - kappa;
    let lower = if p >= 1.0 {
        1.0
    } else {
        2f64.powf(half_exp) * tm1 / (t - (p + 1.0) / 2.0)
    };
    let tol = 1e-16 * lower;
    let cutoff = ((tm1 * coeff / rate) / tol).ln() / rate;
    let spec = QuadratureSpec::finite(0.0, cutoff)
        .tolerances(1e-300, REL_TOL)
        .concentrated_at(1.0 / tm1);
    let f = |v: f64| {
        let base = 2.0 * v.exp() - 1.0;
        tm1 * (-tm1 * v + half_exp * base.ln()).exp()
    };
    Ok(integrate(f, &spec)?.require_converged()?.value)
}

/// `J_p(t) = ∫₁^∞ (1+r²)^(-t) r^p dr` for `t > (p+3)/2`.
pub fn j_p(t: f64, p: f64) -> Result<f64> {
    let scaled = j_p_scaled(t, p)?;
    Ok(scaled * (-t * std::f64::consts::LN_2).exp() / (t - 1.0))
}

/// `J_p(t)` by direct quadrature after inverting `r = 1/s`:
/// `∫₀¹ s^(2t-p-2) (1+s²)^(-t) ds`. Valid for `t > (p+1)/2`, which includes
/// closed-form cases such as `J_0(1) = π/4`.
pub fn j_p_direct(t: f64, p: f64) -> Result<f64> {
    if !p.is_finite() || !t.is_finite() || !(t > (p + 1.0) / 2.0) {
        return Err(domain("t", t, "direct J_p needs t > (p+1)/2"));
    }
    let power = 2.0 * t - p - 2.0;
    let spec = QuadratureSpec::finite(0.0, 1.0).tolerances(1e-300, REL_TOL);
    let f = |s: f64| {
        if s == 0.0 {
            return if power > 0.0 { 0.0 } else { 1.0 };
        }
        (power * s.ln() - t * log1p_sq(s)).exp()
    };
    Ok(integrate(f, &spec)?.require_converged()?.value)
}

/// One step of the recurrence
/// `I_p(t) = 2^(1-t)/(p+1-2t) + (p-1)/(2t-p-1) · I_{p-2}(t)`.
pub fn i_p_recurrence(t: f64, p: f64, i_pm2: f64) -> Result<f64> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(domain("p", p, "the recurrence needs p >= 2"));
    }
    if !(t > (p + 1.0) / 2.0) || !t.is_finite() {
        return Err(domain("t", t, "the recurrence needs t > (p+1)/2"));
    }
    let boundary = (-(t - 1.0) * std::f64::consts::LN_2).exp() / (p + 1.0 - 2.0 * t);
    Ok(boundary + (p - 1.0) / (2.0 * t - p - 1.0) * i_pm2)
}

/// `₂F₁(t, (p+1)/2; (p+3)/2; -1)`, only on this parameter slice, as `(p+1) I_p(t)`.
pub fn hyp2f1_special(t: f64, p: f64) -> Result<f64> {
    Ok((p + 1.0) * i_p(t, p)?)
}

// Bernoulli coefficients B_2k / (2k (2k-1)) of the Stirling series.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    STIRLING.iter().rev().fold(0.0, |acc, &c| acc * inv2 + c) * inv
}

/// Switch from `lgamma` differences to the Stirling-difference form.
pub const STIRLING_SWITCH: f64 = 15.0;

/// `log Γ(t-1/2) - log Γ(t)` without forming either Gamma value.
pub fn log_gamma_ratio(t: f64) -> Result<f64> {
    if !(t > 0.5) || !t.is_finite() {
        return Err(domain("t", t, "gamma ratio needs t > 1/2"));
    }
    if t < STIRLING_SWITCH {
        return Ok(libm::lgamma(t - 0.5) - libm::lgamma(t));
    }
    // (t-1) log(t-1/2) - (t-1/2) log t = -log(t)/2 + (t-1) log1p(-1/(2t))
    Ok(-0.5 * t.ln() + (t - 1.0) * (-0.5 / t).ln_1p() + 0.5 + stirling_correction(t - 0.5) - stirling_correction(t))
}

/// `Γ(t-1/2)/Γ(t)` for `t > 1/2`.
pub fn gamma_ratio(t: f64) -> Result<f64> {
    Ok(log_gamma_ratio(t)?.exp())
}

/// `H₀(t) = ∫₀^∞ (1+r²)^(-t) dr = (√π/2) Γ(t-1/2)/Γ(t)`.
pub fn h0(t: f64) -> Result<f64> {
    Ok(0.5 * std::f64::consts::PI.sqrt() * gamma_ratio(t)?)
}

/// Scaled values on a `t` grid and the band they occupy.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticBandReport {
    pub p: f64,
    pub t_grid: Vec<f64>,
    pub scaled_values: Vec<f64>,
    pub band_min: f64,
    pub band_max: f64,
    /// The last three scaled values are monotone.
    pub monotone_tail: bool,
}

impl AsymptoticBandReport {
    pub fn new(p: f64, t_grid: Vec<f64>, scaled_values: Vec<f64>) -> Result<Self> {
        if t_grid.len() != scaled_values.len() || t_grid.is_empty() {
            return Err(domain(
                "t_grid",
                t_grid.len() as f64,
                "grid and values must be non-empty and equal length",
            ));
        }
        if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("t_grid", f64::NAN, "grid must be strictly increasing"));
        }
        let band_min = scaled_values.iter().copied().fold(f64::INFINITY, f64::min);
        let band_max = scaled_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tail = &scaled_values[scaled_values.len().saturating_sub(3)..];
        let monotone_tail = tail.windows(2).all(|w| w[0] <= w[1]) || tail.windows(2).all(|w| w[0] >= w[1]);
        Ok(Self {
            p,
            t_grid,
            scaled_values,
            band_min,
            band_max,
            monotone_tail,
        })
    }

    /// `band_max / band_min`.
    pub fn variation(&self) -> f64 {
        self.band_max / self.band_min
    }
}

/// `I_p(t)·t^((p+1)/2)` over `t_grid`.
pub fn i_p_band(p: f64, t_grid: &[f64]) -> Result<AsymptoticBandReport> {
    let scaled = t_grid
        .iter()
        .map(|&t| Ok(i_p(t, p)? * t.powf((p + 1.0) / 2.0)))
        .collect::<Result<Vec<_>>>()?;
    AsymptoticBandReport::new(p, t_grid.to_vec(), scaled)
}

/// `₂F₁(t, (p+1)/2; (p+3)/2; -1)·t^((p+1)/2)` over `t_grid`.
pub fn hyp2f1_band(p: f64, t_grid: &[f64]) -> Result<AsymptoticBandReport> {
    let scaled = t_grid
        .iter()
        .map(|&t| Ok(hyp2f1_special(t, p)? * t.powf((p + 1.0) / 2.0)))
        .collect::<Result<Vec<_>>>()?;
    AsymptoticBandReport::new(p, t_grid.to_vec(), scaled)
}
