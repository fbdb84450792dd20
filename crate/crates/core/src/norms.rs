//! Norms and energies by Plancherel, reduced to radial integrals
//!
//! ```text
//! ‖f‖² = (2π)^(-n) ω_n ∫₀^∞ |f̂(r)|² r^(n-1) dr,
//! ```
//!
//! plus the model integrals `M`, `Q`, `R` and decay-exponent fitting.
//!
//! Tails are cut with envelopes built from `|û_i(r)| ≤ c_i e^(-w_i² r²/2)`,
//! `a/b ≤ 1/√3` and `1/b ≤ √2/r`.

use std::f64::consts::{E, PI};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::modes::{profile_hat, remainder_terms, u_hat, u_hat_t, Damping, DataPair};
use crate::quadrature::{integrate, QuadratureResult, QuadratureSpec, TailEnvelope};
use crate::symbols::log1p_sq;
use crate::util::{sinc, sphere_area};

/// Low/high frequency split used by the residual bands.
pub const DEFAULT_SPLIT: f64 = 1.0;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// `(2π)^(-n) ω_n`.
pub fn plancherel_factor(n: u32) -> f64 {
    sphere_area(n) / (2.0 * PI).powi(n as i32)
}

/// How the residual `û - profile` is evaluated inside the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualRoute {
    #[default]
    Direct,
    /// `K₁ + … + K₅`.
    RemainderSum,
}

/// Squared residual norm split at the low/high frequency boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualBands {
    pub low_squared: f64,
    pub high_squared: f64,
    pub error_estimate: f64,
}

impl ResidualBands {
    pub fn total(&self) -> f64 {
        (self.low_squared + self.high_squared).sqrt()
    }
}

/// Solution operator for one data pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub data: DataPair,
    pub damping: Damping,
    pub rel_tol: f64,
    /// `δ₁`, the low/high band boundary.
    pub split: f64,
}

impl Evolution {
    pub fn new(data: DataPair) -> Self {
        Self {
            data,
            damping: Damping::Logarithmic,
            rel_tol: DEFAULT_REL_TOL,
            split: DEFAULT_SPLIT,
        }
    }

    pub fn with_damping(mut self, damping: Damping) -> Self {
        self.damping = damping;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_split(mut self, split: f64) -> Self {
        self.split = split;
        self
    }

    fn n(&self) -> f64 {
        self.data.dimension() as f64
    }

    fn validate(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain("t", t, "time must be finite and >= 0"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(domain("rel_tol", self.rel_tol, "tolerance must be positive"));
        }
        if !(self.split > 0.0) || !self.split.is_finite() {
            return Err(domain("split", self.split, "band split must be positive and finite"));
        }
        Ok(())
    }

    /// `(α, γ, k, m, β)`: `|û| ≤ e^(-at)(α + γ/r) e^(-βr²/2)` and
    /// `|û_t| ≤ e^(-at)(c₁k + m c₀ r) e^(-βr²/2)`.
    fn bound_constants(&self) -> (f64, f64, f64, f64, f64) {
        let (c0, w0) = self.data.u0.transform_envelope();
        let (c1, w1) = self.data.u1.transform_envelope();
        let (k, m) = match self.damping {
            Damping::Logarithmic => (1.0 + 1.0 / 3f64.sqrt(), 2f64.sqrt()),
            Damping::Free => (1.0, 1.0),
        };
        let beta = [(c0, w0), (c1, w1)]
            .iter()
            .filter(|(c, _)| *c > 0.0)
            .map(|(_, w)| w * w)
            .fold(f64::INFINITY, f64::min);
        (c0 * k, c1 * m, k, m, if beta.is_finite() { beta } else { 1.0 })
    }

    fn damping_power(&self, t: f64) -> f64 {
        match self.damping {
            Damping::Logarithmic => t,
            Damping::Free => 0.0,
        }
    }

    /// Envelope of `|û|² r^(n-1)`.
    fn solution_envelope(&self, t: f64) -> TailEnvelope {
        let (alpha, gamma, _, _, beta) = self.bound_constants();
        let n = self.n();
        TailEnvelope::damped(
            self.damping_power(t),
            vec![(2.0 * alpha * alpha, n - 1.0), (2.0 * gamma * gamma, n - 3.0)],
        )
        .with_gaussian(beta)
    }

    /// Envelope of `(|û_t|² + r²|û|²) r^(n-1)`.
    fn energy_envelope(&self, t: f64) -> TailEnvelope {
        let (alpha, gamma, k, m, beta) = self.bound_constants();
        let (c0, _) = self.data.u0.transform_envelope();
        let (c1, _) = self.data.u1.transform_envelope();
        let n = self.n();
        let low = 2.0 * (c1 * k).powi(2) + 2.0 * gamma * gamma;
        let high = 2.0 * (m * c0).powi(2) + 2.0 * alpha * alpha;
        TailEnvelope::damped(self.damping_power(t), vec![(low, n - 1.0), (high, n + 1.0)]).with_gaussian(beta)
    }

    /// Envelope of `|û - profile|² r^(n-1)`; the profile carries no Gaussian factor.
    fn residual_envelope(&self, t: f64) -> TailEnvelope {
        let (alpha, gamma, _, _, _) = self.bound_constants();
        let n = self.n();
        let p1 = self.data.p1();
        TailEnvelope::damped(
            t,
            vec![
                (4.0 * alpha * alpha, n - 1.0),
                (4.0 * gamma * gamma + 2.0 * p1 * p1, n - 3.0),
            ],
        )
    }

    fn radial<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lower: f64,
        upper: Option<f64>,
        envelope: TailEnvelope,
        t: f64,
    ) -> Result<QuadratureResult> {
        let spec = match upper {
            Some(hi) => QuadratureSpec::finite(lower, hi),
            None => QuadratureSpec::semi_infinite(lower, envelope),
        }
        .tolerances(1e-300, self.rel_tol)
        .oscillating(2.0 * t)
        .concentrated_at(1.0 / t.max(1.0).sqrt());
        integrate(f, &spec)?.require_converged()
    }

    /// `‖u(t)‖²` with its quadrature error estimate.
    pub fn l2_norm_squared(&self, t: f64) -> Result<QuadratureResult> {
        self.validate(t)?;
        let n = self.n();
        let data = self.data;
        let damping = self.damping;
        let f = move |r: f64| {
            let u = u_hat(t, r, &data, damping).unwrap_or(f64::NAN);
            u * u * r.powf(n - 1.0)
        };
        let mut res = self.radial(f, 0.0, None, self.solution_envelope(t), t)?;
        let c = plancherel_factor(self.data.dimension());
        res.value *= c;
        res.error_estimate *= c;
        Ok(res)
    }

    pub fn l2_norm(&self, t: f64) -> Result<f64> {
        Ok(self.l2_norm_squared(t)?.value.sqrt())
    }

    /// `E(t) = ½ (‖u_t‖² + ‖∇u‖²)` with its quadrature error estimate.
    pub fn energy(&self, t: f64) -> Result<QuadratureResult> {
        self.validate(t)?;
        let n = self.n();
        let data = self.data;
        let damping = self.damping;
        let f = move |r: f64| {
            let u = u_hat(t, r, &data, damping).unwrap_or(f64::NAN);
            let ut = u_hat_t(t, r, &data, damping).unwrap_or(f64::NAN);
            (ut * ut + r * r * u * u) * r.powf(n - 1.0)
        };
        let mut res = self.radial(f, 0.0, None, self.energy_envelope(t), t)?;
        let c = 0.5 * plancherel_factor(self.data.dimension());
        res.value *= c;
        res.error_estimate *= c;
        Ok(res)
    }

    /// `‖û - profile‖²` over `[0, δ₁]` and `[δ₁, ∞)`.
    pub fn residual_bands(&self, t: f64, route: ResidualRoute) -> Result<ResidualBands> {
        self.validate(t)?;
        if self.damping != Damping::Logarithmic {
            return Err(domain("t", t, "the residual is defined for the damped equation only"));
        }
        let n = self.n();
        let data = self.data;
        let p1 = data.p1();
        let f = move |r: f64| {
            let diff = match route {
                ResidualRoute::Direct => {
                    u_hat(t, r, &data, Damping::Logarithmic).unwrap_or(f64::NAN)
                        - profile_hat(t, r, p1).unwrap_or(f64::NAN)
                }
                ResidualRoute::RemainderSum if r > 0.0 => {
                    remainder_terms(t, r, &data).map(|m| m.remainder()).unwrap_or(f64::NAN)
                }
                // Both the solution and the profile tend to P₁ t at the origin.
                ResidualRoute::RemainderSum => 0.0,
            };
            diff * diff * r.powf(n - 1.0)
        };
        let c = plancherel_factor(self.data.dimension());
        let low = self.radial(f, 0.0, Some(self.split), self.residual_envelope(t), t)?;
        let high = self.radial(f, self.split, None, self.residual_envelope(t), t)?;
        Ok(ResidualBands {
            low_squared: c * low.value,
            high_squared: c * high.value,
            error_estimate: c * (low.error_estimate + high.error_estimate),
        })
    }

    /// `‖u(t) - profile(t)‖`.
    pub fn residual_norm(&self, t: f64) -> Result<f64> {
        Ok(self.residual_bands(t, ResidualRoute::Direct)?.total())
    }
}

/// Evaluate `f` over `grid` in parallel; output order matches `grid`.
pub fn sweep<F>(grid: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter().map(|&t| f(t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `sin²(rt)/r²`
    Sin,
    /// `cos²(rt)`
    Cos,
}

/// `M(t) = ω_n ∫₀^∞ (1+r²)^(-t) w(r) r^(n-1) dr`.
pub fn m_integral(t: f64, n: u32, kind: Weight, rel_tol: f64) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(domain("t", t, "M(t) needs t > 1"));
    }
    if n == 0 || (kind == Weight::Sin && n <= 2) {
        return Err(domain(
            "n",
            n as f64,
            "the sine weight needs n > 2, the cosine weight n >= 1",
        ));
    }
    let nf = n as f64;
    let (f, power): (Box<dyn Fn(f64) -> f64 + Sync>, f64) = match kind {
        Weight::Sin => (
            Box::new(move |r: f64| {
                let s = sinc(r * t);
                (-t * log1p_sq(r)).exp() * t * t * s * s * r.powf(nf - 1.0)
            }),
            nf - 3.0,
        ),
        Weight::Cos => (
            Box::new(move |r: f64| {
                let c = (r * t).cos();
                (-t * log1p_sq(r)).exp() * c * c * r.powf(nf - 1.0)
            }),
            nf - 1.0,
        ),
    };
    let spec = QuadratureSpec::semi_infinite(0.0, TailEnvelope::damped(t, vec![(1.0, power)]))
        .tolerances(1e-300, rel_tol)
        .oscillating(2.0 * t)
        .concentrated_at(1.0 / t.sqrt());
    Ok(sphere_area(n) * integrate(f, &spec)?.require_converged()?.value)
}

fn sin_square_integral(t: f64, power: i32, rel_tol: f64) -> Result<f64> {
    if !(t > 2.0) || !t.is_finite() {
        return Err(domain("t", t, "needs t > 2"));
    }
    // sin²(tr) r^power = t² sinc²(tr) r^(power+2)
    let f = move |r: f64| {
        let s = sinc(r * t);
        (-t * log1p_sq(r)).exp() * t * t * s * s * r.powi(power + 2)
    };
    let spec = QuadratureSpec::semi_infinite(0.0, TailEnvelope::damped(t, vec![(1.0, power as f64)]))
        .tolerances(1e-300, rel_tol)
        .oscillating(2.0 * t)
        .concentrated_at(1.0 / t);
    Ok(integrate(f, &spec)?.require_converged()?.value)
}

/// `Q(t) = ∫₀^∞ (1+r²)^(-t) sin²(tr)/r² dr`, which grows like `t`.
pub fn q_integral(t: f64, rel_tol: f64) -> Result<f64> {
    sin_square_integral(t, -2, rel_tol)
}

/// `R(t) = ∫₀^∞ (1+r²)^(-t) sin²(tr)/r dr`, which grows like `log t`.
pub fn r_integral(t: f64, rel_tol: f64) -> Result<f64> {
    sin_square_integral(t, -1, rel_tol)
}

/// `½ ∫_ν^ν' (1+r²)^(-t) r^(-2) dr` on `[5π/(4t), 7π/(4t)]`, where `sin²(tr) ≥ ½`.
pub fn q_window_integral(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "needs t > 0"));
    }
    let (nu, nu2) = (5.0 * PI / (4.0 * t), 7.0 * PI / (4.0 * t));
    let f = |r: f64| (-t * log1p_sq(r)).exp() / (r * r);
    Ok(0.5
        * integrate(f, &QuadratureSpec::finite(nu, nu2))?
            .require_converged()?
            .value)
}

/// `(4/(49π)) (1 + ρ/t²)^(-t) t` with `ρ = 49π²/16`, a lower bound for the window integral.
pub fn q_window_lower_bound(t: f64) -> f64 {
    let rho = 49.0 * PI * PI / 16.0;
    4.0 / (49.0 * PI) * (-t * (rho / (t * t)).ln_1p()).exp() * t
}

/// `(t/4) (1 + 1/t²)^(-t)`, a lower bound for the `[0, 1/t]` part of `Q`.
pub fn q_low_lower_bound(t: f64) -> f64 {
    0.25 * t * (-t * (1.0 / (t * t)).ln_1p()).exp()
}

/// `∫₀^(1/t) (1+r²)^(-t) sin²(tr)/r² dr`.
pub fn q_low_band(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "needs t > 0"));
    }
    let f = |r: f64| {
        let s = sinc(r * t);
        (-t * log1p_sq(r)).exp() * t * t * s * s
    };
    Ok(integrate(f, &QuadratureSpec::finite(0.0, 1.0 / t))?
        .require_converged()?
        .value)
}

/// Lower bound for `R(t)`:
/// `e^(-25π²/(16t)) (log t / 8 - log(5π/4) / 4) - ½ ∫₀^∞ σ|log σ| e^(-σ²) dσ`.
pub fn r_lower_bound(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "needs t > 0"));
    }
    let f = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            s * s.ln().abs() * (-s * s).exp()
        }
    };
    // e^(-144) makes [12, ∞) negligible.
    let moment = integrate(f, &QuadratureSpec::finite(0.0, 12.0).breakpoints(vec![1.0]))?
        .require_converged()?
        .value;
    let decay = (-25.0 * PI * PI / (16.0 * t)).exp();
    Ok(decay * (t.ln() / 8.0 - (5.0 * PI / 4.0).ln() / 4.0) - 0.5 * moment)
}

/// Band-limited radial profile `v̂(r) = (1 - r/B)² Σ c_k cos(kπr/B)` on `[0, B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub bandwidth: f64,
    pub coefficients: Vec<f64>,
    pub dimension: u32,
}

impl SpectralProfile {
    pub fn random<R: Rng>(rng: &mut R, dimension: u32) -> Self {
        let bandwidth = 10f64.powf(rng.gen_range(-1.0..2.0));
        let modes = rng.gen_range(1..=8);
        let coefficients = (0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self {
            bandwidth,
            coefficients,
            dimension,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let x = r / self.bandwidth;
        let sum: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * PI * x).cos())
            .sum();
        (1.0 - x).powi(2) * sum
    }

    fn weighted_norm<F: Fn(f64) -> f64>(&self, symbol: F) -> Result<f64> {
        let n = self.dimension as f64;
        let f = |r: f64| {
            let v = symbol(r) * self.value(r);
            v * v * r.powf(n - 1.0)
        };
        let omega = self.coefficients.len() as f64 * PI / self.bandwidth;
        let spec = QuadratureSpec::finite(0.0, self.bandwidth)
            .oscillating(omega)
            .tolerances(1e-300, 1e-12);
        Ok((plancherel_factor(self.dimension) * integrate(f, &spec)?.require_converged()?.value).sqrt())
    }

    /// `‖Lv‖ / ((2/e)(‖v‖ + ‖Av‖))` with `L = log(1+r²)`, `A = r²`.
    pub fn kato_rellich_ratio(&self) -> Result<f64> {
        let lv = self.weighted_norm(log1p_sq)?;
        let v = self.weighted_norm(|_| 1.0)?;
        let av = self.weighted_norm(|r| r * r)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(lv / (2.0 / E * (v + av)))
    }
}

/// Positive samples of a quantity over a strictly increasing `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl DecaySeries {
    pub fn new(t_grid: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if t_grid.len() != values.len() {
            return Err(Error::DegenerateFit(format!(
                "{label}: grid and values differ in length"
            )));
        }
        if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::DegenerateFit(format!(
                "{label}: grid is not strictly increasing"
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::DegenerateFit(format!(
                "{label}: value {v} is not finite and positive"
            )));
        }
        Ok(Self { t_grid, values, label })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_log_residual: f64,
    pub window: (f64, f64),
}

/// Least-squares line through `(log t, log value)` for `t` in `window`.
pub fn fit_decay(series: &DecaySeries, window: (f64, f64)) -> Result<DecayFitResult> {
    let points: Vec<(f64, f64)> = series
        .t_grid
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if points.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "{}: {} points in [{}, {}], need at least 5",
            series.label,
            points.len(),
            window.0,
            window.1
        )));
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "{}: all abscissae coincide",
            series.label
        )));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let max_log_residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(DecayFitResult {
        slope,
        intercept,
        max_log_residual,
        window,
    })
}
