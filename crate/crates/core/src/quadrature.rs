//! Adaptive Gauss–Kronrod (7/15) quadrature on radial intervals.
//!
//! Integrands containing `sin(ωr)` or `cos(ωr)` get initial panels no wider
//! than a half-period `π/ω`, so no panel straddles a full oscillation. Semi-
//! infinite integrals are truncated at a radius chosen from an analytic bound
//! on the integrand ([`TailEnvelope`]); that bound is added to the error
//! estimate. Panel values are reduced by pairwise summation in left-to-right
//! order, so results are bit-reproducible for a fixed panel layout.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};
use crate::symbols::log1p_sq;
use crate::util::pairwise_sum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

/// Pointwise bound `|f(r)| ≤ (1+r²)^(-τ) · exp(-β r²) · Σ c_k r^(p_k)` used to
/// truncate semi-infinite integrals.
///
/// The tail of each term is bounded by the smaller of two closed forms
/// (each factor `(1+r²)^(-τ)` and `exp(-βr²)` is at most one, so either may be
/// dropped):
///
/// * damping, via `u = log(1+r²)`, `∫_R^∞ (1+r²)^(-τ) r^p dr
///   = ½ ∫ e^(-(τ-1)u) (e^u - 1)^((p-1)/2) du`, which is at most
///   `(1+R²)^(-(τ-(p+1)/2)) / (2(τ-(p+1)/2))` for `p ≥ 1` and
///   `R^(p-1) (1+R²)^(-(τ-1)) / (2(τ-1))` for `p < 1`;
/// * Gaussian, `∫_R^∞ r^p e^(-βr²) dr ≤ R^(p-1) e^(-βR²) / (2β)` for `p ≤ 0` and
///   `≤ R^(p-1) e^(-βR²) / β` once `βR² ≥ p > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEnvelope {
    pub damping_power: f64,
    pub gaussian_rate: f64,
    pub terms: Vec<(f64, f64)>,
}

/// Closed-form bound on `∫_R^∞ (1+r²)^(-τ) r^p dr`; infinite when it does not apply.
pub fn damping_tail_bound(radius: f64, tau: f64, p: f64) -> f64 {
    if p >= 1.0 {
        let e = tau - (p + 1.0) / 2.0;
        if e <= 0.0 {
            return f64::INFINITY;
        }
        (-e * log1p_sq(radius)).exp() / (2.0 * e)
    } else {
        let e = tau - 1.0;
        if e <= 0.0 || radius <= 0.0 {
            return f64::INFINITY;
        }
        ((p - 1.0) * radius.ln() - e * log1p_sq(radius)).exp() / (2.0 * e)
    }
}

/// Closed-form bound on `∫_R^∞ r^p e^(-βr²) dr`; infinite when it does not apply.
pub fn gaussian_tail_bound(radius: f64, beta: f64, p: f64) -> f64 {
    if beta <= 0.0 || radius <= 0.0 {
        return f64::INFINITY;
    }
    let x = beta * radius * radius;
    if p <= 0.0 {
        ((p - 1.0) * radius.ln() - x).exp() / (2.0 * beta)
    } else if x >= p {
        ((p - 1.0) * radius.ln() - x).exp() / beta
    } else {
        f64::INFINITY
    }
}

impl TailEnvelope {
    pub fn damped(damping_power: f64, terms: Vec<(f64, f64)>) -> Self {
        Self {
            damping_power,
            gaussian_rate: 0.0,
            terms,
        }
    }

    pub fn with_gaussian(mut self, rate: f64) -> Self {
        self.gaussian_rate = rate;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|&(c, _)| c == 0.0)
    }

    /// Upper bound on `∫_R^∞` of the envelope.
    pub fn tail(&self, radius: f64) -> f64 {
        self.terms
            .iter()
            .filter(|&&(c, _)| c != 0.0)
            .map(|&(c, p)| {
                let d = if self.damping_power > 0.0 {
                    damping_tail_bound(radius, self.damping_power, p)
                } else {
                    f64::INFINITY
                };
                let g = gaussian_tail_bound(radius, self.gaussian_rate, p);
                c.abs() * d.min(g)
            })
            .sum()
    }

    /// Smallest radius `R ≥ from` (to bisection accuracy) with `tail(R) ≤ tol`.
    pub fn radius_for(&self, tol: f64, from: f64) -> Result<f64> {
        if self.is_zero() || self.tail(from) <= tol {
            return Ok(from);
        }
        let mut lo = from;
        let mut hi = from.max(1e-12) * 2.0;
        let mut steps = 0;
        while !(self.tail(hi) <= tol) {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 2000 || !hi.is_finite() {
                return Err(Error::UnboundedTail(format!(
                    "no radius brings the tail below {tol:e} (envelope {self:?})"
                )));
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-13 * hi {
                break;
            }
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            if self.tail(mid) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// First radius `≥ from` with a finite tail bound.
    fn first_finite(&self, from: f64) -> Result<f64> {
        let mut r = from.max(1e-12);
        for _ in 0..2000 {
            if self.tail(r).is_finite() {
                return Ok(r);
            }
            r *= 2.0;
        }
        Err(Error::UnboundedTail(format!("envelope {self:?} has no finite tail")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: Upper,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// `ω` such that the integrand contains `sin(ωr)` or `cos(ωr)`; `0` for smooth.
    pub oscillation_frequency: f64,
    pub max_panels: usize,
    /// Extra initial breakpoints (ignored outside the interval).
    pub breakpoints: Vec<f64>,
    /// Required when `upper` is [`Upper::Infinity`].
    pub tail: Option<TailEnvelope>,
}

impl QuadratureSpec {
    pub const DEFAULT_MAX_PANELS: usize = 400_000;

    pub fn finite(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper: Upper::Finite(upper),
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            oscillation_frequency: 0.0,
            max_panels: Self::DEFAULT_MAX_PANELS,
            breakpoints: Vec::new(),
            tail: None,
        }
    }

    pub fn semi_infinite(lower: f64, tail: TailEnvelope) -> Self {
        Self {
            upper: Upper::Infinity,
            tail: Some(tail),
            ..Self::finite(lower, f64::INFINITY)
        }
    }

    pub fn tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn oscillating(mut self, omega: f64) -> Self {
        self.oscillation_frequency = omega;
        self
    }

    pub fn max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }

    pub fn breakpoints(mut self, points: Vec<f64>) -> Self {
        self.breakpoints = points;
        self
    }

    /// Geometric breakpoints `s, 2s, 4s, …` below the upper limit, for
    /// integrands concentrated on the scale `s` near the lower limit.
    pub fn concentrated_at(mut self, scale: f64) -> Self {
        let hi = match self.upper {
            Upper::Finite(u) => u,
            Upper::Infinity => f64::INFINITY,
        };
        let mut x = self.lower + scale;
        while x < hi && x.is_finite() && self.breakpoints.len() < 64 {
            self.breakpoints.push(x);
            x = self.lower + 2.0 * (x - self.lower);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.lower.is_finite() || self.lower < 0.0 {
            return Err(domain("lower", self.lower, "lower limit must be finite and >= 0"));
        }
        if let Upper::Finite(u) = self.upper {
            if !u.is_finite() || u <= self.lower {
                return Err(domain(
                    "upper",
                    u,
                    "upper limit must be finite and above the lower limit",
                ));
            }
        }
        if self.upper == Upper::Infinity && self.tail.is_none() {
            return Err(domain(
                "upper",
                f64::INFINITY,
                "semi-infinite integrals need a tail envelope",
            ));
        }
        if !(self.abs_tol > 0.0) {
            return Err(domain("abs_tol", self.abs_tol, "tolerance must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(domain("rel_tol", self.rel_tol, "tolerance must be positive"));
        }
        if !(self.oscillation_frequency >= 0.0) || !self.oscillation_frequency.is_finite() {
            return Err(domain(
                "oscillation_frequency",
                self.oscillation_frequency,
                "must be finite and >= 0",
            ));
        }
        if self.max_panels == 0 {
            return Err(domain("max_panels", 0.0, "at least one panel is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turn a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                value: self.value,
                error_estimate: self.error_estimate,
                panels: self.panels_used,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteIntegrand { abscissa: x, value: y })
    }
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate,
/// rescaled as in QUADPACK's `qk15`.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, centre)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, centre - dx)?;
        let f2 = eval(f, centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

fn initial_edges(lo: f64, hi: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let mut cuts: Vec<f64> = spec.breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if spec.oscillation_frequency <= 0.0 {
        return cuts;
    }
    let half_period = std::f64::consts::PI / spec.oscillation_frequency;
    let needed: f64 = cuts
        .windows(2)
        .map(|w| ((w[1] - w[0]) / half_period).ceil().max(1.0))
        .sum();
    if needed > spec.max_panels as f64 {
        // Over budget either way; the caller falls back to a uniform layout.
        return (0..=spec.max_panels + 1)
            .map(|k| lo + (hi - lo) * k as f64 / (spec.max_panels + 1) as f64)
            .collect();
    }
    let mut edges = vec![cuts[0]];
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / half_period).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for k in 1..n {
            edges.push(w[0] + step * k as f64);
        }
        edges.push(w[1]);
    }
    edges
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let mut edges = initial_edges(lo, hi, spec);
    let mut capped = false;
    if edges.len() - 1 > spec.max_panels {
        // The half-period layout alone exceeds the budget.
        capped = true;
        let n = spec.max_panels;
        edges = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        edges[n] = hi;
    }

    let mut heap = BinaryHeap::with_capacity(edges.len());
    let mut frozen = Vec::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let p = kronrod15(f, w[0], w[1])?;
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    let target = |v: f64| abs_tol.max(rel_tol * v.abs());
    let mut count = heap.len() + frozen.len();
    while total_err > target(total) && count < spec.max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * worst.b.abs().max(1e-300) {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            count = heap.len() + frozen.len();
            continue;
        }
        let left = kronrod15(f, worst.a, mid)?;
        let right = kronrod15(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        count = heap.len() + frozen.len();
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    let value = pairwise_sum(&values);
    let error_estimate = pairwise_sum(&errors);
    Ok(QuadratureResult {
        value,
        error_estimate,
        panels_used: panels.len(),
        converged: !capped && error_estimate <= target(value),
    })
}

/// Integrate `f` over the interval described by `spec`.
///
/// Returns `converged = false` rather than an error when the panel budget runs
/// out; a NaN or infinite integrand value is an error naming the abscissa.
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    match spec.upper {
        Upper::Finite(hi) => adaptive(&f, spec.lower, hi, spec, spec.abs_tol, spec.rel_tol),
        Upper::Infinity => {
            let envelope = spec.tail.as_ref().expect("validated");
            semi_infinite(&f, spec, envelope)
        }
    }
}

fn semi_infinite<F: Fn(f64) -> f64>(f: &F, spec: &QuadratureSpec, envelope: &TailEnvelope) -> Result<QuadratureResult> {
    let lo = spec.lower;
    if envelope.is_zero() {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 0,
            converged: true,
        });
    }
    // Pilot pass: a rough value fixes the scale for the tail tolerance. Envelope
    // bounds can be loose near the origin, so the pilot window is widened
    // until its own tail is small beside it.
    let start = envelope.first_finite(lo.max(1e-300))?;
    let reference = envelope.tail(start);
    let mut pilot_radius = envelope.radius_for(1e-4 * reference, start)?;
    let mut pilot = 0.0;
    for _ in 0..64 {
        pilot = if pilot_radius > lo {
            adaptive(f, lo, pilot_radius, spec, spec.abs_tol, 1e-6)?.value
        } else {
            0.0
        };
        let wanted = (1e-4 * pilot.abs()).max(spec.abs_tol);
        if envelope.tail(pilot_radius) <= wanted {
            break;
        }
        let next = envelope.radius_for(wanted, pilot_radius)?;
        pilot_radius = next.min(lo + 4.0 * (pilot_radius - lo).max(1e-300));
    }
    let radius = envelope
        .radius_for(0.25 * spec.abs_tol.max(spec.rel_tol * pilot.abs()), start)?
        .max(lo);
    let tail = envelope.tail(radius);
    if radius <= lo {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: tail,
            panels_used: 0,
            converged: tail <= spec.abs_tol,
        });
    }
    let body = adaptive(f, lo, radius, spec, 0.75 * spec.abs_tol, 0.75 * spec.rel_tol)?;
    let error_estimate = body.error_estimate + tail;
    Ok(QuadratureResult {
        value: body.value,
        error_estimate,
        panels_used: body.panels_used,
        converged: body.converged && error_estimate <= spec.abs_tol.max(spec.rel_tol * body.value.abs()),
    })
}

/// Radius `R ≥ 1` with `∫_R^∞ (1+r²)^(-t) r^p dr ≤ tail_tol`, using
/// [`damping_tail_bound`].
pub fn truncation_radius(t: f64, p: f64, tail_tol: f64) -> Result<f64> {
    if !(t > (p + 1.0) / 2.0 + 1.0) || !t.is_finite() {
        return Err(domain("t", t, "truncation needs t > (p+1)/2 + 1"));
    }
    if !(tail_tol > 0.0) {
        return Err(domain("tail_tol", tail_tol, "tail tolerance must be positive"));
    }
    TailEnvelope::damped(t, vec![(1.0, p)]).radius_for(tail_tol, 1.0)
}
