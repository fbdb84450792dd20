//! Invariant suites behind `logdamp lemmas`. Each returns one report row.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::modes::{decompose_data, remainder_terms, DataPair};
use crate::norms::{
    m_integral, q_integral, q_low_band, q_low_lower_bound, q_window_integral, q_window_lower_bound, r_integral,
    r_lower_bound, Evolution, ResidualRoute, SpectralProfile, Weight,
};
use crate::special::{gamma_ratio, i_p, i_p_recurrence, j_p_scaled, middle_band};
use crate::symbols::{eval_symbols, phi_maximum};

/// One line of the lemma report. `worst_margin` is the smallest relative
/// headroom `(limit - observed)/limit`; the row passes when it is `≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub samples: usize,
    pub worst_margin: f64,
    pub detail: String,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.worst_margin >= 0.0
    }

    pub fn line(&self) -> String {
        format!(
            "{:<22} samples={:<6} worst_margin={:>+.6e} {:<4} {}",
            self.name,
            self.samples,
            self.worst_margin,
            if self.passed() { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn headroom(observed: f64, limit: f64) -> f64 {
    if observed.is_nan() {
        return f64::NEG_INFINITY;
    }
    (limit - observed) / limit.abs()
}

fn min_all(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(
        f64::INFINITY,
        |a, b| if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) },
    )
}

/// Ratio `max/min` of a sequence.
fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Rows are computed in a fixed order so reports are byte-identical for a seed.
pub fn run_all(seed: u64, samples: usize, t_grid: &[f64], dims: &[u32], rel_tol: f64) -> Result<Vec<CheckRow>> {
    Ok(vec![
        recurrence(seed, rel_tol)?,
        tail_sandwich()?,
        middle_band_bound()?,
        symbol_ratios(seed)?,
        low_frequency_increment(dims)?,
        weight_band("sine-weight-band", Weight::Sin, &[3, 4], t_grid, rel_tol)?,
        weight_band("cosine-weight-band", Weight::Cos, &[1, 2], t_grid, rel_tol)?,
        closure(seed, dims)?,
        high_band_decay(dims, rel_tol)?,
        energy_nonincreasing(dims, rel_tol)?,
        growth_witnesses(t_grid, rel_tol)?,
        gamma_ratio_limit()?,
        kato_rellich(seed, samples)?,
        phi_maximum_row(),
    ])
}

pub fn recurrence(seed: u64, rel_tol: f64) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(f64, f64)> = (0..50)
        .map(|_| {
            let p = rng.gen_range(2.0..=8.0);
            (p, rng.gen_range(p + 2.0..=200.0))
        })
        .collect();
    let errs = draws
        .par_iter()
        .map(|&(p, t)| {
            let direct = i_p(t, p)?;
            let stepped = i_p_recurrence(t, p, i_p(t, p - 2.0)?)?;
            Ok((stepped - direct).abs() / direct)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(CheckRow {
        name: "recurrence",
        samples: draws.len(),
        worst_margin: headroom(worst, rel_tol),
        detail: format!("max relative gap {worst:.3e}"),
    })
}

/// `J_p(t)(t-1)2^t` between `min(1, 2^((p-1)/2))·q` and `max(1, 2^((p-1)/2))·q`,
/// `q = (t-1)/(t-(p+1)/2)`. For `p = 1` both sides equal one, so the sides are
/// compared with a `1e-12` relative allowance for quadrature error.
pub fn tail_sandwich() -> Result<CheckRow> {
    let mut margins = Vec::new();
    for &p in &[-1.0, 0.0, 1.0, 3.0] {
        for &t in &[10.0, 20.0, 50.0] {
            let v = j_p_scaled(t, p)?;
            let c: f64 = 2f64.powf((p - 1.0) / 2.0);
            let q = (t - 1.0) / (t - (p + 1.0) / 2.0);
            let (lo, hi) = if p >= 1.0 { (1.0, c * q) } else { (c * q, 1.0) };
            margins.push((v - lo) / lo + 1e-12);
            margins.push((hi - v) / hi + 1e-12);
        }
    }
    Ok(CheckRow {
        name: "tail-sandwich",
        samples: margins.len() / 2,
        worst_margin: min_all(margins),
        detail: "both sides, p in {-1,0,1,3}, t in {10,20,50}".into(),
    })
}

pub fn middle_band_bound() -> Result<CheckRow> {
    let mut margins = Vec::new();
    for &eta in &[0.1, 0.5, 0.9] {
        for &p in &[0.0, 1.0, 3.0] {
            for &t in &[0.0, 1.0, 10.0, 100.0] {
                let v = middle_band(eta, p, t)?;
                margins.push(headroom(v, (-t * f64::ln_1p(eta * eta)).exp()));
            }
        }
    }
    Ok(CheckRow {
        name: "middle-band",
        samples: margins.len(),
        worst_margin: min_all(margins),
        detail: "C = 1".into(),
    })
}

pub fn symbol_ratios(seed: u64) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
    let mut worst_a = 0.0f64;
    let mut worst_d = 0.0f64;
    let count = 10_000;
    for _ in 0..count {
        let r = 10f64.powf(rng.gen_range(-6.0..6.0));
        let s = eval_symbols(r)?;
        worst_a = worst_a.max((s.a / s.b).powi(2));
        worst_d = worst_d.max((s.b_minus_r / s.b).powi(2));
    }
    Ok(CheckRow {
        name: "symbol-ratios",
        samples: count,
        worst_margin: headroom(worst_a, 1.0 / 3.0).min(headroom(worst_d, 28.0 / 3.0)),
        detail: format!("worst a^2/b^2 = {worst_a:.6} (<= 1/3), worst (b-r)^2/b^2 = {worst_d:.6} (<= 28/3)"),
    })
}

/// `|A₁(r)| ≤ K r ‖u₁‖_{1,1}` with `K = 1`.
pub fn low_frequency_increment(dims: &[u32]) -> Result<CheckRow> {
    let radii: Vec<f64> = (0..=400).map(|k| 10f64.powf(-4.0 + k as f64 / 50.0)).collect();
    let mut fitted = 0.0f64;
    for &n in dims {
        let d = decompose_data(&DataPair::standard(n)?.u1)?;
        fitted = fitted.max(d.fitted_constant(&radii));
    }
    Ok(CheckRow {
        name: "low-freq-increment",
        samples: radii.len() * dims.len(),
        worst_margin: headroom(fitted, 1.0),
        detail: format!("fitted K = {fitted:.6} (<= 1)"),
    })
}

/// `M(t)·t^e` within a factor 1.5, with `e = (n-2)/2` (sine) or `n/2` (cosine).
pub fn weight_band(name: &'static str, kind: Weight, dims: &[u32], t_grid: &[f64], rel_tol: f64) -> Result<CheckRow> {
    let mut margins = Vec::new();
    let mut spreads = Vec::new();
    for &n in dims {
        let e = match kind {
            Weight::Sin => (n as f64 - 2.0) / 2.0,
            Weight::Cos => n as f64 / 2.0,
        };
        let scaled = t_grid
            .par_iter()
            .map(|&t| Ok(m_integral(t, n, kind, rel_tol)? * t.powf(e)))
            .collect::<Result<Vec<f64>>>()?;
        let s = spread(&scaled);
        spreads.push(format!("n={n}: {s:.4}"));
        margins.push(headroom(s, 1.5));
    }
    Ok(CheckRow {
        name,
        samples: dims.len() * t_grid.len(),
        worst_margin: min_all(margins),
        detail: format!("max/min {}", spreads.join(", ")),
    })
}

pub fn closure(seed: u64, dims: &[u32]) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc105);
    let count = 10_000;
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = dims[i % dims.len()];
        let data = DataPair::standard(n)?;
        let t = rng.gen_range(0.0..1e3);
        let r = 10f64.powf(rng.gen_range(-6.0..3.0));
        worst = worst.max(remainder_terms(t, r, &data)?.relative_closure());
    }
    Ok(CheckRow {
        name: "closure",
        samples: count,
        worst_margin: headroom(worst, 1e-10),
        detail: format!("max relative residual {worst:.3e}"),
    })
}

/// High-band squared residual at `t = 40` against `C t² 2^(-t)` fitted at `t = 20`.
pub fn high_band_decay(dims: &[u32], rel_tol: f64) -> Result<CheckRow> {
    let envelope = |t: f64| t * t * (-t * std::f64::consts::LN_2).exp();
    let mut margins = Vec::new();
    for &n in dims {
        let ev = Evolution::new(DataPair::standard(n)?).with_tolerance(rel_tol);
        let at20 = ev.residual_bands(20.0, ResidualRoute::Direct)?.high_squared;
        let at40 = ev.residual_bands(40.0, ResidualRoute::Direct)?.high_squared;
        margins.push(headroom(at40, at20 / envelope(20.0) * envelope(40.0)));
    }
    Ok(CheckRow {
        name: "high-band-decay",
        samples: dims.len(),
        worst_margin: min_all(margins),
        detail: "t = 40 vs envelope fitted at t = 20".into(),
    })
}

/// `E(t₂) ≤ E(t₁)` on a 20-point grid, allowing the quadrature error estimates.
pub fn energy_nonincreasing(dims: &[u32], rel_tol: f64) -> Result<CheckRow> {
    let grid = crate::util::grid(0.0, 50.0, 20, false)?;
    let mut worst = f64::INFINITY;
    for &n in dims {
        let ev = Evolution::new(DataPair::standard(n)?).with_tolerance(rel_tol);
        let e = grid.par_iter().map(|&t| ev.energy(t)).collect::<Result<Vec<_>>>()?;
        for w in e.windows(2) {
            let slack = w[0].error_estimate + w[1].error_estimate;
            worst = worst.min((w[0].value + slack - w[1].value) / w[0].value);
        }
    }
    Ok(CheckRow {
        name: "energy-nonincreasing",
        samples: dims.len() * (grid.len() - 1),
        worst_margin: worst,
        detail: "t in [0, 50]".into(),
    })
}

/// Lower bounds from the growth proofs for `Q` and `R`.
pub fn growth_witnesses(t_grid: &[f64], rel_tol: f64) -> Result<CheckRow> {
    let mut margins = Vec::new();
    for &t in t_grid {
        let q = q_integral(t, rel_tol)?;
        let window = q_window_integral(t)?;
        margins.push((q - window) / q);
        margins.push((window - q_window_lower_bound(t)) / window);
        let low = q_low_band(t)?;
        margins.push((low - q_low_lower_bound(t)) / low);
        let r = r_integral(t, rel_tol)?;
        margins.push((r - r_lower_bound(t)?) / r);
    }
    Ok(CheckRow {
        name: "growth-witnesses",
        samples: margins.len(),
        worst_margin: min_all(margins),
        detail: "Q window, Q low band, R lower bound".into(),
    })
}

pub fn gamma_ratio_limit() -> Result<CheckRow> {
    let ts: Vec<f64> = (0..=40)
        .map(|k| 50.0 * 10f64.powf(k as f64 * (20_000f64).log10() / 40.0))
        .collect();
    let mut margins = Vec::new();
    for &t in &ts {
        let s = gamma_ratio(t)? * t.sqrt();
        margins.push(headroom((s - 1.0).abs(), 0.01));
    }
    Ok(CheckRow {
        name: "gamma-ratio-limit",
        samples: ts.len(),
        worst_margin: min_all(margins),
        detail: "sqrt(t) G(t-1/2)/G(t) in [0.99, 1.01], t in [50, 1e6]".into(),
    })
}

pub fn kato_rellich(seed: u64, samples: usize) -> Result<CheckRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4b52);
    let profiles: Vec<SpectralProfile> = (0..samples)
        .map(|i| SpectralProfile::random(&mut rng, 1 + (i % 3) as u32))
        .collect();
    let ratios = profiles
        .par_iter()
        .map(|p| p.kato_rellich_ratio())
        .collect::<Result<Vec<f64>>>()?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(CheckRow {
        name: "kato-rellich",
        samples,
        worst_margin: headroom(worst, 1.0),
        detail: format!("max |Lv| / ((2/e)(|v| + |Av|)) = {worst:.6}"),
    })
}

pub fn phi_maximum_row() -> CheckRow {
    let (lo, hi, value) = phi_maximum(10.0, 1e-9);
    let x = 0.5 * (lo + hi);
    let loc = headroom((x - (E - 1.0)).abs(), 1e-6);
    let val = headroom((value - 1.0 / E).abs(), 1e-12);
    CheckRow {
        name: "phi-maximum",
        samples: 1,
        worst_margin: loc.min(val),
        detail: format!("argmax {x:.9}, max {value:.15}"),
    }
}
