//! The four subcommands. Each writes its table (or report) and returns
//! whether every check passed.

use std::io::Write;

use rayon::prelude::*;

use super::checks::{self, CheckRow};
use super::config::RunConfig;
use crate::error::Result;
use crate::norms::{fit_decay, sweep, DecaySeries, Evolution};
use crate::special::{gamma_ratio, h0, hyp2f1_special, i_p, j_p_direct, j_p_scaled};

/// A pass/fail line appended to the output as a `#` comment.
struct Verdict {
    label: String,
    pass: bool,
}

impl Verdict {
    fn new(label: impl Into<String>, pass: bool) -> Self {
        Self {
            label: label.into(),
            pass,
        }
    }

    fn line(&self) -> String {
        format!("# check {} {}", if self.pass { "PASS" } else { "FAIL" }, self.label)
    }
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn emit(config: &RunConfig, header: &[&str], rows: &[Vec<String>], verdicts: &[Verdict]) -> Result<bool> {
    let mut body = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut body);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    let mut text = format!("# config-hash: {}\n", config.hash());
    text.push_str(&String::from_utf8_lossy(&body));
    for v in verdicts {
        text.push_str(&v.line());
        text.push('\n');
        eprintln!("{}", &v.line()[2..]);
    }
    write_out(config, &text)?;
    Ok(verdicts.iter().all(|v| v.pass))
}

fn write_out(config: &RunConfig, text: &str) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

struct SpecialRow {
    p: f64,
    t: f64,
    i_p: f64,
    j_p: Option<f64>,
    j_scaled: Option<f64>,
    hyp: f64,
    gamma: Option<f64>,
    h0_relerr: Option<f64>,
}

fn special_row(p: f64, t: f64) -> Result<SpecialRow> {
    let two_t = (t * std::f64::consts::LN_2).exp();
    let (j_p, j_scaled) = if t > (p + 3.0) / 2.0 {
        let s = j_p_scaled(t, p)?;
        (Some(s / (two_t * (t - 1.0))), Some(s))
    } else if t > (p + 1.0) / 2.0 {
        let j = j_p_direct(t, p)?;
        (Some(j), Some(j * (t - 1.0) * two_t))
    } else {
        (None, None)
    };
    let h0_relerr = if t > 0.5 {
        let j0 = if t > 1.5 {
            j_p_scaled(t, 0.0)? / (two_t * (t - 1.0))
        } else {
            j_p_direct(t, 0.0)?
        };
        let exact = h0(t)?;
        Some(((i_p(t, 0.0)? + j0) - exact).abs() / exact)
    } else {
        None
    };
    Ok(SpecialRow {
        p,
        t,
        i_p: i_p(t, p)?,
        j_p,
        j_scaled,
        hyp: hyp2f1_special(t, p)?,
        gamma: if t > 0.5 { Some(gamma_ratio(t)?) } else { None },
        h0_relerr,
    })
}

pub fn special(config: &RunConfig) -> Result<bool> {
    let cases: Vec<(f64, f64)> = config
        .p_values
        .iter()
        .flat_map(|&p| config.t_grid.iter().map(move |&t| (p, t)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(p, t)| special_row(p, t))
        .collect::<Result<Vec<_>>>()?;

    let mut verdicts = Vec::new();
    for &p in &config.p_values {
        let scaled: Vec<f64> = rows
            .iter()
            .filter(|r| r.p == p)
            .map(|r| r.i_p * r.t.powf((p + 1.0) / 2.0))
            .collect();
        let s = spread(&scaled);
        let inside = scaled.iter().all(|&v| (0.05..=5.0).contains(&v));
        verdicts.push(Verdict::new(
            format!(
                "I_p band p={p}: max/min {s:.6} <= {}, values in [0.05, 5]",
                config.band_ratio
            ),
            s <= config.band_ratio && inside,
        ));
    }
    let worst_h0 = rows.iter().filter_map(|r| r.h0_relerr).fold(0.0, f64::max);
    verdicts.push(Verdict::new(
        format!("H0 identity: max relative error {worst_h0:.3e} < {:e}", config.tol),
        rows.iter().filter_map(|r| r.h0_relerr).all(|e| e < config.tol),
    ));
    let gamma_ok = rows
        .iter()
        .filter(|r| r.t >= 50.0)
        .filter_map(|r| r.gamma.map(|g| g * r.t.sqrt()))
        .all(|s| (0.99..=1.01).contains(&s));
    verdicts.push(Verdict::new(
        "gamma ratio: sqrt(t) G(t-1/2)/G(t) in [0.99, 1.01] for t >= 50",
        gamma_ok,
    ));
    let sandwich_ok = rows.iter().filter(|r| r.t > (r.p + 3.0) / 2.0).all(|r| {
        let v = r.j_scaled.unwrap_or(f64::NAN);
        let c = 2f64.powf((r.p - 1.0) / 2.0);
        let q = (r.t - 1.0) / (r.t - (r.p + 1.0) / 2.0);
        let (lo, hi) = if r.p >= 1.0 { (1.0, c * q) } else { (c * q, 1.0) };
        v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12)
    });
    verdicts.push(Verdict::new("J_p sandwich on (t-1) 2^t J_p(t)", sandwich_ok));

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.p),
                num(r.t),
                num(r.i_p),
                (r.i_p * r.t.powf((r.p + 1.0) / 2.0)).to_string(),
                cell(r.j_p),
                cell(r.j_scaled),
                num(r.hyp),
                cell(r.gamma),
                cell(r.h0_relerr),
            ]
        })
        .collect();
    emit(
        config,
        &[
            "p",
            "t",
            "I_p",
            "I_p_scaled",
            "J_p",
            "J_p_scaled",
            "hyp2f1",
            "gamma_ratio",
            "h0_identity_relerr",
        ],
        &table,
        &verdicts,
    )
}

pub fn lemmas(config: &RunConfig) -> Result<bool> {
    let rows: Vec<CheckRow> = checks::run_all(config.seed, config.samples, &config.t_grid, &config.dims, config.tol)?;
    let mut text = format!("# config-hash: {}\n", config.hash());
    for r in &rows {
        text.push_str(&r.line());
        text.push('\n');
    }
    let pass = rows.iter().all(CheckRow::passed);
    text.push_str(&format!(
        "summary {}/{} PASS\n",
        rows.iter().filter(|r| r.passed()).count(),
        rows.len()
    ));
    write_out(config, &text)?;
    Ok(pass)
}

/// Scaled norm and expected behaviour for dimension `n`: `‖u‖/√t` (n = 1),
/// `‖u‖²/log t` (n = 2), `‖u‖ t^((n-2)/4)` (n ≥ 3).
fn decay_scaling(n: u32, t: f64, norm: f64) -> f64 {
    match n {
        1 => norm / t.sqrt(),
        2 => norm * norm / t.ln(),
        _ => norm * t.powf((n as f64 - 2.0) / 4.0),
    }
}

pub fn decay(config: &RunConfig) -> Result<bool> {
    let mut table = Vec::new();
    let mut verdicts = Vec::new();
    let window = (config.t_grid[0], *config.t_grid.last().expect("grid has two points"));
    for &n in &config.dims {
        let ev = Evolution::new(config.data(n)?)
            .with_tolerance(config.tol)
            .with_split(config.split);
        let norms = sweep(&config.t_grid, |t| ev.l2_norm(t))?;
        let scaled: Vec<f64> = config
            .t_grid
            .iter()
            .zip(&norms)
            .map(|(&t, &v)| decay_scaling(n, t, v))
            .collect();
        for ((t, v), s) in config.t_grid.iter().zip(&norms).zip(&scaled) {
            table.push(vec![n.to_string(), num(*t), num(*v), num(*s)]);
        }
        if n == 2 {
            let s = spread(&scaled);
            verdicts.push(Verdict::new(
                format!("n=2 |u|^2/log t max/min {s:.6} <= {}", 1.0 + config.band_tol),
                s <= 1.0 + config.band_tol,
            ));
        } else {
            let expected = if n == 1 { 0.5 } else { -(n as f64 - 2.0) / 4.0 };
            let fit = fit_decay(
                &DecaySeries::new(config.t_grid.clone(), norms, format!("n={n}"))?,
                window,
            )?;
            verdicts.push(Verdict::new(
                format!(
                    "n={n} slope {:.6} vs {expected} (tolerance {})",
                    fit.slope, config.slope_tol
                ),
                (fit.slope - expected).abs() <= config.slope_tol,
            ));
        }
    }
    emit(config, &["n", "t", "norm", "scaled"], &table, &verdicts)
}

pub fn profile(config: &RunConfig) -> Result<bool> {
    let mut table = Vec::new();
    let mut verdicts = Vec::new();
    for &n in &config.dims {
        let data = config.data(n)?;
        let i0 = data.data_constant();
        let ev = Evolution::new(data).with_tolerance(config.tol).with_split(config.split);
        let residuals = sweep(&config.t_grid, |t| ev.residual_norm(t))?;
        let scaled: Vec<f64> = config
            .t_grid
            .iter()
            .zip(&residuals)
            .map(|(&t, &v)| v * t.powf(n as f64 / 4.0))
            .collect();
        for ((t, v), s) in config.t_grid.iter().zip(&residuals).zip(&scaled) {
            table.push(vec![n.to_string(), num(*t), num(*v), num(*s), num(i0)]);
        }
        let all_zero = scaled.iter().all(|&s| s == 0.0);
        let s = if all_zero { 1.0 } else { spread(&scaled) };
        let top = scaled.iter().copied().fold(0.0, f64::max);
        verdicts.push(Verdict::new(
            format!("n={n} residual t^(n/4) max/min {s:.6} <= {}", config.band_ratio),
            s <= config.band_ratio,
        ));
        verdicts.push(Verdict::new(
            format!(
                "n={n} residual t^(n/4) max {top:.6} <= {} x I0 = {:.6}",
                config.data_multiple,
                config.data_multiple * i0
            ),
            top <= config.data_multiple * i0,
        ));
    }
    emit(config, &["n", "t", "residual_norm", "scaled", "I0"], &table, &verdicts)
}
