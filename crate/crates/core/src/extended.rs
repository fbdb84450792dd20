//! Extended-precision reference arithmetic (128-bit mantissa, about 38
//! significant digits) for oracle checks.
//!
//! Everything here is deliberately independent of the double-precision
//! paths: different arithmetic, no series switchovers, and a fixed-panel
//! Gauss–Legendre rule instead of adaptive Gauss–Kronrod.

use astro_float::{BigFloat, Consts, RoundingMode};

/// Mantissa bits used by [`Extended`].
pub const PRECISION_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Extended {
    p: usize,
    cc: Consts,
}

impl Default for Extended {
    fn default() -> Self {
        Self::new()
    }
}

impl Extended {
    pub fn new() -> Self {
        Self {
            p: PRECISION_BITS,
            cc: Consts::new().expect("constant cache allocation"),
        }
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        // astro-float has no direct narrowing conversion; its decimal
        // rendering carries every digit and parses back with correct rounding.
        x.to_string().parse().unwrap_or(f64::NAN)
    }

    pub fn add(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.add(y, self.p, RM)
    }
    pub fn sub(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.sub(y, self.p, RM)
    }
    pub fn mul(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.mul(y, self.p, RM)
    }
    pub fn div(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.div(y, self.p, RM)
    }
    pub fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.p, RM)
    }
    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(self.p, RM, &mut self.cc)
    }
    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.p, RM, &mut self.cc)
    }
    pub fn sin(&mut self, x: &BigFloat) -> BigFloat {
        x.sin(self.p, RM, &mut self.cc)
    }
    pub fn cos(&mut self, x: &BigFloat) -> BigFloat {
        x.cos(self.p, RM, &mut self.cc)
    }
    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    /// `log(1 + r²)`.
    pub fn log1p_sq(&mut self, r: &BigFloat) -> BigFloat {
        let one = self.num(1.0);
        let s = self.add(&one, &self.mul(r, r));
        self.ln(&s)
    }

    /// `(1 + r²)^(-t)` as `exp(-t log(1+r²))`.
    pub fn damping_power(&mut self, r: &BigFloat, t: &BigFloat) -> BigFloat {
        let l = self.log1p_sq(r);
        let e = self.mul(t, &l).neg();
        self.exp(&e)
    }

    /// Symbols `(a, b)` from the unsimplified formulas
    /// `a = log(1+r²)/2`, `b = sqrt(4r² - log²(1+r²))/2`.
    pub fn symbols(&mut self, r: f64) -> (BigFloat, BigFloat) {
        let rr = self.num(r);
        let l = self.log1p_sq(&rr);
        let half = self.num(0.5);
        let a = self.mul(&l, &half);
        let four_r2 = self.mul(&self.num(4.0), &self.mul(&rr, &rr));
        let b = self.mul(&self.sqrt(&self.sub(&four_r2, &self.mul(&l, &l))), &half);
        (a, b)
    }

    /// Gauss–Legendre nodes and weights on `[-1, 1]`.
    pub fn gauss_legendre(&mut self, order: usize) -> Vec<(BigFloat, BigFloat)> {
        let one = self.num(1.0);
        let two = self.num(2.0);
        let m = order as f64;
        let mut rule = Vec::with_capacity(order);
        for i in 1..=order {
            let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (m + 0.5)).cos();
            let mut x = self.num(guess);
            for _ in 0..6 {
                let (p_m, p_prev) = self.legendre_pair(order, &x);
                // P'_m = m (x P_m - P_{m-1}) / (x² - 1)
                let num = self.mul(&self.num(m), &self.sub(&self.mul(&x, &p_m), &p_prev));
                let deriv = self.div(&num, &self.sub(&self.mul(&x, &x), &one));
                x = self.sub(&x, &self.div(&p_m, &deriv));
            }
            let (p_m, p_prev) = self.legendre_pair(order, &x);
            let num = self.mul(&self.num(m), &self.sub(&self.mul(&x, &p_m), &p_prev));
            let deriv = self.div(&num, &self.sub(&self.mul(&x, &x), &one));
            let w = self.div(
                &two,
                &self.mul(&self.sub(&one, &self.mul(&x, &x)), &self.mul(&deriv, &deriv)),
            );
            rule.push((x, w));
        }
        rule
    }

    fn legendre_pair(&self, order: usize, x: &BigFloat) -> (BigFloat, BigFloat) {
        let mut p_prev = self.num(1.0);
        let mut p = x.clone();
        for k in 2..=order {
            let kf = k as f64;
            let a = self.mul(&self.num(2.0 * kf - 1.0), &self.mul(x, &p));
            let b = self.mul(&self.num(kf - 1.0), &p_prev);
            let next = self.div(&self.sub(&a, &b), &self.num(kf));
            p_prev = p;
            p = next;
        }
        (p, p_prev)
    }

    /// Composite Gauss–Legendre rule with `panels` equal panels on `[lo, hi]`.
    pub fn integrate_fixed<F>(&mut self, mut f: F, lo: f64, hi: f64, panels: usize, order: usize) -> BigFloat
    where
        F: FnMut(&mut Extended, &BigFloat) -> BigFloat,
    {
        let rule = self.gauss_legendre(order);
        let lo_b = self.num(lo);
        let width = self.div(&self.sub(&self.num(hi), &lo_b), &self.num(panels as f64));
        let half = self.mul(&width, &self.num(0.5));
        let mut total = self.num(0.0);
        for k in 0..panels {
            let left = self.add(&lo_b, &self.mul(&width, &self.num(k as f64)));
            let centre = self.add(&left, &half);
            let mut panel = self.num(0.0);
            for (x, w) in &rule {
                let abscissa = self.add(&centre, &self.mul(&half, x));
                let fx = f(self, &abscissa);
                panel = self.add(&panel, &self.mul(w, &fx));
            }
            total = self.add(&total, &self.mul(&panel, &half));
        }
        total
    }
}
