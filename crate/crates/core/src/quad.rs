//! Quadrature helpers: Gauss–Legendre rules and cumulative integration on log grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed Gauss–Legendre rule mapped onto panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// ∫_a^b f over `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                sum += w * f(mid + 0.5 * h * x);
            }
        }
        sum * 0.5 * h
    }

    pub fn integrate_c<F: FnMut(f64) -> C64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> C64 {
        let h = (b - a) / panels as f64;
        let mut sum = C64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                sum += f(mid + 0.5 * h * x) * *w;
            }
        }
        sum * (0.5 * h)
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, w * half))
    }
}

/// Geometric grid on [x_min, x_max] with uniform step in ln x.
pub fn log_grid(x_min: f64, x_max: f64, dt: f64) -> Vec<f64> {
    let span = (x_max / x_min).ln();
    let n = ((span / dt).ceil() as usize).max(3);
    let step = span / n as f64;
    (0..=n).map(|i| if i == n { x_max } else { x_min * (step * i as f64).exp() }).collect()
}

/// Approximates ∫_0^{x0} f dx from samples at the two smallest nodes, assuming f ~ x^p.
pub(crate) fn power_head(x0: f64, f0: C64, x1: f64, f1: C64) -> Result<C64> {
    if f0.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let p = if f1.norm() == 0.0 { 0.0 } else { (f1.norm() / f0.norm()).ln() / (x1 / x0).ln() };
    if !(p > -1.0 + 1e-3) {
        return Err(Error::Integrability("integrand not integrable at the origin"));
    }
    Ok(f0 * x0 / (p + 1.0))
}

/// Weights of ∫_o^{o+1} of the quintic through nodes 0..=5, for o = 0..=4.
fn sextic_window_weights() -> [[f64; 6]; 5] {
    let (x, w) = gauss_legendre(6);
    let mut out = [[0.0; 6]; 5];
    for (o, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for (xn, wn) in x.iter().zip(&w) {
                let t = o as f64 + 0.5 * (xn + 1.0);
                let mut lj = 1.0;
                for m in 0..6 {
                    if m != j {
                        lj *= (t - m as f64) / (j as f64 - m as f64);
                    }
                }
                s += wn * lj;
            }
            *slot = 0.5 * s;
        }
    }
    out
}

/// Cumulative ∫_{x_0}^{x_i} f dx on a geometric grid, sixth order in the log step.
///
/// `g` holds f(x_i)·x_i, the integrand in t = ln x.
pub(crate) fn cumulative_log(dt: f64, g: &[C64], out: &mut Vec<C64>) {
    let n = g.len();
    out.clear();
    out.push(C64::new(0.0, 0.0));
    if n < 6 {
        for i in 1..n {
            let prev = out[i - 1];
            out.push(prev + (g[i - 1] + g[i]) * (0.5 * dt));
        }
        return;
    }
    let w = sextic_window_weights();
    for k in 0..n - 1 {
        let s = k.saturating_sub(2).min(n - 6);
        let row = &w[k - s];
        let mut piece = C64::new(0.0, 0.0);
        for j in 0..6 {
            piece += g[s + j] * row[j];
        }
        let prev = out[k];
        out.push(prev + piece * dt);
    }
}

/// Euclidean remainder in [0, m); `f64::rem_euclid` lives in std.
pub(crate) fn rem_pos(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// Natural cubic spline through (xs, ys).
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("spline needs >= 2 strictly increasing nodes"));
        }
        let mut m = alloc::vec![0.0; n];
        if n > 2 {
            let mut c = alloc::vec![0.0; n];
            let mut d = alloc::vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Ok(Self { xs: xs.to_vec(), ys: ys.to_vec(), m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_exact_for_polynomials() {
        let rule = GaussRule::new(5);
        let v = rule.integrate(|x| x.powi(9) + 3.0 * x * x, 0.0, 2.0, 1);
        assert!((v - (102.4 + 8.0)).abs() < 1e-12);
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn cumulative_log_sixth_order() {
        // ∫_{1e-4}^x y^2 dy
        let grid = log_grid(1e-4, 1.0, 0.02);
        let dt = (grid[1] / grid[0]).ln();
        let g: Vec<C64> = grid.iter().map(|x| C64::new(x * x * x, 0.0)).collect();
        let mut out = Vec::new();
        cumulative_log(dt, &g, &mut out);
        let exact = (1.0 - 1e-12) / 3.0;
        let err = (out.last().unwrap().re - exact).abs();
        assert!(err < 2e-10, "{err}");
    }

    #[test]
    fn power_head_exact_for_power() {
        let h = power_head(1e-3, C64::new(1e-3f64.powf(-0.5), 0.0), 2e-3, C64::new(2e-3f64.powf(-0.5), 0.0)).unwrap();
        assert!((h.re - 2.0 * 1e-3f64.sqrt()).abs() < 1e-12);
        assert!(power_head(1e-3, C64::new(1e3, 0.0), 2e-3, C64::new(5e2, 0.0)).is_err());
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..41).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        assert!((s.eval(2.05) - 2.05f64.sin()).abs() < 1e-5);
    }
}
