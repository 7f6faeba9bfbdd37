//! Regular solution φ, non-principal solution θ and Jost solution f.
//!
//! Near the origin the Volterra equations are iterated on a geometric grid
//! (kernel built from the free solutions); from there on the solutions are
//! continued with the collocation propagator, whose mesh resolves both the
//! x^{-2} singularity and the local wavelength.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{build_mesh, propagate, Mat, Scaled};
use crate::potential::PotentialSpec;
use crate::quad::{cumulative_log, log_grid, power_head};
use crate::specfun::{free_phi, free_theta, hankel1_scaled, sqrt_upper, ComplexEnergy};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// How the nodes of a grid were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    LogGraded,
    Uniform,
    Custom,
}

/// Strictly increasing sample points in (0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    nodes: Vec<f64>,
    pub grading: Grading,
}

impl GridSpec {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        Self::with_grading(nodes, Grading::Custom)
    }

    fn with_grading(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 nodes"));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) || !nodes[nodes.len() - 1].is_finite() {
            return Err(Error::InvalidInput("grid nodes must be positive, finite and increasing"));
        }
        Ok(Self { nodes, grading })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 nodes"));
        }
        let h = (b - a) / (n - 1) as f64;
        Self::with_grading((0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect(), Grading::Uniform)
    }

    pub fn log_graded(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(a > 0.0 && b > a) {
            return Err(Error::InvalidInput("log grid needs 0 < a < b and n >= 2"));
        }
        let r = (b / a).ln() / (n - 1) as f64;
        Self::with_grading((0..n).map(|i| if i == n - 1 { b } else { a * (r * i as f64).exp() }).collect(), Grading::LogGraded)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Regular,
    NonPrincipal,
    Jost,
}

/// Sampled solution; the true value at node j is `values[j] · e^{log_scale[j]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSample {
    pub grid: GridSpec,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
    pub log_scale: Vec<f64>,
    pub kind: SolutionKind,
    pub energy: ComplexEnergy,
}

impl WaveSample {
    fn from_states(grid: GridSpec, states: &[Scaled<2>], kind: SolutionKind, energy: ComplexEnergy) -> Self {
        Self {
            values: states.iter().map(|s| s.y[0]).collect(),
            derivs: states.iter().map(|s| s.y[1]).collect(),
            log_scale: states.iter().map(|s| s.scale).collect(),
            grid,
            kind,
            energy,
        }
    }

    pub fn value(&self, j: usize) -> C64 {
        self.values[j] * self.log_scale[j].exp()
    }

    pub fn deriv(&self, j: usize) -> C64 {
        self.derivs[j] * self.log_scale[j].exp()
    }
}

/// Route for the non-principal solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRoute {
    /// Volterra iteration; needs the strengthened integrability condition.
    Iterate,
    /// Free θ_l data at the origin radius, then propagation. Determined only up to
    /// an additive multiple of φ.
    FreeStart,
}

const EPS_LOG: f64 = 0.05;
const C_OSC: f64 = 0.5;
const PICARD_DT: f64 = 0.02;
const PICARD_TOL: f64 = 1e-14;
const PICARD_SWEEPS: usize = 50;
const HEAD_RATIO: f64 = 1e-8;

pub(crate) fn bessel_coef(pot: &PotentialSpec, z: C64) -> impl Fn(f64) -> Mat<2> + '_ {
    let ll = pot.l.value() * (pot.l.value() + 1.0);
    move |x: f64| {
        let q = C64::new(ll / (x * x) + pot.q(x), 0.0) - z;
        [[ZERO, ONE], [q, ZERO]]
    }
}

/// Local step bound for y'' = Q y.
pub(crate) fn step_bound(pot: &PotentialSpec, z: C64, x: f64) -> f64 {
    let ll = pot.l.value() * (pot.l.value() + 1.0);
    let q = (C64::new(ll / (x * x) + pot.q(x), 0.0) - z).norm();
    let h_max = (0.02 * x).max(0.1);
    (EPS_LOG * x).min(C_OSC / q.sqrt().max(1e-300)).min(h_max)
}

/// Propagates a state from `start` through `stops` (ordered away from `start`).
pub(crate) fn shoot(pot: &PotentialSpec, z: C64, start: (f64, Scaled<2>), stops: &[f64]) -> Result<Vec<Scaled<2>>> {
    let (x_start, y0) = start;
    if stops.is_empty() {
        return Ok(Vec::new());
    }
    let end = stops[stops.len() - 1];
    let mut all_stops = pot.breakpoints();
    all_stops.extend_from_slice(stops);
    let mesh = build_mesh(x_start, end, &all_stops, |x| step_bound(pot, z, x));
    let coef = bessel_coef(pot, z);
    let states = propagate(&coef, y0, &mesh).ok_or(Error::NonConvergence { what: "collocation step", sweeps: 1 })?;
    let mut out = Vec::with_capacity(stops.len());
    let mut j = 0;
    for &s in stops {
        if s == x_start {
            out.push(y0);
            continue;
        }
        while j < mesh.len() && mesh[j] != s {
            j += 1;
        }
        if j == mesh.len() {
            return Err(Error::InvalidInput("stops must be ordered away from the start"));
        }
        out.push(states[j]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Start {
    Regular,
    Theta,
}

/// Volterra solution on a geometric grid ending at `x0`.
pub(crate) struct Origin {
    pub xs: Vec<f64>,
    pub ys: Vec<C64>,
    pub dys: Vec<C64>,
}

impl Origin {
    pub fn end(&self) -> (f64, Scaled<2>) {
        let n = self.xs.len() - 1;
        (self.xs[n], Scaled::new([self.ys[n], self.dys[n]]))
    }
}

/// Default end of the Volterra region.
pub(crate) fn origin_radius(pot: &PotentialSpec, e: ComplexEnergy, cap: f64) -> f64 {
    let mut x0 = cap.min(1e-3).min(0.25 / e.k.norm().max(1e-300));
    if let Some(&b) = pot.breakpoints().first() {
        x0 = x0.min(0.5 * b);
    }
    x0
}

pub(crate) fn origin_solution(pot: &PotentialSpec, e: ComplexEnergy, start: Start, x0: f64, dt: f64) -> Result<Origin> {
    let xs = log_grid(x0 * HEAD_RATIO, x0, dt);
    let dt = (xs[1] / xs[0]).ln();
    let l = pot.l;
    let n = xs.len();
    let mut phil = Vec::with_capacity(n);
    let mut thetal = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for &x in &xs {
        phil.push(free_phi(l, e, x));
        thetal.push(free_theta(l, e, x));
        q.push(pot.q(x));
    }
    let base: Vec<(C64, C64)> = match start {
        Start::Regular => phil.clone(),
        Start::Theta => thetal.clone(),
    };
    let mut ys: Vec<C64> = base.iter().map(|v| v.0).collect();
    let mut dys: Vec<C64> = base.iter().map(|v| v.1).collect();
    if q.iter().all(|v| *v == 0.0) {
        return Ok(Origin { xs, ys, dys });
    }
    let mut ga = vec![ZERO; n];
    let mut gb = vec![ZERO; n];
    let mut ca = Vec::with_capacity(n);
    let mut cb = Vec::with_capacity(n);
    for sweep in 0..PICARD_SWEEPS {
        for i in 0..n {
            ga[i] = thetal[i].0 * q[i] * ys[i] * xs[i];
            gb[i] = phil[i].0 * q[i] * ys[i] * xs[i];
        }
        let ha = power_head(xs[0], ga[0] / xs[0], xs[1], ga[1] / xs[1])?;
        let hb = power_head(xs[0], gb[0] / xs[0], xs[1], gb[1] / xs[1])?;
        cumulative_log(dt, &ga, &mut ca);
        cumulative_log(dt, &gb, &mut cb);
        let mut change: f64 = 0.0;
        for i in 0..n {
            let a = ca[i] + ha;
            let b = cb[i] + hb;
            let y = base[i].0 + phil[i].0 * a - thetal[i].0 * b;
            let dy = base[i].1 + phil[i].1 * a - thetal[i].1 * b;
            change = change.max((y - ys[i]).norm() / y.norm().max(1e-300));
            ys[i] = y;
            dys[i] = dy;
        }
        if !change.is_finite() {
            return Err(Error::NonConvergence { what: "Volterra iteration", sweeps: sweep + 1 });
        }
        if change < PICARD_TOL {
            return Ok(Origin { xs, ys, dys });
        }
    }
    Err(Error::NonConvergence { what: "Volterra iteration", sweeps: PICARD_SWEEPS })
}

fn check_energy(e: ComplexEnergy) -> Result<()> {
    if !(e.z.re.is_finite() && e.z.im.is_finite()) {
        return Err(Error::InvalidInput("energy must be finite"));
    }
    Ok(())
}

/// φ (or θ) at increasing points `xs`, all ≥ the Volterra radius.
pub(crate) fn solution_at(pot: &PotentialSpec, e: ComplexEnergy, start: Start, xs: &[f64]) -> Result<Vec<Scaled<2>>> {
    check_energy(e)?;
    let x_def = origin_radius(pot, e, f64::INFINITY);
    if start == Start::Regular || xs[0] >= x_def {
        let x0 = origin_radius(pot, e, xs[0]);
        let origin = origin_solution(pot, e, start, x0, PICARD_DT)?;
        return shoot(pot, e.z, origin.end(), xs);
    }
    // Starting θ at a tiny radius would lose its φ-component to cancellation;
    // start at the usual radius and shoot inward, where θ dominates.
    let origin = origin_solution(pot, e, start, x_def, PICARD_DT)?;
    let split = xs.iter().position(|x| *x >= x_def).unwrap_or(xs.len());
    let inner: Vec<f64> = xs[..split].iter().rev().copied().collect();
    let mut out = shoot(pot, e.z, origin.end(), &inner)?;
    out.reverse();
    out.extend(shoot(pot, e.z, origin.end(), &xs[split..])?);
    Ok(out)
}

pub(crate) fn theta_free_start_at(pot: &PotentialSpec, e: ComplexEnergy, xs: &[f64]) -> Result<Vec<Scaled<2>>> {
    let x0 = origin_radius(pot, e, xs[0]);
    let (t, dt) = free_theta(pot.l, e, x0);
    shoot(pot, e.z, (x0, Scaled::new([t, dt])), xs)
}

/// Regular solution φ(z,·) normalized by φ ~ x^{l+1} at 0.
pub fn regular_solution(pot: &PotentialSpec, e: ComplexEnergy, grid: &GridSpec) -> Result<WaveSample> {
    if !pot.hyp12() {
        return Err(Error::Integrability("x q(x) must be integrable near 0"));
    }
    let states = solution_at(pot, e, Start::Regular, grid.nodes())?;
    Ok(WaveSample::from_states(grid.clone(), &states, SolutionKind::Regular, e))
}

/// Non-principal solution θ(z,·) with θ ~ x^{-l}/(2l+1) at 0, built by iteration.
pub fn theta_solution(pot: &PotentialSpec, e: ComplexEnergy, grid: &GridSpec) -> Result<WaveSample> {
    theta_solution_with(pot, e, grid, ThetaRoute::Iterate)
}

pub fn theta_solution_with(pot: &PotentialSpec, e: ComplexEnergy, grid: &GridSpec, route: ThetaRoute) -> Result<WaveSample> {
    if !pot.hyp12() {
        return Err(Error::Integrability("x q(x) must be integrable near 0"));
    }
    let states = match route {
        ThetaRoute::Iterate => {
            if !pot.theta_iterable() {
                return Err(Error::Condition("theta needs y^{-2l}|q| integrable at 0; use the string route or FreeStart"));
            }
            solution_at(pot, e, Start::Theta, grid.nodes())?
        }
        ThetaRoute::FreeStart => theta_free_start_at(pot, e, grid.nodes())?,
    };
    Ok(WaveSample::from_states(grid.clone(), &states, SolutionKind::NonPrincipal, e))
}

/// Effective momentum after removing the constant offset: k'² = k² − c.
pub(crate) fn effective_k(pot: &PotentialSpec, k: C64) -> C64 {
    let c = pot.constant_offset();
    if c == 0.0 {
        k
    } else {
        sqrt_upper(k * k - c)
    }
}

/// Free Jost solution i√(πxk/2) H1_{l+1/2}(kx) and its derivative, as a scaled state.
pub(crate) fn free_jost_state(pot: &PotentialSpec, k: C64, x: f64) -> Result<Scaled<2>> {
    let nu = pot.l.nu();
    let w = k * x;
    let h = hankel1_scaled(nu, w)?;
    let hn = hankel1_scaled(nu + 1.0, w)?;
    let hp = -hn + h * nu / w;
    let pre = I * (k * core::f64::consts::PI / 2.0).sqrt();
    let sx = x.sqrt();
    let val = pre * sx * h;
    let der = pre * (h / (2.0 * sx) + sx * k * hp);
    // e^{ikx} split into phase and log scale
    let phase = C64::from_polar(1.0, k.re * x);
    let mut s = Scaled::new([val * phase, der * phase]);
    s.scale += -k.im * x;
    Ok(s)
}

/// Truncation radius X∞ and the Jost state there.
pub(crate) fn jost_start(pot: &PotentialSpec, k: C64, beyond: f64) -> Result<(f64, Scaled<2>)> {
    // -0.0 would select the lower lip in the square roots below
    let k = C64::new(k.re, k.im + 0.0);
    if k == ZERO {
        return Err(Error::Singular("the Jost solution is undefined at k = 0"));
    }
    if k.im < 0.0 {
        return Err(Error::Domain("Jost solution needs Im k >= 0"));
    }
    let kk = effective_k(pot, k);
    let tail_tol = 1e-13;
    let mut x = match pot.support_end() {
        Some(end) => end.max(1e-3),
        None => {
            let mut x = 1.0;
            while pot.tail_moment(x) / (1.0 + kk.norm() * x) > tail_tol {
                x *= 1.25;
                if x > 1e5 {
                    return Err(Error::Truncation { radius: x, tail: pot.tail_moment(x) });
                }
            }
            x
        }
    };
    x = x.max(beyond);
    if pot.gamma == 0.0 {
        return Ok((x, free_jost_state(pot, kk, x)?));
    }
    // Coulomb: WKB data far out
    let ll = pot.l.value() * (pot.l.value() + 1.0);
    let x = x.max(2000.0 * (1.0 + pot.gamma.abs() + ll) / kk.norm()).min(2e5);
    let g = pot.gamma;
    let p2 = kk * kk - g / x - ll / (x * x);
    let mut p = p2.sqrt();
    if (p - kk).norm() > (p + kk).norm() {
        p = -p;
    }
    let dp = C64::new(g / (x * x) + 2.0 * ll / (x * x * x), 0.0) / (2.0 * p);
    let phase = kk * x - g / (2.0 * kk) * x.ln() + (ll / (2.0 * kk) + g * g / (8.0 * kk * kk * kk)) / x;
    let amp = (kk / p).sqrt();
    let e = I * phase;
    let val = amp * C64::from_polar(1.0, e.im);
    let der = val * (I * p - dp / (2.0 * p));
    let mut s = Scaled::new([val, der]);
    s.scale += e.re;
    Ok((x, s))
}

/// Jost solution at increasing points `xs`.
pub(crate) fn jost_at(pot: &PotentialSpec, k: C64, xs: &[f64]) -> Result<Vec<Scaled<2>>> {
    let k = C64::new(k.re, k.im + 0.0);
    if k.im == 0.0 && k.re < 0.0 {
        // real axis: f(−k, x) = f(k, x)*, not the continuation from Im k > 0
        let mut states = jost_at(pot, -k, xs)?;
        for s in &mut states {
            s.y = [s.y[0].conj(), s.y[1].conj()];
        }
        return Ok(states);
    }
    let (x_inf, state) = jost_start(pot, k, 0.0)?;
    let kk = effective_k(pot, k);
    let z = k * k;
    let inner: Vec<f64> = xs.iter().rev().copied().filter(|x| *x < x_inf).collect();
    let inner_states = shoot(pot, z, (x_inf, state), &inner)?;
    let mut out = Vec::with_capacity(xs.len());
    for (i, _) in inner.iter().enumerate().rev() {
        out.push(inner_states[i]);
    }
    for &x in xs.iter().filter(|x| **x >= x_inf) {
        if pot.gamma == 0.0 {
            out.push(free_jost_state(pot, kk, x)?);
        } else if x == x_inf {
            out.push(state);
        } else {
            let s = shoot(pot, z, (x_inf, state), &[x])?;
            out.push(s[0]);
        }
    }
    Ok(out)
}

/// Jost solution f(k,·) with f ~ e^{ikx − (iγ/2k) log x} at infinity.
///
/// For Im k > 0 the phase e^{−ilπ/2} of the normalization is kept, so
/// f(−k*, x) = e^{−iπl} f(k, x)*. On the real axis f(−k, x) = f(k, x)* instead.
pub fn jost_solution(pot: &PotentialSpec, k: C64, grid: &GridSpec) -> Result<WaveSample> {
    let states = jost_at(pot, k, grid.nodes())?;
    let e = ComplexEnergy::from_k(k)?;
    Ok(WaveSample::from_states(grid.clone(), &states, SolutionKind::Jost, e))
}

/// Wronskian u v' − u' v of two scaled states, as (mantissa, log scale).
pub(crate) fn wronskian_scaled(u: &Scaled<2>, v: &Scaled<2>) -> (C64, f64) {
    (u.y[0] * v.y[1] - u.y[1] * v.y[0], u.scale + v.scale)
}

pub(crate) fn wronskian(u: &Scaled<2>, v: &Scaled<2>) -> C64 {
    let (w, s) = wronskian_scaled(u, v);
    w * s.exp()
}

/// Pure Volterra iteration for φ on a geometric grid from `x_max·1e-8` to `x_max`.
///
/// Only sensible while |Im k|·x_max is moderate: the separable kernel cancels like e^{2|Im k|x}.
pub fn picard_regular(pot: &PotentialSpec, e: ComplexEnergy, x_max: f64, dt: f64) -> Result<WaveSample> {
    let o = origin_solution(pot, e, Start::Regular, x_max, dt)?;
    let grid = GridSpec::with_grading(o.xs.clone(), Grading::LogGraded)?;
    let n = o.xs.len();
    Ok(WaveSample {
        grid,
        values: o.ys,
        derivs: o.dys,
        log_scale: vec![0.0; n],
        kind: SolutionKind::Regular,
        energy: e,
    })
}

/// Sup-norm relative residual of φ = φ_l + ∫_0^x G_l q φ on a log-graded sample.
pub fn volterra_residual(pot: &PotentialSpec, sample: &WaveSample) -> Result<f64> {
    let xs = sample.grid.nodes();
    let n = xs.len();
    let dt = (xs[1] / xs[0]).ln();
    if xs.windows(2).any(|w| ((w[1] / w[0]).ln() - dt).abs() > 1e-9 * dt) {
        return Err(Error::InvalidInput("residual needs a geometric grid"));
    }
    let e = sample.energy;
    let ys: Vec<C64> = (0..n).map(|j| sample.value(j)).collect();
    let phil: Vec<C64> = xs.iter().map(|&x| free_phi(pot.l, e, x).0).collect();
    let thetal: Vec<C64> = xs.iter().map(|&x| free_theta(pot.l, e, x).0).collect();
    let ga: Vec<C64> = (0..n).map(|i| thetal[i] * pot.q(xs[i]) * ys[i] * xs[i]).collect();
    let gb: Vec<C64> = (0..n).map(|i| phil[i] * pot.q(xs[i]) * ys[i] * xs[i]).collect();
    let ha = power_head(xs[0], ga[0] / xs[0], xs[1], ga[1] / xs[1])?;
    let hb = power_head(xs[0], gb[0] / xs[0], xs[1], gb[1] / xs[1])?;
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    cumulative_log(dt, &ga, &mut ca);
    cumulative_log(dt, &gb, &mut cb);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let rhs = phil[i] + phil[i] * (ca[i] + ha) - thetal[i] * (cb[i] + hb);
        worst = worst.max((ys[i] - rhs).norm() / ys[i].norm().max(1e-300));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
