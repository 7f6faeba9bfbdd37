//! Jost function, phase shift, S-matrix, bound states and the dispersion reconstruction of |f|.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::quad::{rem_pos, CubicSpline, GaussRule};
use crate::solutions::{jost_at, solution_at, wronskian, Start};
use crate::spectral::{bound_window, eigenvalues, norming_constant, spectral_density, theta_states};
use crate::specfun::{coupling_constant, free_phi, free_psi, AngularMomentum, ComplexEnergy};

/// f(k) = W(f(k,·), φ(k²,·)) and g(k) = W(f(k,·), θ(k²,·)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostValues {
    pub k: C64,
    pub f: C64,
    /// None only if no θ construction applies.
    pub g: Option<C64>,
    pub note: &'static str,
}

fn wronskian_point(k: C64) -> f64 {
    (1.0 / k.norm()).clamp(0.05, 1.0)
}

fn canonical(k: C64) -> Result<C64> {
    let k = C64::new(k.re, k.im + 0.0);
    if k.norm() == 0.0 || !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::Singular("the Jost function needs a finite k != 0"));
    }
    if k.im < 0.0 {
        return Err(Error::Domain("the Jost function needs Im k >= 0"));
    }
    Ok(k)
}

/// f(k) alone.
pub fn jost_f(pot: &PotentialSpec, k: C64) -> Result<C64> {
    let k = canonical(k)?;
    let x = wronskian_point(k);
    let e = ComplexEnergy::from_k(k)?;
    let f = jost_at(pot, k, &[x])?;
    let phi = solution_at(pot, e, Start::Regular, &[x])?;
    Ok(wronskian(&f[0], &phi[0]))
}

pub fn jost_function(pot: &PotentialSpec, k: C64) -> Result<JostValues> {
    let k = canonical(k)?;
    let x = wronskian_point(k);
    let e = ComplexEnergy::from_k(k)?;
    let fj = jost_at(pot, k, &[x])?;
    let phi = solution_at(pot, e, Start::Regular, &[x])?;
    let (theta, note) = theta_states(pot, e, &[x])?;
    Ok(JostValues { k, f: wronskian(&fj[0], &phi[0]), g: Some(wronskian(&fj[0], &theta[0])), note })
}

/// Relative spread of W(f, φ) over three nodes; should sit at solver accuracy.
pub fn jost_wronskian_spread(pot: &PotentialSpec, k: C64) -> Result<f64> {
    let k = canonical(k)?;
    let e = ComplexEnergy::from_k(k)?;
    let x = wronskian_point(k);
    let xs = [x, 2.0 * x, 4.0 * x];
    let fj = jost_at(pot, k, &xs)?;
    let phi = solution_at(pot, e, Start::Regular, &xs)?;
    let w: Vec<C64> = (0..3).map(|i| wronskian(&fj[i], &phi[i])).collect();
    let scale = w[0].norm();
    Ok(w.iter().map(|v| (v - w[0]).norm()).fold(0.0, f64::max) / scale)
}

/// F(k) = C_l k^l f(k).
pub fn f_function(pot: &PotentialSpec, k: C64) -> Result<C64> {
    let k = canonical(k)?;
    Ok(k.powf(pot.l.value()) * coupling_constant(pot.l) * jost_f(pot, k)?)
}

/// Quadrature nodes for integrals over (0, X): geometric panels near 0, then
/// panels no wider than a fraction of the wavelength; potential breakpoints are panel ends.
fn integration_nodes(pot: &PotentialSpec, k: C64, x_end: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussRule::new(10);
    let width = (0.25f64).min(1.5 / k.norm().max(1e-300));
    let x_small = width.min(0.1);
    let mut ends = Vec::new();
    let mut x = x_small * 1e-9;
    while x < x_small {
        ends.push(x);
        x *= 2.0;
    }
    ends.push(x_small);
    let mut cuts: Vec<f64> = pot.breakpoints().into_iter().filter(|b| *b > x_small && *b < x_end).collect();
    cuts.push(x_end);
    let mut a = x_small;
    for c in cuts {
        let n = ((c - a) / width).ceil().max(1.0) as usize;
        for j in 1..=n {
            ends.push(a + (c - a) * j as f64 / n as f64);
        }
        a = c;
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for w in ends.windows(2) {
        for (t, wt) in rule.mapped(w[0], w[1]) {
            xs.push(t);
            ws.push(wt);
        }
    }
    (xs, ws)
}

fn integration_end(pot: &PotentialSpec, k: C64) -> Result<f64> {
    if !pot.marchenko() {
        return Err(Error::Integrability("F integrals need a short-range potential without Coulomb or constant parts"));
    }
    Ok(match pot.support_end() {
        Some(e) => e,
        None => {
            let mut x = 1.0;
            while pot.tail_l1(x) * x.max(1.0) > 1e-14 * (1.0 + k.norm()) {
                x *= 1.25;
                if x > 1e5 {
                    return Err(Error::Quadrature("potential tail too slow for the F integrals"));
                }
            }
            x
        }
    })
}

/// The two integral representations 1 + ∫ψ_l φ q and 1 + ∫ψ̃ φ_l q.
pub fn f_function_integrals(pot: &PotentialSpec, k: C64) -> Result<(C64, C64)> {
    let k = canonical(k)?;
    if !pot.hyp12() {
        return Err(Error::Integrability("x q(x) must be integrable near 0"));
    }
    let e = ComplexEnergy::from_k(k)?;
    let x_end = integration_end(pot, k)?;
    let (xs, ws) = integration_nodes(pot, k, x_end);
    let phi = solution_at(pot, e, Start::Regular, &xs)?;
    let fj = jost_at(pot, k, &xs)?;
    let norm = k.powf(pot.l.value()) * coupling_constant(pot.l);
    let (mut a, mut b) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    for (i, (&x, &w)) in xs.iter().zip(&ws).enumerate() {
        let q = pot.q(x);
        if q == 0.0 {
            continue;
        }
        let psil = free_psi(pot.l, e, x)?.0;
        let phil = free_phi(pot.l, e, x).0;
        a += psil * phi[i].value()[0] * q * w;
        b += norm * fj[i].value()[0] * phil * q * w;
    }
    Ok((a, b))
}

/// Phase shift δ(k) = −arg F(k) on increasing positive `ks`, continued down from the largest k.
pub fn phase_shift(pot: &PotentialSpec, ks: &[f64]) -> Result<Vec<f64>> {
    if ks.is_empty() || ks.iter().any(|k| !(*k > 0.0)) || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("phase shift needs an increasing grid of positive k"));
    }
    let n = ks.len();
    let mut out = alloc::vec![0.0; n];
    let mut prev: Option<f64> = None;
    for j in (0..n).rev() {
        let raw = -f_function(pot, C64::new(ks[j], 0.0))?.arg();
        let d = match prev {
            None => raw,
            Some(p) => {
                let jump = rem_pos(raw - p + PI, 2.0 * PI) - PI;
                if jump.abs() > PI / 2.0 {
                    return Err(Error::Unwrap { k: ks[j] });
                }
                p + jump
            }
        };
        out[j] = d;
        prev = Some(d);
    }
    Ok(out)
}

/// S(k) = f(k)*/f(k) = e^{2iδ(k)} on real k.
pub fn s_matrix(pot: &PotentialSpec, k: f64) -> Result<C64> {
    let f = jost_f(pot, C64::new(k, 0.0))?;
    Ok(f.conj() / f)
}

/// Tabulated scattering data on a real k grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub k_grid: Vec<f64>,
    pub f_vals: Vec<C64>,
    pub g_vals: Vec<C64>,
    pub delta: Vec<f64>,
    pub s_vals: Vec<C64>,
    pub kappas: Vec<f64>,
}

impl ScatteringData {
    pub fn compute(pot: &PotentialSpec, ks: &[f64]) -> Result<Self> {
        let delta = phase_shift(pot, ks)?;
        let mut f_vals = Vec::with_capacity(ks.len());
        let mut g_vals = Vec::with_capacity(ks.len());
        for &k in ks {
            let j = jost_function(pot, C64::new(k, 0.0))?;
            f_vals.push(j.f);
            g_vals.push(j.g.unwrap_or(C64::new(f64::NAN, f64::NAN)));
        }
        let s_vals = f_vals.iter().map(|f| f.conj() / f).collect();
        let kappas = bound_states(pot)?.kappas;
        Ok(Self { k_grid: ks.to_vec(), f_vals, g_vals, delta, s_vals, kappas })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStates {
    /// Decreasing κ_n, i.e. increasing λ_n = −κ_n².
    pub kappas: Vec<f64>,
    pub count: usize,
    /// ∫ x|q̃| dx / (2l+1).
    pub bargmann_bound: f64,
}

/// F(iκ), real up to rounding.
fn f_imaginary(pot: &PotentialSpec, kappa: f64) -> Result<f64> {
    Ok(f_function(pot, C64::new(0.0, kappa))?.re)
}

/// Zeros of F(iκ) on a log scan, cross-checked against Prüfer shooting.
pub fn bound_states(pot: &PotentialSpec) -> Result<BoundStates> {
    if pot.cutoff.is_some() {
        return Err(Error::RouteUnavailable("bound states are a half-line notion"));
    }
    let bargmann_bound = bargmann_integral(pot)? / (2.0 * pot.l.value() + 1.0);
    let depth = bound_window(pot);
    let kappa_max = (-depth).sqrt() + 1.0;
    let kappa_min = 1e-3;
    let n = 400;
    let mut nodes = Vec::with_capacity(n);
    for j in 0..n {
        let kap = kappa_min * (kappa_max / kappa_min).powf(j as f64 / (n - 1) as f64);
        nodes.push((kap, f_imaginary(pot, kap)?));
    }
    let mut kappas = Vec::new();
    for w in nodes.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa == 0.0 {
            kappas.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            kappas.push(refine_zero(|t| f_imaginary(pot, t), a, fa, b, fb)?);
        }
    }
    kappas.reverse();
    let shot = eigenvalues(pot, 0.0, (depth, -kappa_min * kappa_min))?;
    if shot.len() != kappas.len() {
        return Err(Error::RouteDisagreement { what: "bound-state count", a: kappas.len() as f64, b: shot.len() as f64 });
    }
    for (kap, lam) in kappas.iter().zip(&shot) {
        let l1 = -kap * kap;
        if (l1 - lam).abs() > 1e-8 * lam.abs() {
            return Err(Error::RouteDisagreement { what: "bound-state energy", a: l1, b: *lam });
        }
    }
    Ok(BoundStates { count: kappas.len(), kappas, bargmann_bound })
}

fn refine_zero<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0;
    for _ in 0..200 {
        if b - a <= 1e-14 * b.abs() {
            break;
        }
        let mut c = b - fb * (b - a) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

fn bargmann_integral(pot: &PotentialSpec) -> Result<f64> {
    let end = match pot.support_end() {
        Some(e) => e,
        None => {
            let mut x = 1.0;
            while pot.tail_moment(x) > 1e-12 {
                x *= 1.25;
                if x > 1e5 {
                    return Err(Error::Truncation { radius: x, tail: pot.tail_moment(x) });
                }
            }
            x
        }
    };
    let mut cuts: Vec<f64> = pot.breakpoints().into_iter().filter(|b| *b > 0.0 && *b < end).collect();
    cuts.push(end);
    let rule = GaussRule::new(10);
    let mut a = 0.0;
    let mut s = 0.0;
    for c in cuts {
        let panels = ((c - a) / 0.05).ceil().max(1.0) as usize;
        s += rule.integrate(|x| x * pot.q_decaying(x).abs(), a, c, panels);
        a = c;
    }
    Ok(s)
}

/// A phase-shift table δ(k) on increasing positive k.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
}

/// |f(k)| from (k^{-l}/C_l)·Π(1+κ_n²/k²)·exp(−PV∫ δ(t)/(t−k) dt/π), δ extended oddly.
pub fn reconstruct_jost(table: &PhaseTable, kappas: &[f64], l: AngularMomentum, ks: &[f64]) -> Result<Vec<f64>> {
    let spline = CubicSpline::new(&table.k, &table.delta)?;
    let (k_lo, k_hi) = spline.range();
    let delta = |t: f64| if t >= k_lo { spline.eval(t) } else { table.delta[0] };
    let rule = GaussRule::new(16);
    let c = coupling_constant(l);
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        if !(k > 0.0 && k < k_hi) {
            return Err(Error::Domain("reconstruction point outside the phase table"));
        }
        let dk = delta(k);
        // ∫_0^K 2tδ/(t²−k²) with the pole subtracted
        let g = |t: f64| (2.0 * t * delta(t) - 2.0 * k * dk) / (t * t - k * k);
        let mut pv = 0.0;
        let mut a = 0.0;
        for &b in &[0.5 * k, k, 1.5 * k, 2.0 * k] {
            if b > a && b <= k_hi {
                pv += rule.integrate(g, a, b, 8);
                a = b;
            }
        }
        let panels = ((k_hi - a) / k.max(0.5)).ceil().max(1.0) as usize;
        pv += rule.integrate(g, a, k_hi, panels);
        pv += dk * ((k_hi - k) / (k_hi + k)).ln();
        // tail with δ ~ c/t
        let cc = delta(k_hi) * k_hi;
        pv += cc / k * ((k_hi + k) / (k_hi - k)).ln();
        let blaschke: f64 = kappas.iter().map(|kap| 1.0 + kap * kap / (k * k)).product();
        out.push(k.powf(-l.value()) / c * blaschke * (-pv / PI).exp());
    }
    Ok(out)
}

/// Sup-differences between two potentials' spectral and scattering data.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub phase_diff: f64,
    pub eigenvalue_diff: f64,
    pub norming_diff: f64,
    pub density_diff: f64,
    pub potential_diff: f64,
    /// Set when the number of bound states differs.
    pub count_mismatch: bool,
}

impl UniquenessReport {
    pub fn data_differ(&self, tol: f64) -> bool {
        self.count_mismatch
            || self.phase_diff > tol
            || self.eigenvalue_diff > tol
            || self.norming_diff > tol
            || self.density_diff > tol
    }
}

pub fn uniqueness_compare(pot1: &PotentialSpec, pot2: &PotentialSpec, c: f64, ks: &[f64]) -> Result<UniquenessReport> {
    let d1 = phase_shift(pot1, ks)?;
    let d2 = phase_shift(pot2, ks)?;
    let phase_diff = d1.iter().zip(&d2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let lams: Vec<f64> = ks.iter().map(|k| k * k).collect();
    let r1 = spectral_density(pot1, &lams)?;
    let r2 = spectral_density(pot2, &lams)?;
    let density_diff = r1.iter().zip(&r2).map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-300)).fold(0.0, f64::max);
    let b1 = bound_states(pot1)?;
    let b2 = bound_states(pot2)?;
    let count_mismatch = b1.count != b2.count;
    let (mut eigenvalue_diff, mut norming_diff) = (0.0f64, 0.0f64);
    if !count_mismatch {
        for (k1, k2) in b1.kappas.iter().zip(&b2.kappas) {
            let (l1, l2) = (-k1 * k1, -k2 * k2);
            eigenvalue_diff = eigenvalue_diff.max((l1 - l2).abs());
            norming_diff = norming_diff.max((norming_constant(pot1, l1)? - norming_constant(pot2, l2)?).abs());
        }
    }
    let mut potential_diff = 0.0f64;
    for i in 1..=2000 {
        let x = c * i as f64 / 2001.0;
        potential_diff = potential_diff.max((pot1.q(x) - pot2.q(x)).abs());
    }
    Ok(UniquenessReport { phase_diff, eigenvalue_diff, norming_diff, density_diff, potential_diff, count_mismatch })
}
