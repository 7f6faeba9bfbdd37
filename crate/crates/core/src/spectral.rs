//! Weyl m-function, spectral density and function, eigenvalues and norming constants.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{apply, build_mesh, propagate, Mat, Scaled, Stepper};
use crate::potential::PotentialSpec;
use crate::quad::{cumulative_log, power_head, rem_pos, GaussRule};
use crate::scattering::jost_function;
use crate::solutions::{
    bessel_coef, jost_at, origin_radius, origin_solution, solution_at, step_bound, theta_free_start_at, Start,
};
use crate::specfun::{model_density, model_m, ComplexEnergy};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Which construction produced an m-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MRoute {
    /// −g/f from the Jost solution (half-line).
    Jost,
    /// −1/M from the Krein string (interval, l < 1/2).
    String,
    /// −θ/φ boundary ratio at the right endpoint.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MSample {
    pub z: C64,
    pub m: C64,
    pub route: MRoute,
    /// Describes the real-entire term by which m is undetermined.
    pub ambiguity_note: &'static str,
}

const NOTE_ITERATED: &str = "theta from Volterra iteration; m fixed up to a real entire g(z)";
const NOTE_FREE_START: &str = "theta from free data near 0; m fixed up to a real entire g(z) that may depend on the start radius";
const NOTE_STRING: &str = "string route; differs from the iterated-theta m by a real entire term";

/// Boundary form cos β · y − sin β · y′.
pub(crate) fn bc_form(beta: f64, y: C64, dy: C64) -> C64 {
    y * beta.cos() - dy * beta.sin()
}

/// θ at increasing points, iterated when possible.
pub(crate) fn theta_states(pot: &PotentialSpec, e: ComplexEnergy, xs: &[f64]) -> Result<(Vec<Scaled<2>>, &'static str)> {
    if pot.theta_iterable() {
        Ok((solution_at(pot, e, Start::Theta, xs)?, NOTE_ITERATED))
    } else {
        Ok((theta_free_start_at(pot, e, xs)?, NOTE_FREE_START))
    }
}

/// Singular Weyl function. Interval problems use the truncated route with
/// boundary angle `beta` at b; half-line problems use the Jost route.
pub fn weyl_m(pot: &PotentialSpec, z: C64, beta: f64) -> Result<MSample> {
    match pot.cutoff {
        Some(_) => weyl_m_route(pot, z, MRoute::Truncated, beta),
        None => weyl_m_route(pot, z, MRoute::Jost, beta),
    }
}

pub fn weyl_m_route(pot: &PotentialSpec, z: C64, route: MRoute, beta: f64) -> Result<MSample> {
    if z.im == 0.0 && route != MRoute::Jost {
        return Err(Error::Domain("m is evaluated off the real axis"));
    }
    let e = ComplexEnergy::from_z(z);
    match route {
        MRoute::Truncated => {
            let b = pot.cutoff.ok_or(Error::RouteUnavailable("truncated route needs a finite right endpoint"))?;
            let phi = solution_at(pot, e, Start::Regular, &[b])?;
            let (theta, note) = theta_states(pot, e, &[b])?;
            let num = bc_form(beta, theta[0].y[0], theta[0].y[1]);
            let den = bc_form(beta, phi[0].y[0], phi[0].y[1]);
            let m = -num / den * (theta[0].scale - phi[0].scale).exp();
            Ok(MSample { z, m, route, ambiguity_note: note })
        }
        MRoute::Jost => {
            if pot.cutoff.is_some() {
                return Err(Error::RouteUnavailable("Jost route needs the half-line"));
            }
            if z.im == 0.0 && z.re >= 0.0 {
                return Err(Error::Branch("m is cut along the positive axis"));
            }
            let j = jost_function(pot, e.k)?;
            let g = j.g.ok_or(Error::RouteUnavailable("theta unavailable"))?;
            Ok(MSample { z, m: -g / j.f, route, ambiguity_note: j.note })
        }
        MRoute::String => {
            let b = pot.cutoff.ok_or(Error::RouteUnavailable("string route needs a finite right endpoint"))?;
            if !pot.l.limit_circle() {
                return Err(Error::RouteUnavailable("string route needs l < 1/2"));
            }
            let sm = crate::krein::liouville_transform_on(pot, b, beta, None)?;
            let m_string = crate::krein::string_m(&sm, z)?;
            // m = −1/M − W(θ,θ₀)/W(φ,θ₀); the ratio does not depend on z, so take it at λ₀
            let t0 = sm.theta0().ok_or(Error::RouteUnavailable("needs a Liouville string"))?;
            let e0 = ComplexEnergy::real(t0.lambda0);
            let (a, da) = t0.eval(b);
            let phi = solution_at(pot, e0, Start::Regular, &[b])?[0].value();
            let (theta, _) = theta_states(pot, e0, &[b])?;
            let th = theta[0].value();
            let shift = (th[0] * da - th[1] * a) / (phi[0] * da - phi[1] * a);
            Ok(MSample { z, m: -1.0 / m_string - shift.re, route, ambiguity_note: NOTE_STRING })
        }
    }
}

/// dρ/dλ = √λ / (π |f(√λ)|²) for λ > 0 (half-line).
pub fn spectral_density(pot: &PotentialSpec, lambdas: &[f64]) -> Result<Vec<f64>> {
    if pot.cutoff.is_some() {
        return Err(Error::RouteUnavailable("the interval problem has no continuous spectrum"));
    }
    lambdas
        .iter()
        .map(|&lam| {
            if !(lam > 0.0) {
                return Err(Error::Domain("density needs lambda > 0"));
            }
            let k = lam.sqrt();
            let f = jost_function(pot, C64::new(k, 0.0))?.f;
            Ok(k / (PI * f.norm_sqr()))
        })
        .collect()
}

/// Prüfer angle atan2(φ, φ′) at `b`, continued from the origin.
fn prufer_angle(pot: &PotentialSpec, lambda: f64, b: f64) -> Result<f64> {
    let e = ComplexEnergy::real(lambda);
    let x0 = origin_radius(pot, e, b);
    let origin = origin_solution(pot, e, Start::Regular, x0, 0.02)?;
    let (xs, y) = origin.end();
    let mut stops = pot.breakpoints();
    stops.push(b);
    let mesh = build_mesh(xs, b, &stops, |x| step_bound(pot, e.z, x));
    let coef = bessel_coef(pot, e.z);
    let mut stepper = Stepper::<2>::new();
    let mut cur = y;
    let mut angle = cur.y[0].re.atan2(cur.y[1].re);
    for w in mesh.windows(2) {
        let t = stepper.step(&coef, w[0], w[1] - w[0]).ok_or(Error::NonConvergence { what: "collocation step", sweeps: 1 })?;
        cur.y = apply(&t, &cur.y);
        cur.renormalize();
        let a = cur.y[0].re.atan2(cur.y[1].re);
        angle += rem_pos(a - angle + PI, 2.0 * PI) - PI;
    }
    Ok(angle)
}

/// Angle of the Jost solution at x, reduced to [0, π).
fn jost_angle(pot: &PotentialSpec, kappa: f64, x: f64) -> Result<f64> {
    let f = jost_at(pot, C64::new(0.0, kappa), &[x])?[0];
    // f(iκ,·) is real up to a constant phase
    let (u, du) = if f.y[0].norm() > 1e-300 {
        let ph = f.y[0].conj() / f.y[0].norm();
        ((f.y[0] * ph).re, (f.y[1] * ph).re)
    } else {
        let ph = f.y[1].conj() / f.y[1].norm();
        ((f.y[0] * ph).re, (f.y[1] * ph).re)
    };
    Ok(rem_pos(u.atan2(du), PI))
}

/// Matching point for half-line shooting.
fn matching_point(pot: &PotentialSpec) -> f64 {
    match pot.support_end() {
        Some(e) if e > 0.0 => e,
        _ => 1.0,
    }
}

/// Eigenvalue counting function, continuous in λ: the n-th eigenvalue solves `shoot = n − 1`.
fn counting(pot: &PotentialSpec, lambda: f64, beta: f64) -> Result<f64> {
    match pot.cutoff {
        Some(b) => {
            let th = prufer_angle(pot, lambda, b)?;
            // targets: nπ (β = 0) or β + (n−1)π
            Ok(if beta == 0.0 { th / PI - 1.0 } else { (th - beta) / PI })
        }
        None => {
            if lambda >= 0.0 {
                return Err(Error::Domain("half-line shooting needs lambda < 0"));
            }
            let xm = matching_point(pot);
            let th = prufer_angle(pot, lambda, xm)?;
            let tf = jost_angle(pot, (-lambda).sqrt(), xm)?;
            Ok((th - tf) / PI)
        }
    }
}

fn count_below(s: f64) -> usize {
    if s < 0.0 {
        0
    } else {
        s.floor() as usize + 1
    }
}

/// Eigenvalues in `window`. Interval problems take the boundary angle `beta` at b;
/// on the half-line only bound states below zero are returned.
pub fn eigenvalues(pot: &PotentialSpec, beta: f64, window: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, mut hi) = window;
    if !(lo < hi) || !(0.0..PI).contains(&beta) {
        return Err(Error::InvalidInput("need window lo < hi and beta in [0, pi)"));
    }
    if pot.cutoff.is_none() {
        hi = hi.min(-1e-6);
        if lo >= hi {
            return Ok(Vec::new());
        }
    }
    let s_lo = counting(pot, lo, beta)?;
    let s_hi = counting(pot, hi, beta)?;
    let (n_lo, n_hi) = (count_below(s_lo), count_below(s_hi));
    let mut out = Vec::with_capacity(n_hi.saturating_sub(n_lo));
    let mut left = (lo, s_lo);
    for n in n_lo + 1..=n_hi {
        let target = (n - 1) as f64;
        let lam = solve_monotone(|l| counting(pot, l, beta), target, left, (hi, s_hi))?;
        if let Some(&prev) = out.last() {
            if lam <= prev {
                return Err(Error::WindowTooCoarse);
            }
        }
        out.push(lam);
        left = (lam, target);
    }
    Ok(out)
}

/// Root of s(λ) = target for increasing s, bracketed; Illinois steps with bisection safeguard.
fn solve_monotone<F: Fn(f64) -> Result<f64>>(s: F, target: f64, lo: (f64, f64), hi: (f64, f64)) -> Result<f64> {
    let (mut a, mut fa) = (lo.0, lo.1 - target);
    let (mut b, mut fb) = (hi.0, hi.1 - target);
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::WindowTooCoarse);
    }
    let mut side = 0;
    for it in 0..200 {
        let tol = 1e-13 * a.abs().max(b.abs()).max(1.0);
        if b - a <= tol {
            return Ok(0.5 * (a + b));
        }
        let mut c = if it % 4 == 3 { 0.5 * (a + b) } else { b - fb * (b - a) / (fb - fa) };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = s(c)? - target;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc < 0.0 {
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
        if (b - a) <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
            return Ok(if fc.abs() < 1e-9 { c } else { 0.5 * (a + b) });
        }
    }
    Err(Error::NonConvergence { what: "eigenvalue bracket", sweeps: 200 })
}

/// ∫_0^{x_end} φ(λ)² via ∂_λφ: d/dx(φ_λ φ′ − φ φ_λ′) = φ².
fn phi_square_integral(pot: &PotentialSpec, lambda: f64, x_end: f64) -> Result<(f64, Scaled<2>)> {
    let e = ComplexEnergy::real(lambda);
    let x0 = origin_radius(pot, e, x_end);
    let origin = origin_solution(pot, e, Start::Regular, x0, 0.02)?;
    let n = origin.xs.len();
    let dt = (origin.xs[1] / origin.xs[0]).ln();
    let g: Vec<C64> = (0..n).map(|i| origin.ys[i] * origin.ys[i] * origin.xs[i]).collect();
    let mut cum = Vec::new();
    cumulative_log(dt, &g, &mut cum);
    let head = power_head(origin.xs[0], g[0] / origin.xs[0], origin.xs[1], g[1] / origin.xs[1])?;
    let inner = (cum[n - 1] + head).re;
    let bc = bessel_coef(pot, e.z);
    let coef = |x: f64| -> Mat<4> {
        let q = bc(x)[1][0];
        let o = ZERO;
        let one = C64::new(1.0, 0.0);
        [[o, one, o, o], [q, o, o, o], [o, o, o, one], [-one, o, q, o]]
    };
    let mut stops = pot.breakpoints();
    stops.push(x_end);
    let mesh = build_mesh(x0, x_end, &stops, |x| step_bound(pot, e.z, x));
    let y0 = Scaled::new([origin.ys[n - 1], origin.dys[n - 1], ZERO, ZERO]);
    let states = propagate(&coef, y0, &mesh).ok_or(Error::NonConvergence { what: "collocation step", sweeps: 1 })?;
    let last = states[states.len() - 1];
    let w = (last.y[2] * last.y[1] - last.y[0] * last.y[3]).re;
    let total = inner + w * (2.0 * last.scale).exp();
    let mut end = Scaled::new([last.y[0], last.y[1]]);
    end.scale += last.scale;
    Ok((total, end))
}

/// ∫_x^∞ f(iκ,·)² with f made real, sampled by Gauss panels.
fn jost_square_tail(pot: &PotentialSpec, kappa: f64, x: f64) -> Result<(f64, Scaled<2>)> {
    let rule = GaussRule::new(12);
    let width = (0.5f64).min(1.0 / kappa);
    let end = x + 60.0 / kappa;
    let panels = ((end - x) / width).ceil() as usize;
    let h = (end - x) / panels as f64;
    let mut pts = Vec::with_capacity(panels * 12 + 1);
    let mut wts = Vec::with_capacity(panels * 12);
    pts.push(x);
    for p in 0..panels {
        let a = x + p as f64 * h;
        for (t, w) in rule.mapped(a, a + h) {
            pts.push(t);
            wts.push(w);
        }
    }
    let states = jost_at(pot, C64::new(0.0, kappa), &pts)?;
    let at_x = states[0];
    // phase from whichever component is not near a node
    let ph = if at_x.y[0].norm() * kappa.max(1.0) >= 1e-3 * at_x.y[1].norm() {
        at_x.y[0].conj() / at_x.y[0].norm()
    } else {
        at_x.y[1].conj() / at_x.y[1].norm()
    };
    let mut s = 0.0;
    for (st, w) in states[1..].iter().zip(&wts) {
        let v = (st.y[0] * ph).re * (st.scale - at_x.scale).exp();
        s += w * v * v;
    }
    // s is ∫ f² in units of the mantissa at x
    Ok((s, Scaled { y: [at_x.y[0] * ph, at_x.y[1] * ph], scale: 0.0 }))
}

/// γ_n = 1/∫ φ(λ_n)² (half-line tails matched to the Jost solution).
pub fn norming_constant(pot: &PotentialSpec, lambda: f64) -> Result<f64> {
    let gamma = match pot.cutoff {
        Some(b) => 1.0 / phi_square_integral(pot, lambda, b)?.0,
        None => {
            if !(lambda < 0.0) {
                return Err(Error::Domain("half-line norming constants need lambda < 0"));
            }
            let xm = matching_point(pot);
            let (inner, end) = phi_square_integral(pot, lambda, xm)?;
            let (tail, f) = jost_square_tail(pot, (-lambda).sqrt(), xm)?;
            // φ = c f beyond the matching point; c from values (or slopes near a node)
            let phi_x = end.y[0].re * end.scale.exp();
            let dphi_x = end.y[1].re * end.scale.exp();
            let c2 = if f.y[0].norm() >= f.y[1].norm() * 1e-3 {
                (phi_x / f.y[0].re).powi(2)
            } else {
                (dphi_x / f.y[1].re).powi(2)
            };
            if !tail.is_finite() {
                return Err(Error::Quadrature("tail of phi^2 not finite"));
            }
            1.0 / (inner + c2 * tail)
        }
    };
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Quadrature("norming integral not positive"));
    }
    Ok(gamma)
}

/// Residue of the Jost-route m at a bound state, by a contour average; equals −γ_n.
pub fn m_residue(pot: &PotentialSpec, lambda: f64, radius: f64) -> Result<f64> {
    let n = 32;
    let mut s = ZERO;
    for j in 0..n {
        let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let dz = C64::from_polar(radius, t);
        let m = weyl_m_route(pot, lambda + dz, MRoute::Jost, 0.0)?.m;
        s += m * dz;
    }
    Ok((s / n as f64).re)
}

/// Density table, point masses and the integrated spectral function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// (λ, dρ/dλ) on (0, ∞).
    pub density: Vec<(f64, f64)>,
    pub eigenvalues: Vec<f64>,
    pub norming: Vec<f64>,
}

impl SpectralData {
    /// Gathers eigenvalues in `window`, their norming constants and the density on `lambdas`.
    pub fn compute(pot: &PotentialSpec, beta: f64, window: (f64, f64), lambdas: &[f64]) -> Result<Self> {
        let eigenvalues = eigenvalues(pot, beta, window)?;
        let norming = eigenvalues.iter().map(|&l| norming_constant(pot, l)).collect::<Result<Vec<_>>>()?;
        let density = if pot.cutoff.is_none() && !lambdas.is_empty() {
            lambdas.iter().copied().zip(spectral_density(pot, lambdas)?).collect()
        } else {
            Vec::new()
        };
        Ok(Self { density, eigenvalues, norming })
    }
}

/// ρ(λ) with ρ(0) = 0 and the midpoint convention at jumps.
pub fn spectral_function(pot: &PotentialSpec, lambda: f64, beta: f64) -> Result<f64> {
    let jump = |l: f64, g: f64| -> f64 {
        if l == lambda {
            0.5 * g
        } else {
            g
        }
    };
    let mut rho = 0.0;
    match pot.cutoff {
        Some(_) => {
            let (a, b) = if lambda >= 0.0 { (0.0, lambda) } else { (lambda, 0.0) };
            let lo_window = a.min(-1.0) - 1.0;
            let eig = eigenvalues(pot, beta, (lo_window.min(a - 1.0), b + 1e-9 * b.abs().max(1.0)))?;
            for &l in &eig {
                let inside = if lambda >= 0.0 { l > 0.0 && l <= lambda } else { l >= lambda && l <= 0.0 };
                if inside {
                    let g = norming_constant(pot, l)?;
                    rho += jump(l, g) * if lambda >= 0.0 { 1.0 } else { -1.0 };
                }
            }
        }
        None => {
            if lambda < 0.0 {
                let depth = bound_window(pot);
                for l in eigenvalues(pot, 0.0, (depth, -1e-6))? {
                    if l >= lambda {
                        rho -= jump(l, norming_constant(pot, l)?);
                    }
                }
            } else if lambda > 0.0 {
                // ∫_0^λ density, substitution λ = k² removes the endpoint singularity
                let rule = GaussRule::new(10);
                let kmax = lambda.sqrt();
                let panels = (kmax * 2.0).ceil().max(2.0) as usize;
                let mut err = None;
                let v = rule.integrate(
                    |k| match jost_function(pot, C64::new(k, 0.0)) {
                        Ok(j) => 2.0 * k * k / (PI * j.f.norm_sqr()),
                        Err(e) => {
                            err = Some(e);
                            0.0
                        }
                    },
                    0.0,
                    kmax,
                    panels,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                rho = v;
            }
        }
    }
    Ok(rho)
}

/// Lower end of the bound-state search: below the most negative potential value.
pub(crate) fn bound_window(pot: &PotentialSpec) -> f64 {
    let mut qmin: f64 = 0.0;
    let end = pot.support_end().unwrap_or(20.0).max(1.0);
    for i in 1..=4000 {
        let x = end * i as f64 / 4000.0;
        qmin = qmin.min(pot.q_tilde(x));
    }
    for x in pot.breakpoints() {
        qmin = qmin.min(pot.q_tilde(x)).min(pot.q_tilde(x * (1.0 - 1e-9)));
    }
    qmin - 1.0
}

/// One row of the asymptotics report along z = r e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub r: f64,
    pub z: C64,
    pub m: C64,
    pub m_model: C64,
    /// Im m / Im m_l.
    pub im_ratio: f64,
    /// density(r) / ρ_l′(r), half-line only.
    pub density_ratio: Option<f64>,
}

/// Ratios against the model m_l and ρ_l′. `warning` is set when κ_l ≥ 1.
pub fn asymptotics_report(pot: &PotentialSpec, angle: f64, magnitudes: &[f64], beta: f64) -> Result<(Vec<AsymptoticRow>, Option<&'static str>)> {
    let warning = if pot.l.kappa() >= 1 {
        Some("kappa_l >= 1: an additive real polynomial may contaminate real parts")
    } else {
        None
    };
    let mut rows = Vec::with_capacity(magnitudes.len());
    for &r in magnitudes {
        let z = C64::from_polar(r, angle);
        let m = weyl_m(pot, z, beta)?.m;
        let ml = model_m(pot.l, z)?;
        let density_ratio = if pot.cutoff.is_none() {
            let d = spectral_density(pot, &[r])?[0];
            Some(d / model_density(pot.l, r))
        } else {
            None
        };
        rows.push(AsymptoticRow { r, z, m, m_model: ml, im_ratio: m.im / ml.im, density_ratio });
    }
    Ok((rows, warning))
}

#[cfg(test)]
mod tests;
