//! Liouville transform onto a Krein string, string solutions and m-function,
//! limit orders and the one-term (Bennewitz) asymptotics.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{build_mesh, propagate, Mat, Scaled};
use crate::potential::PotentialSpec;
use crate::quad::{cumulative_log, power_head, rem_pos, CubicSpline, GaussRule};
use crate::solutions::{origin_radius, origin_solution, shoot, solution_at, step_bound, Start};
use crate::spectral::bc_form;
use crate::specfun::{coupling_constant, gamma_real, lambert_w_m1, AngularMomentum, ComplexEnergy};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
/// Smallest x kept in the θ₀ table, relative to b.
const THETA0_FLOOR: f64 = 1e-16;
/// First-order string Picard is used while its correction stays below this.
const STRING_HEAD_TOL: f64 = 1e-7;

/// θ(λ₀,·) positive on (0, b], tabulated for quintic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct Theta0 {
    pub lambda0: f64,
    l: f64,
    xs: Vec<f64>,
    th: Vec<f64>,
    dth: Vec<f64>,
    // one-sided second derivatives on each interval
    d2l: Vec<f64>,
    d2r: Vec<f64>,
    // θ₀ ≈ A x^{-l} + B x^{l+1} (or √x (A log x + B) at l = −1/2) below the table
    head: (f64, f64),
}

impl Theta0 {
    fn build(pot: &PotentialSpec, b: f64, lambda0: f64) -> Result<Self> {
        let l = pot.l.value();
        let ll = l * (l + 1.0);
        let e0 = ComplexEnergy::real(lambda0);
        // θ(λ₀,·) itself when it can be iterated; otherwise the reduction-of-order
        // solution vanishing at b + 1. Both are shot inward, where θ dominates.
        let (x1, y0) = if pot.theta_iterable() {
            let t = solution_at(pot, e0, Start::Theta, &[b])?[0].value();
            (b, Scaled::new([C64::new(t[0].re, 0.0), C64::new(t[1].re, 0.0)]))
        } else {
            let x1 = b + 1.0;
            let phi1 = solution_at(pot, e0, Start::Regular, &[x1])?[0].value();
            if !(phi1[0].re.abs() > 1e-200) {
                return Err(Error::Positivity { x: x1 });
            }
            (x1, Scaled::new([ZERO, C64::new(-1.0 / phi1[0].re, 0.0)]))
        };
        let x_s = THETA0_FLOOR * b;
        let mut stops = pot.breakpoints();
        stops.push(b);
        stops.push(x_s);
        let mesh = build_mesh(x1, x_s, &stops, |x| step_bound(pot, e0.z, x).min(0.05 * x));
        let coef = crate::solutions::bessel_coef(pot, e0.z);
        let states = propagate(&coef, y0, &mesh).ok_or(Error::NonConvergence { what: "collocation step", sweeps: 1 })?;
        let n = mesh.len();
        let mut xs = Vec::with_capacity(n);
        let mut th = Vec::with_capacity(n);
        let mut dth = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let v = states[i].value();
            xs.push(mesh[i]);
            th.push(v[0].re);
            dth.push(v[1].re);
        }
        for (x, t) in xs.iter().zip(&th) {
            if *x <= b && !(*t > 0.0) {
                return Err(Error::Positivity { x: *x });
            }
        }
        let qq = |x: f64| ll / (x * x) + pot.q(x) - lambda0;
        let mut d2l = Vec::with_capacity(n - 1);
        let mut d2r = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let h = xs[i + 1] - xs[i];
            d2l.push(qq(xs[i] + 1e-9 * h) * th[i]);
            d2r.push(qq(xs[i + 1] - 1e-9 * h) * th[i + 1]);
        }
        let (x, t, d) = (xs[0], th[0], dth[0]);
        let head = if pot.l.limit_circle() && l == -0.5 {
            // t = √x (A log x + B), d = t/(2x) + A/√x
            let a = (d - t / (2.0 * x)) * x.sqrt();
            (a, t / x.sqrt() - a * x.ln())
        } else {
            // A x^{-l} + B x^{l+1}
            let det = (2.0 * l + 1.0) * x.powf(-1.0);
            let a = (t * (l + 1.0) / x - d) / det * x.powf(l);
            let bb = (d + l * t / x) / det * x.powf(-l - 1.0);
            (a, bb)
        };
        Ok(Self { lambda0, l, xs, th, dth, d2l, d2r, head })
    }

    fn locate(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// θ₀(x) and θ₀′(x).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if x < self.xs[0] {
            let (a, b) = self.head;
            return if self.l == -0.5 {
                let s = x.sqrt();
                let v = s * (a * x.ln() + b);
                (v, v / (2.0 * x) + a / s)
            } else {
                let l = self.l;
                (a * x.powf(-l) + b * x.powf(l + 1.0), -l * a * x.powf(-l - 1.0) + (l + 1.0) * b * x.powf(l))
            };
        }
        let i = self.locate(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
        let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let g2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let g3 = -g0;
        let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let g5 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let (f0, f1) = (self.th[i], self.th[i + 1]);
        let (d0, d1) = (self.dth[i] * h, self.dth[i + 1] * h);
        let (s0, s1) = (self.d2l[i] * h * h, self.d2r[i] * h * h);
        let v = f0 * h0 + d0 * h1 + s0 * h2 + f1 * h3 + d1 * h4 + s1 * h5;
        let dv = (f0 * g0 + d0 * g1 + s0 * g2 + f1 * g3 + d1 * g4 + s1 * g5) / h;
        (v, dv)
    }
}

/// The string weight, expressed in a parameter x with u′ = w₁ v, v′ = −z w₂ u.
#[derive(Debug, Clone)]
pub enum StringWeight {
    /// From the Liouville transform: ξ′(x) = θ₀⁻², w₁ = θ₀⁻², w₂ = θ₀².
    Liouville(Theta0),
    /// R(ξ) = ξ^α, parametrized by ξ itself.
    Power { alpha: f64 },
}

/// A Krein string −(1/r) d²/dξ² on (0, a) with Neumann condition at 0.
#[derive(Debug, Clone)]
pub struct StringModel {
    /// Right endpoint in ξ.
    pub a: f64,
    /// Right endpoint in the parameter x.
    pub x_end: f64,
    pub beta_tilde: f64,
    pub weight: StringWeight,
    // cumulative tables on the parameter nodes: ξ, R = ∫w₂, ∫ξ w₂, ∫ξ² w₂
    nodes: Vec<f64>,
    xi: Vec<f64>,
    big_r: Vec<f64>,
    mom1: Vec<f64>,
    mom2: Vec<f64>,
    breaks: Vec<f64>,
}

/// Liouville transform of the problem on (0, b) with boundary angle β at b,
/// b being the cutoff of `pot` (1 when there is none).
pub fn liouville_transform(pot: &PotentialSpec, beta: f64, lambda0: Option<f64>) -> Result<StringModel> {
    liouville_transform_on(pot, pot.cutoff.unwrap_or(1.0), beta, lambda0)
}

pub(crate) fn liouville_transform_on(pot: &PotentialSpec, b: f64, beta: f64, lambda0: Option<f64>) -> Result<StringModel> {
    if !pot.l.limit_circle() {
        return Err(Error::Domain("the Liouville transform needs l in [-1/2, 1/2)"));
    }
    if !pot.hyp12() {
        return Err(Error::Integrability("x q(x) must be integrable near 0"));
    }
    let theta0 = match lambda0 {
        Some(l0) => Theta0::build(pot, b, l0)?,
        None => {
            let mut l0 = -1.0;
            let mut tries = 0;
            loop {
                match Theta0::build(pot, b, l0) {
                    Ok(t) => break t,
                    Err(Error::Positivity { .. }) if tries < 30 => {
                        l0 = 4.0 * l0 - 1.0;
                        tries += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    };
    let (t1, d1) = theta0.eval(b);
    // boundary map: cot β̃ = θ₀(b)² cot β − θ₀(b) θ₀′(b)
    let beta_tilde = rem_pos(beta.sin().atan2(t1 * t1 * beta.cos() - t1 * d1 * beta.sin()), PI);
    let mut breaks: Vec<f64> = pot.breakpoints().into_iter().filter(|x| *x < b).collect();
    breaks.push(b);
    let nodes: Vec<f64> = theta0.xs.iter().copied().filter(|x| *x <= b).collect();
    StringModel::tabulate(StringWeight::Liouville(theta0), nodes, beta_tilde, breaks)
}

impl StringModel {
    /// Exact power string R(ξ) = ξ^α on (0, a); α = 1 is the homogeneous string r ≡ 1.
    pub fn power(alpha: f64, a: f64, beta_tilde: f64) -> Result<Self> {
        if !(alpha > 0.0 && a > 0.0) {
            return Err(Error::InvalidInput("power string needs alpha > 0 and a > 0"));
        }
        let nodes = crate::quad::log_grid(a * 1e-16, a, 0.05);
        Self::tabulate(StringWeight::Power { alpha }, nodes, beta_tilde, alloc::vec![a])
    }

    fn tabulate(weight: StringWeight, nodes: Vec<f64>, beta_tilde: f64, breaks: Vec<f64>) -> Result<Self> {
        let x_end = *breaks.last().unwrap();
        let mut nodes = nodes;
        if *nodes.last().unwrap() < x_end {
            nodes.push(x_end);
        }
        let n = nodes.len();
        let mut sm = Self {
            a: 0.0,
            x_end,
            beta_tilde,
            weight,
            nodes,
            xi: Vec::with_capacity(n),
            big_r: Vec::with_capacity(n),
            mom1: Vec::with_capacity(n),
            mom2: Vec::with_capacity(n),
            breaks,
        };
        let x0 = sm.nodes[0];
        let (w1, w2) = sm.weights(x0);
        let (xi0, r0, m10, m20) = match &sm.weight {
            StringWeight::Power { alpha } => {
                let al = *alpha;
                (x0, x0.powf(al), al * x0.powf(al + 1.0) / (al + 1.0), al * x0.powf(al + 2.0) / (al + 2.0))
            }
            StringWeight::Liouville(t) => {
                let l = t.l;
                let (th, _) = t.eval(x0);
                let xi = if l == -0.5 { -x0.sqrt() / (t.head.0 * th) } else { x0 / ((2.0 * l + 1.0) * th * th) };
                let _ = w1;
                (xi, x0 * w2 / (1.0 - 2.0 * l), 0.5 * x0 * xi * w2, x0 * xi * xi * w2 / (2.0 * l + 3.0))
            }
        };
        sm.xi.push(xi0);
        sm.big_r.push(r0);
        sm.mom1.push(m10);
        sm.mom2.push(m20);
        let rule = GaussRule::new(8);
        for i in 0..n - 1 {
            let (a, b) = (sm.nodes[i], sm.nodes[i + 1]);
            let xi_a = sm.xi[i];
            let (mut dxi, mut dr, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
            for (t, w) in rule.mapped(a, b) {
                let (w1t, w2t) = sm.weights(t);
                let xit = xi_a + rule.integrate(|s| sm.weights(s).0, a, t, 1);
                dxi += w * w1t;
                dr += w * w2t;
                d1 += w * xit * w2t;
                d2 += w * xit * xit * w2t;
            }
            sm.xi.push(xi_a + dxi);
            sm.big_r.push(sm.big_r[i] + dr);
            sm.mom1.push(sm.mom1[i] + d1);
            sm.mom2.push(sm.mom2[i] + d2);
        }
        sm.a = sm.xi[n - 1];
        if let StringWeight::Power { .. } = sm.weight {
            sm.a = x_end;
        }
        Ok(sm)
    }

    /// (w₁, w₂) at parameter x.
    pub fn weights(&self, x: f64) -> (f64, f64) {
        match &self.weight {
            StringWeight::Liouville(t) => {
                let th = t.eval(x).0;
                (1.0 / (th * th), th * th)
            }
            StringWeight::Power { alpha } => (1.0, alpha * x.powf(alpha - 1.0)),
        }
    }

    pub fn theta0(&self) -> Option<&Theta0> {
        match &self.weight {
            StringWeight::Liouville(t) => Some(t),
            _ => None,
        }
    }

    fn locate(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// ξ(x), strictly increasing with ξ(0⁺) = 0.
    pub fn xi_of_x(&self, x: f64) -> f64 {
        if let StringWeight::Power { .. } = self.weight {
            return x;
        }
        if x <= self.nodes[0] {
            return self.xi[0] * (x / self.nodes[0]).powf(match &self.weight {
                StringWeight::Liouville(t) if t.l > -0.5 => 2.0 * t.l + 1.0,
                _ => 0.0,
            });
        }
        let i = self.locate(x);
        let rule = GaussRule::new(8);
        self.xi[i] + rule.integrate(|s| self.weights(s).0, self.nodes[i], x, 1)
    }

    /// Inverse of ξ(x) by bisection on the tabulated map.
    pub fn x_of_xi(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0 && xi <= self.a * (1.0 + 1e-12)) {
            return Err(Error::Domain("xi outside (0, a]"));
        }
        if let StringWeight::Power { .. } = self.weight {
            return Ok(xi);
        }
        let i = match self.xi.binary_search_by(|v| v.partial_cmp(&xi).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => return Ok(self.nodes[i]),
            Err(0) => {
                return Err(Error::Domain("xi below the tabulated range"));
            }
            Err(i) => i - 1,
        };
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[(i + 1).min(self.nodes.len() - 1)]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.xi_of_x(mid) < xi {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// r(ξ(x)) = w₂/w₁.
    pub fn r_at_x(&self, x: f64) -> f64 {
        let (w1, w2) = self.weights(x);
        w2 / w1
    }

    /// Mass function R(ξ(x)) = ∫₀^x w₂.
    pub fn mass_at_x(&self, x: f64) -> f64 {
        if let StringWeight::Power { alpha } = self.weight {
            return x.powf(alpha);
        }
        let i = self.locate(x);
        if x <= self.nodes[0] {
            return self.big_r[0] * x / self.nodes[0];
        }
        let rule = GaussRule::new(8);
        self.big_r[i] + rule.integrate(|s| self.weights(s).1, self.nodes[i], x, 1)
    }

    /// (ξ, ln R(ξ)) on the tabulated nodes.
    pub fn mass_samples(&self) -> Vec<(f64, f64)> {
        match self.weight {
            StringWeight::Power { alpha } => self.nodes.iter().map(|&x| (x, alpha * x.ln())).collect(),
            StringWeight::Liouville(_) => self.xi.iter().zip(&self.big_r).map(|(a, b)| (*a, b.ln())).collect(),
        }
    }

    /// Start of the collocation range: first-order Picard is exact to the tolerance below it.
    fn start_index(&self, z: C64) -> usize {
        let mut i = 0;
        while i + 1 < self.nodes.len() {
            let corr = z.norm() * (self.xi[i + 1] * self.big_r[i + 1] + self.mom1[i + 1]);
            if corr > STRING_HEAD_TOL {
                break;
            }
            i += 1;
        }
        i
    }

    fn step(&self, z: C64, x: f64) -> f64 {
        let (w1, w2) = self.weights(x);
        (0.05 * x).min(0.5 / (z.norm() * w1 * w2).sqrt().max(1e-300)).min(0.1)
    }

    /// Spectral shift: the transformed equation is −u″ = (z − λ₀) r u.
    pub fn shift(&self) -> f64 {
        self.theta0().map_or(0.0, |t| t.lambda0)
    }

    /// c and s (with ξ-derivatives) at increasing parameter points `xs`.
    pub fn solutions_at(&self, z: C64, xs: &[f64]) -> Result<StringSolutions> {
        let states = self.states_at(z, xs)?;
        let mut out = StringSolutions::default();
        for (&x, st) in xs.iter().zip(&states) {
            let v = st.value();
            out.xi.push(self.xi_of_x(x));
            out.c.push(v[0]);
            out.dc.push(v[1]);
            out.s.push(v[2]);
            out.ds.push(v[3]);
        }
        Ok(out)
    }

    fn states_at(&self, z: C64, xs: &[f64]) -> Result<Vec<Scaled<4>>> {
        let z = z - self.shift();
        let mut i0 = self.start_index(z);
        if let Some(&first) = xs.first() {
            while i0 > 0 && self.nodes[i0] > first {
                i0 -= 1;
            }
        }
        let x0 = self.nodes[i0];
        if xs.iter().any(|x| *x < x0 || *x > self.x_end * (1.0 + 1e-12)) {
            return Err(Error::Domain("string solution requested outside the integration range"));
        }
        let (xi, rr, m1, m2) = (self.xi[i0], self.big_r[i0], self.mom1[i0], self.mom2[i0]);
        let c0 = ONE - z * (xi * rr - m1);
        let dc0 = -z * rr;
        let s0 = C64::new(xi, 0.0) - z * (xi * m1 - m2);
        let ds0 = ONE - z * m1;
        let coef = |x: f64| -> Mat<4> {
            let (w1, w2) = self.weights(x);
            let a = C64::new(w1, 0.0);
            let b = -z * w2;
            [[ZERO, a, ZERO, ZERO], [b, ZERO, ZERO, ZERO], [ZERO, ZERO, ZERO, a], [ZERO, ZERO, b, ZERO]]
        };
        let mut stops = self.breaks.clone();
        stops.extend_from_slice(xs);
        let mesh = build_mesh(x0, self.x_end, &stops, |x| self.step(z, x));
        let states = propagate(&coef, Scaled::new([c0, dc0, s0, ds0]), &mesh).ok_or(Error::NonConvergence { what: "string collocation", sweeps: 1 })?;
        let mut out = Vec::with_capacity(xs.len());
        let mut j = 0;
        for &x in xs {
            while j < mesh.len() && mesh[j] < x {
                j += 1;
            }
            if j < mesh.len() && mesh[j] == x {
                out.push(states[j]);
            } else {
                return Err(Error::InvalidInput("string stops must be increasing"));
            }
        }
        Ok(out)
    }
}

/// Fundamental string solutions, with derivatives taken in ξ.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StringSolutions {
    pub xi: Vec<f64>,
    pub c: Vec<C64>,
    pub dc: Vec<C64>,
    pub s: Vec<C64>,
    pub ds: Vec<C64>,
}

/// M(z): s − M c satisfies the boundary condition β̃ at ξ = a.
pub fn string_m(sm: &StringModel, z: C64) -> Result<C64> {
    if z.im == 0.0 {
        return Err(Error::Domain("M is evaluated off the real axis"));
    }
    // c and s share one scale, so the mantissas suffice
    let st = sm.states_at(z, &[sm.x_end])?[0].y;
    let b = sm.beta_tilde;
    Ok(bc_form(b, st[2], st[3]) / bc_form(b, st[0], st[1]))
}

/// W(c, s) at ξ = a; equals 1.
pub fn string_wronskian(sm: &StringModel, z: C64) -> Result<C64> {
    let st = sm.states_at(z, &[sm.x_end])?[0];
    let y = st.y;
    Ok((y[0] * y[3] - y[1] * y[2]) * (2.0 * st.scale).exp())
}

/// Bessel-side data for the boundary condition induced by θ₀ at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselSide {
    pub m_tilde: C64,
    /// θ − cφ has vanishing Wronskian with θ₀ at 0.
    pub shift: C64,
    /// (θ − cφ)/θ₀ and φ/θ₀ at the requested points.
    pub c_like: Vec<C64>,
    pub s_like: Vec<C64>,
}

/// m̃(z) from the Bessel equation: φ − m̃ (θ − cφ) satisfies the condition β at b.
pub fn bessel_m_tilde(pot: &PotentialSpec, sm: &StringModel, beta: f64, z: C64, xs: &[f64]) -> Result<BesselSide> {
    let t0 = sm.theta0().ok_or(Error::RouteUnavailable("needs a Liouville string"))?;
    if z.im == 0.0 {
        return Err(Error::Domain("m is evaluated off the real axis"));
    }
    if !pot.theta_iterable() {
        return Err(Error::Condition("the Bessel-side m needs an iterable theta; use the string route"));
    }
    let b = sm.x_end;
    let e = ComplexEnergy::from_z(z);
    // W(·, θ₀) cancels to leading order near 0, so take x₀ on a θ₀ node rather than
    // between nodes where the interpolation error gets amplified
    let r0 = origin_radius(pot, e, xs.first().copied().unwrap_or(b).min(b));
    let x0 = t0.xs[t0.locate(r0)].min(r0);
    let dz = z - t0.lambda0;
    // W(y, θ₀)(0) = W(x₀) − (z − λ₀) ∫₀^{x₀} y θ₀
    let w_origin = |start: Start| -> Result<(C64, Scaled<2>)> {
        let o = origin_solution(pot, e, start, x0, 0.02)?;
        let n = o.xs.len();
        let dt = (o.xs[1] / o.xs[0]).ln();
        let g: Vec<C64> = (0..n).map(|i| o.ys[i] * t0.eval(o.xs[i]).0 * o.xs[i]).collect();
        let mut cum = Vec::new();
        cumulative_log(dt, &g, &mut cum);
        let head = power_head(o.xs[0], g[0] / o.xs[0], o.xs[1], g[1] / o.xs[1])?;
        let (th, dth) = t0.eval(x0);
        let w = o.ys[n - 1] * dth - o.dys[n - 1] * th;
        Ok((w - dz * (cum[n - 1] + head), o.end().1))
    };
    let (w_theta, th_start) = w_origin(Start::Theta)?;
    let (w_phi, ph_start) = w_origin(Start::Regular)?;
    let shift = w_theta / w_phi;
    let mut stops: Vec<f64> = xs.iter().copied().filter(|x| *x > x0).collect();
    stops.push(b);
    stops.dedup();
    let th = shoot(pot, z, (x0, th_start), &stops)?;
    let ph = shoot(pot, z, (x0, ph_start), &stops)?;
    let adj = |i: usize| -> (C64, C64) {
        let p = ph[i].value();
        let t = th[i].value();
        (t[0] - shift * p[0], t[1] - shift * p[1])
    };
    let last = stops.len() - 1;
    // m̃ = 1/(BC(θ)/BC(φ) − shift), the ratio formed from mantissas
    let (t, p) = (th[last], ph[last]);
    let ratio = bc_form(beta, t.y[0], t.y[1]) / bc_form(beta, p.y[0], p.y[1]) * (t.scale - p.scale).exp();
    let m_tilde = 1.0 / (ratio - shift);
    let mut c_like = Vec::with_capacity(xs.len());
    let mut s_like = Vec::with_capacity(xs.len());
    for &x in xs {
        let i = stops.iter().position(|s| *s == x).ok_or(Error::Domain("sample points must exceed the Volterra radius"))?;
        let th0 = t0.eval(x).0;
        c_like.push(adj(i).0 / th0);
        s_like.push(ph[i].value()[0] / th0);
    }
    Ok(BesselSide { m_tilde, shift, c_like, s_like })
}

/// Limit order of a mass function R near 0, estimated from (ξ, ln R) samples.
#[derive(Debug, Clone)]
pub struct LimitOrderData {
    /// `f64::INFINITY` for limit order ∞.
    pub alpha: f64,
    pub samples: Vec<(f64, f64)>,
    spline: CubicSpline,
}

impl LimitOrderData {
    /// ln R(ξ) by interpolation in ln ξ.
    pub fn log_r(&self, xi: f64) -> f64 {
        self.spline.eval(xi.ln())
    }

    /// F(ξ) = 1/(ξ R(ξ)), as a logarithm.
    pub fn log_big_f(&self, xi: f64) -> f64 {
        -xi.ln() - self.log_r(xi)
    }

    /// f = F⁻¹ at y.
    pub fn f_inv(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.spline.range();
        let target = y.ln();
        let g = |t: f64| -t - self.spline.eval(t) - target;
        if g(lo) < 0.0 || g(hi) > 0.0 {
            return Err(Error::Domain("y outside the tabulated range of F"));
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-15 {
                break;
            }
        }
        Ok((0.5 * (a + b)).exp())
    }
}

/// Estimates α from ln R(sx) − ln R(x) over s ∈ {2, 4, 8} at the small end of the window.
pub fn limit_order(samples: &[(f64, f64)]) -> Result<LimitOrderData> {
    if samples.len() < 8 {
        return Err(Error::InvalidInput("limit order needs at least 8 samples"));
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let spline = CubicSpline::new(&lx, &ly)?;
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    // window [1e-6, 1e-2] clipped to what the samples allow for s = 8
    let x_small = lo.max(1e-6);
    let x_large = (hi / 8.0).min(1e-2).max(x_small * 10.0);
    if x_large * 8.0 > hi * (1.0 + 1e-12) {
        return Err(Error::InvalidInput("samples do not span a decade below their top / 8"));
    }
    let est = |x: f64| -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, s) in [2.0f64, 4.0, 8.0].iter().enumerate() {
            out[j] = (spline.eval((s * x).ln()) - spline.eval(x.ln())) / s.ln();
        }
        out
    };
    let near = est(x_small);
    let far = est(x_large);
    let alpha = if near.iter().all(|a| *a > 20.0) && near.iter().zip(&far).all(|(n, f)| *n > 1.2 * f) {
        f64::INFINITY
    } else {
        let mean = near.iter().sum::<f64>() / 3.0;
        let spread = near.iter().fold(0.0f64, |m, a| m.max((a - mean).abs())) / mean.abs().max(1e-300);
        if spread > 0.1 {
            return Err(Error::Inconclusive { spread });
        }
        mean
    };
    Ok(LimitOrderData { alpha, samples: samples.to_vec(), spline })
}

/// K_ν = ν^{1−ν} Γ(ν) / ((1−ν)^ν Γ(1−ν)), with K₀ = K₁ = 1.
pub fn k_nu(nu: f64) -> f64 {
    if nu <= 0.0 || nu >= 1.0 {
        return 1.0;
    }
    let g = |x: f64| gamma_real(x).unwrap_or(f64::NAN);
    nu.powf(1.0 - nu) * g(nu) / ((1.0 - nu).powf(nu) * g(1.0 - nu))
}

/// A_α = (1−2l)(1+2l)^{(2l+3)/(2l+1)} for the free Bessel string.
pub fn a_alpha(l: f64) -> f64 {
    (1.0 - 2.0 * l) * (1.0 + 2.0 * l).powf((2.0 * l + 3.0) / (2.0 * l + 1.0))
}

/// α = (1−2l)/(1+2l).
pub fn bessel_alpha(l: f64) -> f64 {
    (1.0 - 2.0 * l) / (1.0 + 2.0 * l)
}

/// The three expressions of the constant identity: K_{l+1/2} A_α^{l+1/2},
/// 2^{2l}(2l+1)² Γ(1/2+l)/Γ(1/2−l) and sin(π(l+1/2))/C_l².
pub fn constant_identity(l: AngularMomentum) -> (f64, f64, f64) {
    let lv = l.value();
    let nu = lv + 0.5;
    let lhs = k_nu(nu) * a_alpha(lv).powf(nu);
    let mid = 2f64.powf(2.0 * lv) * (2.0 * lv + 1.0).powi(2) * gamma_real(0.5 + lv).unwrap_or(f64::NAN) / gamma_real(0.5 - lv).unwrap_or(f64::NAN);
    let c = coupling_constant(l);
    let rhs = (PI * nu).sin() / (c * c);
    (lhs, mid, rhs)
}

/// One-term prediction K_ν (−μ)^{−ν} f(ρ) for M(μρ).
pub fn bennewitz_asymptote(lod: &LimitOrderData, mu: C64, rho: f64) -> Result<C64> {
    if !(mu.im > 0.0) {
        return Err(Error::Domain("mu must lie in the upper half-plane"));
    }
    let nu = if lod.alpha.is_infinite() { 0.0 } else { 1.0 / (1.0 + lod.alpha) };
    let f = lod.f_inv(rho)?;
    Ok((-mu).powf(-nu) * k_nu(nu) * f)
}

/// G₀(x) = −1/log x.
pub fn critical_g0(x: f64) -> f64 {
    -1.0 / x.ln()
}

/// P₀(x) = (x²/2)(log²x − log x + 1/2).
pub fn critical_p0(x: f64) -> f64 {
    let l = x.ln();
    0.5 * x * x * (l * l - l + 0.5)
}

/// ln R₀(ξ) with R₀ = (2+2ξ+ξ²)/(4ξ² e^{2/ξ}).
pub fn critical_log_r0(xi: f64) -> f64 {
    (2.0 + 2.0 * xi + xi * xi).ln() - (4.0 * xi * xi).ln() - 2.0 / xi
}

/// ln R̃₀(ξ) with R̃₀ = 1/(2ξ² e^{2/ξ}).
pub fn critical_log_r0_tilde(xi: f64) -> f64 {
    -(2.0 * xi * xi).ln() - 2.0 / xi
}

/// f̃₀(y) = −2/W₋₁(−4/y), the inverse of 2ξ e^{2/ξ} on (0, 2).
pub fn critical_f0_tilde(y: f64) -> Result<f64> {
    if !(y > 4.0 * core::f64::consts::E) {
        return Err(Error::Domain("f0 needs y > 4e"));
    }
    Ok(-2.0 / lambert_w_m1(-4.0 / y)?)
}

/// Relative residual of −W₋₁(−1/x) ≈ log x + log log x.
pub fn lambert_expansion_residual(x: f64) -> Result<f64> {
    let w = -lambert_w_m1(-1.0 / x)?;
    let approx = x.ln() + x.ln().ln();
    Ok((w - approx).abs() / w)
}

#[cfg(test)]
mod tests;
