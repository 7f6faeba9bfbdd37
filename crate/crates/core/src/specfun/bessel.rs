//! Bessel, Neumann and Hankel functions of real order and complex argument.
//!
//! Power series for |w| <= 12, Hankel asymptotic expansion at the fractional
//! order and its successor beyond that, then upward recurrence in the order.
//! Arguments with negative real part are mapped to the right half-plane by
//! the analytic continuation formulas J(w e^{±iπ}) and Y(w e^{±iπ}).

use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use super::gamma::{digamma_int, gamma_real};
use crate::error::{Error, Result};

/// Radius below which the power series is used.
pub const SERIES_RADIUS: f64 = 12.0;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// J, Y and the first Hankel function at one order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselTrio {
    pub j: C64,
    pub y: C64,
    pub h1: C64,
}

fn is_integer(nu: f64) -> bool {
    (nu - nu.round()).abs() < 1e-12
}

fn parity(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Power series for J of any real order; negative integer orders use J_{-n} = (-1)^n J_n.
fn j_series(nu: f64, w: C64) -> C64 {
    if nu < 0.0 && is_integer(nu) {
        let n = (-nu).round();
        return parity(n as i64) * j_series(n, w);
    }
    if w == C64::new(0.0, 0.0) {
        return if nu == 0.0 {
            C64::new(1.0, 0.0)
        } else if nu > 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(f64::INFINITY, 0.0)
        };
    }
    let half = w * 0.5;
    let q = -half * half;
    let lead = if nu == 0.0 { C64::new(1.0, 0.0) } else { (half.ln() * nu).exp() };
    let mut term = C64::new(1.0 / gamma_real(nu + 1.0).unwrap_or(f64::INFINITY), 0.0);
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term = term * q / (kf * (kf + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && kf > 2.0 * q.norm().sqrt() {
            break;
        }
    }
    lead * sum
}

/// Power series for Y of nonnegative integer order.
fn y_integer_series(n: usize, w: C64) -> C64 {
    let half = w * 0.5;
    let ln_half = half.ln();
    let mut finite = C64::new(0.0, 0.0);
    let mut fact = vec_factorials(n + 1);
    for j in 0..n {
        let c = fact[n - j - 1] / fact[j];
        finite += half.powi(2 * j as i32 - n as i32) * c;
    }
    let jn = j_series(n as f64, w);
    let q = -half * half;
    let mut term = half.powi(n as i32) / fact[n];
    let mut tail = C64::new(0.0, 0.0);
    for k in 0..400usize {
        let coeff = digamma_int(k + 1) + digamma_int(n + k + 1);
        tail += term * coeff;
        let next = term * q / (((k + 1) * (n + k + 1)) as f64);
        if next.norm() <= 1e-18 * tail.norm() && (k as f64) > 2.0 * q.norm().sqrt() {
            break;
        }
        term = next;
    }
    fact.clear();
    (-finite + 2.0 * ln_half * jn - tail) / PI
}

fn vec_factorials(n: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec::Vec::with_capacity(n + 1);
    let mut f = 1.0;
    out.push(1.0);
    for j in 1..=n {
        f *= j as f64;
        out.push(f);
    }
    out
}

/// Hankel asymptotic expansion, returning (H1 e^{-iw}, H2 e^{iw}); needs Re w > 0, |w| large.
fn hankel_asymptotic_scaled(nu: f64, w: C64) -> (C64, C64) {
    let mu = 4.0 * nu * nu;
    let mut a = C64::new(1.0, 0.0);
    let mut s1 = a;
    let mut s2 = a;
    let mut ik = C64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a = a * (mu - odd * odd) / (8.0 * kf) / w;
        let mag = a.norm();
        if mag > prev {
            break;
        }
        ik *= I;
        s1 += a * ik;
        s2 += a * ik.conj();
        prev = mag;
        if mag < 1e-17 {
            break;
        }
    }
    let pref = (C64::new(2.0 / PI, 0.0) / w).sqrt();
    let phase = nu * PI / 2.0 + PI / 4.0;
    let e1 = C64::from_polar(1.0, -phase);
    (pref * e1 * s1, pref * e1.conj() * s2)
}

/// Scaled Hankel pair at order nu >= 0 for Re w >= 0, |w| > SERIES_RADIUS.
fn hankel_pair_scaled(nu: f64, w: C64) -> (C64, C64) {
    let base = nu - nu.floor();
    let steps = nu.floor() as usize;
    let (mut h1_prev, mut h2_prev) = hankel_asymptotic_scaled(base, w);
    if steps == 0 {
        return (h1_prev, h2_prev);
    }
    let (mut h1, mut h2) = hankel_asymptotic_scaled(base + 1.0, w);
    for s in 1..steps {
        let order = base + s as f64;
        let f = 2.0 * order / w;
        let n1 = f * h1 - h1_prev;
        let n2 = f * h2 - h2_prev;
        h1_prev = h1;
        h2_prev = h2;
        h1 = n1;
        h2 = n2;
    }
    (h1, h2)
}

/// (J, Y) for nu >= 0, Re w >= 0.
fn jy_right(nu: f64, w: C64) -> (C64, C64) {
    let r = w.norm();
    if r <= SERIES_RADIUS {
        let j = j_series(nu, w);
        let y = if is_integer(nu) {
            y_integer_series(nu.round() as usize, w)
        } else {
            let (s, c) = (nu * PI).sin_cos();
            (j * c - j_series(-nu, w)) / s
        };
        return (j, y);
    }
    let (h1s, h2s) = hankel_pair_scaled(nu, w);
    let e = (I * w).exp();
    let h1 = h1s * e;
    let h2 = h2s / e;
    let y = (h1 - h2) / (2.0 * I);
    let j = if nu > r { j_series(nu, w) } else { (h1 + h2) * 0.5 };
    (j, y)
}

/// (J, Y) for nu >= 0 and any w != 0 on the principal branch.
fn jy(nu: f64, w: C64) -> (C64, C64) {
    if w.re >= 0.0 {
        return jy_right(nu, w);
    }
    let u = -w;
    let (ju, yu) = jy_right(nu, u);
    let cos_nu = (nu * PI).cos();
    if w.im >= 0.0 {
        let e = C64::from_polar(1.0, nu * PI);
        (e * ju, e.conj() * yu + 2.0 * I * cos_nu * ju)
    } else {
        let e = C64::from_polar(1.0, -nu * PI);
        (e * ju, e.conj() * yu - 2.0 * I * cos_nu * ju)
    }
}

/// Bessel function of the first kind, any real order.
pub fn bessel_j(nu: f64, w: C64) -> C64 {
    if nu >= 0.0 {
        if w == C64::new(0.0, 0.0) {
            return j_series(nu, w);
        }
        return jy(nu, w).0;
    }
    if w.norm() <= SERIES_RADIUS || is_integer(nu) {
        if is_integer(nu) {
            let n = (-nu).round();
            return parity(n as i64) * bessel_j(n, w);
        }
        if w.re >= 0.0 {
            return j_series(nu, w);
        }
    }
    let mu = -nu;
    let (j, y) = jy(mu, w);
    let (s, c) = (mu * PI).sin_cos();
    j * c - y * s
}

/// Neumann function of nonnegative order; domain error at w = 0.
pub fn bessel_y(nu: f64, w: C64) -> Result<C64> {
    if w == C64::new(0.0, 0.0) {
        return Err(Error::Domain("Y is singular at w = 0"));
    }
    if nu < 0.0 {
        return Err(Error::Domain("negative order for Y"));
    }
    Ok(jy(nu, w).1)
}

/// H1 e^{-iw}; finite for Im w -> +inf where H1 itself underflows.
pub fn hankel1_scaled(nu: f64, w: C64) -> Result<C64> {
    if w == C64::new(0.0, 0.0) {
        return Err(Error::Domain("H1 is singular at w = 0"));
    }
    if nu < 0.0 {
        return Err(Error::Domain("negative order for H1"));
    }
    let r = w.norm();
    if r <= SERIES_RADIUS && w.im > 1.0 {
        // H1_ν(w) = (2/(iπ)) e^{-iνπ/2} K_ν(-iw) avoids the J + iY cancellation
        let ks = bessel_k_scaled(nu, -I * w);
        return Ok(ks * C64::from_polar(2.0 / PI, -nu * PI / 2.0) / I);
    }
    if r <= SERIES_RADIUS {
        let (j, y) = jy(nu, w);
        return Ok((j + I * y) * (-I * w).exp());
    }
    if w.re >= 0.0 {
        let base = nu - nu.floor();
        let steps = nu.floor() as usize;
        let mut prev = hankel_asymptotic_scaled(base, w).0;
        if steps == 0 {
            return Ok(prev);
        }
        let mut cur = hankel_asymptotic_scaled(base + 1.0, w).0;
        for s in 1..steps {
            let f = 2.0 * (base + s as f64) / w;
            let next = f * cur - prev;
            prev = cur;
            cur = next;
        }
        return Ok(cur);
    }
    if w.im >= 0.0 {
        // H1(ū e^{iπ}) = -e^{-iνπ} conj(H1(u)), u = -w̄
        let u = -w.conj();
        let hs = hankel1_scaled(nu, u)?;
        return Ok(-C64::from_polar(1.0, -nu * PI) * hs.conj());
    }
    let (j, y) = jy(nu, w);
    Ok((j + I * y) * (-I * w).exp())
}

/// K_ν(u) e^u by the trapezoidal rule on ∫_0^∞ e^{-u(cosh t - 1)} cosh(νt) dt, Re u >= 1.
fn bessel_k_scaled(nu: f64, u: C64) -> C64 {
    let h = 0.004;
    let mut sum = C64::new(0.5, 0.0);
    let mut t = h;
    loop {
        let term = (-u * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term.norm() < 1e-18 * sum.norm() && u.re * (t.cosh() - 1.0) > nu * t {
            break;
        }
        t += h;
    }
    sum * h
}

/// J, Y and H1 of order nu >= 0.
pub fn bessel_trio(nu: f64, w: C64) -> Result<BesselTrio> {
    if nu < 0.0 {
        return Err(Error::Domain("bessel_trio requires nu >= 0"));
    }
    if w == C64::new(0.0, 0.0) {
        return Err(Error::Domain("Y and H1 are singular at w = 0"));
    }
    let (j, y) = jy(nu, w);
    let h1 = hankel1_scaled(nu, w)? * (I * w).exp();
    Ok(BesselTrio { j, y, h1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn half_order_closed_forms() {
        for &x in &[0.3, 2.0, 7.5, 11.9, 12.5, 40.0, 333.0] {
            let w = C64::new(x, 0.0);
            let j = bessel_j(0.5, w);
            let expect = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((j.re - expect).abs() < 1e-12 * (1.0 + expect.abs()), "x = {x}");
            let y = bessel_y(0.5, w).unwrap();
            let expect_y = -(2.0 / (PI * x)).sqrt() * x.cos();
            assert!((y.re - expect_y).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn series_matches_forty_terms() {
        // independent truncated series for J_{1/2}(2)
        let x: f64 = 2.0;
        let mut sum = 0.0;
        let mut k_fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                k_fact *= k as f64;
            }
            let g = gamma_real(k as f64 + 1.5).unwrap();
            sum += (-1.0f64).powi(k) * (x / 2.0).powf(2.0 * k as f64 + 0.5) / (k_fact * g);
        }
        let j = bessel_j(0.5, C64::new(x, 0.0));
        assert!((j.re - sum).abs() < 1e-14);
    }

    #[test]
    fn j0_at_origin() {
        assert_eq!(bessel_j(0.0, C64::new(0.0, 0.0)), C64::new(1.0, 0.0));
        assert!(bessel_y(0.0, C64::new(0.0, 0.0)).is_err());
        assert!(bessel_trio(1.0, C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn wronskian_identity_across_regimes() {
        // J_{ν+1} Y_ν - J_ν Y_{ν+1} = 2/(π w)
        for &nu in &[0.0, 0.25, 0.5, 1.0, 1.75, 3.0, 7.5] {
            for &(re, im) in &[(0.7, 0.2), (5.0, 3.0), (11.0, -2.0), (15.0, 4.0), (-9.0, 6.0), (60.0, 30.0), (-20.0, 1.0), (3.0, 25.0)] {
                let w = C64::new(re, im);
                let (j0, y0) = jy(nu, w);
                let (j1, y1) = jy(nu + 1.0, w);
                let lhs = j1 * y0 - j0 * y1;
                let rhs = 2.0 / (PI * w);
                let scale = (j1 * y0).norm().max(rhs.norm());
                assert!((lhs - rhs).norm() < 1e-10 * scale, "nu={nu} w={w} {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn continuity_across_series_radius() {
        for &nu in &[0.0, 0.5, 1.25, 2.0] {
            for &ang in &[0.0, 0.6, 1.2, 1.5] {
                let a = C64::from_polar(SERIES_RADIUS - 1e-12, ang);
                let b = C64::from_polar(SERIES_RADIUS + 1e-12, ang);
                let (ja, ya) = jy(nu, a);
                let (jb, yb) = jy(nu, b);
                let scale = ja.norm() + ya.norm();
                assert!((ja - jb).norm() < 1e-9 * scale, "J nu={nu} ang={ang} {ja} {jb}");
                assert!((ya - yb).norm() < 1e-9 * scale, "Y nu={nu} ang={ang} {ya} {yb}");
            }
        }
    }

    #[test]
    fn hankel_consistency() {
        for &nu in &[0.0, 0.5, 1.25, 2.5] {
            for &(re, im) in &[(1.0, 1.0), (20.0, 0.0), (30.0, 10.0), (-4.0, 2.0), (-40.0, 3.0), (0.0, 15.0)] {
                let w = C64::new(re, im);
                let t = bessel_trio(nu, w).unwrap();
                let scale = t.j.norm() + t.y.norm();
                assert!((t.h1 - t.j - I * t.y).norm() < 1e-10 * scale, "nu={nu} w={w}");
            }
        }
        // H1_{1/2}(w) = -i sqrt(2/(πw)) e^{iw}; scaled stays finite far up the imaginary axis
        let w = C64::new(10.0, 900.0);
        let hs = hankel1_scaled(0.5, w).unwrap();
        let expect = -I * (C64::new(2.0 / PI, 0.0) / w).sqrt();
        assert!(close(hs, expect, 1e-12));
    }

    #[test]
    fn hankel_inside_series_disk_upper_half_plane() {
        // H1_{3/2}(w) = -sqrt(2/(πw)) e^{iw} (1 + i/w), no cancellation in the closed form
        for &(re, im) in &[(0.5, 9.0), (-3.0, 7.0), (6.0, 6.0), (0.0, 11.5), (2.0, 1.5)] {
            let w = C64::new(re, im);
            let hs = hankel1_scaled(1.5, w).unwrap();
            let expect = -(C64::new(2.0 / PI, 0.0) / w).sqrt() * (1.0 + I / w);
            assert!(close(hs, expect, 1e-12), "w={w} {hs} {expect}");
        }
    }

    #[test]
    fn negative_order_matches_closed_form() {
        // J_{-1/2}(x) = sqrt(2/(πx)) cos x
        for &x in &[0.5, 3.0, 13.0, 50.0] {
            let j = bessel_j(-0.5, C64::new(x, 0.0));
            let expect = (2.0 / (PI * x)).sqrt() * x.cos();
            assert!((j.re - expect).abs() < 1e-12, "x = {x}");
        }
    }
}
