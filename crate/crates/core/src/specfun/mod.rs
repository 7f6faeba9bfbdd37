//! Special functions and the unperturbed (free Bessel) problem.
//!
//! The free solutions are normalized as
//! `φ_l(z,x) = x^{l+1}(1 + O(x²))` and `θ_l(z,x) = x^{-l}/(2l+1)(1 + o(1))`
//! (logarithmic variant at `l = -1/2`), both entire in `z`, with
//! `W(θ_l, φ_l) = 1`. The Weyl solution `ψ_l = θ_l + m_l φ_l` is the
//! Hankel-function solution decaying for `Im k > 0`.

mod bessel;
mod gamma;
mod lambert;

use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

pub use bessel::{bessel_j, bessel_trio, bessel_y, hankel1_scaled, BesselTrio, SERIES_RADIUS};
pub use gamma::{gamma_fn, gamma_real, EULER_GAMMA};
pub use lambert::lambert_w_m1;

use crate::error::{Error, Result};
use gamma::digamma_int;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Angular momentum `l >= -1/2` with its derived integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMomentum(f64);

impl AngularMomentum {
    pub fn new(l: f64) -> Result<Self> {
        if !l.is_finite() || l < -0.5 {
            return Err(Error::Domain("angular momentum must satisfy l >= -1/2"));
        }
        Ok(Self(l))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Bessel order `l + 1/2`.
    pub fn nu(self) -> f64 {
        self.0 + 0.5
    }

    /// `floor(l/2 + 3/4)`.
    pub fn kappa(self) -> u32 {
        (self.0 / 2.0 + 0.75 + 1e-12).floor() as u32
    }

    /// `floor(l + 1/2)`.
    pub fn n_l(self) -> u32 {
        (self.0 + 0.5 + 1e-12).floor() as u32
    }

    /// True when `l + 1/2` is a nonnegative integer (logarithmic branch).
    pub fn half_integer(self) -> bool {
        let nu = self.nu();
        (nu - nu.round()).abs() < 1e-12
    }

    /// True when the origin is limit circle, `l < 1/2`.
    pub fn limit_circle(self) -> bool {
        self.0 < 0.5
    }
}

/// Principal square root continued from above on the negative axis.
pub(crate) fn sqrt_principal(z: C64) -> C64 {
    C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im }).sqrt()
}

/// Square root with `Im k >= 0`; on the positive axis `k > 0`.
pub fn sqrt_upper(z: C64) -> C64 {
    let k = sqrt_principal(z);
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// Spectral parameter `z` together with the momentum `k = √z`, `Im k >= 0`.
///
/// On the positive axis the sign of `k` selects the lip: `k > 0` is `z + i0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub z: C64,
    pub k: C64,
}

impl ComplexEnergy {
    pub fn from_z(z: C64) -> Self {
        let z = C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
        Self { z, k: sqrt_upper(z) }
    }

    pub fn from_k(k: C64) -> Result<Self> {
        if k.im < 0.0 {
            return Err(Error::Domain("momentum must satisfy Im k >= 0"));
        }
        let k = C64::new(k.re, k.im + 0.0);
        let z = k * k;
        Ok(Self { z: C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im }), k })
    }

    pub fn real(lambda: f64) -> Self {
        Self::from_z(C64::new(lambda, 0.0))
    }
}

/// `C_l = √π / (Γ(l + 3/2) 2^{l+1})`.
pub fn coupling_constant(l: AngularMomentum) -> f64 {
    let l = l.value();
    PI.sqrt() / (gamma_real(l + 1.5).expect("l + 3/2 > 0") * 2f64.powf(l + 1.0))
}

/// Values and x-derivatives of the free solutions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSolutions {
    pub phi: C64,
    pub dphi: C64,
    pub theta: C64,
    pub dtheta: C64,
    pub psi: C64,
    pub dpsi: C64,
}

/// Free regular solution φ_l and its derivative.
pub fn free_phi(l: AngularMomentum, e: ComplexEnergy, x: f64) -> (C64, C64) {
    let nu = l.nu();
    if (e.k * x).norm() <= SERIES_RADIUS {
        // x^{l+1} Σ a_j (z x²)^j
        let zx2 = e.z * x * x;
        let mut a = C64::new(1.0, 0.0);
        let mut val = a;
        let mut der = a * (l.value() + 1.0);
        for j in 1..400 {
            let jf = j as f64;
            a = a * zx2 * (-0.25) / (jf * (jf + nu));
            val += a;
            der += a * (2.0 * jf + l.value() + 1.0);
            if a.norm() < 1e-17 * val.norm() && jf * jf > zx2.norm() {
                break;
            }
        }
        let xl = x.powf(l.value());
        return (val * xl * x, der * xl);
    }
    let kp = sqrt_principal(e.z);
    let w = kp * x;
    let c = coupling_constant(l);
    let j = bessel_j(nu, w);
    let jp = -bessel_j(nu + 1.0, w) + j * nu / w;
    let pre = (kp.ln() * (-nu)).exp() / c * (PI / 2.0).sqrt();
    let sx = x.sqrt();
    (pre * sx * j, pre * (j / (2.0 * sx) + sx * kp * jp))
}

/// Free non-principal solution θ_l and its derivative.
pub fn free_theta(l: AngularMomentum, e: ComplexEnergy, x: f64) -> (C64, C64) {
    let nu = l.nu();
    let small = (e.k * x).norm() <= SERIES_RADIUS;
    if !l.half_integer() {
        if small {
            let zx2 = e.z * x * x;
            let mut b = C64::new(1.0, 0.0);
            let mut val = b;
            let mut der = b * (-l.value());
            for j in 1..400 {
                let jf = j as f64;
                b = b * zx2 * (-0.25) / (jf * (jf - nu));
                val += b;
                der += b * (2.0 * jf - l.value());
                if b.norm() < 1e-17 * val.norm() && jf * jf > zx2.norm() {
                    break;
                }
            }
            let s = x.powf(-l.value()) / (2.0 * l.value() + 1.0);
            return (val * s, der * s / x);
        }
        let kp = sqrt_principal(e.z);
        let w = kp * x;
        let c = coupling_constant(l);
        let j = bessel_j(-nu, w);
        let jp = -bessel_j(-nu + 1.0, w) - j * nu / w;
        let pre = c / (nu * PI).sin() * (kp.ln() * nu).exp() * (PI / 2.0).sqrt();
        let sx = x.sqrt();
        return (pre * sx * j, pre * (j / (2.0 * sx) + sx * kp * jp));
    }
    let n = nu.round() as usize;
    if small {
        return theta_half_integer_series(l, n, e.z, x);
    }
    let kp = sqrt_principal(e.z);
    let w = kp * x;
    let c = coupling_constant(l);
    let log_z = C64::new(e.z.norm().ln(), e.z.im.atan2(e.z.re));
    let nf = n as f64;
    let jn = bessel_j(nf, w);
    let jn1 = bessel_j(nf + 1.0, w);
    let yn = bessel_y(nf, w).expect("w != 0");
    let yn1 = bessel_y(nf + 1.0, w).expect("w != 0");
    let bracket = yn - log_z * jn / PI;
    let dbracket = (-yn1 + yn * nf / w) - log_z / PI * (-jn1 + jn * nf / w);
    let pre = -c * kp.powi(n as i32) * (PI / 2.0).sqrt();
    let sx = x.sqrt();
    (pre * sx * bracket, pre * (bracket / (2.0 * sx) + sx * kp * dbracket))
}

/// Entire-in-z series for θ_l when `l + 1/2 = n` is an integer.
fn theta_half_integer_series(l: AngularMomentum, n: usize, z: C64, x: f64) -> (C64, C64) {
    let c = coupling_constant(l);
    let pre = -c * (PI / 2.0).sqrt();
    let log_half = (x / 2.0).ln();
    let mut val = C64::new(0.0, 0.0);
    let mut der = C64::new(0.0, 0.0);
    let add_power = |coef: C64, p: f64, with_log: bool, val: &mut C64, der: &mut C64| {
        let xp = x.powf(p);
        if with_log {
            *val += coef * xp * log_half;
            *der += coef * xp / x * (1.0 + p * log_half);
        } else {
            *val += coef * xp;
            *der += coef * p * xp / x;
        }
    };
    let mut fact = [1.0f64; 64];
    for j in 1..64 {
        fact[j] = fact[j - 1] * j as f64;
    }
    // finite part: -(1/π) Σ_{j<n} (n-j-1)!/j! z^j 2^{n-2j} x^{2j-n}
    let mut zj = C64::new(1.0, 0.0);
    for j in 0..n {
        let coef = zj * (-(fact[n - j - 1] / fact[j]) * 2f64.powi(n as i32 - 2 * j as i32) / PI);
        add_power(coef, 2.0 * j as f64 - n as f64 + 0.5, false, &mut val, &mut der);
        zj *= z;
    }
    // log and digamma parts: z^{n+j} (-1/4)^j 2^{-n} x^{n+2j} / (j!(n+j)!)
    let mut zpow = z.powi(n as i32);
    let base = 2f64.powi(-(n as i32));
    let mut quarter = 1.0;
    let mut jfact = 1.0;
    let mut njfact = fact[n.min(63)];
    for j in 0..400usize {
        if j > 0 {
            jfact *= j as f64;
            njfact *= (n + j) as f64;
            quarter *= -0.25;
            zpow *= z;
        }
        let common = zpow * (quarter * base / (jfact * njfact));
        let p = (n + 2 * j) as f64 + 0.5;
        add_power(common * (2.0 / PI), p, true, &mut val, &mut der);
        let psi = digamma_int(j + 1) + digamma_int(n + j + 1);
        add_power(common * (-psi / PI), p, false, &mut val, &mut der);
        let mag = common.norm() * x.powf(p - 0.5) * (1.0 + log_half.abs() + psi.abs());
        if j > 2 && mag < 1e-18 * val.norm().max(1e-300) * x.powf(-0.5) && (j * j) as f64 > (z * x * x).norm() {
            break;
        }
    }
    (val * pre, der * pre)
}

/// Model m-function `m_l(z)` evaluated through the momentum, valid on both lips of the cut.
pub fn model_m_k(l: AngularMomentum, k: C64) -> C64 {
    let c2 = coupling_constant(l).powi(2);
    let nu = l.nu();
    let log_mz = 2.0 * (-I * k).ln();
    if l.half_integer() {
        let n = nu.round() as i32;
        -c2 / PI * (k * k).powi(n) * log_mz
    } else {
        -c2 / (nu * PI).sin() * (log_mz * nu).exp()
    }
}

/// Model m-function `m_l(z)`; principal branch with the cut on `[0, ∞)`.
pub fn model_m(l: AngularMomentum, z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::Branch("m_l is cut along [0, inf)"));
    }
    Ok(model_m_k(l, sqrt_upper(z)))
}

/// Model spectral function `ρ_l(λ) = C_l² λ^{l+3/2} / (π (l + 3/2))` on `[0, ∞)`.
pub fn model_rho(l: AngularMomentum, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let c2 = coupling_constant(l).powi(2);
    c2 / (PI * (l.nu() + 1.0)) * lambda.powf(l.nu() + 1.0)
}

/// Model spectral density `dρ_l/dλ = C_l² λ^{l+1/2} / π`.
pub fn model_density(l: AngularMomentum, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    coupling_constant(l).powi(2) / PI * lambda.powf(l.nu())
}

/// Free Weyl solution `ψ_l = i C_l k^{l+1/2} √(πx/2) H1_{l+1/2}(kx)` and derivative.
pub fn free_psi(l: AngularMomentum, e: ComplexEnergy, x: f64) -> Result<(C64, C64)> {
    if e.k == C64::new(0.0, 0.0) {
        return Err(Error::Branch("Weyl solution undefined at k = 0"));
    }
    let (s, ds) = free_psi_scaled(l, e, x)?;
    let g = (I * e.k * x).exp();
    Ok((s * g, ds * g))
}

/// `ψ_l e^{-ikx}` and `ψ_l' e^{-ikx}`.
pub(crate) fn free_psi_scaled(l: AngularMomentum, e: ComplexEnergy, x: f64) -> Result<(C64, C64)> {
    let k = e.k;
    if k == C64::new(0.0, 0.0) {
        return Err(Error::Branch("Weyl solution undefined at k = 0"));
    }
    let nu = l.nu();
    let w = k * x;
    let h = hankel1_scaled(nu, w)?;
    let h_next = hankel1_scaled(nu + 1.0, w)?;
    let hp = -h_next + h * nu / w;
    let c = coupling_constant(l);
    let pre = I * c * (k.ln() * nu).exp() * (PI / 2.0).sqrt();
    let sx = x.sqrt();
    Ok((pre * sx * h, pre * (h / (2.0 * sx) + sx * k * hp)))
}

/// φ_l, θ_l, ψ_l and their derivatives at `x > 0`.
pub fn free_solutions(l: AngularMomentum, e: ComplexEnergy, x: f64) -> Result<FreeSolutions> {
    if !(x > 0.0) {
        return Err(Error::Domain("free solutions need x > 0"));
    }
    if e.k == C64::new(0.0, 0.0) {
        return Err(Error::Branch("Weyl solution undefined at k = 0"));
    }
    let (phi, dphi) = free_phi(l, e, x);
    let (theta, dtheta) = free_theta(l, e, x);
    let (psi, dpsi) = if (e.k * x).norm() <= 1.0 {
        let m = model_m_k(l, e.k);
        (theta + m * phi, dtheta + m * dphi)
    } else {
        free_psi(l, e, x)?
    };
    Ok(FreeSolutions { phi, dphi, theta, dtheta, psi, dpsi })
}

/// Free Green kernel `G_l(z,x,y) = φ_l(x)θ_l(y) − φ_l(y)θ_l(x)` and `∂_x G_l`.
pub fn green_kernel(l: AngularMomentum, e: ComplexEnergy, x: f64, y: f64) -> Result<(C64, C64)> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain("green kernel needs x, y > 0"));
    }
    if e.k.im * x.max(y) > 2.0 {
        // θ = ψ - mφ; the ψ form has no e^{2 Im k x} cancellation
        let sx = free_solutions(l, e, x)?;
        let sy = free_solutions(l, e, y)?;
        return Ok((sx.phi * sy.psi - sy.phi * sx.psi, sx.dphi * sy.psi - sy.phi * sx.dpsi));
    }
    let (px, dpx) = free_phi(l, e, x);
    let (tx, dtx) = free_theta(l, e, x);
    let (py, _) = free_phi(l, e, y);
    let (ty, _) = free_theta(l, e, y);
    Ok((px * ty - py * tx, dpx * ty - py * dtx))
}

/// Right-hand sides of the free-kernel estimates with unit constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBounds {
    pub phi: f64,
    pub green: f64,
    pub green_dx: f64,
}

/// Estimates for |φ_l|, |G_l| and |∂_x G_l| at `y <= x`, with constant 1.
pub fn kernel_bounds(l: AngularMomentum, k: C64, x: f64, y: f64) -> KernelBounds {
    let ak = k.norm();
    let growth_x = (k.im.abs() * x).exp();
    let growth = (k.im.abs() * (x - y)).exp();
    let lv = l.value();
    let phi = (x / (1.0 + ak * x)).powf(lv + 1.0) * growth_x;
    if (lv + 0.5).abs() < 1e-12 {
        let logf = 1.0 - (ak * y / (1.0 + ak * y)).ln();
        let green = (x / (1.0 + ak * x) * y / (1.0 + ak * y)).sqrt() * growth * logf;
        let green_dx = ((y + ak * x * y) / (x + ak * x * y)).sqrt() * growth * logf;
        KernelBounds { phi, green, green_dx }
    } else {
        let green = (x / (1.0 + ak * x)).powf(lv + 1.0) * ((1.0 + ak * y) / y).powf(lv) * growth;
        let green_dx = (x / (1.0 + ak * x)).powf(lv) * ((1.0 + ak * y) / y).powf(lv) * growth;
        KernelBounds { phi, green, green_dx }
    }
}
