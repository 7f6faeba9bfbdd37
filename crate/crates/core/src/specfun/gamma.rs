//! Euler Gamma via the Lanczos approximation (g = 7, nine terms).

use core::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn is_nonpositive_integer(x: C64) -> bool {
    x.im == 0.0 && x.re <= 0.0 && x.re == x.re.round()
}

/// Complex Gamma function.
pub fn gamma_fn(x: C64) -> Result<C64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x.re));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: C64) -> C64 {
    if x.re < 0.5 {
        // reflection
        let s = (x * PI).sin();
        return C64::new(PI, 0.0) / (s * gamma_unchecked(C64::new(1.0, 0.0) - x));
    }
    let z = x - 1.0;
    let mut acc = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let log_part = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * log_part.exp() * acc
}

/// Real Gamma function.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma_fn(C64::new(x, 0.0)).map(|g| g.re)
}

/// Digamma at positive integers: psi(n) = -gamma + H_{n-1}.
pub(crate) fn digamma_int(n: usize) -> f64 {
    let mut h = 0.0;
    for j in 1..n {
        h += 1.0 / j as f64;
    }
    h - EULER_GAMMA
}
