//! Gauss collocation for linear systems `Y' = A(x) Y` with complex coefficients.
//!
//! Five stages, order ten. Each step returns the transfer matrix so several
//! solutions can share one factorization. Magnitudes are tracked through a
//! separate log scale so exponentially growing solutions do not overflow.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::quad::gauss_legendre;

pub(crate) const STAGES: usize = 5;

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    pub c: [f64; STAGES],
    pub a: [[f64; STAGES]; STAGES],
    pub b: [f64; STAGES],
}

impl Tableau {
    pub fn gauss() -> Self {
        let (x, w) = gauss_legendre(STAGES);
        let mut c = [0.0; STAGES];
        let mut b = [0.0; STAGES];
        // ascending nodes on [0, 1]
        let mut idx: Vec<usize> = (0..STAGES).collect();
        idx.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap());
        for (k, &i) in idx.iter().enumerate() {
            c[k] = 0.5 * (x[i] + 1.0);
            b[k] = 0.5 * w[i];
        }
        let mut a = [[0.0; STAGES]; STAGES];
        for i in 0..STAGES {
            for j in 0..STAGES {
                // ∫_0^{c_i} ℓ_j(s) ds, exact with an S-point rule
                let mut s = 0.0;
                for (xn, wn) in x.iter().zip(&w) {
                    let t = 0.5 * c[i] * (xn + 1.0);
                    let mut lj = 1.0;
                    for m in 0..STAGES {
                        if m != j {
                            lj *= (t - c[m]) / (c[j] - c[m]);
                        }
                    }
                    s += wn * lj;
                }
                a[i][j] = 0.5 * c[i] * s;
            }
        }
        Self { c, a, b }
    }
}

/// Dense complex LU solve with partial pivoting, in place; `rhs` is n × m row-major.
pub(crate) fn solve_in_place(mat: &mut [C64], n: usize, rhs: &mut [C64], m: usize) -> bool {
    for col in 0..n {
        let mut piv = col;
        let mut best = mat[col * n + col].norm();
        for r in col + 1..n {
            let v = mat[r * n + col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if piv != col {
            for k in 0..n {
                mat.swap(col * n + k, piv * n + k);
            }
            for k in 0..m {
                rhs.swap(col * m + k, piv * m + k);
            }
        }
        let inv = C64::new(1.0, 0.0) / mat[col * n + col];
        for r in col + 1..n {
            let f = mat[r * n + col] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = mat[col * n + k];
                mat[r * n + k] -= f * v;
            }
            for k in 0..m {
                let v = rhs[col * m + k];
                rhs[r * m + k] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = C64::new(1.0, 0.0) / mat[col * n + col];
        for k in 0..m {
            let mut s = rhs[col * m + k];
            for j in col + 1..n {
                s -= mat[col * n + j] * rhs[j * m + k];
            }
            rhs[col * m + k] = s * inv;
        }
    }
    true
}

pub(crate) type Mat<const D: usize> = [[C64; D]; D];

/// Reusable buffers for collocation steps of dimension `D`.
pub(crate) struct Stepper<const D: usize> {
    tab: Tableau,
    mat: Vec<C64>,
    rhs: Vec<C64>,
}

impl<const D: usize> Stepper<D> {
    pub fn new() -> Self {
        let n = D * STAGES;
        Self { tab: Tableau::gauss(), mat: vec![C64::new(0.0, 0.0); n * n], rhs: vec![C64::new(0.0, 0.0); n * D] }
    }

    /// Transfer matrix of one step from x to x + h.
    pub fn step<F: Fn(f64) -> Mat<D>>(&mut self, coef: &F, x: f64, h: f64) -> Option<Mat<D>> {
        let n = D * STAGES;
        let stages: [Mat<D>; STAGES] = core::array::from_fn(|i| coef(x + self.tab.c[i] * h));
        for v in self.mat.iter_mut() {
            *v = C64::new(0.0, 0.0);
        }
        for i in 0..STAGES {
            for p in 0..D {
                let row = i * D + p;
                self.mat[row * n + row] += 1.0;
                for j in 0..STAGES {
                    let f = h * self.tab.a[i][j];
                    for q in 0..D {
                        self.mat[row * n + j * D + q] -= stages[i][p][q] * f;
                    }
                }
                for r in 0..D {
                    self.rhs[row * D + r] = stages[i][p][r];
                }
            }
        }
        if !solve_in_place(&mut self.mat, n, &mut self.rhs, D) {
            return None;
        }
        let mut out = [[C64::new(0.0, 0.0); D]; D];
        for p in 0..D {
            for r in 0..D {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..STAGES {
                    s += self.rhs[(j * D + p) * D + r] * self.tab.b[j];
                }
                out[p][r] = s * h + if p == r { 1.0 } else { 0.0 };
            }
        }
        Some(out)
    }
}

pub(crate) fn apply<const D: usize>(m: &Mat<D>, y: &[C64; D]) -> [C64; D] {
    core::array::from_fn(|p| (0..D).map(|q| m[p][q] * y[q]).sum())
}

/// Mesh from `a` to `b` (either direction) hitting every point of `stops` in between.
///
/// `h_of(x)` is the local step bound; steps never exceed it at the starting point.
pub(crate) fn build_mesh<H: Fn(f64) -> f64>(a: f64, b: f64, stops: &[f64], h_of: H) -> Vec<f64> {
    let dir = if b >= a { 1.0 } else { -1.0 };
    let mut targets: Vec<f64> = stops.iter().copied().filter(|s| (s - a) * dir > 0.0 && (b - s) * dir > 0.0).collect();
    targets.push(b);
    targets.sort_by(|x, y| ((x - a) * dir).partial_cmp(&((y - a) * dir)).unwrap());
    targets.dedup();
    let mut mesh = vec![a];
    let mut x = a;
    for t in targets {
        while (t - x) * dir > 0.0 {
            let h = h_of(x).max(1e-300);
            // look ahead once so the step also respects the bound at its far end
            let h = h.min(h_of(x + dir * h).max(1e-300) * 1.5);
            let remaining = (t - x).abs();
            let step = if remaining <= h * 1.000_001 {
                remaining
            } else if remaining < 2.0 * h {
                remaining / 2.0
            } else {
                h
            };
            x = if remaining == step { t } else { x + dir * step };
            mesh.push(x);
        }
    }
    mesh
}

/// One solution vector with an external log scale: true value = y · e^{scale}.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled<const D: usize> {
    pub y: [C64; D],
    pub scale: f64,
}

impl<const D: usize> Scaled<D> {
    pub fn new(y: [C64; D]) -> Self {
        let mut s = Self { y, scale: 0.0 };
        s.renormalize();
        s
    }

    pub fn renormalize(&mut self) {
        let n = self.y.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if n > 0.0 && !(1e-100..=1e100).contains(&n) {
            let ln = n.ln();
            let f = (-ln).exp();
            for v in self.y.iter_mut() {
                *v *= f;
            }
            self.scale += ln;
        }
    }

    pub fn value(&self) -> [C64; D] {
        let f = self.scale.exp();
        core::array::from_fn(|i| self.y[i] * f)
    }
}

/// Propagates `y0` along `mesh`, recording the state at each mesh node.
pub(crate) fn propagate<const D: usize, F: Fn(f64) -> Mat<D>>(
    coef: &F,
    y0: Scaled<D>,
    mesh: &[f64],
) -> Option<Vec<Scaled<D>>> {
    let mut stepper = Stepper::<D>::new();
    let mut out = Vec::with_capacity(mesh.len());
    let mut cur = y0;
    out.push(cur);
    for w in mesh.windows(2) {
        let t = stepper.step(coef, w[0], w[1] - w[0])?;
        cur.y = apply(&t, &cur.y);
        cur.renormalize();
        if cur.y.iter().any(|v| !v.is_finite()) {
            return None;
        }
        out.push(cur);
    }
    Some(out)
}
