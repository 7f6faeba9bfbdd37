//! Potential representation: a sum of simple terms plus an optional Coulomb tail γ/x.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::specfun::AngularMomentum;

/// One additive piece of q̃.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// q ≡ c on the whole half-line.
    Constant(f64),
    /// `value` on [from, to).
    Step { value: f64, from: f64, to: f64 },
    /// amp · e^{-rate x}, rate > 0.
    Exp { amp: f64, rate: f64 },
    /// coef · x^exp.
    Power { coef: f64, exp: f64 },
    /// Linear interpolation through (xs, qs); the first value is held below xs[0], zero beyond the last node.
    Table { xs: Vec<f64>, qs: Vec<f64> },
}

impl Term {
    fn validate(&self) -> Result<()> {
        match self {
            Term::Constant(c) if !c.is_finite() => Err(Error::InvalidInput("constant must be finite")),
            Term::Step { value, from, to } if !(value.is_finite() && *from >= 0.0 && to > from) => {
                Err(Error::InvalidInput("step needs 0 <= from < to"))
            }
            Term::Exp { amp, rate } if !(amp.is_finite() && *rate > 0.0) => {
                Err(Error::InvalidInput("exp term needs rate > 0"))
            }
            Term::Power { coef, exp } if !(coef.is_finite() && exp.is_finite()) => {
                Err(Error::InvalidInput("power term must be finite"))
            }
            Term::Table { xs, qs } => {
                if xs.len() < 2 || xs.len() != qs.len() {
                    return Err(Error::InvalidInput("table needs >= 2 (x, q) pairs"));
                }
                if xs[0] < 0.0 || xs.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidInput("table x values must increase from >= 0"));
                }
                if qs.iter().any(|q| !q.is_finite()) {
                    return Err(Error::InvalidInput("table q values must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Term::Constant(c) => *c,
            Term::Step { value, from, to } => {
                if x >= *from && x < *to {
                    *value
                } else {
                    0.0
                }
            }
            Term::Exp { amp, rate } => amp * (-rate * x).exp(),
            Term::Power { coef, exp } => coef * x.powf(*exp),
            Term::Table { xs, qs } => {
                let n = xs.len();
                if x <= xs[0] {
                    return qs[0];
                }
                if x >= xs[n - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|v| *v <= x) - 1;
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                qs[i] + t * (qs[i + 1] - qs[i])
            }
        }
    }

    /// Exponent of the leading behaviour at 0 (bounded terms give 0).
    fn origin_exponent(&self) -> f64 {
        match self {
            Term::Power { coef, exp } if *coef != 0.0 => *exp,
            _ => 0.0,
        }
    }

    /// Upper bound for ∫_X^∞ y^p |term| dy with p ∈ {0, 1}; infinite when divergent.
    fn tail(&self, x: f64, p: i32) -> f64 {
        match self {
            Term::Constant(c) => {
                if *c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Term::Step { value, from, to } => {
                if x >= *to || *value == 0.0 {
                    return 0.0;
                }
                let a = x.max(*from);
                let pf = p as f64 + 1.0;
                value.abs() * (to.powf(pf) - a.powf(pf)) / pf
            }
            Term::Exp { amp, rate } => {
                let e = amp.abs() * (-rate * x).exp();
                if p == 0 {
                    e / rate
                } else {
                    e * (x / rate + 1.0 / (rate * rate))
                }
            }
            Term::Power { coef, exp } => {
                if *coef == 0.0 {
                    return 0.0;
                }
                let e = exp + p as f64 + 1.0;
                if e >= 0.0 {
                    f64::INFINITY
                } else {
                    coef.abs() * x.powf(e) / -e
                }
            }
            Term::Table { xs, qs } => {
                let n = xs.len();
                let mut s = 0.0;
                for i in 0..n - 1 {
                    let (a, b) = (xs[i].max(x), xs[i + 1]);
                    if b <= a {
                        continue;
                    }
                    let m = qs[i].abs().max(qs[i + 1].abs());
                    s += m * if p == 0 { b - a } else { 0.5 * (b * b - a * a) };
                }
                s
            }
        }
    }
}

/// Operator data: angular momentum, Coulomb coefficient, q̃ terms and the right endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub l: AngularMomentum,
    pub gamma: f64,
    pub terms: Vec<Term>,
    /// Right endpoint b; `None` is the half-line.
    pub cutoff: Option<f64>,
}

impl PotentialSpec {
    pub fn new(l: AngularMomentum, gamma: f64, terms: Vec<Term>, cutoff: Option<f64>) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidInput("gamma must be finite"));
        }
        if let Some(b) = cutoff {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidInput("cutoff must be a positive number"));
            }
        }
        for t in &terms {
            t.validate()?;
        }
        Ok(Self { l, gamma, terms, cutoff })
    }

    /// q ≡ 0 on the half-line.
    pub fn free(l: AngularMomentum) -> Self {
        Self { l, gamma: 0.0, terms: Vec::new(), cutoff: None }
    }

    pub fn with_term(mut self, t: Term) -> Result<Self> {
        t.validate()?;
        self.terms.push(t);
        Ok(self)
    }

    pub fn with_cutoff(mut self, b: Option<f64>) -> Self {
        self.cutoff = b;
        self
    }

    /// Short-range part q̃(x).
    pub fn q_tilde(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Full potential q(x) = γ/x + q̃(x).
    pub fn q(&self, x: f64) -> f64 {
        self.gamma / x + self.q_tilde(x)
    }

    /// q̃ without its constant terms.
    pub fn q_decaying(&self, x: f64) -> f64 {
        self.terms.iter().filter(|t| !matches!(t, Term::Constant(_))).map(|t| t.eval(x)).sum()
    }

    /// Sum of the constant terms (an energy offset for the Jost route).
    pub fn constant_offset(&self) -> f64 {
        self.terms.iter().map(|t| if let Term::Constant(c) = t { *c } else { 0.0 }).sum()
    }

    pub fn is_free(&self) -> bool {
        self.gamma == 0.0 && self.terms.iter().all(|t| t.tail(0.0, 0) == 0.0 && t.origin_exponent() == 0.0 && !matches!(t, Term::Constant(c) if *c != 0.0))
    }

    /// Points where q̃ is not smooth, sorted, inside (0, ∞).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for t in &self.terms {
            match t {
                Term::Step { from, to, .. } => {
                    out.push(*from);
                    out.push(*to);
                }
                Term::Table { xs, .. } => out.extend_from_slice(xs),
                _ => {}
            }
        }
        if let Some(b) = self.cutoff {
            out.push(b);
        }
        out.retain(|x| *x > 0.0);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Right end of the support of the decaying part, if compact.
    pub fn support_end(&self) -> Option<f64> {
        let mut end: f64 = 0.0;
        for t in &self.terms {
            match t {
                Term::Constant(_) => {}
                Term::Step { to, value, .. } => {
                    if *value != 0.0 {
                        end = end.max(*to)
                    }
                }
                Term::Table { xs, .. } => end = end.max(xs[xs.len() - 1]),
                Term::Exp { amp, .. } | Term::Power { coef: amp, .. } => {
                    if *amp != 0.0 {
                        return None;
                    }
                }
            }
        }
        Some(end)
    }

    /// Upper bound on ∫_X^∞ y |q̃(y)| dy (constants excluded).
    pub fn tail_moment(&self, x: f64) -> f64 {
        self.terms.iter().filter(|t| !matches!(t, Term::Constant(_))).map(|t| t.tail(x, 1)).sum()
    }

    /// Upper bound on ∫_X^∞ |q̃(y)| dy (constants excluded).
    pub fn tail_l1(&self, x: f64) -> f64 {
        self.terms.iter().filter(|t| !matches!(t, Term::Constant(_))).map(|t| t.tail(x, 0)).sum()
    }

    /// Most singular exponent of q at the origin, Coulomb included.
    fn origin_exponent(&self) -> f64 {
        let mut e = self.terms.iter().map(|t| t.origin_exponent()).fold(0.0, f64::min);
        if self.gamma != 0.0 {
            e = e.min(-1.0);
        }
        e
    }

    /// x q ∈ L¹(0,1), with the extra log weight at l = -1/2.
    pub fn hyp12(&self) -> bool {
        self.origin_exponent() > -2.0
    }

    /// γ = 0, no constant offset and ∫_1^∞ x |q̃| < ∞.
    pub fn marchenko(&self) -> bool {
        self.gamma == 0.0 && self.constant_offset() == 0.0 && self.tail_moment(1.0).is_finite()
    }

    /// ∫_0 y^{-2l} max(1, -log y) |q| < ∞, so θ can be built by direct iteration.
    pub fn theta_iterable(&self) -> bool {
        let e = self.origin_exponent();
        let has_q = self.gamma != 0.0 || self.terms.iter().any(|t| t.eval(1e-12) != 0.0 || t.origin_exponent() != 0.0);
        if !has_q {
            return true;
        }
        e - 2.0 * self.l.value() > -1.0
    }
}
