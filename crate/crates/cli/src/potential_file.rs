//! The potential document: `{"l": 0, "gamma": 0, "q": {...} | [{...}, ...], "b": 1 | "inf"}`.

use besselspec_core::potential::{PotentialSpec, Term};
use besselspec_core::specfun::AngularMomentum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QPiece {
    Free,
    Constant { value: f64 },
    /// `value` on [from, to); `from` defaults to 0.
    Well {
        value: f64,
        to: f64,
        #[serde(default)]
        from: f64,
    },
    ExpDecay {
        #[serde(default = "one")]
        amp: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Power { coef: f64, exp: f64 },
    /// (x, q) pairs, linearly interpolated, zero beyond the last node.
    Table { points: Vec<(f64, f64)> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QField {
    One(QPiece),
    Sum(Vec<QPiece>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Finite(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub l: f64,
    #[serde(default)]
    pub gamma: f64,
    pub q: QField,
    #[serde(default = "half_line")]
    pub b: Endpoint,
}

fn half_line() -> Endpoint {
    Endpoint::Named("inf".into())
}

impl QPiece {
    fn term(&self) -> Option<Term> {
        match self {
            QPiece::Free => None,
            QPiece::Constant { value } => Some(Term::Constant(*value)),
            QPiece::Well { value, to, from } => Some(Term::Step { value: *value, from: *from, to: *to }),
            QPiece::ExpDecay { amp, rate } => Some(Term::Exp { amp: *amp, rate: *rate }),
            QPiece::Power { coef, exp } => Some(Term::Power { coef: *coef, exp: *exp }),
            QPiece::Table { points } => Some(Term::Table {
                xs: points.iter().map(|p| p.0).collect(),
                qs: points.iter().map(|p| p.1).collect(),
            }),
        }
    }

    /// Inline form: `free`, `constant:c`, `well:value,width`, `exp-decay[:amp,rate]`, `power:coef,exp`.
    pub fn parse_inline(s: &str) -> Result<Self, CliError> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--q: cannot read '{t}' as a number"))))
                .collect::<Result<_, _>>()?
        };
        let want = |n: usize| -> Result<(), CliError> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(CliError::Usage(format!("--q {kind} takes {n} numbers, got {}", nums.len())))
            }
        };
        Ok(match kind {
            "free" => {
                want(0)?;
                QPiece::Free
            }
            "constant" => {
                want(1)?;
                QPiece::Constant { value: nums[0] }
            }
            "well" => {
                want(2)?;
                QPiece::Well { value: nums[0], to: nums[1], from: 0.0 }
            }
            "exp-decay" => {
                if nums.is_empty() {
                    QPiece::ExpDecay { amp: 1.0, rate: 1.0 }
                } else {
                    want(2)?;
                    QPiece::ExpDecay { amp: nums[0], rate: nums[1] }
                }
            }
            "power" => {
                want(2)?;
                QPiece::Power { coef: nums[0], exp: nums[1] }
            }
            other => return Err(CliError::Usage(format!("--q: unknown kind '{other}' (free, constant, well, exp-decay, power; tables need --potential)"))),
        })
    }
}

impl Endpoint {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "inf" {
            return Ok(Endpoint::Named("inf".into()));
        }
        s.parse::<f64>().map(Endpoint::Finite).map_err(|_| CliError::Usage(format!("--b: expected a number or 'inf', got '{s}'")))
    }

    fn cutoff(&self) -> Result<Option<f64>, CliError> {
        match self {
            Endpoint::Finite(b) => Ok(Some(*b)),
            Endpoint::Named(s) if s == "inf" => Ok(None),
            Endpoint::Named(s) => Err(CliError::Usage(format!("potential file: b must be a number or \"inf\", got \"{s}\""))),
        }
    }
}

impl PotentialFile {
    pub fn pieces(&self) -> Vec<QPiece> {
        match &self.q {
            QField::One(p) => vec![p.clone()],
            QField::Sum(v) => v.clone(),
        }
    }

    pub fn to_spec(&self) -> Result<PotentialSpec, CliError> {
        let l = AngularMomentum::new(self.l).map_err(|e| CliError::Usage(format!("l: {e}")))?;
        let terms = self.pieces().iter().filter_map(QPiece::term).collect();
        PotentialSpec::new(l, self.gamma, terms, self.b.cutoff()?).map_err(|e| CliError::Usage(format!("potential: {e}")))
    }
}
