//! Bundled verification suites. Each returns its table and a verdict; the verdict is
//! also written as a note.

use std::f64::consts::PI;

use besselspec_core::krein::{bessel_m_tilde, liouville_transform, string_m};
use besselspec_core::potential::PotentialSpec;
use besselspec_core::solutions::{jost_solution, regular_solution, theta_solution, GridSpec};
use besselspec_core::spectral::{asymptotics_report, eigenvalues};
use besselspec_core::specfun::ComplexEnergy;
use besselspec_core::Complex64;

use crate::commands::{par_map, reconstruct};
use crate::table::{Row, Table};
use crate::{CliError, PotentialArgs, Suite};

type Res<T> = Result<T, CliError>;

pub(crate) fn run(suite: Suite, pa: &PotentialArgs) -> Res<(Table, bool)> {
    let pot = pa.spec()?;
    let (mut t, pass, criterion) = match suite {
        Suite::TheoremMain => theorem_main(&pot)?,
        Suite::EigenAsymp => eigen_asymp(&pot)?,
        Suite::StringIdentity => string_identity(&pot)?,
        Suite::Roundtrip => roundtrip(&pot)?,
        Suite::Wronskians => wronskians(&pot)?,
    };
    t.note(format!("verdict: {} ({criterion})", if pass { "PASS" } else { "FAIL" }));
    Ok((t, pass))
}

/// Interval problems default to (0, 1) when no endpoint was given.
fn on_interval(pot: &PotentialSpec, t: &mut Table) -> (PotentialSpec, f64) {
    match pot.cutoff {
        Some(b) => (pot.clone(), b),
        None => {
            t.note("no --b given; using b = 1");
            (pot.clone().with_cutoff(Some(1.0)), 1.0)
        }
    }
}

fn theorem_main(pot: &PotentialSpec) -> Res<(Table, bool, String)> {
    let mags = [1e1, 1e2, 1e3, 1e4, 1e5];
    let (rows, warning) = asymptotics_report(pot, PI / 2.0, &mags, 0.0)?;
    let mut t = Table::new("verify theorem-main", &["r", "z*", "m*", "m_model*", "im_ratio", "density_ratio"]);
    for r in &rows {
        t.push(Row::new().real(r.r).complex(r.z).complex(r.m).complex(r.m_model).real(r.im_ratio).real(r.density_ratio.unwrap_or(f64::NAN)));
    }
    if let Some(w) = warning {
        t.note(w);
    }
    let first = (rows[0].im_ratio - 1.0).abs();
    let last = (rows[rows.len() - 1].im_ratio - 1.0).abs();
    Ok((t, last < 0.05 && last <= first, format!("|Im m / Im m_l - 1| = {last:.2e} at z = 1e5 i, < 0.05 and not above {first:.2e} at 10 i")))
}

fn eigen_asymp(pot: &PotentialSpec) -> Res<(Table, bool, String)> {
    let mut t = Table::new("verify eigen-asymp", &["n", "lambda", "ratio"]);
    let (pot, b) = on_interval(pot, &mut t);
    let n_max = 20;
    let hi = ((n_max as f64 + 5.0) * PI / b).powi(2) + pot.constant_offset().abs();
    let ev = eigenvalues(&pot, 0.0, (-1e4, hi))?;
    // negative eigenvalues come first; count from the first positive one
    let pos: Vec<f64> = ev.iter().copied().filter(|l| *l > 0.0).collect();
    if pos.len() < n_max {
        return Err(CliError::Numerical(format!("only {} positive eigenvalues below {hi:.3e}", pos.len())));
    }
    let lead = ev.len() - pos.len();
    let mut ratio = 0.0;
    for (i, l) in ev.iter().take(lead + n_max).enumerate() {
        let n = (i + 1) as f64;
        ratio = if *l > 0.0 { n * PI / (b * l.sqrt()) } else { f64::NAN };
        t.push(Row::new().real(i + 1).real(*l).real(ratio));
    }
    let dev = (ratio - 1.0).abs();
    Ok((t, dev < 0.02, format!("|n pi / (b sqrt(lambda_n)) - 1| = {dev:.2e} at n = {}, < 0.02", lead + n_max)))
}

fn string_identity(pot: &PotentialSpec) -> Res<(Table, bool, String)> {
    let mut t = Table::new("verify string-identity", &["z*", "M*", "m_tilde*", "abs_diff"]);
    let (pot, _) = on_interval(pot, &mut t);
    if pot.l.value() >= 0.5 {
        return Err(CliError::Usage("string-identity needs --l below 1/2".into()));
    }
    let zs = [
        Complex64::new(1.0, 1.0),
        Complex64::new(-30.0, 5.0),
        Complex64::new(100.0, 300.0),
        Complex64::new(0.0, 2e3),
        Complex64::new(5.0, 0.1),
        Complex64::new(-200.0, 20.0),
        Complex64::new(40.0, 4.0),
        Complex64::new(0.5, 50.0),
    ];
    let sm = liouville_transform(&pot, 0.0, None)?;
    let pairs = par_map(&zs, |z| Ok((string_m(&sm, *z)?, bessel_m_tilde(&pot, &sm, 0.0, *z, &[])?.m_tilde)))?;
    let mut worst = 0.0f64;
    for (z, (big_m, mt)) in zs.iter().zip(pairs) {
        let d = (big_m - mt).norm();
        worst = worst.max(d);
        t.push(Row::new().complex(*z).complex(big_m).complex(mt).real(d));
    }
    Ok((t, worst < 1e-6, format!("max |M - m~| = {worst:.2e}, < 1e-6")))
}

fn roundtrip(pot: &PotentialSpec) -> Res<(Table, bool, String)> {
    if pot.cutoff.is_some() {
        return Err(CliError::Usage("roundtrip needs a half-line potential (--b inf)".into()));
    }
    let ks: Vec<f64> = (1..=40).map(|i| 0.5 * i as f64).collect();
    let (mut t, worst) = reconstruct(pot, &ks)?;
    t.command = "verify roundtrip".into();
    Ok((t, worst < 0.01, format!("max relative error of rebuilt |f| = {worst:.2e}, < 0.01")))
}

fn wronskians(pot: &PotentialSpec) -> Res<(Table, bool, String)> {
    let mut t = Table::new("verify wronskians", &["pair", "z*", "x", "W*", "err"]);
    let mut xs = vec![0.1, 0.5, 1.0, 2.0];
    if let Some(b) = pot.cutoff {
        xs.retain(|x| *x < b);
        xs.push(b);
    }
    let grid = GridSpec::new(xs.clone())?;
    let zs = [Complex64::new(1.0, 1.0), Complex64::new(-5.0, 2.0), Complex64::new(20.0, 0.5), Complex64::new(0.0, 50.0)];
    let waves = par_map(&zs, |z| {
        let e = ComplexEnergy::from_z(*z);
        Ok((regular_solution(pot, e, &grid)?, theta_solution(pot, e, &grid)?))
    })?;
    let mut worst = 0.0f64;
    for (z, (phi, th)) in zs.iter().zip(&waves) {
        for (j, x) in xs.iter().enumerate() {
            let w = th.value(j) * phi.deriv(j) - th.deriv(j) * phi.value(j);
            let scale = (th.value(j) * phi.deriv(j)).norm().max((th.deriv(j) * phi.value(j)).norm()).max(1.0);
            let err = (w - 1.0).norm() / scale;
            worst = worst.max(err);
            t.push(Row::new().real("theta,phi").complex(*z).real(*x).complex(w).real(err));
        }
    }
    if pot.cutoff.is_none() {
        let ks = [1.0, 3.0, 10.0];
        let pairs = par_map(&ks, |k| {
            let kc = Complex64::new(*k, 0.0);
            Ok((jost_solution(pot, -kc, &grid)?, jost_solution(pot, kc, &grid)?))
        })?;
        for (k, (fm, fp)) in ks.iter().zip(&pairs) {
            let want = Complex64::new(0.0, 2.0 * k);
            for (j, x) in xs.iter().enumerate() {
                let w = fm.value(j) * fp.deriv(j) - fm.deriv(j) * fp.value(j);
                let err = (w - want).norm() / (2.0 * k);
                worst = worst.max(err);
                t.push(Row::new().real("f(-k),f(k)").complex(Complex64::new(k * k, 0.0)).real(*x).complex(w).real(err));
            }
        }
    }
    Ok((t, worst < 1e-8, format!("max scaled Wronskian error = {worst:.2e}, < 1e-8")))
}
