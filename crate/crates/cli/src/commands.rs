//! One adapter per subcommand: parse sweeps, call the library, fill a table.

use besselspec_core::krein::{bessel_m_tilde, k_nu, limit_order, liouville_transform, string_m, StringModel};
use besselspec_core::potential::PotentialSpec;
use besselspec_core::scattering::{
    bound_states, jost_f, jost_function, phase_shift, reconstruct_jost, s_matrix, uniqueness_compare, PhaseTable,
};
use besselspec_core::solutions::{jost_solution, regular_solution, theta_solution_with, GridSpec, ThetaRoute, WaveSample};
use besselspec_core::spectral::{eigenvalues, norming_constant, spectral_density, spectral_function, weyl_m, weyl_m_route, MRoute};
use besselspec_core::specfun::ComplexEnergy;
use besselspec_core::Complex64;
use rayon::prelude::*;

use crate::sweep::{parse_complexes, parse_reals, parse_window};
use crate::table::{Row, Table};
use crate::{inline_q, read_potential, CliError, Command, PotentialArgs, RouteArg, ThetaRouteArg};

type Res<T> = Result<T, CliError>;

/// Order-preserving parallel map.
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Res<U> + Sync + Send) -> Res<Vec<U>> {
    items.par_iter().map(f).collect()
}

pub(crate) fn run(cmd: &Command, pa: &PotentialArgs) -> Res<Table> {
    let pot = pa.spec()?;
    match cmd {
        Command::Phi { z, x } => phi(&pot, &parse_complexes("--z", z)?, &parse_reals("--x", x)?),
        Command::Theta { z, x, route } => theta(&pot, &parse_complexes("--z", z)?, &parse_reals("--x", x)?, *route),
        Command::Jost { k, x } => jost(&pot, &parse_complexes("--k", k)?, x.as_deref()),
        Command::M { z, beta, route } => m(&pot, &parse_complexes("--z", z)?, *beta, *route),
        Command::Density { lambda } => density(&pot, &parse_reals("--lambda", lambda)?),
        Command::Rho { lambda, beta } => rho(&pot, &parse_reals("--lambda", lambda)?, *beta),
        Command::Eigen { window, beta } => eigen(&pot, parse_window("--window", window)?, *beta),
        Command::Norming { lambda, window, beta } => norming(&pot, lambda.as_deref(), window.as_deref(), *beta),
        Command::Phase { k } => phase(&pot, &parse_reals("--k", k)?),
        Command::Smatrix { k } => smatrix(&pot, &parse_reals("--k", k)?),
        Command::Reconstruct { k } => Ok(reconstruct(&pot, &parse_reals("--k", k)?)?.0),
        Command::Krein { z, beta, lambda0 } => krein(&pot, &parse_complexes("--z", z)?, *beta, *lambda0),
        Command::LimitOrder { power, beta } => limit(&pot, *power, *beta),
        Command::Compare { other, other_q, c, k } => compare(&pot, pa, other.as_deref(), other_q, *c, &parse_reals("--k", k)?),
        Command::Verify { .. } => unreachable!("dispatched separately"),
    }
}

/// Grid over the requested points (sorted, deduplicated) and, for each request, its node index.
fn grid_for(flag: &str, xs: &[f64]) -> Res<(GridSpec, Vec<usize>)> {
    let mut nodes: Vec<f64> = xs.to_vec();
    if nodes.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(CliError::Usage(format!("{flag}: points must be positive and finite")));
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    if nodes.len() == 1 {
        // grids need two nodes; the extra one is not reported
        nodes.push(nodes[0] * 1.001);
    }
    let idx = xs.iter().map(|x| nodes.partition_point(|n| n < x)).collect();
    Ok((GridSpec::new(nodes)?, idx))
}

fn wave_table(name: &str, zs: &[Complex64], xs: &[f64], sample: impl Fn(Complex64, &GridSpec) -> Res<WaveSample> + Sync + Send) -> Res<Table> {
    let (grid, idx) = grid_for("--x", xs)?;
    let waves = par_map(zs, |z| sample(*z, &grid))?;
    let mut t = Table::new(name, &["z*", "x", "value*", "deriv*"]);
    for (z, w) in zs.iter().zip(&waves) {
        for (x, &j) in xs.iter().zip(&idx) {
            t.push(Row::new().complex(*z).real(*x).complex(w.value(j)).complex(w.deriv(j)));
        }
    }
    Ok(t)
}

fn phi(pot: &PotentialSpec, zs: &[Complex64], xs: &[f64]) -> Res<Table> {
    wave_table("phi", zs, xs, |z, g| Ok(regular_solution(pot, ComplexEnergy::from_z(z), g)?))
}

fn theta(pot: &PotentialSpec, zs: &[Complex64], xs: &[f64], route: ThetaRouteArg) -> Res<Table> {
    let r = match route {
        ThetaRouteArg::Iterate => ThetaRoute::Iterate,
        ThetaRouteArg::FreeStart => ThetaRoute::FreeStart,
    };
    let mut t = wave_table("theta", zs, xs, |z, g| Ok(theta_solution_with(pot, ComplexEnergy::from_z(z), g, r)?))?;
    if r == ThetaRoute::FreeStart {
        t.note("free-start theta is determined only up to an added multiple of phi");
    }
    Ok(t)
}

fn jost(pot: &PotentialSpec, ks: &[Complex64], x: Option<&str>) -> Res<Table> {
    if let Some(x) = x {
        let xs = parse_reals("--x", x)?;
        let mut t = wave_table("jost", ks, &xs, |k, g| Ok(jost_solution(pot, k, g)?))?;
        t.columns[0] = "k_re".into();
        t.columns[1] = "k_im".into();
        return Ok(t);
    }
    let vals = par_map(ks, |k| Ok(jost_function(pot, *k)?))?;
    let mut t = Table::new("jost", &["k*", "f*", "g*"]);
    for v in vals {
        let g = v.g.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        t.push(Row::new().complex(v.k).complex(v.f).complex(g));
        t.note(v.note);
    }
    Ok(t)
}

fn m(pot: &PotentialSpec, zs: &[Complex64], beta: f64, route: RouteArg) -> Res<Table> {
    let samples = par_map(zs, |z| {
        Ok(match route {
            RouteArg::Auto => weyl_m(pot, *z, beta)?,
            RouteArg::Jost => weyl_m_route(pot, *z, MRoute::Jost, beta)?,
            RouteArg::String => weyl_m_route(pot, *z, MRoute::String, beta)?,
            RouteArg::Truncated => weyl_m_route(pot, *z, MRoute::Truncated, beta)?,
        })
    })?;
    let mut t = Table::new("m", &["z*", "m*", "route"]);
    for s in samples {
        let r = match s.route {
            MRoute::Jost => "jost",
            MRoute::String => "string",
            MRoute::Truncated => "truncated",
        };
        t.push(Row::new().complex(s.z).complex(s.m).real(r));
        t.note(s.ambiguity_note);
    }
    Ok(t)
}

fn density(pot: &PotentialSpec, lambdas: &[f64]) -> Res<Table> {
    let d = par_map(lambdas, |l| Ok(spectral_density(pot, &[*l])?[0]))?;
    let mut t = Table::new("density", &["lambda", "density"]);
    for (l, v) in lambdas.iter().zip(d) {
        t.push(Row::new().real(*l).real(v));
    }
    Ok(t)
}

fn rho(pot: &PotentialSpec, lambdas: &[f64], beta: f64) -> Res<Table> {
    let r = par_map(lambdas, |l| Ok(spectral_function(pot, *l, beta)?))?;
    let mut t = Table::new("rho", &["lambda", "rho"]);
    for (l, v) in lambdas.iter().zip(r) {
        t.push(Row::new().real(*l).real(v));
    }
    Ok(t)
}

fn eigen(pot: &PotentialSpec, window: (f64, f64), beta: f64) -> Res<Table> {
    let ev = eigenvalues(pot, beta, window)?;
    let mut t = Table::new("eigen", &["n", "lambda"]);
    for (i, l) in ev.iter().enumerate() {
        t.push(Row::new().real(i + 1).real(*l));
    }
    Ok(t)
}

fn norming(pot: &PotentialSpec, lambda: Option<&str>, window: Option<&str>, beta: f64) -> Res<Table> {
    let lambdas = match (lambda, window) {
        (Some(l), None) => parse_reals("--lambda", l)?,
        (None, Some(w)) => eigenvalues(pot, beta, parse_window("--window", w)?)?,
        _ => return Err(CliError::Usage("norming: give exactly one of --lambda and --window".into())),
    };
    let g = par_map(&lambdas, |l| Ok(norming_constant(pot, *l)?))?;
    let mut t = Table::new("norming", &["lambda", "gamma"]);
    for (l, v) in lambdas.iter().zip(g) {
        t.push(Row::new().real(*l).real(v));
    }
    Ok(t)
}

fn phase(pot: &PotentialSpec, ks: &[f64]) -> Res<Table> {
    let d = phase_shift(pot, ks)?;
    let mut t = Table::new("phase", &["k", "delta"]);
    for (k, v) in ks.iter().zip(d) {
        t.push(Row::new().real(*k).real(v));
    }
    Ok(t)
}

fn smatrix(pot: &PotentialSpec, ks: &[f64]) -> Res<Table> {
    let s = par_map(ks, |k| Ok(s_matrix(pot, *k)?))?;
    let mut t = Table::new("smatrix", &["k", "S*", "abs_S"]);
    for (k, v) in ks.iter().zip(s) {
        t.push(Row::new().real(*k).complex(v).real(v.norm()));
    }
    Ok(t)
}

/// Phase grid for reconstruction: fine and linear up to 40, then geometric to 400.
fn phase_grid() -> Vec<f64> {
    let mut ks = Vec::new();
    let mut k = 0.01;
    while k < 40.0 {
        ks.push(k);
        k += 0.02;
    }
    while k < 400.0 {
        ks.push(k);
        k *= 1.01;
    }
    ks
}

/// |f| rebuilt from the phase shift and bound states next to the direct value.
pub(crate) fn reconstruct(pot: &PotentialSpec, ks: &[f64]) -> Res<(Table, f64)> {
    if ks.iter().any(|k| !(*k > 0.0)) {
        return Err(CliError::Usage("--k: evaluation points must be positive".into()));
    }
    let grid = phase_grid();
    // one call: the phase is continued downward from the largest k
    let delta = phase_shift(pot, &grid)?;
    let table = PhaseTable { k: grid, delta };
    let bs = bound_states(pot)?;
    let rebuilt = reconstruct_jost(&table, &bs.kappas, pot.l, ks)?;
    let direct = par_map(ks, |k| Ok(jost_f(pot, Complex64::new(*k, 0.0))?.norm()))?;
    let mut t = Table::new("reconstruct", &["k", "abs_f", "abs_f_rebuilt", "rel_err"]);
    let mut worst = 0.0f64;
    for ((k, d), r) in ks.iter().zip(&direct).zip(&rebuilt) {
        let e = (r / d - 1.0).abs();
        worst = worst.max(e);
        t.push(Row::new().real(*k).real(*d).real(*r).real(e));
    }
    t.note(format!("bound states: {} (kappa = {:?})", bs.count, bs.kappas));
    t.note(format!("max rel err: {worst:.3e}"));
    Ok((t, worst))
}

fn krein(pot: &PotentialSpec, zs: &[Complex64], beta: f64, lambda0: Option<f64>) -> Res<Table> {
    let sm = liouville_transform(pot, beta, lambda0)?;
    let rows = par_map(zs, |z| Ok((string_m(&sm, *z)?, bessel_m_tilde(pot, &sm, beta, *z, &[])?.m_tilde)))?;
    let mut t = Table::new("krein", &["z*", "M*", "m_tilde*", "abs_diff"]);
    for (z, (big_m, mt)) in zs.iter().zip(rows) {
        t.push(Row::new().complex(*z).complex(big_m).complex(mt).real((big_m - mt).norm()));
    }
    t.note(format!("string length a = {:.16e}, beta~ = {:.16e}", sm.a, sm.beta_tilde));
    if let Some(t0) = sm.theta0() {
        t.note(format!("lambda0 = {}", t0.lambda0));
    }
    Ok(t)
}

fn limit(pot: &PotentialSpec, power: Option<f64>, beta: f64) -> Res<Table> {
    let sm = match power {
        Some(alpha) => StringModel::power(alpha, 1.0, 0.0)?,
        None => liouville_transform(pot, beta, None)?,
    };
    let lod = limit_order(&sm.mass_samples())?;
    let nu = if lod.alpha.is_infinite() { 0.0 } else { 1.0 / (1.0 + lod.alpha) };
    let mut t = Table::new("limit-order", &["alpha", "nu", "K_nu", "samples"]);
    t.push(Row::new().real(lod.alpha).real(nu).real(k_nu(nu)).real(lod.samples.len()));
    Ok(t)
}

fn compare(pot: &PotentialSpec, pa: &PotentialArgs, other: Option<&std::path::Path>, other_q: &[String], c: f64, ks: &[f64]) -> Res<Table> {
    let second = match (other, other_q.is_empty()) {
        (Some(path), true) => read_potential(path)?.to_spec()?,
        (None, false) => {
            let mut doc = crate::potential_file::PotentialFile { l: pa.l, gamma: pa.gamma, q: inline_q(other_q)?, b: crate::potential_file::Endpoint::parse(&pa.b)? };
            if pa.potential.is_some() {
                let first = read_potential(pa.potential.as_deref().unwrap())?;
                doc.l = first.l;
                doc.gamma = first.gamma;
                doc.b = first.b;
            }
            doc.to_spec()?
        }
        _ => return Err(CliError::Usage("compare: give exactly one of --other and --other-q".into())),
    };
    let r = uniqueness_compare(pot, &second, c, ks)?;
    let mut t = Table::new("compare", &["phase_diff", "eigenvalue_diff", "norming_diff", "density_diff", "potential_diff", "count_mismatch"]);
    t.push(
        Row::new()
            .real(r.phase_diff)
            .real(r.eigenvalue_diff)
            .real(r.norming_diff)
            .real(r.density_diff)
            .real(r.potential_diff)
            .real(if r.count_mismatch { "yes" } else { "no" }),
    );
    Ok(t)
}
