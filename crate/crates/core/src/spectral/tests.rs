use super::*;
use crate::potential::Term;
use crate::specfun::{model_m, model_rho, sqrt_upper, AngularMomentum};

fn l(v: f64) -> AngularMomentum {
    AngularMomentum::new(v).unwrap()
}

fn exp_decay(lv: f64) -> PotentialSpec {
    PotentialSpec::free(l(lv)).with_term(Term::Exp { amp: 1.0, rate: 1.0 }).unwrap()
}

fn well(depth: f64) -> PotentialSpec {
    PotentialSpec::free(l(0.0)).with_term(Term::Step { value: -depth, from: 0.0, to: 1.0 }).unwrap()
}

fn zs() -> [C64; 5] {
    [C64::new(-3.0, 2.0), C64::new(5.0, 0.5), C64::new(0.0, 40.0), C64::new(-200.0, 1.0), C64::new(1e3, 1e3)]
}

#[test]
fn free_m_is_the_model_function() {
    for lv in [0.0, 0.25, 0.75] {
        let pot = PotentialSpec::free(l(lv));
        for z in zs() {
            let m = weyl_m(&pot, z, 0.0).unwrap();
            assert_eq!(m.route, MRoute::Jost);
            let ml = model_m(l(lv), z).unwrap();
            assert!((m.m - ml).norm() < 1e-7 * ml.norm(), "l={lv} z={z}: {} vs {ml}", m.m);
        }
    }
}

#[test]
fn constant_potential_shifts_the_energy() {
    for c in [-1.0, 0.5, 2.0] {
        let pot = PotentialSpec::free(l(0.0)).with_term(Term::Constant(c)).unwrap();
        for z in zs() {
            let m = weyl_m(&pot, z, 0.0).unwrap().m;
            // −√(c − z) on the principal branch
            let exact = -crate::specfun::sqrt_principal(C64::new(c, 0.0) - z);
            assert!((m - exact).norm() < 1e-8 * exact.norm(), "c={c} z={z}: {m} vs {exact}");
        }
    }
}

#[test]
fn truncated_free_problem_has_cotangent_m() {
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    for z in zs() {
        let m = weyl_m(&pot, z, 0.0).unwrap();
        assert_eq!(m.route, MRoute::Truncated);
        let k = sqrt_upper(z);
        let want = -k * k.cos() / k.sin();
        assert!((m.m - want).norm() < 1e-8 * want.norm().max(1.0), "z={z}");
    }
    // along iy the truncated m approaches the half-line one
    let z = C64::new(0.0, 1e4);
    let m = weyl_m(&pot, z, 0.0).unwrap().m;
    assert!((m / model_m(l(0.0), z).unwrap() - 1.0).norm() < 1e-10);
}

#[test]
fn herglotz_and_conjugation() {
    for pot in [exp_decay(0.0), exp_decay(0.25), well(3.0)] {
        for (i, z) in zs().iter().chain(&[C64::new(0.1, 0.1), C64::new(30.0, 3.0), C64::new(-1.0, 9.0), C64::new(7.0, 0.01)]).enumerate() {
            let m = weyl_m(&pot, *z, 0.0).unwrap().m;
            assert!(m.im * z.im > 0.0, "sample {i}: {m}");
            let mc = weyl_m(&pot, z.conj(), 0.0).unwrap().m;
            assert!((mc - m.conj()).norm() < 1e-9 * m.norm(), "sample {i}");
        }
    }
}

#[test]
fn free_density() {
    let d = spectral_density(&PotentialSpec::free(l(0.0)), &[1.0]).unwrap()[0];
    assert!((d - 1.0 / PI).abs() < 1e-10);
    for lv in [-0.5, 0.25, 1.0, 2.5] {
        let pot = PotentialSpec::free(l(lv));
        for lam in [0.01, 1.0, 250.0] {
            let d = spectral_density(&pot, &[lam]).unwrap()[0];
            let want = model_density(l(lv), lam);
            assert!((d / want - 1.0).abs() < 1e-8, "l={lv} lam={lam}");
        }
    }
}

#[test]
fn density_is_the_boundary_value_of_im_m() {
    let pot = exp_decay(0.0);
    for lam in [1.0, 4.0, 17.0, 60.0, 100.0] {
        let d = spectral_density(&pot, &[lam]).unwrap()[0];
        let m = weyl_m(&pot, C64::new(lam, 1e-6 * lam), 0.0).unwrap().m;
        assert!((PI * d / m.im - 1.0).abs() < 0.01, "lam={lam}");
    }
}

#[test]
fn dirichlet_eigenvalues_and_norming_constants_of_the_free_interval() {
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    let ev = eigenvalues(&pot, 0.0, (-10.0, 1000.0)).unwrap();
    assert_eq!(ev.len(), 10);
    for (i, lam) in ev.iter().enumerate() {
        let n = (i + 1) as f64;
        assert!((lam / (n * PI).powi(2) - 1.0).abs() < 1e-10, "n={n}");
        let g = norming_constant(&pot, *lam).unwrap();
        assert!((g / (2.0 * n * n * PI * PI) - 1.0).abs() < 1e-8, "n={n}");
    }
}

#[test]
fn neumann_condition_at_the_right_end() {
    // −y′(1) = 0 with y = sin(kx)/k: cos k = 0
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    let ev = eigenvalues(&pot, PI / 2.0, (0.0, 150.0)).unwrap();
    assert_eq!(ev.len(), 4);
    for (i, lam) in ev.iter().enumerate() {
        let want = ((i as f64 + 0.5) * PI).powi(2);
        assert!((lam / want - 1.0).abs() < 1e-10);
    }
}

#[test]
fn eigenvalues_decrease_as_the_interval_grows() {
    let a = exp_decay(0.25).with_cutoff(Some(1.0));
    let b = exp_decay(0.25).with_cutoff(Some(1.3));
    let ea = eigenvalues(&a, 0.0, (-5.0, 800.0)).unwrap();
    let eb = eigenvalues(&b, 0.0, (-5.0, 800.0)).unwrap();
    assert!(eb.len() >= ea.len());
    for (x, y) in ea.iter().zip(&eb) {
        assert!(y <= x);
    }
}

#[test]
fn half_line_norming_constant_matches_the_residue_of_m() {
    let pot = well(10.0);
    let ev = eigenvalues(&pot, 0.0, (bound_window(&pot), 0.0)).unwrap();
    assert_eq!(ev.len(), 1);
    let g = norming_constant(&pot, ev[0]).unwrap();
    let r = m_residue(&pot, ev[0], 0.25 * ev[0].abs()).unwrap();
    assert!(g > 0.0);
    assert!((g + r).abs() < 0.01 * g, "{g} vs {r}");
}

#[test]
fn window_errors() {
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    assert!(eigenvalues(&pot, 0.0, (5.0, 1.0)).is_err());
    assert!(eigenvalues(&pot, 4.0, (0.0, 1.0)).is_err());
    assert!(weyl_m(&pot, C64::new(2.0, 0.0), 0.0).is_err());
}

#[test]
fn spectral_function_normalization() {
    let free = PotentialSpec::free(l(0.0));
    assert_eq!(spectral_function(&free, 0.0, 0.0).unwrap(), 0.0);
    let r = spectral_function(&free, 1.0, 0.0).unwrap();
    assert!((r - 2.0 / (3.0 * PI)).abs() < 1e-8);
    assert!((r - model_rho(l(0.0), 1.0)).abs() < 1e-8);
    // below the spectrum: constant
    let w = well(10.0);
    let lam1 = eigenvalues(&w, 0.0, (bound_window(&w), 0.0)).unwrap()[0];
    let g = norming_constant(&w, lam1).unwrap();
    let below = spectral_function(&w, lam1 - 1.0, 0.0).unwrap();
    assert!((below + g).abs() < 1e-8 * g);
    assert!((spectral_function(&w, lam1 - 2.0, 0.0).unwrap() - below).abs() < 1e-12);
    // midpoint convention at the jump
    let mid = spectral_function(&w, lam1, 0.0).unwrap();
    assert!((mid + 0.5 * g).abs() < 1e-8 * g);
    assert_eq!(spectral_function(&w, 0.5 * lam1, 0.0).unwrap(), 0.0);
}

#[test]
fn interval_spectral_function_jumps_by_norming_constants() {
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    let l1 = PI * PI;
    let g1 = 2.0 * PI * PI;
    assert!((spectral_function(&pot, l1, 0.0).unwrap() - 0.5 * g1).abs() < 1e-6);
    assert!((spectral_function(&pot, 20.0, 0.0).unwrap() - g1).abs() < 1e-6);
    assert!((spectral_function(&pot, 50.0, 0.0).unwrap() - 5.0 * g1).abs() < 1e-5);
}

#[test]
fn asymptotics_report_ratios() {
    let (rows, warn) = asymptotics_report(&PotentialSpec::free(l(0.0)), PI / 2.0, &[10.0, 100.0], 0.0).unwrap();
    assert!(warn.is_none());
    for r in &rows {
        assert!((r.im_ratio - 1.0).abs() < 1e-8);
        assert!((r.density_ratio.unwrap() - 1.0).abs() < 1e-8);
    }
    let (rows, _) = asymptotics_report(&exp_decay(0.0), PI / 2.0, &[1e2, 1e3, 1e4], 0.0).unwrap();
    let dev: Vec<f64> = rows.iter().map(|r| (r.im_ratio - 1.0).abs()).collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < 0.05);
    let (_, warn) = asymptotics_report(&PotentialSpec::free(l(1.5)), PI / 2.0, &[10.0], 0.0).unwrap();
    assert!(warn.is_some());
}
