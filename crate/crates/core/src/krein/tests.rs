use super::*;
use crate::potential::Term;
use crate::spectral::{weyl_m_route, MRoute};

fn l(v: f64) -> AngularMomentum {
    AngularMomentum::new(v).unwrap()
}

fn exp_on_unit(lv: f64) -> PotentialSpec {
    PotentialSpec::free(l(lv)).with_term(Term::Exp { amp: 1.0, rate: 1.0 }).unwrap().with_cutoff(Some(1.0))
}

fn zs() -> [C64; 4] {
    [C64::new(1.0, 1.0), C64::new(-30.0, 5.0), C64::new(100.0, 300.0), C64::new(0.0, 2e3)]
}

#[test]
fn homogeneous_string_has_tangent_m() {
    let sm = StringModel::power(1.0, 1.0, 0.0).unwrap();
    assert_eq!(sm.shift(), 0.0);
    for z in zs() {
        let k = z.sqrt();
        let want = k.tan() / k;
        let m = string_m(&sm, z).unwrap();
        assert!((m - want).norm() < 1e-9 * want.norm(), "z={z}: {m} vs {want}");
        // c and s grow like e^{a|Im √z|}, so W(c, s) is only meaningful at moderate z
        if z.norm() < 100.0 {
            assert!((string_wronskian(&sm, z).unwrap() - 1.0).norm() < 1e-9);
        }
    }
    // β̃ = π/2 is a Neumann end at a: M = s′(a)/c′(a)
    let sm = StringModel::power(1.0, 2.0, PI / 2.0).unwrap();
    let z = C64::new(3.0, 1.0);
    let k = z.sqrt();
    let want = -(k * 2.0).cos() / (k * (k * 2.0).sin());
    let m = string_m(&sm, z).unwrap();
    assert!((m - want).norm() < 1e-9 * want.norm(), "{m} vs {want}");
}

#[test]
fn string_m_is_herglotz() {
    let sm = StringModel::power(1.0 / 3.0, 1.0, 0.4).unwrap();
    for z in zs() {
        let m = string_m(&sm, z).unwrap();
        assert!(m.im > 0.0, "z={z}");
        assert!((string_m(&sm, z.conj()).unwrap() - m.conj()).norm() < 1e-9 * m.norm());
    }
    assert!(string_m(&sm, C64::new(2.0, 0.0)).is_err());
}

#[test]
fn power_string_mass_function() {
    let sm = StringModel::power(0.5, 2.0, 0.0).unwrap();
    for x in [1e-4, 0.3, 1.7] {
        assert!((sm.xi_of_x(x) - x).abs() < 1e-12);
        assert!((sm.mass_at_x(x) / x.powf(0.5) - 1.0).abs() < 1e-10);
        assert!((sm.r_at_x(x) / (0.5 * x.powf(-0.5)) - 1.0).abs() < 1e-12);
    }
    let lod = limit_order(&sm.mass_samples()).unwrap();
    assert!((lod.alpha - 0.5).abs() < 1e-6);
    assert!(StringModel::power(0.0, 1.0, 0.0).is_err());
}

#[test]
fn theta0_is_positive_and_solves_the_equation() {
    let pot = exp_on_unit(0.25);
    let sm = liouville_transform(&pot, 0.0, None).unwrap();
    let t0 = sm.theta0().unwrap();
    let e0 = ComplexEnergy::real(t0.lambda0);
    let phi = solution_at(&pot, e0, Start::Regular, &[0.2, 0.7]).unwrap();
    let mut w = Vec::new();
    for (i, x) in [0.2, 0.7].iter().enumerate() {
        let (t, d) = t0.eval(*x);
        assert!(t > 0.0);
        let v = phi[i].value();
        w.push(t * v[1].re - d * v[0].re);
    }
    // Wronskian with φ₀ is constant
    assert!((w[0] - w[1]).abs() < 1e-8 * w[0].abs(), "{w:?}");
    for x in [1e-10, 1e-5, 0.01, 0.5, 1.0] {
        assert!(t0.eval(x).0 > 0.0);
    }
}

#[test]
fn liouville_requires_limit_circle() {
    let pot = PotentialSpec::free(l(0.75)).with_cutoff(Some(1.0));
    assert!(liouville_transform(&pot, 0.0, None).is_err());
}

#[test]
fn string_and_bessel_sides_agree() {
    for (lv, beta) in [(0.0, 0.0), (0.25, 0.0), (0.0, 0.7), (0.25, 1.2)] {
        let pot = exp_on_unit(lv);
        let sm = liouville_transform(&pot, beta, None).unwrap();
        for z in zs() {
            let m_big = string_m(&sm, z).unwrap();
            let side = bessel_m_tilde(&pot, &sm, beta, z, &[0.3, 0.6]).unwrap();
            assert!((m_big - side.m_tilde).norm() < 1e-8 * m_big.norm(), "l={lv} beta={beta} z={z}");
            // the transformed solutions are the string's c and s
            let ss = sm.solutions_at(z, &[0.3, 0.6]).unwrap();
            for i in 0..2 {
                assert!((ss.c[i] - side.c_like[i]).norm() < 1e-7 * ss.c[i].norm());
                assert!((ss.s[i] - side.s_like[i]).norm() < 1e-7 * ss.s[i].norm());
            }
        }
    }
}

#[test]
fn string_route_reproduces_the_truncated_m() {
    for (lv, beta) in [(0.25, 0.0), (0.0, 0.7)] {
    let pot = exp_on_unit(lv);
    for z in [C64::new(2.0, 3.0), C64::new(-10.0, 40.0)] {
        let direct = weyl_m_route(&pot, z, MRoute::Truncated, beta).unwrap().m;
        let via = weyl_m_route(&pot, z, MRoute::String, beta).unwrap().m;
        assert!((direct - via).norm() < 1e-8 * direct.norm(), "z={z}: {direct} vs {via}");
    }
    }
}

#[test]
fn limit_orders_of_bessel_strings() {
    for lv in [0.0, 0.25] {
        let sm = liouville_transform(&PotentialSpec::free(l(lv)).with_cutoff(Some(1.0)), 0.0, None).unwrap();
        let lod = limit_order(&sm.mass_samples()).unwrap();
        assert!((lod.alpha - bessel_alpha(lv)).abs() < 1e-3 * bessel_alpha(lv), "l={lv}: {}", lod.alpha);
    }
    let sm = liouville_transform(&PotentialSpec::free(l(-0.5)).with_cutoff(Some(1.0)), 0.0, None).unwrap();
    assert!(limit_order(&sm.mass_samples()).unwrap().alpha.is_infinite());
}

#[test]
fn limit_order_rejects_wild_samples() {
    let samples: Vec<(f64, f64)> = (0..60).map(|i| {
        let x = 1e-7 * 1.4f64.powi(i);
        (x, if i % 2 == 0 { x.ln() } else { 3.0 * x.ln() })
    }).collect();
    assert!(matches!(limit_order(&samples), Err(Error::Inconclusive { .. })));
    assert!(limit_order(&samples[..4]).is_err());
}

#[test]
fn bennewitz_prediction_for_a_power_string() {
    let sm = StringModel::power(1.0 / 3.0, 1.0, 0.0).unwrap();
    let lod = limit_order(&sm.mass_samples()).unwrap();
    let mu = C64::new(0.0, 1.0);
    let rho = 1e4;
    let p = bennewitz_asymptote(&lod, mu, rho).unwrap();
    let m = string_m(&sm, mu * rho).unwrap();
    assert!((m / p - 1.0).norm() < 1e-3);
    // phase e^{iπν/2}, ν = 3/4
    assert!((p.arg() - 0.375 * PI).abs() < 1e-9);
    assert!(bennewitz_asymptote(&lod, C64::new(0.0, -1.0), rho).is_err());
}

#[test]
fn k_nu_and_constants() {
    assert_eq!(k_nu(0.0), 1.0);
    assert!((k_nu(0.5) - 1.0).abs() < 1e-14);
    assert!((a_alpha(0.0) - 1.0).abs() < 1e-15);
    assert!((bessel_alpha(0.25) - 1.0 / 3.0).abs() < 1e-15);
    for lv in [0.0, 0.1, 0.25, 0.4, -0.3] {
        let (a, b, c) = constant_identity(l(lv));
        assert!((a - c).abs() < 1e-10 * c.abs(), "l={lv}");
        assert!((b - c).abs() < 1e-10 * c.abs(), "l={lv}");
    }
}

#[test]
fn critical_case_helpers() {
    assert!((critical_g0(0.5) - 1.0 / 2f64.ln()).abs() < 1e-15);
    // R₀ ~ R̃₀ as ξ → 0
    assert!((critical_log_r0(1e-3) - critical_log_r0_tilde(1e-3)).abs() < 2e-3);
    // f̃₀ inverts 2ξ e^{2/ξ}
    let y = 1e7;
    let f = critical_f0_tilde(y).unwrap();
    assert!(((2.0 * f).ln() + 2.0 / f - y.ln()).abs() < 1e-10);
    assert!(critical_f0_tilde(5.0).is_err());
    let r = lambert_expansion_residual(1e6).unwrap();
    assert!(r > 0.0 && r < 0.03);
    assert!(lambert_expansion_residual(1e12).unwrap() < r);
    assert!(critical_p0(0.1) > 0.0);
}


#[test]
fn free_transform_closed_forms() {
    // λ₀ = 0: θ₀ = x^{-l}/(2l+1), so ξ = (2l+1) x^{2l+1}
    let sm = liouville_transform(&PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0)), 0.0, Some(0.0)).unwrap();
    assert!((sm.a - 1.0).abs() < 1e-9);
    for x in [1e-6, 0.2, 0.9] {
        assert!((sm.xi_of_x(x) - x).abs() < 1e-9);
        assert!((sm.r_at_x(x) - 1.0).abs() < 1e-9);
    }
    let sm = liouville_transform(&PotentialSpec::free(l(0.25)).with_cutoff(Some(1.0)), 0.0, Some(0.0)).unwrap();
    for x in [1e-6, 0.2, 0.9] {
        let want = 1.5 * x.powf(1.5);
        assert!((sm.xi_of_x(x) / want - 1.0).abs() < 1e-8, "x={x}");
        assert!((sm.x_of_xi(want).unwrap() / x - 1.0).abs() < 1e-8);
    }
    // R(ξ) = ξ^α / A_α
    let xi = sm.xi_of_x(0.01);
    let want = xi.powf(1.0 / 3.0) / a_alpha(0.25);
    assert!((sm.mass_at_x(0.01) / want - 1.0).abs() < 1e-7);
}

#[test]
fn positivity_failure_is_reported() {
    // λ₀ above the first Dirichlet eigenvalue π²: θ₀ must change sign on (0, 1]
    let pot = PotentialSpec::free(l(0.0)).with_cutoff(Some(1.0));
    assert!(matches!(liouville_transform(&pot, 0.0, Some(30.0)), Err(Error::Positivity { .. })));
}

#[test]
fn transform_is_isometric() {
    let pot = exp_on_unit(0.25);
    let sm = liouville_transform(&pot, 0.0, None).unwrap();
    let t0 = sm.theta0().unwrap();
    let rule = GaussRule::new(16);
    let tests: [fn(f64) -> f64; 5] = [
        |x| x.powf(1.25) * (1.0 - x),
        |x| (3.0 * x).sin(),
        |x| x * (-2.0 * x).exp(),
        |x| x.sqrt() * (x - 0.4),
        |x| (1.0 - x * x).powi(2),
    ];
    for v in tests {
        let plain = rule.integrate(|x| v(x) * v(x), 0.0, 1.0, 200);
        // ‖Uv‖² = ∫ |v(x(ξ))/θ₀|² r dξ, integrated in ξ
        let u2 = |xi: f64| {
            let x = sm.x_of_xi(xi).unwrap();
            let u = v(x) / t0.eval(x).0;
            u * u * sm.r_at_x(x)
        };
        // r has a power singularity at ξ = 0: dyadic panels toward it
        let mut mapped = 0.0;
        let mut hi = sm.a;
        for _ in 0..60 {
            mapped += rule.integrate(u2, 0.5 * hi, hi, 4);
            hi *= 0.5;
        }
        assert!((mapped - plain).abs() < 1e-8 * plain, "{mapped} vs {plain}");
    }
}
