mod common;

use common::{oracle_quad, unit_integral};
use ebb::fgm::{conditional_inverse, copula_cdf, sample_component, sample_z, sample_z_with_theta};
use ebb::specfun::integrate_semi_infinite;
use ebb::stats::{correlation, ks_critical_1pct, ks_statistic, mean};
use ebb::{BivGammaFgm, EbbParams, QuadratureControl, RngSeed, SeriesControl};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Gamma};

fn p(a: f64, b: f64, r: f64) -> EbbParams {
    EbbParams::new(a, b, r).unwrap()
}

#[test]
fn conditional_inverse_solves_forward_equation() {
    let mut rng = RngSeed::new(11, 0).rng();
    for _ in 0..10_000 {
        let rho = 2.0 * ebb::fgm::open_uniform(&mut rng) - 1.0;
        let u2 = ebb::fgm::open_uniform(&mut rng);
        let v = ebb::fgm::open_uniform(&mut rng);
        let u1 = conditional_inverse(rho, u2, v).unwrap();
        assert!(u1 > 0.0 && u1 < 1.0);
        let c = rho * (1.0 - 2.0 * u2);
        assert!((u1 * (1.0 + c * (1.0 - u1)) - v).abs() < 1e-12);
    }
}

#[test]
fn conditional_inverse_is_increasing() {
    for rho in [-1.0, -0.4, 0.3, 1.0] {
        for u2 in [0.01, 0.3, 0.77, 0.99] {
            let mut prev = 0.0;
            for k in 1..1000 {
                let u1 = conditional_inverse(rho, u2, k as f64 / 1000.0).unwrap();
                assert!(u1 > prev);
                prev = u1;
            }
        }
    }
}

#[test]
fn joint_density_integrates_and_marginalizes() {
    let d = BivGammaFgm::new(1.1, 1.5, 1.0, -0.99).unwrap();
    let q = QuadratureControl::new(1e-10, 1e-14, 4000, 1e-12).unwrap();
    let inner = |x: f64| {
        integrate_semi_infinite(|t| Ok(1.5 * d.joint_pdf(x, 1.5 * t)?), 0.0, &q)
            .unwrap()
            .value
    };
    let total = integrate_semi_infinite(|t| Ok(1.1 * inner(1.1 * t)), 0.0, &q).unwrap().value;
    assert!((total - 1.0).abs() < 1e-5, "{total}");
    for x in [0.2, 1.0, 3.5] {
        let want = d.marginal_pdf_x(x).unwrap();
        assert!((inner(x) - want).abs() < 1e-7, "x={x}");
    }
    let indep = BivGammaFgm::new(2.0, 3.0, 1.5, 0.0).unwrap();
    let j = indep.joint_pdf(0.7, 1.9).unwrap();
    assert!((j - indep.marginal_pdf_x(0.7).unwrap() * indep.marginal_pdf_y(1.9).unwrap()).abs() < 1e-15);
    let c = indep.joint_cdf(0.7, 1.9).unwrap();
    assert!((c - indep.marginal_cdf_x(0.7).unwrap() * indep.marginal_cdf_y(1.9).unwrap()).abs() < 1e-15);
}

#[test]
fn pairs_have_copula_dependence() {
    let n = 100_000;
    let indep = BivGammaFgm::new(2.0, 3.0, 1.0, 0.0).unwrap();
    let pairs = indep.sample_pairs(n, RngSeed::new(3, 0)).unwrap();
    let (u, v): (Vec<f64>, Vec<f64>) = pairs
        .iter()
        .map(|&(x, y)| (indep.marginal_cdf_x(x).unwrap(), indep.marginal_cdf_y(y).unwrap()))
        .unzip();
    assert!(correlation(&u, &v).unwrap().abs() < 0.02);

    for rho in [0.8, -0.6] {
        let d = BivGammaFgm::new(1.0, 1.0, 1.0, rho).unwrap();
        let (x, y): (Vec<f64>, Vec<f64>) = d.sample_pairs(n, RngSeed::new(4, 1)).unwrap().into_iter().unzip();
        let r = correlation(&x, &y).unwrap();
        assert!((r - rho / 4.0).abs() < 0.02, "rho={rho}: corr {r}");
    }
}

#[test]
fn gamma_margins_pass_ks() {
    let d = BivGammaFgm::new(2.5, 0.8, 3.0, 0.7).unwrap();
    let pairs = d.sample_pairs(10_000, RngSeed::new(9, 2)).unwrap();
    let gx = Gamma::new(2.5, 3.0).unwrap();
    let gy = Gamma::new(0.8, 3.0).unwrap();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    assert!(ks_statistic(&xs, |x| Ok(gx.cdf(x))).unwrap() < ks_critical_1pct(10_000));
    assert!(ks_statistic(&ys, |y| Ok(gy.cdf(y))).unwrap() < ks_critical_1pct(10_000));
}

#[test]
fn ratio_samples_match_analytic_cdf() {
    let n = 10_000;
    let u = sample_z(&p(1.0, 1.0, 0.0), n, RngSeed::new(1, 0)).unwrap();
    assert!(ks_statistic(&u, Ok).unwrap() < 1.63 / (n as f64).sqrt());
    let d = p(2.0, 3.0, 0.5);
    let tab = d.cdf_table(513, &SeriesControl::default()).unwrap();
    let z = sample_z(&d, n, RngSeed::new(1, 1)).unwrap();
    assert!(ks_statistic(&z, |v| tab.cdf(v)).unwrap() < ks_critical_1pct(n));
    let s = sample_z(&p(2.0, 2.0, -0.75), 100_000, RngSeed::new(2, 0)).unwrap();
    assert!((mean(&s).unwrap() - 0.5).abs() < 0.005);
}

#[test]
fn rate_does_not_change_ratio() {
    let d = p(2.0, 3.0, 0.5);
    let seed = RngSeed::new(77, 5);
    let base = sample_z(&d, 500, seed).unwrap();
    assert_eq!(base, sample_z_with_theta(&d, 1024.0, 500, seed).unwrap());
    for (a, b) in base.iter().zip(sample_z_with_theta(&d, 1e3, 500, seed).unwrap()) {
        assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
    }
}

#[test]
fn streams_are_deterministic() {
    let d = p(1.1, 1.5, -0.99);
    let a = sample_z(&d, 50, RngSeed::new(5, 3)).unwrap();
    assert_eq!(a, sample_z(&d, 50, RngSeed::new(5, 3)).unwrap());
    assert_ne!(a, sample_z(&d, 50, RngSeed::new(5, 4)).unwrap());
    assert_ne!(a, sample_z(&d, 50, RngSeed::new(6, 3)).unwrap());
    assert!(sample_z(&d, 0, RngSeed::new(5, 3)).is_err());
}

/// CDF of component `i` by quadrature of its closed-form density.
fn component_cdf(d: &EbbParams, i: usize, z: f64) -> f64 {
    let q = oracle_quad();
    let ctl = SeriesControl::default();
    unit_integral(
        |t| if t < z { d.component_density(i, t, &ctl).unwrap() } else { 0.0 },
        &q,
    )
}

#[test]
fn component_samplers_match_component_densities() {
    let d = p(2.0, 3.0, 0.0);
    let n = 10_000;
    for i in [2, 3] {
        let s = sample_component(&d, i, n, RngSeed::new(21, i as u64)).unwrap();
        // tabulate the CDF once, then interpolate linearly
        let grid: Vec<f64> = (0..=400).map(|k| k as f64 / 400.0).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&z| match z {
                0.0 => 0.0,
                1.0 => 1.0,
                _ => component_cdf(&d, i, z),
            })
            .collect();
        let f = |z: f64| {
            let k = ((z * 400.0) as usize).min(399);
            let t = z * 400.0 - k as f64;
            Ok(vals[k] + t * (vals[k + 1] - vals[k]))
        };
        let ks = ks_statistic(&s, f).unwrap();
        assert!(ks < ks_critical_1pct(n), "component {i}: {ks}");
    }
    let s = sample_component(&p(3.0, 3.0, 0.0), 4, 100_000, RngSeed::new(22, 0)).unwrap();
    assert!((mean(&s).unwrap() - 0.5).abs() < 0.01);
    assert!(sample_component(&d, 1, 10, RngSeed::new(0, 0)).is_err());
}

proptest! {
    #[test]
    fn copula_is_a_copula(rho in -1.0f64..=1.0, u1 in 0.0f64..=1.0, u2 in 0.0f64..=1.0) {
        let c = copula_cdf(rho, u1, u2).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        // Fréchet bounds
        prop_assert!(c <= u1.min(u2) + 1e-15);
        prop_assert!(c >= (u1 + u2 - 1.0).max(0.0) - 1e-15);
        prop_assert!((copula_cdf(rho, u1, 1.0).unwrap() - u1).abs() < 1e-15);
    }

    #[test]
    fn conditional_inverse_stays_inside(rho in -1.0f64..=1.0, u2 in 1e-9f64..1.0, v in 1e-12f64..1.0) {
        let u1 = conditional_inverse(rho, u2, v).unwrap();
        prop_assert!(u1 > 0.0 && u1 < 1.0);
    }
}
