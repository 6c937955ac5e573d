use ebb::estimation::{
    aic, bic, compare_models, ebb_loglik, estimate_rho_moment, fit_beta, fit_ebb_joint, fit_ebb_profile,
    fit_gamma_shape, fit_kumaraswamy, fit_margins, gamma_gini_integral, lr_from_logliks, lr_test, Model,
    RhoProfile,
};
use ebb::fgm::{open_uniform, sample_z};
use ebb::{BivGammaFgm, EbbParams, QuadratureControl, RngSeed, SeriesControl};

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

fn p(a: f64, b: f64, r: f64) -> EbbParams {
    EbbParams::new(a, b, r).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn beta_fit_is_consistent() {
    let z = sample_z(&p(2.0, 3.0, 0.0), 100_000, RngSeed::new(100, 0)).unwrap();
    let f = fit_beta(&z).unwrap();
    assert!(f.converged);
    assert!((f.params[0] - 2.0).abs() < 0.05 && (f.params[1] - 3.0).abs() < 0.05, "{:?}", f.params);
    assert!((f.aic - aic(f.loglik, 2)).abs() < 1e-9);
    assert!((f.bic - bic(f.loglik, 2, z.len())).abs() < 1e-9);

    let u = sample_z(&p(1.0, 1.0, 0.0), 10_000, RngSeed::new(101, 0)).unwrap();
    let f = fit_beta(&u).unwrap();
    assert!((f.params[0] - 1.0).abs() < 0.05 && (f.params[1] - 1.0).abs() < 0.05, "{:?}", f.params);
}

#[test]
fn kumaraswamy_fit_is_consistent() {
    let mut rng = RngSeed::new(102, 0).rng();
    let z: Vec<f64> = (0..100_000)
        .map(|_| {
            let u = open_uniform(&mut rng);
            (1.0 - (1.0 - u).powf(1.0 / 5.0)).powf(1.0 / 2.0)
        })
        .collect();
    let f = fit_kumaraswamy(&z).unwrap();
    assert!(f.converged);
    assert_eq!(f.model, Model::Kumaraswamy);
    assert!((f.params[0] - 2.0).abs() < 0.1 && (f.params[1] - 5.0).abs() < 0.1, "{:?}", f.params);

    let u = sample_z(&p(1.0, 1.0, 0.0), 10_000, RngSeed::new(103, 0)).unwrap();
    let f = fit_kumaraswamy(&u).unwrap();
    assert!((f.params[0] - 1.0).abs() < 0.05 && (f.params[1] - 1.0).abs() < 0.05, "{:?}", f.params);
}

#[test]
fn loglik_reduces_and_reports_bad_observations() {
    let z = sample_z(&p(2.0, 3.0, 0.0), 200, RngSeed::new(104, 0)).unwrap();
    let beta = fit_beta(&z).unwrap();
    let at_null = ebb_loglik(&p(beta.params[0], beta.params[1], 0.0), &z, &ctl()).unwrap();
    assert!((at_null - beta.loglik).abs() < 1e-8 * beta.loglik.abs().max(1.0));
    for r in [-0.7, 0.3] {
        let one = ebb_loglik(&p(1.0, 1.0, r), &[0.5], &ctl()).unwrap();
        assert!((one - p(1.0, 1.0, r).pdf(0.5, &ctl()).unwrap().ln()).abs() < 1e-14);
    }
    let err = ebb_loglik(&p(2.0, 3.0, 0.5), &[0.2, 1.0, 0.4], &ctl()).unwrap_err();
    assert!(matches!(err, ebb::Error::Observation { index: 1, .. }));
}

#[test]
fn profile_maximizers_agree_and_nest_the_beta_fit() {
    for (rho, seed) in [(0.5, 105), (-0.5, 106), (0.0, 107)] {
        let z = sample_z(&p(2.0, 3.0, rho), 1000, RngSeed::new(seed, 0)).unwrap();
        let b = fit_beta(&z).unwrap();
        let prof = RhoProfile::new(b.params[0], b.params[1], &z, &ctl()).unwrap();
        let (rg, lg, _) = prof.maximize_golden();
        let (rs, ls, _) = prof.maximize_score();
        assert!((lg - ls).abs() < 1e-8, "rho={rho}: {lg} vs {ls}");
        assert!((rg - rs).abs() < 1e-4, "rho={rho}: {rg} vs {rs}");
        let e = fit_ebb_profile(&z, &ctl()).unwrap();
        assert!(e.loglik >= b.loglik - 1e-9);
        assert!((-1.0..=1.0).contains(&e.params[2]));
        assert_eq!(&e.params[..2], &b.params[..]);
        let lr = lr_test(&z, &ctl()).unwrap();
        assert!(lr.statistic >= 0.0 && (0.0..=1.0).contains(&lr.p_value));
        assert_eq!(lr.df, 1);
    }
}

#[test]
fn profile_fit_is_consistent_at_the_null() {
    let z = sample_z(&p(2.0, 3.0, 0.0), 10_000, RngSeed::new(108, 0)).unwrap();
    let f = fit_ebb_profile(&z, &ctl()).unwrap();
    assert!(f.converged);
    assert!(f.params[2].abs() < 0.1, "{:?}", f.params);
}

#[test]
fn joint_fit_recovers_dependence() {
    // the sampling sd of ρ̂ is about 0.16 at n = 10⁴ and 0.05 at n = 10⁵
    let z = sample_z(&p(2.0, 3.0, 0.5), 100_000, RngSeed::new(109, 0)).unwrap();
    let f = fit_ebb_joint(&z, &ctl()).unwrap();
    let prof = fit_ebb_profile(&z, &ctl()).unwrap();
    assert!(f.converged);
    assert!(f.loglik >= prof.loglik - 1e-9);
    assert!((f.params[2] - 0.5).abs() < 0.1, "{:?}", f.params);
    assert!((f.params[0] / 2.0 - 1.0).abs() < 0.1 && (f.params[1] / 3.0 - 1.0).abs() < 0.1);
    let direct = ebb_loglik(&f.ebb_params().unwrap(), &z, &ctl()).unwrap();
    assert!((direct - f.loglik).abs() < 1e-6 * direct.abs());
}

#[test]
fn profile_fit_depends_on_the_ratio_only() {
    let d = BivGammaFgm::new(3.0, 2.0, 1.0, 0.6).unwrap();
    let pairs = d.sample_pairs(500, RngSeed::new(110, 0)).unwrap();
    let ratio = |c: f64| -> Vec<f64> { pairs.iter().map(|&(x, y)| c * x / (c * x + c * y)).collect() };
    let base = fit_ebb_profile(&ratio(1.0), &ctl()).unwrap();
    assert_eq!(base, fit_ebb_profile(&ratio(1024.0), &ctl()).unwrap());
    let thousand = fit_ebb_profile(&ratio(1e3), &ctl()).unwrap();
    for (a, b) in base.params.iter().zip(&thousand.params) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn model_comparison() {
    let z = sample_z(&p(2.0, 3.0, 0.0), 10_000, RngSeed::new(111, 0)).unwrap();
    let c = compare_models(&z, &ctl()).unwrap();
    assert!(c.failures.is_empty());
    assert_eq!(c.fits.len(), 3);
    assert!(c.fits.windows(2).all(|w| w[0].aic <= w[1].aic));
    let get = |m: Model| c.fits.iter().find(|f| f.model == m).unwrap();
    assert!((get(Model::Ebb).aic - get(Model::Beta).aic).abs() < 2.5);

    let u = sample_z(&p(1.0, 1.0, 0.0), 2000, RngSeed::new(112, 0)).unwrap();
    let c = compare_models(&u, &ctl()).unwrap();
    assert!(c.failures.is_empty() && c.fits.iter().all(|f| f.converged));
}

#[test]
fn likelihood_ratio_is_calibrated_under_the_null() {
    // chi-square(1) 99th percentile
    let crit = 6.634_896_601_021_214;
    let below = (0..100)
        .filter(|&j| {
            let z = sample_z(&p(2.0, 3.0, 0.0), 1000, RngSeed::new(113, j)).unwrap();
            lr_test(&z, &ctl()).unwrap().statistic < crit
        })
        .count();
    assert!(below >= 95, "{below}/100");
    let r = lr_from_logliks(7922.92, 7832.86).unwrap();
    assert!((r.statistic - 180.12).abs() < 1e-9);
    assert!(r.p_value < 0.01);
}

#[test]
fn gamma_margin_fits() {
    let d = BivGammaFgm::new(2.5, 0.7, 3.0, 0.0).unwrap();
    let (x, y): (Vec<f64>, Vec<f64>) = d.sample_pairs(100_000, RngSeed::new(114, 0)).unwrap().into_iter().unzip();
    let (kx, rx) = fit_gamma_shape(&x).unwrap();
    let (ky, _) = fit_gamma_shape(&y).unwrap();
    assert!((kx - 2.5).abs() < 0.05 && (rx - 3.0).abs() < 0.1 && (ky - 0.7).abs() < 0.02);
    assert!(fit_gamma_shape(&[1.0, 1.0, 1.0]).is_err());
    assert!(fit_gamma_shape(&[1.0, -1.0, 2.0]).is_err());
    let q = QuadratureControl::default();
    assert!((gamma_gini_integral(1.0, &q).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn moment_estimator_of_dependence() {
    let q = QuadratureControl::default();
    for rho in [0.8, 0.0, -0.8] {
        let d = BivGammaFgm::new(1.0, 1.0, 1.0, rho).unwrap();
        let (x, y): (Vec<f64>, Vec<f64>) =
            d.sample_pairs(100_000, RngSeed::new(115, 0)).unwrap().into_iter().unzip();
        let m = fit_margins(&x, &y, &q).unwrap();
        assert!((m.rho.rho - rho).abs() < 0.05, "rho={rho}: {:?}", m.rho);
        let fixed = estimate_rho_moment(&x, &y, 1.0, 1.0, &q).unwrap();
        assert!((fixed.beta_x - 0.5).abs() < 1e-10);
        assert!((fixed.rho - rho).abs() < 0.05);
    }
    assert!(estimate_rho_moment(&[1.0, 2.0], &[1.0, 2.0, 3.0], 1.0, 1.0, &q).is_err());
    assert!(estimate_rho_moment(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], 1.0, 1.0, &q).is_err());
}

#[test]
fn moment_estimator_error_shrinks_with_n() {
    let q = QuadratureControl::default();
    let d = BivGammaFgm::new(2.0, 3.0, 1.0, 0.6).unwrap();
    let err = |n: usize| {
        median(
            (0..20)
                .map(|j| {
                    let (x, y): (Vec<f64>, Vec<f64>) =
                        d.sample_pairs(n, RngSeed::new(116, j)).unwrap().into_iter().unzip();
                    (fit_margins(&x, &y, &q).unwrap().rho.rho - 0.6).abs()
                })
                .collect(),
        )
    };
    let (e3, e4, e5) = (err(1_000), err(10_000), err(100_000));
    assert!(e3 > e4 && e4 > e5, "{e3} {e4} {e5}");
}
