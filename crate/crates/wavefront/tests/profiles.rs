use wavefront::error::Error;
use wavefront::model::preset;
use wavefront::profile::*;
use wavefront::spectral::{chi, chi_z, decay_rates, lambda3, minimal_linear_speed, SpectralSummary};

/// Logistic front `1/(1 + e^{−kz})` of the cubic birth function with no delay.
fn logistic_oracle() -> (f64, f64) {
    let k = (5.0f64 / 16.0).sqrt();
    (k, k + 0.25 / k)
}

fn opts(dz: f64) -> ProfileOptions {
    ProfileOptions {
        dz,
        ..ProfileOptions::default()
    }
}

#[test]
fn logistic_oracle_solves_the_profile_equation() {
    let g = preset("hadeler_rothe").unwrap();
    let (k, c) = logistic_oracle();
    for i in 0..200 {
        let z = -20.0 + 0.2 * i as f64;
        let p = 1.0 / (1.0 + (-k * z).exp());
        let d1 = k * p * (1.0 - p);
        let d2 = k * d1 * (1.0 - 2.0 * p);
        assert!((d2 - c * d1 - p + g.evaluate(p)).abs() < 1e-14);
    }
}

#[test]
fn pushed_minimal_front_matches_logistic() {
    let g = preset("hadeler_rothe").unwrap();
    let (k, c_exact) = logistic_oracle();
    let m = minimal_front(0.0, &g, &opts(0.025)).unwrap();
    assert_eq!(m.class.kind, FrontKind::Pushed);
    assert_eq!(m.class.matched_lambda, MatchedRate::Lambda2);
    assert!((m.profile.c - c_exact).abs() < 1e-4, "{} vs {c_exact}", m.profile.c);
    let phi = &m.profile;
    let worst = phi
        .grid
        .nodes()
        .iter()
        .zip(&phi.values)
        .map(|(z, v)| (v - 1.0 / (1.0 + (-k * z).exp())).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
    let l2 = decay_rates(c_exact, g.gp0, 0.0).unwrap().lambda2;
    assert!((l2 - k).abs() < 1e-12);
}

#[test]
fn minimal_speed_examples() {
    let g = preset("hadeler_rothe").unwrap();
    let c = minimal_speed(0.0, &g, &ProfileOptions::default()).unwrap();
    assert!((c - 1.006).abs() < 2e-3);
    assert!(c > 1.0 + 10.0 * ProfileOptions::default().tol_c);
    let k = preset("kpp").unwrap();
    let m = minimal_front(0.0, &k, &ProfileOptions::default()).unwrap();
    assert!((m.c_star - 2.0).abs() < 1e-2);
    assert_eq!(m.class.kind, FrontKind::PulledMinimal);
}

#[test]
fn grid_refinement_is_second_order() {
    let g = preset("hadeler_rothe").unwrap();
    let (_, c_exact) = logistic_oracle();
    let c: Vec<f64> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|&dz| minimal_front(0.0, &g, &opts(dz)).unwrap().profile.c)
        .collect();
    let d1 = (c[0] - c[1]).abs();
    let d2 = (c[1] - c[2]).abs();
    let estimate = d1 / 3.0;
    assert!(d2 < 0.5 * d1, "{d1} {d2}");
    assert!((c[1] - c_exact).abs() < 4.0 * estimate);
}

#[test]
fn non_minimal_front_decays_at_slow_rate() {
    let g = preset("hadeler_rothe").unwrap();
    let p = solve_profile(1.2, 0.0, &g, &ProfileOptions::default()).unwrap().front().unwrap();
    let l1 = 0.6 - (0.36f64 - 0.25).sqrt();
    let fit = p.tail_left.unwrap();
    assert!(((fit.rate - l1) / l1).abs() < 0.03, "{} vs {l1}", fit.rate);
    assert!(p.residual < 1e-8);
    let spec = SpectralSummary::new(g.gp0, g.gpk, 0.0).unwrap();
    let c_star = minimal_speed(0.0, &g, &ProfileOptions::default()).unwrap();
    let class = classify_front(&p, &spec, c_star, 1e-4).unwrap();
    assert_eq!(class.kind, FrontKind::NonMinimal);
    assert_eq!(class.matched_lambda, MatchedRate::Lambda1);
    let image = profile_operator_apply(&p.values, &p.grid, 1.2, 0.0, &g).unwrap();
    let res = image.iter().zip(&p.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(res < 1e-6, "{res}");
}

#[test]
fn no_front_below_admissible_speeds() {
    let g = preset("hadeler_rothe").unwrap();
    let o = ProfileOptions::default();
    assert_eq!(solve_profile(0.8, 0.0, &g, &o).unwrap(), ProfileOutcome::NoFront);
    assert_eq!(solve_profile(1.003, 0.0, &g, &o).unwrap(), ProfileOutcome::NoFront);
}

#[test]
fn kpp_profile_invariants() {
    let g = preset("kpp").unwrap();
    let c = 2.5;
    let p = solve_profile(c, 0.0, &g, &ProfileOptions::default()).unwrap().front().unwrap();
    assert!(p.normalized);
    assert!((p.eval(0.0) - 0.5).abs() < 1e-10);
    assert!(p.residual < 1e-8);
    assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
    assert!(p.values[0] < 1e-3 && 1.0 - p.values[p.values.len() - 1] < 1e-3);
    let bound = 1.0 / (c * c + 4.0).sqrt();
    let max_slope = p
        .values
        .windows(2)
        .map(|w| (w[1] - w[0]) / p.grid.step)
        .fold(0.0, f64::max);
    assert!(max_slope <= 1.02 * bound, "{max_slope} vs {bound}");
}

#[test]
fn pushed_tails_match_spectral_rates() {
    let g = preset("hadeler_rothe").unwrap();
    let m = minimal_front(0.0, &g, &ProfileOptions::default()).unwrap();
    let c = m.profile.c;
    let l2 = decay_rates(c, g.gp0, 0.0).unwrap().lambda2;
    let l3 = lambda3(c, g.gpk, 0.0).unwrap();
    let left = tail_fit(&m.profile, Side::Left, TAIL_WINDOW).unwrap();
    let right = tail_fit(&m.profile, Side::Right, TAIL_WINDOW).unwrap();
    assert!(((left.rate - l2) / l2).abs() < 0.05);
    assert!(((right.rate + l3) / l3).abs() < 0.05);
    let d = decay_rates(c, g.gp0, 0.0).unwrap();
    assert!(d.lambda1 < -l3);
}

#[test]
fn tail_fit_examples() {
    let grid = Grid::symmetric(20.0, 0.05);
    let mk = |values: Vec<f64>| WaveProfile {
        c: 1.0,
        h: 0.0,
        kappa: 1.0,
        grid,
        values,
        tail_left: None,
        tail_right: None,
        normalized: false,
        residual: 0.0,
        closure_left: 0.0,
        closure_right: 0.0,
    };
    let p = mk(grid.nodes().iter().map(|z| (0.7 * z).exp().min(1.0)).collect());
    let f = tail_fit(&p, Side::Left, 0.2).unwrap();
    assert!((f.rate - 0.7).abs() < 1e-6);
    let flat = mk(vec![1.0; grid.len]);
    assert_eq!(tail_fit(&flat, Side::Right, 0.2).unwrap_err(), Error::NonpositiveLog);
}

#[test]
fn narrow_grid_is_rejected() {
    let g = preset("hadeler_rothe").unwrap();
    let grid = Grid::symmetric(5.0, 0.05);
    let e = profile_operator_apply(&vec![0.5; grid.len], &grid, 1.2, 0.0, &g).unwrap_err();
    assert!(matches!(e, Error::GridTooNarrow { .. }));
}

#[test]
fn sweeps() {
    let k = preset("kpp").unwrap();
    let rows = c_star_sweep(&[0.0, 0.2], &k, &ProfileOptions::default());
    for r in &rows {
        assert_eq!(r.kind, Some(FrontKind::PulledMinimal), "{r:?}");
        assert!((r.c_star.unwrap() - r.c_sharp.unwrap()).abs() < 1e-3);
    }
    let g = preset("hadeler_rothe").unwrap();
    let rows = c_star_sweep(&[0.0], &g, &ProfileOptions::default());
    assert_eq!(rows[0].c_sharp, Some(1.0));
    assert_eq!(rows[0].kind, Some(FrontKind::Pushed));
    assert!((rows[0].c_star.unwrap() - 1.006).abs() < 2e-3);
}

/// Dense scan of `min_z χ` over `c`, then a Newton polish on `(χ, ∂χ/∂z)`.
fn double_root_oracle(gp0: f64, h: f64) -> (f64, f64) {
    let min_chi = |c: f64| {
        (1..=3000)
            .map(|i| chi(i as f64 * 1e-3, c, gp0, h))
            .fold(f64::INFINITY, f64::min)
    };
    let mut c0 = 0.0;
    for i in 1..=1000 {
        let c = i as f64 * 1e-3;
        if min_chi(c) < 0.0 {
            c0 = c;
            break;
        }
    }
    let mut z = (1..=3000)
        .map(|i| i as f64 * 1e-3)
        .min_by(|a, b| chi(*a, c0, gp0, h).partial_cmp(&chi(*b, c0, gp0, h)).unwrap())
        .unwrap();
    let mut c = c0;
    for _ in 0..50 {
        let e = (-z * c * h).exp();
        let f1 = chi(z, c, gp0, h);
        let f2 = chi_z(z, c, gp0, h);
        let j11 = f2;
        let j12 = -z - gp0 * z * h * e;
        let j21 = 2.0 + gp0 * c * c * h * h * e;
        let j22 = -1.0 - gp0 * h * e + gp0 * c * h * h * z * e;
        let det = j11 * j22 - j12 * j21;
        z -= (f1 * j22 - j12 * f2) / det;
        c -= (j11 * f2 - j21 * f1) / det;
    }
    (c, z)
}

#[test]
fn delayed_double_root_matches_scan_oracle() {
    let (c, z) = double_root_oracle(1.25, 1.0);
    let s = minimal_linear_speed(1.25, 1.0).unwrap();
    assert!(c < 1.0);
    assert!((s.c_sharp - c).abs() < 1e-9, "{} vs {c}", s.c_sharp);
    assert!((s.lambda_double - z).abs() < 1e-7);
    assert!(chi(s.lambda_double, s.c_sharp, 1.25, 1.0).abs() < 1e-10);
    assert!(chi_z(s.lambda_double, s.c_sharp, 1.25, 1.0).abs() < 1e-10);
}

#[test]
fn rates_are_monotone_in_speed() {
    let gp0 = 1.25;
    let s = minimal_linear_speed(gp0, 0.5).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=100 {
        let c = s.c_sharp + 0.02 * i as f64;
        let r = decay_rates(c, gp0, 0.5).unwrap();
        if let Some((l1, l2)) = prev {
            assert!(r.lambda1 < l1 && r.lambda2 > l2);
        }
        prev = Some((r.lambda1, r.lambda2));
    }
}
