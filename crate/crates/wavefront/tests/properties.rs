use proptest::prelude::*;

use wavefront::diagnostics::{eta, fit_phase, weighted_norm};
use wavefront::model::{make_birth_function, preset, BirthSpec};
use wavefront::numeric::interp_uniform;
use wavefront::profile::{Closure, Grid, Operator, WaveProfile};
use wavefront::simulator::{make_initial_datum, DatumParams, DelayedField, InitialDatum};
use wavefront::spectral::{decay_rates, minimal_linear_speed, quadratic_roots};

fn logistic_profile(k: f64) -> WaveProfile {
    let grid = Grid::symmetric(40.0, 0.01);
    let values = grid.nodes().iter().map(|z| 1.0 / (1.0 + (-k * z).exp())).collect();
    WaveProfile {
        c: 1.0,
        h: 0.0,
        kappa: 1.0,
        grid,
        values,
        tail_left: None,
        tail_right: None,
        normalized: true,
        residual: 0.0,
        closure_left: k,
        closure_right: k,
    }
}

/// Nondecreasing grid function in `[0, 1]` from random increments.
fn monotone(incs: &[f64], n: usize) -> Vec<f64> {
    let total: f64 = incs.iter().sum::<f64>().max(1e-12);
    let mut acc = 0.0;
    let coarse: Vec<f64> = std::iter::once(0.0)
        .chain(incs.iter().map(|d| {
            acc += d / total;
            acc.min(1.0)
        }))
        .collect();
    let m = coarse.len() - 1;
    (0..n)
        .map(|i| interp_uniform(0.0, 1.0, &coarse, i as f64 * m as f64 / (n - 1) as f64))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vieta_identities(c in 0.0f64..50.0) {
        let (x1, x2) = quadratic_roots(c);
        prop_assert!(x1 < 0.0 && x2 > 0.0);
        prop_assert!((x1 * x2 + 1.0).abs() < 1e-12);
        prop_assert!((x1 + x2 - c).abs() < 1e-12 * c.max(1.0));
    }

    #[test]
    fn double_root_speed_decreases_with_delay(gp0 in 1.05f64..3.0, h in 0.0f64..2.0, dh in 0.01f64..1.0) {
        let a = minimal_linear_speed(gp0, h).unwrap();
        let b = minimal_linear_speed(gp0, h + dh).unwrap();
        prop_assert!(b.c_sharp < a.c_sharp);
    }

    #[test]
    fn rates_bracket_double_root(gp0 in 1.05f64..3.0, h in 0.0f64..1.0, dc in 0.01f64..2.0) {
        let s = minimal_linear_speed(gp0, h).unwrap();
        let r = decay_rates(s.c_sharp + dc, gp0, h).unwrap();
        prop_assert!(0.0 < r.lambda1 && r.lambda1 < s.lambda_double && s.lambda_double < r.lambda2);
    }

    #[test]
    fn lipschitz_and_monostability(u in 0.0f64..1.0, v in 0.0f64..1.0) {
        for name in ["hadeler_rothe", "kpp"] {
            let g = preset(name).unwrap();
            prop_assert!((g.evaluate(u) - g.evaluate(v)).abs() <= g.lipschitz * (u - v).abs() * (1.0 + 1e-12) + 1e-15);
            if u > 1e-9 && u < 1.0 - 1e-9 {
                prop_assert!(g.evaluate(u) > u);
            }
        }
    }

    #[test]
    fn linear_extension(d in 1e-6f64..5.0) {
        let g = preset("hadeler_rothe").unwrap();
        prop_assert!((g.evaluate(-d) - g.gp0 * -d).abs() < 1e-12);
        prop_assert!((g.evaluate(1.0 + d) - (1.0 + g.gpk * d)).abs() < 1e-12);
        prop_assert_eq!(g.derivative(-d), g.gp0);
        prop_assert_eq!(g.derivative(1.0 + d), g.gpk);
    }

    #[test]
    fn operator_is_monotone(
        a in prop::collection::vec(0.0f64..1.0, 8),
        b in prop::collection::vec(0.0f64..1.0, 8),
        c in 1.01f64..2.0,
        h in 0.0f64..0.3,
    ) {
        let g = preset("hadeler_rothe").unwrap();
        let n = 801;
        let phi = monotone(&a, n);
        let other = monotone(&b, n);
        let psi: Vec<f64> = phi.iter().zip(&other).map(|(x, y)| x.max(*y)).collect();
        let op = Operator::new(c, h, 0.05);
        let (mut tp, mut tq, mut f) = (vec![0.0; n], vec![0.0; n], Vec::new());
        let (l, r) = (Closure::Rate(0.5), Closure::Rate(0.5));
        op.apply(&phi, &g, l, r, &mut tp, &mut f);
        op.apply(&psi, &g, l, r, &mut tq, &mut f);
        for (x, y) in tp.iter().zip(&tq) {
            prop_assert!(*x <= *y + 1e-13);
        }
    }

    #[test]
    fn operator_is_translation_equivariant(a in -2.0f64..2.0, c in 1.01f64..2.0) {
        let g = preset("hadeler_rothe").unwrap();
        let grid = Grid::symmetric(40.0, 0.05);
        let k = 0.55;
        let phi = |z: f64| 1.0 / (1.0 + (-k * z).exp());
        let base: Vec<f64> = grid.nodes().iter().map(|&z| phi(z)).collect();
        let moved: Vec<f64> = grid.nodes().iter().map(|&z| phi(z + a)).collect();
        let op = Operator::new(c, 0.0, grid.step);
        let (mut t0, mut t1, mut f) = (vec![0.0; grid.len], vec![0.0; grid.len], Vec::new());
        let (l, r) = (Closure::Rate(k), Closure::Rate(k));
        op.apply(&base, &g, l, r, &mut t0, &mut f);
        op.apply(&moved, &g, l, r, &mut t1, &mut f);
        for i in (200..grid.len - 200).step_by(7) {
            let z = grid.node(i);
            let shifted = interp_uniform(grid.start, grid.step, &t0, z + a);
            prop_assert!((t1[i] - shifted).abs() < 2e-4, "z = {z}: {} vs {shifted}", t1[i]);
        }
    }

    #[test]
    fn weighted_norm_axioms(
        f in prop::collection::vec(-1.0f64..1.0, 101),
        g in prop::collection::vec(-1.0f64..1.0, 101),
        s in -3.0f64..3.0,
        lam in 0.05f64..2.0,
    ) {
        let grid = Grid::symmetric(5.0, 0.1);
        let nf = weighted_norm(&f, &grid, lam);
        let ng = weighted_norm(&g, &grid, lam);
        let sf: Vec<f64> = f.iter().map(|x| s * x).collect();
        prop_assert!((weighted_norm(&sf, &grid, lam) - s.abs() * nf).abs() <= 1e-12 * nf.max(1.0));
        let sum: Vec<f64> = f.iter().zip(&g).map(|(x, y)| x + y).collect();
        prop_assert!(weighted_norm(&sum, &grid, lam) <= nf + ng + 1e-12);
        prop_assert!(nf >= 0.0);
    }

    #[test]
    fn eta_is_bounded(x in -50.0f64..50.0, lam in 0.01f64..3.0) {
        let e = eta(x, lam);
        prop_assert!(e > 0.0 && e <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_fit_is_equivariant(b in -5.0f64..5.0, a in -5.0f64..5.0) {
        let phi = logistic_profile(0.6);
        let z = Grid::symmetric(30.0, 0.1);
        let w: Vec<f64> = z.nodes().iter().map(|&x| phi.eval(x + b)).collect();
        let wa: Vec<f64> = z.nodes().iter().map(|&x| phi.eval(x + a + b)).collect();
        let s = fit_phase(&w, &z, &phi, 0.3).unwrap();
        let sa = fit_phase(&wa, &z, &phi, 0.3).unwrap();
        prop_assert!((sa - s - a).abs() < 2e-6, "{sa} vs {s} + {a}");
    }

    #[test]
    fn comparison_principle(
        a in prop::collection::vec(0.0f64..1.0, 6),
        b in prop::collection::vec(0.0f64..1.0, 6),
        h in prop::sample::select(vec![0.0, 0.05, 0.2]),
        kpp in any::<bool>(),
    ) {
        let g = preset(if kpp { "kpp" } else { "hadeler_rothe" }).unwrap();
        let dt = 0.01;
        let grid = Grid::span(-20.0, 20.0, 0.2);
        let mut lo = datum(&grid, h, dt);
        let mut hi = lo.clone();
        let u = monotone(&a, grid.len);
        let v = monotone(&b, grid.len);
        for k in 0..lo.history.len() {
            let shift = k as f64 / lo.history.len() as f64;
            for i in 0..grid.len {
                let base = (u[i] * (1.0 - 0.1 * shift)).clamp(0.0, 1.0);
                lo.history[k][i] = base;
                hi.history[k][i] = base.max(v[i]);
            }
        }
        let mut fl = DelayedField::new(&lo, &g).unwrap();
        let mut fh = DelayedField::new(&hi, &g).unwrap();
        for _ in 0..400 {
            fl.step(&g).unwrap();
            fh.step(&g).unwrap();
            for (x, y) in fl.current().iter().zip(fh.current()) {
                prop_assert!(*x <= *y + 1e-12);
                prop_assert!((0.0..=1.0).contains(x) && (0.0..=1.0).contains(y));
            }
        }
    }

    #[test]
    fn simulator_is_translation_equivariant(k in 1usize..20) {
        let g = preset("hadeler_rothe").unwrap();
        let dt = 0.01;
        let grid = Grid::span(-60.0, 60.0, 0.1);
        let bump = |x0: f64| DatumParams::CompactBump { center: x0, half_width: 5.0, height: 1.0, mu: 1.0 };
        let d0 = make_initial_datum(&bump(0.0), None, 1.0, grid, 0.1, dt).unwrap();
        let d1 = make_initial_datum(&bump(k as f64 * grid.step), None, 1.0, grid, 0.1, dt).unwrap();
        let mut f0 = DelayedField::new(&d0, &g).unwrap();
        let mut f1 = DelayedField::new(&d1, &g).unwrap();
        for _ in 0..500 {
            f0.step(&g).unwrap();
            f1.step(&g).unwrap();
        }
        let t: f64 = 5.0;
        let margin = 10.0 * t.sqrt();
        for i in 0..grid.len - k {
            let x = grid.node(i);
            if x < grid.start + margin || x + k as f64 * grid.step > grid.end() - margin {
                continue;
            }
            prop_assert!((f0.current()[i] - f1.current()[i + k]).abs() < 1e-10);
        }
    }

    #[test]
    fn custom_polynomial_validation(a in 1.1f64..3.0) {
        // g(u) = a u − (a − 1) u², fixed points 0 and 1
        let g = make_birth_function(&BirthSpec::Polynomial(vec![0.0, a, 1.0 - a])).unwrap();
        prop_assert!((g.kappa - 1.0).abs() < 1e-12);
        prop_assert!((g.gp0 - a).abs() < 1e-12);
        prop_assert!((g.gpk - (2.0 - a)).abs() < 1e-12);
    }
}

fn datum(grid: &Grid, h: f64, dt: f64) -> InitialDatum {
    make_initial_datum(
        &DatumParams::Heaviside { mu: 1.0, sigma: 0.5 },
        None,
        1.0,
        *grid,
        h,
        dt,
    )
    .unwrap()
}
