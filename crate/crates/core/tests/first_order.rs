use pdm_isospec::intertwine1::FirstOrderPartner;
use pdm_isospec::model::{Modification, ModelParams, Solution};
use pdm_isospec::numspec::{converged_spectrum, verify_isospectral, Grid, SpectralLaw, DEFAULT_BOX};

fn grid() -> Grid {
    Grid::new(DEFAULT_BOX.0, DEFAULT_BOX.1, 2000).unwrap()
}

fn xs(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn deletion_partner_is_shape_invariant() {
    let (a, b, c) = (5.0, 0.0, 3.0);
    let f = FirstOrderPartner::from_params(ModelParams::new(a, b, c)).unwrap();
    assert_eq!(f.modification(), Modification::DeleteGround);
    let shifted = ModelParams::new(a + 1.0, b + 1.0, c + 1.0);
    for x in xs(-10.0, 10.0, 201) {
        let closed = (c * c - 1.0) / 4.0 * (-x).exp() + (a + b - c) * (2.0 + a + b - c) / 4.0 * x.exp() + (a + b) / 2.0;
        let got = f.partner_potential(x).unwrap();
        assert!((got - closed).abs() <= 1e-8 * closed.abs().max(1.0), "x={x}: {got} vs {closed}");
        let si = shifted.potential(x).unwrap() + (a + b) / 2.0;
        assert!((got - si).abs() <= 1e-8 * si.abs().max(1.0));
    }
}

#[test]
fn strict_iso_partner_closed_form() {
    let f = FirstOrderPartner::from_params(ModelParams::new(3.0, 5.0, 4.0)).unwrap();
    assert_eq!(f.modification(), Modification::StrictIso);
    for x in xs(-10.0, 10.0, 201) {
        let e = x.exp();
        let closed = 3.75 / e + 2.0 * e + (4.0 + e - 3.0 * e * e) / (4.0 + 3.0 * e).powi(2);
        let got = f.partner_potential(x).unwrap();
        assert!((got - closed).abs() <= 1e-8 * closed.abs().max(1.0), "x={x}: {got} vs {closed}");
    }
}

#[test]
fn spectral_laws_hold_numerically() {
    let cases = [
        (ModelParams::new(5.0, 0.0, 3.0), false),
        (ModelParams::new(3.0, 5.0, 4.0), false),
        (ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0), true),
    ];
    for (p, normalizable) in cases {
        let f = FirstOrderPartner::from_params(p).unwrap();
        let law = f.spectral_law().unwrap();
        let k = 4;
        let original = converged_spectrum(|x| p.mass(x), |x| p.potential(x), grid(), k + 1).unwrap();
        let partner = converged_spectrum(|x| p.mass(x), |x| f.partner_potential(x), grid(), k).unwrap();
        let r = verify_isospectral(&original, &partner, law, 1e-3).unwrap();
        assert!(r.pass, "{p:?}: {r:?}");
        assert_eq!(f.missing_state_normalizability().unwrap().is_normalizable(), normalizable);
    }
}

#[test]
fn creation_inserts_the_factorization_energy() {
    let f = FirstOrderPartner::from_params(ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0)).unwrap();
    assert_eq!(f.spectral_law(), Some(SpectralLaw::InsertOne(f.mu())));
    assert!((f.mu() + 13.32).abs() < 1e-12);
}

#[test]
fn operator_identities() {
    let presets = [
        ModelParams::new(5.0, 0.0, 3.0),
        ModelParams::new(3.0, 5.0, 4.0),
        ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0),
    ];
    let grid = xs(-6.0, 6.0, 61);
    for p in presets {
        let f = FirstOrderPartner::from_params(p).unwrap();
        let r = f.factorization_residuals(|x: f64| (-x * x).exp(), &grid, 5e-3).unwrap();
        assert!(r.lower < 1e-6 && r.upper < 1e-6, "{p:?}: {r:?}");
        let psi0 = p.bound_state(0).unwrap();
        let r = f.factorization_residuals(|x: f64| psi0.psi(x).unwrap(), &grid, 5e-3).unwrap();
        assert!(r.lower < 1e-6 && r.upper < 1e-6, "{p:?}: {r:?}");
        for n in 0..4 {
            let psi = p.bound_state(n).unwrap();
            let r = f.intertwining_residual(&psi, &grid, 5e-3).unwrap();
            assert!(r < 1e-6, "{p:?} n={n}: {r}");
        }
        for &x in &grid {
            assert!(f.riccati_residual(x).unwrap() < 1e-8);
        }
    }
}

#[test]
fn mapped_states_follow_the_shifted_family() {
    // deleting E₀ maps ψₙ₊₁ to the (n)-th state of the model with a, b, c raised by one
    let p = ModelParams::new(5.0, 0.0, 3.0);
    let f = FirstOrderPartner::from_params(p).unwrap();
    let q = ModelParams::new(6.0, 1.0, 4.0);
    for n in 0..3 {
        let psi = p.bound_state(n + 1).unwrap();
        let target = q.bound_state(n).unwrap();
        let x0 = 0.3;
        let k = f.apply_l(&psi, x0).unwrap().0 / target.psi(x0).unwrap();
        for x in xs(-8.0, 8.0, 33) {
            let got = f.apply_l(&psi, x).unwrap().0;
            let want = k * target.psi(x).unwrap();
            assert!((got - want).abs() < 1e-8 * k.abs(), "n={n} x={x}");
        }
        assert!(psi.energy().re > f.mu());
    }
}
