use pdm_isospec::model::{Asymptote, ModelParams, Solution};
use proptest::prelude::*;

fn models() -> [ModelParams; 3] {
    [
        ModelParams::new(5.0, 0.0, 3.0),
        ModelParams::new(3.0, 5.0, 4.0),
        ModelParams::new(2.8, 20.0, 4.4),
    ]
}

#[test]
fn bound_states_vanish_under_the_weight() {
    for p in models() {
        for n in 0..4 {
            let psi = p.bound_state(n).unwrap();
            for x in [-25.0, 25.0] {
                let w = psi.psi(x).unwrap().powi(2) / p.mass(x).sqrt();
                assert!(w < 1e-8, "{p:?} n={n} x={x}: {w}");
            }
        }
    }
}

#[test]
fn shift_leaves_potential_and_levels_alone() {
    for p in models() {
        for nu in [-1.3, 0.5, 7.2] {
            let q = p.with_nu(nu);
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let (a, b) = (p.potential(x).unwrap(), q.potential(x).unwrap());
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "x={x}: {a} vs {b}");
            }
            for n in 0..4 {
                assert_eq!(p.energy(n).unwrap(), q.energy(n).unwrap());
            }
        }
    }
}

// −(ψ'/M)' + Vψ − Eψ by central differences of the exact ψ'
#[test]
fn bound_states_solve_the_equation() {
    let h = 1e-4;
    for p in models() {
        for n in 0..4 {
            let psi = p.bound_state(n).unwrap();
            let e = p.energy(n).unwrap();
            let flux = |x: f64| psi.dpsi(x).unwrap() / p.mass(x);
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..=60 {
                let x = -6.0 + 0.2 * i as f64;
                let hpsi = -(flux(x + h) - flux(x - h)) / (2.0 * h) + p.potential(x).unwrap() * psi.psi(x).unwrap();
                worst = worst.max((hpsi - e * psi.psi(x).unwrap()).abs());
                scale = scale.max((e * psi.psi(x).unwrap()).abs());
            }
            assert!(worst <= 1e-6 * scale, "{p:?} n={n}: {worst} / {scale}");
        }
    }
}

#[test]
fn seed_energy_is_the_factorization_energy() {
    let p = ModelParams::new(2.8, 20.0, 4.4).with_weights(1.0, 1.0);
    let s = p.seed().unwrap();
    assert!((s.energy().re + 13.32).abs() < 1e-12);
    let x = 0.3;
    let j = s.jet(x).unwrap();
    let [m0, m1, ..] = p.mass_jet(x);
    // u'' = (M'/M)u' + M(V − μ)u
    let rhs = m1 / m0 * j.v[1] + m0 * (p.potential(x).unwrap() - s.energy()) * j.v[0];
    assert!((j.v[2] - rhs).norm() <= 1e-10 * j.v[2].norm().max(1.0));
}

fn sampled(ln_at: impl Fn(f64) -> f64, near: f64, far: f64) -> Option<Asymptote> {
    // growth rate of ln|u| toward the end
    let rate = (ln_at(far) - ln_at(near)) / (far - near).abs();
    if rate.abs() < 0.1 {
        return None;
    }
    Some(if rate < 0.0 {
        Asymptote::VanishesAtEnd
    } else {
        Asymptote::UnboundedAtEnd
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn asymptote_classifier_agrees_with_sampling(
        a in 0.0..6.0f64,
        b in -3.0..6.0f64,
        c in 0.3..5.0f64,
        alpha in -1.0..1.0f64,
        beta in -1.0..1.0f64,
    ) {
        prop_assume!((c - c.round()).abs() > 0.05);
        prop_assume!(alpha.abs() > 0.05 || beta.abs() > 0.05);
        let p = ModelParams::new(a, b, c).with_weights(alpha, beta);
        let s = match p.seed() {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let ln = |x: f64| s.jet(x).unwrap().ln_abs();
        for (class, near, far) in [(s.left_asymptote(), -20.0, -30.0), (s.right_asymptote(), 20.0, 30.0)] {
            if class == Asymptote::BoundedNonzero {
                continue;
            }
            if let Some(seen) = sampled(ln, near, far) {
                prop_assert_eq!(class, seen, "{:?} on [{}, {}]", p, near, far);
            }
        }
    }
}
