use nalgebra::DMatrix;
use pdm_isospec::model::{ModelParams, Solution};
use pdm_isospec::numspec::{
    count_nodes, discretize, eigenvalues_lowest, l_doubling, quad, DiscretizedHamiltonian, Grid, DEFAULT_BOX,
};
use pdm_isospec::Error;
use proptest::prelude::*;

fn model() -> ModelParams {
    ModelParams::new(5.0, 0.0, 3.0)
}

fn model_matrix(lo: f64, hi: f64, n: usize) -> DiscretizedHamiltonian {
    let p = model();
    discretize(|x| p.mass(x), |x| p.potential(x), Grid::new(lo, hi, n).unwrap()).unwrap()
}

fn dense(h: &DiscretizedHamiltonian) -> DMatrix<f64> {
    let n = h.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = h.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = h.offdiag[i];
            m[(i + 1, i)] = h.offdiag[i];
        }
    }
    m
}

#[test]
fn bisection_agrees_with_dense_solver() {
    let h = model_matrix(-8.0, 8.0, 50);
    let m = dense(&h);
    assert_eq!(m, m.transpose());
    let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    for (j, e) in eig.iter().enumerate() {
        let got = h.eigenvalue(j).unwrap();
        assert!((got - e).abs() <= 1e-9 * e.abs().max(1.0), "j={j}: {got} vs {e}");
    }
}

#[test]
fn operator_is_symmetric() {
    let h = model_matrix(DEFAULT_BOX.0, DEFAULT_BOX.1, 400);
    let u: Vec<f64> = (0..400).map(|i| ((i as f64) * 0.37).sin()).collect();
    let v: Vec<f64> = (0..400).map(|i| ((i as f64) * 0.11).cos() * (i % 7) as f64).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (hu, hv) = (h.apply(&u), h.apply(&v));
    let (l, r) = (dot(&hu, &v), dot(&u, &hv));
    assert!((l - r).abs() <= 1e-12 * l.abs().max(r.abs()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn sturm_count_matches_bisection(lambda in 0.0..200.0f64) {
        let h = model_matrix(DEFAULT_BOX.0, DEFAULT_BOX.1, 300);
        let count = h.sturm_count(lambda);
        let below = (0..h.len()).take_while(|&j| h.eigenvalue(j).unwrap() < lambda).count();
        prop_assert_eq!(count, below);
    }
}

#[test]
fn truncation_at_fixed_spacing() {
    // same lattice (h = 0.01) on [−12, 12] and [−14, 14]
    let small = model_matrix(-12.0, 12.0, 2399);
    let large = model_matrix(-14.0, 14.0, 2799);
    assert!((small.grid.h() - large.grid.h()).abs() < 1e-15);
    for j in 0..4 {
        let (a, b) = (small.eigenvalue(j).unwrap(), large.eigenvalue(j).unwrap());
        assert!((a - b).abs() <= 1e-6, "j={j}: {a} vs {b}");
    }
}

#[test]
fn ground_state_is_normalized() {
    let psi0 = model().bound_state(0).unwrap();
    let q = quad(|x| Ok(psi0.psi(x)?.powi(2)), -40.0, 40.0, 1e-12).unwrap();
    assert!((q.value - 1.0).abs() < 1e-8, "{q:?}");
    let psi3 = model().bound_state(3).unwrap();
    let q = quad(|x| Ok(psi3.psi(x)?.powi(2)), -40.0, 40.0, 1e-12).unwrap();
    assert!((q.value - 1.0).abs() < 1e-8, "{q:?}");
    let cross = quad(|x| Ok(psi0.psi(x)? * psi3.psi(x)?), -40.0, 40.0, 1e-12).unwrap();
    assert!(cross.value.abs() < 1e-8);
}

#[test]
fn eigenvector_matches_ground_state() {
    let h = model_matrix(DEFAULT_BOX.0, DEFAULT_BOX.1, 2000);
    let e0 = h.eigenvalue(0).unwrap();
    let v = h.eigenvector(e0).unwrap();
    let psi0 = model().bound_state(0).unwrap();
    let exact: Vec<f64> = h.grid.points().iter().map(|&x| psi0.psi(x).unwrap()).collect();
    let peak = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dev = v.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-3 * peak, "{dev} vs {peak}");
}

#[test]
fn node_counts() {
    let h = model_matrix(DEFAULT_BOX.0, DEFAULT_BOX.1, 1000);
    for n in 0..4 {
        let v = h.eigenvector(h.eigenvalue(n).unwrap()).unwrap();
        assert_eq!(count_nodes(&v), n);
    }
    let psi2 = model().bound_state(2).unwrap();
    let samples: Vec<f64> = (0..=600).map(|i| psi2.psi(-15.0 + 0.05 * i as f64).unwrap()).collect();
    assert_eq!(count_nodes(&samples), 2);
}

#[test]
fn model_levels_on_the_acceptance_box() {
    let h = model_matrix(DEFAULT_BOX.0, DEFAULT_BOX.1, 2000);
    let s = eigenvalues_lowest(&h, 3).unwrap();
    for (got, want) in s.eigenvalues.iter().zip([4.5, 10.5, 18.5]) {
        assert!((got - want).abs() / want < 1e-3);
    }
}

#[test]
fn missing_state_of_a_deletion_diverges() {
    let psi0 = model().bound_state(0).unwrap();
    let p = model();
    let v = l_doubling(|x| Ok(p.mass(x).sqrt() / psi0.psi(x)?)).unwrap();
    assert!(!v.is_normalizable());
}

#[test]
fn oversized_box_is_rejected() {
    let p = model();
    let r = discretize(|x| p.mass(x), |_| Ok(0.0), Grid::new(-800.0, 800.0, 100).unwrap());
    assert!(matches!(r, Err(Error::BoxTooLarge(..))));
}

#[test]
fn seeds_and_states_share_the_solution_interface() {
    let psi = model().bound_state(1).unwrap();
    assert_eq!(psi.energy().re, 10.5);
    assert!(psi.is_real());
}
