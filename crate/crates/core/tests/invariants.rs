use nalgebra::DMatrix;
use proptest::prelude::*;
use qpot_core::bounds::{linear_bound, linear_test_function, lq_value, random_test_function};
use qpot_core::gaussian::{
    evolve, gaussian_mvqp, gaussian_vnc, position_cov, symplectic_propagator, to_polar, recommended_grid,
    GaussianPureState, QuadraticHamiltonian, SymplecticMatrix,
};
use qpot_core::mixed::{delta_vnc, random_gaussian_mixture};
use qpot_core::numerics::{sym_eig, sym_sqrt, Grid, SymMatrix};
use qpot_core::qpotential::{mvqp, vnc};
use qpot_core::states::{ho_box, ho_eigenstate, PolarState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spd(n: usize) -> impl Strategy<Value = SymMatrix> {
    (prop::collection::vec(-1.0f64..1.0, n * n), 0.3f64..1.5).prop_map(move |(v, shift)| {
        let a = DMatrix::from_vec(n, n, v);
        SymMatrix::symmetrize(&(&a * a.transpose() + DMatrix::identity(n, n) * shift))
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        SymMatrix::symmetrize(&((&a + a.transpose()) * 0.5))
    })
}

fn hamiltonian() -> impl Strategy<Value = QuadraticHamiltonian> {
    (1usize..=3)
        .prop_flat_map(|n| (spd(n), symmetric(n), prop::collection::vec(-0.5f64..0.5, n * n), Just(n)))
        .prop_map(|(m, l, c, n)| {
            QuadraticHamiltonian::new(m, DMatrix::from_vec(n, n, c), l, vec![0.0; n], vec![0.0; n], 0.0).unwrap()
        })
}

/// Gaussian with covariance `v` and chirp `k`: `a = √(2V/ħ)`, `c = k·a`, `d = a⁻¹`.
fn chirped(v: &SymMatrix, k: &SymMatrix, hbar: f64) -> GaussianPureState {
    let n = v.order();
    let a = sym_sqrt(&v.scale(2.0 / hbar)).unwrap().into_matrix();
    let d = a.clone().try_inverse().unwrap();
    let c = k.as_matrix() * &a;
    let s = SymplecticMatrix::from_blocks(&a, &DMatrix::zeros(n, n), &c, &d).unwrap();
    GaussianPureState::new(s, vec![0.0; n], vec![0.0; n], hbar).unwrap()
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagators_stay_symplectic(h in hamiltonian(), t in -1.0f64..1.0) {
        let s = symplectic_propagator(&h, t).unwrap();
        prop_assert!(s.residual() < 1e-9);
    }

    #[test]
    fn propagators_compose(h in hamiltonian(), t1 in -0.7f64..0.7, t2 in -0.7f64..0.7) {
        let s1 = symplectic_propagator(&h, t1).unwrap();
        let s2 = symplectic_propagator(&h, t2).unwrap();
        let s12 = symplectic_propagator(&h, t1 + t2).unwrap();
        prop_assert!(rel(s1.compose(&s2).unwrap().full(), s12.full()) < 1e-9);
    }

    #[test]
    fn gaussian_equality_analytic((v, k) in (1usize..=3).prop_flat_map(|n| (spd(n), symmetric(n))), hbar in 0.5f64..2.0) {
        let n = v.order();
        let g = chirped(&v, &k, hbar);
        let prod = position_cov(&g).into_matrix() * gaussian_vnc(&g).unwrap().into_matrix();
        let target = DMatrix::identity(n, n) * (0.25 * hbar * hbar);
        prop_assert!((prod - target).amax() < 1e-8 * hbar * hbar);
    }

    #[test]
    fn evolution_preserves_equality(h in hamiltonian(), t in 0.0f64..1.0) {
        let n = h.dim();
        let g0 = GaussianPureState::coherent(vec![0.0; n], vec![0.0; n], 1.0).unwrap();
        let g = evolve(&g0, &h, t).unwrap();
        let prod = position_cov(&g).into_matrix() * gaussian_vnc(&g).unwrap().into_matrix();
        prop_assert!((prod - DMatrix::identity(n, n) * 0.25).amax() < 1e-8);
    }

    #[test]
    fn theorem1_and_affine_symmetry(n in 0u32..=4, seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        prop_assume!(alpha.abs() > 0.05);
        let b = ho_box(n, 1.0);
        let s = ho_eigenstate(n, 1.0, &Grid::line(-b, b, 513).unwrap(), 1.0).unwrap();
        let m = SymMatrix::scalar(1.0);
        let q = mvqp(&s, &m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = s.position_cov().get(0, 0).sqrt() * 2.0;
        let t = random_test_function(s.grid(), &[0.0], &[width], &mut rng).unwrap();
        if let Ok(l) = lq_value(&s, &m, &t) {
            prop_assert!(q - l >= -1e-6 * q);
            let la = lq_value(&s, &m, &t.affine(alpha, beta, &s).unwrap()).unwrap();
            prop_assert!((la - l).abs() <= 1e-10 * l.abs().max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn courant_fischer_sandwich(v in spd(2), mdiag in prop::collection::vec(0.5f64..2.0, 2), zeta in prop::collection::vec(-1.0f64..1.0, 2)) {
        prop_assume!(zeta.iter().map(|z| z * z).sum::<f64>() > 1e-3);
        let g = chirped(&v, &SymMatrix::from_diagonal(&[0.0, 0.0]), 1.0);
        let grid = recommended_grid(&g, 129).unwrap();
        let s: PolarState = to_polar(&g, &grid).unwrap();
        let m = SymMatrix::from_diagonal(&mdiag);
        let lb = linear_bound(&s, &m).unwrap();
        let l = lq_value(&s, &m, &linear_test_function(s.grid(), &zeta)).unwrap();
        prop_assert!(l >= lb.lower * (1.0 - 1e-8) && l <= lb.upper * (1.0 + 1e-8));
        prop_assert!(lb.upper <= gaussian_mvqp(&g, &m).unwrap() * (1.0 + 1e-5));
    }

    #[test]
    fn mixture_correction_is_psd(seed in any::<u64>(), k in 2usize..=4) {
        let grid = Grid::line(-16.0, 16.0, 257).unwrap();
        let ms = random_gaussian_mixture(k, &grid, 1.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let d = delta_vnc(&ms);
        prop_assert!(sym_eig(&d).unwrap().min() >= -1e-12);
        let sum: f64 = ms.weights().iter().zip(ms.components()).map(|(w, c)| w * vnc(c).get(0, 0)).sum();
        prop_assert!(sum > 0.0);
    }
}
