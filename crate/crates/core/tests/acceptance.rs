//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use qpot_core::bounds::{
    linear_test_function, lq_value, powerlaw_coefficients, powerlaw_test_function, random_test_function,
    theorem2_bound,
};
use qpot_core::covariance::{covariance_report, rsur_check, theorem4_check};
use qpot_core::figures::{figure1, figure1_quadrature, figure2, figure2_quadrature};
use qpot_core::gaussian::{
    evolve, gaussian_mvqp, gaussian_vnc, momentum_cov, position_cov, recommended_grid, symplectic_propagator, to_polar,
    GaussianPureState, QuadraticHamiltonian, SymplecticMatrix,
};
use qpot_core::mixed::{
    assemble_density, delta_vnc, diagonal_derivative_identity, mixed_mvqp, mixed_vc, random_gaussian_mixture,
    thermal_box, thermal_mvqp, thermal_state, thermal_truncation, thermal_weights, vnc_convex_decomposition,
    THERMAL_TAIL,
};
use qpot_core::numerics::{sym_eig, sym_sqrt, Axis, Grid, SymMatrix};
use qpot_core::qpotential::{mvqp, vnc};
use qpot_core::states::{gaussian_box, gaussian_polar, ho_box, ho_eigenstate, poschl_teller_state, PolarState, PT_BOX};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ho(n: u32, dq0: f64, hbar: f64) -> PolarState {
    let b = ho_box(n, dq0);
    ho_eigenstate(n, dq0, &Grid::line(-b, b, 513).unwrap(), hbar).unwrap()
}

fn pt(lambda: i64, mu: i64, points: usize) -> PolarState {
    poschl_teller_state(lambda, mu, &Grid::line(-PT_BOX, PT_BOX, points).unwrap(), 1.0).unwrap()
}

fn random_spd<R: Rng>(n: usize, rng: &mut R) -> SymMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::symmetrize(&(&a * a.transpose() + DMatrix::identity(n, n) * rng.random_range(0.3..1.0)))
}

fn random_sym<R: Rng>(n: usize, rng: &mut R) -> SymMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::symmetrize(&((&a + a.transpose()) * 0.5))
}

/// Gaussian with position covariance `v` and chirp `k`.
fn chirped(v: &SymMatrix, k: &SymMatrix, eta_q: Vec<f64>, hbar: f64) -> GaussianPureState {
    let n = v.order();
    let a = sym_sqrt(&v.scale(2.0 / hbar)).unwrap().into_matrix();
    let d = a.clone().try_inverse().unwrap();
    let c = k.as_matrix() * &a;
    let s = SymplecticMatrix::from_blocks(&a, &DMatrix::zeros(n, n), &c, &d).unwrap();
    GaussianPureState::new(s, eta_q, vec![0.0; n], hbar).unwrap()
}

fn ho_mvqp() -> Outcome {
    let (nu, dq0, hbar) = (1.3, 0.8, 1.0);
    let m = SymMatrix::scalar(nu);
    let mut worst = 0.0f64;
    for n in [0u32, 1, 2, 5, 10] {
        let q = mvqp(&ho(n, dq0, hbar), &m).map_err(|e| e.to_string())?;
        let exact = (2 * n + 1) as f64 * hbar * hbar * nu / (8.0 * dq0 * dq0);
        worst = worst.max((q / exact - 1.0).abs());
    }
    ensure(worst < 1e-6, format!("max relative error {worst:.2e}"))
}

fn ho_linear_bound() -> Outcome {
    let (nu, dq0, hbar) = (1.3, 0.8, 1.0);
    let m = SymMatrix::scalar(nu);
    let mut worst = 0.0f64;
    let mut slack_ok = true;
    let mut slack0 = f64::NAN;
    for n in [0u32, 1, 2, 5, 10] {
        let s = ho(n, dq0, hbar);
        let l = lq_value(&s, &m, &linear_test_function(s.grid(), &[0.7])).map_err(|e| e.to_string())?;
        let exact = hbar * hbar * nu / (8.0 * (2 * n + 1) as f64 * dq0 * dq0);
        worst = worst.max((l / exact - 1.0).abs());
        let q = mvqp(&s, &m).map_err(|e| e.to_string())?;
        let slack = (q - l) / q;
        if n == 0 {
            slack0 = slack;
            slack_ok &= slack.abs() < 1e-6;
        } else {
            slack_ok &= slack > 1e-6;
        }
    }
    ensure(worst < 1e-6 && slack_ok, format!("max relative error {worst:.2e}, n=0 relative slack {slack0:.2e}"))
}

fn gaussian_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_a, mut worst_g) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let n = 1 + trial % 3;
        let hbar = rng.random_range(0.5..2.0);
        let v = random_spd(n, &mut rng);
        let k = random_sym(n, &mut rng);
        let g = chirped(&v, &k, vec![0.0; n], hbar);
        let target = DMatrix::identity(n, n) * (0.25 * hbar * hbar);
        let prod = position_cov(&g).into_matrix() * gaussian_vnc(&g).map_err(|e| e.to_string())?.into_matrix();
        worst_a = worst_a.max((prod - &target).amax() / (0.25 * hbar * hbar));
        let points = [0, 257, 129, 81][n];
        let axes = gaussian_box(&v, &vec![0.0; n])
            .into_iter()
            .map(|(lo, hi)| Axis::new(lo, hi, points))
            .collect::<qpot_core::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let grid = Grid::new(axes).map_err(|e| e.to_string())?;
        let s = gaussian_polar(&v, &vec![0.0; n], &grid, hbar).map_err(|e| e.to_string())?;
        let prod = v.as_matrix() * vnc(&s).into_matrix();
        worst_g = worst_g.max((prod - &target).amax() / (0.25 * hbar * hbar));
    }
    ensure(
        worst_a < 1e-8 && worst_g < 1e-5,
        format!("analytic {worst_a:.2e}, grid {worst_g:.2e} (relative to hbar^2/4)"),
    )
}

/// Built-in pure states used by the property suites, with their kinetic matrices.
fn builtins() -> Vec<(String, PolarState, SymMatrix)> {
    let mut out = Vec::new();
    for n in 0..=5u32 {
        out.push((format!("ho n={n}"), ho(n, 1.0, 1.0), SymMatrix::scalar(1.0)));
    }
    for (l, mu) in [(1, 1), (3, 3), (6, 6), (3, 1), (4, 2)] {
        out.push((format!("pt lambda={l} mu={mu}"), pt(l, mu, 2049), SymMatrix::scalar(2.0)));
    }
    let h = QuadraticHamiltonian::harmonic(&[1.0]).unwrap();
    let sq = GaussianPureState::new(SymplecticMatrix::squeeze(&[2.0]).unwrap(), vec![0.5], vec![0.3], 1.0).unwrap();
    let sq = evolve(&sq, &h, 0.6).unwrap();
    out.push(("squeezed t=0.6".into(), to_polar(&sq, &recommended_grid(&sq, 513).unwrap()).unwrap(), SymMatrix::scalar(1.0)));
    let inv = QuadraticHamiltonian::inverted(&[1.0]).unwrap();
    let c = evolve(&GaussianPureState::coherent(vec![0.0], vec![0.0], 1.0).unwrap(), &inv, 0.5).unwrap();
    out.push(("inverted t=0.5".into(), to_polar(&c, &recommended_grid(&c, 513).unwrap()).unwrap(), SymMatrix::scalar(1.0)));
    let v2 = SymMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.6]]).unwrap();
    let g2 = chirped(&v2, &SymMatrix::from_rows(&[vec![0.2, -0.1], vec![-0.1, 0.4]]).unwrap(), vec![0.2, -0.1], 1.0);
    out.push((
        "gaussian 2-D chirped".into(),
        to_polar(&g2, &recommended_grid(&g2, 129).unwrap()).unwrap(),
        SymMatrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 0.5]]).unwrap(),
    ));
    out
}

fn theorem1_suite(states: &[(String, PolarState, SymMatrix)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let mut degenerate = 0;
    let mut min_rel = f64::INFINITY;
    for (name, s, m) in states {
        let q = mvqp(s, m).map_err(|e| format!("{name}: {e}"))?;
        let center = s.mean_position();
        let cov = s.position_cov();
        let width: Vec<f64> = (0..s.dim()).map(|i| 2.0 * cov.get(i, i).sqrt()).collect();
        for _ in 0..200 {
            let t = random_test_function(s.grid(), &center, &width, &mut rng).map_err(|e| e.to_string())?;
            match lq_value(s, m, &t) {
                Ok(l) => {
                    let rel = (q - l) / q;
                    min_rel = min_rel.min(rel);
                    if rel < -1e-6 {
                        violations += 1;
                    }
                }
                Err(_) => degenerate += 1,
            }
        }
    }
    ensure(
        violations == 0,
        format!(
            "{} states x 200 test functions, {violations} violations, min slack/mvqp {min_rel:.2e}, {degenerate} degenerate skipped",
            states.len()
        ),
    )
}

fn theorem2_saturation() -> Outcome {
    let mut worst = 0.0f64;
    for n in 0..=5u32 {
        let s = ho(n, 1.0, 1.0);
        let m = SymMatrix::scalar(1.0);
        let b = theorem2_bound(&s, &m).map_err(|e| e.to_string())?.value;
        worst = worst.max((b / mvqp(&s, &m).map_err(|e| e.to_string())? - 1.0).abs());
    }
    for mu in 1..=10 {
        let s = pt(mu, mu, 2049);
        let m = SymMatrix::scalar(2.0);
        let b = theorem2_bound(&s, &m).map_err(|e| e.to_string())?.value;
        worst = worst.max((b / mvqp(&s, &m).map_err(|e| e.to_string())? - 1.0).abs());
    }
    ensure(worst < 1e-5, format!("max relative gap {worst:.2e} over HO n<=5 and PT mu<=10"))
}

fn thermal() -> Outcome {
    let (nu, dq0, hbar) = (1.0, 1.0, 1.0);
    let mut worst = 0.0f64;
    let mut worst_vc = 0.0f64;
    let mut worst_delta = 0.0f64;
    let mut ks = Vec::new();
    for x in [0.5, 1.0, 2.0, 8.0] {
        let k = thermal_truncation(x);
        let tail = (-x * k as f64).exp();
        if tail >= THERMAL_TAIL {
            return Err(format!("truncation K={k} leaves weight {tail:e}"));
        }
        thermal_weights(x, k).map_err(|e| e.to_string())?;
        let grid = Grid::line(-thermal_box(k, dq0), thermal_box(k, dq0), 1025).map_err(|e| e.to_string())?;
        let ms = thermal_state(hbar, x, dq0, None, &grid).map_err(|e| e.to_string())?;
        let d = assemble_density(&ms).map_err(|e| e.to_string())?;
        let q = mixed_mvqp(&d, nu).map_err(|e| e.to_string())?;
        worst = worst.max((q / thermal_mvqp(x, nu, dq0, hbar) - 1.0).abs());
        worst_vc = worst_vc.max(mixed_vc(&ms).get(0, 0).abs());
        worst_delta = worst_delta.max(delta_vnc(&ms).get(0, 0).abs());
        ks.push(k);
    }
    ensure(
        worst < 1e-3 && worst_vc == 0.0 && worst_delta < 1e-8,
        format!("K={ks:?}, max relative error {worst:.2e}, |Vc| {worst_vc:.1e}, |dVnc| {worst_delta:.1e}"),
    )
}

fn inverted_oscillator() -> Outcome {
    let mut worst = 0.0f64;
    let mut strict = true;
    let mut closed = 0.0f64;
    for (nu, hbar) in [(1.0, 1.0), (0.7, 0.5)] {
        let h = QuadraticHamiltonian::inverted(&[nu]).map_err(|e| e.to_string())?;
        let g0 = GaussianPureState::coherent(vec![0.0], vec![0.0], hbar).map_err(|e| e.to_string())?;
        let m = SymMatrix::scalar(nu);
        for t in [0.0, 0.25, 0.5, 1.0] {
            let g = evolve(&g0, &h, t).map_err(|e| e.to_string())?;
            let v = position_cov(&g).get(0, 0);
            let p = momentum_cov(&g).get(0, 0);
            let q = gaussian_mvqp(&g, &m).map_err(|e| e.to_string())?;
            let floor = hbar * hbar * nu / 8.0;
            worst = worst.max((q * v / floor - 1.0).abs());
            closed = closed.max((v / (0.5 * hbar * (2.0 * nu * t).cosh()) - 1.0).abs());
            closed = closed.max((q / (hbar * nu / (4.0 * (2.0 * nu * t).cosh())) - 1.0).abs());
            if t > 0.0 {
                strict &= v * p > 0.25 * hbar * hbar * (1.0 + 1e-12);
            }
        }
    }
    ensure(
        worst < 1e-8 && closed < 1e-8 && strict,
        format!("<Q>dq^2 relative error {worst:.2e}, closed forms {closed:.2e}, strict RS product for t>0: {strict}"),
    )
}

fn pt_figures() -> Outcome {
    let mus: Vec<i64> = (1..=40).collect();
    let rows = figure1(&mus, &[1, 2, 3, 4, 5, 7]).map_err(|e| e.to_string())?;
    let mut n1 = 0.0f64;
    let mut ok = true;
    for chunk in rows.chunks(6) {
        n1 = n1.max((chunk[0].bound / chunk[0].mvqp - 1.0).abs());
        ok &= chunk[1].bound == 0.0 && chunk[3].bound == 0.0;
        ok &= chunk[0].bound > chunk[2].bound && chunk[2].bound > chunk[4].bound && chunk[4].bound > chunk[5].bound;
    }
    let monotone = |rows: &[qpot_core::figures::Figure2Row]| {
        rows.iter().all(|r| r.difference > 0.0) && rows.windows(2).all(|w| w[1].difference < w[0].difference)
    };
    let f2 = figure2(&mus).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let ext = figure2(&(1..=200).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let ext_secs = start.elapsed().as_secs_f64();
    let mut quad = 0.0f64;
    for mu in [1, 2, 5, 10, 20] {
        for n in [1, 3, 5] {
            let c = rows.iter().find(|r| r.mu == mu && r.n == n).unwrap().bound;
            quad = quad.max((figure1_quadrature(mu, n, 4097).map_err(|e| e.to_string())? / c - 1.0).abs());
        }
        let (q, l) = figure2_quadrature(mu, 4097).map_err(|e| e.to_string())?;
        let r = f2[mu as usize - 1];
        quad = quad.max((q / r.mvqp - 1.0).abs()).max((l / r.linear_bound - 1.0).abs());
    }
    ensure(
        n1 < 1e-6 && ok && monotone(&f2) && monotone(&ext) && quad < 1e-5,
        format!(
            "n=1 vs <Q> {n1:.1e}, ordering {ok}, fig2 monotone mu<=40 {}, mu<=200 {} ({ext_secs:.2}s), closed vs quadrature {quad:.2e}",
            monotone(&f2),
            monotone(&ext)
        ),
    )
}

fn theorem4_chain(states: &[(String, PolarState, SymMatrix)]) -> Outcome {
    let mut failures = Vec::new();
    let mut counterexamples = 0;
    let mut checked = 0;
    let mut min_delta = f64::INFINITY;
    for (name, s, m) in states.iter().filter(|(_, s, _)| s.dim() == 1) {
        let r = covariance_report(s, m).map_err(|e| format!("{name}: {e}"))?;
        let q = mvqp(s, m).map_err(|e| format!("{name}: {e}"))?;
        let t4 = theorem4_check(&r, q, 1.0 / m.get(0, 0), s.hbar()).map_err(|e| format!("{name}: {e}"))?;
        let rs = rsur_check(&r, s.hbar()).map_err(|e| format!("{name}: {e}"))?;
        let scale = r.v.get(0, 0) * r.vt.get(0, 0);
        min_delta = min_delta.min(t4.delta / scale);
        if !t4.pass || t4.delta < -1e-8 * scale {
            failures.push(name.clone());
        }
        if t4.pass && !rs.pass {
            counterexamples += 1;
        }
        checked += 1;
    }
    ensure(
        failures.is_empty() && counterexamples == 0,
        format!("{checked} states, failing {failures:?}, min delta/scale {min_delta:.2e}, implication counterexamples {counterexamples}"),
    )
}

fn appendix_b() -> Outcome {
    let grid = Grid::line(-16.0, 16.0, 513).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut b2, mut min_ev, mut conv) = (0.0f64, f64::INFINITY, 0.0f64);
    for trial in 0..100 {
        let k = 2 + trial % 3;
        let ms = random_gaussian_mixture(k, &grid, 1.0, &mut rng).map_err(|e| e.to_string())?;
        min_ev = min_ev.min(sym_eig(&delta_vnc(&ms)).map_err(|e| e.to_string())?.min());
        if trial % 10 == 0 {
            let d = assemble_density(&ms).map_err(|e| e.to_string())?;
            b2 = b2.max(diagonal_derivative_identity(&d).map_err(|e| e.to_string())?.residual());
            let total = vnc_convex_decomposition(&ms, &SymMatrix::scalar(1.0)).map_err(|e| e.to_string())?.total.get(0, 0);
            let dens = 2.0 * mixed_mvqp(&d, 1.0).map_err(|e| e.to_string())?;
            conv = conv.max((total / dens - 1.0).abs());
        }
    }
    let th = thermal_state(1.0, 1.0, 1.0, None, &Grid::line(-thermal_box(19, 1.0), thermal_box(19, 1.0), 1025).unwrap())
        .map_err(|e| e.to_string())?;
    b2 = b2.max(diagonal_derivative_identity(&assemble_density(&th).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.residual());
    ensure(
        b2 < 1e-5 && min_ev >= -1e-12 && conv < 1e-4,
        format!("diagonal identity {b2:.2e}, min eigenvalue of dVnc {min_ev:.2e}, convex vs density {conv:.2e}"),
    )
}

fn symplectic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut res, mut group) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let m = random_spd(n, &mut rng);
        let l = random_sym(n, &mut rng);
        let c = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
        let h = QuadraticHamiltonian::new(m, c, l, vec![0.0; n], vec![0.0; n], 0.0).map_err(|e| e.to_string())?;
        let (t1, t2) = (rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
        let s1 = symplectic_propagator(&h, t1).map_err(|e| e.to_string())?;
        let s2 = symplectic_propagator(&h, t2).map_err(|e| e.to_string())?;
        let s12 = symplectic_propagator(&h, t1 + t2).map_err(|e| e.to_string())?;
        res = res.max(s1.residual()).max(s2.residual()).max(s12.residual());
        let diff = s1.compose(&s2).map_err(|e| e.to_string())?.full() - s12.full();
        group = group.max(diff.amax() / s12.full().amax().max(1.0));
    }
    let mut closed = 0.0f64;
    for trial in 0..20 {
        let n = 1 + trial % 3;
        let nu: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..2.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..2.5)).collect();
        let eq: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ep: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let hbar = 1.0;
        let t = rng.random_range(0.0..3.0);
        let h = QuadraticHamiltonian::harmonic(&nu).map_err(|e| e.to_string())?;
        let g0 = GaussianPureState::new(SymplecticMatrix::squeeze(&a).unwrap(), eq.clone(), ep.clone(), hbar)
            .map_err(|e| e.to_string())?;
        let g = evolve(&g0, &h, t).map_err(|e| e.to_string())?;
        let v = position_cov(&g);
        for i in 0..n {
            let (c, s) = ((nu[i] * t).cos(), (nu[i] * t).sin());
            let vt = 0.5 * hbar * (c * c * a[i] * a[i] + s * s / (a[i] * a[i]));
            closed = closed.max((v.get(i, i) - vt).abs() / vt);
            for j in 0..n {
                if i != j {
                    closed = closed.max(v.get(i, j).abs());
                }
            }
            closed = closed.max((g.eta_q()[i] - (c * eq[i] + s * ep[i])).abs());
        }
    }
    ensure(
        res < 1e-9 && group < 1e-9 && closed < 1e-8,
        format!("block residual {res:.2e}, group property {group:.2e}, squeeze/mean closed forms {closed:.2e}"),
    )
}

fn powerlaw() -> Outcome {
    let mut worst = 0.0f64;
    for (var, eta, chirp) in [(1.0, 0.0, 0.0), (0.4, 0.3, 0.0), (2.5, -1.0, 0.7)] {
        let g = chirped(&SymMatrix::scalar(var), &SymMatrix::scalar(chirp), vec![eta], 1.0);
        let s = to_polar(&g, &recommended_grid(&g, 1025).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let m = SymMatrix::scalar(1.0);
        let base = lq_value(&s, &m, &powerlaw_test_function(s.grid(), 0, eta, 1)).map_err(|e| e.to_string())?;
        for k in [3, 5, 7, 9] {
            let l = lq_value(&s, &m, &powerlaw_test_function(s.grid(), 0, eta, k)).map_err(|e| e.to_string())?;
            let c = powerlaw_coefficients(k as i64).map_err(|e| e.to_string())?;
            worst = worst.max((l / (c * base) - 1.0).abs());
        }
    }
    let cs: Vec<f64> = (0..50).map(|i| powerlaw_coefficients(2 * i + 1).unwrap()).collect();
    let decreasing = cs.windows(2).all(|w| w[1] < w[0]);
    ensure(
        worst < 1e-5 && cs[0] == 1.0 && decreasing,
        format!("max relative error {worst:.2e}, C1 = {}, strictly decreasing to k=99: {decreasing}", cs[0]),
    )
}

fn main() -> ExitCode {
    let states = builtins();
    let criteria: Vec<(&str, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("AC-01", "HO mean quantum potential", Box::new(ho_mvqp)),
        ("AC-02", "HO linear bound and slack", Box::new(ho_linear_bound)),
        ("AC-03", "Gaussian equality V*Vnc = hbar^2/4", Box::new(gaussian_equality)),
        ("AC-04", "Theorem-1 random test functions", Box::new(|| theorem1_suite(&states))),
        ("AC-05", "Theorem-2 1-DF saturation", Box::new(theorem2_saturation)),
        ("AC-06", "thermal state", Box::new(thermal)),
        ("AC-07", "inverted oscillator", Box::new(inverted_oscillator)),
        ("AC-08", "Poschl-Teller figures", Box::new(pt_figures)),
        ("AC-09", "Theorem-4 chain and RSUR implication", Box::new(|| theorem4_chain(&states))),
        ("AC-10", "mixed-state identities", Box::new(appendix_b)),
        ("AC-11", "symplectic suite", Box::new(symplectic_suite)),
        ("AC-12", "power-law bounds", Box::new(powerlaw)),
    ];
    let mut failed = 0;
    for (id, name, run) in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {id} {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} {name}: {msg} [{secs:.2}s]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
