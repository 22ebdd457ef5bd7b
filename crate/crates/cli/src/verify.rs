use nalgebra::DMatrix;
use qpot_core::bounds::{linear_bound, linear_test_function, lq_value, random_test_function, theorem2_bound};
use qpot_core::covariance::{
    covariance_report, gaussian_covariance_report, min_quantum_correlation, no_classical_corr_check, rsur_check, theorem4_check,
};
use qpot_core::figures::pt_mvqp;
use qpot_core::gaussian::{gaussian_mvqp, gaussian_vnc, position_cov, GaussianPureState};
use qpot_core::mixed::{
    assemble_density, delta_vnc, density_vnc, diagonal_derivative_identity, mixed_min_correlation, mixed_vc,
    theorem3_check, thermal_mvqp, vnc_convex_decomposition, MixedState,
};
use qpot_core::numerics::sym_eig;
use qpot_core::qpotential::{mvqp, vnc};
use qpot_core::states::PolarState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::build::{Body, Built, Family};

/// Random test functions per Theorem-1 sweep.
pub const RANDOM_T0: usize = 200;
/// Random directions per Courant–Fischer sweep.
pub const RANDOM_ZETA: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Distance from the failure threshold; negative means failed.
    pub margin: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub state: String,
    pub hbar: f64,
    pub mass: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub pass: bool,
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
    skipped: Vec<Skipped>,
}

impl Suite {
    fn margin(&mut self, name: &str, value: f64, margin: f64, detail: Option<String>) {
        self.checks.push(Check { name: name.into(), value, margin, pass: margin >= 0.0, detail });
    }

    /// `|value/reference − 1| ≤ tol`.
    fn relative(&mut self, name: &str, value: f64, reference: f64, tol: f64) {
        let err = (value / reference - 1.0).abs();
        let margin = if err.is_finite() { tol - err } else { f64::NEG_INFINITY };
        self.margin(name, value, margin, Some(format!("reference {reference:e}, relative error {err:.3e}")));
    }

    fn flag(&mut self, name: &str, value: f64, pass: bool, detail: String) {
        self.checks.push(Check { name: name.into(), value, margin: if pass { 0.0 } else { -1.0 }, pass, detail: Some(detail) });
    }

    fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.skipped.push(Skipped { name: name.into(), reason: reason.into() });
    }

    /// Runs `f`; a library error becomes a failed check rather than an abort.
    fn guard(&mut self, name: &str, f: impl FnOnce(&mut Suite) -> qpot_core::Result<()>) {
        if let Err(e) = f(self) {
            self.checks.push(Check {
                name: name.into(),
                value: f64::NAN,
                margin: f64::NEG_INFINITY,
                pass: false,
                detail: Some(e.to_string()),
            });
        }
    }
}

pub fn run(b: &Built, seed: u64) -> VerifyReport {
    let mut suite = Suite::default();
    match &b.body {
        Body::Pure { state, gaussian } => pure_checks(&mut suite, b, state, gaussian.as_ref(), seed),
        Body::Mixed(ms) => mixed_checks(&mut suite, b, ms),
    }
    let pass = suite.checks.iter().all(|c| c.pass);
    VerifyReport {
        state: b.label.clone(),
        hbar: b.hbar,
        mass: b.mass,
        seed,
        checks: suite.checks,
        skipped: suite.skipped,
        pass,
    }
}

fn pure_checks(suite: &mut Suite, b: &Built, s: &PolarState, g: Option<&GaussianPureState>, seed: u64) {
    let m = &b.kinetic;
    let hbar = b.hbar;
    suite.margin("normalization", s.norm(), 1e-6 - (s.norm() - 1.0).abs(), None);
    let q = match mvqp(s, m) {
        Ok(q) => q,
        Err(e) => {
            suite.flag("mvqp", f64::NAN, false, e.to_string());
            return;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    suite.guard("theorem1_random", |suite| {
        let center = s.mean_position();
        let cov = s.position_cov();
        let width: Vec<f64> = (0..s.dim()).map(|i| 2.0 * cov.get(i, i).sqrt()).collect();
        let mut worst = f64::INFINITY;
        let mut degenerate = 0;
        let mut first = None;
        for _ in 0..RANDOM_T0 {
            let t = random_test_function(s.grid(), &center, &width, &mut rng)?;
            match lq_value(s, m, &t) {
                Ok(l) => {
                    worst = worst.min((q - l) / q);
                    first.get_or_insert((t, l));
                }
                Err(qpot_core::Error::DegenerateTestFunction) => degenerate += 1,
                Err(e) => return Err(e),
            }
        }
        suite.margin(
            "theorem1_random",
            worst,
            worst + 1e-6,
            Some(format!("{RANDOM_T0} test functions, min (mvqp - L_Q)/mvqp, {degenerate} degenerate")),
        );
        if let Some((t, l)) = first {
            let la = lq_value(s, m, &t.affine(-2.5, 0.75, s)?)?;
            let err = (la - l).abs() / l.abs().max(f64::MIN_POSITIVE);
            suite.margin("affine_symmetry", la, 1e-10 - err, Some(format!("L_Q(-2.5 T + 0.75) vs L_Q(T), relative {err:.2e}")));
        }
        Ok(())
    });

    suite.guard("courant_fischer", |suite| {
        let lb = linear_bound(s, m)?;
        let mut worst = f64::INFINITY;
        for _ in 0..RANDOM_ZETA {
            let zeta: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            if zeta.iter().all(|z| z.abs() < 1e-3) {
                continue;
            }
            let l = lq_value(s, m, &linear_test_function(s.grid(), &zeta))?;
            worst = worst.min((l - lb.lower) / lb.upper).min((lb.upper - l) / lb.upper);
        }
        suite.margin("courant_fischer", worst, worst + 1e-8, Some(format!("{RANDOM_ZETA} random zeta inside [lower, upper]")));
        suite.margin("linear_bound_below_mvqp", lb.upper, (q - lb.upper) / q + 1e-6, None);
        Ok(())
    });

    suite.guard("theorem2_bound", |suite| {
        let t2 = theorem2_bound(s, m)?;
        suite.margin("theorem2_bound", t2.value, (q - t2.value) / q + 1e-6, Some(t2.label.clone()));
        if s.dim() == 1 {
            suite.relative("theorem2_saturation", t2.value, q, 1e-5);
        }
        Ok(())
    });

    suite.guard("covariance", |suite| {
        let r = covariance_report(s, m)?;
        let rs = rsur_check(&r, hbar)?;
        match g {
            Some(g) => {
                let exact = rsur_check(&gaussian_covariance_report(g)?, hbar)?;
                suite.flag("rsur", exact.min_eigenvalue, exact.pass, "analytic covariances, smallest Schur eigenvalue".into());
                suite.flag("rsur_grid", rs.min_eigenvalue, rs.pass, "grid covariances, smallest Schur eigenvalue".into());
            }
            None => suite.flag("rsur", rs.min_eigenvalue, rs.pass, "smallest eigenvalue of the Schur complement".into()),
        }
        let mc = min_quantum_correlation(&r, m)?;
        suite.margin("min_quantum_correlation", mc.trace, mc.trace - mc.lambda_max, Some("Tr[Vnc M] - max eig".into()));
        if s.is_real_valued() {
            let nc = no_classical_corr_check(&r, m, hbar)?;
            suite.flag("no_classical_correlations", nc.min_eigenvalue, nc.pass, format!("trace lower {:e}", nc.trace_lower));
        } else {
            suite.skip("no_classical_correlations", "state has a nonconstant phase");
        }
        if s.dim() == 1 {
            let t4 = theorem4_check(&r, q, 1.0 / m.get(0, 0), hbar)?;
            suite.flag("theorem4_chain", t4.delta, t4.pass, format!("momentum_excess {:e}, delta {:e}, mvqp_excess {:e}", t4.momentum_excess, t4.delta, t4.mvqp_excess));
            suite.flag("theorem4_implies_rsur", t4.rsur, !t4.pass || rs.pass, "chain pass implies RSUR pass".into());
            if g.is_some() {
                suite.flag("mvqp_width_saturation", t4.mvqp_excess, t4.mvqp_saturated, "<Q> dq^2 = hbar^2/8m for Gaussian states".into());
            }
        } else {
            suite.skip("theorem4_chain", "one degree of freedom only");
        }
        Ok(())
    });

    if let Some(g) = g {
        suite.guard("gaussian_equality", |suite| {
            let n = g.dim();
            let target = DMatrix::identity(n, n) * (0.25 * hbar * hbar);
            let scale = 0.25 * hbar * hbar;
            let analytic = position_cov(g).into_matrix() * gaussian_vnc(g)?.into_matrix();
            let err = (analytic - &target).amax() / scale;
            suite.margin("gaussian_equality_analytic", err, 1e-8 - err, None);
            let grid = s.position_cov().into_matrix() * vnc(s).into_matrix();
            let err = (grid - &target).amax() / scale;
            suite.margin("gaussian_equality_grid", err, 1e-5 - err, None);
            suite.relative("gaussian_mvqp", q, gaussian_mvqp(g, m)?, 1e-5);
            Ok(())
        });
    }

    match &b.family {
        Family::Ho { n, nu } => {
            let k = (2 * n + 1) as f64;
            suite.relative("ho_mvqp_closed_form", q, k * hbar * nu / 4.0, 1e-6);
            suite.guard("ho_linear_bound", |suite| {
                let l = lq_value(s, m, &linear_test_function(s.grid(), &[1.0]))?;
                suite.relative("ho_linear_bound_closed_form", l, hbar * nu / (4.0 * k), 1e-6);
                Ok(())
            });
        }
        Family::PoschlTeller { lambda, mu } if lambda == mu => {
            suite.relative("pt_mvqp_closed_form", q, pt_mvqp(*mu, b.mass, hbar), 1e-5);
        }
        Family::PoschlTeller { .. } => suite.skip("pt_mvqp_closed_form", "closed form needs lambda = mu"),
        Family::Squeezed { a, nu, t, inverted } => {
            if let Some(g) = g {
                suite.guard("per_dof_mvqp", |suite| {
                    let an = gaussian_vnc(g)?;
                    let grid = vnc(s);
                    for i in 0..a.len() {
                        let w = nu[i] * t;
                        let (c, sn) = if *inverted { (w.cosh(), w.sinh()) } else { (w.cos(), w.sin()) };
                        let v = hbar / (2.0 * b.mass * nu[i]) * (a[i] * a[i] * c * c + sn * sn / (a[i] * a[i]));
                        let closed = hbar * hbar / (8.0 * b.mass * v);
                        let mi = m.get(i, i);
                        suite.relative(&format!("mvqp_dof{}_analytic", i + 1), 0.5 * mi * an.get(i, i), closed, 1e-8);
                        suite.relative(&format!("mvqp_dof{}_grid", i + 1), 0.5 * mi * grid.get(i, i), closed, 1e-5);
                    }
                    Ok(())
                });
            }
        }
        _ => {}
    }
}

fn mixed_checks(suite: &mut Suite, b: &Built, ms: &MixedState) {
    let m = &b.kinetic;
    suite.guard("theorem3_chain", |suite| {
        let t3 = theorem3_check(ms, m)?;
        suite.flag(
            "theorem3_chain",
            t3.mixed_mvqp,
            t3.pass,
            format!("mixed {:e} >= convex {:e} >= bound {:e}", t3.mixed_mvqp, t3.convex_mvqp, t3.bound),
        );
        let mc = mixed_min_correlation(ms, m)?;
        suite.flag(
            "mixed_min_correlation",
            mc.trace,
            mc.pass,
            format!("trace {:e} >= weighted {:e} >= lambda of sum {:e}", mc.trace, mc.weighted_lambda, mc.lambda_of_sum),
        );
        let ev = sym_eig(&delta_vnc(ms))?.min();
        let scale = vnc_convex_decomposition(ms, m)?.total.max_abs().max(f64::MIN_POSITIVE);
        suite.margin("delta_vnc_psd", ev, ev / scale + 1e-12, None);
        Ok(())
    });
    if ms.dim() == 1 {
        suite.guard("density_grid", |suite| {
            let d = assemble_density(ms)?;
            let id = diagonal_derivative_identity(&d)?.residual();
            suite.margin("diagonal_derivative_identity", id, 1e-5 - id, None);
            let total = vnc_convex_decomposition(ms, m)?.total.get(0, 0);
            suite.relative("convex_vs_density_vnc", total, density_vnc(&d)?, 1e-4);
            if let Family::Thermal { beta_hnu, dq0, .. } = b.family {
                let q = 0.5 * m.get(0, 0) * density_vnc(&d)?;
                suite.relative("thermal_mvqp_closed_form", q, thermal_mvqp(beta_hnu, m.get(0, 0), dq0, b.hbar), 1e-3);
            }
            Ok(())
        });
    } else {
        suite.skip("density_grid", "density grids are one-dimensional");
    }
    if let Family::Thermal { .. } = b.family {
        let vc = mixed_vc(ms).max_abs();
        suite.margin("thermal_vc_zero", vc, -vc, None);
        let dv = delta_vnc(ms).max_abs();
        suite.margin("thermal_delta_vnc_zero", dv, 1e-8 - dv, None);
    }
}
