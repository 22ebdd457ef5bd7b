use anyhow::Context;
use qpot_core::bounds::{linear_bound, theorem2_bound};
use qpot_core::covariance::{covariance_report, min_quantum_correlation, rsur_check, theorem4_check};
use qpot_core::mixed::{
    assemble_density, density_vnc, mixed_min_correlation, mixed_vc, theorem3_check, thermal_mvqp,
    vnc_convex_decomposition,
};
use qpot_core::qpotential::{qp_report, vnc};
use serde_json::{json, Value};

use crate::build::{Body, Built, Family};

pub fn report(b: &Built) -> anyhow::Result<Value> {
    let m = &b.kinetic;
    let mut doc = json!({
        "state": b.label,
        "hbar": b.hbar,
        "mass": b.mass,
        "dim": b.dim(),
        "kinetic": m,
    });
    match &b.body {
        Body::Pure { state: s, .. } => {
            let qp = qp_report(s, m).context("quantum potential")?;
            let cov = covariance_report(s, m).context("covariance split")?;
            doc["mvqp"] = json!(qp.mvqp);
            doc["quantum_potential"] = json!(qp);
            doc["covariance"] = json!(cov);
            doc["rsur"] = json!(rsur_check(&cov, b.hbar)?);
            doc["min_quantum_correlation"] = json!(min_quantum_correlation(&cov, m)?);
            doc["linear_bound"] = json!(linear_bound(s, m)?);
            doc["theorem2_bound"] = json!(theorem2_bound(s, m)?);
            if s.dim() == 1 {
                let t4 = theorem4_check(&cov, qp.mvqp, 1.0 / m.get(0, 0), b.hbar)?;
                doc["mvqp_width_saturated"] = json!(t4.mvqp_saturated);
                doc["theorem4"] = json!(t4);
            }
            if let Family::Squeezed { a, nu, t, inverted } = &b.family {
                let grid = vnc(s);
                let per: Vec<Value> = (0..a.len())
                    .map(|i| {
                        let w = nu[i] * t;
                        let (c, sn) = if *inverted { (w.cosh(), w.sinh()) } else { (w.cos(), w.sin()) };
                        let v0 = b.hbar * a[i] * a[i] / (2.0 * b.mass * nu[i]);
                        let factor = c * c + sn * sn / a[i].powi(4);
                        let closed = b.hbar * b.hbar / (8.0 * b.mass * v0 * factor);
                        json!({ "dof": i + 1, "mvqp": 0.5 * m.get(i, i) * grid.get(i, i), "closed_form": closed })
                    })
                    .collect();
                doc["per_dof_mvqp"] = json!(per);
            }
        }
        Body::Mixed(ms) => {
            let dec = vnc_convex_decomposition(ms, m)?;
            doc["weights"] = json!(ms.weights());
            doc["mvqp"] = json!(0.5 * (dec.total.as_matrix() * m.as_matrix()).trace());
            doc["vnc_decomposition"] = json!(dec);
            doc["vc"] = json!(mixed_vc(ms));
            doc["position_cov"] = json!(ms.position_cov());
            doc["theorem3"] = json!(theorem3_check(ms, m)?);
            doc["min_quantum_correlation"] = json!(mixed_min_correlation(ms, m)?);
            if ms.dim() == 1 {
                let d = assemble_density(ms)?;
                let v = density_vnc(&d)?;
                doc["density_vnc"] = json!(v);
                doc["density_mvqp"] = json!(0.5 * m.get(0, 0) * v);
            }
            if let Family::Thermal { beta_hnu, k, nu, dq0 } = b.family {
                doc["thermal"] = json!({
                    "beta_hnu": beta_hnu,
                    "K": k,
                    "nu": nu,
                    "dq0": dq0,
                    "mvqp_closed_form": thermal_mvqp(beta_hnu, m.get(0, 0), dq0, b.hbar),
                });
            }
        }
    }
    Ok(doc)
}
