//! Built-in consistency suite run by `epp validate`; needs no configuration.

use crate::output::Row;
use epp_core::conductivity::{rotate, ConductivityTensor, Units};
use epp_core::dispersion::{solve, solve_auto, vm_isotropic_residual, Classification};
use epp_core::field::edge_limits;
use epp_core::kernel::Problem;
use epp_core::spectrum::{conjecture_check, winding_index};
use epp_core::wiener_hopf::build_log_kernel;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type Check = (&'static str, fn() -> Result<(bool, String), String>);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn isotropic() -> ConductivityTensor {
    ConductivityTensor::diagonal(c(0.0, 0.2), c(0.0, 0.2), Units::Nondimensional)
}

fn anisotropic() -> ConductivityTensor {
    ConductivityTensor::diagonal(c(0.001, 0.1), c(0.002, 0.2), Units::Nondimensional)
}

fn root(p: &Problem) -> Result<Complex64, String> {
    let s = solve_auto(p, 1.0, 1.0).map_err(|e| e.to_string())?;
    if s.classification != Classification::DiscreteEPP {
        return Err(format!("no discrete root ({})", s.classification.as_str()));
    }
    Ok(s.q)
}

fn single(s: ConductivityTensor) -> Problem {
    Problem::single(s, c(1.0, 0.0)).expect("nondimensional tensor")
}

fn close(q: Complex64, want: Complex64, rel: f64) -> bool {
    // a zero reference part is checked separately by the caller
    let im_ok = want.im == 0.0 || (q.im - want.im).abs() <= rel * want.im.abs();
    (q.re - want.re).abs() <= rel * want.re.abs() && im_ok
}

fn reference_isotropic() -> Result<(bool, String), String> {
    let q = root(&single(isotropic()))?;
    Ok((
        close(q, c(12.172, 0.0), 5e-3) && q.im.abs() < 1e-8,
        format!("q = {q:.6}"),
    ))
}

fn reference_anisotropic() -> Result<(bool, String), String> {
    let q = root(&single(anisotropic()))?;
    Ok((close(q, c(13.928, 0.140), 1e-2), format!("q = {q:.6}")))
}

fn reference_rotated() -> Result<(bool, String), String> {
    let q = root(&single(rotate(&anisotropic(), 0.166 * PI)))?;
    Ok((close(q, c(16.438, 0.164), 1e-2), format!("q = {q:.6}")))
}

fn index_flips_with_direction() -> Result<(bool, String), String> {
    let s = rotate(&anisotropic(), 0.4 * PI);
    let q = root(&single(s.clone()))?;
    let nu = |q: Complex64| {
        Problem::single(s.clone(), q)
            .and_then(|p| winding_index(&p))
            .map_err(|e| e.to_string())
    };
    let (a, b) = (nu(0.85 * q)?, nu(-0.85 * q)?);
    Ok((
        a == -b && a != 0,
        format!("nu(0.85 q) = {a}, nu(-0.85 q) = {b}"),
    ))
}

fn census_matches_index() -> Result<(bool, String), String> {
    let s = rotate(&anisotropic(), 0.4 * PI);
    let q = root(&single(s.clone()))?;
    let p = Problem::single(s, 0.85 * q).map_err(|e| e.to_string())?;
    let chk = conjecture_check(&p).map_err(|e| e.to_string())?;
    Ok((
        chk.agrees == Some(true),
        format!("nu = {}, census = {}", chk.nu_k, chk.rhs),
    ))
}

fn tanh_form_agrees() -> Result<(bool, String), String> {
    let s = ConductivityTensor::nondim(c(0.001, 0.2), c(0.0, -0.05), c(0.0, 0.05), c(0.001, 0.2));
    let p = Problem::single(s.clone(), c(12.0, 0.1)).map_err(|e| e.to_string())?;
    let sol = solve(&p, 1.0, c(12.0, 0.1)).map_err(|e| e.to_string())?;
    let v = vm_isotropic_residual(&s, 1.0, sol.q).map_err(|e| e.to_string())?;
    Ok((
        sol.classification == Classification::DiscreteEPP && v.norm() < 1e-6,
        format!("q = {:.6}, tanh-form residual {:.1e}", sol.q, v.norm()),
    ))
}

fn two_sheet_reduces() -> Result<(bool, String), String> {
    let q1 = root(&single(isotropic()))?;
    let two = Problem::two_sheet(
        ConductivityTensor::zero(Units::Nondimensional),
        isotropic(),
        c(1.0, 0.0),
    )
    .map_err(|e| e.to_string())?;
    let q2 = root(&two)?;
    let rel = (q2 - q1).norm() / q1.norm();
    Ok((rel < 1e-6, format!("relative difference {rel:.1e}")))
}

fn interface_scales() -> Result<(bool, String), String> {
    let q1 = root(&single(anisotropic()))?;
    let p = Problem::interface(anisotropic(), 1.0, 3.0, c(1.0, 0.0)).map_err(|e| e.to_string())?;
    let q2 = root(&p)?;
    let rel = (q2 - 2.0 * q1).norm() / (2.0 * q1).norm();
    Ok((rel < 1e-6, format!("q(1,3)/q(1,1) = {:.8}", q2 / q1)))
}

fn edge_is_continuous() -> Result<(bool, String), String> {
    let p = single(anisotropic());
    let q = root(&p)?;
    let k =
        build_log_kernel(&p.with_q(q).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let e = edge_limits(&k).map_err(|e| e.to_string())?;
    Ok((
        e.jump() < 1e-3 && e.divergence_coefficient.norm() < 1e-3,
        format!(
            "jump {:.1e}, divergence coefficient {:.1e}",
            e.jump(),
            e.divergence_coefficient.norm()
        ),
    ))
}

pub const CHECKS: [Check; 9] = [
    ("reference_root_isotropic", reference_isotropic),
    ("reference_root_anisotropic", reference_anisotropic),
    ("reference_root_rotated", reference_rotated),
    ("index_flips_with_direction", index_flips_with_direction),
    ("census_matches_index", census_matches_index),
    ("tanh_form_agrees", tanh_form_agrees),
    ("two_sheet_reduces", two_sheet_reduces),
    ("interface_scales", interface_scales),
    ("edge_is_continuous", edge_is_continuous),
];

pub fn run() -> (Vec<Row>, bool) {
    let results: Vec<_> = CHECKS.par_iter().map(|(_, f)| f()).collect();
    let mut ok = true;
    let rows = CHECKS
        .iter()
        .zip(results)
        .map(|((name, _), r)| {
            let (pass, detail) = r.unwrap_or_else(|e| (false, e));
            ok &= pass;
            let mut row = Row::new();
            row.push("check", *name)
                .push("status", if pass { "pass" } else { "fail" })
                .push("detail", detail);
            row
        })
        .collect();
    (rows, ok)
}
