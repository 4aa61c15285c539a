use epp_core::conductivity::{magneto_hydrodynamic_nondim, rotate, ConductivityTensor, Units};
use epp_core::dispersion::{longwave_q, residual, solve, solve_auto, trace_curve, Classification};
use epp_core::field::{edge_limits, phi_profile};
use epp_core::kernel::Problem;
use epp_core::spectrum::winding_index;
use epp_core::wiener_hopf::build_log_kernel;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn case_b() -> ConductivityTensor {
    ConductivityTensor::diagonal(c(0.001, 0.1), c(0.002, 0.2), Units::Nondimensional)
}

#[test]
fn longwave_agreement_improves_with_field() {
    let mut gaps = Vec::new();
    for ratio in [10.0, 30.0, 100.0] {
        let s = magneto_hydrodynamic_nondim(0.5, 1.0 / ratio);
        let q_lw = longwave_q(&s, 1.0).unwrap();
        let p = Problem::single(s, q_lw).unwrap();
        let sol = solve(&p, 1.0, q_lw).unwrap();
        assert_eq!(sol.classification, Classification::DiscreteEPP, "{:?}", sol.notes);
        gaps.push((sol.q - q_lw).norm() / sol.q.norm());
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn discrete_solutions_reverify_index_and_continuity() {
    for phi in [0.0, 0.166, 0.4] {
        let s = rotate(&case_b(), phi * PI);
        let p = Problem::single(s, c(1.0, 0.0)).unwrap();
        let sol = solve_auto(&p, 1.0, 1.0).unwrap();
        assert_eq!(sol.classification, Classification::DiscreteEPP);
        let at = p.with_q(sol.q).unwrap();
        assert_eq!(winding_index(&at).unwrap(), 0);
        let k = build_log_kernel(&at).unwrap();
        let e = edge_limits(&k).unwrap();
        assert!(e.jump() < 1e-3);
        // both forms of the dispersion relation vanish at the same root
        let r = residual(&at, sol.q).unwrap();
        assert!((r.a_exp - e.divergence_coefficient).norm() < 1e-14);
        assert!(r.a_exp.norm() < 1e-8 && r.value.norm() < 1e-8);
    }
}

#[test]
fn symmetric_tensor_roots_are_mirrored() {
    let s = rotate(&case_b(), 0.4 * PI);
    let p = Problem::single(s, c(1.0, 0.0)).unwrap();
    let a = solve_auto(&p, 1.0, 1.0).unwrap();
    let b = solve_auto(&p, 1.0, -1.0).unwrap();
    assert_eq!(b.classification, Classification::DiscreteEPP);
    assert!((a.q + b.q).norm() < 1e-8 * a.q.norm(), "{} {}", a.q, b.q);
}

#[test]
fn drude_family_trace_is_continuous() {
    // sigma_bar(w) = diag(i D_x/(w + i g), i D_y/(w + i g)); the root moves smoothly with w
    let fam = |w: f64| {
        let s = ConductivityTensor::diagonal(
            c(0.0, 0.1) / c(w, 0.01),
            c(0.0, 0.2) / c(w, 0.01),
            Units::Nondimensional,
        );
        Problem::single(s, c(1.0, 0.0))
    };
    let omegas: Vec<f64> = (0..6).map(|j| 1.0 + 0.05 * j as f64).collect();
    let p0 = fam(1.0).unwrap();
    let seed = solve_auto(&p0, 1.0, 1.0).unwrap().q;
    let pts = trace_curve(fam, &omegas, seed).unwrap();
    for w in pts.windows(2) {
        assert_eq!(w[1].solution.classification, Classification::DiscreteEPP);
        let step = (w[1].solution.q - w[0].solution.q).norm() / w[0].solution.q.norm();
        assert!(step < 0.2, "{step}");
        assert!(w[1].solution.q.re > w[0].solution.q.re);
    }
}

#[test]
fn profile_decays_away_from_the_edge() {
    let s = rotate(&case_b(), 0.166 * PI);
    let p = Problem::single(s, c(1.0, 0.0)).unwrap();
    let q = solve_auto(&p, 1.0, 1.0).unwrap().q;
    let k = build_log_kernel(&p.with_q(q).unwrap()).unwrap();
    let xs = [0.05, 0.2, 0.5, 1.0, -0.05, -0.2, -0.5, -1.0];
    let prof = phi_profile(&k, &xs).unwrap();
    let m: Vec<f64> = prof.phi_values.iter().map(|z| z.norm()).collect();
    assert!(m[3] < m[0] && m[7] < m[4], "{m:?}");
    assert!(m[3] < 1e-2 && m[7] < 1e-2, "{m:?}");
}
