//! Acceptance suite: one PASS/FAIL line per criterion. Run with `cargo test -p epp-core --test acceptance`.

use epp_core::conductivity::{magneto_hydrodynamic_nondim, rotate, ConductivityTensor, Units};
use epp_core::dispersion::{
    f_pm_direct, f_pm_mellin, longwave_q, residual, solve, solve_auto, vm_isotropic_residual, Classification,
    LongwaveParams,
};
use epp_core::field::edge_limits;
use epp_core::kernel::Problem;
use epp_core::spectrum::{conjecture_check, spectrum_report, winding_index};
use epp_core::wiener_hopf::{build_log_kernel, split_q, Half};
use epp_core::EppError;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::Instant;

// pinned tolerances
const C1_REL: f64 = 5e-3;
const C1_SECONDS: f64 = 30.0;
const C2_REL: f64 = 1e-2;
const C6_MIN_POINTS: usize = 200;
const C6_SECONDS: f64 = 600.0;
const C6_WORKERS: usize = 8;
const C7_MAX_REL: f64 = 1e-2;
const C7_MIN_GAIN: f64 = 10.0;
const C7_POINTS: usize = 1000;
const C8_REL: f64 = 1e-6;
const C9_MAX_F: f64 = 0.05;
const C9_MELLIN_REL: f64 = 2e-2;
const C10_JUMP: f64 = 1e-3;
const C10_ROOT_A: f64 = 1e-3;
const C10_OFF_A: f64 = 1e-2;
const C11_REL: f64 = 1e-6;
const C12_REL: f64 = 5e-2;

const REF_A: Complex64 = Complex64 { re: 12.172, im: 0.0 };
const REF_B: Complex64 = Complex64 { re: 13.928, im: 0.140 };
const REF_C: Complex64 = Complex64 { re: 21.657, im: 0.217 };
const REF_D: Complex64 = Complex64 { re: 16.438, im: 0.164 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn case_a() -> ConductivityTensor {
    ConductivityTensor::diagonal(c(0.0, 0.2), c(0.0, 0.2), Units::Nondimensional)
}

fn case_b() -> ConductivityTensor {
    ConductivityTensor::diagonal(c(0.001, 0.1), c(0.002, 0.2), Units::Nondimensional)
}

fn case_c() -> ConductivityTensor {
    rotate(&case_b(), 0.4 * PI)
}

fn case_d() -> ConductivityTensor {
    rotate(&case_b(), 0.166 * PI)
}

fn single(s: ConductivityTensor) -> Problem {
    Problem::single(s, c(1.0, 0.0)).unwrap()
}

fn root_of(s: ConductivityTensor) -> Result<Complex64, String> {
    let sol = solve_auto(&single(s), 1.0, 1.0).map_err(|e| e.to_string())?;
    if sol.classification != Classification::DiscreteEPP {
        return Err(format!("no discrete root: {:?}", sol.notes));
    }
    Ok(sol.q)
}

fn parts_within(q: Complex64, want: Complex64, rel: f64) -> bool {
    (q.re - want.re).abs() <= rel * want.re.abs() && (q.im - want.im).abs() <= rel * want.im.abs()
}

fn counts_at(s: &ConductivityTensor, q: Complex64) -> Result<((usize, usize, usize, usize), i32), EppError> {
    let p = Problem::single(s.clone(), q)?;
    let r = spectrum_report(&p)?;
    Ok((r.census.counts(), r.nu_k?))
}

type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let sol = match solve_auto(&single(case_a()), 1.0, 1.0) {
        Ok(s) => s,
        Err(e) => return (false, e.to_string()),
    };
    let secs = t.elapsed().as_secs_f64();
    let rel = (sol.q - REF_A).norm() / REF_A.norm();
    let ok = sol.classification == Classification::DiscreteEPP
        && rel < C1_REL
        && sol.nu_k_at_solution == Some(0)
        && secs < C1_SECONDS;
    (ok, format!("q = {:.6}, rel err {:.2e} (< {C1_REL}), nu_K = {:?}, {:.2} s", sol.q, rel, sol.nu_k_at_solution, secs))
}

fn root_and_census(s: ConductivityTensor, want: Complex64, census: (usize, usize, usize, usize)) -> Outcome {
    let q = match root_of(s.clone()) {
        Ok(q) => q,
        Err(e) => return (false, e),
    };
    match counts_at(&s, q) {
        Ok((cn, nu)) => {
            let ok = parts_within(q, want, C2_REL) && cn == census && nu == 0;
            (ok, format!("q = {:.5}, census {:?}, nu_K = {nu}", q, cn))
        }
        Err(e) => (false, format!("q = {q}: {e}")),
    }
}

fn criterion_2() -> Outcome {
    root_and_census(case_b(), REF_B, (2, 2, 0, 0))
}

fn criterion_3() -> Outcome {
    root_and_census(case_c(), REF_C, (1, 1, 1, 1))
}

fn criterion_4() -> Outcome {
    let q = match root_of(case_d()) {
        Ok(q) => q,
        Err(e) => return (false, e),
    };
    let at_root = counts_at(&case_d(), q);
    let below = counts_at(&case_d(), 0.75 * q);
    match (at_root, below) {
        (Ok((_, nu0)), Ok((cn, nu1))) => {
            let ok = parts_within(q, REF_D, C2_REL) && nu0 == 0 && nu1 == -1 && cn == (0, 3, 1, 0);
            (ok, format!("q = {:.5}, nu_K = {nu0}; at 0.75 q: nu_K = {nu1}, census {:?}", q, cn))
        }
        (a, b) => (false, format!("{:?} {:?}", a.err(), b.err())),
    }
}

fn criterion_5() -> Outcome {
    let q = match root_of(case_c()) {
        Ok(q) => q,
        Err(e) => return (false, e),
    };
    match (counts_at(&case_c(), 0.85 * q), counts_at(&case_c(), -0.85 * q)) {
        (Ok((cn, nu)), Ok((_, nu_neg))) => {
            let ok = nu == -1 && cn == (0, 2, 1, 1) && nu_neg == 1;
            (ok, format!("0.85 q: nu_K = {nu}, census {:?}; -0.85 q: nu_K = {nu_neg}", cn))
        }
        (a, b) => (false, format!("{:?} {:?}", a.err(), b.err())),
    }
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let dir = REF_C / REF_C.norm();
    let mut points = Vec::new();
    for k in 0..10 {
        let phi = 0.1 * k as f64 * PI;
        for j in 0..20 {
            let f = 0.3 + 1.7 * j as f64 / 19.0;
            points.push((phi, f * REF_C.norm() * dir));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(C6_WORKERS).build().unwrap();
    let rows: Vec<_> = pool.install(|| {
        points
            .par_iter()
            .map(|&(phi, q)| {
                let s = rotate(&case_b(), phi);
                let a = conjecture_check(&Problem::single(s.clone(), q).unwrap());
                let b = conjecture_check(&Problem::single(s, -q).unwrap());
                (a, b)
            })
            .collect()
    });
    let secs = t.elapsed().as_secs_f64();
    let (mut compared, mut marginal, mut undefined, mut conj_fail, mut odd_fail) = (0, 0, 0, 0, 0);
    for (a, b) in &rows {
        match (a, b) {
            (Ok(a), Ok(b)) => {
                for x in [a, b] {
                    match x.agrees {
                        Some(true) => compared += 1,
                        Some(false) => {
                            compared += 1;
                            conj_fail += 1
                        }
                        None => marginal += 1,
                    }
                }
                if a.nu_k != -b.nu_k {
                    odd_fail += 1;
                }
            }
            _ => undefined += 1,
        }
    }
    let ok = points.len() >= C6_MIN_POINTS && conj_fail == 0 && odd_fail == 0 && secs < C6_SECONDS;
    (
        ok,
        format!(
            "{} (tensor, q) points, {compared} non-marginal index evaluations, {conj_fail} conjecture mismatches, \
             {odd_fail} parity failures, {marginal} marginal, {undefined} points with a real-axis symbol zero; {:.1} s",
            points.len(),
            secs
        ),
    )
}

fn factorization_error(p: &Problem, delta: f64) -> Result<f64, EppError> {
    let k = build_log_kernel(p)?;
    let sym = p.symbol();
    let r = p.q.norm() * 3.0;
    let mut worst: f64 = 0.0;
    for j in 0..C7_POINTS {
        let x = -r + 2.0 * r * (j as f64 + 0.5) / C7_POINTS as f64;
        let qp = split_q(&k, c(x, delta), Half::Plus)?.value;
        let qm = split_q(&k, c(x, -delta), Half::Minus)?.value;
        let pv = sym.eval_real(x);
        worst = worst.max(((qp + qm).exp() - pv).norm() / pv.norm());
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, s, q) in [("A", case_a(), REF_A), ("C", case_c(), REF_C)] {
        let p = Problem::single(s, q).unwrap();
        match (factorization_error(&p, 1e-4), factorization_error(&p, 1e-5)) {
            (Ok(e4), Ok(e5)) => {
                let gain = e4 / e5;
                ok &= e4 < C7_MAX_REL && gain >= C7_MIN_GAIN;
                msg.push(format!("{name}: {e4:.2e} -> {e5:.2e} (x{gain:.6})"));
            }
            (a, b) => {
                ok = false;
                msg.push(format!("{name}: {:?} {:?}", a.err(), b.err()));
            }
        }
    }
    (ok, msg.join("; "))
}

fn secant<F: Fn(Complex64) -> Complex64>(f: F, q0: Complex64) -> Option<Complex64> {
    let (mut a, mut b) = (q0, q0 * c(1.001, 1e-4));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..100 {
        if fb.norm() < 1e-13 {
            return Some(b);
        }
        let mut step = -fb * (b - a) / (fb - fa);
        if step.norm() > 0.2 * b.norm() {
            step *= 0.2 * b.norm() / step.norm();
        }
        a = b;
        fa = fb;
        b += step;
        fb = f(b);
    }
    None
}

fn criterion_8() -> Outcome {
    let tensors = [
        (ConductivityTensor::nondim(c(0.001, 0.2), c(0.0, -0.05), c(0.0, 0.05), c(0.001, 0.2)), c(12.0, 0.1)),
        (ConductivityTensor::nondim(c(0.002, 0.15), c(0.03, 0.0), c(-0.03, 0.0), c(0.002, 0.15)), c(14.0, 0.1)),
        (ConductivityTensor::nondim(c(0.0005, 0.3), c(0.02, 0.01), c(-0.02, -0.01), c(0.0005, 0.3)), c(7.0, 0.05)),
    ];
    let mut ok = true;
    let mut msg = Vec::new();
    for (s, g) in tensors {
        let p = Problem::single(s.clone(), g).unwrap();
        let general = solve(&p, 1.0, g).ok().filter(|x| x.classification == Classification::DiscreteEPP);
        let tanh = secant(|q| vm_isotropic_residual(&s, 1.0, q).unwrap_or(c(f64::NAN, f64::NAN)), g);
        match (general, tanh) {
            (Some(a), Some(b)) => {
                let rel = (a.q - b).norm() / b.norm();
                ok &= rel < C8_REL;
                msg.push(format!("{:.6}: {rel:.1e}", b));
            }
            (a, b) => {
                ok = false;
                msg.push(format!("no root ({} / {})", a.is_some(), b.is_some()));
            }
        }
    }
    (ok, msg.join("; "))
}

fn criterion_9() -> Outcome {
    let s = magneto_hydrodynamic_nondim(0.5, 0.01);
    let q = match longwave_q(&s, 1.0) {
        Ok(q) => q,
        Err(e) => return (false, e.to_string()),
    };
    let f = match residual(&Problem::single(s.clone(), q).unwrap(), q) {
        Ok(r) => r.f_raw.norm(),
        Err(e) => return (false, e.to_string()),
    };
    let mut errs = Vec::new();
    for qb in [1e-2, 1e-3, 1e-4] {
        let qq = c(qb, 0.0) / (0.5 * c(0.0, 1.0) * s.xx);
        let lw = LongwaveParams::new(&s, 1.0, qq).unwrap();
        let (dp, dm) = f_pm_direct(&lw).unwrap();
        let (mp, mm) = f_pm_mellin(&lw);
        errs.push(((dp - mp).norm() / dp.norm()).max((dm - mm).norm() / dm.norm()));
    }
    let bound: Vec<f64> = [1e-2f64, 1e-3, 1e-4].iter().map(|x| errs[0] * (x * x.ln()).abs() / (1e-2f64 * 1e-2f64.ln()).abs()).collect();
    let shrinking = errs[1] < errs[0] && errs[2] < errs[1] && errs[1] <= bound[1] && errs[2] <= bound[2];
    let ok = f < C9_MAX_F && errs[1] <= C9_MELLIN_REL && shrinking;
    (ok, format!("q = {q:.6}, |F| = {f:.2e}; Mellin rel err {:.1e} / {:.1e} / {:.1e}", errs[0], errs[1], errs[2]))
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for (name, s) in [("A", case_a()), ("B", case_b()), ("C", case_c()), ("D", case_d())] {
        let q = match root_of(s.clone()) {
            Ok(q) => q,
            Err(e) => return (false, format!("{name}: {e}")),
        };
        let p = Problem::single(s.clone(), q).unwrap();
        let e = match build_log_kernel(&p).and_then(|k| edge_limits(&k)) {
            Ok(e) => e,
            Err(err) => return (false, format!("{name}: {err}")),
        };
        ok &= e.jump() < C10_JUMP && e.divergence_coefficient.norm() < C10_ROOT_A;
        let off = p.with_q(0.8 * q).unwrap();
        let off_txt = match build_log_kernel(&off).and_then(|k| edge_limits(&k)) {
            Ok(o) => {
                let a = o.divergence_coefficient.norm();
                ok &= a > C10_OFF_A;
                format!("|A(0.8q)| = {a:.2e}")
            }
            // A exists only for nu_K = 0; elsewhere the index alone excludes a solution
            Err(EppError::NonzeroIndex(nu)) => format!("0.8q excluded by nu_K = {nu}"),
            Err(EppError::SymbolVanishes { .. }) => {
                let nu = winding_index(&off).err().map(|e| e.to_string()).unwrap_or_default();
                format!("0.8q excluded: symbol zero on the real axis ({nu})")
            }
            Err(err) => {
                ok = false;
                format!("0.8q: {err}")
            }
        };
        msg.push(format!("{name}: jump {:.1e}, |A| {:.1e}, {off_txt}", e.jump(), e.divergence_coefficient.norm()));
    }
    (ok, msg.join("; "))
}

fn criterion_11() -> Outcome {
    let q1 = match root_of(case_a()) {
        Ok(q) => q,
        Err(e) => return (false, e),
    };
    let two = Problem::two_sheet(ConductivityTensor::zero(Units::Nondimensional), case_a(), c(1.0, 0.0)).unwrap();
    match solve_auto(&two, 1.0, 1.0) {
        Ok(sol) if sol.classification == Classification::DiscreteEPP => {
            let rel = (sol.q - q1).norm() / q1.norm();
            (rel < C11_REL, format!("two-sheet q = {:.10}, single q = {:.10}, rel {rel:.1e}", sol.q, q1))
        }
        Ok(sol) => (false, format!("{:?}", sol.notes)),
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_12() -> Outcome {
    let q1 = match root_of(case_a()) {
        Ok(q) => q,
        Err(e) => return (false, e),
    };
    let solve_iface = |e1: f64, e2: f64| -> Result<Complex64, String> {
        let p = Problem::interface(case_a(), e1, e2, c(1.0, 0.0)).map_err(|e| e.to_string())?;
        let sol = solve_auto(&p, 1.0, 1.0).map_err(|e| e.to_string())?;
        if sol.classification != Classification::DiscreteEPP {
            return Err(format!("{:?}", sol.notes));
        }
        Ok(sol.q)
    };
    let (same, shifted) = match (solve_iface(1.0, 1.0), solve_iface(1.0, 3.0)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return (false, format!("{:?} {:?}", a.err(), b.err())),
    };
    // q_breve depends on q through q/(eps1 + eps2), so the root scales by (eps1 + eps2)/2
    let expected = q1 * 2.0;
    let rel = (shifted - expected).norm() / expected.norm();
    let ok = same == q1 && rel < C12_REL;
    (ok, format!("eps 1+1: q = {same:.10} (identical: {}); eps 1+3: q = {shifted:.6}, expected {expected:.6}, rel {rel:.1e}", same == q1))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("isotropic root diag(0.2i, 0.2i)", criterion_1),
        ("anisotropic lossy root and census", criterion_2),
        ("rotated 0.4 pi root and census", criterion_3),
        ("rotated 0.166 pi root and index below it", criterion_4),
        ("index at 0.85 root and its reflection", criterion_5),
        ("index conjecture sweep", criterion_6),
        ("factorization identity", criterion_7),
        ("isotropic tanh cross-check", criterion_8),
        ("long-wavelength asymptotics", criterion_9),
        ("edge continuity", criterion_10),
        ("two-sheet reduction", criterion_11),
        ("interface variant", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}) [{:.1} s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
