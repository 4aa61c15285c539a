//! Edge plasmon dispersion relation, root finding, classification and long-wavelength asymptotics.

use crate::branches::{principal_log, sign_q, wrap_imag};
use crate::conductivity::{validity_nondim, ConductivityTensor, ValidityReport};
use crate::error::{EppError, Result};
use crate::kernel::Problem;
use crate::quadrature::{geometric_breaks, integrate_half_line, Tolerance};
use crate::spectrum::{bulk_zeros, bulk_zeros_two_sheet, winding_index, Census};
use crate::wiener_hopf::{build_log_kernel, split_constants, SplitConstants};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    DiscreteEPP,
    ContinuumRegion,
    NoSolution,
    /// The symbol vanishes on the real axis: the point sits on an index transition.
    RegionBoundary,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::DiscreteEPP => "discrete_epp",
            Classification::ContinuumRegion => "continuum",
            Classification::NoSolution => "no_solution",
            Classification::RegionBoundary => "region_boundary",
        }
    }

    /// Classification implied by an index value alone.
    pub fn from_index(nu: i32) -> Self {
        match nu {
            n if n < 0 => Classification::NoSolution,
            n if n > 0 => Classification::ContinuumRegion,
            _ => Classification::NoSolution,
        }
    }
}

/// ln(-C+/C-) on the principal branch; an argument within 1e-12 of unity maps to 0.
pub fn log_coefficient_ratio(c_plus: Complex64, c_minus: Complex64) -> Result<Complex64> {
    let r = -c_plus / c_minus;
    if (r - 1.0).norm() < 1e-12 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    principal_log(r)
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub q: Complex64,
    /// Q+(xi+) + Q-(xi-) - ln(-C+/C-) as evaluated.
    pub f_raw: Complex64,
    /// Exponential form C+ exp(-Q+(xi+)) + C- exp(Q-(xi-)).
    pub a_exp: Complex64,
    /// Quantity driven to zero: the log form with Im reduced into (-pi, pi], or the exponential form for two sheets.
    pub value: Complex64,
    pub nu_k: i32,
    pub constants: SplitConstants,
}

pub fn residual(problem: &Problem, q: Complex64) -> Result<ResidualReport> {
    let p = problem.with_q(q)?;
    let kernel = build_log_kernel(&p)?;
    let k = split_constants(&kernel)?;
    let ln_ratio = log_coefficient_ratio(k.coeffs.c_plus, k.coeffs.c_minus)?;
    let f_raw = k.q_plus_at_root + k.q_minus_at_root - ln_ratio;
    let a_exp = k.coeffs.c_plus * k.e_plus + k.coeffs.c_minus * k.e_minus;
    let value = if p.is_two_sheet() { a_exp } else { wrap_imag(f_raw) };
    Ok(ResidualReport {
        q,
        f_raw,
        a_exp,
        value,
        nu_k: kernel.nu_k,
        constants: k,
    })
}

/// Independent evaluator for sxx = syy, sxy = -syx:
/// (i syx/sxx) sg(q) tanh[(1/pi) int_0^inf ln(1 + k q sg(q) sqrt(1+t^2))/(1+t^2) dt] + 1.
pub fn vm_isotropic_residual(sigma: &ConductivityTensor, kernel_factor: f64, q: Complex64) -> Result<Complex64> {
    let scale = sigma.sigma_sharp();
    if (sigma.xx - sigma.yy).norm() > 1e-12 * scale || (sigma.xy + sigma.yx).norm() > 1e-12 * scale {
        return Err(EppError::InvalidArgument(
            "tanh form needs sxx = syy and sxy = -syx".into(),
        ));
    }
    let sg = sign_q(q)?;
    let kappa = 0.5 * I * kernel_factor * sigma.xx;
    let qb = kappa * q * sg;
    let f = |t: f64| (1.0 + qb * (1.0 + t * t).sqrt()).ln() / (1.0 + t * t);
    let hi = 100.0 / qb.norm().min(1.0);
    let breaks = geometric_breaks(1e-2, hi, 2.0);
    let integral = integrate_half_line(f, &breaks, Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 4000 }).value;
    Ok(I * sigma.yx / sigma.xx * sg * (integral / PI).tanh() + 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest relative step of a single secant update.
    pub max_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 60,
            max_step: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DispersionSolution {
    pub omega: f64,
    pub q: Complex64,
    pub residual: Complex64,
    pub iterations: usize,
    pub nu_k_at_solution: Option<i32>,
    pub classification: Classification,
    /// (N+, N-, N*+, N*-) at the final q; for two sheets the right-side census.
    pub census: Option<Census>,
    pub validity: ValidityReport,
    pub notes: Vec<String>,
    pub wall_ms: f64,
}

impl DispersionSolution {
    pub fn abs_residual(&self) -> f64 {
        self.residual.norm()
    }
}

fn census_for(problem: &Problem) -> Option<Census> {
    if problem.is_two_sheet() {
        bulk_zeros_two_sheet(problem).ok().map(|(_, r)| r)
    } else {
        bulk_zeros(problem).ok()
    }
}

fn eval_for_solver(problem: &Problem, q: Complex64) -> Result<Complex64> {
    Ok(residual(problem, q)?.value)
}

/// Complex secant iteration on the residual starting from `q_guess`.
pub fn solve(problem: &Problem, omega: f64, q_guess: Complex64) -> Result<DispersionSolution> {
    solve_with(problem, omega, q_guess, SolveOptions::default())
}

pub fn solve_with(problem: &Problem, omega: f64, q_guess: Complex64, opts: SolveOptions) -> Result<DispersionSolution> {
    let start = Instant::now();
    let sg = sign_q(q_guess)?;
    let validity = validity_nondim(&problem.sigma);
    let mut notes = Vec::new();
    let finish = |q: Complex64, res: Complex64, it: usize, nu: Option<i32>, class: Classification, notes: Vec<String>| {
        let at = problem.with_q(q).ok();
        DispersionSolution {
            omega,
            q,
            residual: res,
            iterations: it,
            nu_k_at_solution: nu,
            classification: class,
            census: at.as_ref().and_then(census_for),
            validity: validity.clone(),
            notes,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    };
    let mut q0 = q_guess;
    let mut f0 = match eval_for_solver(problem, q0) {
        Ok(v) => v,
        Err(e) => {
            let (nu, class) = index_class(problem, q0);
            notes.push(format!("guess rejected: {e}"));
            return Ok(finish(q0, Complex64::new(f64::NAN, f64::NAN), 0, nu, class, notes));
        }
    };
    if f0.norm() < opts.tol {
        return Ok(finish(q0, f0, 0, Some(0), Classification::DiscreteEPP, notes));
    }
    let mut q1 = q0 * Complex64::new(1.0 + 1e-3, 1e-4);
    let mut f1 = match eval_for_solver(problem, q1) {
        Ok(v) => v,
        Err(_) => {
            q1 = q0 * Complex64::new(1.0 - 1e-3, -1e-4);
            match eval_for_solver(problem, q1) {
                Ok(v) => v,
                Err(e) => {
                    notes.push(format!("cannot start secant: {e}"));
                    let (nu, class) = index_class(problem, q1);
                    return Ok(finish(q0, f0, 0, nu, class, notes));
                }
            }
        }
    };
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        if f1.norm() < opts.tol {
            return Ok(finish(q1, f1, it, Some(0), Classification::DiscreteEPP, notes));
        }
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            notes.push("secant denominator vanished".into());
            break;
        }
        let mut step = -f1 * (q1 - q0) / denom;
        let cap = opts.max_step * q1.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let mut accepted = None;
        for _ in 0..10 {
            let q2 = q1 + step;
            if q2.re * sg <= 0.0 {
                step *= 0.5;
                continue;
            }
            match eval_for_solver(problem, q2) {
                Ok(f2) => {
                    accepted = Some((q2, f2));
                    break;
                }
                Err(EppError::NonzeroIndex(nu)) => {
                    notes.push(format!("index flip to nu_K = {nu} at q = {q2}; step halved"));
                    step *= 0.5;
                }
                Err(EppError::SymbolVanishes { .. }) => {
                    notes.push(format!("symbol vanishes on the axis at q = {q2}; step halved"));
                    step *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        match accepted {
            Some((q2, f2)) => {
                q0 = q1;
                f0 = f1;
                q1 = q2;
                f1 = f2;
            }
            None => {
                notes.push("iteration path left the zero-index region".into());
                let (nu, class) = index_class(problem, q1 + step);
                let _ = class;
                return Ok(finish(q1, f1, it, nu, Classification::NoSolution, notes));
            }
        }
    }
    if f1.norm() < opts.tol {
        return Ok(finish(q1, f1, it, Some(0), Classification::DiscreteEPP, notes));
    }
    notes.push(format!("no convergence after {it} iterations (|residual| = {:e})", f1.norm()));
    Ok(finish(q1, f1, it, Some(0), Classification::NoSolution, notes))
}

/// Multiples of k_sp tried by [`solve_auto`], in order.
pub const GUESS_LADDER: [f64; 8] = [1.0, 1.2, 0.8, 1.4, 0.7, 1.6, 0.6, 2.0];

/// Solve without a user guess: start from k_sp (1 + 0.01 i) times each ladder factor and keep the first
/// discrete root. `direction` selects Re q > 0 (+1) or Re q < 0 (-1).
pub fn solve_auto(problem: &Problem, omega: f64, direction: f64) -> Result<DispersionSolution> {
    let ksp = problem.k_sp_magnitude();
    if ksp == 0.0 || !ksp.is_finite() {
        return Err(EppError::InvalidProblem("no finite k_sp to scale the initial guess".into()));
    }
    let dir = if direction < 0.0 { -1.0 } else { 1.0 };
    let mut last = None;
    for f in GUESS_LADDER {
        let guess = Complex64::new(dir * f * ksp, dir * 0.01 * f * ksp);
        let mut sol = solve(problem, omega, guess)?;
        if sol.classification == Classification::DiscreteEPP {
            sol.notes.push(format!("initial guess {f} k_sp"));
            return Ok(sol);
        }
        last = Some(sol);
    }
    let mut sol = last.expect("ladder is nonempty");
    sol.notes.push("no discrete root reached from the k_sp ladder".into());
    Ok(sol)
}

fn index_class(problem: &Problem, q: Complex64) -> (Option<i32>, Classification) {
    match problem.with_q(q).and_then(|p| winding_index(&p)) {
        Ok(nu) => (Some(nu), Classification::from_index(nu)),
        Err(EppError::SymbolVanishes { .. }) => (None, Classification::RegionBoundary),
        Err(_) => (None, Classification::NoSolution),
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub classification: Classification,
    pub nu_k: Option<i32>,
    pub abs_residual: Option<f64>,
}

/// Region classification at (q, omega); `tol` bounds the residual of a discrete solution.
pub fn classify(problem: &Problem, q: Complex64, _omega: f64, tol: f64) -> Result<ClassifyReport> {
    let p = problem.with_q(q)?;
    let nu = match winding_index(&p) {
        Ok(nu) => nu,
        Err(EppError::SymbolVanishes { .. }) => {
            return Ok(ClassifyReport {
                classification: Classification::RegionBoundary,
                nu_k: None,
                abs_residual: None,
            })
        }
        Err(e) => return Err(e),
    };
    if nu != 0 {
        return Ok(ClassifyReport {
            classification: Classification::from_index(nu),
            nu_k: Some(nu),
            abs_residual: None,
        });
    }
    let r = residual(problem, q)?.value.norm();
    Ok(ClassifyReport {
        classification: if r < tol {
            Classification::DiscreteEPP
        } else {
            Classification::NoSolution
        },
        nu_k: Some(0),
        abs_residual: Some(r),
    })
}

#[derive(Debug, Clone)]
pub struct TracePoint {
    pub solution: DispersionSolution,
    pub break_note: Option<String>,
}

/// Continuation in omega: each converged root seeds the next solve.
pub fn trace_curve<F>(family: F, omegas: &[f64], seed: Complex64) -> Result<Vec<TracePoint>>
where
    F: Fn(f64) -> Result<Problem>,
{
    if omegas.is_empty() {
        return Err(EppError::InvalidArgument("empty omega list".into()));
    }
    let mut out = Vec::with_capacity(omegas.len());
    let mut guess = seed;
    let mut prev_class = None;
    for &w in omegas {
        let problem = family(w)?;
        let sol = solve(&problem, w, guess)?;
        let mut note = None;
        if sol.classification == Classification::DiscreteEPP {
            guess = sol.q;
        } else {
            let nu = sol.nu_k_at_solution.map(|n| n.to_string()).unwrap_or_else(|| "undefined".into());
            if prev_class != Some(sol.classification) {
                note = Some(format!("continuation break at omega = {w}: {} (nu_K = {nu})", sol.classification.as_str()));
            }
        }
        prev_class = Some(sol.classification);
        out.push(TracePoint {
            solution: sol,
            break_note: note,
        });
    }
    Ok(out)
}

/// Root of -(1/2 pi) kf (sxy - syx)/2 q [ln(2/q_breve) + 1] = 1 by fixed-point iteration.
pub fn longwave_q(sigma: &ConductivityTensor, kernel_factor: f64) -> Result<Complex64> {
    let delta = sigma.xy - sigma.yx;
    if delta.norm() <= 1e-14 * sigma.sigma_sharp() {
        return Err(EppError::InvalidArgument(
            "sxy = syx: no long-wavelength branch; use the general solver".into(),
        ));
    }
    let kappa = 0.5 * I * kernel_factor * sigma.xx;
    let lead = -4.0 * PI / (kernel_factor * delta);
    let mut q = lead;
    for _ in 0..200 {
        let sg = if q.re >= 0.0 { 1.0 } else { -1.0 };
        let qb = kappa * q * sg;
        let next = lead / ((2.0 / qb).ln() + 1.0);
        if (next - q).norm() <= 1e-14 * q.norm() {
            return Ok(next);
        }
        q = next;
    }
    Err(EppError::NoConvergence {
        iterations: 200,
        residual: f64::NAN,
    })
}

/// Long-wavelength parameters: q_breve = k q sg(q), alpha± with xi± = q alpha± (Re q > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongwaveParams {
    pub q_breve: Complex64,
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub re_q_positive: bool,
}

impl LongwaveParams {
    pub fn new(sigma: &ConductivityTensor, kernel_factor: f64, q: Complex64) -> Result<Self> {
        let sg = sign_q(q)?;
        if sigma.xx.norm() == 0.0 {
            return Err(EppError::DegenerateQuadratic);
        }
        let s = sigma.xy + sigma.yx;
        let d = (s * s - 4.0 * sigma.xx * sigma.yy).sqrt();
        let kappa = 0.5 * I * kernel_factor * sigma.xx;
        Ok(LongwaveParams {
            q_breve: kappa * q * sg,
            alpha_plus: -(s + d) / (2.0 * sigma.xx),
            alpha_minus: -(s - d) / (2.0 * sigma.xx),
            re_q_positive: sg > 0.0,
        })
    }

    pub fn a_of_zeta(&self, z: f64) -> Complex64 {
        (z - self.alpha_plus) * (z - self.alpha_minus) / (1.0 + z * z).sqrt()
    }
}

fn direct_one(lw: &LongwaveParams, alpha: Complex64) -> Result<Complex64> {
    let a2 = alpha * alpha;
    if a2.re > 0.0 && a2.im.abs() < 1e-8 * a2.norm() {
        return Err(EppError::SingularRay(format!("alpha = {alpha} lies on the real axis")));
    }
    let qb = lw.q_breve;
    let f = |z: f64| {
        let lp = (1.0 + qb * lw.a_of_zeta(z)).ln();
        let lm = (1.0 + qb * lw.a_of_zeta(-z)).ln();
        (z * (lp - lm) + alpha * (lp + lm)) / (z * z - a2)
    };
    let hi = 100.0 * (1.0 / qb.norm()).max(1.0) * (1.0 + alpha.norm());
    let mut breaks = geometric_breaks(1e-2, hi, 2.0);
    breaks.push(alpha.norm());
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    Ok(integrate_half_line(f, &breaks, Tolerance { abs: 1e-16, rel: 1e-12, max_intervals: 4000 }).value)
}

/// f± by direct quadrature of the folded integrals.
/// The principal log in the integrand matches the unwrapped kernel only while 1 + q_breve A(t) avoids the
/// negative real axis, which holds in the long-wavelength regime Re q_breve > 0.
pub fn f_pm_direct(lw: &LongwaveParams) -> Result<(Complex64, Complex64)> {
    if lw.alpha_plus == lw.alpha_minus {
        return Err(EppError::DoubleRoot);
    }
    Ok((direct_one(lw, lw.alpha_plus)?, direct_one(lw, lw.alpha_minus)?))
}

/// Leading small-q_breve form f± ~ -2 q_breve (a∓ ln(2/q_breve) - a±), superscripts switched for Re q < 0.
pub fn f_pm_mellin(lw: &LongwaveParams) -> (Complex64, Complex64) {
    let l = (2.0 / lw.q_breve).ln();
    let (ap, am) = (lw.alpha_plus, lw.alpha_minus);
    let fp = |a: Complex64, b: Complex64| -2.0 * lw.q_breve * (b * l - a);
    if lw.re_q_positive {
        (fp(ap, am), fp(am, ap))
    } else {
        (fp(am, ap), fp(ap, am))
    }
}

/// Leading form of Q+(xi+) + Q-(xi-): (1/(i pi)) q_breve (a+ - a-) (ln(2/q_breve) + 1).
pub fn q_sum_longwave(lw: &LongwaveParams) -> Complex64 {
    lw.q_breve * (lw.alpha_plus - lw.alpha_minus) * ((2.0 / lw.q_breve).ln() + 1.0) / (I * PI)
}
