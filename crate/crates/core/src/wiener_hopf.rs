//! Additive factorization ln P = Q+ + Q- by Cauchy integrals over the real axis.

use crate::branches::{first_sheet_sqrt, principal_log, Sheet};
use crate::conductivity::ConductivityTensor;
use crate::error::{EppError, Result};
use crate::kernel::{Problem, Symbol};
use crate::quadrature::{geometric_breaks, integrate_half_line, Tolerance};
use crate::spectrum::{contour_radius, inner_scale, root_pair, PhaseTrack, QuadraticRoots, SplitCoefficients};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Plus,
    Minus,
}

/// Closed-loop tolerance on the phase change between -M and +M.
pub const CLOSURE_TOL: f64 = 0.05;

/// Continuously unwrapped ln P along the real axis, anchored so that L(x) - ln(k x) -> 0 as x -> +inf.
#[derive(Debug, Clone)]
pub struct UnwrappedLogKernel {
    pub problem: Problem,
    symbol: Symbol,
    track: PhaseTrack,
    trivial: bool,
    pub nu_k: i32,
    /// Phase mismatch between the two ends of the contour, in radians.
    pub closure: f64,
    pub m: f64,
    pub inner: f64,
    pub tol: Tolerance,
}

pub fn build_log_kernel(problem: &Problem) -> Result<UnwrappedLogKernel> {
    let symbol = problem.symbol();
    let m = contour_radius(problem);
    let inner = inner_scale(problem).max(1e-300);
    let trivial = match &symbol {
        Symbol::Single(s) => s.is_trivial(),
        Symbol::Ratio { left, right } => left == right,
    };
    let mut track = PhaseTrack::new(&symbol, Sheet::First, m, inner)?;
    let raw = track.winding();
    let nu = raw.round() as i32;
    if nu != 0 {
        return Err(EppError::NonzeroIndex(nu));
    }
    let closure = track.total_change();
    if closure.abs() > CLOSURE_TOL {
        return Err(EppError::PhaseLoopOpen(closure));
    }
    let k = symbol.asymptotic_coefficient();
    track.anchor_right(k.im.atan2(k.re));
    Ok(UnwrappedLogKernel {
        problem: problem.clone(),
        symbol,
        track,
        trivial,
        nu_k: nu,
        closure,
        m,
        inner,
        tol: Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 4000,
        },
    })
}

impl UnwrappedLogKernel {
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.track.xs, &self.track.phases)
    }

    /// L(x) = ln|P(x)| + i arg P(x) on the tracked branch.
    #[inline]
    pub fn log_at(&self, x: f64) -> Complex64 {
        if self.trivial {
            return Complex64::new(0.0, 0.0);
        }
        let p = self.symbol.eval_real(x);
        let a = p.im.atan2(p.re);
        let target = self.track.phase_at(x);
        let k = ((target - a) / (2.0 * PI)).round();
        Complex64::new(p.norm().ln(), a + 2.0 * PI * k)
    }

    pub fn base_value(&self) -> Complex64 {
        self.log_at(0.0)
    }

    /// (1/2 pi i) * integral of L(t)/(t - xi0) over the real axis; principal value when xi0 is real.
    /// Returns the value and a quadrature error estimate.
    pub fn cauchy(&self, xi0: Complex64) -> (Complex64, f64) {
        if self.trivial {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let x0 = xi0.re;
        let y = xi0.im;
        let l0 = self.log_at(x0);
        let f = |t: f64| {
            let a = self.log_at(x0 + t) - l0;
            let b = self.log_at(x0 - t) - l0;
            (t * (a - b) + I * y * (a + b)) / (t * t + y * y)
        };
        let lo = if y != 0.0 { y.abs().min(1e-2 * self.inner) } else { 1e-3 * self.inner };
        let mut breaks = geometric_breaks(lo, 4.0 * (self.m + x0.abs()), 2.0);
        if y != 0.0 && y.abs() > lo {
            breaks.push(y.abs());
        }
        breaks.push(x0.abs());
        breaks.retain(|&t| t >= 0.0);
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let r = integrate_half_line(f, &breaks, self.tol);
        let sgn = if y > 0.0 {
            0.5
        } else if y < 0.0 {
            -0.5
        } else {
            0.0
        };
        (sgn * l0 + r.value / (2.0 * PI * I), r.error / (2.0 * PI))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitValue {
    pub value: Complex64,
    pub half: Half,
    pub eval_point: Complex64,
    pub quadrature_error_estimate: f64,
}

/// Q+ (upper half plane) or Q- (lower half plane) at a strictly off-axis point.
pub fn split_q(kernel: &UnwrappedLogKernel, xi0: Complex64, half: Half) -> Result<SplitValue> {
    if xi0.im == 0.0 {
        return Err(EppError::OnRealAxis(xi0));
    }
    match half {
        Half::Plus if xi0.im < 0.0 => return Err(EppError::WrongHalfPlane(xi0)),
        Half::Minus if xi0.im > 0.0 => return Err(EppError::WrongHalfPlane(xi0)),
        _ => {}
    }
    let (c, err) = kernel.cauchy(xi0);
    Ok(SplitValue {
        value: if half == Half::Plus { c } else { -c },
        half,
        eval_point: xi0,
        quadrature_error_estimate: err,
    })
}

/// Boundary values Q+(x + i0) = L/2 + PV/(2 pi i), Q-(x - i0) = L/2 - PV/(2 pi i).
pub fn split_q_boundary(kernel: &UnwrappedLogKernel, x: f64, half: Half) -> SplitValue {
    let (pv, err) = kernel.cauchy(Complex64::new(x, 0.0));
    let l = 0.5 * kernel.log_at(x);
    SplitValue {
        value: if half == Half::Plus { l + pv } else { l - pv },
        half,
        eval_point: Complex64::new(x, 0.0),
        quadrature_error_estimate: err,
    }
}

/// Q+ or Q- at a point of either half plane or the axis, using the Cauchy integral C:
/// Q+ = C and Q- = -C off the axis, boundary values on it. At the quadratic roots these are the
/// constants entering the splitting.
pub fn split_at(kernel: &UnwrappedLogKernel, xi: Complex64, half: Half) -> SplitValue {
    if xi.im == 0.0 {
        return split_q_boundary(kernel, xi.re, half);
    }
    let (c, err) = kernel.cauchy(xi);
    SplitValue {
        value: if half == Half::Plus { c } else { -c },
        half,
        eval_point: xi,
        quadrature_error_estimate: err,
    }
}

/// Leading large-|xi| form: Q+ ~ (ln k + ln(-i xi))/2, Q- ~ (ln k + ln(i xi))/2, k = i kf sxx / 2.
pub fn q_asymptotic(sigma: &ConductivityTensor, kernel_factor: f64, xi: Complex64, half: Half) -> Result<Complex64> {
    let kappa = 0.5 * I * kernel_factor * sigma.xx;
    let arg = match half {
        Half::Plus => -I * xi,
        Half::Minus => I * xi,
    };
    Ok(0.5 * (principal_log(kappa)? + principal_log(arg)?))
}

/// Constants of the splitting: roots, coefficients and E± = exp(-C(xi±)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConstants {
    pub roots: QuadraticRoots,
    pub coeffs: SplitCoefficients,
    /// Q+(xi+) = C(xi+).
    pub q_plus_at_root: Complex64,
    /// Q-(xi-) = -C(xi-).
    pub q_minus_at_root: Complex64,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub error_estimate: f64,
}

pub fn split_constants(kernel: &UnwrappedLogKernel) -> Result<SplitConstants> {
    let (roots, coeffs) = root_pair(&kernel.problem.sigma, kernel.problem.q)?;
    let qp = split_at(kernel, roots.xi_plus, Half::Plus);
    let qm = split_at(kernel, roots.xi_minus, Half::Minus);
    Ok(SplitConstants {
        roots,
        coeffs,
        q_plus_at_root: qp.value,
        q_minus_at_root: qm.value,
        e_plus: (-qp.value).exp(),
        e_minus: qm.value.exp(),
        error_estimate: qp.quadrature_error_estimate + qm.quadrature_error_estimate,
    })
}

fn lambda_raw(k: &SplitConstants, xi: Complex64, q_val: Complex64, half: Half) -> Complex64 {
    let (cp, cm) = (k.coeffs.c_plus, k.coeffs.c_minus);
    let (rp, rm) = (k.roots.xi_plus, k.roots.xi_minus);
    match half {
        Half::Plus => {
            let e = (-q_val).exp();
            -cp / (xi - rp) * (e - k.e_plus) + cm / (xi - rm) * (k.e_minus - e)
        }
        Half::Minus => {
            let e = q_val.exp();
            cm / (xi - rm) * (e - k.e_minus) - cp / (xi - rp) * (k.e_plus - e)
        }
    }
}

fn q_for_lambda(kernel: &UnwrappedLogKernel, xi: Complex64, half: Half) -> Result<Complex64> {
    match half {
        Half::Plus if xi.im < 0.0 => Err(EppError::WrongHalfPlane(xi)),
        Half::Minus if xi.im > 0.0 => Err(EppError::WrongHalfPlane(xi)),
        _ => Ok(split_at(kernel, xi, half).value),
    }
}

/// Lambda+ (closed upper half plane) or Lambda- (closed lower half plane).
pub fn lambda_pm(kernel: &UnwrappedLogKernel, consts: &SplitConstants, xi: Complex64, half: Half) -> Result<Complex64> {
    let scale = consts.roots.xi_plus.norm().max(consts.roots.xi_minus.norm()).max(1.0);
    for r in [consts.roots.xi_plus, consts.roots.xi_minus] {
        if (xi - r).norm() < 1e-6 * scale {
            // removable singularity: average two symmetric points in the admissible half plane
            let h = 1e-4 * scale;
            let dir = if half == Half::Plus { I } else { -I };
            let a = r + dir * h;
            let b = r + dir * h * Complex64::from_polar(1.0, PI / 2.0 * 0.5);
            let b2 = r + dir * h * Complex64::from_polar(1.0, -PI / 2.0 * 0.5);
            let va = lambda_raw(consts, a, q_for_lambda(kernel, a, half)?, half);
            let vb = lambda_raw(consts, b, q_for_lambda(kernel, b, half)?, half);
            let vc = lambda_raw(consts, b2, q_for_lambda(kernel, b2, half)?, half);
            // quadratic extrapolation through three points at equal distance h from r
            return Ok(extrapolate_to_center(r, [(a, va), (b, vb), (b2, vc)]));
        }
    }
    let q = q_for_lambda(kernel, xi, half)?;
    Ok(lambda_raw(consts, xi, q, half))
}

/// Value at `center` of the quadratic interpolant through three points.
fn extrapolate_to_center(center: Complex64, pts: [(Complex64, Complex64); 3]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let mut w = Complex64::new(1.0, 0.0);
        for j in 0..3 {
            if i != j {
                w *= (center - pts[j].0) / (pts[i].0 - pts[j].0);
            }
        }
        acc += w * pts[i].1;
    }
    acc
}

/// Right-hand side of the splitting identity at real xi: kf (q syx + xi sxx) / (2 w P^L) * exp(-Q+(xi)).
pub fn splitting_rhs(kernel: &UnwrappedLogKernel, x: f64) -> Complex64 {
    let p = &kernel.problem;
    let xi = Complex64::new(x, 0.0);
    let w = first_sheet_sqrt(xi, p.q);
    let left = match p.symbol() {
        Symbol::Ratio { left, .. } => left.eval_real(x),
        Symbol::Single(_) => Complex64::new(1.0, 0.0),
    };
    let qp = split_q_boundary(kernel, x, Half::Plus).value;
    p.kernel_factor * (p.q * p.sigma.yx + xi * p.sigma.xx) / (2.0 * w * left) * (-qp).exp()
}
