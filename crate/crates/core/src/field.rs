//! Edge potential by Fourier inversion, bulk SPP residue content and edge limits.
//!
//! For x > 0 the potential is
//! phi = sum over roots r in the upper half plane of C_r e^{i r x}
//!       - (1/2 pi i) int [C- E-/(xi - xi-) + C+ E+/(xi - xi+)] e^{-Q-(xi)} e^{i xi x} dxi,
//! and for x < 0 the lower-half-plane roots enter with the integrand multiplied by P(xi) and a plus sign.
//! The real segment [-R0, R0] uses boundary values of Q±; the tails are deformed onto vertical rays
//! where Q± reduce to the Cauchy integral C (upward for x > 0, downward for x < 0).

use crate::branches::Sheet;
use crate::error::{EppError, Result};
use crate::kernel::Symbol;
use crate::quadrature::{geometric_breaks, integrate_half_line, integrate_panels, Integral, Tolerance};
use crate::spectrum::{bulk_zeros, bulk_zeros_two_sheet, Census};
use crate::wiener_hopf::{split_constants, split_q_boundary, Half, SplitConstants, UnwrappedLogKernel};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Per-point quadrature error above which a value is flagged.
pub const ACCURACY_FLAG_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldComponents {
    /// Residue (bulk SPP) part.
    pub residue: Complex64,
    /// Remainder: branch-cut contribution.
    pub background: Complex64,
}

#[derive(Debug, Clone)]
pub struct FieldProfile {
    pub x_values: Vec<f64>,
    pub phi_values: Vec<Complex64>,
    pub error_estimates: Vec<f64>,
    pub accuracy_flags: Vec<bool>,
    /// Only available for x > 0.
    pub components: Vec<Option<FieldComponents>>,
    /// |A(q, omega)| at the profile's q; a potential is continuous at the edge only when this is small.
    pub divergence_coefficient: Complex64,
}

/// Shared state of all inversions on one kernel.
pub struct FieldContext<'a> {
    pub kernel: &'a UnwrappedLogKernel,
    pub consts: SplitConstants,
    pub census: Census,
    symbol: Symbol,
    r0: f64,
    tol: Tolerance,
}

impl<'a> FieldContext<'a> {
    pub fn new(kernel: &'a UnwrappedLogKernel) -> Result<Self> {
        let consts = split_constants(kernel)?;
        let p = &kernel.problem;
        let (census, extra) = if p.is_two_sheet() {
            let (l, r) = bulk_zeros_two_sheet(p)?;
            let extra: Vec<f64> = l.zeros.iter().map(|z| z.location.norm()).collect();
            (r, extra)
        } else {
            (bulk_zeros(p)?, Vec::new())
        };
        let mut scale = p.q.norm().max(consts.roots.xi_plus.norm()).max(consts.roots.xi_minus.norm());
        for z in census.zeros.iter() {
            scale = scale.max(z.location.norm());
        }
        for e in extra {
            scale = scale.max(e);
        }
        Ok(FieldContext {
            kernel,
            consts,
            census,
            symbol: p.symbol(),
            r0: 1.5 * scale + 1.0,
            tol: Tolerance {
                abs: 1e-11,
                rel: 1e-10,
                max_intervals: 4000,
            },
        })
    }

    /// Half-width of the real segment kept on the axis.
    pub fn segment_radius(&self) -> f64 {
        self.r0
    }

    /// A(q, omega) = C+ E+ + C- E-.
    pub fn divergence_coefficient(&self) -> Complex64 {
        self.consts.coeffs.c_plus * self.consts.e_plus + self.consts.coeffs.c_minus * self.consts.e_minus
    }

    fn bracket(&self, xi: Complex64) -> Complex64 {
        let k = &self.consts;
        k.coeffs.c_minus * k.e_minus / (xi - k.roots.xi_minus) + k.coeffs.c_plus * k.e_plus / (xi - k.roots.xi_plus)
    }

    fn roots(&self) -> [(Complex64, Complex64); 2] {
        let k = &self.consts;
        [(k.roots.xi_plus, k.coeffs.c_plus), (k.roots.xi_minus, k.coeffs.c_minus)]
    }

    fn breakpoints(&self, x: f64) -> Vec<f64> {
        let r0 = self.r0;
        let mut width = r0 / 20.0;
        if x != 0.0 {
            width = width.min(PI / (2.0 * x.abs()));
        }
        let n = (2.0 * r0 / width).ceil() as usize;
        let mut pts: Vec<f64> = (0..=n).map(|j| -r0 + 2.0 * r0 * j as f64 / n as f64).collect();
        for (r, _) in self.roots() {
            if r.re.abs() < r0 {
                pts.push(r.re);
            }
        }
        for z in self.census.zeros.iter() {
            if z.location.re.abs() < r0 {
                pts.push(z.location.re);
            }
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * r0);
        pts
    }

    fn ray_breaks(&self, x: f64) -> Vec<f64> {
        let hi = if x == 0.0 {
            100.0 * self.r0
        } else {
            (100.0 * self.r0).max(40.0 / x.abs())
        };
        geometric_breaks(1e-3 * self.r0, hi, 2.0)
    }

    /// Right-side potential including x = 0, where it gives the edge value phi(0+).
    fn phi_right(&self, x: f64) -> Result<(Complex64, f64)> {
        let mut explicit = Complex64::new(0.0, 0.0);
        for (r, c) in self.roots() {
            if r.im == 0.0 {
                return Err(EppError::OnRealAxis(r));
            }
            if r.im > 0.0 {
                explicit += c * (I * r * x).exp();
            }
        }
        let kernel = self.kernel;
        let seg = |t: f64| {
            let xi = Complex64::new(t, 0.0);
            let qm = split_q_boundary(kernel, t, Half::Minus).value;
            self.bracket(xi) * (-qm).exp() * (I * xi * x).exp()
        };
        let ray = |x0: f64| {
            move |t: f64| {
                let xi = Complex64::new(x0, t);
                let c = kernel.cauchy(xi).0;
                self.bracket(xi) * c.exp() / self.symbol.eval(xi, Sheet::First) * (I * xi * x).exp()
            }
        };
        let mid = integrate_panels(seg, &self.breakpoints(x), self.tol);
        let rb = self.ray_breaks(x);
        let right = integrate_half_line(ray(self.r0), &rb, self.tol);
        let left = integrate_half_line(ray(-self.r0), &rb, self.tol);
        let total = mid.value + I * right.value - I * left.value;
        Ok((explicit - total / (2.0 * PI * I), combine(&[mid, right, left])))
    }

    fn phi_left(&self, x: f64) -> Result<(Complex64, f64)> {
        let mut explicit = Complex64::new(0.0, 0.0);
        for (r, c) in self.roots() {
            if r.im == 0.0 {
                return Err(EppError::OnRealAxis(r));
            }
            if r.im < 0.0 {
                explicit += c * (I * r * x).exp();
            }
        }
        let kernel = self.kernel;
        let seg = |t: f64| {
            let xi = Complex64::new(t, 0.0);
            let qp = split_q_boundary(kernel, t, Half::Plus).value;
            self.bracket(xi) * qp.exp() * (I * xi * x).exp()
        };
        let ray = |x0: f64| {
            move |t: f64| {
                let xi = Complex64::new(x0, -t);
                let c = kernel.cauchy(xi).0;
                self.bracket(xi) * self.symbol.eval(xi, Sheet::First) * c.exp() * (I * xi * x).exp()
            }
        };
        let mid = integrate_panels(seg, &self.breakpoints(x), self.tol);
        let rb = self.ray_breaks(x);
        let right = integrate_half_line(ray(self.r0), &rb, self.tol);
        let left = integrate_half_line(ray(-self.r0), &rb, self.tol);
        let total = mid.value - I * right.value + I * left.value;
        Ok((explicit + total / (2.0 * PI * I), combine(&[mid, right, left])))
    }

    /// phi(x) for x != 0 with its quadrature error estimate.
    pub fn phi(&self, x: f64) -> Result<(Complex64, f64)> {
        if x == 0.0 || !x.is_finite() {
            return Err(EppError::InvalidArgument(format!(
                "x = {x}: the edge is handled by edge_limits"
            )));
        }
        if x > 0.0 {
            self.phi_right(x)
        } else {
            self.phi_left(x)
        }
    }
}

fn combine(parts: &[Integral]) -> f64 {
    parts.iter().map(|p| p.error).sum::<f64>() / (2.0 * PI)
}

/// Potential at the requested offsets, normalized to phi0 = 1.
pub fn phi_profile(kernel: &UnwrappedLogKernel, x_list: &[f64]) -> Result<FieldProfile> {
    let ctx = FieldContext::new(kernel)?;
    let spp = spp_decomposition_with(&ctx).ok();
    let mut out = FieldProfile {
        x_values: Vec::with_capacity(x_list.len()),
        phi_values: Vec::with_capacity(x_list.len()),
        error_estimates: Vec::with_capacity(x_list.len()),
        accuracy_flags: Vec::with_capacity(x_list.len()),
        components: Vec::with_capacity(x_list.len()),
        divergence_coefficient: ctx.divergence_coefficient(),
    };
    for &x in x_list {
        let (v, err) = ctx.phi(x)?;
        out.x_values.push(x);
        out.phi_values.push(v);
        out.error_estimates.push(err);
        out.accuracy_flags.push(err > ACCURACY_FLAG_TOL || !v.is_finite());
        out.components.push(match (&spp, x > 0.0) {
            (Some(s), true) => {
                let r = s.evaluate(x);
                Some(FieldComponents {
                    residue: r,
                    background: v - r,
                })
            }
            _ => None,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppMode {
    /// First-sheet zero of P in the upper half plane.
    pub wavenumber: Complex64,
    pub amplitude: Complex64,
}

/// Residue content of the x > 0 potential.
#[derive(Debug, Clone, PartialEq)]
pub struct SppDecomposition {
    pub modes: Vec<SppMode>,
    /// Quadratic roots in the upper half plane: explicit term C_r e^{i r x} plus the pole of the integrand,
    /// amplitude C_r (1 - 1/P(r)). Zero unless r sits on the branch point.
    pub root_terms: Vec<SppMode>,
}

impl SppDecomposition {
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.modes
            .iter()
            .chain(self.root_terms.iter())
            .map(|m| m.amplitude * (I * m.wavenumber * x).exp())
            .sum()
    }

    /// Slowest spatial decay rate among the modes with nonzero amplitude.
    pub fn slowest_decay(&self) -> Option<f64> {
        self.modes
            .iter()
            .chain(self.root_terms.iter())
            .filter(|m| m.amplitude.norm() > 0.0)
            .map(|m| m.wavenumber.im)
            .min_by(|a, b| a.total_cmp(b))
    }
}

pub fn spp_decomposition(kernel: &UnwrappedLogKernel) -> Result<SppDecomposition> {
    spp_decomposition_with(&FieldContext::new(kernel)?)
}

pub fn spp_decomposition_with(ctx: &FieldContext) -> Result<SppDecomposition> {
    let zeros = ctx.census.upper_first_sheet();
    let k = &ctx.consts;
    let scale = ctx.r0;
    for (i, z) in zeros.iter().enumerate() {
        for r in [k.roots.xi_plus, k.roots.xi_minus] {
            if (z - r).norm() < 1e-6 * scale {
                return Err(EppError::DegeneratePole(format!("zero {z} coincides with root {r}")));
            }
        }
        for w in &zeros[i + 1..] {
            if (z - w).norm() < 1e-6 * scale {
                return Err(EppError::DegeneratePole(format!("zeros {z} and {w} coincide")));
            }
        }
    }
    let modes = zeros
        .iter()
        .map(|&z| {
            let c = ctx.kernel.cauchy(z).0;
            let dp = ctx.symbol.derivative(z, Sheet::First);
            SppMode {
                wavenumber: z,
                amplitude: -ctx.bracket(z) * c.exp() / dp,
            }
        })
        .collect();
    let mut root_terms = Vec::new();
    for (r, c) in ctx.roots() {
        if r.im > 0.0 {
            let p = ctx.symbol.eval(r, Sheet::First);
            let inv = if p.is_finite() { 1.0 / p } else { Complex64::new(0.0, 0.0) };
            root_terms.push(SppMode {
                wavenumber: r,
                amplitude: c * (1.0 - inv),
            });
        }
    }
    Ok(SppDecomposition { modes, root_terms })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLimits {
    pub phi_at_0_plus: Complex64,
    /// Finite part of the limit from outside the sheet.
    pub phi_at_0_minus: Complex64,
    /// A(q, omega): the prefactor of the divergent part of phi(0-).
    pub divergence_coefficient: Complex64,
    /// Quadrature error of the numerical phi(0+) evaluation (0 when closed form only).
    pub phi_plus_error: f64,
}

impl EdgeLimits {
    pub fn jump(&self) -> f64 {
        (self.phi_at_0_plus - self.phi_at_0_minus).norm()
    }
}

/// Edge limits. Single sheet: phi(0+) is evaluated by the inversion integral at x = 0 (equal to C+ + C- = 1
/// by contour closure) and phi(0-) is the finite part -B (1/E+ - 1/E-)/(xi+ - xi-), B = C+ E+ xi- + C- E- xi+.
/// Two sheets: finite parts 1 + A xi-/(E- (xi+ - xi-)) and 1 - A xi+/(E+ (xi+ - xi-)).
pub fn edge_limits(kernel: &UnwrappedLogKernel) -> Result<EdgeLimits> {
    let ctx = FieldContext::new(kernel)?;
    edge_limits_with(&ctx)
}

pub fn edge_limits_with(ctx: &FieldContext) -> Result<EdgeLimits> {
    let k = &ctx.consts;
    let (xp, xm) = (k.roots.xi_plus, k.roots.xi_minus);
    let a = ctx.divergence_coefficient();
    if ctx.kernel.problem.is_two_sheet() {
        return Ok(EdgeLimits {
            phi_at_0_plus: 1.0 + a * xm / (k.e_minus * (xp - xm)),
            phi_at_0_minus: 1.0 - a * xp / (k.e_plus * (xp - xm)),
            divergence_coefficient: a,
            phi_plus_error: 0.0,
        });
    }
    let (plus, err) = ctx.phi_right(0.0)?;
    let b = k.coeffs.c_plus * k.e_plus * xm + k.coeffs.c_minus * k.e_minus * xp;
    let minus = -b * (1.0 / k.e_plus - 1.0 / k.e_minus) / (xp - xm);
    Ok(EdgeLimits {
        phi_at_0_plus: plus,
        phi_at_0_minus: minus,
        divergence_coefficient: a,
        phi_plus_error: err,
    })
}

/// Model exponents of phi(x) - phi0 near the edge, on the sheet and outside it.
pub const EDGE_EXPONENTS_INSIDE: [f64; 2] = [1.0, 1.5];
pub const EDGE_EXPONENTS_OUTSIDE: [f64; 2] = [0.5, 1.5];

/// Value at eps = 0 of a + b eps^p1 + c eps^p2 through three samples.
pub fn extrapolate_edge(eps: [f64; 3], vals: [Complex64; 3], powers: [f64; 2]) -> Complex64 {
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = vals;
    for i in 0..3 {
        m[i] = [1.0, eps[i].powf(powers[0]), eps[i].powf(powers[1])];
    }
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for k in col..3 {
                m[r][k] -= f * m[col][k];
            }
            rhs[r] = rhs[r] - rhs[col] * f;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for r in (0..3).rev() {
        let mut acc = rhs[r];
        for k in r + 1..3 {
            acc -= x[k] * m[r][k];
        }
        x[r] = acc / m[r][r];
    }
    x[0]
}

/// Cross-check of the edge values from raw inversion at x = ±eps, extrapolated with the near-edge models
/// phi0 + a x + b x^(3/2) on the sheet and phi0 + a |x|^(1/2) + b |x|^(3/2) outside. Returns (phi(0+), phi(0-)).
pub fn edge_extrapolation(ctx: &FieldContext, eps: [f64; 3]) -> Result<(Complex64, Complex64)> {
    let mut right = [Complex64::new(0.0, 0.0); 3];
    let mut left = [Complex64::new(0.0, 0.0); 3];
    for (i, &e) in eps.iter().enumerate() {
        right[i] = ctx.phi(e)?.0;
        left[i] = ctx.phi(-e)?.0;
    }
    Ok((
        extrapolate_edge(eps, right, EDGE_EXPONENTS_INSIDE),
        extrapolate_edge(eps, left, EDGE_EXPONENTS_OUTSIDE),
    ))
}

/// Residue of the x > 0 integrand at `z` by a trapezoidal circle of radius `r` (independent of the closed form).
pub fn residue_by_contour(ctx: &FieldContext, z: Complex64, r: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        let d = Complex64::from_polar(r, th);
        let xi = z + d;
        let f = -ctx.bracket(xi) * ctx.kernel.cauchy(xi).0.exp() / ctx.symbol.eval(xi, Sheet::First);
        acc += f * d;
    }
    acc / n as f64
}
