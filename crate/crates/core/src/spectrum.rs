//! Quadratic roots, bulk-plasmon zero census and the Krein index.

use crate::branches::{first_sheet_sqrt, sign_q, Sheet};
use crate::conductivity::ConductivityTensor;
use crate::error::{EppError, Result};
use crate::kernel::{Problem, SheetSymbol, Symbol};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentRule {
    ByRe,
    ByImTieBreak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRoots {
    pub xi_plus: Complex64,
    pub xi_minus: Complex64,
    /// Principal root of (sxy + syx)^2 - 4 sxx syy.
    pub d: Complex64,
    pub rule: AssignmentRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCoefficients {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

/// Roots of sxx xi^2 + (sxy + syx) q xi + syy q^2 with their split coefficients.
///
/// xi+ is the root with the larger real part; near-equal real parts fall back to the larger imaginary part.
pub fn root_pair(sigma: &ConductivityTensor, q: Complex64) -> Result<(QuadraticRoots, SplitCoefficients)> {
    let sg = sign_q(q)?;
    let scale = sigma.sigma_sharp();
    if sigma.xx.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(EppError::DegenerateQuadratic);
    }
    let s = sigma.xy + sigma.yx;
    let d = (s * s - 4.0 * sigma.xx * sigma.yy).sqrt();
    if d.norm() <= 1e-12 * scale {
        return Err(EppError::DoubleRoot);
    }
    let mut r1 = -q * (s + sg * d) / (2.0 * sigma.xx);
    let mut r2 = -q * (s - sg * d) / (2.0 * sigma.xx);
    let ratio = sg * (sigma.xy - sigma.yx) / d;
    let mut c1 = 0.5 * (1.0 + ratio);
    let mut c2 = 0.5 * (1.0 - ratio);
    let size = r1.norm().max(r2.norm());
    let tie = (r1.re - r2.re).abs() < 1e-9 * size;
    let swap = if tie { r2.im > r1.im } else { r2.re > r1.re };
    if swap {
        std::mem::swap(&mut r1, &mut r2);
        std::mem::swap(&mut c1, &mut c2);
    }
    let rule = if tie { AssignmentRule::ByImTieBreak } else { AssignmentRule::ByRe };
    Ok((
        QuadraticRoots {
            xi_plus: r1,
            xi_minus: r2,
            d,
            rule,
        },
        SplitCoefficients {
            c_plus: c1,
            c_minus: c2,
        },
    ))
}

pub fn quadratic_roots(sigma: &ConductivityTensor, q: Complex64) -> Result<QuadraticRoots> {
    Ok(root_pair(sigma, q)?.0)
}

pub fn split_coefficients(sigma: &ConductivityTensor, q: Complex64) -> Result<SplitCoefficients> {
    Ok(root_pair(sigma, q)?.1)
}

/// Continuously tracked phase of P along the real axis.
#[derive(Debug, Clone)]
pub struct PhaseTrack {
    pub xs: Vec<f64>,
    pub phases: Vec<f64>,
    pub min_modulus: f64,
    pub m: f64,
}

const MAX_PHASE_STEP: f64 = PI / 4.0;
const MIN_MODULUS: f64 = 1e-8;

impl PhaseTrack {
    /// Marches from 0 towards +m and -m with relative steps, refining where the phase moves quickly.
    pub fn new(symbol: &Symbol, sheet: Sheet, m: f64, inner_scale: f64) -> Result<Self> {
        let h_rel = 0.01;
        let h_floor = h_rel * inner_scale;
        let eval = |x: f64| symbol.eval(Complex64::new(x, 0.0), sheet);
        let p0 = eval(0.0);
        let mut min_modulus = p0.norm();
        let mut min_at = 0.0;
        let ph0 = p0.im.atan2(p0.re);
        let mut halves: Vec<Vec<(f64, f64)>> = Vec::with_capacity(2);
        for dir in [1.0, -1.0] {
            let mut out = Vec::new();
            let mut x = 0.0f64;
            let mut ph = ph0;
            let mut p = p0;
            while x.abs() < m {
                let mut h = (h_rel * x.abs()).max(h_floor);
                loop {
                    let xn = if (x.abs() + h) >= m { dir * m } else { x + dir * h };
                    let pn = eval(xn);
                    let dph = (pn / p).arg();
                    if dph.abs() <= MAX_PHASE_STEP {
                        x = xn;
                        p = pn;
                        ph += dph;
                        let md = pn.norm();
                        if md < min_modulus {
                            min_modulus = md;
                            min_at = xn;
                        }
                        out.push((xn, ph));
                        break;
                    }
                    h *= 0.5;
                    if h < 1e-13 * x.abs().max(inner_scale) {
                        return Err(EppError::SymbolVanishes {
                            min_modulus: pn.norm().min(p.norm()),
                            location: xn,
                        });
                    }
                }
                if !min_modulus.is_finite() || min_modulus < MIN_MODULUS {
                    return Err(EppError::SymbolVanishes {
                        min_modulus,
                        location: min_at,
                    });
                }
            }
            halves.push(out);
        }
        let right = halves.remove(0);
        let left = halves.remove(0);
        let mut xs = Vec::with_capacity(left.len() + right.len() + 1);
        let mut phases = Vec::with_capacity(xs.capacity());
        for &(x, ph) in left.iter().rev() {
            xs.push(x);
            phases.push(ph);
        }
        xs.push(0.0);
        phases.push(ph0);
        for &(x, ph) in right.iter() {
            xs.push(x);
            phases.push(ph);
        }
        if min_modulus < MIN_MODULUS {
            return Err(EppError::SymbolVanishes {
                min_modulus,
                location: min_at,
            });
        }
        Ok(PhaseTrack {
            xs,
            phases,
            min_modulus,
            m,
        })
    }

    pub fn total_change(&self) -> f64 {
        self.phases[self.phases.len() - 1] - self.phases[0]
    }

    pub fn winding(&self) -> f64 {
        self.total_change() / (2.0 * PI)
    }

    /// Shift every phase by a multiple of 2 pi so the +m end sits nearest `target`.
    pub fn anchor_right(&mut self, target: f64) {
        let last = self.phases[self.phases.len() - 1];
        let k = ((last - target) / (2.0 * PI)).round();
        if k != 0.0 {
            for p in &mut self.phases {
                *p -= 2.0 * PI * k;
            }
        }
    }

    /// Linearly interpolated tracked phase; constant beyond the ends.
    pub fn phase_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.phases[0];
        }
        if x >= self.xs[n - 1] {
            return self.phases[n - 1];
        }
        let j = self.xs.partition_point(|&v| v <= x);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let t = (x - x0) / (x1 - x0);
        self.phases[j - 1] + t * (self.phases[j] - self.phases[j - 1])
    }
}

/// Outer radius of the phase-tracking contour.
pub fn contour_radius(problem: &Problem) -> f64 {
    let mut s = problem.q.norm().max(problem.k_sp_magnitude()).max(1.0);
    if let Ok((r, _)) = root_pair(&problem.sigma, problem.q) {
        s = s.max(r.xi_plus.norm()).max(r.xi_minus.norm());
    }
    100.0 * s
}

/// Smallest geometric scale of the symbol, used for the inner step size.
pub fn inner_scale(problem: &Problem) -> f64 {
    let mut s = problem.q.norm();
    let ksp = problem.k_sp_magnitude();
    if ksp > 0.0 {
        s = s.min(ksp);
    }
    if let Ok((r, _)) = root_pair(&problem.sigma, problem.q) {
        for z in [r.xi_plus, r.xi_minus] {
            if z.norm() > 0.0 {
                s = s.min(z.norm());
            }
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct Winding {
    pub nu: i32,
    pub raw: f64,
    pub min_modulus: f64,
    pub samples: usize,
    pub m: f64,
}

/// Winding of P (First sheet) or of its dual P* (Second sheet) with a chosen radius and inner step scale.
pub fn winding_with(problem: &Problem, sheet: Sheet, m: f64, inner: f64) -> Result<Winding> {
    let track = PhaseTrack::new(&problem.symbol(), sheet, m, inner)?;
    let raw = track.winding();
    Ok(Winding {
        nu: raw.round() as i32,
        raw,
        min_modulus: track.min_modulus,
        samples: track.xs.len(),
        m,
    })
}

pub fn winding_details(problem: &Problem, sheet: Sheet) -> Result<Winding> {
    winding_with(problem, sheet, contour_radius(problem), inner_scale(problem))
}

/// Krein index of the symbol along the real axis.
pub fn winding_index(problem: &Problem) -> Result<i32> {
    Ok(winding_details(problem, Sheet::First)?.nu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkZero {
    pub location: Complex64,
    pub sheet: Sheet,
    pub half_plane: HalfPlane,
    pub marginal: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub zeros: Vec<BulkZero>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_star_plus: usize,
    pub n_star_minus: usize,
    pub marginal: usize,
    pub warnings: Vec<String>,
}

impl Census {
    pub fn conjecture_rhs(&self) -> f64 {
        0.5 * (self.n_plus as f64 - self.n_minus as f64) + 0.5 * (self.n_star_plus as f64 - self.n_star_minus as f64)
    }

    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (self.n_plus, self.n_minus, self.n_star_plus, self.n_star_minus)
    }

    /// First-sheet zeros in the upper half plane.
    pub fn upper_first_sheet(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .filter(|z| !z.marginal && z.sheet == Sheet::First && z.half_plane == HalfPlane::Upper)
            .map(|z| z.location)
            .collect()
    }
}

fn eval_poly(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

/// All roots of a polynomial with coefficients in descending order (Aberth-Ehrlich iteration
/// followed by Newton polishing).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let start = coeffs.iter().position(|c| c.norm() > 1e-14 * top).unwrap_or(coeffs.len());
    let c: Vec<Complex64> = coeffs[start..].iter().map(|&a| a / coeffs[start]).collect();
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let deriv: Vec<Complex64> = c[..n].iter().enumerate().map(|(k, &a)| a * (n - k) as f64).collect();
    // Fujiwara bound for the root moduli
    let radius = (1..=n)
        .map(|k| {
            let f = if k == n { 0.5 } else { 1.0 };
            (f * c[k].norm()).powf(1.0 / k as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = radius.max(1e-300);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let p = eval_poly(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / eval_poly(&deriv, z[k]);
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z.into_iter()
        .map(|mut r| {
            for _ in 0..4 {
                let d = eval_poly(&deriv, r);
                if d.norm() == 0.0 {
                    break;
                }
                let step = eval_poly(&c, r) / d;
                if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-6 * r.norm().max(1.0) {
                    break;
                }
                r -= step;
            }
            r
        })
        .collect()
}

/// Coefficients of xi^2 + q^2 - pref^2 N(xi)^2 (descending), whose roots are the zeros of P on either sheet.
fn census_quartic(s: &SheetSymbol) -> Vec<Complex64> {
    let p2 = s.pref * s.pref;
    let (a, b, c) = (s.a, s.b, s.c);
    vec![
        -p2 * a * a,
        -p2 * 2.0 * a * b,
        1.0 - p2 * (b * b + 2.0 * a * c),
        -p2 * 2.0 * b * c,
        s.q * s.q - p2 * c * c,
    ]
}

pub const MARGINAL_TOL: f64 = 1e-8;

fn census_of(s: &SheetSymbol) -> Census {
    let mut census = Census {
        zeros: Vec::new(),
        n_plus: 0,
        n_minus: 0,
        n_star_plus: 0,
        n_star_minus: 0,
        marginal: 0,
        warnings: Vec::new(),
    };
    if s.is_trivial() {
        return census;
    }
    let q = s.q;
    let sg = if q.re > 0.0 { 1.0 } else { -1.0 };
    let bp = Complex64::new(0.0, sg) * q;
    for r in polynomial_roots(&census_quartic(s)) {
        let w_needed = -s.pref * s.numerator(r);
        let w1 = first_sheet_sqrt(r, q);
        let sheet = if (w_needed - w1).norm() <= (w_needed + w1).norm() {
            Sheet::First
        } else {
            Sheet::Second
        };
        let scale = r.norm().max(1.0);
        let on_axis = r.im.abs() < MARGINAL_TOL * scale;
        let near_branch = (r - bp).norm() < MARGINAL_TOL * scale || (r + bp).norm() < MARGINAL_TOL * scale;
        let on_cut = w1.re.abs() <= MARGINAL_TOL * w1.norm();
        let value = s.eval(r, sheet);
        let residual = value.norm() / (1.0 + (s.pref * s.numerator(r) / w1).norm());
        let half_plane = if r.im > 0.0 { HalfPlane::Upper } else { HalfPlane::Lower };
        let marginal = on_axis || near_branch || on_cut;
        if residual > 1e-8 {
            census.warnings.push(format!("zero {r} fails back-substitution (|P| = {residual:e}); discarded"));
            continue;
        }
        if marginal {
            census.marginal += 1;
            census.warnings.push(format!("zero {r} lies on the real axis, a branch point or the cut; excluded"));
        } else {
            match (sheet, half_plane) {
                (Sheet::First, HalfPlane::Upper) => census.n_plus += 1,
                (Sheet::First, HalfPlane::Lower) => census.n_minus += 1,
                (Sheet::Second, HalfPlane::Upper) => census.n_star_plus += 1,
                (Sheet::Second, HalfPlane::Lower) => census.n_star_minus += 1,
            }
        }
        census.zeros.push(BulkZero {
            location: r,
            sheet,
            half_plane,
            marginal,
            residual,
        });
    }
    census.zeros.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    census
}

/// Zero census of a single-sheet or interface symbol.
pub fn bulk_zeros(problem: &Problem) -> Result<Census> {
    match problem.symbol() {
        Symbol::Single(s) => Ok(census_of(&s)),
        Symbol::Ratio { .. } => Err(EppError::InvalidProblem(
            "two-sheet census is computed per side; use bulk_zeros_two_sheet".into(),
        )),
    }
}

/// (left, right) censuses of a two-sheet problem.
pub fn bulk_zeros_two_sheet(problem: &Problem) -> Result<(Census, Census)> {
    match problem.symbol() {
        Symbol::Ratio { left, right } => Ok((census_of(&left), census_of(&right))),
        Symbol::Single(_) => Err(EppError::InvalidProblem("not a two-sheet problem".into())),
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub roots: Option<QuadraticRoots>,
    pub coefficients: Option<SplitCoefficients>,
    pub census: Census,
    pub nu_k: Result<i32>,
    pub nu_star: Result<i32>,
    pub conjecture_rhs: f64,
}

pub fn spectrum_report(problem: &Problem) -> Result<SpectrumReport> {
    let census = bulk_zeros(problem)?;
    let pair = root_pair(&problem.sigma, problem.q).ok();
    let nu_k = winding_index(problem);
    let nu_star = winding_details(problem, Sheet::Second).map(|w| w.nu);
    Ok(SpectrumReport {
        roots: pair.map(|p| p.0),
        coefficients: pair.map(|p| p.1),
        conjecture_rhs: census.conjecture_rhs(),
        census,
        nu_k,
        nu_star,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureCheck {
    pub nu_k: i32,
    pub rhs: f64,
    /// None when marginal zeros make the count indeterminate.
    pub agrees: Option<bool>,
    pub census: Census,
}

pub fn conjecture_check(problem: &Problem) -> Result<ConjectureCheck> {
    let census = bulk_zeros(problem)?;
    let nu_k = winding_index(problem)?;
    let rhs = census.conjecture_rhs();
    let agrees = if census.marginal > 0 {
        None
    } else {
        Some((rhs - nu_k as f64).abs() < 1e-12)
    };
    Ok(ConjectureCheck {
        nu_k,
        rhs,
        agrees,
        census,
    })
}
