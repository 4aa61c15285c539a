//! The Wiener-Hopf symbol P(xi; q) and its variants.

use crate::branches::{first_sheet_sqrt, sheet_sqrt, sign_q, Sheet};
use crate::conductivity::{ConductivityTensor, Units};
use crate::error::{EppError, Result};
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    SingleSheet,
    /// Sheet at the interface of two half spaces with relative permittivities.
    Interface { eps_r1: f64, eps_r2: f64 },
    /// Two coplanar half sheets; `left` occupies x < 0.
    TwoSheet {
        left: ConductivityTensor,
        right: ConductivityTensor,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub variant: Variant,
    /// Sheet tensor, or the difference right - left for two sheets.
    pub sigma: ConductivityTensor,
    pub kernel_factor: f64,
    pub q: Complex64,
}

fn require_nondim(t: &ConductivityTensor) -> Result<()> {
    if t.units != Units::Nondimensional {
        return Err(EppError::Units("problem tensors must be nondimensional".into()));
    }
    Ok(())
}

impl Problem {
    pub fn single(sigma: ConductivityTensor, q: Complex64) -> Result<Self> {
        require_nondim(&sigma)?;
        sign_q(q)?;
        Ok(Problem {
            variant: Variant::SingleSheet,
            sigma,
            kernel_factor: 1.0,
            q,
        })
    }

    pub fn interface(sigma: ConductivityTensor, eps_r1: f64, eps_r2: f64, q: Complex64) -> Result<Self> {
        require_nondim(&sigma)?;
        sign_q(q)?;
        if !(eps_r1 > 0.0 && eps_r2 > 0.0) {
            return Err(EppError::InvalidProblem("relative permittivities must be positive".into()));
        }
        Ok(Problem {
            variant: Variant::Interface { eps_r1, eps_r2 },
            sigma,
            kernel_factor: 2.0 / (eps_r1 + eps_r2),
            q,
        })
    }

    pub fn two_sheet(left: ConductivityTensor, right: ConductivityTensor, q: Complex64) -> Result<Self> {
        require_nondim(&left)?;
        require_nondim(&right)?;
        sign_q(q)?;
        let sigma = right.sub(&left)?;
        if sigma.is_zero() {
            return Err(EppError::InvalidProblem("two-sheet problem requires distinct tensors".into()));
        }
        Ok(Problem {
            variant: Variant::TwoSheet { left, right },
            sigma,
            kernel_factor: 1.0,
            q,
        })
    }

    pub fn with_q(&self, q: Complex64) -> Result<Self> {
        sign_q(q)?;
        let mut p = self.clone();
        p.q = q;
        Ok(p)
    }

    pub fn is_two_sheet(&self) -> bool {
        matches!(self.variant, Variant::TwoSheet { .. })
    }

    pub fn sg(&self) -> f64 {
        if self.q.re > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// kappa = i kf sigma_xx / 2, the large-|xi| slope of P.
    pub fn kappa(&self) -> Complex64 {
        0.5 * I * self.kernel_factor * self.sigma.xx
    }

    /// Bulk plasmon wavenumber k_sp = -1/kappa of the sheet (largest over both sides for two sheets).
    pub fn k_sp_magnitude(&self) -> f64 {
        let k = |t: &ConductivityTensor| {
            let kap = (0.5 * self.kernel_factor * t.xx).norm();
            if kap > 0.0 {
                1.0 / kap
            } else {
                0.0
            }
        };
        match &self.variant {
            Variant::TwoSheet { left, right } => k(left).max(k(right)),
            _ => k(&self.sigma),
        }
    }

    pub fn symbol(&self) -> Symbol {
        match &self.variant {
            Variant::TwoSheet { left, right } => Symbol::Ratio {
                left: SheetSymbol::new(left, self.q, self.kernel_factor),
                right: SheetSymbol::new(right, self.q, self.kernel_factor),
            },
            _ => Symbol::Single(SheetSymbol::new(&self.sigma, self.q, self.kernel_factor)),
        }
    }

    /// Single-sheet problems for the left and right tensors.
    pub fn sides(&self) -> Option<(Problem, Problem)> {
        match &self.variant {
            Variant::TwoSheet { left, right } => {
                let mk = |t: &ConductivityTensor| Problem {
                    variant: Variant::SingleSheet,
                    sigma: t.clone(),
                    kernel_factor: self.kernel_factor,
                    q: self.q,
                };
                Some((mk(left), mk(right)))
            }
            _ => None,
        }
    }
}

/// P(xi) = 1 + pref * (a xi^2 + b xi + c) / sqrt(xi^2 + q^2) for one sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetSymbol {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub q: Complex64,
    pub pref: Complex64,
}

impl SheetSymbol {
    pub fn new(sigma: &ConductivityTensor, q: Complex64, kernel_factor: f64) -> Self {
        SheetSymbol {
            a: sigma.xx,
            b: (sigma.xy + sigma.yx) * q,
            c: sigma.yy * q * q,
            q,
            pref: 0.5 * I * kernel_factor,
        }
    }

    #[inline]
    pub fn numerator(&self, xi: Complex64) -> Complex64 {
        (self.a * xi + self.b) * xi + self.c
    }

    #[inline]
    pub fn eval(&self, xi: Complex64, sheet: Sheet) -> Complex64 {
        let w = first_sheet_sqrt(xi, self.q) * sheet.sign();
        1.0 + self.pref * self.numerator(xi) / w
    }

    #[inline]
    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0), Sheet::First)
    }

    pub fn derivative(&self, xi: Complex64, sheet: Sheet) -> Complex64 {
        let w = first_sheet_sqrt(xi, self.q) * sheet.sign();
        let n = self.numerator(xi);
        let dn = 2.0 * self.a * xi + self.b;
        self.pref * (dn / w - n * xi / (w * w * w))
    }

    pub fn is_trivial(&self) -> bool {
        self.a.norm() == 0.0 && self.b.norm() == 0.0 && self.c.norm() == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    Single(SheetSymbol),
    Ratio { left: SheetSymbol, right: SheetSymbol },
}

impl Symbol {
    #[inline]
    pub fn eval(&self, xi: Complex64, sheet: Sheet) -> Complex64 {
        match self {
            Symbol::Single(s) => s.eval(xi, sheet),
            Symbol::Ratio { left, right } => right.eval(xi, sheet) / left.eval(xi, sheet),
        }
    }

    #[inline]
    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0), Sheet::First)
    }

    pub fn derivative(&self, xi: Complex64, sheet: Sheet) -> Complex64 {
        match self {
            Symbol::Single(s) => s.derivative(xi, sheet),
            Symbol::Ratio { left, right } => {
                let l = left.eval(xi, sheet);
                let r = right.eval(xi, sheet);
                (right.derivative(xi, sheet) * l - r * left.derivative(xi, sheet)) / (l * l)
            }
        }
    }

    /// Leading coefficient k with P(x) ~ k |x| as x -> +inf (or the constant limit when no growth).
    pub fn asymptotic_coefficient(&self) -> Complex64 {
        let lead = |s: &SheetSymbol| -> Option<Complex64> {
            if s.a.norm() > 0.0 {
                Some(s.pref * s.a)
            } else {
                None
            }
        };
        let limit = |s: &SheetSymbol| -> Complex64 {
            match lead(s) {
                Some(k) => k,
                None => 1.0 + s.pref * s.b,
            }
        };
        match self {
            Symbol::Single(s) => limit(s),
            Symbol::Ratio { left, right } => match (lead(left), lead(right)) {
                (Some(l), Some(r)) => r / l,
                (None, Some(r)) => r / limit(left),
                (Some(l), None) => limit(right) / l,
                (None, None) => limit(right) / limit(left),
            },
        }
    }

    pub fn q(&self) -> Complex64 {
        match self {
            Symbol::Single(s) => s.q,
            Symbol::Ratio { right, .. } => right.q,
        }
    }
}

/// Transform of the kernel, 1 / (2 sqrt(xi^2 + q^2)) on the first sheet.
pub fn khat(xi: Complex64, q: Complex64) -> Result<Complex64> {
    Ok(0.5 / sheet_sqrt(xi, q, Sheet::First)?)
}

pub fn p_of_xi(problem: &Problem, xi: Complex64, sheet: Sheet) -> Result<Complex64> {
    sheet_sqrt(xi, problem.q, sheet)?;
    match problem.symbol() {
        Symbol::Single(s) => Ok(s.eval(xi, sheet)),
        Symbol::Ratio { left, right } => {
            let l = left.eval(xi, sheet);
            if l.norm() == 0.0 {
                return Err(EppError::LeftPole(xi));
            }
            Ok(right.eval(xi, sheet) / l)
        }
    }
}

/// (P^L, P^R) for a two-sheet problem.
pub fn p_left_right(problem: &Problem, xi: Complex64, sheet: Sheet) -> Result<(Complex64, Complex64)> {
    sheet_sqrt(xi, problem.q, sheet)?;
    match problem.symbol() {
        Symbol::Ratio { left, right } => Ok((left.eval(xi, sheet), right.eval(xi, sheet))),
        Symbol::Single(_) => Err(EppError::InvalidProblem("left/right symbols need a two-sheet problem".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn case_a() -> ConductivityTensor {
        ConductivityTensor::diagonal(c(0.0, 0.2), c(0.0, 0.2), Units::Nondimensional)
    }

    fn case_b() -> ConductivityTensor {
        ConductivityTensor::diagonal(c(0.001, 0.1), c(0.002, 0.2), Units::Nondimensional)
    }

    #[test]
    fn khat_examples() {
        let q = c(3.0, 0.5);
        assert!((khat(c(0.0, 0.0), q).unwrap() - 0.5 / q).norm() < 1e-15);
        assert!((khat(c(4.0, 0.0), c(3.0, 0.0)).unwrap() - c(0.1, 0.0)).norm() < 1e-15);
        let big = khat(c(1e8, 0.0), c(3.0, 0.0)).unwrap();
        assert!((big.re * 2e8 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sheet_is_identity() {
        let p = Problem::single(ConductivityTensor::zero(Units::Nondimensional), c(5.0, 0.1)).unwrap();
        for x in [-3.0, 0.0, 0.7, 100.0] {
            assert_eq!(p_of_xi(&p, c(x, 0.2), Sheet::First).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn symbol_is_one_at_quadratic_roots() {
        let q = c(12.172, 0.0);
        let p = Problem::single(case_a(), q).unwrap();
        for r in [c(0.0, 12.172), c(0.0, -12.172)] {
            // the roots coincide with the branch points here, so P - 1 ~ sqrt(eps)
            let xi = r + c(1e-10, 0.0);
            let v = p_of_xi(&p, xi, Sheet::First).unwrap();
            let n = SheetSymbol::new(&case_a(), q, 1.0).numerator(xi);
            assert!(n.norm() < 1e-8);
            assert!((v - 1.0).norm() < 1e-4, "{v}");
        }
    }

    #[test]
    fn case_b_symbol_is_even() {
        let p = Problem::single(case_b(), c(13.928, 0.140)).unwrap();
        for x in [0.1, 1.0, 7.3, 40.0] {
            let a = p_of_xi(&p, c(x, 0.3), Sheet::First).unwrap();
            let b = p_of_xi(&p, c(-x, -0.3), Sheet::First).unwrap();
            assert!((a - b).norm() < 1e-14 * a.norm());
        }
    }

    #[test]
    fn two_sheet_reduces_to_single() {
        let q = c(12.172, 0.0);
        let two = Problem::two_sheet(ConductivityTensor::zero(Units::Nondimensional), case_a(), q).unwrap();
        let one = Problem::single(case_a(), q).unwrap();
        for x in [-20.0, -1.0, 0.0, 3.5, 50.0] {
            let xi = c(x, 0.0);
            let (l, _) = p_left_right(&two, xi, Sheet::First).unwrap();
            assert_eq!(l, c(1.0, 0.0));
            let a = p_of_xi(&two, xi, Sheet::First).unwrap();
            let b = p_of_xi(&one, xi, Sheet::First).unwrap();
            assert!((a - b).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn identical_sheets_are_rejected() {
        assert!(Problem::two_sheet(case_a(), case_a(), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn dimensional_tensor_is_rejected() {
        let t = ConductivityTensor::diagonal(c(0.0, 1e-3), c(0.0, 1e-3), Units::Siemens);
        assert!(Problem::single(t, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn interface_factor() {
        let p = Problem::interface(case_a(), 1.0, 3.0, c(5.0, 0.0)).unwrap();
        assert_eq!(p.kernel_factor, 0.5);
        let u = Problem::interface(case_a(), 1.0, 1.0, c(5.0, 0.0)).unwrap();
        let s = Problem::single(case_a(), c(5.0, 0.0)).unwrap();
        assert_eq!(p_of_xi(&u, c(2.0, 0.0), Sheet::First), p_of_xi(&s, c(2.0, 0.0), Sheet::First));
    }

    #[test]
    fn large_xi_growth() {
        let p = Problem::single(case_b(), c(13.928, 0.140)).unwrap();
        for x in [1e6, -1e6] {
            let v = p_of_xi(&p, c(x, 0.0), Sheet::First).unwrap();
            let ratio = v.norm() / (case_b().xx.norm() * x.abs() / 2.0);
            assert!((ratio - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let p = Problem::single(case_b(), c(13.928, 0.140)).unwrap();
        let s = p.symbol();
        let xi = c(3.0, 1.0);
        let h = 1e-6;
        let fd = (s.eval(xi + h, Sheet::First) - s.eval(xi - h, Sheet::First)) / (2.0 * h);
        assert!((fd - s.derivative(xi, Sheet::First)).norm() < 1e-7);
    }

    fn tensor() -> impl Strategy<Value = ConductivityTensor> {
        proptest::collection::vec(-1.0..1.0f64, 8).prop_map(|v| {
            ConductivityTensor::nondim(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]))
        })
    }

    proptest! {
        #[test]
        fn even_when_symmetric_part_of_offdiagonal_vanishes(
            s in tensor(), h in -1.0..1.0f64, qr in 0.5..30.0f64, qi in -1.0..1.0f64,
            xr in -50.0..50.0f64, xi_im in -0.5..0.5f64)
        {
            let t = ConductivityTensor::nondim(s.xx, c(h, 0.3), c(-h, -0.3), s.yy);
            let p = Problem::single(t, c(qr, qi)).unwrap();
            let a = p_of_xi(&p, c(xr, xi_im), Sheet::First).unwrap();
            let b = p_of_xi(&p, c(-xr, -xi_im), Sheet::First).unwrap();
            prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        }

        #[test]
        fn quartic_identity_with_squared_factors(
            s in tensor(), qr in 0.5..30.0f64, qi in -1.0..1.0f64, xr in -50.0..50.0f64, xim in -5.0..5.0f64)
        {
            prop_assume!(s.xx.norm() > 1e-2);
            let q = c(qr, qi);
            let p = Problem::single(s.clone(), q).unwrap();
            let xi = c(xr, xim);
            prop_assume!((xi * xi + q * q).norm() > 1e-3);
            let pp = p_of_xi(&p, xi, Sheet::First).unwrap() * p_of_xi(&p, xi, Sheet::Second).unwrap();
            let kappa = p.kappa();
            let ksp = -1.0 / kappa;
            let d = ((s.xy + s.yx).powi(2) - 4.0 * s.xx * s.yy).sqrt();
            let r1 = -q * ((s.xy + s.yx) + d) / (2.0 * s.xx);
            let r2 = -q * ((s.xy + s.yx) - d) / (2.0 * s.xx);
            let lhs = -ksp * ksp * (xi * xi + q * q) * pp;
            let rhs = (xi - r1).powi(2) * (xi - r2).powi(2) - ksp * ksp * (xi * xi + q * q);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (ksp * ksp * (xi * xi + q * q)).norm().max(rhs.norm()).max(lhs.norm()));
        }

        #[test]
        fn vanishing_conductivity_gives_unity(s in tensor(), qr in 0.5..30.0f64, xr in -50.0..50.0f64) {
            let p = Problem::single(s.scale(1e-12), c(qr, 0.1)).unwrap();
            let v = p_of_xi(&p, c(xr, 0.0), Sheet::First).unwrap();
            prop_assert!((v - 1.0).norm() < 1e-9);
        }
    }
}
