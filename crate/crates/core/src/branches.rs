//! Branch conventions for the square root and logarithm used throughout.

use crate::error::{EppError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Riemann sheet of `sqrt(xi^2 + q^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// Re sqrt > 0 (decaying waves); ties on the cut go to Im > 0.
    First,
    Second,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::First => 1.0,
            Sheet::Second => -1.0,
        }
    }
}

/// First-sheet root without error checking; the branch point maps to zero.
#[inline]
pub(crate) fn first_sheet_sqrt(xi: Complex64, q: Complex64) -> Complex64 {
    let w = (xi * xi + q * q).sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        -w
    } else {
        w
    }
}

pub fn sheet_sqrt(xi: Complex64, q: Complex64, sheet: Sheet) -> Result<Complex64> {
    let z = xi * xi + q * q;
    if z == Complex64::new(0.0, 0.0) {
        return Err(EppError::BranchPoint(xi));
    }
    Ok(first_sheet_sqrt(xi, q) * sheet.sign())
}

pub fn sign_q(q: Complex64) -> Result<f64> {
    if q.re > 0.0 {
        Ok(1.0)
    } else if q.re < 0.0 {
        Ok(-1.0)
    } else {
        Err(EppError::ZeroRealQ(q))
    }
}

/// Logarithm with Im in (-pi, pi].
pub fn principal_log(w: Complex64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(EppError::LogOfZero);
    }
    let mut arg = w.im.atan2(w.re);
    if arg <= -PI {
        arg += 2.0 * PI;
    }
    Ok(Complex64::new(w.norm().ln(), arg))
}

/// Reduce an imaginary part into (-pi, pi].
pub fn wrap_imag(z: Complex64) -> Complex64 {
    let mut im = z.im.rem_euclid(2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    }
    Complex64::new(z.re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_at_origin_is_q() {
        let w = sheet_sqrt(c(0.0, 0.0), c(3.0, 0.1), Sheet::First).unwrap();
        assert!((w - c(3.0, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn sqrt_near_cut_has_positive_real_part() {
        let q = c(0.0, 3.0) * c(1.0, 1e-9);
        let w = sheet_sqrt(c(4.0, 0.0), q, Sheet::First).unwrap();
        assert!(w.re > 0.0);
        assert!((w.re - 7f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn tie_on_cut_goes_to_positive_imaginary() {
        // xi^2 + q^2 = -7 exactly
        let w = sheet_sqrt(c(3.0, 0.0), c(0.0, 4.0), Sheet::First).unwrap();
        assert_eq!(w.re, 0.0);
        assert!(w.im > 0.0);
    }

    #[test]
    fn branch_point_is_rejected() {
        assert!(matches!(
            sheet_sqrt(c(0.0, 2.0), c(2.0, 0.0), Sheet::First),
            Err(EppError::BranchPoint(_))
        ));
    }

    #[test]
    fn sign_of_q() {
        assert_eq!(sign_q(c(12.172, 0.0)).unwrap(), 1.0);
        assert_eq!(sign_q(c(-12.172, 0.0)).unwrap(), -1.0);
        assert!(sign_q(c(0.0, 0.140)).is_err());
    }

    #[test]
    fn principal_log_examples() {
        assert_eq!(principal_log(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let l = principal_log(c(-1.0, 0.0)).unwrap();
        assert!((l - c(0.0, PI)).norm() < 1e-15);
        let l = principal_log(c(-1.0, -0.0)).unwrap();
        assert!((l - c(0.0, PI)).norm() < 1e-15);
        let w = c(2.0, 0.3).exp();
        assert!((principal_log(w).unwrap() - c(2.0, 0.3)).norm() < 1e-14);
        assert!(principal_log(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn wrap_reduces_imaginary_part() {
        let z = wrap_imag(c(0.5, 2.0 * PI + 0.25));
        assert!((z - c(0.5, 0.25)).norm() < 1e-14);
        assert!((wrap_imag(c(0.0, -PI)).im - PI).abs() < 1e-15);
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn q_strategy() -> impl Strategy<Value = Complex64> {
        (0.01..50.0f64, any::<bool>(), -5.0..5.0f64)
            .prop_map(|(a, neg, b)| c(if neg { -a } else { a }, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn sqrt_is_even_in_xi(xi in cplx(), q in q_strategy()) {
            let a = sheet_sqrt(xi, q, Sheet::First).unwrap();
            let b = sheet_sqrt(-xi, q, Sheet::First).unwrap();
            prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
        }

        #[test]
        fn sheets_sum_to_zero(xi in cplx(), q in q_strategy()) {
            let a = sheet_sqrt(xi, q, Sheet::First).unwrap();
            let b = sheet_sqrt(xi, q, Sheet::Second).unwrap();
            prop_assert_eq!(a + b, c(0.0, 0.0));
            prop_assert!((a * a - (xi * xi + q * q)).norm() <= 1e-12 * (xi * xi + q * q).norm().max(1.0));
        }

        #[test]
        fn log_inverts_exp(re in -20.0..20.0f64, im in -3.14159..3.14159f64) {
            let z = c(re, im);
            prop_assert!((principal_log(z.exp()).unwrap() - z).norm() < 1e-12);
        }
    }
}
