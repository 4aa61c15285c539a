//! Globally adaptive Gauss-Kronrod (21-point) quadrature for complex integrands.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525168546,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Integral {
    fn zero() -> Self {
        Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    fn add(&mut self, other: Integral) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }
}

/// One 21-point Kronrod rule with its embedded 10-point Gauss estimate.
pub fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration over [a, b] starting from the given breakpoints.
pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = gk21(&mut f, w[0], w[1]);
        evals += 21;
        total += v;
        err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut converged = true;
    loop {
        if err <= tol.abs.max(tol.rel * total.norm()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            converged = false;
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evals += 42;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of incremental updates.
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p.value);
    let error = heap.iter().map(|p| p.error).sum();
    Integral {
        value,
        error,
        evaluations: evals,
        converged,
    }
}

pub fn integrate<F: FnMut(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Integral {
    integrate_panels(f, &[a, b], tol)
}

/// Integral over [a, inf) through t = a + (1 - u)/u.
pub fn integrate_to_infinity<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    tol: Tolerance,
) -> Integral {
    let g = move |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = a + (1.0 - u) / u;
        f(t) / (u * u)
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Integral over [0, inf) with finite breakpoints followed by a mapped tail.
pub fn integrate_half_line<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Integral {
    let mut out = Integral::zero();
    let last = *breaks.last().unwrap_or(&0.0);
    if breaks.len() > 1 {
        out.add(integrate_panels(&mut f, breaks, tol));
    }
    let tail_tol = Tolerance {
        abs: tol.abs,
        rel: tol.rel,
        max_intervals: tol.max_intervals,
    };
    out.add(integrate_to_infinity(&mut f, last, tail_tol));
    out
}

/// Breakpoints 0 = t0 < t1 < ... on a geometric ladder between `lo` and `hi`.
pub fn geometric_breaks(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    if lo > 0.0 {
        let mut t = lo;
        while t < hi {
            v.push(t);
            t *= ratio;
        }
    }
    v.push(hi);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| c(x.powi(5), 2.0 * x), 0.0, 2.0, Tolerance::default());
        assert!((r.value - c(64.0 / 6.0, 4.0)).norm() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn complex_exponential() {
        let r = integrate(|x| c(0.0, x).exp(), 0.0, PI, Tolerance::default());
        assert!((r.value - c(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn lorentzian_over_half_line() {
        let r = integrate_half_line(|x| c(1.0 / (1.0 + x * x), 0.0), &[0.0, 1.0], Tolerance::default());
        assert!((r.value.re - PI / 2.0).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn narrow_peak_with_breakpoint() {
        let y = 1e-5;
        let breaks = geometric_breaks(y, 10.0, 4.0);
        let r = integrate_half_line(|t| c(y / (t * t + y * y), 0.0), &breaks, Tolerance::default());
        assert!((r.value.re - PI / 2.0).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn log_singularity_endpoint() {
        let r = integrate(|x| c(x.ln(), 0.0), 0.0, 1.0, Tolerance::default());
        assert!((r.value.re + 1.0).abs() < 1e-9);
    }
}
