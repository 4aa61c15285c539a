//! One function per subcommand. Each returns its rows and whether every row succeeded.

use crate::config::{pair, ConfigError, RunConfig};
use crate::output::Row;
use anyhow::Result;
use epp_core::dispersion::{
    f_pm_direct, f_pm_mellin, longwave_q, residual, solve, solve_auto, Classification,
    DispersionSolution, LongwaveParams,
};
use epp_core::field::{edge_limits_with, FieldContext, ACCURACY_FLAG_TOL};
use epp_core::spectrum::spectrum_report;
use epp_core::wiener_hopf::build_log_kernel;
use num_complex::Complex64;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub verbose: bool,
    pub timing: bool,
}

pub struct Outcome {
    pub rows: Vec<Row>,
    pub ok: bool,
}

fn warn(opts: RunOptions, context: &str, lines: &[String]) {
    if opts.verbose {
        for l in lines {
            eprintln!("[{context}] {l}");
        }
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
    s.as_ref()
        .ok_or_else(|| ConfigError(format!("missing [{name}] section")))
}

/// Solve at one point; `guess = None` uses the k_sp ladder.
fn solve_point(
    cfg: &RunConfig,
    omega: f64,
    rotation_pi: Option<f64>,
    guess: Option<Complex64>,
    opts: RunOptions,
) -> Result<epp_core::Result<DispersionSolution>, ConfigError> {
    let (problem, warnings) = cfg.problem(omega, rotation_pi)?;
    warn(opts, &format!("omega {omega}"), &warnings);
    let start = Instant::now();
    let res = match guess {
        Some(g) => solve(&problem, omega, g),
        None => solve_auto(&problem, omega, 1.0),
    };
    Ok(res.map(|mut s| {
        s.wall_ms = if opts.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        warn(opts, &format!("omega {omega}"), &s.notes);
        s
    }))
}

fn solution_columns(
    row: &mut Row,
    omega: f64,
    guess: Option<Complex64>,
    res: &epp_core::Result<DispersionSolution>,
) {
    row.push("omega", omega)
        .push("re_guess", guess.map(|g| g.re))
        .push("im_guess", guess.map(|g| g.im));
    match res {
        Ok(s) => {
            let counts = s.census.as_ref().map(|c| c.counts());
            row.push("re_q", s.q.re)
                .push("im_q", s.q.im)
                .push("nu_k", s.nu_k_at_solution)
                .push("n_plus", counts.map(|c| c.0))
                .push("n_minus", counts.map(|c| c.1))
                .push("nstar_plus", counts.map(|c| c.2))
                .push("nstar_minus", counts.map(|c| c.3))
                .push("abs_residual", s.abs_residual())
                .push("classification", s.classification.as_str())
                .push("iterations", s.iterations)
                .push("wall_ms", s.wall_ms)
                .push("error", "");
        }
        Err(e) => {
            for k in [
                "re_q",
                "im_q",
                "nu_k",
                "n_plus",
                "n_minus",
                "nstar_plus",
                "nstar_minus",
                "abs_residual",
            ] {
                row.push(k, None::<f64>);
            }
            row.push("classification", Classification::NoSolution.as_str())
                .push("iterations", None::<usize>)
                .push("wall_ms", None::<f64>)
                .push("error", e.to_string());
        }
    }
}

fn is_discrete(res: &epp_core::Result<DispersionSolution>) -> bool {
    matches!(res, Ok(s) if s.classification == Classification::DiscreteEPP)
}

/// Exit status 0 requires a discrete root at every (omega, guess) pair.
pub fn solve_cmd(cfg: &RunConfig, opts: RunOptions) -> Result<Outcome> {
    let sec = section(&cfg.solve, "solve")?;
    let guesses: Vec<Option<Complex64>> = match &sec.guesses {
        Some(g) => g.iter().map(|p| Some(pair(*p))).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<Complex64>)> = sec
        .omega
        .iter()
        .flat_map(|&w| guesses.iter().map(move |&g| (w, g)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(w, g)| solve_point(cfg, w, None, g, opts))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let ok = results.iter().all(is_discrete);
    let rows = points
        .iter()
        .zip(&results)
        .map(|(&(w, g), r)| {
            let mut row = Row::new();
            solution_columns(&mut row, w, g, r);
            row
        })
        .collect();
    Ok(Outcome { rows, ok })
}

/// Grid over rotation angle and frequency; the status fails only on numerical errors, since
/// continuum and no-solution regions are legitimate sweep results.
pub fn sweep_cmd(cfg: &RunConfig, opts: RunOptions) -> Result<Outcome> {
    let sec = section(&cfg.sweep, "sweep")?;
    let rotations = sec
        .rotation_pi
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![cfg.sheet.rotation_pi]);
    let omegas = sec
        .omega
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![1.0]);
    if rotations.is_empty() || omegas.is_empty() {
        return Err(ConfigError("sweep: the grid is empty".into()).into());
    }
    let guess = sec.guess.map(pair);
    let points: Vec<(f64, f64)> = rotations
        .iter()
        .flat_map(|&r| omegas.iter().map(move |&w| (r, w)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(r, w)| solve_point(cfg, w, Some(r), guess, opts))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let ok = results.iter().all(|r| r.is_ok());
    let mut rows = Vec::with_capacity(points.len());
    let mut prev: Option<&'static str> = None;
    for (&(r, w), res) in points.iter().zip(&results) {
        let class = match res {
            Ok(s) => s.classification.as_str(),
            Err(_) => "error",
        };
        let transition = match prev {
            Some(p) if p != class => format!("{p}->{class}"),
            _ => String::new(),
        };
        prev = Some(class);
        let mut row = Row::new();
        row.push("rotation_pi", r);
        solution_columns(&mut row, w, guess, res);
        row.push("transition", transition);
        rows.push(row);
    }
    Ok(Outcome { rows, ok })
}

/// Winding index and bulk-zero census at each listed wavenumber; the dispersion residual where the index vanishes.
pub fn index_cmd(cfg: &RunConfig, opts: RunOptions) -> Result<Outcome> {
    let sec = section(&cfg.index, "index")?;
    let (problem, warnings) = cfg.problem(sec.omega, None)?;
    warn(opts, "index", &warnings);
    let qs = cfg.index_points();
    let reports: Vec<_> = qs
        .par_iter()
        .map(|&q| problem.with_q(q).and_then(|p| spectrum_report(&p)))
        .collect();
    let mut ok = true;
    let rows = qs
        .iter()
        .zip(reports)
        .map(|(q, rep)| {
            let mut row = Row::new();
            row.push("re_q", q.re).push("im_q", q.im);
            match rep {
                Ok(r) => {
                    let c = &r.census;
                    let nu = r.nu_k.as_ref().ok().copied();
                    let agrees = match (nu, c.marginal) {
                        (Some(n), 0) => Some((c.conjecture_rhs() - n as f64).abs() < 1e-12),
                        _ => None,
                    };
                    warn(opts, &format!("q {q}"), &c.warnings);
                    let mut err = String::new();
                    if let Err(e) = &r.nu_k {
                        err = e.to_string();
                    }
                    row.push("nu_k", nu)
                        .push("nu_star", r.nu_star.as_ref().ok().copied())
                        .push("n_plus", c.n_plus)
                        .push("n_minus", c.n_minus)
                        .push("nstar_plus", c.n_star_plus)
                        .push("nstar_minus", c.n_star_minus)
                        .push("marginal", c.marginal)
                        .push("census_rhs", r.conjecture_rhs)
                        .push("census_agrees", agrees)
                        .push(
                            "abs_residual",
                            if nu == Some(0) {
                                residual(&problem, *q).ok().map(|r| r.value.norm())
                            } else {
                                None
                            },
                        )
                        .push("error", err);
                }
                Err(e) => {
                    ok = false;
                    for k in [
                        "nu_k",
                        "nu_star",
                        "n_plus",
                        "n_minus",
                        "nstar_plus",
                        "nstar_minus",
                        "marginal",
                    ] {
                        row.push(k, None::<i64>);
                    }
                    row.push("census_rhs", None::<f64>)
                        .push("census_agrees", None::<bool>)
                        .push("abs_residual", None::<f64>)
                        .push("error", e.to_string());
                }
            }
            row
        })
        .collect();
    Ok(Outcome { rows, ok })
}

/// Potential profile phi(x) along the normal to the edge at the configured or solved wavenumber.
pub fn field_cmd(cfg: &RunConfig, opts: RunOptions) -> Result<Outcome> {
    let sec = section(&cfg.field, "field")?;
    let (problem, warnings) = cfg.problem(sec.omega, None)?;
    warn(opts, "field", &warnings);
    let q = match sec.q {
        Some(q) => pair(q),
        None => {
            let s = solve_auto(&problem, sec.omega, 1.0)?;
            if s.classification != Classification::DiscreteEPP {
                anyhow::bail!("field: no discrete root found; give field.q explicitly");
            }
            s.q
        }
    };
    let kernel = build_log_kernel(&problem.with_q(q)?)?;
    let ctx = FieldContext::new(&kernel)?;
    if opts.verbose {
        if let Ok(e) = edge_limits_with(&ctx) {
            eprintln!(
                "[field] q = {q}; phi(0+) = {}, phi(0-) = {}, divergence coefficient = {}",
                e.phi_at_0_plus, e.phi_at_0_minus, e.divergence_coefficient
            );
        }
    }
    let xs = sec.x.values();
    let values: Vec<_> = xs.par_iter().map(|&x| ctx.phi(x)).collect();
    let mut ok = true;
    let rows = xs
        .iter()
        .zip(values)
        .map(|(&x, v)| {
            let mut row = Row::new();
            row.push("re_q", q.re).push("im_q", q.im).push("x", x);
            match v {
                Ok((phi, err)) => {
                    let flag = err > ACCURACY_FLAG_TOL * phi.norm().max(1e-300);
                    ok &= !flag;
                    row.push("re_phi", phi.re)
                        .push("im_phi", phi.im)
                        .push("error_estimate", err)
                        .push("accuracy_flag", flag)
                        .push("error", "");
                }
                Err(e) => {
                    ok = false;
                    row.push("re_phi", None::<f64>)
                        .push("im_phi", None::<f64>)
                        .push("error_estimate", None::<f64>)
                        .push("accuracy_flag", true)
                        .push("error", e.to_string());
                }
            }
            row
        })
        .collect();
    Ok(Outcome { rows, ok })
}

/// Long-wavelength asymptotics: direct quadrature of f± against the leading logarithmic form.
pub fn asymptote_cmd(cfg: &RunConfig, opts: RunOptions) -> Result<Outcome> {
    let sec = section(&cfg.asymptote, "asymptote")?;
    let (problem, warnings) = cfg.problem(sec.omega, None)?;
    warn(opts, "asymptote", &warnings);
    let sigma = &problem.sigma;
    let kf = problem.kernel_factor;
    let kappa = problem.kappa();
    if kappa.norm() == 0.0 {
        anyhow::bail!("asymptote: sigma_xx vanishes, so q_breve is undefined");
    }
    let q_lw = longwave_q(sigma, kf);
    if let Err(e) = &q_lw {
        warn(opts, "asymptote", &[e.to_string()]);
    }
    let q_lw = q_lw.ok();
    let mut ok = true;
    let rows = sec
        .q_breve
        .iter()
        .map(|&qb| {
            // real positive q_breve: q = q_breve/kappa, reflected into Re q > 0
            let mut q = Complex64::new(qb, 0.0) / kappa;
            if q.re < 0.0 {
                q = -q;
            }
            let mut row = Row::new();
            row.push("q_breve", qb)
                .push("re_q", q.re)
                .push("im_q", q.im);
            let lw = LongwaveParams::new(sigma, kf, q);
            let (direct, mellin, err) = match &lw {
                Ok(lw) => {
                    let m = f_pm_mellin(lw);
                    match f_pm_direct(lw) {
                        Ok(d) => (Some(d), Some(m), String::new()),
                        Err(e) => (None, Some(m), e.to_string()),
                    }
                }
                Err(e) => (None, None, e.to_string()),
            };
            ok &= direct.is_some();
            let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
            row.push("re_fp_direct", direct.map(|d| d.0.re))
                .push("im_fp_direct", direct.map(|d| d.0.im))
                .push("re_fm_direct", direct.map(|d| d.1.re))
                .push("im_fm_direct", direct.map(|d| d.1.im))
                .push("re_fp_leading", mellin.map(|m| m.0.re))
                .push("im_fp_leading", mellin.map(|m| m.0.im))
                .push("re_fm_leading", mellin.map(|m| m.1.re))
                .push("im_fm_leading", mellin.map(|m| m.1.im))
                .push(
                    "rel_diff_plus",
                    direct.zip(mellin).map(|(d, m)| rel(d.0, m.0)),
                )
                .push(
                    "rel_diff_minus",
                    direct.zip(mellin).map(|(d, m)| rel(d.1, m.1)),
                )
                .push("re_q_longwave", q_lw.map(|q| q.re))
                .push("im_q_longwave", q_lw.map(|q| q.im))
                .push("error", err);
            row
        })
        .collect();
    Ok(Outcome { rows, ok })
}
