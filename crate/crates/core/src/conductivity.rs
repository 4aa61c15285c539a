//! Surface conductivity tensors and the ambient medium.

use crate::error::{EppError, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Siemens,
    Nondimensional,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Raw,
    Rotated { phi: f64 },
    Model(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConductivityTensor {
    pub xx: Complex64,
    pub xy: Complex64,
    pub yx: Complex64,
    pub yy: Complex64,
    pub units: Units,
    pub provenance: Provenance,
}

impl ConductivityTensor {
    pub fn new(xx: Complex64, xy: Complex64, yx: Complex64, yy: Complex64, units: Units) -> Self {
        ConductivityTensor {
            xx,
            xy,
            yx,
            yy,
            units,
            provenance: Provenance::Raw,
        }
    }

    /// Nondimensional tensor from its four entries.
    pub fn nondim(xx: Complex64, xy: Complex64, yx: Complex64, yy: Complex64) -> Self {
        Self::new(xx, xy, yx, yy, Units::Nondimensional)
    }

    pub fn diagonal(xx: Complex64, yy: Complex64, units: Units) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(xx, z, z, yy, units)
    }

    pub fn zero(units: Units) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z, units)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.xx, self.xy, self.yx, self.yy]
    }

    pub fn trace(&self) -> Complex64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> Complex64 {
        self.xx * self.yy - self.xy * self.yx
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|z| z.norm() == 0.0)
    }

    /// Frobenius norm.
    pub fn sigma_sharp(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.xx *= s;
        t.xy *= s;
        t.yx *= s;
        t.yy *= s;
        t
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.units != other.units {
            return Err(EppError::Units("cannot subtract tensors in different units".into()));
        }
        Ok(Self::new(
            self.xx - other.xx,
            self.xy - other.xy,
            self.yx - other.yx,
            self.yy - other.yy,
            self.units,
        ))
    }

    /// Smallest eigenvalue of the Hermitian part (sigma + sigma^H)/2.
    pub fn hermitian_min_eigenvalue(&self) -> f64 {
        let a = self.xx.re;
        let d = self.yy.re;
        let b = 0.5 * (self.xy + self.yx.conj());
        let half_gap = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        0.5 * (a + d) - half_gap
    }

    pub fn is_passive(&self) -> bool {
        let scale = self.sigma_sharp().max(f64::MIN_POSITIVE);
        self.hermitian_min_eigenvalue() >= -1e-14 * scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientMedium {
    pub epsilon: f64,
    pub mu: f64,
    pub omega: f64,
}

impl AmbientMedium {
    pub fn new(epsilon: f64, mu: f64, omega: f64) -> Result<Self> {
        let m = AmbientMedium { epsilon, mu, omega };
        m.validate()?;
        Ok(m)
    }

    pub fn vacuum(omega: f64) -> Result<Self> {
        Self::new(VACUUM_PERMITTIVITY, VACUUM_PERMEABILITY, omega)
    }

    pub fn relative(eps_r: f64, mu_r: f64, omega: f64) -> Result<Self> {
        Self::new(eps_r * VACUUM_PERMITTIVITY, mu_r * VACUUM_PERMEABILITY, omega)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !(self.mu > 0.0) {
            return Err(EppError::InvalidMedium(format!(
                "epsilon = {} and mu = {} must both be positive",
                self.epsilon, self.mu
            )));
        }
        if !(self.omega > 0.0) {
            return Err(EppError::InvalidMedium(format!("omega = {} must be positive", self.omega)));
        }
        Ok(())
    }

    pub fn k0(&self) -> f64 {
        self.omega * (self.epsilon * self.mu).sqrt()
    }

    /// sqrt(epsilon/mu), the conductivity scale.
    pub fn admittance(&self) -> f64 {
        (self.epsilon / self.mu).sqrt()
    }
}

/// Reduce an angle into [0, pi). Returns the reduced angle and whether a reduction happened.
pub fn reduce_angle(phi: f64) -> (f64, bool) {
    let r = phi.rem_euclid(PI);
    let r = if r >= PI { 0.0 } else { r };
    (r, r != phi)
}

/// Similarity transform by the in-plane rotation U(phi) = [[c, s], [-s, c]].
pub fn rotate(sigma: &ConductivityTensor, phi: f64) -> ConductivityTensor {
    let (phi_r, _) = reduce_angle(phi);
    let (s, c) = phi_r.sin_cos();
    let u = [[c, s], [-s, c]];
    let m = [[sigma.xx, sigma.xy], [sigma.yx, sigma.yy]];
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, mk) in m.iter().enumerate() {
                for (l, mkl) in mk.iter().enumerate() {
                    acc += *mkl * (u[i][k] * u[j][l]);
                }
            }
            *cell = acc;
        }
    }
    let base = match sigma.provenance {
        Provenance::Rotated { phi } => phi,
        _ => 0.0,
    };
    ConductivityTensor {
        xx: out[0][0],
        xy: out[0][1],
        yx: out[1][0],
        yy: out[1][1],
        units: sigma.units,
        provenance: Provenance::Rotated {
            phi: reduce_angle(base + phi_r).0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydrodynamicParams {
    pub omega: f64,
    pub n0: f64,
    pub b0: f64,
    pub charge: f64,
    pub mass: f64,
    pub tau: f64,
}

impl HydrodynamicParams {
    pub fn cyclotron_frequency(&self) -> f64 {
        self.charge * self.b0 / self.mass
    }
}

/// Magneto-hydrodynamic tensor in siemens, with regime warnings.
pub fn magneto_hydrodynamic(p: &HydrodynamicParams) -> Result<(ConductivityTensor, Vec<String>)> {
    let wc = p.cyclotron_frequency();
    if wc == 0.0 || !wc.is_finite() {
        return Err(EppError::ZeroCyclotron);
    }
    if !(p.omega > 0.0) {
        return Err(EppError::InvalidArgument("omega must be positive".into()));
    }
    let mut warnings = Vec::new();
    if p.omega >= 0.1 * wc.abs() {
        warnings.push(format!(
            "omega/|omega_c| = {:.3e} is not small; model assumes omega << |omega_c|",
            p.omega / wc.abs()
        ));
    }
    if p.tau > 0.0 && 1.0 / p.tau >= 0.1 * p.omega {
        warnings.push(format!(
            "1/(tau omega) = {:.3e} is not small; model assumes collisions are rare",
            1.0 / (p.tau * p.omega)
        ));
    }
    let pref = Complex64::new(0.0, -p.charge * p.charge * p.n0 / (p.mass * wc * wc));
    let diag = pref * p.omega;
    let tensor = ConductivityTensor {
        xx: diag,
        xy: pref * Complex64::new(0.0, -wc),
        yx: pref * Complex64::new(0.0, wc),
        yy: diag,
        units: Units::Siemens,
        provenance: Provenance::Model("magneto-hydrodynamic"),
    };
    Ok((tensor, warnings))
}

/// Nondimensional magneto-hydrodynamic tensor: sigma_bar = beta * [[-i r, -1], [1, -i r]], r = omega/omega_c.
pub fn magneto_hydrodynamic_nondim(beta: f64, r: f64) -> ConductivityTensor {
    ConductivityTensor {
        xx: Complex64::new(0.0, -beta * r),
        xy: Complex64::new(-beta, 0.0),
        yx: Complex64::new(beta, 0.0),
        yy: Complex64::new(0.0, -beta * r),
        units: Units::Nondimensional,
        provenance: Provenance::Model("magneto-hydrodynamic"),
    }
}

/// Lossy Drude tensor diag(i D_x/(omega + i gamma), i D_y/(omega + i gamma)).
pub fn drude(omega: f64, weight_x: f64, weight_y: f64, gamma: f64, units: Units) -> ConductivityTensor {
    let den = Complex64::new(omega, gamma);
    let i = Complex64::new(0.0, 1.0);
    let mut t = ConductivityTensor::diagonal(i * weight_x / den, i * weight_y / den, units);
    t.provenance = Provenance::Model("drude");
    t
}

pub fn nondimensionalize(sigma: &ConductivityTensor, medium: &AmbientMedium) -> Result<ConductivityTensor> {
    medium.validate()?;
    match sigma.units {
        Units::Nondimensional => Ok(sigma.clone()),
        Units::Siemens => {
            let mut t = sigma.scale(1.0 / medium.admittance());
            t.units = Units::Nondimensional;
            t.provenance = sigma.provenance.clone();
            Ok(t)
        }
    }
}

pub fn redimensionalize(sigma: &ConductivityTensor, medium: &AmbientMedium) -> Result<ConductivityTensor> {
    medium.validate()?;
    match sigma.units {
        Units::Siemens => Ok(sigma.clone()),
        Units::Nondimensional => {
            let mut t = sigma.scale(medium.admittance());
            t.units = Units::Siemens;
            t.provenance = sigma.provenance.clone();
            Ok(t)
        }
    }
}

pub const NONRETARDED_WARN_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub sigma_sharp: f64,
    pub nonretarded_ratio: f64,
    /// l = omega mu sigma# / k0^2 in metres (infinite scale for a zero tensor).
    pub scale_length: f64,
    pub warnings: Vec<String>,
}

pub fn validity_check(sigma: &ConductivityTensor, medium: &AmbientMedium) -> ValidityReport {
    let sharp = sigma.sigma_sharp();
    let k0 = medium.k0();
    let dimensional = match sigma.units {
        Units::Siemens => sharp,
        Units::Nondimensional => sharp * medium.admittance(),
    };
    let ratio = if k0 > 0.0 {
        medium.omega * medium.mu * dimensional / k0
    } else {
        f64::NAN
    };
    let scale_length = if k0 > 0.0 {
        medium.omega * medium.mu * dimensional / (k0 * k0)
    } else {
        f64::NAN
    };
    let mut warnings = Vec::new();
    if !(ratio <= NONRETARDED_WARN_RATIO) {
        warnings.push(format!(
            "omega mu sigma#/|k0| = {:.4} exceeds {}; quasi-electrostatic regime is marginal",
            ratio, NONRETARDED_WARN_RATIO
        ));
    }
    if !sigma.is_passive() {
        warnings.push("Hermitian part has a negative eigenvalue (active sheet)".into());
    }
    ValidityReport {
        sigma_sharp: sharp,
        nonretarded_ratio: ratio,
        scale_length,
        warnings,
    }
}

/// Validity report of a nondimensional tensor, where omega mu sigma#/k0 reduces to the Frobenius norm.
pub fn validity_nondim(sigma: &ConductivityTensor) -> ValidityReport {
    let sharp = sigma.sigma_sharp();
    let mut warnings = Vec::new();
    if sharp > NONRETARDED_WARN_RATIO {
        warnings.push(format!(
            "sigma# = {:.4} exceeds {}; quasi-electrostatic regime is marginal",
            sharp, NONRETARDED_WARN_RATIO
        ));
    }
    if !sigma.is_passive() {
        warnings.push("Hermitian part has a negative eigenvalue (active sheet)".into());
    }
    ValidityReport {
        sigma_sharp: sharp,
        nonretarded_ratio: sharp,
        scale_length: sharp,
        warnings,
    }
}
