//! Run configuration: TOML with complex numbers as [re, im] pairs and angles in units of pi.

use epp_core::conductivity::{
    drude, magneto_hydrodynamic, magneto_hydrodynamic_nondim, nondimensionalize, rotate,
    validity_check, validity_nondim, AmbientMedium, ConductivityTensor, HydrodynamicParams, Units,
    ELECTRON_MASS, ELEMENTARY_CHARGE,
};
use epp_core::kernel::Problem;
use num_complex::Complex64;
use serde::Deserialize;
use std::fmt;
use std::path::Path;

/// A configuration problem: reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: Option<MediumSpec>,
    pub sheet: SheetSpec,
    #[serde(default)]
    pub variant: VariantSpec,
    pub solve: Option<SolveSection>,
    pub sweep: Option<SweepSection>,
    pub index: Option<IndexSection>,
    pub field: Option<FieldSection>,
    pub asymptote: Option<AsymptoteSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    #[serde(default = "one")]
    pub epsilon_r: f64,
    #[serde(default = "one")]
    pub mu_r: f64,
    /// Angular frequency in rad/s; required for tensors in siemens.
    pub omega: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnitsSpec {
    #[default]
    Nondimensional,
    Siemens,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetSpec {
    pub tensor: Option<TensorSpec>,
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub units: UnitsSpec,
    /// Rotation angle in units of pi.
    #[serde(default)]
    pub rotation_pi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub xx: [f64; 2],
    #[serde(default)]
    pub xy: [f64; 2],
    #[serde(default)]
    pub yx: [f64; 2],
    pub yy: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Nondimensional beta [[-i r, -1], [1, -i r]] with r = omega/omega_c.
    Hydrodynamic { beta: f64, omega_over_omega_c: f64 },
    /// SI magneto-hydrodynamic model evaluated at each command frequency (rad/s).
    HydrodynamicSi {
        n0: f64,
        b0: f64,
        #[serde(default)]
        tau: f64,
        #[serde(default = "electron_charge")]
        charge: f64,
        #[serde(default = "electron_mass")]
        mass: f64,
    },
    /// Nondimensional Drude diag(i wx/(w + i g), i wy/(w + i g)) at each command frequency.
    Drude {
        weight_x: f64,
        weight_y: f64,
        gamma: f64,
    },
}

fn electron_charge() -> f64 {
    -ELEMENTARY_CHARGE
}

fn electron_mass() -> f64 {
    ELECTRON_MASS
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VariantSpec {
    #[default]
    Single,
    Interface {
        eps_r1: f64,
        eps_r2: f64,
    },
    /// The top-level sheet is the right-hand sheet.
    TwoSheet {
        left: SheetSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    #[serde(default = "default_omegas")]
    pub omega: Vec<f64>,
    /// Initial guesses; when absent the k_sp-scaled ladder is used.
    pub guesses: Option<Vec<[f64; 2]>>,
}

fn default_omegas() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|j| self.start + (self.stop - self.start) * j as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => r.values(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Rotation angles in units of pi; overrides sheet.rotation_pi.
    pub rotation_pi: Option<Grid>,
    pub omega: Option<Grid>,
    pub guess: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSection {
    pub q: Option<Vec<[f64; 2]>>,
    pub q_from: Option<[f64; 2]>,
    pub q_to: Option<[f64; 2]>,
    pub steps: Option<usize>,
    #[serde(default = "one")]
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// Wavenumber of the profile; solved from the k_sp ladder when absent.
    pub q: Option<[f64; 2]>,
    pub x: Grid,
    #[serde(default = "one")]
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoteSection {
    #[serde(default = "default_q_breve")]
    pub q_breve: Vec<f64>,
    #[serde(default = "one")]
    pub omega: f64,
}

fn default_q_breve() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4]
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    cfg.check()?;
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn check_guess(field: &str, g: [f64; 2]) -> Result<(), ConfigError> {
    if !g[0].is_finite() || !g[1].is_finite() {
        return cfg_err(format!("{field}: entries must be finite"));
    }
    if g[0] == 0.0 {
        return cfg_err(format!("{field}: Re q_guess must be nonzero"));
    }
    Ok(())
}

fn check_sheet(name: &str, s: &SheetSpec) -> Result<(), ConfigError> {
    match (&s.tensor, &s.model) {
        (Some(_), None) | (None, Some(_)) => {}
        _ => {
            return cfg_err(format!(
                "{name}: exactly one of `tensor` or `model` is required"
            ))
        }
    }
    if s.model.is_some() && s.units == UnitsSpec::Siemens {
        return cfg_err(format!("{name}.units: models fix their own units"));
    }
    if !s.rotation_pi.is_finite() {
        return cfg_err(format!("{name}.rotation_pi must be finite"));
    }
    Ok(())
}

impl RunConfig {
    fn check(&self) -> Result<(), ConfigError> {
        check_sheet("sheet", &self.sheet)?;
        if let VariantSpec::TwoSheet { left } = &self.variant {
            check_sheet("variant.left", left)?;
        }
        if let VariantSpec::Interface { eps_r1, eps_r2 } = self.variant {
            if !(eps_r1 > 0.0 && eps_r2 > 0.0) {
                return cfg_err("variant: eps_r1 and eps_r2 must be positive");
            }
        }
        if let Some(m) = &self.medium {
            if !(m.epsilon_r > 0.0 && m.mu_r > 0.0) {
                return cfg_err("medium: epsilon_r and mu_r must be positive");
            }
        }
        if let Some(s) = &self.solve {
            if s.omega.is_empty() {
                return cfg_err("solve.omega: at least one frequency is required");
            }
            for (i, w) in s.omega.iter().enumerate() {
                if !(*w > 0.0) {
                    return cfg_err(format!("solve.omega[{i}] must be positive"));
                }
            }
            if let Some(g) = &s.guesses {
                for (i, g) in g.iter().enumerate() {
                    check_guess(&format!("solve.guesses[{i}]"), *g)?;
                }
            }
        }
        if let Some(s) = &self.sweep {
            if let Some(g) = s.guess {
                check_guess("sweep.guess", g)?;
            }
        }
        if let Some(ix) = &self.index {
            let listed = ix.q.is_some();
            let ranged = ix.q_from.is_some() || ix.q_to.is_some() || ix.steps.is_some();
            if listed == ranged {
                return cfg_err("index: give either `q` or all of `q_from`, `q_to`, `steps`");
            }
            if ranged && (ix.q_from.is_none() || ix.q_to.is_none() || ix.steps.is_none()) {
                return cfg_err("index: `q_from`, `q_to` and `steps` go together");
            }
            for (i, q) in self.index_points().iter().enumerate() {
                check_guess(&format!("index.q[{i}]"), [q.re, q.im])?;
            }
        }
        if let Some(f) = &self.field {
            if let Some(q) = f.q {
                check_guess("field.q", q)?;
            }
            for (i, x) in f.x.values().iter().enumerate() {
                if *x == 0.0 || !x.is_finite() {
                    return cfg_err(format!("field.x[{i}]: offsets must be finite and nonzero (the edge is reported by edge limits)"));
                }
            }
        }
        if let Some(a) = &self.asymptote {
            for (i, v) in a.q_breve.iter().enumerate() {
                if !(*v > 0.0) {
                    return cfg_err(format!("asymptote.q_breve[{i}] must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn index_points(&self) -> Vec<Complex64> {
        let Some(ix) = &self.index else {
            return Vec::new();
        };
        if let Some(q) = &ix.q {
            return q.iter().map(|p| pair(*p)).collect();
        }
        match (ix.q_from, ix.q_to, ix.steps) {
            (Some(a), Some(b), Some(n)) => {
                let (a, b) = (pair(a), pair(b));
                match n {
                    0 => Vec::new(),
                    1 => vec![a],
                    n => (0..n)
                        .map(|j| a + (b - a) * (j as f64 / (n - 1) as f64))
                        .collect(),
                }
            }
            _ => Vec::new(),
        }
    }

    /// Nondimensional problem at frequency `omega` with an optional rotation override (units of pi).
    /// The wavenumber is a placeholder; callers set it with `with_q`.
    pub fn problem(
        &self,
        omega: f64,
        rotation_pi: Option<f64>,
    ) -> Result<(Problem, Vec<String>), ConfigError> {
        let (right, mut warnings) = self.build_sheet(&self.sheet, omega, rotation_pi)?;
        let q = Complex64::new(1.0, 0.0);
        let p = match &self.variant {
            VariantSpec::Single => Problem::single(right, q),
            VariantSpec::Interface { eps_r1, eps_r2 } => {
                Problem::interface(right, *eps_r1, *eps_r2, q)
            }
            VariantSpec::TwoSheet { left } => {
                let (l, w) = self.build_sheet(left, omega, None)?;
                warnings.extend(w);
                Problem::two_sheet(l, right, q)
            }
        }
        .map_err(|e| ConfigError(format!("problem: {e}")))?;
        Ok((p, warnings))
    }

    fn medium(&self, omega: f64) -> Result<AmbientMedium, ConfigError> {
        let (er, mr, w) = match &self.medium {
            Some(m) => (m.epsilon_r, m.mu_r, m.omega.unwrap_or(omega)),
            None => (1.0, 1.0, omega),
        };
        AmbientMedium::relative(er, mr, w).map_err(|e| ConfigError(format!("medium: {e}")))
    }

    fn build_sheet(
        &self,
        s: &SheetSpec,
        omega: f64,
        rotation_pi: Option<f64>,
    ) -> Result<(ConductivityTensor, Vec<String>), ConfigError> {
        let mut warnings = Vec::new();
        let tensor = match (&s.tensor, &s.model) {
            (Some(t), None) => {
                let units = match s.units {
                    UnitsSpec::Nondimensional => Units::Nondimensional,
                    UnitsSpec::Siemens => Units::Siemens,
                };
                let raw =
                    ConductivityTensor::new(pair(t.xx), pair(t.xy), pair(t.yx), pair(t.yy), units);
                if units == Units::Siemens {
                    let medium = self.medium(omega)?;
                    if self.medium.as_ref().and_then(|m| m.omega).is_none() {
                        warnings.push(format!(
                            "medium.omega not given; using the command frequency {omega} rad/s"
                        ));
                    }
                    warnings.extend(validity_check(&raw, &medium).warnings);
                    nondimensionalize(&raw, &medium)
                        .map_err(|e| ConfigError(format!("sheet: {e}")))?
                } else {
                    raw
                }
            }
            (
                None,
                Some(ModelSpec::Hydrodynamic {
                    beta,
                    omega_over_omega_c,
                }),
            ) => magneto_hydrodynamic_nondim(*beta, *omega_over_omega_c),
            (
                None,
                Some(ModelSpec::HydrodynamicSi {
                    n0,
                    b0,
                    tau,
                    charge,
                    mass,
                }),
            ) => {
                let params = HydrodynamicParams {
                    omega,
                    n0: *n0,
                    b0: *b0,
                    charge: *charge,
                    mass: *mass,
                    tau: *tau,
                };
                let (t, w) = magneto_hydrodynamic(&params)
                    .map_err(|e| ConfigError(format!("sheet.model: {e}")))?;
                warnings.extend(w);
                let medium = self.medium(omega)?;
                nondimensionalize(&t, &medium)
                    .map_err(|e| ConfigError(format!("sheet.model: {e}")))?
            }
            (
                None,
                Some(ModelSpec::Drude {
                    weight_x,
                    weight_y,
                    gamma,
                }),
            ) => drude(omega, *weight_x, *weight_y, *gamma, Units::Nondimensional),
            _ => return cfg_err("sheet: exactly one of `tensor` or `model` is required"),
        };
        let angle = rotation_pi.unwrap_or(s.rotation_pi);
        let tensor = if angle != 0.0 {
            rotate(&tensor, angle * std::f64::consts::PI)
        } else {
            tensor
        };
        warnings.extend(validity_nondim(&tensor).warnings);
        Ok((tensor, warnings))
    }
}
