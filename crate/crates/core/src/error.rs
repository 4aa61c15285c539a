use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EppError {
    #[error("branch point: xi^2 + q^2 = 0 at xi = {0}")]
    BranchPoint(Complex64),
    #[error("sg(q) undefined; supply q with nonzero real part (got {0})")]
    ZeroRealQ(Complex64),
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("cyclotron frequency vanishes; model undefined")]
    ZeroCyclotron,
    #[error("degenerate quadratic; formulation requires sigma_xx != 0")]
    DegenerateQuadratic,
    #[error("double root: discriminant root D vanishes, splitting singular")]
    DoubleRoot,
    #[error("symbol vanishes on contour; index undefined (min |P| = {min_modulus:e} near xi = {location})")]
    SymbolVanishes { min_modulus: f64, location: f64 },
    #[error("pole of the left symbol at xi = {0}")]
    LeftPole(Complex64),
    #[error("nonzero index nu_K = {0}; dispersion relation not defined here")]
    NonzeroIndex(i32),
    #[error("phase loop does not close (mismatch {0:e} rad)")]
    PhaseLoopOpen(f64),
    #[error("evaluation point {0} lies on the real axis; use the boundary-value variant")]
    OnRealAxis(Complex64),
    #[error("wrong half plane for the requested split function at {0}")]
    WrongHalfPlane(Complex64),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("tensor units mismatch: {0}")]
    Units(String),
    #[error("no convergence after {iterations} iterations (last |residual| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("degenerate pole: {0}")]
    DegeneratePole(String),
    #[error("singular integrand on the integration ray: {0}")]
    SingularRay(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, EppError>;
