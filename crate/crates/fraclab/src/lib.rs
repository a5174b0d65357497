//! # fraclab
//!
//! A numerical laboratory for fractional powers `L^{-α/2}` of semigroup
//! generators on uniform grids, built around three ingredients:
//!
//! * **Semigroup backends** (`semigroup`): the heat semigroup as a Fourier
//!   multiplier, Schrödinger semigroups `e^{-t(-Δ+V)}` via Strang splitting,
//!   and 1-D divergence-form operators `-(a u')'` via dense symmetric
//!   eigendecomposition — together with kernel-matrix extraction and fits of
//!   the Gaussian upper bound `|P_t(x,y)| ≤ C t^{-n/2} e^{-A|x-y|²/t}`.
//! * **Fractional integrals** (`fracint`): `L^{-α/2}` by log-trapezoid
//!   quadrature of the subordination integral, the Riesz potential as a
//!   closed-form reference, kernel power-law bound fits, and the difference
//!   operator `(I - e^{-tL}) L^{-α/2}` with its kernel-decay fit.
//! * **Norm estimators** (`norms`): `L^p`, weak-`L^p`, Morrey norms and
//!   small-ball moduli, BMO/VMO oscillation estimators, and their
//!   semigroup-adapted variants built on the sharp maximal function.
//!
//! A deterministic, seeded function `corpus` feeds the `harness`, which runs
//! refinement-stability experiments for the boundedness and vanishing-
//! oscillation properties of `L^{-α/2}` and emits JSON/CSV reports. The
//! `fraclab` binary exposes everything on the command line.
//!
//! Grid data is real-valued on a uniform grid over a centered box, either
//! periodic (torus semantics) or compactly supported (zero-padded by a
//! declared factor before any convolution). See [`grid`] for the substrate
//! and the `MGF1` file format.

pub mod cli;
pub mod corpus;
pub mod fracint;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod semigroup;

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is unsupported (must be 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("points per axis {0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error("side length {0} must be positive and finite")]
    BadSideLength(f64),
    #[error("padding factor {0} invalid: compact-support grids need padding ≥ 2")]
    BadPadding(usize),
    #[error("non-finite sample value at node {index} (coords {coords:?})")]
    NonFiniteSample { index: usize, coords: Vec<f64> },
    #[error("value length {found} does not match grid ({expected} nodes)")]
    ValueLength { expected: usize, found: usize },
    #[error(
        "compact-support violation: |f| = {value:.3e} at {coords:?} exceeds \
         1e-12 × max|f| inside the outer band"
    )]
    SupportViolation { coords: Vec<f64>, value: f64 },
    #[error("operands live on different grids or supports")]
    SpecMismatch,
    #[error("radius {r} outside the valid range [{min}, {max}]")]
    RadiusOutOfRange { r: f64, min: f64, max: f64 },
    #[error("file does not start with the MGF1 magic")]
    BadMagic,
    #[error("MGF1 payload truncated or oversized: declared {expected} values, found {found}")]
    PayloadSize { expected: usize, found: usize },
    #[error("MGF1 support tag {0} unknown (0 = periodic, 1 = compact)")]
    BadSupportTag(u8),
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("potential has a negative entry: min V = {0:.3e}")]
    NegativePotential(f64),
    #[error("coefficient {value} at node {index} violates ellipticity bounds [{lower}, {upper}]")]
    EllipticityViolation {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("dense-matrix budget exceeded: {nodes} grid nodes > {budget}; use a smaller grid")]
    BudgetExceeded { nodes: usize, budget: usize },
    #[error("exponent alpha = {alpha} outside (0, {n})")]
    AlphaOutOfRange { alpha: f64, n: f64 },
    #[error("divergent configuration: {0}")]
    DivergentConfiguration(String),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("unknown corpus family `{0}`")]
    UnknownFamily(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
