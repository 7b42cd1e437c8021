//! Spectrum and fine spectrum of the period-2 lower-triangular triple-band
//! operator `B(r1,r2; s1,s2; t1,t2)` acting on `l_p`, `1 <= p < inf`.
//!
//! ```text
//!   r1  0   0   0   0  ...
//!   s1  r2  0   0   0  ...
//!   t1  s2  r1  0   0  ...
//!   0   t2  s1  r2  0  ...
//!   0   0   t1  s2  r1 ...
//! ```
//!
//! The crate is split along the lines of the computation:
//!
//! * [`operator`]: parameters, entries, finite sections, norm bounds.
//! * [`spectrum`]: the closed-form spectral set and its fine, Goldberg and
//!   subdivision classification at a point.
//! * [`recurrence`]: the inverse-column recurrences, their companion systems
//!   and closed forms, and eigenvectors of the adjoint.
//! * [`verify`]: finite-section oracles that check the closed forms
//!   independently.
//! * [`region`]: rasterized scans of the complex plane and their encodings.

pub mod error;
pub mod operator;
pub mod parse;
pub mod presets;
pub mod recurrence;
pub mod region;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operator::{
    apply, norm_bounds_lp, truncate, NormBounds, OperatorParams, SpaceIndex, TruncatedOperator,
};
pub use presets::Preset;
pub use spectrum::{
    char_roots, chi, fine_classify, goldberg_classify, in_spectrum, membership_ratio,
    principal_sqrt, subdivision_flags, CharRoots, FinePart, GoldbergLabel, GoldbergState,
    SpectralClassification, TriState,
};

/// Default half-width of the band around `ratio = 1` treated as the boundary.
pub const DEFAULT_TOL: f64 = 1e-9;
