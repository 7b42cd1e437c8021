//! Closed-form spectral set and pointwise classification.
//!
//! Everything here hinges on the quadratic
//!
//! ```text
//! f(a) = a^2 + (t1/(r1-l) + t2/(r2-l) - s1 s2/((r1-l)(r2-l))) a + t1 t2/((r1-l)(r2-l))
//! ```
//!
//! whose roots drive the two-term recurrences of the inverse columns. `l` lies
//! in the spectrum exactly when `l` is a diagonal value or the larger root has
//! modulus at least one. The membership ratio is the reciprocal of that modulus.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{OperatorParams, SpaceIndex};

/// Square root with non-negative real part; on the imaginary axis the root
/// with non-negative imaginary part is chosen.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let mut w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        w = -w;
    }
    // normalize signed zeros so that equality tests behave
    Complex64::new(w.re + 0.0, w.im + 0.0)
}

/// `s1 s2 - t1 (r2 - l) - t2 (r1 - l)`, the numerator shared by both roots.
pub(crate) fn root_numerator(params: &OperatorParams, lambda: Complex64) -> Complex64 {
    params.s1 * params.s2 - params.t1 * (params.r2 - lambda) - params.t2 * (params.r1 - lambda)
}

/// Discriminant `chi(l)` of the characteristic quadratic (scaled by
/// `4 (r1-l)^2 (r2-l)^2`).
pub fn chi(params: &OperatorParams, lambda: Complex64) -> Complex64 {
    let (s1, s2, t1, t2) = (params.s1, params.s2, params.t1, params.t2);
    let a = params.r1 - lambda;
    let b = params.r2 - lambda;
    let ss = s1 * s2;
    t1 * t1 * b * b + t2 * t2 * a * a + ss * ss
        - 2.0 * t1 * t2 * a * b
        - 2.0 * ss * t1 * b
        - 2.0 * ss * t2 * a
}

/// Roots of the characteristic quadratic at a fixed `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharRoots {
    /// Root of larger modulus. Ties keep the `+sqrt(chi)` root.
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub chi: Complex64,
    pub sqrt_chi: Complex64,
    /// Repeated root: the companion matrix is a Jordan block.
    pub discriminant_zero: bool,
    /// Whether `alpha1` is the `+sqrt(chi)` root. This fails for some
    /// parameter sets, e.g. `s1 = s2 = i`, `t = 0`.
    pub plus_branch_dominant: bool,
}

impl CharRoots {
    /// Roots of the reciprocal quadratic, `1/alpha1` and `1/alpha2`.
    /// Only meaningful when `t1 t2 != 0`.
    pub fn betas(&self) -> (Complex64, Complex64) {
        (self.alpha1.inv(), self.alpha2.inv())
    }
}

/// Scale-aware test for `chi = 0`.
pub(crate) fn chi_is_zero(params: &OperatorParams, lambda: Complex64, chi: Complex64) -> bool {
    let scale = 1.0
        + (params.s1 * params.s2).norm_sqr()
        + (params.t1 * (params.r2 - lambda)).norm_sqr()
        + (params.t2 * (params.r1 - lambda)).norm_sqr();
    chi.norm() <= 1e-12 * scale
}

pub fn char_roots(params: &OperatorParams, lambda: Complex64) -> Result<CharRoots> {
    if params.is_diagonal_value(lambda) {
        return Err(Error::DegenerateLambda);
    }
    let p = (params.r1 - lambda) * (params.r2 - lambda);
    let d = root_numerator(params, lambda);
    let chi = chi(params, lambda);
    let sqrt_chi = principal_sqrt(chi);
    if chi_is_zero(params, lambda, chi) {
        let a = d / (2.0 * p);
        return Ok(CharRoots {
            alpha1: a,
            alpha2: a,
            chi,
            sqrt_chi,
            discriminant_zero: true,
            plus_branch_dominant: true,
        });
    }
    let plus = d + sqrt_chi;
    let minus = d - sqrt_chi;
    let plus_branch_dominant = plus.norm() >= minus.norm();
    let dom = if plus_branch_dominant { plus } else { minus };
    // small root from the product, avoiding cancellation in d - sqrt(chi)
    let alpha1 = dom / (2.0 * p);
    let alpha2 = 2.0 * params.t1 * params.t2 / dom;
    Ok(CharRoots {
        alpha1,
        alpha2,
        chi,
        sqrt_chi,
        discriminant_zero: false,
        plus_branch_dominant,
    })
}

/// Reciprocal of the dominant root modulus, `|2 (r1-l)(r2-l)| / max|D +- sqrt(chi)|`.
///
/// Zero at `l in {r1, r2}`, infinite if both `D +- sqrt(chi)` vanish. The
/// spectrum is `{ratio <= 1}` for every `1 <= p < inf`.
pub fn membership_ratio(params: &OperatorParams, lambda: Complex64) -> f64 {
    if params.is_diagonal_value(lambda) {
        return 0.0;
    }
    let num = (2.0 * (params.r1 - lambda) * (params.r2 - lambda)).norm();
    let d = root_numerator(params, lambda);
    let sq = principal_sqrt(chi(params, lambda));
    let den = (d + sq).norm().max((d - sq).norm());
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// The quotient `|2 (r1-l)(r2-l) / (D + sqrt(chi))|` taken literally with the
/// `+` branch. Agrees with [`membership_ratio`] whenever that branch gives
/// the larger root.
pub fn plus_branch_quotient(params: &OperatorParams, lambda: Complex64) -> f64 {
    if params.is_diagonal_value(lambda) {
        return 0.0;
    }
    let num = (2.0 * (params.r1 - lambda) * (params.r2 - lambda)).norm();
    let den = (root_numerator(params, lambda) + principal_sqrt(chi(params, lambda))).norm();
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Exact membership test, `ratio <= 1`. The set does not depend on `p`.
pub fn in_spectrum(params: &OperatorParams, _space: SpaceIndex, lambda: Complex64) -> bool {
    membership_ratio(params, lambda) <= 1.0
}

/// Point spectrum of the adjoint on the dual space: the open set on `l_p`,
/// `p > 1`, and the whole spectrum on `l_1`.
pub fn adjoint_point_spectrum_contains(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
) -> bool {
    let ratio = membership_ratio(params, lambda);
    if space.is_l1() {
        ratio <= 1.0
    } else {
        ratio < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FinePart {
    Resolvent,
    Residual,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TriState {
    Yes,
    No,
    UnknownPerPaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GoldbergLabel {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
}

/// Goldberg state of `B - l I`. Diagonal values are only known to be in
/// `C1` or `C2`, and that ambiguity is reported rather than resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldbergState {
    Resolved(GoldbergLabel),
    Unresolved(Vec<GoldbergLabel>),
}

impl fmt::Display for GoldbergState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoldbergState::Resolved(l) => write!(f, "{l:?}"),
            GoldbergState::Unresolved(c) => {
                let names: Vec<String> = c.iter().map(|l| format!("{l:?}")).collect();
                write!(f, "Unresolved({})", names.join(","))
            }
        }
    }
}

impl Serialize for GoldbergState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaJson {
    pub re: f64,
    pub im: f64,
}

/// Full verdict at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralClassification {
    pub lambda: LambdaJson,
    /// Infinite ratios serialize as `null`.
    pub ratio: f64,
    /// Banded verdict, `ratio <= 1 + tol`.
    pub in_spectrum: bool,
    pub fine: FinePart,
    pub goldberg: GoldbergState,
    #[serde(rename = "ap")]
    pub in_ap: TriState,
    #[serde(rename = "delta")]
    pub in_delta: TriState,
    #[serde(rename = "co")]
    pub in_co: TriState,
    #[serde(rename = "boundary")]
    pub boundary_flag: bool,
    pub p: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Zone {
    Outside,
    Boundary,
    Inside,
}

fn zone(ratio: f64, tol: f64) -> Zone {
    debug_assert!(tol > 0.0, "tolerance must be positive");
    if ratio > 1.0 + tol {
        Zone::Outside
    } else if ratio < 1.0 - tol {
        Zone::Inside
    } else {
        Zone::Boundary
    }
}

fn goldberg_at(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    zone: Zone,
) -> GoldbergState {
    use GoldbergLabel::*;
    if zone == Zone::Outside {
        // bounded inverse defined on all of l_p
        return GoldbergState::Resolved(A1);
    }
    if params.is_diagonal_value(lambda) {
        return GoldbergState::Unresolved(vec![C1, C2]);
    }
    match (space.is_l1(), zone) {
        (false, Zone::Boundary) => GoldbergState::Resolved(B2),
        _ => GoldbergState::Resolved(C2),
    }
}

fn flags_at(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    zone: Zone,
) -> (TriState, TriState, TriState) {
    let yes_no = |b: bool| if b { TriState::Yes } else { TriState::No };
    let in_set = zone != Zone::Outside;
    let ap = if !in_set {
        TriState::No
    } else if params.is_diagonal_value(lambda) {
        TriState::UnknownPerPaper
    } else {
        TriState::Yes
    };
    let delta = yes_no(in_set);
    let co = if space.is_l1() {
        yes_no(in_set)
    } else {
        yes_no(zone == Zone::Inside)
    };
    (ap, delta, co)
}

pub fn goldberg_classify(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    tol: f64,
) -> GoldbergState {
    goldberg_at(
        params,
        space,
        lambda,
        zone(membership_ratio(params, lambda), tol),
    )
}

/// `(in_ap, in_delta, in_co)`.
pub fn subdivision_flags(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    tol: f64,
) -> (TriState, TriState, TriState) {
    flags_at(
        params,
        space,
        lambda,
        zone(membership_ratio(params, lambda), tol),
    )
}

/// Classifies `l` with a boundary band of half-width `tol` around `ratio = 1`.
///
/// On `l_p`, `p > 1`, the band is the continuous spectrum. On `l_1` the
/// continuous spectrum is empty and the band belongs to the residual part.
pub fn fine_classify(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    tol: f64,
) -> SpectralClassification {
    let ratio = membership_ratio(params, lambda);
    let z = zone(ratio, tol);
    let fine = match z {
        Zone::Outside => FinePart::Resolvent,
        Zone::Inside => FinePart::Residual,
        Zone::Boundary if space.is_l1() => FinePart::Residual,
        Zone::Boundary => FinePart::Continuous,
    };
    let (in_ap, in_delta, in_co) = flags_at(params, space, lambda, z);
    SpectralClassification {
        lambda: LambdaJson {
            re: lambda.re,
            im: lambda.im,
        },
        ratio,
        in_spectrum: z != Zone::Outside,
        fine,
        goldberg: goldberg_at(params, space, lambda, z),
        in_ap,
        in_delta,
        in_co,
        boundary_flag: z == Zone::Boundary,
        p: space.p,
        tol,
    }
}
