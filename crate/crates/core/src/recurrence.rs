//! Inverse-column recurrences, their companion systems and closed-form
//! solutions, and eigenvectors of the adjoint.
//!
//! For `l` off the diagonal values the inverse of `B - l I` is lower
//! triangular with odd columns `(a_1, a_2, ...)` and even columns
//! `(b_1, b_2, ...)`, each shifted down by two per column. Both sequences obey
//! a two-term recurrence in the pairs `x_k = (a_{2k-1}, a_{2k})`:
//!
//! ```text
//! t1 a_{2k-1} + s2 a_{2k}   + (r1 - l) a_{2k+1} = 0
//! t2 a_{2k}   + s1 a_{2k+1} + (r2 - l) a_{2k+2} = 0
//! ```
//!
//! and the `b`-analogue with the roles of the indices swapped.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{OperatorParams, SpaceIndex};
use crate::spectrum::{adjoint_point_spectrum_contains, char_roots, CharRoots};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub type Pair = (Complex64, Complex64);

/// Which inverse column: `A` is the odd-column sequence `(a_k)`, `B` the
/// even-column sequence `(b_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Column {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompanionKind {
    /// Advances `(a_{2k-1}, a_{2k})`.
    A1,
    /// Advances `(b_{2k-1}, b_{2k})`.
    A2,
    /// Advances adjoint eigenvector pairs.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompanionMatrix {
    pub m: [[Complex64; 2]; 2],
    pub kind: CompanionKind,
}

impl CompanionMatrix {
    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: Pair) -> Pair {
        (
            self.m[0][0] * v.0 + self.m[0][1] * v.1,
            self.m[1][0] * v.0 + self.m[1][1] * v.1,
        )
    }

    /// Eigenvector for eigenvalue `alpha`, scaled to first component one.
    /// Falls back to unit norm with the largest component real-positive when
    /// the first component has to vanish.
    pub fn eigenvector(&self, alpha: Complex64) -> Pair {
        let [[a, b], [c, d]] = self.m;
        if b != ZERO {
            return (ONE, (alpha - a) / b);
        }
        // upper-right zero: either (alpha - d, c) or e_2 spans the kernel
        let v = if (alpha - a).norm() > 1e-14 * (1.0 + a.norm()) {
            (ZERO, ONE)
        } else if c != ZERO {
            (alpha - d, c)
        } else {
            (ONE, ZERO)
        };
        normalize_phase(v)
    }
}

fn normalize_phase(v: Pair) -> Pair {
    let n = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
    let big = if v.0.norm() >= v.1.norm() { v.0 } else { v.1 };
    let phase = big.conj() / big.norm();
    (v.0 * phase / n, v.1 * phase / n)
}

fn check_offdiag(params: &OperatorParams, lambda: Complex64) -> Result<()> {
    if params.is_diagonal_value(lambda) {
        Err(Error::DegenerateLambda)
    } else {
        Ok(())
    }
}

pub fn companion(
    params: &OperatorParams,
    lambda: Complex64,
    kind: CompanionKind,
) -> Result<CompanionMatrix> {
    check_offdiag(params, lambda)?;
    let (s1, s2, t1, t2) = (params.s1, params.s2, params.t1, params.t2);
    let a = params.r1 - lambda;
    let b = params.r2 - lambda;
    let m = match kind {
        CompanionKind::A1 => [
            [-t1 / a, -s2 / a],
            [s1 * t1 / (a * b), -t2 / b + s1 * s2 / (a * b)],
        ],
        CompanionKind::A2 => [
            [-t2 / b, -s1 / b],
            [s2 * t2 / (a * b), -t1 / a + s1 * s2 / (a * b)],
        ],
        CompanionKind::C => {
            if !params.has_t() {
                return Err(Error::ZeroT);
            }
            [
                [-a / t1, -s1 / t1],
                [s2 * a / (t1 * t2), -b / t2 + s1 * s2 / (t1 * t2)],
            ]
        }
    };
    Ok(CompanionMatrix { m, kind })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Origin {
    InverseA,
    InverseB,
    Adjoint,
}

/// Paired sequence `x_k = (y_{2k-1}, y_{2k})`, `k = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSequence {
    pub pairs: Vec<Pair>,
    pub origin: Origin,
}

impl PairSequence {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(y_1, y_2, y_3, ...)`.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn pair_norms(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| pair_norm(*p)).collect()
    }
}

pub(crate) fn pair_norm(p: Pair) -> f64 {
    p.0.norm().hypot(p.1.norm())
}

fn initial_pair(params: &OperatorParams, lambda: Complex64, col: Column) -> Pair {
    let a = params.r1 - lambda;
    let b = params.r2 - lambda;
    match col {
        Column::A => (a.inv(), -params.s1 / (a * b)),
        Column::B => (b.inv(), -params.s2 / (a * b)),
    }
}

/// One step of the raw scalar recurrence for the chosen column.
fn step(params: &OperatorParams, lambda: Complex64, col: Column, x: Pair) -> Pair {
    let a = params.r1 - lambda;
    let b = params.r2 - lambda;
    match col {
        Column::A => {
            let odd = -(params.t1 * x.0 + params.s2 * x.1) / a;
            let even = -(params.t2 * x.1 + params.s1 * odd) / b;
            (odd, even)
        }
        Column::B => {
            let odd = -(params.t2 * x.0 + params.s1 * x.1) / b;
            let even = -(params.t1 * x.1 + params.s2 * odd) / a;
            (odd, even)
        }
    }
}

/// First `count` pairs of an inverse column, by forward recurrence.
pub fn inverse_columns(
    params: &OperatorParams,
    lambda: Complex64,
    col: Column,
    count: usize,
) -> Result<PairSequence> {
    check_offdiag(params, lambda)?;
    let mut pairs = Vec::with_capacity(count);
    let mut x = initial_pair(params, lambda, col);
    for _ in 0..count {
        pairs.push(x);
        x = step(params, lambda, col, x);
    }
    let origin = match col {
        Column::A => Origin::InverseA,
        Column::B => Origin::InverseB,
    };
    Ok(PairSequence { pairs, origin })
}

/// Threshold above which the scaled recurrence renormalizes.
const RESCALE_AT: f64 = 1e150;

/// `ln |y_j|` for the first `n` entries of an inverse column. The recurrence
/// is renormalized whenever the pair norm exceeds `1e150`, with the scale
/// carried in the log domain, so strongly growing columns stay finite.
/// Zero entries give `-inf`.
pub fn inverse_column_log_moduli(
    params: &OperatorParams,
    lambda: Complex64,
    col: Column,
    n: usize,
) -> Result<Vec<f64>> {
    check_offdiag(params, lambda)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut x = initial_pair(params, lambda, col);
    let mut log_scale = 0.0;
    while out.len() < n {
        out.push(x.0.norm().ln() + log_scale);
        out.push(x.1.norm().ln() + log_scale);
        x = step(params, lambda, col, x);
        let nx = pair_norm(x);
        if nx > RESCALE_AT || (nx < 1.0 / RESCALE_AT && nx > 0.0) {
            x = (x.0 / nx, x.1 / nx);
            log_scale += nx.ln();
        }
    }
    out.truncate(n);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionMode {
    DistinctRoots,
    Jordan,
    TZeroDegenerate,
}

/// Closed form of an inverse-column sequence.
///
/// * `DistinctRoots`: `x_k = c1 v1 alpha1^k + c2 v2 alpha2^k`
/// * `TZeroDegenerate`: as above with `alpha2 = 0`, `c2 = 0`
/// * `Jordan`: `x_k = c1 v1 alpha^k + c2 (v1 k alpha^(k-1) + v2 alpha^k)`,
///   with `v1` the eigenvector and `v2` the generalized eigenvector
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceSolution {
    pub mode: SolutionMode,
    pub roots: CharRoots,
    pub v1: Pair,
    pub v2: Pair,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl RecurrenceSolution {
    /// `x_k` for `k >= 1`.
    pub fn pair(&self, k: usize) -> Pair {
        let k_i = k as i32;
        match self.mode {
            SolutionMode::DistinctRoots => {
                let w1 = self.c1 * self.roots.alpha1.powi(k_i);
                let w2 = self.c2 * self.roots.alpha2.powi(k_i);
                (
                    w1 * self.v1.0 + w2 * self.v2.0,
                    w1 * self.v1.1 + w2 * self.v2.1,
                )
            }
            SolutionMode::TZeroDegenerate => {
                let w1 = self.c1 * self.roots.alpha1.powi(k_i);
                (w1 * self.v1.0, w1 * self.v1.1)
            }
            SolutionMode::Jordan => {
                let a = self.roots.alpha1;
                let ak = a.powi(k_i);
                let kak1 = (k as f64) * a.powi(k_i - 1);
                let (h, u) = (self.v1, self.v2);
                (
                    self.c1 * h.0 * ak + self.c2 * (h.0 * kak1 + u.0 * ak),
                    self.c1 * h.1 * ak + self.c2 * (h.1 * kak1 + u.1 * ak),
                )
            }
        }
    }

    /// Sum of the magnitudes of the terms making up `x_k`; the natural scale
    /// for rounding error when the terms cancel.
    pub fn term_scale(&self, k: usize) -> f64 {
        let k_i = k as i32;
        let a1 = self.roots.alpha1.norm().powi(k_i);
        match self.mode {
            SolutionMode::DistinctRoots => {
                self.c1.norm() * a1 * pair_norm(self.v1)
                    + self.c2.norm() * self.roots.alpha2.norm().powi(k_i) * pair_norm(self.v2)
            }
            SolutionMode::TZeroDegenerate => self.c1.norm() * a1 * pair_norm(self.v1),
            SolutionMode::Jordan => {
                let kak1 = k as f64 * self.roots.alpha1.norm().powi(k_i - 1);
                (self.c1.norm() * a1 + self.c2.norm() * kak1) * pair_norm(self.v1)
                    + self.c2.norm() * a1 * pair_norm(self.v2)
            }
        }
    }
}

/// Generalized eigenvector `u` with `(M - alpha I) u = h`, taking the
/// minimal-norm solution (no component along `h`). For the rank-one nilpotent
/// `N = M - alpha I` this is `N^H h / ||N||_F^2`.
fn generalized_eigenvector(m: &CompanionMatrix, alpha: Complex64, h: Pair) -> Pair {
    let n = [
        [m.m[0][0] - alpha, m.m[0][1]],
        [m.m[1][0], m.m[1][1] - alpha],
    ];
    let fro: f64 = n.iter().flatten().map(|z| z.norm_sqr()).sum();
    (
        (n[0][0].conj() * h.0 + n[1][0].conj() * h.1) / fro,
        (n[0][1].conj() * h.0 + n[1][1].conj() * h.1) / fro,
    )
}

/// Solves `x = p * col1 + q * col2` for `(p, q)`.
fn solve2(col1: Pair, col2: Pair, x: Pair) -> (Complex64, Complex64) {
    let det = col1.0 * col2.1 - col2.0 * col1.1;
    (
        (x.0 * col2.1 - col2.0 * x.1) / det,
        (col1.0 * x.1 - x.0 * col1.1) / det,
    )
}

/// Closed-form solution of an inverse-column recurrence and its first `count`
/// pairs.
pub fn closed_form(
    params: &OperatorParams,
    lambda: Complex64,
    col: Column,
    count: usize,
) -> Result<(RecurrenceSolution, PairSequence)> {
    check_offdiag(params, lambda)?;
    let roots = char_roots(params, lambda)?;
    let kind = match col {
        Column::A => CompanionKind::A1,
        Column::B => CompanionKind::A2,
    };
    let m = companion(params, lambda, kind)?;
    let x1 = initial_pair(params, lambda, col);

    let sol = if !params.has_t() {
        let v1 = m.eigenvector(roots.alpha1);
        let other_r = match col {
            Column::A => params.r2,
            Column::B => params.r1,
        };
        RecurrenceSolution {
            mode: SolutionMode::TZeroDegenerate,
            roots,
            v1,
            v2: m.eigenvector(ZERO),
            c1: (other_r - lambda) / (params.s1 * params.s2),
            c2: ZERO,
        }
    } else if roots.discriminant_zero {
        let a = roots.alpha1;
        let h = m.eigenvector(a);
        let u = generalized_eigenvector(&m, a, h);
        // x_1 = c1 a h + c2 (h + a u)
        let (c1, c2) = solve2((a * h.0, a * h.1), (h.0 + a * u.0, h.1 + a * u.1), x1);
        RecurrenceSolution {
            mode: SolutionMode::Jordan,
            roots,
            v1: h,
            v2: u,
            c1,
            c2,
        }
    } else {
        let f = m.eigenvector(roots.alpha1);
        let g = m.eigenvector(roots.alpha2);
        let (w1, w2) = solve2(f, g, x1);
        RecurrenceSolution {
            mode: SolutionMode::DistinctRoots,
            roots,
            v1: f,
            v2: g,
            c1: w1 / roots.alpha1,
            c2: w2 / roots.alpha2,
        }
    };
    let origin = match col {
        Column::A => Origin::InverseA,
        Column::B => Origin::InverseB,
    };
    let pairs = (1..=count).map(|k| sol.pair(k)).collect();
    Ok((sol, PairSequence { pairs, origin }))
}

/// Growth rate `lim ||x_k||^(1/k)` estimated by a least-squares fit of
/// `ln ||x_k||` against `k` over the second half of the sequence.
pub fn decay_rate(seq: &PairSequence) -> Result<f64> {
    let n = seq.len();
    if n < 8 {
        return Err(Error::InvalidSize(format!(
            "decay rate needs at least 8 pairs, got {n}"
        )));
    }
    let pts: Vec<(f64, f64)> = seq.pairs[n / 2..]
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let norm = pair_norm(*p);
            (norm > 0.0 && norm.is_finite()).then(|| ((n / 2 + i + 1) as f64, norm.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::ZeroTail);
    }
    Ok(log_slope(&pts).exp())
}

/// Least-squares slope of `(x, y)` points.
pub(crate) fn log_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Eigenvector of the adjoint (transpose) for `l` in its point spectrum,
/// as `count` pairs with first entry one.
///
/// * `l = r1`: `(1, 0, 0, ...)`
/// * `l = r2`: `(1, -(r1 - r2)/s1, 0, ...)`
/// * `t = 0`: `x_{2k-1} = q^(k-1)`, `x_{2k} = -(r1 - l)/s1 q^(k-1)` with
///   `q = (r1 - l)(r2 - l)/(s1 s2)`
/// * otherwise `X_k = f beta^(k-1)`, `beta` the small eigenvalue of `C` and
///   `f` its eigenvector
pub fn adjoint_eigenvector(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    count: usize,
) -> Result<PairSequence> {
    if count < 2 {
        return Err(Error::InvalidSize(format!(
            "adjoint eigenvector needs at least 2 pairs, got {count}"
        )));
    }
    if !adjoint_point_spectrum_contains(params, space, lambda) {
        return Err(Error::NotAdjointEigenvalue);
    }
    let mut pairs = vec![(ZERO, ZERO); count];
    let a = params.r1 - lambda;
    if lambda == params.r1 {
        pairs[0] = (ONE, ZERO);
    } else if lambda == params.r2 {
        pairs[0] = (ONE, -(params.r1 - params.r2) / params.s1);
    } else if !params.has_t() {
        let q = a * (params.r2 - lambda) / (params.s1 * params.s2);
        let lead = -a / params.s1;
        let mut w = ONE;
        for p in pairs.iter_mut() {
            *p = (w, lead * w);
            w *= q;
        }
    } else {
        let beta = char_roots(params, lambda)?.alpha1.inv();
        let f = (ONE, -(beta * params.t1 + a) / params.s1);
        let mut w = ONE;
        for p in pairs.iter_mut() {
            *p = (w * f.0, w * f.1);
            w *= beta;
        }
    }
    Ok(PairSequence {
        pairs,
        origin: Origin::Adjoint,
    })
}

/// `max_i |((B^T - l I) x)_i| / ||x||_inf` over all rows but the last two,
/// which the finite vector cannot satisfy. Uses the normalized operator.
pub fn adjoint_residual(params: &OperatorParams, lambda: Complex64, x: &PairSequence) -> f64 {
    let v = x.flatten();
    let n = v.len();
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let at = |j: usize| if j <= n { v[j - 1] } else { ZERO };
    (1..=n.saturating_sub(2))
        .map(|i| {
            let row = params.normalized_entry(i, i) * at(i)
                + params.normalized_entry(i + 1, i) * at(i + 1)
                + params.normalized_entry(i + 2, i) * at(i + 2)
                - lambda * at(i);
            row.norm()
        })
        .fold(0.0, f64::max)
        / scale
}
