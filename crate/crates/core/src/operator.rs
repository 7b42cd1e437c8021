//! Operator parameters, entries, finite sections and norm bounds.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The six band constants of `B(r1,r2; s1,s2; t1,t2)`.
///
/// `s1`, `s2` are stored in normalized form, i.e. `sqrt(s^2) = s` under the
/// principal branch. When the supplied values needed negating, `s_flipped`
/// records it. Conjugating by `diag(1,-1,1,-1,...)` negates exactly the
/// s-band, so every spectral set is unchanged by the flip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorParams {
    pub r1: Complex64,
    pub r2: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
    pub t1: Complex64,
    pub t2: Complex64,
    pub s_flipped: bool,
}

/// `sqrt(s^2) = s` under the principal branch, decided from the half plane
/// rather than by recomputing the root, which rounding can perturb.
pub fn on_principal_branch(s: Complex64) -> bool {
    s.re > 0.0 || (s.re == 0.0 && s.im >= 0.0)
}

fn check_finite(z: Complex64, name: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

impl OperatorParams {
    /// Validates and normalizes a parameter set.
    pub fn new(
        r1: Complex64,
        r2: Complex64,
        s1: Complex64,
        s2: Complex64,
        t1: Complex64,
        t2: Complex64,
    ) -> Result<Self> {
        for (z, name) in [
            (r1, "r1"),
            (r2, "r2"),
            (s1, "s1"),
            (s2, "s2"),
            (t1, "t1"),
            (t2, "t2"),
        ] {
            check_finite(z, name)?;
        }
        if s1 == ZERO {
            return Err(Error::ZeroS("s1"));
        }
        if s2 == ZERO {
            return Err(Error::ZeroS("s2"));
        }
        if (t1 == ZERO) != (t2 == ZERO) {
            return Err(Error::MismatchedT);
        }
        let ok1 = on_principal_branch(s1);
        let ok2 = on_principal_branch(s2);
        let (s1, s2, s_flipped) = match (ok1, ok2) {
            (true, true) => (s1, s2, false),
            (false, false) => (-s1, -s2, true),
            (false, true) => return Err(Error::SingleBranchFlip("s1")),
            (true, false) => return Err(Error::SingleBranchFlip("s2")),
        };
        Ok(Self {
            r1,
            r2,
            s1,
            s2,
            t1,
            t2,
            s_flipped,
        })
    }

    /// Convenience constructor from `(re, im)` pairs.
    pub fn from_parts(v: [(f64, f64); 6]) -> Result<Self> {
        let c = |i: usize| Complex64::new(v[i].0, v[i].1);
        Self::new(c(0), c(1), c(2), c(3), c(4), c(5))
    }

    /// True when the t-band is present (both t-values non-zero).
    pub fn has_t(&self) -> bool {
        self.t1 != ZERO
    }

    pub fn is_diagonal_value(&self, lambda: Complex64) -> bool {
        lambda == self.r1 || lambda == self.r2
    }

    /// The s-values as originally supplied.
    pub fn supplied_s(&self) -> (Complex64, Complex64) {
        if self.s_flipped {
            (-self.s1, -self.s2)
        } else {
            (self.s1, self.s2)
        }
    }

    /// Entry `(row, col)` (1-based) of the operator as supplied.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let (s1, s2) = self.supplied_s();
        band_entry(self.r1, self.r2, s1, s2, self.t1, self.t2, row, col)
    }

    /// Entry `(row, col)` of the normalized operator, the one all spectral
    /// computations work with.
    pub fn normalized_entry(&self, row: usize, col: usize) -> Complex64 {
        band_entry(
            self.r1, self.r2, self.s1, self.s2, self.t1, self.t2, row, col,
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn band_entry(
    r1: Complex64,
    r2: Complex64,
    s1: Complex64,
    s2: Complex64,
    t1: Complex64,
    t2: Complex64,
    row: usize,
    col: usize,
) -> Complex64 {
    if row == 0 || col == 0 || col > row {
        return ZERO;
    }
    let odd = row % 2 == 1;
    match row - col {
        0 => {
            if odd {
                r1
            } else {
                r2
            }
        }
        1 => {
            if odd {
                s2
            } else {
                s1
            }
        }
        2 => {
            if odd {
                t1
            } else {
                t2
            }
        }
        _ => ZERO,
    }
}

/// `l_p` exponent with its conjugate. `q` is infinite when `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceIndex {
    pub p: f64,
    pub q: f64,
}

impl SpaceIndex {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let q = if p == 1.0 {
            f64::INFINITY
        } else {
            p / (p - 1.0)
        };
        Ok(Self { p, q })
    }

    pub fn l1() -> Self {
        Self {
            p: 1.0,
            q: f64::INFINITY,
        }
    }

    pub fn is_l1(&self) -> bool {
        self.p == 1.0
    }
}

/// Leading `n x n` section stored by bands. `diag[i]` is entry `(i+1, i+1)`,
/// `sub[i]` is `(i+2, i+1)` and `subsub[i]` is `(i+3, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    n: usize,
    diag: Vec<Complex64>,
    sub: Vec<Complex64>,
    subsub: Vec<Complex64>,
}

impl TruncatedOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based entry access; zero outside the three bands.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        if row == 0 || col == 0 || row > self.n || col > self.n || col > row {
            return ZERO;
        }
        match row - col {
            0 => self.diag[col - 1],
            1 => self.sub[col - 1],
            2 => self.subsub[col - 1],
            _ => ZERO,
        }
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn sub(&self) -> &[Complex64] {
        &self.sub
    }

    pub fn subsub(&self) -> &[Complex64] {
        &self.subsub
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Largest column sum of moduli.
    pub fn max_column_l1(&self) -> f64 {
        (0..self.n)
            .map(|j| {
                let mut s = self.diag[j].norm();
                if j < self.sub.len() {
                    s += self.sub[j].norm();
                }
                if j < self.subsub.len() {
                    s += self.subsub[j].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// Leading `n x n` section of the operator as supplied.
pub fn truncate(params: &OperatorParams, n: usize) -> TruncatedOperator {
    let diag = (1..=n).map(|i| params.entry(i, i)).collect();
    let sub = (1..n).map(|j| params.entry(j + 1, j)).collect();
    let subsub = (1..n.saturating_sub(1))
        .map(|j| params.entry(j + 2, j))
        .collect();
    TruncatedOperator {
        n,
        diag,
        sub,
        subsub,
    }
}

/// `B x` for a finitely supported `x`. The result has `x.len() + 2` entries,
/// the last two coming from the bands hanging below the support. An empty
/// input gives an empty output.
pub fn apply(params: &OperatorParams, x: &[Complex64]) -> Vec<Complex64> {
    if x.is_empty() {
        return Vec::new();
    }
    let n = x.len();
    // x_{-1} = x_0 = 0
    let at = |k: isize| -> Complex64 {
        if k < 1 || k as usize > n {
            ZERO
        } else {
            x[k as usize - 1]
        }
    };
    (1..=n + 2)
        .map(|i| {
            let i = i as isize;
            (i - 2..=i)
                .map(|k| {
                    if k < 1 {
                        ZERO
                    } else {
                        params.entry(i as usize, k as usize) * at(k)
                    }
                })
                .sum()
        })
        .collect()
}

/// `l_p` norm of a complex vector.
pub fn lp_norm(x: &[Complex64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|z| z.norm()).sum()
    } else if p == 2.0 {
        x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        x.iter()
            .map(|z| z.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    /// Only known in closed form on `l_1`.
    pub exact: Option<f64>,
}

/// Bracket for `||B||` on `l_p`, exact on `l_1`.
pub fn norm_bounds_lp(params: &OperatorParams, space: SpaceIndex) -> NormBounds {
    let p = space.p;
    let col = |r: Complex64, s: Complex64, t: Complex64| lp_norm(&[r, s, t], p);
    let lower = col(params.r1, params.s1, params.t1).max(col(params.r2, params.s2, params.t2));
    let upper = params.r1.norm().max(params.r2.norm())
        + params.s1.norm().max(params.s2.norm())
        + params.t1.norm().max(params.t2.norm());
    let exact = space.is_l1().then(|| {
        (params.r1.norm() + params.s1.norm() + params.t1.norm())
            .max(params.r2.norm() + params.s2.norm() + params.t2.norm())
    });
    NormBounds {
        lower,
        upper,
        exact,
    }
}
