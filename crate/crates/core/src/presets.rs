//! Named parameter sets: the two worked examples and the classical operators
//! that arise as special cases.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::OperatorParams;
use crate::parse::{format_complex, parse_complex_list};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `(1, i, 2, 1, -i, 1)`
    PaperEx1,
    /// `(i, 2, 1+i, 1, 0, 0)`
    PaperEx2,
    /// `B(r,s)`: constant diagonal and sub-diagonal, no t-band.
    Brs(Complex64, Complex64),
    /// `B(r,s,t)`: constant bands.
    Brst(Complex64, Complex64, Complex64),
    /// Forward difference operator: `r = 1`, `s = -1`.
    Delta,
    /// Zweier matrix `Z^s`: `r = s`, sub-diagonal `1 - s`, `s` real, `s != 0, 1`.
    Zweier(f64),
}

impl Preset {
    pub fn params(&self) -> Result<OperatorParams> {
        match *self {
            Preset::PaperEx1 => OperatorParams::new(ONE, I, 2.0 * ONE, ONE, -I, ONE),
            Preset::PaperEx2 => OperatorParams::new(I, 2.0 * ONE, ONE + I, ONE, ZERO, ZERO),
            Preset::Brs(r, s) => OperatorParams::new(r, r, s, s, ZERO, ZERO),
            Preset::Brst(r, s, t) => OperatorParams::new(r, r, s, s, t, t),
            Preset::Delta => OperatorParams::new(ONE, ONE, -ONE, -ONE, ZERO, ZERO),
            Preset::Zweier(s) => {
                if !s.is_finite() || s == 0.0 || s == 1.0 {
                    return Err(Error::Parse(format!(
                        "zweier parameter must be real and not 0 or 1, got {s}"
                    )));
                }
                let r = Complex64::new(s, 0.0);
                OperatorParams::new(r, r, ONE - r, ONE - r, ZERO, ZERO)
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::PaperEx1 => write!(f, "paper-ex1"),
            Preset::PaperEx2 => write!(f, "paper-ex2"),
            Preset::Brs(r, s) => write!(f, "brs({},{})", format_complex(*r), format_complex(*s)),
            Preset::Brst(r, s, t) => {
                write!(
                    f,
                    "brst({},{},{})",
                    format_complex(*r),
                    format_complex(*s),
                    format_complex(*t)
                )
            }
            Preset::Delta => write!(f, "delta"),
            Preset::Zweier(s) => write!(f, "zweier({s})"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| {
                    Error::Parse(format!("unbalanced parentheses in preset '{text}'"))
                })?;
                (name.trim(), Some(parse_complex_list(inner)?))
            }
            None => (text, None),
        };
        let arity = |n: usize| -> Result<Vec<Complex64>> {
            match &args {
                Some(v) if v.len() == n => Ok(v.clone()),
                _ => Err(Error::Parse(format!(
                    "preset '{name}' takes {n} argument(s)"
                ))),
            }
        };
        match name {
            "paper-ex1" if args.is_none() => Ok(Preset::PaperEx1),
            "paper-ex2" if args.is_none() => Ok(Preset::PaperEx2),
            "delta" if args.is_none() => Ok(Preset::Delta),
            "brs" => {
                let v = arity(2)?;
                Ok(Preset::Brs(v[0], v[1]))
            }
            "brst" => {
                let v = arity(3)?;
                Ok(Preset::Brst(v[0], v[1], v[2]))
            }
            "zweier" => {
                let v = arity(1)?;
                if v[0].im != 0.0 {
                    return Err(Error::Parse("zweier parameter must be real".into()));
                }
                Ok(Preset::Zweier(v[0].re))
            }
            _ => Err(Error::Parse(format!("unknown preset '{text}'"))),
        }
    }
}
