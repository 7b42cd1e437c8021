//! Rasterized classification of a rectangle in the complex plane.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{OperatorParams, SpaceIndex};
use crate::spectrum::{fine_classify, FinePart};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidWindow(format!(
                "need re_min < re_max and im_min < im_max, got [{re_min},{re_max}]x[{im_min},{im_max}]"
            )));
        }
        if nx == 0 || ny == 0 || nx.saturating_mul(ny) > 100_000_000 {
            return Err(Error::InvalidWindow(format!(
                "resolution {nx}x{ny} outside 1..=1e8 cells"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Center of cell `(ix, iy)`; row `iy = 0` is the top (`im_max`) row.
    pub fn center(&self, ix: usize, iy: usize) -> Complex64 {
        let dx = (self.re_max - self.re_min) / self.nx as f64;
        let dy = (self.im_max - self.im_min) / self.ny as f64;
        Complex64::new(
            self.re_min + (ix as f64 + 0.5) * dx,
            self.im_max - (iy as f64 + 0.5) * dy,
        )
    }

    /// Cell centers in row-major order, top row first.
    pub fn centers(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.ny).flat_map(move |iy| (0..self.nx).map(move |ix| self.center(ix, iy)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellCode {
    #[serde(rename = "RESOLVENT")]
    Resolvent,
    #[serde(rename = "RESIDUAL")]
    Residual,
    #[serde(rename = "CONTINUOUS_BOUNDARY")]
    ContinuousBoundary,
    #[serde(rename = "UNRESOLVED_R1R2")]
    UnresolvedR1R2,
}

impl CellCode {
    pub fn gray(self) -> u8 {
        match self {
            CellCode::Resolvent => 255,
            CellCode::ContinuousBoundary => 128,
            CellCode::Residual => 64,
            CellCode::UnresolvedR1R2 => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CellCode::Resolvent => "RESOLVENT",
            CellCode::Residual => "RESIDUAL",
            CellCode::ContinuousBoundary => "CONTINUOUS_BOUNDARY",
            CellCode::UnresolvedR1R2 => "UNRESOLVED_R1R2",
        }
    }

    pub fn in_spectrum(self) -> bool {
        self != CellCode::Resolvent
    }
}

pub fn classify_cell(
    params: &OperatorParams,
    space: SpaceIndex,
    lambda: Complex64,
    tol: f64,
) -> (CellCode, f64) {
    let v = fine_classify(params, space, lambda, tol);
    let code = if params.is_diagonal_value(lambda) {
        CellCode::UnresolvedR1R2
    } else {
        match v.fine {
            FinePart::Resolvent => CellCode::Resolvent,
            FinePart::Residual => CellCode::Residual,
            FinePart::Continuous => CellCode::ContinuousBoundary,
        }
    };
    (code, v.ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    pub params: OperatorParams,
    pub p: f64,
    pub tol: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub window: Window,
    pub cells: Vec<CellCode>,
    pub ratios: Vec<f64>,
    pub meta: GridMeta,
}

impl RegionGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> CellCode {
        self.cells[iy * self.window.nx + ix]
    }

    /// Cell whose rectangle contains `lambda`, if any.
    pub fn locate(&self, lambda: Complex64) -> Option<(usize, usize)> {
        let w = &self.window;
        let fx = (lambda.re - w.re_min) / (w.re_max - w.re_min) * w.nx as f64;
        let fy = (w.im_max - lambda.im) / (w.im_max - w.im_min) * w.ny as f64;
        if fx < 0.0 || fy < 0.0 || fx >= w.nx as f64 || fy >= w.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }
}

/// Classifies every cell at its center. Cells are evaluated in parallel and
/// assembled in row-major order, so the output is deterministic.
pub fn scan_region(
    params: &OperatorParams,
    space: SpaceIndex,
    window: Window,
    tol: f64,
) -> RegionGrid {
    let (cells, ratios): (Vec<_>, Vec<_>) = (0..window.len())
        .into_par_iter()
        .map(|idx| {
            classify_cell(
                params,
                space,
                window.center(idx % window.nx, idx / window.nx),
                tol,
            )
        })
        .unzip();
    RegionGrid {
        window,
        cells,
        ratios,
        meta: GridMeta {
            params: *params,
            p: space.p,
            tol,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pgm" => Ok(Format::Pgm),
            _ => Err(Error::Parse(format!(
                "unknown format '{s}', expected csv, json or pgm"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pgm => "pgm",
        })
    }
}

#[derive(Serialize)]
struct JsonGrid<'a> {
    meta: JsonMeta<'a>,
    codes: Vec<&'static str>,
}

#[derive(Serialize)]
struct JsonMeta<'a> {
    #[serde(flatten)]
    meta: &'a GridMeta,
    window: &'a Window,
    order: &'static str,
}

/// Encodes a grid.
///
/// * `csv`: header `re,im,code,ratio`, one row per cell
/// * `json`: `{"meta": {...}, "codes": [...]}`
/// * `pgm`: binary P5, maxval 255
///
/// All three list cells row-major from the `im_max` row down, `re`
/// ascending within a row.
pub fn emit(grid: &RegionGrid, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = String::from("re,im,code,ratio\n");
            for ((z, code), ratio) in grid.window.centers().zip(&grid.cells).zip(&grid.ratios) {
                out.push_str(&format!("{},{},{},{}\n", z.re, z.im, code.as_str(), ratio));
            }
            out.into_bytes()
        }
        Format::Json => {
            let doc = JsonGrid {
                meta: JsonMeta {
                    meta: &grid.meta,
                    window: &grid.window,
                    order: "row-major, im_max row first",
                },
                codes: grid.cells.iter().map(|c| c.as_str()).collect(),
            };
            let mut out = serde_json::to_vec(&doc).expect("grid serializes");
            out.push(b'\n');
            out
        }
        Format::Pgm => {
            let mut out = format!("P5\n{} {}\n255\n", grid.window.nx, grid.window.ny).into_bytes();
            out.extend(grid.cells.iter().map(|c| c.gray()));
            out
        }
    }
}
