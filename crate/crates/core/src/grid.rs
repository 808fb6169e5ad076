//! Uniform grids and complex samples on them.
//!
//! Values are stored row-major: the last axis varies fastest.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub min: Vec<f64>,
    pub step: Vec<f64>,
    pub shape: Vec<usize>,
}

impl Grid {
    pub fn new(min: Vec<f64>, step: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        if min.is_empty() || min.len() != step.len() || min.len() != shape.len() {
            return Err(Error::InvalidDimension("grid vectors must share a nonzero length".into()));
        }
        if step.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidDimension("grid steps must be positive".into()));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidDimension("grid shape entries must be positive".into()));
        }
        Ok(Self { min, step, shape })
    }

    /// `points` samples per axis, centered on the origin: `x_k = (k − points/2)·h`
    /// with `h = 2·half_width/points`. `points` must be even.
    pub fn centered(dim: usize, points: usize, half_width: f64) -> Result<Self> {
        if points == 0 || points % 2 != 0 {
            return Err(Error::InvalidDimension(format!("points per axis must be even, got {points}")));
        }
        let h = 2.0 * half_width / points as f64;
        Self::new(vec![-half_width; dim], vec![h; dim], vec![points; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.step.iter().product()
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        self.min[axis] + index as f64 * self.step[axis]
    }

    /// Row-major multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dim()).rev() {
            out[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim()];
        self.unravel(flat, &mut idx);
        idx.iter().enumerate().map(|(a, &i)| self.coordinate(a, i)).collect()
    }

    /// All grid points in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// True when every axis has an even number of points and contains the
    /// origin at index `shape/2`.
    pub fn is_centered(&self) -> bool {
        self.shape.iter().zip(&self.min).zip(&self.step).all(|((&s, &m), &h)| {
            s % 2 == 0 && (m + (s / 2) as f64 * h).abs() <= 1e-9 * h
        })
    }

    pub fn approx_eq(&self, other: &Grid) -> bool {
        self.shape == other.shape
            && self.min.iter().zip(&other.min).zip(&self.step).all(|((a, b), h)| (a - b).abs() <= 1e-9 * h)
            && self.step.iter().zip(&other.step).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs())
    }
}

/// Complex samples of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidDimension(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Riemann-sum `(self | other) = Σ self·conj(other)·ΔV`.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch("inner product of functions on different grids".into()));
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()))
    }

    /// Largest modulus attained on the outer faces of the grid.
    pub fn boundary_max(&self) -> f64 {
        let mut idx = vec![0; self.dim()];
        let mut out = 0.0_f64;
        for (flat, v) in self.values.iter().enumerate() {
            self.grid.unravel(flat, &mut idx);
            let on_face = idx.iter().zip(&self.grid.shape).any(|(&i, &s)| i == 0 || i + 1 == s);
            if on_face {
                out = out.max(v.norm());
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> Result<f64> {
        if !self.grid.approx_eq(&other.grid) {
            return Err(Error::GridMismatch("comparing functions on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm())))
    }

    /// CSV dump: a `# grid_min=… grid_step=… shape=…` header followed by one
    /// `index_1,…,index_d,re,im` row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
        let shape = self.grid.shape.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        writeln!(
            w,
            "# grid_min={} grid_step={} shape={}",
            join(&self.grid.min),
            join(&self.grid.step),
            shape
        )?;
        let mut idx = vec![0; self.dim()];
        let mut line = String::new();
        for (flat, v) in self.values.iter().enumerate() {
            self.grid.unravel(flat, &mut idx);
            line.clear();
            for i in &idx {
                let _ = write!(line, "{i},");
            }
            let _ = write!(line, "{},{}", fmt_f64(v.re), fmt_f64(v.im));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing '#' header".into()))?;
        let mut min = None;
        let mut step = None;
        let mut shape = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field '{field}'")))?;
            match key {
                "grid_min" => min = Some(parse_list::<f64>(value)?),
                "grid_step" => step = Some(parse_list::<f64>(value)?),
                "shape" => shape = Some(parse_list::<usize>(value)?),
                other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("header lacks {k}"));
        let grid = Grid::new(
            min.ok_or_else(|| missing("grid_min"))?,
            step.ok_or_else(|| missing("grid_step"))?,
            shape.ok_or_else(|| missing("shape"))?,
        )?;
        let d = grid.dim();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 2 {
                return Err(Error::Parse(format!("expected {} fields, got {}", d + 2, fields.len())));
            }
            let mut flat = 0usize;
            for (axis, f) in fields[..d].iter().enumerate() {
                let i: usize = f.trim().parse().map_err(|_| Error::Parse(format!("bad index '{f}'")))?;
                if i >= grid.shape[axis] {
                    return Err(Error::Parse(format!("index {i} out of range on axis {axis}")));
                }
                flat = flat * grid.shape[axis] + i;
            }
            let re: f64 = fields[d].trim().parse().map_err(|_| Error::Parse("bad real part".into()))?;
            let im: f64 = fields[d + 1].trim().parse().map_err(|_| Error::Parse("bad imaginary part".into()))?;
            values[flat] = Complex64::new(re, im);
            seen += 1;
        }
        if seen != grid.len() {
            return Err(Error::Parse(format!("expected {} rows, got {seen}", grid.len())));
        }
        SampledFunction::new(grid, values)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad list entry '{t}'"))))
        .collect()
}
