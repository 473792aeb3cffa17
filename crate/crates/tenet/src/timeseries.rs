//! Multivariate time series: ingestion, validation, standardization and
//! windowing.
//!
//! A [`TimeSeriesSet`] holds `N` named series of `M` uniformly sampled
//! values as an `N x M` matrix (variable-major). The CSV interchange
//! format is one column per variable, one row per time step, with a
//! mandatory header row.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named multivariate time series with a uniform sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSet {
    names: Vec<String>,
    /// N x M, row i = series i.
    data: Array2<f64>,
    sample_interval: f64,
}

/// Rolling-window geometry. `step == width` yields adjacent,
/// non-overlapping slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    width: usize,
    step: usize,
}

/// Result of [`TimeSeriesSet::standardize`]: the transformed set plus the
/// names of series that were constant (mapped to all-zeros).
#[derive(Debug, Clone)]
pub struct Standardized {
    pub set: TimeSeriesSet,
    pub constant_series: Vec<String>,
}

impl WindowSpec {
    pub const MIN_WIDTH: usize = 64;

    pub fn new(width: usize, step: usize) -> Result<Self> {
        if width < Self::MIN_WIDTH {
            return Err(Error::invalid(format!(
                "window width {width} below minimum {}",
                Self::MIN_WIDTH
            )));
        }
        if step == 0 || step > width {
            return Err(Error::invalid(format!(
                "window step {step} must be in 1..={width}"
            )));
        }
        Ok(WindowSpec { width, step })
    }

    /// Adjacent windows: step = width.
    pub fn adjacent(width: usize) -> Result<Self> {
        Self::new(width, width)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Number of full windows in a series of `m` samples.
    pub fn count(&self, m: usize) -> usize {
        if m < self.width {
            0
        } else {
            (m - self.width) / self.step + 1
        }
    }
}

impl TimeSeriesSet {
    /// Build a set from a variable-major matrix, validating all invariants.
    pub fn new(names: Vec<String>, data: Array2<f64>, sample_interval: f64) -> Result<Self> {
        if names.len() != data.nrows() {
            return Err(Error::invalid(format!(
                "{} names for {} series",
                names.len(),
                data.nrows()
            )));
        }
        if data.ncols() < 2 {
            return Err(Error::invalid(format!(
                "series length {} below minimum 2",
                data.ncols()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invalid(format!("series {i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate series name '{name}'")));
            }
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample {bad} in data")));
        }
        if !(sample_interval > 0.0) || !sample_interval.is_finite() {
            return Err(Error::invalid(format!(
                "sample interval must be positive, got {sample_interval}"
            )));
        }
        Ok(TimeSeriesSet {
            names,
            data,
            sample_interval,
        })
    }

    /// Load a CSV file: header row of unique column names, one row per
    /// time step, every cell a finite real. Errors name the offending
    /// 1-based data row and column.
    pub fn load_csv(path: impl AsRef<Path>, sample_interval: f64) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid(format!("{}: empty file", path.display())))?;
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let n = names.len();

        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut row = 0usize;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            row += 1;
            let mut cells = 0usize;
            for (c, cell) in line.split(',').enumerate() {
                cells += 1;
                if c >= n {
                    break;
                }
                let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: names[c].clone(),
                    message: format!("cannot parse '{}' as a real number", cell.trim()),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row,
                        column: names[c].clone(),
                        message: format!("non-finite value '{}'", cell.trim()),
                    });
                }
                columns[c].push(value);
            }
            if cells != n {
                return Err(Error::invalid(format!(
                    "{}: row {row} has {cells} cells, expected {n}",
                    path.display()
                )));
            }
        }

        let m = row;
        let mut data = Array2::zeros((n, m));
        for (i, col) in columns.into_iter().enumerate() {
            for (t, v) in col.into_iter().enumerate() {
                data[(i, t)] = v;
            }
        }
        Self::new(names, data, sample_interval)
    }

    /// Serialize back to the CSV interchange format.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.names.join(","));
        out.push('\n');
        for t in 0..self.len() {
            for i in 0..self.n_series() {
                if i > 0 {
                    out.push(',');
                }
                // f64 Display is the shortest round-trip representation,
                // so load(write(set)) is exact.
                let _ = write!(out, "{}", self.data[(i, t)]);
            }
            out.push('\n');
        }
        out
    }

    pub fn n_series(&self) -> usize {
        self.data.nrows()
    }

    /// Number of samples per series.
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn series(&self, i: usize) -> ArrayView1<'_, f64> {
        self.data.row(i)
    }

    /// Contiguous slice of series `i`.
    pub fn series_slice(&self, i: usize) -> &[f64] {
        self.data
            .row(i)
            .to_slice()
            .expect("row-major layout guarantees contiguous rows")
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// Z-score every series with the population (1/M) standard deviation.
    /// Constant series become all-zeros and are reported by name instead
    /// of failing.
    pub fn standardize(&self) -> Standardized {
        let m = self.len() as f64;
        let mut data = self.data.clone();
        let mut constant = Vec::new();
        for (i, mut row) in data.rows_mut().into_iter().enumerate() {
            let mean = row.sum() / m;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
            let sd = var.sqrt();
            if sd == 0.0 {
                row.fill(0.0);
                constant.push(self.names[i].clone());
            } else {
                row.mapv_inplace(|v| (v - mean) / sd);
            }
        }
        Standardized {
            set: TimeSeriesSet {
                names: self.names.clone(),
                data,
                sample_interval: self.sample_interval,
            },
            constant_series: constant,
        }
    }

    /// Cut the set into full windows at offsets 0, step, 2*step, ...;
    /// a trailing partial window is discarded.
    pub fn slice_windows(&self, spec: &WindowSpec) -> Result<Vec<TimeSeriesSet>> {
        if spec.width() > self.len() {
            return Err(Error::invalid(format!(
                "window width {} exceeds series length {}",
                spec.width(),
                self.len()
            )));
        }
        let count = spec.count(self.len());
        let mut windows = Vec::with_capacity(count);
        for w in 0..count {
            let start = w * spec.step();
            let data = self
                .data
                .slice(ndarray::s![.., start..start + spec.width()])
                .to_owned();
            windows.push(TimeSeriesSet {
                names: self.names.clone(),
                data,
                sample_interval: self.sample_interval,
            });
        }
        Ok(windows)
    }
}

/// Population standard deviation of a slice; 0.0 for constant input.
pub(crate) fn population_sd(x: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt()
}
