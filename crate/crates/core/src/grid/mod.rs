//! Differential forms on the flat periodic 3-torus sampled on an `N³` grid.
//!
//! A [`GridField`] is a `k`-form stored as `C(3,k)` real arrays; a
//! [`VectorField`] stores the three Cartesian components of a vector field.
//! Arrays are indexed `(ix * N + iy) * N + iz`; grid point `i` along an axis
//! sits at `origin + i * h`.

mod export;
mod interp;
mod ops;
mod random;
pub(crate) mod spectral;

pub use export::{read_vlf1, write_vlf1, write_vtk, Vlf1Payload};
pub use interp::{Interpolator, SpectralInterpolator};
pub use ops::*;
pub use random::{random_form, random_scalar, random_solenoidal, random_solenoidal_parity, random_vector};

use crate::error::{Error, Result};
use std::fmt;

/// A periodic cubic grid with `n` points per axis and side `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    n: usize,
    length: f64,
    origin: f64,
}

impl Grid3 {
    /// Grid on `[0, length)³`.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        Self::with_origin(n, length, 0.0)
    }

    /// Grid on `[-length/2, length/2)³`; used for link scenes centred at the origin.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::with_origin(n, length, -0.5 * length)
    }

    pub fn with_origin(n: usize, length: f64, origin: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need N >= 8, got {n}")));
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N must be even, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {length}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { n, length, origin })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn origin(&self) -> f64 {
        self.origin
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h³` of the midpoint rule.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Periodic index from signed lattice coordinates.
    #[inline]
    pub fn wrapped_index(&self, ix: isize, iy: isize, iz: isize) -> usize {
        let n = self.n as isize;
        self.index(
            ix.rem_euclid(n) as usize,
            iy.rem_euclid(n) as usize,
            iz.rem_euclid(n) as usize,
        )
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing()
    }

    /// Lattice coordinates of a flat index.
    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Position of the grid point with flat index `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (ix, iy, iz) = self.unravel(idx);
        [self.coord(ix), self.coord(iy), self.coord(iz)]
    }

    /// Evaluates `f` at every grid point.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        use rayon::prelude::*;
        (0..self.len()).into_par_iter().map(|i| f(self.point(i))).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid3) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Grid3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} L={} origin={}", self.n, self.length, self.origin)
    }
}

/// Number of components of a `k`-form in three dimensions.
pub const fn component_count(degree: usize) -> usize {
    match degree {
        0 | 3 => 1,
        1 | 2 => 3,
        _ => 0,
    }
}

/// A differential `k`-form sampled on a [`Grid3`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid3,
    degree: usize,
    comps: Vec<Vec<f64>>,
}

impl GridField {
    pub fn zeros(grid: Grid3, degree: usize) -> Result<Self> {
        let count = component_count(degree);
        if count == 0 {
            return Err(Error::Degree(format!("{degree} is not in 0..=3")));
        }
        Ok(Self {
            grid,
            degree,
            comps: vec![vec![0.0; grid.len()]; count],
        })
    }

    pub fn from_components(grid: Grid3, degree: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        let count = component_count(degree);
        if count == 0 {
            return Err(Error::Degree(format!("{degree} is not in 0..=3")));
        }
        if comps.len() != count {
            return Err(Error::Degree(format!(
                "a {degree}-form needs {count} components, got {}",
                comps.len()
            )));
        }
        if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::LengthMismatch(format!(
                "component has {} samples, grid has {}",
                bad.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, degree, comps })
    }

    pub fn scalar(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        Self::from_components(grid, 0, vec![values])
    }

    pub fn volume(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        Self::from_components(grid, 3, vec![values])
    }

    /// A constant form with the given component values.
    pub fn constant(grid: Grid3, degree: usize, values: &[f64]) -> Result<Self> {
        let comps = values.iter().map(|&v| vec![v; grid.len()]).collect();
        Self::from_components(grid, degree, comps)
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    #[inline]
    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    #[inline]
    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.comps[i]
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// Component values at one grid point.
    pub fn at(&self, idx: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c[idx]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_all(&self.comps)
    }

    /// `L²` norm with the midpoint-rule volume weight.
    pub fn l2_norm(&self) -> f64 {
        (sum_sq_all(&self.comps) * self.grid.cell_volume()).sqrt()
    }

    /// Sum over components of the `L¹` norm of each component.
    pub fn l1_norm(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| det_sum(c.iter().map(|v| v.abs())))
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    fn check_compatible(&self, other: &GridField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot combine a {}-form with a {}-form",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        self.check_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.check_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &GridField) -> Result<GridField> {
        self.check_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a + s * b))
    }

    pub fn scale(&self, s: f64) -> GridField {
        self.map(|v| s * v)
    }

    pub fn neg(&self) -> GridField {
        self.map(|v| -v)
    }

    /// Pointwise multiplication of every component by a scalar array.
    pub fn weighted(&self, weight: &[f64]) -> GridField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(weight).map(|(a, w)| a * w).collect())
            .collect();
        GridField { grid: self.grid, degree: self.degree, comps }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridField {
        let comps = self.comps.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect();
        GridField { grid: self.grid, degree: self.degree, comps }
    }

    fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &GridField, f: F) -> GridField {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        GridField { grid: self.grid, degree: self.degree, comps }
    }

    /// Cyclic shift by a lattice vector (used to check translation invariance).
    pub fn shifted(&self, by: [isize; 3]) -> GridField {
        let g = self.grid;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                (0..g.len())
                    .map(|idx| {
                        let (ix, iy, iz) = g.unravel(idx);
                        c[g.wrapped_index(
                            ix as isize - by[0],
                            iy as isize - by[1],
                            iz as isize - by[2],
                        )]
                    })
                    .collect()
            })
            .collect();
        GridField { grid: g, degree: self.degree, comps }
    }
}

/// A vector field sampled on a [`Grid3`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid3,
    comps: [Vec<f64>; 3],
}

impl VectorField {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            comps: [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]],
        }
    }

    pub fn from_components(grid: Grid3, comps: [Vec<f64>; 3]) -> Result<Self> {
        if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::LengthMismatch(format!(
                "component has {} samples, grid has {}",
                bad.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    pub fn constant(grid: Grid3, value: [f64; 3]) -> Self {
        Self {
            grid,
            comps: value.map(|v| vec![v; grid.len()]),
        }
    }

    /// Samples an analytic vector field at the grid points.
    pub fn from_fn<F>(grid: Grid3, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        use rayon::prelude::*;
        let values: Vec<[f64; 3]> = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        let comps = [0, 1, 2].map(|c| values.iter().map(|v| v[c]).collect());
        Self { grid, comps }
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    #[inline]
    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_all(&self.comps)
    }

    pub fn l2_norm(&self) -> f64 {
        (sum_sq_all(&self.comps) * self.grid.cell_volume()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.axpy(-1.0, other)
    }

    pub fn axpy(&self, s: f64, other: &VectorField) -> Result<VectorField> {
        self.grid.check_same(&other.grid)?;
        let comps = [0, 1, 2].map(|c| {
            self.comps[c]
                .iter()
                .zip(&other.comps[c])
                .map(|(a, b)| a + s * b)
                .collect()
        });
        Ok(VectorField { grid: self.grid, comps })
    }

    pub fn scale(&self, s: f64) -> VectorField {
        let comps = [0, 1, 2].map(|c| self.comps[c].iter().map(|v| s * v).collect());
        VectorField { grid: self.grid, comps }
    }

    /// Componentwise means.
    pub fn mean(&self) -> [f64; 3] {
        let n = self.grid.len() as f64;
        [0, 1, 2].map(|c| det_sum(self.comps[c].iter().copied()) / n)
    }
}

pub(crate) fn max_abs_all<C: AsRef<[f64]>>(comps: &[C]) -> f64 {
    comps
        .iter()
        .flat_map(|c| c.as_ref().iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub(crate) fn sum_sq_all<C: AsRef<[f64]>>(comps: &[C]) -> f64 {
    comps
        .iter()
        .map(|c| det_sum(c.as_ref().iter().map(|v| v * v)))
        .sum()
}

/// Sequential pairwise-blocked sum; independent of thread count.
pub(crate) fn det_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    const BLOCK: usize = 4096;
    let mut total = 0.0;
    let mut partial = 0.0;
    let mut count = 0;
    for v in values {
        partial += v;
        count += 1;
        if count == BLOCK {
            total += partial;
            partial = 0.0;
            count = 0;
        }
    }
    total + partial
}

