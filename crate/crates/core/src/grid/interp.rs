use super::spectral::Fft3;
use super::{GridField, Grid3};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Periodic trilinear interpolation on a [`Grid3`].
#[derive(Debug, Clone, Copy)]
pub struct Interpolator {
    grid: Grid3,
}

impl Interpolator {
    pub fn new(grid: Grid3) -> Self {
        Self { grid }
    }

    fn stencil(&self, p: [f64; 3]) -> ([isize; 3], [f64; 3]) {
        let h = self.grid.spacing();
        let mut base = [0isize; 3];
        let mut frac = [0.0; 3];
        for c in 0..3 {
            let s = (p[c] - self.grid.origin()) / h;
            let f = s.floor();
            base[c] = f as isize;
            frac[c] = s - f;
        }
        (base, frac)
    }

    /// Interpolates one scalar array at `p`.
    pub fn sample(&self, values: &[f64], p: [f64; 3]) -> f64 {
        let (b, t) = self.stencil(p);
        let g = &self.grid;
        let mut acc = 0.0;
        for dx in 0..2 {
            let wx = if dx == 0 { 1.0 - t[0] } else { t[0] };
            for dy in 0..2 {
                let wy = if dy == 0 { 1.0 - t[1] } else { t[1] };
                for dz in 0..2 {
                    let wz = if dz == 0 { 1.0 - t[2] } else { t[2] };
                    acc += wx * wy * wz * values[g.wrapped_index(b[0] + dx, b[1] + dy, b[2] + dz)];
                }
            }
        }
        acc
    }

    /// Interpolates a three-component field (1-form, 2-form or vector field).
    pub fn sample3<C: AsRef<[f64]>>(&self, comps: &[C], p: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|c| self.sample(comps[c].as_ref(), p))
    }

    /// Interpolates every component of a form.
    pub fn sample_form(&self, f: &GridField, p: [f64; 3]) -> Vec<f64> {
        f.components().iter().map(|c| self.sample(c, p)).collect()
    }
}

/// Evaluation of the trigonometric interpolant of periodic samples at arbitrary points.
///
/// Exact for band-limited fields; the Nyquist modes are dropped. Each evaluation costs `O(N³)`.
#[derive(Debug, Clone)]
pub struct SpectralInterpolator {
    grid: Grid3,
    coeffs: Vec<Vec<Complex64>>,
}

impl SpectralInterpolator {
    pub fn new<C: AsRef<[f64]>>(grid: Grid3, comps: &[C]) -> Self {
        let r: Vec<&[f64]> = comps.iter().map(|c| c.as_ref()).collect();
        let scale = 1.0 / grid.len() as f64;
        let coeffs = Fft3::get(grid.n())
            .forward_real(&r)
            .into_iter()
            .map(|s| s.into_iter().map(|c| c * scale).collect())
            .collect();
        Self { grid, coeffs }
    }

    pub fn from_form(f: &GridField) -> Self {
        Self::new(*f.grid(), f.components())
    }

    fn phases(&self, x: f64) -> Vec<Complex64> {
        let n = self.grid.n();
        let base = 2.0 * PI / self.grid.length();
        let s = x - self.grid.origin();
        (0..n)
            .map(|i| {
                if 2 * i == n {
                    return Complex64::new(0.0, 0.0);
                }
                let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
                Complex64::from_polar(1.0, base * k * s)
            })
            .collect()
    }

    /// Values of every component at `p`.
    pub fn sample(&self, p: [f64; 3]) -> Vec<f64> {
        let n = self.grid.n();
        let (ex, ey, ez) = (self.phases(p[0]), self.phases(p[1]), self.phases(p[2]));
        self.coeffs
            .iter()
            .map(|c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ix in 0..n {
                    let mut sy = Complex64::new(0.0, 0.0);
                    for iy in 0..n {
                        let row = &c[(ix * n + iy) * n..(ix * n + iy + 1) * n];
                        let sz: Complex64 = row.iter().zip(&ez).map(|(a, b)| a * b).sum();
                        sy += ey[iy] * sz;
                    }
                    acc += ex[ix] * sy;
                }
                acc.re
            })
            .collect()
    }
}
