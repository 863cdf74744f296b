use super::ops::leray_project;
use super::spectral::{Fft3, ZERO};
use super::{GridField, Grid3, VectorField};
use crate::error::Result;
use rand::Rng;
use rustfft::num_complex::Complex64;

/// A real zero-mean field whose Fourier modes satisfy `0 < max|m_i| <= kmax`.
pub fn random_scalar<R: Rng>(grid: &Grid3, kmax: usize, rng: &mut R) -> Vec<f64> {
    scalar_with_modes(grid, kmax, None, rng)
}

fn scalar_with_modes<R: Rng>(grid: &Grid3, kmax: usize, parity: Option<[isize; 3]>, rng: &mut R) -> Vec<f64> {
    let n = grid.n();
    let kmax = kmax.min(n / 2 - 1) as isize;
    let mut z = vec![ZERO; grid.len()];
    for mx in -kmax..=kmax {
        for my in -kmax..=kmax {
            for mz in -kmax..=kmax {
                if mx == 0 && my == 0 && mz == 0 {
                    continue;
                }
                if let Some(p) = parity {
                    if [mx, my, mz].iter().zip(&p).any(|(m, q)| m.rem_euclid(2) != *q) {
                        continue;
                    }
                }
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                z[grid.wrapped_index(mx, my, mz)] = c;
            }
        }
    }
    Fft3::get(n).inverse(&mut z);
    let values: Vec<f64> = z.iter().map(|c| c.re).collect();
    let m = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    values.iter().map(|v| v / m).collect()
}

/// Random band-limited `k`-form with zero mean, normalised to unit sup norm per component.
pub fn random_form<R: Rng>(grid: &Grid3, degree: usize, kmax: usize, rng: &mut R) -> Result<GridField> {
    let count = super::component_count(degree);
    let comps = (0..count).map(|_| random_scalar(grid, kmax, rng)).collect();
    GridField::from_components(*grid, degree, comps)
}

pub fn random_vector<R: Rng>(grid: &Grid3, kmax: usize, rng: &mut R) -> VectorField {
    let comps = [0, 1, 2].map(|_| random_scalar(grid, kmax, rng));
    VectorField::from_components(*grid, comps).expect("lengths match grid")
}

/// Random band-limited divergence-free field with zero mean.
pub fn random_solenoidal<R: Rng>(grid: &Grid3, kmax: usize, rng: &mut R) -> VectorField {
    let v = leray_project(&random_vector(grid, kmax, rng));
    let m = v.max_abs();
    v.scale(1.0 / m)
}

/// Like [`random_solenoidal`], restricted to modes with `m mod 2 = parity`.
///
/// Products of fields from parity classes that do not sum to `(0,0,0) mod 2` have zero mean.
pub fn random_solenoidal_parity<R: Rng>(grid: &Grid3, kmax: usize, parity: [usize; 3], rng: &mut R) -> VectorField {
    let p = parity.map(|q| (q % 2) as isize);
    let comps = [0, 1, 2].map(|_| scalar_with_modes(grid, kmax, Some(p), rng));
    let v = leray_project(&VectorField::from_components(*grid, comps).expect("lengths match grid"));
    let m = v.max_abs();
    v.scale(1.0 / m)
}
