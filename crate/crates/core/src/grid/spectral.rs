//! Three-dimensional complex FFTs on `N³` arrays and the real-field packing
//! used by every spectral operator.

use super::Grid3;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    /// Shared plan for size `n`.
    pub(crate) fn get(n: usize) -> Arc<Fft3> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    fwd: planner.plan_fft_forward(n),
                    inv: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let nn = n * n;
        let fft = if inverse { &self.inv } else { &self.fwd };
        let scratch_len = fft.get_inplace_scratch_len();

        // z: rows are contiguous
        data.par_chunks_mut(nn).for_each(|slab| {
            let mut scratch = vec![ZERO; scratch_len];
            fft.process_with_scratch(slab, &mut scratch);
        });

        // y: transpose each x-slab
        data.par_chunks_mut(nn).for_each(|slab| {
            let mut scratch = vec![ZERO; scratch_len];
            let mut t = vec![ZERO; nn];
            for iy in 0..n {
                for iz in 0..n {
                    t[iz * n + iy] = slab[iy * n + iz];
                }
            }
            fft.process_with_scratch(&mut t, &mut scratch);
            for iz in 0..n {
                for iy in 0..n {
                    slab[iy * n + iz] = t[iz * n + iy];
                }
            }
        });

        // x: gather lines of constant (iy, iz)
        let mut t = vec![ZERO; nn * n];
        {
            let src: &[Complex64] = data;
            t.par_chunks_mut(n * n).enumerate().for_each(|(iy, block)| {
                for iz in 0..n {
                    let row = &mut block[iz * n..(iz + 1) * n];
                    for (ix, v) in row.iter_mut().enumerate() {
                        *v = src[(ix * n + iy) * n + iz];
                    }
                }
            });
        }
        t.par_chunks_mut(nn).for_each(|block| {
            let mut scratch = vec![ZERO; scratch_len];
            fft.process_with_scratch(block, &mut scratch);
        });
        let scale = if inverse { 1.0 / (nn * n) as f64 } else { 1.0 };
        data.par_chunks_mut(nn).enumerate().for_each(|(ix, slab)| {
            for (r, v) in slab.iter_mut().enumerate() {
                *v = t[r * n + ix] * scale;
            }
        });
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// Spectra of real fields; two fields share one complex transform.
    pub(crate) fn forward_real(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            let mut z: Vec<Complex64> = match pair {
                [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect(),
                [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                _ => unreachable!(),
            };
            self.forward(&mut z);
            if pair.len() == 1 {
                out.push(z);
                continue;
            }
            let neg = |i: usize| if i == 0 { 0 } else { n - i };
            let mut a = vec![ZERO; z.len()];
            let mut b = vec![ZERO; z.len()];
            a.par_chunks_mut(n * n)
                .zip(b.par_chunks_mut(n * n))
                .enumerate()
                .for_each(|(ix, (sa, sb))| {
                    for iy in 0..n {
                        for iz in 0..n {
                            let zk = z[(ix * n + iy) * n + iz];
                            let zm = z[(neg(ix) * n + neg(iy)) * n + neg(iz)].conj();
                            sa[iy * n + iz] = (zk + zm) * 0.5;
                            sb[iy * n + iz] = (zk - zm) * Complex64::new(0.0, -0.5);
                        }
                    }
                });
            out.push(a);
            out.push(b);
        }
        out
    }

    /// Real fields from Hermitian spectra; two spectra share one complex transform.
    pub(crate) fn inverse_real(&self, spectra: Vec<Vec<Complex64>>) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(spectra.len());
        let mut iter = spectra.into_iter();
        while let Some(mut a) = iter.next() {
            match iter.next() {
                Some(b) => {
                    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += I * y);
                    self.inverse(&mut a);
                    out.push(a.iter().map(|c| c.re).collect());
                    out.push(a.iter().map(|c| c.im).collect());
                }
                None => {
                    self.inverse(&mut a);
                    out.push(a.iter().map(|c| c.re).collect());
                }
            }
        }
        out
    }
}

/// Differentiation wavenumbers along one axis, Nyquist entry zeroed.
pub(crate) fn wavenumbers(grid: &Grid3) -> Vec<f64> {
    let n = grid.n();
    let base = 2.0 * PI / grid.length();
    (0..n)
        .map(|i| {
            if i < n / 2 {
                base * i as f64
            } else if i == n / 2 {
                0.0
            } else {
                base * (i as f64 - n as f64)
            }
        })
        .collect()
}

/// Applies a per-mode linear map to the spectra of real input arrays.
///
/// `f(k, input_modes, output_modes)` must preserve Hermitian symmetry, which
/// holds for any combination of real even symbols and `i * k`.
pub(crate) fn apply<F>(grid: &Grid3, inputs: &[&[f64]], n_out: usize, f: F) -> Vec<Vec<f64>>
where
    F: Fn([f64; 3], &[Complex64], &mut [Complex64]) + Sync,
{
    let fft = Fft3::get(grid.n());
    let spec = fft.forward_real(inputs);
    let out = map_modes(grid, &spec, n_out, f);
    fft.inverse_real(out)
}

/// Applies a per-mode map to spectra.
pub(crate) fn map_modes<F>(grid: &Grid3, spec: &[Vec<Complex64>], n_out: usize, f: F) -> Vec<Vec<Complex64>>
where
    F: Fn([f64; 3], &[Complex64], &mut [Complex64]) + Sync,
{
    let n = grid.n();
    let k = wavenumbers(grid);
    let mut out = vec![vec![ZERO; grid.len()]; n_out];
    let m = spec.len();
    // Process x-slabs in parallel; each slab writes disjoint output ranges.
    let slabs: Vec<Vec<Vec<Complex64>>> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let mut local = vec![vec![ZERO; n * n]; n_out];
            let mut inp = vec![ZERO; m];
            let mut res = vec![ZERO; n_out];
            for iy in 0..n {
                for iz in 0..n {
                    let idx = (ix * n + iy) * n + iz;
                    for (c, s) in spec.iter().enumerate() {
                        inp[c] = s[idx];
                    }
                    res.iter_mut().for_each(|r| *r = ZERO);
                    f([k[ix], k[iy], k[iz]], &inp, &mut res);
                    for (c, r) in res.iter().enumerate() {
                        local[c][iy * n + iz] = *r;
                    }
                }
            }
            local
        })
        .collect();
    for (ix, local) in slabs.into_iter().enumerate() {
        for (c, l) in local.into_iter().enumerate() {
            out[c][ix * n * n..(ix + 1) * n * n].copy_from_slice(&l);
        }
    }
    out
}
