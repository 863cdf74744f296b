use super::domain::MaskedDomain;
use crate::conventions::{CG_MAXITER, CG_REGULARIZER, CG_TOL, EPS_MASSEY, EPS_PERIOD, MASK_FLOOR};
use crate::error::{Error, Result};
use crate::grid::spectral::{wavenumbers, Fft3, I, ZERO};
use crate::grid::{ext_d, GridField, Grid3};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

/// Parameters of the masked primitive solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveParams {
    pub cg_tol: f64,
    pub cg_maxiter: usize,
    pub regularizer: f64,
    /// `η` in the weight `mask² + η`.
    pub mask_floor: f64,
    /// Start pair solves from the co-exact primitive of the tube-closed obstruction form.
    pub tube_closure: bool,
    pub eps_period: f64,
    pub eps_massey: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            cg_tol: CG_TOL,
            cg_maxiter: CG_MAXITER,
            regularizer: CG_REGULARIZER,
            mask_floor: MASK_FLOOR,
            tube_closure: true,
            eps_period: EPS_PERIOD,
            eps_massey: EPS_MASSEY,
        }
    }
}

/// A certified primitive `v` with `dv ≈ -Ω` on the masked domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub v: GridField,
    /// `‖mask·(dv + Ω)‖₂ / ‖mask·Ω‖₂`.
    pub residual: f64,
    pub iterations: usize,
    /// Final relative normal-equation residual.
    pub cg_residual: f64,
}

type Spec = [Vec<Complex64>; 3];

fn zeros(n: usize) -> Spec {
    [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]]
}

/// Per-mode `(k, index)` table with the Nyquist-zeroed wavenumbers.
struct Modes {
    n: usize,
    k: Vec<f64>,
}

impl Modes {
    fn new(grid: &Grid3) -> Self {
        Self { n: grid.n(), k: wavenumbers(grid) }
    }

    /// Applies `f(k, idx)` over all modes, slab-parallel, writing into three outputs.
    fn map<F>(&self, out: &mut Spec, f: F)
    where
        F: Fn([f64; 3], usize) -> [Complex64; 3] + Sync,
    {
        let n = self.n;
        let [a, b, c] = out;
        a.par_chunks_mut(n * n)
            .zip(b.par_chunks_mut(n * n))
            .zip(c.par_chunks_mut(n * n))
            .enumerate()
            .for_each(|(ix, ((sa, sb), sc))| {
                for iy in 0..n {
                    for iz in 0..n {
                        let idx = (ix * n + iy) * n + iz;
                        let v = f([self.k[ix], self.k[iy], self.k[iz]], idx);
                        let j = iy * n + iz;
                        sa[j] = v[0];
                        sb[j] = v[1];
                        sc[j] = v[2];
                    }
                }
            });
    }
}

fn curl_hat(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    [
        I * (k[1] * v[2] - k[2] * v[1]),
        I * (k[2] * v[0] - k[0] * v[2]),
        I * (k[0] * v[1] - k[1] * v[0]),
    ]
}

fn at(s: &Spec, idx: usize) -> [Complex64; 3] {
    [s[0][idx], s[1][idx], s[2][idx]]
}

/// Real inner product of two Hermitian spectra (Parseval, up to a constant factor).
fn dot(a: &Spec, b: &Spec, n: usize) -> f64 {
    let parts: Vec<f64> = (0..3)
        .flat_map(|c| {
            a[c].par_chunks(n * n)
                .zip(b[c].par_chunks(n * n))
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.re * q.re + p.im * q.im).sum::<f64>())
                .collect::<Vec<f64>>()
        })
        .collect();
    crate::grid::det_sum(parts.into_iter())
}

fn axpy(y: &mut Spec, a: f64, x: &Spec) {
    for c in 0..3 {
        y[c].par_iter_mut().zip(x[c].par_iter()).for_each(|(p, q)| *p += q * a);
    }
}

struct Operator<'a> {
    modes: Modes,
    fft: std::sync::Arc<Fft3>,
    weight: Vec<f64>,
    eps: f64,
    grid: &'a Grid3,
}

impl Operator<'_> {
    /// Real components of a spectral 2-form multiplied by `mask²`, transformed back.
    fn masked(&self, s: Spec, weight: &[f64]) -> Spec {
        let mut real = self.fft.inverse_real(Vec::from(s));
        for comp in real.iter_mut() {
            comp.par_iter_mut().zip(weight.par_iter()).for_each(|(x, w)| *x *= w);
        }
        let refs: Vec<&[f64]> = real.iter().map(|c| c.as_slice()).collect();
        let mut out = self.fft.forward_real(&refs).into_iter();
        [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()]
    }

    /// `(δ (M² + η) d + ε d δ) v`.
    fn apply(&self, v: &Spec) -> Spec {
        let n = self.grid.len();
        let mut dv = zeros(n);
        self.modes.map(&mut dv, |k, idx| curl_hat(k, at(v, idx)));
        let mdv = self.masked(dv, &self.weight);
        let mut out = zeros(n);
        let eps = self.eps;
        self.modes.map(&mut out, |k, idx| {
            let c = curl_hat(k, at(&mdv, idx));
            let x = at(v, idx);
            let kd = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            [c[0] + kd * k[0] * eps, c[1] + kd * k[1] * eps, c[2] + kd * k[2] * eps]
        });
        out
    }

    fn precondition(&self, r: &Spec) -> Spec {
        let mut z = zeros(self.grid.len());
        self.modes.map(&mut z, |k, idx| {
            let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if s > 0.0 {
                let x = at(r, idx);
                [x[0] / s, x[1] / s, x[2] / s]
            } else {
                [ZERO; 3]
            }
        });
        z
    }
}

/// Minimises `‖mask·(dv + Ω)‖₂² + η‖dv‖₂² + ε‖δv‖₂²` by preconditioned conjugate gradients on the
/// normal equations, in spectral space, from a zero initial guess. No period gate.
pub fn solve_masked(omega: &GridField, dom: &MaskedDomain, params: &SolveParams) -> Result<Primitive> {
    solve_masked_shifted(omega, None, dom, params)
}

/// As [`solve_masked`], for `v = v₀ + w`: the conjugate-gradient unknown is `w`, started at zero,
/// and the floor `η` penalises `dw` rather than `dv`.
pub fn solve_masked_shifted(
    omega: &GridField,
    shift: Option<&GridField>,
    dom: &MaskedDomain,
    params: &SolveParams,
) -> Result<Primitive> {
    if omega.degree() != 2 {
        return Err(Error::Degree("primitives are solved for 2-forms".into()));
    }
    let target = match shift {
        Some(v0) => omega.add(&ext_d(v0)?)?,
        None => omega.clone(),
    };
    let grid = *omega.grid();
    grid.check_same(dom.grid())?;
    let n = grid.len();
    let fft = Fft3::get(grid.n());
    let weight: Vec<f64> = dom.mask().iter().map(|m| m * m + params.mask_floor * (1.0 - m * m)).collect();
    let op = Operator { modes: Modes::new(&grid), fft: fft.clone(), weight, eps: params.regularizer, grid: &grid };
    // b = -δ M² Ω, with δ = curl on 2-forms; the floor η only enters the operator.
    let om: Spec = {
        let refs: Vec<&[f64]> = target.components().iter().map(|c| c.as_slice()).collect();
        let mut s = fft.forward_real(&refs).into_iter();
        [s.next().unwrap(), s.next().unwrap(), s.next().unwrap()]
    };
    let m2: Vec<f64> = dom.mask().iter().map(|m| m * m).collect();
    let mom = op.masked(om, &m2);
    let mut b = zeros(n);
    op.modes.map(&mut b, |k, idx| {
        let c = curl_hat(k, at(&mom, idx));
        [-c[0], -c[1], -c[2]]
    });
    let bnorm = dot(&b, &b, grid.n()).sqrt();
    let mut x = zeros(n);
    let mut iterations = 0;
    let mut rel = 0.0;
    if bnorm > 0.0 {
        let mut r = b;
        let mut z = op.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z, grid.n());
        rel = 1.0;
        while iterations < params.cg_maxiter {
            let ap = op.apply(&p);
            let pap = dot(&p, &ap, grid.n());
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            axpy(&mut x, alpha, &p);
            axpy(&mut r, -alpha, &ap);
            iterations += 1;
            rel = dot(&r, &r, grid.n()).sqrt() / bnorm;
            if rel < params.cg_tol {
                break;
            }
            z = op.precondition(&r);
            let rz_new = dot(&r, &z, grid.n());
            let beta = rz_new / rz;
            rz = rz_new;
            for c in 0..3 {
                p[c].par_iter_mut().zip(z[c].par_iter()).for_each(|(pp, zz)| *pp = zz + *pp * beta);
            }
        }
        if rel >= params.cg_tol {
            return Err(Error::NoConvergence { iterations, residual: rel });
        }
    }
    let comps = fft.inverse_real(Vec::from(x));
    let mut v = GridField::from_components(grid, 1, comps)?;
    if let Some(v0) = shift {
        v = v.add(v0)?;
    }
    let residual = masked_residual(&v, omega, dom)?;
    Ok(Primitive { v, residual, iterations, cg_residual: rel })
}

/// `‖mask·(dv + Ω)‖₂ / ‖mask·Ω‖₂` (0 when `mask·Ω = 0`).
pub fn masked_residual(v: &GridField, omega: &GridField, dom: &MaskedDomain) -> Result<f64> {
    let den = dom.masked_norm(omega);
    let num = dom.masked_norm(&ext_d(v)?.add(omega)?);
    Ok(if den == 0.0 { if num == 0.0 { 0.0 } else { f64::INFINITY } } else { num / den })
}

/// Checks every meridian period of `Ω` against `eps_period`; `(i, j)` only label the error.
pub fn period_gate(omega: &GridField, dom: &MaskedDomain, pair: (usize, usize), eps_period: f64) -> Result<Vec<f64>> {
    let periods = dom.periods(omega)?;
    for (k, &p) in periods.iter().enumerate() {
        if p.abs() > eps_period {
            return Err(Error::ObstructedClass { i: pair.0, j: pair.1, torus: k + 1, period: p, tolerance: eps_period });
        }
    }
    Ok(periods)
}

/// Period gate, then the masked solve; fails with `ObstructedClass` or `NoConvergence`.
pub fn solve_primitive(omega: &GridField, dom: &MaskedDomain, params: &SolveParams) -> Result<Primitive> {
    period_gate(omega, dom, (0, 0), params.eps_period)?;
    solve_masked(omega, dom, params)
}
