//! The hydrodynamical homotopy co-momentum map `(f1, f2)` on the flat torus and
//! the bracket structures around it.
//!
//! `f1(b) = -B♭` with `curl B = b`, `div B = 0`; `μ2(ξ1, ξ2) = f1([ξ1,ξ2]) - (ξ1 × ξ2)♭`;
//! `f2 = Δ⁻¹ δ μ2`. See [`crate::conventions`] for the bracket sign.

use crate::conventions::{EPS_DIV, EPS_HAM, EPS_HARM, RR_SIGN, TOWER_BRACKET_SIGN};
use crate::error::{Error, Result};
use crate::grid::{
    alpha, check_solenoidal, codiff, contract_pair_volume, cross, curl, curl_inv, dot, ext_d, harmonic_norm,
    laplace_inv, lie_derivative, musical, volume_form, GridField, Interpolator, SpectralInterpolator, VectorField,
};
use crate::links::PolygonalCurve;
use nalgebra::Vector3;
use serde::Serialize;

/// `curl(ξ1 × ξ2)`, the hydrodynamical bracket.
pub fn hydro_bracket(x1: &VectorField, x2: &VectorField) -> Result<VectorField> {
    check_solenoidal(x1, EPS_DIV)?;
    check_solenoidal(x2, EPS_DIV)?;
    Ok(curl(&cross(x1, x2)?))
}

/// The bracket used inside the co-momentum tower: `TOWER_BRACKET_SIGN · curl(ξ1 × ξ2)`.
pub fn tower_bracket(x1: &VectorField, x2: &VectorField) -> Result<VectorField> {
    Ok(hydro_bracket(x1, x2)?.scale(TOWER_BRACKET_SIGN))
}

/// `f1(b) = -(curl⁻¹ b)♭` in Coulomb gauge.
pub fn f1(b: &VectorField) -> Result<GridField> {
    Ok(musical(&curl_inv(b)?).neg())
}

/// `‖d f1(b) + ι_b ν‖∞ / ‖ι_b ν‖∞` (0 for `b = 0`).
pub fn eq25_residual(b: &VectorField) -> Result<f64> {
    let ib = alpha(b);
    let scale = ib.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(ext_d(&f1(b)?)?.add(&ib)?.max_abs() / scale)
}

/// A Hamiltonian vector field with its Hamiltonian 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPair {
    pub field: VectorField,
    pub form: GridField,
    pub residual: f64,
}

impl HamiltonianPair {
    /// Builds `(b, f1(b))` and fails when the Hamiltonian residual exceeds `EPS_HAM`.
    pub fn new(b: VectorField) -> Result<Self> {
        Self::with_tolerance(b, EPS_HAM)
    }

    pub fn with_tolerance(b: VectorField, eps_ham: f64) -> Result<Self> {
        let form = f1(&b)?;
        let ib = alpha(&b);
        let scale = ib.max_abs();
        let residual = if scale == 0.0 { 0.0 } else { ext_d(&form)?.add(&ib)?.max_abs() / scale };
        if residual >= eps_ham {
            return Err(Error::Invalid(format!("Hamiltonian residual {residual:.3e} exceeds {eps_ham:.1e}")));
        }
        Ok(Self { field: b, form, residual })
    }
}

/// `μ2(ξ1, ξ2) = f1([ξ1, ξ2]) - ι_{ξ1∧ξ2} ν`.
pub fn mu2(x1: &VectorField, x2: &VectorField) -> Result<GridField> {
    f1(&tower_bracket(x1, x2)?)?.sub(&contract_pair_volume(x1, x2)?)
}

/// `‖d μ2‖∞ / ‖μ2‖∞`.
pub fn mu2_closedness(m: &GridField) -> Result<f64> {
    let s = m.max_abs();
    Ok(if s == 0.0 { 0.0 } else { ext_d(m)?.max_abs() / s })
}

/// `f2 = Δ⁻¹ δ μ2`, zero mean.
pub fn f2(x1: &VectorField, x2: &VectorField) -> Result<GridField> {
    f2_from_mu2(&mu2(x1, x2)?)
}

/// Potential of a given `μ2`; fails with `ObstructedPotential` when its harmonic part is too large.
pub fn f2_from_mu2(m: &GridField) -> Result<GridField> {
    let harmonic = harmonic_norm(m);
    let tolerance = EPS_HARM * m.max_abs();
    if harmonic > tolerance {
        return Err(Error::ObstructedPotential { harmonic, tolerance });
    }
    laplace_inv(&codiff(m)?)
}

/// Eq. residual `‖f1([b,c]) - d f2(b,c) - ι_{b∧c} ν‖₂ / ‖ι_{b∧c} ν‖₂`.
pub fn eq26_residual(b: &VectorField, c: &VectorField) -> Result<f64> {
    let ibc = contract_pair_volume(b, c)?;
    let r = f1(&tower_bracket(b, c)?)?.sub(&ext_d(&f2(b, c)?)?)?.sub(&ibc)?;
    Ok(r.l2_norm() / ibc.l2_norm())
}

/// `{f1(b), f1(c)} = ι_c ι_b ν = ν(b, c, ·)`.
pub fn poisson_bracket(h1: &HamiltonianPair, h2: &HamiltonianPair) -> Result<GridField> {
    contract_pair_volume(&h1.field, &h2.field)
}

/// `‖{f1(b), f1(c)} - f1([b,c]) + d f2(b,c)‖₂ / ‖{f1(b), f1(c)}‖₂`.
pub fn eq29_residual(h1: &HamiltonianPair, h2: &HamiltonianPair) -> Result<f64> {
    let pb = poisson_bracket(h1, h2)?;
    let r = pb
        .sub(&f1(&tower_bracket(&h1.field, &h2.field)?)?)?
        .add(&ext_d(&f2(&h1.field, &h2.field)?)?)?;
    Ok(r.l2_norm() / pb.l2_norm())
}

/// `f2(∂(ξ1∧ξ2∧ξ3))` with `∂q = -[ξ1,ξ2]∧ξ3 + [ξ1,ξ3]∧ξ2 - [ξ2,ξ3]∧ξ1`.
pub fn f2_boundary_triple(x1: &VectorField, x2: &VectorField, x3: &VectorField) -> Result<GridField> {
    let t12 = f2(&tower_bracket(x1, x2)?, x3)?;
    let t13 = f2(&tower_bracket(x1, x3)?, x2)?;
    let t23 = f2(&tower_bracket(x2, x3)?, x1)?;
    t13.sub(&t12)?.sub(&t23)
}

/// Pointwise determinant `ν(ξ1, ξ2, ξ3)` as a 0-form.
pub fn volume_of(x1: &VectorField, x2: &VectorField, x3: &VectorField) -> Result<GridField> {
    let d = dot(&cross(x1, x2)?, x3)?;
    GridField::scalar(*x1.grid(), d)
}

/// `‖f2(∂q) - ν(ξ1,ξ2,ξ3)‖∞ / ‖ν(ξ1,ξ2,ξ3)‖∞`.
pub fn eq27_residual(x1: &VectorField, x2: &VectorField, x3: &VectorField) -> Result<f64> {
    let v = volume_of(x1, x2, x3)?;
    Ok(f2_boundary_triple(x1, x2, x3)?.sub(&v)?.max_abs() / v.max_abs())
}

/// `ℒ_ξ f1(b) - f1([ξ, b])`.
pub fn equivariance_defect(xi: &VectorField, b: &VectorField) -> Result<GridField> {
    let lie = lie_derivative(xi, &f1(b)?)?;
    lie.sub(&f1(&tower_bracket(xi, b)?)?)
}

/// `d<B, b>` with `curl B = b`; the equivariance defect at `ξ = b` is `EQUIVARIANCE_DEFECT_SIGN` times this.
pub fn helicity_density_gradient(b: &VectorField) -> Result<GridField> {
    let h = dot(&curl_inv(b)?, b)?;
    ext_d(&GridField::scalar(*b.grid(), h)?)
}

/// `‖ℒ_ξ ν‖∞` relative to `‖ξ‖∞`; vanishes for divergence-free `ξ`.
pub fn volume_conservation_defect(xi: &VectorField) -> Result<f64> {
    let s = xi.max_abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(lie_derivative(xi, &volume_form(*xi.grid()))?.max_abs() / s)
}

/// Point evaluation of a 1-form along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineQuadrature {
    /// Trilinear interpolation, composite midpoint rule.
    #[default]
    Trilinear,
    /// Trigonometric interpolant, 4-point Gauss–Legendre per sub-segment.
    Spectral,
}

/// Relative stopping tolerance for dyadic refinement of line integrals.
pub const LINE_REFINE_TOL: f64 = 1e-4;
const LINE_MAX_LEVEL: u32 = 8;

const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// `∮_γ f` of a 1-form along a closed polygon, refined until successive dyadic levels
/// differ by less than `LINE_REFINE_TOL` relative.
pub fn line_integral(f: &GridField, gamma: &PolygonalCurve, quad: LineQuadrature) -> Result<f64> {
    if f.degree() != 1 {
        return Err(Error::Degree("line integrals need a 1-form".into()));
    }
    let sampler: Box<dyn Fn([f64; 3]) -> [f64; 3] + Sync> = match quad {
        LineQuadrature::Trilinear => {
            let it = Interpolator::new(*f.grid());
            let comps = f.components().to_vec();
            Box::new(move |p| it.sample3(&comps, p))
        }
        LineQuadrature::Spectral => {
            let it = SpectralInterpolator::from_form(f);
            Box::new(move |p| {
                let v = it.sample(p);
                [v[0], v[1], v[2]]
            })
        }
    };
    let level_value = |sub: usize| -> (f64, f64) {
        use rayon::prelude::*;
        let parts: Vec<(f64, f64)> = (0..gamma.len())
            .into_par_iter()
            .map(|i| {
                let (a, b) = gamma.segment(i);
                let d = b - a;
                let mut acc = 0.0;
                let mut mag = 0.0;
                for s in 0..sub {
                    let (t0, dt) = (s as f64 / sub as f64, 1.0 / sub as f64);
                    let mut eval = |t: f64, w: f64| {
                        let p = a + d * t;
                        let v = Vector3::from(sampler([p.x, p.y, p.z]));
                        acc += w * dt * v.dot(&d);
                        mag += w * dt * v.norm() * d.norm();
                    };
                    match quad {
                        LineQuadrature::Trilinear => eval(t0 + 0.5 * dt, 1.0),
                        LineQuadrature::Spectral => {
                            for &(x, w) in &GL4 {
                                eval(t0 + x * dt, w);
                            }
                        }
                    }
                }
                (acc, mag)
            })
            .collect();
        let value = crate::grid::det_sum(parts.iter().map(|p| p.0));
        let mag = crate::grid::det_sum(parts.iter().map(|p| p.1));
        (value, mag)
    };
    let (mut prev, _) = level_value(1);
    for level in 1..=LINE_MAX_LEVEL {
        let (next, mag) = level_value(1 << level);
        if (next - prev).abs() <= LINE_REFINE_TOL * next.abs().max(1e-3 * mag) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence { iterations: LINE_MAX_LEVEL as usize, residual: f64::NAN })
}

/// `∮_γ f1(b) = RR_SIGN · λ_b` with `λ_b = ∮_γ B`, trilinear quadrature.
pub fn rasetti_regge(b: &VectorField, gamma: &PolygonalCurve) -> Result<f64> {
    rasetti_regge_with(b, gamma, LineQuadrature::Trilinear)
}

pub fn rasetti_regge_with(b: &VectorField, gamma: &PolygonalCurve, quad: LineQuadrature) -> Result<f64> {
    check_solenoidal(b, EPS_DIV)?;
    let v = line_integral(&f1(b)?, gamma, quad)?;
    debug_assert_eq!(RR_SIGN, -1.0);
    Ok(v)
}

/// `∫ det[w b c]` by the midpoint rule.
pub fn kks_pairing(w: &VectorField, b: &VectorField, c: &VectorField) -> Result<f64> {
    let d = dot(w, &cross(b, c)?)?;
    Ok(crate::grid::det_sum(d.into_iter()) * w.grid().cell_volume())
}

/// `Ω_γ(u, v) = ∫₀¹ ν(γ̇, u, v) dt`, midpoint rule per segment with `u`, `v` averaged
/// from the vertex values.
pub fn loop_2form(gamma: &PolygonalCurve, u: &[[f64; 3]], v: &[[f64; 3]]) -> Result<f64> {
    if u.len() != gamma.len() || v.len() != gamma.len() {
        return Err(Error::LengthMismatch(format!(
            "curve has {} vertices, fields have {} and {}",
            gamma.len(),
            u.len(),
            v.len()
        )));
    }
    let m = gamma.len();
    let terms = (0..m).map(|i| {
        let j = (i + 1) % m;
        let (a, b) = gamma.segment(i);
        let um = (Vector3::from(u[i]) + Vector3::from(u[j])) * 0.5;
        let vm = (Vector3::from(v[i]) + Vector3::from(v[j])) * 0.5;
        (b - a).dot(&um.cross(&vm))
    });
    Ok(crate::grid::det_sum(terms))
}

/// `∂w/∂t = -[w, v]` with `v = curl⁻¹ w`.
pub fn euler_vorticity_rhs(w: &VectorField) -> Result<VectorField> {
    let v = curl_inv(w)?;
    Ok(hydro_bracket(w, &v)?.scale(-1.0))
}

/// Residual certificates of the co-momentum identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificates {
    pub eq25: f64,
    pub eq26: f64,
    pub eq27: f64,
    pub eq29: f64,
    /// `max ‖δ f1‖∞ / ‖f1‖∞` over the stored forms.
    pub gauge: f64,
    /// `‖ℒ_b f1(b)‖∞ / ‖b‖∞²` for the first field.
    pub equivariance_defect_norm: f64,
}

/// `f1` on a list of fields, `f2` on every pair and the residual certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct ComomentumPack {
    pub f1_forms: Vec<GridField>,
    /// `((i, j), f2(ξ_i, ξ_j))` for `i < j`.
    pub f2_values: Vec<((usize, usize), GridField)>,
    pub certificates: Certificates,
}

impl ComomentumPack {
    /// Needs at least three fields (the first triple feeds the `f2(∂q)` check).
    pub fn build(fields: &[VectorField]) -> Result<Self> {
        if fields.len() < 3 {
            return Err(Error::Invalid("a co-momentum pack needs at least three fields".into()));
        }
        let pairs: Vec<HamiltonianPair> =
            fields.iter().map(|b| HamiltonianPair::new(b.clone())).collect::<Result<_>>()?;
        let mut eq25 = 0.0_f64;
        let mut gauge = 0.0_f64;
        for p in &pairs {
            eq25 = eq25.max(p.residual);
            let s = p.form.max_abs();
            if s > 0.0 {
                gauge = gauge.max(codiff(&p.form)?.max_abs() / s);
            }
        }
        let mut f2_values = Vec::new();
        let mut eq26 = 0.0_f64;
        let mut eq29 = 0.0_f64;
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let (b, c) = (&pairs[i].field, &pairs[j].field);
                let v = f2(b, c)?;
                let ibc = contract_pair_volume(b, c)?;
                let bracket_f1 = f1(&tower_bracket(b, c)?)?;
                let dv = ext_d(&v)?;
                eq26 = eq26.max(bracket_f1.sub(&dv)?.sub(&ibc)?.l2_norm() / ibc.l2_norm());
                eq29 = eq29.max(ibc.sub(&bracket_f1)?.add(&dv)?.l2_norm() / ibc.l2_norm());
                f2_values.push(((i, j), v));
            }
        }
        let eq27 = eq27_residual(&fields[0], &fields[1], &fields[2])?;
        let b0 = &fields[0];
        let s = b0.max_abs();
        let equivariance_defect_norm =
            if s == 0.0 { 0.0 } else { equivariance_defect(b0, b0)?.max_abs() / (s * s) };
        Ok(Self {
            f1_forms: pairs.into_iter().map(|p| p.form).collect(),
            f2_values,
            certificates: Certificates { eq25, eq26, eq27, eq29, gauge, equivariance_defect_norm },
        })
    }
}
