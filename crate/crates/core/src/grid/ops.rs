use super::spectral::{self, I, ZERO};
use super::{det_sum, max_abs_all, GridField, Grid3, VectorField};
use crate::conventions::{CODIFF_SIGN, EPS_DIV, EPS_HARM};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;

fn refs(f: &GridField) -> Vec<&[f64]> {
    f.components().iter().map(|c| c.as_slice()).collect()
}

fn vrefs(x: &VectorField) -> Vec<&[f64]> {
    x.components().iter().map(|c| c.as_slice()).collect()
}

fn vec3(mut v: Vec<Vec<f64>>) -> [Vec<f64>; 3] {
    let c = v.pop().unwrap_or_default();
    let b = v.pop().unwrap_or_default();
    let a = v.pop().unwrap_or_default();
    [a, b, c]
}

fn form(grid: Grid3, degree: usize, comps: Vec<Vec<f64>>) -> GridField {
    GridField::from_components(grid, degree, comps).expect("component layout fixed by construction")
}

fn vector(grid: Grid3, comps: Vec<Vec<f64>>) -> VectorField {
    VectorField::from_components(grid, vec3(comps)).expect("component layout fixed by construction")
}

/// The volume form `dx∧dy∧dz`.
pub fn volume_form(grid: Grid3) -> GridField {
    form(grid, 3, vec![vec![1.0; grid.len()]])
}

/// Euclidean Hodge dual. In three dimensions it only relabels components.
pub fn hodge_star(f: &GridField) -> GridField {
    form(*f.grid(), 3 - f.degree(), f.components().to_vec())
}

/// Flat: vector field to 1-form.
pub fn musical(x: &VectorField) -> GridField {
    form(*x.grid(), 1, x.components().to_vec())
}

/// Sharp: 1-form to vector field.
pub fn musical_inv(f: &GridField) -> Result<VectorField> {
    expect_degree(f, 1)?;
    Ok(vector(*f.grid(), f.components().to_vec()))
}

/// `α(ξ) = ι_ξ ν = *(ξ♭)`.
pub fn alpha(x: &VectorField) -> GridField {
    form(*x.grid(), 2, x.components().to_vec())
}

/// `α⁻¹(β) = (*β)♯`.
pub fn alpha_inv(f: &GridField) -> Result<VectorField> {
    expect_degree(f, 2)?;
    Ok(vector(*f.grid(), f.components().to_vec()))
}

fn expect_degree(f: &GridField, k: usize) -> Result<()> {
    if f.degree() == k {
        Ok(())
    } else {
        Err(Error::Degree(format!("expected a {k}-form, got a {}-form", f.degree())))
    }
}

fn grad_modes(k: [f64; 3], a: &[Complex64], o: &mut [Complex64]) {
    for c in 0..3 {
        o[c] = I * k[c] * a[0];
    }
}

fn curl_modes(k: [f64; 3], a: &[Complex64], o: &mut [Complex64]) {
    o[0] = I * (k[1] * a[2] - k[2] * a[1]);
    o[1] = I * (k[2] * a[0] - k[0] * a[2]);
    o[2] = I * (k[0] * a[1] - k[1] * a[0]);
}

fn div_modes(k: [f64; 3], a: &[Complex64], o: &mut [Complex64]) {
    o[0] = I * (k[0] * a[0] + k[1] * a[1] + k[2] * a[2]);
}

/// Spectral exterior derivative: grad, curl, div by degree.
pub fn ext_d(f: &GridField) -> Result<GridField> {
    let g = *f.grid();
    let k = f.degree();
    let comps = match k {
        0 => spectral::apply(&g, &refs(f), 3, grad_modes),
        1 => spectral::apply(&g, &refs(f), 3, curl_modes),
        2 => spectral::apply(&g, &refs(f), 1, div_modes),
        _ => return Err(Error::Degree("d of a 3-form is identically zero; degree must be <= 2".into())),
    };
    Ok(form(g, k + 1, comps))
}

/// Codifferential `δ = (-1)^k * d *`, the `L²` adjoint of [`ext_d`].
pub fn codiff(f: &GridField) -> Result<GridField> {
    let k = f.degree();
    if k == 0 {
        return Err(Error::Degree("codifferential of a 0-form is undefined".into()));
    }
    let inner = ext_d(&hodge_star(f))?;
    Ok(hodge_star(&inner).scale(CODIFF_SIGN[k]))
}

/// Hodge Laplacian `dδ + δd`, symbol `+|k|²`.
pub fn laplacian(f: &GridField) -> GridField {
    let g = *f.grid();
    let m = f.components().len();
    let comps = spectral::apply(&g, &refs(f), m, |k, a, o| {
        let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        for c in 0..a.len() {
            o[c] = a[c] * s;
        }
    });
    form(g, f.degree(), comps)
}

/// Componentwise mean: the harmonic part on the flat torus.
pub fn harmonic_proj(f: &GridField) -> GridField {
    let g = *f.grid();
    let n = g.len() as f64;
    let comps = f
        .components()
        .iter()
        .map(|c| vec![det_sum(c.iter().copied()) / n; g.len()])
        .collect();
    form(g, f.degree(), comps)
}

/// Largest absolute componentwise mean.
pub fn harmonic_norm(f: &GridField) -> f64 {
    let n = f.grid().len() as f64;
    f.components()
        .iter()
        .map(|c| (det_sum(c.iter().copied()) / n).abs())
        .fold(0.0, f64::max)
}

/// `Δ⁻¹` with the default harmonic tolerance.
pub fn laplace_inv(f: &GridField) -> Result<GridField> {
    laplace_inv_tol(f, EPS_HARM)
}

/// `Δ⁻¹`; fails when a component mean exceeds `eps_harm * ‖f‖∞`.
pub fn laplace_inv_tol(f: &GridField, eps_harm: f64) -> Result<GridField> {
    let mean = harmonic_norm(f);
    let tolerance = eps_harm * f.max_abs();
    if mean > tolerance {
        return Err(Error::NonzeroHarmonicPart { mean, tolerance });
    }
    let g = *f.grid();
    let m = f.components().len();
    let comps = spectral::apply(&g, &refs(f), m, |k, a, o| {
        let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if s > 0.0 {
            for c in 0..a.len() {
                o[c] = a[c] / s;
            }
        }
    });
    Ok(form(g, f.degree(), comps))
}

/// Pointwise exterior product.
pub fn wedge(f: &GridField, g: &GridField) -> Result<GridField> {
    f.grid().check_same(g.grid())?;
    let (j, k) = (f.degree(), g.degree());
    if j + k > 3 {
        return Err(Error::Degree(format!("wedge of degrees {j} and {k} exceeds 3")));
    }
    let grid = *f.grid();
    let a = f.components();
    let b = g.components();
    let comps = match (j, k) {
        (0, _) => b.iter().map(|bc| mul(&a[0], bc)).collect(),
        (_, 0) => a.iter().map(|ac| mul(ac, &b[0])).collect(),
        (1, 1) => cross_arrays(a, b).to_vec(),
        (1, 2) | (2, 1) => vec![dot_arrays(a, b)],
        _ => unreachable!(),
    };
    Ok(form(grid, j + k, comps))
}

/// Interior product `ι_X f`.
pub fn contract(x: &VectorField, f: &GridField) -> Result<GridField> {
    x.grid().check_same(f.grid())?;
    let grid = *f.grid();
    let xs = x.components();
    let a = f.components();
    let comps = match f.degree() {
        0 => return Err(Error::Degree("cannot contract a 0-form".into())),
        1 => vec![dot_arrays(xs, a)],
        2 => cross_arrays(a, xs).to_vec(),
        3 => xs.iter().map(|xc| mul(xc, &a[0])).collect(),
        _ => unreachable!(),
    };
    Ok(form(grid, f.degree() - 1, comps))
}

/// `ι_{ξ1∧ξ2} ν = ν(ξ1, ξ2, ·) = (ξ1 × ξ2)♭`, computed by two contractions.
pub fn contract_pair_volume(x1: &VectorField, x2: &VectorField) -> Result<GridField> {
    let nu = volume_form(*x1.grid());
    contract(x2, &contract(x1, &nu)?)
}

/// Lie derivative by Cartan's formula `ℒ_X = d ι_X + ι_X d`.
pub fn lie_derivative(x: &VectorField, f: &GridField) -> Result<GridField> {
    x.grid().check_same(f.grid())?;
    let k = f.degree();
    let first = if k == 0 { None } else { Some(ext_d(&contract(x, f)?)?) };
    let second = if k == 3 { None } else { Some(contract(x, &ext_d(f)?)?) };
    match (first, second) {
        (Some(a), Some(b)) => a.add(&b),
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => unreachable!(),
    }
}

/// `L²` inner product `Σ_c ∫ f_c g_c` by the midpoint rule.
pub fn inner(f: &GridField, g: &GridField) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    if f.degree() != g.degree() {
        return Err(Error::Degree("inner product needs equal degrees".into()));
    }
    Ok(pairing(f.components(), g.components()) * f.grid().cell_volume())
}

/// `∫ f` of a 3-form by the midpoint rule.
pub fn integrate(f: &GridField) -> Result<f64> {
    expect_degree(f, 3)?;
    Ok(det_sum(f.component(0).iter().copied()) * f.grid().cell_volume())
}

fn pairing<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| det_sum(x.as_ref().iter().zip(y.as_ref()).map(|(p, q)| p * q)))
        .sum()
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn cross_arrays<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> [Vec<f64>; 3] {
    let (a0, a1, a2) = (a[0].as_ref(), a[1].as_ref(), a[2].as_ref());
    let (b0, b1, b2) = (b[0].as_ref(), b[1].as_ref(), b[2].as_ref());
    let n = a0.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        out[0][i] = a1[i] * b2[i] - a2[i] * b1[i];
        out[1][i] = a2[i] * b0[i] - a0[i] * b2[i];
        out[2][i] = a0[i] * b1[i] - a1[i] * b0[i];
    }
    out
}

fn dot_arrays<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> Vec<f64> {
    let n = a[0].as_ref().len();
    (0..n)
        .map(|i| (0..3).map(|c| a[c].as_ref()[i] * b[c].as_ref()[i]).sum())
        .collect()
}

/// Pointwise cross product.
pub fn cross(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    a.grid().check_same(b.grid())?;
    Ok(VectorField::from_components(*a.grid(), cross_arrays(a.components(), b.components()))?)
}

/// Pointwise dot product.
pub fn dot(a: &VectorField, b: &VectorField) -> Result<Vec<f64>> {
    a.grid().check_same(b.grid())?;
    Ok(dot_arrays(a.components(), b.components()))
}

pub fn curl(x: &VectorField) -> VectorField {
    vector(*x.grid(), spectral::apply(x.grid(), &vrefs(x), 3, curl_modes))
}

pub fn div(x: &VectorField) -> Vec<f64> {
    spectral::apply(x.grid(), &vrefs(x), 1, div_modes).remove(0)
}

pub fn grad(f: &[f64], grid: &Grid3) -> VectorField {
    vector(*grid, spectral::apply(grid, &[f], 3, grad_modes))
}

/// `‖div ξ‖∞ / ‖ξ‖∞` (0 for the zero field).
pub fn divergence_defect(x: &VectorField) -> f64 {
    let m = x.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    max_abs_all(&[div(x)]) / m
}

/// Fails with `NotDivergenceFree` above `eps_div`.
pub fn check_solenoidal(x: &VectorField, eps_div: f64) -> Result<()> {
    let relative = divergence_defect(x);
    if relative > eps_div {
        Err(Error::NotDivergenceFree { relative, tolerance: eps_div })
    } else {
        Ok(())
    }
}

/// Removes the gradient part (Leray projection); the mean is kept.
pub fn leray_project(x: &VectorField) -> VectorField {
    let comps = spectral::apply(x.grid(), &vrefs(x), 3, |k, a, o| {
        let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if s > 0.0 {
            let kd = (k[0] * a[0] + k[1] * a[1] + k[2] * a[2]) / s;
            for c in 0..3 {
                o[c] = a[c] - kd * k[c];
            }
        } else {
            o[..3].copy_from_slice(&a[..3]);
        }
    });
    vector(*x.grid(), comps)
}

/// Leray projection with the mean removed: the divergence-free, zero-mean part.
pub fn solenoidal_part(x: &VectorField) -> VectorField {
    let comps = spectral::apply(x.grid(), &vrefs(x), 3, |k, a, o| {
        let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if s > 0.0 {
            let kd = (k[0] * a[0] + k[1] * a[1] + k[2] * a[2]) / s;
            for c in 0..3 {
                o[c] = a[c] - kd * k[c];
            }
        }
    });
    vector(*x.grid(), comps)
}

/// Coulomb-gauge vector potential with the default tolerances.
pub fn curl_inv(b: &VectorField) -> Result<VectorField> {
    curl_inv_tol(b, EPS_DIV, EPS_HARM)
}

/// `B̂ = i k × b̂ / |k|²`, zero mode zero.
pub fn curl_inv_tol(b: &VectorField, eps_div: f64, eps_harm: f64) -> Result<VectorField> {
    check_solenoidal(b, eps_div)?;
    let scale = b.max_abs();
    let mean = b.mean().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if mean > eps_harm * scale {
        return Err(Error::NonzeroMean { mean });
    }
    let comps = spectral::apply(b.grid(), &vrefs(b), 3, |k, a, o| {
        let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if s > 0.0 {
            curl_modes(k, a, o);
            for c in o.iter_mut().take(3) {
                *c /= s;
            }
        } else {
            o[..3].iter_mut().for_each(|c| *c = ZERO);
        }
    });
    Ok(vector(*b.grid(), comps))
}
