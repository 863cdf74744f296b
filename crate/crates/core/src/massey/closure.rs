use super::domain::{nearest_points, MaskedDomain};
use crate::error::{Error, Result};
use crate::grid::{curl_inv_tol, solenoidal_part, GridField, Interpolator, VectorField};
use crate::links::PolygonalCurve;

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// `φ` at the vertices of `c` (closing vertex repeated) with `dφ = f` along the curve.
///
/// The total `∮ f` is spread linearly so that `φ` closes up.
pub(crate) fn curve_potential(f: &GridField, c: &PolygonalCurve) -> Result<Vec<f64>> {
    if f.degree() != 1 {
        return Err(Error::Degree("curve potentials integrate 1-forms".into()));
    }
    let it = Interpolator::new(*f.grid());
    let mut phi = Vec::with_capacity(c.len() + 1);
    phi.push(0.0);
    let mut acc = 0.0;
    let mut lengths = vec![0.0];
    for (a, b) in c.segments() {
        let d = b - a;
        let mut s = 0.0;
        for &(x, w) in &GL4 {
            let p = a + d * (0.5 * (x + 1.0));
            let v = it.sample3(f.components(), p.into());
            s += 0.5 * w * (v[0] * d.x + v[1] * d.y + v[2] * d.z);
        }
        acc += s;
        phi.push(acc);
        lengths.push(lengths.last().unwrap() + d.norm());
    }
    let total = lengths[c.len()];
    for (p, l) in phi.iter_mut().zip(&lengths) {
        *p -= acc * l / total;
    }
    Ok(phi)
}

/// `φ̃ · Ω` where `φ̃` extends the curve potential of `f` constantly across the tube of `c`.
///
/// `d(φ̃ Ω) ≈ f ∧ Ω` inside the tube when `Ω` is the tube form of `c`.
pub(crate) fn tube_transport(f: &GridField, c: &PolygonalCurve, tube: &GridField, reach: f64) -> Result<GridField> {
    let phi = curve_potential(f, c)?;
    let grid = *tube.grid();
    let mut weight = vec![0.0; grid.len()];
    for p in nearest_points(c, &grid, reach) {
        weight[p.index] = phi[p.seg] + p.t * (phi[p.seg + 1] - phi[p.seg]);
    }
    Ok(tube.weighted(&weight))
}

/// `v₀ = -curl⁻¹ P(Ω)` for the divergence-free, zero-mean part `P(Ω)` of a 2-form.
pub(crate) fn coexact_primitive(omega: &GridField) -> Result<GridField> {
    if omega.degree() != 2 {
        return Err(Error::Degree("primitives are solved for 2-forms".into()));
    }
    let c = omega.components();
    let b = VectorField::from_components(*omega.grid(), [c[0].clone(), c[1].clone(), c[2].clone()])?;
    let a = curl_inv_tol(&solenoidal_part(&b), f64::INFINITY, f64::INFINITY)?.scale(-1.0);
    let [x, y, z] = a.components().clone();
    GridField::from_components(*omega.grid(), 1, vec![x, y, z])
}

/// Closes `Ω_ij = v_i ∧ v_j` inside the tubes: `Ω_ij - φ_i[v_j] Ω_i + φ_j[v_i] Ω_j`.
///
/// `Ω_i` is the tube form of `c_i`; the result is closed up to the smoothing of the tubes.
pub(crate) fn closed_extension(
    omega_ij: &GridField,
    (vi, ci, wi): (&GridField, &PolygonalCurve, &GridField),
    (vj, cj, wj): (&GridField, &PolygonalCurve, &GridField),
    dom: &MaskedDomain,
) -> Result<GridField> {
    let reach = dom.r_mask();
    let a = tube_transport(vj, ci, wi, reach)?;
    let b = tube_transport(vi, cj, wj, reach)?;
    omega_ij.sub(&a)?.add(&b)
}
