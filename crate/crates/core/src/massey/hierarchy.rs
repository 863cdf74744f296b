use super::domain::MaskedDomain;
use super::closure::{closed_extension, coexact_primitive};
use super::solve::{period_gate, solve_masked_shifted, SolveParams};
use crate::error::{Error, Result};
use crate::grid::{
    alpha_inv, contract, contract_pair_volume, ext_d, grad, lie_derivative, wedge, GridField, VectorField,
};
use crate::links::{Link, PolygonalCurve};
use serde::Serialize;
use std::collections::BTreeMap;

/// A multi-index written as its digits, e.g. `"12"`.
pub type MultiIndex = String;

fn key(i: &[usize]) -> MultiIndex {
    i.iter().map(|d| d.to_string()).collect()
}

/// `‖mask·dΩ‖₂ / ‖dΩ‖₂` (0 for closed forms).
pub fn masked_closedness(omega: &GridField, dom: &MaskedDomain) -> Result<f64> {
    let d = ext_d(omega)?;
    let full = d.l2_norm();
    Ok(if full == 0.0 { 0.0 } else { dom.masked_norm(&d) / full })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormCertificate {
    /// Periods over the meridian tori `∂T_1, …, ∂T_n`.
    pub periods: Vec<f64>,
    pub masked_closedness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveCertificate {
    /// `‖mask·(dv + Ω)‖₂ / ‖mask·Ω‖₂`.
    pub residual: f64,
    pub iterations: usize,
    pub cg_residual: f64,
}

/// Disc duals `v_i`, obstruction forms `Ω_I` and solved primitives `v_I` on a masked domain.
///
/// Component indices are 1-based; `Ω_i` is the tube form of component `i`.
#[derive(Debug, Clone)]
pub struct MasseyHierarchy {
    domain: MaskedDomain,
    params: SolveParams,
    curves: Vec<PolygonalCurve>,
    v: BTreeMap<MultiIndex, GridField>,
    omega: BTreeMap<MultiIndex, GridField>,
    form_certs: BTreeMap<MultiIndex, FormCertificate>,
    primitive_certs: BTreeMap<MultiIndex, PrimitiveCertificate>,
}

impl MasseyHierarchy {
    pub fn new(link: &Link, domain: MaskedDomain, params: SolveParams) -> Result<Self> {
        let grid = *domain.grid();
        let duals = link.disc_duals(&grid)?;
        let tubes = link.tube_forms(&grid)?;
        let mut h = Self {
            domain,
            params,
            curves: link.components().iter().map(|c| c.polygon().clone()).collect(),
            v: BTreeMap::new(),
            omega: BTreeMap::new(),
            form_certs: BTreeMap::new(),
            primitive_certs: BTreeMap::new(),
        };
        for (i, (v, w)) in duals.into_iter().zip(tubes).enumerate() {
            h.v.insert(key(&[i + 1]), v);
            h.omega.insert(key(&[i + 1]), w);
        }
        Ok(h)
    }

    pub fn domain(&self) -> &MaskedDomain {
        &self.domain
    }

    pub fn params(&self) -> &SolveParams {
        &self.params
    }

    pub fn components(&self) -> usize {
        self.domain.tori().len()
    }

    pub fn v(&self, idx: &str) -> Result<&GridField> {
        self.v.get(idx).ok_or_else(|| Error::MissingPrimitive(idx.to_string()))
    }

    pub fn omega(&self, idx: &str) -> Option<&GridField> {
        self.omega.get(idx)
    }

    pub fn v_indices(&self) -> Vec<MultiIndex> {
        self.v.keys().cloned().collect()
    }

    pub fn omega_indices(&self) -> Vec<MultiIndex> {
        self.omega.keys().cloned().collect()
    }

    pub fn form_certificates(&self) -> &BTreeMap<MultiIndex, FormCertificate> {
        &self.form_certs
    }

    pub fn primitive_certificates(&self) -> &BTreeMap<MultiIndex, PrimitiveCertificate> {
        &self.primitive_certs
    }

    /// Replaces a stored primitive (gauge experiments).
    pub fn set_v(&mut self, idx: &str, v: GridField) {
        self.v.insert(idx.to_string(), v);
    }

    fn store_form(&mut self, idx: MultiIndex, om: GridField) -> Result<&GridField> {
        let cert = FormCertificate {
            periods: self.domain.periods(&om)?,
            masked_closedness: masked_closedness(&om, &self.domain)?,
        };
        self.form_certs.insert(idx.clone(), cert);
        self.omega.insert(idx.clone(), om);
        Ok(&self.omega[&idx])
    }

    fn check_component(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.components() {
            return Err(Error::Invalid(format!("component {i} out of range 1..={}", self.components())));
        }
        Ok(())
    }

    /// `Ω_ij = v_i ∧ v_j`, stored with its periods and masked closedness.
    pub fn obstruction_form(&mut self, i: usize, j: usize) -> Result<&GridField> {
        self.check_component(i)?;
        self.check_component(j)?;
        let om = wedge(self.v(&key(&[i]))?, self.v(&key(&[j]))?)?;
        self.store_form(key(&[i, j]), om)
    }

    /// Solves `dv_ij + Ω_ij = 0` after the period gate.
    pub fn solve_pair(&mut self, i: usize, j: usize) -> Result<&PrimitiveCertificate> {
        let idx = key(&[i, j]);
        if !self.omega.contains_key(&idx) {
            self.obstruction_form(i, j)?;
        }
        let om = &self.omega[&idx];
        period_gate(om, &self.domain, (i, j), self.params.eps_period)?;
        let shift = if self.params.tube_closure {
            let (ki, kj) = (key(&[i]), key(&[j]));
            let closed = closed_extension(
                om,
                (self.v(&ki)?, &self.curves[i - 1], &self.omega[&ki]),
                (self.v(&kj)?, &self.curves[j - 1], &self.omega[&kj]),
                &self.domain,
            )?;
            Some(coexact_primitive(&closed)?)
        } else {
            None
        };
        let p = solve_masked_shifted(om, shift.as_ref(), &self.domain, &self.params)?;
        if p.residual >= self.params.eps_massey {
            return Err(Error::NoConvergence { iterations: p.iterations, residual: p.residual });
        }
        self.primitive_certs.insert(
            idx.clone(),
            PrimitiveCertificate { residual: p.residual, iterations: p.iterations, cg_residual: p.cg_residual },
        );
        self.v.insert(idx.clone(), p.v);
        Ok(&self.primitive_certs[&idx])
    }

    /// `Ω_123 = v_1 ∧ v_23 + v_12 ∧ v_3`.
    pub fn massey_triple(&mut self) -> Result<&GridField> {
        let a = wedge(self.v("1")?, self.v("23")?)?;
        let b = wedge(self.v("12")?, self.v("3")?)?;
        self.store_form("123".into(), a.add(&b)?)
    }

    /// Period of `Ω_123` over the meridian torus `∂T_k` (1-based).
    pub fn triple_linking(&self, k: usize) -> Result<f64> {
        self.check_component(k)?;
        let om = self.omega("123").ok_or_else(|| Error::MissingPrimitive("123".into()))?;
        self.domain.tori()[k - 1].period(om)
    }

    /// Vector field `ξ_I = α⁻¹(Ω_I)`.
    pub fn hamiltonian_field(&self, idx: &str) -> Result<VectorField> {
        alpha_inv(self.omega(idx).ok_or_else(|| Error::MissingPrimitive(idx.to_string()))?)
    }

    /// Masked residuals of `ι_ξ v_I`, `ℒ_ξ v_I` and `{v_I, v_J} = ν(ξ_I, ξ_J, ·)`.
    pub fn involution_report(&self, xi_l: &VectorField) -> Result<InvolutionReport> {
        let dom = &self.domain;
        let mut iota = BTreeMap::new();
        let mut lie = BTreeMap::new();
        for idx in self.v_indices() {
            let v = self.v(&idx)?;
            let i = contract(xi_l, v)?;
            let scale = product_norm(xi_l, v);
            iota.insert(idx.clone(), ratio(dom.masked_norm(&i), scale));
            let l = lie_derivative(xi_l, v)?;
            lie.insert(idx.clone(), ratio(dom.masked_norm(&l), l.l2_norm()));
        }
        let with_field: Vec<MultiIndex> =
            self.v_indices().into_iter().filter(|i| self.omega.contains_key(i)).collect();
        let fields: Vec<VectorField> =
            with_field.iter().map(|i| self.hamiltonian_field(i)).collect::<Result<_>>()?;
        let jacobians: Vec<[VectorField; 3]> = fields.iter().map(jacobian).collect();
        let mut bracket = BTreeMap::new();
        let mut pb_exactness = BTreeMap::new();
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                let name = format!("{},{}", with_field[a], with_field[b]);
                let pb = contract_pair_volume(&fields[a], &fields[b])?;
                let mags = pointwise_magnitude_product(&fields[a], &fields[b]);
                let scale = mags.iter().map(|x| x * x).sum::<f64>().sqrt() * dom.grid().cell_volume().sqrt();
                bracket.insert(name.clone(), ratio(dom.masked_norm(&pb), scale));
                let ab = directional(&fields[a], &jacobians[b]);
                let ba = directional(&fields[b], &jacobians[a]);
                let comm = ab.sub(&ba)?;
                pb_exactness.insert(name, ratio(dom.masked_norm(&comm), ab.l2_norm() + ba.l2_norm()));
            }
        }
        Ok(InvolutionReport { iota, lie, bracket, pb_exactness })
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Gradients of the three components.
fn jacobian(x: &VectorField) -> [VectorField; 3] {
    let c = x.components();
    [grad(&c[0], x.grid()), grad(&c[1], x.grid()), grad(&c[2], x.grid())]
}

/// `(x·∇)y` as a 1-form, from the jacobian of `y`.
fn directional(x: &VectorField, jy: &[VectorField; 3]) -> GridField {
    let g = *x.grid();
    let comps = jy
        .iter()
        .map(|gc| {
            (0..g.len())
                .map(|i| {
                    let (p, q) = (x.at(i), gc.at(i));
                    p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
                })
                .collect()
        })
        .collect();
    GridField::from_components(g, 1, comps).expect("three components")
}

fn pointwise_magnitude_product(a: &VectorField, b: &VectorField) -> Vec<f64> {
    (0..a.grid().len())
        .map(|i| {
            let (x, y) = (a.at(i), b.at(i));
            let nx = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            nx * ny
        })
        .collect()
}

/// `‖ |ξ|·|v| ‖₂` for a vector field and a 1-form.
fn product_norm(xi: &VectorField, v: &GridField) -> f64 {
    let g = xi.grid();
    let s: f64 = (0..g.len())
        .map(|i| {
            let x = xi.at(i);
            let w = v.at(i);
            let p = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
            p
        })
        .sum();
    (s * g.cell_volume()).sqrt()
}

/// Relative masked residuals of the involution checks, keyed by multi-index.
///
/// `iota` is normalised by `‖|ξ||v_I|‖₂`, `lie` by the unmasked norm of `ℒ_ξ v_I`,
/// `bracket` (keys `"I,J"`) by `‖|ξ_I||ξ_J|‖₂`. `pb_exactness` is the masked commutator
/// `[ξ_I, ξ_J]` relative to `‖(ξ_I·∇)ξ_J‖₂ + ‖(ξ_J·∇)ξ_I‖₂`; it vanishes exactly when the
/// bracket 1-form is closed, and does not see exact shifts of the `v_I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvolutionReport {
    pub iota: BTreeMap<MultiIndex, f64>,
    pub lie: BTreeMap<MultiIndex, f64>,
    pub bracket: BTreeMap<String, f64>,
    pub pb_exactness: BTreeMap<String, f64>,
}

impl InvolutionReport {
    pub fn max_iota(&self) -> f64 {
        self.iota.values().copied().fold(0.0, f64::max)
    }

    pub fn max_lie(&self) -> f64 {
        self.lie.values().copied().fold(0.0, f64::max)
    }

    pub fn max_bracket(&self) -> f64 {
        self.bracket.values().copied().fold(0.0, f64::max)
    }

    pub fn max_pb_exactness(&self) -> f64 {
        self.pb_exactness.values().copied().fold(0.0, f64::max)
    }
}

impl MasseyHierarchy {
    /// Full three-component pipeline: `Ω_12, Ω_13, Ω_23`, primitives `v_12, v_23`, then `Ω_123`.
    pub fn build(link: &Link, domain: MaskedDomain, params: SolveParams) -> Result<Self> {
        if link.components().len() != 3 {
            return Err(Error::Invalid(format!(
                "the triple product needs 3 components, got {}",
                link.components().len()
            )));
        }
        let mut h = Self::new(link, domain, params)?;
        h.obstruction_form(1, 2)?;
        h.obstruction_form(1, 3)?;
        h.obstruction_form(2, 3)?;
        h.solve_pair(1, 2)?;
        h.solve_pair(2, 3)?;
        h.massey_triple()?;
        Ok(h)
    }
}
