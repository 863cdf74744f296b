use super::curve::{PlanarCurve, PolygonalCurve};
use super::linking::INTERSECT_TOL;
use super::tube::{disc_dual_impl, tube_2form, DiscBoundary, TubeParams};
use crate::error::{Error, Result};
use crate::grid::{alpha_inv, curl_inv, ext_d, musical, solenoidal_part, GridField, Grid3, VectorField};

/// A link component: a planar ellipse/circle or a general polygon.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Planar(PlanarCurve),
    Polygon(PolygonalCurve),
}

impl Component {
    pub fn polygon(&self) -> &PolygonalCurve {
        match self {
            Component::Planar(p) => p.polygon(),
            Component::Polygon(p) => p,
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Component::Planar(p) => Component::Planar(p.reversed()),
            Component::Polygon(p) => Component::Polygon(p.reversed()),
        }
    }

    pub(crate) fn disc_boundary(&self) -> DiscBoundary<'_> {
        match self {
            Component::Planar(p) => DiscBoundary::Planar(p),
            Component::Polygon(p) => DiscBoundary::Polygon(p),
        }
    }
}

/// An oriented link with a common tube cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    components: Vec<Component>,
    tube: TubeParams,
}

impl Link {
    /// Requires pairwise distances above `2r`.
    pub fn new(components: Vec<Component>, tube: TubeParams) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("a link needs at least one component".into()));
        }
        let link = Self { components, tube };
        let d = link.min_distance();
        let diam = link.components.iter().map(|c| c.polygon().diameter()).fold(0.0, f64::max);
        if d <= INTERSECT_TOL * diam {
            return Err(Error::CurvesIntersect { distance: d });
        }
        if d <= 2.0 * tube.radius {
            return Err(Error::TubeOverlap { radius: tube.radius, distance: d });
        }
        Ok(link)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn tube(&self) -> &TubeParams {
        &self.tube
    }

    pub fn polygon(&self, i: usize) -> &PolygonalCurve {
        self.components[i].polygon()
    }

    /// Smallest distance between two distinct components (infinite for knots).
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(self.polygon(i).min_distance(self.polygon(j)));
            }
        }
        best
    }

    /// Checks the tube against the grid and the component spacing.
    pub fn validate(&self, grid: &Grid3) -> Result<()> {
        self.tube.validate(grid, self.min_distance())
    }

    /// True when every vertex lies in the central half of the box.
    pub fn in_central_half_box(&self, grid: &Grid3) -> bool {
        let lo = grid.origin() + 0.25 * grid.length();
        let hi = grid.origin() + 0.75 * grid.length();
        self.components
            .iter()
            .flat_map(|c| c.polygon().vertices())
            .all(|p| p.iter().all(|&x| x >= lo && x <= hi))
    }

    pub fn with_component_reversed(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.components[i] = out.components[i].reversed();
        out
    }

    pub fn with_flux(&self, flux: f64) -> Self {
        Self { tube: self.tube.with_flux(flux), ..self.clone() }
    }

    pub fn tube_forms(&self, grid: &Grid3) -> Result<Vec<GridField>> {
        self.components
            .iter()
            .map(|c| tube_2form(c.polygon(), &self.tube, grid))
            .collect()
    }

    /// `ω_L = Σ ω_{L_i}`.
    pub fn vorticity(&self, grid: &Grid3) -> Result<GridField> {
        sum_forms(self.tube_forms(grid)?)
    }

    /// Disc duals `v_i`; components must be planar.
    pub fn disc_duals(&self, grid: &Grid3) -> Result<Vec<GridField>> {
        self.components
            .iter()
            .map(|c| disc_dual_impl(c.disc_boundary(), &self.tube, grid))
            .collect()
    }

    /// The Hamiltonian vector field of `v_L`: `ξ_L = -α⁻¹(ω_L)`.
    pub fn hamiltonian_field(&self, grid: &Grid3) -> Result<VectorField> {
        Ok(alpha_inv(&self.vorticity(grid)?)?.scale(-1.0))
    }
}

pub(crate) fn sum_forms(forms: Vec<GridField>) -> Result<GridField> {
    let mut it = forms.into_iter();
    let mut acc = it.next().ok_or_else(|| Error::Invalid("empty sum".into()))?;
    for f in it {
        acc = acc.add(&f)?;
    }
    Ok(acc)
}

/// `∫ v ∧ w` of a 1-form and a 2-form.
pub fn helicity(v: &GridField, w: &GridField) -> Result<f64> {
    crate::grid::integrate(&crate::grid::wedge(v, w)?)
}

/// Helicity of the tube link: `∫ v_L ∧ ω_L` with `v_L = B♭`, `curl B = ξ`.
///
/// The sampled filament field is projected onto its solenoidal part first; planar components
/// contribute no self-helicity (framing 0).
pub fn link_helicity(link: &Link, grid: &Grid3) -> Result<f64> {
    link.validate(grid)?;
    let w = link.vorticity(grid)?;
    let xi = solenoidal_part(&alpha_inv(&w)?);
    let b = curl_inv(&xi)?;
    helicity(&musical(&b), &crate::grid::alpha(&xi))
}

/// `‖dv_L + ι_{ξ_L} ν‖₂ / ‖ι_{ξ_L} ν‖₂` for the disc duals and tube forms.
pub fn poincare_dual_residual(link: &Link, grid: &Grid3) -> Result<f64> {
    let v = sum_forms(link.disc_duals(grid)?)?;
    let xi = link.hamiltonian_field(grid)?;
    let ixi = crate::grid::alpha(&xi);
    let r = ext_d(&v)?.add(&ixi)?;
    Ok(r.l2_norm() / ixi.l2_norm())
}
