use super::curve::{polygon_plane, PlanarCurve, PolygonalCurve, Vec3};
use crate::error::{Error, Result};
use crate::grid::{alpha, ext_d, GridField, Grid3, Interpolator, VectorField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Tube cross-section: support radius, Gaussian width `profile * radius`, flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeParams {
    pub radius: f64,
    #[serde(default = "default_profile")]
    pub profile: f64,
    #[serde(default = "default_flux")]
    pub flux: f64,
}

fn default_profile() -> f64 {
    0.22
}

fn default_flux() -> f64 {
    1.0
}

impl TubeParams {
    pub fn new(radius: f64) -> Self {
        Self { radius, profile: default_profile(), flux: default_flux() }
    }

    pub fn with_flux(self, flux: f64) -> Self {
        Self { flux, ..self }
    }

    /// Standard deviation of the Gaussian cross-section.
    pub fn sigma(&self) -> f64 {
        self.profile * self.radius
    }

    /// Checks `3h <= r <= min_distance / 3`.
    pub fn validate(&self, grid: &Grid3, min_distance: f64) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) || !(self.profile > 0.0 && self.profile <= 0.5) {
            return Err(Error::Invalid("tube radius must be positive and profile in (0, 0.5]".into()));
        }
        let min = 3.0 * grid.spacing();
        if self.radius < min * (1.0 - 1e-12) {
            return Err(Error::TubeTooThin { radius: self.radius, min });
        }
        if self.radius > min_distance / 3.0 {
            return Err(Error::TubeOverlap { radius: self.radius, distance: min_distance });
        }
        Ok(())
    }
}

/// Grid points within `reach` of the axis-aligned box `[lo, hi]`, as signed lattice indices.
fn lattice_box(grid: &Grid3, lo: Vec3, hi: Vec3, reach: f64) -> [(isize, isize); 3] {
    let h = grid.spacing();
    let o = grid.origin();
    [0, 1, 2].map(|c| {
        let a = ((lo[c] - reach - o) / h).floor() as isize;
        let b = ((hi[c] + reach - o) / h).ceil() as isize;
        (a, b)
    })
}

fn lattice_point(grid: &Grid3, i: [isize; 3]) -> Vec3 {
    let h = grid.spacing();
    let o = grid.origin();
    Vec3::new(o + i[0] as f64 * h, o + i[1] as f64 * h, o + i[2] as f64 * h)
}

/// Adds sparse per-segment contributions in a fixed order.
fn scatter(grid: &Grid3, parts: Vec<Vec<(usize, [f64; 3])>>) -> [Vec<f64>; 3] {
    let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for part in parts {
        for (idx, v) in part {
            for c in 0..3 {
                out[c][idx] += v[c];
            }
        }
    }
    out
}

/// Smeared filament field `ξ = flux · Σ_seg t̂ ∫_seg G_σ(x - s) ds`.
///
/// `G_σ` is the normalised 3D Gaussian; each segment contributes only where the
/// distance to that segment is below the tube radius.
pub fn tube_field(c: &PolygonalCurve, p: &TubeParams, grid: &Grid3) -> VectorField {
    let sigma = p.sigma();
    let r = p.radius;
    let norm2 = 1.0 / (2.0 * PI * sigma * sigma);
    let parts: Vec<Vec<(usize, [f64; 3])>> = (0..c.len())
        .into_par_iter()
        .map(|i| {
            let (a, b) = c.segment(i);
            let d = b - a;
            let len = d.norm();
            let t = d / len;
            let lo = a.inf(&b);
            let hi = a.sup(&b);
            let bx = lattice_box(grid, lo, hi, r);
            let mut local = Vec::new();
            for ix in bx[0].0..=bx[0].1 {
                for iy in bx[1].0..=bx[1].1 {
                    for iz in bx[2].0..=bx[2].1 {
                        let x = lattice_point(grid, [ix, iy, iz]);
                        let w = x - a;
                        let u = w.dot(&t);
                        let perp2 = (w.norm_squared() - u * u).max(0.0);
                        let uc = u.clamp(0.0, len);
                        let dist2 = perp2 + (u - uc) * (u - uc);
                        if dist2 >= r * r {
                            continue;
                        }
                        let along = 0.5
                            * (libm::erf(u / (SQRT_2 * sigma)) - libm::erf((u - len) / (SQRT_2 * sigma)));
                        let val = p.flux * norm2 * (-perp2 / (2.0 * sigma * sigma)).exp() * along;
                        local.push((grid.wrapped_index(ix, iy, iz), [t.x * val, t.y * val, t.z * val]));
                    }
                }
            }
            local
        })
        .collect();
    VectorField::from_components(*grid, scatter(grid, parts)).expect("lengths match grid")
}

/// Poincaré-dual tube 2-form `α(ξ)` of a curve.
pub fn tube_2form(c: &PolygonalCurve, p: &TubeParams, grid: &Grid3) -> Result<GridField> {
    let min = 3.0 * grid.spacing();
    if p.radius < min * (1.0 - 1e-12) {
        return Err(Error::TubeTooThin { radius: p.radius, min });
    }
    Ok(alpha(&tube_field(c, p, grid)))
}

/// Scale-free closedness defect of a 2-form: `‖dω‖∞ / max_c ‖∂_c ω_c‖∞`.
pub fn closedness_defect(w: &GridField) -> Result<f64> {
    let dw = ext_d(w)?;
    let mut scale = 0.0_f64;
    for c in 0..3 {
        let mut single = vec![vec![0.0; w.grid().len()]; 3];
        single[c] = w.component(c).to_vec();
        let part = ext_d(&GridField::from_components(*w.grid(), 2, single)?)?;
        scale = scale.max(part.max_abs());
    }
    Ok(if scale == 0.0 { 0.0 } else { dw.max_abs() / scale })
}

/// Four-point Gauss–Legendre nodes and weights on `[0, 1]`.
const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// Indicator of a planar polygon convolved with the 2D Gaussian, at `q`.
///
/// Uses `χ(q) = ∮ M(ρ) (y - q)·n_out / ρ² dl` with
/// `M(ρ) = (1 - exp(-ρ²/2σ²)) / 2π`; the integrand is bounded.
fn smoothed_indicator(q: Vec3, poly: &[(Vec3, Vec3)], normal: Vec3, sigma: f64) -> f64 {
    let two_s2 = 2.0 * sigma * sigma;
    let mut acc = 0.0;
    for &(a, b) in poly {
        let d = b - a;
        let nout = d.cross(&normal);
        for &(x, w) in &GL4 {
            let y = a + d * x;
            let r = y - q;
            let rho2 = r.norm_squared();
            let m = if rho2 < 1e-8 * two_s2 {
                1.0 / two_s2
            } else {
                -(-rho2 / two_s2).exp_m1() / rho2
            };
            acc += w * m * r.dot(&nout);
        }
    }
    acc / (2.0 * PI)
}

/// Plane data of a disc boundary.
pub(crate) fn disc_frame(c: &DiscBoundary<'_>) -> Result<(Vec3, Vec3)> {
    match c {
        DiscBoundary::Planar(p) => Ok((p.center(), p.normal())),
        DiscBoundary::Polygon(p) => polygon_plane(p),
    }
}

/// A disc boundary: a planar curve or a planar polygon.
#[derive(Debug, Clone, Copy)]
pub enum DiscBoundary<'a> {
    Planar(&'a PlanarCurve),
    Polygon(&'a PolygonalCurve),
}

impl DiscBoundary<'_> {
    fn polygon(&self) -> &PolygonalCurve {
        match self {
            DiscBoundary::Planar(p) => p.polygon(),
            DiscBoundary::Polygon(p) => p,
        }
    }
}

/// Seifert-disc dual `v = flux · χ(in-plane) · g_σ(n) dn`.
///
/// `χ` is the disc indicator smoothed by the same Gaussian as the tube and `g_σ`
/// the 1D Gaussian in the normal offset `n`, cut off at `|n| >= r`; the boundary
/// runs counter-clockwise about the normal, so `dv` equals the tube 2-form.
pub fn disc_dual_1form(c: &PlanarCurve, p: &TubeParams, grid: &Grid3) -> Result<GridField> {
    disc_dual_impl(DiscBoundary::Planar(c), p, grid)
}

/// [`disc_dual_1form`] for a planar polygon.
pub fn polygon_disc_dual_1form(c: &PolygonalCurve, p: &TubeParams, grid: &Grid3) -> Result<GridField> {
    disc_dual_impl(DiscBoundary::Polygon(c), p, grid)
}

pub(crate) fn disc_dual_impl(c: DiscBoundary<'_>, p: &TubeParams, grid: &Grid3) -> Result<GridField> {
    let (center, normal) = disc_frame(&c)?;
    let poly = c.polygon();
    let segs: Vec<(Vec3, Vec3)> = poly.segments().collect();
    let sigma = p.sigma();
    let r = p.radius;
    let norm1 = p.flux / ((2.0 * PI).sqrt() * sigma);
    let (lo, hi) = poly.bounds();
    let bx = lattice_box(grid, Vec3::from(lo), Vec3::from(hi), r);
    let xs: Vec<isize> = (bx[0].0..=bx[0].1).collect();
    let parts: Vec<Vec<(usize, [f64; 3])>> = xs
        .par_iter()
        .map(|&ix| {
            let mut local = Vec::new();
            for iy in bx[1].0..=bx[1].1 {
                for iz in bx[2].0..=bx[2].1 {
                    let x = lattice_point(grid, [ix, iy, iz]);
                    let n = (x - center).dot(&normal);
                    if n.abs() >= r {
                        continue;
                    }
                    let q = x - normal * n;
                    let chi = smoothed_indicator(q, &segs, normal, sigma);
                    if chi < 0.5 && poly.distance_to_point(q) >= r {
                        continue;
                    }
                    let val = norm1 * (-n * n / (2.0 * sigma * sigma)).exp() * chi;
                    local.push((grid.wrapped_index(ix, iy, iz), [normal.x * val, normal.y * val, normal.z * val]));
                }
            }
            local
        })
        .collect();
    let comps = scatter(grid, parts);
    GridField::from_components(*grid, 1, comps.to_vec())
}

/// Flux of a 2-form through the flat disc `{center + ρ(cos θ e1 + sin θ e2)}`, `ρ <= radius`,
/// oriented by `normal`; midpoint rule in polar coordinates with trilinear interpolation.
pub fn flux_through_disc(w: &GridField, center: [f64; 3], normal: [f64; 3], radius: f64) -> Result<f64> {
    if w.degree() != 2 {
        return Err(Error::Degree("flux needs a 2-form".into()));
    }
    let n = Vec3::from(normal).normalize();
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - n * helper.dot(&n)).normalize();
    let e2 = n.cross(&e1);
    let c = Vec3::from(center);
    let h = w.grid().spacing();
    let nr = ((radius / h) * 8.0).ceil().max(16.0) as usize;
    let nt = (nr * 8).max(64);
    let it = Interpolator::new(*w.grid());
    let dr = radius / nr as f64;
    let dt = 2.0 * PI / nt as f64;
    let rows: Vec<f64> = (0..nr)
        .into_par_iter()
        .map(|i| {
            let rho = (i as f64 + 0.5) * dr;
            let mut acc = 0.0;
            for j in 0..nt {
                let th = (j as f64 + 0.5) * dt;
                let x = c + e1 * (rho * th.cos()) + e2 * (rho * th.sin());
                let v = it.sample3(w.components(), x.into());
                acc += Vec3::from(v).dot(&n);
            }
            acc * rho * dr * dt
        })
        .collect();
    Ok(crate::grid::det_sum(rows.into_iter()))
}
