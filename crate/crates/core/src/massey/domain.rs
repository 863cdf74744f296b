use crate::error::{Error, Result};
use crate::grid::{det_sum, GridField, Grid3, Interpolator};
use crate::links::{Link, PolygonalCurve, Vec3};
use rayon::prelude::*;
use std::f64::consts::PI;

/// The mask reaches 1 at `MASK_OUTER * r_mask`.
pub const MASK_OUTER: f64 = 1.5;
/// Preferred meridian-torus radius in units of `r_mask`.
pub const TORUS_FACTOR: f64 = 1.75;
/// Default number of meridional panels.
pub const TORUS_MERIDIAN_PANELS: usize = 64;

/// `0` for `d <= r`, `1` for `d >= 1.5 r`, a cubic smoothstep in between.
pub fn mask_profile(d: f64, r_mask: f64) -> f64 {
    let s = ((d - r_mask) / ((MASK_OUTER - 1.0) * r_mask)).clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// A closed quadrilateral surface around one component: `γ(s) + R(cos θ n₁ + sin θ n₂)`.
///
/// Corners are stored on a periodic `(longitude × meridian)` lattice; the orientation
/// has outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct MeridianTorus {
    radius: f64,
    n_long: usize,
    n_mer: usize,
    corners: Vec<Vec3>,
}

impl MeridianTorus {
    pub fn new(curve: &PolygonalCurve, radius: f64, meridian_panels: usize) -> Result<Self> {
        let m = curve.len();
        let nm = meridian_panels.max(8);
        let tangents: Vec<Vec3> = (0..m)
            .map(|i| (curve.vertex((i + 1) % m) - curve.vertex((i + m - 1) % m)).normalize())
            .collect();
        // Rotation-minimising frame, then spread the closure twist evenly.
        let t0 = tangents[0];
        let helper = if t0.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let mut n1 = vec![(helper - t0 * helper.dot(&t0)).normalize(); m];
        for i in 1..m {
            let t = tangents[i];
            let p = n1[i - 1] - t * n1[i - 1].dot(&t);
            if p.norm() < 1e-12 {
                return Err(Error::InvalidCurve("curve turns too sharply for a torus frame".into()));
            }
            n1[i] = p.normalize();
        }
        let back = (n1[m - 1] - t0 * n1[m - 1].dot(&t0)).normalize();
        let twist = t0.cross(&n1[0]).dot(&back).atan2(n1[0].dot(&back));
        let mut corners = Vec::with_capacity(m * nm);
        for i in 0..m {
            let t = tangents[i];
            let rot = twist * i as f64 / m as f64;
            let (a, b) = (n1[i], t.cross(&n1[i]));
            let e1 = a * rot.cos() - b * rot.sin();
            let e2 = t.cross(&e1);
            for j in 0..nm {
                let th = 2.0 * PI * j as f64 / nm as f64;
                corners.push(curve.vertex(i) + (e1 * th.cos() + e2 * th.sin()) * radius);
            }
        }
        Ok(Self { radius, n_long: m, n_mer: nm, corners })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn panels(&self) -> (usize, usize) {
        (self.n_long, self.n_mer)
    }

    fn corner(&self, i: usize, j: usize) -> Vec3 {
        self.corners[(i % self.n_long) * self.n_mer + j % self.n_mer]
    }

    /// `(centre, vector area)` of every panel, outward.
    pub fn panels_iter(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        (0..self.n_long).flat_map(move |i| {
            (0..self.n_mer).map(move |j| {
                let (p00, p10) = (self.corner(i, j), self.corner(i + 1, j));
                let (p01, p11) = (self.corner(i, j + 1), self.corner(i + 1, j + 1));
                let centre = (p00 + p10 + p01 + p11) * 0.25;
                // Meridian direction × longitude direction points outward.
                let area = (p01 - p10).cross(&(p11 - p00)) * 0.5;
                (centre, area)
            })
        })
    }

    /// Sum of the panel vector areas; zero for a closed surface.
    pub fn closure_defect(&self) -> f64 {
        let s: Vec3 = self.panels_iter().map(|(_, a)| a).sum();
        let total: f64 = self.panels_iter().map(|(_, a)| a.norm()).sum();
        s.norm() / total
    }

    /// `∫ Ω` of a 2-form over the surface: midpoint rule with trilinear interpolation.
    pub fn period(&self, omega: &GridField) -> Result<f64> {
        if omega.degree() != 2 {
            return Err(Error::Degree("periods are taken of 2-forms".into()));
        }
        let it = Interpolator::new(*omega.grid());
        let rows: Vec<f64> = (0..self.n_long)
            .into_par_iter()
            .map(|i| {
                let vals = (0..self.n_mer).map(|j| {
                    let (p00, p10) = (self.corner(i, j), self.corner(i + 1, j));
                    let (p01, p11) = (self.corner(i, j + 1), self.corner(i + 1, j + 1));
                    let centre = (p00 + p10 + p01 + p11) * 0.25;
                    let area = (p01 - p10).cross(&(p11 - p00)) * 0.5;
                    Vec3::from(it.sample3(omega.components(), centre.into())).dot(&area)
                });
                det_sum(vals)
            })
            .collect();
        Ok(det_sum(rows.into_iter()))
    }

    /// Smallest mask value at the panel centres.
    pub fn min_mask(&self, dom: &MaskedDomain) -> f64 {
        let it = Interpolator::new(dom.grid);
        self.panels_iter().map(|(c, _)| it.sample(&dom.mask, c.into())).fold(1.0, f64::min)
    }
}

/// The link complement as a weight: `mask = 0` in the tubes and `1` away from them,
/// plus one meridian torus per component.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedDomain {
    grid: Grid3,
    mask: Vec<f64>,
    r_mask: f64,
    tori: Vec<MeridianTorus>,
}

impl MaskedDomain {
    /// Torus radius `min(1.75 r_mask, d_min / 2)`; fails when that leaves no mask-free shell.
    pub fn new(link: &Link, grid: &Grid3, r_mask: f64) -> Result<Self> {
        Self::with_panels(link, grid, r_mask, TORUS_MERIDIAN_PANELS)
    }

    pub fn with_panels(link: &Link, grid: &Grid3, r_mask: f64, meridian_panels: usize) -> Result<Self> {
        if r_mask < link.tube().radius {
            return Err(Error::Invalid(format!(
                "mask radius {r_mask} is below the tube radius {}",
                link.tube().radius
            )));
        }
        let d_min = link.min_distance();
        let radius = (TORUS_FACTOR * r_mask).min(0.5 * d_min);
        if radius <= MASK_OUTER * r_mask {
            return Err(Error::Invalid(format!(
                "components at distance {d_min:.4} leave no unmasked shell for r_mask = {r_mask:.4}"
            )));
        }
        let mut mask = vec![1.0; grid.len()];
        for c in link.components() {
            for (idx, d) in near_distances(c.polygon(), grid, MASK_OUTER * r_mask) {
                mask[idx] = f64::min(mask[idx], mask_profile(d, r_mask));
            }
        }
        let tori = link
            .components()
            .iter()
            .map(|c| MeridianTorus::new(c.polygon(), radius, meridian_panels))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid: *grid, mask, r_mask, tori })
    }

    /// Unmasked domain with no tori (for manufactured tests).
    pub fn unmasked(grid: &Grid3) -> Self {
        Self { grid: *grid, mask: vec![1.0; grid.len()], r_mask: 0.0, tori: Vec::new() }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    pub fn r_mask(&self) -> f64 {
        self.r_mask
    }

    pub fn tori(&self) -> &[MeridianTorus] {
        &self.tori
    }

    /// `‖mask · f‖₂` (grid sum scaled by the cell volume).
    pub fn masked_norm(&self, f: &GridField) -> f64 {
        f.weighted(&self.mask).l2_norm()
    }

    pub fn periods(&self, omega: &GridField) -> Result<Vec<f64>> {
        self.tori.iter().map(|t| t.period(omega)).collect()
    }
}

/// `(index, distance)` for every lattice point within `reach` of the polygon, nearest segment.
fn near_distances(c: &PolygonalCurve, grid: &Grid3, reach: f64) -> Vec<(usize, f64)> {
    near_points(c, grid, reach).into_iter().map(|p| (p.index, p.distance)).collect()
}

/// A lattice point near a polygon with its foot point `segment(seg)` at parameter `t`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NearPoint {
    pub index: usize,
    pub distance: f64,
    pub seg: usize,
    pub t: f64,
}

/// Every lattice point within `reach` of some segment, once per segment (unsorted).
pub(crate) fn near_points(c: &PolygonalCurve, grid: &Grid3, reach: f64) -> Vec<NearPoint> {
    let h = grid.spacing();
    let o = grid.origin();
    let parts: Vec<Vec<NearPoint>> = (0..c.len())
        .into_par_iter()
        .map(|i| {
            let (a, b) = c.segment(i);
            let lo = a.inf(&b);
            let hi = a.sup(&b);
            let rng = |k: usize| {
                (((lo[k] - reach - o) / h).floor() as isize, ((hi[k] + reach - o) / h).ceil() as isize)
            };
            let (bx, by, bz) = (rng(0), rng(1), rng(2));
            let mut local = Vec::new();
            for ix in bx.0..=bx.1 {
                for iy in by.0..=by.1 {
                    for iz in bz.0..=bz.1 {
                        let p = Vec3::new(o + ix as f64 * h, o + iy as f64 * h, o + iz as f64 * h);
                        let (d, t) = point_segment(p, a, b);
                        if d < reach {
                            local.push(NearPoint { index: grid.wrapped_index(ix, iy, iz), distance: d, seg: i, t });
                        }
                    }
                }
            }
            local
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Nearest foot point per lattice point within `reach`, sorted by index.
pub(crate) fn nearest_points(c: &PolygonalCurve, grid: &Grid3, reach: f64) -> Vec<NearPoint> {
    let mut all = near_points(c, grid, reach);
    all.sort_by(|p, q| p.index.cmp(&q.index).then(p.distance.total_cmp(&q.distance)).then(p.seg.cmp(&q.seg)));
    all.dedup_by_key(|p| p.index);
    all
}

fn point_segment(p: Vec3, a: Vec3, b: Vec3) -> (f64, f64) {
    let d = b - a;
    let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    ((p - a - d * t).norm(), t)
}
