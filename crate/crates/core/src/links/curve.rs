use crate::error::{Error, Result};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Vec3 = Vector3<f64>;

pub(crate) fn v3(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

/// Minimum vertex count of a curve.
pub const MIN_VERTICES: usize = 8;

/// An oriented closed polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalCurve {
    vertices: Vec<[f64; 3]>,
}

impl PolygonalCurve {
    pub fn new(vertices: Vec<[f64; 3]>) -> Result<Self> {
        if vertices.len() < MIN_VERTICES {
            return Err(Error::InvalidCurve(format!(
                "need at least {MIN_VERTICES} vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite vertex".into()));
        }
        let m = vertices.len();
        for i in 0..m {
            if vertices[i] == vertices[(i + 1) % m] {
                return Err(Error::InvalidCurve(format!("vertices {i} and {} coincide", (i + 1) % m)));
            }
        }
        Ok(Self { vertices })
    }

    /// From an explicit path whose last vertex must repeat the first.
    pub fn from_closed_path(mut path: Vec<[f64; 3]>) -> Result<Self> {
        let (first, last) = match (path.first(), path.last()) {
            (Some(f), Some(l)) if path.len() > 1 => (v3(*f), v3(*l)),
            _ => return Err(Error::OpenCurve("empty path".into())),
        };
        let gap = (first - last).norm();
        let scale = path.iter().map(|p| v3(*p).norm()).fold(1.0, f64::max);
        if gap > 1e-12 * scale {
            return Err(Error::OpenCurve(format!("end point is {gap:.3e} away from the start")));
        }
        path.pop();
        Self::new(path)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        v3(self.vertices[i % self.vertices.len()])
    }

    /// Segment `i` as `(start, end)`.
    pub fn segment(&self, i: usize) -> (Vec3, Vec3) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        (0..self.len()).map(move |i| self.segment(i))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }

    pub fn translated(&self, by: [f64; 3]) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|p| [p[0] + by[0], p[1] + by[1], p[2] + by[2]])
            .collect();
        Self { vertices }
    }

    /// Mirror image under `z -> -z`.
    pub fn mirrored(&self) -> Self {
        let vertices = self.vertices.iter().map(|p| [p[0], p[1], -p[2]]).collect();
        Self { vertices }
    }

    /// Rotation by a proper orthogonal matrix about the origin.
    pub fn rotated(&self, r: &nalgebra::Matrix3<f64>) -> Self {
        let vertices = self.vertices.iter().map(|p| (r * v3(*p)).into()).collect();
        Self { vertices }
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (v3(hi) - v3(lo)).norm()
    }

    /// Distance from a point to the polygon.
    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum distance between the two polygons.
    pub fn min_distance(&self, other: &PolygonalCurve) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            for (c, d) in other.segments() {
                best = best.min(segment_distance(a, b, c, d));
            }
        }
        best
    }
}

pub(crate) fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance between segments `[p1,q1]` and `[p2,q2]`.
pub(crate) fn segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-14 * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// A circle or ellipse in a plane, with a polygonal realization.
///
/// The boundary is `center + a cos t · u + b sin t · w`, `t` increasing, with
/// `u × w = normal`; it therefore runs counter-clockwise about the normal.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    center: Vec3,
    normal: Vec3,
    major: Vec3,
    minor: Vec3,
    semi_axes: (f64, f64),
    phase: f64,
    polygon: PolygonalCurve,
}

impl PlanarCurve {
    /// Ellipse with semi-axis `a` along `major_dir` (projected into the plane) and `b` across.
    pub fn ellipse(
        center: [f64; 3],
        normal: [f64; 3],
        major_dir: [f64; 3],
        a: f64,
        b: f64,
        samples: usize,
    ) -> Result<Self> {
        Self::with_phase(center, normal, major_dir, a, b, 0.0, samples)
    }

    pub fn circle(center: [f64; 3], normal: [f64; 3], radius: f64, samples: usize) -> Result<Self> {
        let n = v3(normal);
        let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let major = helper - n * (helper.dot(&n) / n.norm_squared());
        Self::ellipse(center, normal, major.into(), radius, radius, samples)
    }

    pub fn with_phase(
        center: [f64; 3],
        normal: [f64; 3],
        major_dir: [f64; 3],
        a: f64,
        b: f64,
        phase: f64,
        samples: usize,
    ) -> Result<Self> {
        let nn = v3(normal).norm();
        if !(nn.is_finite() && nn > 0.0) {
            return Err(Error::InvalidCurve("plane normal must be nonzero".into()));
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidCurve("semi-axes must be positive".into()));
        }
        let normal = v3(normal) / nn;
        let d = v3(major_dir);
        let major = d - normal * d.dot(&normal);
        if major.norm() < 1e-12 * d.norm().max(1.0) {
            return Err(Error::InvalidCurve("major axis is parallel to the normal".into()));
        }
        let major = major.normalize();
        let minor = normal.cross(&major);
        let center = v3(center);
        let samples = samples.max(MIN_VERTICES);
        let vertices = (0..samples)
            .map(|i| {
                let t = phase + 2.0 * PI * i as f64 / samples as f64;
                (center + major * (a * t.cos()) + minor * (b * t.sin())).into()
            })
            .collect();
        let polygon = PolygonalCurve::new(vertices)?;
        let curve = Self { center, normal, major, minor, semi_axes: (a, b), phase, polygon };
        let deviation = curve.planarity_defect();
        if deviation > 1e-12 * (a.max(b) + center.norm()) {
            return Err(Error::NotPlanar { deviation });
        }
        Ok(curve)
    }

    pub fn polygon(&self) -> &PolygonalCurve {
        &self.polygon
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn major_axis(&self) -> Vec3 {
        self.major
    }

    pub fn minor_axis(&self) -> Vec3 {
        self.minor
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        self.semi_axes
    }

    /// Largest distance of a sampled vertex from the plane.
    pub fn planarity_defect(&self) -> f64 {
        self.polygon
            .vertices()
            .iter()
            .map(|p| (v3(*p) - self.center).dot(&self.normal).abs())
            .fold(0.0, f64::max)
    }

    /// Same ellipse traversed the other way; the normal flips.
    pub fn reversed(&self) -> Self {
        let polygon = self.polygon.reversed();
        Self {
            normal: -self.normal,
            minor: -self.minor,
            polygon,
            ..self.clone()
        }
    }
}

/// Checks that a polygon lies in a plane and returns its unit normal oriented
/// so that the polygon runs counter-clockwise about it.
pub fn polygon_plane(c: &PolygonalCurve) -> Result<(Vec3, Vec3)> {
    let m = c.len();
    let centroid = (0..m).map(|i| c.vertex(i)).sum::<Vec3>() / m as f64;
    // Vector area (Newell) fixes the orientation.
    let mut area = Vec3::zeros();
    for (a, b) in c.segments() {
        area += (a - centroid).cross(&(b - centroid));
    }
    let norm = area.norm();
    if norm == 0.0 {
        return Err(Error::NotPlanar { deviation: f64::INFINITY });
    }
    let normal = area / norm;
    let deviation = (0..m)
        .map(|i| (c.vertex(i) - centroid).dot(&normal).abs())
        .fold(0.0, f64::max);
    let scale = c.diameter().max(centroid.norm()).max(1.0);
    if deviation > 1e-10 * scale {
        return Err(Error::NotPlanar { deviation });
    }
    Ok((centroid, normal))
}
