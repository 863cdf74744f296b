use super::curve::{PolygonalCurve, Vec3};
use crate::error::{Error, Result};
use crate::grid::det_sum;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::f64::consts::PI;

/// Four-point Gauss–Legendre nodes and weights on `[0, 1]`.
const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// Stop refining when successive dyadic levels differ by less than this.
pub const GAUSS_REFINE_TOL: f64 = 1e-4;
const GAUSS_MAX_LEVEL: u32 = 5;

/// Below this curve distance (relative to the diameter) curves count as intersecting.
pub const INTERSECT_TOL: f64 = 1e-9;
/// Minimum transversality angle of a projected crossing, radians.
pub const MIN_CROSSING_ANGLE: f64 = 1e-3;
/// Minimum crossing separation relative to the diameter.
pub const MIN_CROSSING_SEPARATION: f64 = 1e-3;

struct Nodes {
    pos: Vec<Vec3>,
    dr: Vec<Vec3>,
    seg: Vec<usize>,
}

fn nodes(c: &PolygonalCurve, level: u32) -> Nodes {
    let pieces = 1usize << level;
    let mut out = Nodes { pos: Vec::new(), dr: Vec::new(), seg: Vec::new() };
    for (i, (a, b)) in c.segments().enumerate() {
        let d = b - a;
        for p in 0..pieces {
            for &(x, w) in &GL4 {
                let s = (p as f64 + x) / pieces as f64;
                out.pos.push(a + d * s);
                out.dr.push(d * (w / pieces as f64));
                out.seg.push(i);
            }
        }
    }
    out
}

fn gauss_sum(a: &Nodes, b: &Nodes, skip: Option<usize>) -> f64 {
    let rows: Vec<f64> = (0..a.pos.len())
        .into_par_iter()
        .map(|p| {
            let terms = (0..b.pos.len()).filter_map(|q| {
                if let Some(m) = skip {
                    let (i, j) = (a.seg[p], b.seg[q]);
                    let gap = i.abs_diff(j);
                    if gap <= 1 || gap == m - 1 {
                        return None;
                    }
                }
                let r = a.pos[p] - b.pos[q];
                let n = r.norm();
                Some(r.dot(&a.dr[p].cross(&b.dr[q])) / (n * n * n))
            });
            det_sum(terms)
        })
        .collect();
    det_sum(rows.into_iter()) / (4.0 * PI)
}

fn refine<F: Fn(u32) -> f64>(f: F) -> f64 {
    let mut prev = f(0);
    for level in 1..=GAUSS_MAX_LEVEL {
        let next = f(level);
        if (next - prev).abs() < GAUSS_REFINE_TOL * next.abs().max(1.0) {
            return next;
        }
        prev = next;
    }
    prev
}

fn curve_order(a: &PolygonalCurve, b: &PolygonalCurve) -> Ordering {
    let flat = |c: &PolygonalCurve| c.vertices().iter().flatten().copied().collect::<Vec<f64>>();
    let (x, y) = (flat(a), flat(b));
    for (p, q) in x.iter().zip(&y) {
        match p.total_cmp(q) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    x.len().cmp(&y.len())
}

/// Gauss linking integral by dyadically refined Gauss–Legendre quadrature.
///
/// Arguments are put in a canonical order first, so the result is
/// bitwise symmetric.
pub fn gauss_linking(c1: &PolygonalCurve, c2: &PolygonalCurve) -> Result<f64> {
    let distance = c1.min_distance(c2);
    if distance <= INTERSECT_TOL * c1.diameter().max(c2.diameter()) {
        return Err(Error::CurvesIntersect { distance });
    }
    let (a, b) = match curve_order(c1, c2) {
        Ordering::Greater => (c2, c1),
        _ => (c1, c2),
    };
    Ok(refine(|level| gauss_sum(&nodes(a, level), &nodes(b, level), None)))
}

/// Writhe: Gauss self-integral over non-adjacent segment pairs.
pub fn writhe(c: &PolygonalCurve) -> f64 {
    let m = c.len();
    refine(|level| {
        let n = nodes(c, level);
        gauss_sum(&n, &n, Some(m))
    })
}

/// Orthonormal `(e1, e2)` with `e1 × e2 = d` for a projection direction.
pub fn projection_frame(direction: [f64; 3]) -> Result<(Vec3, Vec3, Vec3)> {
    let d = Vec3::new(direction[0], direction[1], direction[2]);
    let n = d.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::DegenerateProjection("zero projection direction".into()));
    }
    let d = d / n;
    let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - d * helper.dot(&d)).normalize();
    let e2 = d.cross(&e1);
    Ok((e1, e2, d))
}

/// One crossing of a projected diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Segment and parameter on the first strand.
    pub seg_a: usize,
    pub s: f64,
    /// Segment and parameter on the second strand.
    pub seg_b: usize,
    pub t: f64,
    /// True when the first strand passes over.
    pub a_over: bool,
    /// `+1` right-handed, `-1` left-handed.
    pub sign: i32,
    pub point: [f64; 2],
}

/// Crossings between two polygons (or of one polygon with itself when `b` is `None`).
pub fn crossings(a: &PolygonalCurve, b: Option<&PolygonalCurve>, direction: [f64; 3]) -> Result<Vec<Crossing>> {
    let (e1, e2, d) = projection_frame(direction)?;
    let other = b.unwrap_or(a);
    let diameter = a.diameter().max(other.diameter());
    let proj = |p: Vec3| [p.dot(&e1), p.dot(&e2)];
    let self_mode = b.is_none();
    let m = a.len();
    let mut out = Vec::new();
    for i in 0..m {
        let (p0, p1) = a.segment(i);
        let (a0, a1) = (proj(p0), proj(p1));
        let start = if self_mode { i + 2 } else { 0 };
        for j in start..other.len() {
            if self_mode && i == 0 && j == m - 1 {
                continue;
            }
            let (q0, q1) = other.segment(j);
            let (b0, b1) = (proj(q0), proj(q1));
            let r = [a1[0] - a0[0], a1[1] - a0[1]];
            let sv = [b1[0] - b0[0], b1[1] - b0[1]];
            let denom = r[0] * sv[1] - r[1] * sv[0];
            let w = [b0[0] - a0[0], b0[1] - a0[1]];
            let lr = (r[0] * r[0] + r[1] * r[1]).sqrt();
            let ls = (sv[0] * sv[0] + sv[1] * sv[1]).sqrt();
            if lr == 0.0 || ls == 0.0 {
                return Err(Error::DegenerateProjection("a segment projects to a point".into()));
            }
            let sin = denom / (lr * ls);
            if sin.abs() < MIN_CROSSING_ANGLE.sin() {
                // Nearly parallel: degenerate only if the projections touch.
                let dist = point_line_gap(a0, a1, b0, b1);
                if dist < MIN_CROSSING_SEPARATION * diameter {
                    return Err(Error::DegenerateProjection(format!(
                        "segments {i} and {j} are tangent in projection"
                    )));
                }
                continue;
            }
            let s = (w[0] * sv[1] - w[1] * sv[0]) / denom;
            let t = (w[0] * r[1] - w[1] * r[0]) / denom;
            let eps = 1e-9;
            if s < -eps || s > 1.0 + eps || t < -eps || t > 1.0 + eps {
                continue;
            }
            if s.abs() <= eps || (1.0 - s).abs() <= eps || t.abs() <= eps || (1.0 - t).abs() <= eps {
                return Err(Error::DegenerateProjection(format!(
                    "crossing through a vertex (segments {i}, {j})"
                )));
            }
            let pa = p0 + (p1 - p0) * s;
            let pb = q0 + (q1 - q0) * t;
            let (ha, hb) = (pa.dot(&d), pb.dot(&d));
            if (ha - hb).abs() < MIN_CROSSING_SEPARATION * diameter {
                return Err(Error::DegenerateProjection(format!(
                    "strands at segments {i}, {j} nearly meet along the projection direction"
                )));
            }
            let a_over = ha > hb;
            let (to, tu) = if a_over { (p1 - p0, q1 - q0) } else { (q1 - q0, p1 - p0) };
            let sign = if to.cross(&tu).dot(&d) > 0.0 { 1 } else { -1 };
            out.push(Crossing {
                seg_a: i,
                s,
                seg_b: j,
                t,
                a_over,
                sign,
                point: [a0[0] + r[0] * s, a0[1] + r[1] * s],
            });
        }
    }
    for (k, c) in out.iter().enumerate() {
        for e in &out[k + 1..] {
            let gap = ((c.point[0] - e.point[0]).powi(2) + (c.point[1] - e.point[1]).powi(2)).sqrt();
            if gap < MIN_CROSSING_SEPARATION * diameter {
                return Err(Error::DegenerateProjection("two crossings nearly coincide".into()));
            }
        }
    }
    Ok(out)
}

fn point_line_gap(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> f64 {
    let seg = |p: [f64; 2], u: [f64; 2], v: [f64; 2]| {
        let d = [v[0] - u[0], v[1] - u[1]];
        let l2 = d[0] * d[0] + d[1] * d[1];
        let t = (((p[0] - u[0]) * d[0] + (p[1] - u[1]) * d[1]) / l2).clamp(0.0, 1.0);
        ((p[0] - u[0] - t * d[0]).powi(2) + (p[1] - u[1] - t * d[1]).powi(2)).sqrt()
    };
    seg(a0, b0, b1).min(seg(a1, b0, b1)).min(seg(b0, a0, a1)).min(seg(b1, a0, a1))
}

/// Half the signed count of crossings between the two components.
pub fn crossing_linking(c1: &PolygonalCurve, c2: &PolygonalCurve, direction: [f64; 3]) -> Result<i64> {
    let total: i64 = crossings(c1, Some(c2), direction)?.iter().map(|c| c.sign as i64).sum();
    if total % 2 != 0 {
        return Err(Error::DegenerateProjection(format!("odd crossing sum {total}")));
    }
    Ok(total / 2)
}

/// `(writhe, blackboard framing)` for a projection direction.
pub fn writhe_framing(c: &PolygonalCurve, direction: [f64; 3]) -> Result<(f64, i64)> {
    let framing = crossings(c, None, direction)?.iter().map(|x| x.sign as i64).sum();
    Ok((writhe(c), framing))
}
