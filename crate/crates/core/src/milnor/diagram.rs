use crate::error::{Error, Result};
use crate::links::Link;
use serde::{Deserialize, Serialize};

pub const DIAGRAM_SCHEMA: &str = "vdiag-1";

/// Minimum `|sin|` of the angle between two projected strands at a crossing.
pub const DIAGRAM_MIN_ANGLE: f64 = 1e-3;
/// Minimum separation of crossings and minimum depth gap, relative to the link diameter.
pub const DIAGRAM_MIN_GAP: f64 = 1e-6;

/// One crossing: the under-strand runs from arc `under_in` to arc `under_out` below `over`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramCrossing {
    pub over: usize,
    pub under_in: usize,
    pub under_out: usize,
    pub sign: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramJson {
    schema: String,
    components: usize,
    arcs: Vec<Vec<usize>>,
    crossings: Vec<DiagramCrossing>,
}

/// A validated oriented link diagram.
///
/// Arcs are numbered `0..arc_count`; `arcs[c]` lists the arcs of component `c` in
/// traversal order, and the `k`-th under-pass of `c` leaves `arcs[c][k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    arcs: Vec<Vec<usize>>,
    crossings: Vec<DiagramCrossing>,
    component_of: Vec<usize>,
    position_of: Vec<usize>,
    /// `under[c][k]` indexes the crossing that ends `arcs[c][k]`.
    under: Vec<Vec<usize>>,
}

impl LinkDiagram {
    pub fn new(arcs: Vec<Vec<usize>>, crossings: Vec<DiagramCrossing>) -> Result<Self> {
        let bad = |m: String| Error::InconsistentDiagram(m);
        let total: usize = arcs.iter().map(Vec::len).sum();
        let mut component_of = vec![usize::MAX; total];
        let mut position_of = vec![0; total];
        for (c, list) in arcs.iter().enumerate() {
            if list.is_empty() {
                return Err(bad(format!("component {} has no arcs", c + 1)));
            }
            for (k, &a) in list.iter().enumerate() {
                if a >= total {
                    return Err(bad(format!("arc {a} out of range 0..{total}")));
                }
                if component_of[a] != usize::MAX {
                    return Err(bad(format!("arc {a} is listed twice")));
                }
                component_of[a] = c;
                position_of[a] = k;
            }
        }
        let mut under: Vec<Vec<Option<usize>>> = arcs.iter().map(|l| vec![None; l.len()]).collect();
        for (x, cr) in crossings.iter().enumerate() {
            if cr.sign != 1 && cr.sign != -1 {
                return Err(bad(format!("crossing {x} has sign {}", cr.sign)));
            }
            for a in [cr.over, cr.under_in, cr.under_out] {
                if a >= total {
                    return Err(bad(format!("crossing {x} names unknown arc {a}")));
                }
            }
            let c = component_of[cr.under_in];
            if component_of[cr.under_out] != c {
                return Err(bad(format!("crossing {x} joins arcs of different components")));
            }
            let list = &arcs[c];
            let k = position_of[cr.under_in];
            if list[(k + 1) % list.len()] != cr.under_out {
                return Err(bad(format!(
                    "crossing {x}: arc {} does not follow arc {} on component {}",
                    cr.under_out,
                    cr.under_in,
                    c + 1
                )));
            }
            if under[c][k].replace(x).is_some() {
                return Err(bad(format!("arc {} ends at two crossings", cr.under_in)));
            }
        }
        let mut ends = Vec::with_capacity(arcs.len());
        for (c, u) in under.into_iter().enumerate() {
            let count = u.iter().filter(|e| e.is_some()).count();
            if count == 0 && arcs[c].len() == 1 {
                ends.push(Vec::new());
            } else if count == u.len() {
                ends.push(u.into_iter().map(Option::unwrap).collect());
            } else {
                return Err(bad(format!("component {} does not close into one cycle", c + 1)));
            }
        }
        Ok(Self { arcs, crossings, component_of, position_of, under: ends })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: DiagramJson = serde_json::from_str(text)?;
        if j.schema != DIAGRAM_SCHEMA {
            return Err(Error::Invalid(format!("expected schema \"{DIAGRAM_SCHEMA}\", found \"{}\"", j.schema)));
        }
        if j.components != j.arcs.len() {
            return Err(Error::InconsistentDiagram(format!(
                "{} components declared, {} arc cycles given",
                j.components,
                j.arcs.len()
            )));
        }
        Self::new(j.arcs, j.crossings)
    }

    pub fn to_json(&self) -> String {
        let j = DiagramJson {
            schema: DIAGRAM_SCHEMA.into(),
            components: self.components(),
            arcs: self.arcs.clone(),
            crossings: self.crossings.clone(),
        };
        serde_json::to_string_pretty(&j).expect("diagram serialises")
    }

    pub fn components(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_count(&self) -> usize {
        self.component_of.len()
    }

    pub fn arcs(&self) -> &[Vec<usize>] {
        &self.arcs
    }

    pub fn crossings(&self) -> &[DiagramCrossing] {
        &self.crossings
    }

    /// 0-based component of an arc.
    pub fn component_of(&self, arc: usize) -> usize {
        self.component_of[arc]
    }

    pub(crate) fn position_of(&self, arc: usize) -> usize {
        self.position_of[arc]
    }

    /// Crossings where component `c` (0-based) passes under, in traversal order.
    pub fn under_passes(&self, c: usize) -> impl Iterator<Item = &DiagramCrossing> {
        self.under[c].iter().map(move |&x| &self.crossings[x])
    }

    /// Sum of the signs of the crossings of component `c` with itself.
    pub fn self_writhe(&self, c: usize) -> i64 {
        self.under_passes(c).filter(|x| self.component_of[x.over] == c).map(|x| x.sign as i64).sum()
    }

    /// Sum of the signs of crossings where `i` passes under `j` (0-based); equals the linking number.
    pub fn linking_number(&self, i: usize, j: usize) -> i64 {
        self.under_passes(i).filter(|x| self.component_of[x.over] == j).map(|x| x.sign as i64).sum()
    }

    /// Crossings between two different components.
    pub fn inter_component_crossings(&self) -> usize {
        self.crossings.iter().filter(|x| self.component_of[x.over] != self.component_of[x.under_in]).count()
    }

    /// Adds a Reidemeister-I kink at the end of arc `arcs[c][k]`.
    ///
    /// With `over_first` the strand passes over the new crossing before passing under it.
    pub fn with_kink(&self, c: usize, k: usize, sign: i8, over_first: bool) -> Result<Self> {
        if c >= self.components() || k >= self.arcs[c].len() {
            return Err(Error::Invalid(format!("no arc at position {k} of component {}", c + 1)));
        }
        let a = self.arcs[c][k];
        let mut arcs = self.arcs.clone();
        let mut crossings = self.crossings.clone();
        if self.under[c].is_empty() {
            crossings.push(DiagramCrossing { over: a, under_in: a, under_out: a, sign });
            return Self::new(arcs, crossings);
        }
        let fresh = self.arc_count();
        crossings[self.under[c][k]].under_in = fresh;
        let over = if over_first { a } else { fresh };
        crossings.push(DiagramCrossing { over, under_in: a, under_out: fresh, sign });
        arcs[c].insert(k + 1, fresh);
        Self::new(arcs, crossings)
    }
}

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: P3) -> Option<P3> {
    let n = dot(a, a).sqrt();
    (n.is_finite() && n > 0.0).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// A projected crossing before arcs are assigned.
struct RawCrossing {
    over: (usize, f64),
    under: (usize, f64),
    sign: i8,
    at: [f64; 2],
}

/// Projects the link along `direction` (pointing at the viewer) and records every crossing.
///
/// Strand positions are `segment index + parameter`; the nearer strand is over.
pub fn diagram_from_curves(link: &Link, direction: [f64; 3]) -> Result<LinkDiagram> {
    let d = unit(direction).ok_or_else(|| Error::DegenerateProjection("zero direction".into()))?;
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = unit(cross(d, helper)).expect("helper is not parallel");
    let e2 = cross(d, e1);
    let polys: Vec<Vec<P3>> = link.components().iter().map(|c| c.polygon().vertices().to_vec()).collect();
    let all: Vec<P3> = polys.iter().flatten().copied().collect();
    let diameter = all
        .iter()
        .flat_map(|p| all.iter().map(move |q| dot(sub(*p, *q), sub(*p, *q)).sqrt()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let proj = |p: P3| [dot(p, e1), dot(p, e2), dot(p, d)];
    let pp: Vec<Vec<P3>> = polys.iter().map(|v| v.iter().map(|&p| proj(p)).collect()).collect();
    let mut raw = Vec::new();
    let segs: Vec<(usize, usize)> =
        pp.iter().enumerate().flat_map(|(c, v)| (0..v.len()).map(move |i| (c, i))).collect();
    for (x, &(c1, i)) in segs.iter().enumerate() {
        let m1 = pp[c1].len();
        let (a0, a1) = (pp[c1][i], pp[c1][(i + 1) % m1]);
        for &(c2, j) in &segs[x + 1..] {
            let m2 = pp[c2].len();
            if c1 == c2 && (j == (i + 1) % m1 || i == (j + 1) % m2) {
                continue;
            }
            let (b0, b1) = (pp[c2][j], pp[c2][(j + 1) % m2]);
            let r = [a1[0] - a0[0], a1[1] - a0[1]];
            let s = [b1[0] - b0[0], b1[1] - b0[1]];
            let den = r[0] * s[1] - r[1] * s[0];
            let rn = (r[0] * r[0] + r[1] * r[1]).sqrt();
            let sn = (s[0] * s[0] + s[1] * s[1]).sqrt();
            let q = [b0[0] - a0[0], b0[1] - a0[1]];
            if den.abs() <= DIAGRAM_MIN_ANGLE * rn * sn {
                // Nearly parallel: only a problem if the segments overlap in projection.
                let off = (q[0] * r[1] - q[1] * r[0]).abs() / rn.max(f64::MIN_POSITIVE);
                let t0 = (q[0] * r[0] + q[1] * r[1]) / (rn * rn);
                let t1 = ((b1[0] - a0[0]) * r[0] + (b1[1] - a0[1]) * r[1]) / (rn * rn);
                if off < DIAGRAM_MIN_GAP * diameter && t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                    return Err(Error::DegenerateProjection(format!(
                        "segments {i} of component {} and {j} of component {} project onto each other",
                        c1 + 1,
                        c2 + 1
                    )));
                }
                continue;
            }
            let t = (q[0] * s[1] - q[1] * s[0]) / den;
            let u = (q[0] * r[1] - q[1] * r[0]) / den;
            if !((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)) {
                continue;
            }
            let za = a0[2] + t * (a1[2] - a0[2]);
            let zb = b0[2] + u * (b1[2] - b0[2]);
            if (za - zb).abs() < DIAGRAM_MIN_GAP * diameter {
                return Err(Error::CurvesIntersect { distance: (za - zb).abs() });
            }
            // 2D cross product of over and under tangents, positive for a right-handed crossing.
            let (over, under, turn) = if za > zb {
                ((c1, i as f64 + t), (c2, j as f64 + u), den)
            } else {
                ((c2, j as f64 + u), (c1, i as f64 + t), -den)
            };
            let at = [a0[0] + t * r[0], a0[1] + t * r[1]];
            raw.push(RawCrossing { over, under, sign: if turn > 0.0 { 1 } else { -1 }, at });
        }
    }
    for (x, p) in raw.iter().enumerate() {
        for q in &raw[x + 1..] {
            let g = ((p.at[0] - q.at[0]).powi(2) + (p.at[1] - q.at[1]).powi(2)).sqrt();
            if g < DIAGRAM_MIN_GAP * diameter {
                return Err(Error::DegenerateProjection("two crossings coincide in projection".into()));
            }
        }
    }
    assemble(polys.len(), raw)
}

fn assemble(n: usize, raw: Vec<RawCrossing>) -> Result<LinkDiagram> {
    let mut unders: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for (x, r) in raw.iter().enumerate() {
        unders[r.under.0].push((r.under.1, x));
    }
    for u in &mut unders {
        u.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut offset = Vec::with_capacity(n);
    let mut total = 0;
    for u in &unders {
        offset.push(total);
        total += u.len().max(1);
    }
    let arcs: Vec<Vec<usize>> = (0..n).map(|c| (0..unders[c].len().max(1)).map(|k| offset[c] + k).collect()).collect();
    let arc_at = |c: usize, s: f64| {
        let u = &unders[c];
        if u.is_empty() {
            offset[c]
        } else {
            offset[c] + u.iter().filter(|(p, _)| *p < s).count() % u.len()
        }
    };
    let mut crossings = Vec::with_capacity(raw.len());
    for (c, u) in unders.iter().enumerate() {
        for (k, &(_, x)) in u.iter().enumerate() {
            let r = &raw[x];
            crossings.push(DiagramCrossing {
                over: arc_at(r.over.0, r.over.1),
                under_in: offset[c] + k,
                under_out: offset[c] + (k + 1) % u.len(),
                sign: r.sign,
            });
        }
    }
    LinkDiagram::new(arcs, crossings)
}
