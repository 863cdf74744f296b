//! Link scene documents (`"schema": "vlink-1"`) and the built-in fixtures.

use super::curve::{PlanarCurve, PolygonalCurve};
use super::link::{Component, Link};
use super::tube::TubeParams;
use crate::error::{Error, Result};
use crate::grid::Grid3;
use serde::{Deserialize, Serialize};

pub const SCENE_SCHEMA: &str = "vlink-1";
const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ComponentSpec {
    Circle {
        center: [f64; 3],
        normal: [f64; 3],
        radius: f64,
        #[serde(default)]
        samples: Option<usize>,
    },
    Ellipse {
        center: [f64; 3],
        normal: [f64; 3],
        major_axis: [f64; 3],
        semi_axes: [f64; 2],
        #[serde(default)]
        phase: Option<f64>,
        #[serde(default)]
        samples: Option<usize>,
    },
    Polygon {
        vertices: Vec<[f64; 3]>,
        /// When false the last vertex must repeat the first.
        #[serde(default = "yes")]
        implicit_close: bool,
    },
}

fn yes() -> bool {
    true
}

impl ComponentSpec {
    pub fn build(&self) -> Result<Component> {
        match self {
            ComponentSpec::Circle { center, normal, radius, samples } => Ok(Component::Planar(
                PlanarCurve::circle(*center, *normal, *radius, samples.unwrap_or(DEFAULT_SAMPLES))?,
            )),
            ComponentSpec::Ellipse { center, normal, major_axis, semi_axes, phase, samples } => {
                Ok(Component::Planar(PlanarCurve::with_phase(
                    *center,
                    *normal,
                    *major_axis,
                    semi_axes[0],
                    semi_axes[1],
                    phase.unwrap_or(0.0),
                    samples.unwrap_or(DEFAULT_SAMPLES),
                )?))
            }
            ComponentSpec::Polygon { vertices, implicit_close } => {
                let poly = if *implicit_close {
                    PolygonalCurve::new(vertices.clone())?
                } else {
                    PolygonalCurve::from_closed_path(vertices.clone())?
                };
                Ok(Component::Polygon(poly))
            }
        }
    }
}

/// A link scene: box, tube cross-section and components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub schema: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    pub tube: TubeParams,
    pub components: Vec<ComponentSpec>,
    /// Projection direction for crossing counts.
    #[serde(default)]
    pub projection: Option<[f64; 3]>,
    /// Mask radius for complement computations (defaults to the tube radius).
    #[serde(default)]
    pub mask_radius: Option<f64>,
}

/// Default projection direction: generic for every built-in scene.
pub const DEFAULT_PROJECTION: [f64; 3] = [0.123_456_7, 0.234_567_8, 0.964_2];

impl Scene {
    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text)?;
        if scene.schema != SCENE_SCHEMA {
            return Err(Error::Invalid(format!(
                "unsupported schema \"{}\" (expected \"{SCENE_SCHEMA}\")",
                scene.schema
            )));
        }
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialises")
    }

    pub fn grid(&self) -> Result<Grid3> {
        Grid3::centered(self.box_spec.n, self.box_spec.l)
    }

    pub fn link(&self) -> Result<Link> {
        let comps = self.components.iter().map(|c| c.build()).collect::<Result<Vec<_>>>()?;
        Link::new(comps, self.tube)
    }

    pub fn projection(&self) -> [f64; 3] {
        self.projection.unwrap_or(DEFAULT_PROJECTION)
    }

    pub fn mask_radius(&self) -> f64 {
        self.mask_radius.unwrap_or(self.tube.radius)
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        Self { box_spec: BoxSpec { n, ..self.box_spec }, ..self.clone() }
    }

    /// Hopf link: unit circles in the `xy`-plane at the origin and in the `xz`-plane
    /// through `(1,0,0)`, shifted so the pair is centred in the box.
    pub fn hopf() -> Self {
        Self {
            schema: SCENE_SCHEMA.into(),
            name: Some("hopf".into()),
            box_spec: BoxSpec { n: 96, l: 6.0 },
            tube: TubeParams::new(0.32),
            components: vec![
                ComponentSpec::Circle { center: [-0.5, 0.0, 0.0], normal: [0.0, 0.0, 1.0], radius: 1.0, samples: None },
                ComponentSpec::Circle { center: [0.5, 0.0, 0.0], normal: [0.0, 1.0, 0.0], radius: 1.0, samples: None },
            ],
            projection: None,
            mask_radius: None,
        }
    }

    /// Borromean rings: orthogonal ellipses with semi-axes 1 and 0.5 in the three
    /// coordinate planes.
    pub fn borromean() -> Self {
        let e = |normal: [f64; 3], major: [f64; 3]| ComponentSpec::Ellipse {
            center: [0.0; 3],
            normal,
            major_axis: major,
            semi_axes: [1.0, 0.5],
            phase: None,
            samples: None,
        };
        Self {
            schema: SCENE_SCHEMA.into(),
            name: Some("borromean".into()),
            box_spec: BoxSpec { n: 96, l: 2.7 },
            tube: TubeParams::new(0.135),
            components: vec![
                e([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
                e([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
                e([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
            ],
            projection: None,
            mask_radius: None,
        }
    }

    /// Three unlinked coplanar circles with disjoint discs.
    pub fn split() -> Self {
        let c = |x: f64, y: f64| ComponentSpec::Circle {
            center: [x, y, 0.0],
            normal: [0.0, 0.0, 1.0],
            radius: 0.4,
            samples: None,
        };
        Self {
            schema: SCENE_SCHEMA.into(),
            name: Some("split".into()),
            box_spec: BoxSpec { n: 96, l: 6.0 },
            tube: TubeParams::new(0.2),
            components: vec![c(-1.0, -0.3), c(1.0, -0.3), c(0.0, 1.0)],
            projection: None,
            mask_radius: None,
        }
    }

    /// Two unlinked circles in parallel planes.
    pub fn unlink() -> Self {
        let c = |z: f64| ComponentSpec::Circle {
            center: [0.0, 0.0, z],
            normal: [0.0, 0.0, 1.0],
            radius: 1.0,
            samples: None,
        };
        Self {
            schema: SCENE_SCHEMA.into(),
            name: Some("unlink".into()),
            box_spec: BoxSpec { n: 96, l: 6.0 },
            tube: TubeParams::new(0.3),
            components: vec![c(-0.6), c(0.6)],
            projection: None,
            mask_radius: None,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "hopf" => Some(Self::hopf()),
            "borromean" => Some(Self::borromean()),
            "split" => Some(Self::split()),
            "unlink" => Some(Self::unlink()),
            _ => None,
        }
    }
}
