//! Curves, linking numbers, tube and disc Poincaré duals, helicity.

mod curve;
mod link;
mod linking;
mod scene;
mod tube;

pub use curve::{polygon_plane, PlanarCurve, PolygonalCurve, Vec3, MIN_VERTICES};
pub use link::{helicity, link_helicity, poincare_dual_residual, Component, Link};
pub use linking::{
    crossing_linking, crossings, gauss_linking, projection_frame, writhe, writhe_framing, Crossing,
    GAUSS_REFINE_TOL, MIN_CROSSING_ANGLE, MIN_CROSSING_SEPARATION,
};
pub use scene::{BoxSpec, ComponentSpec, Scene, DEFAULT_PROJECTION, SCENE_SCHEMA};
pub use tube::{
    closedness_defect, disc_dual_1form, flux_through_disc, polygon_disc_dual_1form, tube_2form, tube_field,
    TubeParams,
};
