mod diagram;
mod magnus;
mod wirtinger;

pub use diagram::{diagram_from_curves, DiagramCrossing, LinkDiagram, DIAGRAM_MIN_ANGLE, DIAGRAM_MIN_GAP, DIAGRAM_SCHEMA};
pub use magnus::{MagnusSeries, Word, DEFAULT_DEGREE};
pub use wirtinger::{
    format_index, longitude_magnus, longitude_word, mu_bar, mu_coefficient, wirtinger, Letter, MuBar, Presentation,
};
