//! Masked primitives, the Massey hierarchy `Ω_ij → v_ij → Ω_123`, the nilpotent
//! connection built from it and the involution checks.

mod closure;
mod connection;
mod domain;
mod hierarchy;
mod solve;

pub use connection::{bianchi_residual, connection_curvature, Curvature, NilpotentConnection};
pub use domain::{mask_profile, MaskedDomain, MeridianTorus, MASK_OUTER, TORUS_FACTOR, TORUS_MERIDIAN_PANELS};
pub use hierarchy::{
    masked_closedness, FormCertificate, InvolutionReport, MasseyHierarchy, MultiIndex, PrimitiveCertificate,
};
pub use solve::{masked_residual, period_gate, solve_masked, solve_masked_shifted, solve_primitive, Primitive, SolveParams};
