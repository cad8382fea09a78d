pub mod cmcert;
pub mod cohomology;
pub mod expr;
pub mod gf;
pub mod group;
pub mod invariant;
pub mod linalg;
pub mod mpoly;
pub mod scenario;
pub mod separating;
pub mod subalgebra;
pub mod tpoly;
pub mod groebner;
