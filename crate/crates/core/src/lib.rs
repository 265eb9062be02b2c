//! Hyperbolic volumes of Conway-notation link families.
//!
//! The pipeline runs from a Conway symbol ([`conway`]) through a planar
//! diagram ([`diagram`]) and an ideal triangulation of the link complement
//! ([`triangulation`]) to a solution of the gluing equations and its volume
//! ([`solver`]). On top of that sit family handling ([`family`]), volume
//! bounds ([`bounds`]), interpolation fits ([`fit`]) and a volume cache
//! ([`store`]).

pub mod angles;
pub mod bounds;
pub mod cli;
pub mod conway;
pub mod diagram;
pub mod dilog;
pub mod error;
pub mod family;
pub mod fit;
pub mod moves;
pub mod polyhedra;
pub mod reference;
pub mod solver;
pub mod store;
pub mod tangle;
pub mod triangulation;

pub use conway::{parse, ConwaySymbol, Tangle};
pub use error::{Error, Result};
