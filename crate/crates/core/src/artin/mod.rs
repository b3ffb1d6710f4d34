//! Finite-dimensional path algebras with relations, their modules, and the
//! projective-hull construction by iterated universal extensions.

mod endalg;
mod ext;
mod hull;
mod module;
mod quiver;

use thiserror::Error;

pub use endalg::{attach_bigrading, end_bigrading, ext_algebra, resolution_end_dg_algebra, BigradingRule, ResolutionEnd, Summand};
pub use ext::{ext1, ext1_dim, ext_dim_by_resolution, lift_through, universal_extension, Ext1, ExtensionClass, UniversalExtension};
pub use hull::{projective_cover, projective_hull, projective_resolution, Hull, HullStep, Resolution, HULL_ITERATION_CAP};
pub use module::{hom, QuiverMap, QuiverModule};
pub use quiver::{Arrow, Path, QuiverAlgebra, Relation, PATH_LENGTH_CAP};

#[derive(Debug, Error)]
pub enum ArtinError {
    #[error("quiver: {0}")]
    Quiver(String),
    #[error("the quotient by the relations is not finite-dimensional")]
    Infinite,
    #[error("module: {0}")]
    Module(String),
    #[error("map: {0}")]
    Map(String),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("Ext^1({0}, L) vanishes, no extension to take")]
    NoExtension(String),
    #[error("extension check failed: {0}")]
    Extension(String),
    #[error("hull did not terminate within {0} steps")]
    HullCap(usize),
    #[error("resolution longer than the cap {0}")]
    ResolutionCap(usize),
    #[error("module is not projective: {0}")]
    NotProjective(String),
    #[error("bigrading: {0}")]
    Bigrading(String),
    #[error(transparent)]
    Grd(#[from] crate::grdalg::GrdError),
}
