//! Seifert laminations of weighted train track diagrams.
//!
//! The pipeline removes crossings, splits the resulting planar track into
//! circle families, caps each family with a product of disks, and then glues
//! twisted bands back in at every crossing.

mod circles;
mod freeway;
mod lamination;

use thiserror::Error;

use crate::diagram::{TrainTrackDiagram, Violation};
use crate::homology::HomologyError;
use crate::scalar::{Rational, ScalarContext, ScalarError};
use crate::weights::{WeightError, WeightVector};

pub use circles::{
    default_split_bound, split_circles, CircleFamily, CircleFamilyDecomposition, SplitRecord,
};
pub use freeway::{eliminate_crossings, CrossingSegment, Freeway, Origin};
pub use lamination::{
    cap_and_pinch, link_components, reconstruct, restored_measure, DiskCap, FramedLinkParams,
    PinchRecord, ReconstructionRecord, SeifertLaminationDesc,
};

#[derive(Debug, Error)]
pub enum SeifertError {
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("weight on segment `{segment}` is not positive")]
    NonPositiveWeight { segment: String },
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("splitting did not terminate after {steps} steps: {reason}")]
    SplitDiverged { steps: u64, reason: String },
    #[error("reconstructed twists fail the homology criterion (residual {residual:?})")]
    ConventionMismatch {
        residual: Vec<crate::scalar::Scalar>,
    },
    #[error("weights or twists are not integral, so there is no embedded surface")]
    NotASurface,
    #[error("boundary has {components} components, not one")]
    NotAKnot { components: usize },
}

#[derive(Debug, Clone, Default)]
pub struct SeifertConfig {
    /// Bound on leaf steps while splitting; defaults to `2^(segments + switches)`.
    pub max_splits: Option<u64>,
}

/// Everything computed for one weighted diagram.
#[derive(Debug, Clone)]
pub struct SeifertResult {
    pub framed_link: FramedLinkParams,
    pub lamination: SeifertLaminationDesc,
    pub euler_characteristic: crate::scalar::Scalar,
    pub complex_euler_characteristic: i64,
    /// Boundary component count, when the weights are integral.
    pub components: Option<usize>,
    /// Genus, when the surface is embedded and bounds a knot.
    pub genus: Option<Rational>,
}

pub fn run(
    d: &TrainTrackDiagram,
    w: &WeightVector,
    ctx: &ScalarContext,
    config: &SeifertConfig,
) -> Result<SeifertResult, SeifertError> {
    let f = eliminate_crossings(d, w, ctx)?;
    let c = split_circles(&f, ctx, config.max_splits)?;
    let sl = cap_and_pinch(&c, &f);
    let (framed_link, lamination) = reconstruct(&sl, &f)?;
    let components = if lamination.is_integral() {
        Some(link_components(d, w, &framed_link.twists)?)
    } else {
        None
    };
    let genus = match lamination.genus_if_knot(&framed_link.twists) {
        Ok(g) => Some(g),
        Err(SeifertError::NotASurface | SeifertError::NotAKnot { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SeifertResult {
        euler_characteristic: lamination.euler_characteristic(),
        complex_euler_characteristic: lamination.complex_euler_characteristic(),
        framed_link,
        lamination,
        components,
        genus,
    })
}

#[cfg(test)]
mod tests;
