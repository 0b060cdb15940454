use crate::diagram::{Endpoint, Role, Segment, Slot, Switch, SwitchMode, TrainTrackDiagram};
use crate::scalar::ScalarContext;
use crate::weights::{check_invariant, WeightVector};

use super::SeifertError;

/// Where a segment of the crossing-free track came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Piece `piece` of original segment `segment`, counted along its orientation.
    Piece { segment: usize, piece: usize },
    /// The crossing segment replacing crossing `crossing` (index into the original crossings).
    Crossing { crossing: usize },
}

/// Provenance of one crossing segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSegment {
    /// Index of the crossing segment in the freeway track.
    pub segment: usize,
    pub crossing: String,
    /// Original over and under segments.
    pub over: usize,
    pub under: usize,
    pub sign: i8,
}

/// The crossing-free track with its weights, remembering the original diagram.
#[derive(Debug, Clone)]
pub struct Freeway {
    pub track: TrainTrackDiagram,
    pub weights: WeightVector,
    pub origin: Vec<Origin>,
    pub crossing_segments: Vec<CrossingSegment>,
    pub original: TrainTrackDiagram,
    pub original_weights: WeightVector,
}

fn merge_id(c: &str) -> String {
    format!("{c}@in")
}

fn split_id(c: &str) -> String {
    format!("{c}@out")
}

/// Slot of an incoming strand at the merge switch replacing a crossing.
///
/// With both strands pointing up, a positive crossing has the over strand
/// coming in from the left and the under strand leaving to the left.
fn in_slot(role: Role, sign: i8) -> Slot {
    match (role, sign > 0) {
        (Role::Over, true) | (Role::Under, false) => Slot::Left,
        _ => Slot::Right,
    }
}

fn out_slot(role: Role, sign: i8) -> Slot {
    match (role, sign > 0) {
        (Role::Under, true) | (Role::Over, false) => Slot::Left,
        _ => Slot::Right,
    }
}

/// Replaces every crossing by a merge switch, a crossing segment of weight
/// `w(over) + w(under)` and a split switch.
pub fn eliminate_crossings(
    d: &TrainTrackDiagram,
    w: &WeightVector,
    ctx: &ScalarContext,
) -> Result<Freeway, SeifertError> {
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(SeifertError::Invalid(violations));
    }
    check_invariant(d, w)?;
    for (i, x) in w.iter().enumerate() {
        if !ctx.is_positive(x)? {
            return Err(SeifertError::NonPositiveWeight {
                segment: d.segments[i].id.clone(),
            });
        }
    }

    let crossing_index = |id: &str| d.crossings.iter().position(|c| c.id == id).expect("valid");
    let mut switches = d.switches.clone();
    let mut entries: Vec<(Segment, Origin, crate::scalar::Scalar)> = Vec::new();

    for (si, seg) in d.segments.iter().enumerate() {
        if seg.traversals.is_empty() {
            entries.push((
                seg.clone(),
                Origin::Piece {
                    segment: si,
                    piece: 0,
                },
                w[si].clone(),
            ));
            continue;
        }
        let mut from = seg.from.clone();
        for (k, t) in seg.traversals.iter().enumerate() {
            let c = &d.crossings[crossing_index(&t.crossing)];
            entries.push((
                Segment {
                    id: format!("{}#{k}", seg.id),
                    from,
                    to: Endpoint::switch(&merge_id(&c.id), in_slot(t.role, c.sign)),
                    traversals: vec![],
                },
                Origin::Piece {
                    segment: si,
                    piece: k,
                },
                w[si].clone(),
            ));
            from = Endpoint::switch(&split_id(&c.id), out_slot(t.role, c.sign));
        }
        entries.push((
            Segment {
                id: format!("{}#{}", seg.id, seg.traversals.len()),
                from,
                to: seg.to.clone(),
                traversals: vec![],
            },
            Origin::Piece {
                segment: si,
                piece: seg.traversals.len(),
            },
            w[si].clone(),
        ));
    }

    let seg_index = |id: &str| d.segment_index(id).expect("valid");
    for (ci, c) in d.crossings.iter().enumerate() {
        let (over, under) = (seg_index(&c.over.segment), seg_index(&c.under.segment));
        switches.push(Switch {
            id: merge_id(&c.id),
            mode: SwitchMode::Merge,
        });
        switches.push(Switch {
            id: split_id(&c.id),
            mode: SwitchMode::Split,
        });
        entries.push((
            Segment {
                id: format!("{}@x", c.id),
                from: Endpoint::switch(&merge_id(&c.id), Slot::Trunk),
                to: Endpoint::switch(&split_id(&c.id), Slot::Trunk),
                traversals: vec![],
            },
            Origin::Crossing { crossing: ci },
            &w[over] + &w[under],
        ));
    }

    entries.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    let mut track = TrainTrackDiagram {
        switches,
        segments: Vec::with_capacity(entries.len()),
        markers: d.markers.clone(),
        crossings: vec![],
    };
    track.canonicalize();
    let mut origin = Vec::with_capacity(entries.len());
    let mut weights = Vec::with_capacity(entries.len());
    let mut crossing_segments = Vec::new();
    for (i, (seg, o, x)) in entries.into_iter().enumerate() {
        if let Origin::Crossing { crossing } = o {
            let c = &d.crossings[crossing];
            crossing_segments.push(CrossingSegment {
                segment: i,
                crossing: c.id.clone(),
                over: seg_index(&c.over.segment),
                under: seg_index(&c.under.segment),
                sign: c.sign,
            });
        }
        track.segments.push(seg);
        origin.push(o);
        weights.push(x);
    }
    let freeway = Freeway {
        track,
        weights: WeightVector::new(weights),
        origin,
        crossing_segments,
        original: d.clone(),
        original_weights: w.clone(),
    };
    // derived ids deliberately use the reserved characters
    debug_assert!(
        freeway
            .track
            .validate()
            .iter()
            .all(|v| matches!(v, crate::diagram::Violation::ReservedId { .. })),
        "{:?}",
        freeway.track.validate()
    );
    Ok(freeway)
}
