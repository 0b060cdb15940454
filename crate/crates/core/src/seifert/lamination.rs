use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::diagram::{SwitchMode, Topology, TrainTrackDiagram};
use crate::homology::{self, BoundaryCellStructure};
use crate::scalar::{Rational, Scalar};
use crate::weights::WeightVector;

use super::circles::{CircleFamily, CircleFamilyDecomposition, SplitRecord};
use super::freeway::{Freeway, Origin};
use super::SeifertError;

/// A product of disks `D^2 x [0, weight]` capping one circle family below
/// the projection plane, oriented so its boundary follows the track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskCap {
    pub family: usize,
    pub weight: Scalar,
}

/// Re-joining of the two disk families on either side of a separatrix,
/// undoing one split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinchRecord {
    /// Index into the splitting trace.
    pub split: usize,
    /// Families to the left and right of the merge cusp.
    pub joins: [usize; 2],
}

/// The inverse modification at one crossing segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionRecord {
    pub crossing: String,
    /// Freeway index of the crossing segment.
    pub crossing_segment: usize,
    /// Original over and under segments.
    pub over: usize,
    pub under: usize,
    pub sign: i8,
    /// Twist left by the loop on the under segment's tube.
    pub twist: Scalar,
    /// Measure of the band glued in at the crossing.
    pub band_weight: Scalar,
}

/// Combinatorial description of a Seifert lamination `V_v(B)`.
#[derive(Debug, Clone)]
pub struct SeifertLaminationDesc {
    pub freeway: Freeway,
    pub families: Vec<CircleFamily>,
    pub trace: Vec<SplitRecord>,
    pub caps: Vec<DiskCap>,
    pub pinches: Vec<PinchRecord>,
    pub reconstructions: Vec<ReconstructionRecord>,
    pub sector_weights: Vec<Scalar>,
}

/// Twist and weight vectors of the boundary link `T_{w,t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedLinkParams {
    pub weights: WeightVector,
    pub twists: Vec<Scalar>,
}

/// Disk caps for every family and one pinch per compact separatrix.
pub fn cap_and_pinch(c: &CircleFamilyDecomposition, f: &Freeway) -> SeifertLaminationDesc {
    let caps = c
        .families
        .iter()
        .enumerate()
        .map(|(i, fam)| DiskCap {
            family: i,
            weight: fam.width.clone(),
        })
        .collect();
    let pinches = c
        .trace
        .iter()
        .enumerate()
        .map(|(i, r)| {
            // the separatrix starts on the merge trunk, between the two
            // families it separates
            let (e, x) = &r.path[0];
            let k = c.cuts[*e].iter().position(|y| y == x).expect("cut on path");
            PinchRecord {
                split: i,
                joins: [c.pieces[*e][k], c.pieces[*e][k + 1]],
            }
        })
        .collect();
    SeifertLaminationDesc {
        freeway: f.clone(),
        families: c.families.clone(),
        trace: c.trace.clone(),
        caps,
        pinches,
        reconstructions: Vec::new(),
        sector_weights: c.families.iter().map(|x| x.width.clone()).collect(),
    }
}

/// Undoes every crossing modification, returning the twist vector
/// `t(s) = -sum_{c : under(c) = s} sign(c) w(over(c))`.
pub fn reconstruct(
    sl: &SeifertLaminationDesc,
    f: &Freeway,
) -> Result<(FramedLinkParams, SeifertLaminationDesc), SeifertError> {
    let d = &f.original;
    let w = &f.original_weights;
    let mut twists = vec![Scalar::zero(); d.segments.len()];
    let mut reconstructions = Vec::with_capacity(f.crossing_segments.len());
    for cs in &f.crossing_segments {
        let twist = w[cs.over].scale_int(-i64::from(cs.sign));
        twists[cs.under] = &twists[cs.under] + &twist;
        reconstructions.push(ReconstructionRecord {
            crossing: cs.crossing.clone(),
            crossing_segment: cs.segment,
            over: cs.over,
            under: cs.under,
            sign: cs.sign,
            twist,
            band_weight: w[cs.over].clone(),
        });
    }
    let cells = BoundaryCellStructure::build(d);
    let check = homology::verify(d, &cells, w, &twists)?;
    if !check.valid {
        return Err(SeifertError::ConventionMismatch {
            residual: check.residual,
        });
    }
    let mut out = sl.clone();
    out.reconstructions = reconstructions;
    Ok((
        FramedLinkParams {
            weights: w.clone(),
            twists,
        },
        out,
    ))
}

impl SeifertLaminationDesc {
    /// Euler characteristic of the unweighted branched surface `B'`: one
    /// disk per family, glued along one arc per pinch.
    pub fn complex_euler_characteristic(&self) -> i64 {
        self.families.len() as i64 - self.pinches.len() as i64
    }

    /// Weighted Euler characteristic of the carried lamination: disk
    /// measures minus band measures. For integer weights this is the Euler
    /// characteristic of the Seifert surface.
    pub fn euler_characteristic(&self) -> Scalar {
        let disks: Scalar = self.sector_weights.iter().sum();
        let bands: Scalar = self.reconstructions.iter().map(|r| &r.band_weight).sum();
        disks - bands
    }

    pub fn is_integral(&self) -> bool {
        self.sector_weights.iter().all(Scalar::is_integer)
            && self.freeway.original_weights.is_integral()
    }

    /// Genus `(1 - chi) / 2` of the surface when its boundary is a knot.
    pub fn genus_if_knot(&self, t: &[Scalar]) -> Result<Rational, SeifertError> {
        if !self.is_integral() || !t.iter().all(Scalar::is_integer) {
            return Err(SeifertError::NotASurface);
        }
        let b = link_components(&self.freeway.original, &self.freeway.original_weights, t)?;
        if b != 1 {
            return Err(SeifertError::NotAKnot { components: b });
        }
        let chi = self.euler_characteristic().as_rational().expect("integral");
        Ok((Rational::from_integer(1.into()) - chi) / Rational::from_integer(2.into()))
    }
}

fn to_usize(x: &Scalar) -> Option<usize> {
    x.as_rational()
        .filter(|q| q.is_integer())
        .and_then(|q| q.to_integer().to_usize())
}

fn to_bigint(x: &Scalar) -> Option<BigInt> {
    x.as_rational()
        .filter(|q| q.is_integer())
        .map(|q| q.to_integer())
}

/// Number of components of the integral link `T_{w,t}`.
///
/// A segment of weight `n` carries `n` strands at positions `0..n` on its
/// fiber; a twist of `t` advances every strand by `t` modulo `n` along the
/// tube. Switches stack the left branch below the right one.
pub fn link_components(
    d: &TrainTrackDiagram,
    w: &WeightVector,
    t: &[Scalar],
) -> Result<usize, SeifertError> {
    let topo = Topology::build(d);
    let ne = topo.segment_count();
    let mut width = Vec::with_capacity(ne);
    let mut shift = Vec::with_capacity(ne);
    for e in 0..ne {
        let n = to_usize(&w[e]).ok_or(SeifertError::NotASurface)?;
        let s = to_bigint(&t[e]).ok_or(SeifertError::NotASurface)?;
        let s = if n == 0 {
            0
        } else {
            let m = BigInt::from(n);
            (((s % &m) + &m) % &m).to_usize().expect("small")
        };
        width.push(n);
        shift.push(s);
    }
    let mut offset = vec![0usize; ne + 1];
    for e in 0..ne {
        offset[e + 1] = offset[e] + width[e];
    }
    let mut marker_out = vec![usize::MAX; topo.marker_count];
    for e in 0..ne {
        if topo.tail[e] >= topo.switch_count {
            marker_out[topo.tail[e] - topo.switch_count] = e;
        }
    }
    let next = |e: usize, p: usize| -> (usize, usize) {
        let p = (p + shift[e]) % width[e];
        let v = topo.head[e];
        if v >= topo.switch_count {
            return (marker_out[v - topo.switch_count], p);
        }
        let [trunk, left, right] = topo.slots[v];
        match topo.modes[v] {
            SwitchMode::Merge if e == left => (trunk, p),
            SwitchMode::Merge => (trunk, width[left] + p),
            SwitchMode::Split if p < width[left] => (left, p),
            SwitchMode::Split => (right, p - width[left]),
        }
    };
    let total = offset[ne];
    let mut seen = vec![false; total];
    let mut components = 0;
    for e in 0..ne {
        for p in 0..width[e] {
            if seen[offset[e] + p] {
                continue;
            }
            components += 1;
            let (mut e2, mut p2) = (e, p);
            while !seen[offset[e2] + p2] {
                seen[offset[e2] + p2] = true;
                (e2, p2) = next(e2, p2);
            }
        }
    }
    Ok(components)
}

/// Measure each original segment gets back from the families, one entry
/// per freeway piece it was cut into.
pub fn restored_measure(sl: &SeifertLaminationDesc) -> Vec<Vec<Scalar>> {
    let f = &sl.freeway;
    let mut per_piece = vec![Scalar::zero(); f.track.segments.len()];
    for fam in &sl.families {
        for &s in &fam.itinerary {
            per_piece[s] = &per_piece[s] + &fam.width;
        }
    }
    let mut out = vec![Vec::new(); f.original.segments.len()];
    for (i, o) in f.origin.iter().enumerate() {
        if let Origin::Piece { segment, .. } = o {
            out[*segment].push(per_piece[i].clone());
        }
    }
    out
}
