//! The homological side: boundary cell structure on the tube neighborhood,
//! the class map `K(w, t) = [tau(w)] + sum_i t_i [gamma_i]`, and the bounding
//! criterion in S^3.
//!
//! A class in `H_1` of the tube boundary bounds in the complement of the
//! neighborhood iff it has zero linking number with every cycle of the track.
//! Pairing against a cycle basis `z_j` gives one linear equation per cycle:
//!
//! ```text
//! lk(e(tau(w)), z_j) + sum_i z_j(s_i) t_i = 0
//! ```
//!
//! where `e(tau(w))` is the zero-twist lamination and the meridian `gamma_i`
//! links the track once along each segment it encircles.
//!
//! The zero-twist lamination is the flat freeway of the projection, which sits
//! just below the core (the disks it bounds hang below the plane). It passes
//! over a core cycle only at crossings where it is the over strand, so
//! `lk(e(tau(w)), z) = sum_c sign(c) w(over) z(under)`. The symmetric average
//! of the two one-sided counts agrees with this only when the track has no
//! switches: near a switch the core crosses the freeway leaves.

use num_traits::Zero;
use thiserror::Error;

use crate::diagram::{Topology, TrainTrackDiagram};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::weights::{check_invariant, WeightError, WeightVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("index error: expected {expected} twist entries, got {got}")]
    Index { expected: usize, got: usize },
    #[error("linking equations are inconsistent; the diagram is not planar-realizable")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellVertex {
    /// Image of a switch or marker; switches sit at the saddle cusps.
    Vertex(String),
    /// Midpoint `p_i` of a segment, where the meridian is attached.
    Midpoint(String),
}

/// A longitudinal 1-cell: half of a segment of the blackboard pushoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongitudinalCell {
    pub segment: usize,
    pub from: usize,
    pub to: usize,
}

/// Meridian `gamma_i`, oriented so that the track direction followed by the
/// meridian direction gives the orientation of the tube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeridianCell {
    pub segment: usize,
    pub at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCellStructure {
    pub vertices: Vec<CellVertex>,
    pub longitudinal: Vec<LongitudinalCell>,
    pub meridians: Vec<MeridianCell>,
}

impl BoundaryCellStructure {
    pub fn build(d: &TrainTrackDiagram) -> Self {
        let topo = Topology::build(d);
        let mut vertices: Vec<CellVertex> = d
            .switches
            .iter()
            .map(|s| CellVertex::Vertex(s.id.clone()))
            .chain(d.markers.iter().map(|m| CellVertex::Vertex(m.id.clone())))
            .collect();
        let mut longitudinal = Vec::new();
        let mut meridians = Vec::new();
        for (i, seg) in d.segments.iter().enumerate() {
            let mid = vertices.len();
            vertices.push(CellVertex::Midpoint(seg.id.clone()));
            longitudinal.push(LongitudinalCell {
                segment: i,
                from: topo.tail[i],
                to: mid,
            });
            longitudinal.push(LongitudinalCell {
                segment: i,
                from: mid,
                to: topo.head[i],
            });
            meridians.push(MeridianCell {
                segment: i,
                at: mid,
            });
        }
        BoundaryCellStructure {
            vertices,
            longitudinal,
            meridians,
        }
    }

    /// Number of segments, `k`.
    pub fn k(&self) -> usize {
        self.meridians.len()
    }
}

/// A first homology class of the tube boundary, as cellular chain
/// coefficients: one per segment of the pushoff and one per meridian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomClass {
    pub longitudinal: Vec<Scalar>,
    pub meridional: Vec<Scalar>,
}

impl HomClass {
    pub fn scale(&self, by: &Rational) -> HomClass {
        HomClass {
            longitudinal: self.longitudinal.iter().map(|x| x.scale(by)).collect(),
            meridional: self.meridional.iter().map(|x| x.scale(by)).collect(),
        }
    }

    pub fn add(&self, other: &HomClass) -> HomClass {
        let add = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        HomClass {
            longitudinal: add(&self.longitudinal, &other.longitudinal),
            meridional: add(&self.meridional, &other.meridional),
        }
    }

    pub fn sub(&self, other: &HomClass) -> HomClass {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    /// Coefficients as one vector, longitudinal block first.
    pub fn chain(&self) -> Vec<Scalar> {
        self.longitudinal
            .iter()
            .chain(&self.meridional)
            .cloned()
            .collect()
    }
}

fn check_twists(d: &TrainTrackDiagram, t: &[Scalar]) -> Result<(), HomologyError> {
    if t.len() != d.segments.len() {
        return Err(HomologyError::Index {
            expected: d.segments.len(),
            got: t.len(),
        });
    }
    Ok(())
}

/// `K(w, t)`; `w` must satisfy the switch equations.
pub fn k_class(
    d: &TrainTrackDiagram,
    w: &WeightVector,
    t: &[Scalar],
) -> Result<HomClass, HomologyError> {
    check_invariant(d, w)?;
    check_twists(d, t)?;
    Ok(HomClass {
        longitudinal: w.to_vec(),
        meridional: t.to_vec(),
    })
}

/// Pairing of chain classes against a cycle basis of the track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingMatrix {
    /// The cycle basis indexing the rows.
    pub cycles: Vec<Vec<Rational>>,
    /// Columns `0..k` pair with the pushoff segments, `k..2k` with meridians.
    pub matrix: Matrix,
}

impl LinkingMatrix {
    pub fn k(&self) -> usize {
        self.matrix.ncols() / 2
    }

    pub fn longitudinal_block(&self) -> Matrix {
        self.matrix.column_block(0, self.k())
    }

    pub fn meridian_block(&self) -> Matrix {
        self.matrix.column_block(self.k(), 2 * self.k())
    }

    pub fn pair(&self, class: &HomClass) -> Vec<Scalar> {
        self.matrix.apply(&class.chain())
    }
}

pub fn linking_matrix(d: &TrainTrackDiagram, cs: &BoundaryCellStructure) -> LinkingMatrix {
    let k = cs.k();
    let topo = Topology::build(d);
    let cycles = d.cycle_basis();
    let mut matrix = Matrix::zeros(cycles.len(), 2 * k);
    for (j, z) in cycles.iter().enumerate() {
        for c in &topo.crossings {
            let sign = Rational::from_integer(c.sign.into());
            matrix.add_to(j, c.over, &(&sign * &z[c.under]));
        }
        for (i, zi) in z.iter().enumerate() {
            matrix.set(j, k + i, zi.clone());
        }
    }
    LinkingMatrix { cycles, matrix }
}

/// All twist vectors `t` for which `K(w, t)` bounds: `particular + span(directions)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineTwistSpace {
    pub particular: Vec<Scalar>,
    pub directions: Vec<Vec<Rational>>,
    pub dimension: usize,
    /// Segments on no cycle of the track; their twists are unconstrained.
    pub free_segments: Vec<usize>,
}

impl AffineTwistSpace {
    /// `particular + sum_j r_j directions_j`.
    pub fn point(&self, r: &[Rational]) -> Vec<Scalar> {
        let mut t = self.particular.clone();
        for (dir, rj) in self.directions.iter().zip(r) {
            for (ti, di) in t.iter_mut().zip(dir) {
                *ti = &*ti + &Scalar::from_rational(di * rj);
            }
        }
        t
    }
}

pub fn valid_twist_space(
    d: &TrainTrackDiagram,
    cs: &BoundaryCellStructure,
    w: &WeightVector,
) -> Result<AffineTwistSpace, HomologyError> {
    check_invariant(d, w)?;
    let lm = linking_matrix(d, cs);
    let rhs: Vec<Scalar> = lm
        .longitudinal_block()
        .apply(w)
        .into_iter()
        .map(|x| -x)
        .collect();
    let meridian = lm.meridian_block();
    let (particular, directions) = meridian.solve(&rhs).ok_or(HomologyError::Inconsistent)?;
    let free_segments = (0..cs.k())
        .filter(|&i| (0..meridian.nrows()).all(|j| meridian.get(j, i).is_zero()))
        .collect();
    Ok(AffineTwistSpace {
        particular,
        dimension: directions.len(),
        directions,
        free_segments,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    /// Linking number of `K(w, t)` with each basis cycle.
    pub residual: Vec<Scalar>,
}

pub fn verify(
    d: &TrainTrackDiagram,
    cs: &BoundaryCellStructure,
    w: &WeightVector,
    t: &[Scalar],
) -> Result<Verification, HomologyError> {
    let class = k_class(d, w, t)?;
    let residual = linking_matrix(d, cs).pair(&class);
    Ok(Verification {
        valid: residual.iter().all(Scalar::is_zero),
        residual,
    })
}

/// Checks `K(w, -t) = 2 K(w, 0) - K(w, t)` on chains.
pub fn reflection_identity_check(
    d: &TrainTrackDiagram,
    w: &WeightVector,
    t: &[Scalar],
) -> Result<bool, HomologyError> {
    let neg: Vec<Scalar> = t.iter().map(|x| -x).collect();
    let lhs = k_class(d, w, &neg)?;
    let zero = k_class(d, w, &vec![Scalar::zero(); t.len()])?;
    let rhs = zero
        .scale(&Rational::from_integer(2.into()))
        .sub(&k_class(d, w, t)?);
    Ok(lhs == rhs)
}
