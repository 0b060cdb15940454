//! Switch equations, the cone of invariant weight vectors and the weight cell.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::ops::{Deref, Index};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{Topology, TrainTrackDiagram};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar, ScalarContext, ScalarError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("index error: expected {expected} weights, got {got}")]
    Index { expected: usize, got: usize },
    #[error("weight vector violates the switch equation at `{switch}`")]
    NotInvariant { switch: String },
    #[error("weight sum is not positive")]
    NonPositiveSum,
    #[error("not normalizable: {0}")]
    NotNormalizable(ScalarError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One scalar per segment, in the diagram's segment order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct WeightVector(Vec<Scalar>);

impl WeightVector {
    pub fn new(values: Vec<Scalar>) -> Self {
        WeightVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        WeightVector(vec![Scalar::zero(); n])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        WeightVector(values.iter().map(|&x| Scalar::from_integer(x)).collect())
    }

    pub fn from_rationals(values: &[Rational]) -> Self {
        WeightVector(values.iter().cloned().map(Scalar::from_rational).collect())
    }

    pub fn into_inner(self) -> Vec<Scalar> {
        self.0
    }

    pub fn scale(&self, by: &Rational) -> Self {
        WeightVector(self.0.iter().map(|x| x.scale(by)).collect())
    }

    pub fn sum(&self) -> Scalar {
        self.0.iter().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Scalar::is_integer)
    }

    /// Every entry strictly positive under `ctx` ordering.
    pub fn is_positive(&self, ctx: &ScalarContext) -> Result<bool, ScalarError> {
        for x in &self.0 {
            if !ctx.is_positive(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Deref for WeightVector {
    type Target = [Scalar];
    fn deref(&self) -> &[Scalar] {
        &self.0
    }
}

impl Index<usize> for WeightVector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl FromIterator<Scalar> for WeightVector {
    fn from_iter<I: IntoIterator<Item = Scalar>>(iter: I) -> Self {
        WeightVector(iter.into_iter().collect())
    }
}

/// The invariant subspace of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightCone {
    pub basis: Vec<Vec<Rational>>,
    pub dimension: usize,
    /// A strictly positive invariant vector, if the positive cone is nonempty.
    pub sample_positive: Option<Vec<Rational>>,
}

/// One row per switch: trunk weight minus both branch weights.
pub fn switch_matrix(d: &TrainTrackDiagram) -> Matrix {
    let topo = Topology::build(d);
    let mut m = Matrix::zeros(topo.switch_count, topo.segment_count());
    for (row, [trunk, left, right]) in topo.slots.iter().enumerate() {
        m.add_to(row, *trunk, &Rational::one());
        m.add_to(row, *left, &-Rational::one());
        m.add_to(row, *right, &-Rational::one());
    }
    m
}

pub fn invariant_space(d: &TrainTrackDiagram) -> WeightCone {
    let basis = switch_matrix(d).nullspace();
    WeightCone {
        dimension: basis.len(),
        basis,
        sample_positive: positive_circulation(d),
    }
}

/// Invariant vectors are exactly the circulations of the oriented graph, so a
/// strictly positive one exists iff every segment lies on a directed cycle.
/// Summing one directed cycle through each segment gives such a vector.
pub fn positive_circulation(d: &TrainTrackDiagram) -> Option<Vec<Rational>> {
    let topo = Topology::build(d);
    let ne = topo.segment_count();
    let nv = topo.vertex_count();
    let mut out_edges = vec![Vec::new(); nv];
    for e in 0..ne {
        out_edges[topo.tail[e]].push(e);
    }
    let mut total = vec![Rational::zero(); ne];
    for e in 0..ne {
        for c in directed_cycle_through(&topo, &out_edges, e)? {
            total[c] += Rational::one();
        }
    }
    Some(total)
}

/// Edges of a simple directed cycle containing `e`, if any.
pub(crate) fn directed_cycle_through(
    topo: &Topology,
    out_edges: &[Vec<usize>],
    e: usize,
) -> Option<Vec<usize>> {
    let (start, goal) = (topo.head[e], topo.tail[e]);
    let mut via: Vec<Option<usize>> = vec![None; topo.vertex_count()];
    let mut seen = vec![false; topo.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        if v == goal {
            break;
        }
        for &f in &out_edges[v] {
            let u = topo.head[f];
            if !seen[u] {
                seen[u] = true;
                via[u] = Some(f);
                queue.push_back(u);
            }
        }
    }
    if !seen[goal] {
        return None;
    }
    let mut cycle = vec![e];
    let mut v = goal;
    while v != start {
        let f = via[v].expect("bfs path");
        cycle.push(f);
        v = topo.tail[f];
    }
    Some(cycle)
}

fn check_len(d: &TrainTrackDiagram, w: &WeightVector) -> Result<(), WeightError> {
    if w.len() != d.segments.len() {
        return Err(WeightError::Index {
            expected: d.segments.len(),
            got: w.len(),
        });
    }
    Ok(())
}

/// `true` iff every switch equation holds exactly.
pub fn is_invariant(d: &TrainTrackDiagram, w: &WeightVector) -> Result<bool, WeightError> {
    Ok(first_broken_switch(d, w)?.is_none())
}

/// Like [`is_invariant`], but reports the first failing switch.
pub fn check_invariant(d: &TrainTrackDiagram, w: &WeightVector) -> Result<(), WeightError> {
    match first_broken_switch(d, w)? {
        None => Ok(()),
        Some(i) => Err(WeightError::NotInvariant {
            switch: d.switches[i].id.clone(),
        }),
    }
}

fn first_broken_switch(
    d: &TrainTrackDiagram,
    w: &WeightVector,
) -> Result<Option<usize>, WeightError> {
    check_len(d, w)?;
    let residual = switch_matrix(d).apply(w);
    Ok(residual.iter().position(|r| !r.is_zero()))
}

/// Scales `w` so its entries sum to one.
pub fn normalize_to_cell(
    w: &WeightVector,
    ctx: &ScalarContext,
) -> Result<WeightVector, WeightError> {
    let sum = w.sum();
    if ctx.sign(&sum)? != Ordering::Greater {
        return Err(WeightError::NonPositiveSum);
    }
    let inv = ctx.recip(&sum).map_err(WeightError::NotNormalizable)?;
    w.iter()
        .map(|x| ctx.mul(x, &inv).map_err(WeightError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Endpoint, Marker, Segment, Slot, Switch, SwitchMode};

    fn seg(id: &str, from: Endpoint, to: Endpoint) -> Segment {
        Segment {
            id: id.into(),
            from,
            to,
            traversals: vec![],
        }
    }

    fn circle() -> TrainTrackDiagram {
        TrainTrackDiagram {
            segments: vec![seg("s", Endpoint::marker("m"), Endpoint::marker("m"))],
            markers: vec![Marker { id: "m".into() }],
            ..Default::default()
        }
    }

    /// segments sort as (s_mid, s_x, s_y)
    fn theta() -> TrainTrackDiagram {
        TrainTrackDiagram {
            switches: vec![
                Switch {
                    id: "A".into(),
                    mode: SwitchMode::Merge,
                },
                Switch {
                    id: "B".into(),
                    mode: SwitchMode::Split,
                },
            ],
            segments: vec![
                seg(
                    "s_mid",
                    Endpoint::switch("A", Slot::Trunk),
                    Endpoint::switch("B", Slot::Trunk),
                ),
                seg(
                    "s_x",
                    Endpoint::switch("B", Slot::Left),
                    Endpoint::switch("A", Slot::Left),
                ),
                seg(
                    "s_y",
                    Endpoint::switch("B", Slot::Right),
                    Endpoint::switch("A", Slot::Right),
                ),
            ],
            ..Default::default()
        }
    }

    /// Merge `A` whose trunk loops back into its own left branch: the right
    /// branch `e` is forced to carry zero.
    fn forced_zero() -> TrainTrackDiagram {
        TrainTrackDiagram {
            switches: vec![
                Switch {
                    id: "A".into(),
                    mode: SwitchMode::Merge,
                },
                Switch {
                    id: "B".into(),
                    mode: SwitchMode::Split,
                },
            ],
            segments: vec![
                seg(
                    "e",
                    Endpoint::switch("B", Slot::Left),
                    Endpoint::switch("A", Slot::Right),
                ),
                seg(
                    "g",
                    Endpoint::switch("B", Slot::Right),
                    Endpoint::switch("B", Slot::Trunk),
                ),
                seg(
                    "l",
                    Endpoint::switch("A", Slot::Trunk),
                    Endpoint::switch("A", Slot::Left),
                ),
            ],
            ..Default::default()
        }
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn switch_matrix_shapes() {
        let m = switch_matrix(&circle());
        assert_eq!((m.nrows(), m.ncols()), (0, 1));
        let m = switch_matrix(&theta());
        assert_eq!((m.nrows(), m.ncols()), (2, 3));
        // w(mid) - w(x) - w(y) on both rows
        for r in m.rows() {
            assert_eq!(r, &vec![q(1), q(-1), q(-1)]);
        }
    }

    #[test]
    fn theta_cone_is_x_xplusy_y() {
        let cone = invariant_space(&theta());
        assert_eq!(cone.dimension, 2);
        for v in &cone.basis {
            assert_eq!(v[0], &v[1] + &v[2]);
        }
        let p = cone.sample_positive.unwrap();
        assert!(p.iter().all(|x| *x > q(0)));
    }

    #[test]
    fn forced_zero_has_no_positive_vector() {
        let d = forced_zero();
        assert!(d.validate().is_empty(), "{:?}", d.validate());
        let cone = invariant_space(&d);
        assert_eq!(cone.dimension, 2);
        assert!(cone.basis.iter().all(|v| v[0] == q(0)));
        assert_eq!(cone.sample_positive, None);
    }

    #[test]
    fn invariance_checks() {
        let ctx = ScalarContext::quadratic(2);
        let d = theta();
        let w: WeightVector = ["1+sqrt2", "1", "sqrt2"]
            .iter()
            .map(|s| ctx.parse(s).unwrap())
            .collect();
        assert!(is_invariant(&d, &w).unwrap());
        assert!(!is_invariant(&d, &WeightVector::from_ints(&[1, 1, 1])).unwrap());
        assert!(is_invariant(&d, &WeightVector::zeros(3)).unwrap());
        assert_eq!(
            is_invariant(&d, &WeightVector::zeros(2)),
            Err(WeightError::Index {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn normalization() {
        let ctx = ScalarContext::rational();
        let w = normalize_to_cell(&WeightVector::from_ints(&[2, 2]), &ctx).unwrap();
        assert_eq!(
            w,
            WeightVector::from_rationals(&vec![Rational::new(1.into(), 2.into()); 2])
        );
        assert_eq!(
            normalize_to_cell(&WeightVector::zeros(2), &ctx),
            Err(WeightError::NonPositiveSum)
        );
    }

    #[test]
    fn normalization_in_quadratic_field() {
        let ctx = ScalarContext::quadratic(2);
        let w: WeightVector = ["1", "1+sqrt2", "sqrt2"]
            .iter()
            .map(|s| ctx.parse(s).unwrap())
            .collect();
        let n = normalize_to_cell(&w, &ctx).unwrap();
        // 1/(2+2sqrt2) = (sqrt2-1)/2, computed by rationalizing
        let inv = ctx.parse("-1/2 + 1/2*sqrt2").unwrap();
        assert_eq!(n[0], inv);
        assert_eq!(n.sum(), Scalar::one());
        assert_eq!(ctx.mul(&inv, &w.sum()).unwrap(), Scalar::one());
    }
}
