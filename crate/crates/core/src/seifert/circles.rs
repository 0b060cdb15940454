//! Splitting a planar weighted track into product families of circles.
//!
//! Leaves of the freeway run parallel along each segment. A segment of weight
//! `w` is coordinatized by transverse position in `[0, w]`, measured from the
//! left side. At a merge the left branch fills `[0, w_left]` of the trunk and
//! the right branch the rest; at a split the trunk hands `[0, w_left]` to the
//! left branch. Every merge switch has a cusp at position `w_left` of its
//! trunk, and the singular leaf leaving it is followed forward until it runs
//! into a split cusp. Cutting along all of these compact separatrices leaves
//! pieces that map bijectively onto each other, and the cycles of that map are
//! the circle families.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::diagram::{SwitchMode, Topology};
use crate::scalar::{Rational, Scalar, ScalarContext};

use super::{Freeway, SeifertError};

/// A product family `S^1 x [0, width]` of parallel closed leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleFamily {
    pub width: Scalar,
    /// Freeway segments visited, in order, starting from the lowest index.
    pub itinerary: Vec<usize>,
}

/// One compact separatrix, from a merge cusp to a split cusp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    /// Freeway switch indices.
    pub merge: usize,
    pub split: usize,
    /// `(segment, transverse position)` along the cut.
    pub path: Vec<(usize, Scalar)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleFamilyDecomposition {
    pub families: Vec<CircleFamily>,
    pub trace: Vec<SplitRecord>,
    /// Cut positions on each freeway segment, sorted, excluding the endpoints.
    pub cuts: Vec<Vec<Scalar>>,
    /// Family of each piece, indexed like `cuts` plus one.
    pub pieces: Vec<Vec<usize>>,
}

impl CircleFamilyDecomposition {
    /// Total measure each family deposits on each segment.
    pub fn segment_measure(&self, segments: usize) -> Vec<Scalar> {
        let mut total = vec![Scalar::zero(); segments];
        for f in &self.families {
            for &s in &f.itinerary {
                total[s] = &total[s] + &f.width;
            }
        }
        total
    }
}

/// Default bound on elementary leaf steps: `2^(segments + switches)`.
pub fn default_split_bound(f: &Freeway) -> u64 {
    let n = f.track.segments.len() + f.track.switches.len();
    1u64.checked_shl(n as u32).unwrap_or(u64::MAX)
}

enum Step {
    Next(usize, Scalar),
    Cusp(usize),
}

struct Flow<'a> {
    topo: Topology,
    weights: &'a [Scalar],
    ctx: &'a ScalarContext,
    /// Outgoing segment of each marker.
    marker_out: Vec<usize>,
}

impl<'a> Flow<'a> {
    fn new(f: &'a Freeway, ctx: &'a ScalarContext) -> Self {
        let topo = Topology::build(&f.track);
        let mut marker_out = vec![usize::MAX; topo.marker_count];
        for e in 0..topo.segment_count() {
            let v = topo.tail[e];
            if v >= topo.switch_count {
                marker_out[v - topo.switch_count] = e;
            }
        }
        Flow {
            topo,
            weights: &f.weights,
            ctx,
            marker_out,
        }
    }

    /// Follows the leaf at position `x` of segment `e` across the head of `e`.
    fn step(&self, e: usize, x: &Scalar) -> Result<Step, SeifertError> {
        let v = self.topo.head[e];
        if v >= self.topo.switch_count {
            return Ok(Step::Next(
                self.marker_out[v - self.topo.switch_count],
                x.clone(),
            ));
        }
        let [trunk, left, right] = self.topo.slots[v];
        match self.topo.modes[v] {
            SwitchMode::Merge => {
                if e == left {
                    Ok(Step::Next(trunk, x.clone()))
                } else {
                    debug_assert_eq!(e, right);
                    Ok(Step::Next(trunk, &self.weights[left] + x))
                }
            }
            SwitchMode::Split => {
                debug_assert_eq!(e, trunk);
                let wl = &self.weights[left];
                Ok(match self.ctx.cmp(x, wl)? {
                    Ordering::Less => Step::Next(left, x.clone()),
                    Ordering::Greater => Step::Next(right, x - wl),
                    Ordering::Equal => Step::Cusp(v),
                })
            }
        }
    }
}

fn sort_scalars(ctx: &ScalarContext, v: &mut Vec<Scalar>) -> Result<(), SeifertError> {
    // insertion sort; the comparison can fail
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && ctx.cmp(&v[j - 1], &v[j])? == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    v.dedup();
    Ok(())
}

/// Splits the freeway along all compact separatrices.
pub fn split_circles(
    f: &Freeway,
    ctx: &ScalarContext,
    bound: Option<u64>,
) -> Result<CircleFamilyDecomposition, SeifertError> {
    let bound = bound.unwrap_or_else(|| default_split_bound(f));
    let flow = Flow::new(f, ctx);
    let topo = &flow.topo;
    let ne = topo.segment_count();

    // merge cusps, lowest trunk segment first
    let mut merges: Vec<usize> = (0..topo.switch_count)
        .filter(|&v| topo.modes[v] == SwitchMode::Merge)
        .collect();
    merges.sort_by_key(|&v| topo.slots[v][0]);

    let mut steps: u64 = 0;
    let mut trace = Vec::with_capacity(merges.len());
    let mut hit = HashSet::new();
    let mut cuts: Vec<Vec<Scalar>> = vec![Vec::new(); ne];
    for &m in &merges {
        let [trunk, left, _] = topo.slots[m];
        let mut state = (trunk, f.weights[left].clone());
        let mut path = vec![state.clone()];
        let mut seen = HashSet::from([state.clone()]);
        let split = loop {
            steps += 1;
            if steps > bound {
                return Err(SeifertError::SplitDiverged {
                    steps,
                    reason: format!("exceeded the bound of {bound} leaf steps"),
                });
            }
            match flow.step(state.0, &state.1)? {
                Step::Cusp(v) => break v,
                Step::Next(e, x) => {
                    state = (e, x);
                    if !seen.insert(state.clone()) {
                        return Err(SeifertError::SplitDiverged {
                            steps,
                            reason: format!(
                                "separatrix from `{}` closes up without reaching a cusp",
                                f.track.switches[m].id
                            ),
                        });
                    }
                    path.push(state.clone());
                }
            }
        };
        if !hit.insert(split) {
            return Err(SeifertError::SplitDiverged {
                steps,
                reason: format!("split cusp `{}` reached twice", f.track.switches[split].id),
            });
        }
        for (e, x) in &path {
            cuts[*e].push(x.clone());
        }
        trace.push(SplitRecord {
            merge: m,
            split,
            path,
        });
    }
    let splits = (0..topo.switch_count)
        .filter(|&v| topo.modes[v] == SwitchMode::Split)
        .count();
    if hit.len() != splits {
        return Err(SeifertError::SplitDiverged {
            steps,
            reason: "some split cusps have non-compact separatrices".into(),
        });
    }
    for c in cuts.iter_mut() {
        sort_scalars(ctx, c)?;
    }

    let (families, pieces) = collect_families(&flow, &cuts)?;
    Ok(CircleFamilyDecomposition {
        families,
        trace,
        cuts,
        pieces,
    })
}

fn not_a_product(reason: &str) -> SeifertError {
    SeifertError::SplitDiverged {
        steps: 0,
        reason: reason.to_string(),
    }
}

/// Boundaries `0, c_1, ..., c_k, w` of the pieces of segment `e`.
fn boundaries(cuts: &[Scalar], width: &Scalar) -> Vec<Scalar> {
    std::iter::once(Scalar::zero())
        .chain(cuts.iter().cloned())
        .chain(std::iter::once(width.clone()))
        .collect()
}

/// Index of the piece of `bounds` containing interior point `x`.
fn locate(ctx: &ScalarContext, bounds: &[Scalar], x: &Scalar) -> Result<usize, SeifertError> {
    for j in 0..bounds.len() - 1 {
        if ctx.cmp(x, &bounds[j + 1])? == Ordering::Less {
            return Ok(j);
        }
    }
    Ok(bounds.len() - 2)
}

type Families = (Vec<CircleFamily>, Vec<Vec<usize>>);

fn collect_families(flow: &Flow, cuts: &[Vec<Scalar>]) -> Result<Families, SeifertError> {
    let half = Rational::new(1.into(), 2.into());
    let bounds: Vec<Vec<Scalar>> = cuts
        .iter()
        .zip(flow.weights)
        .map(|(c, w)| boundaries(c, w))
        .collect();
    let mut owner: Vec<Vec<usize>> = bounds
        .iter()
        .map(|b| vec![usize::MAX; b.len() - 1])
        .collect();
    let mut families = Vec::new();
    for e0 in 0..bounds.len() {
        for j0 in 0..bounds[e0].len() - 1 {
            if owner[e0][j0] != usize::MAX {
                continue;
            }
            let width = &bounds[e0][j0 + 1] - &bounds[e0][j0];
            let mut itinerary = Vec::new();
            let (mut e, mut j) = (e0, j0);
            while owner[e][j] == usize::MAX {
                owner[e][j] = families.len();
                itinerary.push(e);
                if bounds[e][j + 1] != &bounds[e][j] + &width {
                    return Err(not_a_product("pieces of one family have different widths"));
                }
                let mid = (&bounds[e][j] + &bounds[e][j + 1]).scale(&half);
                let Step::Next(e2, x2) = flow.step(e, &mid)? else {
                    return Err(not_a_product("a piece interior runs into a cusp"));
                };
                e = e2;
                j = locate(flow.ctx, &bounds[e], &x2)?;
            }
            if (e, j) != (e0, j0) {
                return Err(not_a_product(
                    "leaves merge; the piece map is not a bijection",
                ));
            }
            families.push(CircleFamily { width, itinerary });
        }
    }
    Ok((families, owner))
}
