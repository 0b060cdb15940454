//! Oriented train-track diagrams projected to the plane.
//!
//! A diagram is a trivalent oriented graph: switches (merge or split), degree
//! two marker vertices on switch-free closed curves, and segments between
//! them. Each segment records the crossings it passes through, in order, as
//! over or under traversals. Crossing signs are input data.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Rational, Scalar, ScalarContext, ScalarError};
use crate::weights::WeightVector;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("structure error: {}", join_violations(.0))]
    Structure(Vec<Violation>),
    #[error("index error: expected {expected} entries, got {got}")]
    Index { expected: usize, got: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchMode {
    /// Both branches flow into the switch, the trunk flows out.
    Merge,
    /// The trunk flows in, both branches flow out.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Trunk,
    /// The branch on the left when looking along the orientation.
    Left,
    Right,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Trunk, Slot::Left, Slot::Right];

    fn index(self) -> usize {
        match self {
            Slot::Trunk => 0,
            Slot::Left => 1,
            Slot::Right => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Switch { switch: String, slot: Slot },
    Marker { marker: String },
}

impl Endpoint {
    pub fn switch(id: &str, slot: Slot) -> Self {
        Endpoint::Switch {
            switch: id.to_string(),
            slot,
        }
    }

    pub fn marker(id: &str) -> Self {
        Endpoint::Marker {
            marker: id.to_string(),
        }
    }

    fn vertex_id(&self) -> &str {
        match self {
            Endpoint::Switch { switch, .. } => switch,
            Endpoint::Marker { marker } => marker,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Switch { switch, slot } => write!(f, "{switch}.{slot:?}"),
            Endpoint::Marker { marker } => write!(f, "{marker}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Over,
    Under,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Traversal {
    pub crossing: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Switch {
    pub id: String,
    pub mode: SwitchMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub id: String,
    pub from: Endpoint,
    pub to: Endpoint,
    #[serde(default)]
    pub traversals: Vec<Traversal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marker {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrandRef {
    pub segment: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Crossing {
    pub id: String,
    pub over: StrandRef,
    pub under: StrandRef,
    /// +1 or -1, standard convention for oriented strands.
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrainTrackDiagram {
    pub switches: Vec<Switch>,
    pub segments: Vec<Segment>,
    pub markers: Vec<Marker>,
    pub crossings: Vec<Crossing>,
}

/// A broken structural invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateId {
        kind: &'static str,
        id: String,
    },
    ReservedId {
        kind: &'static str,
        id: String,
    },
    /// A switch slot is attached to zero or several segment ends.
    SwitchSlot {
        switch: String,
        slot: Slot,
        attachments: usize,
    },
    /// A slot is attached with the wrong segment end for the switch mode.
    SwitchOrientation {
        switch: String,
        slot: Slot,
        segment: String,
    },
    UnknownVertex {
        segment: String,
        vertex: String,
    },
    /// Both ends of a segment use the same attachment.
    DegenerateSegment {
        segment: String,
    },
    MarkerDegree {
        marker: String,
        incoming: usize,
        outgoing: usize,
    },
    /// A marker sits on a component with a switch, or shares a component with another marker.
    MarkerPlacement {
        marker: String,
    },
    DanglingCrossing {
        crossing: String,
        segment: String,
    },
    CrossingReference {
        crossing: String,
        role: Role,
    },
    CrossingMultiplicity {
        crossing: String,
        over: usize,
        under: usize,
    },
    UnknownCrossing {
        segment: String,
        crossing: String,
    },
    BadSign {
        crossing: String,
        sign: i8,
    },
}

impl Violation {
    /// Short name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::DuplicateId { .. } => "unique ids",
            Violation::ReservedId { .. } => "reserved id characters",
            Violation::SwitchSlot { .. } => "switch slot structure",
            Violation::SwitchOrientation { .. } => "switch orientation coherence",
            Violation::UnknownVertex { .. } => "segment endpoints exist",
            Violation::DegenerateSegment { .. } => "segment is an interval",
            Violation::MarkerDegree { .. } => "marker degree",
            Violation::MarkerPlacement { .. } => "one marker per switch-free component",
            Violation::DanglingCrossing { .. } => "dangling crossing",
            Violation::CrossingReference { .. } => "crossing traversal reference",
            Violation::CrossingMultiplicity { .. } => "crossing traversed once over and once under",
            Violation::UnknownCrossing { .. } => "traversal names a known crossing",
            Violation::BadSign { .. } => "crossing sign is +1 or -1",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.invariant())?;
        match self {
            Violation::DuplicateId { kind, id } => write!(f, "{kind} id `{id}` repeated"),
            Violation::ReservedId { kind, id } => {
                write!(f, "{kind} id `{id}` is empty or uses `#`, `@` or `:`")
            }
            Violation::SwitchSlot {
                switch,
                slot,
                attachments,
            } => write!(
                f,
                "switch `{switch}` slot {slot:?} has {attachments} attachments"
            ),
            Violation::SwitchOrientation {
                switch,
                slot,
                segment,
            } => write!(
                f,
                "segment `{segment}` meets switch `{switch}` slot {slot:?} against the switch mode"
            ),
            Violation::UnknownVertex { segment, vertex } => {
                write!(f, "segment `{segment}` ends at unknown vertex `{vertex}`")
            }
            Violation::DegenerateSegment { segment } => {
                write!(
                    f,
                    "segment `{segment}` starts and ends at the same attachment"
                )
            }
            Violation::MarkerDegree {
                marker,
                incoming,
                outgoing,
            } => write!(
                f,
                "marker `{marker}` has {incoming} incoming and {outgoing} outgoing segment ends"
            ),
            Violation::MarkerPlacement { marker } => write!(f, "marker `{marker}` is misplaced"),
            Violation::DanglingCrossing { crossing, segment } => {
                write!(
                    f,
                    "crossing `{crossing}` references missing segment `{segment}`"
                )
            }
            Violation::CrossingReference { crossing, role } => write!(
                f,
                "crossing `{crossing}` {role:?} reference does not match the segment traversal list"
            ),
            Violation::CrossingMultiplicity {
                crossing,
                over,
                under,
            } => write!(
                f,
                "crossing `{crossing}` has {over} over and {under} under traversals"
            ),
            Violation::UnknownCrossing { segment, crossing } => {
                write!(
                    f,
                    "segment `{segment}` traverses unknown crossing `{crossing}`"
                )
            }
            Violation::BadSign { crossing, sign } => {
                write!(f, "crossing `{crossing}` has sign {sign}")
            }
        }
    }
}

fn reserved(id: &str) -> bool {
    id.is_empty() || id.contains(['#', '@', ':'])
}

impl TrainTrackDiagram {
    /// Sorts switches, segments, markers and crossings by id.
    pub fn canonicalize(&mut self) {
        self.switches.sort_by(|a, b| a.id.cmp(&b.id));
        self.segments.sort_by(|a, b| a.id.cmp(&b.id));
        self.markers.sort_by(|a, b| a.id.cmp(&b.id));
        self.crossings.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn segment_index(&self, id: &str) -> Option<usize> {
        self.segments.iter().position(|s| s.id == id)
    }

    pub fn segment_ids(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.id.as_str()).collect()
    }

    /// All invariant violations; empty iff the diagram is structurally valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.check_ids(&mut out);
        self.check_vertices(&mut out);
        self.check_crossings(&mut out);
        if out.is_empty() {
            self.check_markers(&mut out);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn check_ids(&self, out: &mut Vec<Violation>) {
        fn dup<'a>(
            kind: &'static str,
            ids: impl Iterator<Item = &'a str>,
            seen: &mut HashSet<&'a str>,
            out: &mut Vec<Violation>,
        ) {
            for id in ids {
                if reserved(id) {
                    out.push(Violation::ReservedId {
                        kind,
                        id: id.to_string(),
                    });
                }
                if !seen.insert(id) {
                    out.push(Violation::DuplicateId {
                        kind,
                        id: id.to_string(),
                    });
                }
            }
        }
        // switches and markers share the vertex namespace
        let mut vertices = HashSet::new();
        dup(
            "switch",
            self.switches.iter().map(|s| s.id.as_str()),
            &mut vertices,
            out,
        );
        dup(
            "marker",
            self.markers.iter().map(|m| m.id.as_str()),
            &mut vertices,
            out,
        );
        dup(
            "segment",
            self.segments.iter().map(|s| s.id.as_str()),
            &mut HashSet::new(),
            out,
        );
        dup(
            "crossing",
            self.crossings.iter().map(|c| c.id.as_str()),
            &mut HashSet::new(),
            out,
        );
    }

    fn check_vertices(&self, out: &mut Vec<Violation>) {
        let switches: HashMap<&str, SwitchMode> = self
            .switches
            .iter()
            .map(|s| (s.id.as_str(), s.mode))
            .collect();
        let markers: HashSet<&str> = self.markers.iter().map(|m| m.id.as_str()).collect();
        let mut slots: BTreeMap<(&str, Slot), usize> = BTreeMap::new();
        let mut marker_deg: HashMap<&str, (usize, usize)> = HashMap::new();

        for seg in &self.segments {
            if seg.from == seg.to && matches!(seg.from, Endpoint::Switch { .. }) {
                out.push(Violation::DegenerateSegment {
                    segment: seg.id.clone(),
                });
            }
            for (end, incoming) in [(&seg.from, false), (&seg.to, true)] {
                match end {
                    Endpoint::Switch { switch, slot } => {
                        let Some(&mode) = switches.get(switch.as_str()) else {
                            out.push(Violation::UnknownVertex {
                                segment: seg.id.clone(),
                                vertex: switch.clone(),
                            });
                            continue;
                        };
                        *slots.entry((switch.as_str(), *slot)).or_default() += 1;
                        // merge: branches come in, trunk goes out; split: reverse
                        let wants_incoming = (*slot == Slot::Trunk) == (mode == SwitchMode::Split);
                        if incoming != wants_incoming {
                            out.push(Violation::SwitchOrientation {
                                switch: switch.clone(),
                                slot: *slot,
                                segment: seg.id.clone(),
                            });
                        }
                    }
                    Endpoint::Marker { marker } => {
                        if !markers.contains(marker.as_str()) {
                            out.push(Violation::UnknownVertex {
                                segment: seg.id.clone(),
                                vertex: marker.clone(),
                            });
                            continue;
                        }
                        let d = marker_deg.entry(marker.as_str()).or_default();
                        if incoming {
                            d.0 += 1;
                        } else {
                            d.1 += 1;
                        }
                    }
                }
            }
        }
        for sw in &self.switches {
            for slot in Slot::ALL {
                let n = slots.get(&(sw.id.as_str(), slot)).copied().unwrap_or(0);
                if n != 1 {
                    out.push(Violation::SwitchSlot {
                        switch: sw.id.clone(),
                        slot,
                        attachments: n,
                    });
                }
            }
        }
        for m in &self.markers {
            let (i, o) = marker_deg.get(m.id.as_str()).copied().unwrap_or((0, 0));
            if i != 1 || o != 1 {
                out.push(Violation::MarkerDegree {
                    marker: m.id.clone(),
                    incoming: i,
                    outgoing: o,
                });
            }
        }
    }

    fn check_crossings(&self, out: &mut Vec<Violation>) {
        let known: HashSet<&str> = self.crossings.iter().map(|c| c.id.as_str()).collect();
        let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
        for seg in &self.segments {
            for t in &seg.traversals {
                if !known.contains(t.crossing.as_str()) {
                    out.push(Violation::UnknownCrossing {
                        segment: seg.id.clone(),
                        crossing: t.crossing.clone(),
                    });
                    continue;
                }
                let c = counts.entry(t.crossing.as_str()).or_default();
                match t.role {
                    Role::Over => c.0 += 1,
                    Role::Under => c.1 += 1,
                }
            }
        }
        for c in &self.crossings {
            if c.sign != 1 && c.sign != -1 {
                out.push(Violation::BadSign {
                    crossing: c.id.clone(),
                    sign: c.sign,
                });
            }
            let (o, u) = counts.get(c.id.as_str()).copied().unwrap_or((0, 0));
            if o != 1 || u != 1 {
                out.push(Violation::CrossingMultiplicity {
                    crossing: c.id.clone(),
                    over: o,
                    under: u,
                });
            }
            for (r, role) in [(&c.over, Role::Over), (&c.under, Role::Under)] {
                let Some(seg) = self.segments.iter().find(|s| s.id == r.segment) else {
                    out.push(Violation::DanglingCrossing {
                        crossing: c.id.clone(),
                        segment: r.segment.clone(),
                    });
                    continue;
                };
                let ok = seg
                    .traversals
                    .get(r.index)
                    .is_some_and(|t| t.crossing == c.id && t.role == role);
                if !ok {
                    out.push(Violation::CrossingReference {
                        crossing: c.id.clone(),
                        role,
                    });
                }
            }
            if c.over == c.under {
                out.push(Violation::CrossingReference {
                    crossing: c.id.clone(),
                    role: Role::Under,
                });
            }
        }
    }

    fn check_markers(&self, out: &mut Vec<Violation>) {
        let topo = Topology::build(self);
        let comp = topo.vertex_components();
        let mut has_switch = HashSet::new();
        for (v, c) in comp.iter().enumerate() {
            if v < self.switches.len() {
                has_switch.insert(*c);
            }
        }
        let mut marked = HashSet::new();
        for (k, m) in self.markers.iter().enumerate() {
            let c = comp[self.switches.len() + k];
            if has_switch.contains(&c) || !marked.insert(c) {
                out.push(Violation::MarkerPlacement {
                    marker: m.id.clone(),
                });
            }
        }
    }

    fn check_weights(&self, w: &WeightVector) -> Result<(), DiagramError> {
        if w.len() != self.segments.len() {
            return Err(DiagramError::Index {
                expected: self.segments.len(),
                got: w.len(),
            });
        }
        Ok(())
    }

    /// Weighted writhe `sum_c sign(c) * w(over c) * w(under c)`.
    pub fn writhe(&self, w: &WeightVector, ctx: &ScalarContext) -> Result<Scalar, DiagramError> {
        self.check_weights(w)?;
        let topo = Topology::build(self);
        let mut total = Scalar::zero();
        for c in &topo.crossings {
            let p = ctx.mul(&w[c.over], &w[c.under])?;
            total = total + p.scale_int(c.sign.into());
        }
        Ok(total)
    }

    /// A basis of the cycle space of the underlying graph (switches and
    /// markers as vertices, segments as edges), one rational coefficient per
    /// segment. Its length is `E - V + C`.
    pub fn cycle_basis(&self) -> Vec<Vec<Rational>> {
        let topo = Topology::build(self);
        let nv = topo.vertex_count();
        let ne = self.segments.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in 0..ne {
            adj[topo.tail[e]].push(e);
            if topo.head[e] != topo.tail[e] {
                adj[topo.head[e]].push(e);
            }
        }
        // BFS forest; parent_edge[v] = edge to parent
        let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut tree = vec![false; ne];
        for root in 0..nv {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &e in &adj[v] {
                    let u = if topo.tail[e] == v {
                        topo.head[e]
                    } else {
                        topo.tail[e]
                    };
                    if !seen[u] {
                        seen[u] = true;
                        tree[e] = true;
                        parent_edge[u] = Some(e);
                        queue.push_back(u);
                    }
                }
            }
        }
        // signed path from v to its root
        let to_root = |mut v: usize| {
            let mut p = vec![Rational::zero(); ne];
            while let Some(e) = parent_edge[v] {
                let (up, next) = if topo.tail[e] == v {
                    (Rational::one(), topo.head[e])
                } else {
                    (-Rational::one(), topo.tail[e])
                };
                p[e] += up;
                v = next;
            }
            p
        };
        (0..ne)
            .filter(|&e| !tree[e])
            .map(|e| {
                let mut z = vec![Rational::zero(); ne];
                z[e] = Rational::one();
                let pv = to_root(topo.head[e]);
                let pu = to_root(topo.tail[e]);
                for i in 0..ne {
                    z[i] += &pv[i] - &pu[i];
                }
                z
            })
            .collect()
    }

    /// Number of connected components of the underlying graph.
    pub fn component_count(&self) -> usize {
        let topo = Topology::build(self);
        let comp = topo.vertex_components();
        comp.iter().collect::<HashSet<_>>().len()
    }
}

/// A crossing with its strands resolved to segment indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedCrossing {
    pub over: usize,
    pub under: usize,
    pub sign: i8,
}

/// Index-resolved view of a valid diagram.
///
/// Vertices are numbered switches first, then markers.
#[derive(Debug, Clone)]
pub struct Topology {
    pub switch_count: usize,
    pub marker_count: usize,
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
    /// Segment attached to each (switch, slot), `[trunk, left, right]`.
    pub slots: Vec<[usize; 3]>,
    pub modes: Vec<SwitchMode>,
    pub crossings: Vec<ResolvedCrossing>,
}

impl Topology {
    /// Resolves ids to indices. The diagram must be valid.
    pub fn build(d: &TrainTrackDiagram) -> Self {
        let mut vertex: HashMap<&str, usize> = HashMap::new();
        for (i, s) in d.switches.iter().enumerate() {
            vertex.insert(&s.id, i);
        }
        for (i, m) in d.markers.iter().enumerate() {
            vertex.insert(&m.id, d.switches.len() + i);
        }
        let seg: HashMap<&str, usize> = d
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let mut slots = vec![[usize::MAX; 3]; d.switches.len()];
        let mut tail = Vec::with_capacity(d.segments.len());
        let mut head = Vec::with_capacity(d.segments.len());
        for (i, s) in d.segments.iter().enumerate() {
            for (end, list) in [(&s.from, &mut tail), (&s.to, &mut head)] {
                let v = vertex.get(end.vertex_id()).copied().unwrap_or(usize::MAX);
                list.push(v);
                if let Endpoint::Switch { slot, .. } = end {
                    if v != usize::MAX {
                        slots[v][slot.index()] = i;
                    }
                }
            }
        }
        let crossings = d
            .crossings
            .iter()
            .filter_map(|c| {
                Some(ResolvedCrossing {
                    over: *seg.get(c.over.segment.as_str())?,
                    under: *seg.get(c.under.segment.as_str())?,
                    sign: c.sign,
                })
            })
            .collect();
        Topology {
            switch_count: d.switches.len(),
            marker_count: d.markers.len(),
            tail,
            head,
            slots,
            modes: d.switches.iter().map(|s| s.mode).collect(),
            crossings,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.switch_count + self.marker_count
    }

    pub fn segment_count(&self) -> usize {
        self.tail.len()
    }

    /// Component label for every vertex.
    pub fn vertex_components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.segment_count() {
            let (a, b) = (self.tail[e], self.head[e]);
            if a == usize::MAX || b == usize::MAX {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }
}
