//! Shared fixtures for the integration tests: data files, a random corpus of
//! weighted diagrams, and oracles that do not go through the library's own
//! pipeline.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::PathBuf;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ttseifert::diagram::{
    Crossing, Endpoint, Marker, Role, Segment, Slot, StrandRef, Switch, SwitchMode, Topology,
    TrainTrackDiagram, Traversal,
};
use ttseifert::format::{self, DiagramFile};
use ttseifert::scalar::{Rational, Scalar};
use ttseifert::weights::{is_invariant, WeightVector};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn load(name: &str) -> DiagramFile {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    format::parse_diagram(&text).unwrap()
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

// ---- random corpus ----

/// Closures of train track braids: strands run upward, crossing, merging and
/// splitting, and are closed up around the right-hand side.
#[derive(Debug, Clone, Copy)]
enum Event {
    /// Strands `i` and `i + 1` cross; `left_over` puts the strand coming
    /// from the lower left on top.
    Cross {
        i: usize,
        left_over: bool,
    },
    Merge {
        i: usize,
    },
    Split {
        i: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum End {
    Switch(usize, Slot),
    /// Closure point `j`, joining top position `j` to bottom position `j`.
    Closure(usize),
}

struct Open {
    from: End,
    traversals: Vec<(usize, Role)>,
}

struct RawSeg {
    from: End,
    to: End,
    traversals: Vec<(usize, Role)>,
}

pub struct CorpusParams {
    pub max_strands: usize,
    pub max_events: usize,
    pub max_crossings: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_strands: 4,
            max_events: 10,
            max_crossings: 6,
        }
    }
}

fn random_events(rng: &mut impl Rng, n: usize, p: &CorpusParams) -> Vec<Event> {
    let mut events = Vec::new();
    let mut m = n;
    let mut crossings = 0;
    let len = rng.gen_range(1..=p.max_events);
    for _ in 0..len {
        let roll = rng.gen_range(0..3);
        if roll == 0 && m >= 2 && crossings < p.max_crossings {
            events.push(Event::Cross {
                i: rng.gen_range(0..m - 1),
                left_over: rng.gen(),
            });
            crossings += 1;
        } else if roll == 1 && m >= 2 {
            events.push(Event::Merge {
                i: rng.gen_range(0..m - 1),
            });
            m -= 1;
        } else if m < p.max_strands {
            events.push(Event::Split {
                i: rng.gen_range(0..m),
            });
            m += 1;
        }
    }
    while m > n {
        events.push(Event::Merge {
            i: rng.gen_range(0..m - 1),
        });
        m -= 1;
    }
    while m < n {
        events.push(Event::Split {
            i: rng.gen_range(0..m),
        });
        m += 1;
    }
    events
}

fn build(n: usize, events: &[Event]) -> TrainTrackDiagram {
    let mut open: Vec<Open> = (0..n)
        .map(|j| Open {
            from: End::Closure(j),
            traversals: vec![],
        })
        .collect();
    let mut segs: Vec<RawSeg> = Vec::new();
    let mut modes: Vec<SwitchMode> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    for ev in events {
        match *ev {
            Event::Cross { i, left_over } => {
                let c = signs.len();
                // the strand from the lower left ends up on the right
                let (l, r) = if left_over {
                    (Role::Over, Role::Under)
                } else {
                    (Role::Under, Role::Over)
                };
                open[i].traversals.push((c, l));
                open[i + 1].traversals.push((c, r));
                signs.push(if left_over { 1 } else { -1 });
                open.swap(i, i + 1);
            }
            Event::Merge { i } => {
                let s = modes.len();
                modes.push(SwitchMode::Merge);
                let right = open.remove(i + 1);
                let left = std::mem::replace(
                    &mut open[i],
                    Open {
                        from: End::Switch(s, Slot::Trunk),
                        traversals: vec![],
                    },
                );
                segs.push(RawSeg {
                    from: left.from,
                    to: End::Switch(s, Slot::Left),
                    traversals: left.traversals,
                });
                segs.push(RawSeg {
                    from: right.from,
                    to: End::Switch(s, Slot::Right),
                    traversals: right.traversals,
                });
            }
            Event::Split { i } => {
                let s = modes.len();
                modes.push(SwitchMode::Split);
                let trunk = std::mem::replace(
                    &mut open[i],
                    Open {
                        from: End::Switch(s, Slot::Left),
                        traversals: vec![],
                    },
                );
                open.insert(
                    i + 1,
                    Open {
                        from: End::Switch(s, Slot::Right),
                        traversals: vec![],
                    },
                );
                segs.push(RawSeg {
                    from: trunk.from,
                    to: End::Switch(s, Slot::Trunk),
                    traversals: trunk.traversals,
                });
            }
        }
    }
    assert_eq!(open.len(), n);
    for (j, o) in open.into_iter().enumerate() {
        segs.push(RawSeg {
            from: o.from,
            to: End::Closure(j),
            traversals: o.traversals,
        });
    }

    // contract closure points, keeping one as a marker on switch-free loops
    let mut markers = Vec::new();
    for j in 0..n {
        let a = segs.iter().position(|s| s.to == End::Closure(j)).unwrap();
        let b = segs.iter().position(|s| s.from == End::Closure(j)).unwrap();
        if a == b {
            markers.push(j);
            continue;
        }
        let sb = segs.remove(b);
        let a = if b < a { a - 1 } else { a };
        segs[a].to = sb.to;
        segs[a].traversals.extend(sb.traversals);
    }

    let endpoint = |e: End| match e {
        End::Switch(s, slot) => Endpoint::switch(&format!("v{s:02}"), slot),
        End::Closure(j) => Endpoint::marker(&format!("m{j}")),
    };
    let seg_id = |i: usize| format!("s{i:02}");
    let mut over = BTreeMap::new();
    let mut under = BTreeMap::new();
    for (i, s) in segs.iter().enumerate() {
        for (k, &(c, role)) in s.traversals.iter().enumerate() {
            let r = StrandRef {
                segment: seg_id(i),
                index: k,
            };
            match role {
                Role::Over => over.insert(c, r),
                Role::Under => under.insert(c, r),
            };
        }
    }
    let mut d = TrainTrackDiagram {
        switches: modes
            .iter()
            .enumerate()
            .map(|(s, &mode)| Switch {
                id: format!("v{s:02}"),
                mode,
            })
            .collect(),
        segments: segs
            .iter()
            .enumerate()
            .map(|(i, s)| Segment {
                id: seg_id(i),
                from: endpoint(s.from),
                to: endpoint(s.to),
                traversals: s
                    .traversals
                    .iter()
                    .map(|&(c, role)| Traversal {
                        crossing: format!("c{c:02}"),
                        role,
                    })
                    .collect(),
            })
            .collect(),
        markers: markers
            .iter()
            .map(|j| Marker {
                id: format!("m{j}"),
            })
            .collect(),
        crossings: signs
            .iter()
            .enumerate()
            .map(|(c, &sign)| Crossing {
                id: format!("c{c:02}"),
                over: over[&c].clone(),
                under: under[&c].clone(),
                sign,
            })
            .collect(),
    };
    d.canonicalize();
    d
}

/// Directed graph of the track: `(tail, head)` per segment over vertex ids.
fn graph(d: &TrainTrackDiagram) -> (Vec<usize>, Vec<usize>, usize) {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut vid = |e: &Endpoint| {
        let key = match e {
            Endpoint::Switch { switch, .. } => format!("s:{switch}"),
            Endpoint::Marker { marker } => format!("m:{marker}"),
        };
        let n = ids.len();
        *ids.entry(key).or_insert(n)
    };
    let mut tail = Vec::new();
    let mut head = Vec::new();
    for s in &d.segments {
        tail.push(vid(&s.from));
        head.push(vid(&s.to));
    }
    let n = ids.len();
    (tail, head, n)
}

/// Segments of one directed cycle through `e`, by breadth-first search.
pub fn cycle_through(d: &TrainTrackDiagram, e: usize) -> Option<Vec<usize>> {
    let (tail, head, n) = graph(d);
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([head[e]]);
    seen[head[e]] = true;
    while let Some(v) = queue.pop_front() {
        if v == tail[e] {
            let mut path = vec![e];
            let mut x = v;
            while x != head[e] {
                let s = prev[x].unwrap();
                path.push(s);
                x = tail[s];
            }
            return Some(path);
        }
        for s in 0..tail.len() {
            if tail[s] == v && !seen[head[s]] {
                seen[head[s]] = true;
                prev[head[s]] = Some(s);
                queue.push_back(head[s]);
            }
        }
    }
    None
}

/// A strictly positive invariant vector: random positive multiples of one
/// directed cycle through each segment. `None` if some segment is on no cycle.
pub fn random_positive_weights(
    d: &TrainTrackDiagram,
    rng: &mut impl Rng,
    integral: bool,
) -> Option<WeightVector> {
    let mut w = vec![Rational::zero(); d.segments.len()];
    for e in 0..d.segments.len() {
        let c = cycle_through(d, e)?;
        let k = if integral {
            q(rng.gen_range(1..=3))
        } else {
            qf(rng.gen_range(1..=9), rng.gen_range(1..=5))
        };
        for s in c {
            w[s] += &k;
        }
    }
    let w = WeightVector::from_rationals(&w);
    assert!(is_invariant(d, &w).unwrap());
    Some(w)
}

pub struct Sample {
    pub diagram: TrainTrackDiagram,
    pub weights: WeightVector,
    pub seed: u64,
}

/// A valid diagram with a positive invariant weight vector, from `seed`.
pub fn sample(seed: u64, p: &CorpusParams, integral: bool) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=p.max_strands.min(3));
        let events = random_events(&mut rng, n, p);
        let d = build(n, &events);
        let violations = d.validate();
        assert!(violations.is_empty(), "seed {seed}: {violations:?}");
        if let Some(w) = random_positive_weights(&d, &mut rng, integral) {
            return Sample {
                diagram: d,
                weights: w,
                seed,
            };
        }
    }
}

pub fn corpus(count: usize, base_seed: u64, integral: bool) -> Vec<Sample> {
    let p = CorpusParams::default();
    (0..count as u64)
        .map(|i| sample(base_seed + i, &p, integral))
        .collect()
}

// ---- oracles ----

/// Knot from a Gauss code of `(crossing, over?)` pairs, one segment `k`.
pub fn knot_from_gauss(code: &[(u32, bool)], signs: &[(u32, i8)]) -> TrainTrackDiagram {
    let mut ends: BTreeMap<u32, [usize; 2]> = BTreeMap::new();
    for (i, &(c, over)) in code.iter().enumerate() {
        ends.entry(c).or_default()[usize::from(!over)] = i;
    }
    let mut d = TrainTrackDiagram {
        segments: vec![Segment {
            id: "k".into(),
            from: Endpoint::marker("m"),
            to: Endpoint::marker("m"),
            traversals: code
                .iter()
                .map(|&(c, over)| Traversal {
                    crossing: format!("c{c}"),
                    role: if over { Role::Over } else { Role::Under },
                })
                .collect(),
        }],
        markers: vec![Marker { id: "m".into() }],
        crossings: signs
            .iter()
            .map(|&(c, sign)| Crossing {
                id: format!("c{c}"),
                over: StrandRef {
                    segment: "k".into(),
                    index: ends[&c][0],
                },
                under: StrandRef {
                    segment: "k".into(),
                    index: ends[&c][1],
                },
                sign,
            })
            .collect(),
        ..Default::default()
    };
    d.canonicalize();
    d
}

/// Seifert circles of a knot diagram by classical smoothing of its Gauss
/// code: at every crossing the arc arriving over continues along the arc
/// leaving under, and vice versa.
pub fn gauss_seifert_circles(code: &[(u32, bool)]) -> usize {
    let n = code.len();
    // arc i leaves traversal i and arrives at traversal i + 1
    let mut leave: HashMap<(u32, bool), usize> = HashMap::new();
    for (i, &key) in code.iter().enumerate() {
        leave.insert(key, i);
    }
    let next = |arc: usize| {
        let (c, over) = code[(arc + 1) % n];
        leave[&(c, !over)]
    };
    let mut seen = vec![false; n];
    let mut circles = 0;
    for a in 0..n {
        if seen[a] {
            continue;
        }
        circles += 1;
        let mut x = a;
        while !seen[x] {
            seen[x] = true;
            x = next(x);
        }
    }
    circles
}

/// Linking number of the curves carried with weights `a` and `b` (`b`
/// pushed off along the blackboard), counting only crossings where `a` is on
/// top, and separately only those where `b` is on top. For closed curves the
/// two counts agree.
pub fn one_sided_linking(
    d: &TrainTrackDiagram,
    a: &[Rational],
    b: &[Rational],
) -> (Rational, Rational) {
    let mut top = Rational::zero();
    let mut bottom = Rational::zero();
    for c in &d.crossings {
        let o = d.segment_index(&c.over.segment).unwrap();
        let u = d.segment_index(&c.under.segment).unwrap();
        let s = q(c.sign.into());
        top += &s * &a[o] * &b[u];
        bottom += &s * &b[o] * &a[u];
    }
    (top, bottom)
}

pub fn rationals(w: &WeightVector) -> Vec<Rational> {
    w.iter()
        .map(|x| x.as_rational().expect("rational weights"))
        .collect()
}

pub fn scalars(v: &[Rational]) -> Vec<Scalar> {
    v.iter().cloned().map(Scalar::from_rational).collect()
}

/// Brute-force linking number of the integer freeway `w` with the simple
/// directed cycle `z` (its segment set), by enumerating every crossing of the
/// two drawn curves.
///
/// The freeway strands sit at transverse positions `p + 1/2` of each band and
/// just below the core; the cycle runs along the core at `w/2 + 1/4`. Near a
/// switch both are drawn in the trunk's frame (left branch first), so the
/// cycle crosses every strand between its entry and exit position, always on
/// top. Returns `(freeway on top, cycle on top)`; they agree for closed curves.
pub fn freeway_cycle_linking(d: &TrainTrackDiagram, w: &[i64], z: &[usize]) -> (i64, i64) {
    let topo = Topology::build(d);
    let on_z: Vec<bool> = (0..w.len()).map(|s| z.contains(&s)).collect();
    let mut freeway_top = 0;
    let mut cycle_top = 0;
    for c in &topo.crossings {
        let s = i64::from(c.sign);
        freeway_top += s * w[c.over] * i64::from(on_z[c.under]);
        cycle_top += s * i64::from(on_z[c.over]) * w[c.under];
    }
    // positions scaled by 4: strands at 4p + 2, the cycle at 2w + 1
    for (v, slots) in topo.slots.iter().enumerate() {
        let [trunk, left, _] = *slots;
        let frame = |s: usize| {
            if s == trunk || s == left {
                0
            } else {
                4 * w[left]
            }
        };
        let Some(&a) = z.iter().find(|&&s| topo.head[s] == v) else {
            continue;
        };
        let b = *z
            .iter()
            .find(|&&s| topo.tail[s] == v)
            .expect("cycle is closed");
        let (from, to) = (frame(a) + 2 * w[a] + 1, frame(b) + 2 * w[b] + 1);
        let (lo, hi) = (from.min(to), from.max(to));
        let passed = (0..w[trunk])
            .filter(|p| (lo..hi).contains(&(4 * p + 2)))
            .count() as i64;
        cycle_top += if to > from { passed } else { -passed };
    }
    (freeway_top, cycle_top)
}
