//! Schematic SVG drawings of diagrams and circle decompositions.
//!
//! Diagrams carry no coordinates, so the layout is a fixed schematic:
//! vertices sit evenly on a circle in index order, segments are Bezier arcs
//! between them, and each crossing is drawn as a gap glyph on its under
//! strand. A closed curve with no switch and no crossing is drawn as a
//! plain circle.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use crate::diagram::{SwitchMode, Topology, TrainTrackDiagram};
use crate::seifert::{Origin, SeifertLaminationDesc};

const SIZE: f64 = 480.0;
const FAMILY_COLORS: [&str; 6] = [
    "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
];

#[derive(Debug, Clone, Copy, PartialEq)]
struct P(f64, f64);

impl P {
    fn add(self, o: P) -> P {
        P(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: P) -> P {
        P(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, k: f64) -> P {
        P(self.0 * k, self.1 * k)
    }
    fn norm(self) -> P {
        let l = self.0.hypot(self.1);
        if l < 1e-9 {
            P(0.0, -1.0)
        } else {
            self.mul(1.0 / l)
        }
    }
    fn rot(self, a: f64) -> P {
        let (s, c) = a.sin_cos();
        P(self.0 * c - self.1 * s, self.0 * s + self.1 * c)
    }
}

/// Cubic Bezier arc of one segment.
#[derive(Debug, Clone, Copy)]
struct Arc([P; 4]);

impl Arc {
    fn at(&self, t: f64) -> P {
        let [a, b, c, d] = self.0;
        let u = 1.0 - t;
        a.mul(u * u * u)
            .add(b.mul(3.0 * u * u * t))
            .add(c.mul(3.0 * u * t * t))
            .add(d.mul(t * t * t))
    }

    fn path(&self) -> String {
        let [a, b, c, d] = self.0;
        format!(
            "M {} {} C {} {}, {} {}, {} {}",
            f(a.0),
            f(a.1),
            f(b.0),
            f(b.1),
            f(c.0),
            f(c.1),
            f(d.0),
            f(d.1)
        )
    }
}

fn f(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Layout {
    vertex: Vec<P>,
    arcs: Vec<Arc>,
    /// Segments drawn as standalone circles: `(center, radius)`.
    round: HashMap<usize, (P, f64)>,
}

fn layout(d: &TrainTrackDiagram, topo: &Topology) -> Layout {
    let center = P(SIZE / 2.0, SIZE / 2.0);
    let nv = topo.vertex_count();
    let radius = SIZE * 0.32;
    let vertex: Vec<P> = (0..nv)
        .map(|i| {
            if nv == 1 {
                return center;
            }
            let a = 2.0 * PI * i as f64 / nv as f64 - PI / 2.0;
            center.add(P(a.cos(), a.sin()).mul(radius))
        })
        .collect();
    let mut parallel: HashMap<(usize, usize), usize> = HashMap::new();
    let mut arcs = Vec::with_capacity(topo.segment_count());
    let mut round = HashMap::new();
    for e in 0..topo.segment_count() {
        let (u, v) = (topo.tail[e], topo.head[e]);
        let k = {
            let c = parallel.entry((u.min(v), u.max(v))).or_insert(0);
            *c += 1;
            *c as f64
        };
        let (p, q) = (vertex[u], vertex[v]);
        if u == v {
            let out = if nv == 1 {
                P(0.0, -1.0)
            } else {
                p.sub(center).norm()
            };
            if u >= topo.switch_count && d.segments[e].traversals.is_empty() {
                let r = SIZE * 0.12 + 12.0 * (k - 1.0);
                round.insert(e, (p.add(out.mul(r)), r));
            }
            // loop through the side opposite the center, or around it
            let size = if nv == 1 { SIZE * 0.55 } else { SIZE * 0.3 } + 16.0 * (k - 1.0);
            let b = p.add(out.rot(-0.9).mul(size));
            let c = p.add(out.rot(0.9).mul(size));
            arcs.push(Arc([p, b, c, q]));
        } else {
            let dir = q.sub(p);
            let normal = dir.rot(PI / 2.0).norm();
            let sign = if u < v { 1.0 } else { -1.0 };
            let bend = normal.mul(sign * (18.0 + 22.0 * (k - 1.0)));
            arcs.push(Arc([
                p,
                p.add(dir.mul(1.0 / 3.0)).add(bend),
                p.add(dir.mul(2.0 / 3.0)).add(bend),
                q,
            ]));
        }
    }
    Layout {
        vertex,
        arcs,
        round,
    }
}

impl Layout {
    /// Point `t` of the way along segment `e`.
    fn point(&self, e: usize, t: f64) -> P {
        match self.round.get(&e) {
            Some(&(c, r)) => {
                let a = -PI / 2.0 + 2.0 * PI * t;
                c.add(P(a.cos(), a.sin()).mul(r))
            }
            None => self.arcs[e].at(t),
        }
    }
}

/// Position of traversal `i` of `n` along a segment.
fn traversal_t(i: usize, n: usize) -> f64 {
    (i as f64 + 1.0) / (n as f64 + 1.0)
}

/// Renders `d`. With weights, stroke widths are proportional to them; with a
/// lamination, one closed path is drawn per circle family.
pub fn render(
    d: &TrainTrackDiagram,
    weights: Option<&[f64]>,
    overlay: Option<&SeifertLaminationDesc>,
) -> String {
    let topo = Topology::build(d);
    let lay = layout(d, &topo);
    let max_w = weights
        .map(|w| w.iter().cloned().fold(0.0_f64, f64::max))
        .filter(|m| *m > 0.0);
    let stroke = |e: usize| match (weights, max_w) {
        (Some(w), Some(m)) => 1.0 + 7.0 * w[e] / m,
        _ => 2.0,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        SIZE
    );
    s.push_str(
        "<style>.seg{fill:none;stroke:#1f3a93}.label{font:11px sans-serif;fill:#333}</style>\n",
    );
    s.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    s.push('\n');

    for (e, seg) in d.segments.iter().enumerate() {
        let id = escape(&seg.id);
        match lay.round.get(&e) {
            Some(&(c, r)) => {
                let _ = writeln!(
                    s,
                    r#"<circle class="seg" data-segment="{id}" cx="{}" cy="{}" r="{}" stroke-width="{}"/>"#,
                    f(c.0),
                    f(c.1),
                    f(r),
                    f(stroke(e))
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    r#"<path class="seg" data-segment="{id}" d="{}" stroke-width="{}"/>"#,
                    lay.arcs[e].path(),
                    f(stroke(e))
                );
            }
        }
        let m = lay.point(e, 0.5);
        let _ = writeln!(
            s,
            r#"<text class="label" x="{}" y="{}">{id}</text>"#,
            f(m.0 + 4.0),
            f(m.1 - 4.0)
        );
    }

    for (i, p) in lay.vertex.iter().enumerate() {
        if i < topo.switch_count {
            let sw = &d.switches[i];
            let _ = writeln!(
                s,
                r##"<rect class="switch" data-switch="{}" data-mode="{}" x="{}" y="{}" width="8" height="8" fill="#1f3a93"/>"##,
                escape(&sw.id),
                if topo.modes[i] == SwitchMode::Merge {
                    "merge"
                } else {
                    "split"
                },
                f(p.0 - 4.0),
                f(p.1 - 4.0)
            );
        } else {
            let mk = &d.markers[i - topo.switch_count];
            let _ = writeln!(
                s,
                r##"<path class="marker" data-marker="{}" d="M {} {} l 4 4 l -4 4 l -4 -4 Z" fill="#888"/>"##,
                escape(&mk.id),
                f(p.0),
                f(p.1 - 4.0)
            );
        }
    }

    for (ci, c) in d.crossings.iter().enumerate() {
        let rc = &topo.crossings[ci];
        let n = d.segments[rc.under].traversals.len();
        let at = |seg: usize, idx: usize| {
            lay.point(seg, traversal_t(idx, d.segments[seg].traversals.len()))
        };
        let p = at(rc.under, c.under.index);
        let tangent = lay
            .point(rc.under, (traversal_t(c.under.index, n) + 0.01).min(1.0))
            .sub(p)
            .norm();
        let a = p.sub(tangent.mul(7.0));
        let b = p.add(tangent.mul(7.0));
        let over = tangent.rot(PI / 2.0);
        let (o1, o2) = (p.sub(over.mul(9.0)), p.add(over.mul(9.0)));
        let _ = writeln!(
            s,
            concat!(
                r#"<g class="crossing-gap" data-crossing="{}" data-sign="{}">"#,
                r#"<path d="M {} {} L {} {}" stroke="white" stroke-width="7"/>"#,
                r##"<path d="M {} {} L {} {}" stroke="#1f3a93" stroke-width="2"/>"##,
                r#"<text class="label" x="{}" y="{}">{}</text></g>"#
            ),
            escape(&c.id),
            c.sign,
            f(a.0),
            f(a.1),
            f(b.0),
            f(b.1),
            f(o1.0),
            f(o1.1),
            f(o2.0),
            f(o2.1),
            f(p.0 + 6.0),
            f(p.1 + 12.0),
            escape(&c.id)
        );
    }

    if let Some(sl) = overlay {
        let fw = &sl.freeway;
        let point = |i: usize| match fw.origin[i] {
            Origin::Piece { segment, piece } => {
                let n = d.segments[segment].traversals.len();
                // midpoint between the neighbouring traversals
                let lo = if piece == 0 {
                    0.0
                } else {
                    traversal_t(piece - 1, n)
                };
                let hi = if piece == n {
                    1.0
                } else {
                    traversal_t(piece, n)
                };
                let t = (lo + hi) / 2.0;
                lay.point(segment, t)
            }
            Origin::Crossing { crossing } => {
                let rc = &topo.crossings[crossing];
                let idx = d.crossings[crossing].under.index;
                lay.point(
                    rc.under,
                    traversal_t(idx, d.segments[rc.under].traversals.len()),
                )
            }
        };
        for (k, fam) in sl.families.iter().enumerate() {
            let shift = P(3.0, 3.0).mul(k as f64);
            let mut dpath = String::new();
            for (j, &e) in fam.itinerary.iter().enumerate() {
                let p = point(e).add(shift);
                let _ = write!(
                    dpath,
                    "{}{} {} ",
                    if j == 0 { "M " } else { "L " },
                    f(p.0),
                    f(p.1)
                );
            }
            dpath.push('Z');
            let _ = writeln!(
                s,
                r#"<path class="family" data-family="{k}" d="{dpath}" fill="none" stroke="{}" stroke-dasharray="4 3"/>"#,
                FAMILY_COLORS[k % FAMILY_COLORS.len()]
            );
        }
    }

    s.push_str("</svg>\n");
    s
}
