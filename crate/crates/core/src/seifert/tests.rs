use std::collections::BTreeMap;

use super::*;
use crate::diagram::{
    Crossing, Endpoint, Marker, Role, Segment, Slot, StrandRef, Switch, SwitchMode, Traversal,
};
use crate::scalar::Scalar;

/// Single-component knot from a Gauss code of `(crossing, over?)` pairs.
fn knot(code: &[(u32, bool)], signs: &[(u32, i8)]) -> TrainTrackDiagram {
    let traversals: Vec<Traversal> = code
        .iter()
        .map(|&(c, over)| Traversal {
            crossing: format!("c{c}"),
            role: if over { Role::Over } else { Role::Under },
        })
        .collect();
    let mut ends: BTreeMap<u32, [usize; 2]> = BTreeMap::new();
    for (i, &(c, over)) in code.iter().enumerate() {
        ends.entry(c).or_default()[usize::from(!over)] = i;
    }
    let crossings = signs
        .iter()
        .map(|&(c, sign)| {
            let [o, u] = ends[&c];
            Crossing {
                id: format!("c{c}"),
                over: StrandRef {
                    segment: "k".into(),
                    index: o,
                },
                under: StrandRef {
                    segment: "k".into(),
                    index: u,
                },
                sign,
            }
        })
        .collect();
    let mut d = TrainTrackDiagram {
        segments: vec![Segment {
            id: "k".into(),
            from: Endpoint::marker("m"),
            to: Endpoint::marker("m"),
            traversals,
        }],
        markers: vec![Marker { id: "m".into() }],
        crossings,
        ..Default::default()
    };
    d.canonicalize();
    d
}

fn trefoil() -> TrainTrackDiagram {
    let code = [
        (1, true),
        (2, false),
        (3, true),
        (1, false),
        (2, true),
        (3, false),
    ];
    knot(&code, &[(1, 1), (2, 1), (3, 1)])
}

fn figure_eight() -> TrainTrackDiagram {
    let code = [
        (1, true),
        (4, false),
        (3, true),
        (1, false),
        (2, true),
        (3, false),
        (4, true),
        (2, false),
    ];
    knot(&code, &[(1, 1), (2, 1), (3, -1), (4, -1)])
}

fn theta() -> TrainTrackDiagram {
    let seg = |id: &str, from, to| Segment {
        id: id.into(),
        from,
        to,
        traversals: vec![],
    };
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

/// Two round components crossing twice, both crossings positive.
fn hopf() -> TrainTrackDiagram {
    let tr = |c: &str, role| Traversal {
        crossing: c.into(),
        role,
    };
    let strand = |s: &str, index| StrandRef {
        segment: s.into(),
        index,
    };
    TrainTrackDiagram {
        segments: vec![
            Segment {
                id: "a".into(),
                from: Endpoint::marker("ma"),
                to: Endpoint::marker("ma"),
                traversals: vec![tr("c1", Role::Over), tr("c2", Role::Under)],
            },
            Segment {
                id: "b".into(),
                from: Endpoint::marker("mb"),
                to: Endpoint::marker("mb"),
                traversals: vec![tr("c1", Role::Under), tr("c2", Role::Over)],
            },
        ],
        markers: vec![Marker { id: "ma".into() }, Marker { id: "mb".into() }],
        crossings: vec![
            Crossing {
                id: "c1".into(),
                over: strand("a", 0),
                under: strand("b", 0),
                sign: 1,
            },
            Crossing {
                id: "c2".into(),
                over: strand("b", 1),
                under: strand("a", 1),
                sign: 1,
            },
        ],
        ..Default::default()
    }
}

fn int(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn run_rational(d: &TrainTrackDiagram, w: &[i64]) -> SeifertResult {
    run(
        d,
        &WeightVector::from_ints(w),
        &ScalarContext::rational(),
        &SeifertConfig::default(),
    )
    .unwrap()
}

#[test]
fn fixtures_are_valid() {
    for d in [trefoil(), figure_eight(), theta(), hopf()] {
        assert_eq!(d.validate(), vec![]);
    }
}

#[test]
fn trefoil_has_two_circles_and_genus_one() {
    let r = run_rational(&trefoil(), &[1]);
    assert_eq!(r.lamination.families.len(), 2);
    assert_eq!(r.framed_link.twists, vec![int(-3)]);
    assert_eq!(r.euler_characteristic, int(-1));
    assert_eq!(r.complex_euler_characteristic, -1);
    assert_eq!(r.components, Some(1));
    assert_eq!(r.genus, Some(Rational::from_integer(1.into())));
}

#[test]
fn figure_eight_has_three_circles() {
    let r = run_rational(&figure_eight(), &[1]);
    assert_eq!(r.lamination.families.len(), 3);
    let total: Scalar = r.framed_link.twists.iter().sum();
    assert!(total.is_zero());
    assert_eq!(r.euler_characteristic, int(-1));
    assert_eq!(r.genus, Some(Rational::from_integer(1.into())));
}

#[test]
fn theta_splits_into_x_and_y() {
    let r = run_rational(&theta(), &[5, 2, 3]);
    let fams = &r.lamination.families;
    assert_eq!(fams.len(), 2);
    // freeway segments sort like the originals: s_mid, s_x, s_y
    assert_eq!(fams[0].itinerary, vec![0, 1]);
    assert_eq!(fams[0].width, int(2));
    assert_eq!(fams[1].itinerary, vec![0, 2]);
    assert_eq!(fams[1].width, int(3));
    assert_eq!(r.lamination.pinches.len(), 1);
    assert_eq!(r.lamination.pinches[0].joins, [0, 1]);
    assert_eq!(r.complex_euler_characteristic, 1);
    assert_eq!(r.euler_characteristic, int(5));
    assert!(r.framed_link.twists.iter().all(Scalar::is_zero));
}

#[test]
fn hopf_with_unequal_weights_is_an_annulus() {
    let r = run_rational(&hopf(), &[1, 2]);
    assert_eq!(r.framed_link.twists, vec![int(-2), int(-1)]);
    assert_eq!(r.euler_characteristic, int(0));
    assert_eq!(r.components, Some(2));
    assert_eq!(r.genus, None);
}

#[test]
fn irrational_weights_split_exactly() {
    let ctx = ScalarContext::quadratic(2);
    let x = ctx.parse("1").unwrap();
    let y = ctx.parse("sqrt2").unwrap();
    let w = WeightVector::new(vec![&x + &y, x.clone(), y.clone()]);
    let r = run(&theta(), &w, &ctx, &SeifertConfig::default()).unwrap();
    assert_eq!(r.lamination.families[1].width, y);
    assert_eq!(r.components, None);
    assert!(matches!(
        r.lamination.genus_if_knot(&r.framed_link.twists),
        Err(SeifertError::NotASurface)
    ));
}

#[test]
fn restored_measure_matches_weights() {
    let d = figure_eight();
    let r = run_rational(&d, &[3]);
    for (i, pieces) in restored_measure(&r.lamination).iter().enumerate() {
        assert_eq!(pieces.len(), d.segments[i].traversals.len() + 1);
        assert!(pieces.iter().all(|m| *m == int(3)));
    }
}

#[test]
fn rejects_nonpositive_weights() {
    let err = run(
        &theta(),
        &WeightVector::from_ints(&[2, 2, 0]),
        &ScalarContext::rational(),
        &SeifertConfig::default(),
    )
    .unwrap_err();
    assert!(matches!(err, SeifertError::NonPositiveWeight { segment } if segment == "s_y"));
}

#[test]
fn tiny_split_bound_diverges() {
    let err = run(
        &trefoil(),
        &WeightVector::from_ints(&[1]),
        &ScalarContext::rational(),
        &SeifertConfig {
            max_splits: Some(1),
        },
    )
    .unwrap_err();
    assert!(matches!(err, SeifertError::SplitDiverged { .. }));
}
