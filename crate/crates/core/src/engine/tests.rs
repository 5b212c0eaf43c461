use super::*;
use crate::closeness::NeighborClass;
use crate::data::build_knn;
use crate::fixtures::{generate, Fixture, FixtureSpec};
use crate::lens::polygon;
use crate::snn::build_snn_model;

fn setup(n_per_cluster: usize) -> (Fixture, Session) {
    let fx = generate(&FixtureSpec::two_blobs(n_per_cluster, 5)).unwrap();
    let model = build_snn_model(&build_knn(&fx.dataset, 10.min(2 * n_per_cluster - 1)).unwrap());
    let session = Session::new(&fx.projection, Arc::new(model), SessionConfig::default()).unwrap();
    (fx, session)
}

fn ok(s: &mut Session, t: u64, e: Event) -> RenderHints {
    s.handle_event(t, &e)
        .unwrap_or_else(|r| panic!("{e:?} rejected: {r}"))
}

/// Center of blob `c` in the layout.
fn blob(fx: &Fixture, c: i64) -> Point {
    let pts: Vec<Point> = fx
        .projection
        .positions
        .iter()
        .zip(&fx.labels)
        .filter(|(_, &l)| l == c)
        .map(|(&p, _)| p)
        .collect();
    pts.iter().fold(Point::default(), |a, &p| a + p) * (1.0 / pts.len() as f64)
}

#[test]
fn new_session_is_idle() {
    let (fx, s) = setup(20);
    assert_eq!(s.phase(), Phase::Idle);
    assert_eq!(s.live(), fx.projection.positions.as_slice());
    assert!(s.brushes().is_empty());
    assert_eq!(s.export_labels(), vec![-1; 40]);
    assert_eq!(s.heatmap_order(), (0..40).collect::<Vec<_>>());
}

#[test]
fn misaligned_projection_is_rejected() {
    let (fx, s) = setup(20);
    let short = Projection::new(fx.projection.positions[..39].to_vec()).unwrap();
    let model = Arc::new(s.model().clone());
    assert!(matches!(
        Session::new(&short, model, SessionConfig::default()),
        Err(Error::Alignment {
            dataset: 40,
            projection: 39
        })
    ));
}

#[test]
fn transient_relocation_reverts_exactly() {
    let (fx, mut s) = setup(30);
    let before = s.live().to_vec();
    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    assert_eq!(s.phase(), Phase::Inspect);
    assert!(!s.seeds().is_empty());
    let hints = ok(&mut s, 600, Event::PauseElapsed);
    assert_eq!(s.phase(), Phase::TransientLens);
    assert!(!hints.moves.is_empty());
    assert!(s.lens().is_some());
    ok(&mut s, 700, Event::move_to(blob(&fx, 0)));
    assert_eq!(s.phase(), Phase::Inspect);
    assert_eq!(s.live(), before.as_slice());
    assert!(s.lens().is_none());
    assert!(s.traces().is_empty());
}

#[test]
fn pause_needs_the_threshold() {
    let (fx, mut s) = setup(20);
    ok(&mut s, 100, Event::move_to(blob(&fx, 0)));
    assert!(s.handle_event(599, &Event::PauseElapsed).is_err());
    ok(&mut s, 600, Event::PauseElapsed);
}

#[test]
fn illegal_events_change_nothing() {
    let (fx, mut s) = setup(20);
    assert!(s.handle_event(0, &Event::Press).is_err());
    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    let snap = s.snapshot();
    for e in [
        Event::Press,
        Event::Release,
        Event::SwitchBrush { id: 4 },
        Event::SetThetaIn { value: 1.5 },
    ] {
        assert!(s.handle_event(10, &e).is_err(), "{e:?}");
        assert_eq!(s.snapshot(), snap);
    }
    assert!(s.handle_event(10, &Event::PauseElapsed).is_err());
    assert_eq!(s.snapshot(), snap);
}

#[test]
fn earlier_timestamps_are_rejected() {
    let (fx, mut s) = setup(20);
    ok(&mut s, 50, Event::move_to(blob(&fx, 0)));
    assert!(s.handle_event(49, &Event::NewBrush).is_err());
}

#[test]
fn press_release_captures_seeds_and_covered() {
    let (fx, mut s) = setup(30);
    ok(&mut s, 0, Event::move_to(blob(&fx, 1)));
    ok(&mut s, 500, Event::PauseElapsed);
    let mut expected: Vec<usize> = s.seeds().to_vec();
    expected.extend(covered_points(s.live(), &s.painter()));
    expected.sort_unstable();
    expected.dedup();
    ok(&mut s, 510, Event::Press);
    assert_eq!(s.phase(), Phase::Brushing);
    ok(&mut s, 520, Event::Release);
    assert_eq!(s.phase(), Phase::Inspect);
    let mut got = s.brushes()[0].points.clone();
    got.sort_unstable();
    assert_eq!(got, expected);
    let labels = s.export_labels();
    for &i in &got {
        assert_eq!(labels[i], 0);
    }
}

#[test]
fn stroke_keeps_lens_invariants() {
    let (fx, mut s) = setup(30);
    let c = blob(&fx, 0);
    ok(&mut s, 0, Event::move_to(c));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    for step in 0..8 {
        let p = c + Point::new(0.01 * step as f64, -0.005 * step as f64);
        ok(&mut s, 520 + step, Event::move_to(p));
        let lens = s.lens().unwrap();
        let close = s.closeness().unwrap();
        let eps = 1e-9 * lens.diameter;
        for (i, &p) in s.live().iter().enumerate() {
            match close.classes[i] {
                NeighborClass::NonNeighbor => assert!(polygon::signed_margin(&lens.outer, p) < eps),
                NeighborClass::TrueNeighbor => {
                    assert!(polygon::signed_margin(&lens.inner, p) > -eps)
                }
                _ => {}
            }
        }
    }
}

#[test]
fn traces_expire_after_lifetime_moves() {
    let (fx, mut s) = setup(30);
    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    ok(&mut s, 520, Event::Release);
    ok(&mut s, 530, Event::NewBrush);
    let far = Point::new(100.0, 100.0);
    s.traces = vec![AgedTrace {
        trace: Trace {
            index: 0,
            from: far,
            to: far,
        },
        age: 0,
    }];
    for i in 0..29 {
        ok(&mut s, 600 + i, Event::move_to(far));
    }
    assert_eq!(s.traces().len(), 1);
    ok(&mut s, 700, Event::move_to(far));
    assert!(s.traces().is_empty());
}

#[test]
fn other_brush_points_return_after_stroke() {
    let (fx, mut s) = setup(30);
    let c = blob(&fx, 0);
    // a first brush on part of blob 0
    ok(&mut s, 0, Event::move_to(c));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    ok(&mut s, 520, Event::Release);
    let first: Vec<usize> = s.brushes()[0].points.clone();
    ok(&mut s, 530, Event::NewBrush);
    let parked = Point::new(c.x + 0.3, c.y + 0.3);
    // move the first brush's points away so the second stroke must pull them
    for &i in &first {
        s.live[i] = parked;
    }
    let before: Vec<Point> = s.live().to_vec();
    ok(&mut s, 540, Event::move_to(c + Point::new(0.05, 0.0)));
    ok(&mut s, 1100, Event::PauseElapsed);
    ok(&mut s, 1110, Event::Press);
    let moved = first.iter().any(|&i| s.live()[i] != parked);
    assert!(moved, "the stroke should attract the first brush's points");
    ok(&mut s, 1120, Event::Release);
    for &i in &first {
        assert_eq!(s.owner(i), Some(0));
        assert_eq!(s.live()[i], before[i]);
    }
}

#[test]
fn overwrite_reassigns_covered_points() {
    let (fx, mut s) = setup(30);
    let c = blob(&fx, 0);
    ok(&mut s, 0, Event::move_to(c));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    ok(&mut s, 520, Event::Release);
    ok(&mut s, 530, Event::NewBrush);
    ok(&mut s, 540, Event::SetOverwrite { enabled: true });
    ok(&mut s, 550, Event::move_to(c));
    ok(&mut s, 1050, Event::PauseElapsed);
    ok(&mut s, 1060, Event::Press);
    ok(&mut s, 1070, Event::Release);
    assert!(!s.brushes()[1].points.is_empty());
    let total: usize = s.brushes().iter().map(|b| b.points.len()).sum();
    let owned = s.export_labels().iter().filter(|&&l| l >= 0).count();
    assert_eq!(total, owned);
}

#[test]
fn drag_translates_the_active_brush() {
    let (fx, mut s) = setup(30);
    let c = blob(&fx, 0);
    ok(&mut s, 0, Event::move_to(c));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    ok(&mut s, 520, Event::Release);
    let pts = s.brushes()[0].points.clone();
    let before = s.live().to_vec();
    ok(&mut s, 530, Event::SetDrag { enabled: true });
    ok(&mut s, 540, Event::move_to(c + Point::new(2.0, 1.0)));
    for (i, (&a, &b)) in before.iter().zip(s.live()).enumerate() {
        if pts.contains(&i) {
            assert!((b - a - Point::new(2.0, 1.0)).norm() < 1e-12);
        } else {
            assert_eq!(a, b);
        }
    }
}

#[test]
fn contextualize_round_trip() {
    let (fx, mut s) = setup(30);
    let ident = s.contextualize().unwrap();
    assert!(ident.iter().all(|m| m.from == m.to));
    s.contextualize().unwrap();

    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::Press);
    assert!(matches!(s.contextualize(), Err(Error::Phase(_))));
    assert!(s.handle_event(511, &Event::ToggleContext).is_err());
    ok(&mut s, 520, Event::Release);
    let relocated = s.live().to_vec();
    let ends = s.contextualize().unwrap();
    assert_eq!(s.phase(), Phase::Contextualized);
    for &i in &s.brushes()[0].points {
        assert_eq!(ends[i].to, fx.projection.positions[i]);
    }
    assert_eq!(s.live(), fx.projection.positions.as_slice());
    ok(&mut s, 530, Event::ToggleContext);
    assert_eq!(s.phase(), Phase::Inspect);
    assert_eq!(s.live(), relocated.as_slice());
}

#[test]
fn heatmap_order_example() {
    let (_, mut s) = setup(4);
    for id in 0..2 {
        s.brushes.push(Brush {
            id,
            color_tag: PALETTE[id as usize].into(),
            points: vec![],
            active: false,
        });
    }
    s.assign(5, 0);
    s.assign(2, 0);
    s.assign(7, 1);
    assert_eq!(s.heatmap_order(), vec![5, 2, 7, 0, 1, 3, 4, 6]);
    assert_eq!(s.export_labels(), vec![-1, -1, 0, -1, -1, 0, -1, 1]);
}

#[test]
fn replay_reports_event_index() {
    let (fx, mut s) = setup(20);
    let c = blob(&fx, 0);
    let t = Trajectory {
        params: TrajectoryParams::default(),
        events: vec![
            TimedEvent {
                t: 0,
                event: Event::move_to(c),
            },
            TimedEvent {
                t: 10,
                event: Event::Press,
            },
        ],
    };
    assert!(matches!(
        s.replay(&t),
        Err(Error::Trajectory { index: 1, .. })
    ));
}

#[test]
fn sliders_rebuild_the_transient_lens() {
    let (fx, mut s) = setup(30);
    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    let base = s.live().to_vec();
    ok(&mut s, 500, Event::PauseElapsed);
    ok(&mut s, 510, Event::SetThetaOut { value: 0.9 });
    assert_eq!(s.phase(), Phase::TransientLens);
    assert_eq!(s.params().theta_out, 0.9);
    ok(&mut s, 520, Event::Wheel { delta: 0.01 });
    ok(&mut s, 530, Event::move_to(blob(&fx, 0)));
    assert_eq!(s.live(), base.as_slice());
}

#[test]
fn snapshot_json_roundtrips_mid_brush() {
    let (fx, mut s) = setup(30);
    ok(&mut s, 0, Event::move_to(blob(&fx, 0)));
    ok(&mut s, 600, Event::PauseElapsed);
    ok(&mut s, 610, Event::Press);
    let snap = s.snapshot();
    let text = snap.to_json();
    assert_eq!(Snapshot::parse(&text).unwrap(), snap);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "phase",
        "live",
        "brushes",
        "activeBrush",
        "painter",
        "params",
        "modes",
        "lens",
        "traces",
        "seeds",
        "closeness",
        "densityNorm",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["live"].as_array().unwrap().len(), 60);
    assert!(v["lens"]["inner"].as_array().unwrap().len() >= 3);
    assert!(Snapshot::parse("{\"phase\": \"Idle\"}").is_err());
}
