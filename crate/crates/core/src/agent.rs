//! A scripted labeling user.
//!
//! The agent brushes one cluster at a time. It starts each brush on the
//! densest unbrushed point that is not a neighbor of an earlier brush, pauses,
//! presses, and then keeps painting unbrushed points that the lens has placed
//! inside its inner boundary. The painter radius shrinks when needed so the
//! disc never reaches a point outside the inner boundary. When no such point
//! is left the agent releases and starts the next brush.
//!
//! Every step goes through [`Session::handle_event`], and the emitted events
//! form a [`Trajectory`] that replays to the same session.

use serde::{Deserialize, Serialize};

use crate::closeness::closeness;
use crate::engine::{Event, Phase, Session, TimedEvent, Trajectory, TrajectoryParams};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::lens::polygon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct AgentConfig {
    /// Number of brushes to paint.
    pub clusters: usize,
    /// Milliseconds between consecutive pointer events.
    pub step_ms: u64,
    /// Upper bound on painting moves per brush.
    pub max_moves: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            clusters: 2,
            step_ms: 16,
            max_moves: 5000,
        }
    }
}

struct Recorder<'a> {
    session: &'a mut Session,
    events: Vec<TimedEvent>,
    t: u64,
}

impl Recorder<'_> {
    fn emit(&mut self, dt: u64, event: Event) -> Result<()> {
        self.t += dt;
        let index = self.events.len();
        self.session
            .handle_event(self.t, &event)
            .map_err(|r| Error::Trajectory {
                index,
                reason: format!("{}: {r}", event.name()),
            })?;
        self.events.push(TimedEvent { t: self.t, event });
        Ok(())
    }
}

/// Densest unbrushed point with zero closeness to every existing brush,
/// falling back to the densest unbrushed point.
fn next_start(session: &Session) -> Option<usize> {
    let model = session.model();
    let density = model.density_norm();
    let mut free: Vec<usize> = (0..session.len())
        .filter(|&i| session.owner(i).is_none())
        .collect();
    free.sort_by(|&a, &b| density[b].total_cmp(&density[a]).then(a.cmp(&b)));
    let params = session.params();
    let unrelated = |p: usize| {
        session
            .brushes()
            .iter()
            .filter(|b| !b.points.is_empty())
            .all(|b| closeness(model, &params, p, &b.points).map_or(true, |c| c == 0.0))
    };
    free.iter()
        .copied()
        .find(|&p| unrelated(p))
        .or(free.first().copied())
}

/// Largest painter radius around `center` that reaches no point outside the
/// inner boundary, capped at `cap`.
fn safe_radius(session: &Session, inner: &[Point], center: Point, cap: f64) -> f64 {
    session
        .live()
        .iter()
        .filter(|&&q| polygon::signed_margin(inner, q) <= 0.0)
        .map(|&q| q.dist(center))
        .fold(cap, f64::min)
}

/// Drive `session` from its current state and return the recorded events.
pub fn author(session: &mut Session, config: &AgentConfig) -> Result<Trajectory> {
    if session.phase() != Phase::Idle {
        return Err(Error::Phase(format!("{:?}", session.phase())));
    }
    let base_radius = session.painter().radius;
    let min_radius = session.extent() * session.config().painter_min;
    let pause = session.pause_threshold_ms();
    let params = TrajectoryParams {
        theta_in: Some(session.params().theta_in),
        theta_out: Some(session.params().theta_out),
        pause_threshold_ms: Some(pause),
        painter_radius: Some(base_radius),
        overwrite: Some(false),
        drag: Some(false),
    };
    let mut rec = Recorder {
        session,
        events: Vec::new(),
        t: 0,
    };

    for b in 0..config.clusters {
        let Some(start) = next_start(rec.session) else {
            break;
        };
        if b > 0 {
            rec.emit(config.step_ms, Event::NewBrush)?;
        }
        let radius = rec.session.painter().radius;
        if radius != base_radius {
            rec.emit(
                config.step_ms,
                Event::Wheel {
                    delta: base_radius - radius,
                },
            )?;
        }
        rec.emit(config.step_ms, Event::move_to(rec.session.live()[start]))?;
        rec.emit(pause, Event::PauseElapsed)?;
        rec.emit(config.step_ms, Event::Press)?;

        let mut skipped = vec![false; rec.session.len()];
        for _ in 0..config.max_moves {
            let Some(lens) = rec.session.lens() else {
                break;
            };
            let inner = lens.inner.clone();
            let here = rec.session.painter().center;
            let target = (0..rec.session.len())
                .filter(|&i| rec.session.owner(i).is_none() && !skipped[i])
                .filter(|&i| polygon::signed_margin(&inner, rec.session.live()[i]) > 0.0)
                .min_by(|&a, &b| {
                    let (pa, pb) = (rec.session.live()[a], rec.session.live()[b]);
                    pa.dist(here).total_cmp(&pb.dist(here)).then(a.cmp(&b))
                });
            let Some(target) = target else { break };
            let at = rec.session.live()[target];
            let r = safe_radius(rec.session, &inner, at, base_radius) * 0.999;
            if r < min_radius {
                skipped[target] = true;
                continue;
            }
            let current = rec.session.painter().radius;
            if r != current {
                rec.emit(config.step_ms, Event::Wheel { delta: r - current })?;
            }
            rec.emit(config.step_ms, Event::move_to(at))?;
            if rec.session.owner(target).is_none() {
                skipped[target] = true;
            }
        }
        rec.emit(config.step_ms, Event::Release)?;
    }
    Ok(Trajectory {
        params,
        events: rec.events,
    })
}
