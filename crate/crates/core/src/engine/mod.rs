//! The interactive brushing session.
//!
//! A session walks through four steps. Moving the painter inspects the data
//! under it (seed selection and closeness coloring). Holding still past the
//! pause threshold builds a lens and relocates points transiently; moving
//! again undoes that exactly. Pressing makes the relocation permanent and
//! starts a stroke that captures covered points into the active brush,
//! rebuilding the lens after every move. Releasing returns to inspection with
//! the brush and the covered points as seeds.
//!
//! Every input is an [`Event`]; timing enters only through the event
//! timestamps, so replaying a recorded [`Trajectory`] is deterministic.

mod event;
mod snapshot;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use event::{Event, TimedEvent, Trajectory, TrajectoryParams};
pub use snapshot::{LensView, Snapshot};

use crate::closeness::{classify, ClosenessParams, ClosenessResult};
use crate::data::Projection;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::lens::{build_plan, Lens, LensConfig, RelocationPlan, Trace};
use crate::seeds::{covered_points, density_center, select_seeds, Painter};
use crate::snn::SnnModel;

pub const DEFAULT_PAUSE_THRESHOLD_MS: u64 = 500;
/// Relocation traces disappear this many pointer moves after they appear.
pub const DEFAULT_TRACE_LIFETIME: u32 = 30;

const PALETTE: [&str; 10] = [
    "blue", "orange", "green", "red", "purple", "brown", "pink", "olive", "cyan", "gray",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Idle,
    Inspect,
    TransientLens,
    Brushing,
    Contextualized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Brush {
    pub id: u32,
    pub color_tag: String,
    /// Brushed point indices in insertion order.
    pub points: Vec<usize>,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modes {
    /// Covered points owned by other brushes move to the active brush.
    pub overwrite: bool,
    /// Pointer motion translates the active brush instead of painting.
    pub drag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgedTrace {
    #[serde(flatten)]
    pub trace: Trace,
    pub age: u32,
}

/// Displacement of one point during an event, for animation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub index: usize,
    pub from: Point,
    pub to: Point,
}

/// What an accepted event changed on screen.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderHints {
    pub moves: Vec<Move>,
}

/// An event that is not legal in the current state. The session is left
/// untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub reason: String,
}

impl Rejection {
    fn new(reason: impl Into<String>) -> Rejection {
        Rejection {
            reason: reason.into(),
        }
    }
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn reject(e: Error) -> Rejection {
    Rejection::new(e.to_string())
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Session constants. Painter sizes are fractions of the projection's
/// bounding-box diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SessionConfig {
    pub params: ClosenessParams,
    pub lens: LensConfig,
    pub pause_threshold_ms: u64,
    pub painter_radius: f64,
    pub painter_min: f64,
    pub painter_max: f64,
    pub trace_lifetime: u32,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            params: ClosenessParams::default(),
            lens: LensConfig::default(),
            pause_threshold_ms: DEFAULT_PAUSE_THRESHOLD_MS,
            painter_radius: 0.05,
            painter_min: 0.002,
            painter_max: 0.5,
            trace_lifetime: DEFAULT_TRACE_LIFETIME,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.lens.validate()?;
        let (lo, r, hi) = (self.painter_min, self.painter_radius, self.painter_max);
        if !(lo > 0.0 && lo <= r && r <= hi && hi.is_finite()) {
            return Err(Error::Parameter(format!(
                "painter radius fractions need 0 < min {lo} <= radius {r} <= max {hi}"
            )));
        }
        Ok(())
    }
}

/// Lens state undone when the pointer moves after a pause.
#[derive(Debug, Clone)]
struct Transient {
    live: Vec<Point>,
    traces: Vec<AgedTrace>,
}

#[derive(Debug, Clone)]
struct Context {
    live: Vec<Point>,
    phase: Phase,
}

/// Lens, closeness and plan computed for one member set.
struct Relocation {
    lens: Lens,
    closeness: ClosenessResult,
    plan: RelocationPlan,
}

/// One user's brushing session over a fixed projection.
#[derive(Debug, Clone)]
pub struct Session {
    model: Arc<SnnModel>,
    config: SessionConfig,
    extent: f64,
    original: Vec<Point>,
    live: Vec<Point>,
    brushes: Vec<Brush>,
    owner: Vec<Option<u32>>,
    active: Option<u32>,
    phase: Phase,
    painter: Painter,
    params: ClosenessParams,
    modes: Modes,
    traces: Vec<AgedTrace>,
    lens: Option<Lens>,
    seeds: Vec<usize>,
    closeness: Option<ClosenessResult>,
    pause_threshold_ms: u64,
    last_t: u64,
    last_move_t: u64,
    transient: Option<Transient>,
    /// Pre-stroke positions of other brushes' points moved during a stroke.
    stroke_origin: BTreeMap<usize, Point>,
    context: Option<Context>,
}

impl Session {
    /// Start an idle session; `model` must be built from the dataset the
    /// projection lays out.
    pub fn new(
        projection: &Projection,
        model: Arc<SnnModel>,
        config: SessionConfig,
    ) -> Result<Session> {
        if model.len() != projection.len() {
            return Err(Error::Alignment {
                dataset: model.len(),
                projection: projection.len(),
            });
        }
        config.validate()?;
        let extent = projection.extent();
        let scale = if extent > 0.0 { extent } else { 1.0 };
        let original = projection.positions.clone();
        let n = original.len();
        Ok(Session {
            model,
            extent: scale,
            live: original.clone(),
            original,
            brushes: Vec::new(),
            owner: vec![None; n],
            active: None,
            phase: Phase::Idle,
            painter: Painter::new(Point::default(), config.painter_radius * scale)?,
            params: config.params,
            modes: Modes::default(),
            traces: Vec::new(),
            lens: None,
            seeds: Vec::new(),
            closeness: None,
            pause_threshold_ms: config.pause_threshold_ms,
            last_t: 0,
            last_move_t: 0,
            transient: None,
            stroke_origin: BTreeMap::new(),
            context: None,
            config,
        })
    }

    /// Apply recorded settings before replaying events.
    pub fn apply_params(&mut self, p: &TrajectoryParams) -> Result<()> {
        let params = ClosenessParams::new(
            p.theta_in.unwrap_or(self.params.theta_in),
            p.theta_out.unwrap_or(self.params.theta_out),
        )?;
        if let Some(r) = p.painter_radius {
            self.painter = Painter::new(self.painter.center, r)?;
        }
        self.params = params;
        self.pause_threshold_ms = p.pause_threshold_ms.unwrap_or(self.pause_threshold_ms);
        self.modes.overwrite = p.overwrite.unwrap_or(self.modes.overwrite);
        self.modes.drag = p.drag.unwrap_or(self.modes.drag);
        Ok(())
    }

    pub fn model(&self) -> &SnnModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn original(&self) -> &[Point] {
        &self.original
    }

    pub fn live(&self) -> &[Point] {
        &self.live
    }

    pub fn brushes(&self) -> &[Brush] {
        &self.brushes
    }

    pub fn active_brush(&self) -> Option<&Brush> {
        self.active.map(|id| &self.brushes[id as usize])
    }

    /// Brush owning point `i`.
    pub fn owner(&self, i: usize) -> Option<u32> {
        self.owner[i]
    }

    pub fn painter(&self) -> Painter {
        self.painter
    }

    pub fn params(&self) -> ClosenessParams {
        self.params
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn lens(&self) -> Option<&Lens> {
        self.lens.as_ref()
    }

    /// Seeds under inspection (or driving the transient lens).
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// Closeness to the current seeds or brush, when there is one.
    pub fn closeness(&self) -> Option<&ClosenessResult> {
        self.closeness.as_ref()
    }

    pub fn traces(&self) -> &[AgedTrace] {
        &self.traces
    }

    /// Projection bounding-box diagonal the painter sizes are relative to.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn pause_threshold_ms(&self) -> u64 {
        self.pause_threshold_ms
    }

    /// Feed one event. Illegal events are rejected without any state change.
    pub fn handle_event(
        &mut self,
        t: u64,
        event: &Event,
    ) -> std::result::Result<RenderHints, Rejection> {
        if t < self.last_t {
            return Err(Rejection::new(format!(
                "timestamp {t} precedes {}",
                self.last_t
            )));
        }
        let before = self.live.clone();
        self.dispatch(t, event)?;
        self.last_t = t;
        let moves = before
            .iter()
            .zip(&self.live)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(index, (&from, &to))| Move { index, from, to })
            .collect();
        Ok(RenderHints { moves })
    }

    /// Replay a trajectory from its first event. The first illegal event
    /// aborts with its index.
    pub fn replay(&mut self, trajectory: &Trajectory) -> Result<()> {
        self.apply_params(&trajectory.params)?;
        for (index, e) in trajectory.events.iter().enumerate() {
            self.handle_event(e.t, &e.event)
                .map_err(|r| Error::Trajectory {
                    index,
                    reason: format!("{}: {r}", e.event.name()),
                })?;
        }
        Ok(())
    }

    fn dispatch(&mut self, t: u64, event: &Event) -> std::result::Result<(), Rejection> {
        use Phase::*;
        match (*event, self.phase) {
            (Event::MoveTo { x, y }, _) if !(x.is_finite() && y.is_finite()) => {
                Err(Rejection::new("non-finite pointer position"))
            }
            (Event::MoveTo { x, y }, Contextualized) => {
                self.painter.center = Point::new(x, y);
                self.last_move_t = t;
                Ok(())
            }
            (Event::MoveTo { x, y }, Brushing) => {
                self.stroke_move(Point::new(x, y))?;
                self.last_move_t = t;
                Ok(())
            }
            (Event::MoveTo { x, y }, _) => {
                self.revert_transient();
                self.phase = Inspect;
                let to = Point::new(x, y);
                let delta = to - self.painter.center;
                self.painter.center = to;
                if self.modes.drag {
                    self.drag_active(delta);
                }
                self.age_traces();
                self.refresh_inspect();
                self.last_move_t = t;
                Ok(())
            }
            (Event::PauseElapsed, Inspect) => {
                if t < self.last_move_t + self.pause_threshold_ms {
                    return Err(Rejection::new(format!(
                        "only {} ms since the last move",
                        t - self.last_move_t
                    )));
                }
                if self.seeds.is_empty() {
                    return Err(Rejection::new("no seeds under the painter"));
                }
                let reloc = self.relocation(&self.seeds, &self.live).map_err(reject)?;
                self.transient = Some(Transient {
                    live: self.live.clone(),
                    traces: self.traces.clone(),
                });
                self.install(reloc);
                self.phase = TransientLens;
                Ok(())
            }
            (Event::Press, TransientLens) => self.press(),
            (Event::Release, Brushing) => {
                self.release();
                Ok(())
            }
            (Event::Wheel { delta }, _) => {
                if !delta.is_finite() {
                    return Err(Rejection::new("non-finite wheel delta"));
                }
                let lo = self.config.painter_min * self.extent;
                let hi = self.config.painter_max * self.extent;
                let radius = (self.painter.radius + delta).clamp(lo, hi);
                let old = self.painter.radius;
                self.painter.radius = radius;
                // a stroke picks the new radius up at its next move
                if self.phase != Brushing {
                    if let Err(r) = self.after_setting_change() {
                        self.painter.radius = old;
                        return Err(r);
                    }
                }
                Ok(())
            }
            (Event::SetThetaIn { value }, _) | (Event::SetThetaOut { value }, _) => {
                let mut params = self.params;
                if matches!(event, Event::SetThetaIn { .. }) {
                    params.theta_in = value;
                } else {
                    params.theta_out = value;
                }
                params
                    .validate()
                    .map_err(|e| Rejection::new(e.to_string()))?;
                let old = std::mem::replace(&mut self.params, params);
                if let Err(r) = self.after_setting_change() {
                    self.params = old;
                    return Err(r);
                }
                Ok(())
            }
            (Event::SetOverwrite { enabled }, _) => {
                self.modes.overwrite = enabled;
                if self.phase == Inspect {
                    self.refresh_inspect();
                }
                Ok(())
            }
            (Event::SetDrag { enabled }, _) => {
                self.modes.drag = enabled;
                Ok(())
            }
            (Event::ToggleContext, Brushing) => {
                Err(Rejection::new("cannot leave the layout mid-stroke"))
            }
            (Event::ToggleContext, _) => {
                self.toggle_context();
                Ok(())
            }
            (Event::NewBrush, Idle | Inspect | TransientLens) => {
                self.revert_transient_in_place();
                let id = self.brushes.len() as u32;
                self.brushes.push(Brush {
                    id,
                    color_tag: PALETTE[id as usize % PALETTE.len()].to_string(),
                    points: Vec::new(),
                    active: false,
                });
                self.set_active(id);
                Ok(())
            }
            (Event::SwitchBrush { id }, Idle | Inspect | TransientLens) => {
                if id as usize >= self.brushes.len() {
                    return Err(Rejection::new(format!("no brush {id}")));
                }
                self.revert_transient_in_place();
                self.set_active(id);
                Ok(())
            }
            (e, phase) => Err(Rejection::new(format!(
                "{} is not allowed in phase {phase:?}",
                e.name()
            ))),
        }
    }

    fn set_active(&mut self, id: u32) {
        for b in &mut self.brushes {
            b.active = b.id == id;
        }
        self.active = Some(id);
        if self.phase == Phase::Inspect {
            self.refresh_inspect();
        }
    }

    /// Whether point `i` may join the active brush.
    fn eligible(&self, i: usize) -> bool {
        self.modes.overwrite || self.owner[i].is_none() || self.owner[i] == self.active
    }

    fn covered(&self, live: &[Point], painter: &Painter) -> Vec<usize> {
        covered_points(live, painter)
            .into_iter()
            .filter(|&i| self.eligible(i))
            .collect()
    }

    fn active_points(&self) -> &[usize] {
        self.active
            .map_or(&[], |id| &self.brushes[id as usize].points)
    }

    /// Seeds while inspecting: the filtered covered points, or, once the
    /// active brush has points, that brush together with everything covered.
    fn inspect_seeds(&self, live: &[Point]) -> Vec<usize> {
        let covered = self.covered(live, &self.painter);
        let brush = self.active_points();
        if brush.is_empty() {
            select_seeds(&self.model, &self.params, &covered).unwrap_or_default()
        } else {
            union_sorted(brush, &covered)
        }
    }

    fn refresh_inspect(&mut self) {
        self.seeds = self.inspect_seeds(&self.live);
        self.closeness = if self.seeds.is_empty() {
            None
        } else {
            classify(&self.model, &self.params, &self.seeds).ok()
        };
    }

    fn relocation(&self, members: &[usize], live: &[Point]) -> Result<Relocation> {
        let brush: Vec<Point> = members.iter().map(|&i| live[i]).collect();
        let anchor = density_center(&self.model, members).map(|i| live[i]);
        let (lens, _) = Lens::around(
            &brush,
            anchor,
            self.extent,
            self.painter.radius,
            &self.config.lens,
        )?;
        let closeness = classify(&self.model, &self.params, members)?;
        let plan = build_plan(&lens, &closeness, &self.params, live)?;
        Ok(Relocation {
            lens,
            closeness,
            plan,
        })
    }

    /// Apply a relocation and keep its lens, closeness and traces.
    fn install(&mut self, reloc: Relocation) {
        let in_stroke = self.phase == Phase::Brushing;
        for m in reloc.plan.apply(&mut self.live) {
            if in_stroke && self.owner[m.index].is_some() && self.owner[m.index] != self.active {
                self.stroke_origin.entry(m.index).or_insert(m.from);
            }
        }
        self.traces.extend(
            reloc
                .plan
                .traces
                .iter()
                .map(|&trace| AgedTrace { trace, age: 0 }),
        );
        self.lens = Some(reloc.lens);
        self.closeness = Some(reloc.closeness);
    }

    fn revert_transient(&mut self) {
        if let Some(snap) = self.transient.take() {
            self.live = snap.live;
            self.traces = snap.traces;
            self.lens = None;
        }
    }

    /// Undo a transient relocation and stay in inspection.
    fn revert_transient_in_place(&mut self) {
        if self.phase == Phase::TransientLens {
            self.revert_transient();
            self.phase = Phase::Inspect;
        }
    }

    fn age_traces(&mut self) {
        let lifetime = self.config.trace_lifetime;
        for t in &mut self.traces {
            t.age += 1;
        }
        self.traces.retain(|t| t.age < lifetime);
    }

    fn drag_active(&mut self, delta: Point) {
        let Some(id) = self.active else { return };
        for &i in &self.brushes[id as usize].points {
            self.live[i] = self.live[i] + delta;
        }
    }

    /// Re-run whatever depends on the painter radius or closeness
    /// thresholds in the current phase.
    fn after_setting_change(&mut self) -> std::result::Result<(), Rejection> {
        match self.phase {
            Phase::Inspect => self.refresh_inspect(),
            Phase::TransientLens => {
                let snap = self
                    .transient
                    .as_ref()
                    .expect("transient phase keeps a snapshot");
                let seeds = self.inspect_seeds(&snap.live);
                if seeds.is_empty() {
                    return Err(Rejection::new("no seeds under the painter"));
                }
                let reloc = self.relocation(&seeds, &snap.live).map_err(reject)?;
                self.revert_transient();
                self.transient = Some(Transient {
                    live: self.live.clone(),
                    traces: self.traces.clone(),
                });
                self.seeds = seeds;
                self.install(reloc);
            }
            Phase::Brushing => {
                let members = self.active_points().to_vec();
                let reloc = self.relocation(&members, &self.live).map_err(reject)?;
                self.install(reloc);
            }
            Phase::Idle | Phase::Contextualized => {}
        }
        Ok(())
    }

    fn assign(&mut self, i: usize, id: u32) {
        match self.owner[i] {
            Some(o) if o == id => return,
            Some(o) => self.brushes[o as usize].points.retain(|&p| p != i),
            None => {}
        }
        self.owner[i] = Some(id);
        self.brushes[id as usize].points.push(i);
        self.stroke_origin.remove(&i);
    }

    fn press(&mut self) -> std::result::Result<(), Rejection> {
        let mut captured: Vec<usize> = self.seeds.clone();
        captured.extend(self.covered(&self.live, &self.painter));
        captured.sort_unstable();
        captured.dedup();
        let members = union_sorted(self.active_points(), &captured);

        // the stroke starts from the transiently relocated layout
        let reloc = self.relocation(&members, &self.live).map_err(reject)?;

        let snap = self
            .transient
            .take()
            .expect("transient phase keeps a snapshot");
        let id = match self.active {
            Some(id) => id,
            None => {
                let id = self.brushes.len() as u32;
                self.brushes.push(Brush {
                    id,
                    color_tag: PALETTE[id as usize % PALETTE.len()].to_string(),
                    points: Vec::new(),
                    active: false,
                });
                for b in &mut self.brushes {
                    b.active = b.id == id;
                }
                self.active = Some(id);
                id
            }
        };
        self.stroke_origin.clear();
        for (i, (&before, &now)) in snap.live.iter().zip(&self.live).enumerate() {
            if before != now && self.owner[i].is_some() && self.owner[i] != Some(id) {
                self.stroke_origin.insert(i, before);
            }
        }
        for &i in &captured {
            self.assign(i, id);
        }
        self.phase = Phase::Brushing;
        self.install(reloc);
        Ok(())
    }

    fn stroke_move(&mut self, to: Point) -> std::result::Result<(), Rejection> {
        let delta = to - self.painter.center;
        if self.modes.drag {
            self.painter.center = to;
            self.drag_active(delta);
            if let Some(lens) = &mut self.lens {
                *lens = lens.translated(delta);
            }
            self.age_traces();
            return Ok(());
        }
        let painter = Painter {
            center: to,
            ..self.painter
        };
        let captured = self.covered(&self.live, &painter);
        let id = self.active.expect("a stroke has an active brush");
        let members = union_sorted(self.active_points(), &captured);
        let reloc = self.relocation(&members, &self.live).map_err(reject)?;

        self.painter.center = to;
        for i in captured {
            self.assign(i, id);
        }
        self.age_traces();
        self.install(reloc);
        Ok(())
    }

    fn release(&mut self) {
        for (i, pos) in std::mem::take(&mut self.stroke_origin) {
            if self.owner[i].is_some() && self.owner[i] != self.active {
                self.live[i] = pos;
            }
        }
        self.lens = None;
        self.phase = Phase::Inspect;
        self.refresh_inspect();
    }

    fn toggle_context(&mut self) {
        if let Some(ctx) = self.context.take() {
            self.live = ctx.live;
            self.phase = ctx.phase;
            return;
        }
        self.revert_transient_in_place();
        self.context = Some(Context {
            live: self.live.clone(),
            phase: self.phase,
        });
        self.live = self.original.clone();
        self.phase = Phase::Contextualized;
    }

    /// Switch between the relocated layout and the original projection.
    /// Returns, per point, the position before and after the switch.
    pub fn contextualize(&mut self) -> Result<Vec<Move>> {
        if self.phase == Phase::Brushing {
            return Err(Error::Phase("Brushing".into()));
        }
        let before = self.live.clone();
        self.toggle_context();
        Ok(before
            .into_iter()
            .zip(&self.live)
            .enumerate()
            .map(|(index, (from, &to))| Move { index, from, to })
            .collect())
    }

    /// Point order for the similarity heatmap: brushes in creation order,
    /// each in insertion order, then unbrushed points by index.
    pub fn heatmap_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self
            .brushes
            .iter()
            .flat_map(|b| b.points.iter().copied())
            .collect();
        order.extend((0..self.len()).filter(|&i| self.owner[i].is_none()));
        order
    }

    /// Owning brush id per point, or -1.
    pub fn export_labels(&self) -> Vec<i64> {
        self.owner.iter().map(|o| o.map_or(-1, i64::from)).collect()
    }
}

#[cfg(test)]
mod tests;
