use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Input to the session state machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Event {
    MoveTo {
        x: f64,
        y: f64,
    },
    /// Change the painter radius by `delta` layout units.
    Wheel {
        delta: f64,
    },
    PauseElapsed,
    Press,
    Release,
    SetThetaIn {
        value: f64,
    },
    SetThetaOut {
        value: f64,
    },
    ToggleContext,
    SwitchBrush {
        id: u32,
    },
    NewBrush,
    SetOverwrite {
        enabled: bool,
    },
    SetDrag {
        enabled: bool,
    },
}

impl Event {
    pub fn move_to(p: Point) -> Event {
        Event::MoveTo { x: p.x, y: p.y }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Event::MoveTo { .. } => "MoveTo",
            Event::Wheel { .. } => "Wheel",
            Event::PauseElapsed => "PauseElapsed",
            Event::Press => "Press",
            Event::Release => "Release",
            Event::SetThetaIn { .. } => "SetThetaIn",
            Event::SetThetaOut { .. } => "SetThetaOut",
            Event::ToggleContext => "ToggleContext",
            Event::SwitchBrush { .. } => "SwitchBrush",
            Event::NewBrush => "NewBrush",
            Event::SetOverwrite { .. } => "SetOverwrite",
            Event::SetDrag { .. } => "SetDrag",
        }
    }
}

/// An event stamped with milliseconds since the session started.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedEvent {
    pub t: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// Session settings a trajectory was recorded with. Absent fields keep the
/// replaying configuration's values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TrajectoryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_out: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pause_threshold_ms: Option<u64>,
    /// Painter radius in layout units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub painter_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overwrite: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drag: Option<bool>,
}

/// A recorded interaction: settings plus the ordered event log.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    #[serde(default)]
    pub params: TrajectoryParams,
    pub events: Vec<TimedEvent>,
}

impl Trajectory {
    pub fn parse(text: &str) -> Result<Trajectory> {
        let t: Trajectory = serde_json::from_str(text)?;
        if let Some(i) = t.events.windows(2).position(|w| w[1].t < w[0].t) {
            return Err(Error::Trajectory {
                index: i + 1,
                reason: "timestamps decrease".into(),
            });
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }
}
