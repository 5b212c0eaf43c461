use serde::{Deserialize, Serialize};

use super::{AgedTrace, Brush, Modes, Phase, Session};
use crate::closeness::ClosenessParams;
use crate::geom::Point;
use crate::seeds::Painter;

/// Boundaries of the current lens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensView {
    pub inner: Vec<Point>,
    pub outer: Vec<Point>,
}

/// Everything a renderer needs to draw the session at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub phase: Phase,
    pub live: Vec<Point>,
    pub brushes: Vec<Brush>,
    pub active_brush: Option<u32>,
    pub painter: Painter,
    pub params: ClosenessParams,
    pub modes: Modes,
    pub lens: Option<LensView>,
    pub traces: Vec<AgedTrace>,
    pub seeds: Vec<usize>,
    /// Closeness to the seeds or brush; absent when nothing is under focus.
    pub closeness: Option<Vec<f64>>,
    pub density_norm: Vec<f64>,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn parse(text: &str) -> crate::error::Result<Snapshot> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Session {
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            phase: self.phase,
            live: self.live.clone(),
            brushes: self.brushes.clone(),
            active_brush: self.active,
            painter: self.painter,
            params: self.params,
            modes: self.modes,
            lens: self.lens.as_ref().map(|l| LensView {
                inner: l.inner.clone(),
                outer: l.outer.clone(),
            }),
            traces: self.traces.clone(),
            seeds: self.seeds.clone(),
            closeness: self.closeness.as_ref().map(|c| c.values.clone()),
            density_norm: self.model.density_norm().to_vec(),
        }
    }
}
