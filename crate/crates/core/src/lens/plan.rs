use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Lens;
use crate::closeness::{ClosenessParams, ClosenessResult, NeighborClass};
use crate::error::{Error, Result};
use crate::geom::Point;

/// Brushed points outside the inner boundary are projected back to this
/// fraction of the centroid-to-boundary distance.
pub const BOUNDARY_INSET: f64 = 0.99;

/// Cap on the radial fraction of pulled-in neighbors, keeping them strictly
/// inside the inner boundary.
pub const MAX_PULL_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanClass {
    StayInside,
    PullIn,
    PushOut,
    AnnulusPlace,
    Untouched,
}

/// A point brought in from outside the lens, kept for transient rendering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub index: usize,
    pub from: Point,
    pub to: Point,
}

/// Target positions for one lens and closeness vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelocationPlan {
    pub targets: BTreeMap<usize, Point>,
    pub class_of: Vec<PlanClass>,
    pub traces: Vec<Trace>,
}

impl RelocationPlan {
    /// Move every targeted point; returns `(index, from, to)` per move.
    pub fn apply(&self, live: &mut [Point]) -> Vec<Trace> {
        self.targets
            .iter()
            .map(|(&index, &to)| {
                let from = std::mem::replace(&mut live[index], to);
                Trace { index, from, to }
            })
            .collect()
    }
}

/// Decide where every point goes:
///
/// - members and true neighbors already strictly inside the inner boundary
///   stay; outside ones are pulled in along their radial line,
/// - non-neighbors inside the outer boundary are pushed beyond it by half a
///   margin,
/// - uncertain points are placed in the annulus, nearer the inner boundary
///   the closer they are, unless they sit outside the outer boundary with
///   closeness below `theta_out`.
pub fn build_plan(
    lens: &Lens,
    closeness: &ClosenessResult,
    params: &ClosenessParams,
    live: &[Point],
) -> Result<RelocationPlan> {
    if closeness.len() != live.len() {
        return Err(Error::Alignment {
            dataset: closeness.len(),
            projection: live.len(),
        });
    }
    let eps = 1e-12 * lens.diameter.max(f64::MIN_POSITIVE);
    let mut targets = BTreeMap::new();
    let mut class_of = Vec::with_capacity(live.len());
    let mut traces = Vec::new();

    for (i, (&pos, (&value, &class))) in live
        .iter()
        .zip(closeness.values.iter().zip(&closeness.classes))
        .enumerate()
    {
        let (plan_class, target) = match class {
            NeighborClass::Member | NeighborClass::TrueNeighbor => {
                if lens.inner_margin(pos) > eps {
                    let c = if class == NeighborClass::Member {
                        PlanClass::StayInside
                    } else {
                        PlanClass::Untouched
                    };
                    (c, None)
                } else {
                    let ray = lens.ray_toward(pos);
                    let fraction = if class == NeighborClass::Member {
                        BOUNDARY_INSET
                    } else {
                        let d = ray.inner_hit.dist(pos);
                        (1.0 / (1.0 + d / lens.diameter)).min(MAX_PULL_FRACTION)
                    };
                    (
                        PlanClass::PullIn,
                        Some(lens.centroid.lerp(ray.inner_hit, fraction)),
                    )
                }
            }
            NeighborClass::NonNeighbor => {
                if lens.outer_margin(pos) >= -eps {
                    let ray = lens.ray_toward(pos);
                    (
                        PlanClass::PushOut,
                        Some(ray.outer_hit + ray.direction * (lens.margin / 2.0)),
                    )
                } else {
                    (PlanClass::Untouched, None)
                }
            }
            NeighborClass::Uncertain => {
                let outside = lens.outer_margin(pos) < -eps;
                if outside && value < params.theta_out {
                    (PlanClass::Untouched, None)
                } else {
                    let t = if params.theta_out >= 1.0 {
                        1.0
                    } else {
                        ((1.0 - value) / (1.0 - params.theta_out)).clamp(0.0, 1.0)
                    };
                    let ray = lens.ray_toward(pos);
                    (
                        PlanClass::AnnulusPlace,
                        Some(ray.inner_hit.lerp(ray.outer_hit, t)),
                    )
                }
            }
        };
        if let Some(to) = target {
            let from_outside = match plan_class {
                PlanClass::PullIn => true,
                PlanClass::AnnulusPlace => lens.outer_margin(pos) < -eps,
                _ => false,
            };
            if from_outside {
                traces.push(Trace {
                    index: i,
                    from: pos,
                    to,
                });
            }
            targets.insert(i, to);
        }
        class_of.push(plan_class);
    }
    Ok(RelocationPlan {
        targets,
        class_of,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::polygon;

    fn lens() -> Lens {
        Lens::new(polygon::regular_polygon(Point::default(), 1.0, 8), 0.4).unwrap()
    }

    fn result(values: &[f64], members: &[usize]) -> ClosenessResult {
        let classes = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if members.contains(&i) {
                    NeighborClass::Member
                } else {
                    NeighborClass::of(v)
                }
            })
            .collect();
        ClosenessResult {
            values: values.to_vec(),
            classes,
        }
    }

    #[test]
    fn true_neighbor_inside_is_untouched() {
        let l = lens();
        let plan = build_plan(
            &l,
            &result(&[1.0], &[]),
            &ClosenessParams::default(),
            &[Point::new(0.1, 0.2)],
        )
        .unwrap();
        assert_eq!(plan.class_of, vec![PlanClass::Untouched]);
        assert!(plan.targets.is_empty());
    }

    #[test]
    fn non_neighbor_at_centroid_is_pushed_out() {
        let l = lens();
        let plan = build_plan(
            &l,
            &result(&[0.0], &[]),
            &ClosenessParams::default(),
            &[l.centroid],
        )
        .unwrap();
        assert_eq!(plan.class_of, vec![PlanClass::PushOut]);
        assert!(l.outer_margin(plan.targets[&0]) < 0.0);
    }

    #[test]
    fn missing_neighbor_is_pulled_in_with_trace() {
        let l = lens();
        let far = Point::new(10.0, 3.0);
        let plan = build_plan(
            &l,
            &result(&[1.0], &[]),
            &ClosenessParams::default(),
            &[far],
        )
        .unwrap();
        assert_eq!(plan.class_of, vec![PlanClass::PullIn]);
        let to = plan.targets[&0];
        assert!(l.inner_margin(to) > 0.0);
        assert_eq!(
            plan.traces,
            vec![Trace {
                index: 0,
                from: far,
                to
            }]
        );
    }

    #[test]
    fn uncertain_interpolation_endpoints() {
        let l = lens();
        let params = ClosenessParams::new(0.2, 0.5).unwrap();
        let p = Point::new(0.3, 0.1);
        let ray = l.ray_toward(p);
        let near_one = build_plan(&l, &result(&[1.0 - 1e-12], &[]), &params, &[p]).unwrap();
        assert!(near_one.targets[&0].dist(ray.inner_hit) < 1e-9);
        let at_threshold = build_plan(&l, &result(&[0.5], &[]), &params, &[p]).unwrap();
        assert!(at_threshold.targets[&0].dist(ray.outer_hit) < 1e-12);
    }

    #[test]
    fn weak_uncertain_outside_stays() {
        let l = lens();
        let params = ClosenessParams::new(0.2, 0.5).unwrap();
        let far = Point::new(5.0, 5.0);
        let plan = build_plan(&l, &result(&[0.3], &[]), &params, &[far]).unwrap();
        assert_eq!(plan.class_of, vec![PlanClass::Untouched]);
        let strong = build_plan(&l, &result(&[0.7], &[]), &params, &[far]).unwrap();
        assert_eq!(strong.class_of, vec![PlanClass::AnnulusPlace]);
        assert_eq!(strong.traces.len(), 1);
    }

    #[test]
    fn brushed_outlier_projected_to_boundary() {
        let l = lens();
        let plan = build_plan(
            &l,
            &result(&[1.0], &[0]),
            &ClosenessParams::default(),
            &[Point::new(3.0, 0.0)],
        )
        .unwrap();
        assert_eq!(plan.class_of, vec![PlanClass::PullIn]);
        let to = plan.targets[&0];
        assert!(l.inner_margin(to) > 0.0);
        assert!(l.inner_margin(to) < 0.02);
    }

    #[test]
    fn apply_moves_targets() {
        let l = lens();
        let mut live = vec![l.centroid, Point::new(0.1, 0.0)];
        let plan = build_plan(
            &l,
            &result(&[0.0, 1.0], &[]),
            &ClosenessParams::default(),
            &live,
        )
        .unwrap();
        let moves = plan.apply(&mut live);
        assert_eq!(moves.len(), 1);
        assert_eq!(live[0], plan.targets[&0]);
        assert_eq!(live[1], Point::new(0.1, 0.0));
    }
}
