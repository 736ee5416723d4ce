//! Boundary-distance field, inradius and high ridge, and subdomains (metric
//! balls and edge-interval unions) materialized exactly.

use crate::graph::{EdgeId, GraphError, GraphPoint, MetricGraph, VertexId};
use crate::num::Scalar;
use crate::plf::{distance_field, PLFunction, PlError};
use std::cmp::Ordering;
use std::sync::Arc;

/// Points attaining the inradius, with the attained value.
#[derive(Clone, Debug)]
pub struct RidgeSet<S> {
    pub points: Vec<GraphPoint<S>>,
    pub value: S,
}

/// `x -> d(x, boundary)` as an exact PL field. On every edge it is the
/// minimum of the two endpoint routes, so segment slopes are +-1 everywhere.
pub fn boundary_distance_field<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
) -> Result<PLFunction<S>, PlError> {
    let sources: Vec<(VertexId, S)> = graph
        .boundary_vertices()
        .map(|v| (v, S::zero()))
        .collect();
    if sources.is_empty() {
        return Err(PlError::Graph(GraphError::Unreachable));
    }
    let dist = graph.vertex_distances(&sources);
    let mut traces = Vec::with_capacity(graph.edge_count());
    for e in graph.edge_ids() {
        let edge = graph.edge(e);
        let len = &edge.length;
        let du = dist[edge.from.0].clone().ok_or(GraphError::Unreachable)?;
        let dv = dist[edge.to.0].clone().ok_or(GraphError::Unreachable)?;
        let from_u = vec![(S::zero(), du.clone()), (len.clone(), du + len.clone())];
        let from_v = vec![(S::zero(), dv.clone() + len.clone()), (len.clone(), dv)];
        traces.push(crate::plf::merge_min(&from_u, &from_v));
    }
    let f = PLFunction::new(graph.clone(), traces)?;
    debug_assert!(unit_slopes(&f), "boundary field must have slopes +-1");
    Ok(f)
}

fn unit_slopes<S: Scalar>(f: &PLFunction<S>) -> bool {
    let one = S::one();
    f.traces().iter().all(|trace| {
        trace.windows(2).all(|w| {
            let s = (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone());
            s.abs_s().is_close(&one)
        })
    })
}

/// Inradius and all of its maximizers. Maximizers sit at vertices or at the
/// finitely many interior kinks of the boundary field; plateaus cannot occur
/// because the field has slopes +-1, which is asserted.
pub fn inradius_and_ridge<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
) -> Result<RidgeSet<S>, PlError> {
    let field = boundary_distance_field(graph)?;
    assert!(unit_slopes(&field), "boundary field must have slopes +-1");
    let (value, points) = field.argmax_points();
    Ok(RidgeSet { points, value })
}

/// Finite union of closed edge subintervals.
#[derive(Clone, Debug)]
pub struct SubDomain<S> {
    pub intervals: Vec<(EdgeId, S, S)>,
}

impl<S: Scalar> SubDomain<S> {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// True when the closure avoids every boundary vertex, i.e. the region is
    /// compactly contained in the domain.
    pub fn compactly_contained(&self, graph: &MetricGraph<S>) -> bool {
        self.intervals.iter().all(|(e, a, b)| {
            let edge = graph.edge(*e);
            let touches_from = a.is_close(&S::zero()) && graph.is_boundary(edge.from);
            let touches_to = b.is_close(&edge.length) && graph.is_boundary(edge.to);
            !(touches_from || touches_to)
        })
    }

    pub fn contains(&self, graph: &MetricGraph<S>, p: &GraphPoint<S>) -> bool {
        match p {
            GraphPoint::Interior { edge, t } => self.intervals.iter().any(|(e, a, b)| {
                e == edge
                    && a.cmp_total(t) != Ordering::Greater
                    && t.cmp_total(b) != Ordering::Greater
            }),
            GraphPoint::Vertex(v) => self.intervals.iter().any(|(e, a, b)| {
                let edge = graph.edge(*e);
                (edge.from == *v && a.is_close(&S::zero()))
                    || (edge.to == *v && b.is_close(&edge.length))
            }),
        }
    }

    /// Roughly `count` sample points spread over the union proportionally to
    /// interval length, interval endpoints always included.
    pub fn sample_points(&self, graph: &MetricGraph<S>, count: usize) -> Vec<GraphPoint<S>> {
        let total: f64 = self
            .intervals
            .iter()
            .map(|(_, a, b)| (b.to_f64() - a.to_f64()).max(0.0))
            .sum();
        let mut out = Vec::new();
        for (e, a, b) in &self.intervals {
            let len = (b.to_f64() - a.to_f64()).max(0.0);
            let n = if total > 0.0 {
                ((count as f64) * len / total).ceil() as usize
            } else {
                1
            }
            .max(1);
            for j in 0..=n {
                let t = a.clone()
                    + (b.clone() - a.clone()) * S::from_int(j as i64) / S::from_int(n as i64);
                if let Ok(p) = graph.point(*e, t) {
                    if !out.iter().any(|q: &GraphPoint<S>| q.close_to(&p)) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Sample spacing bound matching [`Self::sample_points`].
    pub fn sample_gap(&self, count: usize) -> f64 {
        let total: f64 = self
            .intervals
            .iter()
            .map(|(_, a, b)| (b.to_f64() - a.to_f64()).max(0.0))
            .sum();
        if count == 0 {
            total
        } else {
            total / count as f64
        }
    }
}

/// A metric ball materialized as a closed sublevel set of the distance field
/// from its center, with its exact metric boundary.
#[derive(Clone, Debug)]
pub struct Ball<S> {
    pub center: GraphPoint<S>,
    pub radius: S,
    pub region: SubDomain<S>,
    /// Points at distance exactly `radius` from the center.
    pub boundary: Vec<GraphPoint<S>>,
    /// Distance field from the center, kept for reuse.
    pub dist: PLFunction<S>,
}

/// Builds the closed ball of the given radius. Distance fields on a graph
/// have no interior local minima away from the center, so the closed sublevel
/// set coincides with the closure of the open ball.
pub fn metric_ball<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    center: &GraphPoint<S>,
    radius: &S,
) -> Result<Ball<S>, PlError> {
    let dist = distance_field(graph, center)?;
    let mut intervals = Vec::new();
    let mut boundary = Vec::new();
    for e in graph.edge_ids() {
        let trace = dist.trace(e);
        // walk segments collecting {d <= r} pieces and exact d == r cuts
        let mut start: Option<S> = None;
        let push_cut = |t: S, boundary: &mut Vec<GraphPoint<S>>| {
            if let Ok(p) = graph.point(e, t) {
                if !boundary.iter().any(|q: &GraphPoint<S>| q.close_to(&p)) {
                    boundary.push(p);
                }
            }
        };
        if trace[0].1.cmp_total(radius) != Ordering::Greater {
            start = Some(trace[0].0.clone());
            if trace[0].1.is_close(radius) {
                push_cut(trace[0].0.clone(), &mut boundary);
            }
        }
        for w in trace.windows(2) {
            let (t0, v0) = &w[0];
            let (t1, v1) = &w[1];
            let in0 = v0.cmp_total(radius) != Ordering::Greater;
            let in1 = v1.cmp_total(radius) != Ordering::Greater;
            if in0 != in1 {
                // slopes are +-1 a.e. so the crossing is unique on the segment
                let wgt = (radius.clone() - v0.clone()) / (v1.clone() - v0.clone());
                let tc = t0.clone() + wgt * (t1.clone() - t0.clone());
                if in0 {
                    intervals.push((e, start.take().expect("open piece"), tc.clone()));
                } else {
                    start = Some(tc.clone());
                }
                push_cut(tc, &mut boundary);
            } else if in1 && v1.is_close(radius) {
                push_cut(t1.clone(), &mut boundary);
            }
        }
        if let Some(s) = start.take() {
            intervals.push((e, s, trace.last().unwrap().0.clone()));
        }
    }
    boundary.sort_by(|a, b| {
        a.sort_key()
            .partial_cmp(&b.sort_key())
            .unwrap_or(Ordering::Equal)
    });
    Ok(Ball {
        center: center.clone(),
        radius: radius.clone(),
        region: SubDomain { intervals },
        boundary,
        dist,
    })
}

/// Exact minimum of a PL function over a subdomain.
pub fn min_over<S: Scalar>(f: &PLFunction<S>, region: &SubDomain<S>) -> Option<S> {
    extremum_over(f, region, Ordering::Less)
}

/// Exact maximum of a PL function over a subdomain.
pub fn max_over<S: Scalar>(f: &PLFunction<S>, region: &SubDomain<S>) -> Option<S> {
    extremum_over(f, region, Ordering::Greater)
}

fn extremum_over<S: Scalar>(
    f: &PLFunction<S>,
    region: &SubDomain<S>,
    want: Ordering,
) -> Option<S> {
    let mut best: Option<S> = None;
    let mut push = |v: S| match &best {
        None => best = Some(v),
        Some(b) => {
            if v.cmp_total(b) == want {
                best = Some(v);
            }
        }
    };
    for (e, a, b) in &region.intervals {
        push(f.eval_on_edge(*e, a));
        push(f.eval_on_edge(*e, b));
        for (t, v) in f.trace(*e) {
            if t.cmp_total(a) == Ordering::Greater && t.cmp_total(b) == Ordering::Less {
                push(v.clone());
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{dumbbell_arc, interval_arc, star3_arc};
    use crate::num::Rat;

    #[test]
    fn dumbbell_boundary_field_values() {
        let g = dumbbell_arc();
        let f = boundary_distance_field(&g).unwrap();
        let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
        assert_eq!(f.eval(&o).unwrap(), Rat::int(1));
        let e_p3 = g.find_edge("e+3").unwrap();
        assert_eq!(f.eval_on_edge(e_p3, &Rat::new(3, 2)), Rat::new(3, 2));
        for v in g.boundary_vertices() {
            assert_eq!(f.vertex_value(v).unwrap(), Rat::int(0));
        }
    }

    #[test]
    fn interval_boundary_field_is_min_of_ends() {
        let g = interval_arc(Rat::int(4));
        let f = boundary_distance_field(&g).unwrap();
        assert_eq!(f.eval_on_edge(EdgeId(0), &Rat::int(1)), Rat::int(1));
        assert_eq!(f.eval_on_edge(EdgeId(0), &Rat::int(3)), Rat::int(1));
        assert_eq!(f.eval_on_edge(EdgeId(0), &Rat::int(2)), Rat::int(2));
    }

    #[test]
    fn dumbbell_ridge() {
        let g = dumbbell_arc();
        let ridge = inradius_and_ridge(&g).unwrap();
        assert_eq!(ridge.value, Rat::int(2));
        let e_p3 = g.find_edge("e+3").unwrap();
        let e_m3 = g.find_edge("e-3").unwrap();
        let expect = vec![
            g.point(e_p3, Rat::int(1)).unwrap(),
            g.point(e_m3, Rat::int(1)).unwrap(),
        ];
        assert_eq!(ridge.points.len(), 2);
        for p in &expect {
            assert!(ridge.points.iter().any(|q| q.close_to(p)));
        }
    }

    #[test]
    fn interval_ridge_is_midpoint() {
        let g = interval_arc(Rat::int(3));
        let ridge = inradius_and_ridge(&g).unwrap();
        assert_eq!(ridge.value, Rat::new(3, 2));
        assert_eq!(ridge.points.len(), 1);
        assert!(ridge.points[0].close_to(&g.point(EdgeId(0), Rat::new(3, 2)).unwrap()));
    }

    #[test]
    fn star_ridge_is_center() {
        let g = star3_arc();
        let ridge = inradius_and_ridge(&g).unwrap();
        assert_eq!(ridge.value, Rat::int(1));
        assert_eq!(ridge.points.len(), 1);
        assert!(matches!(ridge.points[0], GraphPoint::Vertex(v) if g.vertex_name(v) == "c"));
    }

    #[test]
    fn ball_on_interval() {
        let g = interval_arc(Rat::int(10));
        let center = g.point(EdgeId(0), Rat::int(5)).unwrap();
        let ball = metric_ball(&g, &center, &Rat::int(2)).unwrap();
        assert_eq!(ball.region.intervals.len(), 1);
        let (_, a, b) = &ball.region.intervals[0];
        assert_eq!(*a, Rat::int(3));
        assert_eq!(*b, Rat::int(7));
        assert_eq!(ball.boundary.len(), 2);
        assert!(ball.region.compactly_contained(&g));
    }

    #[test]
    fn ball_through_junction() {
        let g = star3_arc();
        let c = GraphPoint::vertex(g.find_vertex("c").unwrap());
        let ball = metric_ball(&g, &c, &Rat::new(1, 2)).unwrap();
        assert_eq!(ball.region.intervals.len(), 3);
        assert_eq!(ball.boundary.len(), 3);
        let f = boundary_distance_field(&g).unwrap();
        assert_eq!(min_over(&f, &ball.region).unwrap(), Rat::new(1, 2));
        assert_eq!(max_over(&f, &ball.region).unwrap(), Rat::int(1));
    }
}
