//! Monge-solution machinery for the eikonal equation `|grad u| = lambda` on a
//! metric graph: McShane extension of boundary data, dynamic-programming
//! verification, classification via the subslope, and a comparison harness.

use crate::field::SubDomain;
use crate::graph::{GraphError, GraphPoint, MetricGraph, VertexId};
use crate::num::Scalar;
use crate::plf::{distance_field, merge_min, PLFunction, PlError};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum EikonalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(String),
    #[error("missing boundary value for vertex {0}")]
    MissingBoundaryValue(String),
    #[error("value given for non-boundary vertex {0}")]
    NotBoundary(String),
    #[error("region is not compactly contained in the domain")]
    NotCompactlyContained,
}

/// Dirichlet data on the boundary vertex set.
#[derive(Clone, Debug, Default)]
pub struct BoundaryData<S> {
    pub values: BTreeMap<VertexId, S>,
}

impl<S: Scalar> BoundaryData<S> {
    pub fn new() -> Self {
        BoundaryData {
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, v: VertexId, value: S) {
        self.values.insert(v, value);
    }

    pub fn zero(graph: &MetricGraph<S>) -> Self {
        let mut bd = Self::new();
        for v in graph.boundary_vertices() {
            bd.set(v, S::zero());
        }
        bd
    }

    fn check(&self, graph: &MetricGraph<S>) -> Result<(), EikonalError> {
        for v in graph.boundary_vertices() {
            if !self.values.contains_key(&v) {
                return Err(EikonalError::MissingBoundaryValue(
                    graph.vertex_name(v).to_string(),
                ));
            }
        }
        for v in self.values.keys() {
            if !graph.is_boundary(*v) {
                return Err(EikonalError::NotBoundary(
                    graph.vertex_name(*v).to_string(),
                ));
            }
        }
        Ok(())
    }
}

/// Per-vertex record of whether the extension attains its boundary datum.
#[derive(Clone, Debug)]
pub struct BoundaryAttainment<S> {
    pub vertex: VertexId,
    pub data: S,
    pub value: S,
    pub attained: bool,
}

#[derive(Clone, Debug)]
pub struct McShane<S> {
    pub u: PLFunction<S>,
    /// The extension satisfies `u <= g` on the boundary; equality may fail
    /// when the data is not lambda-Lipschitz, which is reported here.
    pub attainment: Vec<BoundaryAttainment<S>>,
}

/// McShane-Whitney extension `u(x) = min_y { g(y) + lambda d(x, y) }`, exact.
/// Globally lambda-Lipschitz; a Monge solution of `|grad u| = lambda` in the
/// domain.
pub fn mcshane_extension<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    data: &BoundaryData<S>,
    lambda: &S,
) -> Result<McShane<S>, EikonalError> {
    if lambda.cmp_total(&S::zero()) != Ordering::Greater {
        return Err(EikonalError::NonPositiveLambda(lambda.repr()));
    }
    data.check(graph)?;
    let sources: Vec<(VertexId, S)> = data
        .values
        .iter()
        .map(|(v, g)| (*v, g.clone()))
        .collect();
    let pot = graph.vertex_potentials(&sources, lambda);
    let mut traces = Vec::with_capacity(graph.edge_count());
    for e in graph.edge_ids() {
        let edge = graph.edge(e);
        let len = &edge.length;
        let pu = pot[edge.from.0].clone().ok_or(GraphError::Unreachable)?;
        let pv = pot[edge.to.0].clone().ok_or(GraphError::Unreachable)?;
        let lam_len = lambda.clone() * len.clone();
        let from_u = vec![(S::zero(), pu.clone()), (len.clone(), pu + lam_len.clone())];
        let from_v = vec![(S::zero(), pv.clone() + lam_len), (len.clone(), pv)];
        traces.push(merge_min(&from_u, &from_v));
    }
    let u = PLFunction::new(graph.clone(), traces)?;
    let attainment = data
        .values
        .iter()
        .map(|(v, g)| {
            let value = u.vertex_value(*v).expect("boundary vertex has an edge");
            BoundaryAttainment {
                vertex: *v,
                data: g.clone(),
                attained: value.is_close(g),
                value,
            }
        })
        .collect();
    Ok(McShane { u, attainment })
}

/// One defect sample from [`dpp_check`].
#[derive(Clone, Debug)]
pub struct DppWitness<S> {
    pub point: GraphPoint<S>,
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct DppReport<S> {
    pub max_defect: f64,
    /// Bound `lambda * h_sample` on the defect that pure sampling error can
    /// produce for a function satisfying the identity.
    pub sampling_bound: f64,
    pub samples: usize,
    pub worst: Option<DppWitness<S>>,
}

/// Verifies the dynamic-programming identity
/// `u(x) = min_z { u(z) + lambda d(x, z) }` over the closure of the region,
/// by dense sampling. Defects are one-sided (`z = x` is admissible).
pub fn dpp_check<S: Scalar>(
    u: &PLFunction<S>,
    lambda: &S,
    region: &SubDomain<S>,
    samples: usize,
) -> Result<DppReport<S>, EikonalError> {
    if lambda.cmp_total(&S::zero()) != Ordering::Greater {
        return Err(EikonalError::NonPositiveLambda(lambda.repr()));
    }
    let graph = u.graph();
    if !region.compactly_contained(graph) {
        return Err(EikonalError::NotCompactlyContained);
    }
    let xs = region.sample_points(graph, samples.max(1));
    let zs = region.sample_points(graph, (samples.max(1)) * 4);
    let mut max_defect = 0.0f64;
    let mut worst = None;
    for x in &xs {
        let dist = distance_field(graph, x)?;
        let ux = u.eval(x)?.to_f64();
        let mut best = f64::INFINITY;
        for z in &zs {
            let cand = u.eval(z)?.to_f64() + lambda.to_f64() * dist.eval(z)?.to_f64();
            if cand < best {
                best = cand;
            }
        }
        let defect = (ux - best).abs();
        if defect > max_defect {
            max_defect = defect;
            worst = Some(DppWitness {
                point: x.clone(),
                defect,
            });
        }
    }
    Ok(DppReport {
        max_defect,
        sampling_bound: lambda.to_f64() * region.sample_gap((samples.max(1)) * 4),
        samples: xs.len(),
        worst,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MongeKind {
    Solution,
    Supersolution,
    Subsolution,
    Neither,
}

#[derive(Clone, Debug)]
pub struct MongeWitness<S> {
    pub point: GraphPoint<S>,
    pub subslope: S,
}

/// Classification of a PL function against `|grad^- u| = lambda`.
#[derive(Clone, Debug)]
pub struct MongeReport<S> {
    pub kind: MongeKind,
    /// Points where the subslope falls below lambda (violations of the
    /// supersolution inequality).
    pub below: Vec<MongeWitness<S>>,
    /// Points where the subslope exceeds lambda (violations of the
    /// subsolution inequality).
    pub above: Vec<MongeWitness<S>>,
}

/// Evaluation points for exact classification: on a PL function the subslope
/// takes finitely many values, attained on segment interiors, at interior
/// breakpoints and at interior vertices.
pub(crate) fn classification_points<S: Scalar>(u: &PLFunction<S>) -> Vec<GraphPoint<S>> {
    let graph = u.graph();
    let mut pts: Vec<GraphPoint<S>> = Vec::new();
    for v in graph.interior_vertices() {
        if graph.degree(v) > 0 {
            pts.push(GraphPoint::vertex(v));
        }
    }
    for e in graph.edge_ids() {
        let trace = u.trace(e);
        for i in 0..trace.len() - 1 {
            let (t0, _) = &trace[i];
            let (t1, _) = &trace[i + 1];
            let mid = (t0.clone() + t1.clone()).half();
            if let Ok(p @ GraphPoint::Interior { .. }) = graph.point(e, mid) {
                pts.push(p);
            }
            if i > 0 {
                if let Ok(p @ GraphPoint::Interior { .. }) = graph.point(e, t0.clone()) {
                    pts.push(p);
                }
            }
        }
    }
    pts
}

/// Classifies `u` as a Monge solution / super- / subsolution of
/// `|grad u| = lambda` by exact subslope comparison at finitely many points.
pub fn monge_classify<S: Scalar>(u: &PLFunction<S>, lambda: &S) -> MongeReport<S> {
    let mut below = Vec::new();
    let mut above = Vec::new();
    for p in classification_points(u) {
        let s = u.slopes_at(&p).expect("point on graph");
        if !s.subslope.is_close(lambda) {
            let w = MongeWitness {
                point: p,
                subslope: s.subslope.clone(),
            };
            if s.subslope.cmp_total(lambda) == Ordering::Less {
                below.push(w);
            } else {
                above.push(w);
            }
        }
    }
    let kind = match (below.is_empty(), above.is_empty()) {
        (true, true) => MongeKind::Solution,
        (false, true) => MongeKind::Subsolution,
        (true, false) => MongeKind::Supersolution,
        (false, false) => MongeKind::Neither,
    };
    MongeReport { kind, below, above }
}

#[derive(Clone, Debug)]
pub enum ComparisonStatus<S> {
    Pass,
    Fail {
        point: GraphPoint<S>,
        sub_value: S,
        super_value: S,
    },
    /// Preconditions unmet; never silently passes.
    Inapplicable { reason: String },
}

#[derive(Clone, Debug)]
pub struct ComparisonReport<S> {
    pub status: ComparisonStatus<S>,
    pub checked_points: usize,
}

/// Comparison harness: a Monge subsolution below a Monge supersolution on the
/// boundary stays below everywhere. Checked at all breakpoints of both
/// functions plus dense samples.
pub fn comparison_harness<S: Scalar>(
    sub: &PLFunction<S>,
    sup: &PLFunction<S>,
    lambda: &S,
    samples: usize,
) -> Result<ComparisonReport<S>, EikonalError> {
    if !crate::plf::same_graph(sub.graph(), sup.graph()) {
        return Err(EikonalError::Pl(PlError::GraphMismatch));
    }
    let graph = sub.graph();
    let sub_kind = monge_classify(sub, lambda).kind;
    if !matches!(sub_kind, MongeKind::Subsolution | MongeKind::Solution) {
        return Ok(ComparisonReport {
            status: ComparisonStatus::Inapplicable {
                reason: format!("first argument classifies as {sub_kind:?}, not a subsolution"),
            },
            checked_points: 0,
        });
    }
    let sup_kind = monge_classify(sup, lambda).kind;
    if !matches!(sup_kind, MongeKind::Supersolution | MongeKind::Solution) {
        return Ok(ComparisonReport {
            status: ComparisonStatus::Inapplicable {
                reason: format!(
                    "second argument classifies as {sup_kind:?}, not a supersolution"
                ),
            },
            checked_points: 0,
        });
    }
    for v in graph.boundary_vertices() {
        let a = sub.vertex_value(v)?;
        let b = sup.vertex_value(v)?;
        if !a.le_close(&b) {
            return Ok(ComparisonReport {
                status: ComparisonStatus::Inapplicable {
                    reason: format!(
                        "ordering fails on the boundary at {}",
                        graph.vertex_name(v)
                    ),
                },
                checked_points: 0,
            });
        }
    }

    let mut points: Vec<GraphPoint<S>> = Vec::new();
    for e in graph.edge_ids() {
        for (t, _) in sub.trace(e).iter().chain(sup.trace(e).iter()) {
            if let Ok(p) = graph.point(e, t.clone()) {
                points.push(p);
            }
        }
        let len = graph.edge_len(e);
        let n = samples.max(2);
        for j in 0..=n {
            let t = len.clone() * S::from_int(j as i64) / S::from_int(n as i64);
            if let Ok(p) = graph.point(e, t) {
                points.push(p);
            }
        }
    }
    let checked_points = points.len();
    for p in points {
        let a = sub.eval(&p)?;
        let b = sup.eval(&p)?;
        if !a.le_close(&b) {
            return Ok(ComparisonReport {
                status: ComparisonStatus::Fail {
                    point: p,
                    sub_value: a,
                    super_value: b,
                },
                checked_points,
            });
        }
    }
    Ok(ComparisonReport {
        status: ComparisonStatus::Pass,
        checked_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{dumbbell_arc, interval_arc};
    use crate::field::{boundary_distance_field, metric_ball};
    use crate::graph::EdgeId;
    use crate::num::Rat;

    fn interval_g01() -> (Arc<MetricGraph<Rat>>, BoundaryData<Rat>) {
        let g = interval_arc(Rat::int(1));
        let mut bd = BoundaryData::new();
        bd.set(g.find_vertex("a").unwrap(), Rat::int(0));
        bd.set(g.find_vertex("b").unwrap(), Rat::int(1));
        (g, bd)
    }

    #[test]
    fn mcshane_interval_golden() {
        let (g, bd) = interval_g01();
        let lam = Rat::new(2, 5);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        // u(x) = 0.4 x exactly
        for k in 0..=10 {
            let t = Rat::new(k, 10);
            assert_eq!(
                m.u.eval_on_edge(EdgeId(0), &t),
                Rat::new(2 * k, 50),
                "at t={k}/10"
            );
        }
        let b = g.find_vertex("b").unwrap();
        let at_b = m
            .attainment
            .iter()
            .find(|r| r.vertex == b)
            .unwrap();
        assert_eq!(at_b.value, Rat::new(2, 5));
        assert!(!at_b.attained);
    }

    #[test]
    fn mcshane_zero_data_is_scaled_distance() {
        let g = dumbbell_arc();
        let bd = BoundaryData::zero(&g);
        let lam = Rat::new(3, 4);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let dist = boundary_distance_field(&g).unwrap();
        let expect = dist.map_affine(&Rat::int(0), &lam);
        assert_eq!(m.u, expect);
    }

    #[test]
    fn mcshane_constant_data_shifts_distance() {
        let g = dumbbell_arc();
        let mut bd = BoundaryData::new();
        for v in g.boundary_vertices() {
            bd.set(v, Rat::int(3));
        }
        let lam = Rat::int(1);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let dist = boundary_distance_field(&g).unwrap();
        let expect = dist.map_affine(&Rat::int(3), &Rat::int(1));
        assert_eq!(m.u, expect);
    }

    #[test]
    fn mcshane_missing_value_errors() {
        let g = dumbbell_arc();
        let bd = BoundaryData::new();
        assert!(matches!(
            mcshane_extension(&g, &bd, &Rat::int(1)),
            Err(EikonalError::MissingBoundaryValue(_))
        ));
    }

    #[test]
    fn classify_mcshane_as_solution() {
        let (g, bd) = interval_g01();
        let lam = Rat::new(2, 5);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let report = monge_classify(&m.u, &lam);
        assert_eq!(report.kind, MongeKind::Solution);
    }

    #[test]
    fn classify_constant_and_steep() {
        let g = dumbbell_arc();
        let zero = PLFunction::constant(g.clone(), Rat::int(0));
        let report = monge_classify(&zero, &Rat::int(1));
        assert_eq!(report.kind, MongeKind::Subsolution);

        let steep = boundary_distance_field(&g)
            .unwrap()
            .map_affine(&Rat::int(0), &Rat::int(2));
        let report = monge_classify(&steep, &Rat::int(1));
        assert_eq!(report.kind, MongeKind::Supersolution);
        assert!(report.below.is_empty());
        assert!(!report.above.is_empty());
    }

    #[test]
    fn dpp_holds_for_mcshane() {
        let g = dumbbell_arc();
        let bd = BoundaryData::zero(&g);
        let lam = Rat::int(1);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
        let ball = metric_ball(&g, &o, &Rat::new(1, 2)).unwrap();
        let report = dpp_check(&m.u, &lam, &ball.region, 60).unwrap();
        assert!(
            report.max_defect <= report.sampling_bound + 1e-12,
            "defect {} vs bound {}",
            report.max_defect,
            report.sampling_bound
        );
    }

    #[test]
    fn dpp_flags_non_mcshane() {
        let g = interval_arc(Rat::int(1));
        // a random PL function that is no eikonal solution
        let u = PLFunction::new(
            g.clone(),
            vec![vec![
                (Rat::int(0), Rat::int(0)),
                (Rat::new(1, 4), Rat::int(2)),
                (Rat::int(1), Rat::int(1)),
            ]],
        )
        .unwrap();
        let center = g.point(EdgeId(0), Rat::new(1, 2)).unwrap();
        let ball = metric_ball(&g, &center, &Rat::new(1, 4)).unwrap();
        let report = dpp_check(&u, &Rat::int(1), &ball.region, 40).unwrap();
        assert!(report.max_defect > report.sampling_bound);
    }

    #[test]
    fn dpp_rejects_region_touching_boundary() {
        let g = interval_arc(Rat::int(1));
        let region = SubDomain {
            intervals: vec![(EdgeId(0), Rat::int(0), Rat::new(1, 2))],
        };
        assert!(matches!(
            dpp_check(
                &PLFunction::constant(g.clone(), Rat::int(0)),
                &Rat::int(1),
                &region,
                10
            ),
            Err(EikonalError::NotCompactlyContained)
        ));
    }

    #[test]
    fn comparison_ordered_mcshane_pair() {
        let (g, bd) = interval_g01();
        let lam = Rat::new(2, 5);
        let lower = mcshane_extension(&g, &bd, &lam).unwrap();
        let mut bd2 = BoundaryData::new();
        bd2.set(g.find_vertex("a").unwrap(), Rat::new(1, 10));
        bd2.set(g.find_vertex("b").unwrap(), Rat::int(2));
        let upper = mcshane_extension(&g, &bd2, &lam).unwrap();
        let report = comparison_harness(&lower.u, &upper.u, &lam, 50).unwrap();
        assert!(matches!(report.status, ComparisonStatus::Pass));
    }

    #[test]
    fn comparison_equal_functions_pass() {
        let (g, bd) = interval_g01();
        let lam = Rat::new(2, 5);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let report = comparison_harness(&m.u, &m.u, &lam, 20).unwrap();
        assert!(matches!(report.status, ComparisonStatus::Pass));
    }

    #[test]
    fn comparison_reports_inapplicable() {
        let (g, bd) = interval_g01();
        let lam = Rat::new(2, 5);
        let m = mcshane_extension(&g, &bd, &lam).unwrap();
        let steep = m.u.map_affine(&Rat::int(0), &Rat::int(3));
        // steep is a supersolution, not a subsolution: wrong slot
        let report = comparison_harness(&steep, &m.u, &lam, 20).unwrap();
        assert!(matches!(
            report.status,
            ComparisonStatus::Inapplicable { .. }
        ));
    }
}
