//! Certification of infinity-superharmonicity (comparison with cones from
//! below) for PL functions, with Harnack, Lipschitz-bound, slope-regularity
//! and composition checks.
//!
//! The exact local criterion on a graph: the function is concave along every
//! edge, and at every interior vertex the one-sided derivatives satisfy
//! `max_i g_i + min_i g_i <= 0` (the midrange condition). The criterion is
//! cross-validated against a randomized cone-comparison sampler that works
//! straight from the definition.

use crate::field::{max_over, metric_ball, min_over, SubDomain};
use crate::graph::{GraphPoint, MetricGraph, VertexId};
use crate::num::Scalar;
use crate::plf::{distance_field, PLFunction, PlError, ScalarMap};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum ConeError {
    #[error(transparent)]
    Pl(#[from] PlError),
}

#[derive(Clone, Debug)]
pub enum SuperViolation<S> {
    /// Convex kink in an edge interior.
    ConvexKink { point: GraphPoint<S>, gap: S },
    /// Midrange condition fails at an interior vertex.
    VertexMidrange { vertex: VertexId, excess: S },
}

#[derive(Clone, Debug)]
pub struct SuperReport<S> {
    pub violations: Vec<SuperViolation<S>>,
}

impl<S> SuperReport<S> {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact comparison-with-cones-from-below certificate. PASS iff the function
/// is concave along every edge and every interior vertex satisfies the
/// midrange condition.
pub fn is_inf_superharmonic_exact<S: Scalar>(u: &PLFunction<S>) -> SuperReport<S> {
    is_inf_superharmonic_within(u, &S::zero())
}

/// Same certificate with an additive slack on both local conditions; used for
/// functions produced by tolerance-bounded composition.
pub fn is_inf_superharmonic_within<S: Scalar>(u: &PLFunction<S>, slack: &S) -> SuperReport<S> {
    let graph = u.graph();
    let mut violations = Vec::new();
    for e in graph.edge_ids() {
        let trace = u.trace(e);
        for i in 1..trace.len() - 1 {
            let left = slope(&trace[i - 1], &trace[i]);
            let right = slope(&trace[i], &trace[i + 1]);
            let gap = right.clone() - left; // > 0 means convex kink
            if gap.cmp_total(slack) == Ordering::Greater {
                violations.push(SuperViolation::ConvexKink {
                    point: graph
                        .point(e, trace[i].0.clone())
                        .expect("breakpoint in range"),
                    gap,
                });
            }
        }
    }
    for v in graph.interior_vertices() {
        if graph.degree(v) == 0 {
            continue;
        }
        let dirs = u.directions_at(&GraphPoint::vertex(v)).expect("incident");
        let mut max = dirs[0].clone();
        let mut min = dirs[0].clone();
        for g in &dirs[1..] {
            max = max.max_s(g.clone());
            min = min.min_s(g.clone());
        }
        let excess = max + min;
        if excess.cmp_total(slack) == Ordering::Greater {
            violations.push(SuperViolation::VertexMidrange { vertex: v, excess });
        }
    }
    SuperReport { violations }
}

fn slope<S: Scalar>(a: &(S, S), b: &(S, S)) -> S {
    (b.1.clone() - a.1.clone()) / (b.0.clone() - a.0.clone())
}

#[derive(Clone, Debug)]
pub struct ConeCounterexample<S> {
    pub apex: GraphPoint<S>,
    pub kappa: S,
    pub offset: S,
    pub ball_center: GraphPoint<S>,
    pub ball_radius: S,
    pub witness: GraphPoint<S>,
    pub deficit: S,
}

#[derive(Clone, Debug)]
pub struct SampledConeReport<S> {
    pub trials: usize,
    pub counterexample: Option<ConeCounterexample<S>>,
}

impl<S> SampledConeReport<S> {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn random_point<S: Scalar>(graph: &MetricGraph<S>, rng: &mut ChaCha8Rng) -> GraphPoint<S> {
    let e = crate::graph::EdgeId(rng.random_range(0..graph.edge_count()));
    let den = 64i64;
    let num = rng.random_range(0..=den);
    let t = graph.edge_len(e).clone() * S::from_ratio(num, den);
    graph.point(e, t).expect("in range")
}

/// Randomized comparison with cones from below, straight from the
/// definition and independent of the exact checker: random balls avoiding a
/// random apex, slope calibrated so the cone sits below the function on the
/// exact ball boundary, then checked on samples of the closed ball.
pub fn cone_comparison_sampled<S: Scalar>(
    u: &PLFunction<S>,
    trials: usize,
    seed: u64,
) -> Result<SampledConeReport<S>, ConeError> {
    let graph = u.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bdist = crate::field::boundary_distance_field(graph)?;
    let lip = u.max_abs_slope();
    for trial in 0..trials {
        let _ = trial;
        let center = random_point(graph, &mut rng);
        let to_boundary = bdist.eval(&center)?;
        if to_boundary.cmp_total(&S::zero()) != Ordering::Greater {
            continue;
        }
        // keep the closed ball inside the domain
        let frac = S::from_ratio(rng.random_range(2..=8), 10);
        let radius = to_boundary.clone() * frac;
        let ball = metric_ball(graph, &center, &radius)?;
        if ball.boundary.is_empty() {
            continue;
        }
        // apex outside the closed ball
        let apex = {
            let mut found = None;
            for _ in 0..32 {
                let cand = random_point(graph, &mut rng);
                let d = graph.point_distance(&cand, &center).expect("connected");
                if d.cmp_total(&radius) == Ordering::Greater
                    && !graph.is_boundary_point(&cand)
                {
                    found = Some(cand);
                    break;
                }
            }
            match found {
                Some(p) => p,
                None => continue,
            }
        };
        let kappa = -(lip.clone() + S::one()) * S::from_ratio(rng.random_range(0..=10), 10);
        let apex_dist = distance_field(graph, &apex)?;
        // calibrate the offset so u >= phi holds on the exact ball boundary
        let mut offset: Option<S> = None;
        for p in &ball.boundary {
            let cand = u.eval(p)? - kappa.clone() * apex_dist.eval(p)?;
            offset = Some(match offset {
                None => cand,
                Some(a) => a.min_s(cand),
            });
        }
        let offset = offset.expect("nonempty boundary");
        // check u >= phi on the sampled closed ball (breakpoints included)
        let mut check_points = ball.region.sample_points(graph, 64);
        for (e, a, b) in &ball.region.intervals {
            for (t, _) in u.trace(*e) {
                if t.cmp_total(a) != Ordering::Less && t.cmp_total(b) != Ordering::Greater {
                    if let Ok(p) = graph.point(*e, t.clone()) {
                        check_points.push(p);
                    }
                }
            }
        }
        for p in check_points {
            let phi = offset.clone() + kappa.clone() * apex_dist.eval(&p)?;
            let val = u.eval(&p)?;
            if !phi.le_close(&val) {
                return Ok(SampledConeReport {
                    trials: trial + 1,
                    counterexample: Some(ConeCounterexample {
                        apex,
                        kappa,
                        offset,
                        ball_center: center,
                        ball_radius: radius,
                        witness: p,
                        deficit: phi - val,
                    }),
                });
            }
        }
    }
    Ok(SampledConeReport {
        trials,
        counterexample: None,
    })
}

#[derive(Clone, Debug)]
pub enum HarnackStatus<S> {
    Pass,
    Fail {
        max_point: GraphPoint<S>,
        min_point: GraphPoint<S>,
    },
    Inapplicable { reason: String },
}

#[derive(Clone, Debug)]
pub struct HarnackReport<S> {
    pub status: HarnackStatus<S>,
    /// max / min of the function over the inner ball, the empirically
    /// observed constant (the certified bound is 3).
    pub max_ratio: Option<f64>,
}

impl<S> HarnackReport<S> {
    pub fn pass(&self) -> bool {
        matches!(self.status, HarnackStatus::Pass)
    }
}

/// Harnack inequality `u(y) <= 3 u(x)` for all `x, y` in the inner ball,
/// for a nonnegative infinity-superharmonic function on the outer ball.
/// Requires `4r < R` and the outer ball inside the domain. The exact extrema
/// of the PL function over the closed inner ball dominate every sampled pair.
pub fn harnack_check<S: Scalar>(
    u: &PLFunction<S>,
    center: &GraphPoint<S>,
    big_r: &S,
    small_r: &S,
) -> Result<HarnackReport<S>, ConeError> {
    let graph = u.graph();
    let four_r = S::from_int(4) * small_r.clone();
    if four_r.cmp_total(big_r) != Ordering::Less {
        return Ok(HarnackReport {
            status: HarnackStatus::Inapplicable {
                reason: "need 4r < R".into(),
            },
            max_ratio: None,
        });
    }
    let bdist = crate::field::boundary_distance_field(graph)?;
    let depth = bdist.eval(center)?;
    if big_r.cmp_total(&depth) == Ordering::Greater {
        return Ok(HarnackReport {
            status: HarnackStatus::Inapplicable {
                reason: "outer ball exits the domain".into(),
            },
            max_ratio: None,
        });
    }
    let outer = metric_ball(graph, center, big_r)?;
    if let Some(m) = min_over(u, &outer.region) {
        if m.cmp_total(&S::zero()) == Ordering::Less && !m.is_close(&S::zero()) {
            return Ok(HarnackReport {
                status: HarnackStatus::Inapplicable {
                    reason: "function is negative on the outer ball".into(),
                },
                max_ratio: None,
            });
        }
    }
    let inner = metric_ball(graph, center, small_r)?;
    let max = max_over(u, &inner.region).expect("ball nonempty");
    let min = min_over(u, &inner.region).expect("ball nonempty");
    let ratio = if min.to_f64() > 0.0 {
        Some(max.to_f64() / min.to_f64())
    } else if max.to_f64() <= 0.0 {
        Some(1.0)
    } else {
        None
    };
    let bound = S::from_int(3) * min.clone();
    if max.le_close(&bound) {
        Ok(HarnackReport {
            status: HarnackStatus::Pass,
            max_ratio: ratio,
        })
    } else {
        let (_, max_pts) = argpoints(u, &inner.region, &max);
        let (_, min_pts) = argpoints(u, &inner.region, &min);
        Ok(HarnackReport {
            status: HarnackStatus::Fail {
                max_point: max_pts,
                min_point: min_pts,
            },
            max_ratio: ratio,
        })
    }
}

fn argpoints<S: Scalar>(
    u: &PLFunction<S>,
    region: &SubDomain<S>,
    value: &S,
) -> (S, GraphPoint<S>) {
    for (e, a, b) in &region.intervals {
        for t in [a, b] {
            if u.eval_on_edge(*e, t).is_close(value) {
                return (value.clone(), u.graph().point(*e, t.clone()).expect("ok"));
            }
        }
        for (t, v) in u.trace(*e) {
            if t.cmp_total(a) != Ordering::Less
                && t.cmp_total(b) != Ordering::Greater
                && v.is_close(value)
            {
                return (value.clone(), u.graph().point(*e, t.clone()).expect("ok"));
            }
        }
    }
    let (_, p) = u.global_max();
    (value.clone(), p)
}

#[derive(Clone, Debug)]
pub struct RegularityReport<S> {
    pub applicable: bool,
    pub lipschitz_ok: bool,
    pub lipschitz_witness: Option<(GraphPoint<S>, GraphPoint<S>)>,
    pub slope_equals_subslope: bool,
    pub slope_witness: Option<GraphPoint<S>>,
    pub subslope_usc: bool,
    pub usc_witness: Option<GraphPoint<S>>,
}

impl<S> RegularityReport<S> {
    pub fn pass(&self) -> bool {
        self.applicable && self.lipschitz_ok && self.slope_equals_subslope && self.subslope_usc
    }
}

/// Regularity consequences of superharmonicity, verified on samples:
/// the quantitative local Lipschitz bound
/// `|u(x)-u(y)| <= (max{u(x),u(y)} - inf u) / r * d(x,y)` for `y` in `B_r(x)`
/// with `2r < d(x, boundary)`, the identity `slope = subslope` at interior
/// points, and upper semicontinuity of the subslope across breakpoints.
pub fn regularity_checks<S: Scalar>(
    u: &PLFunction<S>,
    seed: u64,
    samples: usize,
) -> Result<RegularityReport<S>, ConeError> {
    let graph = u.graph();
    if !is_inf_superharmonic_exact(u).pass() {
        return Ok(RegularityReport {
            applicable: false,
            lipschitz_ok: false,
            lipschitz_witness: None,
            slope_equals_subslope: false,
            slope_witness: None,
            subslope_usc: false,
            usc_witness: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bdist = crate::field::boundary_distance_field(graph)?;
    let (inf_u, _) = u.global_min();

    let mut lipschitz_ok = true;
    let mut lipschitz_witness = None;
    'outer: for _ in 0..samples {
        let x = random_point(graph, &mut rng);
        let depth = bdist.eval(&x)?;
        if depth.cmp_total(&S::zero()) != Ordering::Greater {
            continue;
        }
        // 2r < d(x, boundary)
        let r = depth.clone() * S::from_ratio(2, 5);
        let ball = metric_ball(graph, &x, &r)?;
        let ux = u.eval(&x)?;
        for y in ball.region.sample_points(graph, 16) {
            let uy = u.eval(&y)?;
            let d = graph.point_distance(&x, &y).expect("connected");
            let lhs = (ux.clone() - uy.clone()).abs_s() * r.clone();
            let rhs = (ux.clone().max_s(uy.clone()) - inf_u.clone()) * d;
            if !lhs.le_close(&rhs) {
                lipschitz_ok = false;
                lipschitz_witness = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }

    let mut slope_equals_subslope = true;
    let mut slope_witness = None;
    let mut subslope_usc = true;
    let mut usc_witness = None;
    for p in crate::eikonal::classification_points(u) {
        let s = u.slopes_at(&p)?;
        if !s.slope.is_close(&s.subslope) {
            slope_equals_subslope = false;
            slope_witness = Some(p.clone());
        }
        // adjacent segment-interior subslopes may not exceed the value at the
        // kink itself
        match &p {
            GraphPoint::Interior { .. } | GraphPoint::Vertex(_) => {
                let dirs = u.directions_at(&p)?;
                let here = s.subslope.clone();
                for g in dirs {
                    if !g.abs_s().le_close(&here) {
                        subslope_usc = false;
                        usc_witness = Some(p.clone());
                        break;
                    }
                }
            }
        }
    }

    Ok(RegularityReport {
        applicable: true,
        lipschitz_ok,
        lipschitz_witness,
        slope_equals_subslope,
        slope_witness,
        subslope_usc,
        usc_witness,
    })
}

#[derive(Clone, Debug)]
pub struct CompositionReport<S> {
    /// Whether `h' > 0` and `h'' <= 0` held on the sampled range.
    pub conditions_ok: bool,
    /// Set when `h'' = 0` within tolerance somewhere (affine boundary case).
    pub affine_flag: bool,
    pub result: SuperReport<S>,
}

impl<S> CompositionReport<S> {
    pub fn pass(&self) -> bool {
        self.conditions_ok && self.result.pass()
    }
}

/// Checks that composing a positive superharmonic function with an increasing
/// concave scalar map preserves superharmonicity. The map's monotonicity and
/// concavity are probed on the value range; the composed function is then
/// certified with slack matching the composition tolerance.
pub fn composition_check<S: Scalar>(
    v: &PLFunction<S>,
    map: &ScalarMap<S>,
    tol: &S,
) -> Result<CompositionReport<S>, ConeError> {
    let (lo, _) = v.global_min();
    let (hi, _) = v.global_max();
    let mut conditions_ok = true;
    let mut affine_flag = false;
    let steps = 64i64;
    let span = hi.clone() - lo.clone();
    if span.cmp_total(&S::zero()) == Ordering::Greater {
        let mut values = Vec::new();
        for j in 0..=steps {
            let x = lo.clone() + span.clone() * S::from_ratio(j, steps);
            values.push(map.apply(&x)?);
        }
        let step = span.clone() / S::from_int(steps);
        let mut prev_diff: Option<S> = None;
        for w in values.windows(2) {
            let diff = w[1].clone() - w[0].clone();
            if diff.cmp_total(&S::zero()) != Ordering::Greater {
                conditions_ok = false;
            }
            if let Some(pd) = prev_diff {
                let second = diff.clone() - pd;
                let slack = step.clone() * step.clone() * S::from_f64_lossy(1e-6)
                    + tol.clone() * S::from_f64_lossy(1e-3);
                if second.cmp_total(&slack) == Ordering::Greater {
                    conditions_ok = false;
                } else if second.abs_s().le_close(&slack) {
                    affine_flag = true;
                }
            }
            prev_diff = Some(diff);
        }
    }
    let composed = v.compose_scalar(map, tol)?;
    // chord slopes across a gap of at least the shortest produced segment can
    // be off by tol / gap; certify with matching slack
    let mut min_gap: Option<S> = None;
    for e in v.graph().edge_ids() {
        for w in composed.trace(e).windows(2) {
            let gap = w[1].0.clone() - w[0].0.clone();
            min_gap = Some(match min_gap {
                None => gap,
                Some(m) => m.min_s(gap),
            });
        }
    }
    let slack = match min_gap {
        Some(g) if g.cmp_total(&S::zero()) == Ordering::Greater => {
            S::from_int(4) * tol.clone() / g
        }
        _ => S::from_int(4) * tol.clone(),
    };
    let result = is_inf_superharmonic_within(&composed, &slack);
    Ok(CompositionReport {
        conditions_ok,
        affine_flag,
        result,
    })
}

/// Ground-truth superharmonic instance generator: pointwise minimum of
/// finitely many increasing cones anchored at boundary vertices, plus
/// constants. Every output is nonnegative and certified superharmonic in the
/// domain by construction, on cyclic graphs included.
pub fn random_superharmonic<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    pieces: usize,
    seed: u64,
) -> Result<PLFunction<S>, ConeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary: Vec<VertexId> = graph.boundary_vertices().collect();
    assert!(!boundary.is_empty(), "graph needs a boundary");
    let mut parts: Vec<PLFunction<S>> = Vec::new();
    for _ in 0..pieces.max(1) {
        if rng.random_range(0..5) == 0 {
            let c = S::from_ratio(rng.random_range(1..=40), 10);
            parts.push(PLFunction::constant(graph.clone(), c));
        } else {
            let anchor = boundary[rng.random_range(0..boundary.len())];
            let slope = S::from_ratio(rng.random_range(1..=30), 10);
            let base = S::from_ratio(rng.random_range(0..=20), 10);
            let dist = distance_field(graph, &GraphPoint::vertex(anchor))?;
            parts.push(dist.map_affine(&base, &slope));
        }
    }
    let refs: Vec<&PLFunction<S>> = parts.iter().collect();
    Ok(PLFunction::pointwise_min(&refs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{dumbbell_arc, dumbbell_u_inf, interval_arc};
    use crate::field::boundary_distance_field;
    use crate::graph::EdgeId;
    use crate::num::Rat;

    fn u_dist(g: &Arc<MetricGraph<Rat>>) -> PLFunction<Rat> {
        boundary_distance_field(g)
            .unwrap()
            .map_affine(&Rat::int(0), &Rat::new(1, 2))
    }

    #[test]
    fn u_dist_is_superharmonic() {
        let g = dumbbell_arc();
        assert!(is_inf_superharmonic_exact(&u_dist(&g)).pass());
    }

    #[test]
    fn closed_form_eigenfunction_is_superharmonic() {
        let g = dumbbell_arc();
        assert!(is_inf_superharmonic_exact(&dumbbell_u_inf(&g)).pass());
    }

    #[test]
    fn vee_is_flagged_exactly_and_by_sampling() {
        let g = interval_arc(Rat::int(1));
        let vee = PLFunction::new(
            g.clone(),
            vec![vec![
                (Rat::int(0), Rat::int(1)),
                (Rat::new(1, 2), Rat::new(1, 2)),
                (Rat::int(1), Rat::int(1)),
            ]],
        )
        .unwrap();
        let exact = is_inf_superharmonic_exact(&vee);
        assert!(!exact.pass());
        assert!(matches!(
            exact.violations[0],
            SuperViolation::ConvexKink { .. }
        ));
        let sampled = cone_comparison_sampled(&vee, 500, 0).unwrap();
        assert!(!sampled.pass(), "sampler should find the convex kink");
    }

    #[test]
    fn cone_passes_sampled_on_tree() {
        let g = dumbbell_arc();
        let e = g.find_edge("e+3").unwrap();
        let apex = g.point(e, Rat::int(2)).unwrap();
        let cone =
            crate::plf::cone_function(&g, &apex, &Rat::int(2), &Rat::new(-1, 2)).unwrap();
        assert!(is_inf_superharmonic_exact(&cone).pass());
        assert!(cone_comparison_sampled(&cone, 300, 1).unwrap().pass());
    }

    #[test]
    fn decreasing_cone_fails_beyond_cut_point_on_a_loop() {
        // on a cycle, d(apex, .) kinks concavely at the point opposite the
        // apex, so a cone with negative slope kinks convexly there and is
        // genuinely not superharmonic; exact and sampled checkers agree
        let g = Arc::new(
            MetricGraph::new(
                vec!["a".into(), "b".into()],
                vec![
                    ("top".into(), "a".into(), "b".into(), Rat::int(1)),
                    ("bot".into(), "a".into(), "b".into(), Rat::int(1)),
                ],
                vec!["a".into()],
            )
            .unwrap(),
        );
        let apex = GraphPoint::vertex(g.find_vertex("a").unwrap());
        let cone = crate::plf::cone_function(&g, &apex, &Rat::int(2), &Rat::int(-1)).unwrap();
        let exact = is_inf_superharmonic_exact(&cone);
        assert!(!exact.pass());
        let sampled = cone_comparison_sampled(&cone, 1000, 2).unwrap();
        assert!(!sampled.pass());
    }

    #[test]
    fn harnack_on_interval_example() {
        let g = interval_arc(10.0_f64);
        let u = PLFunction::new(
            g.clone(),
            vec![vec![(0.0, 0.0), (10.0, 10.0)]],
        )
        .unwrap();
        let x0 = g.point(EdgeId(0), 4.9).unwrap();
        let report = harnack_check(&u, &x0, &4.1, &1.0).unwrap();
        assert!(report.pass());
        let ratio = report.max_ratio.unwrap();
        assert!((ratio - 5.9 / 3.9).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn harnack_constant_function() {
        let g = dumbbell_arc();
        let u = PLFunction::constant(g.clone(), Rat::int(2));
        let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
        let report = harnack_check(&u, &o, &Rat::new(1, 2), &Rat::new(1, 10)).unwrap();
        assert!(report.pass());
        assert_eq!(report.max_ratio, Some(1.0));
    }

    #[test]
    fn harnack_rejects_bad_radii() {
        let g = dumbbell_arc();
        let u = PLFunction::constant(g.clone(), Rat::int(1));
        let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
        let report = harnack_check(&u, &o, &Rat::new(1, 2), &Rat::new(1, 2)).unwrap();
        assert!(matches!(report.status, HarnackStatus::Inapplicable { .. }));
        let report = harnack_check(&u, &o, &Rat::int(5), &Rat::int(1)).unwrap();
        assert!(matches!(report.status, HarnackStatus::Inapplicable { .. }));
    }

    #[test]
    fn regularity_on_u_dist() {
        let g = dumbbell_arc();
        let report = regularity_checks(&u_dist(&g), 7, 60).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn regularity_on_single_cone() {
        let g = dumbbell_arc();
        let e = g.find_edge("e+3").unwrap();
        let apex = g.point(e, Rat::int(1)).unwrap();
        let cone =
            crate::plf::cone_function(&g, &apex, &Rat::int(3), &Rat::new(-3, 4)).unwrap();
        let report = regularity_checks(&cone, 11, 60).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn regularity_peak_slopes_of_closed_form() {
        let g = dumbbell_arc();
        let u = dumbbell_u_inf(&g);
        let report = regularity_checks(&u, 3, 60).unwrap();
        assert!(report.pass(), "{report:?}");
        let e = g.find_edge("e+3").unwrap();
        let peak = g.point(e, Rat::int(1)).unwrap();
        let s = u.slopes_at(&peak).unwrap();
        assert_eq!(s.subslope, Rat::new(1, 2));
        assert_eq!(s.superslope, Rat::int(0));
    }

    #[test]
    fn composition_sqrt_preserves_superharmonicity() {
        let g = interval_arc(1.0_f64);
        let v = boundary_distance_field(&g)
            .unwrap()
            .map_affine(&1.0, &1.0); // d + 1 > 0
        let m = ScalarMap::from_f64_fn(|t| t.sqrt());
        let report = composition_check(&v, &m, &1e-7).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn composition_affine_flagged_but_passes() {
        let g = interval_arc(1.0_f64);
        let v = boundary_distance_field(&g).unwrap().map_affine(&1.0, &1.0);
        let m = ScalarMap::affine(0.5, 2.0);
        let report = composition_check(&v, &m, &1e-9).unwrap();
        assert!(report.pass());
        assert!(report.affine_flag);
    }

    #[test]
    fn composition_convex_map_is_negative_control() {
        let g = interval_arc(1.0_f64);
        let v = boundary_distance_field(&g).unwrap().map_affine(&1.0, &1.0);
        let m = ScalarMap::from_f64_fn(|t| t * t);
        let report = composition_check(&v, &m, &1e-7).unwrap();
        assert!(!report.conditions_ok);
        assert!(!report.result.pass(), "convex image must kink convexly");
    }

    #[test]
    fn random_superharmonic_instances_pass_both_checkers() {
        let g = dumbbell_arc();
        for seed in 0..20 {
            let u = random_superharmonic(&g, 4, seed).unwrap();
            assert!(is_inf_superharmonic_exact(&u).pass(), "seed {seed}");
            assert!(
                cone_comparison_sampled(&u, 100, seed).unwrap().pass(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn min_of_superharmonic_stays_superharmonic() {
        let g = dumbbell_arc();
        let a = random_superharmonic(&g, 3, 100).unwrap();
        let b = random_superharmonic(&g, 5, 101).unwrap();
        let m = PLFunction::pointwise_min(&[&a, &b]).unwrap();
        assert!(is_inf_superharmonic_exact(&m).pass());
    }
}
