//! Continuous piecewise-linear scalar fields on a metric graph and their
//! exact calculus: evaluation, one-sided derivatives, slopes/subslopes,
//! pointwise minima, affine maps and scalar composition.

use crate::graph::{EdgeEnd, EdgeId, GraphError, GraphPoint, MetricGraph, VertexId};
use crate::num::Scalar;
use std::cmp::Ordering;
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum PlError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {edge}: {reason}")]
    BadTrace { edge: String, reason: String },
    #[error("missing trace for edge {0}")]
    MissingTrace(String),
    #[error("discontinuity at vertex {vertex}: values {a} and {b}")]
    Discontinuity { vertex: String, a: String, b: String },
    #[error("functions live on different graphs")]
    GraphMismatch,
    #[error("empty function list")]
    EmptyList,
    #[error("cone slope must satisfy kappa <= 0, got {0}")]
    PositiveKappa(String),
    #[error("scalar map undefined at {0}")]
    MapUndefined(String),
    #[error("graph has an isolated vertex {0}; no trace to evaluate")]
    IsolatedVertex(String),
}

/// Slope data at a point: `slope = max(subslope, superslope)` holds by
/// construction.
#[derive(Clone, Debug)]
pub struct SlopeTriple<S> {
    pub slope: S,
    pub subslope: S,
    pub superslope: S,
}

/// Per-edge breakpoint trace: strictly increasing parameters from 0 to the
/// edge length with the function linear in between.
pub type EdgeTrace<S> = Vec<(S, S)>;

#[derive(Clone, Debug, PartialEq)]
pub struct PLFunction<S> {
    graph: Arc<MetricGraph<S>>,
    traces: Vec<EdgeTrace<S>>,
}

pub(crate) fn same_graph<S: Scalar>(a: &Arc<MetricGraph<S>>, b: &Arc<MetricGraph<S>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> PLFunction<S> {
    /// Builds a function from per-edge traces, checking domain coverage,
    /// strict monotonicity of breakpoints and continuity at shared vertices.
    pub fn new(
        graph: Arc<MetricGraph<S>>,
        traces: Vec<EdgeTrace<S>>,
    ) -> Result<Self, PlError> {
        if traces.len() != graph.edge_count() {
            return Err(PlError::BadTrace {
                edge: "<count>".into(),
                reason: format!(
                    "expected {} traces, got {}",
                    graph.edge_count(),
                    traces.len()
                ),
            });
        }
        for (i, trace) in traces.iter().enumerate() {
            let edge = graph.edge(EdgeId(i));
            let bad = |reason: &str| PlError::BadTrace {
                edge: edge.name.clone(),
                reason: reason.to_string(),
            };
            if trace.len() < 2 {
                return Err(bad("needs at least two breakpoints"));
            }
            if !trace[0].0.is_close(&S::zero()) {
                return Err(bad("first breakpoint must sit at t=0"));
            }
            if !trace.last().unwrap().0.is_close(&edge.length) {
                return Err(bad("last breakpoint must sit at t=length"));
            }
            for w in trace.windows(2) {
                if w[0].0.cmp_total(&w[1].0) != Ordering::Less {
                    return Err(bad("breakpoints must be strictly increasing"));
                }
            }
        }
        let f = PLFunction { graph, traces };
        for v in f.graph.vertex_ids() {
            let mut first: Option<S> = None;
            for (e, end) in f.graph.incident(v) {
                let trace = &f.traces[e.0];
                let val = match end {
                    EdgeEnd::Start => trace.first().unwrap().1.clone(),
                    EdgeEnd::End => trace.last().unwrap().1.clone(),
                };
                match &first {
                    None => first = Some(val),
                    Some(prev) => {
                        if !prev.is_close(&val) {
                            return Err(PlError::Discontinuity {
                                vertex: f.graph.vertex_name(v).to_string(),
                                a: prev.repr(),
                                b: val.repr(),
                            });
                        }
                    }
                }
            }
        }
        Ok(f)
    }

    pub fn constant(graph: Arc<MetricGraph<S>>, value: S) -> Self {
        let traces = graph
            .edge_ids()
            .map(|e| {
                vec![
                    (S::zero(), value.clone()),
                    (graph.edge_len(e).clone(), value.clone()),
                ]
            })
            .collect();
        PLFunction { graph, traces }
    }

    pub fn graph(&self) -> &Arc<MetricGraph<S>> {
        &self.graph
    }
    pub fn trace(&self, e: EdgeId) -> &EdgeTrace<S> {
        &self.traces[e.0]
    }
    pub fn traces(&self) -> &[EdgeTrace<S>] {
        &self.traces
    }

    pub fn eval_on_edge(&self, e: EdgeId, t: &S) -> S {
        let trace = &self.traces[e.0];
        // clamp to the parameter range; callers validate membership
        if t.cmp_total(&trace[0].0) != Ordering::Greater {
            return trace[0].1.clone();
        }
        let last = trace.last().unwrap();
        if t.cmp_total(&last.0) != Ordering::Less {
            return last.1.clone();
        }
        let mut lo = 0usize;
        let mut hi = trace.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if trace[mid].0.cmp_total(t) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (t0, v0) = &trace[lo];
        let (t1, v1) = &trace[hi];
        if t.is_close(t0) {
            return v0.clone();
        }
        let w = (t.clone() - t0.clone()) / (t1.clone() - t0.clone());
        v0.clone() + w * (v1.clone() - v0.clone())
    }

    pub fn vertex_value(&self, v: VertexId) -> Result<S, PlError> {
        let (e, end) = self
            .graph
            .incident(v)
            .first()
            .ok_or_else(|| PlError::IsolatedVertex(self.graph.vertex_name(v).to_string()))?;
        let trace = &self.traces[e.0];
        Ok(match end {
            EdgeEnd::Start => trace.first().unwrap().1.clone(),
            EdgeEnd::End => trace.last().unwrap().1.clone(),
        })
    }

    pub fn eval(&self, p: &GraphPoint<S>) -> Result<S, PlError> {
        match p {
            GraphPoint::Vertex(v) => self.vertex_value(*v),
            GraphPoint::Interior { edge, t } => Ok(self.eval_on_edge(*edge, t)),
        }
    }

    /// One-sided derivatives of the function along every direction leaving
    /// the point (two on edge interiors, degree-many at vertices).
    pub fn directions_at(&self, p: &GraphPoint<S>) -> Result<Vec<S>, PlError> {
        match p {
            GraphPoint::Vertex(v) => {
                let inc = self.graph.incident(*v);
                if inc.is_empty() {
                    return Err(PlError::IsolatedVertex(
                        self.graph.vertex_name(*v).to_string(),
                    ));
                }
                Ok(inc
                    .iter()
                    .map(|(e, end)| {
                        let trace = &self.traces[e.0];
                        match end {
                            EdgeEnd::Start => segment_slope(&trace[0], &trace[1]),
                            EdgeEnd::End => {
                                let n = trace.len();
                                -segment_slope(&trace[n - 2], &trace[n - 1])
                            }
                        }
                    })
                    .collect())
            }
            GraphPoint::Interior { edge, t } => {
                let trace = &self.traces[edge.0];
                // locate enclosing segment or exact breakpoint
                for (i, (ti, _)) in trace.iter().enumerate() {
                    match t.cmp_total(ti) {
                        Ordering::Equal => {
                            let right = segment_slope(&trace[i], &trace[i + 1]);
                            let left = segment_slope(&trace[i - 1], &trace[i]);
                            return Ok(vec![right, -left]);
                        }
                        Ordering::Less => {
                            let s = segment_slope(&trace[i - 1], &trace[i]);
                            return Ok(vec![s.clone(), -s]);
                        }
                        Ordering::Greater => continue,
                    }
                }
                unreachable!("parameter within edge range")
            }
        }
    }

    /// Slope, subslope and superslope at a point, computed exactly from the
    /// one-sided derivatives.
    pub fn slopes_at(&self, p: &GraphPoint<S>) -> Result<SlopeTriple<S>, PlError> {
        let dirs = self.directions_at(p)?;
        let mut sub = S::zero();
        let mut sup = S::zero();
        for g in dirs {
            sup = sup.max_s(g.clone());
            sub = sub.max_s(-g);
        }
        Ok(SlopeTriple {
            slope: sub.clone().max_s(sup.clone()),
            subslope: sub,
            superslope: sup,
        })
    }

    /// Largest absolute segment slope over the whole graph.
    pub fn max_abs_slope(&self) -> S {
        let mut best = S::zero();
        for trace in &self.traces {
            for w in trace.windows(2) {
                best = best.max_s(segment_slope(&w[0], &w[1]).abs_s());
            }
        }
        best
    }

    /// Global minimum with one attaining point.
    pub fn global_min(&self) -> (S, GraphPoint<S>) {
        self.global_extremum(Ordering::Less)
    }

    /// Global maximum with one attaining point.
    pub fn global_max(&self) -> (S, GraphPoint<S>) {
        self.global_extremum(Ordering::Greater)
    }

    fn global_extremum(&self, want: Ordering) -> (S, GraphPoint<S>) {
        let mut best: Option<(S, GraphPoint<S>)> = None;
        for e in self.graph.edge_ids() {
            for (t, v) in &self.traces[e.0] {
                let p = self
                    .graph
                    .point(e, t.clone())
                    .expect("breakpoint within range");
                match &best {
                    None => best = Some((v.clone(), p)),
                    Some((bv, _)) => {
                        if v.cmp_total(bv) == want {
                            best = Some((v.clone(), p));
                        }
                    }
                }
            }
        }
        best.expect("nonempty graph")
    }

    /// All points attaining the global maximum, canonicalized and
    /// deduplicated. Under floats, points within tolerance of the max count.
    pub fn argmax_points(&self) -> (S, Vec<GraphPoint<S>>) {
        let (max, _) = self.global_max();
        let mut pts: Vec<GraphPoint<S>> = Vec::new();
        for e in self.graph.edge_ids() {
            for (t, v) in &self.traces[e.0] {
                if v.is_close(&max) {
                    let p = self.graph.point(e, t.clone()).expect("in range");
                    if !pts.iter().any(|q| q.close_to(&p)) {
                        pts.push(p);
                    }
                }
            }
        }
        pts.sort_by(|a, b| {
            a.sort_key()
                .partial_cmp(&b.sort_key())
                .unwrap_or(Ordering::Equal)
        });
        (max, pts)
    }

    /// `a + b * f`, exactly.
    pub fn map_affine(&self, a: &S, b: &S) -> Self {
        let traces = self
            .traces
            .iter()
            .map(|tr| {
                tr.iter()
                    .map(|(t, v)| (t.clone(), a.clone() + b.clone() * v.clone()))
                    .collect()
            })
            .collect();
        PLFunction {
            graph: self.graph.clone(),
            traces,
        }
    }

    pub fn negate(&self) -> Self {
        self.map_affine(&S::zero(), &(-S::one()))
    }

    /// Exact pointwise minimum of a nonempty family on one graph; breakpoints
    /// include all crossing points.
    pub fn pointwise_min(funcs: &[&PLFunction<S>]) -> Result<PLFunction<S>, PlError> {
        let first = *funcs.first().ok_or(PlError::EmptyList)?;
        for f in &funcs[1..] {
            if !same_graph(&first.graph, &f.graph) {
                return Err(PlError::GraphMismatch);
            }
        }
        let mut acc = first.clone();
        for f in &funcs[1..] {
            let traces = acc
                .traces
                .iter()
                .zip(f.traces.iter())
                .map(|(a, b)| merge_min(a, b))
                .collect();
            acc = PLFunction {
                graph: acc.graph.clone(),
                traces,
            };
        }
        Ok(acc)
    }

    /// Piecewise-linear image `h(f)`. Exact when `h` is piecewise linear;
    /// otherwise breakpoints are inserted by bisection until the chord error
    /// is at most `tol`.
    pub fn compose_scalar(&self, map: &ScalarMap<S>, tol: &S) -> Result<PLFunction<S>, PlError> {
        let mut traces = Vec::with_capacity(self.traces.len());
        for trace in &self.traces {
            let mut out: EdgeTrace<S> = Vec::new();
            for w in trace.windows(2) {
                let (t0, v0) = &w[0];
                let (t1, v1) = &w[1];
                let h0 = map.apply(v0)?;
                out.push((t0.clone(), h0.clone()));
                match map {
                    ScalarMap::PiecewiseLinear(bps) => {
                        // cut at preimages of the map's breakpoints
                        let lo = v0.clone().min_s(v1.clone());
                        let hi = v0.clone().max_s(v1.clone());
                        let mut cuts: Vec<(S, S)> = Vec::new();
                        for (x, y) in bps {
                            if x.cmp_total(&lo) == Ordering::Greater
                                && x.cmp_total(&hi) == Ordering::Less
                            {
                                let w = (x.clone() - v0.clone())
                                    / (v1.clone() - v0.clone());
                                let t = t0.clone()
                                    + w * (t1.clone() - t0.clone());
                                cuts.push((t, y.clone()));
                            }
                        }
                        cuts.sort_by(|a, b| a.0.cmp_total(&b.0));
                        out.extend(cuts);
                    }
                    ScalarMap::Smooth(_) => {
                        refine_smooth(map, t0, &h0, t1, &map.apply(v1)?, v0, v1, tol, 0, &mut out)?;
                    }
                }
            }
            let last = trace.last().unwrap();
            out.push((last.0.clone(), map.apply(&last.1)?));
            traces.push(tidy(out));
        }
        PLFunction::new(self.graph.clone(), traces)
    }

    /// Uniformly spaced sample points along every edge (spacing at most
    /// `step`), breakpoints included. Canonical, deduplicated per edge.
    pub fn sample_points(&self, step: &S) -> Vec<GraphPoint<S>> {
        let mut out = Vec::new();
        for e in self.graph.edge_ids() {
            let len = self.graph.edge_len(e);
            let n = S::ceil_div(len, step);
            let mut ts: Vec<S> = (0..=n)
                .map(|j| len.clone() * S::from_int(j as i64) / S::from_int(n as i64))
                .collect();
            for (t, _) in &self.traces[e.0] {
                ts.push(t.clone());
            }
            ts.sort_by(|a, b| a.cmp_total(b));
            ts.dedup_by(|a, b| a.is_close(b));
            for t in ts {
                out.push(self.graph.point(e, t).expect("in range"));
            }
        }
        out
    }
}

/// Cone function `a + kappa * d(apex, .)` as an exact PL field; the paper's
/// supersolution cone class requires `kappa <= 0`.
pub fn cone_function<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    apex: &GraphPoint<S>,
    a: &S,
    kappa: &S,
) -> Result<PLFunction<S>, PlError> {
    if kappa.cmp_total(&S::zero()) == Ordering::Greater {
        return Err(PlError::PositiveKappa(kappa.repr()));
    }
    let dist = distance_field(graph, apex)?;
    Ok(dist.map_affine(a, kappa))
}

/// Exact distance field `x -> d(p, x)` as a PL function.
pub fn distance_field<S: Scalar>(
    graph: &Arc<MetricGraph<S>>,
    p: &GraphPoint<S>,
) -> Result<PLFunction<S>, PlError> {
    let dist = graph.vertex_distances(&graph.point_sources(p));
    let mut traces = Vec::with_capacity(graph.edge_count());
    for e in graph.edge_ids() {
        let edge = graph.edge(e);
        let len = &edge.length;
        let du = dist[edge.from.0].clone().ok_or(GraphError::Unreachable)?;
        let dv = dist[edge.to.0].clone().ok_or(GraphError::Unreachable)?;
        let from_u = vec![(S::zero(), du.clone()), (len.clone(), du + len.clone())];
        let from_v = vec![(S::zero(), dv.clone() + len.clone()), (len.clone(), dv)];
        let mut trace = merge_min(&from_u, &from_v);
        if let GraphPoint::Interior { edge: pe, t } = p {
            if *pe == e {
                let vee = vec![
                    (S::zero(), t.clone()),
                    (t.clone(), S::zero()),
                    (len.clone(), len.clone() - t.clone()),
                ];
                trace = merge_min(&trace, &vee);
            }
        }
        traces.push(trace);
    }
    PLFunction::new(graph.clone(), traces)
}

/// Scalar reparametrization `h` applied to function values.
pub enum ScalarMap<S> {
    /// Breakpoints `(x, h(x))` with strictly increasing `x`; linear between,
    /// undefined outside the covered range.
    PiecewiseLinear(Vec<(S, S)>),
    Smooth(Arc<dyn Fn(&S) -> Option<S> + Send + Sync>),
}

impl<S: Scalar> ScalarMap<S> {
    pub fn affine(a: S, b: S) -> Self {
        ScalarMap::Smooth(Arc::new(move |t: &S| {
            Some(a.clone() + b.clone() * t.clone())
        }))
    }

    pub fn identity() -> Self {
        ScalarMap::affine(S::zero(), S::one())
    }

    /// Lifts a double-precision map; values are converted exactly back into
    /// the scalar mode.
    pub fn from_f64_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarMap::Smooth(Arc::new(move |t: &S| {
            let y = f(t.to_f64());
            if y.is_finite() {
                Some(S::from_f64_lossy(y))
            } else {
                None
            }
        }))
    }

    pub fn apply(&self, x: &S) -> Result<S, PlError> {
        match self {
            ScalarMap::PiecewiseLinear(bps) => {
                if bps.len() < 2
                    || x.cmp_total(&bps[0].0) == Ordering::Less
                    || x.cmp_total(&bps.last().unwrap().0) == Ordering::Greater
                {
                    return Err(PlError::MapUndefined(x.repr()));
                }
                for w in bps.windows(2) {
                    let (x0, y0) = &w[0];
                    let (x1, y1) = &w[1];
                    if x.cmp_total(x1) != Ordering::Greater {
                        if x.is_close(x0) {
                            return Ok(y0.clone());
                        }
                        let w = (x.clone() - x0.clone()) / (x1.clone() - x0.clone());
                        return Ok(y0.clone() + w * (y1.clone() - y0.clone()));
                    }
                }
                Ok(bps.last().unwrap().1.clone())
            }
            ScalarMap::Smooth(f) => f(x).ok_or_else(|| PlError::MapUndefined(x.repr())),
        }
    }
}

fn segment_slope<S: Scalar>(a: &(S, S), b: &(S, S)) -> S {
    (b.1.clone() - a.1.clone()) / (b.0.clone() - a.0.clone())
}

fn eval_trace<S: Scalar>(trace: &EdgeTrace<S>, t: &S) -> S {
    if t.cmp_total(&trace[0].0) != Ordering::Greater {
        return trace[0].1.clone();
    }
    let last = trace.last().unwrap();
    if t.cmp_total(&last.0) != Ordering::Less {
        return last.1.clone();
    }
    for w in trace.windows(2) {
        let (t0, v0) = &w[0];
        let (t1, v1) = &w[1];
        if t.cmp_total(t1) != Ordering::Greater {
            if t.is_close(t0) {
                return v0.clone();
            }
            let w = (t.clone() - t0.clone()) / (t1.clone() - t0.clone());
            return v0.clone() + w * (v1.clone() - v0.clone());
        }
    }
    last.1.clone()
}

/// Exact pointwise minimum of two traces over one edge; inserts every
/// crossing point.
pub(crate) fn merge_min<S: Scalar>(a: &EdgeTrace<S>, b: &EdgeTrace<S>) -> EdgeTrace<S> {
    let mut ts: Vec<S> = a.iter().chain(b.iter()).map(|(t, _)| t.clone()).collect();
    ts.sort_by(|x, y| x.cmp_total(y));
    ts.dedup_by(|x, y| x.is_close(y));
    let mut out: EdgeTrace<S> = Vec::with_capacity(ts.len() + 4);
    for i in 0..ts.len() {
        let t = &ts[i];
        let fa = eval_trace(a, t);
        let fb = eval_trace(b, t);
        out.push((t.clone(), fa.clone().min_s(fb.clone())));
        if i + 1 < ts.len() {
            let tn = &ts[i + 1];
            let ga = eval_trace(a, tn);
            let gb = eval_trace(b, tn);
            let d0 = fa - fb;
            let d1 = ga - gb;
            let s0 = d0.cmp_total(&S::zero());
            let s1 = d1.cmp_total(&S::zero());
            if (s0 == Ordering::Less && s1 == Ordering::Greater)
                || (s0 == Ordering::Greater && s1 == Ordering::Less)
            {
                // strict sign change: one interior crossing
                let w = d0.clone() / (d0 - d1);
                let tc = t.clone() + w * (tn.clone() - t.clone());
                if tc.cmp_total(t) == Ordering::Greater && tc.cmp_total(tn) == Ordering::Less {
                    let vc = eval_trace(a, &tc);
                    out.push((tc, vc));
                }
            }
        }
    }
    tidy(out)
}

/// Removes duplicate parameters and collinear interior breakpoints.
fn tidy<S: Scalar>(mut trace: EdgeTrace<S>) -> EdgeTrace<S> {
    trace.dedup_by(|next, prev| next.0.is_close(&prev.0));
    if trace.len() <= 2 {
        return trace;
    }
    let mut out: EdgeTrace<S> = Vec::with_capacity(trace.len());
    out.push(trace[0].clone());
    for i in 1..trace.len() - 1 {
        let prev = out.last().unwrap();
        let cur = &trace[i];
        let next = &trace[i + 1];
        let s1 = segment_slope(prev, cur);
        let s2 = segment_slope(cur, next);
        if !s1.is_close(&s2) {
            out.push(cur.clone());
        }
    }
    out.push(trace.last().unwrap().clone());
    out
}

#[allow(clippy::too_many_arguments)]
fn refine_smooth<S: Scalar>(
    map: &ScalarMap<S>,
    t0: &S,
    h0: &S,
    t1: &S,
    h1: &S,
    v0: &S,
    v1: &S,
    tol: &S,
    depth: usize,
    out: &mut EdgeTrace<S>,
) -> Result<(), PlError> {
    if depth >= 40 {
        return Ok(());
    }
    let tm = (t0.clone() + t1.clone()).half();
    let vm = (v0.clone() + v1.clone()).half();
    let hm = map.apply(&vm)?;
    let chord = (h0.clone() + h1.clone()).half();
    if (hm.clone() - chord).abs_s().cmp_total(tol) != Ordering::Greater {
        return Ok(());
    }
    refine_smooth(map, t0, h0, &tm, &hm, v0, &vm, tol, depth + 1, out)?;
    out.push((tm.clone(), hm.clone()));
    refine_smooth(map, &tm, &hm, t1, h1, &vm, v1, tol, depth + 1, out)
}
