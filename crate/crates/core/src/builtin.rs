//! Bundled example instances: the dumbbell graph with two incenters and its
//! two closed-form eigenfunctions, plus small helper graphs.

use crate::graph::MetricGraph;
use crate::num::{Rat, Scalar};
use crate::plf::{EdgeTrace, PLFunction};
use std::sync::Arc;

/// Seven-edge dumbbell: a center vertex `O` joined to `V0`, `V+1`, `V-1` by
/// unit edges, unit edges `V+1 - V+2` and `V-1 - V-2`, and long edges of
/// length 3 from `V+1` to `V+3` and `V-1` to `V-3`. Boundary: the five
/// degree-one leaves. Inradius 2, attained at the two points one unit into
/// each long edge.
pub fn dumbbell() -> MetricGraph<Rat> {
    MetricGraph::new(
        vec![
            "O".into(),
            "V0".into(),
            "V+1".into(),
            "V-1".into(),
            "V+2".into(),
            "V-2".into(),
            "V+3".into(),
            "V-3".into(),
        ],
        vec![
            ("e0".into(), "O".into(), "V0".into(), Rat::int(1)),
            ("e+1".into(), "O".into(), "V+1".into(), Rat::int(1)),
            ("e-1".into(), "O".into(), "V-1".into(), Rat::int(1)),
            ("e+2".into(), "V+1".into(), "V+2".into(), Rat::int(1)),
            ("e-2".into(), "V-1".into(), "V-2".into(), Rat::int(1)),
            ("e+3".into(), "V+1".into(), "V+3".into(), Rat::int(3)),
            ("e-3".into(), "V-1".into(), "V-3".into(), Rat::int(3)),
        ],
        vec![
            "V0".into(),
            "V+2".into(),
            "V-2".into(),
            "V+3".into(),
            "V-3".into(),
        ],
    )
    .expect("well-formed builtin graph")
}

pub fn dumbbell_arc() -> Arc<MetricGraph<Rat>> {
    Arc::new(dumbbell())
}

fn trace(points: &[(i64, i64, i64, i64)]) -> EdgeTrace<Rat> {
    points
        .iter()
        .map(|(tn, td, vn, vd)| (Rat::new(*tn, *td), Rat::new(*vn, *vd)))
        .collect()
}

/// Minimal eigenfunction of the dumbbell with both peaks constrained to 1.
pub fn dumbbell_u_inf(g: &Arc<MetricGraph<Rat>>) -> PLFunction<Rat> {
    let traces = vec![
        trace(&[(0, 1, 1, 4), (1, 1, 0, 1)]),               // e0
        trace(&[(0, 1, 1, 4), (1, 1, 1, 2)]),               // e+1
        trace(&[(0, 1, 1, 4), (1, 1, 1, 2)]),               // e-1
        trace(&[(0, 1, 1, 2), (1, 1, 0, 1)]),               // e+2
        trace(&[(0, 1, 1, 2), (1, 1, 0, 1)]),               // e-2
        trace(&[(0, 1, 1, 2), (1, 1, 1, 1), (3, 1, 0, 1)]), // e+3
        trace(&[(0, 1, 1, 2), (1, 1, 1, 1), (3, 1, 0, 1)]), // e-3
    ];
    PLFunction::new(g.clone(), traces).expect("closed form is continuous")
}

/// Eigenfunction of the dumbbell under the partial constraint at the plus
/// peak only; differs from [`dumbbell_u_inf`] on the whole minus side.
pub fn dumbbell_u_inf_y(g: &Arc<MetricGraph<Rat>>) -> PLFunction<Rat> {
    let traces = vec![
        trace(&[(0, 1, 1, 4), (1, 1, 0, 1)]),               // e0
        trace(&[(0, 1, 1, 4), (1, 1, 1, 2)]),               // e+1
        trace(&[(0, 1, 1, 4), (1, 1, 1, 8)]),               // e-1
        trace(&[(0, 1, 1, 2), (1, 1, 0, 1)]),               // e+2
        trace(&[(0, 1, 1, 8), (1, 1, 0, 1)]),               // e-2
        trace(&[(0, 1, 1, 2), (1, 1, 1, 1), (3, 1, 0, 1)]), // e+3
        trace(&[(0, 1, 1, 8), (1, 1, 1, 4), (3, 1, 0, 1)]), // e-3
    ];
    PLFunction::new(g.clone(), traces).expect("closed form is continuous")
}

/// Single edge `[0, len]` with both endpoints as boundary.
pub fn interval<S: Scalar>(len: S) -> MetricGraph<S> {
    MetricGraph::new(
        vec!["a".into(), "b".into()],
        vec![("e".into(), "a".into(), "b".into(), len)],
        vec!["a".into(), "b".into()],
    )
    .expect("well-formed builtin graph")
}

pub fn interval_arc<S: Scalar>(len: S) -> Arc<MetricGraph<S>> {
    Arc::new(interval(len))
}

/// Three unit legs meeting at a center, every leaf on the boundary.
pub fn star3() -> MetricGraph<Rat> {
    MetricGraph::new(
        vec!["c".into(), "l1".into(), "l2".into(), "l3".into()],
        vec![
            ("e1".into(), "c".into(), "l1".into(), Rat::int(1)),
            ("e2".into(), "c".into(), "l2".into(), Rat::int(1)),
            ("e3".into(), "c".into(), "l3".into(), Rat::int(1)),
        ],
        vec!["l1".into(), "l2".into(), "l3".into()],
    )
    .expect("well-formed builtin graph")
}

pub fn star3_arc() -> Arc<MetricGraph<Rat>> {
    Arc::new(star3())
}
