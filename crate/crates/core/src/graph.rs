//! Finite metric graphs with the intrinsic (shortest-path) metric.
//!
//! A graph is a set of named vertices, positively weighted edges (lengths in
//! arclength units, multi-edges and self-loops allowed) and a designated
//! nonempty boundary vertex set. The domain is the whole space minus the
//! boundary vertices.

use crate::num::Scalar;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeEnd {
    Start,
    End,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub name: String,
    pub from: VertexId,
    pub to: VertexId,
    pub length: S,
}

#[derive(Error, Debug)]
pub enum GraphError {
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("parameter {t} outside [0, {len}] on edge {edge:?}")]
    ParamOutOfRange { edge: String, t: String, len: String },
    #[error("point does not belong to this graph")]
    ForeignPoint,
    #[error("no path between the given points")]
    Unreachable,
}

/// A location on the graph. Edge endpoints are canonicalized to the vertex
/// form so point equality is well defined.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphPoint<S> {
    Vertex(VertexId),
    Interior { edge: EdgeId, t: S },
}

impl<S: Scalar> GraphPoint<S> {
    pub fn vertex(v: VertexId) -> Self {
        GraphPoint::Vertex(v)
    }

    /// Deterministic ordering key: vertices first by id, then (edge, t).
    pub fn sort_key(&self) -> (usize, usize, f64) {
        match self {
            GraphPoint::Vertex(v) => (0, v.0, 0.0),
            GraphPoint::Interior { edge, t } => (1, edge.0, t.to_f64()),
        }
    }

    pub fn close_to(&self, other: &Self) -> bool {
        match (self, other) {
            (GraphPoint::Vertex(a), GraphPoint::Vertex(b)) => a == b,
            (
                GraphPoint::Interior { edge: e1, t: t1 },
                GraphPoint::Interior { edge: e2, t: t2 },
            ) => e1 == e2 && t1.is_close(t2),
            _ => false,
        }
    }
}

/// Violations reported by [`MetricGraph::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveLength { edge: String },
    EmptyBoundary,
    NoEdges,
    IsolatedBoundaryVertex { vertex: String },
    GraphDisconnected,
    DomainDisconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveLength { edge } => {
                write!(f, "edge {edge} has nonpositive length")
            }
            Violation::EmptyBoundary => write!(f, "boundary vertex set is empty"),
            Violation::NoEdges => write!(f, "graph has no edges"),
            Violation::IsolatedBoundaryVertex { vertex } => {
                write!(f, "boundary vertex {vertex} has degree 0")
            }
            Violation::GraphDisconnected => write!(f, "graph is not connected"),
            Violation::DomainDisconnected => {
                write!(f, "domain (complement of the boundary) is not connected")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph<S> {
    vertices: Vec<String>,
    edges: Vec<Edge<S>>,
    boundary: Vec<bool>,
    incidence: Vec<Vec<(EdgeId, EdgeEnd)>>,
}

impl<S: Scalar> MetricGraph<S> {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String, S)>,
        boundary: Vec<String>,
    ) -> Result<Self, GraphError> {
        let mut index = HashMap::new();
        for (i, name) in vertices.iter().enumerate() {
            if index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let mut edge_names = HashMap::new();
        let mut built = Vec::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, (name, from, to, length)) in edges.into_iter().enumerate() {
            if edge_names.insert(name.clone(), EdgeId(i)).is_some() {
                return Err(GraphError::DuplicateEdge(name));
            }
            let from = *index
                .get(&from)
                .ok_or_else(|| GraphError::UnknownVertex(from.clone()))?;
            let to = *index
                .get(&to)
                .ok_or_else(|| GraphError::UnknownVertex(to.clone()))?;
            incidence[from.0].push((EdgeId(i), EdgeEnd::Start));
            incidence[to.0].push((EdgeId(i), EdgeEnd::End));
            built.push(Edge {
                name,
                from,
                to,
                length,
            });
        }
        let mut bnd = vec![false; vertices.len()];
        for name in &boundary {
            let v = index
                .get(name)
                .ok_or_else(|| GraphError::UnknownVertex(name.clone()))?;
            bnd[v.0] = true;
        }
        Ok(MetricGraph {
            vertices,
            edges: built,
            boundary: bnd,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }
    pub fn edge(&self, e: EdgeId) -> &Edge<S> {
        &self.edges[e.0]
    }
    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }
    pub fn edge_len(&self, e: EdgeId) -> &S {
        &self.edges[e.0].length
    }
    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary[v.0]
    }
    /// True iff the point is a boundary vertex (edge interiors always belong
    /// to the domain).
    pub fn is_boundary_point(&self, p: &GraphPoint<S>) -> bool {
        matches!(p, GraphPoint::Vertex(v) if self.boundary[v.0])
    }
    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0].len()
    }
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, EdgeEnd)] {
        &self.incidence[v.0]
    }
    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }
    pub fn boundary_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_ids().filter(|v| self.is_boundary(*v))
    }
    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_ids().filter(|v| !self.is_boundary(*v))
    }

    pub fn find_vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertices
            .iter()
            .position(|n| n == name)
            .map(VertexId)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn find_edge(&self, name: &str) -> Result<EdgeId, GraphError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .map(EdgeId)
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    /// Canonicalizes an (edge, parameter) pair into a `GraphPoint`.
    pub fn point(&self, e: EdgeId, t: S) -> Result<GraphPoint<S>, GraphError> {
        let edge = &self.edges[e.0];
        if t.cmp_total(&S::zero()) == Ordering::Less
            || t.cmp_total(&edge.length) == Ordering::Greater
        {
            return Err(GraphError::ParamOutOfRange {
                edge: edge.name.clone(),
                t: t.repr(),
                len: edge.length.repr(),
            });
        }
        if t.is_close(&S::zero()) {
            Ok(GraphPoint::Vertex(edge.from))
        } else if t.is_close(&edge.length) {
            Ok(GraphPoint::Vertex(edge.to))
        } else {
            Ok(GraphPoint::Interior { edge: e, t })
        }
    }

    pub fn describe_point(&self, p: &GraphPoint<S>) -> String {
        match p {
            GraphPoint::Vertex(v) => self.vertex_name(*v).to_string(),
            GraphPoint::Interior { edge, t } => {
                format!("{}:{}", self.edges[edge.0].name, t.repr())
            }
        }
    }

    /// Reports every invariant violation; empty iff the graph is a valid
    /// problem instance.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.length.cmp_total(&S::zero()) != Ordering::Greater {
                out.push(Violation::NonPositiveLength {
                    edge: e.name.clone(),
                });
            }
        }
        if !self.boundary.iter().any(|b| *b) {
            out.push(Violation::EmptyBoundary);
        }
        if self.edges.is_empty() {
            out.push(Violation::NoEdges);
            return out;
        }
        for v in self.boundary_vertices() {
            if self.degree(v) == 0 {
                out.push(Violation::IsolatedBoundaryVertex {
                    vertex: self.vertex_name(v).to_string(),
                });
            }
        }
        if !self.is_connected() {
            out.push(Violation::GraphDisconnected);
        }
        if !self.domain_connected() {
            out.push(Violation::DomainDisconnected);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (e, _) in &self.incidence[v] {
                let edge = &self.edges[e.0];
                for w in [edge.from.0, edge.to.0] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The domain is connected iff all edges lie in one component of the
    /// "edges adjacent through interior vertices" graph. Edge interiors are
    /// always part of the domain, so components are built on edges.
    fn domain_connected(&self) -> bool {
        let n = self.edges.len();
        if n <= 1 {
            return true;
        }
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let r = find(comp, comp[i]);
                comp[i] = r;
            }
            comp[i]
        }
        for v in self.interior_vertices() {
            let inc = &self.incidence[v.0];
            if let Some((first, _)) = inc.first() {
                let a = find(&mut comp, first.0);
                for (e, _) in inc.iter().skip(1) {
                    let b = find(&mut comp, e.0);
                    comp[b] = a;
                }
            }
        }
        let root = find(&mut comp, 0);
        (1..n).all(|i| find(&mut comp, i) == root)
    }

    /// Initial Dijkstra sources for a point: vertex with offset 0, or the two
    /// endpoints of the carrying edge with their arclength offsets.
    pub fn point_sources(&self, p: &GraphPoint<S>) -> Vec<(VertexId, S)> {
        match p {
            GraphPoint::Vertex(v) => vec![(*v, S::zero())],
            GraphPoint::Interior { edge, t } => {
                let e = &self.edges[edge.0];
                vec![
                    (e.from, t.clone()),
                    (e.to, e.length.clone() - t.clone()),
                ]
            }
        }
    }

    /// Multi-source Dijkstra returning, per vertex, `min_k (offset_k + scale *
    /// d(source_k, v))`. Sources may carry arbitrary (even negative) offsets;
    /// edge costs `scale * length` must be nonnegative.
    pub fn vertex_potentials(&self, sources: &[(VertexId, S)], scale: &S) -> Vec<Option<S>> {
        let mut dist: Vec<Option<S>> = vec![None; self.vertices.len()];
        let mut heap: BinaryHeap<HeapItem<S>> = BinaryHeap::new();
        for (v, off) in sources {
            let better = match &dist[v.0] {
                None => true,
                Some(d) => off.cmp_total(d) == Ordering::Less,
            };
            if better {
                dist[v.0] = Some(off.clone());
                heap.push(HeapItem {
                    dist: off.clone(),
                    node: v.0,
                });
            }
        }
        while let Some(HeapItem { dist: d, node }) = heap.pop() {
            match &dist[node] {
                Some(cur) if d.cmp_total(cur) == Ordering::Greater => continue,
                _ => {}
            }
            for (e, _) in &self.incidence[node] {
                let edge = &self.edges[e.0];
                let other = if edge.from.0 == node {
                    edge.to.0
                } else {
                    edge.from.0
                };
                let cand = d.clone() + scale.clone() * edge.length.clone();
                let better = match &dist[other] {
                    None => true,
                    Some(cur) => cand.cmp_total(cur) == Ordering::Less,
                };
                if better {
                    dist[other] = Some(cand.clone());
                    heap.push(HeapItem {
                        dist: cand,
                        node: other,
                    });
                }
                // self-loops relax both endpoints at once (same vertex)
                if edge.from == edge.to {
                    continue;
                }
            }
        }
        dist
    }

    pub fn vertex_distances(&self, sources: &[(VertexId, S)]) -> Vec<Option<S>> {
        self.vertex_potentials(sources, &S::one())
    }

    /// Intrinsic shortest-path distance between two points.
    pub fn point_distance(&self, p: &GraphPoint<S>, q: &GraphPoint<S>) -> Result<S, GraphError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let dist = self.vertex_distances(&self.point_sources(p));
        let mut best: Option<S> = None;
        for (v, off) in self.point_sources(q) {
            if let Some(d) = &dist[v.0] {
                let cand = d.clone() + off;
                best = Some(match best {
                    None => cand,
                    Some(b) => b.min_s(cand),
                });
            }
        }
        // direct same-edge route
        if let (GraphPoint::Interior { edge: e1, t: t1 }, GraphPoint::Interior { edge: e2, t: t2 }) =
            (p, q)
        {
            if e1 == e2 {
                let direct = (t1.clone() - t2.clone()).abs_s();
                best = Some(match best {
                    None => direct,
                    Some(b) => b.min_s(direct),
                });
            }
        }
        best.ok_or(GraphError::Unreachable)
    }

    fn check_point(&self, p: &GraphPoint<S>) -> Result<(), GraphError> {
        match p {
            GraphPoint::Vertex(v) => {
                if v.0 >= self.vertices.len() {
                    return Err(GraphError::ForeignPoint);
                }
            }
            GraphPoint::Interior { edge, t } => {
                if edge.0 >= self.edges.len() {
                    return Err(GraphError::ForeignPoint);
                }
                let len = &self.edges[edge.0].length;
                if t.cmp_total(&S::zero()) == Ordering::Less
                    || t.cmp_total(len) == Ordering::Greater
                {
                    return Err(GraphError::ParamOutOfRange {
                        edge: self.edges[edge.0].name.clone(),
                        t: t.repr(),
                        len: len.repr(),
                    });
                }
            }
        }
        Ok(())
    }
}

struct HeapItem<S> {
    dist: S,
    node: usize,
}

impl<S: Scalar> PartialEq for HeapItem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for HeapItem<S> {}
impl<S: Scalar> PartialOrd for HeapItem<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for HeapItem<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .cmp_total(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rat;
    use crate::builtin::{dumbbell, interval, star3};

    #[test]
    fn dumbbell_is_valid() {
        let g = dumbbell();
        assert!(g.validate().is_empty());
    }

    #[test]
    fn zero_length_edge_is_reported() {
        let g = MetricGraph::new(
            vec!["a".into(), "b".into()],
            vec![("e".into(), "a".into(), "b".into(), Rat::int(0))],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(g
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::NonPositiveLength { .. })));
    }

    #[test]
    fn disjoint_edges_are_reported() {
        let g = MetricGraph::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                ("e1".into(), "a".into(), "b".into(), Rat::int(1)),
                ("e2".into(), "c".into(), "d".into(), Rat::int(1)),
            ],
            vec!["a".into(), "c".into()],
        )
        .unwrap();
        let violations = g.validate();
        assert!(violations.contains(&Violation::GraphDisconnected));
        assert!(violations.contains(&Violation::DomainDisconnected));
    }

    #[test]
    fn domain_disconnects_when_cut_vertex_is_boundary() {
        // two triangles sharing one vertex; the shared vertex as boundary
        // splits the domain even though the space stays connected
        let g = MetricGraph::new(
            vec!["m".into(), "a".into(), "b".into()],
            vec![
                ("e1".into(), "m".into(), "a".into(), Rat::int(1)),
                ("e2".into(), "m".into(), "b".into(), Rat::int(1)),
            ],
            vec!["m".into()],
        )
        .unwrap();
        let violations = g.validate();
        assert!(violations.contains(&Violation::DomainDisconnected));
        assert!(!violations.contains(&Violation::GraphDisconnected));
    }

    #[test]
    fn dumbbell_distances() {
        let g = dumbbell();
        let e_p3 = g.find_edge("e+3").unwrap();
        let o = GraphPoint::vertex(g.find_vertex("O").unwrap());
        let p_plus = g.point(e_p3, Rat::int(1)).unwrap();
        assert_eq!(g.point_distance(&o, &p_plus).unwrap(), Rat::int(2));

        let v2p = GraphPoint::vertex(g.find_vertex("V+2").unwrap());
        let v2m = GraphPoint::vertex(g.find_vertex("V-2").unwrap());
        assert_eq!(g.point_distance(&v2p, &v2m).unwrap(), Rat::int(4));
        assert_eq!(g.point_distance(&o, &o).unwrap(), Rat::int(0));
    }

    #[test]
    fn same_edge_direct_path_wins() {
        let g = interval(Rat::int(10));
        let e = EdgeId(0);
        let p = g.point(e, Rat::int(3)).unwrap();
        let q = g.point(e, Rat::int(4)).unwrap();
        assert_eq!(g.point_distance(&p, &q).unwrap(), Rat::int(1));
    }

    #[test]
    fn self_loop_distances() {
        // one loop of circumference 2 at a single vertex
        let g = MetricGraph::new(
            vec!["a".into()],
            vec![("loop".into(), "a".into(), "a".into(), Rat::int(2))],
            vec!["a".into()],
        )
        .unwrap();
        let e = EdgeId(0);
        let p = g.point(e, Rat::new(3, 10)).unwrap();
        let q = g.point(e, Rat::new(9, 10)).unwrap();
        // direct 0.6 vs through the vertex 0.3 + 1.1 -> direct wins
        assert_eq!(g.point_distance(&p, &q).unwrap(), Rat::new(3, 5));
        let r = g.point(e, Rat::new(19, 10)).unwrap();
        // direct 1.6 vs through the vertex 0.3 + 0.1 = 0.4
        assert_eq!(g.point_distance(&p, &r).unwrap(), Rat::new(2, 5));
    }

    #[test]
    fn endpoint_canonicalization() {
        let g = star3();
        let e = EdgeId(0);
        let p = g.point(e, Rat::int(0)).unwrap();
        assert!(matches!(p, GraphPoint::Vertex(_)));
        let q = g.point(e, Rat::int(1)).unwrap();
        assert!(matches!(q, GraphPoint::Vertex(_)));
        assert!(g.point(e, Rat::int(2)).is_err());
    }
}
