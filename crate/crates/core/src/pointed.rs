//! The pointed graph category: vertex deletions, similarity, and pointed
//! maps stored as compatible families over the elements of the source.
//!
//! A pointed map `G → H` is an edge map commuting with τ together with, for
//! every vertex `v`, either an étale image, a unit (bivalent `v`, with
//! `f(s h₁) = τ f(s h₀)`), or a contracted unit on an edge orbit (isolated
//! `v`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::etale::{hom_search, EtaleMorphism, VertexImage};
use crate::graph::Graph;
use crate::substitution::{substitute, GraphOfGraphs, Piece, XGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMorphism {
    pub source: Graph,
    pub target: Graph,
    pub edges: Vec<usize>,
    pub vertices: Vec<VertexImage>,
}

/// `δ_W`: the deletion of a set of bivalent and isolated vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexDeletion {
    pub source: Graph,
    pub deleted: Vec<usize>,
    pub target: Graph,
    /// Image of every source edge.
    pub edges: Vec<usize>,
    /// Image of every kept vertex.
    pub vertices: Vec<Option<usize>>,
    /// For every deleted isolated vertex, the first edge of the stick it
    /// became.
    pub sticks: BTreeMap<usize, usize>,
}

/// Deletes `w` by substituting a stick at each bivalent vertex and nothing
/// at each isolated one; every isolated vertex then becomes its own stick
/// component, appended after the substitution colimit.
pub fn delete_vertices(g: &Graph, w: &[usize]) -> Result<VertexDeletion> {
    let mut del = vec![false; g.n_vertices()];
    for &v in w {
        if v >= g.n_vertices() {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        if g.valency(v) != 0 && g.valency(v) != 2 {
            return Err(Error::NotDeletable(g.vertex_name(v).to_string()));
        }
        del[v] = true;
    }
    let pieces = (0..g.n_vertices())
        .map(|v| match (del[v], g.valency(v)) {
            (false, n) => Piece::corolla(n),
            (true, 2) => Piece::stick(),
            (true, _) => Piece { graph: Graph::empty(), ports: vec![] },
        })
        .collect();
    let gg = GraphOfGraphs::new(g.clone(), pieces)?;
    let sub = substitute(&gg)?;
    let mut target = sub.graph.clone();
    let mut sticks = BTreeMap::new();
    for v in 0..g.n_vertices() {
        if del[v] && g.valency(v) == 0 {
            sticks.insert(v, target.n_edges());
            target = target.disjoint_union(&Graph::stick());
        }
    }
    let mut vertices = vec![None; g.n_vertices()];
    for (i, &(v, _)) in sub.vertex_origin.iter().enumerate() {
        vertices[v] = Some(i);
    }
    let mut deleted: Vec<usize> = (0..g.n_vertices()).filter(|&v| del[v]).collect();
    deleted.dedup();
    Ok(VertexDeletion { source: g.clone(), deleted, target, edges: sub.base_edges, vertices, sticks })
}

impl VertexDeletion {
    pub fn as_pointed(&self) -> PointedMorphism {
        let g = &self.source;
        let vertices = (0..g.n_vertices())
            .map(|v| match self.vertices[v] {
                Some(w) => VertexImage::Vertex(w),
                None if g.valency(v) == 2 => VertexImage::Unit,
                None => VertexImage::Zero(self.sticks[&v]),
            })
            .collect();
        PointedMorphism { source: g.clone(), target: self.target.clone(), edges: self.edges.clone(), vertices }
    }

    /// Ports of the source go to ports of the target.
    pub fn port_map(&self) -> Vec<(usize, usize)> {
        self.source.ports().into_iter().map(|e| (e, self.edges[e])).collect()
    }
}

/// `κ^m: W^m → (∣)`, the deletion of every vertex of the wheel.
pub fn kappa(m: usize) -> Result<VertexDeletion> {
    let w = Graph::wheel(m)?;
    let all: Vec<usize> = (0..m).collect();
    delete_vertices(&w, &all)
}

/// `u^k: L^k → (∣)`.
pub fn line_unit(k: usize) -> VertexDeletion {
    let l = Graph::line(k);
    delete_vertices(&l, &(0..k).collect::<Vec<_>>()).expect("line vertices are bivalent")
}

/// Deletes every bivalent and isolated vertex, carrying the port labels.
pub fn similarity_terminal(x: &XGraph) -> XGraph {
    let g = &x.graph;
    let w: Vec<usize> = (0..g.n_vertices()).filter(|&v| matches!(g.valency(v), 0 | 2)).collect();
    let d = delete_vertices(g, &w).expect("only deletable vertices chosen");
    let labels = x.labels.iter().map(|(&e, &l)| (d.edges[e], l)).collect();
    XGraph { graph: d.target, labels }
}

impl PointedMorphism {
    pub fn from_etale(f: &EtaleMorphism) -> PointedMorphism {
        PointedMorphism {
            source: f.source.clone(),
            target: f.target.clone(),
            edges: f.edges.clone(),
            vertices: f.vertices.iter().map(|&w| VertexImage::Vertex(w)).collect(),
        }
    }

    pub fn identity(g: &Graph) -> PointedMorphism {
        PointedMorphism::from_etale(&EtaleMorphism::identity(g))
    }

    pub fn validate(&self) -> Result<()> {
        let (g, h) = (&self.source, &self.target);
        if self.edges.len() != g.n_edges() || self.vertices.len() != g.n_vertices() {
            return Err(Error::DanglingId("pointed map is not total".into()));
        }
        if self.edges.iter().any(|&e| e >= h.n_edges()) {
            return Err(Error::DanglingId("pointed map leaves the target".into()));
        }
        for e in 0..g.n_edges() {
            if self.edges[g.tau(e)] != h.tau(self.edges[e]) {
                return Err(Error::NotCommuting(format!("tau at edge {}", g.edge_name(e))));
            }
        }
        for v in 0..g.n_vertices() {
            let slots: Vec<usize> = g.halves_at(v).iter().map(|&x| self.edges[g.s(x)]).collect();
            match &self.vertices[v] {
                VertexImage::Vertex(w) => {
                    if *w >= h.n_vertices() {
                        return Err(Error::UnknownVertex(w.to_string()));
                    }
                    let mut want: Vec<usize> = h.halves_at(*w).iter().map(|&y| h.s(y)).collect();
                    let mut got = slots.clone();
                    want.sort();
                    got.sort();
                    if want != got {
                        return Err(Error::NotLocallyBijective(g.vertex_name(v).to_string()));
                    }
                }
                VertexImage::Unit => {
                    if slots.len() != 2 || slots[1] != h.tau(slots[0]) {
                        return Err(Error::NotDeletable(g.vertex_name(v).to_string()));
                    }
                }
                VertexImage::Zero(e) => {
                    if !slots.is_empty() || *e >= h.n_edges() || *e > h.tau(*e) {
                        return Err(Error::NotDeletable(g.vertex_name(v).to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_etale(&self) -> bool {
        self.vertices.iter().all(|x| matches!(x, VertexImage::Vertex(_)))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PointedMorphism) -> PointedMorphism {
        let k = &other.target;
        let vertices = self
            .vertices
            .iter()
            .map(|x| match x {
                VertexImage::Vertex(w) => other.vertices[*w].clone(),
                VertexImage::Unit => VertexImage::Unit,
                VertexImage::Zero(e) => {
                    let f = other.edges[*e];
                    VertexImage::Zero(f.min(k.tau(f)))
                }
            })
            .collect();
        PointedMorphism {
            source: self.source.clone(),
            target: k.clone(),
            edges: self.edges.iter().map(|&e| other.edges[e]).collect(),
            vertices,
        }
    }

    /// The deleted vertices, in order.
    pub fn deleted(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !matches!(self.vertices[v], VertexImage::Vertex(_))).collect()
    }

    /// Factors as a vertex deletion followed by an étale map.
    pub fn factor(&self) -> Result<(VertexDeletion, EtaleMorphism)> {
        let d = delete_vertices(&self.source, &self.deleted())?;
        let m = &d.target;
        let h = &self.target;
        let mut edges = vec![usize::MAX; m.n_edges()];
        for e in 0..self.source.n_edges() {
            edges[d.edges[e]] = self.edges[e];
        }
        for (&v, &e) in &d.sticks {
            if let VertexImage::Zero(f) = self.vertices[v] {
                edges[e] = f;
                edges[e + 1] = h.tau(f);
            }
        }
        let mut vertices = vec![0; m.n_vertices()];
        for v in 0..self.source.n_vertices() {
            if let (Some(i), VertexImage::Vertex(w)) = (d.vertices[v], &self.vertices[v]) {
                vertices[i] = *w;
            }
        }
        let halves = (0..m.n_halves()).map(|x| h.half_of(edges[m.s(x)]).unwrap()).collect();
        let f = crate::etale::check_etale(m, h, edges, halves, vertices)?;
        Ok((d, f))
    }
}

/// Every pointed map `g → h`.
pub fn hom_pointed(g: &Graph, h: &Graph) -> Result<Vec<PointedMorphism>> {
    let data = hom_search(g, h, true, crate::max_search())?;
    Ok(data
        .into_iter()
        .map(|d| PointedMorphism { source: g.clone(), target: h.clone(), edges: d.edges, vertices: d.vertices })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;

    #[test]
    fn deletions() {
        let s = Graph::stick();
        for k in 1..4 {
            assert!(is_isomorphic(&line_unit(k).target, &s).is_some());
        }
        let k1 = kappa(1).unwrap();
        assert!(is_isomorphic(&k1.target, &s).is_some());
        assert_eq!(k1.edges, vec![0, 1]);
        let k3 = kappa(3).unwrap();
        assert_eq!(k3.edges, vec![0, 1, 0, 1, 0, 1]);
        let z = delete_vertices(&Graph::isolated(), &[0]).unwrap();
        assert!(is_isomorphic(&z.target, &s).is_some());
        let c3 = Graph::corolla_n(3);
        assert!(matches!(delete_vertices(&c3, &[0]), Err(Error::NotDeletable(_))));
        for d in [line_unit(2), k3, z] {
            assert!(d.as_pointed().validate().is_ok());
        }
    }

    #[test]
    fn pointed_counts() {
        let s = Graph::stick();
        let w = Graph::wheel(1).unwrap();
        assert_eq!(hom_pointed(&w, &s).unwrap().len(), 2);
        assert_eq!(hom_pointed(&Graph::isolated(), &s).unwrap().len(), 1);
        assert_eq!(hom_pointed(&s, &w).unwrap().len(), 2);
    }

    #[test]
    fn factorisation_recomposes() {
        let g = Graph::line(2);
        let h = Graph::wheel(2).unwrap();
        for f in hom_pointed(&g, &h).unwrap() {
            f.validate().unwrap();
            let (d, e) = f.factor().unwrap();
            assert_eq!(d.as_pointed().then(&PointedMorphism::from_etale(&e)), f);
        }
    }

    #[test]
    fn terminal_objects() {
        let w3 = XGraph { graph: Graph::wheel(3).unwrap(), labels: BTreeMap::new() };
        assert!(is_isomorphic(&similarity_terminal(&w3).graph, &Graph::stick()).is_some());
        let c3 = Graph::corolla_n(3);
        let x = XGraph { graph: c3.clone(), labels: (0..3).map(|i| (i, i)).collect() };
        assert_eq!(similarity_terminal(&x), x);
    }
}
