//! Kleisli morphisms of the graphical category, nerves of finite circuit
//! algebras and the Segal condition for presheaves on a finite corpus.
//!
//! A Kleisli morphism `G → H` is a nondegenerate graph of graphs `Γ` on `G`
//! followed by a pointed map `Γ(G) → H`. Restriction along it pulls a
//! decoration of `H` back to `Γ(G)` (inserting `ε` and `ζ ε` at deleted
//! vertices) and then evaluates the algebra on each piece.

use std::collections::{BTreeMap, HashMap};

use crate::canon;
use crate::circuit::CircuitAlgebra;
use crate::error::{Error, Result};
use crate::etale::{ch_edge, etale_maps, vertex_neighbourhood, EtaleMorphism, VertexImage};
use crate::graph::Graph;
use crate::pointed::{delete_vertices, PointedMorphism};
use crate::report::{Check, Report};
use crate::species::{evaluate_species, Decoration};
use crate::substitution::{compose_nested, substitute, EdgeOrigin, GraphOfGraphs, Piece, Substitution};

/// Same ids and incidence; names are ignored.
pub fn same_shape(a: &Graph, b: &Graph) -> bool {
    a.n_vertices() == b.n_vertices() && a.tau_map() == b.tau_map() && a.s_map() == b.s_map() && a.t_map() == b.t_map()
}

/// Every member of every colimit edge class.
fn class_members(gg: &GraphOfGraphs, sub: &Substitution) -> Vec<Vec<EdgeOrigin>> {
    let mut out = vec![Vec::new(); sub.graph.n_edges()];
    for (e, &c) in sub.base_edges.iter().enumerate() {
        out[c].push(EdgeOrigin::Base(e));
    }
    for v in 0..gg.pieces.len() {
        for (p, &c) in sub.piece_edges[v].iter().enumerate() {
            out[c].push(EdgeOrigin::Piece(v, p));
        }
    }
    out
}

/// Builds an edge map out of a colimit by resolving some member of each
/// class.
fn edges_via_members(
    gg: &GraphOfGraphs,
    sub: &Substitution,
    resolve: &dyn Fn(&EdgeOrigin) -> Option<usize>,
) -> Result<Vec<usize>> {
    class_members(gg, sub)
        .iter()
        .enumerate()
        .map(|(c, ms)| {
            ms.iter()
                .find_map(resolve)
                .ok_or_else(|| Error::Mismatch(format!("no image for colimit edge {c}")))
        })
        .collect()
}

fn norm_zero(h: &Graph, e: usize) -> VertexImage {
    VertexImage::Zero(e.min(h.tau(e)))
}

#[derive(Clone, Debug)]
pub struct KleisliMorphism {
    pub source: Graph,
    pub target: Graph,
    pub refinement: GraphOfGraphs,
    pub tail: PointedMorphism,
}

impl KleisliMorphism {
    pub fn new(refinement: GraphOfGraphs, tail: PointedMorphism) -> Result<KleisliMorphism> {
        if !refinement.is_nondegenerate() {
            return Err(Error::InvalidGraphOfGraphs("refinement has a stick piece".into()));
        }
        let sub = substitute(&refinement)?;
        if !same_shape(&sub.graph, &tail.source) {
            return Err(Error::Mismatch("tail does not start at the refinement colimit".into()));
        }
        tail.validate()?;
        Ok(KleisliMorphism { source: refinement.base.clone(), target: tail.target.clone(), refinement, tail })
    }

    /// A pointed map, with the identity refinement.
    pub fn from_pointed(f: &PointedMorphism) -> Result<KleisliMorphism> {
        let gg = GraphOfGraphs::identity(&f.source);
        let sub = substitute(&gg)?;
        let edges = edges_via_members(&gg, &sub, &|m| match m {
            EdgeOrigin::Base(a) => Some(f.edges[*a]),
            _ => None,
        })?;
        let vertices = sub.vertex_origin.iter().map(|&(v, _)| f.vertices[v].clone()).collect();
        let tail = PointedMorphism { source: sub.graph.clone(), target: f.target.clone(), edges, vertices };
        KleisliMorphism::new(gg, tail)
    }

    pub fn from_etale(f: &EtaleMorphism) -> Result<KleisliMorphism> {
        KleisliMorphism::from_pointed(&PointedMorphism::from_etale(f))
    }

    pub fn identity(g: &Graph) -> KleisliMorphism {
        KleisliMorphism::from_pointed(&PointedMorphism::identity(g)).expect("identity is valid")
    }

    /// `[Γ]: G → Γ(G)`.
    pub fn refinement_of(gg: &GraphOfGraphs) -> Result<KleisliMorphism> {
        let sub = substitute(gg)?;
        KleisliMorphism::new(gg.clone(), PointedMorphism::identity(&sub.graph))
    }

    /// The refinement of the corolla on the ports of `g` (in id order) by `g`,
    /// landing on `g` itself.
    pub fn corolla_refinement(g: &Graph) -> Result<KleisliMorphism> {
        let ports = g.ports();
        let gg = GraphOfGraphs::new(
            Graph::corolla_n(ports.len()),
            vec![Piece { graph: g.clone(), ports }],
        )?;
        let sub = substitute(&gg)?;
        let edges = edges_via_members(&gg, &sub, &|m| match m {
            EdgeOrigin::Piece(0, p) => Some(*p),
            _ => None,
        })?;
        let vertices = sub.vertex_origin.iter().map(|&(_, x)| VertexImage::Vertex(x)).collect();
        let tail = PointedMorphism { source: sub.graph.clone(), target: g.clone(), edges, vertices };
        KleisliMorphism::new(gg, tail)
    }

    /// Accepts a refinement whose pieces may be sticks; each stick piece is
    /// replaced by the corolla and its vertex deleted in the tail.
    pub fn from_degenerate(gg: &GraphOfGraphs, tail: &PointedMorphism) -> Result<KleisliMorphism> {
        let sub = substitute(gg)?;
        if !same_shape(&sub.graph, &tail.source) {
            return Err(Error::Mismatch("tail does not start at the refinement colimit".into()));
        }
        let is_stick = |p: &Piece| p.graph.n_vertices() == 0 && p.graph.n_edges() == 2;
        let mut pieces = gg.pieces.clone();
        for (v, p) in pieces.iter_mut().enumerate() {
            if is_stick(p) {
                *p = Piece::corolla(gg.base.valency(v));
            } else if p.graph.stick_count() > 0 {
                return Err(Error::InvalidGraphOfGraphs("piece mixes sticks with vertices".into()));
            }
        }
        let gg2 = GraphOfGraphs::new(gg.base.clone(), pieces)?;
        let sub2 = substitute(&gg2)?;
        let edges = edges_via_members(&gg2, &sub2, &|m| match m {
            EdgeOrigin::Base(a) => Some(tail.edges[sub.base_edges[*a]]),
            EdgeOrigin::Piece(v, p) if !is_stick(&gg.pieces[*v]) => Some(tail.edges[sub.piece_edges[*v][*p]]),
            _ => None,
        })?;
        let vertices = sub2
            .vertex_origin
            .iter()
            .map(|&(v, x)| {
                if is_stick(&gg.pieces[v]) {
                    VertexImage::Unit
                } else {
                    tail.vertices[sub.vertex_offset[v] + x].clone()
                }
            })
            .collect();
        let t2 = PointedMorphism { source: sub2.graph.clone(), target: tail.target.clone(), edges, vertices };
        KleisliMorphism::new(gg2, t2)
    }

    /// Pushes vertex deletions of the tail into the pieces. A piece
    /// component made only of deleted vertices keeps its first vertex.
    pub fn normalise(&self) -> Result<KleisliMorphism> {
        let gg = &self.refinement;
        let sub = substitute(gg)?;
        let mut pieces = Vec::new();
        let mut dels = Vec::new();
        for (v, p) in gg.pieces.iter().enumerate() {
            let g = &p.graph;
            let deleted = |x: usize| !matches!(self.tail.vertices[sub.vertex_offset[v] + x], VertexImage::Vertex(_));
            let mut w = Vec::new();
            for (_, inc) in g.connected_components() {
                let all = inc.vertices.iter().all(|&x| deleted(x));
                let skip = if all { 1 } else { 0 };
                w.extend(inc.vertices.iter().copied().filter(|&x| deleted(x)).skip(skip));
            }
            w.sort();
            let d = delete_vertices(g, &w)?;
            pieces.push(Piece { graph: d.target.clone(), ports: p.ports.iter().map(|&e| d.edges[e]).collect() });
            dels.push(d);
        }
        let gg2 = GraphOfGraphs::new(gg.base.clone(), pieces)?;
        let sub2 = substitute(&gg2)?;
        let pre: Vec<Vec<usize>> = dels
            .iter()
            .map(|d| {
                let mut inv = vec![usize::MAX; d.target.n_edges()];
                for (e, &f) in d.edges.iter().enumerate() {
                    if inv[f] == usize::MAX {
                        inv[f] = e;
                    }
                }
                inv
            })
            .collect();
        let edges = edges_via_members(&gg2, &sub2, &|m| match m {
            EdgeOrigin::Base(a) => Some(self.tail.edges[sub.base_edges[*a]]),
            EdgeOrigin::Piece(v, p) => Some(self.tail.edges[sub.piece_edges[*v][pre[*v][*p]]]),
        })?;
        let vertices = sub2
            .vertex_origin
            .iter()
            .map(|&(v, x2)| {
                let x = dels[v].vertices.iter().position(|&y| y == Some(x2)).unwrap();
                self.tail.vertices[sub.vertex_offset[v] + x].clone()
            })
            .collect();
        let tail = PointedMorphism { source: sub2.graph.clone(), target: self.target.clone(), edges, vertices };
        KleisliMorphism::new(gg2, tail)
    }
}

/// `g ∘ f`.
pub fn kleisli_compose(g: &KleisliMorphism, f: &KleisliMorphism) -> Result<KleisliMorphism> {
    if !same_shape(&f.target, &g.source) {
        return Err(Error::Mismatch("target of the first is not the source of the second".into()));
    }
    let (gf, gg) = (&f.refinement, &g.refinement);
    let m_sub = substitute(gf)?;
    let k_sub = substitute(gg)?;
    let m = &m_sub.graph;
    let b = &f.target;
    // pieces over the colimit of f, pulled back along its tail
    let mut q: Vec<Piece> = Vec::new();
    for u in 0..m.n_vertices() {
        q.push(match f.tail.vertices[u] {
            VertexImage::Vertex(w) => {
                let bs: Vec<usize> = b.halves_at(w).iter().map(|&y| b.s(y)).collect();
                let ports = m
                    .halves_at(u)
                    .iter()
                    .map(|&h| {
                        let j = bs.iter().position(|&e| e == f.tail.edges[m.s(h)]).unwrap();
                        gg.pieces[w].ports[j]
                    })
                    .collect();
                Piece { graph: gg.pieces[w].graph.clone(), ports }
            }
            _ => Piece::corolla(m.valency(u)),
        });
    }
    let inner: Vec<GraphOfGraphs> = (0..gf.pieces.len())
        .map(|v| {
            let p = &gf.pieces[v].graph;
            let ps = (0..p.n_vertices()).map(|y| q[m_sub.vertex_offset[v] + y].clone()).collect();
            GraphOfGraphs::new(p.clone(), ps)
        })
        .collect::<Result<_>>()?;
    let inner_subs: Vec<Substitution> = inner.iter().map(substitute).collect::<Result<_>>()?;
    let comp = compose_nested(gf, &inner)?;
    let n_sub = substitute(&comp)?;
    let c = &g.target;
    let b_to_c = |e: usize| g.tail.edges[k_sub.base_edges[e]];
    let m_to_c = |e: usize| b_to_c(f.tail.edges[e]);
    let edges = edges_via_members(&comp, &n_sub, &|mem| match mem {
        EdgeOrigin::Base(a) => Some(m_to_c(m_sub.base_edges[*a])),
        EdgeOrigin::Piece(v, r) => {
            let isub = &inner_subs[*v];
            let members = class_members(&inner[*v], isub);
            members[*r].iter().find_map(|im| match im {
                EdgeOrigin::Base(p) => Some(m_to_c(m_sub.piece_edges[*v][*p])),
                EdgeOrigin::Piece(y, qe) => {
                    let u = m_sub.vertex_offset[*v] + y;
                    match f.tail.vertices[u] {
                        VertexImage::Vertex(w) => Some(g.tail.edges[k_sub.piece_edges[w][*qe]]),
                        _ => None,
                    }
                }
            })
        }
    })?;
    let vertices = n_sub
        .vertex_origin
        .iter()
        .map(|&(v, x)| {
            let (y, z) = inner_subs[v].vertex_origin[x];
            let u = m_sub.vertex_offset[v] + y;
            match &f.tail.vertices[u] {
                VertexImage::Vertex(w) => g.tail.vertices[k_sub.vertex_offset[*w] + z].clone(),
                VertexImage::Unit => VertexImage::Unit,
                VertexImage::Zero(e) => norm_zero(c, b_to_c(*e)),
            }
        })
        .collect();
    let tail = PointedMorphism { source: n_sub.graph.clone(), target: c.clone(), edges, vertices };
    KleisliMorphism::new(comp, tail)?.normalise()
}

/// Port-preserving isomorphisms between two pieces.
fn piece_isos(a: &Piece, b: &Piece) -> Result<Vec<EtaleMorphism>> {
    let (g, h) = (&a.graph, &b.graph);
    if g.n_edges() != h.n_edges() || g.n_vertices() != h.n_vertices() || a.ports.len() != b.ports.len() {
        return Ok(Vec::new());
    }
    if g.n_vertices() == 0 {
        // empty, or sticks (excluded by nondegeneracy)
        return Ok(vec![EtaleMorphism::identity(g)]);
    }
    Ok(etale_maps(g, h)?
        .into_iter()
        .filter(|f| {
            let mut seen = vec![false; h.n_edges()];
            f.edges.iter().all(|&e| !std::mem::replace(&mut seen[e], true))
                && a.ports.iter().zip(&b.ports).all(|(&p, &q)| f.edges[p] == q)
        })
        .collect())
}

/// Whether two representatives name the same morphism: after
/// normalisation, some family of port-preserving piece isomorphisms
/// carries one tail onto the other.
pub fn kleisli_equal(a: &KleisliMorphism, b: &KleisliMorphism) -> Result<bool> {
    if !same_shape(&a.source, &b.source) || !same_shape(&a.target, &b.target) {
        return Ok(false);
    }
    let a = a.normalise()?;
    let b = b.normalise()?;
    let (ga, gb) = (&a.refinement, &b.refinement);
    let sa = substitute(ga)?;
    let sb = substitute(gb)?;
    let mut choices = Vec::new();
    for v in 0..ga.pieces.len() {
        let isos = piece_isos(&ga.pieces[v], &gb.pieces[v])?;
        if isos.is_empty() {
            return Ok(false);
        }
        choices.push(isos);
    }
    let mut pick = vec![0; choices.len()];
    loop {
        let edges = edges_via_members(ga, &sa, &|m| match m {
            EdgeOrigin::Base(x) => Some(sb.base_edges[*x]),
            EdgeOrigin::Piece(v, p) => Some(sb.piece_edges[*v][choices[*v][pick[*v]].edges[*p]]),
        })?;
        let vmap: Vec<usize> = sa
            .vertex_origin
            .iter()
            .map(|&(v, x)| sb.vertex_offset[v] + choices[v][pick[v]].vertices[x])
            .collect();
        let same_edges = (0..edges.len()).all(|e| a.tail.edges[e] == b.tail.edges[edges[e]]);
        let same_vertices = (0..vmap.len()).all(|x| a.tail.vertices[x] == b.tail.vertices[vmap[x]]);
        if same_edges && same_vertices {
            return Ok(true);
        }
        // next combination
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(false);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// An element of the algebra whose positions carry labels.
struct Labelled {
    n: usize,
    a: usize,
    labels: Vec<usize>,
}

/// Pulls a decoration of the target back to the source. `None` when the
/// algebra table lacks a needed entry.
pub fn restrict(ca: &CircuitAlgebra, k: &KleisliMorphism, d: &Decoration) -> Result<Option<Decoration>> {
    let s = &ca.species;
    let (n_graph, h) = (&k.tail.source, &k.target);
    let col: Vec<usize> = k.tail.edges.iter().map(|&e| d.edge_colours[e]).collect();
    let mut elts = Vec::new();
    for x in 0..n_graph.n_vertices() {
        let e = match &k.tail.vertices[x] {
            VertexImage::Vertex(w) => {
                let hs: Vec<usize> = h.halves_at(*w).iter().map(|&y| h.s(y)).collect();
                let sigma: Vec<usize> = n_graph
                    .halves_at(x)
                    .iter()
                    .map(|&hx| hs.iter().position(|&e| e == k.tail.edges[n_graph.s(hx)]).unwrap())
                    .collect();
                Some(s.act(sigma.len(), d.vertex_elements[*w], &sigma))
            }
            VertexImage::Unit => {
                let h0 = n_graph.halves_at(x)[0];
                ca.eps[col[n_graph.tau(n_graph.s(h0))]]
            }
            VertexImage::Zero(e) => ca.eps[d.edge_colours[*e]].and_then(|u| ca.contract(2, 0, 1, u)),
        };
        match e {
            Some(e) => elts.push(e),
            None => return Ok(None),
        }
    }
    let gg = &k.refinement;
    let sub = substitute(gg)?;
    let mut vertex_elements = Vec::new();
    for (v, piece) in gg.pieces.iter().enumerate() {
        let p = &piece.graph;
        let mut acc: Option<Labelled> = None;
        for x in 0..p.n_vertices() {
            let lab: Vec<usize> = p.halves_at(x).iter().map(|&hh| p.tau(p.s(hh))).collect();
            let a = elts[sub.vertex_offset[v] + x];
            acc = Some(match acc {
                None => Labelled { n: lab.len(), a, labels: lab },
                Some(l) => {
                    let Some(r) = ca.boxed(l.n, l.a, lab.len(), a) else { return Ok(None) };
                    let mut labels = l.labels;
                    labels.extend(lab);
                    Labelled { n: labels.len(), a: r, labels }
                }
            });
        }
        let mut l = match acc {
            Some(l) => l,
            None => match ca.unit {
                Some(u) => Labelled { n: 0, a: u, labels: vec![] },
                None => return Ok(None),
            },
        };
        while let Some((i, j)) = inner_pair(p, &l.labels) {
            let Some(r) = ca.contract(l.n, i, j, l.a) else { return Ok(None) };
            l.labels.remove(j);
            l.labels.remove(i);
            l = Labelled { n: l.n - 2, a: r, labels: l.labels };
        }
        let sigma: Vec<usize> =
            piece.ports.iter().map(|port| l.labels.iter().position(|x| x == port).unwrap()).collect();
        vertex_elements.push(s.act(l.n, l.a, &sigma));
    }
    let edge_colours = (0..k.source.n_edges()).map(|e| col[sub.base_edges[e]]).collect();
    Ok(Some(Decoration { edge_colours, vertex_elements }))
}

fn inner_pair(p: &Graph, labels: &[usize]) -> Option<(usize, usize)> {
    for i in 0..labels.len() {
        if p.is_port(labels[i]) {
            continue;
        }
        let j = labels.iter().position(|&y| y == p.tau(labels[i])).unwrap();
        return Some((i.min(j), i.max(j)));
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// `ch_e: (∣) → G`
    Ch(usize),
    /// The neighbourhood of a vertex, `C_n → G`.
    Nbhd(usize),
    /// An isomorphism, by its edge map.
    Iso(Vec<usize>),
    Refinement,
    Deletion(Vec<usize>),
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Ch(_) => "ch",
            MapKind::Nbhd(_) => "nbhd",
            MapKind::Iso(_) => "iso",
            MapKind::Refinement => "refinement",
            MapKind::Deletion(_) => "deletion",
        }
    }
}

/// The restriction along a morphism `source → target`: `map[y]` is the
/// element of `P(source)` that `y ∈ P(target)` restricts to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMap {
    pub kind: MapKind,
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresheaf {
    pub names: Vec<String>,
    pub graphs: Vec<Graph>,
    pub sets: Vec<Vec<String>>,
    pub morphisms: Vec<PresheafMap>,
}

impl FinitePresheaf {
    pub fn validate(&self) -> Result<()> {
        if self.names.len() != self.graphs.len() || self.sets.len() != self.graphs.len() {
            return Err(Error::Parse("corpus, names and sets differ in length".into()));
        }
        for m in &self.morphisms {
            if m.source >= self.graphs.len() || m.target >= self.graphs.len() {
                return Err(Error::DanglingId(format!("{} map between unknown graphs", m.kind.name())));
            }
            if m.map.len() != self.sets[m.target].len() || m.map.iter().any(|&x| x >= self.sets[m.source].len()) {
                return Err(Error::DanglingId(format!(
                    "{} map {} → {} is not a function",
                    m.kind.name(),
                    self.names[m.target],
                    self.names[m.source]
                )));
            }
        }
        Ok(())
    }

    pub fn find(&self, kind: &MapKind, source: usize, target: usize) -> Option<&PresheafMap> {
        self.morphisms.iter().find(|m| &m.kind == kind && m.source == source && m.target == target)
    }

    fn stick_index(&self) -> Option<usize> {
        self.graphs.iter().position(|g| same_shape(g, &Graph::stick()))
    }

    fn corolla_index(&self, n: usize) -> Option<usize> {
        let c = Graph::corolla_n(n);
        self.graphs.iter().position(|g| same_shape(g, &c))
    }
}

/// The maps from `P(G)` to the elements of `G` used by the limit.
struct Restrictions<'a> {
    stick: usize,
    tau: &'a [usize],
    corollas: Vec<usize>,
    ch: Vec<&'a [usize]>,
    nbhd: Vec<&'a [usize]>,
}

fn restrictions<'a>(p: &'a FinitePresheaf, gi: usize) -> Result<Restrictions<'a>> {
    let g = &p.graphs[gi];
    let name = &p.names[gi];
    let missing = |what: String| Error::CorpusNotElementClosed(format!("{name}: {what}"));
    let stick = p.stick_index().ok_or_else(|| missing("the stick is not in the corpus".into()))?;
    let tau = p
        .find(&MapKind::Iso(vec![1, 0]), stick, stick)
        .ok_or_else(|| missing("no restriction along τ on the stick".into()))?;
    let mut corollas = Vec::new();
    let mut nbhd = Vec::new();
    for v in 0..g.n_vertices() {
        let n = g.valency(v);
        let c = p.corolla_index(n).ok_or_else(|| missing(format!("corolla C{n} is not in the corpus")))?;
        corollas.push(c);
        let m = p.find(&MapKind::Nbhd(v), c, gi).ok_or_else(|| missing(format!("no restriction to vertex {v}")))?;
        nbhd.push(&m.map[..]);
    }
    let mut ch = Vec::new();
    for e in 0..g.n_edges() {
        let m = p.find(&MapKind::Ch(e), stick, gi).ok_or_else(|| missing(format!("no restriction to edge {e}")))?;
        ch.push(&m.map[..]);
    }
    Ok(Restrictions { stick, tau: &tau.map, corollas, ch, nbhd })
}

/// The family of restrictions of `x ∈ P(G)`: edges first, then vertices.
fn family(r: &Restrictions, x: usize) -> Vec<usize> {
    r.ch.iter().map(|m| m[x]).chain(r.nbhd.iter().map(|m| m[x])).collect()
}

/// Every compatible family over the elements of `G`.
fn compatible_families(p: &FinitePresheaf, gi: usize, r: &Restrictions, limit: usize) -> Result<Vec<Vec<usize>>> {
    let g = &p.graphs[gi];
    let ne = g.n_edges();
    let mut chy: Vec<Vec<&[usize]>> = Vec::new();
    for v in 0..g.n_vertices() {
        let c = r.corollas[v];
        let rc = restrictions(p, c)?;
        chy.push(rc.ch.clone());
    }
    let mut out = Vec::new();
    let mut x: Vec<Option<usize>> = vec![None; ne];
    let mut y = Vec::new();
    fn rec(
        p: &FinitePresheaf,
        g: &Graph,
        r: &Restrictions,
        chy: &[Vec<&[usize]>],
        v: usize,
        x: &mut Vec<Option<usize>>,
        y: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<()> {
        if out.len() > limit {
            return Err(Error::BoundsTooLarge("too many compatible families".into()));
        }
        if v == g.n_vertices() {
            free_sticks(p, g, r, 0, x, y, out);
            return Ok(());
        }
        let nb = vertex_neighbourhood(g, v)?.underlying;
        for b in 0..p.sets[r.corollas[v]].len() {
            let mut log = Vec::new();
            let mut ok = true;
            for (yy, m) in chy[v].iter().enumerate() {
                let e = nb.edges[yy];
                let val = m[b];
                match x[e] {
                    Some(z) if z != val => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        x[e] = Some(val);
                        log.push(e);
                    }
                }
            }
            if ok {
                y.push(b);
                rec(p, g, r, chy, v + 1, x, y, out, limit)?;
                y.pop();
            }
            for e in log {
                x[e] = None;
            }
        }
        Ok(())
    }
    fn free_sticks(
        p: &FinitePresheaf,
        g: &Graph,
        r: &Restrictions,
        from: usize,
        x: &mut Vec<Option<usize>>,
        y: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        match (from..g.n_edges()).find(|&e| x[e].is_none()) {
            None => {
                let xs: Vec<usize> = x.iter().map(|c| c.unwrap()).collect();
                if (0..g.n_edges()).all(|e| r.tau[xs[e]] == xs[g.tau(e)]) {
                    out.push(xs.into_iter().chain(y.iter().copied()).collect());
                }
            }
            Some(e) => {
                for c in 0..p.sets[r.stick].len() {
                    x[e] = Some(c);
                    let te = g.tau(e);
                    let set_t = x[te].is_none();
                    if set_t {
                        x[te] = Some(r.tau[c]);
                    }
                    free_sticks(p, g, r, e + 1, x, y, out);
                    if set_t {
                        x[te] = None;
                    }
                    x[e] = None;
                }
            }
        }
    }
    rec(p, g, r, &chy, 0, &mut x, &mut y, &mut out, limit)?;
    Ok(out)
}

/// Compares every `P(G)` with the limit of `P` over the elements of `G`.
pub fn check_segal(p: &FinitePresheaf) -> Result<Report> {
    p.validate()?;
    let mut report = Report::new("Segal condition");
    report.notes.push(format!("corpus: {}", p.names.join(", ")));
    let mut functorial = Check::new("functoriality");
    let mut compatible = Check::new("restrictions_compatible");
    let mut injective = Check::new("injective");
    let mut surjective = Check::new("surjective");
    for gi in 0..p.graphs.len() {
        let g = &p.graphs[gi];
        let name = &p.names[gi];
        let r = restrictions(p, gi)?;
        // ch_y then the neighbourhood is ch of the image edge; τ then ch_e is ch_{τe}
        for v in 0..g.n_vertices() {
            let nb = vertex_neighbourhood(g, v)?.underlying;
            let rc = restrictions(p, r.corollas[v])?;
            for (yy, m) in rc.ch.iter().enumerate() {
                for x in 0..p.sets[gi].len() {
                    let ok = m[r.nbhd[v][x]] == r.ch[nb.edges[yy]][x];
                    functorial.record(Some(ok), || {
                        format!("{name}: element {} at vertex {v}, corolla edge {yy}", p.sets[gi][x])
                    });
                }
            }
        }
        for e in 0..g.n_edges() {
            for x in 0..p.sets[gi].len() {
                let ok = r.tau[r.ch[e][x]] == r.ch[g.tau(e)][x];
                functorial.record(Some(ok), || format!("{name}: element {} along τ at edge {e}", p.sets[gi][x]));
            }
        }
        let fams = compatible_families(p, gi, &r, crate::max_search())?;
        let index: HashMap<&Vec<usize>, usize> = fams.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut hit: Vec<Option<usize>> = vec![None; fams.len()];
        for x in 0..p.sets[gi].len() {
            let f = family(&r, x);
            match index.get(&f) {
                None => compatible.record(Some(false), || {
                    format!("{name}: element {} restricts to an incompatible family", p.sets[gi][x])
                }),
                Some(&i) => {
                    compatible.record(Some(true), String::new);
                    let prev = hit[i].replace(x);
                    injective.record(Some(prev.is_none()), || {
                        format!(
                            "{name}: elements {} and {} have the same restrictions",
                            p.sets[gi][prev.unwrap()],
                            p.sets[gi][x]
                        )
                    });
                }
            }
        }
        for (i, h) in hit.iter().enumerate() {
            surjective.record(Some(h.is_some()), || {
                let f: Vec<String> = fams[i]
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| {
                        let set = if k < g.n_edges() { r.stick } else { r.corollas[k - g.n_edges()] };
                        p.sets[set][z].clone()
                    })
                    .collect();
                format!("{name}: compatible family [{}] has no element", f.join(", "))
            });
        }
    }
    report.checks.extend([functorial, compatible, injective, surjective]);
    Ok(report)
}

/// Text form of a decoration.
pub fn render_decoration(ca: &CircuitAlgebra, g: &Graph, d: &Decoration) -> String {
    let s = &ca.species;
    let verts: Vec<String> = (0..g.n_vertices()).map(|v| s.names[g.valency(v)][d.vertex_elements[v]].clone()).collect();
    let cols: Vec<String> = d.edge_colours.iter().map(|&c| s.palette.names[c].clone()).collect();
    format!("{}|{}", verts.join(","), cols.join(","))
}

/// Every subset of `w`, smallest first, excluding the empty one.
fn subsets(w: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..(1 << w.len()))
        .map(|m| w.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect();
    out.sort_by_key(|x| (x.len(), x.clone()));
    out
}

/// The nerve of `ca` on `corpus`: decorations as object sets, with
/// restrictions along every `ch_e`, every neighbourhood, `τ` on the stick,
/// the adjacent transpositions of each corolla, the refinement of the
/// corolla by every admissible corpus graph, and every vertex deletion
/// landing in the corpus.
pub fn nerve(ca: &CircuitAlgebra, corpus: &[(String, Graph)]) -> Result<FinitePresheaf> {
    let s = &ca.species;
    let names: Vec<String> = corpus.iter().map(|(n, _)| n.clone()).collect();
    let graphs: Vec<Graph> = corpus.iter().map(|(_, g)| g.clone()).collect();
    let mut decs = Vec::new();
    for g in &graphs {
        decs.push(evaluate_species(s, g, None)?);
    }
    let index: Vec<HashMap<&Decoration, usize>> =
        decs.iter().map(|ds| ds.iter().enumerate().map(|(i, d)| (d, i)).collect()).collect();
    let sets = decs
        .iter()
        .zip(&graphs)
        .map(|(ds, g)| ds.iter().map(|d| render_decoration(ca, g, d)).collect())
        .collect();
    let stick = graphs.iter().position(|g| same_shape(g, &Graph::stick()));
    let corolla = |n: usize| graphs.iter().position(|g| same_shape(g, &Graph::corolla_n(n)));
    let canon: Vec<_> = graphs.iter().map(|g| canon::certificate(g, Default::default())).collect();
    let mut decl: Vec<(MapKind, usize, usize, KleisliMorphism)> = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        if let Some(st) = stick {
            for e in 0..g.n_edges() {
                decl.push((MapKind::Ch(e), st, gi, KleisliMorphism::from_etale(&ch_edge(g, e)?)?));
            }
        }
        for v in 0..g.n_vertices() {
            if let Some(c) = corolla(g.valency(v)) {
                let nb = vertex_neighbourhood(g, v)?.underlying;
                decl.push((MapKind::Nbhd(v), c, gi, KleisliMorphism::from_etale(&nb)?));
            }
        }
        if Some(gi) == stick {
            let tau = EtaleMorphism { source: g.clone(), target: g.clone(), edges: vec![1, 0], halves: vec![], vertices: vec![] };
            decl.push((MapKind::Iso(vec![1, 0]), gi, gi, KleisliMorphism::from_etale(&tau)?));
        }
        let is_corolla = (0..=g.n_edges() / 2).any(|n| Some(gi) == corolla(n));
        if is_corolla {
            let n = g.n_edges() / 2;
            for i in 0..n.saturating_sub(1) {
                let sigma = crate::perm::adjacent(n, i);
                let mut edges: Vec<usize> = sigma.clone();
                edges.extend(sigma.iter().map(|&x| x + n));
                let f = crate::etale::check_etale(g, g, edges.clone(), sigma.clone(), vec![0])?;
                decl.push((MapKind::Iso(edges), gi, gi, KleisliMorphism::from_etale(&f)?));
            }
        } else if Some(gi) != stick && g.is_admissible() {
            if let Some(c) = corolla(g.ports().len()) {
                decl.push((MapKind::Refinement, c, gi, KleisliMorphism::corolla_refinement(g)?));
            }
        }
        let deletable: Vec<usize> = (0..g.n_vertices()).filter(|&v| matches!(g.valency(v), 0 | 2)).collect();
        for w in subsets(&deletable) {
            let d = delete_vertices(g, &w)?;
            let cert = canon::certificate(&d.target, Default::default());
            let Some(hi) = canon.iter().position(|c| *c == cert) else { continue };
            let iso = canon::is_isomorphic(&d.target, &graphs[hi]).expect("certificates agree");
            let f = EtaleMorphism {
                source: d.target.clone(),
                target: graphs[hi].clone(),
                edges: iso.edges,
                halves: iso.halves,
                vertices: iso.vertices,
            };
            let tail = d.as_pointed().then(&PointedMorphism::from_etale(&f));
            decl.push((MapKind::Deletion(w), gi, hi, KleisliMorphism::from_pointed(&tail)?));
        }
    }
    let mut morphisms = Vec::new();
    for (kind, src, tgt, k) in decl {
        let mut map = Vec::new();
        for d in &decs[tgt] {
            let r = restrict(ca, &k, d)?
                .ok_or_else(|| Error::OutOfBounds(format!("{} restriction into {}", kind.name(), names[src])))?;
            let i = *index[src]
                .get(&r)
                .ok_or_else(|| Error::ColourMismatch(format!("restriction into {} left the species", names[src])))?;
            map.push(i);
        }
        morphisms.push(PresheafMap { kind, source: src, target: tgt, map });
    }
    let p = FinitePresheaf { names, graphs, sets, morphisms };
    p.validate()?;
    Ok(p)
}

/// Every natural transformation `p ⇒ q` between presheaves declared on the
/// same corpus with the same morphisms. Components on the stick and the
/// corollas are searched; the others follow from the limit description of
/// `q`. Each result lists the components per graph.
pub fn natural_transformations(p: &FinitePresheaf, q: &FinitePresheaf) -> Result<Vec<Vec<Vec<usize>>>> {
    if p.graphs.len() != q.graphs.len()
        || p.morphisms.len() != q.morphisms.len()
        || p.morphisms.iter().zip(&q.morphisms).any(|(a, b)| (&a.kind, a.source, a.target) != (&b.kind, b.source, b.target))
    {
        return Err(Error::Mismatch("presheaves are declared differently".into()));
    }
    let stick = p.stick_index().ok_or_else(|| Error::CorpusNotElementClosed("no stick".into()))?;
    let mut elements = vec![stick];
    for n in 0..=p.graphs.iter().map(|g| g.n_edges()).max().unwrap_or(0) {
        if let Some(c) = p.corolla_index(n) {
            elements.push(c);
        }
    }
    let rp: Vec<Restrictions> = (0..p.graphs.len()).map(|g| restrictions(p, g)).collect::<Result<_>>()?;
    let rq: Vec<Restrictions> = (0..q.graphs.len()).map(|g| restrictions(q, g)).collect::<Result<_>>()?;
    let qindex: Vec<HashMap<Vec<usize>, usize>> = (0..q.graphs.len())
        .map(|g| (0..q.sets[g].len()).map(|x| (family(&rq[g], x), x)).collect())
        .collect();
    let all_maps = |from: usize, to: usize| -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..from {
            out = out.into_iter().flat_map(|m| (0..to).map(move |y| {
                let mut m2 = m.clone();
                m2.push(y);
                m2
            })).collect();
        }
        out
    };
    let options: Vec<Vec<Vec<usize>>> = elements.iter().map(|&g| all_maps(p.sets[g].len(), q.sets[g].len())).collect();
    let total: usize = options.iter().map(Vec::len).product();
    if total > crate::max_search() {
        return Err(Error::BoundsTooLarge(format!("{total} candidate component families")));
    }
    let mut out = Vec::new();
    let mut pick = vec![0; options.len()];
    'outer: loop {
        let mut comp: Vec<Option<Vec<usize>>> = vec![None; p.graphs.len()];
        for (k, &g) in elements.iter().enumerate() {
            comp[g] = Some(options[k][pick[k]].clone());
        }
        let mut ok = true;
        for g in 0..p.graphs.len() {
            if comp[g].is_some() {
                continue;
            }
            let mut c = Vec::new();
            for x in 0..p.sets[g].len() {
                let f = family(&rp[g], x);
                let ne = p.graphs[g].n_edges();
                let fq: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| {
                        let set = if k < ne { stick } else { rp[g].corollas[k - ne] };
                        comp[set].as_ref().unwrap()[z]
                    })
                    .collect();
                match qindex[g].get(&fq) {
                    Some(&y) => c.push(y),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            comp[g] = Some(c);
        }
        if ok {
            let comp: Vec<Vec<usize>> = comp.into_iter().map(Option::unwrap).collect();
            let natural = p.morphisms.iter().zip(&q.morphisms).all(|(mp, mq)| {
                (0..p.sets[mp.target].len()).all(|x| comp[mp.source][mp.map[x]] == mq.map[comp[mp.target][x]])
            });
            if natural {
                out.push(comp);
            }
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                break 'outer;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

/// Every morphism of circuit algebras `a → b` over the same palette,
/// identity on colours, by exhaustive search. Each result gives `f_n` per
/// arity.
pub fn algebra_morphisms(a: &CircuitAlgebra, b: &CircuitAlgebra) -> Result<Vec<Vec<Vec<usize>>>> {
    let (sa, sb) = (&a.species, &b.species);
    if sa.palette != sb.palette || sa.nmax != sb.nmax {
        return Err(Error::Mismatch("algebras over different palettes or bounds".into()));
    }
    // per arity, the colour- and action-preserving maps
    let mut per: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..=sa.nmax {
        let mut maps = vec![Vec::new()];
        for x in 0..sa.size(n) {
            let mut next = Vec::new();
            for m in maps {
                for y in 0..sb.size(n) {
                    if sa.colour(n, x) == sb.colour(n, y) {
                        let mut m2: Vec<usize> = m.clone();
                        m2.push(y);
                        next.push(m2);
                    }
                }
            }
            maps = next;
        }
        let perms = crate::perm::permutations(n);
        maps.retain(|f| {
            (0..sa.size(n)).all(|x| perms.iter().all(|p| f[sa.act(n, x, p)] == sb.act(n, f[x], p)))
        });
        per.push(maps);
    }
    let total: usize = per.iter().map(Vec::len).product();
    if total > crate::max_search() {
        return Err(Error::BoundsTooLarge(format!("{total} candidate species maps")));
    }
    let mut out = Vec::new();
    let mut pick = vec![0; per.len()];
    loop {
        let f: Vec<&Vec<usize>> = (0..per.len()).map(|n| &per[n][pick[n]]).collect();
        let unit_ok = match (a.unit, b.unit) {
            (Some(x), Some(y)) => f[0][x] == y,
            (None, _) => true,
            (Some(_), None) => false,
        };
        let eps_ok = (0..sa.palette.len()).all(|c| match (a.eps[c], b.eps[c]) {
            (Some(x), Some(y)) => f[2][x] == y,
            _ => true,
        });
        let box_ok = a.boxp.iter().all(|(&(m, x, n, y), &r)| match b.boxed(m, f[m][x], n, f[n][y]) {
            Some(z) => f[m + n][r] == z,
            None => b.truncated,
        });
        let zeta_ok = a.zeta.iter().all(|(&(n, i, j, x), &r)| match b.contract(n, i, j, f[n][x]) {
            Some(z) => f[n - 2][r] == z,
            None => b.truncated,
        });
        if unit_ok && eps_ok && box_ok && zeta_ok {
            out.push(f.into_iter().cloned().collect());
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < per[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Two single-colour algebras with two elements in every arity: `⊠` is
/// addition mod 2 and `⊖ = 0`; `ζ` is the identity and `ε = 0`, or `ζ`
/// adds 1 and `ε = 1` when `shifted`.
pub fn parity_algebra(nmax: usize, shifted: bool) -> CircuitAlgebra {
    use crate::species::{Palette, Species};
    let names = (0..=nmax).map(|_| vec!["0".to_string(), "1".to_string()]).collect();
    let colours = (0..=nmax).map(|n| vec![vec![0; n], vec![0; n]]).collect();
    let action = (0..=nmax)
        .map(|n| {
            let k = crate::perm::factorial(n);
            vec![vec![0; k], vec![1; k]]
        })
        .collect();
    let s = Species::new(Palette::monochrome(), names, colours, action).expect("parity species is valid");
    let z = usize::from(shifted);
    CircuitAlgebra::from_fns(s, |_, a, _, b| Some(a ^ b), |_, _, _, a| Some(a ^ z), |_| Some(z), Some(0), false)
        .expect("parity algebra is valid")
}

/// A corpus for the fullness probe: the stick, the empty graph, every
/// corolla, every pair of corollas and every corolla with one loop, all
/// with at most `nmax` ports.
pub fn probe_corpus(nmax: usize) -> Result<Vec<(String, Graph)>> {
    let mut out = vec![("stick".to_string(), Graph::stick()), ("empty".to_string(), Graph::empty())];
    for n in 0..=nmax {
        out.push((format!("C{n}"), Graph::corolla_n(n)));
    }
    for m in 0..=nmax {
        for n in m..=nmax - m {
            out.push((format!("C{m}+C{n}"), Graph::corolla_n(m).disjoint_union(&Graph::corolla_n(n))));
        }
    }
    for n in 2..=nmax {
        let c = Graph::corolla_n(n);
        let (g, _) = crate::etale::glue_ports(&c, &[(0, 1)])?;
        out.push((format!("C{n}^loop"), g));
    }
    Ok(out)
}

/// Names every element of `P(G)` by its position, keeping the sets'
/// entries as keys for lookups.
pub fn element_names(p: &FinitePresheaf) -> BTreeMap<String, Vec<String>> {
    p.names.iter().cloned().zip(p.sets.iter().cloned()).collect()
}
