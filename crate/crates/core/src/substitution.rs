//! Graphs of graphs, their colimits, and bounded enumeration of `X`-graphs.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use crate::canon::{self, Certificate, Decor};
use crate::error::{Error, Result};
use crate::etale::{classes, EtaleMorphism};
use crate::graph::{Graph, Names};

/// The graph substituted at one vertex of the base. `ports[i]` is the port
/// of `graph` that replaces slot `i` of the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub graph: Graph,
    pub ports: Vec<usize>,
}

impl Piece {
    /// The corolla with port `i` on slot `i`.
    pub fn corolla(n: usize) -> Piece {
        Piece { graph: Graph::corolla_n(n), ports: (0..n).collect() }
    }

    /// A stick standing in for a bivalent vertex: edge `2` on slot 0.
    pub fn stick() -> Piece {
        Piece { graph: Graph::stick(), ports: vec![1, 0] }
    }
}

/// A functor `el(G) → Gr` sending stick elements to the stick, given by its
/// values on the corolla elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGraphs {
    pub base: Graph,
    pub pieces: Vec<Piece>,
}

impl GraphOfGraphs {
    pub fn new(base: Graph, pieces: Vec<Piece>) -> Result<GraphOfGraphs> {
        let gg = GraphOfGraphs { base, pieces };
        gg.validate()?;
        Ok(gg)
    }

    pub fn identity(g: &Graph) -> GraphOfGraphs {
        let pieces = (0..g.n_vertices()).map(|v| Piece::corolla(g.valency(v))).collect();
        GraphOfGraphs { base: g.clone(), pieces }
    }

    pub fn validate(&self) -> Result<()> {
        let base = &self.base;
        if self.pieces.len() != base.n_vertices() {
            return Err(Error::InvalidGraphOfGraphs(format!(
                "{} pieces for {} vertices",
                self.pieces.len(),
                base.n_vertices()
            )));
        }
        for (v, p) in self.pieces.iter().enumerate() {
            let vn = base.vertex_name(v);
            let mut ports = p.ports.clone();
            if ports.len() != base.valency(v) {
                return Err(Error::InvalidGraphOfGraphs(format!(
                    "piece at {vn} has a boundary of size {} for valency {}",
                    ports.len(),
                    base.valency(v)
                )));
            }
            ports.sort();
            ports.dedup();
            let mut actual = p.graph.ports();
            actual.sort();
            if ports != actual {
                return Err(Error::InvalidGraphOfGraphs(format!(
                    "boundary at {vn} is not a bijection onto the piece's ports"
                )));
            }
            if p.graph.is_empty() && base.valency(v) != 0 {
                return Err(Error::InvalidGraphOfGraphs(format!("empty piece at {vn}")));
            }
        }
        Ok(())
    }

    /// No piece has a stick component.
    pub fn is_nondegenerate(&self) -> bool {
        self.pieces.iter().all(|p| p.graph.stick_count() == 0)
    }
}

pub fn check_nondegenerate(gg: &GraphOfGraphs) -> bool {
    gg.is_nondegenerate()
}

/// Where an edge of the colimit came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    Base(usize),
    /// `(vertex of the base, edge of its piece)`
    Piece(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Substitution {
    pub graph: Graph,
    /// Per colimit edge, the smallest base edge of its class if any, else
    /// the piece edge.
    pub edge_origin: Vec<EdgeOrigin>,
    /// Class of every base edge.
    pub base_edges: Vec<usize>,
    /// Class of every piece edge, per base vertex.
    pub piece_edges: Vec<Vec<usize>>,
    /// `(base vertex, piece half-edge)` per colimit half-edge.
    pub half_origin: Vec<(usize, usize)>,
    /// `(base vertex, piece vertex)` per colimit vertex.
    pub vertex_origin: Vec<(usize, usize)>,
    /// First colimit half-edge and vertex of each piece.
    pub half_offset: Vec<usize>,
    pub vertex_offset: Vec<usize>,
}

impl Substitution {
    /// The universal map from the piece at `v` into the colimit.
    pub fn piece_map(&self, gg: &GraphOfGraphs, v: usize) -> EtaleMorphism {
        let p = &gg.pieces[v].graph;
        EtaleMorphism {
            source: p.clone(),
            target: self.graph.clone(),
            edges: self.piece_edges[v].clone(),
            halves: (0..p.n_halves()).map(|h| self.half_offset[v] + h).collect(),
            vertices: (0..p.n_vertices()).map(|w| self.vertex_offset[v] + w).collect(),
        }
    }

    /// The universal map at the stick element of base edge `e`.
    pub fn stick_map(&self, gg: &GraphOfGraphs, e: usize) -> EtaleMorphism {
        let _ = gg;
        EtaleMorphism {
            source: Graph::stick(),
            target: self.graph.clone(),
            edges: vec![self.base_edges[e], self.graph.tau(self.base_edges[e])],
            halves: vec![],
            vertices: vec![],
        }
    }

    /// The vertex of the base each colimit vertex lies over.
    pub fn vertex_over(&self) -> Vec<usize> {
        self.vertex_origin.iter().map(|&(v, _)| v).collect()
    }
}

/// The colimit of a graph of graphs. A piece port on slot `i` of `v` is
/// identified with `τ s(h_i)` and its inner side with `s(h_i)`; stick pieces
/// pass through.
pub fn substitute(gg: &GraphOfGraphs) -> Result<Substitution> {
    gg.validate()?;
    let base = &gg.base;
    let nb = base.n_edges();
    let mut offset = vec![nb];
    for p in &gg.pieces {
        offset.push(offset.last().unwrap() + p.graph.n_edges());
    }
    let total = *offset.last().unwrap();
    let mut uf = UnionFind::<usize>::new(total);
    for (v, p) in gg.pieces.iter().enumerate() {
        let hs = base.halves_at(v);
        for (i, &port) in p.ports.iter().enumerate() {
            let e = base.s(hs[i]);
            uf.union(offset[v] + port, base.tau(e));
            uf.union(offset[v] + p.graph.tau(port), e);
        }
    }
    // global tau before classing
    let mut gtau = vec![0; total];
    for e in 0..nb {
        gtau[e] = base.tau(e);
    }
    for (v, p) in gg.pieces.iter().enumerate() {
        for e in 0..p.graph.n_edges() {
            gtau[offset[v] + e] = offset[v] + p.graph.tau(e);
        }
    }
    // base edges absorbed into a vertex's boundary still name their class;
    // classes are numbered base-first.
    let (raw_class, raw_reps) = classes(&mut uf, total);
    let nclass = raw_reps.len();
    let mut order: Vec<usize> = (0..nclass).collect();
    order.sort_by_key(|&c| raw_reps[c]);
    let mut renum = vec![0; nclass];
    for (i, &c) in order.iter().enumerate() {
        renum[c] = i;
    }
    let class: Vec<usize> = raw_class.iter().map(|&c| renum[c]).collect();
    let reps: Vec<usize> = order.iter().map(|&c| raw_reps[c]).collect();

    let mut tau = vec![usize::MAX; nclass];
    for x in 0..total {
        let c = class[x];
        let tc = class[gtau[x]];
        if tau[c] != usize::MAX && tau[c] != tc {
            return Err(Error::InvalidGraphOfGraphs("τ is not well defined on the colimit".into()));
        }
        tau[c] = tc;
    }
    for c in 0..nclass {
        if tau[c] == c {
            return Err(Error::InvalidGraphOfGraphs(format!(
                "gluing creates a τ fixed point at {}",
                origin_name(gg, &offset, reps[c])
            )));
        }
    }
    let mut s = Vec::new();
    let mut t = Vec::new();
    let mut half_origin = Vec::new();
    let mut vertex_origin = Vec::new();
    let mut half_offset = Vec::new();
    let mut vertex_offset = Vec::new();
    let mut hnames = Vec::new();
    let mut vnames = Vec::new();
    for (v, p) in gg.pieces.iter().enumerate() {
        half_offset.push(s.len());
        vertex_offset.push(vertex_origin.len());
        let g = &p.graph;
        let single = g.n_vertices() == 1;
        for h in 0..g.n_halves() {
            s.push(class[offset[v] + g.s(h)]);
            t.push(vertex_offset[v] + g.t(h));
            half_origin.push((v, h));
            hnames.push(format!("{}.{}", base.vertex_name(v), g.half_name(h)));
        }
        for w in 0..g.n_vertices() {
            vertex_origin.push((v, w));
            vnames.push(if single {
                base.vertex_name(v).to_string()
            } else {
                format!("{}.{}", base.vertex_name(v), g.vertex_name(w))
            });
        }
    }
    // halves of single-vertex pieces keep the base half names where the slot
    // matches
    for (v, p) in gg.pieces.iter().enumerate() {
        let hs = base.halves_at(v);
        for (i, &port) in p.ports.iter().enumerate() {
            let inner = p.graph.tau(port);
            if let Some(h) = p.graph.half_of(inner) {
                hnames[half_offset[v] + h] = base.half_name(hs[i]).to_string();
            }
        }
    }
    let enames = reps.iter().map(|&r| origin_name(gg, &offset, r)).collect();
    let edge_origin = reps
        .iter()
        .map(|&r| {
            if r < nb {
                EdgeOrigin::Base(r)
            } else {
                let v = offset.partition_point(|&o| o <= r) - 1;
                EdgeOrigin::Piece(v, r - offset[v])
            }
        })
        .collect();
    let names = Names { edges: enames, halves: hnames, vertices: vnames };
    let graph = Graph::with_names(tau, s, t, vertex_origin.len(), names)
        .map_err(|e| Error::InvalidGraphOfGraphs(e.to_string()))?;
    let piece_edges = gg
        .pieces
        .iter()
        .enumerate()
        .map(|(v, p)| (0..p.graph.n_edges()).map(|e| class[offset[v] + e]).collect())
        .collect();
    Ok(Substitution {
        graph,
        edge_origin,
        base_edges: class[..nb].to_vec(),
        piece_edges,
        half_origin,
        vertex_origin,
        half_offset,
        vertex_offset,
    })
}

fn origin_name(gg: &GraphOfGraphs, offset: &[usize], x: usize) -> String {
    let nb = gg.base.n_edges();
    if x < nb {
        gg.base.edge_name(x).to_string()
    } else {
        let v = offset.partition_point(|&o| o <= x) - 1;
        format!("{}.{}", gg.base.vertex_name(v), gg.pieces[v].graph.edge_name(x - offset[v]))
    }
}

/// A graph of graphs on the colimit of `outer`, made from graphs of graphs
/// on each of its pieces. Substituting the result equals substituting the
/// composite [`compose_nested`].
pub fn pull_to_colimit(
    outer: &GraphOfGraphs,
    sub: &Substitution,
    inner: &[GraphOfGraphs],
) -> Result<GraphOfGraphs> {
    let mut pieces = Vec::new();
    for &(v, w) in &sub.vertex_origin {
        pieces.push(inner[v].pieces[w].clone());
    }
    let _ = outer;
    GraphOfGraphs::new(sub.graph.clone(), pieces)
}

/// The composite graph of graphs: at each base vertex, the colimit of the
/// inner graph of graphs on its piece.
pub fn compose_nested(outer: &GraphOfGraphs, inner: &[GraphOfGraphs]) -> Result<GraphOfGraphs> {
    let mut pieces = Vec::new();
    for (v, p) in outer.pieces.iter().enumerate() {
        if inner[v].base != p.graph {
            return Err(Error::InvalidGraphOfGraphs("inner base differs from the piece".into()));
        }
        let sub = substitute(&inner[v])?;
        let ports = p.ports.iter().map(|&e| sub.base_edges[e]).collect();
        pieces.push(Piece { graph: sub.graph, ports });
    }
    GraphOfGraphs::new(outer.base.clone(), pieces)
}

/// A graph with its ports labelled by `0..|X|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XGraph {
    pub graph: Graph,
    /// `labels[e]` is the label of port `e`.
    pub labels: BTreeMap<usize, usize>,
}

impl XGraph {
    pub fn is_admissible(&self) -> bool {
        self.graph.is_admissible()
    }

    pub fn label_codes(&self) -> Vec<u64> {
        let l: Vec<(usize, u64)> = self.labels.iter().map(|(&e, &x)| (e, x as u64)).collect();
        canon::label_codes(&self.graph, &l)
    }

    /// Edge codes with stick orientation: the smaller edge of each stick
    /// component is its first edge.
    pub fn rigid_codes(&self) -> Vec<u64> {
        let mut c = self.label_codes();
        for e in 0..self.graph.n_edges() {
            c[e] = 2 * c[e] + u64::from(self.graph.is_stick_edge(e) && e < self.graph.tau(e));
        }
        c
    }

    pub fn certificate(&self, rigid: bool) -> Certificate {
        let codes = if rigid { self.rigid_codes() } else { self.label_codes() };
        canon::certificate(&self.graph, Decor { edge_code: Some(&codes), vertex_code: None })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_vertices: usize,
    pub max_valency: usize,
    pub connected_only: bool,
    pub admissible_only: bool,
}

/// One representative per labelled isomorphism class. Stick components are
/// oriented, so `(∣, id)` and `(∣, τ)` are distinct. Ordered by certificate.
pub fn enumerate_x_graphs(x_size: usize, bounds: Bounds) -> Result<Vec<XGraph>> {
    let cap = crate::max_search();
    let mut budget = cap;
    let mut found: BTreeMap<Certificate, XGraph> = BTreeMap::new();
    for nv in 0..=bounds.max_vertices {
        for degs in degree_sequences(nv, bounds.max_valency) {
            let nh: usize = degs.iter().sum();
            if (nh + x_size) % 2 == 1 {
                continue;
            }
            let mut t = Vec::new();
            for (v, &d) in degs.iter().enumerate() {
                t.extend(std::iter::repeat_n(v, d));
            }
            let mut ends: Vec<usize> = (0..nh + x_size).collect();
            let mut pairs = Vec::new();
            let mut err = None;
            matchings(&mut ends, &mut pairs, &mut |pairs| {
                if budget == 0 {
                    err = Some(Error::BoundsTooLarge(format!("more than {cap} gluings")));
                    return false;
                }
                budget -= 1;
                let n_stick = pairs.iter().filter(|&&(a, _)| a >= nh).count();
                if bounds.admissible_only && n_stick > 0 {
                    return true;
                }
                for flips in 0..(1usize << n_stick) {
                    let xg = build_x_graph(nh, nv, &t, pairs, flips);
                    if bounds.connected_only && !xg.graph.is_connected() {
                        continue;
                    }
                    if bounds.admissible_only && !xg.is_admissible() {
                        continue;
                    }
                    let cert = xg.certificate(true);
                    found.entry(cert).or_insert(xg);
                }
                true
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(found.into_values().collect())
}

fn degree_sequences(nv: usize, max: usize) -> Vec<Vec<usize>> {
    fn rec(nv: usize, lo: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == nv {
            out.push(cur.clone());
            return;
        }
        for d in lo..=max {
            cur.push(d);
            rec(nv, d, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nv, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Visits every perfect matching of `ends`; the visitor returns `false` to
/// stop.
fn matchings(
    ends: &mut Vec<usize>,
    pairs: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&[(usize, usize)]) -> bool,
) -> bool {
    if ends.is_empty() {
        return visit(pairs);
    }
    let a = ends.remove(0);
    for i in 0..ends.len() {
        let b = ends.remove(i);
        pairs.push((a, b));
        let go = matchings(ends, pairs, visit);
        pairs.pop();
        ends.insert(i, b);
        if !go {
            ends.insert(0, a);
            return false;
        }
    }
    ends.insert(0, a);
    true
}

/// Ends `0..nh` are half-edges (edge `h` is `s(h)`), ends `nh..` are the
/// labels. Bit `k` of `flips` reverses the `k`-th stick.
fn build_x_graph(nh: usize, nv: usize, t: &[usize], pairs: &[(usize, usize)], flips: usize) -> XGraph {
    let mut tau: Vec<usize> = vec![usize::MAX; nh];
    let mut labels = BTreeMap::new();
    let mut k = 0;
    for &(a, b) in pairs {
        match (a < nh, b < nh) {
            (true, true) => {
                tau[a] = b;
                tau[b] = a;
            }
            (true, false) => {
                let p = tau.len();
                tau.push(a);
                tau[a] = p;
                labels.insert(p, b - nh);
            }
            (false, true) => unreachable!("pairs are increasing"),
            (false, false) => {
                let (x, y) = if flips >> k & 1 == 1 { (b, a) } else { (a, b) };
                k += 1;
                let p = tau.len();
                tau.push(p + 1);
                tau.push(p);
                labels.insert(p, x - nh);
                labels.insert(p + 1, y - nh);
            }
        }
    }
    let graph = Graph::build(tau, (0..nh).collect(), t.to_vec(), nv);
    XGraph { graph, labels }
}
