//! Étale morphisms, embeddings, elements of a graph and port gluing.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{Graph, Names};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleMorphism {
    pub source: Graph,
    pub target: Graph,
    pub edges: Vec<usize>,
    pub halves: Vec<usize>,
    pub vertices: Vec<usize>,
}

/// Checks commutation with `s`, `t`, `τ` and the local bijection at every
/// vertex.
pub fn check_etale(
    source: &Graph,
    target: &Graph,
    edges: Vec<usize>,
    halves: Vec<usize>,
    vertices: Vec<usize>,
) -> Result<EtaleMorphism> {
    if edges.len() != source.n_edges()
        || halves.len() != source.n_halves()
        || vertices.len() != source.n_vertices()
    {
        return Err(Error::DanglingId("map is not total on the source".into()));
    }
    if edges.iter().any(|&e| e >= target.n_edges())
        || halves.iter().any(|&h| h >= target.n_halves())
        || vertices.iter().any(|&v| v >= target.n_vertices())
    {
        return Err(Error::DanglingId("map leaves the target".into()));
    }
    for e in 0..source.n_edges() {
        if edges[source.tau(e)] != target.tau(edges[e]) {
            return Err(Error::NotCommuting(format!("tau at edge {}", source.edge_name(e))));
        }
    }
    for h in 0..source.n_halves() {
        if edges[source.s(h)] != target.s(halves[h]) {
            return Err(Error::NotCommuting(format!("s at half-edge {}", source.half_name(h))));
        }
        if vertices[source.t(h)] != target.t(halves[h]) {
            return Err(Error::NotCommuting(format!("t at half-edge {}", source.half_name(h))));
        }
    }
    for v in 0..source.n_vertices() {
        let w = vertices[v];
        let mut img: Vec<usize> = source.halves_at(v).iter().map(|&h| halves[h]).collect();
        img.sort();
        img.dedup();
        if img.len() != source.valency(v) || source.valency(v) != target.valency(w) {
            return Err(Error::NotLocallyBijective(source.vertex_name(v).to_string()));
        }
    }
    Ok(EtaleMorphism { source: source.clone(), target: target.clone(), edges, halves, vertices })
}

impl EtaleMorphism {
    pub fn identity(g: &Graph) -> EtaleMorphism {
        EtaleMorphism {
            source: g.clone(),
            target: g.clone(),
            edges: (0..g.n_edges()).collect(),
            halves: (0..g.n_halves()).collect(),
            vertices: (0..g.n_vertices()).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &EtaleMorphism) -> EtaleMorphism {
        EtaleMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            edges: self.edges.iter().map(|&e| other.edges[e]).collect(),
            halves: self.halves.iter().map(|&h| other.halves[h]).collect(),
            vertices: self.vertices.iter().map(|&v| other.vertices[v]).collect(),
        }
    }

    pub fn recheck(&self) -> Result<EtaleMorphism> {
        check_etale(
            &self.source,
            &self.target,
            self.edges.clone(),
            self.halves.clone(),
            self.vertices.clone(),
        )
    }

    pub fn is_edge_injective(&self) -> bool {
        let mut img = self.edges.clone();
        img.sort();
        img.dedup();
        img.len() == self.edges.len()
    }

    /// Pairs of source ports `(p, q)`, `p < q`, with `f(p) = τ f(q)`: the
    /// gluings this map factors through.
    pub fn glued_pairs(&self) -> Vec<(usize, usize)> {
        let ports = self.source.ports();
        let mut out = Vec::new();
        for (i, &p) in ports.iter().enumerate() {
            for &q in &ports[i + 1..] {
                if self.edges[p] == self.target.tau(self.edges[q]) && self.source.tau(p) != q {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Whether the map factors as a port gluing followed by a pointwise
    /// injection.
    pub fn is_embedding(&self) -> bool {
        if has_dup(&self.halves) || has_dup(&self.vertices) {
            return false;
        }
        let pairs = self.glued_pairs();
        let mut used = vec![false; self.source.n_edges()];
        for &(p, q) in &pairs {
            if used[p] || used[q] {
                return false;
            }
            used[p] = true;
            used[q] = true;
        }
        let ne = self.source.n_edges();
        let mut uf = UnionFind::<usize>::new(ne);
        for &(p, q) in &pairs {
            uf.union(p, self.source.tau(q));
            uf.union(q, self.source.tau(p));
        }
        for x in 0..ne {
            for y in x + 1..ne {
                if self.edges[x] == self.edges[y] && !uf.equiv(x, y) {
                    return false;
                }
            }
        }
        true
    }
}

fn has_dup(v: &[usize]) -> bool {
    let mut s = v.to_vec();
    s.sort();
    s.windows(2).any(|w| w[0] == w[1])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub underlying: EtaleMorphism,
    pub glued_pairs: Vec<(usize, usize)>,
    pub injective_tail: bool,
}

impl Embedding {
    pub fn from_morphism(f: EtaleMorphism) -> Option<Embedding> {
        if !f.is_embedding() {
            return None;
        }
        let glued_pairs = f.glued_pairs();
        Some(Embedding { underlying: f, glued_pairs, injective_tail: true })
    }
}

/// `ch_e: (∣) → G`, sending `1 ↦ e` and `2 ↦ τe`.
pub fn ch_edge(g: &Graph, e: usize) -> Result<EtaleMorphism> {
    if e >= g.n_edges() {
        return Err(Error::UnknownEdge(e.to_string()));
    }
    Ok(EtaleMorphism {
        source: Graph::stick(),
        target: g.clone(),
        edges: vec![e, g.tau(e)],
        halves: vec![],
        vertices: vec![],
    })
}

/// The neighbourhood `C_{E_v} → G` of a vertex. Corolla port `i` is the
/// `i`-th slot of `v`; it goes to `τ s(h_i)` and its dagger to `s(h_i)`.
pub fn vertex_neighbourhood(g: &Graph, v: usize) -> Result<Embedding> {
    if v >= g.n_vertices() {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let hs = g.halves_at(v).to_vec();
    let n = hs.len();
    let c = Graph::corolla_n(n);
    let mut edges = vec![0; 2 * n];
    for (i, &h) in hs.iter().enumerate() {
        edges[n + i] = g.s(h);
        edges[i] = g.tau(g.s(h));
    }
    let f = EtaleMorphism { source: c, target: g.clone(), edges, halves: hs, vertices: vec![v] };
    Ok(Embedding::from_morphism(f).expect("neighbourhoods are embeddings"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Stick,
    Corolla(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphElement {
    pub shape: Shape,
    pub map: EtaleMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementMorphism {
    pub from: usize,
    pub to: usize,
    pub map: EtaleMorphism,
}

/// Stick elements (one per edge, in edge order) followed by corolla
/// elements (one per vertex), with identities, `τ` between stick elements,
/// and the `ch_y` maps into corollas.
#[derive(Clone, Debug)]
pub struct ElementsCategory {
    pub elements: Vec<GraphElement>,
    pub morphisms: Vec<ElementMorphism>,
}

impl ElementsCategory {
    pub fn stick_element(&self, e: usize) -> usize {
        e
    }
    pub fn corolla_element(&self, g: &Graph, v: usize) -> usize {
        g.n_edges() + v
    }
}

pub fn elements_category(g: &Graph) -> ElementsCategory {
    let ne = g.n_edges();
    let mut elements = Vec::new();
    for e in 0..ne {
        elements.push(GraphElement { shape: Shape::Stick, map: ch_edge(g, e).unwrap() });
    }
    for v in 0..g.n_vertices() {
        let nb = vertex_neighbourhood(g, v).unwrap();
        elements.push(GraphElement { shape: Shape::Corolla(g.valency(v)), map: nb.underlying });
    }
    let mut morphisms = Vec::new();
    for (i, el) in elements.iter().enumerate() {
        morphisms.push(ElementMorphism { from: i, to: i, map: EtaleMorphism::identity(&el.map.source) });
    }
    let stick = Graph::stick();
    let tau_map = EtaleMorphism {
        source: stick.clone(),
        target: stick.clone(),
        edges: vec![1, 0],
        halves: vec![],
        vertices: vec![],
    };
    for e in 0..ne {
        morphisms.push(ElementMorphism { from: e, to: g.tau(e), map: tau_map.clone() });
    }
    for v in 0..g.n_vertices() {
        let idx = ne + v;
        let c = &elements[idx].map;
        for y in 0..c.source.n_edges() {
            let ch = ch_edge(&c.source, y).unwrap();
            let lands = c.edges[y];
            morphisms.push(ElementMorphism { from: lands, to: idx, map: ch });
        }
    }
    ElementsCategory { elements, morphisms }
}

/// `G^{e₁‡e′₁,…}`: identifies `e ∼ τe′` and `e′ ∼ τe` for every pair. A
/// pair naming both ends of a stick component contributes nothing.
/// Returns the glued graph and the quotient map.
pub fn glue_ports(g: &Graph, pairs: &[(usize, usize)]) -> Result<(Graph, EtaleMorphism)> {
    let ne = g.n_edges();
    let mut seen = vec![false; ne];
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= ne {
                return Err(Error::UnknownEdge(x.to_string()));
            }
            if !g.is_port(x) {
                return Err(Error::NotAPort(g.edge_name(x).to_string()));
            }
            if seen[x] {
                return Err(Error::RepeatedPort(g.edge_name(x).to_string()));
            }
            seen[x] = true;
        }
        if a == b {
            return Err(Error::RepeatedPort(g.edge_name(a).to_string()));
        }
    }
    let mut uf = UnionFind::<usize>::new(ne);
    for &(a, b) in pairs {
        if g.tau(a) == b {
            continue;
        }
        uf.union(a, g.tau(b));
        uf.union(b, g.tau(a));
    }
    let (class, reps) = classes(&mut uf, ne);
    let tau: Vec<usize> = reps.iter().map(|&r| class[g.tau(r)]).collect();
    let s = g.s_map().iter().map(|&e| class[e]).collect();
    let names = Names {
        edges: reps.iter().map(|&r| g.edge_name(r).to_string()).collect(),
        halves: g.names().halves.clone(),
        vertices: g.names().vertices.clone(),
    };
    let glued = Graph::with_names(tau, s, g.t_map().to_vec(), g.n_vertices(), names)?;
    let q = EtaleMorphism {
        source: g.clone(),
        target: glued.clone(),
        edges: class,
        halves: (0..g.n_halves()).collect(),
        vertices: (0..g.n_vertices()).collect(),
    };
    Ok((glued, q))
}

/// Class index of every element, classes numbered by their smallest member,
/// and the smallest member of each class.
pub(crate) fn classes(uf: &mut UnionFind<usize>, n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut root_class = std::collections::HashMap::new();
    for x in 0..n {
        let r = uf.find(x);
        let c = *root_class.entry(r).or_insert_with(|| {
            reps.push(x);
            reps.len() - 1
        });
        class[x] = c;
    }
    (class, reps)
}

/// How a vertex of the source is sent by a pointed map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexImage {
    /// Étale at this vertex.
    Vertex(usize),
    /// A bivalent vertex sent to a unit.
    Unit,
    /// An isolated vertex sent to the contracted unit on the orbit of this
    /// edge (the smaller edge of the orbit).
    Zero(usize),
}

/// Solutions of the hom search: an edge map commuting with τ and, per
/// vertex, either an étale image or (when allowed) a unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MapData {
    pub edges: Vec<usize>,
    pub vertices: Vec<VertexImage>,
}

struct HomSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    units: bool,
    limit: usize,
    out: Vec<MapData>,
    overflow: bool,
}

impl<'a> HomSearch<'a> {
    fn assign(&self, img: &mut [Option<usize>], e: usize, f: usize, log: &mut Vec<usize>) -> bool {
        for (x, y) in [(e, f), (self.g.tau(e), self.h.tau(f))] {
            match img[x] {
                Some(z) if z != y => return false,
                Some(_) => {}
                None => {
                    img[x] = Some(y);
                    log.push(x);
                }
            }
        }
        true
    }

    fn undo(img: &mut [Option<usize>], log: &[usize]) {
        for &x in log {
            img[x] = None;
        }
    }

    fn vertex(&mut self, v: usize, img: &mut Vec<Option<usize>>, vimg: &mut Vec<VertexImage>) {
        if self.overflow {
            return;
        }
        let g = self.g;
        let h = self.h;
        if v == g.n_vertices() {
            self.free_edges(0, img, vimg);
            return;
        }
        let hs = g.halves_at(v);
        let n = hs.len();
        if n == 0 {
            for w in 0..h.n_vertices() {
                if h.valency(w) == 0 {
                    vimg.push(VertexImage::Vertex(w));
                    self.vertex(v + 1, img, vimg);
                    vimg.pop();
                }
            }
            if self.units {
                for (e, _) in h.orbits() {
                    vimg.push(VertexImage::Zero(e));
                    self.vertex(v + 1, img, vimg);
                    vimg.pop();
                }
            }
            return;
        }
        for w in 0..h.n_vertices() {
            if h.valency(w) != n {
                continue;
            }
            let ws = h.halves_at(w);
            for perm in crate::perm::permutations(n) {
                let mut log = Vec::new();
                let ok = (0..n).all(|i| self.assign(img, g.s(hs[i]), h.s(ws[perm[i]]), &mut log));
                if ok {
                    vimg.push(VertexImage::Vertex(w));
                    self.vertex(v + 1, img, vimg);
                    vimg.pop();
                }
                Self::undo(img, &log);
            }
        }
        if self.units && n == 2 {
            let e0 = g.s(hs[0]);
            let e1 = g.s(hs[1]);
            let choices: Vec<usize> = match (img[e0], img[e1]) {
                (Some(f), _) => vec![f],
                (None, Some(f1)) => vec![h.tau(f1)],
                (None, None) => (0..h.n_edges()).collect(),
            };
            for f in choices {
                let mut log = Vec::new();
                let ok = self.assign(img, e0, f, &mut log)
                    && self.assign(img, e1, h.tau(f), &mut log);
                if ok {
                    vimg.push(VertexImage::Unit);
                    self.vertex(v + 1, img, vimg);
                    vimg.pop();
                }
                Self::undo(img, &log);
            }
        }
    }

    fn free_edges(&mut self, from: usize, img: &mut Vec<Option<usize>>, vimg: &mut Vec<VertexImage>) {
        if self.overflow {
            return;
        }
        let next = (from..self.g.n_edges()).find(|&e| img[e].is_none());
        match next {
            None => {
                if self.out.len() >= self.limit {
                    self.overflow = true;
                    return;
                }
                self.out.push(MapData {
                    edges: img.iter().map(|x| x.unwrap()).collect(),
                    vertices: vimg.clone(),
                });
            }
            Some(e) => {
                for f in 0..self.h.n_edges() {
                    let mut log = Vec::new();
                    if self.assign(img, e, f, &mut log) {
                        self.free_edges(e + 1, img, vimg);
                    }
                    Self::undo(img, &log);
                }
            }
        }
    }
}

/// All maps `g → h` in the search space: étale maps, plus unit and
/// contracted-unit choices at bivalent and isolated vertices when `units`
/// is set. Errors when more than `limit` solutions exist.
pub fn hom_search(g: &Graph, h: &Graph, units: bool, limit: usize) -> Result<Vec<MapData>> {
    let mut s = HomSearch { g, h, units, limit, out: Vec::new(), overflow: false };
    let mut img = vec![None; g.n_edges()];
    let mut vimg = Vec::new();
    s.vertex(0, &mut img, &mut vimg);
    if s.overflow {
        return Err(Error::BoundsTooLarge(format!("more than {limit} maps")));
    }
    let mut out = s.out;
    out.sort();
    out.dedup();
    Ok(out)
}

/// All étale maps `g → h`.
pub fn etale_maps(g: &Graph, h: &Graph) -> Result<Vec<EtaleMorphism>> {
    let data = hom_search(g, h, false, crate::max_search())?;
    Ok(data
        .into_iter()
        .map(|d| {
            let vertices = d
                .vertices
                .iter()
                .map(|x| match x {
                    VertexImage::Vertex(w) => *w,
                    _ => unreachable!(),
                })
                .collect();
            let halves = (0..g.n_halves()).map(|x| h.half_of(d.edges[g.s(x)]).unwrap()).collect();
            EtaleMorphism { source: g.clone(), target: h.clone(), edges: d.edges, halves, vertices }
        })
        .collect())
}
