//! Canonical labelling by colour refinement on edges plus individualisation
//! and backtracking. The minimum certificate over all leaves of the search
//! tree is an isomorphism invariant.
//!
//! Edge codes (port labels, colours) and vertex decorations can be layered
//! on top. A vertex decoration is read through a closure that receives the
//! vertex's slots listed in canonical order, so decorations that live in
//! permutation representations are handled exactly.

use std::collections::BTreeMap;

use crate::graph::Graph;

pub type Key = Vec<u64>;

pub type VertexCode<'a> = &'a dyn Fn(usize, &[usize]) -> Key;

#[derive(Clone, Copy, Default)]
pub struct Decor<'a> {
    pub edge_code: Option<&'a [u64]>,
    pub vertex_code: Option<VertexCode<'a>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize, u64)>,
    pub decorations: Vec<Key>,
    pub isolated: Vec<Key>,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    /// position -> edge
    pub edge_order: Vec<usize>,
    /// rank -> vertex
    pub vertex_order: Vec<usize>,
    pub cert: Certificate,
}

fn rerank<T: Ord + Clone>(sigs: &[T]) -> (Vec<usize>, usize) {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    let ranks = sigs.iter().map(|s| sorted.binary_search(s).unwrap()).collect();
    (ranks, sorted.len())
}

struct Search<'a> {
    g: &'a Graph,
    decor: Decor<'a>,
    best: Option<Leaf>,
}

impl<'a> Search<'a> {
    fn refine(&self, col: &mut Vec<usize>) {
        let g = self.g;
        let ne = g.n_edges();
        let mut count = {
            let mut c = col.clone();
            c.sort();
            c.dedup();
            c.len()
        };
        loop {
            let sigs: Vec<(usize, usize, Vec<usize>)> = (0..ne)
                .map(|e| {
                    let sib = match g.vertex_of(e) {
                        Some(v) => {
                            let mut s: Vec<usize> = g
                                .halves_at(v)
                                .iter()
                                .map(|&h| g.s(h))
                                .filter(|&x| x != e)
                                .map(|x| col[x])
                                .collect();
                            s.sort();
                            s
                        }
                        None => Vec::new(),
                    };
                    (col[e], col[g.tau(e)], sib)
                })
                .collect();
            let (ranks, n) = rerank(&sigs);
            *col = ranks;
            if n == count {
                break;
            }
            count = n;
        }
    }

    fn leaf(&self, col: &[usize]) -> Leaf {
        let g = self.g;
        let ne = g.n_edges();
        let mut edge_order = vec![0; ne];
        for e in 0..ne {
            edge_order[col[e]] = e;
        }
        let pos = col;
        let mut vrank = vec![usize::MAX; g.n_vertices()];
        let mut vertex_order = Vec::new();
        for &e in &edge_order {
            if let Some(v) = g.vertex_of(e) {
                if vrank[v] == usize::MAX {
                    vrank[v] = vertex_order.len();
                    vertex_order.push(v);
                }
            }
        }
        let edges = edge_order
            .iter()
            .map(|&e| {
                let vr = g.vertex_of(e).map(|v| vrank[v]).unwrap_or(usize::MAX);
                let code = self.decor.edge_code.map(|c| c[e]).unwrap_or(0);
                (pos[g.tau(e)], vr, code)
            })
            .collect();
        let decorations = match self.decor.vertex_code {
            Some(f) => vertex_order
                .iter()
                .map(|&v| {
                    let hs = g.halves_at(v);
                    let mut slots: Vec<usize> = (0..hs.len()).collect();
                    slots.sort_by_key(|&i| pos[g.s(hs[i])]);
                    f(v, &slots)
                })
                .collect(),
            None => Vec::new(),
        };
        let mut iso: Vec<(Key, usize)> = (0..g.n_vertices())
            .filter(|&v| g.valency(v) == 0)
            .map(|v| (self.decor.vertex_code.map(|f| f(v, &[])).unwrap_or_default(), v))
            .collect();
        iso.sort();
        vertex_order.extend(iso.iter().map(|&(_, v)| v));
        let isolated = iso.into_iter().map(|(k, _)| k).collect();
        Leaf {
            edge_order,
            vertex_order,
            cert: Certificate { n_vertices: g.n_vertices(), edges, decorations, isolated },
        }
    }

    fn run(&mut self, mut col: Vec<usize>) {
        self.refine(&mut col);
        let ne = col.len();
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..ne {
            classes.entry(col[e]).or_default().push(e);
        }
        let target = classes.values().find(|c| c.len() > 1).cloned();
        match target {
            None => {
                let leaf = self.leaf(&col);
                let better = match &self.best {
                    None => true,
                    Some(b) => leaf.cert < b.cert,
                };
                if better {
                    self.best = Some(leaf);
                }
            }
            Some(cell) => {
                let c = col[cell[0]];
                for &e in &cell {
                    let sigs: Vec<usize> = (0..ne)
                        .map(|x| 2 * col[x] + usize::from(col[x] == c && x != e))
                        .collect();
                    let (ranks, _) = rerank(&sigs);
                    self.run(ranks);
                }
            }
        }
    }
}

/// Canonical leaf of `g` under the given decorations.
pub fn canonical_leaf(g: &Graph, decor: Decor<'_>) -> Leaf {
    let ne = g.n_edges();
    let init: Vec<(bool, u64, usize)> = (0..ne)
        .map(|e| {
            let code = decor.edge_code.map(|c| c[e]).unwrap_or(0);
            let val = g.vertex_of(e).map(|v| g.valency(v) + 1).unwrap_or(0);
            (g.is_port(e), code, val)
        })
        .collect();
    let (col, _) = rerank(&init);
    let mut search = Search { g, decor, best: None };
    search.run(col);
    search.best.expect("search visits at least one leaf")
}

pub fn certificate(g: &Graph, decor: Decor<'_>) -> Certificate {
    canonical_leaf(g, decor).cert
}

/// An explicit isomorphism between decorated graphs, as edge, half-edge and
/// vertex maps from `g` to `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoMaps {
    pub edges: Vec<usize>,
    pub halves: Vec<usize>,
    pub vertices: Vec<usize>,
}

pub fn find_iso(g: &Graph, dg: Decor<'_>, h: &Graph, dh: Decor<'_>) -> Option<IsoMaps> {
    if g.n_edges() != h.n_edges()
        || g.n_halves() != h.n_halves()
        || g.n_vertices() != h.n_vertices()
    {
        return None;
    }
    let lg = canonical_leaf(g, dg);
    let lh = canonical_leaf(h, dh);
    if lg.cert != lh.cert {
        return None;
    }
    let mut edges = vec![0; g.n_edges()];
    for (i, &e) in lg.edge_order.iter().enumerate() {
        edges[e] = lh.edge_order[i];
    }
    let mut vertices = vec![0; g.n_vertices()];
    for (r, &v) in lg.vertex_order.iter().enumerate() {
        vertices[v] = lh.vertex_order[r];
    }
    let halves = (0..g.n_halves())
        .map(|x| h.half_of(edges[g.s(x)]).expect("iso preserves im(s)"))
        .collect();
    Some(IsoMaps { edges, halves, vertices })
}

/// A graph relabelled to canonical ids, with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub graph: Graph,
    pub certificate: Certificate,
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonical_form_decorated(g, Decor::default())
}

pub fn canonical_form_decorated(g: &Graph, decor: Decor<'_>) -> CanonicalForm {
    let leaf = canonical_leaf(g, decor);
    let graph = relabel_by_leaf(g, &leaf).with_fresh_names();
    CanonicalForm { graph, certificate: leaf.cert }
}

/// Relabels `g` so that edges follow the leaf order, vertices follow the
/// leaf ranks, and half-edges follow their edges.
pub fn relabel_by_leaf(g: &Graph, leaf: &Leaf) -> Graph {
    let mut pe = vec![0; g.n_edges()];
    for (i, &e) in leaf.edge_order.iter().enumerate() {
        pe[e] = i;
    }
    let mut pv = vec![0; g.n_vertices()];
    for (r, &v) in leaf.vertex_order.iter().enumerate() {
        pv[v] = r;
    }
    let mut hs: Vec<usize> = (0..g.n_halves()).collect();
    hs.sort_by_key(|&h| pe[g.s(h)]);
    let mut ph = vec![0; g.n_halves()];
    for (i, &h) in hs.iter().enumerate() {
        ph[h] = i;
    }
    g.relabel(&pe, &ph, &pv)
}

/// Edge codes for a port labelling: port `e` labelled `l` gets `l + 1`,
/// everything else `0`.
pub fn label_codes(g: &Graph, labels: &[(usize, u64)]) -> Vec<u64> {
    let mut codes = vec![0; g.n_edges()];
    for &(e, l) in labels {
        codes[e] = l + 1;
    }
    codes
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> Option<IsoMaps> {
    find_iso(g, Decor::default(), h, Decor::default())
}

/// Isomorphism respecting port labels given as names; ports missing from a
/// labelling are unconstrained.
pub fn is_isomorphic_labeled(
    g: &Graph,
    lg: &[(usize, String)],
    h: &Graph,
    lh: &[(usize, String)],
) -> Option<IsoMaps> {
    let mut all: Vec<&String> = lg.iter().chain(lh.iter()).map(|(_, l)| l).collect();
    all.sort();
    all.dedup();
    let code = |l: &String| all.binary_search(&l).unwrap() as u64;
    let cg = label_codes(g, &lg.iter().map(|(e, l)| (*e, code(l))).collect::<Vec<_>>());
    let ch = label_codes(h, &lh.iter().map(|(e, l)| (*e, code(l))).collect::<Vec<_>>());
    find_iso(
        g,
        Decor { edge_code: Some(&cg), vertex_code: None },
        h,
        Decor { edge_code: Some(&ch), vertex_code: None },
    )
}
