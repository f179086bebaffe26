//! Brauer diagrams with loop-counting composition, wiring diagrams, and the
//! graphs they describe.
//!
//! Boundary points of a diagram `m → n` are numbered `0..m` for the source
//! and `m..m+n` for the target.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::etale::EtaleMorphism;
use crate::graph::{Graph, Names};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrauerDiagram {
    pub m: usize,
    pub n: usize,
    pub matching: Vec<usize>,
    pub loops: usize,
}

impl BrauerDiagram {
    pub fn new(m: usize, n: usize, matching: Vec<usize>, loops: usize) -> Result<BrauerDiagram> {
        if matching.len() != m + n {
            return Err(Error::ArityMismatch(format!(
                "matching on {} points for arities {m}, {n}",
                matching.len()
            )));
        }
        for (i, &j) in matching.iter().enumerate() {
            if j >= m + n || j == i || matching[j] != i {
                return Err(Error::BadParameter(format!("point {i} is not properly matched")));
            }
        }
        Ok(BrauerDiagram { m, n, matching, loops })
    }

    pub fn from_pairs(m: usize, n: usize, pairs: &[(usize, usize)], loops: usize) -> Result<BrauerDiagram> {
        let mut matching = vec![usize::MAX; m + n];
        for &(a, b) in pairs {
            if a >= m + n || b >= m + n || matching[a] != usize::MAX || matching[b] != usize::MAX {
                return Err(Error::BadParameter(format!("pair ({a}, {b})")));
            }
            matching[a] = b;
            matching[b] = a;
        }
        BrauerDiagram::new(m, n, matching, loops)
    }

    pub fn identity(n: usize) -> BrauerDiagram {
        let matching = (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect();
        BrauerDiagram { m: n, n, matching, loops: 0 }
    }

    pub fn empty() -> BrauerDiagram {
        BrauerDiagram::identity(0)
    }

    /// `∪ ∈ BD(0, 2)`.
    pub fn cup() -> BrauerDiagram {
        BrauerDiagram { m: 0, n: 2, matching: vec![1, 0], loops: 0 }
    }

    /// `∩ ∈ BD(2, 0)`.
    pub fn cap() -> BrauerDiagram {
        BrauerDiagram { m: 2, n: 0, matching: vec![1, 0], loops: 0 }
    }

    /// The permutation diagram sending source `i` to target `p[i]`.
    pub fn permutation(p: &[usize]) -> BrauerDiagram {
        let n = p.len();
        let mut matching = vec![0; 2 * n];
        for (i, &j) in p.iter().enumerate() {
            matching[i] = n + j;
            matching[n + j] = i;
        }
        BrauerDiagram { m: n, n, matching, loops: 0 }
    }

    /// Matched pairs `(a, b)` with `a < b`, in order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.m + self.n).filter(|&i| i < self.matching[i]).map(|i| (i, self.matching[i])).collect()
    }

    pub fn is_downward(&self) -> bool {
        self.loops == 0 && (self.m..self.m + self.n).all(|j| self.matching[j] < self.m)
    }

    pub fn with_loops(&self, loops: usize) -> BrauerDiagram {
        BrauerDiagram { loops, ..self.clone() }
    }
}

/// `g ∘ f` for `f: m → n`, `g: n → p`.
pub fn compose_brauer(g: &BrauerDiagram, f: &BrauerDiagram) -> Result<BrauerDiagram> {
    if f.n != g.m {
        return Err(Error::ArityMismatch(format!("target {} against source {}", f.n, g.m)));
    }
    let (m, n, p) = (f.m, f.n, g.n);
    let mut seen = vec![false; n];
    let mut matching = vec![usize::MAX; m + p];
    // trace from an outer point; `in_f` says which diagram we stand in
    let trace = |start: usize, seen: &mut Vec<bool>| -> usize {
        let (mut in_f, mut i) = if start < m { (true, start) } else { (false, n + start - m) };
        loop {
            if in_f {
                let y = f.matching[i];
                if y < m {
                    return y;
                }
                seen[y - m] = true;
                in_f = false;
                i = y - m;
            } else {
                let z = g.matching[i];
                if z >= n {
                    return m + z - n;
                }
                seen[z] = true;
                in_f = true;
                i = m + z;
            }
        }
    };
    for x in 0..m + p {
        if matching[x] == usize::MAX {
            let y = trace(x, &mut seen);
            matching[x] = y;
            matching[y] = x;
        }
    }
    let mut cycles = 0;
    for j in 0..n {
        if seen[j] {
            continue;
        }
        cycles += 1;
        let mut k = j;
        loop {
            seen[k] = true;
            let a = f.matching[m + k] - m;
            seen[a] = true;
            k = g.matching[a];
            if k == j {
                break;
            }
        }
    }
    Ok(BrauerDiagram { m, n: p, matching, loops: f.loops + g.loops + cycles })
}

pub fn tensor_brauer(a: &BrauerDiagram, b: &BrauerDiagram) -> BrauerDiagram {
    let m = a.m + b.m;
    let n = a.n + b.n;
    let pa = |i: usize| if i < a.m { i } else { m + i - a.m };
    let pb = |i: usize| if i < b.m { a.m + i } else { m + a.n + i - b.m };
    let mut matching = vec![0; m + n];
    for i in 0..a.m + a.n {
        matching[pa(i)] = pa(a.matching[i]);
    }
    for i in 0..b.m + b.n {
        matching[pb(i)] = pb(b.matching[i]);
    }
    BrauerDiagram { m, n, matching, loops: a.loops + b.loops }
}

pub fn tensor_all(ds: &[BrauerDiagram]) -> BrauerDiagram {
    ds.iter().fold(BrauerDiagram::empty(), |acc, d| tensor_brauer(&acc, d))
}

/// Every loop-free diagram `m → n`.
pub fn all_diagrams(m: usize, n: usize) -> Vec<BrauerDiagram> {
    let mut out = Vec::new();
    if (m + n) % 2 == 1 {
        return out;
    }
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            cur[a] = b;
            cur[b] = a;
            rec(free, cur, out);
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut ms = Vec::new();
    rec(&mut (0..m + n).collect(), &mut vec![0; m + n], &mut ms);
    for matching in ms {
        out.push(BrauerDiagram { m, n, matching, loops: 0 });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiringDiagram {
    pub inner: Vec<usize>,
    pub outer: usize,
    pub diagram: BrauerDiagram,
}

impl WiringDiagram {
    pub fn new(inner: Vec<usize>, diagram: BrauerDiagram) -> Result<WiringDiagram> {
        let total: usize = inner.iter().sum();
        if total != diagram.m {
            return Err(Error::ArityMismatch(format!(
                "inner arities sum to {total}, diagram source is {}",
                diagram.m
            )));
        }
        Ok(WiringDiagram { inner, outer: diagram.n, diagram })
    }

    pub fn identity(n: usize) -> WiringDiagram {
        WiringDiagram { inner: vec![n], outer: n, diagram: BrauerDiagram::identity(n) }
    }

    /// The inner boundary each source point belongs to.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, &k) in self.inner.iter().enumerate() {
            out.extend(std::iter::repeat_n(b, k));
        }
        out
    }
}

/// `γ(g; f₁, …, f_k) = g ∘ (f₁ ⊕ ⋯ ⊕ f_k)`.
pub fn wd_compose(g: &WiringDiagram, fs: &[WiringDiagram]) -> Result<WiringDiagram> {
    if fs.len() != g.inner.len() {
        return Err(Error::ArityMismatch(format!(
            "{} inner boundaries, {} diagrams",
            g.inner.len(),
            fs.len()
        )));
    }
    for (i, f) in fs.iter().enumerate() {
        if f.outer != g.inner[i] {
            return Err(Error::ArityMismatch(format!(
                "boundary {i} has arity {}, diagram has outer arity {}",
                g.inner[i], f.outer
            )));
        }
    }
    let t = tensor_all(&fs.iter().map(|f| f.diagram.clone()).collect::<Vec<_>>());
    let d = compose_brauer(&g.diagram, &t)?;
    let inner = fs.iter().flat_map(|f| f.inner.iter().copied()).collect();
    WiringDiagram::new(inner, d)
}

/// Vertices are inner boundaries, half-edges are source points, edges are
/// all boundary points with τ the matching. Each loop adds a separate
/// `wheel(1)`.
pub fn wiring_to_graph(wd: &WiringDiagram) -> Graph {
    let d = &wd.diagram;
    let (m, n) = (d.m, d.n);
    let mut tau = d.matching.clone();
    let s: Vec<usize> = (0..m).collect();
    let mut t = wd.block_of();
    let mut nv = wd.inner.len();
    let mut names = Names {
        edges: (0..m).map(|i| format!("s{}", i + 1)).chain((0..n).map(|j| format!("t{}", j + 1))).collect(),
        halves: (0..m).map(|i| format!("h{}", i + 1)).collect(),
        vertices: (0..nv).map(|b| format!("b{}", b + 1)).collect(),
    };
    let mut s = s;
    for l in 0..d.loops {
        let e = tau.len();
        tau.push(e + 1);
        tau.push(e);
        s.push(e);
        s.push(e + 1);
        t.push(nv);
        t.push(nv);
        nv += 1;
        names.edges.push(format!("loop{}a", l + 1));
        names.edges.push(format!("loop{}b", l + 1));
        names.halves.push(format!("loop{}a", l + 1));
        names.halves.push(format!("loop{}b", l + 1));
        names.vertices.push(format!("loop{}", l + 1));
    }
    Graph::build_named(tau, s, t, nv, names)
}

/// Port labels of [`wiring_to_graph`]: target point `j` carries label `j`.
pub fn wiring_port_labels(wd: &WiringDiagram) -> Vec<(usize, usize)> {
    (0..wd.outer).map(|j| (wd.diagram.m + j, j)).collect()
}

/// The inverse of [`wiring_to_graph`] on loop-free diagrams: vertices in id
/// order, each vertex's slots in order, and ports ordered by `labels`.
pub fn graph_to_wiring(g: &Graph, labels: &BTreeMap<usize, usize>) -> Result<WiringDiagram> {
    if !g.is_admissible() {
        return Err(Error::BadParameter("graph has a stick component".into()));
    }
    let ports = g.ports();
    if labels.len() != ports.len() || ports.iter().any(|p| !labels.contains_key(p)) {
        return Err(Error::BadParameter("labelling does not cover the ports".into()));
    }
    let mut point_of = vec![usize::MAX; g.n_edges()];
    let mut inner = Vec::new();
    let mut m = 0;
    for v in 0..g.n_vertices() {
        inner.push(g.valency(v));
        for &h in g.halves_at(v) {
            point_of[g.s(h)] = m;
            m += 1;
        }
    }
    for (&e, &l) in labels {
        point_of[e] = m + l;
    }
    let n = ports.len();
    let mut matching = vec![0; m + n];
    for e in 0..g.n_edges() {
        matching[point_of[e]] = point_of[g.tau(e)];
    }
    WiringDiagram::new(inner, BrauerDiagram::new(m, n, matching, 0)?)
}

/// `is_in[e]` for every edge; exactly one of `e`, `τe` is in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub is_in: Vec<bool>,
}

impl Orientation {
    pub fn new(g: &Graph, is_in: Vec<bool>) -> Result<Orientation> {
        if is_in.len() != g.n_edges() {
            return Err(Error::BadParameter("orientation is not total".into()));
        }
        for e in 0..g.n_edges() {
            if is_in[e] == is_in[g.tau(e)] {
                return Err(Error::BadParameter(format!("orbit of {} is not oriented", g.edge_name(e))));
            }
        }
        Ok(Orientation { is_in })
    }

    pub fn flipped(&self) -> Orientation {
        Orientation { is_in: self.is_in.iter().map(|b| !b).collect() }
    }
}

pub fn check_orientation_preserved(f: &EtaleMorphism, src: &Orientation, tgt: &Orientation) -> bool {
    (0..f.source.n_edges()).all(|e| src.is_in[e] == tgt.is_in[f.edges[e]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;

    #[test]
    fn loops_from_cap_cup() {
        let c = compose_brauer(&BrauerDiagram::cap(), &BrauerDiagram::cup()).unwrap();
        assert_eq!(c, BrauerDiagram { m: 0, n: 0, matching: vec![], loops: 1 });
        assert!(!c.is_downward());
        assert!(BrauerDiagram::cap().is_downward());
        assert!(!BrauerDiagram::cup().is_downward());
    }

    #[test]
    fn self_composite() {
        let f = BrauerDiagram::from_pairs(2, 2, &[(0, 1), (2, 3)], 0).unwrap();
        assert_eq!(compose_brauer(&f, &f).unwrap(), f.with_loops(1));
        let id = BrauerDiagram::identity(3);
        assert_eq!(compose_brauer(&id, &id).unwrap(), id);
        assert!(compose_brauer(&id, &f).is_err());
    }

    #[test]
    fn tensors() {
        let i1 = BrauerDiagram::identity(1);
        assert_eq!(tensor_brauer(&i1, &i1), BrauerDiagram::identity(2));
        let cc = tensor_brauer(&BrauerDiagram::cup(), &BrauerDiagram::cup());
        assert_eq!(cc.pairs(), vec![(0, 1), (2, 3)]);
        let f = BrauerDiagram::from_pairs(1, 3, &[(0, 2), (1, 3)], 2).unwrap();
        assert_eq!(tensor_brauer(&f, &BrauerDiagram::empty()), f);
    }

    #[test]
    fn wiring_graphs() {
        assert_eq!(wiring_to_graph(&WiringDiagram::identity(3)).tau_map(), Graph::corolla_n(3).tau_map());
        let cup = WiringDiagram::new(vec![], BrauerDiagram::cup()).unwrap();
        assert!(is_isomorphic(&wiring_to_graph(&cup), &Graph::stick()).is_some());
        let cap = WiringDiagram::new(vec![2], BrauerDiagram::cap()).unwrap();
        assert!(is_isomorphic(&wiring_to_graph(&cap), &Graph::wheel(1).unwrap()).is_some());
        let cap11 = WiringDiagram::new(vec![1, 1], BrauerDiagram::cap()).unwrap();
        let g = wiring_to_graph(&cap11);
        assert_eq!((g.n_vertices(), g.inner_edges().len(), g.ports().len()), (2, 2, 0));
        let loop_wd = wd_compose(&cap, &[cup]).unwrap();
        assert_eq!(loop_wd.diagram.loops, 1);
        assert_eq!(loop_wd.inner, Vec::<usize>::new());
    }

    #[test]
    fn orientations() {
        let s = Graph::stick();
        let o = Orientation::new(&s, vec![true, false]).unwrap();
        let id = EtaleMorphism::identity(&s);
        assert!(check_orientation_preserved(&id, &o, &o));
        assert!(!check_orientation_preserved(&id, &o, &o.flipped()));
        let tau = crate::etale::ch_edge(&s, 1).unwrap();
        assert!(check_orientation_preserved(&tau, &o, &o.flipped()));
    }
}
