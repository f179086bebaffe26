//! Feynman graphs: a finite diagram `E ⇆ E ← H → V` where the edge map is a
//! fixed-point-free involution and `s: H → E` is injective.
//!
//! Ids are dense integers. Every graph also carries display names for its
//! edges, half-edges and vertices, which is what the file formats use.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Names {
    pub edges: Vec<String>,
    pub halves: Vec<String>,
    pub vertices: Vec<String>,
}

impl Names {
    pub fn numbered(ne: usize, nh: usize, nv: usize) -> Names {
        Names {
            edges: (0..ne).map(|i| format!("e{i}")).collect(),
            halves: (0..nh).map(|i| format!("h{i}")).collect(),
            vertices: (0..nv).map(|i| format!("v{i}")).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    tau: Vec<usize>,
    s: Vec<usize>,
    t: Vec<usize>,
    nv: usize,
    names: Names,
    // derived
    s_inv: Vec<Option<usize>>,
    at: Vec<Vec<usize>>,
}

/// Index maps from a subgraph into its ambient graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub edges: Vec<usize>,
    pub halves: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl Graph {
    /// Builds a graph with generated names.
    pub fn new(tau: Vec<usize>, s: Vec<usize>, t: Vec<usize>, nv: usize) -> Result<Graph> {
        let names = Names::numbered(tau.len(), s.len(), nv);
        Graph::with_names(tau, s, t, nv, names)
    }

    pub fn with_names(
        tau: Vec<usize>,
        s: Vec<usize>,
        t: Vec<usize>,
        nv: usize,
        names: Names,
    ) -> Result<Graph> {
        let ne = tau.len();
        if s.len() != t.len() {
            return Err(Error::DanglingId("half-edge without both s and t".into()));
        }
        if names.edges.len() != ne || names.halves.len() != s.len() || names.vertices.len() != nv
        {
            return Err(Error::DanglingId("name table does not match id sets".into()));
        }
        for (e, &te) in tau.iter().enumerate() {
            if te >= ne {
                return Err(Error::DanglingId(format!("tau({})", names.edges[e])));
            }
        }
        for h in 0..s.len() {
            if s[h] >= ne {
                return Err(Error::DanglingId(format!("s({})", names.halves[h])));
            }
            if t[h] >= nv {
                return Err(Error::DanglingId(format!("t({})", names.halves[h])));
            }
        }
        let mut s_inv: Vec<Option<usize>> = vec![None; ne];
        for (h, &e) in s.iter().enumerate() {
            if let Some(h0) = s_inv[e] {
                return Err(Error::NonInjectiveS(
                    names.halves[h0].clone(),
                    names.halves[h].clone(),
                    names.edges[e].clone(),
                ));
            }
            s_inv[e] = Some(h);
        }
        for e in 0..ne {
            if tau[e] == e {
                return Err(Error::FixedPointInTau(names.edges[e].clone()));
            }
            if tau[tau[e]] != e {
                return Err(Error::TauNotInvolutive(names.edges[e].clone()));
            }
        }
        let mut at = vec![Vec::new(); nv];
        for (h, &v) in t.iter().enumerate() {
            at[v].push(h);
        }
        Ok(Graph { tau, s, t, nv, names, s_inv, at })
    }

    /// For internal constructions whose invariants hold by design.
    pub(crate) fn build(tau: Vec<usize>, s: Vec<usize>, t: Vec<usize>, nv: usize) -> Graph {
        Graph::new(tau, s, t, nv).expect("internal graph construction broke an invariant")
    }

    pub(crate) fn build_named(
        tau: Vec<usize>,
        s: Vec<usize>,
        t: Vec<usize>,
        nv: usize,
        names: Names,
    ) -> Graph {
        Graph::with_names(tau, s, t, nv, names)
            .expect("internal graph construction broke an invariant")
    }

    pub fn n_edges(&self) -> usize {
        self.tau.len()
    }
    pub fn n_halves(&self) -> usize {
        self.s.len()
    }
    pub fn n_vertices(&self) -> usize {
        self.nv
    }
    pub fn tau(&self, e: usize) -> usize {
        self.tau[e]
    }
    pub fn s(&self, h: usize) -> usize {
        self.s[h]
    }
    pub fn t(&self, h: usize) -> usize {
        self.t[h]
    }
    pub fn tau_map(&self) -> &[usize] {
        &self.tau
    }
    pub fn s_map(&self) -> &[usize] {
        &self.s
    }
    pub fn t_map(&self) -> &[usize] {
        &self.t
    }
    pub fn names(&self) -> &Names {
        &self.names
    }

    /// The half-edge whose image under `s` is `e`, if any.
    pub fn half_of(&self, e: usize) -> Option<usize> {
        self.s_inv[e]
    }

    /// The vertex `e` is incident on, if `e` is not a port.
    pub fn vertex_of(&self, e: usize) -> Option<usize> {
        self.s_inv[e].map(|h| self.t[h])
    }

    /// Half-edges at `v` in ascending order; this fixes the slot order of `v`.
    pub fn halves_at(&self, v: usize) -> &[usize] {
        &self.at[v]
    }

    /// `E_v = s(t⁻¹(v))`, in slot order.
    pub fn edges_at(&self, v: usize) -> Vec<usize> {
        self.at[v].iter().map(|&h| self.s[h]).collect()
    }

    pub fn valency(&self, v: usize) -> usize {
        self.at[v].len()
    }

    pub fn is_port(&self, e: usize) -> bool {
        self.s_inv[e].is_none()
    }

    /// `E₀ = E \ im(s)`, ascending.
    pub fn ports(&self) -> Vec<usize> {
        (0..self.n_edges()).filter(|&e| self.is_port(e)).collect()
    }

    /// The maximal τ-closed subset of `im(s)`.
    pub fn inner_edges(&self) -> Vec<usize> {
        (0..self.n_edges())
            .filter(|&e| !self.is_port(e) && !self.is_port(self.tau[e]))
            .collect()
    }

    /// τ-orbits as pairs `(e, τe)` with `e < τe`.
    pub fn orbits(&self) -> Vec<(usize, usize)> {
        (0..self.n_edges())
            .filter(|&e| e < self.tau[e])
            .map(|e| (e, self.tau[e]))
            .collect()
    }

    pub fn is_stick_edge(&self, e: usize) -> bool {
        self.is_port(e) && self.is_port(self.tau[e])
    }

    pub fn stick_count(&self) -> usize {
        self.orbits().iter().filter(|&&(e, _)| self.is_stick_edge(e)).count()
    }

    /// True when the graph has no stick components.
    pub fn is_admissible(&self) -> bool {
        self.stick_count() == 0
    }

    pub fn is_empty(&self) -> bool {
        self.n_edges() == 0 && self.nv == 0
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.names.edges[e]
    }
    pub fn half_name(&self, h: usize) -> &str {
        &self.names.halves[h]
    }
    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names.vertices[v]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<usize> {
        self.names.edges.iter().position(|n| n == name)
    }
    pub fn half_by_name(&self, name: &str) -> Option<usize> {
        self.names.halves.iter().position(|n| n == name)
    }
    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.names.vertices.iter().position(|n| n == name)
    }

    pub fn edge_id(&self, name: &str) -> Result<usize> {
        self.edge_by_name(name).ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }
    pub fn vertex_id(&self, name: &str) -> Result<usize> {
        self.vertex_by_name(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn with_fresh_names(&self) -> Graph {
        let names = Names::numbered(self.n_edges(), self.n_halves(), self.nv);
        Graph::build_named(self.tau.clone(), self.s.clone(), self.t.clone(), self.nv, names)
    }

    pub fn renamed(&self, names: Names) -> Result<Graph> {
        Graph::with_names(self.tau.clone(), self.s.clone(), self.t.clone(), self.nv, names)
    }

    // ---- named graphs ----

    /// The stick `(∣)`: edges `1, 2` swapped by τ.
    pub fn stick() -> Graph {
        let names = Names {
            edges: vec!["1".into(), "2".into()],
            halves: vec![],
            vertices: vec![],
        };
        Graph::build_named(vec![1, 0], vec![], vec![], 0, names)
    }

    pub fn empty() -> Graph {
        Graph::build(vec![], vec![], vec![], 0)
    }

    /// The isolated vertex `C₀`.
    pub fn isolated() -> Graph {
        let names = Names { edges: vec![], halves: vec![], vertices: vec!["*".into()] };
        Graph::build_named(vec![], vec![], vec![], 1, names)
    }

    /// The `X`-corolla: ports `X`, inner sides `X†`, one vertex.
    /// Edge `i` is the port labelled `labels[i]`, edge `n + i` is its dagger.
    pub fn corolla<S: AsRef<str>>(labels: &[S]) -> Result<Graph> {
        let n = labels.len();
        let mut edges: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
        for (i, l) in edges.clone().iter().enumerate() {
            if edges[..i].contains(l) {
                return Err(Error::BadParameter(format!("corolla label {l} repeated")));
            }
        }
        edges.extend(labels.iter().map(|l| format!("{}'", l.as_ref())));
        let halves = labels.iter().map(|l| format!("h{}", l.as_ref())).collect();
        let names = Names { edges, halves, vertices: vec!["*".into()] };
        let tau = (0..2 * n).map(|e| if e < n { e + n } else { e - n }).collect();
        let s = (n..2 * n).collect();
        let t = vec![0; n];
        Graph::with_names(tau, s, t, 1, names)
    }

    /// The corolla on `1..=n`.
    pub fn corolla_n(n: usize) -> Graph {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        Graph::corolla(&labels).expect("distinct labels")
    }

    /// The wheel `W^m`: edges `a1..a2m`, `τ(a2i) = a2i+1`, `τ(a2m) = a1`,
    /// vertex `v_i` incident on `a2i-1, a2i`.
    pub fn wheel(m: usize) -> Result<Graph> {
        if m == 0 {
            return Err(Error::BadParameter("wheel(0) is not a graph".into()));
        }
        let ne = 2 * m;
        // 0-based: edge j is a_{j+1}
        let mut tau = vec![0; ne];
        for i in 1..=m {
            let a2i = 2 * i - 1;
            let next = (2 * i) % ne;
            tau[a2i] = next;
            tau[next] = a2i;
        }
        let s = (0..ne).collect();
        let t = (0..ne).map(|j| j / 2).collect();
        let names = Names {
            edges: (1..=ne).map(|j| format!("a{j}")).collect(),
            halves: (1..=ne).map(|j| format!("h{j}")).collect(),
            vertices: (1..=m).map(|i| format!("v{i}")).collect(),
        };
        Graph::with_names(tau, s, t, m, names)
    }

    /// The line `L^k`: edges `l0..l(2k+1)`, `τ(l2i) = l2i+1`, vertex `v_i`
    /// incident on `l2i-1, l2i`. `L⁰` is the stick.
    pub fn line(k: usize) -> Graph {
        let ne = 2 * k + 2;
        let tau = (0..ne).map(|j| j ^ 1).collect();
        let s: Vec<usize> = (1..=2 * k).collect();
        let t = s.iter().map(|&j| (j - 1) / 2).collect();
        let names = Names {
            edges: (0..ne).map(|j| format!("l{j}")).collect(),
            halves: (1..=2 * k).map(|j| format!("h{j}")).collect(),
            vertices: (1..=k).map(|i| format!("v{i}")).collect(),
        };
        Graph::build_named(tau, s, t, k, names)
    }

    /// `D_{X,Y} = C_X ⊔ C_Y`.
    pub fn disjoint_corollas<S: AsRef<str>>(x: &[S], y: &[S]) -> Result<Graph> {
        Ok(Graph::corolla(x)?.disjoint_union(&Graph::corolla(y)?))
    }

    // ---- monoidal structure ----

    /// Tagged sum. Right-hand names that collide with left-hand names get a
    /// `~` suffix until they are fresh.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let ne = self.n_edges();
        let nh = self.n_halves();
        let mut tau = self.tau.clone();
        tau.extend(other.tau.iter().map(|&e| e + ne));
        let mut s = self.s.clone();
        s.extend(other.s.iter().map(|&e| e + ne));
        let mut t = self.t.clone();
        t.extend(other.t.iter().map(|&v| v + self.nv));
        let _ = nh;
        let fresh = |left: &[String], right: &[String]| -> Vec<String> {
            let mut out: Vec<String> = left.to_vec();
            for r in right {
                let mut name = r.clone();
                while out.contains(&name) {
                    name.push('~');
                }
                out.push(name);
            }
            out
        };
        let names = Names {
            edges: fresh(&self.names.edges, &other.names.edges),
            halves: fresh(&self.names.halves, &other.names.halves),
            vertices: fresh(&self.names.vertices, &other.names.vertices),
        };
        Graph::build_named(tau, s, t, self.nv + other.nv, names)
    }

    /// Applies bijections given as `new index = p[old index]`.
    pub fn relabel(&self, pe: &[usize], ph: &[usize], pv: &[usize]) -> Graph {
        let ne = self.n_edges();
        let nh = self.n_halves();
        let mut tau = vec![0; ne];
        let mut en = vec![String::new(); ne];
        for e in 0..ne {
            tau[pe[e]] = pe[self.tau[e]];
            en[pe[e]] = self.names.edges[e].clone();
        }
        let mut s = vec![0; nh];
        let mut t = vec![0; nh];
        let mut hn = vec![String::new(); nh];
        for h in 0..nh {
            s[ph[h]] = pe[self.s[h]];
            t[ph[h]] = pv[self.t[h]];
            hn[ph[h]] = self.names.halves[h].clone();
        }
        let mut vn = vec![String::new(); self.nv];
        for v in 0..self.nv {
            vn[pv[v]] = self.names.vertices[v].clone();
        }
        Graph::build_named(tau, s, t, self.nv, Names { edges: en, halves: hn, vertices: vn })
    }

    // ---- connectivity ----

    /// Connected components with their inclusions, ordered by smallest
    /// vertex then smallest edge. Reachability runs through τ-orbits and
    /// shared vertices.
    pub fn connected_components(&self) -> Vec<(Graph, Inclusion)> {
        let ne = self.n_edges();
        let mut uf = UnionFind::<usize>::new(ne + self.nv);
        for e in 0..ne {
            uf.union(e, self.tau[e]);
        }
        for h in 0..self.n_halves() {
            uf.union(self.s[h], ne + self.t[h]);
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut root_pos = std::collections::HashMap::new();
        // key: (smallest vertex or MAX, smallest edge)
        for x in 0..ne + self.nv {
            let r = uf.find(x);
            let idx = *root_pos.entry(r).or_insert_with(|| {
                groups.push((r, Vec::new()));
                groups.len() - 1
            });
            groups[idx].1.push(x);
        }
        let mut comps: Vec<(usize, usize, Vec<usize>)> = groups
            .into_iter()
            .map(|(_, xs)| {
                let minv = xs.iter().filter(|&&x| x >= ne).map(|&x| x - ne).min();
                let mine = xs.iter().filter(|&&x| x < ne).min().copied();
                (minv.unwrap_or(usize::MAX), mine.unwrap_or(usize::MAX), xs)
            })
            .collect();
        comps.sort();
        comps
            .into_iter()
            .map(|(_, _, xs)| {
                let edges: Vec<usize> = xs.iter().filter(|&&x| x < ne).copied().collect();
                let vertices: Vec<usize> =
                    xs.iter().filter(|&&x| x >= ne).map(|&x| x - ne).collect();
                let halves: Vec<usize> = (0..self.n_halves())
                    .filter(|&h| vertices.contains(&self.t[h]))
                    .collect();
                let inc = Inclusion { edges, halves, vertices };
                (self.subgraph(&inc), inc)
            })
            .collect()
    }

    /// The subgraph on the given (closed) id sets, renumbered in order.
    pub fn subgraph(&self, inc: &Inclusion) -> Graph {
        let mut epos = vec![usize::MAX; self.n_edges()];
        for (i, &e) in inc.edges.iter().enumerate() {
            epos[e] = i;
        }
        let mut vpos = vec![usize::MAX; self.nv];
        for (i, &v) in inc.vertices.iter().enumerate() {
            vpos[v] = i;
        }
        let tau = inc.edges.iter().map(|&e| epos[self.tau[e]]).collect();
        let s = inc.halves.iter().map(|&h| epos[self.s[h]]).collect();
        let t = inc.halves.iter().map(|&h| vpos[self.t[h]]).collect();
        let names = Names {
            edges: inc.edges.iter().map(|&e| self.names.edges[e].clone()).collect(),
            halves: inc.halves.iter().map(|&h| self.names.halves[h].clone()).collect(),
            vertices: inc.vertices.iter().map(|&v| self.names.vertices[v].clone()).collect(),
        };
        Graph::build_named(tau, s, t, inc.vertices.len(), names)
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stick_is_valid() {
        let g = Graph::stick();
        assert_eq!(g.ports(), vec![0, 1]);
        assert!(g.inner_edges().is_empty());
        assert_eq!(g.stick_count(), 1);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Graph::new(vec![0], vec![], vec![], 0), Err(Error::FixedPointInTau(_))));
        assert!(matches!(
            Graph::new(vec![1, 0], vec![0, 0], vec![0, 0], 1),
            Err(Error::NonInjectiveS(..))
        ));
        assert!(matches!(
            Graph::new(vec![1, 2, 0], vec![], vec![], 0),
            Err(Error::TauNotInvolutive(_))
        ));
        assert!(matches!(Graph::new(vec![1, 0], vec![5], vec![0], 1), Err(Error::DanglingId(_))));
    }

    #[test]
    fn named_graphs() {
        let w = Graph::wheel(1).unwrap();
        assert_eq!((w.n_edges(), w.n_vertices(), w.ports().len()), (2, 1, 0));
        assert_eq!(w.inner_edges().len(), 2);
        assert!(matches!(Graph::wheel(0), Err(Error::BadParameter(_))));
        assert_eq!(Graph::line(0), Graph::stick().renamed(Graph::line(0).names().clone()).unwrap());
        let c = Graph::corolla(&["a", "b", "c"]).unwrap();
        assert_eq!((c.n_edges(), c.n_halves(), c.n_vertices()), (6, 3, 1));
        let ports: Vec<&str> = c.ports().iter().map(|&e| c.edge_name(e)).collect();
        assert_eq!(ports, vec!["a", "b", "c"]);
        assert!(c.inner_edges().is_empty());
        let l2 = Graph::line(2);
        assert_eq!(l2.ports(), vec![0, 5]);
        assert_eq!(l2.edges_at(1), vec![3, 4]);
    }

    #[test]
    fn components() {
        let g = Graph::corolla(&["x"]).unwrap().disjoint_union(&Graph::stick());
        assert_eq!(g.component_count(), 2);
        assert_eq!(Graph::wheel(3).unwrap().component_count(), 1);
        assert_eq!(Graph::empty().component_count(), 0);
        let ss = Graph::stick().disjoint_union(&Graph::stick());
        assert_eq!((ss.n_edges(), ss.component_count()), (4, 2));
        let cw = Graph::corolla_n(2).disjoint_union(&Graph::wheel(1).unwrap());
        assert_eq!(cw.n_edges(), 6);
    }
}
