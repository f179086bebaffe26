//! Bounded free constructions on a finite graphical species.
//!
//! Values of a composite such as `T D L S` are nested [`Val`]s: a `T` or `L`
//! layer is a decorated graph whose vertices carry values of the next layer,
//! a `D` layer is `Pass` (the inclusion), `Unit` (a formal unit at arity 2)
//! or `Zero` (a contracted unit at arity 0). The word naming the composite
//! is tracked by the caller.
//!
//! An `L` value is a disjoint union of corollas. A `T` value is connected
//! and has no stick component.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::canon::{self, Decor, Key};
use crate::error::{Error, Result};
use crate::etale::glue_ports;
use crate::graph::Graph;
use crate::perm::{self, Perm};
use crate::pointed::delete_vertices;
use crate::report::{Check, Report};
use crate::species::Species;
use crate::substitution::{enumerate_x_graphs, substitute, Bounds, EdgeOrigin, GraphOfGraphs, Piece};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Atom { n: usize, e: usize },
    Graph(Box<DGraph>),
    /// Formal unit with colours `(c, ωc)`.
    Unit(usize),
    /// Contracted unit on the class `{c, ωc}`, stored as its smaller colour.
    Zero(usize),
    Pass(Box<Val>),
}

/// A graph with labelled ports, coloured edges and decorated vertices.
/// The decoration at `v` has colour `colours[τ s(h_i)]` at position `i`;
/// the value's own position `l` is the port labelled `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DGraph {
    pub graph: Graph,
    pub labels: Vec<Option<usize>>,
    pub colours: Vec<usize>,
    pub decs: Vec<Val>,
}

impl DGraph {
    pub fn empty() -> DGraph {
        DGraph { graph: Graph::empty(), labels: vec![], colours: vec![], decs: vec![] }
    }

    /// The corolla decorated by `dec`, with port `i` labelled `labels[i]`.
    pub fn corolla(s: &Species, dec: Val, labels: &[usize]) -> DGraph {
        let n = labels.len();
        let col = colours(s, &dec);
        let graph = Graph::corolla_n(n);
        let mut lab = vec![None; 2 * n];
        let mut c = vec![0; 2 * n];
        for i in 0..n {
            lab[i] = Some(labels[i]);
            c[i] = col[i];
            c[n + i] = s.omega(col[i]);
        }
        DGraph { graph, labels: lab, colours: c, decs: vec![dec] }
    }

    /// Tagged sum; labels of `other` are shifted by `shift`.
    pub fn union(&self, other: &DGraph, shift: usize) -> DGraph {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().map(|l| l.map(|x| x + shift)));
        let mut colours = self.colours.clone();
        colours.extend(&other.colours);
        let mut decs = self.decs.clone();
        decs.extend(other.decs.iter().cloned());
        DGraph { graph: self.graph.disjoint_union(&other.graph), labels, colours, decs }
    }

    pub fn arity(&self) -> usize {
        self.labels.iter().flatten().count()
    }

    /// `port[l]` is the edge labelled `l`.
    pub fn ports_by_label(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.arity()];
        for (e, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                out[*l] = e;
            }
        }
        out
    }

    /// Renumbers the labels `0..k` keeping their order.
    fn compact_labels(&mut self) {
        let mut ls: Vec<usize> = self.labels.iter().flatten().copied().collect();
        ls.sort();
        for l in self.labels.iter_mut().flatten() {
            *l = ls.binary_search(l).unwrap();
        }
    }
}

pub fn arity(v: &Val) -> usize {
    match v {
        Val::Atom { n, .. } => *n,
        Val::Graph(g) => g.arity(),
        Val::Unit(_) => 2,
        Val::Zero(_) => 0,
        Val::Pass(x) => arity(x),
    }
}

pub fn colours(s: &Species, v: &Val) -> Vec<usize> {
    match v {
        Val::Atom { n, e } => s.colour(*n, *e).to_vec(),
        Val::Graph(g) => g.ports_by_label().iter().map(|&e| g.colours[e]).collect(),
        Val::Unit(c) => vec![*c, s.omega(*c)],
        Val::Zero(_) => vec![],
        Val::Pass(x) => colours(s, x),
    }
}

pub fn zero(s: &Species, c: usize) -> Val {
    Val::Zero(c.min(s.omega(c)))
}

/// `v·σ`: position `i` of the result is position `σ(i)` of `v`.
pub fn act(s: &Species, v: &Val, sigma: &[usize]) -> Val {
    match v {
        Val::Atom { n, e } => Val::Atom { n: *n, e: s.act(*n, *e, sigma) },
        Val::Unit(c) => {
            if sigma == [1, 0] {
                Val::Unit(s.omega(*c))
            } else {
                Val::Unit(*c)
            }
        }
        Val::Zero(c) => Val::Zero(*c),
        Val::Pass(x) => Val::Pass(Box::new(act(s, x, sigma))),
        Val::Graph(g) => {
            let inv = perm::inverse(sigma);
            let mut g = (**g).clone();
            for l in g.labels.iter_mut().flatten() {
                *l = inv[*l];
            }
            Val::Graph(Box::new(g))
        }
    }
}

/// A complete isomorphism invariant of values of the same composite.
pub fn key(s: &Species, v: &Val) -> Key {
    match v {
        Val::Atom { n, e } => vec![0, *n as u64, *e as u64],
        Val::Unit(c) => vec![1, *c as u64],
        Val::Zero(c) => vec![2, (*c).min(s.omega(*c)) as u64],
        Val::Pass(x) => {
            let mut k = vec![3];
            k.extend(key(s, x));
            k
        }
        Val::Graph(g) => graph_key(s, g),
    }
}

fn graph_key(s: &Species, g: &DGraph) -> Key {
    let codes: Vec<u64> = (0..g.graph.n_edges())
        .map(|e| (g.labels[e].map(|l| l as u64 + 1).unwrap_or(0) << 32) | g.colours[e] as u64)
        .collect();
    let cache: RefCell<HashMap<(usize, Vec<usize>), Key>> = RefCell::new(HashMap::new());
    let vcode = |v: usize, slots: &[usize]| -> Key {
        let k = (v, slots.to_vec());
        if let Some(x) = cache.borrow().get(&k) {
            return x.clone();
        }
        let x = key(s, &act(s, &g.decs[v], slots));
        cache.borrow_mut().insert(k, x.clone());
        x
    };
    let cert = canon::certificate(&g.graph, Decor { edge_code: Some(&codes), vertex_code: Some(&vcode) });
    let mut k = vec![4, cert.n_vertices as u64, cert.edges.len() as u64];
    for (a, b, c) in &cert.edges {
        k.extend([*a as u64, *b as u64, *c]);
    }
    for list in [&cert.decorations, &cert.isolated] {
        k.push(list.len() as u64);
        for d in list {
            k.push(d.len() as u64);
            k.extend(d);
        }
    }
    k
}

/// A short text form, for reports.
pub fn render(s: &Species, v: &Val) -> String {
    match v {
        Val::Atom { n, e } => s.names[*n][*e].clone(),
        Val::Unit(c) => format!("ε({})", s.palette.names[*c]),
        Val::Zero(c) => format!("z({})", s.palette.names[*c]),
        Val::Pass(x) => format!("η({})", render(s, x)),
        Val::Graph(g) => {
            let mut parts = Vec::new();
            for vtx in 0..g.graph.n_vertices() {
                let slots: Vec<String> = g
                    .graph
                    .halves_at(vtx)
                    .iter()
                    .map(|&h| {
                        let e = g.graph.tau(g.graph.s(h));
                        match g.labels[e] {
                            Some(l) => l.to_string(),
                            None => format!("e{}", e.min(g.graph.tau(e))),
                        }
                    })
                    .collect();
                parts.push(format!("{}[{}]", render(s, &g.decs[vtx]), slots.join(",")));
            }
            for (a, b) in g.graph.orbits() {
                if g.graph.is_stick_edge(a) {
                    let show = |e: usize| g.labels[e].map(|l| l.to_string()).unwrap_or_else(|| "-".into());
                    parts.push(format!("|{},{}|", show(a), show(b)));
                }
            }
            format!("{{{}}}", parts.join(" "))
        }
    }
}

fn expect_graph(v: &Val) -> Result<&DGraph> {
    match v {
        Val::Graph(g) => Ok(g),
        _ => Err(Error::BadParameter("expected a graph value".into())),
    }
}

/// `η^T` and `η^L`.
pub fn eta_graph(s: &Species, v: &Val) -> Val {
    let n = arity(v);
    Val::Graph(Box::new(DGraph::corolla(s, v.clone(), &(0..n).collect::<Vec<_>>())))
}

pub fn eta_d(v: &Val) -> Val {
    Val::Pass(Box::new(v.clone()))
}

/// Substitutes the graph value at every vertex.
pub fn substitute_decs(dg: &DGraph) -> Result<DGraph> {
    let mut pieces = Vec::new();
    let mut inner = Vec::new();
    for d in &dg.decs {
        let p = expect_graph(d)?;
        pieces.push(Piece { graph: p.graph.clone(), ports: p.ports_by_label() });
        inner.push(p);
    }
    let gg = GraphOfGraphs::new(dg.graph.clone(), pieces)?;
    let sub = substitute(&gg)?;
    let mut labels = vec![None; sub.graph.n_edges()];
    for (e, l) in dg.labels.iter().enumerate() {
        if l.is_some() {
            labels[sub.base_edges[e]] = *l;
        }
    }
    let colours = sub
        .edge_origin
        .iter()
        .map(|o| match o {
            EdgeOrigin::Base(e) => dg.colours[*e],
            EdgeOrigin::Piece(v, pe) => inner[*v].colours[*pe],
        })
        .collect();
    let decs = sub.vertex_origin.iter().map(|&(v, w)| inner[v].decs[w].clone()).collect();
    Ok(DGraph { graph: sub.graph, labels, colours, decs })
}

/// `μ^T` and `μ^L`.
pub fn mu_graph(v: &Val) -> Result<Val> {
    Ok(Val::Graph(Box::new(substitute_decs(expect_graph(v)?)?)))
}

/// `μ^D`.
pub fn mu_d(v: &Val) -> Result<Val> {
    match v {
        Val::Pass(x) => Ok((**x).clone()),
        Val::Unit(_) | Val::Zero(_) => Ok(v.clone()),
        _ => Err(Error::BadParameter("expected a D value".into())),
    }
}

/// Applies `f` to every vertex decoration of a `T` or `L` value.
pub fn map_graph(v: &Val, f: &dyn Fn(&Val) -> Result<Val>) -> Result<Val> {
    let g = expect_graph(v)?;
    let decs = g.decs.iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(Val::Graph(Box::new(DGraph { decs, ..g.clone() })))
}

/// Applies `f` under `Pass`; units are fixed.
pub fn map_d(v: &Val, f: &dyn Fn(&Val) -> Result<Val>) -> Result<Val> {
    match v {
        Val::Pass(x) => Ok(Val::Pass(Box::new(f(x)?))),
        Val::Unit(_) | Val::Zero(_) => Ok(v.clone()),
        _ => Err(Error::BadParameter("expected a D value".into())),
    }
}

fn unpass(v: &Val) -> Result<Val> {
    match v {
        Val::Pass(x) => Ok((**x).clone()),
        _ => Err(Error::BadParameter("expected an included value".into())),
    }
}

/// `λ_DT: TD ⇒ DT`: deletes the vertices marked by units. A graph made
/// only of marked vertices becomes the unit on the colour of its port
/// labelled 0, or a contracted unit when it has no ports.
pub fn lambda_dt(s: &Species, v: &Val) -> Result<Val> {
    let g = expect_graph(v)?;
    let marked: Vec<usize> =
        (0..g.decs.len()).filter(|&x| matches!(g.decs[x], Val::Unit(_) | Val::Zero(_))).collect();
    if !g.graph.is_empty() && marked.len() == g.graph.n_vertices() {
        let ports = g.ports_by_label();
        return Ok(match ports.first() {
            Some(&p) => Val::Unit(g.colours[p]),
            None if g.graph.n_edges() > 0 => zero(s, g.colours[0]),
            None => match &g.decs[0] {
                Val::Zero(c) => zero(s, *c),
                _ => unreachable!(),
            },
        });
    }
    let d = delete_vertices(&g.graph, &marked)?;
    let mut labels = vec![None; d.target.n_edges()];
    let mut colours = vec![0; d.target.n_edges()];
    for e in 0..g.graph.n_edges() {
        colours[d.edges[e]] = g.colours[e];
        if g.labels[e].is_some() {
            labels[d.edges[e]] = g.labels[e];
        }
    }
    let mut decs = vec![Val::Zero(0); d.target.n_vertices()];
    for x in 0..g.graph.n_vertices() {
        if let Some(w) = d.vertices[x] {
            decs[w] = unpass(&g.decs[x])?;
        }
    }
    Ok(Val::Pass(Box::new(Val::Graph(Box::new(DGraph { graph: d.target, labels, colours, decs })))))
}

/// Splits a decorated graph into an `L` value whose corollas carry its
/// connected components as `T` values.
pub fn split_components(s: &Species, g: &DGraph) -> Val {
    let mut out = DGraph::empty();
    for (cg, inc) in g.graph.connected_components() {
        let mut comp = DGraph {
            graph: cg,
            labels: inc.edges.iter().map(|&e| g.labels[e]).collect(),
            colours: inc.edges.iter().map(|&e| g.colours[e]).collect(),
            decs: inc.vertices.iter().map(|&v| g.decs[v].clone()).collect(),
        };
        let mut outer: Vec<usize> = comp.labels.iter().flatten().copied().collect();
        outer.sort();
        comp.compact_labels();
        let c = DGraph::corolla(s, Val::Graph(Box::new(comp)), &outer);
        let shift = 0;
        out = out.union(&c, shift);
    }
    Val::Graph(Box::new(out))
}

/// `λ_LT: TL ⇒ LT`: substitutes the tuples and splits into components.
pub fn lambda_lt(s: &Species, v: &Val) -> Result<Val> {
    let g = substitute_decs(expect_graph(v)?)?;
    Ok(split_components(s, &g))
}

/// `λ_LD: DL ⇒ LD`.
pub fn lambda_ld(s: &Species, v: &Val) -> Result<Val> {
    match v {
        Val::Pass(x) => map_graph(x, &|d| Ok(eta_d(d))),
        Val::Unit(c) => Ok(Val::Graph(Box::new(DGraph::corolla(s, Val::Unit(*c), &[0, 1])))),
        Val::Zero(c) => Ok(Val::Graph(Box::new(DGraph::corolla(s, Val::Zero(*c), &[])))),
        _ => Err(Error::BadParameter("expected a D value".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    DT,
    LT,
    LD,
}

impl Law {
    /// `(M, N)` for `λ: MN ⇒ NM`.
    pub fn letters(self) -> (char, char) {
        match self {
            Law::DT => ('T', 'D'),
            Law::LT => ('T', 'L'),
            Law::LD => ('D', 'L'),
        }
    }

    pub fn apply(self, s: &Species, v: &Val) -> Result<Val> {
        match self {
            Law::DT => lambda_dt(s, v),
            Law::LT => lambda_lt(s, v),
            Law::LD => lambda_ld(s, v),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Law::DT => "DT",
            Law::LT => "LT",
            Law::LD => "LD",
        }
    }
}

fn eta(s: &Species, m: char, v: &Val) -> Val {
    match m {
        'D' => eta_d(v),
        _ => eta_graph(s, v),
    }
}

fn mu(m: char, v: &Val) -> Result<Val> {
    match m {
        'D' => mu_d(v),
        _ => mu_graph(v),
    }
}

fn map(m: char, v: &Val, f: &dyn Fn(&Val) -> Result<Val>) -> Result<Val> {
    match m {
        'D' => map_d(v, f),
        _ => map_graph(v, f),
    }
}

/// The two sides of one of Beck's axioms on one input.
pub fn beck_sides(s: &Species, law: Law, axiom: usize, x: &Val) -> Result<(Val, Val)> {
    let (m, n) = law.letters();
    let lam = |v: &Val| law.apply(s, v);
    Ok(match axiom {
        // λ ∘ η^M N = N η^M, on N
        1 => (lam(&eta(s, m, x))?, map(n, x, &|v| Ok(eta(s, m, v)))?),
        // λ ∘ M η^N = η^N M, on M
        2 => (lam(&map(m, x, &|v| Ok(eta(s, n, v)))?)?, eta(s, n, x)),
        // λ ∘ μ^M N = N μ^M ∘ λ M ∘ M λ, on MMN
        3 => {
            let lhs = lam(&mu(m, x)?)?;
            let inner = map(m, x, &lam)?;
            let rhs = map(n, &lam(&inner)?, &|v| mu(m, v))?;
            (lhs, rhs)
        }
        // λ ∘ M μ^N = μ^N M ∘ N λ ∘ λ N, on MNN
        4 => {
            let lhs = lam(&map(m, x, &|v| mu(n, v))?)?;
            let rhs = mu(n, &map(n, &lam(x)?, &lam)?)?;
            (lhs, rhs)
        }
        _ => return Err(Error::BadParameter(format!("axiom {axiom}"))),
    })
}

/// The word whose values feed the given axiom.
pub fn beck_word(law: Law, axiom: usize) -> String {
    let (m, n) = law.letters();
    match axiom {
        1 => n.to_string(),
        2 => m.to_string(),
        3 => format!("{m}{m}{n}"),
        _ => format!("{m}{n}{n}"),
    }
}

/// Both paths `TDL ⇒ LDT`.
pub fn yang_baxter_sides(s: &Species, x: &Val) -> Result<(Val, Val)> {
    let top = lambda_ld(s, &map_d(&lambda_dt(s, x)?, &|v| lambda_lt(s, v))?)?;
    let bottom = {
        let a = map_graph(x, &|v| lambda_ld(s, v))?;
        let b = lambda_lt(s, &a)?;
        map_graph(&b, &|v| lambda_dt(s, v))?
    };
    Ok((top, bottom))
}

/// Contracted units on a colour fixed by ω are not identified with
/// anything else at arity 0; the report says which colours these are.
fn note_fixed_colours(s: &Species, r: &mut Report) {
    let fixed: Vec<&str> =
        (0..s.palette.len()).filter(|&c| s.omega(c) == c).map(|c| s.palette.names[c].as_str()).collect();
    if !fixed.is_empty() {
        r.notes.push(format!("ω fixes {}: arity-0 D is the plain coequaliser there", fixed.join(", ")));
    }
}

/// Checks Beck's four axioms for `law` on every enumerated input.
/// `layers` bounds the outermost layer first.
pub fn beck_sweep(s: &Species, law: Law, budgets: &[usize], max_arity: usize, max_valency: usize) -> Result<Report> {
    let mut r = Report::new(&format!("distributive law {}", law.name()));
    note_fixed_colours(s, &mut r);
    for ax in 1..=4 {
        let word = beck_word(law, ax);
        let layers = graded_layers(&word, budgets, max_arity, max_valency);
        let vals = enumerate_word(s, &word, &layers)?;
        let mut c = Check::new(&format!("{}_axiom{ax}", law.name()));
        for v in vals.iter().flatten() {
            let (l, rr) = beck_sides(s, law, ax, v)?;
            c.record(Some(key(s, &l) == key(s, &rr)), || {
                format!("{} gives {} vs {}", render(s, v), render(s, &l), render(s, &rr))
            });
        }
        r.checks.push(c);
    }
    Ok(r)
}

/// Checks that the two composites `TDL ⇒ LDT` agree.
pub fn yang_baxter_sweep(s: &Species, budgets: &[usize], max_arity: usize, max_valency: usize) -> Result<Report> {
    let mut r = Report::new("Yang-Baxter on TDL");
    note_fixed_colours(s, &mut r);
    let vals = enumerate_word(s, "TDL", &graded_layers("TDL", budgets, max_arity, max_valency))?;
    let mut c = Check::new("yang_baxter");
    for v in vals.iter().flatten() {
        let (a, b) = yang_baxter_sides(s, v)?;
        c.record(Some(key(s, &a) == key(s, &b)), || {
            format!("{} gives {} vs {}", render(s, v), render(s, &a), render(s, &b))
        });
    }
    r.checks.push(c);
    Ok(r)
}

/// Per-letter enumeration bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layer {
    pub max_arity: usize,
    /// Vertices of a `T` graph, or corollas of an `L` tuple.
    pub max_vertices: usize,
    pub max_valency: usize,
}

/// Layers for `word` where the `T` and `L` letters, from the outside in,
/// take their vertex bounds from `budgets` (the last one repeats).
pub fn graded_layers(word: &str, budgets: &[usize], max_arity: usize, max_valency: usize) -> Vec<Layer> {
    let mut k = 0;
    word.chars()
        .map(|c| {
            let b = budgets[k.min(budgets.len() - 1)];
            if c != 'D' {
                k += 1;
            }
            Layer { max_arity, max_vertices: b, max_valency }
        })
        .collect()
}

/// Values by arity.
pub type Vals = Vec<Vec<Val>>;

/// All values of the composite `word` over `s` within the layer bounds
/// (outermost letter first), one per isomorphism class, ordered by key.
pub fn enumerate_word(s: &Species, word: &str, layers: &[Layer]) -> Result<Vals> {
    let letters: Vec<char> = word.chars().collect();
    if letters.len() > layers.len() {
        return Err(Error::BadParameter(format!("{} layers given for {word}", layers.len())));
    }
    let max_arity = layers.iter().map(|l| l.max_arity).max().unwrap_or(s.nmax);
    let mut vals: Vals = (0..=max_arity.max(s.nmax))
        .map(|n| (0..s.size(n)).map(|e| Val::Atom { n, e }).collect())
        .collect();
    for (i, &c) in letters.iter().enumerate().rev() {
        let b = layers[i];
        vals = match c {
            'T' => enumerate_t(s, &vals, b)?,
            'L' => enumerate_l(s, &vals, b)?,
            'D' => enumerate_d(s, &vals, b),
            _ => return Err(Error::BadParameter(format!("unknown letter {c}"))),
        };
    }
    Ok(vals)
}

fn sorted_unique(s: &Species, vs: Vec<Val>) -> Vec<Val> {
    let mut m: BTreeMap<Key, Val> = BTreeMap::new();
    for v in vs {
        m.entry(key(s, &v)).or_insert(v);
    }
    m.into_values().collect()
}

fn enumerate_d(s: &Species, inner: &Vals, b: Layer) -> Vals {
    let mut out: Vals = vec![Vec::new(); b.max_arity + 1];
    for (n, vs) in inner.iter().enumerate().take(b.max_arity + 1) {
        out[n].extend(vs.iter().map(eta_d));
    }
    if b.max_arity >= 2 {
        for c in 0..s.palette.len() {
            out[2].push(Val::Unit(c));
        }
    }
    for c in 0..s.palette.len() {
        if c <= s.omega(c) {
            out[0].push(Val::Zero(c));
        }
    }
    out.into_iter().map(|v| sorted_unique(s, v)).collect()
}

fn enumerate_t(s: &Species, inner: &Vals, b: Layer) -> Result<Vals> {
    let mut out: Vals = vec![Vec::new(); b.max_arity + 1];
    let valency = b.max_valency.min(inner.len().saturating_sub(1));
    for n in 0..=b.max_arity {
        let bounds = Bounds {
            max_vertices: b.max_vertices,
            max_valency: valency,
            connected_only: true,
            admissible_only: true,
        };
        for shape in enumerate_x_graphs(n, bounds)? {
            let g = &shape.graph;
            if g.n_vertices() == 0 {
                continue;
            }
            let mut labels = vec![None; g.n_edges()];
            for (&e, &l) in &shape.labels {
                labels[e] = Some(l);
            }
            let mut found = Vec::new();
            let mut col = vec![None; g.n_edges()];
            let mut decs = Vec::new();
            decorate(s, g, inner, 0, &mut col, &mut decs, &mut |col, decs| {
                found.push(Val::Graph(Box::new(DGraph {
                    graph: g.clone(),
                    labels: labels.clone(),
                    colours: col.iter().map(|c| c.unwrap()).collect(),
                    decs: decs.to_vec(),
                })));
            });
            out[n].extend(found);
        }
    }
    Ok(out.into_iter().map(|v| sorted_unique(s, v)).collect())
}

fn decorate(
    s: &Species,
    g: &Graph,
    inner: &Vals,
    v: usize,
    col: &mut Vec<Option<usize>>,
    decs: &mut Vec<Val>,
    emit: &mut dyn FnMut(&[Option<usize>], &[Val]),
) {
    if v == g.n_vertices() {
        emit(col, decs);
        return;
    }
    let hs = g.halves_at(v).to_vec();
    let n = hs.len();
    let Some(cands) = inner.get(n) else { return };
    for d in cands {
        let dc = colours(s, d);
        let mut log = Vec::new();
        let mut ok = true;
        for i in 0..n {
            let e = g.tau(g.s(hs[i]));
            for (x, c) in [(e, dc[i]), (g.tau(e), s.omega(dc[i]))] {
                match col[x] {
                    Some(y) if y != c => ok = false,
                    Some(_) => {}
                    None => {
                        col[x] = Some(c);
                        log.push(x);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            decs.push(d.clone());
            decorate(s, g, inner, v + 1, col, decs, emit);
            decs.pop();
        }
        for x in log {
            col[x] = None;
        }
    }
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn enumerate_l(s: &Species, inner: &Vals, b: Layer) -> Result<Vals> {
    let mut out: Vals = vec![Vec::new(); b.max_arity + 1];
    let empty: Vec<Val> = Vec::new();
    let nullary = inner.first().unwrap_or(&empty);
    for n in 0..=b.max_arity {
        for blocks in set_partitions(n) {
            if blocks.len() > b.max_vertices || blocks.iter().any(|bl| bl.len() >= inner.len()) {
                continue;
            }
            // choices for the labelled blocks
            let mut tuples: Vec<Vec<Val>> = vec![Vec::new()];
            for bl in &blocks {
                let mut next = Vec::new();
                for t in &tuples {
                    for d in &inner[bl.len()] {
                        let mut t2 = t.clone();
                        t2.push(d.clone());
                        next.push(t2);
                    }
                }
                tuples = next;
            }
            for extra in 0..=b.max_vertices - blocks.len() {
                for multiset in multisets(nullary.len(), extra) {
                    for t in &tuples {
                        let mut g = DGraph::empty();
                        for (bl, d) in blocks.iter().zip(t) {
                            g = g.union(&DGraph::corolla(s, d.clone(), bl), 0);
                        }
                        for &i in &multiset {
                            g = g.union(&DGraph::corolla(s, nullary[i].clone(), &[]), 0);
                        }
                        out[n].push(Val::Graph(Box::new(g)));
                    }
                }
            }
        }
    }
    Ok(out.into_iter().map(|v| sorted_unique(s, v)).collect())
}

fn multisets(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(k: usize, size: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in lo..k {
            cur.push(i);
            rec(k, size, i, cur, out);
            cur.pop();
        }
    }
    rec(k, size, 0, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    T,
    L,
    D,
    Tx,
    Ldt,
}

impl Level {
    pub fn word(self) -> &'static str {
        match self {
            Level::T => "T",
            Level::L => "L",
            Level::D => "D",
            Level::Tx => "LT",
            Level::Ldt => "LDT",
        }
    }

    pub fn parse(x: &str) -> Result<Level> {
        Ok(match x {
            "T" => Level::T,
            "L" => Level::L,
            "D" => Level::D,
            "Tx" => Level::Tx,
            "LDT" => Level::Ldt,
            _ => return Err(Error::Parse(format!("unknown level {x}"))),
        })
    }
}

/// The free construction at one arity, within `max_vertices` per layer and
/// the species' valency bound.
pub fn free_apply(s: &Species, level: Level, n: usize, max_vertices: usize) -> Result<Vec<Val>> {
    let word = level.word();
    let layer = Layer { max_arity: n.max(s.nmax), max_vertices, max_valency: s.nmax };
    let layers = vec![layer; word.len()];
    let mut vals = enumerate_word(s, word, &layers)?;
    if n >= vals.len() {
        return Ok(Vec::new());
    }
    Ok(std::mem::take(&mut vals[n]))
}

/// The flat form of an `LDT` value: one graph whose components are the `T`
/// graphs, the labelled sticks of the units, and unlabelled sticks for the
/// contracted units.
pub fn flatten_ldt(s: &Species, v: &Val) -> Result<DGraph> {
    let g = expect_graph(v)?;
    let mut out = DGraph::empty();
    for x in 0..g.graph.n_vertices() {
        let outer: Vec<usize> = g.graph.halves_at(x).iter().map(|&h| g.labels[g.graph.tau(g.graph.s(h))].unwrap()).collect();
        let part = match &g.decs[x] {
            Val::Pass(t) => {
                let mut t = expect_graph(t)?.clone();
                for l in t.labels.iter_mut().flatten() {
                    *l = outer[*l];
                }
                t
            }
            Val::Unit(c) => DGraph {
                graph: Graph::stick(),
                labels: vec![Some(outer[0]), Some(outer[1])],
                colours: vec![*c, s.omega(*c)],
                decs: vec![],
            },
            Val::Zero(c) => {
                DGraph { graph: Graph::stick(), labels: vec![None, None], colours: vec![*c, s.omega(*c)], decs: vec![] }
            }
            _ => return Err(Error::BadParameter("expected a D value in an LDT tuple".into())),
        };
        out = out.union(&part, 0);
    }
    Ok(out)
}

/// Inverse of [`flatten_ldt`].
pub fn regroup_ldt(s: &Species, g: &DGraph) -> Val {
    let mut out = DGraph::empty();
    for (cg, inc) in g.graph.connected_components() {
        let labels: Vec<Option<usize>> = inc.edges.iter().map(|&e| g.labels[e]).collect();
        let colours: Vec<usize> = inc.edges.iter().map(|&e| g.colours[e]).collect();
        let mut outer: Vec<usize> = labels.iter().flatten().copied().collect();
        outer.sort();
        let corolla = if cg.n_vertices() > 0 {
            let mut t = DGraph { graph: cg, labels, colours, decs: inc.vertices.iter().map(|&v| g.decs[v].clone()).collect() };
            t.compact_labels();
            DGraph::corolla(s, Val::Pass(Box::new(Val::Graph(Box::new(t)))), &outer)
        } else if outer.is_empty() {
            DGraph::corolla(s, zero(s, colours[0]), &[])
        } else {
            let first = if labels[0] == Some(outer[0]) { 0 } else { 1 };
            DGraph::corolla(s, Val::Unit(colours[first]), &outer)
        };
        out = out.union(&corolla, 0);
    }
    Val::Graph(Box::new(out))
}

/// `a ⊠ b` on flat `LDT` values.
pub fn ldt_box(s: &Species, a: &Val, b: &Val) -> Result<Val> {
    let fa = flatten_ldt(s, a)?;
    let fb = flatten_ldt(s, b)?;
    Ok(regroup_ldt(s, &fa.union(&fb, fa.arity())))
}

/// `ζ^{i‡j}` on flat `LDT` values.
pub fn ldt_zeta(s: &Species, a: &Val, i: usize, j: usize) -> Result<Val> {
    let f = flatten_ldt(s, a)?;
    let ports = f.ports_by_label();
    let (p, q) = (ports[i], ports[j]);
    if f.colours[p] != s.omega(f.colours[q]) {
        return Err(Error::ColourMismatch(format!("positions {i} and {j}")));
    }
    let (glued, qmap) = glue_ports(&f.graph, &[(p, q)])?;
    let mut labels = vec![None; glued.n_edges()];
    let mut colours = vec![0; glued.n_edges()];
    for e in 0..f.graph.n_edges() {
        colours[qmap.edges[e]] = f.colours[e];
        if e != p && e != q && f.labels[e].is_some() {
            labels[qmap.edges[e]] = f.labels[e];
        }
    }
    let mut g = DGraph { graph: glued, labels, colours, decs: f.decs.clone() };
    g.compact_labels();
    Ok(regroup_ldt(s, &g))
}

/// `ε(c)` in the flat `LDT` form.
pub fn ldt_eps(s: &Species, c: usize) -> Val {
    Val::Graph(Box::new(DGraph::corolla(s, Val::Unit(c), &[0, 1])))
}

/// `T` vertices plus units and contracted units.
pub fn ldt_weight(v: &Val) -> usize {
    match v {
        Val::Graph(g) => g
            .decs
            .iter()
            .map(|d| match d {
                Val::Pass(t) => match &**t {
                    Val::Graph(t) => t.graph.n_vertices(),
                    _ => 1,
                },
                _ => 1,
            })
            .sum(),
        _ => 0,
    }
}

/// The free circuit algebra `LDT S` cut down to arity `≤ N_max` and weight
/// `≤ max_weight`, with its carrier.
pub struct FreeAlgebra {
    pub algebra: crate::circuit::CircuitAlgebra,
    pub carrier: Vec<Vec<Val>>,
}

pub fn free_ldt_algebra(s: &Species, nmax: usize, max_weight: usize) -> Result<FreeAlgebra> {
    let layer = Layer { max_arity: nmax, max_vertices: max_weight, max_valency: s.nmax };
    let vals = enumerate_word(s, "LDT", &[layer; 3])?;
    let carrier: Vec<Vec<Val>> =
        vals.into_iter().take(nmax + 1).map(|v| v.into_iter().filter(|x| ldt_weight(x) <= max_weight).collect()).collect();
    let mut index: HashMap<Key, (usize, usize)> = HashMap::new();
    for (n, vs) in carrier.iter().enumerate() {
        for (i, v) in vs.iter().enumerate() {
            index.insert(key(s, v), (n, i));
        }
    }
    let find = |v: &Val| index.get(&key(s, v)).map(|&(_, i)| i);
    let palette = s.palette.clone();
    let mut names = Vec::new();
    let mut cols = Vec::new();
    let mut action = Vec::new();
    for (n, vs) in carrier.iter().enumerate() {
        names.push(vs.iter().map(|v| render(s, v)).collect());
        cols.push(vs.iter().map(|v| colours(s, v)).collect());
        let perms: Vec<Perm> = perm::permutations(n);
        let mut rows = Vec::new();
        for v in vs {
            let row = perms
                .iter()
                .map(|p| find(&act(s, v, p)).ok_or_else(|| Error::OutOfBounds("carrier not closed under the action".into())))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        action.push(rows);
    }
    let species = Species::new(palette, names, cols, action)?;
    let unit = find(&Val::Graph(Box::new(DGraph::empty())));
    let c = &carrier;
    let algebra = crate::circuit::CircuitAlgebra::from_fns(
        species,
        |m, a, n, b| ldt_box(s, &c[m][a], &c[n][b]).ok().and_then(|v| find(&v)),
        |n, i, j, a| ldt_zeta(s, &c[n][a], i, j).ok().and_then(|v| find(&v)),
        |col| find(&ldt_eps(s, col)),
        unit,
        true,
    )?;
    Ok(FreeAlgebra { algebra, carrier })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(a: usize, v: usize) -> Layer {
        Layer { max_arity: a, max_vertices: v, max_valency: 3 }
    }

    #[test]
    fn free_counts() {
        let k = Species::terminal(3);
        assert_eq!(free_apply(&k, Level::T, 0, 1).unwrap().len(), 2);
        let d2 = free_apply(&k, Level::D, 2, 1).unwrap();
        assert_eq!(d2.len(), k.size(2) + k.palette.len());
        assert_eq!(free_apply(&k, Level::L, 0, 0).unwrap().len(), 1);
    }

    #[test]
    fn keys_see_isomorphism() {
        let k = Species::terminal(3);
        let t = enumerate_word(&k, "T", &[layer(2, 2)]).unwrap();
        for vs in &t {
            for v in vs {
                let n = arity(v);
                for p in perm::permutations(n) {
                    let w = act(&k, v, &p);
                    assert_eq!(colours(&k, &w).len(), n);
                    let back = act(&k, &w, &perm::inverse(&p));
                    assert_eq!(key(&k, &back), key(&k, v));
                }
            }
        }
    }

    #[test]
    fn line_of_units() {
        let k = Species::terminal(3);
        let l = Graph::line(2);
        let g = DGraph {
            labels: (0..l.n_edges()).map(|e| match e {
                0 => Some(0),
                e if e == l.n_edges() - 1 => Some(1),
                _ => None,
            }).collect(),
            colours: vec![0; l.n_edges()],
            decs: vec![Val::Unit(0), Val::Unit(0)],
            graph: l,
        };
        assert_eq!(lambda_dt(&k, &Val::Graph(Box::new(g))).unwrap(), Val::Unit(0));
    }

    #[test]
    fn beck_small() {
        let k = Species::terminal(2);
        for law in [Law::DT, Law::LT, Law::LD] {
            for ax in 1..=4 {
                let word = beck_word(law, ax);
                let vals = enumerate_word(&k, &word, &vec![layer(2, 2); word.len()]).unwrap();
                for v in vals.iter().flatten() {
                    let (l, r) = beck_sides(&k, law, ax, v).unwrap();
                    assert_eq!(key(&k, &l), key(&k, &r), "{} axiom {ax} on {}", law.name(), render(&k, v));
                }
            }
        }
    }

    #[test]
    fn yang_baxter_small() {
        let k = Species::terminal(2);
        let vals = enumerate_word(&k, "TDL", &[layer(2, 2); 3]).unwrap();
        for v in vals.iter().flatten() {
            let (a, b) = yang_baxter_sides(&k, v).unwrap();
            assert_eq!(key(&k, &a), key(&k, &b), "{}", render(&k, v));
        }
    }

    #[test]
    fn free_algebra_passes() {
        let k = Species::terminal(3);
        let fa = free_ldt_algebra(&k, 3, 1).unwrap();
        let r = crate::circuit::check_circuit_axioms(&fa.algebra);
        assert!(r.passed(), "{}", r.render());
    }
}
