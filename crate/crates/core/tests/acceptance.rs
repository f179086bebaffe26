//! Acceptance criteria 1 to 9. Each criterion prints one line; the test
//! fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use feyngraph::brauer::{
    all_diagrams, compose_brauer, tensor_brauer, wd_compose, wiring_port_labels, wiring_to_graph, BrauerDiagram,
    WiringDiagram,
};
use feyngraph::canon::{certificate, is_isomorphic, is_isomorphic_labeled, label_codes, Decor};
use feyngraph::circuit::{check_circuit_axioms, check_modular_axioms, derive_multiplication, CircuitAlgebra};
use feyngraph::etale::glue_ports;
use feyngraph::free::{self, free_ldt_algebra, ldt_weight, Law, Level};
use feyngraph::graph::Graph;
use feyngraph::io::named_graph;
use feyngraph::nerve::{
    algebra_morphisms, check_segal, natural_transformations, nerve, parity_algebra, probe_corpus, FinitePresheaf,
    MapKind,
};
use feyngraph::pointed::hom_pointed;
use feyngraph::species::{directed_sample, evaluate_species, Species};
use feyngraph::substitution::{
    compose_nested, enumerate_x_graphs, pull_to_colimit, substitute, Bounds, GraphOfGraphs, Piece, Substitution, XGraph,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(n: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    let el = t.elapsed();
    let in_time = el <= limit;
    let ok = o.ok && in_time;
    let verdict = if ok { "PASS" } else { "FAIL" };
    let time = format!("{:.1}s of {}s", el.as_secs_f64(), limit.as_secs());
    let late = if in_time { "" } else { " (over time)" };
    // written past the test harness capture so every line shows
    let mut out = std::io::stdout();
    writeln!(out, "criterion {n} [{verdict}] {title}: {} [{time}{late}]", o.detail).unwrap();
    out.flush().unwrap();
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn shape(g: &Graph) -> (usize, usize, usize) {
    (g.ports().len(), g.n_vertices(), g.inner_edges().len() / 2)
}

/// Whether the given half-edge and vertex bijections extend to an
/// isomorphism `a ≅ b` carrying the labels `la` onto `lb`. Falls back to
/// the canonical search when some edge is not reached from a half-edge.
fn explicit_iso(
    a: &Graph,
    b: &Graph,
    halves: &[usize],
    verts: &[usize],
    la: &[(usize, String)],
    lb: &[(usize, String)],
) -> bool {
    let search = || is_isomorphic_labeled(a, la, b, lb).is_some();
    if a.n_edges() != b.n_edges() || a.n_halves() != b.n_halves() || a.n_vertices() != b.n_vertices() {
        return false;
    }
    let bij = |m: &[usize], n: usize| {
        let mut seen = vec![false; n];
        m.len() == n && m.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
    };
    if !bij(halves, a.n_halves()) || !bij(verts, a.n_vertices()) {
        return false;
    }
    let mut edges = vec![usize::MAX; a.n_edges()];
    for h in 0..a.n_halves() {
        if b.t(halves[h]) != verts[a.t(h)] {
            return false;
        }
        let (e, f) = (a.s(h), b.s(halves[h]));
        edges[e] = f;
        if a.is_port(a.tau(e)) {
            edges[a.tau(e)] = b.tau(f);
        }
    }
    if edges.contains(&usize::MAX) {
        return search();
    }
    let labels: BTreeMap<usize, &String> = lb.iter().map(|(e, l)| (*e, l)).collect();
    bij(&edges, a.n_edges())
        && (0..a.n_edges()).all(|e| edges[a.tau(e)] == b.tau(edges[e]))
        && la.len() == lb.len()
        && la.iter().all(|(e, l)| labels.get(&edges[*e]) == Some(&l))
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let two = Graph::disjoint_corollas(&["a"], &["b"]).unwrap();
    let ports = two.ports();
    let (dumbbell, _) = glue_ports(&two, &[(ports[0], ports[1])]).unwrap();
    let graphs = [Graph::corolla_n(1), Graph::stick(), Graph::wheel(1).unwrap(), dumbbell];
    let want = [(1, 1, 0), (2, 0, 0), (0, 1, 1), (0, 2, 1)];
    let mut bad = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        if g.orbits().len() != 1 || shape(g) != want[i] {
            bad.push(format!("graph {i} has shape {:?}", shape(g)));
        }
        for (j, h) in graphs.iter().enumerate().skip(i + 1) {
            if is_isomorphic(g, h).is_some() {
                bad.push(format!("graphs {i} and {j} are isomorphic"));
            }
        }
    }
    let (w, _) = glue_ports(&Graph::corolla_n(2), &[(0, 1)]).unwrap();
    if is_isomorphic(&w, &Graph::wheel(1).unwrap()).is_none() {
        bad.push("C2 glued is not the wheel".into());
    }
    let s = Graph::stick();
    let (s2, _) = glue_ports(&s, &[(0, 1)]).unwrap();
    if s2 != s {
        bad.push("the glued stick is not the stick".into());
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            "four one-orbit graphs with shapes (1,1,0) (2,0,0) (0,1,1) (0,2,1), pairwise non-isomorphic; C2 glued = W; stick glued = stick".into()
        } else {
            bad.join("; ")
        },
    }
}

// ---------------------------------------------------------------- 2

fn diagrams(a: usize, b: usize) -> Vec<BrauerDiagram> {
    all_diagrams(a, b).into_iter().flat_map(|d| (0..=2).map(move |k| d.with_loops(k))).collect()
}

fn criterion_2() -> Outcome {
    let d: Vec<Vec<Vec<BrauerDiagram>>> = (0..=3).map(|a| (0..=3).map(|b| diagrams(a, b)).collect()).collect();
    let comp = |g: &BrauerDiagram, f: &BrauerDiagram| compose_brauer(g, f).unwrap();
    let mut bad = Vec::new();
    let (mut assoc, mut unit, mut inter) = (0usize, 0usize, 0usize);
    for a in 0..=3 {
        for b in 0..=3 {
            for f in &d[a][b] {
                unit += 1;
                if comp(&BrauerDiagram::identity(b), f) != *f || comp(f, &BrauerDiagram::identity(a)) != *f {
                    bad.push(format!("unit law fails at {f:?}"));
                }
                for c in 0..=3 {
                    for g in &d[b][c] {
                        let gf = comp(g, f);
                        for e in 0..=3 {
                            for h in &d[c][e] {
                                assoc += 1;
                                if comp(h, &gf) != comp(&comp(h, g), f) {
                                    bad.push(format!("associativity fails at {f:?} {g:?} {h:?}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for a in 0..=3 {
        for b in 0..=3 {
            for c in 0..=3 {
                for f in &d[a][b] {
                    for g in &d[b][c] {
                        pairs.push((f, g, comp(g, f)));
                    }
                }
            }
        }
    }
    for (f1, g1, c1) in &pairs {
        for (f2, g2, c2) in &pairs {
            inter += 1;
            let lhs = comp(&tensor_brauer(g1, g2), &tensor_brauer(f1, f2));
            if lhs != tensor_brauer(c1, c2) {
                bad.push(format!("interchange fails at {f1:?} {g1:?} {f2:?} {g2:?}"));
            }
        }
    }
    let circle = comp(&BrauerDiagram::cap(), &BrauerDiagram::cup());
    if circle != BrauerDiagram::empty().with_loops(1) {
        bad.push(format!("cap after cup is {circle:?}"));
    }
    let mut closure = 0usize;
    let down: Vec<&BrauerDiagram> = d.iter().flatten().flatten().filter(|x| x.is_downward()).collect();
    for f in &down {
        for g in &down {
            closure += 1;
            if !tensor_brauer(f, g).is_downward() {
                bad.push(format!("tensor leaves dBD at {f:?} {g:?}"));
            }
            if g.m == f.n && !comp(g, f).is_downward() {
                bad.push(format!("composite leaves dBD at {f:?} {g:?}"));
            }
        }
    }
    bad.truncate(5);
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "associativity {assoc}, unit {unit}, interchange {inter} instances; cap after cup = (empty, 1); dBD closed over {closure} pairs"
            )
        } else {
            bad.join("; ")
        },
    }
}

// ---------------------------------------------------------------- 3

fn inner_tuples(max_boundaries: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_boundaries {
        let mut next = Vec::new();
        for t in &layer {
            for a in 0..=3 {
                let mut t2: Vec<usize> = t.clone();
                t2.push(a);
                next.push(t2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn wirings(outer: usize, max_boundaries: usize) -> Vec<WiringDiagram> {
    let mut out = Vec::new();
    for inner in inner_tuples(max_boundaries) {
        let m: usize = inner.iter().sum();
        for d in all_diagrams(m, outer) {
            out.push(WiringDiagram::new(inner.clone(), d).unwrap());
        }
    }
    out
}

fn labelled(wd: &WiringDiagram) -> (Graph, Vec<(usize, String)>) {
    let g = wiring_to_graph(wd);
    let l = wiring_port_labels(wd).into_iter().map(|(e, j)| (e, j.to_string())).collect();
    (g, l)
}

fn criterion_3() -> Outcome {
    // The family of inner diagrams is closed under relabelling and both sides
    // are invariant under it, so one outer diagram per isomorphism class of
    // its graph covers every instance.
    let mut outers: BTreeMap<_, WiringDiagram> = BTreeMap::new();
    let mut n_outer = 0usize;
    for n in 0..=3 {
        for g in wirings(n, 3) {
            n_outer += 1;
            let cert = certificate(&wiring_to_graph(&g), Decor::default());
            outers.entry((n, cert)).or_insert(g);
        }
    }
    // Inner diagrams likewise matter only up to relabelling their inner
    // boundaries and points, which is an isomorphism of port-labelled graphs.
    let mut n_inner = 0usize;
    let family: Vec<Vec<WiringDiagram>> = (0..=3)
        .map(|a| {
            let mut classes: BTreeMap<_, WiringDiagram> = BTreeMap::new();
            for f in wirings(a, 3) {
                n_inner += 1;
                let g = wiring_to_graph(&f);
                let labels: Vec<(usize, u64)> = wiring_port_labels(&f).into_iter().map(|(e, j)| (e, j as u64)).collect();
                let codes = label_codes(&g, &labels);
                let cert = certificate(&g, Decor { edge_code: Some(&codes), vertex_code: None });
                classes.entry(cert).or_insert(f);
            }
            classes.into_values().collect()
        })
        .collect();
    let n_classes: usize = family.iter().map(Vec::len).sum();
    let (mut checked, mut looped) = (0usize, 0usize);
    let mut bad = Vec::new();
    for g in outers.values() {
        let base = wiring_to_graph(g);
        let mut fs: Vec<&WiringDiagram> = Vec::new();
        fn rec<'a>(
            g: &WiringDiagram,
            base: &Graph,
            family: &'a [Vec<WiringDiagram>],
            left: usize,
            fs: &mut Vec<&'a WiringDiagram>,
            checked: &mut usize,
            looped: &mut usize,
            bad: &mut Vec<String>,
        ) {
            let i = fs.len();
            if i == g.inner.len() {
                let owned: Vec<WiringDiagram> = fs.iter().map(|f| (*f).clone()).collect();
                let comp = wd_compose(g, &owned).unwrap();
                if comp.diagram.loops > 0 {
                    *looped += 1;
                    return;
                }
                *checked += 1;
                let pieces = owned
                    .iter()
                    .map(|f| Piece { graph: wiring_to_graph(f), ports: (0..f.outer).map(|j| f.diagram.m + j).collect() })
                    .collect();
                let gg = GraphOfGraphs::new(base.clone(), pieces).unwrap();
                let sub = substitute(&gg).unwrap();
                let rl: Vec<(usize, String)> =
                    (0..g.outer).map(|j| (sub.base_edges[g.diagram.m + j], j.to_string())).collect();
                let (lg, ll) = labelled(&comp);
                // source point p of the composite is point q of the i-th inner diagram
                let mut halves = Vec::new();
                let mut verts = Vec::new();
                for (i, f) in owned.iter().enumerate() {
                    for q in 0..f.diagram.m {
                        halves.push(sub.half_offset[i] + q);
                    }
                    for b in 0..f.inner.len() {
                        verts.push(sub.vertex_offset[i] + b);
                    }
                }
                if !explicit_iso(&lg, &sub.graph, &halves, &verts, &ll, &rl) && bad.len() < 5 {
                    bad.push(format!("{g:?} with {owned:?}"));
                }
                return;
            }
            for f in &family[g.inner[i]] {
                if f.inner.len() <= left {
                    fs.push(f);
                    rec(g, base, family, left - f.inner.len(), fs, checked, looped, bad);
                    fs.pop();
                }
            }
        }
        rec(g, &base, &family, 3, &mut fs, &mut checked, &mut looped, &mut bad);
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{checked} loop-free composites agree ({} outer classes of {n_outer} outer diagrams, {n_classes} inner classes of {n_inner}; {looped} composites closing a loop are outside k=0)",
                outers.len()
            )
        } else {
            bad.join("; ")
        },
    }
}

// ---------------------------------------------------------------- 4

const CORPUS: [&str; 14] = [
    "stick", "empty", "isolated", "corolla:0", "corolla:1", "corolla:2", "corolla:3", "line:1", "line:2", "line:3",
    "wheel:1", "wheel:2", "wheel:3", "corolla:[a,b]",
];

fn piece(x: &XGraph) -> Piece {
    let mut ports: Vec<(usize, usize)> = x.labels.iter().map(|(&e, &l)| (l, e)).collect();
    ports.sort();
    Piece { graph: x.graph.clone(), ports: ports.into_iter().map(|(_, e)| e).collect() }
}

/// Every way of choosing one piece per vertex of `base`.
fn assignments<'a>(base: &Graph, pieces: &'a [Vec<Piece>]) -> Vec<Vec<&'a Piece>> {
    let mut out: Vec<Vec<&Piece>> = vec![vec![]];
    for v in 0..base.n_vertices() {
        let opts = &pieces[base.valency(v)];
        out = out.into_iter().flat_map(|a| opts.iter().map(move |p| {
            let mut a2 = a.clone();
            a2.push(p);
            a2
        })).collect();
    }
    out
}

fn port_labels(g: &Graph, image: impl Fn(usize) -> usize) -> Vec<(usize, String)> {
    g.ports().into_iter().map(|e| (image(e), e.to_string())).collect()
}

/// Checks associativity for `outer` against every combination of the given
/// inner assignments, one list per piece. Returns the number of instances.
fn associativity(outer: &GraphOfGraphs, options: &[Vec<Vec<&Piece>>], bad: &mut Vec<String>) -> usize {
    let base = &outer.base;
    let sub = substitute(outer).unwrap();
    if options.iter().any(Vec::is_empty) {
        return 0;
    }
    let mut count = 0;
    // inner graphs of graphs and their substitutions, per (vertex, choice)
    let per_piece: Vec<Vec<(GraphOfGraphs, Substitution, Piece)>> = outer
        .pieces
        .iter()
        .zip(options)
        .map(|(p, opts)| {
            opts.iter()
                .map(|a| {
                    let gg = GraphOfGraphs::new(p.graph.clone(), a.iter().map(|x| (*x).clone()).collect()).unwrap();
                    let s = substitute(&gg).unwrap();
                    let ports = p.ports.iter().map(|&e| s.base_edges[e]).collect();
                    let composed = Piece { graph: s.graph.clone(), ports };
                    (gg, s, composed)
                })
                .collect()
        })
        .collect();
    let mut pick = vec![0; per_piece.len()];
    let mut inner: Vec<GraphOfGraphs> = per_piece.iter().map(|c| c[0].0.clone()).collect();
    // the composite's piece at v depends on the choice at v only
    let mut composite =
        GraphOfGraphs::new(base.clone(), per_piece.iter().map(|c| c[0].2.clone()).collect()).unwrap();
    if compose_nested(outer, &inner).unwrap() != composite {
        bad.push(format!("compose_nested disagrees with piecewise substitution on {base:?}"));
    }
    loop {
        let subs: Vec<&Substitution> = pick.iter().enumerate().map(|(v, &k)| &per_piece[v][k].1).collect();
        count += 1;
        let once = substitute(&composite).unwrap();
        let twice = substitute(&pull_to_colimit(outer, &sub, &inner).unwrap()).unwrap();
        let l1 = port_labels(base, |e| once.base_edges[e]);
        let l2 = port_labels(base, |e| twice.base_edges[sub.base_edges[e]]);
        // both sides index halves and vertices by (base vertex, piece vertex, inner item)
        let halves: Vec<usize> = once
            .half_origin
            .iter()
            .map(|&(v, hp)| {
                let (w, q) = subs[v].half_origin[hp];
                twice.half_offset[sub.vertex_offset[v] + w] + q
            })
            .collect();
        let verts: Vec<usize> = once
            .vertex_origin
            .iter()
            .map(|&(v, xp)| {
                let (w, u) = subs[v].vertex_origin[xp];
                twice.vertex_offset[sub.vertex_offset[v] + w] + u
            })
            .collect();
        if !explicit_iso(&once.graph, &twice.graph, &halves, &verts, &l1, &l2) && bad.len() < 5 {
            bad.push(format!("associativity fails on {base:?}"));
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                break;
            }
            pick[i] += 1;
            let wrapped = pick[i] == per_piece[i].len();
            if wrapped {
                pick[i] = 0;
            }
            inner[i] = per_piece[i][pick[i]].0.clone();
            composite.pieces[i] = per_piece[i][pick[i]].2.clone();
            if !wrapped {
                break;
            }
            i += 1;
        }
        if i == pick.len() {
            break;
        }
    }
    count
}

fn criterion_4() -> Outcome {
    let bounds = |connected| Bounds { max_vertices: 2, max_valency: 3, connected_only: connected, admissible_only: true };
    let all: Vec<Vec<Piece>> =
        (0..=3).map(|x| enumerate_x_graphs(x, bounds(false)).unwrap().iter().map(piece).collect()).collect();
    let conn: Vec<Vec<Piece>> =
        (0..=3).map(|x| enumerate_x_graphs(x, bounds(true)).unwrap().iter().map(piece).collect()).collect();
    let bases: Vec<Graph> = CORPUS.iter().map(|n| named_graph(n).unwrap()).collect();
    let mut bad = Vec::new();
    let (mut units, mut bounded, mut assoc) = (0usize, 0usize, 0usize);
    for base in &bases {
        let id = substitute(&GraphOfGraphs::identity(base)).unwrap().graph;
        units += 1;
        if id.tau_map() != base.tau_map() || id.s_map() != base.s_map() || id.t_map() != base.t_map() {
            bad.push(format!("identity substitution changes {base:?}"));
        }
        for a in assignments(base, &all) {
            let gg = GraphOfGraphs::new(base.clone(), a.into_iter().cloned().collect()).unwrap();
            assert!(gg.is_nondegenerate());
            let sub = substitute(&gg).unwrap();
            let labels = port_labels(base, |e| sub.base_edges[e]);
            // refining every piece by its corollas changes nothing
            let inner: Vec<GraphOfGraphs> = gg.pieces.iter().map(|p| GraphOfGraphs::identity(&p.graph)).collect();
            let right = substitute(&compose_nested(&gg, &inner).unwrap()).unwrap();
            let rl = port_labels(base, |e| right.base_edges[e]);
            // substituting into the corollas of the colimit changes nothing
            let left = substitute(&GraphOfGraphs::identity(&sub.graph)).unwrap();
            units += 2;
            if is_isomorphic_labeled(&sub.graph, &labels, &right.graph, &rl).is_none() || left.graph != sub.graph {
                bad.push(format!("unit law fails on {base:?} with {:?}", gg.pieces));
            }
        }
        // every instance whose three graphs of graphs stay within the bounds:
        // the colimit has at most 3 vertices and each composite piece at most 2
        for a in assignments(base, &all) {
            if a.iter().map(|p| p.graph.n_vertices()).sum::<usize>() > 3 {
                continue;
            }
            let outer = GraphOfGraphs::new(base.clone(), a.into_iter().cloned().collect()).unwrap();
            let options: Vec<Vec<Vec<&Piece>>> = outer
                .pieces
                .iter()
                .map(|p| {
                    assignments(&p.graph, &all)
                        .into_iter()
                        .filter(|b| b.iter().map(|q| q.graph.n_vertices()).sum::<usize>() <= 2)
                        .collect()
                })
                .collect();
            bounded += associativity(&outer, &options, &mut bad);
        }
        // beyond the bounds, with connected pieces at both levels
        for a in assignments(base, &conn) {
            let outer = GraphOfGraphs::new(base.clone(), a.into_iter().cloned().collect()).unwrap();
            let options: Vec<Vec<Vec<&Piece>>> = outer.pieces.iter().map(|p| assignments(&p.graph, &conn)).collect();
            assoc += associativity(&outer, &options, &mut bad);
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!(
                "{units} unit-law instances over {} corpus bases; associativity on all {bounded} in-bound instances and {assoc} connected-piece instances",
                bases.len()
            )
        } else {
            bad.join("; ")
        },
    }
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let stick = Graph::stick();
    let w = Graph::wheel(1).unwrap();
    let mut bad = Vec::new();
    let a = hom_pointed(&w, &stick).unwrap().len();
    let b = hom_pointed(&Graph::isolated(), &stick).unwrap().len();
    if a != 2 {
        bad.push(format!("|Gr*(W, stick)| = {a}"));
    }
    if b != 1 {
        bad.push(format!("|Gr*(C0, stick)| = {b}"));
    }
    let mut compared = 0;
    for name in CORPUS {
        let g = named_graph(name).unwrap();
        let base = hom_pointed(&w, &g).unwrap().len();
        for m in 2..=3 {
            compared += 1;
            let k = hom_pointed(&Graph::wheel(m).unwrap(), &g).unwrap().len();
            if k != base {
                bad.push(format!("|Gr*(W{m}, {name})| = {k} vs |Gr*(W, {name})| = {base}"));
            }
        }
    }
    let n_bad = bad.len();
    bad.truncate(4);
    Outcome {
        ok: n_bad == 0,
        detail: if n_bad == 0 {
            format!("|Gr*(W, stick)| = 2, |Gr*(C0, stick)| = 1, wheel counts agree on {compared} pairs")
        } else {
            format!("{n_bad} mismatches, e.g. {}", bad.join("; "))
        },
    }
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let budgets = [3, 2, 1];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, s) in [("terminal", Species::terminal(3)), ("two-colour", directed_sample())] {
        let mut total = 0;
        for law in [Law::DT, Law::LT, Law::LD] {
            let r = free::beck_sweep(&s, law, &budgets, 3, 3).unwrap();
            total += r.n_checked();
            if !r.passed() {
                ok = false;
                parts.push(format!("{name} {}: {:?}", law.name(), r.failed_checks()));
            }
        }
        let r = free::yang_baxter_sweep(&s, &budgets, 3, 3).unwrap();
        if !r.passed() {
            ok = false;
            parts.push(format!("{name} Yang-Baxter fails"));
        }
        parts.push(format!("{name}: Beck {total}, Yang-Baxter {}", r.n_checked()));
    }
    Outcome { ok, detail: parts.join("; ") }
}

// ---------------------------------------------------------------- 7

/// Replaces one `⊠` or `ζ` entry whose inputs have weight at most 2 by a
/// different element of the same arity and colours. At weight 3 every such
/// entry still feeds a composite inside the bounds.
fn mutate(ca: &CircuitAlgebra, carrier: &[Vec<free::Val>], rng: &mut StdRng) -> (CircuitAlgebra, String) {
    let s = &ca.species;
    let mut boxes: Vec<_> = ca
        .boxp
        .iter()
        .filter(|(&(m, a, n, b), _)| ldt_weight(&carrier[m][a]) + ldt_weight(&carrier[n][b]) <= 2)
        .map(|(&k, &r)| (k, r))
        .collect();
    boxes.sort();
    let mut zetas: Vec<_> =
        ca.zeta.iter().filter(|(&(n, _, _, a), _)| ldt_weight(&carrier[n][a]) <= 2).map(|(&k, &r)| (k, r)).collect();
    zetas.sort();
    let other = |n: usize, r: usize, rng: &mut StdRng| {
        let alts: Vec<usize> = (0..s.size(n)).filter(|&x| x != r && s.colour(n, x) == s.colour(n, r)).collect();
        (!alts.is_empty()).then(|| alts[rng.random_range(0..alts.len())])
    };
    let mut out = ca.clone();
    loop {
        if rng.random_bool(0.5) {
            let ((m, a, n, b), r) = boxes[rng.random_range(0..boxes.len())];
            if let Some(x) = other(m + n, r, rng) {
                out.boxp.insert((m, a, n, b), x);
                return (out, format!("⊠({}, {}) := {}", s.names[m][a], s.names[n][b], s.names[m + n][x]));
            }
        } else {
            let ((n, i, j, a), r) = zetas[rng.random_range(0..zetas.len())];
            if let Some(x) = other(n - 2, r, rng) {
                out.zeta.insert((n, i, j, a), x);
                return (out, format!("ζ^{i}‡{j}({}) := {}", s.names[n][a], s.names[n - 2][x]));
            }
        }
    }
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut rng = StdRng::seed_from_u64(7);
    let mut detected = 0;
    let mut missed = Vec::new();
    for (name, s) in [("terminal", Species::terminal(3)), ("two-colour", directed_sample())] {
        let fa = free_ldt_algebra(&s, 3, 3).unwrap();
        let ca = check_circuit_axioms(&fa.algebra);
        let mo = check_modular_axioms(&derive_multiplication(&fa.algebra));
        ok &= ca.passed() && mo.passed();
        let sizes: Vec<usize> = fa.carrier.iter().map(Vec::len).collect();
        parts.push(format!(
            "{name} carrier {sizes:?}: circuit {} ({}), modular {} ({})",
            if ca.passed() { "pass" } else { "fail" },
            ca.n_checked(),
            if mo.passed() { "pass" } else { "fail" },
            mo.n_checked()
        ));
        for _ in 0..10 {
            let (m, what) = mutate(&fa.algebra, &fa.carrier, &mut rng);
            let r = check_circuit_axioms(&m);
            match r.checks.iter().find(|c| !c.violations.is_empty()) {
                Some(c) if !c.violations[0].is_empty() => detected += 1,
                _ => missed.push(format!("{name}: {what}")),
            }
        }
    }
    ok &= missed.is_empty();
    parts.push(format!("{detected}/20 mutations detected with a witness"));
    if !missed.is_empty() {
        parts.push(format!("missed {}", missed.join(", ")));
    }
    Outcome { ok, detail: parts.join("; ") }
}

// ---------------------------------------------------------------- 8

/// The single failing graph named by a report's witnesses, if they all
/// agree.
fn localised(p: &FinitePresheaf) -> Option<String> {
    let r = check_segal(p).ok()?;
    let names: BTreeSet<String> = r
        .checks
        .iter()
        .flat_map(|c| c.violations.iter())
        .map(|w| w.split(':').next().unwrap_or("").to_string())
        .collect();
    (names.len() == 1).then(|| names.into_iter().next().unwrap())
}

fn presheaf_mutations(p: &FinitePresheaf, rng: &mut StdRng) -> Vec<(String, FinitePresheaf)> {
    // graphs that are not elements themselves
    let elementary = |g: usize| p.names[g] == "stick" || (0..=4).any(|n| p.names[g] == format!("C{n}"));
    let targets: Vec<usize> = (0..p.graphs.len()).filter(|&g| !elementary(g)).collect();
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < 10 {
        let g = targets[rng.random_range(0..targets.len())];
        let mut q = p.clone();
        match k % 3 {
            0 => {
                // duplicate an element, restricting like the original
                let x = rng.random_range(0..q.sets[g].len());
                let dup = format!("{}'", q.sets[g][x]);
                q.sets[g].push(dup);
                for m in q.morphisms.iter_mut().filter(|m| m.target == g) {
                    let y = m.map[x];
                    m.map.push(y);
                }
                out.push((p.names[g].clone(), q));
            }
            1 => {
                // rewire one restriction to a vertex
                let cands: Vec<usize> = (0..q.morphisms.len())
                    .filter(|&i| {
                        let m = &q.morphisms[i];
                        m.target == g && matches!(m.kind, MapKind::Nbhd(_)) && q.sets[m.source].len() > 1
                    })
                    .collect();
                if !cands.is_empty() {
                    let i = cands[rng.random_range(0..cands.len())];
                    let x = rng.random_range(0..q.sets[g].len());
                    let m = &mut q.morphisms[i];
                    let n = q.sets[m.source].len();
                    m.map[x] = (m.map[x] + 1 + rng.random_range(0..n - 1)) % n;
                    out.push((p.names[g].clone(), q));
                }
            }
            _ => {
                // drop an element
                if q.sets[g].len() > 1 {
                    let x = rng.random_range(0..q.sets[g].len());
                    q.sets[g].remove(x);
                    for m in q.morphisms.iter_mut().filter(|m| m.target == g) {
                        m.map.remove(x);
                    }
                    let keep: Vec<usize> = (0..p.sets[g].len()).filter(|&y| y != x).collect();
                    let ok = q.morphisms.iter().filter(|m| m.source == g).all(|m| m.map.iter().all(|&y| y != x));
                    if ok {
                        for m in q.morphisms.iter_mut().filter(|m| m.source == g) {
                            for y in m.map.iter_mut() {
                                *y = keep.iter().position(|&z| z == *y).unwrap();
                            }
                        }
                        out.push((p.names[g].clone(), q));
                    }
                }
            }
        }
        k += 1;
    }
    out
}

fn criterion_8() -> Outcome {
    let corpus = probe_corpus(4).unwrap();
    let algebras =
        [("parity", parity_algebra(4, false)), ("shifted parity", parity_algebra(4, true)), ("terminal", CircuitAlgebra::terminal(4))];
    let mut parts = vec![format!("corpus of {} graphs", corpus.len())];
    let mut ok = corpus.len() >= 12;
    let mut nerves = Vec::new();
    for (name, a) in &algebras {
        let p = nerve(a, &corpus).unwrap();
        let r = check_segal(&p).unwrap();
        ok &= r.passed();
        parts.push(format!("{name} Segal {} ({})", if r.passed() { "pass" } else { "fail" }, r.n_checked()));
        nerves.push(p);
    }
    let mut rng = StdRng::seed_from_u64(8);
    let mut caught = 0;
    for (g, q) in presheaf_mutations(&nerves[1], &mut rng) {
        if localised(&q).as_deref() == Some(g.as_str()) {
            caught += 1;
        } else {
            parts.push(format!("mutation at {g} not localised"));
            ok = false;
        }
    }
    parts.push(format!("{caught}/10 mutations fail at the mutated graph"));
    // fullness: components on the corollas against algebra morphisms
    let corolla_elements = |a: &CircuitAlgebra, n: usize| -> Vec<usize> {
        evaluate_species(&a.species, &Graph::corolla_n(n), None).unwrap().iter().map(|d| d.vertex_elements[0]).collect()
    };
    let pairs = [(0, 1), (1, 0), (0, 0), (1, 1)];
    for (i, j) in pairs {
        let (a, b) = (&algebras[i].1, &algebras[j].1);
        let nats = natural_transformations(&nerves[i], &nerves[j]).unwrap();
        let morphisms: BTreeSet<Vec<Vec<usize>>> = algebra_morphisms(a, b).unwrap().into_iter().collect();
        let mut from_nats = BTreeSet::new();
        for t in &nats {
            let mut f = Vec::new();
            for n in 0..=4 {
                let c = nerves[i].names.iter().position(|x| *x == format!("C{n}")).unwrap();
                let (ea, eb) = (corolla_elements(a, n), corolla_elements(b, n));
                let mut fn_ = vec![0; ea.len()];
                for (x, &y) in t[c].iter().enumerate() {
                    fn_[ea[x]] = eb[y];
                }
                f.push(fn_);
            }
            from_nats.insert(f);
        }
        let bij = from_nats.len() == nats.len() && from_nats == morphisms;
        ok &= bij;
        parts.push(format!(
            "{}→{}: {} transformations, {} morphisms{}",
            algebras[i].0,
            algebras[j].0,
            nats.len(),
            morphisms.len(),
            if bij { "" } else { " (no bijection)" }
        ));
    }
    Outcome { ok, detail: parts.join("; ") }
}

// ---------------------------------------------------------------- 9

/// Isomorphism classes of connected `X`-graphs with at least one vertex, by
/// brute force: every pairing of half-edges and labelled ports is reduced
/// to its least image under vertex and slot permutations.
fn orbit_oracle(x: usize, max_vertices: usize, max_valency: usize) -> usize {
    let mut classes = BTreeSet::new();
    for nv in 1..=max_vertices {
        let mut degs = vec![vec![]];
        for _ in 0..nv {
            degs = degs
                .into_iter()
                .flat_map(|d: Vec<usize>| (0..=max_valency).map(move |k| [d.clone(), vec![k]].concat()))
                .collect();
        }
        for deg in degs {
            if deg.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            let nh: usize = deg.iter().sum();
            if (nh + x) % 2 == 1 {
                continue;
            }
            let owner: Vec<usize> = deg.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
            let start: Vec<usize> = deg.iter().scan(0, |acc, &k| {
                let s = *acc;
                *acc += k;
                Some(s)
            }).collect();
            let points = nh + x;
            let mut matchings = Vec::new();
            let mut cur = vec![usize::MAX; points];
            fn pair_up(cur: &mut Vec<usize>, nh: usize, out: &mut Vec<Vec<usize>>) {
                let Some(a) = cur.iter().position(|&y| y == usize::MAX) else {
                    out.push(cur.clone());
                    return;
                };
                for b in a + 1..cur.len() {
                    if cur[b] != usize::MAX || (a >= nh && b >= nh) {
                        continue;
                    }
                    cur[a] = b;
                    cur[b] = a;
                    pair_up(cur, nh, out);
                    cur[a] = usize::MAX;
                    cur[b] = usize::MAX;
                }
            }
            pair_up(&mut cur, nh, &mut matchings);
            // vertex permutations keeping degrees, with slot permutations
            let vperms: Vec<Vec<usize>> = feyngraph::perm::permutations(nv)
                .into_iter()
                .filter(|p| (0..nv).all(|v| deg[p[v]] == deg[v]))
                .collect();
            let mut group: Vec<Vec<usize>> = Vec::new();
            for vp in &vperms {
                let mut maps = vec![vec![usize::MAX; points]];
                for v in 0..nv {
                    let k = deg[v];
                    let mut next = Vec::new();
                    for m in &maps {
                        for sp in feyngraph::perm::permutations(k) {
                            let mut m2 = m.clone();
                            for i in 0..k {
                                m2[start[v] + i] = start[vp[v]] + sp[i];
                            }
                            next.push(m2);
                        }
                    }
                    maps = next;
                }
                for mut m in maps {
                    for l in nh..points {
                        m[l] = l;
                    }
                    group.push(m);
                }
            }
            for mt in matchings {
                let mut parent: Vec<usize> = (0..nv).collect();
                fn find(p: &mut Vec<usize>, a: usize) -> usize {
                    if p[a] != a {
                        let r = find(p, p[a]);
                        p[a] = r;
                    }
                    p[a]
                }
                for a in 0..nh {
                    if mt[a] < nh {
                        let (ra, rb) = (find(&mut parent, owner[a]), find(&mut parent, owner[mt[a]]));
                        parent[ra] = rb;
                    }
                }
                let root = find(&mut parent, 0);
                if (0..nv).any(|v| find(&mut parent, v) != root) {
                    continue;
                }
                let least = group
                    .iter()
                    .map(|g| {
                        let mut img = vec![0; points];
                        for a in 0..points {
                            img[g[a]] = g[mt[a]];
                        }
                        img
                    })
                    .min()
                    .unwrap();
                classes.insert((deg.clone(), least));
            }
        }
    }
    classes.len()
}

fn criterion_9() -> Outcome {
    let k = Species::terminal(3);
    let mut ok = true;
    let empty = free::free_apply(&k, Level::T, 0, 1).unwrap().len();
    ok &= empty == 2;
    let mut parts = vec![format!("|T(K)_0| with one vertex = {empty}")];
    for x in 0..=2 {
        let ours = free::free_apply(&k, Level::T, x, 2).unwrap().len();
        let oracle = orbit_oracle(x, 2, 3);
        ok &= ours == oracle;
        parts.push(format!("|X|={x}: {ours} vs oracle {oracle}"));
    }
    Outcome { ok, detail: parts.join("; ") }
}

#[test]
fn acceptance_criteria() {
    let results = [
        run(1, "structural corpus", secs(1), criterion_1),
        run(2, "Brauer engine", secs(30), criterion_2),
        run(3, "wiring and graph coherence", secs(60), criterion_3),
        run(4, "substitution monad laws", secs(60), criterion_4),
        run(5, "pointed hom counts", secs(10), criterion_5),
        run(6, "distributive laws", secs(300), criterion_6),
        run(7, "algebra equivalence", secs(120), criterion_7),
        run(8, "nerve and Segal", secs(120), criterion_8),
        run(9, "free functor counts", secs(60), criterion_9),
    ];
    let failed: Vec<usize> = (0..9).filter(|&i| !results[i]).map(|i| i + 1).collect();
    assert!(failed.is_empty(), "criteria {failed:?} fail");
}
