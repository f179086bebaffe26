//! JSON file formats. Ids are strings in files and dense integers inside;
//! objects keep their key order, so parsing a serialized value gives back
//! the same ids.
//!
//! Positions of algebra elements and boundary points of diagrams are
//! counted from 1 in files.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::brauer::{BrauerDiagram, WiringDiagram};
use crate::circuit::{CircuitAlgebra, ModularOperad};
use crate::error::{Error, Result};
use crate::etale::{check_etale, EtaleMorphism, VertexImage};
use crate::graph::{Graph, Names};
use crate::nerve::{FinitePresheaf, MapKind, PresheafMap};
use crate::perm;
use crate::pointed::PointedMorphism;
use crate::species::{Decoration, Palette, Species};
use crate::substitution::{GraphOfGraphs, Piece};

fn perr(m: impl Into<String>) -> Error {
    Error::Parse(m.into())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| perr(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| perr(format!("{}: {e}", path.display())))
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| perr(format!("missing field \"{k}\"")))
}

fn as_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| perr(format!("expected a string, got {v}")))
}

fn as_usize(v: &Value) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| perr(format!("expected a natural number, got {v}")))
}

fn as_obj(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(format!("expected an object, got {v}")))
}

fn as_arr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("expected an array, got {v}")))
}

fn id_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(perr(format!("expected an id, got {v}"))),
    }
}

/// `"stick"`, `"wheel:m"`, `"line:k"`, `"corolla:[a,b]"` (or `"corolla:n"`),
/// `"empty"`, `"isolated"`.
pub fn named_graph(name: &str) -> Result<Graph> {
    let (head, arg) = name.split_once(':').unwrap_or((name, ""));
    let num = |a: &str| a.trim().parse::<usize>().map_err(|_| perr(format!("bad size in \"{name}\"")));
    match head.trim() {
        "stick" => Ok(Graph::stick()),
        "empty" => Ok(Graph::empty()),
        "isolated" => Ok(Graph::isolated()),
        "wheel" => Graph::wheel(num(arg)?),
        "line" => Ok(Graph::line(num(arg)?)),
        "corolla" => {
            let a = arg.trim();
            if let Some(inner) = a.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
                let labels: Vec<&str> = inner.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
                Graph::corolla(&labels)
            } else {
                Ok(Graph::corolla_n(num(a)?))
            }
        }
        _ => Err(perr(format!("unknown named graph \"{name}\""))),
    }
}

pub fn parse_graph(v: &Value) -> Result<Graph> {
    if let Value::String(s) = v {
        return named_graph(s);
    }
    let edges: Vec<String> = as_arr(field(v, "edges")?)?.iter().map(id_string).collect::<Result<_>>()?;
    let vertices: Vec<String> = match v.get("vertices") {
        Some(x) => as_arr(x)?.iter().map(id_string).collect::<Result<_>>()?,
        None => vec![],
    };
    let eidx: HashMap<&str, usize> = edges.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let vidx: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    if eidx.len() != edges.len() || vidx.len() != vertices.len() {
        return Err(perr("repeated edge or vertex id"));
    }
    let edge = |x: &Value| -> Result<usize> {
        let k = id_string(x)?;
        eidx.get(k.as_str()).copied().ok_or(Error::DanglingId(k))
    };
    let mut tau = vec![usize::MAX; edges.len()];
    for (k, x) in as_obj(field(v, "tau")?)? {
        let a = *eidx.get(k.as_str()).ok_or_else(|| Error::DanglingId(k.clone()))?;
        let b = edge(x)?;
        if tau[a] != usize::MAX && tau[a] != b {
            return Err(Error::TauNotInvolutive(k.clone()));
        }
        tau[a] = b;
    }
    for e in 0..edges.len() {
        if tau[e] == usize::MAX {
            let back = (0..edges.len()).find(|&x| tau[x] == e);
            tau[e] = back.ok_or_else(|| Error::DanglingId(format!("tau of {}", edges[e])))?;
        }
    }
    let mut halves = Vec::new();
    let (mut s, mut t) = (Vec::new(), Vec::new());
    if let Some(hs) = v.get("half_edges") {
        for (k, x) in as_obj(hs)? {
            halves.push(k.clone());
            s.push(edge(field(x, "s")?)?);
            let vt = id_string(field(x, "t")?)?;
            t.push(*vidx.get(vt.as_str()).ok_or(Error::DanglingId(vt))?);
        }
    }
    let nv = vertices.len();
    Graph::with_names(tau, s, t, nv, Names { edges, halves, vertices })
}

pub fn graph_to_json(g: &Graph) -> Value {
    let n = g.names();
    let tau: Map<String, Value> =
        (0..g.n_edges()).map(|e| (n.edges[e].clone(), json!(n.edges[g.tau(e)]))).collect();
    let halves: Map<String, Value> = (0..g.n_halves())
        .map(|h| (n.halves[h].clone(), json!({"s": n.edges[g.s(h)], "t": n.vertices[g.t(h)]})))
        .collect();
    json!({"edges": n.edges, "tau": tau, "half_edges": halves, "vertices": n.vertices})
}

fn name_map(v: Option<&Value>, from: &dyn Fn(&str) -> Option<usize>, to: &dyn Fn(&str) -> Option<usize>, len: usize, what: &str) -> Result<Vec<usize>> {
    let mut out = vec![usize::MAX; len];
    if let Some(v) = v {
        for (k, x) in as_obj(v)? {
            let a = from(k).ok_or_else(|| Error::DanglingId(k.clone()))?;
            let xs = id_string(x)?;
            out[a] = to(&xs).ok_or(Error::DanglingId(xs))?;
        }
    }
    if out.contains(&usize::MAX) {
        return Err(Error::DanglingId(format!("{what} map is not total")));
    }
    Ok(out)
}

pub fn parse_morphism(v: &Value) -> Result<EtaleMorphism> {
    let g = parse_graph(field(v, "source")?)?;
    let h = parse_graph(field(v, "target")?)?;
    let edges = name_map(v.get("edge_map"), &|k| g.edge_by_name(k), &|k| h.edge_by_name(k), g.n_edges(), "edge")?;
    let halves = name_map(v.get("half_map"), &|k| g.half_by_name(k), &|k| h.half_by_name(k), g.n_halves(), "half-edge")?;
    let vertices =
        name_map(v.get("vertex_map"), &|k| g.vertex_by_name(k), &|k| h.vertex_by_name(k), g.n_vertices(), "vertex")?;
    check_etale(&g, &h, edges, halves, vertices)
}

pub fn morphism_to_json(f: &EtaleMorphism) -> Value {
    let (g, h) = (&f.source, &f.target);
    let m = |n: usize, a: &dyn Fn(usize) -> String, b: &dyn Fn(usize) -> String, img: &[usize]| -> Map<String, Value> {
        (0..n).map(|x| (a(x), json!(b(img[x])))).collect()
    };
    json!({
        "source": graph_to_json(g),
        "target": graph_to_json(h),
        "edge_map": m(g.n_edges(), &|x| g.edge_name(x).into(), &|x| h.edge_name(x).into(), &f.edges),
        "half_map": m(g.n_halves(), &|x| g.half_name(x).into(), &|x| h.half_name(x).into(), &f.halves),
        "vertex_map": m(g.n_vertices(), &|x| g.vertex_name(x).into(), &|x| h.vertex_name(x).into(), &f.vertices),
    })
}

pub fn pointed_to_json(f: &PointedMorphism) -> Value {
    let (g, h) = (&f.source, &f.target);
    let edges: Map<String, Value> =
        (0..g.n_edges()).map(|e| (g.edge_name(e).to_string(), json!(h.edge_name(f.edges[e])))).collect();
    let vertices: Map<String, Value> = (0..g.n_vertices())
        .map(|v| {
            let img = match &f.vertices[v] {
                VertexImage::Vertex(w) => json!(h.vertex_name(*w)),
                VertexImage::Unit => json!("unit"),
                VertexImage::Zero(e) => json!({"zero": h.edge_name(*e)}),
            };
            (g.vertex_name(v).to_string(), img)
        })
        .collect();
    json!({"edge_map": edges, "vertex_map": vertices})
}

/// Pieces are keyed by base vertex; `boundary` sends each piece port to the
/// base edge `s(h)` it replaces. Missing pieces are corollas.
pub fn parse_gog(v: &Value) -> Result<GraphOfGraphs> {
    let base = parse_graph(field(v, "base")?)?;
    let mut pieces: Vec<Piece> = (0..base.n_vertices()).map(|x| Piece::corolla(base.valency(x))).collect();
    if let Some(ps) = v.get("pieces") {
        for (k, pv) in as_obj(ps)? {
            let x = base.vertex_id(k)?;
            let graph = parse_graph(field(pv, "graph")?)?;
            let slots: Vec<usize> = base.halves_at(x).iter().map(|&h| base.s(h)).collect();
            let mut ports = vec![usize::MAX; slots.len()];
            for (p, e) in as_obj(field(pv, "boundary")?)? {
                let pe = graph.edge_id(p)?;
                let be = base.edge_id(&id_string(e)?)?;
                let i = slots
                    .iter()
                    .position(|&y| y == be)
                    .ok_or_else(|| perr(format!("edge {} is not at vertex {k}", base.edge_name(be))))?;
                ports[i] = pe;
            }
            if ports.contains(&usize::MAX) {
                return Err(Error::InvalidGraphOfGraphs(format!("boundary of {k} is not a bijection")));
            }
            pieces[x] = Piece { graph, ports };
        }
    }
    GraphOfGraphs::new(base, pieces)
}

pub fn gog_to_json(gg: &GraphOfGraphs) -> Value {
    let b = &gg.base;
    let pieces: Map<String, Value> = gg
        .pieces
        .iter()
        .enumerate()
        .map(|(x, p)| {
            let slots: Vec<usize> = b.halves_at(x).iter().map(|&h| b.s(h)).collect();
            let boundary: Map<String, Value> = p
                .ports
                .iter()
                .zip(&slots)
                .map(|(&pe, &be)| (p.graph.edge_name(pe).to_string(), json!(b.edge_name(be))))
                .collect();
            (b.vertex_name(x).to_string(), json!({"graph": graph_to_json(&p.graph), "boundary": boundary}))
        })
        .collect();
    json!({"base": graph_to_json(b), "pieces": pieces})
}

fn point(v: &Value, m: usize, n: usize) -> Result<usize> {
    let a = as_arr(v)?;
    if a.len() != 2 {
        return Err(perr(format!("boundary point {v} is not [side, index]")));
    }
    let idx = as_usize(&a[1])?;
    let (len, off) = match as_str(&a[0])? {
        "s" => (m, 0),
        "t" => (n, m),
        x => return Err(perr(format!("side {x} is neither s nor t"))),
    };
    if idx == 0 || idx > len {
        return Err(perr(format!("boundary point {v} out of range")));
    }
    Ok(off + idx - 1)
}

pub fn parse_diagram(v: &Value) -> Result<BrauerDiagram> {
    let m = as_usize(field(v, "m")?)?;
    let n = as_usize(field(v, "n")?)?;
    let loops = v.get("loops").map(as_usize).transpose()?.unwrap_or(0);
    let mut pairs = Vec::new();
    for p in as_arr(field(v, "matching")?)? {
        let ab = as_arr(p)?;
        if ab.len() != 2 {
            return Err(perr("a matched pair needs two points"));
        }
        pairs.push((point(&ab[0], m, n)?, point(&ab[1], m, n)?));
    }
    BrauerDiagram::from_pairs(m, n, &pairs, loops)
}

pub fn diagram_to_json(d: &BrauerDiagram) -> Value {
    let pt = |p: usize| if p < d.m { json!(["s", p + 1]) } else { json!(["t", p - d.m + 1]) };
    let matching: Vec<Value> = d.pairs().into_iter().map(|(a, b)| json!([pt(a), pt(b)])).collect();
    json!({"m": d.m, "n": d.n, "matching": matching, "loops": d.loops})
}

/// `{"inner": [arity…], "diagram": diagram}`; a bare diagram has one inner
/// boundary.
pub fn parse_wiring(v: &Value) -> Result<WiringDiagram> {
    match v.get("diagram") {
        Some(d) => {
            let d = parse_diagram(d)?;
            let inner = as_arr(field(v, "inner")?)?.iter().map(as_usize).collect::<Result<_>>()?;
            WiringDiagram::new(inner, d)
        }
        None => {
            let d = parse_diagram(v)?;
            WiringDiagram::new(vec![d.m], d)
        }
    }
}

pub fn wiring_to_json(w: &WiringDiagram) -> Value {
    json!({"inner": w.inner, "diagram": diagram_to_json(&w.diagram)})
}

fn parse_palette(v: &Value) -> Result<Palette> {
    let names: Vec<String> = as_arr(field(v, "colours")?)?.iter().map(id_string).collect::<Result<_>>()?;
    let idx = |k: &str| names.iter().position(|x| x == k).ok_or_else(|| perr(format!("unknown colour {k}")));
    let mut omega: Vec<usize> = (0..names.len()).collect();
    if let Some(o) = v.get("omega") {
        for (k, x) in as_obj(o)? {
            omega[idx(k)?] = idx(&id_string(x)?)?;
        }
    }
    Palette::new(names, omega)
}

/// `{"palette", "arity": {"n": [names]}, "colour_of": {"n": {elt: [colours]}},
/// "action": {"n": {elt: [image under (i i+1) for each i]}}}`.
pub fn parse_species(v: &Value) -> Result<Species> {
    let palette = match v.get("palette") {
        Some(p) => parse_palette(p)?,
        None => Palette::monochrome(),
    };
    let ar = as_obj(field(v, "arity")?)?;
    let mut nmax = 0;
    for k in ar.keys() {
        nmax = nmax.max(k.parse::<usize>().map_err(|_| perr(format!("arity key {k}")))?);
    }
    let mut names = vec![Vec::new(); nmax + 1];
    for (k, x) in ar {
        names[k.parse::<usize>().unwrap()] = as_arr(x)?.iter().map(id_string).collect::<Result<_>>()?;
    }
    let elt = |n: usize, k: &str| -> Result<usize> {
        names[n].iter().position(|x| x == k).ok_or_else(|| perr(format!("unknown element {k} in arity {n}")))
    };
    let col_of = v.get("colour_of");
    let act = v.get("action");
    let mut colours = Vec::new();
    let mut gens = Vec::new();
    for n in 0..=nmax {
        let mut cs = Vec::new();
        let mut gs = Vec::new();
        for a in &names[n] {
            let c = match col_of.and_then(|c| c.get(n.to_string())).and_then(|c| c.get(a)) {
                Some(list) => as_arr(list)?
                    .iter()
                    .map(|x| palette.colour_id(&id_string(x)?))
                    .collect::<Result<Vec<_>>>()?,
                None if palette.len() == 1 => vec![0; n],
                None => return Err(perr(format!("no colours for {a} in arity {n}"))),
            };
            if c.len() != n {
                return Err(Error::ArityMismatch(format!("{a} has {} colours in arity {n}", c.len())));
            }
            cs.push(c);
            let g = match act.and_then(|x| x.get(n.to_string())).and_then(|x| x.get(a)) {
                Some(list) => as_arr(list)?.iter().map(|x| elt(n, &id_string(x)?)).collect::<Result<Vec<_>>>()?,
                None => vec![elt(n, a)?; n.saturating_sub(1)],
            };
            gs.push(g);
        }
        colours.push(cs);
        gens.push(gs);
    }
    Species::from_generators(palette, names, colours, gens)
}

pub fn species_to_json(s: &Species) -> Value {
    let p = &s.palette;
    let omega: Map<String, Value> = (0..p.len()).map(|c| (p.names[c].clone(), json!(p.names[p.omega[c]]))).collect();
    let mut arity = Map::new();
    let mut colour_of = Map::new();
    let mut action = Map::new();
    for n in 0..=s.nmax {
        arity.insert(n.to_string(), json!(s.names[n]));
        let mut co = Map::new();
        let mut ac = Map::new();
        for a in 0..s.size(n) {
            co.insert(s.names[n][a].clone(), json!(s.colour(n, a).iter().map(|&c| &p.names[c]).collect::<Vec<_>>()));
            if n >= 2 {
                let imgs: Vec<&String> =
                    (0..n - 1).map(|i| &s.names[n][s.act(n, a, &perm::adjacent(n, i))]).collect();
                ac.insert(s.names[n][a].clone(), json!(imgs));
            }
        }
        colour_of.insert(n.to_string(), Value::Object(co));
        if n >= 2 {
            action.insert(n.to_string(), Value::Object(ac));
        }
    }
    json!({
        "palette": {"colours": p.names, "omega": omega},
        "arity": arity,
        "colour_of": colour_of,
        "action": action,
    })
}

fn elt_ref(s: &Species, v: &Value) -> Result<(usize, usize)> {
    let a = as_arr(v)?;
    if a.len() != 2 {
        return Err(perr(format!("element reference {v} is not [arity, name]")));
    }
    let n = as_usize(&a[0])?;
    if n > s.nmax {
        return Err(Error::ArityMismatch(format!("arity {n} above {}", s.nmax)));
    }
    let k = id_string(&a[1])?;
    Ok((n, s.element_id(n, &k)?))
}

/// Adds `"box": [[[m, a], [n, b], r]…]`, `"zeta": [[[n, a], i, j, r]…]`,
/// `"eps": {colour: element}` and `"external_unit"` to a species.
pub fn parse_algebra(v: &Value) -> Result<CircuitAlgebra> {
    let species = parse_species(v)?;
    let s = &species;
    let mut boxp = HashMap::new();
    for e in v.get("box").map(as_arr).transpose()?.into_iter().flatten() {
        let e = as_arr(e)?;
        if e.len() != 3 {
            return Err(perr("a box entry is [[m, a], [n, b], result]"));
        }
        let (m, a) = elt_ref(s, &e[0])?;
        let (n, b) = elt_ref(s, &e[1])?;
        if m + n > s.nmax {
            return Err(Error::OutOfBounds(format!("⊠ of arities {m} and {n}")));
        }
        boxp.insert((m, a, n, b), s.element_id(m + n, &id_string(&e[2])?)?);
    }
    let zeta = parse_zeta(s, v.get("zeta"))?;
    let mut eps = vec![None; s.palette.len()];
    if let Some(e) = v.get("eps") {
        for (c, x) in as_obj(e)? {
            eps[s.palette.colour_id(c)?] = Some(s.element_id(2, &id_string(x)?)?);
        }
    }
    let unit = match v.get("external_unit") {
        None | Some(Value::Null) => None,
        Some(x) => Some(s.element_id(0, &id_string(x)?)?),
    };
    let truncated = v.get("truncated").and_then(Value::as_bool).unwrap_or(false);
    let ca = CircuitAlgebra { species, boxp, zeta, eps, unit, truncated };
    if !truncated {
        ca.validate()?;
    }
    Ok(ca)
}

fn parse_zeta(s: &Species, v: Option<&Value>) -> Result<HashMap<(usize, usize, usize, usize), usize>> {
    let mut zeta = HashMap::new();
    for e in v.map(as_arr).transpose()?.into_iter().flatten() {
        let e = as_arr(e)?;
        if e.len() != 4 {
            return Err(perr("a zeta entry is [[n, a], i, j, result]"));
        }
        let (n, a) = elt_ref(s, &e[0])?;
        let (i, j) = (as_usize(&e[1])?, as_usize(&e[2])?);
        if i == 0 || j == 0 || i > n || j > n || i == j || n < 2 {
            return Err(perr(format!("zeta positions {i}, {j} out of range for arity {n}")));
        }
        let (i, j) = (i.min(j) - 1, i.max(j) - 1);
        zeta.insert((n, i, j, a), s.element_id(n - 2, &id_string(&e[3])?)?);
    }
    Ok(zeta)
}

pub fn algebra_to_json(ca: &CircuitAlgebra) -> Value {
    let s = &ca.species;
    let r = |n: usize, a: usize| json!([n, s.names[n][a]]);
    let mut boxes: Vec<_> = ca.boxp.iter().collect();
    boxes.sort();
    let boxv: Vec<Value> =
        boxes.into_iter().map(|(&(m, a, n, b), &x)| json!([r(m, a), r(n, b), s.names[m + n][x]])).collect();
    let mut v = species_to_json(s);
    let o = v.as_object_mut().unwrap();
    o.insert("box".into(), json!(boxv));
    o.insert("zeta".into(), zeta_to_json(s, &ca.zeta));
    let eps: Map<String, Value> = (0..s.palette.len())
        .filter_map(|c| ca.eps[c].map(|e| (s.palette.names[c].clone(), json!(s.names[2][e]))))
        .collect();
    o.insert("eps".into(), Value::Object(eps));
    o.insert("external_unit".into(), ca.unit.map(|u| json!(s.names[0][u])).unwrap_or(Value::Null));
    if ca.truncated {
        o.insert("truncated".into(), json!(true));
    }
    v
}

fn zeta_to_json(s: &Species, z: &HashMap<(usize, usize, usize, usize), usize>) -> Value {
    let mut zs: Vec<_> = z.iter().collect();
    zs.sort();
    json!(zs
        .into_iter()
        .map(|(&(n, i, j, a), &x)| json!([[n, s.names[n][a]], i + 1, j + 1, s.names[n - 2][x]]))
        .collect::<Vec<_>>())
}

/// A modular operad file has `"mult": [[[m, a], [n, b], x, y, r]…]` with
/// 1-based `x, y`; a circuit algebra file is accepted and its
/// multiplication derived.
pub fn parse_modular(v: &Value) -> Result<ModularOperad> {
    if v.get("mult").is_none() {
        return Ok(crate::circuit::derive_multiplication(&parse_algebra(v)?));
    }
    let species = parse_species(v)?;
    let s = &species;
    let mut mult = HashMap::new();
    for e in as_arr(field(v, "mult")?)? {
        let e = as_arr(e)?;
        if e.len() != 5 {
            return Err(perr("a mult entry is [[m, a], [n, b], x, y, result]"));
        }
        let (m, a) = elt_ref(s, &e[0])?;
        let (n, b) = elt_ref(s, &e[1])?;
        let (x, y) = (as_usize(&e[2])?, as_usize(&e[3])?);
        if x == 0 || y == 0 || x > m || y > n || m + n < 2 {
            return Err(perr(format!("mult positions {x}, {y} out of range")));
        }
        mult.insert((m, a, n, b, x - 1, y - 1), s.element_id(m + n - 2, &id_string(&e[4])?)?);
    }
    let zeta = parse_zeta(s, v.get("zeta"))?;
    let mut eps = vec![None; s.palette.len()];
    if let Some(e) = v.get("eps") {
        for (c, x) in as_obj(e)? {
            eps[s.palette.colour_id(c)?] = Some(s.element_id(2, &id_string(x)?)?);
        }
    }
    let truncated = v.get("truncated").and_then(Value::as_bool).unwrap_or(false);
    let mo = ModularOperad { species, mult, zeta, eps, truncated };
    if !truncated {
        mo.validate()?;
    }
    Ok(mo)
}

pub fn decoration_to_json(s: &Species, g: &Graph, d: &Decoration) -> Value {
    let verts: Map<String, Value> = (0..g.n_vertices())
        .map(|v| (g.vertex_name(v).to_string(), json!(s.names[g.valency(v)][d.vertex_elements[v]])))
        .collect();
    let cols: Map<String, Value> = (0..g.n_edges())
        .map(|e| (g.edge_name(e).to_string(), json!(s.palette.names[d.edge_colours[e]])))
        .collect();
    json!({"vertices": verts, "colours": cols})
}

/// Port colours for `eval`: `{edge: colour}`.
pub fn parse_port_colours(s: &Species, g: &Graph, v: &Value) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for (k, c) in as_obj(v)? {
        out.insert(g.edge_id(k)?, s.palette.colour_id(&id_string(c)?)?);
    }
    Ok(out)
}

/// `{"corpus": [{"name", "graph"} | graph…], "sets": {name: [elt…]},
/// "morphisms": [{"kind", "source", "target", …, "map": {elt: elt}}]}`.
/// A bare corpus graph is keyed by its shorthand, or by its position.
pub fn parse_presheaf(v: &Value) -> Result<FinitePresheaf> {
    let mut names = Vec::new();
    let mut graphs = Vec::new();
    for (i, c) in as_arr(field(v, "corpus")?)?.iter().enumerate() {
        let (name, g) = match (c.get("name"), c.get("graph")) {
            (Some(n), Some(g)) => (id_string(n)?, parse_graph(g)?),
            _ => match c {
                Value::String(s) => (s.clone(), parse_graph(c)?),
                _ => (i.to_string(), parse_graph(c)?),
            },
        };
        names.push(name);
        graphs.push(g);
    }
    let gidx = |k: &str| names.iter().position(|n| n == k).ok_or_else(|| Error::DanglingId(k.to_string()));
    let mut sets = vec![Vec::new(); names.len()];
    for (k, x) in as_obj(field(v, "sets")?)? {
        sets[gidx(k)?] = as_arr(x)?.iter().map(id_string).collect::<Result<_>>()?;
    }
    let mut morphisms = Vec::new();
    for m in as_arr(field(v, "morphisms")?)? {
        let source = gidx(&id_string(field(m, "source")?)?)?;
        let target = gidx(&id_string(field(m, "target")?)?)?;
        let (gs, gt) = (&graphs[source], &graphs[target]);
        let kind = match as_str(field(m, "kind")?)? {
            "ch" => MapKind::Ch(gt.edge_id(&id_string(field(m, "edge")?)?)?),
            "nbhd" => MapKind::Nbhd(gt.vertex_id(&id_string(field(m, "vertex")?)?)?),
            "iso" => MapKind::Iso(name_map(
                Some(field(m, "edge_map")?),
                &|k| gs.edge_by_name(k),
                &|k| gt.edge_by_name(k),
                gs.n_edges(),
                "edge",
            )?),
            "refinement" => MapKind::Refinement,
            "deletion" => MapKind::Deletion(
                as_arr(field(m, "deleted")?)?
                    .iter()
                    .map(|x| gs.vertex_id(&id_string(x)?))
                    .collect::<Result<_>>()?,
            ),
            k => return Err(perr(format!("unknown morphism kind {k}"))),
        };
        let find = |set: usize, k: &str| {
            sets[set].iter().position(|x| x == k).ok_or_else(|| Error::DanglingId(format!("element {k} of {}", names[set])))
        };
        let mut map = vec![usize::MAX; sets[target].len()];
        for (k, x) in as_obj(field(m, "map")?)? {
            map[find(target, k)?] = find(source, &id_string(x)?)?;
        }
        if map.contains(&usize::MAX) {
            return Err(perr(format!("{} map {} → {} is not total", kind.name(), names[target], names[source])));
        }
        morphisms.push(PresheafMap { kind, source, target, map });
    }
    let p = FinitePresheaf { names, graphs, sets, morphisms };
    p.validate()?;
    Ok(p)
}

pub fn presheaf_to_json(p: &FinitePresheaf) -> Value {
    let corpus: Vec<Value> =
        p.names.iter().zip(&p.graphs).map(|(n, g)| json!({"name": n, "graph": graph_to_json(g)})).collect();
    let sets: Map<String, Value> = p.names.iter().zip(&p.sets).map(|(n, s)| (n.clone(), json!(s))).collect();
    let morphisms: Vec<Value> = p
        .morphisms
        .iter()
        .map(|m| {
            let (gs, gt) = (&p.graphs[m.source], &p.graphs[m.target]);
            let mut o = Map::new();
            o.insert("kind".into(), json!(m.kind.name()));
            o.insert("source".into(), json!(p.names[m.source]));
            o.insert("target".into(), json!(p.names[m.target]));
            match &m.kind {
                MapKind::Ch(e) => {
                    o.insert("edge".into(), json!(gt.edge_name(*e)));
                }
                MapKind::Nbhd(v) => {
                    o.insert("vertex".into(), json!(gt.vertex_name(*v)));
                }
                MapKind::Iso(es) => {
                    let em: Map<String, Value> =
                        es.iter().enumerate().map(|(e, &f)| (gs.edge_name(e).to_string(), json!(gt.edge_name(f)))).collect();
                    o.insert("edge_map".into(), Value::Object(em));
                }
                MapKind::Refinement => {}
                MapKind::Deletion(w) => {
                    o.insert("deleted".into(), json!(w.iter().map(|&v| gs.vertex_name(v)).collect::<Vec<_>>()));
                }
            }
            let map: Map<String, Value> = m
                .map
                .iter()
                .enumerate()
                .map(|(y, &x)| (p.sets[m.target][y].clone(), json!(p.sets[m.source][x])))
                .collect();
            o.insert("map".into(), Value::Object(map));
            Value::Object(o)
        })
        .collect();
    json!({"corpus": corpus, "sets": sets, "morphisms": morphisms})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_and_round_trip() {
        for name in ["stick", "wheel:2", "line:3", "corolla:[a,b,c]", "corolla:2", "empty", "isolated"] {
            let g = named_graph(name).unwrap();
            let back = parse_graph(&graph_to_json(&g)).unwrap();
            assert_eq!(back, g, "{name}");
        }
        assert!(named_graph("wheel:0").is_err());
        assert!(named_graph("torus").is_err());
    }

    #[test]
    fn diagram_round_trip() {
        for d in [BrauerDiagram::cup(), BrauerDiagram::cap(), BrauerDiagram::identity(3).with_loops(2)] {
            assert_eq!(parse_diagram(&diagram_to_json(&d)).unwrap(), d);
        }
    }

    #[test]
    fn species_round_trip() {
        let s = crate::species::directed_sample();
        assert_eq!(parse_species(&species_to_json(&s)).unwrap(), s);
        let ca = crate::nerve::parity_algebra(3, true);
        assert_eq!(parse_algebra(&algebra_to_json(&ca)).unwrap(), ca);
    }
}
