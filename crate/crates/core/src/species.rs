//! Finite graphical species and their evaluation on graphs.
//!
//! The arity set `S_X` is stored for `X = {0..n}`. Elements act on the right:
//! `colour(α·σ)[i] = colour(α)[σ(i)]`, so `(α·σ)·ρ = α·(σ∘ρ)`.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::perm::{self, Perm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub names: Vec<String>,
    pub omega: Vec<usize>,
}

impl Palette {
    pub fn new(names: Vec<String>, omega: Vec<usize>) -> Result<Palette> {
        if omega.len() != names.len() {
            return Err(Error::InvalidSpecies("ω is not total on the colours".into()));
        }
        for (c, &w) in omega.iter().enumerate() {
            if w >= names.len() || omega[w] != c {
                return Err(Error::InvalidSpecies(format!("ω is not an involution at {}", names[c])));
            }
        }
        Ok(Palette { names, omega })
    }

    pub fn monochrome() -> Palette {
        Palette { names: vec!["*".into()], omega: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn colour_id(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Parse(format!("unknown colour {name}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Species {
    pub palette: Palette,
    pub nmax: usize,
    /// Element names per arity.
    pub names: Vec<Vec<String>>,
    /// `colours[n][a][i]`: colour of element `a` of arity `n` at position `i`.
    pub colours: Vec<Vec<Vec<usize>>>,
    /// `action[n][a][r]`: `a·σ` for the `r`-th permutation in lexicographic
    /// order.
    pub action: Vec<Vec<Vec<usize>>>,
}

impl Species {
    pub fn new(
        palette: Palette,
        names: Vec<Vec<String>>,
        colours: Vec<Vec<Vec<usize>>>,
        action: Vec<Vec<Vec<usize>>>,
    ) -> Result<Species> {
        if names.is_empty() {
            return Err(Error::InvalidSpecies("no arities".into()));
        }
        let s = Species { palette, nmax: names.len() - 1, names, colours, action };
        s.validate()?;
        Ok(s)
    }

    /// Builds the action from the images of each element under the adjacent
    /// transpositions `(i, i+1)`, checking the Coxeter relations on the way.
    pub fn from_generators(
        palette: Palette,
        names: Vec<Vec<String>>,
        colours: Vec<Vec<Vec<usize>>>,
        gens: Vec<Vec<Vec<usize>>>,
    ) -> Result<Species> {
        let mut action = Vec::new();
        for n in 0..names.len() {
            let perms = perm::permutations(n);
            let size = names[n].len();
            let mut table = vec![vec![usize::MAX; perms.len()]; size];
            for a in 0..size {
                if gens[n].get(a).map(|g| g.len()) != Some(n.saturating_sub(1)) {
                    return Err(Error::InvalidSpecies(format!(
                        "element {} needs {} generator images",
                        names[n][a],
                        n.saturating_sub(1)
                    )));
                }
                table[a][0] = a;
                let mut queue = VecDeque::from([perm::identity(n)]);
                while let Some(sigma) = queue.pop_front() {
                    let cur = table[a][perm::rank(&sigma)];
                    for i in 0..n.saturating_sub(1) {
                        let next = perm::compose(&sigma, &perm::adjacent(n, i));
                        let img = gens[n][cur][i];
                        if img >= size {
                            return Err(Error::InvalidSpecies(format!("generator image {img} at arity {n}")));
                        }
                        let r = perm::rank(&next);
                        if table[a][r] == usize::MAX {
                            table[a][r] = img;
                            queue.push_back(next);
                        } else if table[a][r] != img {
                            return Err(Error::InvalidSpecies(format!(
                                "generators at arity {n} violate the symmetric group relations"
                            )));
                        }
                    }
                }
            }
            action.push(table);
        }
        Species::new(palette, names, colours, action)
    }

    /// The terminal species on one colour, one element per arity.
    pub fn terminal(nmax: usize) -> Species {
        let names = (0..=nmax).map(|_| vec!["*".to_string()]).collect();
        let colours = (0..=nmax).map(|n| vec![vec![0; n]]).collect();
        let action = (0..=nmax).map(|n| vec![vec![0; perm::factorial(n)]]).collect();
        Species { palette: Palette::monochrome(), nmax, names, colours, action }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.palette.len();
        if self.colours.len() != self.nmax + 1 || self.action.len() != self.nmax + 1 {
            return Err(Error::InvalidSpecies("tables do not cover every arity".into()));
        }
        for n in 0..=self.nmax {
            let size = self.names[n].len();
            if self.colours[n].len() != size || self.action[n].len() != size {
                return Err(Error::InvalidSpecies(format!("arity {n} tables have the wrong size")));
            }
            let perms = perm::permutations(n);
            for a in 0..size {
                let name = &self.names[n][a];
                let col = &self.colours[n][a];
                if col.len() != n || col.iter().any(|&c| c >= k) {
                    return Err(Error::InvalidSpecies(format!("colours of {name}")));
                }
                if self.action[n][a].len() != perms.len() || self.action[n][a].iter().any(|&b| b >= size) {
                    return Err(Error::InvalidSpecies(format!("action row of {name}")));
                }
                if self.action[n][a][0] != a {
                    return Err(Error::InvalidSpecies(format!("identity moves {name}")));
                }
                for (r, sigma) in perms.iter().enumerate() {
                    let b = self.action[n][a][r];
                    let expect: Vec<usize> = sigma.iter().map(|&i| col[i]).collect();
                    if self.colours[n][b] != expect {
                        return Err(Error::InvalidSpecies(format!("action on {name} does not move colours")));
                    }
                    for (r2, rho) in perms.iter().enumerate() {
                        let lhs = self.action[n][b][r2];
                        let rhs = self.action[n][a][perm::rank(&perm::compose(sigma, rho))];
                        if lhs != rhs {
                            return Err(Error::InvalidSpecies(format!(
                                "action at arity {n} is not a right action"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self, n: usize) -> usize {
        self.names.get(n).map(|v| v.len()).unwrap_or(0)
    }

    pub fn colour(&self, n: usize, a: usize) -> &[usize] {
        &self.colours[n][a]
    }

    pub fn act(&self, n: usize, a: usize, sigma: &[usize]) -> usize {
        self.action[n][a][perm::rank(sigma)]
    }

    pub fn omega(&self, c: usize) -> usize {
        self.palette.omega[c]
    }

    pub fn element_id(&self, n: usize, name: &str) -> Result<usize> {
        self.names
            .get(n)
            .and_then(|v| v.iter().position(|x| x == name))
            .ok_or_else(|| Error::Parse(format!("unknown element {name} of arity {n}")))
    }

    /// The orbit representatives of arity `n` under the action, smallest id
    /// first.
    pub fn orbit_of(&self, n: usize, a: usize) -> Vec<usize> {
        let mut o = self.action[n][a].clone();
        o.sort();
        o.dedup();
        o
    }
}

/// A decoration of a graph: a colour on every edge and an element at every
/// vertex whose colour at slot `i` is the colour of `τ s(h_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    pub edge_colours: Vec<usize>,
    pub vertex_elements: Vec<usize>,
}

/// `S(G)`: every decoration, optionally with some port colours fixed.
pub fn evaluate_species(
    s: &Species,
    g: &Graph,
    port_colours: Option<&BTreeMap<usize, usize>>,
) -> Result<Vec<Decoration>> {
    for v in 0..g.n_vertices() {
        if g.valency(v) > s.nmax {
            return Err(Error::ValencyOutOfRange(g.vertex_name(v).to_string(), g.valency(v), s.nmax));
        }
    }
    let mut col = vec![None; g.n_edges()];
    if let Some(pc) = port_colours {
        for (&e, &c) in pc {
            if e >= g.n_edges() {
                return Err(Error::UnknownEdge(e.to_string()));
            }
            if !g.is_port(e) {
                return Err(Error::NotAPort(g.edge_name(e).to_string()));
            }
            if c >= s.palette.len() {
                return Err(Error::ColourMismatch(format!("colour {c}")));
            }
            if let Some(prev) = col[e] {
                if prev != c {
                    return Err(Error::ColourMismatch(format!("port {}", g.edge_name(e))));
                }
            }
            col[e] = Some(c);
            let te = g.tau(e);
            match col[te] {
                Some(x) if x != s.omega(c) => return Ok(Vec::new()),
                _ => col[te] = Some(s.omega(c)),
            }
        }
    }
    let mut out = Vec::new();
    let mut elts = Vec::new();
    decorate(s, g, 0, &mut col, &mut elts, &mut out);
    Ok(out)
}

fn set(s: &Species, g: &Graph, col: &mut [Option<usize>], e: usize, c: usize, log: &mut Vec<usize>) -> bool {
    for (x, y) in [(e, c), (g.tau(e), s.omega(c))] {
        match col[x] {
            Some(z) if z != y => return false,
            Some(_) => {}
            None => {
                col[x] = Some(y);
                log.push(x);
            }
        }
    }
    true
}

fn decorate(
    s: &Species,
    g: &Graph,
    v: usize,
    col: &mut Vec<Option<usize>>,
    elts: &mut Vec<usize>,
    out: &mut Vec<Decoration>,
) {
    if v == g.n_vertices() {
        free_edges(s, g, 0, col, elts, out);
        return;
    }
    let hs = g.halves_at(v);
    let n = hs.len();
    for a in 0..s.size(n) {
        let ca = s.colour(n, a);
        let mut log = Vec::new();
        let ok = (0..n).all(|i| set(s, g, col, g.tau(g.s(hs[i])), ca[i], &mut log));
        if ok {
            elts.push(a);
            decorate(s, g, v + 1, col, elts, out);
            elts.pop();
        }
        for x in log {
            col[x] = None;
        }
    }
}

fn free_edges(
    s: &Species,
    g: &Graph,
    from: usize,
    col: &mut Vec<Option<usize>>,
    elts: &[usize],
    out: &mut Vec<Decoration>,
) {
    match (from..g.n_edges()).find(|&e| col[e].is_none()) {
        None => out.push(Decoration {
            edge_colours: col.iter().map(|c| c.unwrap()).collect(),
            vertex_elements: elts.to_vec(),
        }),
        Some(e) => {
            for c in 0..s.palette.len() {
                let mut log = Vec::new();
                if set(s, g, col, e, c, &mut log) {
                    free_edges(s, g, e + 1, col, elts, out);
                }
                for x in log {
                    col[x] = None;
                }
            }
        }
    }
}

/// Image of a decoration under an isomorphism `g → h` given by edge and
/// vertex maps, reading vertex elements through the induced slot
/// permutation.
pub fn transport_decoration(
    s: &Species,
    g: &Graph,
    h: &Graph,
    edges: &[usize],
    vertices: &[usize],
    d: &Decoration,
) -> Decoration {
    let mut edge_colours = vec![0; h.n_edges()];
    for e in 0..g.n_edges() {
        edge_colours[edges[e]] = d.edge_colours[e];
    }
    let mut vertex_elements = vec![0; h.n_vertices()];
    for v in 0..g.n_vertices() {
        let w = vertices[v];
        let n = g.valency(v);
        // slot j of w is the image of slot sigma(j) of v
        let gs: Vec<usize> = g.halves_at(v).iter().map(|&x| edges[g.s(x)]).collect();
        let sigma: Perm = h
            .halves_at(w)
            .iter()
            .map(|&y| gs.iter().position(|&e| e == h.s(y)).unwrap())
            .collect();
        vertex_elements[w] = s.act(n, d.vertex_elements[v], &sigma);
    }
    Decoration { edge_colours, vertex_elements }
}

/// Two colours swapped by ω with a few elements in arity ≤ 3; every
/// `S_n` has at most two elements.
pub fn directed_sample() -> Species {
    let palette = Palette::new(vec!["in".into(), "out".into()], vec![1, 0]).unwrap();
    let names = vec![
        vec!["p".into()],
        vec!["a".into(), "b".into()],
        vec!["c".into(), "c'".into()],
        vec!["iii".into(), "ooo".into()],
    ];
    let colours = vec![
        vec![vec![]],
        vec![vec![0], vec![1]],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![0, 0, 0], vec![1, 1, 1]],
    ];
    let gens = vec![vec![vec![]], vec![vec![], vec![]], vec![vec![1], vec![0]], vec![vec![0, 0], vec![1, 1]]];
    Species::from_generators(palette, names, colours, gens).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_build_actions() {
        let s = directed_sample();
        assert_eq!(s.act(2, 0, &[1, 0]), 1);
        let bad = Species::from_generators(
            Palette::monochrome(),
            vec![vec!["*".into()], vec!["*".into()], vec!["x".into(), "y".into()]],
            vec![vec![vec![]], vec![vec![0]], vec![vec![0, 0], vec![0, 0]]],
            vec![vec![vec![]], vec![vec![]], vec![vec![1], vec![1]]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn evaluation() {
        let k = Species::terminal(3);
        for g in [Graph::wheel(2).unwrap(), Graph::corolla_n(3), Graph::stick()] {
            assert_eq!(evaluate_species(&k, &g, None).unwrap().len(), 1);
        }
        let s = directed_sample();
        assert_eq!(evaluate_species(&s, &Graph::corolla_n(2), None).unwrap().len(), 2);
        // gluing the two ports of a 2-corolla keeps elements with c_x = ω c_y
        let w = Graph::wheel(1).unwrap();
        assert_eq!(evaluate_species(&s, &w, None).unwrap().len(), 2);
        assert_eq!(evaluate_species(&s, &Graph::stick(), None).unwrap().len(), 2);
        let r = evaluate_species(&s, &Graph::corolla_n(4), None);
        assert!(matches!(r, Err(Error::ValencyOutOfRange(_, 4, 3))));
    }
}
