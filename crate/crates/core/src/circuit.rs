//! Finite circuit algebras and modular operads stored as explicit tables,
//! with exhaustive axiom checkers.
//!
//! `⊠_{m,n}(a, b)` puts the positions of `a` first. `ζ^{i‡j}` with `i < j`
//! removes positions `i` and `j` and keeps the others in order. `ε(c)` has
//! colours `(c, ωc)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::perm::{self, Perm};
use crate::report::{Check, Report};
use crate::species::Species;

pub type BoxKey = (usize, usize, usize, usize);
pub type ZetaKey = (usize, usize, usize, usize);
pub type MultKey = (usize, usize, usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitAlgebra {
    pub species: Species,
    /// `(m, a, n, b) ↦ a ⊠ b`
    pub boxp: HashMap<BoxKey, usize>,
    /// `(n, i, j, a) ↦ ζ^{i‡j}(a)` for `i < j`
    pub zeta: HashMap<ZetaKey, usize>,
    pub eps: Vec<Option<usize>>,
    /// The external unit `⊖`; `None` runs in nonunital mode.
    pub unit: Option<usize>,
    /// Missing entries are tolerated and counted instead of rejected.
    pub truncated: bool,
}

/// Positions `i < j` of `a` whose colours match (`c_i = ω c_j`).
pub fn matched_pairs(s: &Species, n: usize, a: usize) -> Vec<(usize, usize)> {
    let c = s.colour(n, a);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if c[i] == s.omega(c[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

fn removed(v: &[usize], i: usize, j: usize) -> Vec<usize> {
    v.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect()
}

impl CircuitAlgebra {
    pub fn validate(&self) -> Result<()> {
        let s = &self.species;
        let nmax = s.nmax;
        let bad = |m: String| Err(Error::InvalidSpecies(m));
        for (&(m, a, n, b), &r) in &self.boxp {
            if m + n > nmax || a >= s.size(m) || b >= s.size(n) || r >= s.size(m + n) {
                return bad(format!("⊠ entry ({m}, {a}, {n}, {b}) out of range"));
            }
        }
        for (&(n, i, j, a), &r) in &self.zeta {
            if n > nmax || n < 2 || i >= j || j >= n || a >= s.size(n) || r >= s.size(n - 2) {
                return bad(format!("ζ entry ({n}, {i}, {j}, {a}) out of range"));
            }
            let c = s.colour(n, a);
            if c[i] != s.omega(c[j]) {
                return Err(Error::ColourMismatch(format!(
                    "ζ^{{{i}‡{j}}} on {} whose colours do not match",
                    s.names[n][a]
                )));
            }
        }
        if self.eps.len() != s.palette.len() {
            return bad("ε is not given on every colour".into());
        }
        if nmax < 2 {
            return bad("arity 2 is needed for ε".into());
        }
        for e in self.eps.iter().flatten() {
            if *e >= s.size(2) {
                return bad(format!("ε value {e} out of range"));
            }
        }
        if let Some(u) = self.unit {
            if u >= s.size(0) {
                return bad(format!("⊖ value {u} out of range"));
            }
        }
        if self.truncated {
            return Ok(());
        }
        for m in 0..=nmax {
            for n in 0..=nmax - m {
                for a in 0..s.size(m) {
                    for b in 0..s.size(n) {
                        if !self.boxp.contains_key(&(m, a, n, b)) {
                            return bad(format!("⊠ missing on ({}, {})", s.names[m][a], s.names[n][b]));
                        }
                    }
                }
            }
        }
        for n in 2..=nmax {
            for a in 0..s.size(n) {
                for (i, j) in matched_pairs(s, n, a) {
                    if !self.zeta.contains_key(&(n, i, j, a)) {
                        return bad(format!("ζ^{{{i}‡{j}}} missing on {}", s.names[n][a]));
                    }
                }
            }
        }
        if self.eps.iter().any(Option::is_none) {
            return bad("ε missing on a colour".into());
        }
        Ok(())
    }

    /// Fills the tables from functions on the whole in-bound domain.
    pub fn from_fns(
        species: Species,
        boxf: impl Fn(usize, usize, usize, usize) -> Option<usize>,
        zetaf: impl Fn(usize, usize, usize, usize) -> Option<usize>,
        epsf: impl Fn(usize) -> Option<usize>,
        unit: Option<usize>,
        truncated: bool,
    ) -> Result<CircuitAlgebra> {
        let s = &species;
        let mut boxp = HashMap::new();
        let mut zeta = HashMap::new();
        for m in 0..=s.nmax {
            for n in 0..=s.nmax - m {
                for a in 0..s.size(m) {
                    for b in 0..s.size(n) {
                        if let Some(r) = boxf(m, a, n, b) {
                            boxp.insert((m, a, n, b), r);
                        }
                    }
                }
            }
        }
        for n in 2..=s.nmax {
            for a in 0..s.size(n) {
                for (i, j) in matched_pairs(s, n, a) {
                    if let Some(r) = zetaf(n, i, j, a) {
                        zeta.insert((n, i, j, a), r);
                    }
                }
            }
        }
        let eps = (0..s.palette.len()).map(epsf).collect();
        let ca = CircuitAlgebra { species, boxp, zeta, eps, unit, truncated };
        ca.validate()?;
        Ok(ca)
    }

    /// All maps forced on the terminal species.
    pub fn terminal(nmax: usize) -> CircuitAlgebra {
        CircuitAlgebra::from_fns(
            Species::terminal(nmax),
            |_, _, _, _| Some(0),
            |_, _, _, _| Some(0),
            |_| Some(0),
            Some(0),
            false,
        )
        .expect("terminal algebra is valid")
    }

    pub fn boxed(&self, m: usize, a: usize, n: usize, b: usize) -> Option<usize> {
        self.boxp.get(&(m, a, n, b)).copied()
    }

    pub fn contract(&self, n: usize, i: usize, j: usize, a: usize) -> Option<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.zeta.get(&(n, i, j, a)).copied()
    }
}

/// An element whose positions carry labels; equality is up to moving the
/// labels back into increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lab {
    n: usize,
    a: usize,
    labels: Vec<usize>,
}

impl Lab {
    fn plain(n: usize, a: usize, from: usize) -> Lab {
        Lab { n, a, labels: (from..from + n).collect() }
    }

    fn acted(s: &Species, n: usize, a: usize, sigma: &[usize], from: usize) -> Lab {
        Lab { n, a: s.act(n, a, sigma), labels: sigma.iter().map(|&x| x + from).collect() }
    }

    fn pos(&self, l: usize) -> usize {
        self.labels.iter().position(|&x| x == l).expect("label present")
    }

    fn aligned(&self, s: &Species) -> (usize, usize, Vec<usize>) {
        let mut order: Perm = (0..self.n).collect();
        order.sort_by_key(|&i| self.labels[i]);
        let mut labels = self.labels.clone();
        labels.sort();
        (self.n, s.act(self.n, self.a, &order), labels)
    }

    fn same(&self, other: &Lab, s: &Species) -> bool {
        self.aligned(s) == other.aligned(s)
    }

    fn colour_at(&self, s: &Species, l: usize) -> usize {
        s.colour(self.n, self.a)[self.pos(l)]
    }
}

fn box_lab(ca: &CircuitAlgebra, x: &Lab, y: &Lab) -> Option<Lab> {
    let a = ca.boxed(x.n, x.a, y.n, y.a)?;
    let mut labels = x.labels.clone();
    labels.extend(&y.labels);
    Some(Lab { n: x.n + y.n, a, labels })
}

fn zeta_lab(zeta: &HashMap<ZetaKey, usize>, x: &Lab, p: usize, q: usize) -> Option<Lab> {
    let (i, j) = {
        let (i, j) = (x.pos(p), x.pos(q));
        if i < j { (i, j) } else { (j, i) }
    };
    let a = *zeta.get(&(x.n, i, j, x.a))?;
    Some(Lab { n: x.n - 2, a, labels: removed(&x.labels, i, j) })
}

fn opt_eq(s: &Species, x: Option<Lab>, y: Option<Lab>) -> Option<bool> {
    Some(x?.same(&y?, s))
}

/// Exhaustive check of the circuit algebra axioms within the species bound.
pub fn check_circuit_axioms(ca: &CircuitAlgebra) -> Report {
    let s = &ca.species;
    let nmax = s.nmax;
    let mut rep = Report::new("circuit algebra axioms");
    if ca.unit.is_none() {
        rep.notes.push("nonunital: the ⊠-unit law is not checked".into());
    }
    let nm = |n: usize, a: usize| s.names[n][a].clone();

    let mut colours = Check::new("box_colours");
    let mut equiv = Check::new("box_equivariance");
    let mut comm = Check::new("box_commutativity");
    let mut unit = Check::new("box_unit");
    for m in 0..=nmax {
        for n in 0..=nmax - m {
            for a in 0..s.size(m) {
                for b in 0..s.size(n) {
                    let r = ca.boxed(m, a, n, b);
                    colours.record(
                        r.map(|r| {
                            let mut c = s.colour(m, a).to_vec();
                            c.extend(s.colour(n, b));
                            s.colour(m + n, r) == c.as_slice()
                        }),
                        || format!("colours of {} ⊠ {}", nm(m, a), nm(n, b)),
                    );
                    // b ⊠ a = (a ⊠ b)·π
                    let pi: Perm = (0..n).map(|i| m + i).chain(0..m).collect();
                    comm.record(
                        r.and_then(|r| Some(ca.boxed(n, b, m, a)? == s.act(m + n, r, &pi))),
                        || format!("{} ⊠ {} against the swapped product", nm(m, a), nm(n, b)),
                    );
                    for sigma in perm::permutations(m) {
                        for rho in perm::permutations(n) {
                            let lhs = box_lab(ca, &Lab::acted(s, m, a, &sigma, 0), &Lab::acted(s, n, b, &rho, m));
                            let rhs = box_lab(ca, &Lab::plain(m, a, 0), &Lab::plain(n, b, m));
                            equiv.record(opt_eq(s, lhs, rhs), || {
                                format!("{}·{:?} ⊠ {}·{:?}", nm(m, a), sigma, nm(n, b), rho)
                            });
                        }
                    }
                }
            }
        }
    }
    if let Some(u) = ca.unit {
        for n in 0..=nmax {
            for a in 0..s.size(n) {
                unit.record(
                    ca.boxed(0, u, n, a).zip(ca.boxed(n, a, 0, u)).map(|(l, r)| l == a && r == a),
                    || format!("⊖ on {}", nm(n, a)),
                );
            }
        }
    }

    let mut c1 = Check::new("C1");
    for m in 0..=nmax {
        for n in 0..=nmax - m {
            for p in 0..=nmax - m - n {
                for a in 0..s.size(m) {
                    for b in 0..s.size(n) {
                        for c in 0..s.size(p) {
                            let lhs = ca.boxed(m, a, n, b).and_then(|ab| ca.boxed(m + n, ab, p, c));
                            let rhs = ca.boxed(n, b, p, c).and_then(|bc| ca.boxed(m, a, n + p, bc));
                            c1.record(lhs.zip(rhs).map(|(l, r)| l == r), || {
                                format!("({} ⊠ {}) ⊠ {}", nm(m, a), nm(n, b), nm(p, c))
                            });
                        }
                    }
                }
            }
        }
    }

    let mut zc = Check::new("zeta_colours");
    let mut ze = Check::new("zeta_equivariance");
    let mut c2 = Check::new("C2");
    for n in 2..=nmax {
        for a in 0..s.size(n) {
            let pairs = matched_pairs(s, n, a);
            for &(i, j) in &pairs {
                zc.record(ca.contract(n, i, j, a).map(|r| s.colour(n - 2, r) == removed(s.colour(n, a), i, j)), || {
                    format!("colours of ζ^{{{i}‡{j}}}({})", nm(n, a))
                });
                for sigma in perm::permutations(n) {
                    // positions k, l of a·σ carry labels σk = i, σl = j
                    let x = Lab::acted(s, n, a, &sigma, 0);
                    let lhs = zeta_lab(&ca.zeta, &x, i, j);
                    let rhs = zeta_lab(&ca.zeta, &Lab::plain(n, a, 0), i, j);
                    ze.record(opt_eq(s, lhs, rhs), || format!("ζ^{{{i}‡{j}}} on {}·{:?}", nm(n, a), sigma));
                }
            }
            for &(i, j) in &pairs {
                for &(k, l) in &pairs {
                    if (i, j) >= (k, l) || k == i || k == j || l == i || l == j {
                        continue;
                    }
                    let x = Lab::plain(n, a, 0);
                    let lhs = zeta_lab(&ca.zeta, &x, i, j).and_then(|y| zeta_lab(&ca.zeta, &y, k, l));
                    let rhs = zeta_lab(&ca.zeta, &x, k, l).and_then(|y| zeta_lab(&ca.zeta, &y, i, j));
                    c2.record(opt_eq(s, lhs, rhs), || {
                        format!("contractions {{{i},{j}}} and {{{k},{l}}} of {}", nm(n, a))
                    });
                }
            }
        }
    }

    let mut c3 = Check::new("C3");
    for m in 0..=nmax {
        for n in 0..=nmax - m {
            for a in 0..s.size(m) {
                for b in 0..s.size(n) {
                    let x = Lab::plain(m, a, 0);
                    let y = Lab::plain(n, b, m);
                    for (i, j) in matched_pairs(s, m, a) {
                        let lhs = zeta_lab(&ca.zeta, &x, i, j).and_then(|z| box_lab(ca, &z, &y));
                        let rhs = box_lab(ca, &x, &y).and_then(|z| zeta_lab(&ca.zeta, &z, i, j));
                        c3.record(opt_eq(s, lhs, rhs), || {
                            format!("ζ^{{{i}‡{j}}}({}) ⊠ {}", nm(m, a), nm(n, b))
                        });
                    }
                    for (i, j) in matched_pairs(s, n, b) {
                        let lhs = zeta_lab(&ca.zeta, &y, m + i, m + j).and_then(|z| box_lab(ca, &x, &z));
                        let rhs = box_lab(ca, &x, &y).and_then(|z| zeta_lab(&ca.zeta, &z, m + i, m + j));
                        c3.record(opt_eq(s, lhs, rhs), || {
                            format!("{} ⊠ ζ^{{{i}‡{j}}}({})", nm(m, a), nm(n, b))
                        });
                    }
                }
            }
        }
    }

    let mut ec = Check::new("eps_colours");
    let mut eo = Check::new("eps_omega");
    for c in 0..s.palette.len() {
        let cn = &s.palette.names[c];
        ec.record(ca.eps[c].map(|e| s.colour(2, e) == [c, s.omega(c)]), || format!("ε({cn})"));
        eo.record(
            ca.eps[c].zip(ca.eps[s.omega(c)]).map(|(e, f)| f == s.act(2, e, &[1, 0])),
            || format!("ε(ω {cn}) against ε({cn})·σ₂"),
        );
    }
    let mut eu = Check::new("eps_unit");
    for n in 1..=nmax.saturating_sub(2) {
        for a in 0..s.size(n) {
            for x in 0..n {
                let c = s.colour(n, a)[x];
                let got = ca.eps[c].and_then(|e| {
                    let al = Lab::plain(n, a, 0);
                    let el = Lab { n: 2, a: e, labels: vec![x + n + 2, n + 1] };
                    let mut r = zeta_lab(&ca.zeta, &box_lab(ca, &al, &el)?, x, n + 1)?;
                    let p = r.pos(x + n + 2);
                    r.labels[p] = x;
                    Some(r)
                });
                eu.record(got.map(|r| r.same(&Lab::plain(n, a, 0), s)), || {
                    format!("ζ^{{{x}‡ε}}({} ⊠ ε)", nm(n, a))
                });
            }
        }
    }

    rep.checks = vec![colours, equiv, comm];
    if ca.unit.is_some() {
        rep.checks.push(unit);
    }
    rep.checks.extend([c1, zc, ze, c2, c3, ec, eo, eu]);
    rep
}

/// A modular operad given by `◊`, `ζ` and `ε`. `◊^{x‡y}_{m,n}` is stored for
/// `m + n ≤ N_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularOperad {
    pub species: Species,
    /// `(m, a, n, b, x, y) ↦ a ◊^{x‡y} b`
    pub mult: HashMap<MultKey, usize>,
    pub zeta: HashMap<ZetaKey, usize>,
    pub eps: Vec<Option<usize>>,
    pub truncated: bool,
}

impl ModularOperad {
    pub fn diamond(&self, m: usize, a: usize, n: usize, b: usize, x: usize, y: usize) -> Result<usize> {
        let s = &self.species;
        let (ca, cb) = (s.colour(m, a), s.colour(n, b));
        if x >= m || y >= n || ca[x] != s.omega(cb[y]) {
            return Err(Error::ColourMismatch(format!(
                "{} at {x} against {} at {y}",
                s.names[m][a], s.names[n][b]
            )));
        }
        self.mult
            .get(&(m, a, n, b, x, y))
            .copied()
            .ok_or_else(|| Error::OutOfBounds(format!("◊ on arities {m}, {n}")))
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.species;
        for (&(m, a, n, b, x, y), &r) in &self.mult {
            if m + n > s.nmax || m + n < 2 || a >= s.size(m) || b >= s.size(n) || r >= s.size(m + n - 2) {
                return Err(Error::InvalidSpecies(format!("◊ entry ({m}, {a}, {n}, {b}) out of range")));
            }
            self.diamond(m, a, n, b, x, y)?;
        }
        if self.truncated {
            return Ok(());
        }
        for (m, a, n, b, x, y) in mult_domain(s) {
            if !self.mult.contains_key(&(m, a, n, b, x, y)) {
                return Err(Error::InvalidSpecies(format!(
                    "◊^{{{x}‡{y}}} missing on ({}, {})",
                    s.names[m][a], s.names[n][b]
                )));
            }
        }
        Ok(())
    }
}

fn mult_domain(s: &Species) -> Vec<MultKey> {
    let mut out = Vec::new();
    for m in 1..=s.nmax {
        for n in 1..=s.nmax - m {
            for a in 0..s.size(m) {
                for b in 0..s.size(n) {
                    for x in 0..m {
                        for y in 0..n {
                            if s.colour(m, a)[x] == s.omega(s.colour(n, b)[y]) {
                                out.push((m, a, n, b, x, y));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `◊^{x‡y} = ζ^{x‡m+y} ∘ ⊠`.
pub fn derive_multiplication(ca: &CircuitAlgebra) -> ModularOperad {
    let s = &ca.species;
    let mut mult = HashMap::new();
    let mut truncated = ca.truncated;
    for (m, a, n, b, x, y) in mult_domain(s) {
        match ca.boxed(m, a, n, b).and_then(|ab| ca.contract(m + n, x, m + y, ab)) {
            Some(r) => {
                mult.insert((m, a, n, b, x, y), r);
            }
            None => truncated = true,
        }
    }
    ModularOperad { species: s.clone(), mult, zeta: ca.zeta.clone(), eps: ca.eps.clone(), truncated }
}

fn mult_lab(mo: &ModularOperad, x: &Lab, y: &Lab, p: usize, q: usize) -> Option<Lab> {
    let (i, j) = (x.pos(p), y.pos(q));
    let a = *mo.mult.get(&(x.n, x.a, y.n, y.a, i, j))?;
    let mut labels: Vec<usize> = x.labels.iter().copied().filter(|&l| l != p).collect();
    labels.extend(y.labels.iter().copied().filter(|&l| l != q));
    Some(Lab { n: x.n + y.n - 2, a, labels })
}

/// Exhaustive check of the modular operad axioms, the unit law and
/// symmetry of `◊`.
pub fn check_modular_axioms(mo: &ModularOperad) -> Report {
    let s = &mo.species;
    let nmax = s.nmax;
    let mut rep = Report::new("modular operad axioms");
    let nm = |n: usize, a: usize| s.names[n][a].clone();
    let matched = |x: &Lab, p: usize, y: &Lab, q: usize| x.colour_at(s, p) == s.omega(y.colour_at(s, q));

    let mut colours = Check::new("mult_colours");
    let mut equiv = Check::new("mult_equivariance");
    let mut sym = Check::new("mult_symmetry");
    for (m, a, n, b, x, y) in mult_domain(s) {
        let r = mo.mult.get(&(m, a, n, b, x, y)).copied();
        colours.record(
            r.map(|r| {
                let mut c = removed(s.colour(m, a), x, x);
                c.extend(removed(s.colour(n, b), y, y));
                s.colour(m + n - 2, r) == c.as_slice()
            }),
            || format!("colours of {} ◊^{{{x}‡{y}}} {}", nm(m, a), nm(n, b)),
        );
        let xa = Lab::plain(m, a, 0);
        let yb = Lab::plain(n, b, m);
        sym.record(opt_eq(s, mult_lab(mo, &xa, &yb, x, m + y), mult_lab(mo, &yb, &xa, m + y, x)), || {
            format!("{} ◊^{{{x}‡{y}}} {} against the swapped product", nm(m, a), nm(n, b))
        });
        for sigma in perm::permutations(m) {
            for rho in perm::permutations(n) {
                let lhs = mult_lab(mo, &Lab::acted(s, m, a, &sigma, 0), &Lab::acted(s, n, b, &rho, m), x, m + y);
                let rhs = mult_lab(mo, &xa, &yb, x, m + y);
                equiv.record(opt_eq(s, lhs, rhs), || {
                    format!("{}·{:?} ◊^{{{x}‡{y}}} {}·{:?}", nm(m, a), sigma, nm(n, b), rho)
                });
            }
        }
    }

    let mut m1 = Check::new("M1");
    let mut m3 = Check::new("M3");
    let mut m4 = Check::new("M4");
    for m in 1..=nmax {
        for n in 1..=nmax - m {
            for a in 0..s.size(m) {
                for b in 0..s.size(n) {
                    let xa = Lab::plain(m, a, 0);
                    let yb = Lab::plain(n, b, m);
                    for x in 0..m {
                        for y in m..m + n {
                            if !matched(&xa, x, &yb, y) {
                                continue;
                            }
                            let ab = mult_lab(mo, &xa, &yb, x, y);
                            // contractions inside one factor (M3) or across (M4)
                            let rest: Vec<usize> = (0..m + n).filter(|&l| l != x && l != y).collect();
                            for (ui, &u) in rest.iter().enumerate() {
                                for &v in &rest[ui + 1..] {
                                    let (cu, cv) = (
                                        if u < m { xa.colour_at(s, u) } else { yb.colour_at(s, u) },
                                        if v < m { xa.colour_at(s, v) } else { yb.colour_at(s, v) },
                                    );
                                    if cu != s.omega(cv) {
                                        continue;
                                    }
                                    let lhs = ab.clone().and_then(|z| zeta_lab(&mo.zeta, &z, u, v));
                                    if u < m && v < m {
                                        let rhs = zeta_lab(&mo.zeta, &xa, u, v).and_then(|z| mult_lab(mo, &z, &yb, x, y));
                                        m3.record(opt_eq(s, lhs, rhs), || {
                                            format!("ζ^{{{u}‡{v}}}({} ◊^{{{x}‡{y}}} {})", nm(m, a), nm(n, b))
                                        });
                                    } else if u >= m && v >= m {
                                        let rhs = zeta_lab(&mo.zeta, &yb, u, v).and_then(|z| mult_lab(mo, &xa, &z, x, y));
                                        m3.record(opt_eq(s, lhs, rhs), || {
                                            format!("ζ^{{{u}‡{v}}}({} ◊^{{{x}‡{y}}} {})", nm(m, a), nm(n, b))
                                        });
                                    } else {
                                        let rhs = mult_lab(mo, &xa, &yb, u, v).and_then(|z| zeta_lab(&mo.zeta, &z, x, y));
                                        m4.record(opt_eq(s, lhs, rhs), || {
                                            format!("pairs {{{x},{y}}} and {{{u},{v}}} across {} and {}", nm(m, a), nm(n, b))
                                        });
                                    }
                                }
                            }
                            for p in 1..=nmax - m - n {
                                for c in 0..s.size(p) {
                                    let zc = Lab::plain(p, c, m + n);
                                    for z in m + n..m + n + p {
                                        for u in (0..m + n).filter(|&l| l != x && l != y) {
                                            let cu = if u < m { xa.colour_at(s, u) } else { yb.colour_at(s, u) };
                                            if cu != s.omega(zc.colour_at(s, z)) {
                                                continue;
                                            }
                                            let lhs = ab.clone().and_then(|w| mult_lab(mo, &w, &zc, u, z));
                                            let rhs = if u >= m {
                                                mult_lab(mo, &yb, &zc, u, z).and_then(|w| mult_lab(mo, &xa, &w, x, y))
                                            } else {
                                                mult_lab(mo, &xa, &zc, u, z).and_then(|w| mult_lab(mo, &w, &yb, x, y))
                                            };
                                            m1.record(opt_eq(s, lhs, rhs), || {
                                                format!(
                                                    "({} ◊^{{{x}‡{y}}} {}) ◊^{{{u}‡{z}}} {}",
                                                    nm(m, a),
                                                    nm(n, b),
                                                    nm(p, c)
                                                )
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut m2 = Check::new("M2");
    let mut ze = Check::new("zeta_equivariance");
    for n in 2..=nmax {
        for a in 0..s.size(n) {
            let pairs = matched_pairs(s, n, a);
            let x = Lab::plain(n, a, 0);
            for &(i, j) in &pairs {
                for sigma in perm::permutations(n) {
                    let lhs = zeta_lab(&mo.zeta, &Lab::acted(s, n, a, &sigma, 0), i, j);
                    ze.record(opt_eq(s, lhs, zeta_lab(&mo.zeta, &x, i, j)), || {
                        format!("ζ^{{{i}‡{j}}} on {}·{:?}", nm(n, a), sigma)
                    });
                }
                for &(k, l) in &pairs {
                    if (i, j) >= (k, l) || k == i || k == j || l == i || l == j {
                        continue;
                    }
                    let lhs = zeta_lab(&mo.zeta, &x, i, j).and_then(|y| zeta_lab(&mo.zeta, &y, k, l));
                    let rhs = zeta_lab(&mo.zeta, &x, k, l).and_then(|y| zeta_lab(&mo.zeta, &y, i, j));
                    m2.record(opt_eq(s, lhs, rhs), || {
                        format!("contractions {{{i},{j}}} and {{{k},{l}}} of {}", nm(n, a))
                    });
                }
            }
        }
    }

    let mut unit = Check::new("mult_unit");
    for n in 1..=nmax.saturating_sub(2) {
        for a in 0..s.size(n) {
            for x in 0..n {
                let c = s.colour(n, a)[x];
                let got = mo.eps[c].and_then(|e| {
                    let el = Lab { n: 2, a: e, labels: vec![x + n + 2, n + 1] };
                    let mut r = mult_lab(mo, &Lab::plain(n, a, 0), &el, x, n + 1)?;
                    let p = r.pos(x + n + 2);
                    r.labels[p] = x;
                    Some(r)
                });
                unit.record(got.map(|r| r.same(&Lab::plain(n, a, 0), s)), || {
                    format!("{} ◊^{{{x}‡ε}} ε", nm(n, a))
                });
            }
        }
    }
    rep.checks = vec![colours, equiv, sym, m1, m2, m3, m4, ze, unit];
    rep
}
