use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use feyngraph::canon::{canonical_form, find_iso, is_isomorphic, Decor};
use feyngraph::circuit::CircuitAlgebra;
use feyngraph::etale::{check_etale, glue_ports, EtaleMorphism};
use feyngraph::nerve::{kleisli_compose, kleisli_equal, restrict, KleisliMorphism};
use feyngraph::pointed::hom_pointed;
use feyngraph::species::{Decoration, Palette, Species};
use feyngraph::substitution::{enumerate_x_graphs, Bounds, XGraph};
use feyngraph::Graph;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

/// A random graph: vertices of the given valencies, `extra` further edges,
/// and a random fixed-point-free τ.
fn random_graph(valencies: &[usize], extra: usize, seed: u64) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    let nh: usize = valencies.iter().sum();
    let mut ne = nh + extra;
    if ne % 2 == 1 {
        ne += 1;
    }
    let mut order: Vec<usize> = (0..ne).collect();
    order.shuffle(&mut rng);
    let mut tau = vec![0; ne];
    for p in order.chunks(2) {
        tau[p[0]] = p[1];
        tau[p[1]] = p[0];
    }
    let s: Vec<usize> = (0..nh).collect();
    let t: Vec<usize> = valencies.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
    Graph::new(tau, s, t, valencies.len()).unwrap()
}

fn graphs() -> impl Strategy<Value = Graph> {
    (prop::collection::vec(0usize..=3, 0..=3), 0usize..=3, any::<u64>()).prop_map(|(v, x, s)| random_graph(&v, x, s))
}

/// Graphs with at least four ports.
fn open_graphs() -> impl Strategy<Value = Graph> {
    (prop::collection::vec(0usize..=3, 0..=3), any::<u64>()).prop_map(|(v, s)| {
        // edges outside the image of s are ports
        let nh: usize = v.iter().sum();
        random_graph(&v, nh + 4, s)
    })
}

fn permutation(n: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn shuffled(g: &Graph, seed: u64) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    let pe = permutation(g.n_edges(), &mut rng);
    let ph = permutation(g.n_halves(), &mut rng);
    let pv = permutation(g.n_vertices(), &mut rng);
    g.relabel(&pe, &ph, &pv)
}

/// Disjoint pairs of distinct ports, chosen by the seed.
fn port_pairs(g: &Graph, seed: u64, max_pairs: usize) -> Vec<(usize, usize)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut ports = g.ports();
    ports.shuffle(&mut rng);
    ports.chunks_exact(2).take(max_pairs).map(|p| (p[0], p[1])).collect()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn canonical_form_ignores_ids(g in graphs(), seed in any::<u64>()) {
        let h = shuffled(&g, seed);
        let (cg, ch) = (canonical_form(&g), canonical_form(&h));
        prop_assert_eq!(&cg.certificate, &ch.certificate);
        prop_assert_eq!(cg.graph.tau_map(), ch.graph.tau_map());
        prop_assert_eq!(cg.graph.s_map(), ch.graph.s_map());
        prop_assert_eq!(cg.graph.t_map(), ch.graph.t_map());
        prop_assert!(is_isomorphic(&g, &h).is_some());
    }

    #[test]
    fn isomorphisms_are_etale_and_compose(g in graphs(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let h = shuffled(&g, s1);
        let k = shuffled(&h, s2);
        let f1 = find_iso(&g, Decor::default(), &h, Decor::default()).unwrap();
        let f2 = find_iso(&h, Decor::default(), &k, Decor::default()).unwrap();
        let a = check_etale(&g, &h, f1.edges, f1.halves, f1.vertices).unwrap();
        let b = check_etale(&h, &k, f2.edges, f2.halves, f2.vertices).unwrap();
        prop_assert!(a.then(&b).recheck().is_ok());
    }

    #[test]
    fn gluing_maps_are_etale(g in graphs(), seed in any::<u64>()) {
        let pairs = port_pairs(&g, seed, 2);
        let (glued, q) = glue_ports(&g, &pairs).unwrap();
        prop_assert!(q.recheck().is_ok());
        prop_assert_eq!(glued.n_vertices(), g.n_vertices());
        prop_assert_eq!(glued.n_halves(), g.n_halves());
        let id = EtaleMorphism::identity(&g);
        prop_assert!(id.then(&q).recheck().is_ok());
    }

    #[test]
    fn gluing_in_steps_or_any_order_agrees(g in open_graphs(), seed in any::<u64>()) {
        let pairs = port_pairs(&g, seed, 2);
        prop_assert_eq!(pairs.len(), 2);
        let (all, _) = glue_ports(&g, &pairs).unwrap();
        let (first, q) = glue_ports(&g, &pairs[..1]).unwrap();
        let (a, b) = pairs[1];
        let (stepped, _) = glue_ports(&first, &[(q.edges[a], q.edges[b])]).unwrap();
        prop_assert!(is_isomorphic(&all, &stepped).is_some());
        let flipped: Vec<(usize, usize)> = pairs.iter().rev().map(|&(a, b)| (b, a)).collect();
        let (reordered, _) = glue_ports(&g, &flipped).unwrap();
        prop_assert!(is_isomorphic(&all, &reordered).is_some());
    }
}

fn admissible(x: usize) -> Vec<XGraph> {
    let bounds = Bounds { max_vertices: 2, max_valency: 3, connected_only: false, admissible_only: true };
    enumerate_x_graphs(x, bounds).unwrap()
}

#[test]
fn enumeration_has_no_repeats() {
    for x in 0..=3 {
        let found = admissible(x);
        let certs: BTreeSet<_> = found.iter().map(|g| g.certificate(false)).collect();
        assert_eq!(certs.len(), found.len(), "|X| = {x}");
    }
}

proptest! {
    #![proptest_config(config(100))]

    /// A relabelled copy of a random admissible X-graph with at most two
    /// vertices is found in the enumeration.
    #[test]
    fn enumeration_is_closed_under_relabelling(x in 0usize..=3, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let found = admissible(x);
        let g = &found[pick.index(found.len())];
        let mut rng = StdRng::seed_from_u64(seed);
        let pe = permutation(g.graph.n_edges(), &mut rng);
        let ph = permutation(g.graph.n_halves(), &mut rng);
        let pv = permutation(g.graph.n_vertices(), &mut rng);
        let moved = XGraph {
            graph: g.graph.relabel(&pe, &ph, &pv),
            labels: g.labels.iter().map(|(&e, &l)| (pe[e], l)).collect(),
        };
        let cert = moved.certificate(false);
        prop_assert_eq!(found.iter().filter(|f| f.certificate(false) == cert).count(), 1);
    }
}

/// `Z/3` in every arity up to 6 with trivial action, `a ⊠ b = a + 2b` and
/// `ζ(a) = a + 1`. The products are not symmetric, so the order in which
/// vertices are multiplied shows up in the result.
fn skew_algebra() -> CircuitAlgebra {
    let nmax = 6;
    let names = (0..=nmax).map(|_| (0..3).map(|i| i.to_string()).collect()).collect();
    let colours = (0..=nmax).map(|n| vec![vec![0; n]; 3]).collect();
    let action = (0..=nmax)
        .map(|n| {
            let k: usize = (1..=n).product();
            (0..3).map(|a| vec![a; k]).collect()
        })
        .collect();
    let s = Species::new(Palette::monochrome(), names, colours, action).unwrap();
    CircuitAlgebra::from_fns(s, |_, a, _, b| Some((a + 2 * b) % 3), |_, _, _, a| Some((a + 1) % 3), |_| Some(0), Some(0), false)
        .unwrap()
}

#[test]
fn refinement_restriction_multiplies_then_contracts() {
    // two trivalent vertices joined by two edges, one port on each
    let c = Graph::corolla_n(3).disjoint_union(&Graph::corolla_n(3));
    let p = c.ports();
    let (g, _) = glue_ports(&c, &[(p[0], p[3]), (p[1], p[4])]).unwrap();
    assert_eq!((g.n_vertices(), g.ports().len()), (2, 2));
    let k = KleisliMorphism::corolla_refinement(&g).unwrap();
    let ca = skew_algebra();
    for a in 0..3 {
        for b in 0..3 {
            let d = Decoration { edge_colours: vec![0; g.n_edges()], vertex_elements: vec![a, b] };
            let r = restrict(&ca, &k, &d).unwrap().unwrap();
            // a ⊠ b, then one contraction per inner edge
            assert_eq!(r.vertex_elements, vec![(a + 2 * b + 2) % 3], "a={a} b={b}");
        }
    }
}

/// Pointed maps between small graphs as Kleisli morphisms.
fn kleisli_homs(g: &Graph, h: &Graph) -> Vec<KleisliMorphism> {
    hom_pointed(g, h).unwrap().iter().map(|f| KleisliMorphism::from_pointed(f).unwrap()).collect()
}

#[test]
fn kleisli_equality_is_an_equivalence() {
    let w = Graph::wheel(1).unwrap();
    let l = Graph::line(2);
    for (a, b) in [(&w, &l), (&l, &l), (&w, &Graph::stick()), (&l, &Graph::wheel(2).unwrap())] {
        let hs = kleisli_homs(a, b);
        assert!(!hs.is_empty());
        let eq: Vec<Vec<bool>> = hs.iter().map(|x| hs.iter().map(|y| kleisli_equal(x, y).unwrap()).collect()).collect();
        for i in 0..hs.len() {
            assert!(eq[i][i]);
            for j in 0..hs.len() {
                assert_eq!(eq[i][j], eq[j][i]);
                for k in 0..hs.len() {
                    assert!(!(eq[i][j] && eq[j][k]) || eq[i][k]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(config(40))]

    /// Composition respects equality and is associative up to it.
    #[test]
    fn kleisli_composition_is_a_congruence(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let (w, l2, l1) = (Graph::wheel(1).unwrap(), Graph::line(2), Graph::line(1));
        let fs = kleisli_homs(&w, &l2);
        let gs = kleisli_homs(&l2, &l2);
        let hs = kleisli_homs(&l2, &l1);
        let f = &fs[i.index(fs.len())];
        let g = &gs[j.index(gs.len())];
        let h = &hs[k.index(hs.len())];
        let left = kleisli_compose(h, &kleisli_compose(g, f).unwrap()).unwrap();
        let right = kleisli_compose(&kleisli_compose(h, g).unwrap(), f).unwrap();
        prop_assert!(kleisli_equal(&left, &right).unwrap());
        let gf = kleisli_compose(g, f).unwrap();
        for f2 in fs.iter().filter(|f2| kleisli_equal(f, f2).unwrap()) {
            prop_assert!(kleisli_equal(&kleisli_compose(g, f2).unwrap(), &gf).unwrap());
        }
        let id = KleisliMorphism::identity(&l2);
        prop_assert!(kleisli_equal(&kleisli_compose(&id, f).unwrap(), f).unwrap());
        prop_assert!(kleisli_equal(&kleisli_compose(g, &id).unwrap(), g).unwrap());
    }
}
