//! Frozen reference values. Hand-checkable values are asserted directly; the
//! rest are recomputed here by exhaustive search that shares no code with the
//! library.

use std::collections::BTreeSet;

use handlebody::complex::{cycle_chain, induced_h1_map};
use handlebody::covers::{chamber_ball, double_homology, universal_cover_support, DEFAULT_CHAMBER_CAP};
use handlebody::handlebody::BeltKind;
use handlebody::instances::{bundled, bundled_names, InstanceFile};
use handlebody::oracle::{build_double, enumerate_group_ball, gromov_link_check, oracle_homology};
use handlebody::words::{has_Z2, Letter, Presentation, Torsion, Word};
use handlebody::{AbelianGroup, Coefficients, SimpleHandlebody, SimplicialComplex};

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn complex(n: usize, simplices: &[&[usize]]) -> SimplicialComplex {
    let simplices = simplices.iter().map(|s| s.iter().map(|v| v - 1).collect()).collect();
    SimplicialComplex::from_indices(labels(n), simplices).unwrap()
}

fn cycle(n: usize) -> SimplicialComplex {
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    SimplicialComplex::from_indices(labels(n), edges).unwrap()
}

fn boundary_tetrahedron() -> SimplicialComplex {
    complex(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]])
}

fn octahedron() -> SimplicialComplex {
    // Opposite vertex pairs {1,4}, {2,5}, {3,6}.
    let mut tris = Vec::new();
    for a in [1, 4] {
        for b in [2, 5] {
            for c in [3, 6] {
                tris.push(vec![a - 1, b - 1, c - 1]);
            }
        }
    }
    SimplicialComplex::from_indices(labels(6), tris).unwrap()
}

/// Every vertex subset, tested for membership by inclusion in a maximal simplex.
fn all_faces(k: &SimplicialComplex) -> BTreeSet<Vec<usize>> {
    let n = k.vertex_count();
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| {
            k.maximal_simplices()
                .iter()
                .any(|m| s.iter().all(|v| m.contains(v)))
        })
        .collect()
}

fn adjacent(k: &SimplicialComplex, a: usize, b: usize) -> bool {
    k.maximal_simplices().iter().any(|m| m.contains(&a) && m.contains(&b))
}

/// Minimal non-faces by exhaustive subset scan.
fn brute_empty_simplices(k: &SimplicialComplex) -> BTreeSet<Vec<usize>> {
    let faces = all_faces(k);
    let n = k.vertex_count();
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<usize>>())
        .filter(|s| s.len() >= 2 && !faces.contains(s))
        .filter(|s| {
            (0..s.len()).all(|i| {
                let mut t = s.clone();
                t.remove(i);
                faces.contains(&t)
            })
        })
        .collect()
}

/// Induced 4-cycles `a b c d` up to rotation and reflection.
fn brute_squares(k: &SimplicialComplex) -> BTreeSet<BTreeSet<usize>> {
    let n = k.vertex_count();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let set: BTreeSet<usize> = [a, b, c, d].into();
                    if set.len() == 4
                        && adjacent(k, a, b)
                        && adjacent(k, b, c)
                        && adjacent(k, c, d)
                        && adjacent(k, d, a)
                        && !adjacent(k, a, c)
                        && !adjacent(k, b, d)
                    {
                        out.insert(set);
                    }
                }
            }
        }
    }
    out
}

fn free(r: usize) -> AbelianGroup {
    AbelianGroup::free(r)
}

fn groups(h: &handlebody::HomologyResult) -> Vec<AbelianGroup> {
    h.groups.clone()
}

fn words(p: &Presentation, text: &str) -> Word {
    p.parse_word(text).unwrap()
}

fn show(p: &Presentation, w: &[Letter]) -> String {
    p.format_word(&p.normal_word(w))
}

#[test]
fn full_subcomplexes_and_links() {
    let square = cycle(4);
    let j = square.full_subcomplex(&[0, 2]);
    assert_eq!(j.maximal_simplices(), &[vec![0], vec![1]]);
    assert_eq!(square.full_subcomplex(&[]).vertex_count(), 0);
    let tri = boundary_tetrahedron().full_subcomplex(&[0, 1, 2]);
    assert_eq!(tri.maximal_simplices(), &[vec![0, 1, 2]]);

    let link = square.link_label("1").unwrap();
    assert_eq!(link.maximal_simplex_labels(), vec![vec!["2".to_string()], vec!["4".to_string()]]);
    let link = boundary_tetrahedron().link_label("1").unwrap();
    assert!(link.is_cycle() && link.vertex_count() == 3);

    // Octahedron links by brute force: faces through v, with v removed.
    let oct = octahedron();
    let faces = all_faces(&oct);
    for v in 0..6 {
        let link = oct.link(v);
        assert!(link.is_cycle() && link.vertex_count() == 4);
        let expected: BTreeSet<Vec<usize>> = faces
            .iter()
            .filter(|s| s.len() == 2 && s.contains(&v))
            .flat_map(|s| s.iter().copied().filter(|&u| u != v))
            .map(|u| vec![u])
            .collect();
        let got: BTreeSet<Vec<usize>> = link
            .labels()
            .iter()
            .map(|l| vec![l.parse::<usize>().unwrap() - 1])
            .collect();
        assert_eq!(got, expected);
    }
}

#[test]
fn flagness_and_empty_simplices() {
    assert!(!cycle(3).is_flag());
    assert!(cycle(4).is_flag());
    assert!(octahedron().is_flag());
    assert!(brute_empty_simplices(&octahedron()).iter().all(|s| s.len() == 2));

    assert_eq!(boundary_tetrahedron().empty_simplices(), vec![vec![0, 1, 2, 3]]);
    assert!(cycle(4).empty_simplices().iter().all(|s| s.len() == 2));

    let prism = bundled("triangular_prism").unwrap();
    let nerve = prism.nerve();
    let brute: Vec<Vec<usize>> = brute_empty_simplices(nerve)
        .into_iter()
        .filter(|s| s.len() > 2)
        .collect();
    let lib: Vec<Vec<usize>> = nerve.empty_simplices().into_iter().filter(|s| s.len() > 2).collect();
    assert_eq!(lib, brute);
    let names: Vec<&str> = lib[0].iter().map(|&f| prism.facet_label(f)).collect();
    assert_eq!(names, ["S1", "S2", "S3"]);
}

#[test]
fn simplicial_homology_values() {
    assert_eq!(groups(&cycle(5).homology(Coefficients::Z)), vec![free(1), free(1)]);
    assert_eq!(
        groups(&boundary_tetrahedron().homology(Coefficients::Z)),
        vec![free(1), free(0), free(1)]
    );
    let rp2 = complex(
        6,
        &[
            &[1, 2, 3], &[1, 3, 4], &[1, 4, 5], &[1, 5, 6], &[1, 2, 6],
            &[2, 3, 5], &[3, 4, 6], &[2, 4, 5], &[3, 5, 6], &[2, 4, 6],
        ],
    );
    assert_eq!(rp2.euler_characteristic(), 1);
    let h = rp2.homology(Coefficients::Z);
    assert_eq!(h.degree(1).free_rank, 0);
    assert_eq!(h.degree(1).torsion, vec![2u32.into()]);
    assert!(h.degree(2).is_zero());
    let h2 = rp2.homology(Coefficients::Z2);
    assert_eq!(h2.betti(), vec![1, 1, 1]);
}

/// Seven-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
fn torus() -> SimplicialComplex {
    let tris = (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    SimplicialComplex::from_indices(labels(7), tris).unwrap()
}

#[test]
fn induced_maps_on_first_homology() {
    let t = torus();
    assert_eq!(t.euler_characteristic(), 0);
    let all: Vec<usize> = (0..7).collect();
    let id = induced_h1_map(&t, &all, &[]).unwrap();
    assert_eq!(id.codomain, free(2));
    assert!(id.kernel.is_zero() && id.cokernel.is_zero());

    // The path through consecutive vertices is an edge cycle of the torus.
    let meridian = cycle_chain(&all);
    let m = induced_h1_map(&t, &all, &[meridian]).unwrap();
    assert_eq!(m.codomain, free(1));
    assert_eq!(m.kernel, free(1));
    assert!(m.cokernel.is_zero());

    // A contractible full subcomplex: a single triangle.
    let z = induced_h1_map(&t, &[0, 1, 3], &[]).unwrap();
    assert!(z.domain.is_zero());
    assert_eq!(z.cokernel, free(2));
}

#[test]
fn handlebody_validation_and_quotients() {
    let cube = bundled("cube").unwrap();
    assert!(cube.validate().is_valid());
    assert_eq!(cube.quotient_nerve().unwrap().maximal_simplices(), cube.nerve().maximal_simplices());

    // Plus and minus facets sharing an edge.
    let mut file = InstanceFile::from_handlebody(&cube);
    file.belts = vec![serde_json::from_value(serde_json::json!({
        "plus": "1", "minus": "2", "matching": {"3": "3", "6": "6", "4": "4", "5": "5"}
    }))
    .unwrap()];
    let bad = file.to_handlebody("bad").unwrap();
    let report = bad.validate();
    assert!(report.violations.iter().any(|v| v.invariant == "belt facets adjacent"));

    for name in ["dodecahedron_torus", "genus1_pogorelov", "genus1_crossing"] {
        let h = bundled(name).unwrap();
        let q = h.quotient_nerve().unwrap();
        assert_eq!(h.genus(), 1);
        assert_eq!(q.euler_characteristic(), 0, "{name}");
        let domain: usize = h.belts.iter().map(|b| b.matching.len()).sum();
        let m = h.nerve().vertex_count();
        assert_eq!(q.vertex_count(), m - 2 * h.genus() - domain, "{name}");
    }
}

#[test]
fn delta_and_square_belts() {
    let tet = bundled("tetrahedron").unwrap();
    let d = tet.delta_belts().unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].kind, BeltKind::Delta(3));
    assert_eq!(d[0].facets, vec![0, 1, 2, 3]);

    let prism = bundled("triangular_prism").unwrap();
    let d = prism.delta_belts().unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].kind, BeltKind::Delta(2));
    assert!(bundled("dodecahedron").unwrap().delta_belts().unwrap().is_empty());

    assert!(bundled("cube").unwrap().is_flag());
    assert!(!prism.is_flag() && !tet.is_flag());

    for (name, count) in [("cube", 3), ("dodecahedron", 0), ("pentagon", 0)] {
        let h = bundled(name).unwrap();
        let lib: BTreeSet<BTreeSet<usize>> = h
            .square_belts()
            .unwrap()
            .iter()
            .map(|w| w.facets.iter().copied().collect())
            .collect();
        assert_eq!(lib, brute_squares(h.nerve()), "{name}");
        assert_eq!(lib.len(), count, "{name}");
        assert_eq!(has_Z2(&h).unwrap(), count > 0);
    }

    let crossing = bundled("genus1_crossing").unwrap();
    let squares = crossing.square_belts().unwrap();
    assert!(squares.iter().any(|w| w.crossing_belts.len() == 1));
}

#[test]
fn two_neighborliness() {
    assert!(bundled("tetrahedron").unwrap().polytope.two_neighborly());
    assert!(!bundled("cube").unwrap().polytope.two_neighborly());
    assert!(!bundled("pentagon").unwrap().polytope.two_neighborly());
}

#[test]
fn presentations() {
    let square = Presentation::new(&bundled("square").unwrap()).unwrap();
    assert_eq!(square.involutive_generators().len(), 4);
    assert_eq!(square.belt_count(), 0);
    let relators: BTreeSet<String> = square.relators().iter().map(|r| square.format_word(r)).collect();
    for rel in ["sF1 sF2 sF1 sF2", "sF2 sF3 sF2 sF3", "sF3 sF4 sF3 sF4", "sF1 sF4 sF1 sF4"] {
        assert!(relators.contains(rel), "{rel} missing from {relators:?}");
    }

    let h = bundled("genus1_pogorelov").unwrap();
    let p = Presentation::new(&h).unwrap();
    assert_eq!(p.belt_count(), 1);
    assert_eq!(p.conjugation_table(0), &h.belts[0].matching);
}

#[test]
fn coxeter_reduction() {
    let square = Presentation::new(&bundled("square").unwrap()).unwrap();
    assert!(square.is_identity(&words(&square, "sF1 sF1")));
    assert!(square.is_identity(&words(&square, "sF1 sF2 sF1 sF2")));
    assert!(square.support(&[0, 1, 0, 1]).is_empty());

    let pentagon = Presentation::new(&bundled("pentagon").unwrap()).unwrap();
    let w = words(&pentagon, "sF1 sF3 sF1 sF3");
    assert_eq!(show(&pentagon, &w), "sF1 sF3 sF1 sF3");
    assert_eq!(pentagon.support(&[0, 2]), BTreeSet::from([0, 2]));
    assert!(!pentagon.in_parabolic(&[0, 2], &BTreeSet::from([0, 1])));
    assert!(pentagon.in_parabolic(&[], &BTreeSet::new()));
}

#[test]
fn coset_decomposition_is_minimal_in_the_dihedral_group() {
    let p = Presentation::new(&bundled("square").unwrap()).unwrap();
    let t = BTreeSet::from([1]);
    assert_eq!(p.coset_decompose(&[0, 1], &t), (vec![0], vec![1]));
    assert_eq!(p.coset_decompose(&[1], &t), (vec![], vec![1]));
    assert_eq!(p.coset_decompose(&[0, 2], &BTreeSet::new()).1, Vec::<usize>::new());

    // Brute force over W = <s1, s2> = Z/2 x Z/2 inside the square group: the
    // minimal coset representative of s1 s2 modulo <s2> has length 1.
    let elements: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1], vec![0, 1]];
    let target = p.hnn_normal_form(&[Letter::S(0), Letter::S(1)]);
    let shortest = elements
        .iter()
        .filter(|e| {
            let mut w: Vec<Letter> = e.iter().map(|&f| Letter::S(f)).collect();
            w.push(Letter::S(1));
            p.hnn_normal_form(&w) == target || {
                w.pop();
                p.hnn_normal_form(&w) == target
            }
        })
        .map(|e| e.len())
        .min()
        .unwrap();
    assert_eq!(shortest, 1);
}

#[test]
fn stable_letter_rules() {
    let h = bundled("genus1_pogorelov").unwrap();
    let p = Presentation::new(&h).unwrap();
    let (&f, &g) = h.belts[0].matching.iter().next().unwrap();
    let t = Letter::t(0);
    let (sf, sg) = (Letter::S(f), Letter::S(g));
    assert!(p.equal(&[t.inverse(), sf, t], &[sg]));
    assert!(p.is_identity(&[t, t.inverse()]));
    assert!(p.equal(&[t, sg], &[sf, t]));

    let other = *p
        .involutive_generators()
        .iter()
        .find(|&&x| x != f && x != g)
        .unwrap();
    let lhs = [Letter::S(other), t, sg, t.inverse()];
    assert!(p.equal(&lhs, &[Letter::S(other), sf]));
    assert_eq!(p.hnn_normal_form(&lhs).t_length(), 0);
}

#[test]
fn equality_commutation_and_torsion() {
    let pentagon = Presentation::new(&bundled("pentagon").unwrap()).unwrap();
    let (s1, s3) = (Letter::S(0), Letter::S(2));
    assert!(!pentagon.equal(&[s1], &[s3]));
    assert_eq!(pentagon.cyclic_reduce(&words(&pentagon, "sF1 sF2 sF1")), vec![Letter::S(1)]);
    assert_eq!(pentagon.cyclic_reduce(&words(&pentagon, "sF1 sF3 sF1")), vec![s3]);
    let reduced = words(&pentagon, "sF1 sF3");
    assert_eq!(pentagon.cyclic_reduce(&reduced), reduced);
    assert!(!pentagon.commutes(&words(&pentagon, "sF1 sF3"), &words(&pentagon, "sF2 sF4")));
    assert_eq!(pentagon.torsion_status(&[s1]), Torsion::Finite);
    assert_eq!(pentagon.torsion_status(&[s1, s3]), Torsion::Infinite);

    let cube = Presentation::new(&bundled("cube").unwrap()).unwrap();
    assert!(cube.commutes(&words(&cube, "sF1 sF4"), &words(&cube, "sF2 sF5")));

    let g = Presentation::new(&bundled("genus1_pogorelov").unwrap()).unwrap();
    assert_eq!(g.torsion_status(&[Letter::t(0)]), Torsion::Infinite);

    assert!(cube.descent_set(&[]).is_empty());
    let mut clique = cube.descent_set(&words(&cube, "sF1 sF2 sF3"));
    clique.sort();
    assert_eq!(clique, vec![Letter::S(0), Letter::S(1), Letter::S(2)]);
    assert_eq!(g.descent_set(&[Letter::t(0)]), vec![Letter::t_inv(0)]);
}

#[test]
fn double_homology_values() {
    let total = |name: &str| double_homology(&bundled(name).unwrap(), Coefficients::Z).unwrap();
    let square = total("square");
    assert_eq!(square.total.groups, vec![free(1), free(2), free(1)]);
    let subsets: Vec<String> = square.contributions.iter().map(|c| c.subset.join(",")).collect();
    assert_eq!(subsets, ["", "1,3", "2,4", "1,2,3,4"]);

    let pentagon = total("pentagon");
    assert_eq!(pentagon.total.degree(1), free(10));
    assert_eq!(pentagon.total.degree(2), free(1));
    let pairs = pentagon.contributions.iter().filter(|c| c.subset.len() == 2).count();
    let triples = pentagon.contributions.iter().filter(|c| c.subset.len() == 3).count();
    assert_eq!((pairs, triples), (5, 5));

    let tet = total("tetrahedron");
    assert_eq!(tet.total.groups, vec![free(1), free(0), free(0), free(1)]);
    assert_eq!(tet.contributions.len(), 2);
    assert_eq!(tet.contributions[1].subset.join(","), "1,2,3,4");
}

#[test]
fn universal_cover_contributions() {
    let high = |name: &str| -> Vec<(String, Vec<AbelianGroup>)> {
        universal_cover_support(&bundled(name).unwrap())
            .unwrap()
            .into_iter()
            .filter(|c| c.homology.groups.iter().skip(2).any(|g| !g.is_zero()))
            .map(|c| (c.subset.join(","), c.homology.groups))
            .collect()
    };
    assert!(high("cube").is_empty());
    let tet = high("tetrahedron");
    assert_eq!(tet.len(), 1);
    assert_eq!(tet[0].0, "sF1,sF2,sF3,sF4");
    assert_eq!(tet[0].1[3], free(1));
    let prism = high("triangular_prism");
    assert_eq!(prism.len(), 1);
    assert_eq!(prism[0].0, "sFS1,sFS2,sFS3");
    assert_eq!(prism[0].1[2], free(1));
    assert!(high("genus1_pogorelov").is_empty());
}

#[test]
fn chamber_balls_and_group_orders() {
    let ball = |name: &str, r: usize| chamber_ball(&bundled(name).unwrap(), r, DEFAULT_CHAMBER_CAP).unwrap();
    assert_eq!(ball("cube", 0).counts, vec![1]);
    let tri = ball("triangle", 3);
    assert_eq!(tri.counts.last(), Some(&8));
    assert!(tri.closed);
    assert_eq!(ball("square", 2).counts, vec![1, 5, 13]);

    let order = |name: &str, l: usize| {
        enumerate_group_ball(&bundled(name).unwrap(), l, 10, 100_000).unwrap().counts
    };
    assert_eq!(order("triangle", 5).last(), Some(&8));
    assert_eq!(order("tetrahedron", 6).last(), Some(&16));
    assert_eq!(order("square", 1), vec![1, 5]);
}

#[test]
fn oracle_doubles() {
    let double = |name: &str| build_double(&bundled(name).unwrap(), 12).unwrap();
    let interval = double("interval");
    assert_eq!(interval.chambers, 4);
    assert!(interval.complex.is_cycle());
    assert_eq!(oracle_homology(&interval, Coefficients::Z).groups, vec![free(1), free(1)]);

    let square = double("square");
    assert_eq!(square.chambers, 16);
    assert_eq!(oracle_homology(&square, Coefficients::Z).groups, vec![free(1), free(2), free(1)]);
    let tet = double("tetrahedron");
    assert_eq!(tet.chambers, 16);
    assert_eq!(oracle_homology(&tet, Coefficients::Z).groups, vec![free(1), free(0), free(0), free(1)]);
    assert_eq!(oracle_homology(&double("pentagon"), Coefficients::Z).degree(1), free(10));
}

#[test]
fn link_condition() {
    let check = |name: &str| gromov_link_check(&bundled(name).unwrap(), 12).unwrap();
    let cube = check("cube");
    assert!(cube.npc);
    assert_eq!(cube.link_types.len(), 1);
    assert!(!check("triangular_prism").npc);
    assert_eq!(check("genus1_pogorelov").link_types.len(), 2);
}

#[test]
fn bundled_instances_round_trip() {
    for name in bundled_names() {
        let h: SimpleHandlebody = bundled(name).unwrap();
        let text = InstanceFile::from_handlebody(&h).to_json();
        let back = InstanceFile::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text, "{name}");
        assert_eq!(back.to_handlebody(name).unwrap().name, h.name);
    }
}
