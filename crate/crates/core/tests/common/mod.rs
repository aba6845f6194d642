#![allow(dead_code)]

use std::collections::BTreeSet;

use handlebody::{SimpleHandlebody, SimplePolytope, SimplicialComplex};
use rand::seq::SliceRandom;
use rand::Rng;

type Tri = [usize; 3];

fn sorted(mut t: Tri) -> Tri {
    t.sort_unstable();
    t
}

fn edges_of(tris: &[Tri]) -> BTreeSet<(usize, usize)> {
    let mut e = BTreeSet::new();
    for t in tris {
        e.insert((t[0], t[1]));
        e.insert((t[0], t[2]));
        e.insert((t[1], t[2]));
    }
    e
}

fn degree(tris: &[Tri], v: usize) -> usize {
    tris.iter().filter(|t| t.contains(&v)).count()
}

/// Random triangulated 2-sphere with `vertices` vertices (at least 4), grown
/// from the tetrahedron by stellar and edge subdivisions and then shuffled by
/// edge flips. By Steinitz every such triangulation is the nerve of a simple
/// 3-polytope.
pub fn random_sphere<R: Rng>(rng: &mut R, vertices: usize, name: &str) -> SimpleHandlebody {
    assert!(vertices >= 4);
    let mut tris: Vec<Tri> = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut n = 4;
    while n < vertices {
        if rng.gen_bool(0.5) {
            let i = rng.gen_range(0..tris.len());
            let [a, b, c] = tris.swap_remove(i);
            tris.extend([sorted([a, b, n]), sorted([a, c, n]), sorted([b, c, n])]);
        } else {
            let edges: Vec<(usize, usize)> = edges_of(&tris).into_iter().collect();
            let &(a, b) = edges.choose(rng).unwrap();
            let mut opposite = Vec::new();
            tris.retain(|t| {
                if t.contains(&a) && t.contains(&b) {
                    opposite.push(t.iter().copied().find(|&x| x != a && x != b).unwrap());
                    false
                } else {
                    true
                }
            });
            for c in opposite {
                tris.push(sorted([a, c, n]));
                tris.push(sorted([b, c, n]));
            }
        }
        n += 1;
    }
    for _ in 0..3 * n {
        let edges: Vec<(usize, usize)> = edges_of(&tris).into_iter().collect();
        let &(a, b) = edges.choose(rng).unwrap();
        let around: Vec<usize> = tris
            .iter()
            .filter(|t| t.contains(&a) && t.contains(&b))
            .map(|t| t.iter().copied().find(|&x| x != a && x != b).unwrap())
            .collect();
        let (c, d) = (around[0], around[1]);
        let present = edges_of(&tris).contains(&(c.min(d), c.max(d)));
        if present || degree(&tris, a) <= 3 || degree(&tris, b) <= 3 {
            continue;
        }
        tris.retain(|t| !(t.contains(&a) && t.contains(&b)));
        tris.push(sorted([a, c, d]));
        tris.push(sorted([b, c, d]));
    }
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let nerve = SimplicialComplex::from_indices(labels, tris.into_iter().map(|t| t.to_vec()).collect())
        .expect("sphere triangulation");
    SimpleHandlebody::new(name, SimplePolytope::new(3, nerve), Vec::new())
}
