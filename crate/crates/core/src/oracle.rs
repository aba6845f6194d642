//! Brute-force cross-checks that share no code path with the formula side:
//! the manifold double built as an explicit simplicial complex, a cubical
//! link scan of the refined decomposition, and Cayley-ball enumeration.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::complex::{Coefficients, HomologyResult, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::handlebody::{FacetClasses, SimpleHandlebody};
use crate::words::{NormalForm, Presentation, Word};

pub const DEFAULT_CAP_M: usize = 12;
pub const DEFAULT_CAP_LENGTH: usize = 10;
pub const DEFAULT_BALL_ELEMENT_CAP: usize = 1_000_000;

/// The manifold double as a simplicial complex, one chamber per element of
/// `(Z_2)^m`.
#[derive(Clone, Debug)]
pub struct ChamberComplex {
    pub classes: usize,
    pub chambers: usize,
    pub complex: SimplicialComplex,
}

fn too_many_classes(m: usize, cap_m: usize) -> Result<()> {
    if m > cap_m {
        Err(Error::ResourceCap {
            what: "facet classes".into(),
            actual: m,
            cap: cap_m,
        })
    } else {
        Ok(())
    }
}

/// Face of `P_Q` as seen from the other side of its belt, if it meets one.
fn belt_partner(h: &SimpleHandlebody, sigma: &[usize]) -> Option<Vec<usize>> {
    for b in &h.belts {
        let (from, to, map) = if sigma.contains(&b.plus) {
            (b.plus, b.minus, b.matching.clone())
        } else if sigma.contains(&b.minus) {
            (b.minus, b.plus, b.inverse_matching())
        } else {
            continue;
        };
        let mut out: Vec<usize> = sigma
            .iter()
            .map(|&f| if f == from { to } else { map[&f] })
            .collect();
        out.sort_unstable();
        return Some(out);
    }
    None
}

/// Barycentric model: the cone on the order complex of the proper faces of
/// `P_Q`, copied once per chamber and glued by the coloring. A belt is glued
/// through a collar `B x [0,1]` whose ends are the subdivided faces of `B+`
/// and `B-`, matched by the belt. Identifying `B+` with `B-` directly would
/// merge the two cone simplices over matched flags into one.
pub fn build_double(h: &SimpleHandlebody, cap_m: usize) -> Result<ChamberComplex> {
    h.require_valid()?;
    let classes = h.facet_classes()?;
    let m = classes.count();
    too_many_classes(m, cap_m)?;
    let nerve = h.nerve();
    let class_mask = |sigma: &[usize]| -> u32 {
        sigma
            .iter()
            .filter_map(|&f| classes.class_of[f])
            .fold(0, |acc, c| acc | 1 << c)
    };

    // Vertex key: the face and the chamber modulo the face's stabilizer.
    let mut keys: HashMap<(Vec<usize>, u32), usize> = HashMap::new();
    let mut key_of = |sigma: &[usize], g: u32| -> usize {
        let g = g & !class_mask(sigma);
        let next = keys.len();
        *keys.entry((sigma.to_vec(), g)).or_insert(next)
    };

    let flags = maximal_flags(nerve);
    let plus_facets: Vec<usize> = h.belts.iter().map(|b| b.plus).collect();
    let collars: Vec<(&Vec<Vec<usize>>, Vec<Vec<usize>>)> = flags
        .iter()
        .filter(|flag| flag[1].len() == 1 && plus_facets.contains(&flag[1][0]))
        .map(|flag| {
            let partner = flag[1..]
                .iter()
                .map(|tau| belt_partner(h, tau).expect("face of a plus facet"))
                .collect();
            (flag, partner)
        })
        .collect();
    let chambers = 1usize << m;
    let mut simplices = Vec::with_capacity(chambers * (flags.len() + collars.len() * h.dim()));
    for g in 0..chambers as u32 {
        for flag in &flags {
            let mut s: Simplex = flag.iter().map(|sigma| key_of(sigma, g)).collect();
            s.sort_unstable();
            simplices.push(s);
        }
        // Staircase triangulation of the prism over each flag of `B+`.
        for (flag, partner) in &collars {
            let bottom = &flag[1..];
            for i in 0..bottom.len() {
                let mut s: Simplex = bottom[..=i]
                    .iter()
                    .chain(&partner[i..])
                    .map(|sigma| key_of(sigma, g))
                    .collect();
                s.sort_unstable();
                simplices.push(s);
            }
        }
    }
    let labels = (0..keys.len()).map(|i| format!("v{i}")).collect();
    let complex = SimplicialComplex::from_indices(labels, simplices)?;
    Ok(ChamberComplex {
        classes: m,
        chambers,
        complex,
    })
}

/// Chains `{} < {v0} < {v0,v1} < ... < sigma` over maximal simplices `sigma`.
fn maximal_flags(nerve: &SimplicialComplex) -> Vec<Vec<Vec<usize>>> {
    fn perms(items: &[usize]) -> Vec<Vec<usize>> {
        if items.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let mut flags = Vec::new();
    for sigma in nerve.maximal_simplices() {
        for order in perms(sigma) {
            let mut chain = vec![Vec::new()];
            for k in 1..=order.len() {
                let mut face = order[..k].to_vec();
                face.sort_unstable();
                chain.push(face);
            }
            flags.push(chain);
        }
    }
    flags
}

pub fn oracle_homology(c: &ChamberComplex, coefficients: Coefficients) -> HomologyResult {
    c.complex.homology(coefficients).trimmed()
}

/// Result of the cubical link scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GromovReport {
    pub vertices: usize,
    pub cubes: usize,
    pub link_types: Vec<LinkType>,
    /// Every vertex link is flag.
    pub npc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkType {
    pub piece: String,
    pub vertices: usize,
    pub flag: bool,
}

/// A piece of the refined decomposition: `P_Q` itself or the collar of a belt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Piece {
    Polytope,
    Collar(usize),
}

/// Collar facets: the plus-side link facets of `P_Q` by index, then the two
/// ends.
struct Collar {
    nerve: SimplicialComplex,
    /// Collar facet index to `P_Q` facet (plus side) for side facets.
    side: Vec<usize>,
    end0: usize,
    end1: usize,
}

fn collar(h: &SimpleHandlebody, b: usize) -> Collar {
    let (link, verts) = h.nerve().link_indexed(h.belts[b].plus);
    let k = verts.len();
    let mut labels: Vec<String> = verts.iter().map(|&f| h.facet_label(f).to_string()).collect();
    labels.push("end0".into());
    labels.push("end1".into());
    let mut maximal = Vec::new();
    for s in link.maximal_simplices() {
        for end in [k, k + 1] {
            let mut t = s.clone();
            t.push(end);
            maximal.push(t);
        }
    }
    Collar {
        nerve: SimplicialComplex::from_indices(labels, maximal).expect("suspension"),
        side: verts,
        end0: k,
        end1: k + 1,
    }
}

struct Refined<'a> {
    h: &'a SimpleHandlebody,
    classes: FacetClasses,
    collars: Vec<Collar>,
    /// `P_Q` facet to side index in each collar.
    side_index: Vec<BTreeMap<usize, usize>>,
}

type Chamber = (Piece, u32);

impl Refined<'_> {
    fn nerve(&self, p: Piece) -> &SimplicialComplex {
        match p {
            Piece::Polytope => self.h.nerve(),
            Piece::Collar(b) => &self.collars[b].nerve,
        }
    }

    fn color(&self, p: Piece, f: usize) -> Option<u32> {
        let facet = match p {
            Piece::Polytope => f,
            Piece::Collar(b) => *self.collars[b].side.get(f)?,
        };
        self.classes.class_of[facet].map(|c| 1 << c)
    }

    /// Crosses facet `f` of the chamber and relabels the face `sigma`.
    fn cross(&self, (p, g): Chamber, sigma: &[usize], f: usize) -> Option<(Chamber, Vec<usize>)> {
        if let Some(bit) = self.color(p, f) {
            return Some(((p, g ^ bit), sigma.to_vec()));
        }
        let mut out = Vec::with_capacity(sigma.len());
        let next = match p {
            Piece::Polytope => {
                let (b, belt) = self
                    .h
                    .belts
                    .iter()
                    .enumerate()
                    .find(|(_, belt)| belt.plus == f || belt.minus == f)?;
                let c = &self.collars[b];
                let (end, inv) = if f == belt.plus {
                    (c.end0, None)
                } else {
                    (c.end1, Some(belt.inverse_matching()))
                };
                for &x in sigma {
                    out.push(if x == f {
                        end
                    } else {
                        let plus_side = match &inv {
                            Some(m) => *m.get(&x)?,
                            None => x,
                        };
                        *self.side_index[b].get(&plus_side)?
                    });
                }
                Piece::Collar(b)
            }
            Piece::Collar(b) => {
                let c = &self.collars[b];
                let belt = &self.h.belts[b];
                let (target, forward) = if f == c.end0 { (belt.plus, false) } else { (belt.minus, true) };
                for &x in sigma {
                    out.push(if x == f {
                        target
                    } else {
                        let plus_side = *c.side.get(x)?;
                        if forward {
                            belt.matching[&plus_side]
                        } else {
                            plus_side
                        }
                    });
                }
                Piece::Polytope
            }
        };
        out.sort_unstable();
        Some(((next, g), out))
    }

    /// Chambers around the face `sigma` of `start`, with the canonical state
    /// of the orbit. `None` when the walk leaves the model.
    fn cube(&self, start: Chamber, sigma: &[usize]) -> Option<(Vec<Chamber>, (Chamber, Vec<usize>))> {
        let mut seen: HashSet<(Chamber, Vec<usize>)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((start, sigma.to_vec()));
        queue.push_back((start, sigma.to_vec()));
        while let Some((c, label)) = queue.pop_front() {
            for &f in &label {
                let state = self.cross(c, &label, f)?;
                if seen.insert(state.clone()) {
                    queue.push_back(state);
                }
            }
        }
        let mut chambers: Vec<Chamber> = seen.iter().map(|(c, _)| *c).collect();
        chambers.sort_unstable();
        chambers.dedup();
        let canonical = seen.into_iter().min().expect("nonempty orbit");
        Some((chambers, canonical))
    }
}

/// Builds the cubical complex dual to the refined decomposition of the
/// double, computes every vertex link, and matches it with a piece nerve.
pub fn gromov_link_check(h: &SimpleHandlebody, cap_m: usize) -> Result<GromovReport> {
    h.require_valid()?;
    let classes = h.facet_classes()?;
    let m = classes.count();
    too_many_classes(m, cap_m)?;
    let collars: Vec<Collar> = (0..h.genus()).map(|b| collar(h, b)).collect();
    let side_index = collars
        .iter()
        .map(|c| c.side.iter().enumerate().map(|(i, &f)| (f, i)).collect())
        .collect();
    let model = Refined {
        h,
        classes,
        collars,
        side_index,
    };
    let mut pieces = vec![Piece::Polytope];
    pieces.extend((0..h.genus()).map(Piece::Collar));

    let mut cube_ids: HashMap<(Chamber, Vec<usize>), usize> = HashMap::new();
    let mut link_types: BTreeMap<Piece, LinkType> = BTreeMap::new();
    let mut vertices = 0;
    for &p in &pieces {
        let nerve = model.nerve(p);
        let faces: Vec<Vec<usize>> = nerve.faces().into_iter().flatten().collect();
        let reference_flag = nerve.is_flag();
        for g in 0..1u32 << m {
            let v = (p, g);
            vertices += 1;
            // Edges at v are the cubes of its facets.
            let mut edge_of: BTreeMap<usize, usize> = BTreeMap::new();
            let mut link_simplices: Vec<Vec<usize>> = Vec::new();
            for sigma in &faces {
                let (chambers, canonical) = model.cube(v, sigma).ok_or_else(|| {
                    Error::internal("walk around a face left the refined decomposition")
                })?;
                if chambers.len() != 1 << sigma.len() {
                    return Err(Error::internal(format!(
                        "face of dimension {} meets {} chambers instead of {}",
                        sigma.len(),
                        chambers.len(),
                        1 << sigma.len()
                    )));
                }
                let next = cube_ids.len();
                let id = *cube_ids.entry(canonical).or_insert(next);
                if sigma.len() == 1 {
                    edge_of.insert(sigma[0], id);
                }
                link_simplices.push(sigma.clone());
            }
            // Re-express the link on edge cubes and compare with the nerve.
            let edge_ids: Vec<usize> = {
                let mut e: Vec<usize> = edge_of.values().copied().collect();
                e.sort_unstable();
                e.dedup();
                e
            };
            if edge_ids.len() != edge_of.len() {
                return Err(Error::internal(format!(
                    "two facets of vertex {v:?} lie on the same edge"
                )));
            }
            let position = |f: usize| edge_ids.binary_search(&edge_of[&f]).expect("edge");
            let gens = link_simplices
                .iter()
                .map(|s| s.iter().map(|&f| position(f)).collect())
                .collect();
            let labels = edge_ids.iter().map(|e| format!("e{e}")).collect();
            let link = SimplicialComplex::from_indices(labels, gens)?;
            let matched = if is_isomorphic(&link, nerve) {
                Some(p)
            } else {
                pieces.iter().copied().find(|&q| is_isomorphic(&link, model.nerve(q)))
            };
            let Some(kind) = matched else {
                return Err(Error::internal(format!(
                    "link of vertex {v:?} matches no piece nerve"
                )));
            };
            let flag = link.is_flag();
            if flag != reference_flag && kind == p {
                return Err(Error::internal("isomorphic links disagree on flagness"));
            }
            let entry = link_types.entry(kind).or_insert_with(|| LinkType {
                piece: match kind {
                    Piece::Polytope => "P_Q".to_string(),
                    Piece::Collar(b) => format!("collar {}", h.belt_label(b)),
                },
                vertices: 0,
                flag,
            });
            entry.vertices += 1;
            entry.flag &= flag;
        }
    }
    let link_types: Vec<LinkType> = link_types.into_values().collect();
    Ok(GromovReport {
        vertices,
        cubes: cube_ids.len(),
        npc: link_types.iter().all(|t| t.flag),
        link_types,
    })
}

/// Backtracking isomorphism test on vertex bijections.
pub fn is_isomorphic(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.maximal_simplices().len() != b.maximal_simplices().len() {
        return false;
    }
    let profile = |k: &SimplicialComplex| -> Vec<(usize, Vec<usize>)> {
        let adj = k.adjacency();
        (0..k.vertex_count())
            .map(|v| {
                let mut sizes: Vec<usize> = k
                    .maximal_simplices()
                    .iter()
                    .filter(|s| s.contains(&v))
                    .map(Vec::len)
                    .collect();
                sizes.sort_unstable();
                (adj[v].iter().filter(|&&x| x).count(), sizes)
            })
            .collect()
    };
    let (pa, pb) = (profile(a), profile(b));
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
    let target: HashSet<Vec<usize>> = b.maximal_simplices().iter().cloned().collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        v: usize,
        n: usize,
        ctx: &(
            &[(usize, Vec<usize>)],
            &[(usize, Vec<usize>)],
            &[Vec<bool>],
            &[Vec<bool>],
        ),
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        done: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if v == n {
            return done(map);
        }
        let (pa, pb, adj_a, adj_b) = *ctx;
        for w in 0..n {
            if used[w] || pa[v] != pb[w] {
                continue;
            }
            if (0..v).any(|u| adj_a[u][v] != adj_b[map[u]][w]) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(v + 1, n, ctx, map, used, done) {
                return true;
            }
            used[w] = false;
        }
        false
    }

    let ctx = (&pa[..], &pb[..], &adj_a[..], &adj_b[..]);
    let mut check = |map: &[usize]| {
        a.maximal_simplices().iter().all(|s| {
            let mut t: Vec<usize> = s.iter().map(|&v| map[v]).collect();
            t.sort_unstable();
            target.contains(&t)
        })
    };
    extend(0, n, &ctx, &mut map, &mut used, &mut check)
}

/// Distinct group elements by Cayley-graph distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupBall {
    /// Cumulative counts for lengths `0..=L`.
    pub counts: Vec<usize>,
    pub elements: Vec<Word>,
}

pub fn enumerate_group_ball(
    h: &SimpleHandlebody,
    length: usize,
    cap_length: usize,
    cap_elements: usize,
) -> Result<GroupBall> {
    if length > cap_length {
        return Err(Error::ResourceCap {
            what: "word length".into(),
            actual: length,
            cap: cap_length,
        });
    }
    let pres = Presentation::new(h)?;
    let gens = pres.generators();
    let mut seen: HashSet<NormalForm> = HashSet::new();
    let mut elements: Vec<Word> = Vec::new();
    let mut layer = vec![NormalForm::identity()];
    seen.insert(NormalForm::identity());
    elements.push(Vec::new());
    let mut counts = vec![1];
    for _ in 0..length {
        let mut next = Vec::new();
        for nf in &layer {
            let w = nf.to_word();
            for &x in &gens {
                let mut wx = w.clone();
                wx.push(x);
                let f = pres.hnn_normal_form(&wx);
                if seen.insert(f.clone()) {
                    if seen.len() > cap_elements {
                        return Err(Error::ResourceCap {
                            what: "group elements".into(),
                            actual: seen.len(),
                            cap: cap_elements,
                        });
                    }
                    elements.push(f.to_word());
                    next.push(f);
                }
            }
        }
        counts.push(elements.len());
        layer = next;
    }
    Ok(GroupBall { counts, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::bundled;
    use crate::linalg::AbelianGroup;

    #[test]
    fn double_of_interval_is_a_circle() {
        let c = build_double(&bundled("interval").unwrap(), DEFAULT_CAP_M).unwrap();
        assert_eq!(c.chambers, 4);
        let hom = oracle_homology(&c, Coefficients::Z);
        assert_eq!(hom.groups, vec![AbelianGroup::free(1), AbelianGroup::free(1)]);
    }

    #[test]
    fn double_of_square_is_a_torus() {
        let c = build_double(&bundled("square").unwrap(), DEFAULT_CAP_M).unwrap();
        assert_eq!(c.chambers, 16);
        assert_eq!(oracle_homology(&c, Coefficients::Z).betti(), vec![1, 2, 1]);
    }

    #[test]
    fn class_cap_is_enforced() {
        let err = build_double(&bundled("dodecahedron").unwrap(), 5).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { actual: 12, cap: 5, .. }));
    }

    #[test]
    fn isomorphism_under_relabeling() {
        let a = SimplicialComplex::from_indices(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        let b = SimplicialComplex::from_indices(
            vec!["w".into(), "x".into(), "y".into(), "z".into()],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        )
        .unwrap();
        let path = SimplicialComplex::from_indices(
            vec!["w".into(), "x".into(), "y".into(), "z".into()],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 2]],
        )
        .unwrap();
        assert!(is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &path));
    }

    #[test]
    fn small_group_orders() {
        let tri = enumerate_group_ball(&bundled("triangle").unwrap(), 5, 10, 1000).unwrap();
        assert_eq!(tri.counts, vec![1, 4, 7, 8, 8, 8]);
        let tet = enumerate_group_ball(&bundled("tetrahedron").unwrap(), 6, 10, 1000).unwrap();
        assert_eq!(*tet.counts.last().unwrap(), 16);
        let sq = enumerate_group_ball(&bundled("square").unwrap(), 1, 10, 1000).unwrap();
        assert_eq!(sq.counts, vec![1, 5]);
        assert!(enumerate_group_ball(&bundled("square").unwrap(), 11, 10, 1000).is_err());
    }

    #[test]
    fn gromov_verdicts() {
        let cube = gromov_link_check(&bundled("cube").unwrap(), DEFAULT_CAP_M).unwrap();
        assert!(cube.npc);
        assert_eq!(cube.link_types.len(), 1);
        let prism = gromov_link_check(&bundled("triangular_prism").unwrap(), DEFAULT_CAP_M).unwrap();
        assert!(!prism.npc);
        let torus = gromov_link_check(&bundled("genus1_pogorelov").unwrap(), DEFAULT_CAP_M).unwrap();
        assert!(torus.npc);
        assert_eq!(torus.link_types.len(), 2);
    }
}
