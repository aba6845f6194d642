//! Homology of the manifold double and of the universal cover, chamber
//! balls in the universal cover, and the curvature classification.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::complex::{induced_h1_map, Coefficients, HomologyResult, SimplicialComplex};
use crate::error::{Error, Result};
use crate::handlebody::SimpleHandlebody;
use crate::linalg::AbelianGroup;
use crate::words::{Letter, NormalForm, Presentation, Word};

/// Largest number of facet classes accepted by `double_homology`.
pub const DEFAULT_SUBSET_CAP: usize = 20;

/// One summand of a direct-sum decomposition, indexed by a set of facet
/// classes (double) or of letters (universal cover).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetContribution {
    pub subset: Vec<String>,
    /// Stable letter joined to the subset, for the belt cases of the cover.
    pub stable_letter: Option<String>,
    pub homology: HomologyResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleHomology {
    pub total: HomologyResult,
    /// Nonzero contributions, subsets ordered by size then lexicographically.
    pub contributions: Vec<SubsetContribution>,
}

fn subsets_by_size(m: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u64..1 << m)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

fn shift_up(reduced: &HomologyResult, from: usize) -> HomologyResult {
    let mut h = HomologyResult::zero(Coefficients::Z);
    for d in from..reduced.groups.len() {
        if !reduced.groups[d].is_zero() {
            h.set_degree(d + 1, reduced.groups[d].clone());
        }
    }
    h
}

fn with_coefficients(h: HomologyResult, coefficients: Coefficients) -> HomologyResult {
    match coefficients {
        Coefficients::Z => h.trimmed(),
        Coefficients::Z2 => {
            let mut padded = h;
            let len = padded.groups.len();
            padded.set_degree(len, AbelianGroup::default());
            padded.to_mod2().trimmed()
        }
    }
}

/// Homology of the manifold double as a sum over subsets of facet classes.
pub fn double_homology(h: &SimpleHandlebody, coefficients: Coefficients) -> Result<DoubleHomology> {
    double_homology_capped(h, coefficients, DEFAULT_SUBSET_CAP)
}

pub fn double_homology_capped(
    h: &SimpleHandlebody,
    coefficients: Coefficients,
    cap_m: usize,
) -> Result<DoubleHomology> {
    h.require_valid()?;
    let g = h.genus();
    if g > 0 && h.dim() != 3 {
        return Err(Error::Unsupported(format!(
            "double homology of genus {g} handlebodies is only implemented in dimension 3"
        )));
    }
    let classes = h.facet_classes()?;
    let m = classes.count();
    if m > cap_m {
        return Err(Error::ResourceCap {
            what: "facet classes".into(),
            actual: m,
            cap: cap_m,
        });
    }
    let q = h.quotient_nerve()?;
    let meridians = if g > 0 { h.meridians(&classes)? } else { Vec::new() };

    let mut total = HomologyResult::zero(coefficients);
    let mut contributions = Vec::new();
    for j in subsets_by_size(m) {
        let part = if j.is_empty() {
            let mut p = HomologyResult::zero(Coefficients::Z);
            p.set_degree(0, AbelianGroup::free(1));
            if g > 0 {
                p.set_degree(1, AbelianGroup::free(g));
            }
            p
        } else {
            let kj = q.full_subcomplex(&j);
            let reduced = kj.reduced_homology(Coefficients::Z);
            if g == 0 {
                shift_up(&reduced, 0)
            } else {
                let map = induced_h1_map(&q, &j, &meridians)?;
                let mut p = shift_up(&reduced, 2);
                p.set_degree(1, map.cokernel.sum(&reduced.degree(0)));
                p.set_degree(2, map.kernel.clone());
                p
            }
        };
        let part = with_coefficients(part, coefficients);
        if part.is_zero() {
            continue;
        }
        for (k, grp) in part.groups.iter().enumerate() {
            total.add_degree(k, grp);
        }
        contributions.push(SubsetContribution {
            subset: j.iter().map(|&c| classes.labels[c].clone()).collect(),
            stable_letter: None,
            homology: part,
        });
    }
    let n = h.dim();
    if total.degree(n) != AbelianGroup::free(1) || total.groups.len() > n + 1 {
        return Err(Error::internal(format!(
            "top homology of the double is {} in degree {n}, expected one copy of the ring",
            total.degree(n)
        )));
    }
    Ok(DoubleHomology { total, contributions })
}

/// Every clique of the graph restricted to `allowed`, including the empty one.
fn cliques(adj: &[Vec<bool>], allowed: &[usize]) -> Vec<Vec<usize>> {
    fn grow(adj: &[Vec<bool>], cur: &mut Vec<usize>, cands: &[usize], out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for (i, &v) in cands.iter().enumerate() {
            let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|&u| adj[v][u]).collect();
            cur.push(v);
            grow(adj, cur, &next, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(adj, &mut Vec::new(), allowed, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Contribution types `H_k(P_Q, P_Q^T)` for `k >= 2`, one per admissible `T`.
pub fn universal_cover_support(h: &SimpleHandlebody) -> Result<Vec<SubsetContribution>> {
    h.require_valid()?;
    let nerve = h.nerve();
    let adj = nerve.adjacency();
    let letters = h.ordinary_facets();
    let label = |f: usize| format!("sF{}", nerve.label(f));
    let contribution = |t: &[usize], stable: Option<String>| {
        let reduced = nerve.full_subcomplex(t).reduced_homology(Coefficients::Z);
        SubsetContribution {
            subset: t.iter().map(|&f| label(f)).collect(),
            stable_letter: stable,
            homology: shift_up(&reduced, 1).trimmed(),
        }
    };
    let mut out: Vec<SubsetContribution> =
        cliques(&adj, &letters).iter().map(|t| contribution(t, None)).collect();
    for (b, belt) in h.belts.iter().enumerate() {
        let name = h.belt_label(b);
        for plus in [true, false] {
            let side: Vec<usize> = if plus {
                belt.matching.keys().copied().collect()
            } else {
                belt.matching.values().copied().collect::<BTreeSet<_>>().into_iter().collect()
            };
            let stable = if plus { format!("tB{name}") } else { format!("tB{name}^-1") };
            for t in cliques(&adj, &side) {
                out.push(contribution(&t, Some(stable.clone())));
            }
        }
    }
    Ok(out)
}

fn has_support_in_degree_two_or_more(support: &[SubsetContribution]) -> bool {
    support
        .iter()
        .any(|c| c.homology.groups.iter().skip(2).any(|g| !g.is_zero()))
}

pub fn is_aspherical(h: &SimpleHandlebody) -> Result<bool> {
    let flag = h.is_flag();
    let support = universal_cover_support(h)?;
    if has_support_in_degree_two_or_more(&support) == flag {
        return Err(Error::internal(format!(
            "flagness ({flag}) disagrees with the universal cover homology"
        )));
    }
    Ok(flag)
}

/// Chambers of the universal cover within distance `radius` of the base
/// chamber, with interior vertex links rebuilt from the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberBall {
    pub radius: usize,
    /// Cumulative chamber counts for radii `0..=radius`.
    pub counts: Vec<usize>,
    pub chambers: Vec<Word>,
    /// `(chamber, facet, neighbour)` for every facet crossing inside the ball.
    pub gluings: Vec<(usize, usize, usize)>,
    /// Every neighbour of every chamber lies in the ball.
    pub closed: bool,
    pub interior_checked: usize,
    /// Interior chambers whose link differs from the nerve of `P_Q`.
    pub link_failures: Vec<usize>,
}

pub const DEFAULT_CHAMBER_CAP: usize = 200_000;

/// Generator crossing each facet of `P_Q`.
fn facet_letters(h: &SimpleHandlebody) -> Vec<Letter> {
    let mut x: Vec<Letter> = (0..h.polytope.facet_count()).map(Letter::S).collect();
    for (b, belt) in h.belts.iter().enumerate() {
        x[belt.plus] = Letter::t(b);
        x[belt.minus] = Letter::t_inv(b);
    }
    x
}

pub fn chamber_ball(h: &SimpleHandlebody, radius: usize, cap: usize) -> Result<ChamberBall> {
    let pres = Presentation::new(h)?;
    let letters = facet_letters(h);
    let nf = |w: &[Letter]| pres.hnn_normal_form(w);

    let mut index: HashMap<NormalForm, usize> = HashMap::new();
    let mut chambers: Vec<Word> = Vec::new();
    let mut counts = Vec::with_capacity(radius + 1);
    index.insert(NormalForm::identity(), 0);
    chambers.push(Vec::new());
    counts.push(1);
    let mut layer = vec![0usize];
    for r in 1..=radius {
        let mut next = Vec::new();
        for &c in &layer {
            let w = chambers[c].clone();
            let descent = pres.descent_set(&w);
            for &x in &letters {
                if descent.contains(&x) {
                    continue;
                }
                let mut wx = w.clone();
                wx.push(x);
                let f = nf(&wx);
                if f.length() != r || index.contains_key(&f) {
                    continue;
                }
                if chambers.len() >= cap {
                    return Err(Error::ResourceCap {
                        what: "chambers".into(),
                        actual: chambers.len() + 1,
                        cap,
                    });
                }
                index.insert(f.clone(), chambers.len());
                next.push(chambers.len());
                chambers.push(f.to_word());
            }
        }
        counts.push(chambers.len());
        layer = next;
    }

    let mut gluings = Vec::new();
    let mut closed = true;
    for (c, w) in chambers.iter().enumerate() {
        for (f, &x) in letters.iter().enumerate() {
            let mut wx = w.clone();
            wx.push(x);
            match index.get(&nf(&wx)) {
                Some(&d) => gluings.push((c, f, d)),
                None => closed = false,
            }
        }
    }

    let n = h.dim();
    let mut interior_checked = 0;
    let mut link_failures = Vec::new();
    for (c, w) in chambers.iter().enumerate() {
        if w.len() + n > radius && !closed {
            continue;
        }
        interior_checked += 1;
        let link = chamber_link(h, &pres, &letters, w, &index)?;
        if !same_complex(&link, h.nerve()) {
            link_failures.push(c);
        }
    }
    Ok(ChamberBall {
        radius,
        counts,
        chambers,
        gluings,
        closed,
        interior_checked,
        link_failures,
    })
}

fn same_complex(a: &SimplicialComplex, b: &SimplicialComplex) -> bool {
    let mut x = a.maximal_simplices().to_vec();
    let mut y = b.maximal_simplices().to_vec();
    x.sort();
    y.sort();
    a.vertex_count() == b.vertex_count() && x == y
}

/// Link of the centre of chamber `w`: a face of `P_Q` contributes its simplex
/// when the chambers met by walking around it form a cube of the right size.
fn chamber_link(
    h: &SimpleHandlebody,
    pres: &Presentation,
    letters: &[Letter],
    w: &[Letter],
    ball: &HashMap<NormalForm, usize>,
) -> Result<SimplicialComplex> {
    let facets = h.polytope.facet_count();
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for f in 0..facets {
        if h.nerve().contains(&[f]) && cube_closes(h, pres, letters, w, &[f], ball) {
            frontier.push(vec![f]);
        }
    }
    let mut known: HashSet<Vec<usize>> = frontier.iter().cloned().collect();
    while !frontier.is_empty() {
        simplices.extend(frontier.iter().cloned());
        let mut next = Vec::new();
        for s in &frontier {
            for f in s.last().unwrap() + 1..facets {
                let mut t = s.clone();
                t.push(f);
                // Every codimension-one face must already close.
                let faces_ok = (0..t.len()).all(|i| {
                    let mut face = t.clone();
                    face.remove(i);
                    known.contains(&face)
                });
                if faces_ok && h.nerve().contains(&t) && cube_closes(h, pres, letters, w, &t, ball) {
                    next.push(t);
                }
            }
        }
        known.extend(next.iter().cloned());
        frontier = next;
    }
    SimplicialComplex::from_indices(h.nerve().labels().to_vec(), simplices)
}

/// Walks around the face labelled `sigma` of chamber `w`. Crossing a belt
/// facet relabels the face by the matching. The walk closes when exactly
/// `2^|sigma|` distinct chambers are met, all inside the ball.
fn cube_closes(
    h: &SimpleHandlebody,
    pres: &Presentation,
    letters: &[Letter],
    w: &[Letter],
    sigma: &[usize],
    ball: &HashMap<NormalForm, usize>,
) -> bool {
    let want = 1usize << sigma.len();
    let start = pres.hnn_normal_form(w);
    let mut seen: HashSet<(NormalForm, Vec<usize>)> = HashSet::new();
    let mut chambers: HashSet<NormalForm> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((start.clone(), sigma.to_vec()));
    queue.push_back((start, sigma.to_vec()));
    while let Some((g, label)) = queue.pop_front() {
        if !ball.contains_key(&g) {
            return false;
        }
        chambers.insert(g.clone());
        if chambers.len() > want {
            return false;
        }
        for &f in &label {
            let Some(relabelled) = relabel(h, &label, f) else {
                return false;
            };
            let mut word = g.to_word();
            word.push(letters[f]);
            let next = pres.hnn_normal_form(&word);
            if seen.insert((next.clone(), relabelled.clone())) {
                queue.push_back((next, relabelled));
            }
        }
    }
    chambers.len() == want
}

/// Label of the same face seen from the chamber across facet `f`.
fn relabel(h: &SimpleHandlebody, label: &[usize], f: usize) -> Option<Vec<usize>> {
    for belt in &h.belts {
        let (from, to, map) = if f == belt.plus {
            (belt.plus, belt.minus, belt.matching.clone())
        } else if f == belt.minus {
            (belt.minus, belt.plus, belt.inverse_matching())
        } else {
            continue;
        };
        let mut out = Vec::with_capacity(label.len());
        for &x in label {
            out.push(if x == from { to } else { *map.get(&x)? });
        }
        out.sort_unstable();
        return Some(out);
    }
    Some(label.to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeCurvature {
    Yes,
    No,
    NecessaryConditionsMet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hyperbolic {
    Yes,
    No,
    Unknown,
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    NotDetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureReport {
    pub dim: usize,
    pub genus: usize,
    pub flag: bool,
    /// `None` when squares are undefined (non-flag input).
    pub square_belts: Option<usize>,
    pub aspherical: bool,
    pub npc_double: bool,
    #[serde(rename = "has_Z2")]
    pub has_z2: Option<bool>,
    pub negative_curvature: NegativeCurvature,
    pub hyperbolic: Hyperbolic,
    pub psc: Verdict,
    pub two_neighborly: bool,
    pub double_simply_connected: bool,
    pub double_pi1_infinite: Verdict,
    pub orientable_double: bool,
}

/// No induced cycle of length four or more in the graph.
fn chordal(adj: &[Vec<bool>]) -> bool {
    // Repeatedly remove simplicial vertices (neighbourhood is a clique).
    let n = adj.len();
    let mut alive = vec![true; n];
    for _ in 0..n {
        let pick = (0..n).find(|&v| {
            alive[v] && {
                let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
                nb.iter()
                    .enumerate()
                    .all(|(i, &a)| nb[i + 1..].iter().all(|&b| adj[a][b]))
            }
        });
        match pick {
            Some(v) => alive[v] = false,
            None => return false,
        }
    }
    true
}

pub fn classify(h: &SimpleHandlebody) -> Result<CurvatureReport> {
    h.require_valid()?;
    let n = h.dim();
    let genus = h.genus();
    let flag = is_aspherical(h)?;
    let squares = if flag { Some(h.square_belts()?.len()) } else { None };
    let pogorelov = flag && squares == Some(0);
    let negative_curvature = match (pogorelov, genus) {
        (true, 0) => NegativeCurvature::Yes,
        (true, _) => NegativeCurvature::NecessaryConditionsMet,
        (false, _) => NegativeCurvature::No,
    };
    let hyperbolic = match n {
        1 => Hyperbolic::No,
        2 | 3 if pogorelov => Hyperbolic::Yes,
        2 | 3 => Hyperbolic::No,
        4 => Hyperbolic::Unknown,
        _ => Hyperbolic::Never,
    };
    let psc = if n == 3 && genus == 0 {
        if chordal(&h.nerve().adjacency()) {
            Verdict::Yes
        } else {
            Verdict::No
        }
    } else {
        Verdict::NotDetermined
    };
    let two_neighborly = h.polytope.two_neighborly();
    let double_simply_connected = two_neighborly && genus == 0;
    let double_pi1_infinite = if genus > 0 {
        Verdict::Yes
    } else if double_simply_connected {
        Verdict::No
    } else {
        Verdict::NotDetermined
    };
    Ok(CurvatureReport {
        dim: n,
        genus,
        flag,
        square_belts: squares,
        aspherical: flag,
        npc_double: flag,
        has_z2: squares.map(|s| s > 0),
        negative_curvature,
        hyperbolic,
        psc,
        two_neighborly,
        double_simply_connected,
        double_pi1_infinite,
        orientable_double: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::bundled;

    fn ranks(name: &str) -> Vec<usize> {
        double_homology(&bundled(name).unwrap(), Coefficients::Z)
            .unwrap()
            .total
            .betti()
    }

    #[test]
    fn doubles_of_small_polytopes() {
        assert_eq!(ranks("interval"), vec![1, 1]);
        assert_eq!(ranks("square"), vec![1, 2, 1]);
        assert_eq!(ranks("pentagon"), vec![1, 10, 1]);
        assert_eq!(ranks("tetrahedron"), vec![1, 0, 0, 1]);
    }

    #[test]
    fn square_contributions() {
        let d = double_homology(&bundled("square").unwrap(), Coefficients::Z).unwrap();
        let sets: Vec<Vec<String>> = d.contributions.iter().map(|c| c.subset.clone()).collect();
        assert_eq!(
            sets,
            vec![vec![], vec!["1".to_string(), "3".into()], vec!["2".into(), "4".into()], vec![
                "1".into(),
                "2".into(),
                "3".into(),
                "4".into()
            ]]
        );
    }

    #[test]
    fn cover_support_tracks_flagness() {
        let cube = universal_cover_support(&bundled("cube").unwrap()).unwrap();
        assert!(!has_support_in_degree_two_or_more(&cube));
        let tet = universal_cover_support(&bundled("tetrahedron").unwrap()).unwrap();
        let hit: Vec<_> = tet.iter().filter(|c| !c.homology.is_zero()).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].subset.len(), 4);
        assert_eq!(hit[0].homology.degree(3), AbelianGroup::free(1));
        let prism = universal_cover_support(&bundled("triangular_prism").unwrap()).unwrap();
        let hit: Vec<_> = prism.iter().filter(|c| !c.homology.is_zero()).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].subset, vec!["sFS1", "sFS2", "sFS3"]);
        assert_eq!(hit[0].homology.degree(2), AbelianGroup::free(1));
    }

    #[test]
    fn chamber_balls() {
        let sq = chamber_ball(&bundled("square").unwrap(), 2, DEFAULT_CHAMBER_CAP).unwrap();
        assert_eq!(sq.counts, vec![1, 5, 13]);
        assert!(sq.link_failures.is_empty());
        assert_eq!(sq.interior_checked, 1);
        let tri = chamber_ball(&bundled("triangle").unwrap(), 3, DEFAULT_CHAMBER_CAP).unwrap();
        assert_eq!(tri.counts.last(), Some(&8));
        assert!(tri.closed);
        assert_eq!(tri.interior_checked, 8);
        assert!(tri.link_failures.is_empty());
        assert!(matches!(
            chamber_ball(&bundled("pentagon").unwrap(), 6, 20),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn chordality() {
        assert!(chordal(&bundled("tetrahedron").unwrap().nerve().adjacency()));
        assert!(!chordal(&bundled("cube").unwrap().nerve().adjacency()));
    }
}
