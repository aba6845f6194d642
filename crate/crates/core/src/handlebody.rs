//! Simple polytopes, cutting belts and simple handlebodies.
//!
//! A handlebody is given pre-cut: the polytope `P_Q` (through its nerve) and a
//! list of belts, each pairing a `plus` facet with a `minus` facet through a
//! simplicial isomorphism of their links. Gluing the plus and minus facets
//! back together identifies facets of `P_Q` into the facet classes of `Q`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::complex::{cycle_chain, Chain1, Simplex, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplePolytope {
    pub dim: usize,
    pub nerve: SimplicialComplex,
}

impl SimplePolytope {
    pub fn new(dim: usize, nerve: SimplicialComplex) -> Self {
        SimplePolytope { dim, nerve }
    }

    pub fn facet_count(&self) -> usize {
        self.nerve.vertex_count()
    }

    /// Every pair of facets meets.
    pub fn two_neighborly(&self) -> bool {
        let adj = self.nerve.adjacency();
        let n = self.facet_count();
        (0..n).all(|a| (a + 1..n).all(|b| adj[a][b]))
    }
}

/// Facet indices refer to the polytope's nerve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuttingBelt {
    pub plus: usize,
    pub minus: usize,
    pub matching: BTreeMap<usize, usize>,
}

impl CuttingBelt {
    pub fn inverse_matching(&self) -> BTreeMap<usize, usize> {
        self.matching.iter().map(|(&a, &b)| (b, a)).collect()
    }

    /// Facet on the given side: `true` for plus.
    pub fn side(&self, plus: bool) -> usize {
        if plus {
            self.plus
        } else {
            self.minus
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleHandlebody {
    pub name: String,
    pub polytope: SimplePolytope,
    pub belts: Vec<CuttingBelt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, invariant: &str, detail: impl Into<String>) {
        self.violations.push(Violation {
            invariant: invariant.to_string(),
            detail: detail.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(
                self.violations
                    .into_iter()
                    .map(|v| format!("{}: {}", v.invariant, v.detail))
                    .collect(),
            ))
        }
    }
}

/// Facet classes of `Q`: non-belt facets of `P_Q` up to the belt matchings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetClasses {
    /// Class of every facet of `P_Q`; `None` for belt facets.
    pub class_of: Vec<Option<usize>>,
    pub members: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

impl FacetClasses {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn of(&self, facet: usize) -> usize {
        self.class_of[facet].expect("non-belt facet")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BeltKind {
    Delta(usize),
    Square,
}

/// One passage of a square through a cutting belt; `forward` means from the
/// plus side to the minus side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Crossing {
    pub belt: usize,
    pub forward: bool,
}

/// Facets of `P_Q` realizing a square: `f2` and `f4` close the two ends;
/// `f1[i]`, `f3[i]` are the facets met between consecutive belt crossings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SquareChain {
    pub f1: Vec<usize>,
    pub f2: usize,
    pub f3: Vec<usize>,
    pub f4: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeltWitness {
    pub kind: BeltKind,
    pub facet_classes: Vec<usize>,
    pub crossing_belts: Vec<Crossing>,
    /// Facets of `P_Q`: the empty simplex for a Delta witness, the square
    /// corners `F1 F2 F3 F4` (at the start of the chain) otherwise.
    pub facets: Vec<usize>,
    pub chain: Option<SquareChain>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if the two were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

impl SimpleHandlebody {
    pub fn new(name: impl Into<String>, polytope: SimplePolytope, belts: Vec<CuttingBelt>) -> Self {
        SimpleHandlebody {
            name: name.into(),
            polytope,
            belts,
        }
    }

    pub fn nerve(&self) -> &SimplicialComplex {
        &self.polytope.nerve
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn genus(&self) -> usize {
        self.belts.len()
    }

    pub fn facet_label(&self, f: usize) -> &str {
        self.nerve().label(f)
    }

    pub fn belt_label(&self, b: usize) -> &str {
        self.facet_label(self.belts[b].plus)
    }

    pub fn is_belt_facet(&self, f: usize) -> bool {
        self.belts.iter().any(|b| b.plus == f || b.minus == f)
    }

    /// Non-belt facets in input order.
    pub fn ordinary_facets(&self) -> Vec<usize> {
        (0..self.polytope.facet_count())
            .filter(|&f| !self.is_belt_facet(f))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        self.check_polytope(&mut report);
        self.check_belts(&mut report);
        if !report.is_valid() {
            return report;
        }
        match self.facet_classes() {
            Err(e) => {
                report.push("non-disk facet", e.to_string());
                return report;
            }
            Ok(classes) => self.check_quotient(&classes, &mut report),
        }
        report
    }

    fn check_polytope(&self, report: &mut ValidationReport) {
        let n = self.dim();
        let nerve = self.nerve();
        if n == 0 {
            report.push("dimension at least one", "dimension is 0");
            return;
        }
        if !(nerve.is_pure() && nerve.dim() == n as isize - 1) {
            report.push(
                "nerve is pure of dimension n-1",
                format!("nerve dimension {} for n = {n}", nerve.dim()),
            );
            return;
        }
        let bad = ridge_degree_violations(nerve, n);
        if !bad.is_empty() {
            report.push(
                "nerve is a pseudomanifold",
                format!("{} ridges not in exactly two maximal simplices", bad.len()),
            );
        }
        if n >= 2 && !nerve.is_connected() {
            report.push("nerve is connected", "nerve has several components");
        }
        if n == 3 {
            let bad: Vec<&str> = (0..nerve.vertex_count())
                .filter(|&v| !nerve.link(v).is_cycle())
                .map(|v| nerve.label(v))
                .collect();
            if !bad.is_empty() {
                report.push("vertex links are cycles", format!("facets {}", bad.join(", ")));
            }
            let chi = nerve.euler_characteristic();
            if chi != 2 {
                report.push("nerve Euler characteristic is 2", format!("found {chi}"));
            }
        }
    }

    fn check_belts(&self, report: &mut ValidationReport) {
        let nerve = self.nerve();
        let adj = nerve.adjacency();
        let mut used: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, b) in self.belts.iter().enumerate() {
            for f in [b.plus, b.minus] {
                if let Some(j) = used.insert(f, i) {
                    report.push(
                        "belt facets are distinct",
                        format!("facet {} used by belts {j} and {i}", nerve.label(f)),
                    );
                }
            }
        }
        let belt_facets: Vec<usize> = used.keys().copied().collect();
        for (x, &a) in belt_facets.iter().enumerate() {
            for &b in &belt_facets[x + 1..] {
                if adj[a][b] {
                    report.push(
                        "belt facets adjacent",
                        format!("{} and {}", nerve.label(a), nerve.label(b)),
                    );
                }
            }
        }
        for (i, b) in self.belts.iter().enumerate() {
            let name = nerve.label(b.plus);
            let (lp, vp) = nerve.link_indexed(b.plus);
            let (lm, vm) = nerve.link_indexed(b.minus);
            let dom: BTreeSet<usize> = b.matching.keys().copied().collect();
            let img: BTreeSet<usize> = b.matching.values().copied().collect();
            if dom != vp.iter().copied().collect() {
                report.push(
                    "matching domain is the link of the plus facet",
                    format!("belt {i} ({name})"),
                );
                continue;
            }
            if img != vm.iter().copied().collect() || img.len() != dom.len() {
                report.push(
                    "matching is a bijection onto the link of the minus facet",
                    format!("belt {i} ({name})"),
                );
                continue;
            }
            let pos_m: HashMap<usize, usize> = vm.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let mut mapped: Vec<Simplex> = lp
                .maximal_simplices()
                .iter()
                .map(|s| {
                    let mut t: Simplex = s.iter().map(|&k| pos_m[&b.matching[&vp[k]]]).collect();
                    t.sort_unstable();
                    t
                })
                .collect();
            mapped.sort_unstable();
            let mut target = lm.maximal_simplices().to_vec();
            target.sort_unstable();
            if mapped != target {
                report.push(
                    "matching is a simplicial isomorphism",
                    format!("belt {i} ({name})"),
                );
            }
            for (&f, &g) in &b.matching {
                if f == g {
                    report.push(
                        "matching fixes a facet",
                        format!("belt {i} ({name}) fixes {}", nerve.label(f)),
                    );
                }
            }
        }
    }

    /// Union-find closure of the matchings. Fails when some class's gluing
    /// graph has a cycle.
    pub fn facet_classes(&self) -> Result<FacetClasses> {
        let n = self.polytope.facet_count();
        let mut uf = UnionFind::new(n);
        for (i, b) in self.belts.iter().enumerate() {
            for (&f, &g) in &b.matching {
                if !uf.union(f, g) {
                    return Err(Error::InvalidInstance(vec![format!(
                        "non-disk facet: gluing cycle through {} via belt {i}",
                        self.facet_label(f)
                    )]));
                }
            }
        }
        let mut class_of = vec![None; n];
        let mut root_class: HashMap<usize, usize> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for f in 0..n {
            if self.is_belt_facet(f) {
                continue;
            }
            let r = uf.find(f);
            let c = *root_class.entry(r).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[c].push(f);
            class_of[f] = Some(c);
        }
        let labels = members
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&f| self.facet_label(f))
                    .collect::<Vec<_>>()
                    .join("~")
            })
            .collect();
        Ok(FacetClasses {
            class_of,
            members,
            labels,
        })
    }

    /// Faces of the nerve avoiding belt facets, with the identifications the
    /// belts induce on them.
    fn simplex_classes(&self, classes: &FacetClasses) -> Vec<(Simplex, usize)> {
        let faces: Vec<Simplex> = self
            .nerve()
            .faces()
            .into_iter()
            .flatten()
            .filter(|s| s.iter().all(|&f| classes.class_of[f].is_some()))
            .collect();
        let index: HashMap<&Simplex, usize> = faces.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut uf = UnionFind::new(faces.len());
        for b in &self.belts {
            for (i, s) in faces.iter().enumerate() {
                let mut with_belt = s.clone();
                with_belt.push(b.plus);
                if !self.nerve().contains_unsorted(&with_belt) {
                    continue;
                }
                let mut img: Simplex = s.iter().map(|f| b.matching[f]).collect();
                img.sort_unstable();
                if let Some(&j) = index.get(&img) {
                    uf.union(i, j);
                }
            }
        }
        faces
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), uf.find(i)))
            .collect()
    }

    fn check_quotient(&self, classes: &FacetClasses, report: &mut ValidationReport) {
        let mut by_image: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
        for (s, root) in self.simplex_classes(classes) {
            let mut img: Vec<usize> = s.iter().map(|&f| classes.of(f)).collect();
            img.sort_unstable();
            img.dedup();
            if img.len() < s.len() {
                report.push(
                    "quotient self-loop",
                    format!(
                        "facets {} meet but lie in one class",
                        s.iter().map(|&f| self.facet_label(f)).collect::<Vec<_>>().join(", ")
                    ),
                );
                return;
            }
            by_image.entry(img).or_default().insert(root);
        }
        for (img, roots) in &by_image {
            if roots.len() > 1 {
                let what = if img.len() == 2 { "duplicated edge" } else { "duplicated simplex" };
                report.push(
                    what,
                    format!(
                        "classes {} meet in {} separate faces",
                        img.iter().map(|&c| classes.labels[c].as_str()).collect::<Vec<_>>().join(", "),
                        roots.len()
                    ),
                );
            }
        }
        if !report.is_valid() || self.dim() != 3 || self.belts.is_empty() {
            return;
        }
        let q = self.quotient_nerve_unchecked(classes);
        if let Err(detail) = closed_surface(&q) {
            report.push("quotient nerve is a closed surface", detail);
            return;
        }
        if !orientable_surface(&q) {
            report.push("quotient nerve is orientable", "no coherent orientation");
        }
        let chi = q.euler_characteristic();
        let want = 2 - 2 * self.genus() as i64;
        if chi != want {
            report.push(
                "quotient Euler characteristic is 2-2g",
                format!("found {chi}, expected {want}"),
            );
        }
    }

    fn quotient_nerve_unchecked(&self, classes: &FacetClasses) -> SimplicialComplex {
        let ordinary = self.ordinary_facets();
        let (sub, verts) = self.nerve().full_subcomplex_indexed(&ordinary);
        let gens = sub
            .maximal_simplices()
            .iter()
            .map(|s| s.iter().map(|&k| classes.of(verts[k])).collect())
            .collect();
        SimplicialComplex::from_indices(classes.labels.clone(), gens).expect("class indices")
    }

    /// The nerve of `Q`, on facet classes.
    pub fn quotient_nerve(&self) -> Result<SimplicialComplex> {
        let classes = self.facet_classes()?;
        Ok(self.quotient_nerve_unchecked(&classes))
    }

    /// Meridian 1-cycles on the quotient nerve: the link cycle of each plus
    /// belt facet, pushed to facet classes. Requires `n = 3`.
    pub fn meridians(&self, classes: &FacetClasses) -> Result<Vec<Chain1>> {
        self.belts
            .iter()
            .map(|b| {
                let (link, verts) = self.nerve().link_indexed(b.plus);
                let order = link
                    .cycle_order()
                    .ok_or_else(|| Error::Unsupported("belt link is not a cycle".into()))?;
                let path: Vec<usize> = order.iter().map(|&k| classes.of(verts[k])).collect();
                Ok(cycle_chain(&path))
            })
            .collect()
    }

    pub fn is_flag(&self) -> bool {
        self.nerve().is_flag()
    }

    /// Minimal empty simplices of the nerve of `P_Q` as Delta witnesses.
    pub fn delta_belts(&self) -> Result<Vec<BeltWitness>> {
        let classes = self.facet_classes()?;
        let mut out = Vec::new();
        for s in self.nerve().empty_simplices() {
            if let Some(&f) = s.iter().find(|&&f| self.is_belt_facet(f)) {
                return Err(Error::InvalidInstance(vec![format!(
                    "empty simplex contains belt facet {}",
                    self.facet_label(f)
                )]));
            }
            out.push(BeltWitness {
                kind: BeltKind::Delta(s.len() - 1),
                facet_classes: s.iter().map(|&f| classes.of(f)).collect(),
                crossing_belts: Vec::new(),
                facets: s,
                chain: None,
            });
        }
        Ok(out)
    }

    /// Quadrilateral belts: intra-polytope squares and belt-crossing squares.
    pub fn square_belts(&self) -> Result<Vec<BeltWitness>> {
        if !self.is_flag() {
            return Err(Error::Precondition(
                "square belts are defined for flag handlebodies only".into(),
            ));
        }
        let classes = self.facet_classes()?;
        let adj = self.nerve().adjacency();
        let ordinary = self.ordinary_facets();
        let mut out = Vec::new();
        for (x, &a) in ordinary.iter().enumerate() {
            for &c in &ordinary[x + 1..] {
                if adj[a][c] {
                    continue;
                }
                let common: Vec<usize> = ordinary
                    .iter()
                    .copied()
                    .filter(|&v| adj[a][v] && adj[c][v])
                    .collect();
                for (y, &b) in common.iter().enumerate() {
                    for &d in &common[y + 1..] {
                        if adj[b][d] || (a, c) > (b, d) {
                            continue;
                        }
                        out.push(self.square_witness(
                            &classes,
                            SquareChain {
                                f1: vec![a],
                                f2: b,
                                f3: vec![c],
                                f4: d,
                            },
                            Vec::new(),
                        )?);
                    }
                }
            }
        }
        let mut crossing: BTreeMap<SquareKey, BeltWitness> = BTreeMap::new();
        for (chain, crossings) in self.crossing_square_chains(&classes, &adj)? {
            let (key, chain, crossings) = canonical_square(chain, crossings);
            if let std::collections::btree_map::Entry::Vacant(e) = crossing.entry(key) {
                let w = self.square_witness(&classes, chain, crossings)?;
                e.insert(w);
            }
        }
        out.extend(crossing.into_values());
        Ok(out)
    }

    fn square_witness(
        &self,
        classes: &FacetClasses,
        chain: SquareChain,
        crossings: Vec<Crossing>,
    ) -> Result<BeltWitness> {
        let corners = vec![chain.f1[0], chain.f2, chain.f3[0], chain.f4];
        let cls: Vec<usize> = corners.iter().map(|&f| classes.of(f)).collect();
        let distinct: BTreeSet<usize> = cls.iter().copied().collect();
        if distinct.len() != 4 {
            return Err(Error::internal(format!(
                "square through {} has repeated facet classes",
                corners.iter().map(|&f| self.facet_label(f)).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(BeltWitness {
            kind: BeltKind::Square,
            facet_classes: cls,
            crossing_belts: crossings,
            facets: corners,
            chain: Some(chain),
        })
    }

    /// Breadth-first search over pairs of facets pushed through belts.
    fn crossing_square_chains(
        &self,
        classes: &FacetClasses,
        adj: &[Vec<bool>],
    ) -> Result<Vec<(SquareChain, Vec<Crossing>)>> {
        if self.belts.is_empty() {
            return Ok(Vec::new());
        }
        let cap = 4 * self.genus();
        let quotient = self.quotient_nerve_unchecked(classes);
        let qadj = quotient.adjacency();
        let ordinary = self.ordinary_facets();
        let inverses: Vec<BTreeMap<usize, usize>> =
            self.belts.iter().map(|b| b.inverse_matching()).collect();
        let mut found = Vec::new();

        #[derive(Clone)]
        struct State {
            f1: Vec<usize>,
            f3: Vec<usize>,
            crossings: Vec<Crossing>,
            // Side of the last belt we arrived through: (belt, plus side?).
            entry: Option<(usize, bool)>,
        }

        for &f2 in &ordinary {
            let nbrs: Vec<usize> = ordinary.iter().copied().filter(|&v| adj[f2][v]).collect();
            for (x, &a) in nbrs.iter().enumerate() {
                for &c in &nbrs[x + 1..] {
                    if adj[a][c] {
                        continue;
                    }
                    let mut visited: BTreeSet<(usize, usize, Option<(usize, bool)>)> =
                        BTreeSet::new();
                    let mut queue = VecDeque::new();
                    visited.insert((a, c, None));
                    queue.push_back(State {
                        f1: vec![a],
                        f3: vec![c],
                        crossings: Vec::new(),
                        entry: None,
                    });
                    while let Some(st) = queue.pop_front() {
                        let (p, r) = (*st.f1.last().unwrap(), *st.f3.last().unwrap());
                        if !st.crossings.is_empty() {
                            for &f4 in &ordinary {
                                if !(adj[p][f4] && adj[r][f4]) {
                                    continue;
                                }
                                let (c2, c4) = (classes.of(f2), classes.of(f4));
                                if c2 == c4 || qadj[c2][c4] {
                                    continue;
                                }
                                found.push((
                                    SquareChain {
                                        f1: st.f1.clone(),
                                        f2,
                                        f3: st.f3.clone(),
                                        f4,
                                    },
                                    st.crossings.clone(),
                                ));
                            }
                        }
                        if st.crossings.len() >= cap {
                            continue;
                        }
                        for (bi, belt) in self.belts.iter().enumerate() {
                            for plus_side in [true, false] {
                                if st.entry == Some((bi, plus_side)) {
                                    continue;
                                }
                                let side = belt.side(plus_side);
                                if !(adj[p][side] && adj[r][side]) {
                                    continue;
                                }
                                let map = if plus_side { &belt.matching } else { &inverses[bi] };
                                let (np, nr) = (map[&p], map[&r]);
                                if adj[np][nr] {
                                    continue;
                                }
                                let entry = Some((bi, !plus_side));
                                if !visited.insert((np, nr, entry)) {
                                    continue;
                                }
                                let mut next = st.clone();
                                next.f1.push(np);
                                next.f3.push(nr);
                                next.crossings.push(Crossing {
                                    belt: bi,
                                    forward: plus_side,
                                });
                                next.entry = entry;
                                queue.push_back(next);
                            }
                        }
                    }
                }
            }
        }
        Ok(found)
    }

    /// Verifies `validate` and returns its error form.
    pub fn require_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

type SquareKey = (usize, Vec<(usize, usize)>, Vec<Crossing>, usize);

/// Picks the lexicographically smaller of a crossing square and its
/// reversal, so each square is reported once.
fn canonical_square(chain: SquareChain, crossings: Vec<Crossing>) -> (SquareKey, SquareChain, Vec<Crossing>) {
    let pairs = |c: &SquareChain| -> Vec<(usize, usize)> {
        c.f1.iter()
            .zip(&c.f3)
            .map(|(&x, &y)| (x.min(y), x.max(y)))
            .collect()
    };
    let reversed = SquareChain {
        f1: chain.f1.iter().rev().copied().collect(),
        f2: chain.f4,
        f3: chain.f3.iter().rev().copied().collect(),
        f4: chain.f2,
    };
    let rev_cross: Vec<Crossing> = crossings
        .iter()
        .rev()
        .map(|c| Crossing {
            belt: c.belt,
            forward: !c.forward,
        })
        .collect();
    let fwd_key = (chain.f2, pairs(&chain), crossings.clone(), chain.f4);
    let rev_key = (reversed.f2, pairs(&reversed), rev_cross.clone(), reversed.f4);
    let (key, mut chain, crossings) = if fwd_key <= rev_key {
        (fwd_key, chain, crossings)
    } else {
        (rev_key, reversed, rev_cross)
    };
    if chain.f1[0] > chain.f3[0] {
        std::mem::swap(&mut chain.f1, &mut chain.f3);
    }
    (key, chain, crossings)
}

/// Ridges (codimension-one faces of maximal simplices) that do not lie in
/// exactly two maximal simplices.
fn ridge_degree_violations(k: &SimplicialComplex, n: usize) -> Vec<Simplex> {
    if n == 1 {
        return if k.maximal_simplices().len() == 2 {
            Vec::new()
        } else {
            vec![Vec::new()]
        };
    }
    let mut count: BTreeMap<Simplex, usize> = BTreeMap::new();
    for m in k.maximal_simplices() {
        for i in 0..m.len() {
            let mut r = m.clone();
            r.remove(i);
            *count.entry(r).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, c)| c != 2)
        .map(|(r, _)| r)
        .collect()
}

/// Checks that a complex is a connected closed surface.
pub fn closed_surface(k: &SimplicialComplex) -> std::result::Result<(), String> {
    if !(k.dim() == 2 && k.is_pure()) {
        return Err("not a pure 2-dimensional complex".into());
    }
    if !ridge_degree_violations(k, 3).is_empty() {
        return Err("some edge does not lie in exactly two triangles".into());
    }
    for v in 0..k.vertex_count() {
        if !k.link(v).is_cycle() {
            return Err(format!("link of {} is not a cycle", k.label(v)));
        }
    }
    if !k.is_connected() {
        return Err("not connected".into());
    }
    Ok(())
}

/// Coherent orientation search on a closed surface complex.
pub fn orientable_surface(k: &SimplicialComplex) -> bool {
    let tris = k.maximal_simplices();
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            by_edge.entry((a, b)).or_default().push(i);
        }
    }
    // orientation[i] = +1 keeps (t0,t1,t2), -1 reverses it.
    let mut orientation = vec![0i8; tris.len()];
    let directed = |t: &Simplex, o: i8| -> [(usize, usize); 3] {
        if o > 0 {
            [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
        } else {
            [(t[1], t[0]), (t[2], t[1]), (t[0], t[2])]
        }
    };
    for start in 0..tris.len() {
        if orientation[start] != 0 {
            continue;
        }
        orientation[start] = 1;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for (a, b) in directed(&tris[i], orientation[i]) {
                let key = (a.min(b), a.max(b));
                for &j in &by_edge[&key] {
                    if j == i {
                        continue;
                    }
                    // Neighbour must traverse the shared edge as (b, a).
                    let want = if directed(&tris[j], 1).contains(&(b, a)) { 1 } else { -1 };
                    if orientation[j] == 0 {
                        orientation[j] = want;
                        stack.push(j);
                    } else if orientation[j] != want {
                        return false;
                    }
                }
            }
        }
    }
    true
}
