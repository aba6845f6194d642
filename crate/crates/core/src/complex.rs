//! Abstract simplicial complexes stored by their maximal simplices.
//!
//! Vertices carry string labels and are referred to internally by their
//! position in the label list; that order is the canonical order used for all
//! output.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, AbelianGroup, SparseMatrix};

/// A simplex as a strictly increasing list of vertex indices.
pub type Simplex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    maximal: Vec<Simplex>,
}

/// Canonical simplex order: by size, then lexicographically.
pub fn canonical_sort(simplices: &mut [Simplex]) {
    simplices.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

impl SimplicialComplex {
    /// Builds a complex from vertex labels and a generating family of
    /// simplices. Non-maximal generators are dropped; vertices not covered by
    /// any generator become isolated vertices.
    pub fn from_indices(labels: Vec<String>, simplices: Vec<Simplex>) -> Result<Self> {
        let n = labels.len();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::input(format!("duplicate vertex label {l:?}")));
            }
        }
        let mut gens: Vec<Simplex> = Vec::with_capacity(simplices.len() + n);
        let mut covered = vec![false; n];
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.iter().find(|&&v| v >= n) {
                return Err(Error::input(format!("vertex index {v} out of range")));
            }
            if s.is_empty() {
                continue;
            }
            for &v in &s {
                covered[v] = true;
            }
            gens.push(s);
        }
        for (v, c) in covered.iter().enumerate() {
            if !c {
                gens.push(vec![v]);
            }
        }
        Ok(SimplicialComplex {
            labels,
            maximal: maximal_only(gens),
        })
    }

    /// Builds a complex from label lists.
    pub fn from_labels(labels: Vec<String>, simplices: &[Vec<String>]) -> Result<Self> {
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut out = Vec::with_capacity(simplices.len());
        for s in simplices {
            let mut idx = Vec::with_capacity(s.len());
            for l in s {
                match index.get(l.as_str()) {
                    Some(&i) => idx.push(i),
                    None => return Err(Error::input(format!("unknown vertex label {l:?}"))),
                }
            }
            out.push(idx);
        }
        Self::from_indices(labels, out)
    }

    pub fn empty() -> Self {
        SimplicialComplex {
            labels: Vec::new(),
            maximal: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::input(format!("unknown vertex label {label:?}")))
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn maximal_simplex_labels(&self) -> Vec<Vec<String>> {
        self.maximal
            .iter()
            .map(|s| s.iter().map(|&v| self.labels[v].clone()).collect())
            .collect()
    }

    /// Dimension of the complex; the empty complex has dimension -1.
    pub fn dim(&self) -> isize {
        self.maximal.iter().map(|s| s.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.maximal.iter().all(|s| s.len() as isize - 1 == d)
    }

    /// Does the (sorted) vertex set span a simplex?
    pub fn contains(&self, sigma: &[usize]) -> bool {
        sigma.is_empty() || self.maximal.iter().any(|m| is_subset(sigma, m))
    }

    pub fn contains_unsorted(&self, sigma: &[usize]) -> bool {
        let mut s = sigma.to_vec();
        s.sort_unstable();
        s.dedup();
        self.contains(&s)
    }

    /// Adjacency matrix of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for s in &self.maximal {
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
        }
        adj
    }

    /// All nonempty faces, grouped by dimension, each group canonically sorted.
    pub fn faces(&self) -> Vec<Vec<Simplex>> {
        let d = self.dim();
        if d < 0 {
            return Vec::new();
        }
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); d as usize + 1];
        for m in &self.maximal {
            let k = m.len();
            for mask in 1u64..(1u64 << k) {
                let face: Simplex = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                sets[face.len() - 1].insert(face);
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Face counts by dimension, suitable for large complexes.
    pub fn face_counts(&self) -> Vec<usize> {
        faces_hashed(self).iter().map(|f| f.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.face_counts()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// The full subcomplex on `j`, relabeled to `j`'s vertices in input
    /// order. Returns the subcomplex and, for each of its vertices, the
    /// original index.
    pub fn full_subcomplex_indexed(&self, j: &[usize]) -> (SimplicialComplex, Vec<usize>) {
        let mut verts: Vec<usize> = j.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut new_index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in verts.iter().enumerate() {
            new_index[v] = i;
        }
        let gens = self
            .maximal
            .iter()
            .map(|m| {
                m.iter()
                    .filter(|&&v| new_index[v] != usize::MAX)
                    .map(|&v| new_index[v])
                    .collect::<Simplex>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        let labels = verts.iter().map(|&v| self.labels[v].clone()).collect();
        let k = SimplicialComplex::from_indices(labels, gens).expect("indices are in range");
        (k, verts)
    }

    pub fn full_subcomplex(&self, j: &[usize]) -> SimplicialComplex {
        self.full_subcomplex_indexed(j).0
    }

    pub fn full_subcomplex_labels(&self, j: &[&str]) -> Result<SimplicialComplex> {
        let idx = j
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.full_subcomplex(&idx))
    }

    /// The link of vertex `v`, on the vertices adjacent to `v` in input order.
    pub fn link_indexed(&self, v: usize) -> (SimplicialComplex, Vec<usize>) {
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        let mut gens = Vec::new();
        for m in &self.maximal {
            if m.contains(&v) {
                let rest: Simplex = m.iter().copied().filter(|&x| x != v).collect();
                verts.extend(rest.iter().copied());
                gens.push(rest);
            }
        }
        let verts: Vec<usize> = verts.into_iter().collect();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let gens = gens
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.iter().map(|x| pos[x]).collect())
            .collect();
        let labels = verts.iter().map(|&x| self.labels[x].clone()).collect();
        (
            SimplicialComplex::from_indices(labels, gens).expect("indices are in range"),
            verts,
        )
    }

    pub fn link(&self, v: usize) -> SimplicialComplex {
        self.link_indexed(v).0
    }

    pub fn link_label(&self, v: &str) -> Result<SimplicialComplex> {
        Ok(self.link(self.index_of(v)?))
    }

    /// Minimal non-faces with at least three vertices, canonically sorted.
    pub fn empty_simplices(&self) -> Vec<Simplex> {
        let faces = self.faces();
        let adj = self.adjacency();
        let n = self.vertex_count();
        let mut out = Vec::new();
        // A minimal non-face S of size k+1 is a face tau = S minus max(S)
        // extended by a larger vertex adjacent to all of tau.
        for group in faces.iter().skip(1) {
            for tau in group {
                let last = *tau.last().expect("nonempty");
                for w in last + 1..n {
                    if !tau.iter().all(|&u| adj[u][w]) {
                        continue;
                    }
                    let mut s = tau.clone();
                    s.push(w);
                    if self.contains(&s) {
                        continue;
                    }
                    let minimal = (0..s.len()).all(|i| {
                        let mut f = s.clone();
                        f.remove(i);
                        self.contains(&f)
                    });
                    if minimal {
                        out.push(s);
                    }
                }
            }
        }
        canonical_sort(&mut out);
        out
    }

    pub fn is_flag(&self) -> bool {
        self.empty_simplices().is_empty()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Is the complex a single cycle (a triangulated circle)?
    pub fn is_cycle(&self) -> bool {
        let n = self.vertex_count();
        n >= 3
            && self.dim() == 1
            && self.is_pure()
            && self.maximal.len() == n
            && self.adjacency().iter().all(|r| r.iter().filter(|&&b| b).count() == 2)
            && self.is_connected()
    }

    /// The vertices of a cycle complex in cyclic order starting at vertex 0.
    pub fn cycle_order(&self) -> Option<Vec<usize>> {
        if !self.is_cycle() {
            return None;
        }
        let adj = self.adjacency();
        let n = self.vertex_count();
        let mut order = vec![0];
        let mut prev = usize::MAX;
        let mut cur = 0;
        loop {
            let next = (0..n).find(|&w| adj[cur][w] && w != prev)?;
            if next == 0 {
                break;
            }
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == n).then_some(order)
    }

    pub fn homology(&self, coefficients: Coefficients) -> HomologyResult {
        homology(self, coefficients, false)
    }

    pub fn reduced_homology(&self, coefficients: Coefficients) -> HomologyResult {
        homology(self, coefficients, true)
    }
}

fn maximal_only(mut gens: Vec<Simplex>) -> Vec<Simplex> {
    gens.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    gens.dedup();
    // Longer simplices come first, so a generator is maximal unless a kept
    // simplex through its first vertex contains it.
    let mut kept: Vec<Simplex> = Vec::new();
    let mut through: HashMap<usize, Vec<usize>> = HashMap::new();
    for g in gens {
        let covered = g.first().is_some_and(|v| {
            through
                .get(v)
                .is_some_and(|ks| ks.iter().any(|&k| kept[k].len() > g.len() && is_subset(&g, &kept[k])))
        });
        if !covered && !(g.is_empty() && !kept.is_empty()) {
            for &v in &g {
                through.entry(v).or_default().push(kept.len());
            }
            kept.push(g);
        }
    }
    canonical_sort(&mut kept);
    kept
}

fn faces_hashed(k: &SimplicialComplex) -> Vec<HashMap<Simplex, usize>> {
    let d = k.dim();
    if d < 0 {
        return Vec::new();
    }
    let mut maps: Vec<HashMap<Simplex, usize>> = vec![HashMap::new(); d as usize + 1];
    for m in &k.maximal {
        let len = m.len();
        for mask in 1u64..(1u64 << len) {
            let face: Simplex = (0..len).filter(|i| mask >> i & 1 == 1).map(|i| m[i]).collect();
            let map = &mut maps[face.len() - 1];
            let next = map.len();
            map.entry(face).or_insert(next);
        }
    }
    maps
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    #[serde(rename = "z")]
    Z,
    #[serde(rename = "z2")]
    Z2,
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Coefficients::Z => "Z",
            Coefficients::Z2 => "Z2",
        })
    }
}

/// Homology by degree, starting at degree 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub coefficients: Coefficients,
    pub groups: Vec<AbelianGroup>,
}

impl HomologyResult {
    pub fn zero(coefficients: Coefficients) -> Self {
        HomologyResult {
            coefficients,
            groups: Vec::new(),
        }
    }

    pub fn degree(&self, k: usize) -> AbelianGroup {
        self.groups.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(AbelianGroup::is_zero)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.free_rank).collect()
    }

    /// Drops trailing zero groups so that results of different nominal
    /// dimension compare equal.
    pub fn trimmed(mut self) -> Self {
        while self.groups.last().is_some_and(|g| g.is_zero()) {
            self.groups.pop();
        }
        self
    }

    /// Euler characteristic from ranks (dimensions over the field).
    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let r = g.free_rank as i64;
                if k % 2 == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum()
    }

    /// Mod-two homology predicted by universal coefficients.
    pub fn to_mod2(&self) -> HomologyResult {
        assert_eq!(self.coefficients, Coefficients::Z);
        let groups = (0..self.groups.len())
            .map(|k| {
                let here = &self.groups[k];
                let below = if k > 0 { self.groups[k - 1].even_torsion() } else { 0 };
                AbelianGroup::free(here.free_rank + here.even_torsion() + below)
            })
            .collect();
        HomologyResult {
            coefficients: Coefficients::Z2,
            groups,
        }
    }

    pub fn set_degree(&mut self, k: usize, g: AbelianGroup) {
        if self.groups.len() <= k {
            self.groups.resize(k + 1, AbelianGroup::default());
        }
        self.groups[k] = g;
    }

    pub fn add_degree(&mut self, k: usize, g: &AbelianGroup) {
        let cur = self.degree(k);
        self.set_degree(k, cur.sum(g));
    }
}

impl std::fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .enumerate()
            .map(|(k, g)| match self.coefficients {
                Coefficients::Z => format!("H{k}={g}"),
                Coefficients::Z2 => format!("H{k}=Z2^{}", g.free_rank),
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Boundary matrix from `k`-faces to `(k-1)`-faces.
fn boundary(
    upper: &HashMap<Simplex, usize>,
    lower: &HashMap<Simplex, usize>,
) -> SparseMatrix {
    let mut columns = vec![Vec::new(); upper.len()];
    for (s, &j) in upper {
        let mut col: Vec<(usize, i64)> = (0..s.len())
            .map(|i| {
                let mut f = s.clone();
                f.remove(i);
                (lower[&f], if i % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        col.sort_unstable();
        columns[j] = col;
    }
    SparseMatrix {
        rows: lower.len(),
        columns,
    }
}

fn homology(k: &SimplicialComplex, coefficients: Coefficients, reduced: bool) -> HomologyResult {
    let faces = faces_hashed(k);
    if faces.is_empty() {
        return HomologyResult::zero(coefficients);
    }
    let top = faces.len();
    // ranks[k] = rank of the boundary map out of degree k; torsion[k] its
    // non-unit invariant factors.
    let mut ranks = vec![0usize; top + 1];
    let mut torsion = vec![Vec::new(); top + 1];
    if reduced {
        ranks[0] = 1;
    }
    for d in 1..top {
        let m = boundary(&faces[d], &faces[d - 1]);
        match coefficients {
            Coefficients::Z => {
                let e = linalg::invariant_factors(&m);
                ranks[d] = e.rank;
                torsion[d] = e.torsion;
            }
            Coefficients::Z2 => ranks[d] = linalg::rank_mod2(&m),
        }
    }
    let groups = (0..top)
        .map(|d| AbelianGroup {
            free_rank: faces[d].len() - ranks[d] - ranks[d + 1],
            torsion: torsion[d + 1].clone(),
        })
        .collect();
    HomologyResult {
        coefficients,
        groups,
    }
}

/// An oriented 1-chain: integer coefficients on ordered vertex pairs. An entry
/// `((a, b), c)` with `a > b` stands for `-c` on the edge `(b, a)`.
pub type Chain1 = Vec<((usize, usize), i64)>;

/// Closed edge path `v0 v1 ... v_{k-1} v0` as a 1-chain.
pub fn cycle_chain(path: &[usize]) -> Chain1 {
    (0..path.len())
        .map(|i| ((path[i], path[(i + 1) % path.len()]), 1))
        .collect()
}

/// The map `H_1(K_J) -> H_1(K) / <relations>` on explicit bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrixMap {
    /// Rows index the cyclic summands of the codomain (free summands first,
    /// then torsion summands); columns index a basis of the cycle group
    /// `Z_1(K_J)`. Torsion rows are reduced modulo their order.
    pub matrix: Vec<Vec<BigInt>>,
    pub domain: AbelianGroup,
    pub codomain: AbelianGroup,
    pub kernel: AbelianGroup,
    pub cokernel: AbelianGroup,
    /// Rank of the image.
    pub rank: usize,
}

struct CycleSpace {
    edges: Vec<(usize, usize)>,
    /// Kernel basis of the edge-to-vertex boundary, as edge vectors.
    basis: Vec<Vec<BigInt>>,
    /// Maps an edge vector to coordinates via the inverse column transform.
    vinv: linalg::DenseMatrix,
    rank: usize,
}

impl CycleSpace {
    fn new(k: &SimplicialComplex) -> Self {
        let faces = k.faces();
        let edges: Vec<(usize, usize)> = faces
            .get(1)
            .map(|e| e.iter().map(|s| (s[0], s[1])).collect())
            .unwrap_or_default();
        let n = k.vertex_count();
        let mut d1 = linalg::zeros(n, edges.len());
        for (j, &(a, b)) in edges.iter().enumerate() {
            d1[a][j] = BigInt::from(-1);
            d1[b][j] = BigInt::one();
        }
        let s = linalg::smith(&d1, n, edges.len(), true);
        CycleSpace {
            basis: s.kernel_basis(),
            rank: s.rank(),
            vinv: s.vinv,
            edges,
        }
    }

    fn edge_index(&self, a: usize, b: usize) -> Option<(usize, i64)> {
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        self.edges
            .binary_search(&(lo, hi))
            .ok()
            .map(|i| (i, sign))
    }

    fn chain_vector(&self, chain: &Chain1) -> Result<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); self.edges.len()];
        for &((a, b), c) in chain {
            let (i, sign) = self
                .edge_index(a, b)
                .ok_or_else(|| Error::input(format!("relation uses non-edge ({a}, {b})")))?;
            v[i] += BigInt::from(c * sign);
        }
        Ok(v)
    }

    /// Coordinates of a cycle in the kernel basis, or `None` for non-cycles.
    fn coordinates(&self, z: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = linalg::mat_vec(&self.vinv, z);
        if y[..self.rank].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(y[self.rank..].to_vec())
    }
}

fn boundary_columns(k: &SimplicialComplex, space: &CycleSpace) -> Vec<Vec<BigInt>> {
    let faces = k.faces();
    let Some(tris) = faces.get(2) else {
        return Vec::new();
    };
    tris.iter()
        .map(|t| {
            let chain: Chain1 = vec![((t[1], t[2]), 1), ((t[0], t[2]), -1), ((t[0], t[1]), 1)];
            let v = space.chain_vector(&chain).expect("faces of a simplex are edges");
            space.coordinates(&v).expect("boundaries are cycles")
        })
        .collect()
}

/// Structure of `lattice / sub` where `gens` span `lattice` inside `Z^dim`
/// and `sub` (given by generators) lies inside it.
fn quotient_of_lattices(dim: usize, gens: &[Vec<BigInt>], sub: &[Vec<BigInt>]) -> AbelianGroup {
    let mut g = linalg::zeros(dim, gens.len());
    for (j, c) in gens.iter().enumerate() {
        for i in 0..dim {
            g[i][j] = c[i].clone();
        }
    }
    let s = linalg::smith(&g, dim, gens.len(), true);
    let r = s.rank();
    // Basis of the lattice: uinv[:, i] * d_i. Coordinates of x in it:
    // (u x)_i / d_i.
    let coords: Vec<Vec<BigInt>> = sub
        .iter()
        .map(|x| {
            let ux = linalg::mat_vec(&s.u, x);
            (0..r).map(|i| &ux[i] / &s.diagonal[i]).collect()
        })
        .collect();
    linalg::cokernel(r, &coords)
}

/// Computes `H_1(K_J) -> H_1(K) / <relations>` and its kernel and cokernel.
pub fn induced_h1_map(
    k: &SimplicialComplex,
    j: &[usize],
    relations: &[Chain1],
) -> Result<IntegerMatrixMap> {
    if let Some(&v) = j.iter().find(|&&v| v >= k.vertex_count()) {
        return Err(Error::input(format!("vertex index {v} out of range")));
    }
    let target = CycleSpace::new(k);
    let r1 = target.basis.len();
    let mut rel_cols = boundary_columns(k, &target);
    for (i, rel) in relations.iter().enumerate() {
        let v = target.chain_vector(rel)?;
        let c = target
            .coordinates(&v)
            .ok_or_else(|| Error::input(format!("relation {i} is not a cycle")))?;
        rel_cols.push(c);
    }
    let mut rel = linalg::zeros(r1, rel_cols.len());
    for (c, col) in rel_cols.iter().enumerate() {
        for i in 0..r1 {
            rel[i][c] = col[i].clone();
        }
    }
    let rs = linalg::smith(&rel, r1, rel_cols.len(), true);
    let rank_r = rs.rank();
    // Codomain summands: rows of U with d_i > 1 (torsion), then rows past
    // the rank (free).
    let torsion_rows: Vec<usize> = (0..rank_r).filter(|&i| !rs.diagonal[i].is_one()).collect();
    let free_rows: Vec<usize> = (rank_r..r1).collect();
    let codomain = AbelianGroup {
        free_rank: free_rows.len(),
        torsion: torsion_rows
            .iter()
            .map(|&i| rs.diagonal[i].to_biguint().expect("positive"))
            .collect(),
    };

    let (kj, verts) = k.full_subcomplex_indexed(j);
    let source = CycleSpace::new(&kj);
    let a = source.basis.len();
    let mut images = Vec::with_capacity(a);
    for z in &source.basis {
        let mut chain = Chain1::new();
        for (e, c) in source.edges.iter().zip(z) {
            if !c.is_zero() {
                let c = i64::try_from(c.clone())
                    .map_err(|_| Error::internal("cycle coefficient overflow"))?;
                chain.push(((verts[e.0], verts[e.1]), c));
            }
        }
        let v = target.chain_vector(&chain)?;
        images.push(
            target
                .coordinates(&v)
                .ok_or_else(|| Error::internal("image of a cycle is not a cycle"))?,
        );
    }
    let matrix: Vec<Vec<BigInt>> = free_rows
        .iter()
        .map(|&i| {
            images
                .iter()
                .map(|y| linalg::mat_vec(&rs.u[i..=i].to_vec(), y)[0].clone())
                .collect()
        })
        .chain(torsion_rows.iter().map(|&i| {
            images
                .iter()
                .map(|y| {
                    let x = linalg::mat_vec(&rs.u[i..=i].to_vec(), y)[0].clone();
                    let d = &rs.diagonal[i];
                    ((x % d) + d) % d
                })
                .collect()
        }))
        .collect();

    let source_bd = boundary_columns(&kj, &source);
    let domain = linalg::cokernel(a, &source_bd);

    let mut cok_cols = rel_cols.clone();
    cok_cols.extend(images.iter().cloned());
    let cokernel = linalg::cokernel(r1, &cok_cols);

    // Kernel: {x : F x in span(R)} modulo the boundaries of K_J.
    let width = a + rel_cols.len();
    let mut stacked = linalg::zeros(r1, width);
    for (c, y) in images.iter().enumerate() {
        for i in 0..r1 {
            stacked[i][c] = y[i].clone();
        }
    }
    for (c, col) in rel_cols.iter().enumerate() {
        for i in 0..r1 {
            stacked[i][a + c] = -col[i].clone();
        }
    }
    let ks = linalg::smith(&stacked, r1, width, true);
    let lattice_gens: Vec<Vec<BigInt>> = ks
        .kernel_basis()
        .into_iter()
        .map(|v| v[..a].to_vec())
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    let kernel = if lattice_gens.is_empty() {
        AbelianGroup::default()
    } else {
        quotient_of_lattices(a, &lattice_gens, &source_bd)
    };
    let rank = domain.free_rank - kernel.free_rank;
    Ok(IntegerMatrixMap {
        matrix,
        domain,
        codomain,
        kernel,
        cokernel,
        rank,
    })
}
