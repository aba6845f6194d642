//! Integer linear algebra: Smith normal form over arbitrary-precision
//! integers, plus a sparse elimination front end for large boundary matrices.
//!
//! The sparse path removes unit pivots with exact `i64` arithmetic and hands
//! whatever is left (usually nothing, or a handful of entries) to the dense
//! big-integer routine. Any overflow in the fast path stops it early; the
//! partially reduced matrix is still equivalent to the input, so the dense
//! routine finishes the job exactly.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type DenseMatrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> DenseMatrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> DenseMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix, inner: usize, cols: usize) -> DenseMatrix {
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &DenseMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, v)| !r.is_zero() && !v.is_zero())
                .fold(BigInt::zero(), |acc, (r, v)| acc + r * v)
        })
        .collect()
}

/// Result of a Smith decomposition `U * A * V = D`.
///
/// `diagonal` holds the nonzero invariant factors in divisibility order; all
/// four transforms are unimodular and `uinv`, `vinv` are their inverses.
#[derive(Clone, Debug)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    pub diagonal: Vec<BigInt>,
    pub u: DenseMatrix,
    pub uinv: DenseMatrix,
    pub v: DenseMatrix,
    pub vinv: DenseMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Columns of `V` past the rank: a basis of the integer kernel of `A`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.cols)
            .map(|j| self.v.iter().map(|row| row[j].clone()).collect())
            .collect()
    }
}

struct Reducer {
    a: DenseMatrix,
    track: bool,
    u: DenseMatrix,
    uinv: DenseMatrix,
    v: DenseMatrix,
    vinv: DenseMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            for row in self.uinv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if self.track {
            for row in self.v.iter_mut() {
                row.swap(i, j);
            }
            self.vinv.swap(i, j);
        }
    }

    /// row_dst += c * row_src
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let (d, s) = two_rows(&mut self.a, dst, src);
        axpy(d, s, c);
        if self.track {
            let (d, s) = two_rows(&mut self.u, dst, src);
            axpy(d, s, c);
            let neg = -c;
            for row in self.uinv.iter_mut() {
                let delta = &row[dst] * &neg;
                row[src] += delta;
            }
        }
    }

    /// col_dst += c * col_src
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            let delta = &row[src] * c;
            row[dst] += delta;
        }
        if self.track {
            for row in self.v.iter_mut() {
                let delta = &row[src] * c;
                row[dst] += delta;
            }
            let neg = -c;
            let (s, d) = two_rows(&mut self.vinv, src, dst);
            axpy(s, d, &neg);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
            for row in self.uinv.iter_mut() {
                row[i] = -std::mem::take(&mut row[i]);
            }
        }
    }
}

fn two_rows(m: &mut DenseMatrix, a: usize, b: usize) -> (&mut Vec<BigInt>, &Vec<BigInt>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], c: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += s * c;
        }
    }
}

/// Smith normal form of a dense integer matrix with `rows` rows.
pub fn smith(a: &DenseMatrix, rows: usize, cols: usize, track: bool) -> Smith {
    let mut r = Reducer {
        a: a.clone(),
        track,
        u: if track { identity(rows) } else { Vec::new() },
        uinv: if track { identity(rows) } else { Vec::new() },
        v: if track { identity(cols) } else { Vec::new() },
        vinv: if track { identity(cols) } else { Vec::new() },
    };
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &r.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < r.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(r, rows, cols, diagonal);
            };
            r.swap_rows(t, bi);
            r.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                if !r.a[i][t].is_zero() {
                    let q = &r.a[i][t] / &r.a[t][t];
                    r.add_row(i, t, &-q);
                    clean &= r.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !r.a[t][j].is_zero() {
                    let q = &r.a[t][j] / &r.a[t][t];
                    r.add_col(j, t, &-q);
                    clean &= r.a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let pivot = r.a[t][t].clone();
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !r.a[i][j].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => r.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if r.a[t][t].is_negative() {
            r.negate_row(t);
        }
        diagonal.push(r.a[t][t].clone());
    }
    finish(r, rows, cols, diagonal)
}

fn finish(r: Reducer, rows: usize, cols: usize, diagonal: Vec<BigInt>) -> Smith {
    Smith {
        rows,
        cols,
        diagonal,
        u: r.u,
        uinv: r.uinv,
        v: r.v,
        vinv: r.vinv,
    }
}

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/t_i`, with the
/// torsion coefficients in divisibility order. Over the two-element field
/// `free_rank` is the dimension and `torsion` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, keeping torsion in divisibility (invariant factor) order.
    pub fn sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut factors: Vec<BigInt> = self
            .torsion
            .iter()
            .chain(&other.torsion)
            .map(|t| BigInt::from_biguint(Sign::Plus, t.clone()))
            .collect();
        factors.sort();
        AbelianGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion: invariant_factor_form(factors),
        }
    }

    /// Number of torsion coefficients divisible by two.
    pub fn even_torsion(&self) -> usize {
        self.torsion.iter().filter(|t| t.is_even()).count()
    }

    pub fn cyclic_summands(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Converts an arbitrary list of positive cyclic orders into invariant factor
/// form (each divides the next), dropping ones.
pub fn invariant_factor_form(orders: Vec<BigInt>) -> Vec<BigUint> {
    let n = orders.len();
    if n == 0 {
        return Vec::new();
    }
    let mut diag = zeros(n, n);
    for (i, o) in orders.into_iter().enumerate() {
        diag[i][i] = o;
    }
    let s = smith(&diag, n, n, false);
    s.diagonal
        .into_iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_biguint().expect("invariant factors are positive"))
        .collect()
}

/// Cokernel of an integer matrix given by its columns in `Z^rows`.
pub fn cokernel(rows: usize, columns: &[Vec<BigInt>]) -> AbelianGroup {
    let mut a = zeros(rows, columns.len());
    for (j, c) in columns.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            a[i][j] = x.clone();
        }
    }
    let s = smith(&a, rows, columns.len(), false);
    AbelianGroup {
        free_rank: rows - s.rank(),
        torsion: s
            .diagonal
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.to_biguint().expect("positive"))
            .collect(),
    }
}

/// Sparse column-major matrix; each column is sorted by row index.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

/// Outcome of eliminating a sparse matrix: the number of unit invariant
/// factors plus the remaining non-unit invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub rank: usize,
    pub torsion: Vec<BigUint>,
}

trait PivotRing: Copy + PartialEq {
    fn zero() -> Self;
    fn is_unit(self) -> bool;
    /// `x - f * y` with `f = a / p` for a unit pivot `p`; `None` on overflow.
    fn eliminate(x: Self, a: Self, p: Self, y: Self) -> Option<Self>;
    fn factor(a: Self, p: Self) -> Option<Self>;
}

impl PivotRing for i64 {
    fn zero() -> Self {
        0
    }
    fn is_unit(self) -> bool {
        self == 1 || self == -1
    }
    fn eliminate(x: Self, f: Self, _p: Self, y: Self) -> Option<Self> {
        x.checked_sub(f.checked_mul(y)?)
    }
    fn factor(a: Self, p: Self) -> Option<Self> {
        a.checked_mul(p)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Gf2(bool);

impl PivotRing for Gf2 {
    fn zero() -> Self {
        Gf2(false)
    }
    fn is_unit(self) -> bool {
        self.0
    }
    fn eliminate(x: Self, f: Self, _p: Self, y: Self) -> Option<Self> {
        Some(Gf2(x.0 ^ (f.0 & y.0)))
    }
    fn factor(a: Self, _p: Self) -> Option<Self> {
        Some(a)
    }
}

/// Unit-pivot elimination. Returns the number of pivots taken and the
/// surviving (row-renumbered) columns, which contain no unit entry unless the
/// elimination stopped on overflow.
fn eliminate_units<R: PivotRing>(
    rows: usize,
    mut cols: Vec<Vec<(usize, R)>>,
) -> (usize, usize, Vec<Vec<(usize, R)>>) {
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); rows];
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r].push(c);
        }
    }
    let mut col_alive = vec![true; cols.len()];
    let mut row_alive = vec![true; rows];
    let mut stamp = vec![usize::MAX; cols.len()];
    let mut rank = 0;
    let mut overflow = false;
    'passes: loop {
        let mut order: Vec<usize> = (0..cols.len()).filter(|&c| col_alive[c]).collect();
        order.sort_by_key(|&c| cols[c].len());
        let mut progress = false;
        for c in order {
            if !col_alive[c] {
                continue;
            }
            if cols[c].is_empty() {
                col_alive[c] = false;
                continue;
            }
            let pivot = cols[c]
                .iter()
                .filter(|(_, x)| x.is_unit())
                .min_by_key(|(r, _)| row_cols[*r].len())
                .copied();
            let Some((pr, pv)) = pivot else { continue };
            let pivot_col = std::mem::take(&mut cols[c]);
            let targets = std::mem::take(&mut row_cols[pr]);
            let mut kept_targets = Vec::new();
            for c2 in targets {
                if c2 == c || !col_alive[c2] || stamp[c2] == rank {
                    continue;
                }
                stamp[c2] = rank;
                let Ok(pos) = cols[c2].binary_search_by_key(&pr, |e| e.0) else {
                    continue;
                };
                let a = cols[c2][pos].1;
                let Some(f) = R::factor(a, pv) else {
                    overflow = true;
                    kept_targets.push(c2);
                    continue;
                };
                match merge(&cols[c2], &pivot_col, f, pv) {
                    Some(merged) => {
                        for &(r, _) in &merged {
                            if r != pr && pivot_col.binary_search_by_key(&r, |e| e.0).is_ok()
                                && cols[c2].binary_search_by_key(&r, |e| e.0).is_err()
                            {
                                row_cols[r].push(c2);
                            }
                        }
                        cols[c2] = merged;
                    }
                    None => {
                        overflow = true;
                        kept_targets.push(c2);
                    }
                }
            }
            if overflow {
                cols[c] = pivot_col;
                row_cols[pr] = kept_targets;
                row_cols[pr].push(c);
                break 'passes;
            }
            col_alive[c] = false;
            row_alive[pr] = false;
            rank += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let mut renumber = vec![usize::MAX; rows];
    let mut live_rows = 0;
    for r in 0..rows {
        if row_alive[r] {
            renumber[r] = live_rows;
            live_rows += 1;
        }
    }
    let rest = cols
        .into_iter()
        .enumerate()
        .filter(|(c, col)| col_alive[*c] && !col.is_empty())
        .map(|(_, col)| {
            col.into_iter()
                .map(|(r, x)| (renumber[r], x))
                .collect::<Vec<_>>()
        })
        .collect();
    (rank, live_rows, rest)
}

/// `x - f*y` on sorted sparse columns; the pivot row cancels exactly.
fn merge<R: PivotRing>(
    x: &[(usize, R)],
    y: &[(usize, R)],
    f: R,
    p: R,
) -> Option<Vec<(usize, R)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (r, v) = if take_x {
            i += 1;
            (x[i - 1].0, x[i - 1].1)
        } else if take_y {
            j += 1;
            (y[j - 1].0, R::eliminate(R::zero(), f, p, y[j - 1].1)?)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, R::eliminate(x[i - 1].1, f, p, y[j - 1].1)?)
        };
        if v != R::zero() {
            out.push((r, v));
        }
    }
    Some(out)
}

/// Rank and non-unit invariant factors of an integer matrix.
pub fn invariant_factors(m: &SparseMatrix) -> Elimination {
    let (rank, live_rows, rest) = eliminate_units::<i64>(m.rows, m.columns.clone());
    if rest.is_empty() {
        return Elimination {
            rank,
            torsion: Vec::new(),
        };
    }
    let mut used_rows: Vec<usize> = rest.iter().flatten().map(|e| e.0).collect();
    used_rows.sort_unstable();
    used_rows.dedup();
    debug_assert!(used_rows.last().is_none_or(|&r| r < live_rows));
    let mut dense = zeros(used_rows.len(), rest.len());
    for (j, col) in rest.iter().enumerate() {
        for &(r, x) in col {
            let i = used_rows.binary_search(&r).expect("row present");
            dense[i][j] = BigInt::from(x);
        }
    }
    let s = smith(&dense, used_rows.len(), rest.len(), false);
    let mut torsion = Vec::new();
    let mut unit = 0;
    for d in s.diagonal {
        if d.is_one() {
            unit += 1;
        } else {
            torsion.push(d.to_biguint().expect("positive"));
        }
    }
    Elimination {
        rank: rank + unit + torsion.len(),
        torsion,
    }
}

/// Rank over the two-element field.
pub fn rank_mod2(m: &SparseMatrix) -> usize {
    let cols = m
        .columns
        .iter()
        .map(|col| {
            col.iter()
                .filter(|(_, x)| x.rem_euclid(2) == 1)
                .map(|&(r, _)| (r, Gf2(true)))
                .collect()
        })
        .collect();
    let (rank, _, rest) = eliminate_units::<Gf2>(m.rows, cols);
    debug_assert!(rest.is_empty());
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> DenseMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn sparse(rows: &[&[i64]]) -> SparseMatrix {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        SparseMatrix {
            rows: nr,
            columns: (0..nc)
                .map(|j| {
                    (0..nr)
                        .filter(|&i| rows[i][j] != 0)
                        .map(|i| (i, rows[i][j]))
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = dense(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a, 3, 3, true);
        let d: Vec<i64> = s
            .diagonal
            .iter()
            .map(|x| i64::try_from(x.clone()).unwrap())
            .collect();
        assert_eq!(d, vec![2, 6, 12]);
        let uav = mat_mul(&mat_mul(&s.u, &a, 3, 3), &s.v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { BigInt::from(d[i]) } else { BigInt::zero() };
                assert_eq!(uav[i][j], expect);
            }
        }
        let uu = mat_mul(&s.u, &s.uinv, 3, 3);
        let vv = mat_mul(&s.v, &s.vinv, 3, 3);
        assert_eq!(uu, identity(3));
        assert_eq!(vv, identity(3));
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let rows: &[&[i64]] = &[&[2, 0, 1, 0], &[0, 3, 0, 0], &[1, 1, 0, 4], &[0, 0, 2, 2]];
        let e = invariant_factors(&sparse(rows));
        let s = smith(&dense(rows), 4, 4, false);
        assert_eq!(e.rank, s.rank());
        let tors: Vec<BigUint> = s
            .diagonal
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.to_biguint().unwrap())
            .collect();
        assert_eq!(e.torsion, tors);
    }

    #[test]
    fn mod_two_rank() {
        let rows: &[&[i64]] = &[&[1, 1], &[1, -1]];
        assert_eq!(rank_mod2(&sparse(rows)), 1);
        let e = invariant_factors(&sparse(rows));
        assert_eq!(e.rank, 2);
        assert_eq!(e.torsion, vec![BigUint::from(2u32)]);
    }

    #[test]
    fn group_sum_keeps_invariant_factors() {
        let a = AbelianGroup {
            free_rank: 1,
            torsion: vec![BigUint::from(2u32)],
        };
        let b = AbelianGroup {
            free_rank: 0,
            torsion: vec![BigUint::from(3u32)],
        };
        assert_eq!(a.sum(&b).torsion, vec![BigUint::from(6u32)]);
        assert_eq!(a.to_string(), "Z + Z/2");
    }
}
