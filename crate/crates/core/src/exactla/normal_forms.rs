//! Smith and Hermite normal forms over Z, lattice saturation, and a sparse
//! invariant-factor routine for large boundary matrices.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{BigMatrix, IntMatrix};

/// `left · M · right = diag` with unimodular `left`, `right` and
/// `d_1 | d_2 | …` along the diagonal (zeros last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub left: BigMatrix,
    pub diag: Vec<BigInt>,
    pub right: BigMatrix,
}

impl SnfResult {
    /// The diagonal as a full `rows × cols` matrix.
    pub fn diag_matrix(&self, rows: usize, cols: usize) -> BigMatrix {
        let mut d = BigMatrix::zeros(rows, cols);
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

/// Row/column operations are mirrored into these optional transforms.
struct Tracker<'a> {
    left: Option<&'a mut BigMatrix>,
    right: Option<&'a mut BigMatrix>,
}

impl Tracker<'_> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if let Some(u) = self.left.as_deref_mut() {
            u.swap_rows(a, b);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if let Some(v) = self.right.as_deref_mut() {
            v.swap_cols(a, b);
        }
    }
    /// row_dst += c · row_src
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if let Some(u) = self.left.as_deref_mut() {
            add_row(u, dst, src, c);
        }
    }
    /// col_dst += c · col_src
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        if let Some(v) = self.right.as_deref_mut() {
            add_col(v, dst, src, c);
        }
    }
    fn negate_row(&mut self, r: usize) {
        if let Some(u) = self.left.as_deref_mut() {
            for j in 0..u.cols() {
                u[(r, j)] = -u[(r, j)].clone();
            }
        }
    }
}

fn add_row(m: &mut BigMatrix, dst: usize, src: usize, c: &BigInt) {
    for j in 0..m.cols() {
        if !m[(src, j)].is_zero() {
            let d = c * &m[(src, j)];
            m[(dst, j)] += d;
        }
    }
}

fn add_col(m: &mut BigMatrix, dst: usize, src: usize, c: &BigInt) {
    for i in 0..m.rows() {
        if !m[(i, src)].is_zero() {
            let d = c * &m[(i, src)];
            m[(i, dst)] += d;
        }
    }
}

/// Smith normal form with transforms.
pub fn snf(m: &BigMatrix) -> SnfResult {
    let mut a = m.clone();
    let mut left = BigMatrix::identity(m.rows());
    let mut right = BigMatrix::identity(m.cols());
    let diag = {
        let mut tr = Tracker {
            left: Some(&mut left),
            right: Some(&mut right),
        };
        diagonalize(&mut a, &mut tr)
    };
    SnfResult { left, diag, right }
}

/// Smith normal form of a machine-integer matrix.
pub fn snf_i64(m: &IntMatrix) -> SnfResult {
    snf(&m.to_big())
}

/// Diagonal of the Smith normal form only (no transforms).
pub fn snf_diag(m: &BigMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let mut tr = Tracker {
        left: None,
        right: None,
    };
    diagonalize(&mut a, &mut tr)
}

/// Gcd-driven elimination picking the smallest nonzero pivot each round.
fn diagonalize(a: &mut BigMatrix, tr: &mut Tracker<'_>) -> Vec<BigInt> {
    let (rows, cols) = (a.rows(), a.cols());
    let k = rows.min(cols);
    let mut diag = Vec::with_capacity(k);
    for t in 0..k {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = smallest_entry(a, t, t..rows, t..cols) else {
            diag.extend(std::iter::repeat_n(BigInt::zero(), k - t));
            break;
        };
        a.swap_rows(t, pi);
        tr.swap_rows(t, pi);
        a.swap_cols(t, pj);
        tr.swap_cols(t, pj);
        loop {
            let p = a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = -(&a[(i, t)] / &p);
                    add_row(a, i, t, &q);
                    tr.add_row(i, t, &q);
                    dirty |= !a[(i, t)].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = -(&a[(t, j)] / &p);
                    add_col(a, j, t, &q);
                    tr.add_col(j, t, &q);
                    dirty |= !a[(t, j)].is_zero();
                }
            }
            if dirty {
                // A remainder smaller than the pivot survived; promote it.
                let best = (t + 1..rows)
                    .filter(|&i| !a[(i, t)].is_zero())
                    .map(|i| (a[(i, t)].abs(), i, t))
                    .chain(
                        (t + 1..cols)
                            .filter(|&j| !a[(t, j)].is_zero())
                            .map(|j| (a[(t, j)].abs(), t, j)),
                    )
                    .min()
                    .expect("dirty implies a nonzero remainder");
                let (_, i, j) = best;
                a.swap_rows(t, i);
                tr.swap_rows(t, i);
                a.swap_cols(t, j);
                tr.swap_cols(t, j);
                continue;
            }
            // Row and column cleared; enforce divisibility of the rest.
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[(i, j)] % &p).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    add_row(a, t, i, &one);
                    tr.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            for j in 0..cols {
                a[(t, j)] = -a[(t, j)].clone();
            }
            tr.negate_row(t);
        }
        diag.push(a[(t, t)].clone());
    }
    diag
}

fn smallest_entry(
    a: &BigMatrix,
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &a[(i, j)];
            if !x.is_zero() {
                let ax = x.abs();
                if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                    let unit = ax.is_one();
                    best = Some((ax, i, j));
                    if unit {
                        return best.map(|(_, i, j)| (i, j));
                    }
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

// ---------------------------------------------------------------------------
// Hermite normal form (column style) and saturation
// ---------------------------------------------------------------------------

/// Column-style Hermite normal form `H = M · V` (`V` unimodular).
///
/// `H` is lower echelon: the pivot rows of successive nonzero columns strictly
/// increase, pivots are positive, and the other entries of each pivot row lie
/// in `[0, pivot)`. Zero columns are moved to the end. The column lattice of
/// `H` equals that of `M`.
pub fn hnf(m: &BigMatrix) -> BigMatrix {
    let mut h = m.clone();
    let (rows, cols) = (h.rows(), h.cols());
    let mut k = 0;
    for i in 0..rows {
        if k == cols {
            break;
        }
        // Fold row i of columns k.. into column k by extended Euclid.
        for j in k + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            if h[(i, k)].is_zero() {
                h.swap_cols(k, j);
                continue;
            }
            let x = h[(i, k)].clone();
            let y = h[(i, j)].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            for r in 0..rows {
                let ck = h[(r, k)].clone();
                let cj = h[(r, j)].clone();
                h[(r, k)] = &s * &ck + &t * &cj;
                h[(r, j)] = &xg * &cj - &yg * &ck;
            }
        }
        if h[(i, k)].is_zero() {
            continue;
        }
        if h[(i, k)].is_negative() {
            for r in 0..rows {
                h[(r, k)] = -h[(r, k)].clone();
            }
        }
        let p = h[(i, k)].clone();
        for j in 0..k {
            let q = h[(i, j)].div_floor(&p);
            if !q.is_zero() {
                add_col(&mut h, j, k, &(-q));
            }
        }
        k += 1;
    }
    h
}

/// Column-style HNF of a machine-integer matrix, returned with the zero
/// columns dropped (a canonical basis of the column lattice).
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    let h = hnf(&m.to_big());
    let keep: Vec<usize> = (0..h.cols())
        .filter(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero()))
        .collect();
    h.select_columns(&keep)
        .to_i64()
        .expect("HNF entries fit in i64")
}

/// Canonical basis (column HNF) of the saturation `span_Q(M) ∩ Z^n`.
pub fn saturate(m: &IntMatrix) -> IntMatrix {
    let s = snf_i64(m);
    let r = s.diag.iter().filter(|d| !d.is_zero()).count();
    // M = left⁻¹ · D · right⁻¹, so the saturation is spanned by the first
    // r columns of left⁻¹.
    let inv = s
        .left
        .to_rat()
        .inverse()
        .expect("left transform is unimodular");
    let cols: Vec<usize> = (0..r).collect();
    let basis = inv
        .select_columns(&cols)
        .to_int()
        .expect("unimodular inverse is integral");
    hnf_basis(&basis)
}

/// Divides a vector by the gcd of its entries (the content-stripped variant).
pub fn primitive_part(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

/// True iff every column of `b` lies in the integer column lattice of `a`.
pub fn lattice_contains(a: &IntMatrix, b: &IntMatrix) -> bool {
    let h = hnf_basis(a);
    (0..b.cols()).all(|j| solve_lower_echelon(&h, &b.column(j)))
}

/// Membership of `v` in the column lattice of an HNF basis by forward
/// substitution along pivot rows.
fn solve_lower_echelon(h: &IntMatrix, v: &[i64]) -> bool {
    let mut rest: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    let mut col = 0;
    for i in 0..h.rows() {
        if col < h.cols() && h[(i, col)] != 0 {
            let p = BigInt::from(h[(i, col)]);
            if !(&rest[i] % &p).is_zero() {
                return false;
            }
            let q = &rest[i] / &p;
            for r in 0..h.rows() {
                rest[r] -= &q * BigInt::from(h[(r, col)]);
            }
            col += 1;
        } else if !rest[i].is_zero() {
            return false;
        }
    }
    rest.iter().all(Zero::is_zero)
}

// ---------------------------------------------------------------------------
// Sparse invariant factors
// ---------------------------------------------------------------------------

/// Nonzero invariant factors of a sparse integer matrix given by columns of
/// `(row, value)` entries.
///
/// Unit pivots are eliminated sparsely first (each contributes a factor 1);
/// the remaining core is diagonalized densely.
pub fn invariant_factors(rows: usize, columns: &[Vec<(usize, i64)>]) -> Vec<BigInt> {
    let mut by_row: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); rows];
    let mut by_col: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); columns.len()];
    for (j, col) in columns.iter().enumerate() {
        for &(i, x) in col {
            if x != 0 {
                *by_row[i].entry(j).or_insert_with(BigInt::zero) += x;
            }
        }
    }
    for (i, row) in by_row.iter_mut().enumerate() {
        row.retain(|_, x| !x.is_zero());
        for &j in row.keys() {
            by_col[j].insert(i);
        }
    }
    let mut units = 0usize;
    let mut live_rows: BTreeSet<usize> = (0..rows).filter(|&i| !by_row[i].is_empty()).collect();
    loop {
        // Cheapest unit pivot by Markowitz count.
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &live_rows {
            let rl = by_row[i].len();
            for (&j, x) in &by_row[i] {
                if x.abs().is_one() {
                    let cost = (rl - 1) * (by_col[j].len() - 1);
                    if best.is_none_or(|(c, _, _)| cost < c) {
                        best = Some((cost, i, j));
                    }
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((_, pi, pj)) = best else { break };
        units += 1;
        let pivot_row = std::mem::take(&mut by_row[pi]);
        let u = pivot_row[&pj].clone();
        live_rows.remove(&pi);
        for &j in pivot_row.keys() {
            by_col[j].remove(&pi);
        }
        let others: Vec<usize> = by_col[pj].iter().copied().collect();
        for r in others {
            let f = &by_row[r][&pj] * &u; // u = ±1, so u⁻¹ = u
            for (&j, x) in &pivot_row {
                let e = by_row[r].entry(j).or_insert_with(BigInt::zero);
                *e -= &f * x;
                if e.is_zero() {
                    by_row[r].remove(&j);
                    by_col[j].remove(&r);
                } else {
                    by_col[j].insert(r);
                }
            }
            if by_row[r].is_empty() {
                live_rows.remove(&r);
            }
        }
    }
    // Dense core.
    let core_rows: Vec<usize> = live_rows.iter().copied().collect();
    let core_cols: Vec<usize> = (0..columns.len())
        .filter(|&j| !by_col[j].is_empty())
        .collect();
    let mut out = vec![BigInt::one(); units];
    if !core_rows.is_empty() && !core_cols.is_empty() {
        let col_index: BTreeMap<usize, usize> =
            core_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut dense = BigMatrix::zeros(core_rows.len(), core_cols.len());
        for (k, &i) in core_rows.iter().enumerate() {
            for (j, x) in &by_row[i] {
                dense[(k, col_index[j])] = x.clone();
            }
        }
        out.extend(snf_diag(&dense).into_iter().filter(|d| !d.is_zero()));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> BigMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).to_big()
    }

    fn check(m: &BigMatrix) -> SnfResult {
        let s = snf(m);
        let prod = &(&s.left * m) * &s.right;
        assert_eq!(prod, s.diag_matrix(m.rows(), m.cols()));
        assert!(s.left.to_rat().det().abs().is_one());
        assert!(s.right.to_rat().det().abs().is_one());
        for w in s.diag.windows(2) {
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain {:?}", s.diag);
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn snf_examples() {
        assert!(check(&BigMatrix::zeros(2, 3))
            .diag
            .iter()
            .all(Zero::is_zero));
        assert_eq!(
            check(&big(&[&[2, 0], &[0, 4]])).diag,
            vec![2.into(), 4.into()]
        );
        assert_eq!(
            check(&big(&[&[2, 0], &[0, 3]])).diag,
            vec![1.into(), 6.into()]
        );
        check(&big(&[&[6, 4, 2], &[4, 10, 8], &[2, 2, 6]]));
    }

    #[test]
    fn hnf_examples() {
        let m = IntMatrix::from_rows(vec![vec![2, 1], vec![0, 1]]);
        let h = hnf_basis(&m);
        assert_eq!(h, IntMatrix::from_rows(vec![vec![1, 0], vec![1, 2]]));
        assert!(lattice_contains(&m, &h) && lattice_contains(&h, &m));
        let c = IntMatrix::from_rows(vec![vec![4], vec![6]]);
        assert_eq!(hnf_basis(&c), c);
        assert_eq!(primitive_part(&[4, 6]), vec![2, 3]);
        assert_eq!(saturate(&c), IntMatrix::from_rows(vec![vec![2], vec![3]]));
    }

    #[test]
    fn saturation_of_plane() {
        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 2], vec![2, 2]]);
        let s = saturate(&m);
        assert_eq!(
            s,
            IntMatrix::from_rows(vec![vec![1, 0], vec![0, 1], vec![1, 1]])
        );
    }

    #[test]
    fn sparse_invariant_factors_match_dense() {
        let cols = vec![
            vec![(0, 2), (1, 1)],
            vec![(1, 3), (2, 2)],
            vec![(0, 4), (2, -6)],
        ];
        let mut dense = BigMatrix::zeros(3, 3);
        for (j, c) in cols.iter().enumerate() {
            for &(i, x) in c {
                dense[(i, j)] = x.into();
            }
        }
        let mut d: Vec<BigInt> = snf_diag(&dense)
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect();
        d.sort();
        assert_eq!(invariant_factors(3, &cols), d);
    }
}
