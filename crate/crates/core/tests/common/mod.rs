//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the library's algorithms: minimal vectors come
//! from a plain box search, modular-curve invariants from the classical
//! genus formula.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use wellround::exactla::{IntMatrix, RatMatrix};
use wellround::lattice::GramForm;

pub type Q = BigRational;

pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// Rational matrix entries as a plain nested vector.
pub fn entries(a: &GramForm) -> Vec<Vec<Q>> {
    let m = a.matrix();
    (0..a.n()).map(|i| (0..a.n()).map(|j| m[(i, j)].clone()).collect()).collect()
}

/// Diagonal of the inverse by Gauss–Jordan elimination.
pub fn inverse_diagonal(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).expect("nonsingular");
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    (0..n).map(|i| m[i][n + i].clone()).collect()
}

pub fn value(a: &[Vec<Q>], v: &[i64]) -> Q {
    let mut s = Q::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            s += x * Q::from_integer(BigInt::from(v[i] * v[j]));
        }
    }
    s
}

/// Arithmetic minimum and minimal vectors (one per ± pair, first nonzero
/// entry positive) by exhaustive search in the box `|v_i|² <= m (A⁻¹)_ii`,
/// which contains every vector of value `<= m` by Cauchy–Schwarz.
pub fn brute_minimum(a: &GramForm) -> (Q, Vec<Vec<i64>>) {
    let e = entries(a);
    let n = e.len();
    let m = (0..n).map(|i| e[i][i].clone()).min().unwrap();
    let inv = inverse_diagonal(&e);
    let bounds: Vec<i64> = inv
        .iter()
        .map(|d| {
            let r = &m * d;
            let mut k = 0i64;
            while Q::from_integer(BigInt::from((k + 1) * (k + 1))) <= r {
                k += 1;
            }
            k
        })
        .collect();
    let mut best: Option<Q> = None;
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut v: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let first = v.iter().copied().find(|&x| x != 0);
        if first.is_some_and(|x| x > 0) {
            let val = value(&e, &v);
            match &best {
                Some(b) if val > *b => {}
                Some(b) if val == *b => found.push(v.clone()),
                _ => {
                    best = Some(val);
                    found = vec![v.clone()];
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                found.sort();
                return (best.unwrap(), found);
            }
            if v[i] < bounds[i] {
                v[i] += 1;
                break;
            }
            v[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Rank of the vectors over Q.
pub fn rank(vs: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<Q>> =
        vs.iter().map(|v| v.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()).collect();
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// A random positive-definite form `(BᵀB + D) / k` with small integer `B`,
/// positive diagonal `D` and denominator `k`; entries and condition number
/// stay bounded.
pub fn random_form(n: usize, rng: &mut StdRng) -> GramForm {
    let b: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let d: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let k = rng.gen_range(1..=3);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: i64 = (0..n).map(|r| b[r][i] * b[r][j]).sum::<i64>() + if i == j { d[i] } else { 0 };
                    q(s, k)
                })
                .collect()
        })
        .collect();
    GramForm::from_rationals(rows).unwrap()
}

/// A random element of `GL_n(Z)` as a product of elementary matrices and
/// sign changes.
pub fn random_unimodular(n: usize, rng: &mut StdRng) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = rng.gen_range(-2..=2);
        let e = IntMatrix::elementary(n, i, j, c);
        u = &u * &e;
    }
    if rng.gen_bool(0.5) {
        let mut d = IntMatrix::identity(n);
        d[(0, 0)] = -1;
        u = &u * &d;
    }
    u
}

/// A random rational in `(0, 1]` with small denominator.
pub fn unit_rational(rng: &mut StdRng) -> Q {
    let den = rng.gen_range(1..=12);
    q(rng.gen_range(1..=den), den)
}

pub fn is_identity_like(a: &RatMatrix) -> bool {
    (0..a.rows()).all(|i| (0..a.cols()).all(|j| a[(i, j)] == if i == j { Q::one() } else { Q::zero() }))
}

// ---------------------------------------------------------------------------
// Modular curves: classical formulas.
// ---------------------------------------------------------------------------

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of cusps of `Γ_0(N)`: `Σ_{d | N} φ(gcd(d, N/d))`.
pub fn cusps_gamma0(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).map(|d| euler_phi(gcd(d, n / d))).sum()
}

/// Index of `Γ_0(N)` in `SL_2(Z)`: `N ∏_{p | N} (1 + 1/p)`.
pub fn index_gamma0(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, &p| acc / p * (p + 1))
}

fn legendre_like(n: u64, residue: fn(u64) -> i64) -> u64 {
    prime_factors(n).iter().map(|&p| (1 + residue(p)) as u64).product()
}

/// Genus and cusp count of `X_0(N)`.
pub fn genus_gamma0(n: u64) -> (u64, u64) {
    let mu = index_gamma0(n) as i64;
    // (−1 / p) and (−3 / p).
    let nu2 = if n % 4 == 0 {
        0
    } else {
        legendre_like(n, |p| match p {
            2 => 0,
            _ if p % 4 == 1 => 1,
            _ => -1,
        }) as i64
    };
    let nu3 = if n % 9 == 0 {
        0
    } else {
        legendre_like(n, |p| match p {
            3 => 0,
            _ if p % 3 == 1 => 1,
            _ => -1,
        }) as i64
    };
    let c = cusps_gamma0(n) as i64;
    // 12 g = 12 + μ − 3 ν₂ − 4 ν₃ − 6 c.
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    assert_eq!(twelve_g % 12, 0);
    ((twelve_g / 12) as u64, c as u64)
}

/// Genus and cusp count of `X(N)`, `N >= 3`.
pub fn genus_principal(n: u64) -> (u64, u64) {
    let mu = prime_factors(n).iter().fold(n * n * n, |acc, &p| acc / (p * p) * (p * p - 1)) / 2;
    let c = mu / n;
    let twelve_g = 12 + mu as i64 - 6 * c as i64;
    ((twelve_g / 12) as u64, c)
}

/// Betti numbers of the open modular curve: `(1, 2g + c − 1)`.
pub fn open_curve_betti(genus: u64, cusps: u64) -> Vec<usize> {
    vec![1, (2 * genus + cusps - 1) as usize]
}

// ---------------------------------------------------------------------------
// Flags.
// ---------------------------------------------------------------------------

/// A random flag: the spans of leading columns of a random unimodular
/// matrix, with member dimensions drawn from `1..n`.
pub fn random_flag(n: usize, rng: &mut StdRng) -> wellround::flags::RationalFlag {
    let u = random_unimodular(n, rng);
    let mut dims: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.5)).collect();
    if dims.is_empty() {
        dims.push(rng.gen_range(1..n));
    }
    let cols = u.to_columns();
    let spans: Vec<Vec<Vec<i64>>> = dims.iter().map(|&d| cols[..d].to_vec()).collect();
    wellround::flags::RationalFlag::from_spans(n, &spans).unwrap()
}

/// Whether `v` lies in the column span of `basis`.
pub fn in_span(basis: &IntMatrix, v: &[i64]) -> bool {
    let mut cols = basis.to_columns();
    let r = rank(&cols);
    cols.push(v.to_vec());
    rank(&cols) == r
}

/// Whether the vectors meeting each member of the flag span that member.
pub fn respects(vectors: &[Vec<i64>], f: &wellround::flags::RationalFlag) -> bool {
    f.members().iter().all(|m| {
        let inside: Vec<Vec<i64>> = vectors.iter().filter(|v| in_span(m, v)).cloned().collect();
        rank(&inside) == m.cols()
    })
}

// ---------------------------------------------------------------------------
// Complexes: dense linear algebra over Q, independent of the library's
// sparse elimination.
// ---------------------------------------------------------------------------

/// Dense columns of a sparse integer matrix.
pub fn dense_columns(m: &wellround::exactla::field::SparseMatrix) -> Vec<Vec<i64>> {
    m.columns
        .iter()
        .map(|col| {
            let mut v = vec![0; m.rows];
            for &(r, x) in col {
                v[r] = x;
            }
            v
        })
        .collect()
}

/// Whether `a · b` vanishes, computed densely in `i128`.
pub fn product_vanishes(a: &wellround::exactla::field::SparseMatrix, b: &wellround::exactla::field::SparseMatrix) -> bool {
    assert_eq!(a.cols, b.rows);
    let ac = dense_columns(a);
    dense_columns(b).iter().all(|bc| {
        (0..a.rows).all(|i| bc.iter().enumerate().map(|(k, &x)| ac[k][i] as i128 * x as i128).sum::<i128>() == 0)
    })
}

/// Rank over Q of a sparse integer matrix.
pub fn matrix_rank(m: &wellround::exactla::field::SparseMatrix) -> usize {
    rank(&dense_columns(m))
}

/// Betti numbers over Q of a graded complex: `dim C_k − rank out_k − rank in_k`.
pub fn betti_over_q(g: &wellround::quotient::GradedComplex) -> Vec<usize> {
    (0..g.sizes.len())
        .map(|k| {
            let out = g.out.get(k).map_or(0, matrix_rank);
            let inc = g.incoming(k).map_or(0, matrix_rank);
            g.sizes[k] - out - inc
        })
        .collect()
}

/// A basis of the kernel over Q of the matrix with the given columns,
/// scaled to integer vectors.
pub fn kernel_basis(columns: &[Vec<i64>], rows: usize) -> Vec<Vec<Q>> {
    let cols = columns.len();
    let mut m: Vec<Vec<Q>> = (0..rows)
        .map(|i| columns.iter().map(|c| Q::from_integer(BigInt::from(c[i]))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); cols];
            v[free] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

/// Rank over Q of rational column vectors.
pub fn rational_rank(vs: &[Vec<Q>]) -> usize {
    let mut rows: Vec<Vec<Q>> = vs.to_vec();
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Rank over Q of the map `H_k(source) → H_k(target)` induced by the chain
/// matrix `f`: `rank [f Z_k | B_k] − rank B_k`.
pub fn induced_homology_rank(
    f: &wellround::exactla::field::SparseMatrix,
    source_out: &wellround::exactla::field::SparseMatrix,
    target_in: Option<&wellround::exactla::field::SparseMatrix>,
) -> usize {
    let cycles = kernel_basis(&dense_columns(source_out), source_out.rows);
    let fc = dense_columns(f);
    let mut image: Vec<Vec<Q>> = cycles
        .iter()
        .map(|z| {
            (0..f.rows)
                .map(|i| z.iter().enumerate().map(|(k, x)| x * Q::from_integer(BigInt::from(fc[k][i]))).sum())
                .collect()
        })
        .collect();
    let boundaries: Vec<Vec<Q>> = target_in
        .map(|b| {
            dense_columns(b).iter().map(|c| c.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()).collect()
        })
        .unwrap_or_default();
    let base = rational_rank(&boundaries);
    image.extend(boundaries);
    rational_rank(&image) - base
}
