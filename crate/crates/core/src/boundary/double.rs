//! The double complex `𝒲^{p,q} = ⊕_{F ∈ Φ_{p+2}} C^q(W_F/(Γ∩P))`.
//!
//! Column `p` runs over representatives of `Γ`-classes of flags with
//! `p + 1` proper members. The vertical differential is `(−1)^p` times the
//! simplicial coboundary; the horizontal one sends a cochain on `W_F` to
//! `Σ_i (−1)^i` of its pullbacks to `W_{F′}` for every `F′` one member
//! longer whose `i`-th deletion is `Γ`-equivalent to `F`.

use serde::Serialize;

use crate::cells::{enumerate_with, EnumerationOptions, OrbitComplex};
use crate::error::{ensure, Result};
use crate::exactla::SparseMatrix;
use crate::flags::{flag_types, subflags_with_signs, RationalFlag};
use crate::lattice::GroupSpec;
use crate::quotient::{barycentric_quotient, induced_map, GradedComplex, QuotientComplex};

/// One summand `C^*(W_F/(Γ∩P))` of a column.
#[derive(Clone, Debug)]
pub struct Summand {
    pub flag: RationalFlag,
    pub complex: QuotientComplex,
}

/// Where one horizontal block comes from: the deletion `index` of the
/// summand `target` in column `p + 1` is equivalent to `source` in column `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HorizontalLink {
    pub source: usize,
    pub target: usize,
    pub index: usize,
    pub sign: i64,
}

/// The double complex with integral entries.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub group: GroupSpec,
    pub seed: Option<u64>,
    /// The model of `W/Γ` all summands map into.
    pub whole: QuotientComplex,
    pub columns: Vec<Vec<Summand>>,
    /// `links[p]` lists the horizontal blocks from column `p` to `p + 1`.
    pub links: Vec<Vec<HorizontalLink>>,
    /// `horizontal[p][q] : 𝒲^{p,q} → 𝒲^{p+1,q}`.
    pub horizontal: Vec<Vec<SparseMatrix>>,
    /// Number of rows `q = 0..height`.
    pub height: usize,
}

/// Builds the double complex for `group` from one enumeration of `W`.
pub fn build_double_complex(group: &GroupSpec, opts: EnumerationOptions) -> Result<DoubleComplex> {
    let w = enumerate_with(group, opts)?;
    from_enumeration(&w, opts.seed)
}

/// [`build_double_complex`] from an existing enumeration.
pub fn from_enumeration(w: &OrbitComplex, seed: Option<u64>) -> Result<DoubleComplex> {
    let ctx = &w.ctx;
    let n = w.group.n;
    let whole = barycentric_quotient(w, None)?;
    let height = whole.counts().len();
    let mut columns: Vec<Vec<Summand>> = Vec::new();
    // Per column: (type, class) → summand index.
    let mut lookup: Vec<std::collections::HashMap<(Vec<usize>, usize), usize>> = Vec::new();
    for p in 0..n - 1 {
        let mut col = Vec::new();
        let mut look = std::collections::HashMap::new();
        for dims in flag_types(n, p + 1) {
            let idx = ctx.flag_index(&dims)?;
            for (class, rep) in idx.reps().iter().enumerate() {
                look.insert((dims.clone(), class), col.len());
                col.push(Summand {
                    flag: rep.clone(),
                    complex: barycentric_quotient(w, Some(rep))?,
                });
            }
        }
        columns.push(col);
        lookup.push(look);
    }
    let mut links = Vec::new();
    let mut horizontal = Vec::new();
    for p in 0..columns.len().saturating_sub(1) {
        let mut lk = Vec::new();
        let mut raw: Vec<Vec<Vec<(usize, i64)>>> = (0..height)
            .map(|q| vec![Vec::new(); column_size(&columns[p], q)])
            .collect();
        for (j, big) in columns[p + 1].iter().enumerate() {
            for (index, (sub, sign)) in subflags_with_signs(&big.flag)?.into_iter().enumerate() {
                let dims = sub.dims();
                let class = ctx.flag_index(&dims)?.class_of(&ctx.omega, &sub);
                let i = lookup[p][&(dims, class)];
                lk.push(HorizontalLink {
                    source: i,
                    target: j,
                    index,
                    sign,
                });
                let pull = induced_map(&big.complex, &columns[p][i].complex)?.dual();
                for (q, m) in pull.matrices.iter().enumerate() {
                    let (ro, co) = (offset(&columns[p + 1], j, q), offset(&columns[p], i, q));
                    for (c, col) in m.columns.iter().enumerate() {
                        raw[q][co + c].extend(col.iter().map(|&(r, x)| (ro + r, sign * x)));
                    }
                }
            }
        }
        let rows: Vec<usize> = (0..height)
            .map(|q| column_size(&columns[p + 1], q))
            .collect();
        horizontal.push(
            raw.into_iter()
                .zip(rows)
                .map(|(cols, r)| SparseMatrix::from_columns(r, cols))
                .collect(),
        );
        links.push(lk);
    }
    let dc = DoubleComplex {
        group: w.group,
        seed,
        whole,
        columns,
        links,
        horizontal,
        height,
    };
    dc.check()?;
    Ok(dc)
}

fn column_size(col: &[Summand], q: usize) -> usize {
    col.iter().map(|s| s.complex.counts()[q]).sum()
}

fn offset(col: &[Summand], j: usize, q: usize) -> usize {
    col[..j].iter().map(|s| s.complex.counts()[q]).sum()
}

/// Coboundary `δ^q : C^q → C^{q+1}` of a Δ-complex.
pub fn coboundary(c: &QuotientComplex, q: usize) -> SparseMatrix {
    match c.boundaries.get(q + 1) {
        Some(m) => m.transpose(),
        None => SparseMatrix::zeros(0, c.counts()[q]),
    }
}

impl DoubleComplex {
    /// Number of columns (`n − 1`).
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// `dim 𝒲^{p,q}`.
    pub fn size(&self, p: usize, q: usize) -> usize {
        self.columns.get(p).map_or(0, |c| column_size(c, q))
    }

    /// Offset of summand `j` inside `𝒲^{p,q}`.
    pub fn summand_offset(&self, p: usize, j: usize, q: usize) -> usize {
        offset(&self.columns[p], j, q)
    }

    /// `(−1)^p δ` on column `p`, as a map `𝒲^{p,q} → 𝒲^{p,q+1}` (with no
    /// rows when `q` is the top row).
    pub fn vertical(&self, p: usize, q: usize) -> SparseMatrix {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let rows = if q + 1 < self.height {
            self.size(p, q + 1)
        } else {
            0
        };
        let mut cols = Vec::with_capacity(self.size(p, q));
        for (j, s) in self.columns[p].iter().enumerate() {
            let d = coboundary(&s.complex, q);
            let ro = if q + 1 < self.height {
                self.summand_offset(p, j, q + 1)
            } else {
                0
            };
            for col in &d.columns {
                cols.push(col.iter().map(|&(r, x)| (ro + r, sign * x)).collect());
            }
        }
        SparseMatrix::from_columns(rows, cols)
    }

    /// Horizontal map `𝒲^{p,q} → 𝒲^{p+1,q}` (no rows in the last column).
    pub fn horizontal_map(&self, p: usize, q: usize) -> SparseMatrix {
        match self.horizontal.get(p) {
            Some(h) => h[q].clone(),
            None => SparseMatrix::zeros(0, self.size(p, q)),
        }
    }

    /// Highest total degree.
    pub fn top_degree(&self) -> usize {
        self.width() + self.height - 2
    }

    /// The blocks `(p, start)` of total degree `k`, in increasing `p`.
    pub fn layout(&self, k: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for p in 0..self.width() {
            if k >= p && k - p < self.height {
                let len = self.size(p, k - p);
                out.push((p, start, len));
                start += len;
            }
        }
        out
    }

    /// The total complex with `D = d_h + d_v`.
    pub fn total(&self) -> GradedComplex {
        let top = self.top_degree();
        let mut sizes = Vec::with_capacity(top + 1);
        let mut out = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let here = self.layout(k);
            let next = if k < top {
                self.layout(k + 1)
            } else {
                Vec::new()
            };
            let rows: usize = next.iter().map(|b| b.2).sum();
            let find = |p: usize| next.iter().find(|b| b.0 == p).map(|b| b.1);
            let mut cols: Vec<Vec<(usize, i64)>> = Vec::new();
            for &(p, _, _) in &here {
                let q = k - p;
                let v = self.vertical(p, q);
                let h = self.horizontal_map(p, q);
                for c in 0..self.size(p, q) {
                    let mut col = Vec::new();
                    if let Some(s) = find(p) {
                        col.extend(v.columns[c].iter().map(|&(r, x)| (s + r, x)));
                    }
                    if let Some(s) = find(p + 1) {
                        col.extend(h.columns[c].iter().map(|&(r, x)| (s + r, x)));
                    }
                    cols.push(col);
                }
            }
            sizes.push(here.iter().map(|b| b.2).sum());
            out.push(SparseMatrix::from_columns(rows, cols));
        }
        GradedComplex::cochains(sizes, out)
    }

    /// Vertical and horizontal differentials square to zero, squares
    /// anticommute, and `D² = 0`, all exactly.
    pub fn check(&self) -> Result<()> {
        for p in 0..self.width() {
            for q in 0..self.height {
                if q + 1 < self.height {
                    ensure!(
                        self.vertical(p, q + 1)
                            .compose(&self.vertical(p, q))
                            .is_zero(),
                        "vertical² ≠ 0 at ({p},{q})"
                    );
                }
                if p + 1 < self.width() {
                    let hh = self
                        .horizontal_map(p + 1, q)
                        .compose(&self.horizontal_map(p, q));
                    ensure!(hh.is_zero(), "horizontal² ≠ 0 at ({p},{q})");
                    if q + 1 < self.height {
                        let a = self.horizontal_map(p, q + 1).compose(&self.vertical(p, q));
                        let b = self.vertical(p + 1, q).compose(&self.horizontal_map(p, q));
                        let sum = SparseMatrix::from_columns(
                            a.rows,
                            a.columns
                                .iter()
                                .zip(&b.columns)
                                .map(|(x, y)| x.iter().chain(y).copied().collect())
                                .collect(),
                        );
                        ensure!(sum.is_zero(), "squares do not anticommute at ({p},{q})");
                    }
                }
            }
        }
        self.total().check()
    }

    /// Per-summand simplex counts, for reports.
    pub fn summaries(&self) -> Vec<Vec<SummandSummary>> {
        self.columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|s| SummandSummary {
                        flag: s.flag.clone(),
                        simplices: s.complex.counts(),
                    })
                    .collect()
            })
            .collect()
    }
}

/// A column summand as reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummandSummary {
    pub flag: RationalFlag,
    pub simplices: Vec<usize>,
}
