//! The spectral sequence of the column filtration `F^p = ⊕_{p′ ≥ p} 𝒲^{p′,*}`.
//!
//! With `Z_r^p = {x ∈ F^p : Dx ∈ F^{p+r}}`, the page is
//! `E_r^p = Z_r^p / (Z_{r−1}^{p+1} + D Z_{r−1}^{p−r+1})` and `d_r` is
//! induced by `D`. Everything is computed inside the total complex over a
//! field, so pages, differentials and the abutment come from one piece of
//! linear algebra.

use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::exactla::field::{axpy, kernel_basis, SparseVec};
use crate::exactla::Echelon;
use crate::quotient::homology::{with_field, Coefficients, ReportField};
use crate::quotient::{GradedComplex, HomologyResult};

use super::double::DoubleComplex;

/// One differential `d_r : E_r^{p,q} → E_r^{p+r, q−r+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageDifferential {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
}

/// `E_r` with `entries[p][q] = dim E_r^{p,q}` and its nonzero-domain
/// differentials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub r: usize,
    pub entries: Vec<Vec<usize>>,
    pub differentials: Vec<PageDifferential>,
}

/// All pages through stabilization, `E_∞`, and the cohomology of the total
/// complex it converges to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralSequence {
    pub coefficients: Coefficients,
    pub pages: Vec<SpectralPage>,
    pub infinity: Vec<Vec<usize>>,
    pub abutment: Vec<usize>,
}

impl SpectralPage {
    /// `Σ (−1)^{p+q} dim E_r^{p,q}`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0;
        for (p, col) in self.entries.iter().enumerate() {
            for (q, &d) in col.iter().enumerate() {
                chi += if (p + q) % 2 == 0 {
                    d as i64
                } else {
                    -(d as i64)
                };
            }
        }
        chi
    }
}

struct Filtration<'a, F: ReportField> {
    f: F,
    dc: &'a DoubleComplex,
    total: GradedComplex,
    columns: Vec<Vec<SparseVec<F::Elem>>>,
}

/// `E_r^{p,q}` as representatives modulo a tagged echelon.
struct Entry<F: ReportField> {
    reps: Vec<SparseVec<F::Elem>>,
    echelon: Echelon<F>,
}

impl<'a, F: ReportField> Filtration<'a, F> {
    fn new(f: F, dc: &'a DoubleComplex) -> Self {
        let total = dc.total();
        let columns = total.out.iter().map(|m| m.field_columns(&f)).collect();
        Filtration {
            f,
            dc,
            total,
            columns,
        }
    }

    fn top(&self) -> usize {
        self.total.sizes.len() - 1
    }

    /// Start of column `p` within degree `k` (columns beyond the last start
    /// at the end).
    fn column_start(&self, k: usize, p: i64) -> usize {
        if p <= 0 {
            return 0;
        }
        let layout = self.dc.layout(k);
        layout
            .iter()
            .find(|b| b.0 as i64 >= p)
            .map_or(self.total.sizes[k], |b| b.1)
    }

    /// `Z_r^p` in total degree `k`, as global coordinate vectors.
    fn z(&self, r: i64, p: i64, k: usize) -> Vec<SparseVec<F::Elem>> {
        let f = &self.f;
        let lo = self.column_start(k, p);
        let size = self.total.sizes[k];
        let cut = if k < self.top() {
            self.column_start(k + 1, p + r)
        } else {
            0
        };
        let images: Vec<SparseVec<F::Elem>> = (lo..size)
            .map(|c| {
                self.columns[k][c]
                    .iter()
                    .filter(|(i, _)| *i < cut)
                    .cloned()
                    .collect()
            })
            .collect();
        kernel_basis(f, &images)
            .into_iter()
            .map(|v| v.into_iter().map(|(i, x)| (i + lo, x)).collect())
            .collect()
    }

    fn apply_d(&self, k: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let f = &self.f;
        let mut acc: SparseVec<F::Elem> = Vec::new();
        for (j, a) in v {
            acc = axpy(f, &acc, a, &self.columns[k][*j]);
        }
        acc
    }

    /// `E_r^{p,q}` (`q = k − p`).
    fn entry(&self, r: i64, p: i64, k: usize) -> Entry<F> {
        let mut echelon = Echelon::new(self.f.clone());
        for v in self.z(r - 1, p + 1, k) {
            echelon.insert(&v, None);
        }
        if k > 0 {
            for v in self.z(r - 1, p - r + 1, k - 1) {
                let img = self.apply_d(k - 1, &v);
                echelon.insert(&img, None);
            }
        }
        let mut reps = Vec::new();
        for v in self.z(r, p, k) {
            if echelon.insert(&v, Some(reps.len())) {
                reps.push(v);
            }
        }
        Entry { reps, echelon }
    }
}

fn page<F: ReportField>(
    flt: &Filtration<'_, F>,
    r: usize,
) -> Result<(SpectralPage, Vec<Vec<Vec<SparseVec<F::Elem>>>>)> {
    let (w, h) = (flt.dc.width(), flt.dc.height);
    let entries: Vec<Vec<Entry<F>>> = (0..w)
        .map(|p| {
            (0..h)
                .map(|q| flt.entry(r as i64, p as i64, p + q))
                .collect()
        })
        .collect();
    let dims: Vec<Vec<usize>> = entries
        .iter()
        .map(|c| c.iter().map(|e| e.reps.len()).collect())
        .collect();
    let f = &flt.f;
    let mut differentials = Vec::new();
    // coords[p][q] = columns of d_r from (p,q), as field vectors.
    let mut coords: Vec<Vec<Vec<SparseVec<F::Elem>>>> = vec![vec![Vec::new(); h]; w];
    for p in 0..w {
        for q in 0..h {
            let (tp, tq) = (p + r, (q + 1).checked_sub(r));
            let (Some(tq), true) = (tq, p + r < w) else {
                continue;
            };
            if tq >= h || dims[p][q] == 0 {
                continue;
            }
            let target = &entries[tp][tq];
            let mut cols = Vec::with_capacity(dims[p][q]);
            for x in &entries[p][q].reps {
                let y = flt.apply_d(p + q, x);
                let c = target.echelon.express(&y).ok_or_else(|| {
                    Error::Invariant(format!("d_{r} leaves the page at ({p},{q})"))
                })?;
                cols.push(c);
            }
            let rank = crate::exactla::field::rank_of(f, &cols);
            let matrix = (0..dims[tp][tq])
                .map(|i| {
                    cols.iter()
                        .map(|c| {
                            c.iter()
                                .find(|(j, _)| *j == i)
                                .map_or_else(|| f.show(&f.zero()), |(_, x)| f.show(x))
                        })
                        .collect()
                })
                .collect();
            differentials.push(PageDifferential {
                from: (p, q),
                to: (tp, tq),
                matrix,
                rank,
            });
            coords[p][q] = cols;
        }
    }
    // d_r ∘ d_r = 0.
    for p in 0..w {
        for q in 0..h {
            if coords[p][q].is_empty() || p + r >= w || q + 1 < r {
                continue;
            }
            let (mp, mq) = (p + r, q + 1 - r);
            let second = &coords[mp][mq];
            for c in &coords[p][q] {
                let mut acc: SparseVec<F::Elem> = Vec::new();
                for (j, a) in c {
                    if let Some(col) = second.get(*j) {
                        acc = axpy(f, &acc, a, col);
                    }
                }
                ensure!(acc.is_empty(), "d_{r} ∘ d_{r} ≠ 0 at ({p},{q})");
            }
        }
    }
    Ok((
        SpectralPage {
            r,
            entries: dims,
            differentials,
        },
        coords,
    ))
}

fn run<F: ReportField>(
    f: F,
    dc: &DoubleComplex,
    coeff: Coefficients,
    only_first: bool,
) -> Result<SpectralSequence> {
    let flt = Filtration::new(f, dc);
    let w = dc.width();
    let last = if only_first { 1 } else { w.max(1) + 1 };
    let mut pages: Vec<SpectralPage> = Vec::new();
    for r in 1..=last {
        let (pg, _) = page(&flt, r)?;
        if let Some(prev) = pages.last() {
            // E_{r} is the cohomology of (E_{r−1}, d_{r−1}).
            let rank_at = |p: usize, q: usize, incoming: bool| -> usize {
                prev.differentials
                    .iter()
                    .filter(|d| {
                        if incoming {
                            d.to == (p, q)
                        } else {
                            d.from == (p, q)
                        }
                    })
                    .map(|d| d.rank)
                    .sum()
            };
            for p in 0..w {
                for q in 0..dc.height {
                    let expect = prev.entries[p][q] - rank_at(p, q, false) - rank_at(p, q, true);
                    ensure!(
                        pg.entries[p][q] == expect,
                        "E_{r} is not the cohomology of E_{} at ({p},{q})",
                        r - 1
                    );
                }
            }
        }
        pages.push(pg);
    }
    let abutment = flt.total.dims(coeff)?;
    let infinity = pages.last().expect("at least one page").entries.clone();
    if !only_first {
        // Stabilization: the last page repeats the one before.
        let n = pages.len();
        if n >= 2 {
            ensure!(
                pages[n - 1].entries == pages[n - 2].entries,
                "spectral sequence has not stabilized"
            );
            pages.pop();
        }
        for (k, &dim) in abutment.iter().enumerate() {
            let graded: usize = (0..w)
                .filter(|&p| k >= p && k - p < dc.height)
                .map(|p| infinity[p][k - p])
                .sum();
            ensure!(
                graded == dim,
                "E_∞ does not sum to the total cohomology in degree {k}"
            );
        }
    }
    Ok(SpectralSequence {
        coefficients: coeff,
        pages,
        infinity,
        abutment,
    })
}

/// The `E_1` page with its differential `d_1`.
pub fn e1_page(dc: &DoubleComplex, coeff: Coefficients) -> Result<SpectralPage> {
    let ss = with_field!(coeff, |f| run(f, dc, coeff, true)?);
    Ok(ss.pages.into_iter().next().expect("one page"))
}

/// All pages up to `E_∞` with consistency checks: `d_r² = 0`,
/// `E_{r+1} = H(E_r, d_r)`, and `Σ_p dim E_∞^{p,k−p} = dim H^k(total)`.
pub fn spectral_sequence(dc: &DoubleComplex, coeff: Coefficients) -> Result<SpectralSequence> {
    with_field!(coeff, |f| run(f, dc, coeff, false))
}

/// Cohomology of the total complex (Z coefficients give torsion too).
pub fn total_cohomology(dc: &DoubleComplex, coeff: Coefficients) -> Result<HomologyResult> {
    dc.total().groups(coeff)
}

/// `Σ (−1)^k dim` of the total complex's cochain groups.
pub fn total_euler_characteristic(dc: &DoubleComplex) -> i64 {
    dc.total().euler_characteristic()
}
