//! Single cells of the well-rounded retract: feasibility of a configuration,
//! certified witnesses, the vertices of a closed cell, and face/coface moves.
//!
//! The closed cell with configuration `S` is the polytope
//! `{A : A[v] = 1 for v ∈ S, A[w] >= 1 for all w}` inside the affine space of
//! symmetric matrices; every rational point of it is positive definite. The
//! cell of a point is read off from its minimal vectors, and two closed cells
//! meet in a face exactly when one configuration contains the other.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::exactla::ldlt::ldlt_or_witness;
use crate::exactla::rational::serde_rational;
use crate::exactla::{int, saturate, IntMatrix, LinearProgram, LpStatus, RatMatrix, Rational};
use crate::flags::RationalFlag;
use crate::lattice::config::{sym_dim, sym_from_coords, value_functional};
use crate::lattice::{minimal_vectors, values_below, vectors_below_raw, GramForm, VectorConfig};

/// Radius up to which a cell witness is certified by exact enumeration.
pub const CERT_BOUND: i64 = 2;

/// An open cell of `W`, given by its minimal-vector configuration and a
/// certified interior point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub config: VectorConfig,
    pub dim: usize,
    /// Centroid of the vertices of the closed cell; its minimal vectors are
    /// exactly `config` and its arithmetic minimum is 1.
    pub witness: GramForm,
    /// Every vector outside `±config` with value `<= certBound` at the
    /// witness has value `> 1`.
    #[serde(rename = "certBound", with = "serde_rational")]
    pub cert_bound: Rational,
}

/// A cell whose closure contains a given point, seen from that point.
#[derive(Clone, Debug)]
pub struct LocalCell {
    pub config: VectorConfig,
    /// A direction into the open cell; `None` for the cell of the point
    /// itself.
    pub direction: Option<RatMatrix>,
}

/// Vertices and faces of one closed cell.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub config: VectorConfig,
    /// Vertex forms with their configurations.
    pub vertices: Vec<(GramForm, VectorConfig)>,
    /// Every face configuration (the cell itself included) with the indices
    /// of the vertices in its closure.
    pub faces: BTreeMap<VectorConfig, Vec<usize>>,
}

/// Minimal vectors of a point of `W` (arithmetic minimum 1 is checked).
pub fn tight_set(a: &GramForm) -> Result<VectorConfig> {
    let m = minimal_vectors(a)?;
    ensure!(
        m.min_sq.is_one(),
        "point of W must have arithmetic minimum 1, found {}",
        m.min_sq
    );
    Ok(m.vectors)
}

fn functional_rows(vs: &[Vec<i64>]) -> RatMatrix {
    RatMatrix::from_rows(vs.iter().map(|v| value_functional(v)).collect())
}

/// Symmetric directions `D` with `D[v] = 0` for every `v` in the set.
fn direction_space(n: usize, vs: &[Vec<i64>]) -> Vec<RatMatrix> {
    if vs.is_empty() {
        return (0..sym_dim(n))
            .map(|k| {
                sym_from_coords(
                    n,
                    &(0..sym_dim(n))
                        .map(|i| int((i == k) as i64))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
    }
    functional_rows(vs)
        .nullspace()
        .into_iter()
        .map(|x| sym_from_coords(n, &x))
        .collect()
}

fn to_i64_vec(w: &[num_bigint::BigInt]) -> Result<Vec<i64>> {
    w.iter()
        .map(|x| {
            i64::try_from(x).map_err(|_| Error::Invariant("cut vector does not fit in i64".into()))
        })
        .collect()
}

/// Moves from the point `a` of `W` along the direction `d` (which must not
/// decrease any minimal vector of `a`) to the first point where another
/// vector becomes minimal.
pub fn shoot(a: &GramForm, d: &RatMatrix) -> Result<GramForm> {
    let current = tight_set(a)?;
    ensure!(
        current
            .vectors()
            .iter()
            .all(|v| !d.quad_int(v).is_negative()),
        "direction decreases a minimal vector"
    );
    let mut bound = int(2);
    let mut candidates: Vec<Vec<i64>>;
    loop {
        candidates = vectors_below_raw(a, &bound)?;
        if candidates.iter().any(|w| d.quad_int(w).is_negative()) {
            break;
        }
        bound *= int(2);
        ensure!(
            bound < int(1 << 20),
            "cell is unbounded along the direction"
        );
    }
    let mut seen: HashSet<Vec<i64>> = candidates.iter().cloned().collect();
    loop {
        let t = candidates
            .iter()
            .filter_map(|w| {
                let dw = d.quad_int(w);
                dw.is_negative()
                    .then(|| (a.value(w) - Rational::one()) / -dw)
            })
            .min()
            .expect("some candidate decreases");
        ensure!(
            t.is_positive(),
            "direction leaves the closed cell immediately"
        );
        let e = a.matrix() + &d.map(|x| x * &t);
        match ldlt_or_witness(&e) {
            Err((_, w)) => {
                let w = to_i64_vec(&w)?;
                ensure!(seen.insert(w.clone()), "positivity cut repeated");
                candidates.push(w);
                continue;
            }
            Ok(_) => {}
        }
        let ef = GramForm::new_unchecked(e);
        let low: Vec<Vec<i64>> = values_below(&ef, &Rational::one())?
            .into_iter()
            .filter(|(_, v)| *v < Rational::one())
            .map(|(w, _)| w)
            .collect();
        if low.is_empty() {
            return Ok(ef);
        }
        for w in low {
            if seen.insert(w.clone()) {
                candidates.push(w);
            }
        }
    }
}

/// Cells whose closure contains the point `a` (with minimal vectors `sv`),
/// restricted to configurations `T` with `lower ⊆ T ⊆ upper ⊆ sv`.
pub fn local_cells(
    a: &GramForm,
    sv: &VectorConfig,
    lower: &VectorConfig,
    upper: &VectorConfig,
) -> Vec<LocalCell> {
    let n = a.n();
    let free: Vec<&Vec<i64>> = upper
        .vectors()
        .iter()
        .filter(|v| !lower.contains(v))
        .collect();
    assert!(
        free.len() < 32,
        "too many free vectors in a local cell search"
    );
    let mut out = Vec::new();
    for mask in 0u64..(1 << free.len()) {
        let mut t: Vec<Vec<i64>> = lower.vectors().to_vec();
        t.extend(
            free.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| (*v).clone()),
        );
        let tc = VectorConfig::from_primitive(n, t);
        if !tc.spans() {
            continue;
        }
        let rest: Vec<&Vec<i64>> = sv.vectors().iter().filter(|v| !tc.contains(v)).collect();
        if rest.is_empty() {
            out.push(LocalCell {
                config: tc,
                direction: None,
            });
            continue;
        }
        // A vector whose value functional depends on those of T is forced to
        // stay minimal, so T cannot be the exact configuration.
        let base = functional_rows(tc.vectors());
        let r = base.rank();
        if rest.iter().any(|w| {
            let mut rows = base.to_rows();
            rows.push(value_functional(w));
            RatMatrix::from_rows(rows).rank() == r
        }) {
            continue;
        }
        let mut lp = LinearProgram::new(sym_dim(n));
        for v in tc.vectors() {
            lp.eq(value_functional(v), Rational::zero());
        }
        for w in &rest {
            lp.ge(value_functional(w), Rational::one());
        }
        let res = lp.solve();
        if res.status == LpStatus::Optimal {
            let x = res.point.expect("optimal point");
            out.push(LocalCell {
                config: tc,
                direction: Some(sym_from_coords(n, &x)),
            });
        }
    }
    out
}

/// Walks from a point of a closed cell to a vertex of that cell.
pub fn vertex_of(a: &GramForm) -> Result<GramForm> {
    let mut cur = a.clone();
    loop {
        let s = tight_set(&cur)?;
        let dirs = direction_space(cur.n(), s.vectors());
        let Some(d) = dirs.into_iter().next() else {
            return Ok(cur);
        };
        cur = shoot(&cur, &d)?;
    }
}

/// Vertices and faces of the closed cell containing `point` in its interior.
pub fn geometry(point: &GramForm) -> Result<CellGeometry> {
    let config = tight_set(point)?;
    let start = vertex_of(point)?;
    let mut vertices: Vec<(GramForm, VectorConfig)> = Vec::new();
    let mut seen: HashSet<GramForm> = HashSet::new();
    let mut queue = vec![start];
    while let Some(v) = queue.pop() {
        if !seen.insert(v.clone()) {
            continue;
        }
        let sv = tight_set(&v)?;
        for lc in local_cells(&v, &sv, &config, &sv) {
            if lc.config.cell_dim() == 1 {
                let d = lc.direction.as_ref().expect("edge has a direction");
                let e = shoot(&v, d)?;
                if !seen.contains(&e) {
                    queue.push(e);
                }
            }
        }
        vertices.push((v, sv));
    }
    vertices.sort();
    let mut faces: BTreeMap<VectorConfig, Vec<usize>> = BTreeMap::new();
    for (v, sv) in &vertices {
        for lc in local_cells(v, sv, &config, sv) {
            faces.entry(lc.config).or_default();
        }
    }
    for (face, members) in faces.iter_mut() {
        *members = vertices
            .iter()
            .enumerate()
            .filter(|(_, (_, sv))| face.is_subset_of(sv))
            .map(|(i, _)| i)
            .collect();
    }
    ensure!(
        faces.contains_key(&config),
        "cell is missing from its own face list"
    );
    Ok(CellGeometry {
        config,
        vertices,
        faces,
    })
}

impl CellGeometry {
    /// The cell of one face (or of the whole cell), with its centroid witness.
    pub fn cell(&self, face: &VectorConfig) -> Result<Cell> {
        let members = self
            .faces
            .get(face)
            .ok_or_else(|| Error::Invariant("unknown face".into()))?;
        let forms: Vec<&GramForm> = members.iter().map(|&i| &self.vertices[i].0).collect();
        cell_with_witness(face.clone(), centroid(&forms))
    }

    /// Proper faces.
    pub fn proper_faces(&self) -> impl Iterator<Item = &VectorConfig> {
        self.faces.keys().filter(move |f| **f != self.config)
    }
}

fn centroid(forms: &[&GramForm]) -> GramForm {
    let n = forms[0].n();
    let mut sum = RatMatrix::zeros(n, n);
    for f in forms {
        sum = &sum + f.matrix();
    }
    let k = int(forms.len() as i64);
    GramForm::new_unchecked(sum.map(|x| x / &k))
}

/// Builds a [`Cell`] after certifying that `witness` has exactly `config` as
/// minimal vectors.
pub fn cell_with_witness(config: VectorConfig, witness: GramForm) -> Result<Cell> {
    let tight = tight_set(&witness)?;
    ensure!(
        tight == config,
        "witness does not realize the configuration"
    );
    let cert_bound = int(CERT_BOUND);
    let extra = values_below(&witness, &cert_bound)?;
    ensure!(
        extra
            .iter()
            .all(|(w, v)| config.contains(w) || *v > Rational::one()),
        "certification failed"
    );
    let dim = config.cell_dim();
    Ok(Cell {
        config,
        dim,
        witness,
        cert_bound,
    })
}

/// The cell of `W` at a point: its configuration and vertex-centroid witness.
pub fn cell_at(point: &GramForm) -> Result<Cell> {
    let g = geometry(point)?;
    g.cell(&g.config)
}

/// The cell with the given minimal-vector configuration, if it exists.
///
/// Maximizes a common slack `s <= 1` in `A[v] = 1 (v ∈ S)`,
/// `A[w] >= 1 + s (w ∉ S)` over a finite candidate set of `w`, growing the
/// set by positivity cuts and by exact enumeration at the optimum until no
/// vector outside `S` reaches value 1.
pub fn cell_from_config(s: &VectorConfig) -> Result<Cell> {
    let n = s.n();
    if !s.spans() {
        return Err(Error::NotSpanning);
    }
    let k = sym_dim(n);
    let mut candidates: Vec<Vec<i64>> = small_vectors(n)
        .into_iter()
        .filter(|w| !s.contains(w))
        .collect();
    let mut seen: HashSet<Vec<i64>> = candidates.iter().cloned().collect();
    loop {
        let mut lp = LinearProgram::new(k + 1);
        for v in s.vectors() {
            let mut row = value_functional(v);
            row.push(Rational::zero());
            lp.eq(row, Rational::one());
        }
        for w in &candidates {
            let mut row = value_functional(w);
            row.push(-Rational::one());
            lp.ge(row, Rational::one());
        }
        let mut cap = vec![Rational::zero(); k + 1];
        cap[k] = Rational::one();
        lp.le(cap.clone(), Rational::one());
        let res = lp.maximize(cap).solve();
        if res.status != LpStatus::Optimal {
            return Err(Error::Infeasible);
        }
        let x = res.point.expect("optimal point");
        if !x[k].is_positive() {
            return Err(Error::Infeasible);
        }
        let a = sym_from_coords(n, &x[..k]);
        if let Err((_, w)) = ldlt_or_witness(&a) {
            let w = to_i64_vec(&w)?;
            ensure!(seen.insert(w.clone()), "positivity cut repeated");
            candidates.push(w);
            continue;
        }
        let af = GramForm::new_unchecked(a);
        let low: Vec<Vec<i64>> = values_below(&af, &Rational::one())?
            .into_iter()
            .map(|(w, _)| w)
            .filter(|w| !s.contains(w) && !seen.contains(w))
            .collect();
        if low.is_empty() {
            return cell_at(&af);
        }
        for w in low {
            seen.insert(w.clone());
            candidates.push(w);
        }
    }
}

/// Primitive vectors with entries in `{−1, 0, 1}`, one per sign class.
fn small_vectors(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                d
            })
            .collect();
        if v.iter().any(|&x| x != 0) && crate::lattice::config::sign_canonical(&v) == v {
            out.push(v);
        }
    }
    out
}

/// Proper faces of a cell (cells whose configuration strictly contains it).
pub fn cell_faces(c: &Cell) -> Result<Vec<Cell>> {
    let g = geometry(&c.witness)?;
    g.proper_faces().map(|f| g.cell(f)).collect()
}

/// Cells of one dimension higher having `c` as a face.
pub fn cell_cofaces(c: &Cell) -> Result<Vec<Cell>> {
    let v = vertex_of(&c.witness)?;
    let sv = tight_set(&v)?;
    let empty = VectorConfig::from_primitive(c.config.n(), Vec::new());
    let mut out = Vec::new();
    for lc in local_cells(&v, &sv, &empty, &c.config) {
        if lc.config == c.config || lc.config.cell_dim() != c.dim + 1 {
            continue;
        }
        let d = lc.direction.expect("proper local cell has a direction");
        let e = shoot(&v, &d)?;
        let mid = GramForm::new_unchecked((v.matrix() + e.matrix()).map(|x| x / int(2)));
        out.push(cell_at(&mid)?);
    }
    out.sort_by(|a, b| a.config.cmp(&b.config));
    Ok(out)
}

/// True iff the configuration vectors inside each member span that member.
pub fn respects_flag(config: &VectorConfig, f: &RationalFlag) -> bool {
    f.members().iter().all(|m| {
        let inside = config.in_subspace(m);
        let rows: Vec<Vec<Rational>> = inside
            .iter()
            .map(|v| v.iter().map(|&x| int(x)).collect())
            .collect();
        !rows.is_empty() && RatMatrix::from_rows(rows).rank() == m.cols()
    })
}

/// Proper subspaces of `Q^n` spanned by subsets of the configuration, as
/// canonical saturated bases, sorted by dimension.
pub fn spanned_subspaces(config: &VectorConfig) -> Vec<IntMatrix> {
    let n = config.n();
    let col = |v: &Vec<i64>| IntMatrix::from_fn(n, 1, |i, _| v[i]);
    let mut found: Vec<IntMatrix> = Vec::new();
    let mut seen: HashSet<IntMatrix> = HashSet::new();
    let mut frontier: Vec<IntMatrix> = Vec::new();
    for v in config.vectors() {
        let s = saturate(&col(v));
        if seen.insert(s.clone()) {
            frontier.push(s);
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for u in frontier {
            for v in config.vectors() {
                let w = saturate(&u.hstack(&col(v)));
                if w.cols() > u.cols() && w.cols() < n && seen.insert(w.clone()) {
                    next.push(w);
                }
            }
            found.push(u);
        }
        frontier = next;
    }
    found.sort_by(|a, b| (a.cols(), a).cmp(&(b.cols(), b)));
    found
}

/// Every flag all of whose members are spanned by configuration vectors.
pub fn flags_respected_by(config: &VectorConfig) -> Vec<RationalFlag> {
    let n = config.n();
    let subs = spanned_subspaces(config);
    let contains = |big: &IntMatrix, small: &IntMatrix| {
        big.cols() > small.cols() && big.to_rat().hstack(&small.to_rat()).rank() == big.cols()
    };
    let mut out = Vec::new();
    fn extend(
        chain: &mut Vec<usize>,
        subs: &[IntMatrix],
        contains: &dyn Fn(&IntMatrix, &IntMatrix) -> bool,
        n: usize,
        out: &mut Vec<RationalFlag>,
    ) {
        out.push(
            RationalFlag::new(n, chain.iter().map(|&i| subs[i].clone()).collect())
                .expect("nested chain"),
        );
        let last = *chain.last().expect("nonempty chain");
        for j in 0..subs.len() {
            if contains(&subs[j], &subs[last]) {
                chain.push(j);
                extend(chain, subs, contains, n, out);
                chain.pop();
            }
        }
    }
    for i in 0..subs.len() {
        extend(&mut vec![i], &subs, &contains, n, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;
    use crate::flags::standard_flag;

    fn hex() -> GramForm {
        GramForm::from_rationals(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]).unwrap()
    }

    #[test]
    fn square_edge() {
        let c = cell_from_config(&VectorConfig::of(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(c.dim, 1);
        assert!(c.witness.is_identity());
    }

    #[test]
    fn hexagonal_vertex() {
        let c = cell_from_config(&VectorConfig::of(&[&[1, 0], &[0, 1], &[1, -1]])).unwrap();
        assert_eq!(c.dim, 0);
        assert_eq!(c.witness, hex());
        let c = cell_from_config(&VectorConfig::of(&[&[1, 0], &[0, 1], &[1, 1]])).unwrap();
        assert_eq!(c.witness.matrix()[(0, 1)], rat(-1, 2));
    }

    #[test]
    fn errors() {
        assert_eq!(
            cell_from_config(&VectorConfig::of(&[&[1, 0]])),
            Err(Error::NotSpanning)
        );
        let bad = VectorConfig::of(&[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        assert_eq!(cell_from_config(&bad), Err(Error::Infeasible));
    }

    #[test]
    fn faces_and_cofaces_in_the_plane() {
        let edge = cell_from_config(&VectorConfig::of(&[&[1, 0], &[0, 1]])).unwrap();
        let faces: Vec<VectorConfig> = cell_faces(&edge)
            .unwrap()
            .into_iter()
            .map(|c| c.config)
            .collect();
        assert_eq!(
            faces,
            vec![
                VectorConfig::of(&[&[1, 0], &[0, 1], &[1, -1]]),
                VectorConfig::of(&[&[1, 0], &[0, 1], &[1, 1]])
            ]
        );
        assert!(cell_cofaces(&edge).unwrap().is_empty());
        let v = cell_from_config(&VectorConfig::of(&[&[1, 0], &[0, 1], &[1, 1]])).unwrap();
        assert!(cell_faces(&v).unwrap().is_empty());
        let cof = cell_cofaces(&v).unwrap();
        assert_eq!(cof.len(), 3);
        assert!(cof.iter().all(|c| c.dim == 1 && c.config.len() == 2));
    }

    #[test]
    fn root_lattice_a3() {
        let a3 = VectorConfig::of(&[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, -1, 0],
            &[0, 1, -1],
            &[1, 0, -1],
        ]);
        let c = cell_from_config(&a3).unwrap();
        assert_eq!(c.dim, 0);
        assert!(cell_faces(&c).unwrap().is_empty());
        let cof = cell_cofaces(&c).unwrap();
        assert!(!cof.is_empty());
        assert!(cof.iter().all(|x| x.dim == 1 && x.config.len() == 5));
    }

    #[test]
    fn flag_respect() {
        let hexc = VectorConfig::of(&[&[1, 0], &[0, 1], &[1, -1]]);
        assert!(respects_flag(&hexc, &standard_flag(2, &[1]).unwrap()));
        let diag = RationalFlag::from_spans(2, &[vec![vec![1, 1]]]).unwrap();
        assert!(!respects_flag(&hexc, &diag));
        assert_eq!(flags_respected_by(&hexc).len(), 3);
        let sq = VectorConfig::of(&[&[1, 0], &[0, 1]]);
        let e2 = RationalFlag::from_spans(2, &[vec![vec![0, 1]]]).unwrap();
        assert_eq!(
            flags_respected_by(&sq),
            vec![e2, standard_flag(2, &[1]).unwrap()]
        );
    }
}
