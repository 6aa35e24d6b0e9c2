//! The well-rounded retraction, the orthogonal scaling action along a flag,
//! and the orthant bounds that push a lattice close to a boundary face.
//!
//! Lengths are squared throughout. The stopping factors `μ_i` can be
//! irrational, but `μ_i²` is a ratio of values of rational quadratic forms,
//! so every form produced here stays rational and every comparison is exact.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::exactla::rational::serde_rational_vec;
use crate::exactla::{int, saturate, IntMatrix, RatMatrix, Rational};
use crate::flags::RationalFlag;
use crate::lattice::{minimal_vectors, normalize, vectors_below_raw, GramForm};

/// The `A`-orthogonal splitting `Q^n = V̌_1 ⊕ … ⊕ V̌_l` along a flag, where
/// `V̌_j` is the `A`-orthogonal complement of `V_{j−1}` in `V_j`.
#[derive(Clone, Debug)]
pub struct FlagSplitting {
    pub form: GramForm,
    pub flag: RationalFlag,
    /// `projectors[j]` is the projection onto `V̌_{j+1}` along the others.
    pub projectors: Vec<RatMatrix>,
}

/// `A`-orthogonal projection onto the column span of `b`:
/// `B (Bᵀ A B)⁻¹ Bᵀ A`.
pub fn orthogonal_projector(a: &RatMatrix, b: &IntMatrix) -> RatMatrix {
    let br = b.to_rat();
    let bt = br.transpose();
    let gram = &(&bt * a) * &br;
    let inv = gram
        .inverse()
        .expect("restriction of a definite form is definite");
    &(&(&br * &inv) * &bt) * a
}

/// Exact `A`-orthogonal projectors for the blocks of a flag.
pub fn flag_split(a: &GramForm, f: &RationalFlag) -> Result<FlagSplitting> {
    if a.n() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "form has n = {}, flag has n = {}",
            a.n(),
            f.n()
        )));
    }
    let n = a.n();
    let mut cumulative: Vec<RatMatrix> = f
        .members()
        .iter()
        .map(|m| orthogonal_projector(a.matrix(), m))
        .collect();
    cumulative.push(RatMatrix::identity(n));
    let mut projectors = Vec::with_capacity(cumulative.len());
    let mut prev = RatMatrix::zeros(n, n);
    for p in cumulative {
        projectors.push(&p - &prev);
        prev = p;
    }
    Ok(FlagSplitting {
        form: a.clone(),
        flag: f.clone(),
        projectors,
    })
}

impl FlagSplitting {
    /// `Σ_j c_j · π_jᵀ A π_j`.
    pub fn recombine(&self, factors: &[Rational]) -> RatMatrix {
        let a = self.form.matrix();
        let n = a.rows();
        let mut out = RatMatrix::zeros(n, n);
        for (p, c) in self.projectors.iter().zip(factors) {
            let block = &(&p.transpose() * a) * p;
            out = &out + &block.map(|x| x * c);
        }
        out
    }
}

/// Block factors `(s_1², …, s_l²)` of the orthogonal scaling action, with
/// `s_1² = 1`. Block `j` of the splitting is scaled by `s_j²` (squared
/// lengths).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingVector {
    #[serde(rename = "sSq", with = "serde_rational_vec")]
    pub s_sq: Vec<Rational>,
}

impl ScalingVector {
    /// Normalizes so that the first factor is 1 (a homothety).
    pub fn from_block_factors(factors: Vec<Rational>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|x| !x.is_positive()) {
            return Err(Error::NotApplicable(
                "scaling factors must be positive".into(),
            ));
        }
        let first = factors[0].clone();
        Ok(ScalingVector {
            s_sq: factors.into_iter().map(|x| x / &first).collect(),
        })
    }

    /// From root coordinates `ρ_j²`: `a_j² = (ρ_1² ⋯ ρ_{j−1}²)⁻¹`.
    pub fn from_root_coords(rho_sq: &[Rational]) -> Result<Self> {
        if rho_sq.iter().any(|x| !x.is_positive()) {
            return Err(Error::NotApplicable(
                "root coordinates must be positive".into(),
            ));
        }
        let mut s = vec![Rational::one()];
        let mut prod = Rational::one();
        for r in rho_sq {
            prod *= r;
            s.push(prod.recip());
        }
        Ok(ScalingVector { s_sq: s })
    }

    /// Root coordinates `ρ_j² = a_j² / a_{j+1}²`.
    pub fn root_coords(&self) -> Vec<Rational> {
        self.s_sq.windows(2).map(|w| &w[0] / &w[1]).collect()
    }

    pub fn identity(blocks: usize) -> Self {
        ScalingVector {
            s_sq: vec![Rational::one(); blocks],
        }
    }

    /// Entrywise product (composition of scalings along the same flag).
    pub fn compose(&self, other: &ScalingVector) -> ScalingVector {
        ScalingVector {
            s_sq: self
                .s_sq
                .iter()
                .zip(&other.s_sq)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// The orthogonal scaling (geodesic) action: block `j` of the `A`-orthogonal
/// splitting along `F` is scaled by `s_j²`.
pub fn scale_along_flag(a: &GramForm, f: &RationalFlag, s: &ScalingVector) -> Result<GramForm> {
    if s.s_sq.len() != f.len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "flag has {} blocks but {} factors were given",
            f.len() + 1,
            s.s_sq.len()
        )));
    }
    if s.s_sq.iter().any(|x| !x.is_positive()) {
        return Err(Error::NotApplicable(
            "scaling factors must be positive".into(),
        ));
    }
    let split = flag_split(a, f)?;
    Ok(GramForm::new_unchecked(split.recombine(&s.s_sq)))
}

/// One stage of the retraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    /// Saturated basis of the span `M^(i)` of the current minimal vectors.
    pub member: IntMatrix,
    #[serde(rename = "muSq", with = "crate::exactla::rational::serde_rational")]
    pub mu_sq: Rational,
    /// Vectors outside `M^(i)` that reach length 1 when the stage stops.
    pub tight: Vec<Vec<i64>>,
}

/// Full record of a retraction.
#[derive(Clone, Debug, Serialize)]
pub struct RetractionTrace {
    /// The input rescaled to arithmetic minimum 1.
    pub normalized: GramForm,
    pub stages: Vec<Stage>,
    #[serde(rename = "finalForm")]
    pub final_form: GramForm,
    /// `M^(1) ⊆ … ⊆ M^(n−1)`, with repeats.
    #[serde(rename = "minimaFlag")]
    pub minima_flag: Vec<IntMatrix>,
    /// Distinct proper members of the flag of successive minima.
    pub irredundant: RationalFlag,
}

impl RetractionTrace {
    /// Block factors `s_j²` with `r(A) = scale_along_flag(A, irredundant, s)`:
    /// block `j` is scaled by the product of the `μ_i²` of the stages whose
    /// member lies inside `V_{j−1}`.
    pub fn composite_scaling(&self) -> ScalingVector {
        let members = self.irredundant.members();
        let mut s = vec![Rational::one(); members.len() + 1];
        for st in &self.stages {
            if st.mu_sq.is_one() {
                continue;
            }
            let k = members
                .iter()
                .position(|m| *m == st.member)
                .expect("stage member is in the flag");
            for x in s.iter_mut().skip(k + 1) {
                *x *= &st.mu_sq;
            }
        }
        ScalingVector { s_sq: s }
    }

    /// Product of all `μ_i²`.
    pub fn mu_sq_product(&self) -> Rational {
        self.stages.iter().map(|s| s.mu_sq.clone()).product()
    }
}

/// Result of the stopping rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingResult {
    pub mu_sq: Rational,
    pub tight: Vec<Vec<i64>>,
}

/// Parallel and perpendicular squared lengths of `w` relative to the
/// `A`-orthogonal splitting at `proj` (the projector onto `M`).
fn split_values(a: &RatMatrix, proj: &RatMatrix, w: &[i64]) -> (Rational, Rational) {
    let wq: Vec<Rational> = w.iter().map(|&x| int(x)).collect();
    let par = proj.mul_vec(&wq);
    let perp: Vec<Rational> = wq.iter().zip(&par).map(|(x, y)| x - y).collect();
    (a.bilinear(&par, &par), a.bilinear(&perp, &perp))
}

/// `Pᵀ A P + t (I−P)ᵀ A (I−P)`.
fn rescaled(a: &RatMatrix, proj: &RatMatrix, t: &Rational) -> RatMatrix {
    let n = a.rows();
    let perp = &RatMatrix::identity(n) - proj;
    let par_block = &(&proj.transpose() * a) * proj;
    let perp_block = &(&perp.transpose() * a) * &perp;
    &par_block + &perp_block.map(|x| x * t)
}

/// The stopping factor `μ²`: the largest value of `(1 − p_w)/q_w` over
/// integer `w ∉ M_Q`, i.e. the smallest scaling of the complement of `M`
/// that keeps the arithmetic minimum equal to 1.
///
/// Requires `minSq(A) = 1` and the minimal vectors of `A` to lie in `M`.
/// Certified by enumeration: at a tentative `t`, the vectors of value `<= 1`
/// under the rescaled form are exactly those with ratio `>= t`.
pub fn stopping_mu(a: &GramForm, m: &IntMatrix) -> Result<StoppingResult> {
    let n = a.n();
    if m.to_rat().rank() >= n {
        return Err(Error::AlreadyFull);
    }
    let proj = orthogonal_projector(a.matrix(), m);
    let am = a.matrix();
    let mut t = Rational::new(1.into(), 2.into());
    loop {
        let at = GramForm::new_unchecked(rescaled(am, &proj, &t));
        let mut best: Option<(Rational, Vec<Vec<i64>>)> = None;
        for w in vectors_below_raw(&at, &Rational::one())? {
            let (p, q) = split_values(am, &proj, &w);
            if q.is_zero() {
                continue;
            }
            let ratio = (Rational::one() - p) / q;
            match &mut best {
                Some((b, ws)) if ratio == *b => ws.push(w),
                Some((b, _)) if ratio < *b => {}
                _ => best = Some((ratio, vec![w])),
            }
        }
        match best {
            None => t /= int(2),
            Some((r, ws)) if r == t => {
                let tight = ws
                    .into_iter()
                    .filter(|w| crate::lattice::config::is_primitive(w))
                    .collect();
                return Ok(StoppingResult { mu_sq: r, tight });
            }
            Some((r, _)) => {
                ensure!(
                    r > t,
                    "enumeration returned a vector below the tentative factor"
                );
                t = r;
            }
        }
    }
}

/// Saturated basis of the span of a set of vectors.
fn span_basis(n: usize, vectors: &[Vec<i64>]) -> IntMatrix {
    saturate(&IntMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]))
}

/// The well-rounded retraction `r(A)` with its full trace.
pub fn retract(a: &GramForm) -> Result<RetractionTrace> {
    let n = a.n();
    let a0 = normalize(a)?;
    let mut f = a0.clone();
    let mut stages = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mins = minimal_vectors(&f)?;
        ensure!(
            mins.min_sq.is_one(),
            "retraction stage lost the normalization"
        );
        let member = span_basis(n, mins.vectors.vectors());
        if member.cols() > i {
            stages.push(Stage {
                member,
                mu_sq: Rational::one(),
                tight: Vec::new(),
            });
            continue;
        }
        let stop = stopping_mu(&f, &member)?;
        ensure!(
            stop.mu_sq.is_positive() && stop.mu_sq < Rational::one(),
            "stopping factor {} outside (0, 1)",
            stop.mu_sq
        );
        let proj = orthogonal_projector(f.matrix(), &member);
        f = GramForm::new_unchecked(rescaled(f.matrix(), &proj, &stop.mu_sq));
        stages.push(Stage {
            member,
            mu_sq: stop.mu_sq,
            tight: stop.tight,
        });
    }
    let minima_flag: Vec<IntMatrix> = stages.iter().map(|s| s.member.clone()).collect();
    let mut proper: Vec<IntMatrix> = Vec::new();
    for m in &minima_flag {
        if m.cols() < n && proper.last() != Some(m) {
            proper.push(m.clone());
        }
    }
    let irredundant = RationalFlag::new(n, proper)?;
    let trace = RetractionTrace {
        normalized: a0,
        stages,
        final_form: f,
        minima_flag,
        irredundant,
    };
    // The composite must be a single orthogonal scaling along the flag.
    let recon = scale_along_flag(
        &trace.normalized,
        &trace.irredundant,
        &trace.composite_scaling(),
    )?;
    ensure!(
        recon == trace.final_form,
        "composite scaling does not reproduce the retraction"
    );
    Ok(trace)
}

/// Rational enclosure `[lo, hi]` of `sqrt(x)` with `hi − lo <= width`.
fn sqrt_interval(x: &Rational, width: &Rational) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = if *x > Rational::one() {
        x.clone()
    } else {
        Rational::one()
    };
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / int(2);
        if &mid * &mid <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// A point on the deformation path `r_t`, `t ∈ [0, 1]`: the first stages
/// run to completion, the current stage is interpolated as
/// `φ_{1 + (μ_i − 1)τ}`. `μ_i` is irrational in general, so interior points
/// are approximate: every entry is within `precision` of the true value.
/// Endpoints are exact (`t = 0` returns the input as given).
pub fn retract_path(a: &GramForm, t: &Rational, precision: &Rational) -> Result<GramForm> {
    if t.is_negative() || *t > Rational::one() {
        return Err(Error::NotApplicable(
            "path parameter must lie in [0, 1]".into(),
        ));
    }
    if !precision.is_positive() {
        return Err(Error::NotApplicable("precision must be positive".into()));
    }
    if t.is_zero() {
        return Ok(a.clone());
    }
    let trace = retract(a)?;
    if t.is_one() || a.n() == 1 {
        return Ok(trace.final_form);
    }
    let stages = Rational::from_integer((a.n() - 1).into());
    let pos = t * &stages;
    // Stage index i (0-based) and local parameter τ ∈ (0, 1].
    let mut i = (pos.ceil().to_integer() - 1u32)
        .try_into()
        .unwrap_or(0usize);
    let mut tau = &pos - Rational::from_integer(i.into());
    if tau.is_zero() {
        tau = Rational::one();
        i = i.saturating_sub(1);
    }
    let mut f = trace.normalized.clone();
    for st in &trace.stages[..i] {
        if !st.mu_sq.is_one() {
            let proj = orthogonal_projector(f.matrix(), &st.member);
            f = GramForm::new_unchecked(rescaled(f.matrix(), &proj, &st.mu_sq));
        }
    }
    let st = &trace.stages[i];
    if st.mu_sq.is_one() {
        return Ok(f);
    }
    let proj = orthogonal_projector(f.matrix(), &st.member);
    let n = a.n();
    let perp = &RatMatrix::identity(n) - &proj;
    let par_block = &(&proj.transpose() * f.matrix()) * &proj;
    let perp_block = &(&perp.transpose() * f.matrix()) * &perp;
    let max_perp = perp_block
        .entries()
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    // c(μ) = (1 + (μ − 1)τ)² is increasing in μ on [0, 1] and has
    // derivative at most 2τ there, so an enclosure of μ of width w bounds the
    // coefficient error by 2τw.
    let coeff = |mu: &Rational| {
        let c = Rational::one() + (mu - Rational::one()) * &tau;
        &c * &c
    };
    let denom = (int(2) * &tau * &max_perp).max(Rational::one());
    let (lo, hi) = sqrt_interval(&st.mu_sq, &(precision / denom));
    let mid = (coeff(&lo) + coeff(&hi)) / int(2);
    ensure!(
        (coeff(&hi) - coeff(&lo)) * &max_perp <= precision * int(2),
        "path interpolation exceeded the requested precision"
    );
    Ok(GramForm::new_unchecked(
        &par_block + &perp_block.map(|x| x * &mid),
    ))
}

/// Bounds of the orthant `{ρ <= t}` along a flag.
///
/// `t_sq` is the closed-form recurrence `t_j² = min(1, α_j² β_j² / (4 ∏_{i<j} t_i²))`
/// with its constituents `α_j²` and `β_j²`. For two-step flags, and for the
/// first member of any flag, it already forces the flag into the minima flag
/// of `t · A`. For deeper members it may not: the stopping factors of the
/// stretched lattice differ from `β_j`. `certified_t_sq` starts from the
/// recurrence and divides `t_j²` by 16 until every member of the flag is a
/// member of the flag of successive minima of `t · A`, checked exactly. The
/// retraction is constant on the orthant below a point with that property, so
/// `certified_t_sq` is a bound on which it is provably constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthantBound {
    #[serde(rename = "tSq", with = "serde_rational_vec")]
    pub t_sq: Vec<Rational>,
    #[serde(rename = "certifiedTSq", with = "serde_rational_vec")]
    pub certified_t_sq: Vec<Rational>,
    #[serde(rename = "alphaSq", with = "serde_rational_vec")]
    pub alpha_sq: Vec<Rational>,
    #[serde(rename = "betaSq", with = "serde_rational_vec")]
    pub beta_sq: Vec<Rational>,
}

/// Gram matrix of the columns of `b` under `A`.
fn restricted_gram(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    &(&b.transpose() * a) * b
}

/// The squared recurrence `t_j² = min(1, ¼ (t_1² ⋯ t_{j−1}²)⁻¹ α_j² β_j²)`.
///
/// `β_j²` is the product of the stopping factors of the retraction of the
/// sublattice `V_j ∩ Z^n`. `α_j²` is the arithmetic minimum of the
/// projection of `Z^n` onto the `A`-orthogonal complement of `V_j`, measured
/// with the sublattice rescaled to arithmetic minimum 1.
pub fn orthant_bound(a: &GramForm, f: &RationalFlag) -> Result<OrthantBound> {
    if a.n() != f.n() {
        return Err(Error::DimensionMismatch(
            "form and flag dimensions differ".into(),
        ));
    }
    let n = a.n();
    let am = a.matrix();
    let mut alpha_sq = Vec::new();
    let mut beta_sq = Vec::new();
    let mut t_sq = Vec::new();
    let mut prod = Rational::one();
    for m in f.members() {
        let d = m.cols();
        let h = RationalFlag::new(n, vec![m.clone()])?
            .adapted_basis()
            .to_rat();
        let inner = h.select_columns(&(0..d).collect::<Vec<_>>());
        let outer = h.select_columns(&(d..n).collect::<Vec<_>>());
        let sub = GramForm::new_unchecked(restricted_gram(am, &inner));
        let sub_min = minimal_vectors(&sub)?.min_sq;
        let beta = retract(&sub)?.mu_sq_product();
        let proj = orthogonal_projector(am, m);
        let perp = &(&RatMatrix::identity(n) - &proj) * &outer;
        let dagger = GramForm::new_unchecked(restricted_gram(am, &perp));
        let alpha = minimal_vectors(&dagger)?.min_sq / &sub_min;
        let t = (&alpha * &beta / (int(4) * &prod)).min(Rational::one());
        prod *= &t;
        alpha_sq.push(alpha);
        beta_sq.push(beta);
        t_sq.push(t);
    }
    let certified_t_sq = certify_bound(a, f, t_sq.clone())?;
    Ok(OrthantBound {
        t_sq,
        certified_t_sq,
        alpha_sq,
        beta_sq,
    })
}

/// Whether every member of `f` belongs to the flag of successive minima of
/// the form scaled along `f` by the root coordinates `t_sq`.
pub fn flag_in_minima_flag(a: &GramForm, f: &RationalFlag, t_sq: &[Rational]) -> Result<bool> {
    let scaled = scale_along_flag(a, f, &ScalingVector::from_root_coords(t_sq)?)?;
    let minima = retract(&scaled)?.irredundant;
    Ok(f.members().iter().all(|m| minima.members().contains(m)))
}

/// Shrinks the bounds, innermost failing member first, until the flag is
/// part of the minima flag. Shrinking `t_j` stretches only vectors outside
/// `V_j`, so for small enough `t_j` the member `V_j` is reached by the
/// retraction before anything outside it.
fn certify_bound(a: &GramForm, f: &RationalFlag, mut t_sq: Vec<Rational>) -> Result<Vec<Rational>> {
    const MAX_SHRINKS: usize = 1024;
    for _ in 0..MAX_SHRINKS {
        let mut failing = None;
        for j in 0..t_sq.len() {
            let prefix = RationalFlag::new(f.n(), f.members()[..=j].to_vec())?;
            if !flag_in_minima_flag(a, &prefix, &t_sq[..=j])? {
                failing = Some(j);
                break;
            }
        }
        match failing {
            None => return Ok(t_sq),
            Some(j) => t_sq[j] /= int(16),
        }
    }
    Err(Error::Invariant("orthant bound did not certify".into()))
}
