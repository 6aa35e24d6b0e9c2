//! The "small enough" test: `Γ` is small enough when no element of `Γ`
//! carries a flag `F` to a different flag `F′` while some cell of `W`
//! respects both.
//!
//! Cells of `W` are `g·C` for class representatives `C`; the flags `g·C`
//! respects are `g·F″` for the flags `F″` respected by `C`. Two of them,
//! `g F₁` and `g F₂`, are `Γ`-related iff they lie in the same `Γ`-class,
//! which depends only on the coset `ω = ω₀ g`. So the scan is over classes,
//! cosets and pairs of same-type flags of the representative, using the
//! flag-class lookup, with no search inside `Γ`.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::exactla::IntMatrix;
use crate::flags::RationalFlag;
use crate::lattice::{GroupSpec, VectorConfig};

use super::complex::{EnumerationOptions, GroupContext};

/// A cell respecting two distinct flags, and an element of the group
/// carrying the first to the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallnessWitness {
    pub cell: VectorConfig,
    pub dim: usize,
    pub flag: RationalFlag,
    #[serde(rename = "otherFlag")]
    pub other_flag: RationalFlag,
    pub gamma: IntMatrix,
}

/// Outcome of [`is_small_enough`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmallnessReport {
    pub group: GroupSpec,
    #[serde(rename = "smallEnough")]
    pub small_enough: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<SmallnessWitness>,
}

/// Decides whether `group` is small enough, returning a counterexample if
/// not. Cells are scanned from the top dimension down, so a witness is a
/// cell of largest possible dimension.
pub fn is_small_enough(group: &GroupSpec) -> Result<SmallnessReport> {
    is_small_enough_with(group, EnumerationOptions::default())
}

/// [`is_small_enough`] with enumeration options.
pub fn is_small_enough_with(
    group: &GroupSpec,
    opts: EnumerationOptions,
) -> Result<SmallnessReport> {
    let ctx = GroupContext::new(group, opts)?;
    let atlas = &ctx.atlas;
    let mut order: Vec<usize> = (0..atlas.classes.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(atlas.classes[c].cell.dim));
    for c in order {
        let cls = &atlas.classes[c];
        let nf = cls.flags.len();
        let dims: Vec<Vec<usize>> = cls.flags.iter().map(RationalFlag::dims).collect();
        for w in 0..ctx.omega.len() {
            let classes: Vec<usize> = (0..nf)
                .map(|f| ctx.flag_class(c, w, f))
                .collect::<Result<_>>()?;
            for f1 in 0..nf {
                for f2 in f1 + 1..nf {
                    if dims[f1] != dims[f2] || classes[f1] != classes[f2] {
                        continue;
                    }
                    let t = ctx.omega.transversal(w);
                    let a = cls.flags[f1].transform(t);
                    let b = cls.flags[f2].transform(t);
                    let idx = ctx.flag_index(&dims[f1])?;
                    let (_, ga) = idx.classify(&ctx.omega, &a);
                    let (_, gb) = idx.classify(&ctx.omega, &b);
                    let gamma = &gb.unimodular_inverse().expect("unimodular") * &ga;
                    ensure!(
                        group.contains(&gamma),
                        "carrying element is not in the group"
                    );
                    ensure!(
                        a.transform(&gamma) == b,
                        "carrying element misses the target flag"
                    );
                    let witness = SmallnessWitness {
                        cell: cls.cell.config.transform(t),
                        dim: cls.cell.dim,
                        flag: a,
                        other_flag: b,
                        gamma,
                    };
                    return Ok(SmallnessReport {
                        group: *group,
                        small_enough: false,
                        counterexample: Some(witness),
                    });
                }
            }
        }
    }
    Ok(SmallnessReport {
        group: *group,
        small_enough: true,
        counterexample: None,
    })
}
