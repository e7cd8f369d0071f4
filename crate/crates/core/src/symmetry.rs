//! The translation-and-duality group acting on V-functions, normalization,
//! enumeration of normalized representatives and canonical keys.

use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::StabilityDomain;
use crate::error::{Error, Result};
use crate::search::{anchors, box_bounds, chi_range, Budget, PairSearch};
use crate::vfunction::{Part, VFunction};

/// Default node budget for normalized enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 50_000_000;

/// `ι^ε ∘ T_(β,α,γ)`: translate first, then dualize when `epsilon` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub beta: i64,
    pub alpha: Vec<i64>,
    /// One entry per separating element, indexed like `StabilityDomain::separating`.
    pub gamma: Vec<i64>,
    pub epsilon: bool,
}

impl GroupElement {
    pub fn identity(d: &StabilityDomain) -> Self {
        GroupElement { beta: 0, alpha: vec![0; d.n() as usize], gamma: vec![0; d.separating().len()], epsilon: false }
    }

    pub fn iota(d: &StabilityDomain) -> Self {
        GroupElement { epsilon: true, ..Self::identity(d) }
    }

    pub fn translation(d: &StabilityDomain, beta: i64, alpha: Vec<i64>) -> Self {
        GroupElement { beta, alpha, gamma: vec![0; d.separating().len()], epsilon: false }
    }

    /// Sizes match the domain and `β = 0` when `g <= 1`.
    pub fn check(&self, d: &StabilityDomain) -> Result<()> {
        if self.alpha.len() != d.n() as usize || self.gamma.len() != d.separating().len() {
            return Err(Error::DomainMismatch(format!(
                "group element has {} alpha and {} gamma entries, domain ({},{}) needs {} and {}",
                self.alpha.len(),
                self.gamma.len(),
                d.g(),
                d.n(),
                d.n(),
                d.separating().len()
            )));
        }
        if d.g() <= 1 && self.beta != 0 {
            return Err(Error::InvalidArgument("beta must vanish in genus at most one".into()));
        }
        Ok(())
    }

    /// Shift of `χ` under the translation part.
    pub fn chi_shift(&self, d: &StabilityDomain) -> i64 {
        (2 * d.g() as i64 - 2) * self.beta + self.alpha.iter().sum::<i64>()
    }

    /// Translation amount at element `i`.
    pub fn shift_at(&self, d: &StabilityDomain, i: usize) -> i64 {
        let x = d.element(i);
        let mut t = self.beta * (2 * x.h as i64 - 2 + x.e as i64);
        for m in x.marks() {
            t += self.alpha[m as usize - 1];
        }
        if x.e == 1 {
            t += self.gamma[d.part_position(d.comp(i))] - self.gamma[d.part_position(i)];
        }
        t
    }

    fn scaled(&self, s: i64) -> (i64, Vec<i64>, Vec<i64>) {
        (self.beta * s, self.alpha.iter().map(|a| a * s).collect(), self.gamma.iter().map(|c| c * s).collect())
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let sign = if other.epsilon { -1 } else { 1 };
        let (b, a, c) = self.scaled(sign);
        GroupElement {
            beta: b + other.beta,
            alpha: a.iter().zip(&other.alpha).map(|(x, y)| x + y).collect(),
            gamma: c.iter().zip(&other.gamma).map(|(x, y)| x + y).collect(),
            epsilon: self.epsilon ^ other.epsilon,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let sign = if self.epsilon { 1 } else { -1 };
        let (beta, alpha, gamma) = self.scaled(sign);
        GroupElement { beta, alpha, gamma, epsilon: self.epsilon }
    }

    /// The action on a V-function.
    pub fn act(&self, f: &VFunction) -> Result<VFunction> {
        let d = f.domain();
        self.check(d)?;
        let values: Vec<i64> = (0..d.len()).map(|i| f.value(i) + self.shift_at(d, i)).collect();
        let moved = f.with_values(f.chi() + self.chi_shift(d), values);
        Ok(if self.epsilon { dualize(&moved) } else { moved })
    }
}

/// `ι`: `v ↦ -v` on degenerate elements, `v ↦ 1-v` elsewhere, `χ ↦ -χ`.
pub fn dualize(f: &VFunction) -> VFunction {
    let values =
        (0..f.values().len()).map(|i| if f.is_degenerate_at(i) { -f.value(i) } else { 1 - f.value(i) }).collect();
    f.with_values(-f.chi(), values)
}

/// The pure translation sending the anchors of the non-separating part to 0.
pub fn normalizing_translation(f: &VFunction) -> GroupElement {
    let d = f.domain();
    let mut t = GroupElement::identity(d);
    if d.g() >= 2 {
        if let Some(i) = d.index_of(&crate::domain::HalfVineType::new(3, 0, 0)) {
            t.beta = -f.value(i);
        }
    }
    for m in 0..d.n() {
        if let Some(i) = d.index_of(&crate::domain::HalfVineType::new(2, 0, 1 << m)) {
            // (2;0,{i}) has δ-part 0, so β does not move it.
            t.alpha[m as usize] = -f.value(i);
        }
    }
    t
}

/// Normalizes the non-separating part; returns it and the translation used.
pub fn normalize_ns(d: Arc<StabilityDomain>, ns: &Part) -> Result<(Part, GroupElement)> {
    let f = VFunction::from_ns(d, ns)?;
    let t = normalizing_translation(&f);
    let (_, out) = t.act(&f)?.split();
    Ok((out, t))
}

/// Whether the anchors of `ns` vanish.
pub fn is_normalized(d: &StabilityDomain, ns: &Part) -> bool {
    anchors(d).iter().all(|&a| ns.values[d.part_position(a)] == 0)
}

/// Every valid normalized non-separating part inside the box
/// `-(δ-1)-slack <= σ <= slack`, sorted by `(χ, values)`.
pub fn enumerate_box(d: &StabilityDomain, slack: i64, budget: u64) -> Result<Vec<Part>> {
    if d.non_separating().is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = box_bounds(d, slack);
    let search = PairSearch::new(d, lo, hi, None);
    let budget = Budget::new(budget);
    let chis: Vec<i64> = chi_range(d, slack).collect();
    let per_chi: Vec<Result<Vec<Part>>> = chis
        .par_iter()
        .map(|&chi| {
            let mut found = Vec::new();
            let mut values = vec![0; d.len()];
            search.run(chi, &mut values, &budget, &mut |v| {
                found.push(Part { chi, values: d.non_separating().iter().map(|&i| v[i]).collect() });
                true
            })?;
            Ok(found)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_chi {
        out.extend(r?);
    }
    out.sort();
    Ok(out)
}

/// The normalized representatives of all translation orbits of
/// non-separating parts.
pub fn enumerate_normalized(d: &StabilityDomain, budget: u64) -> Result<Vec<Part>> {
    enumerate_box(d, 0, budget)
}

/// Orbit key: normalized `χ`, normalized non-separating values, and the
/// degenerate separating pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub chi: i64,
    pub ns: Vec<i64>,
    pub s_degenerate: Vec<usize>,
}

fn key_for(f: &VFunction) -> Result<CanonicalKey> {
    let d = f.domain();
    let t = normalizing_translation(f);
    let g = t.act(f)?;
    let (_, ns) = g.split();
    // Without non-separating elements nothing pins χ; every χ lies in one orbit.
    let chi = if d.non_separating().is_empty() { 0 } else { ns.chi };
    let s_degenerate = d.s_pairs().into_iter().filter(|&(i, _)| f.is_degenerate_at(i)).map(|(i, _)| i).collect();
    Ok(CanonicalKey { chi, ns: ns.values, s_degenerate })
}

/// Minimum over `ε` of the normalized key of `ι^ε f`.
pub fn canonical_form(f: &VFunction) -> Result<CanonicalKey> {
    let a = key_for(f)?;
    let b = key_for(&dualize(f))?;
    Ok(a.min(b))
}

/// Minimum over `ε` of the normalized `(χ, ns)` only.
pub fn space_key(f: &VFunction) -> Result<(i64, Vec<i64>)> {
    let a = key_for(f)?;
    let b = key_for(&dualize(f))?;
    Ok((a.chi, a.ns).min((b.chi, b.ns)))
}

fn same_domain(f1: &VFunction, f2: &VFunction) -> Result<()> {
    if **f1.domain() != **f2.domain() {
        return Err(Error::DomainMismatch("functions live on different domains".into()));
    }
    Ok(())
}

pub fn stack_isomorphic(f1: &VFunction, f2: &VFunction) -> Result<bool> {
    same_domain(f1, f2)?;
    Ok(canonical_form(f1)? == canonical_form(f2)?)
}

pub fn space_isomorphic(f1: &VFunction, f2: &VFunction) -> Result<bool> {
    same_domain(f1, f2)?;
    Ok(space_key(f1)? == space_key(f2)?)
}
