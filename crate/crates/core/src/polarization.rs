//! Rational polarizations, the map `L ↦ σ_L`, region signatures of the
//! hyperplane arrangement, and classicality certificates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::degposet::{wall_w, DegeneracySubset};
use crate::domain::{HalfVineType, StabilityDomain};
use crate::error::{Error, Result};
use crate::feasibility::{self, rat, ratio, Constraint, Farkas, Feasibility, Rat, Rel};
use crate::vfunction::{is_uniform, VFunction};

/// `β ω + Σ α_i Σ_i + Σ γ_(h,A) C_(h,A)`, with `γ` indexed like
/// `StabilityDomain::separating`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPolarization {
    pub beta: Rat,
    pub alpha: Vec<Rat>,
    pub gamma: Vec<Rat>,
}

pub fn ceil(q: &Rat) -> BigInt {
    q.ceil().to_integer()
}

fn to_i64(b: &BigInt) -> Result<i64> {
    i64::try_from(b).map_err(|_| Error::InvalidArgument(format!("{b} does not fit in 64 bits")))
}

impl RationalPolarization {
    /// The polarization `β ω` with no other terms.
    pub fn canonical(d: &StabilityDomain, beta: Rat) -> Self {
        RationalPolarization {
            beta,
            alpha: vec![Rat::zero(); d.n() as usize],
            gamma: vec![Rat::zero(); d.separating().len()],
        }
    }

    /// `(2g-2)β + Σα`.
    pub fn relative_degree(&self, g: u32) -> Rat {
        rat(2 * g as i64 - 2) * &self.beta + self.alpha.iter().sum::<Rat>()
    }

    /// Checks sizes, `β = 0` for `g <= 1` and integrality of the degree; returns `χ`.
    pub fn check(&self, d: &StabilityDomain) -> Result<i64> {
        if self.alpha.len() != d.n() as usize || self.gamma.len() != d.separating().len() {
            return Err(Error::DomainMismatch(format!(
                "polarization has {} alpha and {} gamma entries, domain ({},{}) needs {} and {}",
                self.alpha.len(),
                self.gamma.len(),
                d.g(),
                d.n(),
                d.n(),
                d.separating().len()
            )));
        }
        if d.g() <= 1 && !self.beta.is_zero() {
            return Err(Error::InvalidArgument("beta must vanish in genus at most one".into()));
        }
        let chi = self.relative_degree(d.g());
        if !chi.is_integer() {
            return Err(Error::InvalidArgument(format!("relative degree {chi} is not an integer")));
        }
        to_i64(&chi.to_integer())
    }

    /// `β(2h-2+e) + Σ_{i∈A} α_i`.
    pub fn ns_form(&self, x: &HalfVineType) -> Rat {
        let mut q = rat(2 * x.h as i64 - 2 + x.e as i64) * &self.beta;
        for m in x.marks() {
            q += &self.alpha[m as usize - 1];
        }
        q
    }

    /// The arrangement form at element `i`, including `γ` terms when separating.
    pub fn form(&self, d: &StabilityDomain, i: usize) -> Rat {
        let x = d.element(i);
        let mut q = self.ns_form(&x);
        if x.e == 1 {
            q -= &self.gamma[d.part_position(i)];
            q += &self.gamma[d.part_position(d.comp(i))];
        }
        q
    }
}

/// `σ_L`: ceilings of the arrangement forms.
pub fn sigma_of(l: &RationalPolarization, d: Arc<StabilityDomain>) -> Result<VFunction> {
    let chi = l.check(&d)?;
    let values = (0..d.len()).map(|i| to_i64(&ceil(&l.form(&d, i)))).collect::<Result<Vec<_>>>()?;
    VFunction::new(d, chi, values)
}

/// Per complementary pair: floor of the form at the first element and
/// whether it lies on a hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegionSignature {
    pub chi: i64,
    pub entries: Vec<(BigInt, bool)>,
}

pub fn region_signature(l: &RationalPolarization, d: &StabilityDomain) -> Result<RegionSignature> {
    let chi = l.check(d)?;
    let entries = d
        .pairs()
        .into_iter()
        .map(|(i, _)| {
            let q = l.form(d, i);
            (q.floor().to_integer(), q.is_integer())
        })
        .collect();
    Ok(RegionSignature { chi, entries })
}

pub fn same_region(l1: &RationalPolarization, l2: &RationalPolarization, d: &StabilityDomain) -> Result<bool> {
    Ok(region_signature(l1, d)? == region_signature(l2, d)?)
}

/// The non-separating part of the classical V-function with the given `α`,
/// with `β` determined by `χ`. Values are indexed like `non_separating`.
pub fn classical_ns(d: &StabilityDomain, chi: i64, alpha: &[Rat]) -> Result<Vec<i64>> {
    if alpha.len() != d.n() as usize {
        return Err(Error::DomainMismatch(format!("{} alpha entries for n = {}", alpha.len(), d.n())));
    }
    let total: Rat = alpha.iter().sum();
    let beta = match d.g() {
        0 => return Ok(Vec::new()),
        1 => {
            if total != rat(chi) {
                return Err(Error::InvalidArgument(format!("genus one needs sum of alpha = {chi}, got {total}")));
            }
            Rat::zero()
        }
        g => (rat(chi) - &total) / rat(2 * g as i64 - 2),
    };
    let l = RationalPolarization { beta, alpha: alpha.to_vec(), gamma: vec![Rat::zero(); d.separating().len()] };
    d.non_separating().iter().map(|&i| to_i64(&ceil(&l.ns_form(&d.element(i))))).collect()
}

/// Outcome of the classicality search.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalVerdict {
    /// A polarization with `σ_L = f`.
    Classical(RationalPolarization),
    /// A Farkas certificate for the non-separating system (variables `β` when
    /// `g >= 2`, then `α_1..α_n`).
    NotClassical { system: Vec<Constraint>, certificate: Farkas },
}

impl ClassicalVerdict {
    pub fn is_classical(&self) -> bool {
        matches!(self, ClassicalVerdict::Classical(_))
    }
}

/// The linear system whose solutions `(β?, α)` reproduce the non-separating
/// part of `f`; returns the system and the number of variables.
pub fn classical_system(f: &VFunction) -> (Vec<Constraint>, usize) {
    let d = f.domain();
    let g = d.g();
    let n = d.n() as usize;
    let has_beta = g >= 2;
    let nv = n + has_beta as usize;
    let row = |x: &HalfVineType| {
        let mut c = vec![Rat::zero(); nv];
        if has_beta {
            c[0] = rat(2 * x.h as i64 - 2 + x.e as i64);
        }
        for m in x.marks() {
            c[m as usize - 1 + has_beta as usize] = Rat::one();
        }
        c
    };
    let mut sys = Vec::new();
    let mut deg = vec![Rat::one(); nv];
    if has_beta {
        deg[0] = rat(2 * g as i64 - 2);
    }
    sys.push(Constraint::new(deg, Rel::Eq, rat(f.chi())));
    for (i, _) in d.ns_pairs() {
        let x = d.element(i);
        let v = f.value(i);
        let c = row(&x);
        if f.is_degenerate_at(i) {
            sys.push(Constraint::new(c, Rel::Eq, rat(v)));
        } else {
            let neg: Vec<Rat> = c.iter().map(|a| -a).collect();
            sys.push(Constraint::new(c, Rel::Lt, rat(v)));
            sys.push(Constraint::new(neg, Rel::Lt, rat(1 - v)));
        }
    }
    (sys, nv)
}

/// Searches for `L` with `σ_L = f`; the separating part is absorbed by `γ`.
pub fn classical_feasible(f: &VFunction) -> Result<ClassicalVerdict> {
    let d = f.domain().clone();
    let (sys, nv) = classical_system(f);
    let sol = match feasibility::solve(nv, &sys)? {
        Feasibility::Infeasible(certificate) => {
            return Ok(ClassicalVerdict::NotClassical { system: sys, certificate });
        }
        Feasibility::Feasible(x) => x,
    };
    let has_beta = d.g() >= 2;
    let beta = if has_beta { sol[0].clone() } else { Rat::zero() };
    let alpha = sol[has_beta as usize..].to_vec();
    let mut l = RationalPolarization { beta, alpha, gamma: vec![Rat::zero(); d.separating().len()] };
    for (i, j) in d.s_pairs() {
        if i == j {
            continue;
        }
        let q = l.ns_form(&d.element(i));
        let v = rat(f.value(i));
        let target = if f.is_degenerate_at(i) { v } else { v - ratio(1, 2) };
        l.gamma[d.part_position(j)] = target - q;
    }
    let back = sigma_of(&l, d)?;
    if back != *f {
        // The separating pairs are always solvable; a mismatch means f is not valid.
        return Err(Error::InvalidVFunction("separating part cannot be matched by a polarization".into()));
    }
    Ok(ClassicalVerdict::Classical(l))
}

/// Classicality together with its certificate.
///
/// For `n = 0` every V-function is classical; for `n = 1` the criterion is
/// uniformity plus a non-separating degeneracy set in `{∅} ∪ {W_δ}`; for
/// larger `n` the feasibility search decides.
pub fn is_classical(f: &VFunction) -> Result<(bool, ClassicalVerdict)> {
    let verdict = classical_feasible(f)?;
    let d = f.domain();
    let by_rule = match d.n() {
        0 => true,
        1 if d.g() >= 1 => {
            let ns = f.degeneracy_set().non_separating_part();
            let mut ok = ns.is_empty();
            if !ok && d.g() >= 2 {
                for delta in 1..=(2 * d.g() as i64 - 2) {
                    if wall_w(delta, d.clone())? == ns {
                        ok = true;
                        break;
                    }
                }
            }
            is_uniform(f)? && ok
        }
        _ => verdict.is_classical(),
    };
    Ok((by_rule, verdict))
}

/// `σ_β` at `n = 1`: `⌈δβ⌉` on primitives, `⌈χ-βδ(x^c)⌉` on their complements,
/// with a general separating part.
pub fn sigma_beta(d: Arc<StabilityDomain>, beta: &Rat, chi: i64) -> Result<VFunction> {
    if d.n() != 1 || d.g() < 2 {
        return Err(Error::InvalidArgument("sigma_beta needs n = 1 and g >= 2".into()));
    }
    let alpha = rat(chi) - rat(2 * d.g() as i64 - 2) * beta;
    let l = RationalPolarization { beta: beta.clone(), alpha: vec![alpha], gamma: vec![Rat::zero(); d.separating().len()] };
    let ns: Vec<i64> =
        d.non_separating().iter().map(|&i| to_i64(&ceil(&l.ns_form(&d.element(i))))).collect::<Result<_>>()?;
    VFunction::from_ns(d, &crate::vfunction::Part { chi, values: ns })
}

/// Integer floor helper for tests and tooling.
pub fn floor_div(p: i64, q: i64) -> i64 {
    Integer::div_floor(&p, &q)
}

/// Degenerate elements of `σ_L` predicted by integrality of the forms.
pub fn integral_forms(l: &RationalPolarization, d: Arc<StabilityDomain>) -> Result<DegeneracySubset> {
    l.check(&d)?;
    let members: Vec<usize> = (0..d.len()).filter(|&i| l.form(&d, i).is_integer()).collect();
    Ok(DegeneracySubset::from_indices(d, &members))
}
