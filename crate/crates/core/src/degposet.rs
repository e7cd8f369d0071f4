//! Degeneracy subsets, witnesses, lifts and realizability; the walls and
//! submaximal sets; the one-mark classification; connectivity through
//! height one; and the genus-one Dynkin systems.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{full_mask, is_primitive, primitive_leq, HalfVineType, Mask, StabilityDomain};
use crate::error::{Error, Result};
use crate::search::{box_bounds, chi_range, Budget, PairSearch};
use crate::symmetry::enumerate_normalized;
use crate::vfunction::{Part, VFunction};

/// Default node budget for witness and realizability searches.
pub const DEFAULT_SEARCH_BUDGET: u64 = 20_000_000;

/// A set of domain elements, stored as a membership vector.
#[derive(Clone, Debug)]
pub struct DegeneracySubset {
    domain: Arc<StabilityDomain>,
    members: Vec<bool>,
}

impl PartialEq for DegeneracySubset {
    fn eq(&self, other: &Self) -> bool {
        *self.domain == *other.domain && self.members == other.members
    }
}

impl Eq for DegeneracySubset {}

impl std::hash::Hash for DegeneracySubset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.domain.g().hash(state);
        self.domain.n().hash(state);
        self.members.hash(state);
    }
}

impl DegeneracySubset {
    pub fn empty(domain: Arc<StabilityDomain>) -> Self {
        let members = vec![false; domain.len()];
        DegeneracySubset { domain, members }
    }

    pub fn from_indices(domain: Arc<StabilityDomain>, idx: &[usize]) -> Self {
        let mut s = Self::empty(domain);
        for &i in idx {
            s.members[i] = true;
        }
        s
    }

    /// Adds the complements of the given elements as well.
    pub fn from_pairs(domain: Arc<StabilityDomain>, idx: &[usize]) -> Self {
        let mut s = Self::empty(domain);
        for &i in idx {
            s.members[i] = true;
            let j = s.domain.comp(i);
            s.members[j] = true;
        }
        s
    }

    pub fn domain(&self) -> &Arc<StabilityDomain> {
        &self.domain
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn is_subset(&self, other: &DegeneracySubset) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn minus(&self, other: &DegeneracySubset) -> DegeneracySubset {
        let members = self.members.iter().zip(&other.members).map(|(&a, &b)| a && !b).collect();
        DegeneracySubset { domain: self.domain.clone(), members }
    }

    pub fn union(&self, other: &DegeneracySubset) -> DegeneracySubset {
        let members = self.members.iter().zip(&other.members).map(|(&a, &b)| a || b).collect();
        DegeneracySubset { domain: self.domain.clone(), members }
    }

    fn restrict(&self, keep: impl Fn(&HalfVineType) -> bool) -> DegeneracySubset {
        let members = (0..self.members.len()).map(|i| self.members[i] && keep(&self.domain.element(i))).collect();
        DegeneracySubset { domain: self.domain.clone(), members }
    }

    pub fn separating_part(&self) -> DegeneracySubset {
        self.restrict(|x| x.e == 1)
    }

    pub fn non_separating_part(&self) -> DegeneracySubset {
        self.restrict(|x| x.e >= 2)
    }

    /// Pair representatives `i <= comp(i)` contained in the set.
    pub fn pair_representatives(&self) -> Vec<usize> {
        self.domain.pairs().into_iter().filter(|&(i, _)| self.members[i]).map(|(i, _)| i).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        let n = self.domain.n();
        self.indices().into_iter().map(|i| self.domain.element(i).label(n)).collect()
    }
}

impl fmt::Display for DegeneracySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// Failures of complement- and triangle-closure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegsetReport {
    /// Members whose complement is missing.
    pub missing_complements: Vec<usize>,
    /// Triangles with two positions inside the set and one outside.
    pub open_triangles: Vec<usize>,
}

impl DegsetReport {
    pub fn is_ok(&self) -> bool {
        self.missing_complements.is_empty() && self.open_triangles.is_empty()
    }
}

pub fn validate_degset(s: &DegeneracySubset) -> DegsetReport {
    let d = &s.domain;
    let missing_complements = s.indices().into_iter().filter(|&i| !s.contains(d.comp(i))).collect();
    let open_triangles = d
        .triangles()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.0.iter().filter(|&&i| s.contains(i)).count() == 2)
        .map(|(k, _)| k)
        .collect();
    DegsetReport { missing_complements, open_triangles }
}

fn check_same(a: &DegeneracySubset, b: &DegeneracySubset) -> Result<()> {
    if *a.domain != *b.domain {
        return Err(Error::DomainMismatch("degeneracy subsets of different domains".into()));
    }
    Ok(())
}

/// Checks the witness conditions for `D1 >= D2` on `E`; returns the reason of failure.
pub fn witness_failure(d1: &DegeneracySubset, d2: &DegeneracySubset, e: &DegeneracySubset) -> Option<String> {
    let d = &d1.domain;
    if !d1.is_subset(d2) {
        return Some("D1 is not contained in D2".into());
    }
    let diff = d2.minus(d1);
    if !e.is_subset(&diff) {
        return Some("E is not contained in D2 - D1".into());
    }
    for i in diff.indices() {
        let j = d.comp(i);
        if e.contains(i) == e.contains(j) {
            return Some(format!("pair {} / {} is not split by E", d.element(i).label(d.n()), d.element(j).label(d.n())));
        }
    }
    for (k, t) in d.triangles().iter().enumerate() {
        if !t.0.iter().all(|&i| d2.contains(i)) {
            continue;
        }
        let in1 = t.0.iter().filter(|&&i| d1.contains(i)).count();
        let ine = t.0.iter().filter(|&&i| e.contains(i)).count();
        let ok = match in1 {
            1 => ine == 1,
            0 => ine == 1 || ine == 2,
            _ => true,
        };
        if !ok {
            return Some(format!("triangle {k} meets E in {ine} positions with {in1} positions in D1"));
        }
    }
    None
}

pub fn is_witness(d1: &DegeneracySubset, d2: &DegeneracySubset, e: &DegeneracySubset) -> bool {
    witness_failure(d1, d2, e).is_none()
}

struct WitnessSearch<'a> {
    d1: &'a DegeneracySubset,
    pairs: Vec<(usize, usize)>,
    checks: Vec<Vec<usize>>,
}

impl<'a> WitnessSearch<'a> {
    /// `None` when a self-complementary element lies in `D2 - D1`.
    fn new(d1: &'a DegeneracySubset, d2: &'a DegeneracySubset) -> Option<Self> {
        let d = &d1.domain;
        let diff = d2.minus(d1);
        let pairs: Vec<(usize, usize)> = d.pairs().into_iter().filter(|&(i, _)| diff.contains(i)).collect();
        if pairs.iter().any(|&(i, j)| i == j) {
            return None;
        }
        let mut step_of = vec![usize::MAX; d.len()];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            step_of[i] = k;
            step_of[j] = k;
        }
        let mut checks = vec![Vec::new(); pairs.len()];
        for (t, tri) in d.triangles().iter().enumerate() {
            if !tri.0.iter().all(|&i| d2.contains(i)) {
                continue;
            }
            let in1 = tri.0.iter().filter(|&&i| d1.contains(i)).count();
            if in1 >= 2 {
                continue;
            }
            let last = tri.0.iter().filter(|&&i| !d1.contains(i)).map(|&i| step_of[i]).max().expect("diff member");
            checks[last].push(t);
        }
        Some(WitnessSearch { d1, pairs, checks })
    }

    fn tri_ok(&self, chosen: &[bool], t: usize) -> bool {
        let tri = self.d1.domain.triangles()[t].0;
        let in1 = tri.iter().filter(|&&i| self.d1.contains(i)).count();
        let ine = tri.iter().filter(|&&i| chosen[i]).count();
        match in1 {
            1 => ine == 1,
            _ => ine == 1 || ine == 2,
        }
    }

    fn run(&self, k: usize, chosen: &mut Vec<bool>, budget: &Budget, out: &mut dyn FnMut(&[bool]) -> bool) -> Result<bool> {
        if k == self.pairs.len() {
            return Ok(!out(chosen));
        }
        budget.tick()?;
        let (i, j) = self.pairs[k];
        for (a, b) in [(i, j), (j, i)] {
            chosen[a] = true;
            chosen[b] = false;
            if self.checks[k].iter().all(|&t| self.tri_ok(chosen, t)) && self.run(k + 1, chosen, budget, out)? {
                chosen[a] = false;
                return Ok(true);
            }
            chosen[a] = false;
        }
        Ok(false)
    }
}

/// All witnesses for `D1 >= D2`.
pub fn witnesses(d1: &DegeneracySubset, d2: &DegeneracySubset) -> Result<Vec<DegeneracySubset>> {
    witnesses_with_budget(d1, d2, DEFAULT_SEARCH_BUDGET)
}

pub fn witnesses_with_budget(d1: &DegeneracySubset, d2: &DegeneracySubset, budget: u64) -> Result<Vec<DegeneracySubset>> {
    check_same(d1, d2)?;
    if !d1.is_subset(d2) {
        return Ok(Vec::new());
    }
    let Some(search) = WitnessSearch::new(d1, d2) else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    let budget = Budget::new(budget);
    let mut chosen = vec![false; d1.domain.len()];
    search.run(0, &mut chosen, &budget, &mut |c| {
        out.push(DegeneracySubset { domain: d1.domain.clone(), members: c.to_vec() });
        true
    })?;
    Ok(out)
}

/// One witness for `D1 >= D2`, if any.
pub fn find_witness(d1: &DegeneracySubset, d2: &DegeneracySubset) -> Result<Option<DegeneracySubset>> {
    check_same(d1, d2)?;
    if !d1.is_subset(d2) {
        return Ok(None);
    }
    let Some(search) = WitnessSearch::new(d1, d2) else { return Ok(None) };
    let mut out = None;
    let budget = Budget::new(DEFAULT_SEARCH_BUDGET);
    let mut chosen = vec![false; d1.domain.len()];
    search.run(0, &mut chosen, &budget, &mut |c| {
        out = Some(DegeneracySubset { domain: d1.domain.clone(), members: c.to_vec() });
        false
    })?;
    Ok(out)
}

/// `D1 ⊆ D2` and a witness exists, i.e. `D1 >= D2` in the degeneracy order.
pub fn deg_leq(d1: &DegeneracySubset, d2: &DegeneracySubset) -> Result<bool> {
    Ok(find_witness(d1, d2)?.is_some())
}

/// The witness `{x ∈ D : j ∈ A}` for `∅ >= D`, `n >= 1`.
pub fn mark_witness(dd: &DegeneracySubset, j: u32) -> Result<DegeneracySubset> {
    let d = dd.domain.clone();
    if j == 0 || j > d.n() {
        return Err(Error::InvalidArgument(format!("mark {j} outside 1..={}", d.n())));
    }
    let idx: Vec<usize> = dd.indices().into_iter().filter(|&i| d.element(i).a >> (j - 1) & 1 == 1).collect();
    Ok(DegeneracySubset::from_indices(d, &idx))
}

/// `f2 + χ_E`, checked to be valid with degeneracy set `D1`.
pub fn lift(f2: &VFunction, d1: &DegeneracySubset, e: &DegeneracySubset) -> Result<VFunction> {
    let d2 = f2.degeneracy_set();
    check_same(d1, &d2)?;
    if let Some(why) = witness_failure(d1, &d2, e) {
        return Err(Error::InvalidWitness(why));
    }
    let delta: Vec<i64> = (0..f2.domain().len()).map(|i| e.contains(i) as i64).collect();
    let f1 = f2.shifted(&delta);
    let report = f1.validate();
    if !report.is_ok() {
        return Err(Error::InvalidVFunction(report.describe(f1.domain()).join("; ")));
    }
    if f1.degeneracy_set() != *d1 {
        return Err(Error::InvalidWitness("lift has the wrong degeneracy set".into()));
    }
    Ok(f1)
}

/// Outcome of a bounded realizability search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realizability {
    Realized(VFunction),
    NotRealizable,
    /// The node budget ran out.
    Unknown,
}

/// Separating part with exactly the prescribed degenerate pairs.
fn separating_with(d: &StabilityDomain, s: &DegeneracySubset, chi: i64) -> Option<Part> {
    let mut values = vec![0; d.separating().len()];
    for (i, j) in d.s_pairs() {
        let deg = s.contains(i);
        if i == j {
            let ex = if deg { 0 } else { 1 };
            if (chi + ex) % 2 != 0 {
                return None;
            }
            values[d.part_position(i)] = (chi + ex) / 2;
        } else {
            values[d.part_position(j)] = chi + if deg { 0 } else { 1 };
        }
    }
    Some(Part { chi, values })
}

/// Searches for a V-function of characteristic `chi` with degeneracy set `D`.
///
/// The non-separating part is searched in the normalized box widened by 1
/// over every compatible characteristic, then translated to `chi`.
pub fn is_realizable(dd: &DegeneracySubset, chi: i64, budget: u64) -> Result<Realizability> {
    let d = dd.domain.clone();
    if !validate_degset(dd).is_ok() {
        return Ok(Realizability::NotRealizable);
    }
    let Some(s) = separating_with(&d, &dd.separating_part(), chi) else {
        return Ok(Realizability::NotRealizable);
    };
    if d.non_separating().is_empty() {
        let f = VFunction::join(d.clone(), &s, &Part { chi, values: Vec::new() })?;
        return Ok(Realizability::Realized(f));
    }
    let slack = 1;
    let (lo, hi) = box_bounds(&d, slack);
    let fixed = |i: usize| if dd.contains(i) { 0 } else { 1 };
    let search = PairSearch::new(&d, lo, hi, Some(&fixed));
    let b = Budget::new(budget);
    let q = 2 * d.g() as i64 - 2;
    for chi0 in chi_range(&d, slack) {
        // Translating from chi0 to chi: α_1 when n >= 1, β when n = 0.
        if d.n() == 0 && (q == 0 || (chi - chi0) % q != 0) {
            continue;
        }
        let mut found = None;
        let mut values = vec![0; d.len()];
        let r = search.run(chi0, &mut values, &b, &mut |v| {
            found = Some(v.to_vec());
            false
        });
        match r {
            Err(Error::BudgetExceeded(_)) => return Ok(Realizability::Unknown),
            Err(e) => return Err(e),
            Ok(_) => {}
        }
        if let Some(v) = found {
            let ns0 = Part { chi: chi0, values: d.non_separating().iter().map(|&i| v[i]).collect() };
            let mut shift = vec![0; d.len()];
            for &i in d.non_separating() {
                let x = d.element(i);
                shift[i] = if d.n() == 0 {
                    (chi - chi0) / q * (2 * x.h as i64 - 2 + x.e as i64)
                } else {
                    (x.a & 1) as i64 * (chi - chi0)
                };
            }
            let f0 = VFunction::join(d.clone(), &Part { chi: chi0, values: s.values.clone() }, &ns0)?;
            let ns_shifted: Vec<i64> = d.non_separating().iter().map(|&i| f0.value(i) + shift[i]).collect();
            let f = VFunction::join(d.clone(), &s, &Part { chi, values: ns_shifted })?;
            debug_assert!(f.is_valid() && f.degeneracy_set() == *dd);
            return Ok(Realizability::Realized(f));
        }
    }
    Ok(Realizability::NotRealizable)
}

/// `W_δ`: unmarked non-separating elements whose log-canonical degree is a
/// multiple of `δ`, with their complements.
pub fn wall_w(delta: i64, d: Arc<StabilityDomain>) -> Result<DegeneracySubset> {
    if delta < 1 || delta > d.total_degree() {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside 1..={}", d.total_degree())));
    }
    let idx: Vec<usize> = d
        .non_separating()
        .iter()
        .copied()
        .filter(|&i| {
            let x = d.element(i);
            x.a == 0 && (2 * x.h as i64 - 2 + x.e as i64) % delta == 0
        })
        .collect();
    Ok(DegeneracySubset::from_pairs(d, &idx))
}

/// `W_(A,δ)`: the pairs of `(e;h,A)` with `e >= 2` and `2h-2+e = δ-|A|`.
pub fn wall_w_mixed(a: Mask, delta: i64, d: Arc<StabilityDomain>) -> Result<DegeneracySubset> {
    let n = d.n();
    if a == 0 || a == full_mask(n) || a & !full_mask(n) != 0 {
        return Err(Error::InvalidArgument("mixed walls need a proper nonempty mark set".into()));
    }
    let k = a.count_ones() as i64;
    if delta < k || delta > 2 * d.g() as i64 - 2 + k {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside {k}..={}", 2 * d.g() as i64 - 2 + k)));
    }
    let idx: Vec<usize> = d
        .non_separating()
        .iter()
        .copied()
        .filter(|&i| {
            let x = d.element(i);
            x.a == a && 2 * x.h as i64 - 2 + x.e as i64 == delta - k
        })
        .collect();
    Ok(DegeneracySubset::from_pairs(d, &idx))
}

/// The submaximal degeneracy subsets for `n >= 1`, in a fixed order:
/// separating pairs, mixed pairs, unmixed pairs, then `W_1..W_(g-1)`.
pub fn enumerate_submaximal(d: Arc<StabilityDomain>) -> Result<Vec<DegeneracySubset>> {
    let n = d.n();
    if n == 0 {
        return Err(Error::InvalidArgument("the submaximal classification needs n >= 1".into()));
    }
    let full = full_mask(n);
    let mut out = Vec::new();
    for (i, _) in d.s_pairs() {
        out.push(DegeneracySubset::from_pairs(d.clone(), &[i]));
    }
    for (i, _) in d.ns_pairs() {
        let x = d.element(i);
        if x.a != 0 && x.a != full {
            out.push(DegeneracySubset::from_pairs(d.clone(), &[i]));
        }
    }
    for (i, j) in d.ns_pairs() {
        let (x, y) = (d.element(i), d.element(j));
        let unmarked = if x.a == 0 {
            Some(x)
        } else if y.a == 0 {
            Some(y)
        } else {
            None
        };
        if let Some(u) = unmarked {
            if 2 * u.h as i64 - 2 + u.e as i64 >= d.g() as i64 {
                out.push(DegeneracySubset::from_pairs(d.clone(), &[i]));
            }
        }
    }
    for delta in 1..d.g() as i64 {
        out.push(wall_w(delta, d.clone())?);
    }
    Ok(out)
}

/// The V-function of characteristic 0 realizing the mixed pair `{x, x^c}`.
pub fn mixed_wall_sigma(d: Arc<StabilityDomain>, x: usize) -> Result<VFunction> {
    let xe = d.element(x);
    let full = full_mask(d.n());
    if xe.e < 2 || xe.a == 0 || xe.a == full {
        return Err(Error::InvalidArgument(format!("{} is not a mixed element", xe.label(d.n()))));
    }
    let j = (full & !xe.a).trailing_zeros();
    let dx = xe.delta();
    let mut values = vec![0; d.len()];
    values[x] = 1;
    values[d.comp(x)] = -1;
    for i in 0..d.len() {
        let y = d.element(i);
        if y.a >> j & 1 == 1 || i == x || i == d.comp(x) {
            continue;
        }
        let v = crate::vfunction::ceil_div(y.delta(), dx);
        values[i] = v;
        values[d.comp(i)] = 1 - v;
    }
    VFunction::new(d, 0, values)
}

/// Non-separating degeneracy sets of all normalized functions.
pub fn realizable_ns_sets(d: Arc<StabilityDomain>, budget: u64) -> Result<Vec<DegeneracySubset>> {
    let parts = enumerate_normalized(&d, budget)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in parts {
        let f = VFunction::from_ns(d.clone(), &p)?;
        let s = f.degeneracy_set().non_separating_part();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out.sort_by_key(|s| (s.len(), s.indices()));
    Ok(out)
}

/// Realizable sets of the full domain: realizable non-separating parts
/// times arbitrary sets of separating pairs (no parity constraint for `n >= 1`).
pub fn realizable_sets(d: Arc<StabilityDomain>, budget: u64) -> Result<Vec<DegeneracySubset>> {
    if d.n() == 0 {
        return Err(Error::InvalidArgument("realizable_sets is implemented for n >= 1".into()));
    }
    let ns = realizable_ns_sets(d.clone(), budget)?;
    let sp: Vec<usize> = d.s_pairs().into_iter().map(|(i, _)| i).collect();
    if sp.len() > 16 {
        return Err(Error::InvalidArgument("too many separating pairs".into()));
    }
    let mut out = Vec::new();
    for s in &ns {
        for m in 0u32..(1 << sp.len()) {
            let pick: Vec<usize> = (0..sp.len()).filter(|&k| m >> k & 1 == 1).map(|k| sp[k]).collect();
            out.push(s.union(&DegeneracySubset::from_pairs(d.clone(), &pick)));
        }
    }
    Ok(out)
}

/// Height-one elements of the realizable poset, found by pairwise witness search.
pub fn submaximal_by_search(d: Arc<StabilityDomain>, budget: u64) -> Result<Vec<DegeneracySubset>> {
    let all = realizable_sets(d, budget)?;
    let res: Vec<Result<Option<DegeneracySubset>>> = all
        .par_iter()
        .map(|s| {
            if s.is_empty() {
                return Ok(None);
            }
            for t in &all {
                if !t.is_empty() && t != s && t.is_subset(s) && deg_leq(t, s)? {
                    return Ok(None);
                }
            }
            Ok(Some(s.clone()))
        })
        .collect();
    let mut out = Vec::new();
    for r in res {
        out.extend(r?);
    }
    Ok(out)
}

/// Classification of a non-separating degeneracy subset at `n = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum N1Class {
    Empty,
    W(i64),
    /// `D = D(A)` for the antichain `A` of primitives (element indices).
    Antichain(Vec<usize>),
    NotRealizable,
}

fn require_n1(d: &StabilityDomain) -> Result<()> {
    if d.n() != 1 {
        return Err(Error::InvalidArgument("this operation needs n = 1".into()));
    }
    Ok(())
}

/// `δ(D)`: the minimum log-canonical degree over primitives in `D`.
pub fn n1_delta(dd: &DegeneracySubset) -> Option<i64> {
    dd.domain.primitives().into_iter().filter(|&i| dd.contains(i)).map(|i| dd.domain.element(i).delta()).min()
}

pub fn is_antichain(d: &StabilityDomain, a: &[usize]) -> Result<bool> {
    for (p, &x) in a.iter().enumerate() {
        for &y in &a[p + 1..] {
            let (ex, ey) = (d.element(x), d.element(y));
            if primitive_leq(&ex, &ey)? || primitive_leq(&ey, &ex)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classifies the non-separating part of `D`.
pub fn n1_classify(dd: &DegeneracySubset) -> Result<N1Class> {
    let d = dd.domain.clone();
    require_n1(&d)?;
    let ns = dd.non_separating_part();
    if !validate_degset(&ns).is_ok() {
        return Err(Error::InvalidArgument("not complement- and triangle-closed".into()));
    }
    let Some(delta) = n1_delta(&ns) else { return Ok(N1Class::Empty) };
    let g = d.g() as i64;
    if delta < g {
        return Ok(if wall_w(delta, d)? == ns { N1Class::W(delta) } else { N1Class::NotRealizable });
    }
    let prim: Vec<usize> = d.primitives().into_iter().filter(|&i| ns.contains(i)).collect();
    Ok(if is_antichain(&d, &prim)? { N1Class::Antichain(prim) } else { N1Class::NotRealizable })
}

/// `D(A) = A ⊔ Ã` for an antichain of primitives.
pub fn d_of_antichain(d: Arc<StabilityDomain>, a: &[usize]) -> DegeneracySubset {
    DegeneracySubset::from_pairs(d, a)
}

/// Height of `D` at `n = 1`: from the non-separating class, plus one per separating pair.
pub fn n1_height(dd: &DegeneracySubset) -> Result<usize> {
    let s = dd.separating_part().pair_representatives().len();
    let h = match n1_classify(dd)? {
        N1Class::Empty => 0,
        N1Class::W(_) => 1,
        N1Class::Antichain(a) => a.len(),
        N1Class::NotRealizable => {
            return Err(Error::InvalidArgument(format!("{dd} is not realizable")));
        }
    };
    Ok(h + s)
}

/// `σ_A` at `n = 1` with a general separating part: `τ_A` on primitives and
/// the complementary values forced by `D(A)`.
pub fn antichain_sigma(d: Arc<StabilityDomain>, a: &[usize], chi: i64) -> Result<VFunction> {
    require_n1(&d)?;
    let g = d.g() as i64;
    for &x in a {
        let e = d.element(x);
        if !is_primitive(&e) || e.delta() < g {
            return Err(Error::InvalidArgument(format!("{} is not a primitive of degree >= g", e.label(1))));
        }
    }
    if !is_antichain(&d, a)? {
        return Err(Error::InvalidArgument("not an antichain".into()));
    }
    let mut values = vec![0; d.len()];
    for p in d.primitives() {
        let x = d.element(p);
        let mut above = false;
        for &y in a {
            let ye = d.element(y);
            if ye != x && primitive_leq(&ye, &x)? {
                above = true;
            }
        }
        let tau = if above { 2 } else { 1 };
        values[p] = tau;
        values[d.comp(p)] = if a.contains(&p) { chi - tau } else { chi + 1 - tau };
    }
    let ns = Part { chi, values: d.non_separating().iter().map(|&i| values[i]).collect() };
    VFunction::from_ns(d, &ns)
}

/// Antichains of primitives of degree at least `g`, in a fixed order.
pub fn antichains_geq_g(d: &StabilityDomain) -> Result<Vec<Vec<usize>>> {
    require_n1(d)?;
    let big: Vec<usize> = d.primitives().into_iter().filter(|&i| d.element(i).delta() >= d.g() as i64).collect();
    let mut out = vec![Vec::new()];
    fn grow(d: &StabilityDomain, big: &[usize], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        for k in start..big.len() {
            let y = d.element(big[k]);
            let mut ok = true;
            for &x in cur.iter() {
                let xe = d.element(x);
                if primitive_leq(&xe, &y)? || primitive_leq(&y, &xe)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                cur.push(big[k]);
                out.push(cur.clone());
                grow(d, big, k + 1, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    grow(d, &big, 0, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// One step of a height-one path: `from > via < to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightOneStep {
    pub from: VFunction,
    pub via: VFunction,
    pub to: VFunction,
}

/// Outcome of the connectivity search.
#[derive(Clone, Debug)]
pub struct Connectivity {
    pub connected: bool,
    /// For each sample element, a path from the first sample element (when reached).
    pub paths: Vec<Option<Vec<HeightOneStep>>>,
    pub explored: usize,
}

/// Neighbors of a general `f` across one submaximal set: for each submaximal
/// `D` with witnesses `E1, E2` over `∅`, `f - χ_E1 + χ_E2` when `f - χ_E1`
/// realizes `D`.
fn height_one_moves(
    f: &VFunction,
    walls: &[(DegeneracySubset, Vec<DegeneracySubset>)],
) -> Vec<(VFunction, VFunction)> {
    let d = f.domain();
    let mut out = Vec::new();
    for (wall, ws) in walls {
        for (a, e1) in ws.iter().enumerate() {
            let down: Vec<i64> = (0..d.len()).map(|i| -(e1.contains(i) as i64)).collect();
            let y = f.shifted(&down);
            if !y.is_valid() || y.degeneracy_set() != *wall {
                continue;
            }
            for (b, e2) in ws.iter().enumerate() {
                if a == b {
                    continue;
                }
                let up: Vec<i64> = (0..d.len()).map(|i| e2.contains(i) as i64).collect();
                out.push((y.clone(), y.shifted(&up)));
            }
        }
    }
    out
}

/// Breadth-first search through height-one moves from `sample[0]`.
pub fn connected_through_height_one(sample: &[VFunction], budget: usize) -> Result<Connectivity> {
    let Some(first) = sample.first() else {
        return Ok(Connectivity { connected: true, paths: Vec::new(), explored: 0 });
    };
    let d = first.domain().clone();
    for f in sample {
        if **f.domain() != *d || f.chi() != first.chi() {
            return Err(Error::DomainMismatch("sample functions must share domain and characteristic".into()));
        }
        if !f.is_valid() || !f.is_general() {
            return Err(Error::InvalidArgument("sample functions must be valid and general".into()));
        }
    }
    let mut walls = Vec::new();
    let empty = DegeneracySubset::empty(d.clone());
    for w in enumerate_submaximal(d.clone())? {
        let ws = witnesses(&empty, &w)?;
        walls.push((w, ws));
    }
    let targets: HashMap<&VFunction, usize> = sample.iter().enumerate().map(|(k, f)| (f, k)).collect();
    let mut parent: HashMap<VFunction, Option<(VFunction, VFunction)>> = HashMap::new();
    parent.insert(first.clone(), None);
    let mut queue = VecDeque::from([first.clone()]);
    let mut remaining: BTreeSet<usize> = (1..sample.len()).filter(|&k| sample[k] != *first).collect();
    while let Some(f) = queue.pop_front() {
        if remaining.is_empty() || parent.len() > budget {
            break;
        }
        for (y, h) in height_one_moves(&f, &walls) {
            if parent.contains_key(&h) {
                continue;
            }
            parent.insert(h.clone(), Some((f.clone(), y)));
            if let Some(&k) = targets.get(&h) {
                remaining.remove(&k);
            }
            queue.push_back(h);
        }
    }
    let explored = parent.len();
    let paths = sample
        .iter()
        .map(|t| {
            parent.get(t)?;
            let mut steps = Vec::new();
            let mut cur = t.clone();
            while let Some(Some((prev, via))) = parent.get(&cur) {
                steps.push(HeightOneStep { from: prev.clone(), via: via.clone(), to: cur.clone() });
                cur = prev.clone();
            }
            steps.reverse();
            Some(steps)
        })
        .collect::<Vec<_>>();
    let connected = paths.iter().all(|p| p.is_some());
    Ok(Connectivity { connected, paths, explored })
}

/// A family of subsets of `[n]`, sorted as integer lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DynkinSystem {
    pub n: u32,
    pub sets: Vec<Mask>,
}

impl DynkinSystem {
    pub fn new(n: u32, mut sets: Vec<Mask>) -> Self {
        sets.sort_by(|a, b| crate::domain::cmp_subsets(*a, *b));
        sets.dedup();
        DynkinSystem { n, sets }
    }

    /// Contains `∅`, closed under complement and under disjoint union.
    pub fn is_dynkin(&self) -> bool {
        let full = full_mask(self.n);
        let set: HashSet<Mask> = self.sets.iter().copied().collect();
        set.contains(&0)
            && self.sets.iter().all(|&a| a & !full == 0 && set.contains(&(full & !a)))
            && self.sets.iter().all(|&a| self.sets.iter().all(|&b| a & b != 0 || set.contains(&(a | b))))
    }
}

fn require_g1(d: &StabilityDomain) -> Result<()> {
    if d.g() != 1 {
        return Err(Error::InvalidArgument("this operation needs g = 1".into()));
    }
    Ok(())
}

/// `{A : (2;0,A) ∈ D} ∪ {∅, [n]}`.
pub fn to_dynkin(dd: &DegeneracySubset) -> Result<DynkinSystem> {
    let d = &dd.domain;
    require_g1(d)?;
    let mut sets = vec![0, full_mask(d.n())];
    for i in dd.non_separating_part().indices() {
        sets.push(d.element(i).a);
    }
    Ok(DynkinSystem::new(d.n(), sets))
}

/// Inverse of [`to_dynkin`] on the non-separating part.
pub fn from_dynkin(sys: &DynkinSystem, d: Arc<StabilityDomain>) -> Result<DegeneracySubset> {
    require_g1(&d)?;
    if sys.n != d.n() {
        return Err(Error::DomainMismatch(format!("family on [{}] for n = {}", sys.n, d.n())));
    }
    if !sys.is_dynkin() {
        return Err(Error::InvalidArgument("family is not a Dynkin system".into()));
    }
    let full = full_mask(d.n());
    let mut idx = Vec::new();
    for &a in &sys.sets {
        if a != 0 && a != full {
            idx.push(d.require(&HalfVineType::new(2, 0, a))?);
        }
    }
    Ok(DegeneracySubset::from_indices(d, &idx))
}

/// All Dynkin systems on `[n]` (`n <= 4`), sorted.
pub fn enumerate_dynkin(n: u32) -> Result<Vec<DynkinSystem>> {
    if n > 4 {
        return Err(Error::InvalidArgument("Dynkin enumeration is limited to n <= 4".into()));
    }
    let full = full_mask(n);
    // Complementary pairs {A, A^c} with A < A^c; each system is a union of pairs.
    let pairs: Vec<Mask> = (0..=full).filter(|&a| a < (full & !a) || (n == 0 && a == 0)).collect();
    let mut out = Vec::new();
    for m in 0u64..(1 << pairs.len()) {
        let mut sets = Vec::new();
        for (k, &a) in pairs.iter().enumerate() {
            if m >> k & 1 == 1 {
                sets.push(a);
                sets.push(full & !a);
            }
        }
        let sys = DynkinSystem::new(n, sets);
        if sys.is_dynkin() {
            out.push(sys);
        }
    }
    out.sort_by(|a, b| a.sets.len().cmp(&b.sets.len()).then_with(|| a.sets.cmp(&b.sets)));
    Ok(out)
}

/// The mildly superadditive function of a genus-one V-function, indexed by mask:
/// `f(∅) = 0`, `f([n]) = χ`, `f(A) = σ(2;0,A)`.
pub fn msa_of(f: &VFunction) -> Result<Vec<i64>> {
    let d = f.domain();
    require_g1(d)?;
    let full = full_mask(d.n());
    let mut out = vec![0; 1 << d.n()];
    out[full as usize] = f.chi();
    for a in 1..full {
        out[a as usize] = f.value_of(&HalfVineType::new(2, 0, a))?;
    }
    Ok(out)
}

/// `φ^S` on `(1,6)` at `χ = 2`: 2 on `|A| >= 4` and on `S`, 1 on the other
/// nonempty proper subsets. The separating part is the fixed general one.
pub fn phi_s(d: Arc<StabilityDomain>, s: &[Mask]) -> Result<VFunction> {
    if d.g() != 1 || d.n() != 6 {
        return Err(Error::InvalidArgument("phi_S lives on the domain (1,6)".into()));
    }
    let full = full_mask(6);
    let chosen: HashSet<Mask> = s.iter().copied().collect();
    for &a in s {
        if a.count_ones() != 3 || a & !full != 0 {
            return Err(Error::InvalidArgument(format!("{a:#b} is not a 3-subset of [6]")));
        }
        if chosen.contains(&(full & !a)) {
            return Err(Error::InvalidArgument("S meets its complement family".into()));
        }
    }
    let ns: Vec<i64> = d
        .non_separating()
        .iter()
        .map(|&i| {
            let a = d.element(i).a;
            if a.count_ones() >= 4 || chosen.contains(&a) {
                2
            } else {
                1
            }
        })
        .collect();
    VFunction::from_ns(d, &Part { chi: 2, values: ns })
}

/// The ten 3-subsets of `[6]` containing 1, one per complementary pair.
pub fn phi_pairs() -> Vec<Mask> {
    (0..64u64).filter(|&a| a.count_ones() == 3 && a & 1 == 1).collect()
}

/// All `S` with `S ∩ S̄ = ∅`, as choices in `{none, A, A^c}` per pair.
pub fn all_phi_choices() -> Vec<Vec<Mask>> {
    let pairs = phi_pairs();
    let full = full_mask(6);
    let total = 3usize.pow(pairs.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut s = Vec::new();
            for &a in &pairs {
                match code % 3 {
                    1 => s.push(a),
                    2 => s.push(full & !a),
                    _ => {}
                }
                code /= 3;
            }
            s
        })
        .collect()
}
