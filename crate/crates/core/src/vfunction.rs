//! V-functions: validation, degeneracy, order, up-sets and the canonical family.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;

use crate::degposet::DegeneracySubset;
use crate::domain::{HalfVineType, StabilityDomain};
use crate::error::{Error, Result};

/// Default node budget for up-set enumeration.
pub const DEFAULT_UPSET_BUDGET: u64 = 5_000_000;

/// An integer function on a stability domain with a declared characteristic.
#[derive(Clone, Debug)]
pub struct VFunction {
    domain: Arc<StabilityDomain>,
    chi: i64,
    values: Vec<i64>,
}

impl PartialEq for VFunction {
    fn eq(&self, other: &Self) -> bool {
        *self.domain == *other.domain && self.chi == other.chi && self.values == other.values
    }
}

impl Eq for VFunction {}

impl Hash for VFunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.domain.g().hash(state);
        self.domain.n().hash(state);
        self.chi.hash(state);
        self.values.hash(state);
    }
}

/// Result of comparing two V-functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRelation {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// A violated clause of the V-function conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `σ(x)+σ(x^c)-χ` (or `2σ(x)-χ`) is outside `{0,1}`.
    Pair { element: usize, excess: i64 },
    /// Two positions of the triangle are degenerate but the third is not.
    TwoDegenerate { triangle: usize },
    /// The triangle sum minus `χ` is outside the allowed set.
    TriangleSum { triangle: usize, degenerate: usize, excess: i64 },
}

/// Exhaustive list of violations; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Human-readable lines, one per violation.
    pub fn describe(&self, d: &StabilityDomain) -> Vec<String> {
        let lbl = |i: usize| d.element(i).label(d.n());
        self.violations
            .iter()
            .map(|v| match v {
                Violation::Pair { element, excess } => format!(
                    "pair {} / {}: sum - chi = {excess}, expected 0 or 1",
                    lbl(*element),
                    lbl(d.comp(*element))
                ),
                Violation::TwoDegenerate { triangle } => {
                    let t = d.triangles()[*triangle].0;
                    format!(
                        "triangle [{}, {}, {}]: two degenerate members force the third",
                        lbl(t[0]),
                        lbl(t[1]),
                        lbl(t[2])
                    )
                }
                Violation::TriangleSum { triangle, degenerate, excess } => {
                    let t = d.triangles()[*triangle].0;
                    let allowed = match degenerate {
                        0 => "1 or 2",
                        1 => "1",
                        _ => "0",
                    };
                    format!(
                        "triangle [{}, {}, {}]: sum - chi = {excess} with {degenerate} degenerate, expected {allowed}",
                        lbl(t[0]),
                        lbl(t[1]),
                        lbl(t[2])
                    )
                }
            })
            .collect()
    }
}

/// Values of one part (separating or non-separating) of a V-function,
/// indexed like `StabilityDomain::separating` or `non_separating`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub chi: i64,
    pub values: Vec<i64>,
}

/// `⌈p/q⌉` for `q > 0`.
pub fn ceil_div(p: i64, q: i64) -> i64 {
    debug_assert!(q > 0);
    Integer::div_ceil(&p, &q)
}

impl VFunction {
    pub fn new(domain: Arc<StabilityDomain>, chi: i64, values: Vec<i64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DomainMismatch(format!(
                "{} values for a domain of {} elements",
                values.len(),
                domain.len()
            )));
        }
        Ok(VFunction { domain, chi, values })
    }

    /// Builds a function and rejects it unless it validates.
    pub fn checked(domain: Arc<StabilityDomain>, chi: i64, values: Vec<i64>) -> Result<Self> {
        let f = Self::new(domain, chi, values)?;
        let report = f.validate();
        if !report.is_ok() {
            return Err(Error::InvalidVFunction(report.describe(&f.domain).join("; ")));
        }
        Ok(f)
    }

    pub fn domain(&self) -> &Arc<StabilityDomain> {
        &self.domain
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> i64 {
        self.values[i]
    }

    pub fn value_of(&self, x: &HalfVineType) -> Result<i64> {
        Ok(self.values[self.domain.require(x)?])
    }

    /// `σ(x)+σ(x^c)-χ`, or `2σ(x)-χ` on a self-complementary element.
    pub fn pair_excess(&self, i: usize) -> i64 {
        let j = self.domain.comp(i);
        if i == j {
            2 * self.values[i] - self.chi
        } else {
            self.values[i] + self.values[j] - self.chi
        }
    }

    pub fn is_degenerate_at(&self, i: usize) -> bool {
        self.pair_excess(i) == 0
    }

    /// Checks the pair and triangle conditions and lists every violation.
    pub fn validate(&self) -> ValidationReport {
        let d = &self.domain;
        let mut violations = Vec::new();
        for (i, _) in d.pairs() {
            let ex = self.pair_excess(i);
            if ex != 0 && ex != 1 {
                violations.push(Violation::Pair { element: i, excess: ex });
            }
        }
        for (t, tri) in d.triangles().iter().enumerate() {
            let deg = tri.0.iter().filter(|&&i| self.is_degenerate_at(i)).count();
            let excess = tri.0.iter().map(|&i| self.values[i]).sum::<i64>() - self.chi;
            match deg {
                2 => violations.push(Violation::TwoDegenerate { triangle: t }),
                0 if excess == 1 || excess == 2 => {}
                1 if excess == 1 => {}
                3 if excess == 0 => {}
                _ => violations.push(Violation::TriangleSum { triangle: t, degenerate: deg, excess }),
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn degeneracy_set(&self) -> DegeneracySubset {
        let members = (0..self.domain.len()).filter(|&i| self.is_degenerate_at(i)).collect::<Vec<_>>();
        DegeneracySubset::from_indices(self.domain.clone(), &members)
    }

    pub fn is_general(&self) -> bool {
        (0..self.domain.len()).all(|i| !self.is_degenerate_at(i))
    }

    /// The partial order: same characteristic and pointwise comparison.
    pub fn compare(&self, other: &VFunction) -> Result<OrderRelation> {
        if *self.domain != *other.domain {
            return Err(Error::DomainMismatch("comparing functions on different domains".into()));
        }
        if self.chi != other.chi {
            return Ok(OrderRelation::Incomparable);
        }
        let (mut ge, mut le) = (true, true);
        for (a, b) in self.values.iter().zip(&other.values) {
            ge &= a >= b;
            le &= a <= b;
        }
        Ok(match (ge, le) {
            (true, true) => OrderRelation::Equal,
            (true, false) => OrderRelation::Greater,
            (false, true) => OrderRelation::Less,
            (false, false) => OrderRelation::Incomparable,
        })
    }

    /// `self >= other` in the poset.
    pub fn geq(&self, other: &VFunction) -> bool {
        matches!(self.compare(other), Ok(OrderRelation::Greater | OrderRelation::Equal))
    }

    /// Separating and non-separating parts.
    pub fn split(&self) -> (Part, Part) {
        let d = &self.domain;
        let s = d.separating().iter().map(|&i| self.values[i]).collect();
        let ns = d.non_separating().iter().map(|&i| self.values[i]).collect();
        (Part { chi: self.chi, values: s }, Part { chi: self.chi, values: ns })
    }

    /// Inverse of [`VFunction::split`].
    pub fn join(domain: Arc<StabilityDomain>, s: &Part, ns: &Part) -> Result<Self> {
        if s.chi != ns.chi {
            return Err(Error::ChiMismatch(s.chi, ns.chi));
        }
        if s.values.len() != domain.separating().len() || ns.values.len() != domain.non_separating().len() {
            return Err(Error::DomainMismatch("part sizes do not match the domain".into()));
        }
        let mut values = vec![0; domain.len()];
        for (k, &i) in domain.separating().iter().enumerate() {
            values[i] = s.values[k];
        }
        for (k, &i) in domain.non_separating().iter().enumerate() {
            values[i] = ns.values[k];
        }
        Self::new(domain, s.chi, values)
    }

    /// A fixed general separating part: `0` on the first element of each
    /// pair, `χ+1` on the second, `⌈χ/2⌉` on a self-complementary element.
    pub fn general_separating(domain: &StabilityDomain, chi: i64) -> Part {
        let mut values = vec![0; domain.separating().len()];
        for (i, j) in domain.s_pairs() {
            if i == j {
                values[domain.part_position(i)] = ceil_div(chi, 2);
            } else {
                values[domain.part_position(i)] = 0;
                values[domain.part_position(j)] = chi + 1;
            }
        }
        Part { chi, values }
    }

    /// Joins a non-separating part with [`VFunction::general_separating`].
    pub fn from_ns(domain: Arc<StabilityDomain>, ns: &Part) -> Result<Self> {
        let s = Self::general_separating(&domain, ns.chi);
        Self::join(domain, &s, ns)
    }

    /// Adds `delta[i]` to the value at `i`, keeping `χ`.
    pub fn shifted(&self, delta: &[i64]) -> VFunction {
        let values = self.values.iter().zip(delta).map(|(v, d)| v + d).collect();
        VFunction { domain: self.domain.clone(), chi: self.chi, values }
    }

    pub fn with_values(&self, chi: i64, values: Vec<i64>) -> VFunction {
        VFunction { domain: self.domain.clone(), chi, values }
    }

    /// All valid `τ >= σ`: each degenerate pair is left alone or raised on
    /// one side by 1, then the candidates are validated.
    pub fn upset(&self) -> Result<Vec<VFunction>> {
        self.upset_with_budget(DEFAULT_UPSET_BUDGET)
    }

    pub fn upset_with_budget(&self, budget: u64) -> Result<Vec<VFunction>> {
        let (pairs, valid) = self.upset_table(budget)?;
        Ok(valid
            .iter()
            .enumerate()
            .filter(|(_, &ok)| ok)
            .map(|(code, _)| self.raised(&pairs, code))
            .collect())
    }

    /// Degenerate non-self-complementary pairs and, for every base-3 code
    /// (digit `k`: pair `k` untouched, raised at its first or its second
    /// element), whether the raised function is valid.
    fn upset_table(&self, budget: u64) -> Result<UpsetTable> {
        let pairs: Vec<(usize, usize)> = self
            .domain
            .pairs()
            .into_iter()
            .filter(|&(i, j)| i != j && self.is_degenerate_at(i))
            .collect();
        if 3f64.powi(pairs.len() as i32) > budget as f64 {
            return Err(Error::BudgetExceeded(budget));
        }
        let size = 3usize.pow(pairs.len() as u32);
        let valid = (0..size).into_par_iter().map(|code| self.raised(&pairs, code).is_valid()).collect();
        Ok((pairs, valid))
    }

    fn raised(&self, pairs: &[(usize, usize)], mut code: usize) -> VFunction {
        let mut values = self.values.clone();
        for &(i, j) in pairs {
            match code % 3 {
                1 => values[i] += 1,
                2 => values[j] += 1,
                _ => {}
            }
            code /= 3;
        }
        self.with_values(self.chi, values)
    }

    /// Length of the longest strictly ascending chain starting at `σ`.
    pub fn height(&self) -> Result<usize> {
        self.height_with_budget(DEFAULT_UPSET_BUDGET)
    }

    /// Dynamic program over raise codes: `t[c]` is the longest chain of valid
    /// codes containing `c` digit-wise, counted in elements.
    pub fn height_with_budget(&self, budget: u64) -> Result<usize> {
        let (pairs, valid) = self.upset_table(budget)?;
        let pow3: Vec<usize> = (0..pairs.len()).map(|k| 3usize.pow(k as u32)).collect();
        let mut t = vec![0u32; valid.len()];
        let mut above = 0;
        for c in (0..valid.len()).rev() {
            above = 0;
            for &p in &pow3 {
                if (c / p) % 3 == 0 {
                    above = above.max(t[c + p]).max(t[c + 2 * p]);
                }
            }
            t[c] = above + valid[c] as u32;
        }
        Ok(above as usize)
    }

    /// Value of `σ` on a self-describing list, for display.
    pub fn describe(&self) -> String {
        let n = self.domain.n();
        let parts: Vec<String> = (0..self.domain.len())
            .map(|i| format!("{}={}", self.domain.element(i).label(n), self.values[i]))
            .collect();
        format!("chi={} [{}]", self.chi, parts.join(", "))
    }
}

impl fmt::Display for VFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Degenerate pairs and the validity of every raise code.
type UpsetTable = (Vec<(usize, usize)>, Vec<bool>);

/// `σ_g^χ(e;h) = ⌈χ(2h-2+e)/(2g-2)⌉` on the unmarked domain of genus `g`.
pub fn canonical_vfunction(g: u32, chi: i64) -> Result<VFunction> {
    if g < 2 {
        return Err(Error::InvalidArgument(format!("canonical V-function needs g >= 2, got {g}")));
    }
    let d = Arc::new(StabilityDomain::new(g, 0)?);
    let q = 2 * g as i64 - 2;
    let values = d.elements().iter().map(|x| ceil_div(chi * x.delta(), q)).collect();
    VFunction::new(d, chi, values)
}

/// Constant on each log-canonical degree level of the primitive elements.
pub fn is_uniform(f: &VFunction) -> Result<bool> {
    let d = f.domain();
    if d.n() != 1 {
        return Err(Error::InvalidArgument("uniformity is defined for n = 1".into()));
    }
    let mut seen: std::collections::HashMap<i64, i64> = Default::default();
    for i in d.primitives() {
        let delta = d.element(i).delta();
        let v = f.value(i);
        if *seen.entry(delta).or_insert(v) != v {
            return Ok(false);
        }
    }
    Ok(true)
}
