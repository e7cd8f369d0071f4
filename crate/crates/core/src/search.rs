//! Backtracking over non-separating values inside integer boxes, one
//! complementary pair at a time, with triangle checks as soon as a
//! triangle is fully assigned.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::domain::{HalfVineType, StabilityDomain};
use crate::error::{Error, Result};

/// Anchor elements fixed at 0 by normalization: `(3;0,∅)` when `g >= 2`
/// and `(2;0,{i})` for every mark.
pub fn anchors(d: &StabilityDomain) -> Vec<usize> {
    let mut out = Vec::new();
    if d.g() >= 2 {
        out.extend(d.index_of(&HalfVineType::new(3, 0, 0)));
    }
    for i in 0..d.n() {
        out.extend(d.index_of(&HalfVineType::new(2, 0, 1 << i)));
    }
    out
}

/// Lower and upper bounds per element: `-(δ-1)-slack <= σ <= slack` on
/// non-separating elements, `0` on anchors. Separating entries are unused.
pub fn box_bounds(d: &StabilityDomain, slack: i64) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![0; d.len()];
    let mut hi = vec![0; d.len()];
    for &i in d.non_separating() {
        lo[i] = -(d.element(i).delta() - 1) - slack;
        hi[i] = slack;
    }
    for a in anchors(d) {
        lo[a] = 0;
        hi[a] = 0;
    }
    (lo, hi)
}

/// Characteristics compatible with the box: every pair sum lies in
/// `[χ, χ+1]` and in the box's range of sums.
pub fn chi_range(d: &StabilityDomain, slack: i64) -> std::ops::RangeInclusive<i64> {
    let top = d.total_degree();
    (-top + 1 - 2 * slack)..=(2 * slack)
}

pub(crate) struct PairSearch<'a> {
    d: &'a StabilityDomain,
    order: Vec<(usize, usize)>,
    checks: Vec<Vec<usize>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Allowed excess per step; `None` means either 0 or 1.
    excess: Vec<Option<i64>>,
}

/// Counts visited nodes against a shared budget.
pub(crate) struct Budget {
    pub used: AtomicU64,
    pub limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { used: AtomicU64::new(0), limit }
    }

    pub(crate) fn tick(&self) -> Result<()> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            return Err(Error::BudgetExceeded(self.limit));
        }
        Ok(())
    }
}

impl<'a> PairSearch<'a> {
    /// `fixed`: optional required excess per element (read at the pair representative).
    pub fn new(d: &'a StabilityDomain, lo: Vec<i64>, hi: Vec<i64>, fixed: Option<&dyn Fn(usize) -> i64>) -> Self {
        let anchor_set = anchors(d);
        let mut order = d.ns_pairs();
        // Anchored pairs first: they have a single choice of value.
        order.sort_by_key(|&(i, j)| (!(anchor_set.contains(&i) || anchor_set.contains(&j)), i));
        let mut step_of = vec![usize::MAX; d.len()];
        for (k, &(i, j)) in order.iter().enumerate() {
            step_of[i] = k;
            step_of[j] = k;
        }
        let mut checks = vec![Vec::new(); order.len()];
        for (t, tri) in d.triangles().iter().enumerate() {
            let last = tri.0.iter().map(|&i| step_of[i]).max().expect("three members");
            checks[last].push(t);
        }
        let excess = order.iter().map(|&(i, _)| fixed.map(|f| f(i))).collect();
        PairSearch { d, order, checks, lo, hi, excess }
    }

    fn pair_excess(&self, values: &[i64], chi: i64, i: usize) -> i64 {
        let j = self.d.comp(i);
        if i == j {
            2 * values[i] - chi
        } else {
            values[i] + values[j] - chi
        }
    }

    fn triangle_ok(&self, values: &[i64], chi: i64, t: usize) -> bool {
        let tri = self.d.triangles()[t].0;
        let deg = tri.iter().filter(|&&i| self.pair_excess(values, chi, i) == 0).count();
        let ex = tri.iter().map(|&i| values[i]).sum::<i64>() - chi;
        match deg {
            0 => ex == 1 || ex == 2,
            1 => ex == 1,
            3 => ex == 0,
            _ => false,
        }
    }

    /// Runs the search at characteristic `chi`; `visit` returns `false` to stop.
    /// Returns `true` when stopped early.
    pub fn run(
        &self,
        chi: i64,
        values: &mut [i64],
        budget: &Budget,
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) -> Result<bool> {
        self.step(0, chi, values, budget, visit)
    }

    fn step(
        &self,
        k: usize,
        chi: i64,
        values: &mut [i64],
        budget: &Budget,
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) -> Result<bool> {
        if k == self.order.len() {
            return Ok(!visit(values));
        }
        budget.tick()?;
        let (i, j) = self.order[k];
        let excesses: &[i64] = match self.excess[k] {
            Some(0) => &[0],
            Some(1) => &[1],
            Some(_) => &[],
            None => &[0, 1],
        };
        for &ex in excesses {
            if i == j {
                if (chi + ex) % 2 != 0 {
                    continue;
                }
                let v = (chi + ex) / 2;
                if v < self.lo[i] || v > self.hi[i] {
                    continue;
                }
                values[i] = v;
                if self.checks[k].iter().all(|&t| self.triangle_ok(values, chi, t))
                    && self.step(k + 1, chi, values, budget, visit)?
                {
                    return Ok(true);
                }
                continue;
            }
            let s = chi + ex;
            let vlo = self.lo[i].max(s - self.hi[j]);
            let vhi = self.hi[i].min(s - self.lo[j]);
            for v in vlo..=vhi {
                values[i] = v;
                values[j] = s - v;
                if self.checks[k].iter().all(|&t| self.triangle_ok(values, chi, t))
                    && self.step(k + 1, chi, values, budget, visit)?
                {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}
