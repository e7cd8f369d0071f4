//! Exact rational feasibility of mixed strict/non-strict linear systems by
//! Fourier–Motzkin elimination, with Farkas certificates for infeasibility.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Default cap on the number of live constraints during elimination.
pub const DEFAULT_CONSTRAINT_BUDGET: u64 = 400_000;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// `coeffs · x  rel  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Lt => lhs < self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

/// Nonnegative combination of the input constraints (any sign on equalities)
/// whose left-hand side vanishes and whose right-hand side is contradictory.
#[derive(Clone, Debug, PartialEq)]
pub struct Farkas {
    pub multipliers: Vec<(usize, Rat)>,
}

impl Farkas {
    /// Independent check of the certificate against the original system.
    pub fn verify(&self, nvars: usize, system: &[Constraint]) -> bool {
        let mut lhs = vec![Rat::zero(); nvars];
        let mut rhs = Rat::zero();
        let mut strict = false;
        for (k, m) in &self.multipliers {
            let Some(c) = system.get(*k) else { return false };
            if c.rel != Rel::Eq && m.is_negative() {
                return false;
            }
            if c.rel == Rel::Lt && m.is_positive() {
                strict = true;
            }
            for (l, a) in lhs.iter_mut().zip(&c.coeffs) {
                *l += m * a;
            }
            rhs += m * &c.rhs;
        }
        lhs.iter().all(|a| a.is_zero()) && (rhs.is_negative() || (strict && rhs.is_zero()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible(Farkas),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Integer arithmetic for the elimination: checked `i128` first, `BigInt`
/// when that overflows.
trait Int: Clone + PartialEq + Eq + Hash + Ord + fmt::Debug {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn signum(&self) -> i8;
    fn gcd(&self, o: &Self) -> Self;
    /// Exact division by a positive divisor.
    fn div_exact(&self, o: &Self) -> Self;
}

impl Int for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        // Leave headroom so negation and one product never wrap unnoticed.
        i128::try_from(b).ok().filter(|v| v.unsigned_abs() < 1u128 << 120)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o).filter(|v| *v != i128::MIN)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o).filter(|v| *v != i128::MIN)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i8 {
        i128::signum(*self) as i8
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl Int for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn signum(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

/// Raised when `i128` overflows; the caller retries with `BigInt`.
struct Overflow;

type Ov<T> = std::result::Result<T, Overflow>;

fn ok<T>(v: Option<T>) -> Ov<T> {
    v.ok_or(Overflow)
}

/// `coeffs · x rel rhs`, equal to `Σ comb[k].1 · (scaled input row comb[k].0)`.
#[derive(Clone, Debug)]
struct Row<T> {
    coeffs: Vec<T>,
    rel: Rel,
    rhs: T,
    comb: Vec<(usize, T)>,
}

fn lin<T: Int>(a: &T, sa: &T, b: &T, sb: &T) -> Ov<T> {
    ok(ok(a.mul(sa))?.add(&ok(b.mul(sb))?))
}

fn merge<T: Int>(a: &[(usize, T)], sa: &T, b: &[(usize, T)], sb: &T) -> Ov<Vec<(usize, T)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, ok(a[i].1.mul(sa))?));
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, ok(b[j].1.mul(sb))?));
            j += 1;
        } else {
            let v = lin(&a[i].1, sa, &b[j].1, sb)?;
            if v.signum() != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// `sp·p + sq·q`; multipliers of inequalities must be nonnegative.
fn combine<T: Int>(p: &Row<T>, sp: &T, q: &Row<T>, sq: &T) -> Ov<Row<T>> {
    let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| lin(a, sp, b, sq)).collect::<Ov<Vec<T>>>()?;
    let rel = match (p.rel, q.rel) {
        (Rel::Eq, Rel::Eq) => Rel::Eq,
        (Rel::Lt, _) | (_, Rel::Lt) => Rel::Lt,
        _ => Rel::Le,
    };
    Ok(Row { coeffs, rel, rhs: lin(&p.rhs, sp, &q.rhs, sq)?, comb: merge(&p.comb, sp, &q.comb, sq)? })
}

/// Divides the whole row, certificate included, by its content; equalities
/// get a positive leading coefficient.
fn reduce<T: Int>(mut r: Row<T>) -> Row<T> {
    let mut g = r.rhs.gcd(&T::zero());
    for c in r.coeffs.iter().chain(r.comb.iter().map(|(_, m)| m)) {
        g = g.gcd(c);
    }
    if g.signum() != 0 && g != T::one() {
        for c in r.coeffs.iter_mut() {
            *c = c.div_exact(&g);
        }
        r.rhs = r.rhs.div_exact(&g);
        for (_, m) in r.comb.iter_mut() {
            *m = m.div_exact(&g);
        }
    }
    if r.rel == Rel::Eq && r.coeffs.iter().find(|c| c.signum() != 0).is_some_and(|c| c.signum() < 0) {
        for c in r.coeffs.iter_mut() {
            *c = c.neg();
        }
        r.rhs = r.rhs.neg();
        for (_, m) in r.comb.iter_mut() {
            *m = m.neg();
        }
    }
    r
}

/// Primitive direction of the coefficients and the factor it was divided by.
fn direction<T: Int>(coeffs: &[T]) -> (Vec<T>, T) {
    let mut g = T::zero();
    for c in coeffs {
        g = g.gcd(c);
    }
    (coeffs.iter().map(|c| c.div_exact(&g)).collect(), g)
}

/// A row with no variables left: `None` if satisfied, otherwise the certificate
/// as multipliers on the scaled rows.
fn constant_row_verdict<T: Int>(r: &Row<T>) -> Option<Vec<(usize, T)>> {
    let ok = match r.rel {
        Rel::Le => r.rhs.signum() >= 0,
        Rel::Lt => r.rhs.signum() > 0,
        Rel::Eq => r.rhs.signum() == 0,
    };
    if ok {
        return None;
    }
    let mut comb = r.comb.clone();
    if r.rel == Rel::Eq && r.rhs.signum() > 0 {
        // 0 = positive: negate so the certificate reads 0 = negative.
        for (_, m) in comb.iter_mut() {
            *m = m.neg();
        }
    }
    Some(comb)
}

enum Pruned<T> {
    Rows(Vec<Row<T>>),
    Contradiction(Vec<(usize, T)>),
}

/// Keeps the tightest inequality per direction and one equality per direction.
fn prune<T: Int>(rows: Vec<Row<T>>) -> Ov<Pruned<T>> {
    let mut best: HashMap<Vec<T>, (Row<T>, T)> = HashMap::new();
    let mut eqs: HashMap<Vec<T>, (Row<T>, T)> = HashMap::new();
    for r in rows {
        if r.coeffs.iter().all(|a| a.signum() == 0) {
            if let Some(f) = constant_row_verdict(&r) {
                return Ok(Pruned::Contradiction(f));
            }
            continue;
        }
        let r = reduce(r);
        let (dir, k) = direction(&r.coeffs);
        if r.rel == Rel::Eq {
            if let Some((prev, pk)) = eqs.get(&dir) {
                // prev = pk·dir, r = k·dir: compare prev.rhs/pk with r.rhs/k.
                if ok(prev.rhs.mul(&k))? != ok(r.rhs.mul(pk))? {
                    let diff = combine(prev, &k, &r, &pk.neg())?;
                    return Ok(Pruned::Contradiction(constant_row_verdict(&diff).expect("inconsistent equalities")));
                }
                continue;
            }
            eqs.insert(dir, (r, k));
            continue;
        }
        let keep = match best.get(&dir) {
            None => true,
            Some((prev, pk)) => {
                let (a, b) = (ok(prev.rhs.mul(&k))?, ok(r.rhs.mul(pk))?);
                b < a || (b == a && r.rel == Rel::Lt && prev.rel == Rel::Le)
            }
        };
        if keep {
            best.insert(dir, (r, k));
        }
    }
    let mut out: Vec<Row<T>> = eqs.into_values().map(|(r, _)| r).collect();
    out.extend(best.into_values().map(|(r, _)| r));
    out.sort_by(|a, b| a.coeffs.cmp(&b.coeffs).then((a.rel as u8).cmp(&(b.rel as u8))));
    Ok(Pruned::Rows(out))
}

enum Step<T> {
    Pivot { var: usize, row: Row<T> },
    Bounds { var: usize, rows: Vec<Row<T>> },
}

enum Outcome<T> {
    Feasible(Vec<Step<T>>),
    Infeasible(Vec<(usize, T)>),
}

fn eliminate<T: Int>(nvars: usize, rows: Vec<Row<T>>, budget: u64) -> Result<Ov<Outcome<T>>> {
    macro_rules! tri {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(Overflow) => return Ok(Err(Overflow)),
            }
        };
    }
    let mut rows = match tri!(prune(rows)) {
        Pruned::Rows(r) => r,
        Pruned::Contradiction(f) => return Ok(Ok(Outcome::Infeasible(f))),
    };
    let mut steps = Vec::new();
    let mut remaining: Vec<usize> = (0..nvars).collect();
    while !remaining.is_empty() {
        // Prefer a variable that an equality can pivot out; otherwise the
        // one with the smallest Fourier–Motzkin product.
        let pivot = rows.iter().position(|r| r.rel == Rel::Eq).and_then(|k| {
            remaining.iter().position(|&v| rows[k].coeffs[v].signum() != 0).map(|p| (p, k))
        });
        let (pos, next) = if let Some((p, k)) = pivot {
            let v = remaining[p];
            let e = rows.swap_remove(k);
            let ev = e.coeffs[v].clone();
            let (se, sr) = if ev.signum() > 0 { (T::one(), ev.clone()) } else { (T::one().neg(), ev.neg()) };
            // r·|e_v| - e·sign(e_v)·r_v keeps a nonnegative multiplier on r.
            let mut next = Vec::with_capacity(rows.len());
            for r in rows.drain(..) {
                if r.coeffs[v].signum() == 0 {
                    next.push(r);
                } else {
                    let s = ok(r.coeffs[v].mul(&se)).map(|x| x.neg());
                    let s = tri!(s);
                    next.push(tri!(combine(&r, &sr, &e, &s)));
                }
            }
            steps.push(Step::Pivot { var: v, row: e });
            (p, next)
        } else {
            let p = (0..remaining.len())
                .min_by_key(|&p| {
                    let v = remaining[p];
                    let up = rows.iter().filter(|r| r.coeffs[v].signum() > 0).count();
                    let lo = rows.iter().filter(|r| r.coeffs[v].signum() < 0).count();
                    up * lo
                })
                .expect("nonempty");
            let v = remaining[p];
            let (mut up, mut lo, mut next) = (Vec::new(), Vec::new(), Vec::new());
            for r in rows.drain(..) {
                match r.coeffs[v].signum() {
                    1 => up.push(r),
                    -1 => lo.push(r),
                    _ => next.push(r),
                }
            }
            if (up.len() * lo.len() + next.len()) as u64 > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            for a in &up {
                for b in &lo {
                    let sa = b.coeffs[v].neg();
                    let sb = a.coeffs[v].clone();
                    next.push(tri!(combine(a, &sa, b, &sb)));
                }
            }
            let mut bound_rows = up;
            bound_rows.extend(lo);
            steps.push(Step::Bounds { var: v, rows: bound_rows });
            (p, next)
        };
        remaining.remove(pos);
        rows = match tri!(prune(next)) {
            Pruned::Rows(r) => r,
            Pruned::Contradiction(f) => return Ok(Ok(Outcome::Infeasible(f))),
        };
    }
    for r in &rows {
        if let Some(f) = constant_row_verdict(r) {
            return Ok(Ok(Outcome::Infeasible(f)));
        }
    }
    Ok(Ok(Outcome::Feasible(steps)))
}

/// Back substitution in reverse elimination order.
fn back_substitute<T: Int>(nvars: usize, steps: &[Step<T>]) -> Vec<Rat> {
    let big = |r: &Row<T>| -> (Vec<Rat>, Rat) {
        (r.coeffs.iter().map(|c| Rat::from_integer(c.to_big())).collect(), Rat::from_integer(r.rhs.to_big()))
    };
    let mut x = vec![Rat::zero(); nvars];
    for step in steps.iter().rev() {
        match step {
            Step::Pivot { var, row } => {
                let (c, rhs) = big(row);
                let rest: Rat = (0..nvars).filter(|&k| k != *var).map(|k| &c[k] * &x[k]).sum();
                x[*var] = (rhs - rest) / &c[*var];
            }
            Step::Bounds { var, rows } => {
                let mut lo: Option<(Rat, bool)> = None;
                let mut hi: Option<(Rat, bool)> = None;
                for r in rows {
                    let (c, rhs) = big(r);
                    let rest: Rat = (0..nvars).filter(|&k| k != *var).map(|k| &c[k] * &x[k]).sum();
                    let b = (rhs - rest) / &c[*var];
                    let strict = r.rel == Rel::Lt;
                    if c[*var].is_positive() {
                        if hi.as_ref().is_none_or(|(h, s)| b < *h || (b == *h && strict && !s)) {
                            hi = Some((b, strict));
                        }
                    } else if lo.as_ref().is_none_or(|(l, s)| b > *l || (b == *l && strict && !s)) {
                        lo = Some((b, strict));
                    }
                }
                x[*var] = match (lo, hi) {
                    (None, None) => Rat::zero(),
                    (Some((l, s)), None) => {
                        if s {
                            l + Rat::one()
                        } else {
                            l
                        }
                    }
                    (None, Some((h, s))) => {
                        if s {
                            h - Rat::one()
                        } else {
                            h
                        }
                    }
                    (Some((l, _)), Some((h, _))) => (l + h) / rat(2),
                };
            }
        }
    }
    x
}

/// Decides feasibility of the system over the reals.
pub fn solve(nvars: usize, system: &[Constraint]) -> Result<Feasibility> {
    solve_with_budget(nvars, system, DEFAULT_CONSTRAINT_BUDGET)
}

fn run<T: Int>(nvars: usize, scaled: &[(Vec<BigInt>, BigInt)], system: &[Constraint], budget: u64) -> Result<Ov<Feasibility>> {
    let mut rows = Vec::with_capacity(scaled.len());
    for (k, (c, rhs)) in scaled.iter().enumerate() {
        let coeffs = match c.iter().map(T::from_big).collect::<Option<Vec<T>>>() {
            Some(v) => v,
            None => return Ok(Err(Overflow)),
        };
        let Some(rhs) = T::from_big(rhs) else { return Ok(Err(Overflow)) };
        rows.push(Row { coeffs, rel: system[k].rel, rhs, comb: vec![(k, T::one())] });
    }
    Ok(match eliminate(nvars, rows, budget)? {
        Err(Overflow) => Err(Overflow),
        Ok(Outcome::Feasible(steps)) => Ok(Feasibility::Feasible(back_substitute(nvars, &steps))),
        Ok(Outcome::Infeasible(comb)) => Ok(Feasibility::Infeasible(Farkas {
            multipliers: comb.into_iter().map(|(k, m)| (k, Rat::from_integer(m.to_big()))).collect(),
        })),
    })
}

pub fn solve_with_budget(nvars: usize, system: &[Constraint], budget: u64) -> Result<Feasibility> {
    // Clear denominators row by row; a certificate on the scaled rows is
    // rescaled to the original ones afterwards.
    let mut scaled = Vec::with_capacity(system.len());
    let mut scale = Vec::with_capacity(system.len());
    for c in system {
        if c.coeffs.len() != nvars {
            return Err(Error::InvalidArgument("constraint width differs from variable count".into()));
        }
        let l = c.coeffs.iter().chain([&c.rhs]).fold(<BigInt as One>::one(), |l, q| l.lcm(q.denom()));
        let lr = Rat::from_integer(l.clone());
        let coeffs = c.coeffs.iter().map(|q| (q * &lr).to_integer()).collect();
        scaled.push((coeffs, (&c.rhs * &lr).to_integer()));
        scale.push(lr);
    }
    let out = match run::<i128>(nvars, &scaled, system, budget)? {
        Ok(v) => v,
        Err(Overflow) => match run::<BigInt>(nvars, &scaled, system, budget)? {
            Ok(v) => v,
            Err(Overflow) => unreachable!("BigInt arithmetic does not overflow"),
        },
    };
    let out = match out {
        Feasibility::Infeasible(f) => Feasibility::Infeasible(Farkas {
            multipliers: f.multipliers.into_iter().map(|(k, m)| (k, m * &scale[k])).collect(),
        }),
        feasible => feasible,
    };
    if let Feasibility::Feasible(x) = &out {
        if !system.iter().all(|c| c.holds(x)) {
            return Err(Error::InvalidArgument("elimination produced an inconsistent point".into()));
        }
    }
    Ok(out)
}
