//! Stability domains of half-vine types, their complements and triangles.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Subset of the marks `{1,..,n}`; bit `i-1` stands for mark `i`.
pub type Mask = u64;

/// Largest number of marks representable by a [`Mask`].
pub const MAX_MARKS: u32 = 62;

/// Mask of the full mark set `[n]`.
pub fn full_mask(n: u32) -> Mask {
    if n == 0 {
        0
    } else {
        (1u64 << n) - 1
    }
}

/// Marks of a mask as a sorted list.
pub fn mask_to_marks(a: Mask) -> Vec<u32> {
    (0..64).filter(|i| a >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Mask of a list of marks (1-based).
pub fn marks_to_mask(marks: &[u32]) -> Result<Mask> {
    let mut a = 0;
    for &m in marks {
        if m == 0 || m > MAX_MARKS {
            return Err(Error::InvalidArgument(format!("mark {m} out of range")));
        }
        a |= 1 << (m - 1);
    }
    Ok(a)
}

/// Lexicographic comparison of two subsets read as sorted integer lists.
pub fn cmp_subsets(a: Mask, b: Mask) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// A half-vine type `(e;h,A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfVineType {
    pub e: u32,
    pub h: u32,
    pub a: Mask,
}

impl HalfVineType {
    pub fn new(e: u32, h: u32, a: Mask) -> Self {
        HalfVineType { e, h, a }
    }

    pub fn with_marks(e: u32, h: u32, marks: &[u32]) -> Result<Self> {
        Ok(HalfVineType { e, h, a: marks_to_mask(marks)? })
    }

    pub fn marks(&self) -> Vec<u32> {
        mask_to_marks(self.a)
    }

    pub fn num_marks(&self) -> u32 {
        self.a.count_ones()
    }

    /// Log-canonical degree `2h-2+e+|A|`.
    pub fn delta(&self) -> i64 {
        2 * self.h as i64 - 2 + self.e as i64 + self.a.count_ones() as i64
    }

    pub fn is_separating(&self) -> bool {
        self.e == 1
    }

    /// `(e; g-h-e+1, A^c)`; `None` when the genus would be negative.
    pub fn complement_in(&self, g: u32, n: u32) -> Option<HalfVineType> {
        let h = g as i64 - self.h as i64 - self.e as i64 + 1;
        (h >= 0).then(|| HalfVineType { e: self.e, h: h as u32, a: full_mask(n) & !self.a })
    }

    /// Display form; the mark set is omitted when `n = 0`.
    pub fn label(&self, n: u32) -> String {
        if n == 0 {
            format!("({};{})", self.e, self.h)
        } else {
            let m: Vec<String> = self.marks().iter().map(|m| m.to_string()).collect();
            format!("({};{},{{{}}})", self.e, self.h, m.join(","))
        }
    }
}

impl Ord for HalfVineType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.e
            .cmp(&other.e)
            .then(self.h.cmp(&other.h))
            .then_with(|| cmp_subsets(self.a, other.a))
    }
}

impl PartialOrd for HalfVineType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HalfVineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.marks().iter().map(|m| m.to_string()).collect();
        write!(f, "({};{},{{{}}})", self.e, self.h, m.join(","))
    }
}

/// Membership in the stability domain (strict inequalities).
pub fn is_stable_type(g: u32, n: u32, x: &HalfVineType) -> bool {
    if x.a & !full_mask(n) != 0 || x.e < 1 || x.h + x.e > g + 1 {
        return false;
    }
    let (g, h, e) = (g as i64, x.h as i64, x.e as i64);
    let a = x.a.count_ones() as i64;
    2 * h - 2 + e + a > 0 && 2 * g - 2 * h - e + (n as i64 - a) > 0
}

/// Membership in the extended domain (non-strict inequalities).
pub fn is_extended_type(g: u32, n: u32, x: &HalfVineType) -> bool {
    if x.a & !full_mask(n) != 0 || x.e < 1 || x.h + x.e > g + 1 {
        return false;
    }
    let (g, h, e) = (g as i64, x.h as i64, x.e as i64);
    let a = x.a.count_ones() as i64;
    2 * h - 2 + e + a >= 0 && 2 * g - 2 * h - e + (n as i64 - a) >= 0
}

/// The triangle conditions on three half-vine types, counted with multiplicity.
pub fn is_triangle(g: u32, n: u32, xs: [&HalfVineType; 3]) -> bool {
    let es = [xs[0].e, xs[1].e, xs[2].e];
    let sum: u32 = es.iter().sum();
    if sum % 2 != 0 {
        return false;
    }
    for k in 0..3 {
        if es[(k + 1) % 3] + es[(k + 2) % 3] < es[k] + 2 {
            return false;
        }
    }
    let (a0, a1, a2) = (xs[0].a, xs[1].a, xs[2].a);
    if a0 & a1 != 0 || a0 & a2 != 0 || a1 & a2 != 0 || a0 | a1 | a2 != full_mask(n) {
        return false;
    }
    let hs = (xs[0].h + xs[1].h + xs[2].h) as i64;
    g as i64 == hs + (sum / 2) as i64 - 2
}

/// A triangle, stored as sorted element indices (repetitions allowed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle(pub [usize; 3]);

/// The stability domain of type `(g,n)` with its precomputed structure.
#[derive(Clone, Debug)]
pub struct StabilityDomain {
    g: u32,
    n: u32,
    elements: Vec<HalfVineType>,
    index: HashMap<HalfVineType, usize>,
    complement: Vec<usize>,
    triangles: Vec<Triangle>,
    separating: Vec<usize>,
    non_separating: Vec<usize>,
    self_complementary: Vec<bool>,
    incident: Vec<Vec<usize>>,
}

impl PartialEq for StabilityDomain {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.n == other.n
    }
}

impl Eq for StabilityDomain {}

fn check_type(g: u32, n: u32) -> Result<()> {
    if n > MAX_MARKS {
        return Err(Error::TooManyMarks(n));
    }
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::UnstableType { g, n });
    }
    Ok(())
}

fn candidates(g: u32, n: u32, keep: impl Fn(&HalfVineType) -> bool) -> Vec<HalfVineType> {
    let mut out = Vec::new();
    for e in 1..=g + 1 {
        for h in 0..=(g + 1 - e) {
            for a in 0..=full_mask(n) {
                let x = HalfVineType { e, h, a };
                if keep(&x) {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out
}

impl StabilityDomain {
    /// Builds the stability domain of type `(g,n)`.
    pub fn new(g: u32, n: u32) -> Result<Self> {
        check_type(g, n)?;
        if n > 20 {
            return Err(Error::InvalidArgument(format!("n = {n} is beyond enumeration range")));
        }
        let elements = candidates(g, n, |x| is_stable_type(g, n, x));
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let complement: Vec<usize> = elements
            .iter()
            .map(|x| index[&x.complement_in(g, n).expect("complement of a stable type")])
            .collect();
        let self_complementary = (0..elements.len()).map(|i| complement[i] == i).collect();
        let separating: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].e == 1).collect();
        let non_separating: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].e >= 2).collect();

        let mut triangles = Vec::new();
        let ns = &non_separating;
        for (p, &i) in ns.iter().enumerate() {
            for (q, &j) in ns.iter().enumerate().skip(p) {
                if elements[i].a & elements[j].a != 0 {
                    continue;
                }
                for &k in ns.iter().skip(q) {
                    if is_triangle(g, n, [&elements[i], &elements[j], &elements[k]]) {
                        triangles.push(Triangle([i, j, k]));
                    }
                }
            }
        }
        let mut incident = vec![Vec::new(); elements.len()];
        for (t, tri) in triangles.iter().enumerate() {
            let mut seen = tri.0.to_vec();
            seen.dedup();
            for i in seen {
                incident[i].push(t);
            }
        }
        Ok(StabilityDomain {
            g,
            n,
            elements,
            index,
            complement,
            triangles,
            separating,
            non_separating,
            self_complementary,
            incident,
        })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HalfVineType] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> HalfVineType {
        self.elements[i]
    }

    pub fn index_of(&self, x: &HalfVineType) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Index of `x`, or an error naming the missing element.
    pub fn require(&self, x: &HalfVineType) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::NotInDomain { elem: x.label(self.n), g: self.g, n: self.n })
    }

    pub fn contains(&self, x: &HalfVineType) -> bool {
        self.index.contains_key(x)
    }

    /// Index of the complement of element `i`.
    pub fn comp(&self, i: usize) -> usize {
        self.complement[i]
    }

    pub fn complement(&self, x: &HalfVineType) -> Result<HalfVineType> {
        let i = self.require(x)?;
        Ok(self.elements[self.complement[i]])
    }

    pub fn log_degree(&self, x: &HalfVineType) -> Result<i64> {
        self.require(x)?;
        Ok(x.delta())
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    /// Triangles that contain element `i`.
    pub fn incident_triangles(&self, i: usize) -> &[usize] {
        &self.incident[i]
    }

    pub fn separating(&self) -> &[usize] {
        &self.separating
    }

    pub fn non_separating(&self) -> &[usize] {
        &self.non_separating
    }

    pub fn is_self_complementary(&self, i: usize) -> bool {
        self.self_complementary[i]
    }

    /// Complementary pairs `(i, comp(i))` with `i <= comp(i)`, in index order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter(|&i| i <= self.complement[i]).map(|i| (i, self.complement[i])).collect()
    }

    /// Non-separating pairs with `i <= comp(i)`.
    pub fn ns_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|&(i, _)| self.elements[i].e >= 2).collect()
    }

    /// Separating pairs with `i <= comp(i)`.
    pub fn s_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|&(i, _)| self.elements[i].e == 1).collect()
    }

    /// Position of element `i` inside the separating or non-separating list.
    pub fn part_position(&self, i: usize) -> usize {
        let list = if self.elements[i].e == 1 { &self.separating } else { &self.non_separating };
        list.binary_search(&i).expect("element in its part")
    }

    /// `2g-2+n`.
    pub fn total_degree(&self) -> i64 {
        2 * self.g as i64 - 2 + self.n as i64
    }

    /// The `i`-th composition on the primitive part of a one-marked domain.
    pub fn compose(&self, x1: &HalfVineType, x2: &HalfVineType, i: u32) -> Result<HalfVineType> {
        if self.n != 1 {
            return Err(Error::InvalidArgument("composition needs n = 1".into()));
        }
        for x in [x1, x2] {
            self.require(x)?;
            if !is_primitive(x) {
                return Err(Error::InvalidArgument(format!("{} is not primitive", x.label(1))));
            }
        }
        let lo = 1.max(x1.h as i64 + x2.h as i64 + x1.e as i64 + x2.e as i64 - self.g as i64 - 2);
        let hi = (x1.e.min(x2.e) - 1) as i64;
        if (i as i64) < lo || i as i64 > hi {
            return Err(Error::InvalidArgument(format!("composition index {i} outside [{lo},{hi}]")));
        }
        let y = HalfVineType::new(x1.e + x2.e - 2 * i, x1.h + x2.h + i - 1, 0);
        self.require(&y)?;
        Ok(y)
    }

    /// Admissible composition indices for `x1` and `x2`.
    pub fn composition_range(&self, x1: &HalfVineType, x2: &HalfVineType) -> std::ops::RangeInclusive<u32> {
        let lo = 1.max(x1.h as i64 + x2.h as i64 + x1.e as i64 + x2.e as i64 - self.g as i64 - 2) as u32;
        let hi = x1.e.min(x2.e).saturating_sub(1);
        lo..=hi
    }

    /// Primitive elements `(e;h,∅)` with `e >= 2`, in canonical order.
    pub fn primitives(&self) -> Vec<usize> {
        self.non_separating.iter().copied().filter(|&i| is_primitive(&self.elements[i])).collect()
    }
}

/// `e >= 2` and no marks.
pub fn is_primitive(x: &HalfVineType) -> bool {
    x.e >= 2 && x.a == 0
}

/// The order on primitive elements: `h1 <= h2` and `e1+h1 <= e2+h2`.
pub fn primitive_leq(x1: &HalfVineType, x2: &HalfVineType) -> Result<bool> {
    for x in [x1, x2] {
        if !is_primitive(x) {
            return Err(Error::InvalidArgument(format!("{} is not primitive", x.label(1))));
        }
    }
    Ok(x1.h <= x2.h && x1.e + x1.h <= x2.e + x2.h)
}

/// The extended stability domain with relaxed inequalities.
#[derive(Clone, Debug)]
pub struct ExtendedDomain {
    g: u32,
    n: u32,
    elements: Vec<HalfVineType>,
    index: HashMap<HalfVineType, usize>,
    complement: Vec<usize>,
    extra: Vec<usize>,
}

impl ExtendedDomain {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        check_type(g, n)?;
        let elements = candidates(g, n, |x| is_extended_type(g, n, x));
        let index: HashMap<_, _> = elements.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let complement = elements
            .iter()
            .map(|x| index[&x.complement_in(g, n).expect("complement of an extended type")])
            .collect();
        let extra = (0..elements.len()).filter(|&i| !is_stable_type(g, n, &elements[i])).collect();
        Ok(ExtendedDomain { g, n, elements, index, complement, extra })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn elements(&self) -> &[HalfVineType] {
        &self.elements
    }

    pub fn index_of(&self, x: &HalfVineType) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn comp(&self, i: usize) -> usize {
        self.complement[i]
    }

    /// Indices of the elements outside the strict domain.
    pub fn extra(&self) -> &[usize] {
        &self.extra
    }

    pub fn is_extra(&self, x: &HalfVineType) -> bool {
        self.index_of(x).is_some() && !is_stable_type(self.g, self.n, x)
    }
}

/// `ξ_i`: adds the mark `n+1` exactly when `i ∈ A`.
pub fn xi(d: &StabilityDomain, i: u32, x: &HalfVineType) -> Result<HalfVineType> {
    if i == 0 || i > d.n() {
        return Err(Error::InvalidArgument(format!("mark index {i} outside 1..={}", d.n())));
    }
    d.require(x)?;
    let a = if x.a >> (i - 1) & 1 == 1 { x.a | 1 << d.n() } else { x.a };
    Ok(HalfVineType { a, ..*x })
}

/// `ϖ`: deletes the mark `n+1` from an element of the domain of type `(g,n+1)`.
pub fn varpi(upper: &StabilityDomain, x: &HalfVineType) -> Result<HalfVineType> {
    if upper.n() == 0 {
        return Err(Error::InvalidArgument("varpi needs at least one mark".into()));
    }
    upper.require(x)?;
    Ok(HalfVineType { a: x.a & !(1 << (upper.n() - 1)), ..*x })
}
