//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's domain, triangle or validation code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// `(e, h, A)` with `A` as a sorted set of marks.
pub type Elem = (u32, u32, BTreeSet<u32>);

fn subsets(n: u32) -> Vec<BTreeSet<u32>> {
    (0u32..(1 << n)).map(|m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect()).collect()
}

/// Direct reading of the four inequalities over `e <= g+1`, `h <= g`, `A ⊆ [n]`.
pub fn brute_domain(g: u32, n: u32) -> Vec<Elem> {
    let (gi, ni) = (g as i64, n as i64);
    let mut out = Vec::new();
    for e in 1..=g + 1 {
        for h in 0..=g {
            for a in subsets(n) {
                let (ei, hi, ai) = (e as i64, h as i64, a.len() as i64);
                if hi <= gi - ei + 1 && 2 * hi - 2 + ei + ai > 0 && 2 * gi - 2 * hi - ei + (ni - ai) > 0 {
                    out.push((e, h, a));
                }
            }
        }
    }
    out.sort_by(|x, y| {
        let xa: Vec<u32> = x.2.iter().copied().collect();
        let ya: Vec<u32> = y.2.iter().copied().collect();
        (x.0, x.1, xa).cmp(&(y.0, y.1, ya))
    });
    out
}

pub fn brute_complement(g: u32, n: u32, x: &Elem) -> Elem {
    let a: BTreeSet<u32> = (1..=n).filter(|i| !x.2.contains(i)).collect();
    (x.0, g + 1 - x.1 - x.0, a)
}

fn is_triangle(g: u32, n: u32, t: [&Elem; 3]) -> bool {
    let es = [t[0].0, t[1].0, t[2].0];
    let sum: u32 = es.iter().sum();
    if sum % 2 != 0 {
        return false;
    }
    for p in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
        if es[p[0]] + es[p[1]] < es[p[2]] + 2 {
            return false;
        }
    }
    let mut all: Vec<u32> = Vec::new();
    for x in t {
        all.extend(x.2.iter());
    }
    let union: BTreeSet<u32> = all.iter().copied().collect();
    if all.len() != union.len() || union != (1..=n).collect() {
        return false;
    }
    let hs: u32 = t.iter().map(|x| x.1).sum();
    g + 2 == hs + sum / 2
}

/// All triangles as sorted index triples over `elems`, from every multiset.
pub fn brute_triangles(g: u32, n: u32, elems: &[Elem]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..elems.len() {
        for j in i..elems.len() {
            for k in j..elems.len() {
                if is_triangle(g, n, [&elems[i], &elems[j], &elems[k]]) {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

/// A clause-by-clause validator on its own element list.
pub struct Literal {
    pub g: u32,
    pub n: u32,
    pub elems: Vec<Elem>,
    pub comp: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
}

impl Literal {
    pub fn new(g: u32, n: u32) -> Self {
        let elems = brute_domain(g, n);
        let index: BTreeMap<Elem, usize> = elems.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let comp = elems.iter().map(|x| index[&brute_complement(g, n, x)]).collect();
        let triangles = brute_triangles(g, n, &elems);
        Literal { g, n, elems, comp, triangles }
    }

    fn pair_sum_excess(&self, v: &[i64], chi: i64, i: usize) -> i64 {
        let j = self.comp[i];
        if i == j {
            2 * v[i] - chi
        } else {
            v[i] + v[j] - chi
        }
    }

    /// Definition read literally: pair condition, then (2a) and (2b) per triangle.
    pub fn is_valid(&self, v: &[i64], chi: i64) -> bool {
        for i in 0..self.elems.len() {
            let ex = self.pair_sum_excess(v, chi, i);
            if ex != 0 && ex != 1 {
                return false;
            }
        }
        for t in &self.triangles {
            let degenerate: Vec<bool> = t.iter().map(|&i| self.pair_sum_excess(v, chi, i) == 0).collect();
            let count = degenerate.iter().filter(|&&b| b).count();
            if count == 2 {
                return false;
            }
            let s = v[t[0]] + v[t[1]] + v[t[2]] - chi;
            let ok = match count {
                0 => s == 1 || s == 2,
                1 => s == 1,
                3 => s == 0,
                _ => unreachable!(),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn degenerate(&self, v: &[i64], chi: i64) -> Vec<usize> {
        (0..self.elems.len()).filter(|&i| self.pair_sum_excess(v, chi, i) == 0).collect()
    }

    pub fn delta(&self, i: usize) -> i64 {
        let x = &self.elems[i];
        2 * x.1 as i64 - 2 + x.0 as i64 + x.2.len() as i64
    }
}

/// `⌈p/q⌉` for `q > 0` without library helpers.
pub fn ceil_frac(p: i64, q: i64) -> i64 {
    let d = p / q;
    if p % q != 0 && (p > 0) == (q > 0) {
        d + 1
    } else {
        d
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Every valid `τ >= v` (same `χ`), found by scanning the box
/// `v(x) <= τ(x) <= χ+1-v(x^c)` with the literal validator.
pub fn brute_upset(lit: &Literal, v: &[i64], chi: i64) -> Vec<Vec<i64>> {
    let n = v.len();
    let hi: Vec<i64> = (0..n).map(|i| if lit.comp[i] == i { v[i] } else { chi + 1 - v[lit.comp[i]] }).collect();
    let mut cur = v.to_vec();
    let mut out = Vec::new();
    if hi.iter().zip(v).any(|(h, l)| h < l) {
        return out;
    }
    loop {
        if lit.is_valid(&cur, chi) {
            out.push(cur.clone());
        }
        let mut k = 0;
        while k < n && cur[k] == hi[k] {
            cur[k] = v[k];
            k += 1;
        }
        if k == n {
            break;
        }
        cur[k] += 1;
    }
    out
}

/// Longest strictly increasing pointwise chain starting at `family[base]`.
pub fn brute_height(family: &[Vec<i64>], base: usize) -> usize {
    fn above(a: &[i64], b: &[i64]) -> bool {
        a != b && a.iter().zip(b).all(|(x, y)| x >= y)
    }
    fn go(family: &[Vec<i64>], k: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(h) = memo[k] {
            return h;
        }
        let mut best = 0;
        for m in 0..family.len() {
            if above(&family[m], &family[k]) {
                best = best.max(1 + go(family, m, memo));
            }
        }
        memo[k] = Some(best);
        best
    }
    let mut memo = vec![None; family.len()];
    go(family, base, &mut memo)
}
