mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_height, brute_upset, Literal};
use vjac::degposet::validate_degset;
use vjac::domain::StabilityDomain;
use vjac::vfunction::{canonical_vfunction, OrderRelation, Part, VFunction, Violation};
use vjac::Error;

/// Position of each library element in the literal element list.
fn lit_index(d: &StabilityDomain, lit: &Literal) -> Vec<usize> {
    d.elements()
        .iter()
        .map(|x| {
            let key = (x.e, x.h, x.marks().into_iter().collect::<BTreeSet<u32>>());
            lit.elems.iter().position(|y| *y == key).unwrap()
        })
        .collect()
}

fn to_lib(map: &[usize], v: &[i64]) -> Vec<i64> {
    map.iter().map(|&k| v[k]).collect()
}

fn vf(g: u32, n: u32, chi: i64, values: Vec<i64>) -> VFunction {
    VFunction::new(Arc::new(StabilityDomain::new(g, n).unwrap()), chi, values).unwrap()
}

/// Valid functions at (1,3), χ=0: the oracle up-set of the zero function.
fn pool_1_3() -> (Arc<StabilityDomain>, Vec<Vec<i64>>) {
    let d = Arc::new(StabilityDomain::new(1, 3).unwrap());
    let lit = Literal::new(1, 3);
    let map = lit_index(&d, &lit);
    let up = brute_upset(&lit, &vec![0; lit.elems.len()], 0);
    (d, up.iter().map(|v| to_lib(&map, v)).collect())
}

#[test]
fn canonical_genus_three_chi_one_is_valid_and_general() {
    let f = canonical_vfunction(3, 1).unwrap();
    assert_eq!(f.values(), [1, 1, 1, 1, 1, 1]);
    assert!(f.validate().is_ok());
    assert!(f.is_general());
    assert!(f.degeneracy_set().is_empty());
}

#[test]
fn canonical_genus_three_chi_two() {
    let f = canonical_vfunction(3, 2).unwrap();
    assert_eq!(f.values(), [1, 2, 1, 1, 2, 1]);
    assert!(f.is_valid());
    assert_eq!(f.degeneracy_set().labels(), ["(2;1)", "(4;0)"]);
}

#[test]
fn lowering_a_degenerate_value_breaks_validity() {
    let f = vf(3, 0, 2, vec![1, 2, 0, 1, 2, 1]);
    let report = f.validate();
    assert!(!report.is_ok());
    // (2;1) is self-complementary, so its own pair clause fails too.
    assert!(report.violations.contains(&Violation::Pair { element: 2, excess: -2 }));
    assert!(report.violations.iter().any(|v| matches!(v, Violation::TriangleSum { triangle: 0, .. })));
    let lines = report.describe(f.domain());
    assert_eq!(lines.len(), report.violations.len());
    assert!(lines.iter().any(|l| l.starts_with("triangle [(2;1), (3;0), (3;0)]")));
}

#[test]
fn genus_two_chi_two_is_degenerate_on_both() {
    let f = canonical_vfunction(2, 2).unwrap();
    assert_eq!(f.values(), [1, 1]);
    assert_eq!(f.degeneracy_set().len(), 2);
}

#[test]
fn canonical_generality_matches_gcd() {
    for g in 2..=6u32 {
        for chi in -6..=10i64 {
            let f = canonical_vfunction(g, chi).unwrap();
            assert!(f.is_valid());
            assert_eq!(f.is_general(), common::gcd(chi, 2 * g as i64 - 2) == 1, "g={g} chi={chi}");
        }
    }
    assert!(matches!(canonical_vfunction(1, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn comparisons() {
    let f = canonical_vfunction(3, 2).unwrap();
    assert_eq!(f.compare(&f).unwrap(), OrderRelation::Equal);
    let f1 = canonical_vfunction(3, 1).unwrap();
    assert_eq!(f1.compare(&f).unwrap(), OrderRelation::Incomparable);
    let (d, pool) = pool_1_3();
    let zero = VFunction::new(d.clone(), 0, vec![0; d.len()]).unwrap();
    let above = VFunction::new(d.clone(), 0, pool[1].clone()).unwrap();
    assert_eq!(above.compare(&zero).unwrap(), OrderRelation::Greater);
    assert_eq!(zero.compare(&above).unwrap(), OrderRelation::Less);
    assert!(zero.compare(&f).is_err());
}

#[test]
fn split_of_canonical_genus_three() {
    let (s, ns) = canonical_vfunction(3, 1).unwrap().split();
    assert_eq!(s.values, [1, 1]);
    assert_eq!(ns.values, [1, 1, 1, 1]);
}

#[test]
fn join_inverts_split() {
    let (d, mut pool) = pool_1_3();
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(7));
    for v in pool.into_iter().take(200) {
        let f = VFunction::new(d.clone(), 0, v).unwrap();
        let (s, ns) = f.split();
        assert_eq!(VFunction::join(d.clone(), &s, &ns).unwrap(), f);
    }
    let bad = Part { chi: 1, values: vec![] };
    let (_, ns) = VFunction::new(d.clone(), 0, vec![0; d.len()]).unwrap().split();
    assert!(matches!(VFunction::join(d, &bad, &ns), Err(Error::ChiMismatch(1, 0))));
}

#[test]
fn zero_function_on_one_three() {
    let d = Arc::new(StabilityDomain::new(1, 3).unwrap());
    let lit = Literal::new(1, 3);
    let map = lit_index(&d, &lit);
    let zero = VFunction::new(d.clone(), 0, vec![0; d.len()]).unwrap();
    assert!(zero.is_valid());
    assert_eq!(zero.degeneracy_set().len(), d.len());

    let oracle = brute_upset(&lit, &vec![0; lit.elems.len()], 0);
    let base = oracle.iter().position(|v| v.iter().all(|&x| x == 0)).unwrap();
    // Frozen from the exhaustive box oracle.
    assert_eq!(oracle.len(), 1053);
    assert_eq!(brute_height(&oracle, base), 6);

    let mut lib: Vec<Vec<i64>> = zero.upset().unwrap().iter().map(|f| f.values().to_vec()).collect();
    let mut want: Vec<Vec<i64>> = oracle.iter().map(|v| to_lib(&map, v)).collect();
    lib.sort();
    want.sort();
    assert_eq!(lib, want);
    assert_eq!(zero.height().unwrap(), 6);
}

#[test]
fn canonical_genus_three_chi_two_is_rigid() {
    let f = canonical_vfunction(3, 2).unwrap();
    assert_eq!(f.upset().unwrap(), std::slice::from_ref(&f));
    assert_eq!(f.height().unwrap(), 0);
}

#[test]
fn general_functions_have_trivial_upsets() {
    let (d, pool) = pool_1_3();
    let fs: Vec<VFunction> = pool.into_iter().map(|v| VFunction::new(d.clone(), 0, v).unwrap()).collect();
    let general: Vec<&VFunction> = fs.iter().filter(|f| f.is_general()).collect();
    assert!(!general.is_empty());
    for f in general {
        assert_eq!(f.upset().unwrap(), std::slice::from_ref(f));
        assert_eq!(f.height().unwrap(), 0);
    }
    // At n >= 1 height zero means general.
    for f in fs.iter().filter(|f| !f.is_general()).take(50) {
        assert!(f.height().unwrap() > 0);
    }
}

#[test]
fn upset_order_and_degeneracy() {
    let (d, pool) = pool_1_3();
    let fs: Vec<VFunction> = pool.into_iter().map(|v| VFunction::new(d.clone(), 0, v).unwrap()).collect();
    let degs: Vec<_> = fs.iter().map(|f| f.degeneracy_set()).collect();
    for (i, a) in fs.iter().enumerate() {
        assert!(validate_degset(&degs[i]).is_ok());
        for (j, b) in fs.iter().enumerate() {
            if i != j && a.geq(b) {
                assert!(degs[i].is_subset(&degs[j]));
                assert_ne!(degs[i], degs[j]);
            }
        }
    }
}

#[test]
fn upset_size_is_bounded_by_three_per_degenerate_pair() {
    let (d, pool) = pool_1_3();
    for v in pool.into_iter().step_by(25) {
        let f = VFunction::new(d.clone(), 0, v).unwrap();
        let pairs = d.pairs().into_iter().filter(|&(i, j)| i != j && f.is_degenerate_at(i)).count();
        assert!(f.upset().unwrap().len() <= 3usize.pow(pairs as u32));
    }
}

/// `σ(x₃^c) − σ(x₁) − σ(x₂)` against the case split, for every labelling.
fn check_triangle_identity(f: &VFunction) {
    let d = f.domain();
    for t in d.triangles() {
        for [a, b, c] in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
            let (x1, x2, x3) = (t.0[a], t.0[b], t.0[c]);
            let diff = f.value(d.comp(x3)) - f.value(x1) - f.value(x2);
            let (d1, d2, d3) = (f.is_degenerate_at(x1), f.is_degenerate_at(x2), f.is_degenerate_at(x3));
            if d1 || d2 {
                assert_eq!(diff, 0);
            } else if d3 {
                assert_eq!(diff, -1);
            } else {
                assert!(diff == 0 || diff == -1);
            }
        }
    }
}

#[test]
fn triangle_identity_on_valid_functions() {
    let (d, pool) = pool_1_3();
    for v in pool {
        check_triangle_identity(&VFunction::new(d.clone(), 0, v).unwrap());
    }
    for chi in -3..=6 {
        check_triangle_identity(&canonical_vfunction(3, chi).unwrap());
        check_triangle_identity(&canonical_vfunction(4, chi).unwrap());
    }
}

/// Exhaustive agreement on a small box around `⌊χ/2⌋`.
#[test]
fn validator_agrees_with_literal_reading_on_boxes() {
    for (g, n) in [(1, 2), (2, 1), (3, 0)] {
        let d = Arc::new(StabilityDomain::new(g, n).unwrap());
        let lit = Literal::new(g, n);
        let map = lit_index(&d, &lit);
        let len = d.len();
        for chi in -1..=2i64 {
            let lo = chi.div_euclid(2) - 1;
            let mut cur = vec![lo; len];
            loop {
                let f = VFunction::new(d.clone(), chi, to_lib(&map, &cur)).unwrap();
                assert_eq!(f.is_valid(), lit.is_valid(&cur, chi), "({g},{n}) chi={chi} {cur:?}");
                let mut k = 0;
                while k < len && cur[k] == lo + 2 {
                    cur[k] = lo;
                    k += 1;
                }
                if k == len {
                    break;
                }
                cur[k] += 1;
            }
        }
    }
}

fn literal_case() -> impl Strategy<Value = (u32, u32, i64, Vec<i64>)> {
    prop_oneof![Just((1u32, 2u32)), Just((1, 3)), Just((2, 1)), Just((3, 0))].prop_flat_map(|(g, n)| {
        let len = Literal::new(g, n).elems.len();
        (-1i64..=2).prop_flat_map(move |chi| {
            let c = chi.div_euclid(2);
            (Just(g), Just(n), Just(chi), proptest::collection::vec(c..=c + 1, len))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn validator_agrees_with_literal_reading((g, n, chi, v) in literal_case()) {
        let d = Arc::new(StabilityDomain::new(g, n).unwrap());
        let lit = Literal::new(g, n);
        let map = lit_index(&d, &lit);
        let f = VFunction::new(d.clone(), chi, to_lib(&map, &v)).unwrap();
        prop_assert_eq!(f.is_valid(), lit.is_valid(&v, chi));
        if f.is_valid() {
            let mut got: Vec<usize> = f.degeneracy_set().indices().iter().map(|&i| map[i]).collect();
            got.sort();
            prop_assert_eq!(got, lit.degenerate(&v, chi));
            prop_assert!(validate_degset(&f.degeneracy_set()).is_ok());
            check_triangle_identity(&f);
        }
    }

    #[test]
    fn height_matches_naive_chain(idx in 0usize..1053) {
        let d = Arc::new(StabilityDomain::new(1, 3).unwrap());
        let lit = Literal::new(1, 3);
        let map = lit_index(&d, &lit);
        let pool = brute_upset(&lit, &vec![0; lit.elems.len()], 0);
        let v = &pool[idx];
        let up = brute_upset(&lit, v, 0);
        let base = up.iter().position(|u| u == v).unwrap();
        let f = VFunction::new(d, 0, to_lib(&map, v)).unwrap();
        prop_assert_eq!(f.upset().unwrap().len(), up.len());
        prop_assert_eq!(f.height().unwrap(), brute_height(&up, base));
    }
}
