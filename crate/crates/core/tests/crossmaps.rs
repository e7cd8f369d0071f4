use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vjac::crossmaps::{LevelPair, VarpiImage};
use vjac::degposet::DegeneracySubset;
use vjac::feasibility::{rat, ratio, Rat};
use vjac::polarization::{sigma_of, RationalPolarization};
use vjac::symmetry::{enumerate_normalized, GroupElement, DEFAULT_ENUM_BUDGET};
use vjac::vfunction::{canonical_vfunction, OrderRelation, VFunction};
use vjac::Error;

/// Valid functions at the given domain: normalized ns parts with random
/// separating parts (some pairs degenerate) and a random translation.
fn samples(d: &Arc<vjac::StabilityDomain>, count: usize, seed: u64) -> Vec<VFunction> {
    let parts = enumerate_normalized(d, DEFAULT_ENUM_BUDGET).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ns = &parts[rng.gen_range(0..parts.len())];
            let mut f = VFunction::from_ns(d.clone(), ns).unwrap();
            let mut values = f.values().to_vec();
            for (i, j) in d.s_pairs() {
                if i == j {
                    continue;
                }
                values[i] = rng.gen_range(-2..=2);
                values[j] = f.chi() - values[i] + rng.gen_range(0..=1);
            }
            f = f.with_values(f.chi(), values);
            let t = GroupElement::translation(
                d,
                if d.g() >= 2 { rng.gen_range(-2..=2) } else { 0 },
                (0..d.n()).map(|_| rng.gen_range(-2..=2)).collect(),
            );
            let f = t.act(&f).unwrap();
            assert!(f.is_valid());
            f
        })
        .collect()
}

fn random_polarization(rng: &mut ChaCha8Rng, d: &vjac::StabilityDomain) -> RationalPolarization {
    let g = d.g() as i64;
    let n = d.n() as usize;
    let chi = rng.gen_range(-3..=3);
    let beta = if g >= 2 { ratio(rng.gen_range(-12..=12), 2 * g - 2) } else { rat(0) };
    let mut alpha: Vec<Rat> = (0..n).map(|_| ratio(rng.gen_range(-12..=12), rng.gen_range(1..=5))).collect();
    // With no marks the degree is (2g-2)β, already integral.
    if n > 0 {
        let rest: Rat = rat(2 * g - 2) * &beta + alpha[..n - 1].iter().sum::<Rat>();
        alpha[n - 1] = rat(chi) - rest;
    }
    let gamma = (0..d.separating().len()).map(|_| ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
    RationalPolarization { beta, alpha, gamma }
}

#[test]
fn genus_two_canonical_fixture() {
    let lp = LevelPair::new(2, 0).unwrap();
    let labels: Vec<String> = lp.upper.elements().iter().map(|x| x.label(1)).collect();
    assert_eq!(labels, ["(1;1,{})", "(1;1,{1})", "(2;0,{1})", "(2;1,{})", "(3;0,{})", "(3;0,{1})"]);
    let s = canonical_vfunction(2, 1).unwrap();
    let o = lp.omega(&s).unwrap();
    assert_eq!(o.values(), [1, 1, 0, 1, 1, 1]);
    assert!(o.is_valid());
    assert_eq!(o.degeneracy_set().labels(), ["(2;0,{1})", "(2;1,{})"]);
    let plus = lp.omega_plus(&s).unwrap();
    let minus = lp.omega_minus(&s).unwrap();
    assert_eq!(plus.values(), [1, 1, 1, 1, 1, 1]);
    assert_eq!(minus.values(), [1, 1, 0, 2, 1, 1]);
    for h in [&plus, &minus] {
        assert!(h.is_valid() && h.is_general());
        assert_eq!(h.compare(&o).unwrap(), OrderRelation::Greater);
    }
}

#[test]
fn xi_needs_a_mark() {
    let lp = LevelPair::new(2, 0).unwrap();
    let s = canonical_vfunction(2, 1).unwrap();
    let o = lp.omega(&s).unwrap();
    assert!(matches!(lp.big_xi(1, &o), Err(Error::InvalidArgument(_))));
    let lp = LevelPair::new(2, 1).unwrap();
    let tau = lp.omega(&samples(&lp.lower, 1, 1)[0]).unwrap();
    assert!(matches!(lp.big_xi(0, &tau), Err(Error::InvalidArgument(_))));
    assert!(matches!(lp.big_xi(2, &tau), Err(Error::InvalidArgument(_))));
    assert!(matches!(lp.omega(&tau), Err(Error::DomainMismatch(_))));
    assert!(LevelPair::from_domains(lp.lower.clone(), lp.lower.clone()).is_err());
}

#[test]
fn level_maps_are_compatible() {
    for (g, n) in [(2, 0), (1, 2), (2, 1), (3, 1)] {
        let lp = LevelPair::new(g, n).unwrap();
        for map in &lp.xi {
            for (k, &y) in map.iter().enumerate() {
                assert_eq!(lp.varpi[y], VarpiImage::Lower(k));
                assert_eq!(map[lp.lower.comp(k)], lp.upper.comp(y));
            }
            for tri in lp.lower.triangles() {
                let img = [map[tri.0[0]], map[tri.0[1]], map[tri.0[2]]].map(|i| lp.upper.element(i));
                assert!(vjac::domain::is_triangle(g, n + 1, [&img[0], &img[1], &img[2]]));
            }
        }
    }
}

/// Ξ_i∘Ω = id and the degeneracy transports (b) and (c).
#[test]
fn omega_round_trips_and_transports_degeneracy() {
    for (g, n) in [(2, 0), (1, 2), (2, 1), (3, 1)] {
        let lp = LevelPair::new(g, n).unwrap();
        for s in samples(&lp.lower, 60, 7 + g as u64 * 10 + n as u64) {
            let o = lp.omega(&s).unwrap();
            assert!(o.is_valid(), "({g},{n}) {s}");
            let want = lp.varpi_preimage_with_extra(&s.degeneracy_set().indices());
            assert_eq!(o.degeneracy_set().indices(), want);
            for i in 1..=n {
                assert_eq!(lp.big_xi(i, &o).unwrap(), s);
            }
            for h in [lp.omega_plus(&s).unwrap(), lp.omega_minus(&s).unwrap()] {
                assert!(h.is_valid() && h.geq(&o));
                if s.is_general() {
                    assert!(h.is_general());
                }
            }
        }
    }
}

#[test]
fn xi_transports_degeneracy() {
    for (g, n) in [(1, 3), (2, 2), (3, 2)] {
        let lp = LevelPair::new(g, n - 1).unwrap();
        for tau in samples(&lp.upper, 60, 40 + g as u64) {
            for i in 1..n {
                let x = lp.big_xi(i, &tau).unwrap();
                assert!(x.is_valid());
                assert_eq!(x.chi(), tau.chi());
                assert_eq!(x.degeneracy_set().indices(), lp.xi_preimage(i, &tau.degeneracy_set().indices()).unwrap());
            }
        }
    }
}

#[test]
fn omega_commutes_with_translations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (g, n) in [(2, 1), (1, 2), (3, 1)] {
        let lp = LevelPair::new(g, n).unwrap();
        for s in samples(&lp.lower, 30, 90) {
            let beta = if g >= 2 { rng.gen_range(-2..=2) } else { 0 };
            let alpha: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let gamma: Vec<i64> = (0..lp.lower.separating().len()).map(|_| rng.gen_range(-2..=2)).collect();
            let t = GroupElement { beta, alpha: alpha.clone(), gamma: gamma.clone(), epsilon: false };
            let mut up = GroupElement::identity(&lp.upper);
            up.beta = beta;
            up.alpha[..n as usize].copy_from_slice(&alpha);
            for (pos, &y) in lp.upper.separating().iter().enumerate() {
                up.gamma[pos] = match lp.varpi[y] {
                    VarpiImage::Lower(k) => gamma[lp.lower.part_position(k)],
                    // (1;0,{j,n+1}) has β-coefficient -1; cancel the shift there.
                    VarpiImage::Extra(x) if x.delta() == 0 => alpha[x.a.trailing_zeros() as usize] - beta,
                    VarpiImage::Extra(_) => 0,
                };
            }
            assert_eq!(lp.omega(&t.act(&s).unwrap()).unwrap(), up.act(&lp.omega(&s).unwrap()).unwrap());
        }
    }
}

#[test]
fn omega_pol_of_canonical_genus_three() {
    let lp = LevelPair::new(3, 0).unwrap();
    for chi in -3..=5 {
        let l = RationalPolarization::canonical(&lp.lower, ratio(chi, 4));
        let m = lp.omega_pol(&l).unwrap();
        assert_eq!(m.beta, l.beta);
        assert_eq!(m.alpha, [rat(0)]);
        assert_eq!(sigma_of(&m, lp.upper.clone()).unwrap(), lp.omega(&canonical_vfunction(3, chi).unwrap()).unwrap());
    }
}

#[test]
fn polarization_squares_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    for (g, n, count) in [(2, 1, 50), (1, 2, 30), (3, 0, 20), (2, 2, 20)] {
        let lp = LevelPair::new(g, n).unwrap();
        for _ in 0..count {
            let l = random_polarization(&mut rng, &lp.lower);
            l.check(&lp.lower).unwrap();
            let m = lp.omega_pol(&l).unwrap();
            let sl = sigma_of(&l, lp.lower.clone()).unwrap();
            assert_eq!(sigma_of(&m, lp.upper.clone()).unwrap(), lp.omega(&sl).unwrap(), "({g},{n}) {l:?}");
            for i in 1..=n {
                assert_eq!(lp.xi_pol(i, &m).unwrap(), l);
            }
            let u = random_polarization(&mut rng, &lp.upper);
            let su = sigma_of(&u, lp.upper.clone()).unwrap();
            for i in 1..=n {
                let down = lp.xi_pol(i, &u).unwrap();
                assert_eq!(sigma_of(&down, lp.lower.clone()).unwrap(), lp.big_xi(i, &su).unwrap());
            }
        }
    }
}

#[test]
fn general_omega_degeneracy_is_the_extra_part() {
    let lp = LevelPair::new(2, 1).unwrap();
    for s in samples(&lp.lower, 200, 5).into_iter().filter(|s| s.is_general()) {
        let want = DegeneracySubset::from_indices(lp.upper.clone(), &lp.varpi_preimage_with_extra(&[]));
        assert_eq!(lp.omega(&s).unwrap().degeneracy_set(), want);
    }
}
