use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gradedlc::cech::{action_map, cone_with_p, graded_cech};
use gradedlc::exactlinalg::{
    change_coefficients, complex_cohomology, fp_cohomology, snf, valuation, ChangedGroup, CoefficientRing, IntMatrix,
};
use gradedlc::lcmod::LcContext;
use gradedlc::lyubeznik::comp_ext_sum_rule;
use gradedlc::monomial::{all_degree_classes, MonomialIdeal};
use gradedlc::oracle::{generator_set_mismatches, redundant_generators};

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop_oneof![3 => Just(0i64), 5 => -9i64..10, 1 => -200i64..200], m * n)
            .prop_map(move |v| IntMatrix::from_fn(m, n, |i, j| BigInt::from(v[i * n + j])))
    })
}

/// Squarefree ideal in `n ≤ max_n` variables with up to six generators.
fn ideal(max_n: usize) -> impl Strategy<Value = MonomialIdeal> {
    (1usize..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u32..(1 << n), 1..=6).prop_map(move |m| MonomialIdeal::from_masks(n, &m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_laws(a in matrix()) {
        let d = snf(&a);
        prop_assert!(d.verify());
        prop_assert_eq!(d.rank(), a.rank_q());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generator_set_invariance(i in ideal(5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = redundant_generators(&mut rng, &i, 3);
        prop_assert!(generator_set_mismatches(&i, &gens).unwrap().is_empty());
    }

    #[test]
    fn universal_coefficients(i in ideal(5), l in prop::sample::select(vec![2u64, 3, 5])) {
        for s in all_degree_classes(i.n()) {
            let c = graded_cech(&i, s).reduced();
            let h = complex_cohomology(c.complex()).unwrap();
            let f = fp_cohomology(c.complex(), l);
            for k in 0..h.len() {
                let ChangedGroup::Dimension(tensor) = change_coefficients(h[k].group(), CoefficientRing::PrimeField(l)) else {
                    unreachable!()
                };
                let tor = h.get(k + 1).map_or(0, |g| g.group().torsion_count_divisible_by(l));
                prop_assert_eq!(f[k].dim(), tensor + tor, "class {} degree {}", s, k);
            }
        }
    }

    #[test]
    fn action_squares_commute(i in ideal(5)) {
        for s in all_degree_classes(i.n()) {
            let vars: Vec<usize> = s.indices().collect();
            for (a, &x) in vars.iter().enumerate() {
                for &y in &vars[a + 1..] {
                    let xy = action_map(&i, s.without(x), y).unwrap().compose(&action_map(&i, s, x).unwrap());
                    let yx = action_map(&i, s.without(y), x).unwrap().compose(&action_map(&i, s, y).unwrap());
                    prop_assert_eq!(xy.maps.len(), yx.maps.len());
                    for (f, g) in xy.maps.iter().zip(&yx.maps) {
                        prop_assert_eq!(f, g);
                    }
                }
            }
        }
    }

    /// `H^k_{I+pS} = Z(p^inf)^{rank H^{k-1}_I} + (p-part of H^k_I)` in every class.
    #[test]
    fn cone_matches_long_exact_sequence(i in ideal(4), p in prop::sample::select(vec![2u64, 3])) {
        for s in all_degree_classes(i.n()) {
            let cone = cone_with_p(&i, s, p, None).unwrap();
            let h = complex_cohomology(graded_cech(&i, s).complex()).unwrap();
            for (k, g) in cone.cohomology.iter().enumerate() {
                let below = if k == 0 { 0 } else { h.get(k - 1).map_or(0, |x| x.group().free_rank()) };
                prop_assert_eq!(g.divisible_corank(), below);
                let mut ppart: Vec<BigInt> = h
                    .get(k)
                    .map(|x| x.group().torsion().iter().filter(|d| valuation(d, p) > 0)
                        .map(|d| num_traits::pow(BigInt::from(p), valuation(d, p) as usize)).collect())
                    .unwrap_or_default();
                ppart.sort();
                let mut got = g.torsion().to_vec();
                got.sort();
                prop_assert_eq!(got, ppart);
            }
        }
    }

    /// Sum rule on every `p`-killed module met: the mod-`p` local cohomology windows.
    #[test]
    fn sum_rule_on_p_killed_modules(i in ideal(4), p in prop::sample::select(vec![2u64, 3, 5])) {
        let ctx = LcContext::new(&i).unwrap();
        for j in 0..=ctx.top() {
            let m = ctx.local_cohomology_mod_p(j, p).unwrap();
            for tau in all_degree_classes(i.n()) {
                prop_assert_eq!(comp_ext_sum_rule(&m, p, tau).unwrap(), Some(true));
            }
        }
    }

    /// The mixed computation always rechecks N against N + 1; a larger N must agree.
    #[test]
    fn truncation_is_stable(i in ideal(4), p in prop::sample::select(vec![2u64, 3])) {
        let ctx = LcContext::new(&i).unwrap();
        let n = ctx.trunc_exponent(p);
        let a = ctx.local_cohomology_plus_p(p, Some(n)).unwrap();
        let b = ctx.local_cohomology_plus_p(p, Some(n + 2)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for s in all_degree_classes(i.n()) {
                prop_assert!(x.mixed_group(s).unwrap().same_isomorphism_type(y.mixed_group(s).unwrap()));
            }
        }
    }
}

#[test]
fn zero_matrix_has_empty_snf() {
    let d = snf(&IntMatrix::zeros(3, 2));
    assert!(d.verify() && d.invariant_factors.is_empty());
    assert!(d.d.is_zero());
}
