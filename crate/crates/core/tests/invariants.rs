//! Structural invariants checked on random inputs drawn from the enumerated
//! systems (k <= 9) and random words.

use std::sync::OnceLock;

use mkorders::circle::PlCircleMap;
use mkorders::enumerate::enumerate;
use mkorders::markov::{validate, GapKind};
use mkorders::order::OrderOracle;
use mkorders::pingpong;
use mkorders::realization::random_homeomorphism;
use mkorders::word::ball;
use mkorders::{GroupWord, Letter, MarkovPattern, Realization};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn systems() -> &'static [(MarkovPattern, Realization)] {
    static POOL: OnceLock<Vec<(MarkovPattern, Realization)>> = OnceLock::new();
    POOL.get_or_init(|| {
        (1..=9)
            .flat_map(|k| enumerate(k).unwrap())
            .map(|p| {
                let r = Realization::build(&p).unwrap();
                (p, r)
            })
            .collect()
    })
}

fn ball4() -> &'static [GroupWord] {
    static BALL: OnceLock<Vec<GroupWord>> = OnceLock::new();
    BALL.get_or_init(|| ball(4))
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::A), Just(Letter::B), Just(Letter::Binv)]
}

fn admissible(max: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(letter(), 1..=max).prop_map(|l| GroupWord::reduce(&l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pattern_invariants(i in any::<prop::sample::Index>(), r in 0usize..27) {
        let (p, _) = &systems()[i.index(systems().len())];
        let k = p.k();
        let n = p.len();
        prop_assert_eq!(n, 3 * k);
        prop_assert!(k % 2 == 1);
        for t in Letter::ALL {
            prop_assert_eq!(p.word().iter().filter(|&&x| x == t).count(), k);
        }
        for j in 0..n {
            prop_assert_ne!(p.word()[j], p.word()[(j + 1) % n]);
            prop_assert_eq!(p.word()[(j + p.shift()) % n], p.word()[j].sigma());
        }
        let other = if p.shift() == k { 2 * k } else { k };
        prop_assert!(!validate(p.word(), Some(other)).unwrap().is_valid());

        let table = p.gap_table();
        prop_assert_eq!(table.principal_count(), 2 * k);
        prop_assert_eq!(table.complementary_count(), k);
        prop_assert_eq!(table.block_count(), k);
        for (j, kind) in table.kinds.iter().enumerate() {
            let flanks_b = p.word()[j].is_b() && p.word()[(j + 1) % n].is_b();
            prop_assert_eq!(*kind == GapKind::Complementary, flanks_b);
        }

        let c = p.principal_cycle();
        prop_assert_eq!(c.steps.len(), 2 * k);
        let mut gaps: Vec<usize> = c.steps.iter().map(|s| s.gap).collect();
        gaps.sort_unstable();
        gaps.dedup();
        prop_assert_eq!(gaps.len(), 2 * k);
        for (j, s) in c.steps.iter().enumerate() {
            prop_assert_eq!(s.via == Letter::A, j % 2 == 1);
        }
        prop_assert_eq!(c.f1.len(), 2 * k);

        let rotated = p.rotate(r % n);
        prop_assert!(rotated.report().is_valid());
        prop_assert_eq!(rotated.canonicalize(), p.canonicalize());
        prop_assert!(p.equivalent(&rotated));
    }

    #[test]
    fn symmetries_preserve_validity(i in any::<prop::sample::Index>()) {
        let (p, _) = &systems()[i.index(systems().len())];
        let s = p.swap_labels();
        prop_assert!(s.report().is_valid());
        prop_assert_eq!(s.shift(), p.len() - p.shift());
        prop_assert_eq!(s.swap_labels().canonicalize(), p.canonicalize());
        let v = p.reverse_orientation();
        prop_assert!(v.report().is_valid());
        prop_assert_eq!(v.reverse_orientation().canonicalize(), p.canonicalize());
        prop_assert!(enumerate(p.k()).unwrap().contains(&s.canonicalize()));
    }

    #[test]
    fn random_valid_words_are_enumerated(k in prop::sample::select(vec![1usize, 3, 5]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let word: Vec<Letter> = (0..3 * k).map(|_| Letter::ALL[rng.gen_range(0..3)]).collect();
        let report = validate(&word, None).unwrap();
        if report.is_valid() {
            let p = report.into_pattern().unwrap();
            prop_assert!(enumerate(k).unwrap().contains(&p.canonicalize()));
        }
    }

    #[test]
    fn cells_have_k_components(i in any::<prop::sample::Index>(), w in admissible(6)) {
        prop_assume!(!w.is_identity());
        let (p, r) = &systems()[i.index(systems().len())];
        let cell = r.cell(&w).unwrap();
        prop_assert_eq!(cell.component_count(), p.k());
        prop_assert!(r.set(w.prefix().unwrap()).contains_set(&cell));
    }

    #[test]
    fn order_values(
        i in any::<prop::sample::Index>(),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
    ) {
        let (_, r) = &systems()[i.index(systems().len())];
        let pool = ball4();
        let (g1, g2, g3) = (&pool[a.index(pool.len())], &pool[b.index(pool.len())], &pool[c.index(pool.len())]);
        let o = OrderOracle::new(r, 0).unwrap();
        let v = o.order(g1, g2, g3).unwrap();
        prop_assert_eq!(v == 0, g1 == g2 || g2 == g3 || g1 == g3);
        prop_assert_eq!(o.order(g2, g1, g3).unwrap(), -v);
        prop_assert_eq!(o.order(g2, g3, g1).unwrap(), v);
    }

    #[test]
    fn conjugation_preserves_order(
        i in any::<prop::sample::Index>(),
        seed in any::<u64>(),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
    ) {
        let (_, r) = &systems()[i.index(systems().len())];
        let h: PlCircleMap = random_homeomorphism(&mut ChaCha8Rng::seed_from_u64(seed), 5, 101);
        let s = r.conjugate(&h);
        prop_assert!(s.check_conditions().is_empty());
        let pool = ball4();
        let gs = [&pool[a.index(pool.len())], &pool[b.index(pool.len())], &pool[c.index(pool.len())]];
        let (o, q) = (OrderOracle::new(r, 0).unwrap(), OrderOracle::new(&s, 0).unwrap());
        prop_assert_eq!(o.order(gs[0], gs[1], gs[2]).unwrap(), q.order(gs[0], gs[1], gs[2]).unwrap());
    }

    #[test]
    fn omega_sets_are_disjoint(i in any::<prop::sample::Index>()) {
        let (p, r) = &systems()[i.index(systems().len())];
        let data = pingpong::omega_sets(r);
        prop_assert!(data.overlaps().is_empty());
        for s in &data.omega {
            prop_assert_eq!(s.component_count(), p.k());
        }
    }
}
