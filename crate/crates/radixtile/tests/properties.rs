use proptest::prelude::*;

use radixtile::linalg::{rv_add, IntVec};
use radixtile::multinv::{phi, psi, NumberSystem};
use radixtile::numsys::{discrete_expansion, evaluate_expansion};
use radixtile::radix::{enumerate_equivalents, equivalent, eval_exact, is_neighbour_sequence, Digits};
use radixtile::sep::{is_sep_int, is_sep_sets, make_set, sumset, sumset_complement, SepIntWitness, SepSetWitness};
use radixtile::{EpSeq, LogRatio, RadixSystem};

fn decimal() -> RadixSystem {
    RadixSystem::scalar(10, &(0..10).collect::<Vec<_>>()).unwrap()
}

fn gauss() -> RadixSystem {
    RadixSystem::gaussian(-2, 1, &[0, 1, 2, 3, 4]).unwrap()
}

fn digits_of(xs: Vec<i64>, n: usize) -> Vec<IntVec> {
    xs.into_iter()
        .map(|d| {
            let mut v = vec![0; n];
            v[0] = d;
            v
        })
        .collect()
}

prop_compose! {
    fn ep_digits(hi: i64, n: usize)(pre in prop::collection::vec(0..hi, 0..4), cyc in prop::collection::vec(0..hi, 1..4)) -> Digits {
        EpSeq::new(digits_of(pre, n), digits_of(cyc, n)).unwrap()
    }
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(pre in prop::collection::vec(0..3i64, 0..6), cyc in prop::collection::vec(0..3i64, 1..6)) {
        let s = EpSeq::new(pre.clone(), cyc.clone()).unwrap();
        let again = EpSeq::new(s.pre().to_vec(), s.cycle().to_vec()).unwrap();
        prop_assert_eq!(&s, &again);
        let raw = EpSeq::new(pre, cyc).unwrap();
        for i in 0..30 {
            prop_assert_eq!(s.at(i), raw.at(i));
        }
    }

    #[test]
    fn shift_drops_one_digit(x in ep_digits(5, 2)) {
        let sys = gauss();
        let lhs = eval_exact(&sys, &x).unwrap();
        let tail = sys.inverse().mul_vec(&eval_exact(&sys, &x.shift()).unwrap());
        let head = sys.inverse().mul_int_vec(x.at(0));
        prop_assert_eq!(lhs, rv_add(&head, &tail));
    }

    #[test]
    fn decimal_equivalence_matches_neighbour_sequences(x in ep_digits(10, 1), y in ep_digits(10, 1)) {
        let sys = decimal();
        prop_assert_eq!(equivalent(&sys, &x, &y).unwrap(), is_neighbour_sequence(&sys, &x, &y).unwrap());
    }

    #[test]
    fn enumerated_representations_are_equivalent(x in ep_digits(5, 2)) {
        let sys = gauss();
        let (_, reps) = enumerate_equivalents(&sys, &x, 6).unwrap();
        prop_assert!(reps.contains(&x));
        for r in reps {
            prop_assert!(equivalent(&sys, &x, &r).unwrap());
        }
    }

    #[test]
    fn sep_int_round_trip(b in prop::collection::vec(-9..10i64, 1..5), seed in prop::collection::vec(0..5i64, 5)) {
        let p = b.len();
        let w = SepIntWitness { p, b, c: seed[..p].to_vec() };
        let seq = w.sequence().unwrap();
        let got = is_sep_int(&seq).expect("SEP");
        prop_assert_eq!(got.sequence().unwrap(), seq);
    }

    #[test]
    fn sep_sets_round_trip(us in prop::collection::vec(prop::collection::btree_set(-4..5i64, 1..4), 1..4),
                           vs in prop::collection::vec(prop::collection::btree_set(0..5i64, 1..4), 3)) {
        let p = us.len();
        let set = |s: &std::collections::BTreeSet<i64>| make_set(s.iter().map(|&x| vec![x]));
        let zero = vec![vec![0]; p];
        let w = SepSetWitness {
            p,
            beta_block: zero.clone(),
            beta_tail: zero,
            u: us.iter().map(set).collect(),
            v: vs[..p].iter().map(set).collect(),
        };
        let seq = w.sequence().unwrap();
        let got = is_sep_sets(&seq).unwrap().expect("SEP");
        prop_assert!(got.validate(&seq).is_ok());
    }

    #[test]
    fn maximal_complement_is_maximal(x in prop::collection::btree_set(-3..4i64, 1..4), s in prop::collection::btree_set(0..4i64, 1..3)) {
        let x = make_set(x.into_iter().map(|v| vec![v]));
        let s = make_set(s.into_iter().map(|v| vec![v]));
        let y = sumset(&x, &s).unwrap();
        let m = sumset_complement(&x, &y).unwrap().expect("a complement exists");
        prop_assert_eq!(sumset(&x, &m).unwrap(), y);
        prop_assert!(s.iter().all(|v| m.contains(v)));
    }

    #[test]
    fn expansions_evaluate_back(re in -200..200i64, im in -200..200i64) {
        let sys = gauss();
        let v = vec![re, im];
        let e = discrete_expansion(&sys, &v).unwrap();
        prop_assert_eq!(evaluate_expansion(sys.matrix(), &e).unwrap(), v);
    }

    #[test]
    fn phi_psi_are_digit_deletions(v in -5000..5000i64) {
        let ns = NumberSystem::new(RadixSystem::scalar(-10, &(0..10).collect::<Vec<_>>()).unwrap()).unwrap();
        let e = ns.expand(&[v]).unwrap();
        let drop_first = ns.evaluate(e.get(1..).unwrap_or(&[])).unwrap();
        let drop_last = ns.evaluate(&e[..e.len().saturating_sub(1)]).unwrap();
        prop_assert_eq!(phi(&ns, &[v]).unwrap(), drop_first);
        prop_assert_eq!(psi(&ns, &[v]).unwrap(), drop_last);
    }

    #[test]
    fn log_ratio_display_parses_back(a in 2..50u64, b in 2..50u64, p in 0..7i64, q in 1..7i64) {
        let r = LogRatio::logs(a, b).unwrap().scale(&num_rational::BigRational::new(p.into(), q.into()));
        prop_assert_eq!(LogRatio::parse(&r.to_string()).unwrap(), r);
    }
}
