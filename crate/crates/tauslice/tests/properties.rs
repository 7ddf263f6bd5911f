//! Seeded property tests for slices, mutations, resolutions and extensions.

use proptest::prelude::*;
use std::sync::OnceLock;
use tauslice::corpus;
use tauslice::extensions::trivial_extension;
use tauslice::koszul::{global_dimension, minimal_resolution, GlobalDimension};
use tauslice::present::present;
use tauslice::quiver::BoundQuiver;
use tauslice::separated::{tau_bar, tau_bar_inv};
use tauslice::slices::{
    initial_slice, is_complete_slice, legal_mutations, mutate, random_chain, reduce_to_initial, slice_algebra, Ambient,
    Direction, Mutation, TauSlice,
};
use tauslice::stability::check_stable;
use tauslice::structalg::{struct_from_bound, StructAlgebra};

fn ambients() -> &'static [(String, Ambient)] {
    static CELL: OnceLock<Vec<(String, Ambient)>> = OnceLock::new();
    CELL.get_or_init(|| {
        corpus::small_battery().into_iter().map(|(n, bq)| (n, Ambient::new(&bq, None).unwrap())).collect()
    })
}

fn chained(k: usize, seed: u64, len: usize) -> (&'static str, &'static Ambient, TauSlice) {
    let (name, amb) = &ambients()[k % ambients().len()];
    let s0 = initial_slice(amb, seed as usize % amb.st.num_vertices()).unwrap();
    let mut cur = s0.clone();
    for m in random_chain(amb, &s0, len, seed).unwrap() {
        cur = mutate(amb, &cur, m).unwrap();
    }
    (name, amb, cur)
}

fn algebra(amb: &Ambient, s: &TauSlice) -> StructAlgebra {
    let bq = slice_algebra(amb, s).unwrap();
    struct_from_bound(&bq, s.depth() as usize + 1).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mutations_stay_complete(k in 0usize..32, seed in any::<u64>(), len in 0usize..6) {
        let (name, amb, s) = chained(k, seed, len);
        prop_assert!(is_complete_slice(amb, &s.vertices).is_ok(), "{}", name);
        for m in legal_mutations(amb, &s) {
            let t = mutate(amb, &s, m).unwrap();
            prop_assert_eq!(t.vertices.len(), s.vertices.len());
            prop_assert!(is_complete_slice(amb, &t.vertices).is_ok(), "{}", name);
        }
    }

    #[test]
    fn plus_undoes_minus(k in 0usize..32, seed in any::<u64>(), len in 0usize..6) {
        let (_, amb, s) = chained(k, seed, len);
        for v in s.sources(amb) {
            let t = mutate(amb, &s, Mutation { vertex: v, direction: Direction::Plus }).unwrap();
            let back = Mutation { vertex: tau_bar_inv(&amb.st, v), direction: Direction::Minus };
            prop_assert_eq!(mutate(amb, &t, back).unwrap(), s.clone());
        }
        for v in s.sinks(amb) {
            let t = mutate(amb, &s, Mutation { vertex: v, direction: Direction::Minus }).unwrap();
            prop_assert!(t.contains(tau_bar(&amb.st, v)));
        }
    }

    #[test]
    fn shifts_are_slices(k in 0usize..32, seed in any::<u64>(), r in -4i64..5) {
        let (_, amb, s) = chained(k, seed, 3);
        let t = s.shift(amb, r);
        prop_assert!(is_complete_slice(amb, &t.vertices).is_ok());
        prop_assert_eq!(t.depth(), s.depth());
        prop_assert_eq!(TauSlice::from_json(amb, &t.to_json(amb)).unwrap(), t);
    }

    #[test]
    fn reduction_reaches_minimal_depth(k in 0usize..32, seed in any::<u64>(), len in 0usize..8) {
        let (_, amb, s) = chained(k, seed, len);
        let (_, fin) = reduce_to_initial(amb, &s, 1000).unwrap();
        prop_assert_eq!(fin.depth(), amb.l() as i64 - 1);
        prop_assert!(s.depth() >= fin.depth());
    }

    #[test]
    fn resolutions_satisfy_euler(k in 0usize..32, seed in any::<u64>(), len in 0usize..5) {
        let (_, amb, s) = chained(k, seed, len);
        let a = algebra(amb, &s);
        for v in 0..a.num_vertices() {
            let res = minimal_resolution(&a, v, 2 * amb.l() + 4);
            prop_assert!(res.complete);
            prop_assert!(res.euler_check(&a));
        }
        prop_assert!(matches!(global_dimension(&a, 2 * amb.l() + 4), GlobalDimension::Finite(_)));
    }

    #[test]
    fn trivial_extensions_are_stable(k in 0usize..32, seed in any::<u64>(), len in 0usize..4) {
        let (name, amb, s) = chained(k, seed, len);
        let te = trivial_extension(&algebra(amb, &s)).unwrap();
        te.check().unwrap();
        let p = present(&te).unwrap();
        let st = check_stable(&p, None);
        prop_assert!(st.is_ok(), "{}: {:?}", name, st.err());
    }

    #[test]
    fn relabeling_conjugates_tau(k in 0usize..32, seed in any::<u64>()) {
        let battery = corpus::small_battery();
        let (_, bq) = &battery[k % battery.len()];
        let (rel, perm) = corpus::relabel(bq, seed);
        let a = check_stable(bq, None).unwrap();
        let b = check_stable(&rel, None).unwrap();
        prop_assert_eq!(a.l, b.l);
        for i in 0..perm.len() {
            prop_assert_eq!(perm[a.tau[i]], b.tau[perm[i]]);
        }
        prop_assert_eq!(BoundQuiver::parse(&rel.serialize()).unwrap(), rel);
    }
}
