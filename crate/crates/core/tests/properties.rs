use gtflow_core::combinatorics::{
    count_ssyt, dominance_geq, enumerate_compositions, format_rational, parse_rational, rat, Partition,
    WeakComposition,
};
use gtflow_core::corpus::Corpus;
use gtflow_core::gt::weyl_dimension;
use gtflow_core::{FlowNetwork, MarkedEmbedding, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..30).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, Rational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * a.recip(), Rational::one());
        }
    }

    #[test]
    fn rational_text_round_trip(a in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
    }

    #[test]
    fn compositions_are_dominating_and_complete(parts in 1usize..5, total in 0i64..6, seed in prop::collection::vec(0i64..3, 5)) {
        let floor: Vec<i64> = seed[..parts].to_vec();
        let s: i64 = floor.iter().sum();
        prop_assume!(s <= total);
        let got = enumerate_compositions(total, parts, &WeakComposition::new(floor.clone()).unwrap());
        // brute force over the full box
        let mut want = 0;
        let mut v = vec![0i64; parts];
        loop {
            if v.iter().sum::<i64>() == total && dominance_geq(&v, &floor).unwrap() {
                want += 1;
            }
            let mut i = 0;
            while i < parts && v[i] == total {
                v[i] = 0;
                i += 1;
            }
            if i == parts { break; }
            v[i] += 1;
        }
        prop_assert_eq!(got.len(), want);
        for c in &got {
            prop_assert_eq!(c.total(), total);
            prop_assert!(dominance_geq(c.parts(), &floor).unwrap());
        }
    }

    #[test]
    fn weyl_dimension_counts_tableaux(parts in prop::collection::vec(0i64..4, 1..4)) {
        let mut p = parts.clone();
        p.sort_unstable_by(|a, b| b.cmp(a));
        let lam = Partition::new(p.clone()).unwrap();
        prop_assert_eq!(weyl_dimension(&lam), count_ssyt(&lam, p.len() as u32).unwrap());
    }

    #[test]
    fn kostant_ignores_edge_order(k in 0usize..22, perm_seed in any::<u64>(), scale in 0i64..3) {
        let corpus = Corpus::builtin();
        let (_, g) = &corpus.networks[k % corpus.networks.len()];
        let m = g.edges().len();
        let mut order: Vec<usize> = (0..m).collect();
        let mut s = perm_seed;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b: Vec<i64> = g.netflow().iter().map(|x| x * scale).collect();
        let h = g.reorder_edges(&order);
        let k1 = g.kostant(&b).unwrap();
        prop_assert_eq!(&k1, &h.kostant(&b).unwrap());
        prop_assert_eq!(k1, (g.enumerate_integer_flows(&b).unwrap().len() as i64).into());
    }
}

#[test]
fn corpus_json_round_trips() {
    let corpus = Corpus::builtin();
    for (name, g) in &corpus.networks {
        let s = serde_json::to_string(g).unwrap();
        let back: FlowNetwork = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, g, "{name}");
        assert_eq!(serde_json::to_string(&back).unwrap(), s, "{name}");
    }
    for (name, me) in &corpus.embeddings {
        let s = serde_json::to_string(me).unwrap();
        let back: MarkedEmbedding = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s, "{name}");
        assert_eq!(back.lattice_points().unwrap(), me.lattice_points().unwrap(), "{name}");
    }
}

#[test]
fn corpus_save_and_load() {
    let dir = std::env::temp_dir().join(format!("gtflow-corpus-{}", std::process::id()));
    let corpus = Corpus::builtin();
    corpus.save(&dir).unwrap();
    let back = Corpus::load(&dir).unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    let mut want = corpus.networks.clone();
    want.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(back.networks, want);
    assert_eq!(back.embeddings.len(), corpus.embeddings.len());
}
