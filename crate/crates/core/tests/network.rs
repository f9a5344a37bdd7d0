use std::collections::VecDeque;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strategic_pricing::network::{
    apply_manipulation, bundled_fixture, compare_mechanisms, load_edge_list, max_known_high_neighbors, no_gain_condition,
    run_mechanism, sample_preferences, ArrivalSequence, MechanismKind, SocialGraph, FIXTURE_PREFERENCE_SEED,
};
use strategic_pricing::MarketParams;

fn seeded_fixture() -> SocialGraph {
    sample_preferences(&bundled_fixture(), 0.5, FIXTURE_PREFERENCE_SEED).unwrap()
}

fn is_connected(g: &SocialGraph) -> bool {
    let mut seen = vec![false; g.n_nodes()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

#[test]
fn bundled_fixture_shape() {
    let g = bundled_fixture();
    assert_eq!(g.n_nodes(), 100);
    assert_eq!(g.n_edges(), 230);
    assert!((g.mean_degree() - 4.6).abs() < 1e-12);
    assert!(is_connected(&g));
    g.check_invariants().unwrap();
}

#[test]
fn committed_preference_draw() {
    let g = seeded_fixture();
    let highs = g.preferences().iter().filter(|p| p.is_high()).count();
    assert_eq!(highs, 51);
    let again = seeded_fixture();
    assert_eq!(g.preferences(), again.preferences());
}

#[test]
fn hiding_rate_on_high_pairs() {
    let g = seeded_fixture();
    let p = MarketParams::new(3.8, 1.9, 0.5).unwrap();
    let (mut hidden, mut total) = (0usize, 0usize);
    for seed in 0..400 {
        let m = apply_manipulation(&g, &p, seed).unwrap();
        for (e, &(u, v)) in m.edges().iter().enumerate() {
            if m.preference(u).is_high() && m.preference(v).is_high() {
                total += 1;
                hidden += usize::from(m.realized(e) == 0);
            }
        }
    }
    let rate = hidden as f64 / total as f64;
    assert!((rate - 0.5).abs() < 0.02, "hidden rate {rate}");
}

#[test]
fn known_high_ties_are_hidden_under_no_gain() {
    let mut g = seeded_fixture();
    let k = (0..g.n_nodes()).find(|&u| g.preference(u).is_high()).unwrap();
    g.set_known(k, true).unwrap();
    let p = MarketParams::new(100.0, 99.375, 0.5).unwrap();
    assert!(max_known_high_neighbors(&g) <= 1);
    assert!(no_gain_condition(g.unknown_nodes().len(), 1, &p));
    let m = apply_manipulation(&g, &p, 3).unwrap();
    for &(v, e) in m.neighbors(k) {
        if m.preference(v).is_high() {
            assert_eq!(m.realized(e), 0);
        }
    }
}

#[test]
fn undisclosed_learning_with_a_known_low_buyer_extracts_everything() {
    let mut g = seeded_fixture();
    let k = (0..g.n_nodes()).find(|&u| !g.preference(u).is_high()).unwrap();
    g.set_known(k, true).unwrap();
    let p = MarketParams::new(4.0, 2.0, 0.5).unwrap();
    let full: f64 = g.unknown_nodes().iter().map(|&u| p.value(g.preference(u))).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let arrivals = ArrivalSequence::shuffled(&g, &mut rng);
        let r = run_mechanism(&g, MechanismKind::Ulp, &arrivals, &p, &mut rng).unwrap();
        assert_eq!(r.revenue, full);
    }
}

#[test]
fn strategic_learning_sits_between_benchmarks() {
    let g = seeded_fixture();
    let p = MarketParams::new(3.8, 1.9, 0.5).unwrap();
    let c = compare_mechanisms(&g, &p, 2_000, 5).unwrap();
    assert!(c.nlp.mean < c.slp.mean && c.slp.mean < c.ulp.mean);
    assert_eq!(c.get(MechanismKind::Slp), c.slp);
    let again = compare_mechanisms(&g, &p, 2_000, 5).unwrap();
    assert_eq!(c, again);
}

#[test]
fn arrival_sequences_must_cover_unknown_buyers() {
    let g = seeded_fixture();
    assert!(ArrivalSequence::new((0..99).collect(), &g).is_err());
    assert!(ArrivalSequence::new((0..100).rev().collect(), &g).is_ok());
}

#[test]
fn edge_list_files_load() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# comment\n10 20\n20 30\n\n30 10\n10 20").unwrap();
    let g = load_edge_list(std::io::BufReader::new(std::fs::File::open(f.path()).unwrap())).unwrap();
    assert_eq!(g.n_nodes(), 3);
    assert_eq!(g.n_edges(), 3);
    assert_eq!(g.ids(), &[10, 20, 30]);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1 2\n2 x").unwrap();
    let err = load_edge_list(std::io::BufReader::new(std::fs::File::open(bad.path()).unwrap())).unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}
