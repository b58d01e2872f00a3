mod common;

use common::{random_connected, rng};
use msvp::graph::{
    load_edge_list, load_lfr, pair_graph, planted_partition, Graph, GraphError, IndexBase,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parse(text: &str) -> Result<Graph, GraphError> {
    load_edge_list(text.as_bytes(), IndexBase::Zero)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|x| find(&mut parent, x) == root)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(seed in any::<u64>(), n in 2usize..30) {
        let g = random_connected(&mut rng(seed), n, 0.2);
        let back = parse(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.node_count(), g.node_count());
    }

    #[test]
    fn degrees_sum_to_twice_the_weight(seed in any::<u64>(), n in 2usize..30) {
        let g = random_connected(&mut rng(seed), n, 0.3);
        let total: f64 = g.degrees().iter().sum();
        prop_assert!((total - 2.0 * g.total_weight()).abs() <= 1e-12 * total);
        let pi: f64 = g.stationary().iter().sum();
        prop_assert!((pi - 1.0).abs() < 1e-12);
    }
}

#[test]
fn planted_partition_matches_an_independent_replay() {
    let (k, size, p_in, p_out, seed) = (3, 10, 0.9, 0.05, 7u64);
    let (g, truth) = planted_partition(k, size, p_in, p_out, seed).unwrap();
    let n = k * size;
    let mut expected = None;
    for attempt in 0..100 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(attempt);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if i / size == j / size { p_in } else { p_out };
                if r.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        if connected(n, &edges) {
            expected = Some(edges);
            break;
        }
    }
    let expected = expected.expect("some attempt is connected");
    assert_eq!(g.node_count(), 30);
    assert_eq!(g.edge_count(), expected.len());
    let got: Vec<(usize, usize)> = g.edges().iter().map(|&(i, j, _)| (i, j)).collect();
    assert_eq!(got, expected);
    assert!(g.edges().iter().all(|e| e.2 == 1.0));
    assert_eq!(truth.k(), 3);
    assert_eq!(truth.partition().label(29), truth.partition().label(20));
}

#[test]
fn planted_partition_is_deterministic_and_complete_when_certain() {
    assert_eq!(
        planted_partition(4, 8, 0.9, 0.05, 3).unwrap(),
        planted_partition(4, 8, 0.9, 0.05, 3).unwrap()
    );
    let (k8, _) = planted_partition(2, 4, 1.0, 1.0, 99).unwrap();
    assert_eq!(k8.edge_count(), 28);
    assert!(matches!(
        planted_partition(2, 4, 0.05, 0.0, 1),
        Err(GraphError::GenerationFailed { attempts: 100 })
    ));
    assert!(matches!(
        planted_partition(2, 4, 0.1, 0.5, 1),
        Err(GraphError::InvalidParameters(_))
    ));
    assert!(matches!(
        planted_partition(0, 4, 0.5, 0.1, 1),
        Err(GraphError::InvalidParameters(_))
    ));
}

#[test]
fn loader_rejections() {
    assert!(matches!(
        parse("0 1\n1 1\n"),
        Err(GraphError::SelfLoop { line: 2, node: 1 })
    ));
    assert!(matches!(
        parse("0 1 -2\n"),
        Err(GraphError::NonPositiveWeight { line: 1, .. })
    ));
    assert!(matches!(
        parse("0 1 0\n"),
        Err(GraphError::NonPositiveWeight { .. })
    ));
    assert!(matches!(
        parse("0 1 nan\n"),
        Err(GraphError::NonPositiveWeight { .. }) | Err(GraphError::MalformedLine { .. })
    ));
    assert!(matches!(
        parse("0 1\n1 0 3\n"),
        Err(GraphError::ConflictingDuplicateEdge { line: 2, .. })
    ));
    assert!(matches!(
        parse("0\n"),
        Err(GraphError::MalformedLine { line: 1, .. })
    ));
    assert!(matches!(
        parse("a b\n"),
        Err(GraphError::MalformedLine { .. })
    ));
    assert!(matches!(
        parse("0 1\n2 3\n"),
        Err(GraphError::Disconnected { .. })
    ));
    assert!(matches!(parse("# nothing\n"), Err(GraphError::EmptyGraph)));
}

#[test]
fn loader_accepts_comments_duplicates_and_one_based_ids() {
    let g = parse("# header\n0 1 2.5\n\n1 0 2.5\n1 2\n").unwrap();
    assert_eq!(g.edge_count(), 2);
    assert_eq!(g.weight(0, 1), 2.5);
    assert_eq!(g.weight(2, 1), 1.0);
    let one = load_edge_list("1 2\n2 3\n".as_bytes(), IndexBase::One).unwrap();
    assert_eq!(one.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
}

#[test]
fn lfr_files_load_with_ground_truth() {
    let net = "1\t2\n2\t1\n2\t3\n3\t2\n3\t4\n4\t3\n";
    let comm = "1\t5\n2\t5\n3\t9\n4\t9\n";
    let (g, truth) = load_lfr(net.as_bytes(), comm.as_bytes()).unwrap();
    assert_eq!(g.edge_count(), 3);
    assert_eq!(truth.partition().labels(), &[0, 0, 1, 1]);
    assert_eq!(truth.k(), 2);
    assert!(matches!(
        load_lfr("1\t2\n".as_bytes(), "1\t1\n2\t1\n".as_bytes()),
        Err(GraphError::AsymmetricEdgeList { i: 1, j: 2 })
    ));
    assert!(matches!(
        load_lfr(net.as_bytes(), "1\t1\n2\t1\n4\t2\n".as_bytes()),
        Err(GraphError::MissingCommunityLabel { node: 3 })
    ));
}

#[test]
fn pair_graph_fixture() {
    let g = pair_graph();
    assert_eq!(g.node_count(), 4);
    assert_eq!(g.total_weight(), 24.0);
    assert_eq!(g.degrees(), &[12.0, 12.0, 12.0, 12.0]);
    assert_eq!(
        g.to_edge_list(),
        "0 1 10.0\n0 2 1.0\n0 3 1.0\n1 2 1.0\n1 3 1.0\n2 3 10.0\n"
    );
}

#[test]
fn random_graphs_are_connected() {
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.random_range(2..40);
        let g = random_connected(&mut r, n, 0.05);
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(i, j, _)| (i, j)).collect();
        assert!(connected(n, &edges));
    }
}
