use std::io::Cursor;

use proptest::prelude::*;
use signed_embed::sgraph::{parse_edge_list, random_connected, EdgeListSpec};
use signed_embed::{EmbeddingMatrix, SignedGraph};

fn reparse(g: &SignedGraph) -> SignedGraph {
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).unwrap();
    parse_edge_list(Cursor::new(buf), &EdgeListSpec::canonical("<mem>")).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(n in 2usize..80, extra in 0.0f64..0.3, neg in 0.0f64..1.0, seed in any::<u64>()) {
        let g = random_connected(n, extra, neg, seed);
        let back = reparse(&g);
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.checksum(), g.checksum());
    }

    #[test]
    fn adjacency_is_symmetric(n in 2usize..80, seed in any::<u64>()) {
        let g = random_connected(n, 0.2, 0.5, seed);
        for e in g.edges() {
            prop_assert_eq!(g.edge_sign(e.u, e.v), Some(e.sign));
            prop_assert_eq!(g.edge_sign(e.v, e.u), Some(e.sign));
        }
        let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn embedding_text_round_trip(rows in 1usize..20, dim in 1usize..8, seed in any::<u64>(), scale in -1e6f64..1e6) {
        let mut e = EmbeddingMatrix::gaussian(rows, dim, seed).unwrap();
        e.values_mut().iter_mut().for_each(|x| *x *= scale);
        let mut buf = Vec::new();
        e.write_text(&mut buf, &["meta line".to_string()]).unwrap();
        let back = EmbeddingMatrix::read_text(Cursor::new(buf)).unwrap();
        prop_assert_eq!(back, e);
    }
}

#[test]
fn isolated_trailing_nodes_survive_round_trip() {
    let g = SignedGraph::from_edges(5, [signed_embed::Edge::new(0, 1, signed_embed::Sign::Negative)]).unwrap();
    let back = reparse(&g);
    assert_eq!(back.node_count(), 5);
    assert_eq!(back.edges(), g.edges());
}
