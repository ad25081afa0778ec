mod common;

use common::gen::{brute_force_truth, plain_graph, plain_model};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semgraph::eval::Evaluator;

#[test]
fn lazy_search_agrees_with_total_valuations() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut yes, mut no) = (0, 0);
    for case in 0..200 {
        let g = plain_graph(&mut rng, 10);
        let size = rng.gen_range(1..=4);
        let m = plain_model(&mut rng, size);
        let want = brute_force_truth(&g, &m);
        let got = Evaluator::new(&m).truth(&g).unwrap();
        assert_eq!(got, want, "case {case}: {}", g.to_json());
        if want { yes += 1 } else { no += 1 }
    }
    println!("{yes} true / {no} false");
    // Both outcomes must be exercised for the comparison to mean anything.
    assert!(yes > 20 && no > 20, "{yes} true / {no} false");
}
