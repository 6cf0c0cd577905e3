mod common;

use codecarta_core::serializer::{deserialize, serialize};
use common::props;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_graphs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for round in 0..200 {
        let n = rng.gen_range(1..150);
        props::check_serializer_round_trip(&mut rng, n).unwrap_or_else(|e| panic!("round {round}: {e}"));
    }
}

#[test]
fn truncated_documents_fail_cleanly() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let g = common::random_graph(&mut rng, 40);
    let bytes = serialize(&g).unwrap();
    for cut in (0..bytes.len()).step_by(bytes.len() / 50 + 1) {
        assert!(deserialize(&bytes[..cut]).is_err(), "prefix of {cut} bytes parsed");
    }
}
