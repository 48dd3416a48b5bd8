//! Guards the committed collaboration dataset against its generator.

use std::fmt::Write as _;
use std::path::Path;

use imcp_core::rng::stream_rng;
use imcp_core::synth::collaboration;

#[test]
fn committed_fixture_matches_generator() {
    // Mirrors examples/make_collab_fixture.rs.
    let mut rng = stream_rng(20_240_380, &[]);
    let pairs = collaboration(380, 450, &mut rng);
    let mut expected = String::new();
    writeln!(
        expected,
        "# collaboration network, 380 authors, 450 papers, one undirected pair per line"
    )
    .unwrap();
    for (a, b) in pairs {
        writeln!(expected, "{a} {b}").unwrap();
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/collab-380.txt");
    let committed = std::fs::read_to_string(path).expect("fixture file is committed");
    assert_eq!(committed, expected);
}
