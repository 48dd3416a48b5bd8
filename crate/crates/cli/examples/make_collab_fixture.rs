//! Regenerates data/collab-380.txt, the bundled collaboration-style
//! dataset: one line per undirected co-author pair. The file is committed;
//! tests/fixture.rs guards that it matches this generator.

use std::fmt::Write as _;

use imcp_core::rng::stream_rng;
use imcp_core::synth::collaboration;

pub const FIXTURE_SEED: u64 = 20_240_380;
pub const FIXTURE_AUTHORS: usize = 380;
pub const FIXTURE_PAPERS: usize = 450;

pub fn fixture_text() -> String {
    let mut rng = stream_rng(FIXTURE_SEED, &[]);
    let pairs = collaboration(FIXTURE_AUTHORS, FIXTURE_PAPERS, &mut rng);
    let mut text = String::new();
    writeln!(
        text,
        "# collaboration network, {FIXTURE_AUTHORS} authors, {FIXTURE_PAPERS} papers, one undirected pair per line"
    )
    .unwrap();
    for (a, b) in pairs {
        writeln!(text, "{a} {b}").unwrap();
    }
    text
}

fn main() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("data");
    std::fs::create_dir_all(&root).unwrap();
    let path = root.join("collab-380.txt");
    std::fs::write(&path, fixture_text()).unwrap();
    println!("wrote {}", path.display());
}
