//! Writes a session log to a JSONL file, loads it back and checks that
//! the reloaded engine ends in the same state.

use std::fs::File;

use dune::{fixtures, load_log, KnowledgeBase, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = KnowledgeBase::parse(fixtures::KB_RUN1).map_err(|_| "fixture parses")?;
    let path = std::env::temp_dir().join("dune-example-session.jsonl");

    let mut session = Session::new(kb.clone())?;
    session.persist_to(File::create(&path)?);
    for feature in fixtures::run1_features().iter().take(5) {
        let (_, written) = session.submit(feature);
        written?;
    }
    println!("wrote {} step(s) to {}", session.log().len(), path.display());

    let loaded = load_log(File::open(&path).map(std::io::BufReader::new)?, kb)?;
    assert_eq!(loaded.engine().states(), session.engine().states());
    for row in loaded.engine().snapshot() {
        println!("{}\t{}\t{}", row.demon, row.state, row.conf);
    }
    Ok(())
}
