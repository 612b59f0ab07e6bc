//! Second reference session: stricter accept thresholds and a
//! contradicting feature (`incoherence`) that kills three demons.

use dune::{fixtures, render_summary_matrix, replay, Event, KnowledgeBase};

fn main() {
    let kb = KnowledgeBase::parse(fixtures::KB_RUN2).expect("fixture parses");
    let (session, matrix) = replay(kb, &fixtures::run2_features()).expect("fixture is valid");
    print!("{}", render_summary_matrix(&matrix));

    for report in session.log() {
        for event in &report.events {
            if let Event::Death { demon } = event {
                println!("{demon} died at input {} ({})", report.fnum, report.feature);
            }
        }
    }
    let accepted = session.log().iter().flat_map(|r| &r.events).any(|e| matches!(e, Event::Accept { .. }));
    println!("accepted anything: {accepted}");
}
