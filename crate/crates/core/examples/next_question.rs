//! Drives a session by always asking the suggested question and
//! answering from a fixed set of "true" findings.

use std::collections::BTreeSet;

use dune::{fixtures, render_step_table, FeatureId, KnowledgeBase, Session};

fn main() {
    let kb = KnowledgeBase::parse(fixtures::KB_RUN1).expect("fixture parses");
    let truth: BTreeSet<FeatureId> = ["prom_dysphoric_mood", "fatigue", "pessimistic", "sleep_disorder", "weight_disorder"]
        .into_iter()
        .map(|s| FeatureId::new(s).unwrap())
        .collect();
    let mut session = Session::new(kb).expect("fixture is valid");
    let mut asked = BTreeSet::new();

    while let Some(q) = session.engine().best_question() {
        // a "no" leaves the engine untouched, so the same question comes back
        if !asked.insert(q.feature.clone()) {
            break;
        }
        let present = truth.contains(&q.feature);
        println!("{} asks about {} (+{}): {}", q.demon, q.feature, q.potential, if present { "yes" } else { "no" });
        if present {
            let report = session.submit_feature(&q.feature);
            for e in &report.events {
                println!("  {e:?}");
            }
        }
    }
    if let Some(last) = session.log().last() {
        print!("{}", render_step_table(last));
    }
}
