//! Shows how reachability and remaining potential change as the second
//! reference session unfolds.

use dune::{fixtures, Engine, KnowledgeBase};

fn main() {
    let kb = KnowledgeBase::parse(fixtures::KB_RUN2).unwrap();
    let mut engine = Engine::new(kb).unwrap();
    for feature in fixtures::run2_features() {
        engine.apply_step(&feature);
        println!("after {feature}:");
        for (demon, reach) in engine.reachabilities() {
            let state = engine.state(&demon).unwrap();
            let potential = engine.potential_remaining(&demon).unwrap();
            println!("  {demon:<20} conf {:>4}  potential {potential:>4}  {reach:?}", state.confidence);
        }
    }
}
