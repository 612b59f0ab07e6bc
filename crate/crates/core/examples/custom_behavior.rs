//! Registers two custom behaviors. `half` dampens every reaction and
//! `crowd` scales it down when many rivals are still alive.

use dune::engine::halve;
use dune::{BehaviorRegistry, Engine, Environment, FeatureId, KnowledgeBase, Reaction};

const KB: &str = r#"
demon cautious {
    behavior half
    leaf fever 40
    leaf rash 40
    leaf cough 40
}
demon herd {
    behavior crowd
    leaf fever 40
    leaf rash 40
}
demon plain {
    leaf fever 40
    leaf cough 40
}
"#;

fn crowd(r: &Reaction, env: &Environment) -> i32 {
    r.raw / env.alive_count.max(1) as i32
}

fn main() {
    let kb = KnowledgeBase::parse(KB).unwrap();
    let registry = BehaviorRegistry::new().with("half", halve).unwrap().with("crowd", crowd).unwrap();
    let mut engine = Engine::with_behaviors(kb, registry).unwrap();
    for name in ["fever", "rash", "cough"] {
        let report = engine.apply_step(&FeatureId::new(name).unwrap());
        let confs: Vec<String> = report.rows.iter().map(|r| format!("{}={}", r.demon, r.conf)).collect();
        println!("{name}: {}", confs.join(" "));
    }

    // an engine without the registration refuses the KB up front
    let err = Engine::new(KnowledgeBase::parse(KB).unwrap()).unwrap_err();
    println!("without registry: {err}");
}
