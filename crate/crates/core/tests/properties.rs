mod common;

use std::collections::BTreeSet;

use common::{oracle_matrix, random_kb, random_sequence, score, GenConfig};
use dune::engine::{marginal_potential, Engine, Status};
use dune::kb::{parse_kb, serialize_kb};
use dune::{potential_remaining, raw_reaction, Event, FeatureId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, cfg: &GenConfig) -> (dune::KnowledgeBase, Vec<FeatureId>, Vec<FeatureId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (kb, pool) = random_kb(&mut rng, cfg);
    let seq = random_sequence(&mut rng, &pool, 10);
    (kb, pool, seq)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parser_never_panics_on_text(text in "\\PC{0,200}") {
        let _ = parse_kb(&text);
    }

    #[test]
    fn parser_never_panics_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_kb(&text);
    }

    #[test]
    fn parser_never_panics_on_token_soup(
        words in prop::collection::vec(
            prop::sample::select(vec![
                "demon", "d", "{", "}", "[", "]", ",", "leaf", "group", "members", "bonus",
                "accept", "reject", "death", "behavior", "output", "\"s\"", "5", "-3", "a", "#", "\n",
            ]),
            0..60,
        )
    ) {
        let text = words.join(" ");
        if let Err(diags) = parse_kb(&text) {
            prop_assert!(diags.iter().any(|d| d.is_error()));
            for d in diags.iter().filter(|d| d.is_error()) {
                prop_assert!(d.line >= 1 && d.column >= 1, "unpositioned {d:?}");
            }
        }
    }

    #[test]
    fn serialize_round_trips(seed in any::<u64>()) {
        let (kb, _, _) = instance(seed, &GenConfig::WILD);
        let text = serialize_kb(&kb);
        prop_assert_eq!(parse_kb(&text).unwrap(), kb);
    }

    #[test]
    fn schedule_cache_matches_count(seed in any::<u64>()) {
        let (kb, _, seq) = instance(seed, &GenConfig::WILD);
        let mut engine = Engine::new(kb.clone()).unwrap();
        for feat in &seq {
            engine.apply_step(feat);
            for (def, state) in kb.demons.iter().zip(engine.states()) {
                for (g, gs) in def.groups.iter().zip(&state.group_states) {
                    prop_assert_eq!(gs.prev_or_bonus, g.schedule.at(gs.satisfied_count));
                    prop_assert!(gs.satisfied_count <= g.members.len());
                }
                let distinct: BTreeSet<_> = state.rcvd_features.iter().collect();
                prop_assert_eq!(distinct.len(), state.rcvd_features.len());
            }
        }
    }

    #[test]
    fn dead_demons_never_change(seed in any::<u64>()) {
        let (kb, _, seq) = instance(seed, &GenConfig::WILD);
        let mut engine = Engine::new(kb).unwrap();
        let mut frozen: Vec<Option<dune::DemonState>> = vec![None; engine.states().len()];
        for feat in &seq {
            engine.apply_step(feat);
            for (slot, state) in frozen.iter_mut().zip(engine.states()) {
                match slot {
                    Some(dead) => prop_assert_eq!(&*dead, state),
                    None if state.status == Status::Dead => *slot = Some(state.clone()),
                    None => {}
                }
            }
        }
    }

    #[test]
    fn accept_fires_at_most_once(seed in any::<u64>()) {
        let (kb, pool, mut seq) = instance(seed, &GenConfig::WILD);
        seq.extend(pool.iter().cloned());
        let mut engine = Engine::new(kb).unwrap();
        let mut accepted = BTreeSet::new();
        for feat in &seq {
            for e in engine.apply_step(feat).events {
                if let Event::Accept { demon, .. } = e {
                    prop_assert!(accepted.insert(demon.clone()), "{demon} accepted twice");
                }
            }
        }
        for (name, state) in engine.kb().demons.iter().map(|d| &d.name).zip(engine.states()) {
            prop_assert_eq!(state.accepted_latched, accepted.contains(name));
        }
    }

    #[test]
    fn step_identity_without_clamping(seed in any::<u64>()) {
        let (kb, _, seq) = instance(seed, &GenConfig::TAME);
        let mut engine = Engine::new(kb).unwrap();
        for feat in &seq {
            let before: Vec<i32> = engine.states().iter().map(|s| s.confidence).collect();
            let report = engine.apply_step(feat);
            for (row, prev) in report.rows.iter().zip(before) {
                prop_assert_eq!(row.conf, prev + row.react + row.or_bns);
                if row.conf != prev {
                    prop_assert_eq!(row.old, prev);
                }
            }
        }
    }

    #[test]
    fn reaction_equals_recomputed_difference(seed in any::<u64>()) {
        let (kb, _, seq) = instance(seed, &GenConfig::TAME);
        let mut engine = Engine::new(kb.clone()).unwrap();
        for (i, feat) in seq.iter().enumerate() {
            let before: BTreeSet<&FeatureId> = seq[..i].iter().collect();
            let after: BTreeSet<&FeatureId> = seq[..=i].iter().collect();
            for (def, state) in kb.demons.iter().zip(engine.states()) {
                let r = raw_reaction(def, state, feat);
                prop_assert_eq!(r.raw + r.or_bonus, score(def, &after) - score(def, &before));
                prop_assert!(r.group_deltas.values().all(|&d| d >= 0));
                prop_assert_eq!(r.or_bonus, r.group_deltas.values().sum::<i32>());
            }
            engine.apply_step(feat);
        }
    }

    #[test]
    fn potential_matches_completion(seed in any::<u64>()) {
        let (kb, pool, seq) = instance(seed, &GenConfig::TAME);
        let mut engine = Engine::new(kb.clone()).unwrap();
        for feat in &seq {
            engine.apply_step(feat);
        }
        let seen: BTreeSet<&FeatureId> = seq.iter().collect();
        for (idx, def) in kb.demons.iter().enumerate() {
            let unseen: Vec<&FeatureId> = pool.iter().filter(|f| !seen.contains(f)).collect();
            // a negative leaf on a group member makes "all the bonus, none of
            // the penalty" unreachable by any real completion
            let conflicted = unseen
                .iter()
                .any(|f| def.leaf_weight(f).unwrap_or(0) < 0 && def.groups.iter().any(|g| g.contains(f)));
            if conflicted {
                continue;
            }
            let mut completed = engine.clone();
            for f in unseen.iter().filter(|f| def.leaf_weight(f).unwrap_or(0) >= 0) {
                completed.apply_step(f);
            }
            let state = &engine.states()[idx];
            prop_assert_eq!(
                state.confidence + potential_remaining(def, state),
                completed.states()[idx].confidence
            );
            prop_assert_eq!(potential_remaining(def, &completed.states()[idx]), 0);
            for f in &pool {
                prop_assert!(marginal_potential(def, state, f) >= 0);
            }
        }
    }

    #[test]
    fn incremental_matches_oracle(seed in any::<u64>()) {
        let (kb, _, seq) = instance(seed, &GenConfig::WILD);
        let (_, matrix) = dune::replay(kb.clone(), &seq).unwrap();
        prop_assert_eq!(matrix.columns, oracle_matrix(&kb, &seq));
    }
}
