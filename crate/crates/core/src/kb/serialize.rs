use std::fmt::Write;

use super::{DemonDef, KnowledgeBase, STANDARD_BEHAVIOR};
use crate::feature::is_identifier;

/// Canonical text for a knowledge base. Thresholds are always written out;
/// behavior and output only when they differ from the defaults.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for (i, demon) in kb.demons.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_demon(&mut out, demon);
    }
    out
}

fn write_demon(out: &mut String, d: &DemonDef) {
    let _ = writeln!(out, "demon {} {{", d.name);
    let _ = writeln!(out, "    accept {}", d.thresholds.accept);
    let _ = writeln!(out, "    reject {}", d.thresholds.reject);
    let _ = writeln!(out, "    death {}", d.thresholds.death);
    if d.behavior != STANDARD_BEHAVIOR {
        if is_identifier(&d.behavior) {
            let _ = writeln!(out, "    behavior {}", d.behavior);
        } else {
            let _ = writeln!(out, "    behavior {}", quote(&d.behavior));
        }
    }
    if let Some(text) = &d.output {
        let _ = writeln!(out, "    output {}", quote(text));
    }
    for leaf in &d.leaves {
        let _ = writeln!(out, "    leaf {} {}", leaf.feature, leaf.weight);
    }
    for g in &d.groups {
        let members: Vec<&str> = g.members.iter().map(|m| m.as_str()).collect();
        let _ = write!(out, "    group {} {{ members [{}]", g.name, members.join(", "));
        if g.explicit_schedule || !g.schedule.cumulative.is_empty() {
            let bonus: Vec<String> = g.schedule.cumulative.iter().map(i32::to_string).collect();
            let _ = write!(out, " bonus [{}]", bonus.join(", "));
        }
        out.push_str(" }\n");
    }
    out.push_str("}\n");
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    #[test]
    fn defaults_are_emitted_explicitly() {
        let kb = parse_kb("demon d { }").unwrap();
        let text = serialize_kb(&kb);
        assert_eq!(text, "demon d {\n    accept 90\n    reject 0\n    death 0\n}\n");
        assert!(!text.contains("group"));
    }

    #[test]
    fn odd_strings_round_trip() {
        let kb = parse_kb(r#"demon d { output "say \"hi\"\\ now" behavior "my-behavior" }"#).unwrap();
        let back = parse_kb(&serialize_kb(&kb)).unwrap();
        assert_eq!(kb, back);
        assert_eq!(back.demons[0].behavior, "my-behavior");
    }
}
