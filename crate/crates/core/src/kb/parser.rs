//! Recursive-descent parser for `.dune` knowledge bases.
//!
//! ```text
//! kb     := { demon } ;
//! demon  := "demon" IDENT "{" { clause } "}" ;
//! clause := "accept" INT | "reject" INT | "death" INT
//!         | "behavior" (IDENT | STRING) | "output" STRING
//!         | "leaf" IDENT INT
//!         | "group" IDENT "{" "members" "[" IDENT { "," IDENT } "]"
//!                             [ "bonus" "[" INT { "," INT } "]" ] "}" ;
//! ```
//!
//! Keywords are contextual, so a feature may be called `leaf`. The parser
//! never stops at the first problem: it records a diagnostic, skips to the
//! next clause and keeps going.

use super::diagnostic::{Diagnostic, Position};
use super::lexer::{tokenize, Token, TokenKind};
use super::{BonusSchedule, CriterionGroup, DemonDef, KnowledgeBase, Leaf};
use crate::feature::FeatureId;

const CLAUSE_KEYWORDS: &[&str] = &["accept", "reject", "death", "behavior", "output", "leaf", "group"];

pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let mut p = Parser { tokens: tokenize(text), idx: 0, diags: Vec::new() };
    let kb = p.parse_kb();
    if p.diags.iter().any(Diagnostic::is_error) {
        Err(p.diags)
    } else {
        Ok(kb)
    }
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        tok
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn error(&mut self, pos: Position, code: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(pos, code, message));
    }

    fn unexpected(&mut self, expected: &str) {
        let tok = self.peek().clone();
        let code = match tok.kind {
            TokenKind::Invalid(_) => "invalid_token",
            _ => "syntax",
        };
        self.error(tok.pos, code, format!("expected {expected}, found {}", tok.kind.describe()));
    }

    fn expect_ident(&mut self, what: &str) -> Option<(String, Position)> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                let pos = self.bump().pos;
                Some((s, pos))
            }
            _ => {
                self.unexpected(what);
                None
            }
        }
    }

    fn expect_int(&mut self, what: &str) -> Option<(Option<i64>, Position)> {
        match self.peek().kind {
            TokenKind::Int(v) => {
                let pos = self.bump().pos;
                Some((v, pos))
            }
            _ => {
                self.unexpected(what);
                None
            }
        }
    }

    fn expect_punct(&mut self, kind: TokenKind) -> Option<()> {
        if self.peek().kind == kind {
            self.bump();
            Some(())
        } else {
            self.unexpected(&kind.describe());
            None
        }
    }

    /// Skips tokens until a clause keyword or `}` at `depth` zero, or EOF.
    fn recover(&mut self, mut depth: usize) {
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                TokenKind::Ident(s) if depth == 0 && (CLAUSE_KEYWORDS.contains(&s.as_str()) || s == "demon") => {
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn recover_top(&mut self) {
        let mut depth = 0usize;
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => depth = depth.saturating_sub(1),
                TokenKind::Ident(s) if depth == 0 && s == "demon" => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn parse_kb(&mut self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::default();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::Eof => return kb,
                TokenKind::Ident(s) if s == "demon" => {
                    if let Some(d) = self.parse_demon(&kb) {
                        kb.demons.push(d);
                    }
                }
                TokenKind::Ident(s) => {
                    let msg = format!("unknown keyword `{s}`, expected `demon`");
                    self.error(tok.pos, "unknown_keyword", msg);
                    self.bump();
                    self.recover_top();
                }
                _ => {
                    self.unexpected("`demon`");
                    self.bump();
                    self.recover_top();
                }
            }
        }
    }

    fn parse_demon(&mut self, kb: &KnowledgeBase) -> Option<DemonDef> {
        self.bump();
        let Some((name, name_pos)) = self.expect_ident("demon name") else {
            self.recover_top();
            return None;
        };
        if kb.demon(&name).is_some() {
            self.error(name_pos, "duplicate_demon", format!("demon `{name}` is already defined"));
        }
        let mut demon = DemonDef::new(name);
        demon.position = Some(name_pos);
        if self.expect_punct(TokenKind::LBrace).is_none() {
            self.recover_top();
            return Some(demon);
        }
        let mut seen_clauses: Vec<&'static str> = Vec::new();
        loop {
            let tok = self.peek().clone();
            match &tok.kind {
                TokenKind::RBrace => {
                    self.bump();
                    return Some(demon);
                }
                TokenKind::Eof => {
                    self.error(tok.pos, "syntax", format!("unclosed body of demon `{}`", demon.name));
                    return Some(demon);
                }
                TokenKind::Ident(s) if s == "demon" => {
                    self.error(tok.pos, "syntax", format!("missing `}}` before next demon after `{}`", demon.name));
                    return Some(demon);
                }
                TokenKind::Ident(s) => {
                    let kw = s.clone();
                    if let Some(&known) = CLAUSE_KEYWORDS.iter().find(|k| **k == kw) {
                        self.bump();
                        if matches!(known, "accept" | "reject" | "death" | "behavior" | "output") {
                            if seen_clauses.contains(&known) {
                                self.error(tok.pos, "duplicate_clause", format!("`{known}` given more than once"));
                            }
                            seen_clauses.push(known);
                        }
                        if self.parse_clause(known, &mut demon).is_none() {
                            self.recover(0);
                        }
                    } else {
                        self.error(tok.pos, "unknown_keyword", format!("unknown keyword `{kw}`"));
                        self.bump();
                        self.recover(0);
                    }
                }
                _ => {
                    self.unexpected("a clause keyword or `}`");
                    self.bump();
                    self.recover(0);
                }
            }
        }
    }

    fn parse_clause(&mut self, keyword: &str, demon: &mut DemonDef) -> Option<()> {
        match keyword {
            "accept" | "reject" | "death" => {
                let (value, pos) = self.expect_int("threshold value")?;
                let Some(v) = in_range(value, -100, 100) else {
                    self.error(pos, "threshold_range", format!("`{keyword}` must lie in [-100, 100]"));
                    return Some(());
                };
                match keyword {
                    "accept" => demon.thresholds.accept = v,
                    "reject" => demon.thresholds.reject = v,
                    _ => demon.thresholds.death = v,
                }
            }
            "behavior" => {
                let tok = self.peek().clone();
                match tok.kind {
                    TokenKind::Ident(s) | TokenKind::Str(s) => {
                        self.bump();
                        if s.is_empty() {
                            self.error(tok.pos, "syntax", "behavior id must not be empty");
                        }
                        demon.behavior = s;
                    }
                    _ => {
                        self.unexpected("behavior id");
                        return None;
                    }
                }
            }
            "output" => match self.peek().kind.clone() {
                TokenKind::Str(s) => {
                    self.bump();
                    demon.output = Some(s);
                }
                _ => {
                    self.unexpected("string");
                    return None;
                }
            },
            "leaf" => {
                let (feature, fpos) = self.expect_ident("feature name")?;
                let (value, wpos) = self.expect_int("leaf weight")?;
                let feature = FeatureId::new(feature).expect("lexer only yields valid identifiers");
                if demon.leaf_weight(&feature).is_some() {
                    let msg = format!("duplicate leaf `{feature}` in demon `{}`", demon.name);
                    self.error(fpos, "duplicate_leaf", msg);
                    return Some(());
                }
                match in_range(value, -100, 100) {
                    Some(weight) => demon.leaves.push(Leaf { feature, weight }),
                    None => self.error(wpos, "weight_range", "leaf weight must lie in [-100, 100]"),
                }
            }
            "group" => return self.parse_group(demon),
            _ => unreachable!("caller only passes clause keywords"),
        }
        Some(())
    }

    fn parse_group(&mut self, demon: &mut DemonDef) -> Option<()> {
        let (name, name_pos) = self.expect_ident("group name")?;
        if demon.groups.iter().any(|g| g.name == name) {
            self.error(name_pos, "duplicate_group", format!("group `{name}` is already defined in `{}`", demon.name));
        }
        self.expect_punct(TokenKind::LBrace)?;
        let parsed = self.parse_group_body(name);
        match parsed {
            Some(group) => {
                demon.groups.push(group);
                Some(())
            }
            None => {
                // Resume inside the group braces.
                self.recover(1);
                if self.peek().kind == TokenKind::RBrace {
                    self.bump();
                }
                Some(())
            }
        }
    }

    fn parse_group_body(&mut self, name: String) -> Option<CriterionGroup> {
        if !self.at_ident("members") {
            let tok = self.peek().clone();
            if let TokenKind::Ident(s) = &tok.kind {
                self.error(tok.pos, "unknown_keyword", format!("unknown keyword `{s}`, expected `members`"));
            } else {
                self.unexpected("`members`");
            }
            return None;
        }
        self.bump();
        self.expect_punct(TokenKind::LBracket)?;
        let mut members: Vec<FeatureId> = Vec::new();
        loop {
            let (member, pos) = self.expect_ident("member feature")?;
            let member = FeatureId::new(member).expect("lexer only yields valid identifiers");
            if members.contains(&member) {
                self.error(pos, "duplicate_member", format!("`{member}` repeated in group `{name}`"));
            } else {
                members.push(member);
            }
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RBracket => {
                    self.bump();
                    break;
                }
                _ => {
                    self.unexpected("`,` or `]`");
                    return None;
                }
            }
        }

        let mut schedule = Vec::new();
        let mut explicit_schedule = false;
        if self.at_ident("bonus") {
            self.bump();
            explicit_schedule = true;
            self.expect_punct(TokenKind::LBracket)?;
            let mut reported_order = false;
            let mut reported_len = false;
            loop {
                let (value, pos) = self.expect_int("bonus value")?;
                match in_range(value, 0, 100) {
                    Some(v) => {
                        if !reported_order && schedule.last().is_some_and(|&prev| v < prev) {
                            self.error(pos, "bonus_not_nondecreasing", format!("bonus not nondecreasing in group `{name}`"));
                            reported_order = true;
                        }
                        schedule.push(v);
                    }
                    None => self.error(pos, "bonus_range", "bonus values must lie in [0, 100]"),
                }
                if !reported_len && schedule.len() > members.len() {
                    let msg = format!("bonus list longer than the {} member(s) of group `{name}`", members.len());
                    self.error(pos, "bonus_too_long", msg);
                    reported_len = true;
                }
                match self.peek().kind {
                    TokenKind::Comma => {
                        self.bump();
                    }
                    TokenKind::RBracket => {
                        self.bump();
                        break;
                    }
                    _ => {
                        self.unexpected("`,` or `]`");
                        return None;
                    }
                }
            }
        }
        if self.peek().kind != TokenKind::RBrace {
            let tok = self.peek().clone();
            if let TokenKind::Ident(s) = &tok.kind {
                self.error(tok.pos, "unknown_keyword", format!("unknown keyword `{s}` in group `{name}`"));
            } else {
                self.unexpected("`bonus` or `}`");
            }
            return None;
        }
        self.bump();
        Some(CriterionGroup {
            name,
            members,
            schedule: BonusSchedule::new(schedule),
            explicit_schedule,
        })
    }
}

fn in_range(value: Option<i64>, lo: i64, hi: i64) -> Option<i32> {
    value.filter(|v| (lo..=hi).contains(v)).map(|v| v as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::ThresholdSet;

    fn errors(text: &str) -> Vec<Diagnostic> {
        parse_kb(text).expect_err("expected a parse failure")
    }

    #[test]
    fn empty_demon_gets_defaults() {
        let kb = parse_kb("demon d { }").unwrap();
        assert_eq!(kb.demons.len(), 1);
        let d = &kb.demons[0];
        assert_eq!(d.thresholds, ThresholdSet { death: 0, reject: 0, accept: 90 });
        assert!(d.leaves.is_empty());
        assert_eq!(d.behavior, "standard-data-demon");
    }

    #[test]
    fn full_demon() {
        let text = r#"
            demon depressive_ep {
                accept 95 reject -10 death -50
                behavior half
                output "major depressive episode"
                leaf fatigue 3
                group mood { members [prom_dysphoric_mood, loss_interest_pleasure] bonus [42] }
                group none { members [x] }
            }
        "#;
        let kb = parse_kb(text).unwrap();
        let d = &kb.demons[0];
        assert_eq!(d.thresholds, ThresholdSet { death: -50, reject: -10, accept: 95 });
        assert_eq!(d.behavior, "half");
        assert_eq!(d.output_text(), "major depressive episode");
        assert_eq!(d.groups.len(), 2);
        assert_eq!(d.groups[0].schedule.cumulative, vec![42]);
        assert!(!d.groups[1].explicit_schedule);
    }

    #[test]
    fn bonus_must_be_nondecreasing() {
        let text = "demon d { group g { members [a] bonus [5, 3] } }";
        let diags = errors(text);
        let d = diags.iter().find(|d| d.code == "bonus_not_nondecreasing").unwrap();
        // points at the `3`
        assert_eq!((d.line, d.column), (1, 43));
    }

    #[test]
    fn keeps_going_after_errors() {
        let text = "demon a { bogus 3 leaf x 1 }\ndemon a { }\ndemon b { leaf y 500 }";
        let codes: Vec<_> = errors(text).into_iter().map(|d| d.code).collect();
        assert_eq!(codes, ["unknown_keyword", "duplicate_demon", "weight_range"]);
    }

    #[test]
    fn duplicate_threshold_clause() {
        let diags = errors("demon d { accept 80 accept 70 }");
        assert_eq!(diags[0].code, "duplicate_clause");
    }

    #[test]
    fn unclosed_demon() {
        let diags = errors("demon d { leaf a 1");
        assert_eq!(diags[0].code, "syntax");
    }
}
