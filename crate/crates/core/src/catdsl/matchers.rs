//! Term matching and the compiled multi-category matcher.

use std::collections::HashMap;

use aho_corasick::{AhoCorasick, MatchKind};

use super::{CategoryDefinition, Expr, MatchResult, Mode, Term};

/// Per-character rule: an uppercase definition character matches only that
/// exact character; a lowercase definition character matches either case of
/// the letter; non-letters match exactly.
fn char_matches(def_c: char, tok_c: char) -> bool {
    if def_c == tok_c {
        return true;
    }
    if def_c.is_lowercase() {
        let mut lowered = tok_c.to_lowercase();
        return lowered.next() == Some(def_c) && lowered.next().is_none();
    }
    false
}

/// Match one word pattern (`_` = one char, `%` = any run) against one whole
/// token.
pub fn pattern_matches_token(pattern: &str, token: &str) -> bool {
    let tok: Vec<char> = token.chars().collect();
    let mut reachable = vec![false; tok.len() + 1];
    reachable[0] = true;
    for pc in pattern.chars() {
        match pc {
            '%' => {
                // A run match: every position at or after the first
                // reachable one becomes reachable.
                let mut seen = false;
                for slot in reachable.iter_mut() {
                    if *slot {
                        seen = true;
                    } else if seen {
                        *slot = true;
                    }
                }
            }
            '_' => {
                for j in (1..reachable.len()).rev() {
                    reachable[j] = reachable[j - 1];
                }
                reachable[0] = false;
            }
            c => {
                for j in (1..reachable.len()).rev() {
                    reachable[j] = reachable[j - 1] && char_matches(c, tok[j - 1]);
                }
                reachable[0] = false;
            }
        }
    }
    reachable[tok.len()]
}

/// Token offsets at which the term matches. Multi-word terms must match
/// consecutive tokens; the offset is that of the first word.
pub fn match_term(term: &Term, tokens: &[&str]) -> Vec<usize> {
    let words = term.words();
    if words.is_empty() || tokens.len() < words.len() {
        return Vec::new();
    }
    let mut offsets = Vec::new();
    for start in 0..=(tokens.len() - words.len()) {
        if words
            .iter()
            .zip(&tokens[start..])
            .all(|(w, t)| pattern_matches_token(w, t))
        {
            offsets.push(start);
        }
    }
    offsets
}

/// Literal prefix of a word pattern, up to the first wildcard, lowercased.
/// Empty when the pattern starts with a wildcard.
fn literal_prefix(word: &str) -> String {
    word.chars()
        .take_while(|c| !matches!(c, '%' | '_'))
        .flat_map(|c| c.to_lowercase())
        .collect()
}

#[derive(Debug, Clone)]
enum CompiledExpr {
    Term(usize),
    And(Box<CompiledExpr>, Box<CompiledExpr>),
    Or(Box<CompiledExpr>, Box<CompiledExpr>),
    Not(Box<CompiledExpr>),
    Near { window: usize, left: usize, right: usize },
}

#[derive(Debug, Clone)]
enum CompiledMode {
    Boolean(CompiledExpr),
    Weighted { terms: Vec<(usize, f64)>, threshold: f64 },
}

/// A set of definitions compiled for high-throughput matching: all literal
/// term prefixes share one anchored multi-pattern automaton that prefilters
/// candidate terms per token. The automaton is an optimization only; term
/// semantics stay with [`match_term`].
pub struct CategorySet {
    definitions: Vec<CategoryDefinition>,
    compiled: Vec<CompiledMode>,
    /// Interned unique terms across all definitions.
    terms: Vec<Term>,
    /// Terms with a nonempty first-word literal prefix, reachable through
    /// the automaton: pattern index -> term slots.
    by_literal: Vec<Vec<usize>>,
    automaton: Option<AhoCorasick>,
    /// Terms whose first word starts with a wildcard; probed at every token.
    unprefixed: Vec<usize>,
}

impl CategorySet {
    pub fn compile(definitions: Vec<CategoryDefinition>) -> CategorySet {
        let mut terms: Vec<Term> = Vec::new();
        let mut slots: HashMap<Term, usize> = HashMap::new();
        let mut intern = |term: &Term, terms: &mut Vec<Term>| -> usize {
            if let Some(&slot) = slots.get(term) {
                return slot;
            }
            let slot = terms.len();
            terms.push(term.clone());
            slots.insert(term.clone(), slot);
            slot
        };

        fn compile_expr(
            expr: &Expr,
            terms: &mut Vec<Term>,
            intern: &mut impl FnMut(&Term, &mut Vec<Term>) -> usize,
        ) -> CompiledExpr {
            match expr {
                Expr::Term(t) => CompiledExpr::Term(intern(t, terms)),
                Expr::And(a, b) => CompiledExpr::And(
                    Box::new(compile_expr(a, terms, intern)),
                    Box::new(compile_expr(b, terms, intern)),
                ),
                Expr::Or(a, b) => CompiledExpr::Or(
                    Box::new(compile_expr(a, terms, intern)),
                    Box::new(compile_expr(b, terms, intern)),
                ),
                Expr::Not(inner) => {
                    CompiledExpr::Not(Box::new(compile_expr(inner, terms, intern)))
                }
                Expr::Near { window, left, right } => CompiledExpr::Near {
                    window: *window,
                    left: intern(left, terms),
                    right: intern(right, terms),
                },
            }
        }

        let compiled: Vec<CompiledMode> = definitions
            .iter()
            .map(|def| match &def.mode {
                Mode::Boolean(expr) => {
                    CompiledMode::Boolean(compile_expr(expr, &mut terms, &mut intern))
                }
                Mode::Weighted { terms: weighted, threshold } => CompiledMode::Weighted {
                    terms: weighted
                        .iter()
                        .map(|(t, w)| (intern(t, &mut terms), *w))
                        .collect(),
                    threshold: *threshold,
                },
            })
            .collect();

        // Group terms by the literal prefix of their first word.
        let mut literal_groups: HashMap<String, Vec<usize>> = HashMap::new();
        let mut unprefixed = Vec::new();
        for (slot, term) in terms.iter().enumerate() {
            let first_word = term.words()[0].to_string();
            let prefix = literal_prefix(&first_word);
            if prefix.is_empty() {
                unprefixed.push(slot);
            } else {
                literal_groups.entry(prefix).or_default().push(slot);
            }
        }
        let mut literals: Vec<(String, Vec<usize>)> = literal_groups.into_iter().collect();
        literals.sort();
        let by_literal: Vec<Vec<usize>> = literals.iter().map(|(_, v)| v.clone()).collect();
        let automaton = if literals.is_empty() {
            None
        } else {
            Some(
                AhoCorasick::builder()
                    .match_kind(MatchKind::Standard)
                    .build(literals.iter().map(|(l, _)| l.as_str()))
                    .expect("automaton build"),
            )
        };

        CategorySet {
            definitions,
            compiled,
            terms,
            by_literal,
            automaton,
            unprefixed,
        }
    }

    pub fn definitions(&self) -> &[CategoryDefinition] {
        &self.definitions
    }

    /// Offsets of every interned term in the token sequence.
    fn scan(&self, tokens: &[&str]) -> Vec<Vec<usize>> {
        let mut hits: Vec<Vec<usize>> = vec![Vec::new(); self.terms.len()];
        let mut candidates: Vec<usize> = Vec::new();
        for (idx, token) in tokens.iter().enumerate() {
            candidates.clear();
            if let Some(ac) = &self.automaton {
                let lowered = token.to_lowercase();
                // Keep only matches anchored at the token start: a term's
                // literal must be a prefix of the token.
                for m in ac.find_overlapping_iter(&lowered) {
                    if m.start() == 0 {
                        candidates.extend_from_slice(&self.by_literal[m.pattern().as_usize()]);
                    }
                }
            }
            candidates.extend_from_slice(&self.unprefixed);
            for &slot in candidates.iter() {
                let term = &self.terms[slot];
                let words = term.words();
                if idx + words.len() > tokens.len() {
                    continue;
                }
                if words
                    .iter()
                    .zip(&tokens[idx..])
                    .all(|(w, t)| pattern_matches_token(w, t))
                {
                    hits[slot].push(idx);
                }
            }
        }
        hits
    }

    /// Classify one article's token sequence against every definition.
    pub fn classify(&self, tokens: &[&str]) -> std::collections::BTreeSet<String> {
        let hits = self.scan(tokens);
        let mut matched = std::collections::BTreeSet::new();
        for (def, compiled) in self.definitions.iter().zip(&self.compiled) {
            let is_match = match compiled {
                CompiledMode::Boolean(expr) => eval_compiled(expr, &hits),
                CompiledMode::Weighted { terms, threshold } => {
                    let score: f64 = terms
                        .iter()
                        .filter(|(slot, _)| !hits[*slot].is_empty())
                        .map(|(_, w)| w)
                        .sum();
                    score >= *threshold
                }
            };
            if is_match {
                matched.insert(def.category_id.clone());
            }
        }
        matched
    }
}

fn eval_compiled(expr: &CompiledExpr, hits: &[Vec<usize>]) -> bool {
    match expr {
        CompiledExpr::Term(slot) => !hits[*slot].is_empty(),
        CompiledExpr::And(a, b) => eval_compiled(a, hits) && eval_compiled(b, hits),
        CompiledExpr::Or(a, b) => eval_compiled(a, hits) || eval_compiled(b, hits),
        CompiledExpr::Not(inner) => !eval_compiled(inner, hits),
        CompiledExpr::Near { window, left, right } => hits[*left]
            .iter()
            .any(|a| hits[*right].iter().any(|b| a.abs_diff(*b) <= *window)),
    }
}
