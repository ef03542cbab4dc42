//! Category definitions: one multilingual Boolean/weighted pattern
//! expression per category, matched against articles of every language.
//!
//! Case semantics follow the per-character rule: an uppercase definition
//! character matches only that uppercase character, a lowercase definition
//! character matches either case of the letter. `_` matches exactly one
//! character, `%` any run including the empty one, never across a token
//! boundary.

mod matchers;
mod parse;

pub use matchers::{match_term, pattern_matches_token, CategorySet};
pub use parse::{parse_definition, parse_expression};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single search term: one or more whitespace-separated word patterns.
/// Multi-word terms match consecutive tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub pattern: String,
}

impl Term {
    pub fn new(pattern: impl Into<String>) -> Result<Term> {
        let pattern = pattern.into();
        if pattern.trim().is_empty() {
            return Err(Error::Config("term pattern must be nonempty".into()));
        }
        if pattern.contains("%%") {
            return Err(Error::Config(format!(
                "term {pattern:?}: adjacent %% wildcards are not allowed"
            )));
        }
        Ok(Term { pattern })
    }

    /// The word patterns of the term, in order.
    pub fn words(&self) -> Vec<&str> {
        self.pattern.split_whitespace().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Term(Term),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    /// True when some occurrence of `left` and `right` lie within `window`
    /// tokens of each other (unordered distance).
    Near {
        window: usize,
        left: Term,
        right: Term,
    },
}

impl Expr {
    fn fmt_prec(&self, out: &mut String, min_prec: u8) {
        let prec = match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(..) => 3,
            Expr::Term(_) | Expr::Near { .. } => 4,
        };
        let parens = prec < min_prec;
        if parens {
            out.push('(');
        }
        match self {
            Expr::Term(t) => out.push_str(&print_term(t)),
            Expr::Or(a, b) => {
                a.fmt_prec(out, 1);
                out.push_str(" OR ");
                b.fmt_prec(out, 2);
            }
            Expr::And(a, b) => {
                a.fmt_prec(out, 2);
                out.push_str(" AND ");
                b.fmt_prec(out, 3);
            }
            Expr::Not(inner) => {
                out.push_str("NOT ");
                inner.fmt_prec(out, 3);
            }
            Expr::Near { window, left, right } => {
                out.push_str(&format!(
                    "NEAR/{window}({}, {})",
                    print_term(left),
                    print_term(right)
                ));
            }
        }
        if parens {
            out.push(')');
        }
    }
}

fn print_term(term: &Term) -> String {
    let needs_quotes = term.pattern.contains(char::is_whitespace)
        || matches!(term.pattern.as_str(), "AND" | "OR" | "NOT")
        || term.pattern.starts_with("NEAR/")
        || term
            .pattern
            .contains(|c| matches!(c, '(' | ')' | ',' | '#' | '"'));
    if needs_quotes {
        format!("\"{}\"", term.pattern)
    } else {
        term.pattern.clone()
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut out = String::new();
        self.fmt_prec(&mut out, 0);
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Boolean(Expr),
    Weighted {
        terms: Vec<(Term, f64)>,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDefinition {
    pub category_id: String,
    /// English display name.
    pub label: String,
    /// Set for country categories: the ISO-3166 code the category stands
    /// for. Country-category matches feed the per-country alert statistics.
    pub country: Option<String>,
    pub mode: Mode,
}

impl CategoryDefinition {
    /// Render the definition back to its file syntax. Parsing the output
    /// yields an equal definition.
    pub fn pretty_print(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("label: {}\n", self.label));
        if let Some(country) = &self.country {
            out.push_str(&format!("country: {country}\n"));
        }
        match &self.mode {
            Mode::Boolean(expr) => {
                out.push_str(&expr.to_string());
                out.push('\n');
            }
            Mode::Weighted { terms, threshold } => {
                out.push_str(&format!("threshold: {threshold}\n"));
                for (term, weight) in terms {
                    out.push_str(&format!("{} {weight}\n", print_term(term)));
                }
            }
        }
        out
    }
}

/// Match outcome for one definition against one article.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    pub matched: bool,
    /// Patterns that matched, with the token offset of one occurrence each.
    pub matched_terms: Vec<(String, usize)>,
    /// Cumulative score (weighted mode only).
    pub score: Option<f64>,
}

/// Evaluate one definition against a token sequence.
pub fn match_category(def: &CategoryDefinition, tokens: &[&str]) -> MatchResult {
    match &def.mode {
        Mode::Boolean(expr) => {
            let (matched, hits) = eval_boolean(expr, tokens);
            MatchResult {
                matched,
                matched_terms: hits,
                score: None,
            }
        }
        Mode::Weighted { terms, threshold } => {
            let mut score = 0.0;
            let mut hits = Vec::new();
            for (term, weight) in terms {
                let offsets = match_term(term, tokens);
                if let Some(&first) = offsets.first() {
                    score += weight;
                    hits.push((term.pattern.clone(), first));
                }
            }
            MatchResult {
                matched: score >= *threshold,
                matched_terms: hits,
                score: Some(score),
            }
        }
    }
}

fn eval_boolean(expr: &Expr, tokens: &[&str]) -> (bool, Vec<(String, usize)>) {
    match expr {
        Expr::Term(term) => {
            let offsets = match_term(term, tokens);
            let hits = offsets
                .first()
                .map(|&o| vec![(term.pattern.clone(), o)])
                .unwrap_or_default();
            (!offsets.is_empty(), hits)
        }
        Expr::And(a, b) => {
            let (ma, mut ha) = eval_boolean(a, tokens);
            if !ma {
                return (false, Vec::new());
            }
            let (mb, hb) = eval_boolean(b, tokens);
            if !mb {
                return (false, Vec::new());
            }
            ha.extend(hb);
            (true, ha)
        }
        Expr::Or(a, b) => {
            let (ma, mut ha) = eval_boolean(a, tokens);
            let (mb, hb) = eval_boolean(b, tokens);
            ha.extend(hb);
            (ma || mb, ha)
        }
        Expr::Not(inner) => {
            let (m, _) = eval_boolean(inner, tokens);
            (!m, Vec::new())
        }
        Expr::Near { window, left, right } => {
            let la = match_term(left, tokens);
            let lb = match_term(right, tokens);
            let mut hit = None;
            'outer: for &a in &la {
                for &b in &lb {
                    if a.abs_diff(b) <= *window {
                        hit = Some((a, b));
                        break 'outer;
                    }
                }
            }
            match hit {
                Some((a, b)) => (
                    true,
                    vec![(left.pattern.clone(), a), (right.pattern.clone(), b)],
                ),
                None => (false, Vec::new()),
            }
        }
    }
}

/// Evaluate every definition; returns the matching category ids. The result
/// is a set, independent of definition order.
pub fn classify_all(definitions: &[CategoryDefinition], tokens: &[&str]) -> BTreeSet<String> {
    definitions
        .iter()
        .filter(|def| match_category(def, tokens).matched)
        .map(|def| def.category_id.clone())
        .collect()
}

/// Load all definitions under a directory: one file per category, the file
/// stem is the category id. Files are read in name order.
pub fn load_categories(dir: &Path) -> Result<Vec<CategoryDefinition>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut defs = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let category_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        defs.push(parse_definition(&category_id, &text)?);
    }
    Ok(defs)
}
