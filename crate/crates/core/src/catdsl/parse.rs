//! Parser for category definition files.
//!
//! ```text
//! # comment
//! label: Tuberculosis          (optional header)
//! country: PL                  (optional header, marks a country category)
//! threshold: 2                 (optional header, switches to weighted mode)
//!
//! tuber_ul% OR NEAR/5(lung, infection)     boolean mode: one expression
//!
//! fever +2                                 weighted mode: term weight lines
//! "stock market" -1
//! ```

use super::{CategoryDefinition, Expr, Mode, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, start_line: usize) -> Result<Vec<Spanned>> {
    let mut toks = Vec::new();
    for (offset, line) in text.lines().enumerate() {
        let lineno = start_line + offset;
        let mut chars = line.char_indices().peekable();
        let mut col = 0usize;
        while let Some((_, c)) = chars.next() {
            col += 1;
            match c {
                '#' => break, // comment to end of line
                c if c.is_whitespace() => {}
                '(' => toks.push(Spanned { tok: Tok::LParen, line: lineno, col }),
                ')' => toks.push(Spanned { tok: Tok::RParen, line: lineno, col }),
                ',' => toks.push(Spanned { tok: Tok::Comma, line: lineno, col }),
                '"' => {
                    let start_col = col;
                    let mut value = String::new();
                    let mut closed = false;
                    for (_, qc) in chars.by_ref() {
                        col += 1;
                        if qc == '"' {
                            closed = true;
                            break;
                        }
                        value.push(qc);
                    }
                    if !closed {
                        return Err(Error::parse(
                            "definition",
                            lineno,
                            start_col,
                            "unterminated quoted term",
                        ));
                    }
                    toks.push(Spanned { tok: Tok::Quoted(value), line: lineno, col: start_col });
                }
                c => {
                    let start_col = col;
                    let mut word = String::new();
                    word.push(c);
                    while let Some((_, next)) = chars.peek() {
                        if next.is_whitespace()
                            || matches!(next, '(' | ')' | ',' | '"' | '#')
                        {
                            break;
                        }
                        word.push(*next);
                        chars.next();
                        col += 1;
                    }
                    toks.push(Spanned { tok: Tok::Word(word), line: lineno, col: start_col });
                }
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1));
        Error::parse("definition", line, col, msg)
    }

    fn parse_or(&mut self) -> Result<Expr> {
        let mut left = self.parse_and()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Word(w), .. }) if w == "OR") {
            self.next();
            let right = self.parse_and()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Expr> {
        let mut left = self.parse_unary()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Word(w), .. }) if w == "AND") {
            self.next();
            let right = self.parse_unary()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Spanned { tok: Tok::Word(w), .. }) if w == "NOT") {
            self.next();
            let inner = self.parse_unary()?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let spanned = match self.next() {
            Some(s) => s,
            None => return Err(self.error("unexpected end of expression")),
        };
        match spanned.tok {
            Tok::LParen => {
                let inner = self.parse_or()?;
                match self.next() {
                    Some(Spanned { tok: Tok::RParen, .. }) => Ok(inner),
                    _ => Err(Error::parse(
                        "definition",
                        spanned.line,
                        spanned.col,
                        "missing closing parenthesis",
                    )),
                }
            }
            Tok::Word(w) if w.starts_with("NEAR/") => {
                let window: i64 = w["NEAR/".len()..].parse().map_err(|_| {
                    Error::parse(
                        "definition",
                        spanned.line,
                        spanned.col,
                        format!("bad NEAR window in {w:?}"),
                    )
                })?;
                if window < 1 {
                    return Err(Error::parse(
                        "definition",
                        spanned.line,
                        spanned.col,
                        format!("NEAR window must be >= 1, got {window}"),
                    ));
                }
                self.expect(Tok::LParen, "expected ( after NEAR/k")?;
                let left = self.parse_term()?;
                self.expect(Tok::Comma, "expected , between NEAR terms")?;
                let right = self.parse_term()?;
                self.expect(Tok::RParen, "expected ) closing NEAR")?;
                Ok(Expr::Near { window: window as usize, left, right })
            }
            Tok::Word(w) if w == "NEAR" => Err(Error::parse(
                "definition",
                spanned.line,
                spanned.col,
                "NEAR requires a window: NEAR/k(term, term)",
            )),
            Tok::Word(w) if w == "AND" || w == "OR" || w == "NOT" => Err(Error::parse(
                "definition",
                spanned.line,
                spanned.col,
                format!("operator {w} in term position (quote it to search literally)"),
            )),
            Tok::Word(w) => Ok(Expr::Term(Term::new(w)?)),
            Tok::Quoted(q) => Ok(Expr::Term(Term::new(q)?)),
            Tok::RParen | Tok::Comma => Err(Error::parse(
                "definition",
                spanned.line,
                spanned.col,
                "unexpected punctuation in term position",
            )),
        }
    }

    fn parse_term(&mut self) -> Result<Term> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), .. }) => Term::new(w),
            Some(Spanned { tok: Tok::Quoted(q), .. }) => Term::new(q),
            other => Err(Error::parse(
                "definition",
                other.as_ref().map(|s| s.line).unwrap_or(1),
                other.as_ref().map(|s| s.col).unwrap_or(1),
                "expected a term",
            )),
        }
    }

    fn expect(&mut self, expected: Tok, msg: &str) -> Result<()> {
        match self.next() {
            Some(s) if s.tok == expected => Ok(()),
            Some(s) => Err(Error::parse("definition", s.line, s.col, msg)),
            None => Err(self.error(msg)),
        }
    }
}

/// Parse a boolean expression (no headers). Exposed for tests and tools.
pub fn parse_expression(text: &str) -> Result<Expr> {
    parse_expression_from(text, 1)
}

fn parse_expression_from(text: &str, start_line: usize) -> Result<Expr> {
    let toks = lex(text, start_line)?;
    if toks.is_empty() {
        return Err(Error::parse("definition", start_line, 1, "empty expression"));
    }
    let mut parser = Parser { toks, pos: 0 };
    let expr = parser.parse_or()?;
    if let Some(extra) = parser.peek() {
        return Err(Error::parse(
            "definition",
            extra.line,
            extra.col,
            "trailing input after expression",
        ));
    }
    Ok(expr)
}

/// Parse a full definition file.
pub fn parse_definition(category_id: &str, text: &str) -> Result<CategoryDefinition> {
    if text.trim().is_empty() {
        return Err(Error::parse("definition", 1, 1, "empty definition"));
    }

    let mut label = category_id.to_string();
    let mut country = None;
    let mut threshold: Option<f64> = None;
    let mut body_start = 0usize; // line index where the expression begins
    let lines: Vec<&str> = text.lines().collect();

    for (idx, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            body_start = idx + 1;
            continue;
        }
        if let Some(value) = line.strip_prefix("label:") {
            label = value.trim().to_string();
        } else if let Some(value) = line.strip_prefix("country:") {
            country = Some(value.trim().to_string());
        } else if let Some(value) = line.strip_prefix("threshold:") {
            threshold = Some(value.trim().parse().map_err(|_| {
                Error::parse("definition", idx + 1, 1, format!("bad threshold {value:?}"))
            })?);
        } else {
            break;
        }
        body_start = idx + 1;
    }

    let body = lines[body_start.min(lines.len())..].join("\n");
    let mode = match threshold {
        Some(threshold) => {
            if !threshold.is_finite() {
                return Err(Error::parse("definition", 1, 1, "threshold must be finite"));
            }
            let terms = parse_weighted_terms(&body, body_start + 1)?;
            if terms.is_empty() {
                return Err(Error::parse(
                    "definition",
                    body_start + 1,
                    1,
                    "weighted definition needs at least one term",
                ));
            }
            Mode::Weighted { terms, threshold }
        }
        None => Mode::Boolean(parse_expression_from(&body, body_start + 1)?),
    };

    Ok(CategoryDefinition {
        category_id: category_id.to_string(),
        label,
        country,
        mode,
    })
}

fn parse_weighted_terms(body: &str, start_line: usize) -> Result<Vec<(Term, f64)>> {
    let mut terms = Vec::new();
    for (offset, raw) in body.lines().enumerate() {
        let lineno = start_line + offset;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks = lex(line, lineno)?;
        if toks.len() != 2 {
            return Err(Error::parse(
                "definition",
                lineno,
                1,
                "weighted line must be: <term> <weight>",
            ));
        }
        let term = match &toks[0].tok {
            Tok::Word(w) => Term::new(w.clone())?,
            Tok::Quoted(q) => Term::new(q.clone())?,
            _ => {
                return Err(Error::parse("definition", lineno, toks[0].col, "expected a term"));
            }
        };
        let weight: f64 = match &toks[1].tok {
            Tok::Word(w) => w.parse().map_err(|_| {
                Error::parse("definition", lineno, toks[1].col, format!("bad weight {w:?}"))
            })?,
            _ => {
                return Err(Error::parse("definition", lineno, toks[1].col, "expected a weight"));
            }
        };
        if !weight.is_finite() {
            return Err(Error::parse("definition", lineno, toks[1].col, "weight must be finite"));
        }
        terms.push((term, weight));
    }
    Ok(terms)
}
