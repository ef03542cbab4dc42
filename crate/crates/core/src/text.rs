//! Tokenization shared by matching, clustering, and tagging.
//!
//! Tokens are maximal runs of alphanumeric scalar values; everything else is
//! a separator. No stemming anywhere — wildcard patterns take that role.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// Byte offset of the first char in the source text.
    pub start: usize,
    /// Byte offset one past the last char.
    pub end: usize,
    /// True for the first token of the text and the first token after a
    /// sentence-ending mark (. ! ? …).
    pub sentence_initial: bool,
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let mut sentence_initial = true;
    for (idx, c) in text.char_indices() {
        if is_token_char(c) {
            if start.is_none() {
                start = Some(idx);
            }
        } else {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &text[s..idx],
                    start: s,
                    end: idx,
                    sentence_initial,
                });
                sentence_initial = false;
            }
            if is_sentence_end(c) {
                sentence_initial = true;
            }
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &text[s..],
            start: s,
            end: text.len(),
            sentence_initial,
        });
    }
    tokens
}

/// Lowercased token counts over title+body style input, plus the total
/// number of tokens. Used by keyword vectors and profile training.
pub fn token_counts(text: &str) -> (BTreeMap<String, u64>, u64) {
    let mut counts = BTreeMap::new();
    let mut total = 0u64;
    for tok in tokenize(text) {
        *counts.entry(tok.text.to_lowercase()).or_insert(0) += 1;
        total += 1;
    }
    (counts, total)
}

/// Merge `other` into `acc`, summing counts.
pub fn merge_counts(acc: &mut BTreeMap<String, u64>, other: &BTreeMap<String, u64>) {
    for (token, n) in other {
        *acc.entry(token.clone()).or_insert(0) += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_non_alphanumeric() {
        let toks = tokenize("le pain, est bon!");
        let words: Vec<&str> = toks.iter().map(|t| t.text).collect();
        assert_eq!(words, vec!["le", "pain", "est", "bon"]);
    }

    #[test]
    fn keeps_digits_inside_tokens() {
        let toks = tokenize("H5N1 outbreak 2009");
        let words: Vec<&str> = toks.iter().map(|t| t.text).collect();
        assert_eq!(words, vec!["H5N1", "outbreak", "2009"]);
    }

    #[test]
    fn sentence_initial_flags() {
        let toks = tokenize("The cat sat. World War started? yes");
        let flags: Vec<bool> = toks.iter().map(|t| t.sentence_initial).collect();
        assert_eq!(flags, vec![true, false, false, true, false, false, true]);
    }

    #[test]
    fn offsets_are_byte_accurate() {
        let text = "Café re-opened";
        let toks = tokenize(text);
        assert_eq!(toks[0].text, "Café");
        assert_eq!(&text[toks[0].start..toks[0].end], "Café");
        assert_eq!(toks[1].text, "re");
        assert_eq!(toks[2].text, "opened");
    }

    #[test]
    fn counts_are_lowercased() {
        let (counts, total) = token_counts("Tsunami tsunami TSUNAMI warning");
        assert_eq!(counts.get("tsunami"), Some(&3));
        assert_eq!(counts.get("warning"), Some(&1));
        assert_eq!(total, 4);
    }

    #[test]
    fn empty_text_yields_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  …!? ").is_empty());
    }
}
