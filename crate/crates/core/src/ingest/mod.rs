//! Feed acquisition and article normalization.
//!
//! Raw feed items (from fixture files or HTTP) are normalized into Unicode
//! [`Article`]s with deterministic content-hash identifiers, deduplicated in
//! the [`ArticleStore`], and re-emitted as UTF-8 RSS.

mod feed;

pub use feed::{
    emit_rss, fetch_feeds, parse_feed, ChannelMeta, FetchOutcome, RssEntry, SkipDiagnostic,
    SourceFetchError,
};

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::isocodes;

/// One configured news source (a line of `sources.tsv`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SourceDescriptor {
    pub source_id: String,
    /// File path or http(s) URL of the feed document.
    pub locator: String,
    /// ISO-639-1 language of the source; articles inherit it.
    pub language: String,
    /// ISO-3166-1 alpha-2 country of origin; feeds geo disambiguation.
    pub country: String,
    /// Poll interval in seconds.
    pub poll_interval: u64,
}

impl SourceDescriptor {
    pub fn validate(&self) -> Result<()> {
        if self.source_id.is_empty() {
            return Err(Error::Config("source_id must be nonempty".into()));
        }
        if !isocodes::is_language(&self.language) {
            return Err(Error::Config(format!(
                "source {}: unknown language code {:?}",
                self.source_id, self.language
            )));
        }
        if !isocodes::is_country(&self.country) {
            return Err(Error::Config(format!(
                "source {}: unknown country code {:?}",
                self.source_id, self.country
            )));
        }
        if self.poll_interval < 1 {
            return Err(Error::Config(format!(
                "source {}: poll_interval must be >= 1",
                self.source_id
            )));
        }
        Ok(())
    }
}

/// Load the tab-separated source list: source_id, locator, language,
/// country, poll_interval. `#` starts a comment line.
pub fn load_sources(path: &Path) -> Result<Vec<SourceDescriptor>> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = path.display().to_string();
    let mut sources = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                &file,
                lineno + 1,
                1,
                format!("expected 5 tab-separated fields, got {}", fields.len()),
            ));
        }
        let poll_interval: u64 = fields[4].parse().map_err(|_| {
            Error::parse(&file, lineno + 1, 1, format!("bad poll interval {:?}", fields[4]))
        })?;
        let source = SourceDescriptor {
            source_id: fields[0].to_string(),
            locator: fields[1].to_string(),
            language: fields[2].to_string(),
            country: fields[3].to_string(),
            poll_interval,
        };
        source.validate()?;
        sources.push(source);
    }
    Ok(sources)
}

/// An item as it came out of a feed document, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawItem {
    pub source_id: String,
    pub title: String,
    pub body: String,
    pub url: String,
    pub published_at: DateTime<Utc>,
}

/// One normalized news item.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Article {
    /// Content hash of (source_id, url, NFC title); stable across refetches.
    pub article_id: String,
    pub source_id: String,
    pub language: String,
    pub published_at: DateTime<Utc>,
    pub title: String,
    pub body: String,
    pub url: String,
}

/// Deterministic article identifier.
pub fn compute_article_id(source_id: &str, url: &str, nfc_title: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(source_id.as_bytes());
    hasher.update([0]);
    hasher.update(url.as_bytes());
    hasher.update([0]);
    hasher.update(nfc_title.as_bytes());
    let digest = hasher.finalize();
    let mut id = String::with_capacity(32);
    for byte in &digest[..16] {
        id.push_str(&format!("{byte:02x}"));
    }
    id
}

/// Strip markup tags, normalize to NFC, drop control characters, and
/// collapse whitespace. Idempotent: running it on its own output is a no-op.
pub fn normalize_text(text: &str) -> String {
    let stripped = strip_tags(text);
    let composed: String = stripped.nfc().collect();
    let cleaned: String = composed
        .chars()
        .filter(|c| !c.is_control() || c.is_whitespace())
        .collect();
    collapse_whitespace(&cleaned)
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_gap = true; // leading whitespace is dropped
    for c in text.chars() {
        if c.is_whitespace() {
            in_gap = true;
        } else {
            if in_gap && !out.is_empty() {
                out.push(' ');
            }
            in_gap = false;
            out.push(c);
        }
    }
    out
}

/// Remove `<...>` tag spans. Only sequences that look like markup (a `<`
/// followed by a letter, `/`, `!` or `?`) are treated as tags; a stray `<`
/// stays literal, which keeps the function idempotent.
fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((idx, c)) = chars.next() {
        if c == '<' {
            let looks_like_tag = matches!(
                chars.peek(),
                Some((_, next)) if next.is_ascii_alphabetic() || matches!(next, '/' | '!' | '?')
            );
            if looks_like_tag {
                if let Some(close) = text[idx..].find('>') {
                    // Skip to the closing bracket; the tag becomes a space so
                    // words separated only by markup do not fuse.
                    let end = idx + close;
                    while let Some((i, _)) = chars.peek() {
                        if *i > end {
                            break;
                        }
                        chars.next();
                    }
                    out.push(' ');
                    continue;
                }
            }
        }
        out.push(c);
    }
    out
}

/// Normalize a raw feed item into an [`Article`].
pub fn normalize_article(raw: &RawItem, source: &SourceDescriptor) -> Result<Article> {
    let title = normalize_text(&raw.title);
    let body = normalize_text(&raw.body);
    if title.is_empty() && body.is_empty() {
        return Err(Error::Reject(format!(
            "item from {} at {} has neither title nor body",
            raw.source_id, raw.url
        )));
    }
    Ok(Article {
        article_id: compute_article_id(&source.source_id, &raw.url, &title),
        source_id: source.source_id.clone(),
        language: source.language.clone(),
        published_at: raw.published_at,
        title,
        body,
        url: raw.url.clone(),
    })
}

/// Deduplicating article store. Inserting an existing id replaces the entry
/// (last-write-wins), so feeding the same raw item twice keeps one article.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ArticleStore {
    articles: BTreeMap<String, Article>,
}

impl ArticleStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when the article was new.
    pub fn insert(&mut self, article: Article) -> bool {
        self.articles.insert(article.article_id.clone(), article).is_none()
    }

    pub fn get(&self, article_id: &str) -> Option<&Article> {
        self.articles.get(article_id)
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Article> {
        self.articles.values()
    }

    /// Articles of one language published in `(window_start, window_end]`,
    /// ordered by (published_at, article_id).
    pub fn in_window(
        &self,
        language: &str,
        window_start: DateTime<Utc>,
        window_end: DateTime<Utc>,
    ) -> Vec<&Article> {
        let mut hits: Vec<&Article> = self
            .articles
            .values()
            .filter(|a| {
                a.language == language
                    && a.published_at > window_start
                    && a.published_at <= window_end
            })
            .collect();
        hits.sort_by(|a, b| {
            a.published_at
                .cmp(&b.published_at)
                .then_with(|| a.article_id.cmp(&b.article_id))
        });
        hits
    }

    pub fn languages(&self) -> Vec<String> {
        let mut langs: Vec<String> = self
            .articles
            .values()
            .map(|a| a.language.clone())
            .collect();
        langs.sort();
        langs.dedup();
        langs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn source() -> SourceDescriptor {
        SourceDescriptor {
            source_id: "src1".into(),
            locator: "feed.xml".into(),
            language: "en".into(),
            country: "GB".into(),
            poll_interval: 300,
        }
    }

    fn raw(title: &str, body: &str) -> RawItem {
        RawItem {
            source_id: "src1".into(),
            title: title.into(),
            body: body.into(),
            url: "http://example.org/a".into(),
            published_at: Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap(),
        }
    }

    #[test]
    fn decomposed_title_becomes_nfc() {
        let article = normalize_article(&raw("Cafe\u{0301}", "text"), &source()).unwrap();
        assert_eq!(article.title, "Café");
    }

    #[test]
    fn tags_are_stripped_from_body() {
        let article = normalize_article(&raw("t", "<p>Hello</p>"), &source()).unwrap();
        assert_eq!(article.body, "Hello");
    }

    #[test]
    fn markup_between_words_does_not_fuse_them() {
        let article = normalize_article(&raw("t", "one<br/>two"), &source()).unwrap();
        assert_eq!(article.body, "one two");
    }

    #[test]
    fn stray_angle_bracket_is_kept() {
        assert_eq!(normalize_text("a < b"), "a < b");
    }

    #[test]
    fn identical_keys_give_identical_ids() {
        let a = normalize_article(&raw("Title", "x"), &source()).unwrap();
        let b = normalize_article(&raw("Title", "y"), &source()).unwrap();
        assert_eq!(a.article_id, b.article_id);
        let c = normalize_article(&raw("Other", "x"), &source()).unwrap();
        assert_ne!(a.article_id, c.article_id);
    }

    #[test]
    fn empty_item_rejected() {
        let err = normalize_article(&raw("", "  "), &source()).unwrap_err();
        assert!(matches!(err, Error::Reject(_)));
    }

    #[test]
    fn normalization_is_idempotent() {
        for text in [
            "<p>Hello &amp; goodbye</p>",
            "Cafe\u{0301} <b>fort</b>\u{0000}",
            "  spaced\tout\n\nlines  ",
            "a < b and c > d",
        ] {
            let once = normalize_text(text);
            assert_eq!(normalize_text(&once), once, "input {text:?}");
        }
    }

    #[test]
    fn duplicate_feed_items_stored_once() {
        let mut store = ArticleStore::new();
        let article = normalize_article(&raw("Title", "body"), &source()).unwrap();
        assert!(store.insert(article.clone()));
        assert!(!store.insert(article));
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn window_query_is_half_open() {
        let mut store = ArticleStore::new();
        for (minute, title) in [(0i64, "a"), (30, "b"), (60, "c")] {
            let mut item = raw(title, "body");
            item.url = format!("http://example.org/{title}");
            item.published_at = Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap()
                + chrono::Duration::minutes(minute);
            store.insert(normalize_article(&item, &source()).unwrap());
        }
        let start = Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap();
        let end = Utc.with_ymd_and_hms(2009, 6, 1, 13, 0, 0).unwrap();
        let hits = store.in_window("en", start, end);
        let titles: Vec<&str> = hits.iter().map(|a| a.title.as_str()).collect();
        assert_eq!(titles, vec!["b", "c"]);
    }

    #[test]
    fn source_validation() {
        let mut bad = source();
        bad.language = "xx".into();
        assert!(bad.validate().is_err());
        let mut bad = source();
        bad.poll_interval = 0;
        assert!(bad.validate().is_err());
        assert!(source().validate().is_ok());
    }
}
