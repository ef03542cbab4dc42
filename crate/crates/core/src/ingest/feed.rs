//! RSS/Atom reading and RSS 2.0 writing.

use std::path::Path;
use std::time::Duration;

use chrono::{DateTime, Utc};
use quick_xml::events::Event;
use quick_xml::Reader;

use super::{Article, RawItem, SourceDescriptor};

/// A source that could not be fetched at all; other sources are unaffected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFetchError {
    pub source_id: String,
    pub message: String,
}

/// An item (or document tail) skipped during parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipDiagnostic {
    pub source_id: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct FetchOutcome {
    pub items: Vec<RawItem>,
    pub errors: Vec<SourceFetchError>,
    pub skipped: Vec<SkipDiagnostic>,
}

/// Fetch every source (file path or http URL) and parse the documents.
/// Items published strictly after `since` are returned in source order.
/// A failing source produces an error record; the rest proceed.
pub fn fetch_feeds(
    sources: &[SourceDescriptor],
    since: DateTime<Utc>,
    timeout: Duration,
) -> FetchOutcome {
    let mut outcome = FetchOutcome::default();
    for source in sources {
        match load_locator(&source.locator, timeout) {
            Ok(xml) => {
                let (items, skipped) = parse_feed(&source.source_id, &xml);
                outcome
                    .items
                    .extend(items.into_iter().filter(|item| item.published_at > since));
                outcome.skipped.extend(skipped);
            }
            Err(message) => outcome.errors.push(SourceFetchError {
                source_id: source.source_id.clone(),
                message,
            }),
        }
    }
    outcome
}

fn load_locator(locator: &str, timeout: Duration) -> Result<String, String> {
    if locator.starts_with("http://") || locator.starts_with("https://") {
        let agent = ureq::builder()
            .timeout_connect(timeout)
            .timeout(timeout)
            .build();
        let response = agent.get(locator).call().map_err(|e| e.to_string())?;
        response.into_string().map_err(|e| e.to_string())
    } else {
        std::fs::read_to_string(Path::new(locator))
            .map_err(|e| format!("{locator}: {e}"))
    }
}

#[derive(Default)]
struct PartialItem {
    title: String,
    body: String,
    url: String,
    date: Option<DateTime<Utc>>,
}

fn parse_date(text: &str) -> Option<DateTime<Utc>> {
    let text = text.trim();
    DateTime::parse_from_rfc2822(text)
        .or_else(|_| DateTime::parse_from_rfc3339(text))
        .map(|dt| dt.with_timezone(&Utc))
        .ok()
}

/// Parse an RSS 2.0 or Atom document. Unparseable items are skipped with a
/// diagnostic; a malformed document yields the items parsed so far plus a
/// diagnostic for the rest.
pub fn parse_feed(source_id: &str, xml: &str) -> (Vec<RawItem>, Vec<SkipDiagnostic>) {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);

    let mut items = Vec::new();
    let mut skipped = Vec::new();
    let mut current: Option<PartialItem> = None;
    // Name of the text field currently being read, when recognized.
    let mut field: Option<&'static str> = None;

    loop {
        match reader.read_event() {
            Ok(Event::Start(e)) => {
                let name = e.local_name();
                match name.as_ref() {
                    b"item" | b"entry" => {
                        current = Some(PartialItem::default());
                        field = None;
                    }
                    b"title" if current.is_some() => field = Some("title"),
                    b"description" | b"summary" | b"content" if current.is_some() => {
                        field = Some("body")
                    }
                    b"link" if current.is_some() => field = Some("url"),
                    b"pubDate" | b"published" | b"updated" if current.is_some() => {
                        field = Some("date")
                    }
                    _ => field = None,
                }
            }
            Ok(Event::Empty(e)) => {
                // Atom link: <link href="..."/>
                if e.local_name().as_ref() == b"link" {
                    if let Some(item) = current.as_mut() {
                        for attr in e.attributes().flatten() {
                            if attr.key.local_name().as_ref() == b"href" {
                                if let Ok(value) = attr.unescape_value() {
                                    item.url = value.into_owned();
                                }
                            }
                        }
                    }
                }
            }
            Ok(Event::Text(t)) => {
                if let (Some(item), Some(slot)) = (current.as_mut(), field) {
                    if let Ok(text) = t.unescape() {
                        append_field(item, slot, &text);
                    }
                }
            }
            Ok(Event::CData(t)) => {
                if let (Some(item), Some(slot)) = (current.as_mut(), field) {
                    let text = String::from_utf8_lossy(&t.into_inner()).into_owned();
                    append_field(item, slot, &text);
                }
            }
            Ok(Event::End(e)) => {
                let name = e.local_name();
                match name.as_ref() {
                    b"item" | b"entry" => {
                        if let Some(item) = current.take() {
                            match item.date {
                                Some(published_at) => items.push(RawItem {
                                    source_id: source_id.to_string(),
                                    title: item.title,
                                    body: item.body,
                                    url: item.url,
                                    published_at,
                                }),
                                None => skipped.push(SkipDiagnostic {
                                    source_id: source_id.to_string(),
                                    reason: format!(
                                        "item {:?} skipped: missing or unparseable date",
                                        item.title
                                    ),
                                }),
                            }
                        }
                    }
                    _ => field = None,
                }
            }
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => {
                skipped.push(SkipDiagnostic {
                    source_id: source_id.to_string(),
                    reason: format!(
                        "malformed XML at byte {}: {e}; remaining items skipped",
                        reader.buffer_position()
                    ),
                });
                break;
            }
        }
    }
    (items, skipped)
}

fn append_field(item: &mut PartialItem, slot: &str, text: &str) {
    let target = match slot {
        "title" => &mut item.title,
        "body" => &mut item.body,
        "url" => &mut item.url,
        "date" => {
            if item.date.is_none() {
                item.date = parse_date(text);
            }
            return;
        }
        _ => return,
    };
    if !target.is_empty() {
        target.push(' ');
    }
    target.push_str(text.trim());
}

/// Channel-level metadata for emitted RSS documents.
#[derive(Debug, Clone)]
pub struct ChannelMeta {
    pub title: String,
    pub link: String,
    pub description: String,
}

/// One `<item>` of an emitted document. Articles and cluster summaries both
/// render through this view.
#[derive(Debug, Clone)]
pub struct RssEntry {
    pub title: String,
    pub link: String,
    pub guid: String,
    pub description: String,
    pub published_at: DateTime<Utc>,
}

impl From<&Article> for RssEntry {
    fn from(article: &Article) -> Self {
        RssEntry {
            title: article.title.clone(),
            link: article.url.clone(),
            guid: article.article_id.clone(),
            description: article.body.clone(),
            published_at: article.published_at,
        }
    }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Render a well-formed UTF-8 RSS 2.0 document, one `<item>` per entry,
/// ordered by publication time descending (ties by guid).
pub fn emit_rss(meta: &ChannelMeta, entries: &[RssEntry]) -> Vec<u8> {
    let mut sorted: Vec<&RssEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| {
        b.published_at
            .cmp(&a.published_at)
            .then_with(|| a.guid.cmp(&b.guid))
    });

    let mut doc = String::new();
    doc.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    doc.push_str("<rss version=\"2.0\">\n<channel>\n");
    doc.push_str(&format!("<title>{}</title>\n", xml_escape(&meta.title)));
    doc.push_str(&format!("<link>{}</link>\n", xml_escape(&meta.link)));
    doc.push_str(&format!(
        "<description>{}</description>\n",
        xml_escape(&meta.description)
    ));
    for entry in sorted {
        doc.push_str("<item>\n");
        doc.push_str(&format!("<title>{}</title>\n", xml_escape(&entry.title)));
        if !entry.link.is_empty() {
            doc.push_str(&format!("<link>{}</link>\n", xml_escape(&entry.link)));
        }
        doc.push_str(&format!(
            "<guid isPermaLink=\"false\">{}</guid>\n",
            xml_escape(&entry.guid)
        ));
        doc.push_str(&format!(
            "<pubDate>{}</pubDate>\n",
            entry.published_at.to_rfc2822()
        ));
        doc.push_str(&format!(
            "<description>{}</description>\n",
            xml_escape(&entry.description)
        ));
        doc.push_str("</item>\n");
    }
    doc.push_str("</channel>\n</rss>\n");
    doc.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    const FIXTURE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<rss version="2.0"><channel>
<title>Wire</title><link>http://wire.example</link><description>test</description>
<item><title>First &amp; foremost</title><link>http://wire.example/1</link>
  <guid>g1</guid><pubDate>Mon, 01 Jun 2009 10:00:00 GMT</pubDate>
  <description>Alpha body</description></item>
<item><title>Second</title><link>http://wire.example/2</link>
  <guid>g2</guid><pubDate>Mon, 01 Jun 2009 11:00:00 GMT</pubDate>
  <description><![CDATA[Beta <b>body</b>]]></description></item>
<item><title>Third</title><link>http://wire.example/3</link>
  <guid>g3</guid><pubDate>Mon, 01 Jun 2009 12:00:00 GMT</pubDate>
  <description>Gamma body</description></item>
</channel></rss>"#;

    #[test]
    fn parses_rss_fixture() {
        let (items, skipped) = parse_feed("s", FIXTURE);
        assert!(skipped.is_empty());
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].title, "First & foremost");
        assert_eq!(items[1].body, "Beta <b>body</b>");
        assert_eq!(
            items[2].published_at,
            Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap()
        );
    }

    #[test]
    fn parses_atom() {
        let atom = r#"<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom">
<title>A</title>
<entry><title>Entry one</title><link href="http://a.example/1"/>
  <id>e1</id><updated>2009-06-01T10:00:00Z</updated>
  <summary>Body one</summary></entry>
</feed>"#;
        let (items, skipped) = parse_feed("s", atom);
        assert!(skipped.is_empty());
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].title, "Entry one");
        assert_eq!(items[0].url, "http://a.example/1");
        assert_eq!(items[0].body, "Body one");
    }

    #[test]
    fn item_without_date_is_skipped_with_diagnostic() {
        let xml = r#"<rss version="2.0"><channel>
<item><title>No date</title><description>x</description></item>
<item><title>Dated</title><pubDate>Mon, 01 Jun 2009 10:00:00 GMT</pubDate></item>
</channel></rss>"#;
        let (items, skipped) = parse_feed("s", xml);
        assert_eq!(items.len(), 1);
        assert_eq!(skipped.len(), 1);
        assert!(skipped[0].reason.contains("No date"));
    }

    #[test]
    fn malformed_document_keeps_prior_items() {
        let xml = r#"<rss><channel>
<item><title>Ok</title><pubDate>Mon, 01 Jun 2009 10:00:00 GMT</pubDate></item>
<item><title>Broken</barf"#;
        let (items, skipped) = parse_feed("s", xml);
        assert_eq!(items.len(), 1);
        assert_eq!(skipped.len(), 1);
        assert!(skipped[0].reason.contains("malformed XML"));
    }

    fn fixture_sources(dir: &Path) -> Vec<SourceDescriptor> {
        let path = dir.join("feed.xml");
        std::fs::write(&path, FIXTURE).unwrap();
        vec![SourceDescriptor {
            source_id: "s1".into(),
            locator: path.display().to_string(),
            language: "en".into(),
            country: "GB".into(),
            poll_interval: 300,
        }]
    }

    #[test]
    fn fetch_filters_by_since() {
        let dir = tempfile::tempdir().unwrap();
        let sources = fixture_sources(dir.path());
        let epoch = Utc.timestamp_opt(0, 0).unwrap();
        let outcome = fetch_feeds(&sources, epoch, Duration::from_secs(5));
        assert_eq!(outcome.items.len(), 3);
        assert!(outcome.errors.is_empty());

        // since = max timestamp in the feed excludes everything.
        let max_ts = Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap();
        let outcome = fetch_feeds(&sources, max_ts, Duration::from_secs(5));
        assert_eq!(outcome.items.len(), 0);
    }

    #[test]
    fn empty_source_list_yields_empty_outcome() {
        let outcome = fetch_feeds(&[], Utc.timestamp_opt(0, 0).unwrap(), Duration::from_secs(1));
        assert!(outcome.items.is_empty());
        assert!(outcome.errors.is_empty());
    }

    #[test]
    fn unreachable_source_recorded_without_affecting_others() {
        let dir = tempfile::tempdir().unwrap();
        let mut sources = fixture_sources(dir.path());
        sources.insert(
            0,
            SourceDescriptor {
                source_id: "missing".into(),
                locator: dir.path().join("nope.xml").display().to_string(),
                language: "en".into(),
                country: "GB".into(),
                poll_interval: 300,
            },
        );
        let outcome = fetch_feeds(
            &sources,
            Utc.timestamp_opt(0, 0).unwrap(),
            Duration::from_secs(5),
        );
        assert_eq!(outcome.errors.len(), 1);
        assert_eq!(outcome.errors[0].source_id, "missing");
        assert_eq!(outcome.items.len(), 3);
    }

    #[test]
    fn fetch_over_http() {
        use std::io::{Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 1024];
            let _ = stream.read(&mut buf);
            let body = FIXTURE.as_bytes();
            let header = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/rss+xml\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                body.len()
            );
            stream.write_all(header.as_bytes()).unwrap();
            stream.write_all(body).unwrap();
        });
        let sources = vec![SourceDescriptor {
            source_id: "http1".into(),
            locator: format!("http://{addr}/feed.xml"),
            language: "en".into(),
            country: "GB".into(),
            poll_interval: 300,
        }];
        let outcome = fetch_feeds(
            &sources,
            Utc.timestamp_opt(0, 0).unwrap(),
            Duration::from_secs(5),
        );
        handle.join().unwrap();
        assert!(outcome.errors.is_empty(), "{:?}", outcome.errors);
        assert_eq!(outcome.items.len(), 3);
    }

    #[test]
    fn emit_rss_round_trips_through_own_parser() {
        let meta = ChannelMeta {
            title: "Out".into(),
            link: "http://out.example".into(),
            description: "d".into(),
        };
        let entries = vec![
            RssEntry {
                title: "A & B".into(),
                link: "http://x/1".into(),
                guid: "a1".into(),
                description: "first".into(),
                published_at: Utc.with_ymd_and_hms(2009, 6, 1, 10, 0, 0).unwrap(),
            },
            RssEntry {
                title: "Später".into(),
                link: "http://x/2".into(),
                guid: "a2".into(),
                description: "second".into(),
                published_at: Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap(),
            },
        ];
        let bytes = emit_rss(&meta, &entries);
        let xml = String::from_utf8(bytes).unwrap();
        let (items, skipped) = parse_feed("roundtrip", &xml);
        assert!(skipped.is_empty());
        assert_eq!(items.len(), 2);
        // Ordered by timestamp descending.
        assert_eq!(items[0].title, "Später");
        assert_eq!(items[1].title, "A & B");
        assert_eq!(
            items[0].published_at,
            Utc.with_ymd_and_hms(2009, 6, 1, 12, 0, 0).unwrap()
        );
    }

    #[test]
    fn empty_channel_is_still_valid() {
        let meta = ChannelMeta {
            title: "Empty".into(),
            link: "http://e".into(),
            description: "".into(),
        };
        let bytes = emit_rss(&meta, &[]);
        let (items, skipped) = parse_feed("e", std::str::from_utf8(&bytes).unwrap());
        assert!(items.is_empty());
        assert!(skipped.is_empty());
    }
}
