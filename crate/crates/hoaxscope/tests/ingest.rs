mod common;

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use common::MockServer;
use hoaxscope::formats::parse_timestamp;
use hoaxscope::ingest::{Cache, CacheEntry, Client, ClientConfig, FetchKind, FetchResult, FetchStatus, Payload, WikiPageRef};
use serde_json::json;

fn config(url: &str, cache: Option<&std::path::Path>) -> ClientConfig {
    ClientConfig {
        api_url: url.to_string(),
        rate: 0.0,
        cache_dir: cache.map(|p| p.to_path_buf()),
        backoff_base: Duration::from_millis(1),
        timeout: Duration::from_secs(5),
        ..ClientConfig::default()
    }
}

fn stamp(hour: i64) -> String {
    (Utc.with_ymd_and_hms(2012, 3, 1, 0, 0, 0).unwrap() + chrono::Duration::hours(hour))
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

fn revisions_page(title: &str, range: std::ops::Range<i64>, cont: Option<&str>) -> String {
    let revs: Vec<_> = range.map(|h| json!({"timestamp": stamp(h)})).collect();
    let mut body = json!({
        "batchcomplete": cont.is_none(),
        "query": {"pages": [{"pageid": 42, "ns": 0, "title": title, "revisions": revs}]}
    });
    if let Some(c) = cont {
        body["continue"] = json!({"rvcontinue": c, "continue": "||"});
    }
    body.to_string()
}

fn missing_page(title: &str) -> String {
    json!({"query": {"pages": [{"ns": 0, "title": title, "missing": true}]}}).to_string()
}

fn assert_sorted_iso(result: &FetchResult) {
    let stamps = result.timestamps().expect("timestamps payload");
    let parsed: Vec<_> = stamps.iter().map(|s| parse_timestamp(s).unwrap()).collect();
    assert!(parsed.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn three_revisions_oldest_first() {
    let server = MockServer::start(|q| {
        assert_eq!(q["prop"], "revisions");
        assert_eq!(q["rvdir"], "newer");
        assert_eq!(q["titles"], "Lake of fire");
        (200, revisions_page("Lake of fire", 0..3, None))
    });
    let client = Client::new(config(&server.url, None)).unwrap();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("lake_of_fire").unwrap());
    assert_eq!(r.status, FetchStatus::Ok);
    assert_eq!(r.timestamps().unwrap(), [stamp(0), stamp(1), stamp(2)]);
    assert_eq!(r.page.resolved_id, Some(42));
    assert_sorted_iso(&r);
    assert_eq!(client.requests(), 1);
}

#[test]
fn continuation_pages_are_followed() {
    let server = MockServer::start(|q| {
        let body = match q.get("rvcontinue").map(String::as_str) {
            None => revisions_page("Long", 0..500, Some("p1")),
            Some("p1") => {
                assert_eq!(q["continue"], "||");
                revisions_page("Long", 500..1000, Some("p2"))
            }
            Some("p2") => revisions_page("Long", 1000..1200, None),
            Some(other) => panic!("unexpected continuation {other}"),
        };
        (200, body)
    });
    let client = Client::new(config(&server.url, None)).unwrap();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("Long").unwrap());
    assert_eq!(r.status, FetchStatus::Ok);
    let stamps = r.timestamps().unwrap();
    assert_eq!(stamps.len(), 1200);
    assert_eq!(stamps[0], stamp(0));
    assert_eq!(stamps[1199], stamp(1199));
    assert_sorted_iso(&r);
    assert_eq!(client.requests(), 3);
    assert_eq!(server.hits(), 3);
}

#[test]
fn missing_page_is_deleted_and_tombstoned() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::start(|q| (200, missing_page(&q["titles"])));
    let client = Client::new(config(&server.url, Some(dir.path()))).unwrap();
    let page = WikiPageRef::new("Gone hoax").unwrap();
    let r = client.fetch_revision_timestamps(&page);
    assert_eq!(r.status, FetchStatus::Deleted);
    assert!(r.payload.is_none());
    assert_eq!(client.requests(), 1);

    let again = client.fetch_revision_timestamps(&page);
    assert_eq!(again, r);
    assert_eq!(client.requests(), 1);
    assert!(Cache::new(dir.path()).get(FetchKind::Revisions, "Gone hoax").is_some());
}

#[test]
fn invalid_title_is_missing() {
    let server = MockServer::start(|_| {
        (200, json!({"query": {"pages": [{"title": "A|B", "invalid": true, "invalidreason": "bad char"}]}}).to_string())
    });
    let client = Client::new(config(&server.url, None)).unwrap();
    let r = client.fetch_extract(&WikiPageRef::new("A|B").unwrap());
    assert_eq!(r.status, FetchStatus::Missing);
    assert!(r.payload.is_none());
}

#[test]
fn extract_is_cached_after_first_fetch() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::start(|q| {
        assert_eq!(q["prop"], "extracts");
        assert_eq!(q["explaintext"], "1");
        let page = json!({"pageid": 7, "title": "Real page", "extract": "Real page is real. It exists."});
        (200, json!({"query": {"pages": [page]}}).to_string())
    });
    let page = WikiPageRef::new("Real page").unwrap();
    let client = Client::new(config(&server.url, Some(dir.path()))).unwrap();
    let first = client.fetch_extract(&page);
    assert_eq!(first.status, FetchStatus::Ok);
    assert!(!first.extract().unwrap().is_empty());
    assert_eq!(client.requests(), 1);

    let second = client.fetch_extract(&page);
    assert_eq!(second, first);
    assert_eq!(client.requests(), 1);

    // A fresh client over the same cache directory issues no requests either.
    let cold = Client::new(config(&server.url, Some(dir.path()))).unwrap();
    assert_eq!(cold.fetch_extract(&page), first);
    assert_eq!(cold.requests(), 0);
    assert_eq!(server.hits(), 1);
}

#[test]
fn malformed_body_is_a_network_error() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::start(|_| (200, "<html>oops".to_string()));
    let client = Client::new(config(&server.url, Some(dir.path()))).unwrap();
    let page = WikiPageRef::new("X").unwrap();
    let r = client.fetch_extract(&page);
    assert_eq!(r.status, FetchStatus::NetworkError);
    assert!(r.payload.is_none());
    assert!(r.diagnostic.as_deref().unwrap().contains("malformed"), "{r:?}");
    // Failures are not cached.
    client.fetch_extract(&page);
    assert_eq!(client.requests(), 2);
}

#[test]
fn api_error_object_is_a_network_error() {
    let server = MockServer::start(|_| (200, json!({"error": {"code": "badvalue", "info": "nope"}}).to_string()));
    let client = Client::new(config(&server.url, None)).unwrap();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("X").unwrap());
    assert_eq!(r.status, FetchStatus::NetworkError);
    assert!(r.diagnostic.unwrap().contains("badvalue"));
}

#[test]
fn refused_connection_is_a_network_error() {
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let client = Client::new(config(&format!("http://127.0.0.1:{port}/w/api.php"), None)).unwrap();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("X").unwrap());
    assert_eq!(r.status, FetchStatus::NetworkError);
    assert!(r.payload.is_none());
}

#[test]
fn persistent_429_gives_up_after_max_attempts() {
    let server = MockServer::start(|_| (429, "{}".to_string()));
    let cfg = ClientConfig {
        max_attempts: 3,
        ..config(&server.url, None)
    };
    let client = Client::new(cfg).unwrap();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("X").unwrap());
    assert_eq!(r.status, FetchStatus::RateLimited);
    assert!(r.payload.is_none());
    assert_eq!(client.requests(), 3);
    assert_eq!(server.hits(), 3);
}

#[test]
fn transient_429_recovers_with_backoff() {
    let calls = Arc::new(AtomicUsize::new(0));
    let seen = calls.clone();
    let server = MockServer::start(move |_| {
        if seen.fetch_add(1, Ordering::SeqCst) < 2 {
            (429, "{}".to_string())
        } else {
            (200, revisions_page("X", 0..2, None))
        }
    });
    let cfg = ClientConfig {
        backoff_base: Duration::from_millis(20),
        ..config(&server.url, None)
    };
    let client = Client::new(cfg).unwrap();
    let started = Instant::now();
    let r = client.fetch_revision_timestamps(&WikiPageRef::new("X").unwrap());
    assert_eq!(r.status, FetchStatus::Ok);
    assert_eq!(client.requests(), 3);
    // Sleeps of 20 ms then 40 ms precede the second and third attempts.
    assert!(started.elapsed() >= Duration::from_millis(60));
}

#[test]
fn rate_limit_spaces_requests() {
    let server = MockServer::start(|q| (200, missing_page(&q["titles"])));
    let cfg = ClientConfig {
        rate: 20.0,
        jitter: 0.0,
        ..config(&server.url, None)
    };
    let client = Client::new(cfg).unwrap();
    let started = Instant::now();
    for t in ["A", "B", "C"] {
        client.fetch_extract(&WikiPageRef::new(t).unwrap());
    }
    assert_eq!(client.requests(), 3);
    assert!(started.elapsed() >= Duration::from_millis(100), "{:?}", started.elapsed());
}

fn entry(title: &str, fetched_at: &str) -> CacheEntry {
    CacheEntry {
        format_version: 1,
        kind: FetchKind::Extract,
        result: FetchResult {
            page: WikiPageRef::new(title).unwrap(),
            status: FetchStatus::Ok,
            payload: Some(Payload::Extract(format!("{title} text."))),
            fetched_at: fetched_at.to_string(),
            diagnostic: None,
        },
    }
}

#[test]
fn gc_evicts_only_stale_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let now = Utc.with_ymd_and_hms(2024, 6, 1, 0, 0, 0).unwrap();
    let max_age = Duration::from_secs(30 * 86_400);
    assert_eq!(cache.gc_at(now, max_age).unwrap().evicted, 0);

    cache.put(&entry("Old one", "2024-01-01T00:00:00Z")).unwrap();
    cache.put(&entry("Old two", "2024-04-15T12:00:00Z")).unwrap();
    cache.put(&entry("Fresh", "2024-05-20T00:00:00Z")).unwrap();
    let stats = cache.gc_at(now, max_age).unwrap();
    assert_eq!((stats.evicted, stats.skipped), (2, 0));
    assert!(cache.get(FetchKind::Extract, "Fresh").is_some());
    assert!(cache.get(FetchKind::Extract, "Old one").is_none());

    assert_eq!(cache.gc_at(now, max_age).unwrap().evicted, 0);
}

#[test]
fn gc_skips_unreadable_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let path = cache.put(&entry("Fine", "2024-01-01T00:00:00Z")).unwrap();
    let bad = path.with_file_name("garbage.json");
    std::fs::write(&bad, "{not json").unwrap();
    let stats = cache.gc_at(Utc.with_ymd_and_hms(2024, 6, 1, 0, 0, 0).unwrap(), Duration::from_secs(86_400)).unwrap();
    assert_eq!((stats.evicted, stats.skipped), (1, 1));
    assert!(bad.exists());
}

#[test]
fn gc_requires_an_existing_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path().join("absent"));
    assert!(cache.gc(Duration::from_secs(1)).is_err());
}

#[test]
fn cache_layout_is_content_addressed() {
    let cache = Cache::new("/c");
    let p = cache.path_for(FetchKind::Revisions, "Foo");
    let name = p.file_stem().unwrap().to_str().unwrap().to_string();
    assert_eq!(name.len(), 64);
    assert_eq!(p.parent().unwrap().file_name().unwrap().to_str().unwrap(), &name[..2]);
    assert!(p.starts_with("/c/revisions"));
    assert_ne!(p, cache.path_for(FetchKind::Extract, "Foo"));
}

#[test]
fn ingest_command_writes_corpus_and_timelines() {
    let server = MockServer::start(|q| {
        let title = q["titles"].clone();
        if title == "Gone" {
            return (200, missing_page(&title));
        }
        let body = match q["prop"].as_str() {
            "revisions" => revisions_page(&title, 0..4, None),
            _ => json!({"query": {"pages": [{"pageid": 1, "title": title, "extract": format!("{title} is a page. It has text.")}]}})
                .to_string(),
        };
        (200, body)
    });
    let dir = tempfile::tempdir().unwrap();
    let titles = dir.path().join("titles.jsonl");
    std::fs::write(
        &titles,
        "{\"id\": \"a\", \"title\": \"alpha page\", \"label\": 1}\n{\"title\": \"Gone\", \"label\": 1}\n{\"title\": \"Beta\", \"label\": 0}\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let args: Vec<String> = vec![
        "hoaxscope".into(),
        "--cache-dir".into(),
        dir.path().join("cache").display().to_string(),
        "ingest".into(),
        "--titles".into(),
        titles.display().to_string(),
        "--output-dir".into(),
        out.display().to_string(),
        "--api-url".into(),
        server.url.clone(),
        "--rate".into(),
        "0".into(),
    ];
    assert_eq!(hoaxscope::cli::main_with_args(args.clone()), 0);
    let hits = server.hits();
    assert_eq!(hits, 6);

    let timelines = hoaxscope::formats::read_timelines(&out.join("timelines.jsonl")).unwrap();
    let ids: Vec<_> = timelines.iter().map(|t| t.article_id().to_string()).collect();
    assert_eq!(ids, ["a", "Beta"]);
    let corpus = hoaxscope::formats::load_corpus(&out.join("corpus.jsonl")).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(corpus[0].title, "Alpha page");
    let status = std::fs::read_to_string(out.join("ingest_status.jsonl")).unwrap();
    assert!(status.contains("\"revisions\":\"deleted\""));

    // Warm cache: a rerun issues no requests and reproduces the outputs.
    let before = std::fs::read(out.join("timelines.jsonl")).unwrap();
    assert_eq!(hoaxscope::cli::main_with_args(args), 0);
    assert_eq!(server.hits(), hits);
    assert_eq!(std::fs::read(out.join("timelines.jsonl")).unwrap(), before);
}

#[test]
fn ingest_command_reports_network_failure_with_exit_2() {
    let server = MockServer::start(|_| (500, "{}".into()));
    let dir = tempfile::tempdir().unwrap();
    let titles = dir.path().join("titles.jsonl");
    std::fs::write(&titles, "{\"title\": \"X\", \"label\": 1}\n").unwrap();
    let params: HashMap<&str, String> = HashMap::from([
        ("--titles", titles.display().to_string()),
        ("--output-dir", dir.path().join("out").display().to_string()),
        ("--api-url", server.url.clone()),
        ("--rate", "0".into()),
    ]);
    let mut args = vec![
        "hoaxscope".to_string(),
        "--cache-dir".into(),
        dir.path().join("cache").display().to_string(),
        "ingest".into(),
    ];
    for (k, v) in params {
        args.push(k.into());
        args.push(v);
    }
    assert_eq!(hoaxscope::cli::main_with_args(args), 2);
}
