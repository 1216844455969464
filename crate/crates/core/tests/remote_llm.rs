//! Remote chat-completion backend against a local mock server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, Once};
use std::time::Duration;

use forge::llm::{generate, GenBackend, GenRequest, LlmError, RemoteBackend, RemoteConfig};
use serde_json::{json, Value};

const TOKEN_ENV: &str = "FORGE_MOCK_LLM_TOKEN";

fn set_token() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| std::env::set_var(TOKEN_ENV, "secret-token"));
}

#[derive(Debug, Clone)]
struct Seen {
    path: String,
    auth: Option<String>,
    body: Value,
}

struct Mock {
    url: String,
    seen: Arc<Mutex<Vec<Seen>>>,
    peak: Arc<AtomicUsize>,
}

/// Serves each request with the next status from `statuses`, then 200s.
/// Successful replies echo the prompt back as `echo: <prompt>`.
fn mock(statuses: Vec<u16>, latency: Duration) -> Mock {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let peak = Arc::new(AtomicUsize::new(0));
    let script = Arc::new(Mutex::new(statuses.into_iter()));
    let active = Arc::new(AtomicUsize::new(0));
    let (seen2, peak2) = (seen.clone(), peak.clone());
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { continue };
            let (seen, peak, script, active) = (seen2.clone(), peak2.clone(), script.clone(), active.clone());
            std::thread::spawn(move || serve(stream, &seen, &peak, &script, &active, latency));
        }
    });
    Mock { url, seen, peak }
}

fn serve(
    stream: TcpStream,
    seen: &Mutex<Vec<Seen>>,
    peak: &AtomicUsize,
    script: &Mutex<std::vec::IntoIter<u16>>,
    active: &AtomicUsize,
    latency: Duration,
) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut writer = stream;
    loop {
        let mut request_line = String::new();
        if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
            return;
        }
        let path = request_line.split_whitespace().nth(1).unwrap_or_default().to_string();
        let mut length = 0;
        let mut auth = None;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let line = line.trim_end();
            if line.is_empty() {
                break;
            }
            let (name, value) = line.split_once(':').unwrap();
            match name.to_ascii_lowercase().as_str() {
                "content-length" => length = value.trim().parse().unwrap(),
                "authorization" => auth = Some(value.trim().to_string()),
                _ => {}
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);

        let now = active.fetch_add(1, Ordering::SeqCst) + 1;
        peak.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(latency);
        active.fetch_sub(1, Ordering::SeqCst);

        let status = script.lock().unwrap().next().unwrap_or(200);
        let prompt = body["messages"][0]["content"].as_str().unwrap_or_default().to_string();
        seen.lock().unwrap().push(Seen { path, auth, body });
        let payload = if status == 200 {
            json!({"choices": [{"message": {"role": "assistant", "content": format!("  echo: {prompt}\n")}}]}).to_string()
        } else {
            "{\"error\": \"scripted failure\"}".to_string()
        };
        let reply = format!(
            "HTTP/1.1 {status} Scripted\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{payload}",
            payload.len()
        );
        if writer.write_all(reply.as_bytes()).is_err() {
            return;
        }
    }
}

fn backend(url: &str, max_in_flight: usize) -> GenBackend {
    set_token();
    let mut cfg = RemoteConfig::new(url, "mock-model").auth_env(TOKEN_ENV);
    cfg.retry.base_delay = Duration::from_millis(1);
    cfg.max_in_flight = max_in_flight;
    GenBackend::Remote(RemoteBackend::new(cfg).unwrap())
}

#[test]
fn request_follows_chat_completion_contract() {
    let m = mock(vec![], Duration::ZERO);
    let mut req = GenRequest::new("SUMMARIZE_USER hello", 9);
    req.max_tokens = 64;
    let out = generate(&backend(&m.url, 4), &req).unwrap();
    assert_eq!(out, "echo: SUMMARIZE_USER hello");
    let seen = m.seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].path, "/chat/completions");
    assert_eq!(seen[0].auth.as_deref(), Some("Bearer secret-token"));
    let b = &seen[0].body;
    assert_eq!(b["model"], "mock-model");
    assert_eq!(b["messages"][0]["role"], "user");
    assert_eq!(b["messages"][0]["content"], "SUMMARIZE_USER hello");
    assert_eq!(b["max_tokens"], 64);
    assert_eq!(b["temperature"], 0.0);
}

#[test]
fn server_errors_are_retried() {
    let m = mock(vec![503, 500, 429], Duration::ZERO);
    let out = generate(&backend(&m.url, 4), &GenRequest::new("ping", 1)).unwrap();
    assert_eq!(out, "echo: ping");
    assert_eq!(m.seen.lock().unwrap().len(), 4);
}

#[test]
fn retries_stop_after_three() {
    let m = mock(vec![500; 10], Duration::ZERO);
    let err = generate(&backend(&m.url, 4), &GenRequest::new("ping", 1)).unwrap_err();
    assert!(matches!(err, LlmError::Status { status: 500, .. }), "{err}");
    assert_eq!(m.seen.lock().unwrap().len(), 4);
}

#[test]
fn client_errors_are_not_retried() {
    let m = mock(vec![400], Duration::ZERO);
    let err = generate(&backend(&m.url, 4), &GenRequest::new("ping", 1)).unwrap_err();
    assert!(matches!(err, LlmError::Status { status: 400, .. }), "{err}");
    assert_eq!(m.seen.lock().unwrap().len(), 1);
}

#[test]
fn in_flight_requests_are_capped() {
    let m = mock(vec![], Duration::from_millis(30));
    let b = backend(&m.url, 2);
    std::thread::scope(|s| {
        for i in 0..8 {
            let b = &b;
            s.spawn(move || generate(b, &GenRequest::new(format!("p{i}"), i)).unwrap());
        }
    });
    assert_eq!(m.seen.lock().unwrap().len(), 8);
    assert!(m.peak.load(Ordering::SeqCst) <= 2);
}

#[test]
fn cli_generate_uses_the_remote_backend() {
    let m = mock(vec![], Duration::ZERO);
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let forge = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_forge"))
            .args(args)
            .env("MOCK_TOKEN", "cli-token")
            .output()
            .unwrap()
    };
    let out = forge(&["synth", "--seed", "3", "--items", "60", "--users", "40", "--out", &p("data")]);
    assert!(out.status.success());
    let split = format!("{},{}", p("train.jsonl"), p("test.jsonl"));
    let out = forge(&[
        "generate", "--catalog", &p("data"), "--total", "40", "--test-total", "20", "--split-out", &split, "--llm", "remote",
        "--endpoint", &m.url, "--model", "mock-model", "--auth-env", "MOCK_TOKEN",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let seen = m.seen.lock().unwrap();
    assert!(!seen.is_empty());
    assert!(seen.iter().all(|s| s.auth.as_deref() == Some("Bearer cli-token")));
    let train = std::fs::read_to_string(p("train.jsonl")).unwrap();
    assert!(train.lines().next().unwrap().contains("\"llm\":\"remote:mock-model\""));
    assert!(train.contains("echo: "));
}

#[test]
fn cli_remote_without_endpoint_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["synth", "--out", dir.path().join("d").to_str().unwrap(), "--conversations", "2", "--llm", "remote"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("d").exists());
}
