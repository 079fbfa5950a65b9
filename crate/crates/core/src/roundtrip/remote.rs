// SPDX-License-Identifier: Apache-2.0

//! Chat-completion backend over HTTP.

use std::sync::{Condvar, Mutex};
use std::thread::sleep;
use std::time::Duration;

use serde_json::{json, Value};

use crate::roundtrip::backend::{BackendError, TransformBackend};
use crate::roundtrip::prompt::{
    extract_artifact, TransformKind, TransformRequest, TransformResponse,
};

pub const ENV_BASE: &str = "LCT_API_BASE";
pub const ENV_KEY: &str = "LCT_API_KEY";
pub const ENV_FORWARD_MODEL: &str = "LCT_FORWARD_MODEL";
pub const ENV_INVERSE_MODEL: &str = "LCT_INVERSE_MODEL";
pub const ENV_MAX_REQUESTS: &str = "LCT_MAX_REQUESTS";

const DEFAULT_FORWARD_MODEL: &str = "forward-model";
const DEFAULT_INVERSE_MODEL: &str = "inverse-model";

/// Caps in-flight requests across every remote backend in the process.
struct Semaphore {
    in_use: Mutex<usize>,
    freed: Condvar,
}

static REQUESTS: Semaphore = Semaphore {
    in_use: Mutex::new(0),
    freed: Condvar::new(),
};

struct Permit;

impl Semaphore {
    fn acquire(&'static self, cap: usize) -> Permit {
        let mut n = self.in_use.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= cap.max(1) {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit
    }
}

impl Drop for Permit {
    fn drop(&mut self) {
        let mut n = REQUESTS.in_use.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        REQUESTS.freed.notify_one();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteChat {
    /// Endpoint root; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub retries: u32,
    pub timeout: Duration,
    /// Delay before the first retry; doubles on each further attempt.
    pub backoff: Duration,
    pub max_concurrent: usize,
}

impl RemoteChat {
    pub fn new(base_url: &str, model: &str) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key: None,
            retries: 3,
            timeout: Duration::from_secs(120),
            backoff: Duration::from_millis(500),
            max_concurrent: 4,
        }
    }

    /// Configuration from the environment; forward and inverse default to
    /// different model identities.
    pub fn from_env(kind: TransformKind) -> Result<Self, BackendError> {
        let base = std::env::var(ENV_BASE)
            .map_err(|_| BackendError::Config(format!("{ENV_BASE} is not set")))?;
        let model = match kind {
            TransformKind::Forward => std::env::var(ENV_FORWARD_MODEL)
                .unwrap_or_else(|_| DEFAULT_FORWARD_MODEL.to_string()),
            TransformKind::Inverse => std::env::var(ENV_INVERSE_MODEL)
                .unwrap_or_else(|_| DEFAULT_INVERSE_MODEL.to_string()),
        };
        let mut r = Self::new(&base, &model);
        r.api_key = std::env::var(ENV_KEY).ok().filter(|k| !k.is_empty());
        if let Ok(n) = std::env::var(ENV_MAX_REQUESTS) {
            r.max_concurrent = n
                .parse()
                .map_err(|_| BackendError::Config(format!("{ENV_MAX_REQUESTS} is not a count")))?;
        }
        Ok(r)
    }

    fn attempt(&self, agent: &ureq::Agent, body: &Value) -> Result<String, (bool, String)> {
        let mut req = agent.post(format!("{}/chat/completions", self.base_url));
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = match req.send_json(body) {
            Ok(r) => r,
            Err(ureq::Error::StatusCode(code)) => {
                let retry = code == 429 || code >= 500;
                return Err((retry, format!("HTTP status {code}")));
            }
            Err(e) => return Err((true, e.to_string())),
        };
        let v: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| (true, format!("unreadable response: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or((
                false,
                "response has no choices[0].message.content".to_string(),
            ))
    }
}

impl TransformBackend for RemoteChat {
    fn id(&self) -> String {
        format!("remote/{}", self.model)
    }

    fn complete(&self, req: &TransformRequest) -> Result<TransformResponse, BackendError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": req.prompt}],
        });
        let _permit = REQUESTS.acquire(self.max_concurrent);
        let attempts = self.retries.max(1);
        let mut delay = self.backoff;
        let mut last = String::new();
        for n in 1..=attempts {
            match self.attempt(&agent, &body) {
                Ok(raw) => {
                    return Ok(TransformResponse {
                        artifact: extract_artifact(&raw),
                        raw,
                        backend: self.id(),
                    })
                }
                Err((retry, message)) => {
                    last = message;
                    if !retry {
                        return Err(BackendError::Request {
                            backend: self.id(),
                            attempts: n,
                            message: last,
                        });
                    }
                    if n < attempts {
                        sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(BackendError::Request {
            backend: self.id(),
            attempts,
            message: last,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::roundtrip::prompt::build_forward_prompt;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::thread;

    /// Serves canned HTTP responses in order, one per connection, and
    /// returns the request bodies seen.
    fn mock(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = format!("http://{}", listener.local_addr().unwrap());
        let handle = thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let (mut s, _) = listener.accept().unwrap();
                let mut buf = Vec::new();
                let mut chunk = [0u8; 4096];
                loop {
                    let n = s.read(&mut chunk).unwrap();
                    buf.extend_from_slice(&chunk[..n]);
                    let text = String::from_utf8_lossy(&buf).to_string();
                    if let Some(h) = text.find("\r\n\r\n") {
                        let len = text[..h]
                            .lines()
                            .find_map(|l| {
                                let (k, v) = l.split_once(':')?;
                                k.eq_ignore_ascii_case("content-length")
                                    .then(|| v.trim().parse::<usize>().ok())?
                            })
                            .unwrap_or(0);
                        if buf.len() >= h + 4 + len {
                            seen.push(text[h + 4..].to_string());
                            break;
                        }
                    }
                    if n == 0 {
                        break;
                    }
                }
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                s.write_all(reply.as_bytes()).unwrap();
            }
            seen
        });
        (addr, handle)
    }

    fn chat(content: &str) -> String {
        json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string()
    }

    #[test]
    fn retries_then_extracts_fenced_block() {
        let (addr, handle) = mock(vec![
            (503, "{}".into()),
            (
                200,
                chat("Here it is:\n```verilog\nmodule m; endmodule\n```\n"),
            ),
        ]);
        let mut b = RemoteChat::new(&addr, "test-model");
        b.backoff = Duration::from_millis(1);
        b.api_key = Some("secret".into());
        let req = build_forward_prompt(&bundled::table1()).unwrap();
        let resp = b.complete(&req).unwrap();
        assert_eq!(resp.artifact, "module m; endmodule");
        assert_eq!(resp.backend, "remote/test-model");
        let seen = handle.join().unwrap();
        assert_eq!(seen.len(), 2);
        let body: Value = serde_json::from_str(&seen[1]).unwrap();
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["messages"][0]["content"], req.prompt.as_str());
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (addr, handle) = mock(vec![(400, "{}".into())]);
        let mut b = RemoteChat::new(&addr, "m");
        b.backoff = Duration::from_millis(1);
        let req = build_forward_prompt(&bundled::table1()).unwrap();
        match b.complete(&req) {
            Err(BackendError::Request { attempts, .. }) => assert_eq!(attempts, 1),
            other => panic!("unexpected {other:?}"),
        }
        handle.join().unwrap();
    }

    #[test]
    fn bounded_retries_give_up() {
        let (addr, handle) = mock(vec![
            (500, "{}".into()),
            (500, "{}".into()),
            (500, "{}".into()),
        ]);
        let mut b = RemoteChat::new(&addr, "m");
        b.backoff = Duration::from_millis(1);
        let req = build_forward_prompt(&bundled::table1()).unwrap();
        match b.complete(&req) {
            Err(BackendError::Request { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("unexpected {other:?}"),
        }
        handle.join().unwrap();
    }
}
