// An interactive editing session against the HTTP service, driven
// in-process: upload, paint a mask with brush strokes, run, poll, commit,
// remove a second object, then undo it.
//
// To serve over TCP instead: `cargo run --release -- serve --port 8080`.

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use patchfill::io::encode_png;
use patchfill::scene::background;
use patchfill::service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

pub struct Client {
    app: Router,
}

impl Client {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            app: router(AppState::new(config)),
        }
    }

    pub async fn send(
        &self,
        method: Method,
        uri: &str,
        content_type: Option<&str>,
        body: Vec<u8>,
    ) -> Result<(StatusCode, Vec<u8>), BoxError> {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(ct) = content_type {
            req = req.header(header::CONTENT_TYPE, ct);
        }
        let res = self.app.clone().oneshot(req.body(Body::from(body))?).await?;
        let status = res.status();
        let bytes = res.into_body().collect().await?.to_bytes().to_vec();
        Ok((status, bytes))
    }

    pub async fn json(&self, method: Method, uri: &str, body: Option<Value>) -> Result<(StatusCode, Value), BoxError> {
        let (ct, bytes) = match body {
            Some(v) => (Some("application/json"), serde_json::to_vec(&v)?),
            None => (None, Vec::new()),
        };
        let (status, bytes) = self.send(method, uri, ct, bytes).await?;
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes)? };
        Ok((status, value))
    }

    /// Polls progress until the job leaves `running`; returns every fraction
    /// seen and the final state.
    pub async fn wait(&self, id: &str) -> Result<(Vec<f64>, String), BoxError> {
        let mut fractions = Vec::new();
        loop {
            let (_, p) = self.json(Method::GET, &format!("/sessions/{id}/progress"), None).await?;
            fractions.push(p["fraction_filled"].as_f64().unwrap_or(0.0));
            let state = p["state"].as_str().unwrap_or_default().to_string();
            if state != "running" {
                return Ok((fractions, state));
            }
            tokio::time::sleep(std::time::Duration::from_millis(5)).await;
        }
    }
}

pub async fn edit_session(verbose: bool) -> Result<Vec<String>, BoxError> {
    let say = |s: String| {
        if verbose {
            println!("{s}");
        }
    };
    let client = Client::new(ServiceConfig::default());
    let png = encode_png(&background(96, 72, 3))?;
    let (status, created) = client.send(Method::POST, "/sessions", Some("image/png"), png).await?;
    let created: Value = serde_json::from_slice(&created)?;
    let id = created["id"].as_str().ok_or("no id")?.to_string();
    say(format!("{status} session {id} {}x{}", created["width"], created["height"]));

    let mut states = Vec::new();
    let objects = [json!([[30, 30], [40, 34]]), json!([[70, 50]])];
    for (round, points) in objects.iter().enumerate() {
        let strokes = json!({ "strokes": [{ "points": points, "radius": 4 }] });
        let (status, m) = client.json(Method::POST, &format!("/sessions/{id}/mask"), Some(strokes)).await?;
        say(format!("{status} mask: {} object pixels, bbox {}", m["object_pixels"], m["bbox"]));

        let params = json!({ "alpha": 0.05, "patch_size": 17, "kernel": "tiled" });
        let (status, job) = client.json(Method::POST, &format!("/sessions/{id}/inpaint"), Some(params)).await?;
        say(format!("{status} job {}", job["job"]));

        let (fractions, state) = client.wait(&id).await?;
        say(format!("round {round}: {} polls, final state {state}", fractions.len()));
        states.push(state);

        let (status, result) = client.send(Method::GET, &format!("/sessions/{id}/result"), None, vec![]).await?;
        say(format!("{status} result: {} PNG bytes", result.len()));
        let (status, c) = client.json(Method::POST, &format!("/sessions/{id}/commit"), None).await?;
        say(format!("{status} commit, history {}", c["history_len"]));
    }
    let (status, u) = client.json(Method::POST, &format!("/sessions/{id}/undo"), None).await?;
    say(format!("{status} undo, history {}", u["history_len"]));
    Ok(states)
}

#[tokio::main]
async fn main() -> Result<(), BoxError> {
    edit_session(true).await?;
    Ok(())
}
