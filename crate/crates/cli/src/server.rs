//! HTTP interface. Every endpoint is a thin wrapper around a session
//! command, so a transcript driven over the wire and one typed at the REPL
//! go through the same code.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock as StdRwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use gdiagram::{Error, Session, SessionConfig};
use tokio::sync::RwLock;

type Shared = Arc<RwLock<Session>>;

/// Sessions by id. Commands on one session are serialized by its lock;
/// reads share it.
#[derive(Clone, Default)]
pub struct Store {
    sessions: Arc<StdRwLock<HashMap<u64, Shared>>>,
    next: Arc<AtomicU64>,
    pub config: SessionConfig,
}

impl Store {
    pub fn new(config: SessionConfig) -> Self {
        Store {
            config,
            ..Default::default()
        }
    }

    pub fn insert(&self, session: Session) -> u64 {
        let id = self.next.fetch_add(1, Ordering::SeqCst) + 1;
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::new(RwLock::new(session)));
        id
    }

    fn get(&self, id: u64) -> Option<Shared> {
        self.sessions.read().expect("session map lock").get(&id).cloned()
    }
}

fn text(status: StatusCode, body: String) -> Response {
    (status, [("content-type", "text/plain; charset=utf-8")], body).into_response()
}

fn error(e: Error) -> Response {
    let status = match e {
        Error::Inconsistent(_) => StatusCode::CONFLICT,
        Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::BAD_REQUEST,
    };
    text(status, format!("ERROR: {e}\n"))
}

fn not_found(id: u64) -> Response {
    text(StatusCode::NOT_FOUND, format!("ERROR: no session {id}\n"))
}

async fn command(store: &Store, id: u64, line: String) -> Response {
    let Some(s) = store.get(id) else { return not_found(id) };
    let mut session = s.write().await;
    match session.run(&line) {
        Ok(out) => text(StatusCode::OK, out.text),
        Err(e) => error(e),
    }
}

async fn create(State(store): State<Store>, Query(q): Query<HashMap<String, String>>, body: String) -> Response {
    let mut config = store.config.clone();
    let parsed = (|| -> gdiagram::Result<()> {
        if let Some(d) = q.get("depth") {
            config.depth = d.parse().map_err(|_| Error::Command(format!("bad depth `{d}`")))?;
        }
        if let Some(m) = q.get("mode") {
            config.mode = m.parse()?;
        }
        if let Some(p) = q.get("batch-policy") {
            config.batch_policy = p.parse()?;
        }
        Ok(())
    })();
    if let Err(e) = parsed {
        return error(e);
    }
    match Session::load(&body, config) {
        Ok(session) => {
            let report = session.report();
            let id = store.insert(session);
            text(StatusCode::CREATED, format!("SESSION: {id}\n{report}"))
        }
        Err(e) => error(e),
    }
}

async fn restore(State(store): State<Store>, body: String) -> Response {
    match Session::from_saved_str(&body, store.config.base_dir.clone()) {
        Ok(session) => {
            let report = session.report();
            let id = store.insert(session);
            text(StatusCode::CREATED, format!("SESSION: {id}\n{report}"))
        }
        Err(e) => error(e),
    }
}

async fn read<F>(store: &Store, id: u64, f: F) -> Response
where
    F: FnOnce(&Session) -> gdiagram::Result<String>,
{
    let Some(s) = store.get(id) else { return not_found(id) };
    let session = s.read().await;
    match f(&session) {
        Ok(body) => text(StatusCode::OK, body),
        Err(e) => error(e),
    }
}

async fn model(State(store): State<Store>, Path(id): Path<u64>) -> Response {
    read(&store, id, |s| Ok(s.report())).await
}

async fn history(State(store): State<Store>, Path(id): Path<u64>) -> Response {
    read(&store, id, |s| Ok(s.history_text())).await
}

async fn worlds(State(store): State<Store>, Path(id): Path<u64>) -> Response {
    read(&store, id, |s| s.worlds_text()).await
}

async fn export(State(store): State<Store>, Path(id): Path<u64>) -> Response {
    read(&store, id, |s| Ok(s.to_saved_string())).await
}

async fn truthset(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
) -> Response {
    let Some(f) = q.get("f") else {
        return error(Error::Command("missing query parameter `f`".into()));
    };
    let mode = match q.get("mode").map(|m| m.parse()).transpose() {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let time = q.get("time").cloned();
    read(&store, id, move |s| s.truthset_text(f, time.as_deref(), mode)).await
}

/// `world`, `time` and `mode` query parameters become `at W T` and
/// `mode M` suffixes.
fn suffixes(q: &HashMap<String, String>) -> String {
    let mut out = String::new();
    if let (Some(w), Some(t)) = (q.get("world"), q.get("time")) {
        out.push_str(&format!(" at {w} {t}"));
    }
    if let Some(m) = q.get("mode") {
        out.push_str(&format!(" mode {m}"));
    }
    out
}

fn one_line(body: &str) -> String {
    body.split_whitespace().collect::<Vec<_>>().join(" ")
}

async fn eval(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    command(&store, id, format!("eval {}{}", one_line(&body), suffixes(&q))).await
}

async fn force(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    command(&store, id, format!("force {}{}", one_line(&body), suffixes(&q))).await
}

async fn extend(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    command(&store, id, format!("extend {}{}", one_line(&body), suffixes(&q))).await
}

async fn check(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    command(&store, id, format!("check {}{}", one_line(&body), suffixes(&q))).await
}

async fn apply(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    command(&store, id, format!("apply {}{}", one_line(&body), suffixes(&q))).await
}

async fn add(State(store): State<Store>, Path(id): Path<u64>, body: String) -> Response {
    command(&store, id, format!("add {}", one_line(&body))).await
}

/// Body `p q`, optionally prefixed by `test` or `force`; `?op=force` also
/// selects forcing.
async fn eq(
    State(store): State<Store>,
    Path(id): Path<u64>,
    Query(q): Query<HashMap<String, String>>,
    body: String,
) -> Response {
    let body = one_line(&body);
    let (op, rest) = match body.split_once(' ') {
        Some(("test", rest)) => ("eqtest", rest.to_string()),
        Some(("force", rest)) => ("eqforce", rest.to_string()),
        _ if q.get("op").map(String::as_str) == Some("force") => ("eqforce", body.clone()),
        _ => ("eqtest", body.clone()),
    };
    command(&store, id, format!("{op} {rest}")).await
}

async fn undo(State(store): State<Store>, Path(id): Path<u64>) -> Response {
    command(&store, id, "undo".to_string()).await
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/restore", post(restore))
        .route("/sessions/{id}/model", get(model))
        .route("/sessions/{id}/eval", post(eval))
        .route("/sessions/{id}/force", post(force))
        .route("/sessions/{id}/extend", post(extend))
        .route("/sessions/{id}/check", post(check))
        .route("/sessions/{id}/apply", post(apply))
        .route("/sessions/{id}/add", post(add))
        .route("/sessions/{id}/eq", post(eq))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/history", get(history))
        .route("/sessions/{id}/worlds", get(worlds))
        .route("/sessions/{id}/truthset", get(truthset))
        .route("/sessions/{id}/export", get(export))
        .with_state(store)
}

pub async fn serve(store: Store, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}
