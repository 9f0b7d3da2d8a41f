// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{any, get, post};
use axum::{Json, Router};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thresh_core::canonical::sha256_hex;
use thresh_core::compile::{compile, CompileOptions};
use thresh_core::data::{parse_annotations, serialize_annotations, AnnotationSet};
use thresh_core::diagnostic::codes;
use thresh_core::Diagnostic;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;
use tower_http::services::ServeDir;

use crate::completion::completion_code;
use crate::config::ServerConfig;
use crate::fetch::{FetchError, Fetcher};
use crate::session::{Completion, Content, Session, Submission};
use crate::store::{LogRecord, SessionStore, StoreError};

/// Uniform error envelope: `{code, message, details[]}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Vec<Value>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: Vec::new(),
        }
    }

    fn with_details(mut self, details: Vec<Value>) -> Self {
        self.details = details;
        self
    }

    fn diagnostics(
        status: StatusCode,
        code: &'static str,
        message: impl Into<String>,
        d: &[Diagnostic],
    ) -> Self {
        Self::new(status, code, message).with_details(d.iter().map(|d| json!(d)).collect())
    }

    fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", what)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "details": self.details });
        (self.status, Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownSession(id) => ApiError::not_found(format!("no session `{id}`")),
            other => {
                tracing::error!("store failure: {other}");
                ApiError::internal(other.to_string())
            }
        }
    }
}

impl From<FetchError> for ApiError {
    fn from(e: FetchError) -> Self {
        if e.is_client_error() {
            return ApiError::bad_request(e.to_string());
        }
        let details = match e.upstream_status() {
            Some(s) => vec![json!({ "upstream_status": s })],
            None => Vec::new(),
        };
        ApiError::new(StatusCode::BAD_GATEWAY, "fetch_failed", e.to_string()).with_details(details)
    }
}

type ApiResult<T> = Result<T, ApiError>;

const IR_CACHE_LIMIT: usize = 256;

pub struct AppState {
    store: Arc<dyn SessionStore>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    /// Compiled IR keyed by a hash of everything that feeds the compiler.
    ir_cache: Mutex<HashMap<String, Arc<String>>>,
    fetcher: Fetcher,
    secret: Vec<u8>,
}

impl AppState {
    pub fn new(config: &ServerConfig, store: Arc<dyn SessionStore>) -> Arc<Self> {
        Arc::new(Self {
            store,
            sessions: RwLock::default(),
            ir_cache: Mutex::default(),
            fetcher: Fetcher::new(config.fetch.clone()),
            secret: config.completion_secret.as_bytes().to_vec(),
        })
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        if !is_session_id(id) {
            return Err(ApiError::not_found(format!("no session `{id}`")));
        }
        if let Some(s) = self.sessions.read().get(id) {
            return Ok(s.clone());
        }
        let records = self.store.replay(id)?;
        let session = Session::from_log(id, records).map_err(ApiError::internal)?;
        let mut map = self.sessions.write();
        Ok(map
            .entry(id.to_string())
            .or_insert_with(|| Arc::new(Mutex::new(session)))
            .clone())
    }

    /// Compile through the cache.
    fn compiled(
        &self,
        content: &Content,
        template: &str,
        data: &str,
        opts: CompileOptions,
    ) -> ApiResult<Arc<String>> {
        let mut key_parts = vec![
            template.to_string(),
            data.to_string(),
            format!("{:?}", opts.panes),
        ];
        key_parts.extend(opts.annotations.iter().map(serialize_annotations));
        let key = sha256_hex(key_parts.join("\u{0}").as_bytes());
        if let Some(ir) = self.ir_cache.lock().get(&key) {
            return Ok(ir.clone());
        }
        let ir = compile(&content.typology, &content.instances, &opts).map_err(|e| {
            ApiError::diagnostics(
                StatusCode::UNPROCESSABLE_ENTITY,
                "compile_failed",
                e.to_string(),
                &e.diagnostics(),
            )
        })?;
        let ir = Arc::new(ir.to_json());
        let mut cache = self.ir_cache.lock();
        if cache.len() >= IR_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, ir.clone());
        Ok(ir)
    }
}

fn is_session_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn json_text(body: Arc<String>) -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        body.as_str().to_owned(),
    )
        .into_response()
}

fn content_of(s: &Session) -> ApiResult<&Content> {
    s.content.as_ref().map_err(|d| {
        ApiError::diagnostics(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_session",
            "the session's stored template or data no longer validate",
            d,
        )
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    template_inline: Option<String>,
    template_url: Option<String>,
    /// Instance file as a JSON string or as the array itself.
    data_inline: Option<Value>,
    data_url: Option<String>,
    /// Annotation files to preload, as strings or objects.
    #[serde(default)]
    annotations_inline: Vec<Value>,
}

fn value_text(v: Value) -> String {
    match v {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn exactly_one<T, U>(what: &str, inline: &Option<T>, url: &Option<U>) -> ApiResult<()> {
    match (inline.is_some(), url.is_some()) {
        (true, false) | (false, true) => Ok(()),
        (true, true) => Err(ApiError::bad_request(format!(
            "give either {what}_inline or {what}_url, not both"
        ))),
        (false, false) => Err(ApiError::bad_request(format!(
            "one of {what}_inline or {what}_url is required"
        ))),
    }
}

async fn source(
    fetcher: &Fetcher,
    inline: Option<String>,
    url: Option<String>,
) -> ApiResult<String> {
    match (inline, url) {
        (Some(text), _) => Ok(text),
        (None, Some(url)) => Ok(fetcher.fetch_text(&url).await?),
        (None, None) => unreachable!("checked by exactly_one"),
    }
}

async fn create_session(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let req: CreateSession = parse_body(&body)?;
    exactly_one("template", &req.template_inline, &req.template_url)?;
    exactly_one("data", &req.data_inline, &req.data_url)?;
    let template = source(&st.fetcher, req.template_inline, req.template_url).await?;
    let data = source(&st.fetcher, req.data_inline.map(value_text), req.data_url).await?;
    let annotations: Vec<String> = req.annotations_inline.into_iter().map(value_text).collect();

    let content = Content::parse(&template, &data, &annotations).map_err(|d| {
        ApiError::diagnostics(
            StatusCode::UNPROCESSABLE_ENTITY,
            "validation_failed",
            "session sources do not validate",
            &d,
        )
    })?;
    let id = uuid::Uuid::new_v4().to_string();
    let record = LogRecord::SessionCreated {
        template: template.clone(),
        data: data.clone(),
        annotations: annotations.clone(),
    };
    st.store.create(&id, &record)?;
    let session = Session {
        id: id.clone(),
        template,
        data,
        initial_sources: annotations,
        content: Ok(content),
        submissions: Default::default(),
        submission_count: 0,
        completions: Default::default(),
        closed: false,
    };
    st.sessions
        .write()
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    tracing::info!(session = %id, "session created");
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id }))).into_response())
}

async fn summary(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let s = st.session(&id)?;
    let s = s.lock();
    let (typology, instances) = match &s.content {
        Ok(c) => (json!(c.typology.name), json!(c.instances.len())),
        Err(_) => (Value::Null, Value::Null),
    };
    Ok(Json(json!({
        "session_id": s.id,
        "typology": typology,
        "instances": instances,
        "annotators": s.submissions.keys().collect::<Vec<_>>(),
        "closed": s.closed,
    })))
}

async fn interface(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.session(&id)?;
    let s = s.lock();
    let content = content_of(&s)?;
    let opts = CompileOptions {
        annotations: content.initial.clone(),
        ..Default::default()
    };
    Ok(json_text(st.compiled(
        content,
        &s.template,
        &s.data,
        opts,
    )?))
}

#[derive(Debug, Serialize)]
struct Receipt<'a> {
    session_id: &'a str,
    annotator_id: &'a str,
    submission_hash: &'a str,
    sequence: usize,
}

async fn post_annotations(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let s = st.session(&id)?;
    let mut s = s.lock();
    if s.closed {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "session_closed",
            "the session no longer accepts submissions",
        ));
    }
    let content = content_of(&s)?;
    let text =
        std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let set: AnnotationSet = parse_annotations(text, &content.typology, &content.instances)
        .map_err(|e| {
            ApiError::diagnostics(
                StatusCode::BAD_REQUEST,
                "validation_failed",
                e.to_string(),
                &e.diagnostics(),
            )
        })?;
    if set.annotator_id.is_empty() {
        let d = Diagnostic::error(
            codes::BAD_VALUE,
            "annotator_id",
            "submissions need a non-empty annotator_id",
        );
        return Err(ApiError::diagnostics(
            StatusCode::BAD_REQUEST,
            "validation_failed",
            d.message.clone(),
            &[d],
        ));
    }
    let canonical = serialize_annotations(&set);
    let hash = sha256_hex(canonical.as_bytes());
    let record = LogRecord::Submission {
        annotator_id: set.annotator_id.clone(),
        annotations: canonical.clone(),
        hash: hash.clone(),
    };
    st.store.append(&id, &record)?;

    let annotator = set.annotator_id.clone();
    s.submission_count += 1;
    s.submissions.insert(
        annotator.clone(),
        Submission {
            set,
            canonical,
            hash: hash.clone(),
        },
    );
    let receipt = Receipt {
        session_id: &id,
        annotator_id: &annotator,
        submission_hash: &hash,
        sequence: s.submission_count,
    };
    Ok(Json(json!(receipt)).into_response())
}

async fn get_annotations(
    State(st): State<Arc<AppState>>,
    Path((id, annotator)): Path<(String, String)>,
) -> ApiResult<Response> {
    let s = st.session(&id)?;
    let s = s.lock();
    let sub = s
        .submissions
        .get(&annotator)
        .ok_or_else(|| ApiError::not_found(format!("no submission from `{annotator}`")))?;
    Ok(json_text(Arc::new(sub.canonical.clone())))
}

#[derive(Debug, Deserialize)]
struct AdjudicateQuery {
    #[serde(default)]
    annotators: String,
}

async fn adjudicate(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AdjudicateQuery>,
) -> ApiResult<Response> {
    let names: Vec<&str> = q
        .annotators
        .split(',')
        .map(str::trim)
        .filter(|n| !n.is_empty())
        .collect();
    if !(2..=3).contains(&names.len()) {
        return Err(ApiError::bad_request(format!(
            "adjudication compares 2 or 3 annotators, got {}",
            names.len()
        )));
    }
    if (1..names.len()).any(|i| names[..i].contains(&names[i])) {
        return Err(ApiError::bad_request("an annotator is listed twice"));
    }
    let s = st.session(&id)?;
    let s = s.lock();
    let content = content_of(&s)?;
    let sets = names
        .iter()
        .map(|n| {
            s.submissions
                .get(*n)
                .map(|sub| sub.set.clone())
                .ok_or_else(|| ApiError::not_found(format!("no submission from `{n}`")))
        })
        .collect::<ApiResult<Vec<_>>>()?;
    let opts = CompileOptions {
        annotations: sets,
        panes: Some(names.len()),
        ..Default::default()
    };
    Ok(json_text(st.compiled(
        content,
        &s.template,
        &s.data,
        opts,
    )?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompleteRequest {
    annotator_id: String,
}

async fn complete(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let req: CompleteRequest = parse_body(&body)?;
    let s = st.session(&id)?;
    let mut s = s.lock();
    if !s.submissions.contains_key(&req.annotator_id) {
        return Err(ApiError::not_found(format!(
            "no submission from `{}`",
            req.annotator_id
        )));
    }
    let missing = s.unannotated(&req.annotator_id);
    if !missing.is_empty() {
        return Err(ApiError::new(
            StatusCode::PRECONDITION_FAILED,
            "incomplete",
            format!(
                "{} instance(s) have neither edits nor a no-edits confirmation",
                missing.len()
            ),
        )
        .with_details(
            missing
                .into_iter()
                .map(|i| json!({ "instance_id": i }))
                .collect(),
        ));
    }
    let issued = match s.completions.get(&req.annotator_id) {
        Some(c) => c.clone(),
        None => {
            let c = Completion {
                code: completion_code(&st.secret, &id, &req.annotator_id),
                issued_at: OffsetDateTime::now_utc()
                    .format(&Rfc3339)
                    .map_err(|e| ApiError::internal(e.to_string()))?,
            };
            st.store.append(
                &id,
                &LogRecord::Completion {
                    annotator_id: req.annotator_id.clone(),
                    code: c.code.clone(),
                    issued_at: c.issued_at.clone(),
                },
            )?;
            s.completions.insert(req.annotator_id.clone(), c.clone());
            c
        }
    };
    Ok(Json(json!({
        "session_id": id,
        "annotator_id": req.annotator_id,
        "code": issued.code,
        "issued_at": issued.issued_at,
    }))
    .into_response())
}

async fn close(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = st.session(&id)?;
    let mut s = s.lock();
    if !s.closed {
        st.store.append(&id, &LogRecord::Closed)?;
        s.closed = true;
    }
    Ok(Json(json!({ "session_id": id, "closed": true })))
}

async fn unknown_api() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(config: &ServerConfig, state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(summary))
        .route("/api/session/{id}/interface", get(interface))
        .route("/api/session/{id}/annotations", post(post_annotations))
        .route(
            "/api/session/{id}/annotations/{annotator}",
            get(get_annotations),
        )
        .route("/api/session/{id}/adjudicate", get(adjudicate))
        .route("/api/session/{id}/complete", post(complete))
        .route("/api/session/{id}/close", post(close))
        .route("/api/{*rest}", any(unknown_api))
        .layer(DefaultBodyLimit::max(config.max_body_bytes))
        .with_state(state);
    match &config.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}
