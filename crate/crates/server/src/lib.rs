// SPDX-License-Identifier: Apache-2.0

//! HTTP server for annotation sessions.
//!
//! A session pairs a template with an instance file. Annotators fetch the
//! compiled interface, post annotation files, and request a completion
//! code once every instance is covered. Every state change is a record in
//! the session's append-only log (see [`store`]).
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/api/session` | create from inline text or HTTPS URLs |
//! | GET | `/api/session/{id}` | summary |
//! | GET | `/api/session/{id}/interface` | compiled interface |
//! | POST | `/api/session/{id}/annotations` | submit one annotator's file |
//! | GET | `/api/session/{id}/annotations/{annotator}` | latest submission |
//! | GET | `/api/session/{id}/adjudicate?annotators=a,b[,c]` | multi-pane interface |
//! | POST | `/api/session/{id}/complete` | completion code |
//! | POST | `/api/session/{id}/close` | stop accepting submissions |

pub mod api;
pub mod completion;
pub mod config;
pub mod fetch;
pub mod session;
pub mod store;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

pub use api::{router, AppState};
pub use config::{FetchConfig, ServerConfig};
pub use store::{FileStore, LogRecord, MemoryStore, SessionStore};

/// The store a configuration asks for: files under `store_root`, or memory.
pub fn open_store(config: &ServerConfig) -> std::io::Result<Arc<dyn SessionStore>> {
    Ok(match &config.store_root {
        Some(root) => Arc::new(FileStore::open(root)?),
        None => Arc::new(MemoryStore::new()),
    })
}

pub fn app(config: &ServerConfig, store: Arc<dyn SessionStore>) -> axum::Router {
    router(config, AppState::new(config, store))
}

/// Bind, report the bound address through `on_bound`, and serve until
/// `shutdown` resolves.
pub async fn serve(
    config: ServerConfig,
    on_bound: impl FnOnce(SocketAddr),
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let store = open_store(&config)?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    let addr = listener.local_addr()?;
    tracing::info!(%addr, store = ?config.store_root, "listening");
    on_bound(addr);
    axum::serve(listener, app(&config, store))
        .with_graceful_shutdown(shutdown)
        .await
}
