//! HTTP facade over `pitplot-core` for interactive what-if analysis.
//!
//! One in-memory session holds the current portfolio and simulation config.
//! Analyses run on a snapshot of that session taken when the request
//! arrives; only `PUT` requests change it.

mod api;
mod error;
mod state;

use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::Context;
use axum::Router;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub use api::Echoed;
pub use error::ApiError;
pub use state::{CacheKey, SessionState, Snapshot};

#[derive(Debug, Clone, Default)]
pub struct RouterOptions {
    /// Directory served at `/` (the web UI build).
    pub static_dir: Option<PathBuf>,
    /// Allow any origin; meant for local UI development.
    pub permissive_cors: bool,
}

/// API routes under `/api`, plus optional static files and CORS.
pub fn router(state: SessionState, options: &RouterOptions) -> Router {
    let mut app = Router::new().nest("/api", api::routes()).with_state(state);
    if let Some(dir) = &options.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    if options.permissive_cors {
        app = app.layer(CorsLayer::permissive());
    }
    app
}

/// Serves until Ctrl-C, then saves the session if it has a state file.
pub async fn serve(addr: SocketAddr, state: SessionState, options: RouterOptions) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    let app = router(state.clone(), &options);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .context("server error")?;
    state.save()
}
