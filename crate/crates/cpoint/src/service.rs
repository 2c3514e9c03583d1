//! HTTP JSON API over compiled model bundles.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Multipart, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;

use crate::api::{to_json, Created, SelectRequest, SelectionView};
use crate::bundle::{Inputs, ModelBundle};
use crate::Error;

/// In-memory bundle store, optionally mirrored to `<dir>/<id>.json`.
#[derive(Debug, Default)]
pub struct Store {
    models: RwLock<HashMap<String, Arc<ModelBundle>>>,
    dir: Option<PathBuf>,
}

impl Store {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { models: RwLock::default(), dir }
    }

    fn file(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    pub fn insert(&self, b: ModelBundle) -> Result<Arc<ModelBundle>, Error> {
        if let Some(existing) = self.models.read().expect("store lock").get(&b.id) {
            return Ok(existing.clone());
        }
        if let Some(path) = self.file(&b.id) {
            if !path.exists() {
                if let Some(d) = &self.dir {
                    std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
                }
                std::fs::write(&path, b.to_json()).map_err(|e| Error::io(&path, e))?;
            }
        }
        let b = Arc::new(b);
        Ok(self.models.write().expect("store lock").entry(b.id.clone()).or_insert(b).clone())
    }

    pub fn get(&self, id: &str) -> Result<Arc<ModelBundle>, Error> {
        if let Some(b) = self.models.read().expect("store lock").get(id) {
            return Ok(b.clone());
        }
        let valid = !id.is_empty() && id.bytes().all(|c| c.is_ascii_hexdigit());
        let path = self.file(id).filter(|p| valid && p.exists()).ok_or_else(|| Error::UnknownModel(id.into()))?;
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let b = ModelBundle::from_json(&text)?;
        if b.id != id {
            return Err(Error::Bundle(format!("{} holds model {}", path.display(), b.id)));
        }
        let b = Arc::new(b);
        Ok(self.models.write().expect("store lock").entry(id.into()).or_insert(b).clone())
    }
}

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

impl IntoResponse for Error {
    fn into_response(self) -> Response {
        let status = match &self {
            Error::UnknownModel(_) => StatusCode::NOT_FOUND,
            Error::OutOfRange(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Io { .. } | Error::Bundle(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        if status.is_server_error() {
            log::error!("{self}");
        }
        json(status, to_json(&self.body()))
    }
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { json(StatusCode::OK, "{\"status\":\"ok\"}\n".into()) }))
        .route("/api/models", post(create_model))
        .route("/api/models/{id}/frontier", get(frontier))
        .route("/api/models/{id}/select", post(select))
        .fallback(|| async { Error::UnknownModel("no such route".into()) })
        .with_state(store)
}

async fn create_model(State(store): State<Arc<Store>>, mut form: Multipart) -> Result<Response, Error> {
    let mut inputs = Inputs::default();
    let (mut model, mut moments, mut correl) = (false, false, false);
    while let Some(field) = form.next_field().await.map_err(|e| Error::Request(e.body_text()))? {
        let name = field.name().unwrap_or_default().to_string();
        let text = field.text().await.map_err(|e| Error::Request(e.body_text()))?;
        match name.as_str() {
            "model" => (inputs.model, model) = (text, true),
            "moments" => (inputs.moments, moments) = (text, true),
            "correl" => (inputs.correl, correl) = (text, true),
            "deriv" => inputs.deriv = Some(text),
            "horizon_days" => {
                let h = text.trim().parse().map_err(|_| Error::Request("horizon_days must be a number".into()))?;
                inputs.horizon_days = Some(h);
            }
            other => return Err(Error::Request(format!("unexpected field {other:?}"))),
        }
    }
    for (present, field) in [(model, "model"), (moments, "moments"), (correl, "correl")] {
        if !present {
            return Err(Error::Request(format!("missing field {field:?}")));
        }
    }
    let bundle = tokio::task::spawn_blocking(move || ModelBundle::build(&inputs))
        .await
        .map_err(|e| Error::Bundle(e.to_string()))??;
    let stored = store.insert(bundle)?;
    Ok(json(StatusCode::CREATED, to_json(&Created { id: stored.id.clone() })))
}

async fn frontier(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response, Error> {
    let b = store.get(&id)?;
    Ok(json(StatusCode::OK, to_json(&b.frontier_view())))
}

async fn select(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> Result<Response, Error> {
    let b = store.get(&id)?;
    let req: SelectRequest = serde_json::from_slice(&body).map_err(|e| Error::Request(e.to_string()))?;
    let p = b.select(&req)?;
    Ok(json(StatusCode::OK, to_json(&SelectionView::from(&p))))
}

pub async fn serve(addr: std::net::SocketAddr, store: Arc<Store>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}
