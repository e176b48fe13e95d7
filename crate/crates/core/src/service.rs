//! Stateless JSON-over-HTTP ranking service.
//!
//! * `GET /health` → `{"status":"ok"}`
//! * `GET /cards` → `{"card_count": V, "cards": [{"card_id", "name"}, ...]}`
//! * `GET /models` → `[{"model_id", "head", "D"}, ...]`
//! * `POST /rank` with `{"model_id", "pool": [...], "pack": [...]}` →
//!   `{"model_id", "head", "ranking": [{"card_id", "name", "score", "rank"}, ...]}`
//!
//! Invalid requests get `400` (`404` for an unknown model) with
//! `{"error": <code>, "message": <text>}`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::draft::{CardCatalog, PICKS_PER_PLAYER, PICKS_PER_ROUND};
use crate::error::{Error, Result};
use crate::preference::{encode_pool, CardId, Head, PreferenceModel};
use crate::training::load_checkpoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRequest {
    pub model_id: String,
    #[serde(default)]
    pub pool: Vec<u32>,
    pub pack: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub card_id: u32,
    pub name: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankResponse {
    pub model_id: String,
    pub head: Head,
    pub ranking: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub model_id: String,
    pub head: Head,
    #[serde(rename = "D")]
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    pub message: String,
}

impl ApiError {
    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: 400,
            error: code.into(),
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::BAD_REQUEST);
        (status, Json(self)).into_response()
    }
}

/// Models loaded at startup plus the catalog used for names and id checks.
#[derive(Debug)]
pub struct AdvisorState {
    catalog: CardCatalog,
    models: BTreeMap<String, PreferenceModel>,
}

/// Model id for a checkpoint path: the file name without `.cpr.json` / `.json`.
pub fn model_id_for(path: &std::path::Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.strip_suffix(".cpr.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(&name)
        .to_string()
}

impl AdvisorState {
    pub fn new(catalog: CardCatalog, models: BTreeMap<String, PreferenceModel>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::Usage("at least one model is required".into()));
        }
        for (id, m) in &models {
            if m.card_count() != catalog.len() {
                return Err(Error::Compatibility(format!(
                    "model {id} expects {} cards, catalog has {}",
                    m.card_count(),
                    catalog.len()
                )));
            }
        }
        Ok(AdvisorState { catalog, models })
    }

    /// Load `(model_id, path)` checkpoints. They must share one catalog
    /// fingerprint, which must also match `catalog` when one is given.
    pub fn load(checkpoints: &[(String, PathBuf)], catalog: Option<CardCatalog>) -> Result<Self> {
        let mut models = BTreeMap::new();
        let mut fingerprint = None;
        for (id, path) in checkpoints {
            let ckpt = load_checkpoint(path)?;
            match &fingerprint {
                None => fingerprint = Some(ckpt.catalog.clone()),
                Some(fp) if *fp != ckpt.catalog => {
                    return Err(Error::Compatibility(format!(
                        "checkpoint {} was trained on a different catalog",
                        path.display()
                    )))
                }
                Some(_) => {}
            }
            if let Some(c) = &catalog {
                ckpt.check_catalog(c)?;
            }
            if models.insert(id.clone(), ckpt.model()?).is_some() {
                return Err(Error::Usage(format!("duplicate model id {id:?}")));
            }
        }
        let fingerprint = fingerprint.ok_or_else(|| Error::Usage("at least one model is required".into()))?;
        let catalog = catalog.unwrap_or_else(|| CardCatalog::synthetic(fingerprint.card_count));
        AdvisorState::new(catalog, models)
    }

    pub fn catalog(&self) -> &CardCatalog {
        &self.catalog
    }

    pub fn models(&self) -> Vec<ModelInfo> {
        self.models
            .iter()
            .map(|(id, m)| ModelInfo {
                model_id: id.clone(),
                head: m.head(),
                dim: m.net().output_dim(),
            })
            .collect()
    }

    pub fn rank(&self, req: &RankRequest) -> std::result::Result<RankResponse, ApiError> {
        let model = self.models.get(&req.model_id).ok_or_else(|| ApiError {
            status: 404,
            error: "unknown_model".into(),
            message: format!("no model named {:?}", req.model_id),
        })?;
        if req.pack.is_empty() || req.pack.len() > PICKS_PER_ROUND {
            return Err(ApiError::bad_request(
                "invalid_pack_size",
                format!("pack must hold 1 to {PICKS_PER_ROUND} cards, got {}", req.pack.len()),
            ));
        }
        if req.pool.len() >= PICKS_PER_PLAYER {
            return Err(ApiError::bad_request(
                "pool_too_large",
                format!("pool may hold at most {} cards, got {}", PICKS_PER_PLAYER - 1, req.pool.len()),
            ));
        }
        let v = self.catalog.len();
        if let Some(bad) = req.pool.iter().chain(&req.pack).find(|&&c| c as usize >= v) {
            return Err(ApiError::bad_request(
                "unknown_card",
                format!("card id {bad} is outside the catalog of {v} cards"),
            ));
        }
        let pool_ids: Vec<CardId> = req.pool.iter().copied().map(CardId).collect();
        let pack_ids: Vec<CardId> = req.pack.iter().copied().map(CardId).collect();
        let ranked = encode_pool(&pool_ids, v)
            .and_then(|pool| model.rank(&pool, &pack_ids))
            .map_err(|e| ApiError {
                status: 500,
                error: "internal".into(),
                message: e.to_string(),
            })?;
        Ok(RankResponse {
            model_id: req.model_id.clone(),
            head: model.head(),
            ranking: ranked
                .entries
                .iter()
                .map(|e| RankEntry {
                    card_id: e.card.0,
                    name: self.catalog.name(e.card).unwrap_or_default().to_string(),
                    score: e.score,
                    rank: e.rank,
                })
                .collect(),
        })
    }
}

#[derive(Serialize)]
struct CardEntry<'a> {
    card_id: u32,
    name: &'a str,
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

async fn cards(State(state): State<Arc<AdvisorState>>) -> Response {
    let cards: Vec<CardEntry<'_>> = state
        .catalog
        .entries()
        .map(|(id, name)| CardEntry { card_id: id.0, name })
        .collect();
    Json(serde_json::json!({"card_count": state.catalog.len(), "cards": cards})).into_response()
}

async fn models(State(state): State<Arc<AdvisorState>>) -> Json<Vec<ModelInfo>> {
    Json(state.models())
}

async fn rank(State(state): State<Arc<AdvisorState>>, body: Bytes) -> Response {
    let req: RankRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return ApiError::bad_request("invalid_request", e.to_string()).into_response(),
    };
    match state.rank(&req) {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => e.into_response(),
    }
}

pub fn router(state: Arc<AdvisorState>, cors_origin: Option<&str>) -> Result<Router> {
    let mut app = Router::new()
        .route("/health", get(health))
        .route("/cards", get(cards))
        .route("/models", get(models))
        .route("/rank", post(rank))
        .with_state(state);
    if let Some(origin) = cors_origin {
        let origin: HeaderValue = origin
            .parse()
            .map_err(|_| Error::Usage(format!("invalid CORS origin {origin:?}")))?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Bind and serve until Ctrl-C.
pub async fn serve(state: Arc<AdvisorState>, bind: SocketAddr, cors_origin: Option<&str>) -> Result<()> {
    let app = router(state, cors_origin)?;
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| Error::io(bind.to_string(), e))?;
    eprintln!("advisor service listening on http://{}", listener.local_addr().map_err(|e| Error::io(bind.to_string(), e))?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(bind.to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Mlp, MlpConfig};

    fn state() -> AdvisorState {
        let net = Mlp::new(MlpConfig::new(30, 4).with_hidden(vec![8])).unwrap();
        let mut models = BTreeMap::new();
        models.insert("cpr".to_string(), PreferenceModel::new(Head::Cpr, net).unwrap());
        AdvisorState::new(CardCatalog::synthetic(30), models).unwrap()
    }

    fn req(pool: Vec<u32>, pack: Vec<u32>) -> RankRequest {
        RankRequest { model_id: "cpr".into(), pool, pack }
    }

    #[test]
    fn validation_codes() {
        let s = state();
        assert_eq!(s.rank(&req(vec![], vec![])).unwrap_err().error, "invalid_pack_size");
        assert_eq!(s.rank(&req(vec![], (0..16).collect())).unwrap_err().error, "invalid_pack_size");
        assert_eq!(s.rank(&req(vec![0; 45], vec![1])).unwrap_err().error, "pool_too_large");
        assert_eq!(s.rank(&req(vec![], vec![30])).unwrap_err().error, "unknown_card");
        let mut r = req(vec![], vec![1]);
        r.model_id = "nope".into();
        assert_eq!(s.rank(&r).unwrap_err().status, 404);
        assert!(s.rank(&req(vec![0; 44], (0..15).collect())).is_ok());
    }

    #[test]
    fn model_ids_from_paths() {
        assert_eq!(model_id_for(std::path::Path::new("/x/cpr16.cpr.json")), "cpr16");
        assert_eq!(model_id_for(std::path::Path::new("rn.json")), "rn");
    }
}
