mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use draftrank::draft::CardCatalog;
use draftrank::eval::score_decision;
use draftrank::preference::{encode_pool, CardId, Head, PreferenceModel};
use draftrank::service::{router, AdvisorState, RankResponse};
use draftrank::training::{load_checkpoint, save_checkpoint};

use common::fresh_checkpoint;

fn app_with(catalog: &CardCatalog, models: Vec<(&str, PreferenceModel)>) -> Router {
    let models: BTreeMap<String, PreferenceModel> = models.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let state = AdvisorState::new(catalog.clone(), models).unwrap();
    router(Arc::new(state), Some("http://localhost:5173")).unwrap()
}

fn small_app() -> (CardCatalog, Router) {
    let catalog = CardCatalog::synthetic(40);
    let cpr = fresh_checkpoint(Head::Cpr, &catalog, vec![16], 4, 1).model().unwrap();
    let rn = fresh_checkpoint(Head::Ranknet, &catalog, vec![16], 1, 2).model().unwrap();
    let app = app_with(&catalog, vec![("cpr", cpr), ("rn", rn)]);
    (catalog, app)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn health_cards_models() {
    let (catalog, app) = small_app();
    assert_eq!(call(&app, "GET", "/health", None).await, (StatusCode::OK, json!({"status": "ok"})));

    let (status, cards) = call(&app, "GET", "/cards", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cards["card_count"], 40);
    assert_eq!(cards["cards"][3], json!({"card_id": 3, "name": catalog.name(CardId(3)).unwrap()}));

    let (status, models) = call(&app, "GET", "/models", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        models,
        json!([
            {"model_id": "cpr", "head": "cpr", "D": 4},
            {"model_id": "rn", "head": "ranknet", "D": 1}
        ])
    );
}

#[tokio::test]
async fn single_card_pack() {
    let (_, app) = small_app();
    let (status, body) = call(&app, "POST", "/rank", Some(json!({"model_id": "cpr", "pool": [1, 2], "pack": [7]}))).await;
    assert_eq!(status, StatusCode::OK);
    let resp: RankResponse = serde_json::from_value(body).unwrap();
    assert_eq!(resp.ranking.len(), 1);
    assert_eq!((resp.ranking[0].card_id, resp.ranking[0].rank), (7, 0));
}

#[tokio::test]
async fn permuted_pack_gives_identical_entries() {
    let (_, app) = small_app();
    for model in ["cpr", "rn"] {
        let pack: Vec<u32> = vec![3, 9, 14, 22, 5, 39, 0];
        let mut reversed = pack.clone();
        reversed.reverse();
        let (_, a) = call(&app, "POST", "/rank", Some(json!({"model_id": model, "pool": [1, 1, 8], "pack": pack}))).await;
        let (_, b) = call(&app, "POST", "/rank", Some(json!({"model_id": model, "pool": [8, 1, 1], "pack": reversed}))).await;
        assert_eq!(a, b);
        let resp: RankResponse = serde_json::from_value(a).unwrap();
        let ranks: Vec<usize> = resp.ranking.iter().map(|e| e.rank).collect();
        assert_eq!(ranks, (0..7).collect::<Vec<_>>());
    }
}

#[tokio::test]
async fn invalid_requests() {
    let (_, app) = small_app();
    let cases = [
        (json!({"model_id": "cpr", "pool": [], "pack": []}), StatusCode::BAD_REQUEST, "invalid_pack_size"),
        (json!({"model_id": "cpr", "pool": [], "pack": (0..16).collect::<Vec<u32>>()}), StatusCode::BAD_REQUEST, "invalid_pack_size"),
        (json!({"model_id": "cpr", "pool": vec![0u32; 45], "pack": [1]}), StatusCode::BAD_REQUEST, "pool_too_large"),
        (json!({"model_id": "cpr", "pool": [40], "pack": [1]}), StatusCode::BAD_REQUEST, "unknown_card"),
        (json!({"model_id": "cpr", "pool": [], "pack": [-1]}), StatusCode::BAD_REQUEST, "invalid_request"),
        (json!({"pool": [], "pack": [1]}), StatusCode::BAD_REQUEST, "invalid_request"),
        (json!({"model_id": "nope", "pool": [], "pack": [1]}), StatusCode::NOT_FOUND, "unknown_model"),
    ];
    for (body, status, code) in cases {
        let (got, err) = call(&app, "POST", "/rank", Some(body.clone())).await;
        assert_eq!(got, status, "{body}");
        assert_eq!(err["error"], code, "{body}");
        assert!(err["message"].is_string());
    }
}

#[tokio::test]
async fn cors_preflight_allows_configured_origin() {
    let (_, app) = small_app();
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/rank")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .header("access-control-request-headers", "content-type")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
}

#[tokio::test]
async fn rank_matches_evaluation_path_after_checkpoint_load() {
    let catalog = CardCatalog::synthetic(60);
    let dir = tempfile::tempdir().unwrap();
    let mut specs = Vec::new();
    for (id, head, dim) in [("c", Head::Cpr, 8), ("r", Head::Ranknet, 1)] {
        let path = dir.path().join(format!("{id}.cpr.json"));
        save_checkpoint(&path, &fresh_checkpoint(head, &catalog, vec![32, 32], dim, 9)).unwrap();
        specs.push((id.to_string(), path));
    }
    let state = Arc::new(AdvisorState::load(&specs, Some(catalog.clone())).unwrap());
    let app = router(state, None).unwrap();

    let pool = [4u32, 4, 17, 33, 59];
    let pack = [2u32, 8, 17, 21, 40, 41, 55, 59];
    for (id, path) in &specs {
        let (status, body) = call(&app, "POST", "/rank", Some(json!({"model_id": id, "pool": pool, "pack": pack}))).await;
        assert_eq!(status, StatusCode::OK);
        let resp: RankResponse = serde_json::from_value(body).unwrap();

        let model = load_checkpoint(path).unwrap().model().unwrap();
        let pool_vec = encode_pool(&pool.map(CardId), 60).unwrap();
        let pack_ids = pack.map(CardId);
        let direct = model.rank(&pool_vec, &pack_ids).unwrap();
        for (api, cli) in resp.ranking.iter().zip(&direct.entries) {
            assert_eq!(api.card_id, cli.card.0);
            assert_eq!(api.score.to_bits(), cli.score.to_bits());
            assert_eq!(api.rank, cli.rank);
            assert_eq!(api.name, catalog.name(cli.card).unwrap());
            let (hit, rank) = score_decision(&model, &pool_vec, &pack_ids, cli.card).unwrap();
            assert_eq!((hit, rank), (cli.rank == 0, cli.rank));
        }
    }
}

#[test]
fn checkpoints_with_different_catalogs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.cpr.json");
    let b = dir.path().join("b.cpr.json");
    save_checkpoint(&a, &fresh_checkpoint(Head::Cpr, &CardCatalog::synthetic(20), vec![4], 2, 0)).unwrap();
    save_checkpoint(&b, &fresh_checkpoint(Head::Cpr, &CardCatalog::synthetic(21), vec![4], 2, 0)).unwrap();
    let err = AdvisorState::load(&[("a".into(), a.clone()), ("b".into(), b)], None).unwrap_err();
    assert!(matches!(err, draftrank::Error::Compatibility(_)), "{err}");
    let renamed = CardCatalog::from_names((0..20).map(|i| format!("x{i}")).collect()).unwrap();
    let err = AdvisorState::load(&[("a".into(), a)], Some(renamed)).unwrap_err();
    assert!(matches!(err, draftrank::Error::Compatibility(_)), "{err}");
}

#[tokio::test]
async fn full_size_rank_latency() {
    let catalog = CardCatalog::synthetic(265);
    let model = fresh_checkpoint(Head::Cpr, &catalog, vec![512, 512, 512], 16, 3).model().unwrap();
    let app = app_with(&catalog, vec![("big", model)]);
    let body = json!({"model_id": "big", "pool": (0..44).collect::<Vec<u32>>(), "pack": (100..115).collect::<Vec<u32>>()});
    call(&app, "POST", "/rank", Some(body.clone())).await;
    let mut times = Vec::new();
    for _ in 0..5 {
        let start = Instant::now();
        let (status, _) = call(&app, "POST", "/rank", Some(body.clone())).await;
        times.push(start.elapsed());
        assert_eq!(status, StatusCode::OK);
    }
    times.sort();
    assert!(times[2].as_millis() < 50, "median /rank latency {:?}", times[2]);
}

#[tokio::test]
async fn concurrent_identical_requests_agree() {
    let (_, app) = small_app();
    let body = json!({"model_id": "rn", "pool": [1, 2, 3], "pack": [4, 5, 6, 7]});
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let body = body.clone();
            tokio::spawn(async move { call(&app, "POST", "/rank", Some(body)).await })
        })
        .collect();
    let mut results = Vec::new();
    for h in handles {
        results.push(h.await.unwrap());
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
