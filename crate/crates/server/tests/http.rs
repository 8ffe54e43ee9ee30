use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{Value, json};
use termtpl_server::{MAX_BODY_BYTES, ServerConfig, app};
use tower::ServiceExt;

const ADDITION: &str = "(VAR x y)\n(RULES\n  +(0,y) -> y\n  +(s(x),y) -> s(+(x,y))\n)\n";

async fn send(req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app(ServerConfig::default()).oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, body)
}

async fn post_prove(body: impl Into<Body>) -> (StatusCode, Value) {
    let req = Request::post("/prove")
        .header("content-type", "application/json")
        .body(body.into())
        .unwrap();
    let (status, bytes) = send(req).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn kbo_template_proves_addition() {
    let (status, v) = post_prove(
        json!({"problem": ADDITION, "strategy": r#"kbo -prec "+ > s > 0" -w0 1 -weights "+ = s = 0 = 1""#})
            .to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["result"], "YES");
    assert_eq!(
        v["proof"],
        "kbo\nprecedence (strict): + > s > 0\nw0 = 1\nw(+) = 1\nw(0) = 1\nw(s) = 1\n"
    );
    assert!(v.get("reason").is_none());
}

#[tokio::test]
async fn reversed_lpo_is_maybe() {
    let (status, v) = post_prove(
        json!({"problem": ADDITION, "strategy": r#"lpo -prec "0 > s > +""#, "timeout": 5})
            .to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["result"], "MAYBE");
    assert_eq!(v["reason"], "Exhausted");
}

#[tokio::test]
async fn bad_requests_are_400() {
    for body in [
        json!({"problem": "", "strategy": "kbo"}).to_string(),
        json!({"problem": ADDITION, "strategy": "rpo"}).to_string(),
        json!({"problem": ADDITION, "strategy": "lpo", "timeout": -1}).to_string(),
        json!({"problem": ADDITION}).to_string(),
        "not json".to_string(),
    ] {
        let (status, v) = post_prove(body.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn oversized_body_is_413() {
    let big = json!({"problem": "x".repeat(MAX_BODY_BYTES + 1), "strategy": "lpo"}).to_string();
    let (status, v) = post_prove(big).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert!(v["error"].is_string());
}

#[tokio::test]
async fn static_routes() {
    let (status, body) = send(Request::get("/").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("<html"));
    let (status, _) = send(Request::get("/app.js").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = send(Request::get("/nope").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn web_root_is_served() {
    let dir = std::env::temp_dir().join(format!("termtpl-web-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<html>built</html>").unwrap();
    let cfg = ServerConfig {
        web_root: Some(dir.clone()),
        ..ServerConfig::default()
    };
    let resp = app(cfg)
        .oneshot(Request::get("/").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&body[..], b"<html>built</html>");
    std::fs::remove_dir_all(dir).unwrap();
}
