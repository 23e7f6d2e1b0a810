use std::fs;
use std::net::SocketAddr;
use std::path::Path;

use reqwest::StatusCode;
use serde_json::{json, Value};
use sketchparts::dataset::{load_dataset, parse_annotations, load_parts};
use sketchparts::model::DEFAULT_CANVAS;
use sketchparts::service::{router, ServiceConfig};
use sketchparts::synth::{write_synth, SynthConfig};

struct Server {
    base: String,
    _data: tempfile::TempDir,
    root: std::path::PathBuf,
}

async fn start(with_pending: bool) -> Server {
    let data = tempfile::tempdir().unwrap();
    let config = SynthConfig { categories: vec!["bird".into(), "house".into()], sketches_per_category: 3, ..SynthConfig::default() };
    write_synth(data.path(), &config).unwrap();
    if with_pending {
        // strip one annotation file so the sketch shows up as pending
        let dir = data.path().join("house/annotations");
        let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        fs::remove_file(&files[0]).unwrap();
    }
    let mut cfg = ServiceConfig::new(data.path());
    let assets = data.path().join("ui");
    fs::create_dir_all(assets.join("js")).unwrap();
    fs::write(assets.join("index.html"), "<!doctype html><title>annotate</title>").unwrap();
    fs::write(assets.join("js/app.js"), "console.log(1)").unwrap();
    cfg.assets = Some(assets);
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0))).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(cfg)).await.unwrap() });
    let root = data.path().to_path_buf();
    Server { base: format!("http://{addr}"), _data: data, root }
}

async fn get(url: String) -> (StatusCode, Value) {
    let r = reqwest::get(url).await.unwrap();
    let status = r.status();
    (status, r.json().await.unwrap())
}

async fn put(url: String, body: &Value) -> (StatusCode, Value) {
    let r = reqwest::Client::new().put(url).json(body).send().await.unwrap();
    let status = r.status();
    (status, r.json().await.unwrap())
}

fn first_sketch(root: &Path, category: &str) -> String {
    let ds = load_dataset(root, DEFAULT_CANVAS).unwrap();
    let c = ds.categories.iter().find(|c| c.name() == category).unwrap();
    c.sketches[0].sketch.sketch_id.clone()
}

#[tokio::test]
async fn lists_categories_and_sketches() {
    let s = start(true).await;
    let (status, body) = get(format!("{}/categories", s.base)).await;
    assert_eq!(status, StatusCode::OK);
    let cats = body["categories"].as_array().unwrap();
    assert_eq!(cats.len(), 2);
    assert_eq!(cats[0]["name"], "bird");
    assert_eq!(cats[0]["sketches"], 3);
    assert_eq!(cats[1]["annotated"], 2);
    assert_eq!(cats[0]["has_reference_image"], true);
    assert!(cats[0]["parts"].as_array().unwrap().iter().any(|p| p == "wing"));

    let (_, all) = get(format!("{}/categories/house/sketches", s.base)).await;
    assert_eq!(all["sketches"].as_array().unwrap().len(), 3);
    let (_, pending) = get(format!("{}/categories/house/sketches?pending=true", s.base)).await;
    let pending = pending["sketches"].as_array().unwrap();
    assert_eq!(pending.len(), 1);
    assert_eq!(pending[0]["annotated"], false);

    let (status, body) = get(format!("{}/categories/nope/sketches", s.base)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"], "not found");
}

#[tokio::test]
async fn fetches_sketch_with_parts_and_reference() {
    let s = start(false).await;
    let id = first_sketch(&s.root, "bird");
    let (status, body) = get(format!("{}/sketches/{id}", s.base)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["sketch_id"], id.as_str());
    assert_eq!(body["category"], "bird");
    assert_eq!(body["canvas"], json!({"width": 256, "height": 256}));
    let stroke = &body["strokes"][0];
    assert!(stroke["points"][0].is_array());
    assert!(stroke["temporal_index"].is_number());
    assert_eq!(body["reference_image"], "/categories/bird/reference-image");

    let r = reqwest::get(format!("{}/categories/bird/reference-image", s.base)).await.unwrap();
    assert_eq!(r.status(), StatusCode::OK);
    assert_eq!(r.headers()["content-type"], "image/svg+xml");
    assert!(r.text().await.unwrap().starts_with("<svg"));

    let (status, _) = get(format!("{}/sketches/missing", s.base)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn save_then_fetch_round_trips() {
    let s = start(false).await;
    let id = first_sketch(&s.root, "bird");
    let set = json!({ "annotations": [
        { "part_name": "wing", "contour": [[10.0, 10.0], [40.0, 10.0], [40.0, 40.0], [10.0, 40.0]] },
        { "part_name": "wing", "contour": [[50.5, 50.0], [80.0, 50.0], [80.0, 80.25]] },
    ]});
    let (status, body) = put(format!("{}/sketches/{id}/annotations", s.base), &set).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body, json!({ "sketch_id": id, "saved": 2 }));

    let (status, fetched) = get(format!("{}/sketches/{id}/annotations", s.base)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fetched["sketch_id"], id.as_str());
    assert_eq!(fetched["annotations"], set["annotations"]);

    // persisted file is a valid dataset record
    let dir = s.root.join("bird");
    let text = fs::read_to_string(dir.join(format!("annotations/{id}.parts"))).unwrap();
    let parsed = parse_annotations(&text, &load_parts(&dir).unwrap(), Path::new("x")).unwrap();
    assert_eq!(parsed.len(), 2);
    load_dataset(&s.root, DEFAULT_CANVAS).unwrap();
}

#[tokio::test]
async fn invalid_saves_are_rejected_with_reasons() {
    let s = start(false).await;
    let id = first_sketch(&s.root, "bird");
    let file = s.root.join(format!("bird/annotations/{id}.parts"));
    let before = fs::read(&file).unwrap();
    let url = format!("{}/sketches/{id}/annotations", s.base);

    let unknown = json!({ "annotations": [
        { "part_name": "wing", "contour": [[1.0, 1.0], [5.0, 1.0], [5.0, 5.0]] },
        { "part_name": "rotor", "contour": [[1.0, 1.0], [5.0, 1.0], [5.0, 5.0]] },
    ]});
    let (status, body) = put(url.clone(), &unknown).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "unknown part");
    assert_eq!(body["index"], 1);

    let two = json!({ "annotations": [{ "part_name": "wing", "contour": [[1.0, 1.0], [5.0, 1.0]] }]});
    let (status, body) = put(url.clone(), &two).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "too few points");

    let flat = json!({ "annotations": [{ "part_name": "wing", "contour": [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]] }]});
    let (_, body) = put(url.clone(), &flat).await;
    assert_eq!(body["error"], "zero area");

    let r = reqwest::Client::new().put(url.clone()).body("{not json").send().await.unwrap();
    assert_eq!(r.status(), StatusCode::BAD_REQUEST);
    assert_eq!(r.json::<Value>().await.unwrap()["error"], "malformed body");

    assert_eq!(fs::read(&file).unwrap(), before, "rejected saves must not touch the file");

    let (status, body) = get(format!("{}/sketches/..%2Fetc/annotations", s.base)).await;
    assert!(status == StatusCode::BAD_REQUEST || status == StatusCode::NOT_FOUND, "{status} {body}");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_saves_of_different_sketches_persist() {
    let s = start(false).await;
    let ds = load_dataset(&s.root, DEFAULT_CANVAS).unwrap();
    let mut jobs = Vec::new();
    for c in &ds.categories {
        let part = c.parts.parts[0].clone();
        for (k, a) in c.sketches.iter().enumerate() {
            let id = a.sketch.sketch_id.clone();
            let url = format!("{}/sketches/{id}/annotations", s.base);
            let off = 10.0 * k as f64;
            let body = json!({ "annotations": [
                { "part_name": part, "contour": [[off, 0.0], [off + 20.0, 0.0], [off + 20.0, 20.0], [off, 20.0]] }
            ]});
            jobs.push(tokio::spawn(async move {
                let (status, _) = put(url, &body).await;
                (id, status, body)
            }));
        }
    }
    let mut results = Vec::new();
    for j in jobs {
        results.push(j.await.unwrap());
    }
    assert_eq!(results.len(), 6);
    for (id, status, body) in results {
        assert_eq!(status, StatusCode::OK);
        let (_, fetched) = get(format!("{}/sketches/{id}/annotations", s.base)).await;
        assert_eq!(fetched["annotations"], body["annotations"]);
    }
    // no temp files left behind and the dataset still validates
    load_dataset(&s.root, DEFAULT_CANVAS).unwrap();
    for c in ["bird", "house"] {
        for e in fs::read_dir(s.root.join(c).join("annotations")).unwrap() {
            let name = e.unwrap().file_name().into_string().unwrap();
            assert!(name.ends_with(".parts"), "stray file {name}");
        }
    }
}

#[tokio::test]
async fn serves_ui_assets() {
    let s = start(false).await;
    let r = reqwest::get(format!("{}/", s.base)).await.unwrap();
    assert_eq!(r.status(), StatusCode::OK);
    assert!(r.headers()["content-type"].to_str().unwrap().starts_with("text/html"));
    let r = reqwest::get(format!("{}/ui/js/app.js", s.base)).await.unwrap();
    assert_eq!(r.status(), StatusCode::OK);
    let r = reqwest::get(format!("{}/ui/missing.js", s.base)).await.unwrap();
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
}
