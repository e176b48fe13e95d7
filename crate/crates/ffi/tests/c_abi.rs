use std::ffi::{CStr, CString};
use std::ptr;

use draftrank::draft::CardCatalog;
use draftrank::nn::{AdamState, Mlp};
use draftrank::preference::{encode_pool, CardId, Head};
use draftrank::training::{save_checkpoint, Checkpoint, TrainConfig, FORMAT_VERSION};
use draftrank_ffi::*;

fn write_checkpoint(dir: &std::path::Path, head: Head, dim: usize) -> (std::path::PathBuf, Checkpoint) {
    let catalog = CardCatalog::synthetic(30);
    let mut config = TrainConfig::new(head, 30);
    config.mlp.hidden_dims = vec![12, 12];
    config.mlp.output_dim = dim;
    config.mlp.seed = 5;
    config.epochs = 0;
    let net = Mlp::new(config.mlp.clone()).unwrap();
    let ckpt = Checkpoint {
        format_version: FORMAT_VERSION,
        adam: AdamState::new(config.adam(), net.params()),
        params: net.params().clone(),
        config,
        epoch: 0,
        batch: 0,
        rng_cursor: 0,
        catalog: catalog.fingerprint(),
    };
    let path = dir.join(format!("{head}.cpr.json"));
    save_checkpoint(&path, &ckpt).unwrap();
    (path, ckpt)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dr_last_error_message()) }.to_string_lossy().into_owned()
}

fn load(path: &std::path::Path) -> *mut DrModel {
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { dr_model_load(c.as_ptr(), &mut handle) }, DrStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

#[test]
fn rank_through_handle_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    for (head, dim, want_head) in [(Head::Cpr, 4, DrHead::Cpr), (Head::Ranknet, 1, DrHead::Ranknet)] {
        let (path, ckpt) = write_checkpoint(dir.path(), head, dim);
        let m = load(&path);
        unsafe {
            let mut h = DrHead::Cpr;
            assert_eq!(dr_model_head(m, &mut h), DrStatus::Ok);
            assert_eq!(h, want_head);
            let mut n = 0usize;
            assert_eq!(dr_model_card_count(m, &mut n), DrStatus::Ok);
            assert_eq!(n, 30);
            assert_eq!(dr_model_output_dim(m, &mut n), DrStatus::Ok);
            assert_eq!(n, dim);

            let pool = [1u32, 1, 7];
            let pack = [3u32, 9, 11, 20, 29];
            let mut cards = [0u32; 5];
            let mut scores = [0f64; 5];
            let status = dr_model_rank(m, pool.as_ptr(), 3, pack.as_ptr(), 5, cards.as_mut_ptr(), scores.as_mut_ptr());
            assert_eq!(status, DrStatus::Ok, "{}", last_error());

            let model = ckpt.model().unwrap();
            let expected = model
                .rank(&encode_pool(&pool.map(CardId), 30).unwrap(), &pack.map(CardId))
                .unwrap();
            for (i, e) in expected.entries.iter().enumerate() {
                assert_eq!(cards[i], e.card.0);
                assert_eq!(scores[i].to_bits(), e.score.to_bits());
            }

            let mut emb = vec![0f64; dim];
            assert_eq!(dr_model_embed_pool(m, pool.as_ptr(), 3, emb.as_mut_ptr(), dim), DrStatus::Ok);
            let want = model.embed_pool(&encode_pool(&pool.map(CardId), 30).unwrap()).unwrap();
            assert_eq!(emb, want.0);
            assert_eq!(dr_model_embed_pool(m, pool.as_ptr(), 3, emb.as_mut_ptr(), dim + 1), DrStatus::Shape);

            let mut buf = [0 as std::ffi::c_char; 65];
            assert_eq!(dr_model_catalog_sha256(m, buf.as_mut_ptr(), 65), DrStatus::Ok);
            assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), ckpt.catalog.names_sha256);
            assert_eq!(dr_model_catalog_sha256(m, buf.as_mut_ptr(), 64), DrStatus::BufferTooSmall);
            dr_model_free(m);
        }
    }
}

#[test]
fn error_codes_and_messages() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = write_checkpoint(dir.path(), Head::Cpr, 2);
    let m = load(&path);
    unsafe {
        let mut handle = ptr::null_mut();
        let missing = CString::new(dir.path().join("missing.json").to_str().unwrap()).unwrap();
        assert_eq!(dr_model_load(missing.as_ptr(), &mut handle), DrStatus::Io);
        assert!(handle.is_null());
        assert!(last_error().contains("missing.json"));

        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, "{\"format_version\": 99}").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(dr_model_load(bad.as_ptr(), &mut handle), DrStatus::Version);

        let truncated = dir.path().join("trunc.json");
        std::fs::write(&truncated, &std::fs::read(&path).unwrap()[..100]).unwrap();
        let truncated = CString::new(truncated.to_str().unwrap()).unwrap();
        assert_eq!(dr_model_load(truncated.as_ptr(), &mut handle), DrStatus::Format);

        assert_eq!(dr_model_load(ptr::null(), &mut handle), DrStatus::NullPointer);
        let mut n = 0usize;
        assert_eq!(dr_model_card_count(ptr::null(), &mut n), DrStatus::NullPointer);

        let pack = [30u32];
        let status = dr_model_rank(m, ptr::null(), 0, pack.as_ptr(), 1, ptr::null_mut(), ptr::null_mut());
        assert_eq!(status, DrStatus::Catalog);
        assert!(!last_error().is_empty());
        let pack = [3u32];
        let status = dr_model_rank(m, ptr::null(), 0, pack.as_ptr(), 1, ptr::null_mut(), ptr::null_mut());
        assert_eq!(status, DrStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(dr_model_rank(m, ptr::null(), 0, pack.as_ptr(), 0, ptr::null_mut(), ptr::null_mut()), DrStatus::InvalidArgument);
        assert_eq!(dr_model_rank(m, ptr::null(), 2, pack.as_ptr(), 1, ptr::null_mut(), ptr::null_mut()), DrStatus::NullPointer);
        dr_model_free(m);
        dr_model_free(ptr::null_mut());
    }
}

#[test]
fn loss_and_tau_entry_points() {
    unsafe {
        let a = [0.1, -0.2, 0.3];
        let p = [0.5, 0.5, 0.5];
        let mut out = f64::NAN;
        assert_eq!(dr_triplet_loss(a.as_ptr(), p.as_ptr(), p.as_ptr(), 3, 1.0, &mut out), DrStatus::Ok);
        assert_eq!(out, 1.0);
        assert!((dr_ranknet_loss(0.3, 0.3) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(dr_ranknet_loss(f64::NAN, 0.0).is_nan());

        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0];
        assert_eq!(dr_kendall_tau(x.as_ptr(), y.as_ptr(), 3, &mut out), DrStatus::Ok);
        assert!((out - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(dr_kendall_tau(x.as_ptr(), y.as_ptr(), 1, &mut out), DrStatus::InvalidArgument);
        assert!(!CStr::from_ptr(dr_version()).to_str().unwrap().is_empty());
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/draftrank.h")).unwrap();
    for symbol in [
        "typedef struct DrModel DrModel;",
        "DR_STATUS_OK = 0",
        "DR_HEAD_RANKNET = 1",
        "dr_model_load(",
        "dr_model_free(",
        "dr_model_rank(",
        "dr_model_embed_pool(",
        "dr_last_error_message(",
        "dr_triplet_loss(",
        "dr_ranknet_loss(",
        "dr_kendall_tau(",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if let Ok(out) = std::process::Command::new(&cc)
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/draftrank.h"))
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
