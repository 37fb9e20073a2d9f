use std::io::{Read, Write};
use std::net::TcpListener;

use mesozeta::specialfn::EvaluationPrecision;
use mesozeta::zeros::{
    count_n, fetch_zero_table, find_zeros, locate_sign_changes, parse_zero_table, read_binary, read_table, s_of_t,
    turing_certify, verify_cached_source, write_binary, write_table, SourceEntry, SourceRegistry,
};
use mesozeta::Error;
use proptest::prelude::*;

const FIRST_TEN: [f64; 10] = [
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739189,
    37.586178158825671,
    40.918719012147495,
    43.327073280914999,
    48.005150881167159,
    49.773832477672302,
];

#[test]
fn first_hundred_height() {
    let table = find_zeros(0.0, 100.0, &EvaluationPrecision::default()).unwrap();
    assert_eq!(table.len(), 29);
    assert!(table.certified());
    for (g, want) in table.ordinates().iter().zip(FIRST_TEN) {
        assert!((g - want).abs() < 1e-8, "{g} vs {want}");
    }
    assert_eq!(count_n(&table, 100.0).unwrap(), 29);
    assert_eq!(count_n(&table, 14.0).unwrap(), 0);
}

#[test]
fn certify_low_heights() {
    let mut table = find_zeros(0.0, 100.0, &EvaluationPrecision::default()).unwrap();
    assert_eq!(turing_certify(&mut table, 100.0).unwrap(), 29);
    assert_eq!(turing_certify(&mut table, 14.0).unwrap(), 0);
}

#[test]
fn agrees_with_fine_grid_scan() {
    let table = find_zeros(0.0, 600.0, &EvaluationPrecision::default()).unwrap();
    let grid = locate_sign_changes(1.0, 600.0, 0.005);
    assert_eq!(grid.len(), table.len());
    for (g, r) in table.ordinates().iter().zip(&grid) {
        assert!((g - r).abs() < 1e-8, "{g} vs {r}");
    }
}

#[test]
fn window_away_from_origin() {
    let prec = EvaluationPrecision::default();
    let whole = find_zeros(0.0, 1200.0, &prec).unwrap();
    let part = find_zeros(900.0, 1100.0, &prec).unwrap();
    let expected = whole.slice(900.0, 1100.0).unwrap();
    assert_eq!(part.zeros_below(), expected.zeros_below());
    assert_eq!(part.len(), expected.len());
    for (a, b) in part.ordinates().iter().zip(expected.ordinates()) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn s_stays_small_to_two_thousand() {
    let table = find_zeros(0.0, 2000.0, &EvaluationPrecision::default()).unwrap();
    let mut t = 0.5;
    while t <= 2000.0 {
        assert!(s_of_t(&table, t).unwrap().abs() < 2.0, "S({t})");
        t += 0.37;
    }
}

#[test]
fn ingested_agrees_with_computed() {
    let computed = find_zeros(0.0, 300.0, &EvaluationPrecision::default()).unwrap();
    let text: String = computed.ordinates().iter().map(|g| format!("{g:.12}\n")).collect();
    let ingested = parse_zero_table(text.as_bytes(), 0.0).unwrap();
    let mut t = 1.0;
    while t < ingested.t_max() {
        if computed.ordinates().iter().all(|g| (g - t).abs() > 1e-9) {
            assert_eq!(count_n(&computed, t).unwrap(), count_n(&ingested, t).unwrap());
        }
        t += 0.71;
    }
}

#[test]
fn table_round_trip_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ztbl");
    let table = find_zeros(0.0, 100.0, &EvaluationPrecision::default()).unwrap();
    write_table(&table, &path).unwrap();
    let back = read_table(&path).unwrap();
    assert_eq!(back.t_max(), 100.0);
    assert!(back.certified());
    assert_eq!(back.ordinates(), table.ordinates());
}

proptest! {
    #[test]
    fn binary_round_trip_is_bit_exact(base in prop_oneof![Just(0.0), 1.0e6..1.0e8f64],
                                      steps in prop::collection::vec(1e-6..3.0f64, 0..200)) {
        let mut ordinates = Vec::with_capacity(steps.len());
        let mut g = base + 0.25;
        for s in steps {
            g += s;
            ordinates.push(g);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.ztbl");
        write_binary(&ordinates, base, &path).unwrap();
        let back = read_binary(&path).unwrap();
        prop_assert_eq!(back.len(), ordinates.len());
        for (a, b) in back.iter().zip(&ordinates) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

fn serve_once(body: &'static [u8]) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        if let Ok((mut stream, _)) = listener.accept() {
            let mut buf = [0u8; 2048];
            let _ = stream.read(&mut buf);
            let head = format!("HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len());
            let _ = stream.write_all(head.as_bytes());
            let _ = stream.write_all(body);
        }
    });
    format!("http://{addr}/zeros1")
}

#[test]
fn fetch_then_serve_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mut reg = SourceRegistry::empty();
    let url = serve_once(b"14.134725142\n21.022039639\n25.010857580\n");
    reg.insert("local", SourceEntry { url, sha256: None, base: 0.0 });
    let first = fetch_zero_table(&reg, "local", dir.path()).unwrap();
    assert_eq!(first.len(), 3);
    // the server accepted a single connection; a second fetch must be served locally
    let second = fetch_zero_table(&reg, "local", dir.path()).unwrap();
    assert_eq!(first.ordinates(), second.ordinates());
    assert_eq!(verify_cached_source(&reg, "local", dir.path()).unwrap(), 3);

    let binary = dir.path().join("local.ztbl");
    let mut bytes = std::fs::read(&binary).unwrap();
    bytes[28] ^= 0x10;
    std::fs::write(&binary, bytes).unwrap();
    assert!(matches!(verify_cached_source(&reg, "local", dir.path()), Err(Error::ChecksumMismatch { .. })));
}

#[test]
fn tampered_raw_text_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut reg = SourceRegistry::empty();
    let url = serve_once(b"14.134725142\n21.022039639\n");
    reg.insert("local", SourceEntry { url, sha256: None, base: 0.0 });
    fetch_zero_table(&reg, "local", dir.path()).unwrap();
    std::fs::write(dir.path().join("local.txt"), b"14.134725142\n21.022039640\n").unwrap();
    assert!(matches!(fetch_zero_table(&reg, "local", dir.path()), Err(Error::ChecksumMismatch { .. })));
}

#[test]
fn pinned_digest_mismatch_on_download() {
    let dir = tempfile::tempdir().unwrap();
    let mut reg = SourceRegistry::empty();
    let url = serve_once(b"14.134725142\n");
    reg.insert("local", SourceEntry { url, sha256: Some("00".repeat(32)), base: 0.0 });
    assert!(matches!(fetch_zero_table(&reg, "local", dir.path()), Err(Error::ChecksumMismatch { .. })));
}
