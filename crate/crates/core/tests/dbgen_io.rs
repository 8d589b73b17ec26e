use formred::dbgen::{
    build_record, compare_stats, enumerate_ngons, generate, julia_com_report, max_distance, read_db,
    write_db, CentroidHeight, CompareConvention, LatticeConfig, Metric, NGonRecord,
};
use formred::reduce::TieRule;
use formred::Error;

fn collect(cfg: &LatticeConfig, workers: usize) -> Vec<String> {
    let mut lines = Vec::new();
    generate(cfg, workers, |r| {
        lines.push(r.to_json_line());
        Ok(())
    })
    .unwrap();
    lines
}

#[test]
fn jsonl_round_trip() {
    let cfg = LatticeConfig::new(4, 3).unwrap();
    let points = cfg.points();
    let records: Vec<NGonRecord> = enumerate_ngons(&points, 3)
        .take(300)
        .map(|r| build_record(&r).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db.jsonl");
    write_db(&records, &path).unwrap();
    let back = read_db(&path).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!(a.roots, b.roots);
        assert_eq!(a.coeffs, b.coeffs);
        for (x, y) in [(a.com.0, b.com.0), (a.com.1, b.com.1), (a.hyp.0, b.hyp.0), (a.hyp.1, b.hyp.1)] {
            assert!((x - y).abs() <= 5e-7, "{x} vs {y}");
        }
        assert_eq!(b.to_json_line(), a.to_json_line());
    }
}

#[test]
fn corrupted_line_is_reported_with_its_number() {
    let cfg = LatticeConfig::new(3, 3).unwrap();
    let mut lines = collect(&cfg, 1);
    lines.truncate(5);
    lines[3] = lines[3].replace("\"coeffs\"", "\"coefs\"");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, lines.join("\n")).unwrap();
    match read_db(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
    // a truncated line and a wrong coefficient count are both rejected
    assert!(NGonRecord::from_json_line(&lines[0][..lines[0].len() - 3]).is_err());
    let short = lines[0].replacen("[\"1\",", "[", 1);
    assert!(NGonRecord::from_json_line(&short).is_err());
}

#[test]
fn generation_is_identical_across_worker_counts() {
    let cfg = LatticeConfig::new(4, 3).unwrap();
    let one = collect(&cfg, 1);
    assert_eq!(one.len(), 969);
    for workers in [2, 3, 8] {
        assert_eq!(collect(&cfg, workers), one, "workers = {workers}");
    }
}

#[test]
fn experiments_are_identical_across_worker_counts() {
    let cfg = LatticeConfig::new(4, 5).unwrap();
    let conv = CompareConvention::default();
    let a = compare_stats(&cfg, &conv, 1).unwrap();
    let b = compare_stats(&cfg, &conv, 4).unwrap();
    assert_eq!(a, b);
    let small = LatticeConfig::new(5, 3).unwrap();
    let (ra, da) = max_distance(&small, Metric::Hyperbolic, CentroidHeight::Centroid, 1).unwrap();
    let (rb, db) = max_distance(&small, Metric::Hyperbolic, CentroidHeight::Centroid, 3).unwrap();
    assert_eq!((ra.roots, da.to_bits()), (rb.roots, db.to_bits()));
    let ja = julia_com_report(&cfg, TieRule::default(), 1).unwrap();
    let jb = julia_com_report(&cfg, TieRule::default(), 3).unwrap();
    assert_eq!(ja, jb);
}
