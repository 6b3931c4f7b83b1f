use std::collections::BTreeSet;
use std::process::{Command, Output};

use tilescope::analyze::{analyze, AnalysisReport, AnalyzeOptions};
use tilescope::render::{render, tower, Format, Tower};
use tilescope::search::{search, search_records, SearchOptions, SetRecord, Status};
use tilescope::{exit, to_json};
use tilescope_core::Rational;

fn tilescope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilescope"))
        .args(args)
        .env("TILESCOPE_WORKERS", "2")
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(
        tilescope(&["analyze", "-b", "4", "-d", "0,1,8,9"])
            .status
            .code(),
        Some(exit::OK)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "4", "-d", "0,1,2,5"])
            .status
            .code(),
        Some(exit::OK)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "4", "-d", "0,1,x"])
            .status
            .code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "4", "-d", "0,1,2"])
            .status
            .code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "1", "-d", "0"]).status.code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "4"]).status.code(),
        Some(exit::USAGE)
    );
    assert_eq!(
        tilescope(&["analyze", "-b", "4", "-d", "0,1,32,33", "--mmax", "1"])
            .status
            .code(),
        Some(exit::INCONCLUSIVE)
    );
    assert_eq!(
        tilescope(&["search", "-b", "13", "--bound", "20"])
            .status
            .code(),
        Some(exit::USAGE)
    );
}

#[test]
fn json_report_round_trips() {
    for (b, d) in [
        (12, vec![0, 1, 4, 8, 9, 17, 25, 33, 41, 72, 76, 80]),
        (4, vec![0, 1, 2, 5]),
        (2, vec![0, 1]),
    ] {
        let report = analyze(b, &d, &AnalyzeOptions::default()).unwrap();
        let text = to_json(&report).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        let digits = d.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        let out = tilescope(&["analyze", "-b", &b.to_string(), "-d", &digits, "--json"]);
        let parsed: AnalysisReport = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(parsed, report);
    }
}

#[test]
fn report_is_internally_consistent() {
    let r = analyze(2, &[0, 1], &AnalyzeOptions::default()).unwrap();
    assert!(r.tile.is_tile);
    assert_eq!(r.stabilization.as_ref().unwrap().m, Some(1));
    let j = r.tiling_set.as_ref().unwrap();
    assert_eq!((j.period, j.residues.clone()), (1, vec![0]));
    assert_eq!(r.measure, Some(Rational::from_integer(1)));
    assert_eq!(r.measure.unwrap(), j.density.recip());
    assert_eq!(
        r.parts[0].spectrum.as_ref().unwrap().numerators(),
        vec![0, 1]
    );

    let r = analyze(4, &[0, 1, 2, 5], &AnalyzeOptions::default()).unwrap();
    assert!(!r.tile.is_tile);
    assert!(r.decomposition.is_none() && r.stabilization.is_none() && r.an_lai.is_none());
}

#[test]
fn text_summary_mentions_verdict() {
    let out = tilescope(&["analyze", "-b", "4", "-d", "0,1,8,9"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tile"));
}

fn tiles(records: &[SetRecord]) -> BTreeSet<Vec<i64>> {
    records
        .iter()
        .filter(|r| r.tile)
        .map(|r| r.digits.clone())
        .collect()
}

#[test]
fn binary_search_finds_only_standard_sets() {
    let records = search_records(&SearchOptions::new(2, 10)).unwrap();
    // with gcd 1 the only normalized pair is {0, 1}
    assert_eq!(tiles(&records), BTreeSet::from([vec![0, 1]]));
}

#[test]
fn ternary_tiles_are_complete_residue_systems() {
    let records = search_records(&SearchOptions::new(3, 15)).unwrap();
    for r in &records {
        let residues: BTreeSet<i64> = r.digits.iter().map(|d| d % 3).collect();
        assert_eq!(r.tile, residues.len() == 3, "{:?}", r.digits);
    }
    assert!(records.iter().any(|r| r.tile) && records.iter().any(|r| !r.tile));
}

#[test]
fn base_four_search_has_no_violations() {
    let mut options = SearchOptions::new(4, 20);
    options.max_m = 6;
    let (summary, records) = search(&options).unwrap();
    assert!(summary.violations.is_empty());
    assert_eq!(summary.inconclusive, 0);
    assert_eq!(summary.sets, records.len() as u64);
    assert_eq!(summary.tiles + summary.non_tiles, summary.sets);
    assert!(summary.max_observed_m.unwrap() <= 6);
    assert_eq!(summary.m_histogram.values().sum::<u64>(), summary.tiles);
    assert!(records
        .iter()
        .filter(|r| r.tile)
        .all(|r| r.status == Status::Tile));
    assert!(records.windows(2).all(|w| w[0].digits < w[1].digits));
}

#[test]
fn search_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let out = tilescope(&[
        "search",
        "-b",
        "3",
        "--bound",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let text = std::fs::read_to_string(&path).unwrap();
    let records: Vec<SetRecord> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records, search_records(&SearchOptions::new(3, 9)).unwrap());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["sets"], records.len());
}

#[test]
fn work_cap_is_enforced() {
    let out = tilescope(&["search", "-b", "8", "--bound", "40", "--work-cap", "1000"]);
    assert_eq!(out.status.code(), Some(exit::USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("work cap"));
}

#[test]
fn render_json_binary_interval() {
    let t = tower(2, &[0, 1], 3).unwrap();
    assert_eq!(t.levels.len(), 4);
    assert!(t
        .levels
        .iter()
        .all(|l| l.intervals.len() == 1 && l.length == [1, 1]));
    let text = render(2, &[0, 1], 3, Format::Json, 800, 400).unwrap();
    let back: Tower = serde_json::from_str(&text).unwrap();
    assert_eq!(back, t);
}

#[test]
fn render_product_form_stays_at_two_intervals() {
    let t = tower(4, &[0, 1, 8, 9], 4).unwrap();
    for l in &t.levels[1..] {
        assert_eq!(l.intervals, vec![[0, 1, 1, 1], [2, 1, 3, 1]]);
        assert_eq!(l.length, [2, 1]);
    }
}

#[test]
fn render_non_tile_shrinks() {
    let t = tower(4, &[0, 1, 2, 5], 3).unwrap();
    let len = |l: &[i64; 2]| Rational::new(l[0], l[1]);
    assert!(len(&t.levels[3].length) < Rational::from_integer(1));
    assert!(t
        .levels
        .windows(2)
        .all(|w| len(&w[1].length) <= len(&w[0].length)));
}

#[test]
fn render_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tower.svg");
    let out = tilescope(&[
        "render",
        "-b",
        "4",
        "-d",
        "0,1,8,9",
        "-k",
        "4",
        "--format",
        "svg",
        "--width",
        "640",
        "--height",
        "320",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(exit::OK));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"width="640" height="320""#));
    assert_eq!(svg.matches("<g ").count(), 5);
}
