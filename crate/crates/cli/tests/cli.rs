use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rpcodec::io::{read_pgm, write_pgm_file};
use rpcodec::{corpus, Frame};
use tempfile::TempDir;

fn rpcodec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpcodec")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = rpcodec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    rpcodec(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn scene_pgm(dir: &Path, name: &str, index: u64) -> PathBuf {
    let path = dir.join(name);
    write_pgm_file(&corpus::scene(index, 160, 96).frame, &path).unwrap();
    path
}

fn encoded(dir: &Path) -> PathBuf {
    let img = scene_pgm(dir, "in.pgm", 0);
    let hvs = dir.join("in.hvs");
    ok(&["encode", s(&img), s(&hvs), "--qp", "32"]);
    hvs
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constant_image_is_small() {
    let tmp = TempDir::new().unwrap();
    let img = tmp.path().join("flat.pgm");
    write_pgm_file(&Frame::filled(64, 64, 90), &img).unwrap();
    let hvs = tmp.path().join("flat.hvs");
    let stdout = ok(&["encode", s(&img), s(&hvs), "--qp", "32"]);
    assert!(stdout.contains("bytes") && stdout.contains("bpp"));
    assert!(std::fs::metadata(&hvs).unwrap().len() <= 200);
}

#[test]
fn encode_then_standard_decode() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let out = tmp.path().join("std.pgm");
    ok(&["decode", s(&hvs), s(&out)]);
    let frame = read_pgm(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!((frame.width(), frame.height()), (160, 96));
    let src = corpus::scene(0, 160, 96).frame;
    let psnr = rpcodec::metrics::psnr(&frame, &src).unwrap().as_f64();
    assert!(psnr > 30.0, "{psnr}");
}

#[test]
fn png_input_is_accepted() {
    let tmp = TempDir::new().unwrap();
    let png = tmp.path().join("rgb.png");
    // 2x1 RGB: pure red and pure white.
    let img = image_png(&[255, 0, 0, 255, 255, 255], 2, 1);
    std::fs::write(&png, img).unwrap();
    let hvs = tmp.path().join("rgb.hvs");
    ok(&["encode", s(&png), s(&hvs), "--qp", "0"]);
    let out = tmp.path().join("rgb.pgm");
    ok(&["decode", s(&hvs), s(&out)]);
    let frame = read_pgm(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!((frame.width(), frame.height()), (2, 1));
    assert!((frame.get(0, 0) as i32 - 76).abs() <= 3);
    assert!(frame.get(1, 0) >= 250);
}

fn image_png(rgb: &[u8], w: u32, h: u32) -> Vec<u8> {
    let img = image::RgbImage::from_raw(w, h, rgb.to_vec()).unwrap();
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png).unwrap();
    out.into_inner()
}

#[test]
fn zero_strategy_is_gray() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let out = tmp.path().join("zero.pgm");
    ok(&["decode", s(&hvs), s(&out), "--strategy", "zero"]);
    let frame = read_pgm(&std::fs::read(&out).unwrap()).unwrap();
    assert!(frame.samples().iter().all(|&v| v == 128));
}

#[test]
fn perturb_is_deterministic_and_skips_rd() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let (a, b) = (tmp.path().join("a.pgm"), tmp.path().join("b.pgm"));
    let (ta, ts) = (tmp.path().join("a.json"), tmp.path().join("s.json"));
    let args = |out: &Path, timing: &Path| {
        ok(&[
            "decode", s(&hvs), s(out), "--strategy", "perturb", "--sigma", "7", "--seed", "1", "--timing-out", s(timing),
        ])
    };
    args(&a, &ta);
    args(&b, &ta);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rp = json(&ta);
    assert_eq!(rp["rd_ms"], 0.0);
    assert_eq!(rp["strategy"], "perturb");
    assert_eq!(rp["sigma"], 7.0);
    assert_eq!(rp["seed"], 1);
    for key in ["ed_ms", "ip_ms", "lf_ms", "wall_ms"] {
        assert!(rp[key].as_f64().unwrap() >= 0.0, "{key}");
    }

    ok(&["decode", s(&hvs), s(&a), "--timing-out", s(&ts)]);
    let std = json(&ts);
    assert!(std["rd_ms"].as_f64().unwrap() > 0.0);
    assert!(std["sigma"].is_null());
}

#[test]
fn rp_file_matches_generated_series() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let series = tmp.path().join("rp.txt");
    ok(&["rp", s(&series), "--sigma", "5", "--seed", "9"]);
    assert_eq!(std::fs::read_to_string(&series).unwrap().lines().count(), 4096);
    let (a, b) = (tmp.path().join("a.pgm"), tmp.path().join("b.pgm"));
    ok(&["decode", s(&hvs), s(&a), "--strategy", "perturb", "--sigma", "5", "--seed", "9"]);
    ok(&["decode", s(&hvs), s(&b), "--strategy", "perturb", "--rp-file", s(&series)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(code(&["decode", s(&hvs), s(&b), "--rp-file", s(&series)]), 2);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let img = scene_pgm(tmp.path(), "x.pgm", 1);
    let out = tmp.path().join("o");
    assert_eq!(code(&["encode", s(&img), s(&out), "--qp", "52"]), 2);
    assert_eq!(code(&["decode", s(&hvs), s(&out), "--strategy", "residual"]), 2);
    assert_eq!(code(&["decode", s(&hvs), s(&out), "--strategy", "constant:300"]), 2);
    assert_eq!(code(&["decode", s(&hvs), s(&out), "--strategy", "perturb", "--sigma", "0"]), 2);
    assert_eq!(code(&["bench", s(tmp.path()), "--repeats", "0"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn corrupt_container_exits_3() {
    let tmp = TempDir::new().unwrap();
    let hvs = encoded(tmp.path());
    let out = tmp.path().join("o.pgm");
    let bytes = std::fs::read(&hvs).unwrap();

    let bad_magic = tmp.path().join("magic.hvs");
    let mut b = bytes.clone();
    b[0] = b'X';
    std::fs::write(&bad_magic, b).unwrap();
    assert_eq!(code(&["decode", s(&bad_magic), s(&out)]), 3);

    let truncated = tmp.path().join("short.hvs");
    std::fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&["decode", s(&truncated), s(&out)]), 3);

    let missing = tmp.path().join("missing.hvs");
    assert_eq!(code(&["decode", s(&missing), s(&out)]), 1);
}

#[test]
fn bench_rows() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("c");
    std::fs::create_dir(&dir).unwrap();
    let img = scene_pgm(tmp.path(), "x.pgm", 2);
    ok(&["encode", s(&img), s(&dir.join("x.hvs"))]);
    let csv_path = tmp.path().join("bench.csv");
    ok(&["bench", s(&dir), "--repeats", "3", "--out", s(&csv_path)]);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["file", "strategy", "stage", "avg_ms", "min_ms", "max_ms", "reduction_pct"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let stage_rows: Vec<_> = rows.iter().filter(|r| &r[0] == "x.hvs").collect();
    assert_eq!(stage_rows.len(), 8);
    let summary: Vec<_> = rows.iter().filter(|r| &r[0] == "summary").collect();
    assert_eq!(summary.len(), 2);
    let rd = stage_rows.iter().find(|r| &r[1] == "perturb" && &r[2] == "rd").unwrap();
    assert_eq!(rd[3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rd[6], "100.00");
    let std_wall = summary.iter().find(|r| &r[1] == "standard").unwrap();
    assert_eq!(&std_wall[6], "");
    for r in &rows {
        let (avg, min, max): (f64, f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(min <= avg && avg <= max);
    }

    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_ne!(code(&["bench", s(&empty)]), 0);
}

fn write_files(dir: &Path, files: &[(&str, &str)]) {
    std::fs::create_dir_all(dir).unwrap();
    for (name, text) in files {
        std::fs::write(dir.join(name), text).unwrap();
    }
}

#[test]
fn eval_perfect_and_empty() {
    let tmp = TempDir::new().unwrap();
    let (gt, det, none) = (tmp.path().join("gt"), tmp.path().join("det"), tmp.path().join("none"));
    write_files(&gt, &[("a.txt", "0 10 10 20 20\n3 50 50 10 10\n"), ("b.txt", "5 0 0 30 30\n")]);
    write_files(&det, &[("a.txt", "0 0.9 10 10 20 20\n3 0.8 50 50 10 10\n"), ("b.txt", "5 0.7 0 0 30 30\n")]);
    write_files(&none, &[]);
    let classes = tmp.path().join("classes.txt");
    std::fs::write(&classes, "0 bus\n1 microbus\n2 minivan\n3 sedan\n4 suv\n5 truck\n").unwrap();
    let report = tmp.path().join("r.json");
    let stdout = ok(&["eval", s(&gt), s(&det), "--classes", s(&classes), "--json-out", s(&report)]);
    assert!(stdout.contains("mAP@0.50 (%): 100.00"), "{stdout}");
    assert!(stdout.contains("truck"));
    let r = json(&report);
    assert_eq!(r["map"], 1.0);
    assert_eq!(r["images"], 2);
    assert_eq!(r["classes"].as_array().unwrap().len(), 3);

    let stdout = ok(&["eval", s(&gt), s(&none)]);
    assert!(stdout.contains("mAP@0.50 (%): 0.00"), "{stdout}");
}

#[test]
fn eval_errors() {
    let tmp = TempDir::new().unwrap();
    let (gt, det) = (tmp.path().join("gt"), tmp.path().join("det"));
    write_files(&gt, &[("a.txt", "0 10 10 20 20\n")]);
    write_files(&det, &[("a.txt", "0 0.9 10 10 20\n")]);
    let out = rpcodec(&["eval", s(&gt), s(&det)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("a.txt:1:"), "{err}");

    write_files(&det, &[("a.txt", ""), ("orphan.txt", "0 0.9 10 10 20 20\n")]);
    let err = String::from_utf8_lossy(&rpcodec(&["eval", s(&gt), s(&det)]).stderr).into_owned();
    assert!(err.contains("orphan"), "{err}");
    assert_eq!(code(&["eval", s(&gt), s(&det), "--iou", "1.5"]), 2);
}

#[test]
fn batch_tree_and_manifest() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("in");
    std::fs::create_dir(&input).unwrap();
    scene_pgm(&input, "one.pgm", 3);
    scene_pgm(&input, "two.pgm", 4);
    let root = tmp.path().join("out");
    ok(&["batch", s(&input), s(&root), "--sigmas", "1,7", "--seed", "1"]);
    for stem in ["one", "two"] {
        let dir = root.join(stem);
        let mut names: Vec<String> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        let mut want: Vec<String> = ["mode", "partition", "perturb_s1", "perturb_s7", "standard", "zero"]
            .iter()
            .map(|n| format!("{n}.pgm"))
            .collect();
        want.push(format!("{stem}.hvs"));
        want.sort();
        assert_eq!(names, want);
    }
    let mut reader = csv::Reader::from_path(root.join("manifest.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(&r[col("status")], "ok");
        let std: f64 = r[col("psnr_standard")].parse().unwrap();
        let rp: f64 = r[col("psnr_perturb_s7")].parse().unwrap();
        assert!(std > rp, "{std} vs {rp}");
        assert!(r[col("wall_ms_perturb_s1")].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn batch_partial_failure_exits_4() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("in");
    std::fs::create_dir(&input).unwrap();
    scene_pgm(&input, "good.pgm", 5);
    std::fs::write(input.join("bad.pgm"), b"P5\n4 4\n255\nxx").unwrap();
    let root = tmp.path().join("out");
    assert_eq!(code(&["batch", s(&input), s(&root)]), 4);
    assert!(root.join("good").join("standard.pgm").exists());
    let manifest = std::fs::read_to_string(root.join("manifest.csv")).unwrap();
    assert!(manifest.lines().any(|l| l.starts_with("bad.pgm,error,")), "{manifest}");
    assert!(manifest.lines().any(|l| l.starts_with("good.pgm,ok,")));
}
