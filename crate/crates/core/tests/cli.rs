use std::path::PathBuf;

use forge::cli::run_cli_with;

fn data(name: &str) -> String {
    format!("{}/tests/data/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn forge(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("forge").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn documented_examples() {
    let (code, out, _) = forge(&["sgp", "equal", "--machine", &data("m_par.mm"), "--w1", "q1 a1 a2 A1 A2", "--w2", "q2 a2 A1 A2"]);
    assert_eq!((code, out.trim()), (0, "Yes"));
    let (code, out, _) = forge(&["machine", "run", "--in", &data("m_dec.mm"), "--config", "(1;3,0)", "--max", "100"]);
    assert_eq!(code, 0);
    assert!(out.contains("Accepted"), "{}", out);
    let (code, out, _) = forge(&["eq", "distort", "--pres", &data("z2.grp"), "--nmax", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n\tarea\tdlen\tstatus");
    let ns: Vec<&str> = lines[1..].iter().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ns, ["1", "2", "3"]);
    let areas: Vec<&str> = lines[1..].iter().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(areas, ["1", "4", "9"]);
}

#[test]
fn answers_map_to_exit_codes() {
    let (code, out, _) = forge(&["sgp", "equal", "--machine", &data("m_par.mm"), "--w1", "q1 a1 A1 A2", "--w2", "q1 a1 a1 A1 A2"]);
    assert_eq!((code, out.trim()), (0, "No"));
    // Budgets too small to decide leave the answer open.
    let (code, out, _) = forge(&["machine", "equiv", "--in", &data("m_par.mm"), "--c1", "(1;1,0)", "--c2", "(1;5,0)", "--budget-nodes", "2"]);
    assert_eq!((code, out.trim()), (2, "Unknown"));
    let bs = scratch("bs12.grp");
    std::fs::write(&bs, "group\ngen x y\nrel x y x^-1 y^-2\n").unwrap();
    let (code, _, _) = forge(&["rw", "decide", "--pres", bs.to_str().unwrap(), "--w1", "x", "--w2", "y x", "--budget-nodes", "1", "--quotient-cap", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn bad_invocations_fail() {
    let (code, _, err) = forge(&["machine", "run", "--in", &data("m_dec.mm"), "--config", "(1;3,0)", "--bogus"]);
    assert_eq!(code, 1);
    assert!(err.contains("--bogus"));
    let (code, _, _) = forge(&["machine", "run", "--in", &data("m_dec.mm"), "--config", "(1;3,0)", "--budget-nodes", "0"]);
    assert_eq!(code, 1);
    let (code, _, _) = forge(&["machine", "validate", "--in", &data("missing.mm")]);
    assert_eq!(code, 1);
    let bad = scratch("bad.mm");
    std::fs::write(&bad, "minsky glasses=2\ncmd 1 sub 3 -> 0\n").unwrap();
    let (code, _, err) = forge(&["machine", "validate", "--in", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("out of range"), "{}", err);
    let (code, out, _) = forge(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn bundles_verify_and_tampering_is_caught() {
    let path = scratch("sep.json");
    let p = path.to_str().unwrap();
    let (code, _, err) = forge(&["sgp", "separate", "--machine", &data("m_par.mm"), "--w1", "q1 a1 a1 A1 A2", "--w2", "q1 a1 A1 A2", "--out", p]);
    assert_eq!(code, 0, "{}", err);
    let (code, out, _) = forge(&["verify", p]);
    assert_eq!(code, 0, "{}", out);
    assert!(out.starts_with("PASS"));

    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let cell = &mut json["items"][0]["certificate"]["quotient"]["table"][0][0];
    let old = cell.as_u64().unwrap();
    *cell = serde_json::json!((old + 1) % 3);
    let tampered = scratch("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&json).unwrap()).unwrap();
    let (code, out, _) = forge(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL") && out.contains("cell (0, 0)"), "{}", out);

    let empty = scratch("empty.json");
    std::fs::write(&empty, "").unwrap();
    let (code, out, _) = forge(&["verify", empty.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("0/0"), "{}", out);

    std::fs::write(&empty, "{not json").unwrap();
    assert_eq!(forge(&["verify", empty.to_str().unwrap()]).0, 1);
}

#[test]
fn other_certificates_verify() {
    let runs: [(&str, Vec<String>); 4] = [
        ("rw.json", vec!["rw".into(), "decide".into(), "--pres".into(), data("z2.grp"), "--w1".into(), "x y".into(), "--w2".into(), "y x".into()]),
        ("rw_no.json", vec!["rw".into(), "decide".into(), "--pres".into(), data("z2.grp"), "--w1".into(), "x".into(), "--w2".into(), "y".into()]),
        ("eq.json", vec!["eq".into(), "express".into(), "--pres".into(), data("z2.grp"), "--word".into(), "[x^2,y]".into()]),
        ("depth.json", vec!["sgp".into(), "depth".into(), "--machine".into(), data("m_par.mm"), "--input".into(), "(1;3,0)".into(), "--d".into(), "3".into()]),
    ];
    for (name, args) in runs {
        let path = scratch(name);
        let mut argv: Vec<&str> = args.iter().map(String::as_str).collect();
        argv.extend(["--out", path.to_str().unwrap()]);
        let (code, _, err) = forge(&argv);
        assert_eq!(code, 0, "{}: {}", name, err);
        let (code, out, _) = forge(&["verify", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{}: {}", name, out);
        assert!(out.contains("1/1"), "{}: {}", name, out);
    }
    // Past the co-time no witness exists.
    let (code, _, _) = forge(&["sgp", "depth", "--machine", &data("m_par.mm"), "--input", "(1;3,0)", "--d", "4"]);
    assert_eq!(code, 1);
}

#[test]
fn reports_are_deterministic() {
    let cases: [Vec<String>; 3] = [
        vec!["grp".into(), "check".into(), "--machine".into(), data("m_par.mm"), "--samples".into(), "8".into(), "--seed".into(), "7".into()],
        vec!["eq".into(), "distort".into(), "--pres".into(), data("z2.grp"), "--nmax".into(), "2".into(), "--jobs".into(), "2".into()],
        vec!["sgp".into(), "build".into(), "--machine".into(), data("m_par.mm")],
    ];
    for args in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = forge(&argv);
        assert_eq!(first.0, 0, "{:?}: {}", argv, first.2);
        assert_eq!(forge(&argv), first, "{:?}", argv);
    }
}
