use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn limitrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limitrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = limitrank(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (v, out.status.code().unwrap())
}

#[test]
fn rank_of_double() {
    let (v, code) = json(&["rank", "double"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rank"], 3);
    assert_eq!(v["oracle"], 3);
}

#[test]
fn verify_double_at_two() {
    let (v, code) = json(&["verify-thm-a", "double", "-p", "2"]);
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert_eq!(r["kernel_count"], 7);
    assert!(r["min_subgroup_rank"].as_u64().unwrap() >= 5);
    for k in r["kernels"].as_array().unwrap() {
        assert_eq!(k["subgroup"]["generators"], 7);
        assert!(k["subgroup"]["abelianization"]["free_rank"].as_u64().unwrap() >= 5);
        assert!(k["audit"]["status"] == "equal" || k["audit"]["status"] == "bound-satisfied");
    }
}

#[test]
fn chi_of_abelian() {
    let (v, code) = json(&["chi", "abelian3"]);
    assert_eq!((v["chi"].as_i64(), code), (Some(0), 0));
    let (v, _) = json(&["chi", "double"]);
    assert_eq!(v["chi"], -2);
}

#[test]
fn abelianization_torsion() {
    let (v, _) = json(&["abelianize", "n4-surface"]);
    assert_eq!(v["abelianization"]["free_rank"], 3);
    assert_eq!(v["abelianization"]["torsion"], serde_json::json!([2]));
}

#[test]
fn json_is_deterministic() {
    for args in [
        &["verify-thm-a", "n4-surface", "-p", "2", "-p", "3", "--format", "json"][..],
        &["audit-cases", "hnn-aa", "-p", "3", "--format", "json"][..],
        &["subgroup", "double", "--hom", "4", "--format", "json"][..],
    ] {
        assert_eq!(limitrank(args).stdout, limitrank(args).stdout);
    }
}

#[test]
fn homs_are_listed_in_order() {
    let (v, _) = json(&["homs", "free2", "-p", "3"]);
    let homs = v["results"][0]["homs"].as_array().unwrap();
    assert_eq!(homs.len(), 4);
    let labels: Vec<u64> = homs.iter().map(|h| h["label"].as_u64().unwrap()).collect();
    assert_eq!(labels, [0, 1, 2, 3]);
    assert_eq!(homs[0]["hom"], serde_json::json!([0, 1]));
}

#[test]
fn subgroup_of_free_group() {
    let (v, code) = json(&["subgroup", "free3", "-p", "5", "--hom", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["subgroup"]["generators"], 11);
    assert_eq!(v["subgroup"]["relators"], 0);
    assert_eq!(v["presentation"]["generators"].as_array().unwrap().len(), 11);
}

#[test]
fn audit_cases_report() {
    let (v, code) = json(&["audit-cases", "hnn-ab", "-p", "2", "-p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    for r in v["results"].as_array().unwrap() {
        for a in r["audits"].as_array().unwrap() {
            assert_eq!(a["audit"]["predicted"], a["audit"]["oracle"]);
            assert_ne!(a["case"]["tag"], "I.2a");
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["rank", "nosuch"][..],
        &["homs", "free2", "-p", "4"][..],
        &["subgroup", "free2", "--hom", "99"][..],
        &["audit-cases", "free2"][..],
        &["frobnicate", "free2"][..],
        &["rank"][..],
        &["rank", "-f", "/nonexistent/file.lg"][..],
    ] {
        let out = limitrank(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn dsl_file_targets() {
    let dir = std::env::temp_dir().join(format!("limitrank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("double.lg");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# two copies of F2 glued along a^2 b a^-1 b^-1").unwrap();
    writeln!(f, "L := free(2)").unwrap();
    writeln!(f, "R := free(2)").unwrap();
    writeln!(f, "D := amalgam(L, R; wl = a^2 b a^-1 b^-1; wr = a^2 b a^-1 b^-1)").unwrap();
    writeln!(f, "E := hnn(D; w1 = a1; w2 = b2)").unwrap();
    drop(f);
    let p = path.to_str().unwrap();
    let (v, code) = json(&["rank", "D", "-f", p]);
    assert_eq!((v["rank"].as_u64(), code), (Some(3), 0));
    let (v, _) = json(&["present", "-f", p]);
    assert_eq!(v["target"], "E");
    assert_eq!(v["presentation"]["generators"].as_array().unwrap().len(), 5);
    let (v, code) = json(&["verify-thm-a", "E", "-f", p, "-p", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["kernel_count"], 7);
    assert_eq!(limitrank(&["rank", "Q", "-f", p]).status.code(), Some(2));

    let bad = dir.join("bad.lg");
    std::fs::write(&bad, "G := free(2)\nH := amalgam(G, G; wl = a b; wr = c)\n").unwrap();
    let out = limitrank(&["rank", "-f", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_digest() {
    let out = limitrank(&["verify-thm-a", "double", "-p", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p = 3: 13 kernel(s)"), "{text}");
}

#[test]
fn selftest_passes() {
    let out = limitrank(&["selftest", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 20);
}
