use ratact::actions::{action_to_json, build_action, example_counterexample_surface, example_ptorsion, verify_action};
use ratact::cli::{run, Outcome};
use ratact::field::Field;
use ratact::groupscheme::{descriptor_to_json, parse_descriptor, GroupSchemeDescriptor};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    let mut full = vec!["ratact"];
    full.extend_from_slice(args);
    run(full)
}

fn machine(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--machine"];
    full.extend_from_slice(args);
    let out = cli(&full);
    let v = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {out:?}"));
    (out.code, v)
}

fn group_text(g: &GroupSchemeDescriptor) -> String {
    descriptor_to_json(g).to_string()
}

#[test]
fn output_is_deterministic() {
    let g = r#"{"p":3,"type":"young","rows":[2],"mu":1}"#;
    for args in [
        vec!["build", "--group", g, "--vars", "x,y,z"],
        vec!["info", "--group", g],
        vec!["--machine", "info", "--group", g],
        vec!["young-join", "3,1", "2,2", "1,1,1"],
    ] {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a, b);
        assert_eq!(a.code, 0, "{a:?}");
    }
}

#[test]
fn built_actions_round_trip_and_verify() {
    let mut groups: Vec<(GroupSchemeDescriptor, Vec<&str>)> = Vec::new();
    for p in [2, 3] {
        groups.push((GroupSchemeDescriptor::height_one(p, vec![1], 0).unwrap(), vec!["x"]));
        groups.push((GroupSchemeDescriptor::height_one(p, vec![], 1).unwrap(), vec!["x"]));
        groups.push((GroupSchemeDescriptor::height_one(p, vec![1, 1], 1).unwrap(), vec!["x", "y", "z"]));
        groups.push((GroupSchemeDescriptor::height_one(p, vec![2], 0).unwrap(), vec!["x", "y"]));
        groups.push((GroupSchemeDescriptor::ker_f_minus_v(p, 2).unwrap(), vec!["x"]));
    }
    groups.push((GroupSchemeDescriptor::height_one(2, vec![3], 0).unwrap(), vec!["x", "y", "z"]));
    groups.push((GroupSchemeDescriptor::height_one(2, vec![2, 1], 0).unwrap(), vec!["x", "y", "z"]));
    groups.push((GroupSchemeDescriptor::ker_f_minus_v(2, 3).unwrap(), vec!["x"]));
    groups.push((GroupSchemeDescriptor::ker_f2_minus_v(2).unwrap(), vec!["x"]));
    groups.push((example_counterexample_surface(2, "x", "y").unwrap().group, vec!["x", "y"]));
    for (g, vars) in groups {
        let gt = group_text(&g);
        let vs = vars.join(",");
        let built = cli(&["build", "--group", &gt, "--vars", &vs]);
        assert_eq!(built.code, 0, "{gt}: {built:?}");
        let file: Value = serde_json::from_str(&built.stdout).unwrap();
        assert_eq!(parse_descriptor(&file["group"].to_string()).unwrap(), g);
        let (code, report) = machine(&["verify", "--action", &built.stdout]);
        assert_eq!(code, 0, "{gt}: {report}");
        assert_eq!(report["status"], "pass");
        assert_eq!(report["faithful"], true);
        assert_eq!(report["generically_free"], true);
    }
}

#[test]
fn build_action_matches_the_command() {
    let k = Field::new(3, &["u", "v"]).unwrap();
    let g = GroupSchemeDescriptor::height_one(3, vec![2], 0).unwrap();
    let a = build_action(&k, &g, &[0, 1]).unwrap();
    assert!(verify_action(&a).passed());
    let out = cli(&["build", "--group", &group_text(&g), "--vars", "u,v"]);
    let file: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(file, action_to_json(&a));
}

#[test]
fn info_on_the_two_step_kernel() {
    let (code, v) = machine(&["info", "--group", r#"{"p":2,"type":"kerFV","n":2}"#]);
    assert_eq!(code, 0);
    assert_eq!(v["lie_dim"], 1);
    assert_eq!(v["socle_name"], "α_p");
    assert_eq!(v["min_action_dimension"], 1);
    assert_eq!(v["frobenius_height"], 2);
    let human = cli(&["info", "--group", r#"{"p":2,"type":"kerFV","n":2}"#]);
    assert!(human.stdout.contains("socle: α_p"));
    assert!(human.stdout.contains("min dimension of a generically free action: 1"));
}

#[test]
fn build_reports_too_few_variables() {
    let out = cli(&[
        "build",
        "--group",
        r#"{"p":2,"type":"young","rows":[3,2],"mu":0}"#,
        "--vars",
        "a,b,c,d",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("dimension too small"), "{out:?}");
    let (code, v) = machine(&["build", "--group", r#"{"p":2,"type":"young","rows":[3,2],"mu":0}"#, "--vars", "a,b,c,d"]);
    assert_eq!(code, 1);
    assert_eq!(v["kind"], "DimensionTooSmall");
}

#[test]
fn corrupted_action_fails_verification() {
    let a = example_ptorsion(2, 2, "t").unwrap();
    let mut file = action_to_json(&a);
    file["assignment"]["U2"] = Value::String("1 * d[t]^[2]".into());
    let text = file.to_string();
    let out = cli(&["verify", "--action", &text]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("FAIL"), "{}", out.stdout);
    let (code, v) = machine(&["verify", "--action", &text]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "fail");
    let witnesses: Vec<&Value> = v["relation_checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| &c["witness"])
        .collect();
    assert!(!witnesses.is_empty());
    assert!(witnesses.iter().all(|w| w.is_string()));
}

#[test]
fn parse_errors_carry_a_position() {
    let out = cli(&["info", "--group", "{\"p\": 2,\n \"type\": young}"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{out:?}");
    assert!(out.stderr.contains("column"), "{out:?}");
    let bad_op = r#"{"p":2,"variables":["t"],"group":{"p":2,"type":"young","rows":[1],"mu":0},"assignment":{"U1":"1 * d[t]^[1 +"}}"#;
    let out = cli(&["verify", "--action", bad_op]);
    assert_eq!(out.code, 2, "{out:?}");
    assert!(out.stderr.contains("column"), "{out:?}");
}

#[test]
fn usage_errors_and_budgets() {
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["--help"]).code, 0);
    let out = cli(&["info", "--group", r#"{"p":11,"type":"young","rows":[1],"mu":0}"#]);
    assert_eq!(out.code, 2);
    let out = cli(&["--budget-p", "11", "info", "--group", r#"{"p":11,"type":"young","rows":[1],"mu":0}"#]);
    assert_eq!(out.code, 0, "{out:?}");
    assert!(out.stderr.starts_with("warning:"));
    let out = cli(&["build", "--group", r#"{"p":2,"type":"young","rows":[1],"mu":0}"#, "--vars", "a,b,c,d,e"]);
    assert_eq!(out.code, 2);
}

#[test]
fn young_join_command() {
    assert_eq!(cli(&["young-join", "3,1", "2,2"]).stdout, "(3,2)\n");
    let (_, v) = machine(&["young-join", "1", "1,1,1"]);
    assert_eq!(v["diagram"], serde_json::json!([1, 1, 1]));
    assert_eq!(cli(&["young-join", "1,x"]).code, 2);
}

#[test]
fn solve_command() {
    let sys = r#"{"p":2,"variables":["t"],"equations":[{"operator":"1 * d[t]^[1]","rhs":"1","order_exponent":1,"reduction":"X1^2"}]}"#;
    let (code, v) = machine(&["solve", "--system", sys]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "solved");
    assert_eq!(v["checks"][0]["passed"], true);
    let bad = r#"{"p":2,"variables":["t"],"equations":[{"operator":"1 * d[t]^[1]","rhs":"1","order_exponent":1,"reduction":"X1"}]}"#;
    let (code, v) = machine(&["solve", "--system", bad]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "incompatible");
}

#[test]
fn join_and_extend_commands() {
    let g1 = r#"{"p":2,"type":"young","rows":[1],"mu":0}"#;
    let a = cli(&["build", "--group", g1, "--vars", "x"]).stdout;
    let out = cli(&["extend", "--action", &a, "--group", r#"{"p":2,"type":"kerFV","n":2}"#]);
    assert_eq!(out.code, 0, "{out:?}");
    assert_eq!(cli(&["verify", "--action", &out.stdout]).code, 0);

    let dir = std::env::temp_dir().join(format!("ratact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f1 = dir.join("a.json");
    let f2 = dir.join("b.json");
    let b1 = r#"{"p":2,"variables":["x","y"],"group":{"p":2,"type":"young","rows":[1],"mu":0},"assignment":{"U1":"1 * d[x]^[1]"}}"#;
    let b2 = r#"{"p":2,"variables":["x","y"],"group":{"p":2,"type":"young","rows":[1],"mu":0},"assignment":{"U1":"1 * d[y]^[1]"}}"#;
    std::fs::write(&f1, b1).unwrap();
    std::fs::write(&f2, b2).unwrap();
    let list = format!("{},{}", f1.display(), f2.display());
    let out = cli(&["join", "--actions", &list]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(out.code, 0, "{out:?}");
    let file: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(file["group"]["rows"], serde_json::json!([1]));
    assert_eq!(cli(&["verify", "--action", &out.stdout]).code, 0);
}
