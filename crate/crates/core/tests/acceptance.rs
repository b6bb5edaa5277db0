//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;
use skelforge::pipeline::{parse_pipeline, serialize_pipeline};

use common::{code, json, skelforge};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)*));
        }
    };
}

fn runner(cases: u32) -> TestRunner {
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, rng)
}

fn fail_ids(report: &Value) -> Vec<String> {
    report["findings"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|f| f["severity"] == "fail")
        .map(|f| f["check"].as_str().unwrap_or_default().to_string())
        .collect()
}

fn round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let new = skelforge(
        dir.path(),
        &["new", "--name", "alpha", "--ci", "both", "--dest", "out"],
    );
    let audit = skelforge(dir.path(), &["audit", "out", "--format", "json"]);
    let elapsed = start.elapsed();
    ensure!(code(&new) == 0, "new exited {}", code(&new));
    ensure!(code(&audit) == 0, "audit exited {}", code(&audit));
    let report = json(&audit);
    ensure!(
        report["score"].as_f64() == Some(1.0),
        "score {}",
        report["score"]
    );
    let fails = fail_ids(&report);
    ensure!(
        fails.is_empty() && report["checks_failed"] == 0,
        "failed checks {fails:?}"
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("exit 0, score 1.0, 0 failed, {elapsed:.2?}"))
}

fn rename_hygiene() -> Outcome {
    let mut runner = runner(1);
    let strategy = common::project_name();
    let mut names = BTreeSet::new();
    while names.len() < 100 {
        names.insert(strategy.new_tree(&mut runner).unwrap().current());
    }
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    for name in &names {
        let out = skelforge(dir.path(), &["new", "--name", name]);
        ensure!(code(&out) == 0, "new --name {name} exited {}", code(&out));
        let hits = common::scan_dir(&dir.path().join(name), "bertha");
        ensure!(hits.is_empty(), "{name}: {hits:?}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{} names, 0 occurrences, {elapsed:.2?}",
        names.len()
    ))
}

fn catalog_fidelity() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = skelforge(dir.path(), &["practices", "list", "--format", "json"]);
    ensure!(code(&out) == 0, "exit {}", code(&out));
    let actual = json(&out);
    let golden: Value =
        serde_json::from_str(&fs::read_to_string(common::fixture("table1.json")).unwrap()).unwrap();
    let (actual, golden) = (actual.as_array().unwrap(), golden.as_array().unwrap());
    ensure!(actual.len() == 16, "{} practices", actual.len());
    ensure!(
        actual.len() == golden.len(),
        "fixture has {} rows",
        golden.len()
    );
    let mut groups: Vec<&Value> = actual.iter().map(|p| &p["group"]).collect();
    groups.dedup();
    ensure!(groups.len() == 7, "{} groups", groups.len());
    for (a, g) in actual.iter().zip(golden) {
        for key in ["group", "name", "candidates", "selected"] {
            ensure!(
                a[key] == g[key],
                "{}: {key} is {} but table says {}",
                a["id"],
                a[key],
                g[key]
            );
        }
    }
    Ok("16 practices, 7 groups, matches the fixture".into())
}

/// Presence-checked files of a project generated as `alpha`, with the
/// check that must fail when the file is deleted.
const MUTATIONS: [(&str, &str); 12] = [
    ("README.md", "DOC-README"),
    ("CHANGELOG.md", "DOC-CHANGELOG"),
    ("CONTRIBUTING.md", "DOC-CONTRIBUTING"),
    ("CODE_OF_CONDUCT.md", "DOC-CODE-OF-CONDUCT"),
    ("TUTORIAL.md", "DOC-TUTORIAL"),
    ("Doxyfile", "DOC-APIREF-CONFIG"),
    ("LICENSE", "LIC-FILE"),
    (".clang-format", "FMT-CONFIG"),
    ("CMakeLists.txt", "BUILD-TOPLEVEL"),
    ("swig/alpha.i", "BUILD-BINDINGS"),
    ("test/test_device.cpp", "TEST-DIR-PRESENT"),
    ("conda/recipe-stub.yaml", "PKG-RECIPE-STUB"),
];

fn mutation_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    ensure!(
        code(&skelforge(dir.path(), &["new", "--name", "alpha"])) == 0,
        "new failed"
    );
    let root = dir.path().join("alpha");
    let base = json(&skelforge(
        dir.path(),
        &["audit", "alpha", "--format", "json"],
    ));
    ensure!(
        fail_ids(&base).is_empty(),
        "baseline fails {:?}",
        fail_ids(&base)
    );
    let base_score = base["score"].as_f64().unwrap();
    let run = base["checks_run"].as_u64().unwrap();
    for (file, check) in MUTATIONS {
        let path = root.join(file);
        let saved = fs::read(&path).map_err(|e| format!("{file}: {e}"))?;
        fs::remove_file(&path).unwrap();
        let out = skelforge(dir.path(), &["audit", "alpha", "--format", "json"]);
        fs::write(&path, saved).unwrap();
        let report = json(&out);
        ensure!(code(&out) == 1, "{file}: exit {}", code(&out));
        ensure!(
            fail_ids(&report) == [check],
            "{file}: failed {:?}",
            fail_ids(&report)
        );
        ensure!(report["checks_run"] == run, "{file}: checks_run changed");
        let drop = base_score - report["score"].as_f64().unwrap();
        let off = (drop - 1.0 / run as f64).abs();
        ensure!(
            off < 1e-12,
            "{file}: score dropped by {drop}, expected 1/{run}"
        );
    }
    Ok(format!(
        "{} files, one new failure each, drop 1/{run}",
        MUTATIONS.len()
    ))
}

fn stage_order() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    ensure!(
        code(&skelforge(dir.path(), &["new", "--name", "alpha"])) == 0,
        "new failed"
    );
    let config = dir.path().join("alpha/.gitlab-ci.yml");
    let pipeline = parse_pipeline(&fs::read_to_string(&config).unwrap())
        .map_err(|e| format!("emitted config does not parse: {e}"))?;
    ensure!(
        pipeline.stages == ["build", "tests", "quality", "deploy"],
        "stages {:?}",
        pipeline.stages
    );

    let plan = json(&skelforge(
        dir.path(),
        &[
            "pipeline",
            "plan",
            "alpha/.gitlab-ci.yml",
            "--format",
            "json",
        ],
    ));
    let expected = serde_json::json!([
        {"stage": "build", "jobs": ["build-gcc", "build-clang"]},
        {"stage": "tests", "jobs": ["unit-tests"]},
        {"stage": "quality", "jobs": ["format-check", "coverage"]},
        {"stage": "deploy", "jobs": ["docs-pages"]},
    ]);
    ensure!(plan == expected, "plan {plan}");

    let out = skelforge(
        dir.path(),
        &["pipeline", "run", "alpha/.gitlab-ci.yml", "--dry-run"],
    );
    ensure!(code(&out) == 0, "dry run exited {}", code(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let echoed: Vec<&str> = stdout
        .lines()
        .filter_map(|l| l.strip_prefix("$ "))
        .collect();
    let lines: Vec<&str> = pipeline
        .jobs
        .iter()
        .flat_map(|j| j.script.iter().map(String::as_str))
        .collect();
    for line in &lines {
        ensure!(echoed.contains(line), "not echoed: {line}");
    }
    Ok(format!(
        "4 stages, 6 jobs planned, {} lines echoed",
        lines.len()
    ))
}

fn fail_fast() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = common::fixture("pipelines/fail_fast.yml");
    let out = skelforge(
        dir.path(),
        &[
            "pipeline",
            "run",
            &config,
            "--workdir",
            ".",
            "--format",
            "json",
        ],
    );
    ensure!(code(&out) == 1, "exit {}", code(&out));
    let result = json(&out);
    ensure!(
        result["overall"] == "failed",
        "overall {}",
        result["overall"]
    );
    let jobs = result["jobs"].as_array().unwrap();
    let build: Vec<&Value> = jobs.iter().filter(|j| j["stage"] == "build").collect();
    ensure!(build.len() == 1, "{} build jobs", build.len());
    ensure!(
        build[0]["status"] == "failed",
        "build job {}",
        build[0]["status"]
    );
    let later: Vec<&Value> = jobs.iter().filter(|j| j["stage"] != "build").collect();
    ensure!(later.len() == 3, "{} later jobs", later.len());
    for j in &later {
        ensure!(j["status"] == "skipped", "{} is {}", j["name"], j["status"]);
    }
    Ok("build failed, 3 later jobs skipped, exit 1".into())
}

fn parser_round_trip() -> Outcome {
    let mut runner = runner(256);
    let cases = std::cell::Cell::new(0);
    runner
        .run(&common::pipeline(), |p| {
            cases.set(cases.get() + 1);
            let text = serialize_pipeline(&p);
            let back = parse_pipeline(&text)
                .map_err(|e| proptest::test_runner::TestCaseError::fail(format!("{e}\n{text}")))?;
            proptest::prop_assert_eq!(back, p, "serialized:\n{}", text);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure!(cases.get() >= 200, "only {} cases", cases.get());

    let mut classes = BTreeSet::new();
    for (file, class) in [
        ("undeclared_stage.yml", "UNDECLARED_STAGE"),
        ("duplicate_job.yml", "DUPLICATE_JOB"),
        ("empty_script.yml", "EMPTY_SCRIPT"),
        ("syntax_indent.yml", "SYNTAX"),
        ("syntax_anchor.yml", "SYNTAX"),
        ("syntax_missing_stages.yml", "SYNTAX"),
    ] {
        let text = fs::read_to_string(common::fixture(&format!("pipelines/{file}"))).unwrap();
        match parse_pipeline(&text) {
            Err(e) if e.code() == class => classes.insert(class),
            other => return Err(format!("{file}: expected {class}, got {other:?}")),
        };
    }
    ensure!(classes.len() == 4, "classes covered {classes:?}");
    Ok(format!("{} random pipelines, 4 error classes", cases.get()))
}

fn exit_code_contract() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    common::prepare(dir.path());
    let semantics: [(&[&str], i32); 7] = [
        (&["audit", "proj"], 0),
        (&["practices", "list"], 0),
        (&["pipeline", "run", "ok.yml"], 0),
        (&["audit", "."], 1),
        (&["pipeline", "run", "bad.yml"], 1),
        (&["new", "--name", "Bad Name!"], 2),
        (&["pipeline", "plan", "broken.yml"], 2),
    ];
    for (args, expected) in semantics {
        let c = code(&skelforge(dir.path(), args));
        ensure!(c == expected, "{args:?} exited {c}, expected {expected}");
    }

    let mut runner = runner(1);
    let argv = proptest::collection::vec(proptest::sample::select(common::VOCAB), 0..7);
    let mut seen = BTreeSet::new();
    for _ in 0..200 {
        let args = argv.new_tree(&mut runner).unwrap().current();
        let fresh = tempfile::tempdir().unwrap();
        common::prepare(fresh.path());
        let out = skelforge(fresh.path(), &args);
        let c = out
            .status
            .code()
            .ok_or_else(|| format!("{args:?} killed by a signal"))?;
        ensure!([0, 1, 2].contains(&c), "{args:?} exited {c}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure!(!stderr.contains("panicked"), "{args:?} panicked: {stderr}");
        seen.insert(c);
    }
    Ok(format!(
        "7 fixed cases, 200 fuzzed argv, exit codes {seen:?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("round-trip", round_trip),
        ("rename hygiene", rename_hygiene),
        ("catalog fidelity", catalog_fidelity),
        ("mutation suite", mutation_suite),
        ("pipeline stage order", stage_order),
        ("fail-fast execution", fail_fast),
        ("parser round-trip", parser_round_trip),
        ("exit-code contract", exit_code_contract),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, criterion) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("\n{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
