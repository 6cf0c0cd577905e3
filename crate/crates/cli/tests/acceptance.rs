//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the report:
//!
//! ```text
//! cargo test -p codecarta-cli --test acceptance -- --nocapture
//! ```

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use codecarta_cli::bundle::{external_references, SIZE_BUDGET};
use codecarta_cli::synth::{synth, Ledger, SynthConfig};
use codecarta_core::layout::{LayoutConfig, LayoutSnapshot};
use codecarta_core::serializer::deserialize;
use codecarta_miner::{mine, MinerConfig};
use common::props;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn codecarta(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_codecarta")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs `check` `n` times and reports the first failure.
fn repeat(n: usize, mut check: impl FnMut(usize) -> Result<(), String>) -> Outcome {
    for i in 0..n {
        check(i).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(format!("{n} cases, 0 failures"))
}

struct ScaleRun {
    elapsed: Duration,
    graph: Vec<u8>,
    layout: Vec<u8>,
    page: Vec<u8>,
}

fn scale_pipeline(root: &Path, out: &Path) -> Result<ScaleRun, String> {
    let start = Instant::now();
    codecarta(&["pipeline", s(root), "--out", s(out), "--single-file", "--seed", "7", "--diagnostics", s(&root.join("diagnostics.jsonl"))])?;
    let elapsed = start.elapsed();
    let read = |f: &str| fs::read(out.join(f)).map_err(|e| format!("{f}: {e}"));
    Ok(ScaleRun { elapsed, graph: read("graph.json")?, layout: read("layout.json")?, page: read("index.html")? })
}

fn determinism_and_scale() -> (Outcome, Outcome) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("fixture");
    let synth_start = Instant::now();
    let fixture = match synth(&SynthConfig::new(8, 3760, 7)).and_then(|f| f.write(&root).map(|()| f)) {
        Ok(f) => f,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let synth_time = synth_start.elapsed();
    let started = Instant::now();
    let first = scale_pipeline(&root, &dir.path().join("a"));
    let second = scale_pipeline(&root, &dir.path().join("b"));

    let scale = first.as_ref().map_err(Clone::clone).and_then(|run| {
        let g = deserialize(&run.graph).map_err(|e| e.to_string())?;
        let layout = LayoutSnapshot::from_bytes(&run.layout)?;
        let html = String::from_utf8_lossy(&run.page);
        let refs = external_references(&html);
        let total = synth_time + run.elapsed;
        let detail = format!(
            "{} nodes, {} projects, {:.1}s, converged after {} iterations, bundle {:.1} MB, {} external references",
            g.entities.len(),
            fixture.ledger.projects,
            total.as_secs_f64(),
            layout.iteration,
            run.page.len() as f64 / 1e6,
            refs.len()
        );
        let ok = g.entities.len() == 3760
            && layout.converged
            && total < Duration::from_secs(60)
            && run.page.len() < SIZE_BUDGET
            && refs.is_empty();
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    });

    let determinism = (|| {
        let (a, b) = (first?, second?);
        if a.graph != b.graph || a.layout != b.layout || a.page != b.page {
            return Err("pipeline outputs differ between runs".to_string());
        }
        let mut cfg = MinerConfig::new(&root);
        cfg.threads = 1;
        let one = codecarta_core::serializer::serialize(&mine(&cfg).map_err(|e| e.to_string())?).unwrap();
        cfg.threads = 8;
        let eight = codecarta_core::serializer::serialize(&mine(&cfg).map_err(|e| e.to_string())?).unwrap();
        if one != eight {
            return Err("mining with 1 and 8 threads differs".into());
        }
        let took = started.elapsed();
        if took > Duration::from_secs(120) {
            return Err(format!("took {:.1}s", took.as_secs_f64()));
        }
        Ok(format!("graph, layout and bundle identical over 2 runs; 1 vs 8 threads identical; {:.1}s", took.as_secs_f64()))
    })();
    (determinism, scale)
}

fn tokens() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    repeat(10_000, |_| {
        let n = rng.gen_range(1..80);
        props::check_token_forest(&mut rng, n)
    })
}

fn serializer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    repeat(1_000, |_| {
        let n = rng.gen_range(1..80);
        props::check_serializer_round_trip(&mut rng, n)
    })
}

fn tidy_tree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = LayoutConfig::default();
    let mut largest = 0;
    repeat(1_000, |_| {
        let n = rng.gen_range(1..=2000);
        largest = largest.max(n);
        let roots = rng.gen_range(1..4);
        let parents = common::random_parents(&mut rng, n, roots);
        props::check_tidy_tree(&parents, &cfg)
    })
    .map(|m| format!("{m}, largest tree {largest} nodes"))
}

fn force_model() -> Outcome {
    let (d, expected) = props::two_node_equilibrium();
    let error = (d - expected).abs() / expected;
    if error >= 0.02 {
        return Err(format!("two-node distance {d:.4} vs balance {expected:.4} ({:.2}%)", 100.0 * error));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    repeat(1_000, |_| props::check_pinned(&mut rng)).map_err(|e| format!("pinned: {e}"))?;
    let (falling, windows) = props::falling_windows(&mut rng, 20);
    let share = falling as f64 / windows.max(1) as f64;
    let detail = format!(
        "equilibrium off by {:.3}%; 1000 pinned configs held; swing fell in {falling}/{windows} windows ({:.1}%)",
        100.0 * error,
        100.0 * share
    );
    if windows > 0 && share >= 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn filters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut outcomes = props::Outcomes::default();
    repeat(1_000, |_| props::check_expression(&mut rng, &mut outcomes)).map_err(|e| format!("expression: {e}"))?;
    repeat(1_000, |_| props::check_regex(&mut rng)).map_err(|e| format!("regex: {e}"))?;
    repeat(1_000, |_| props::check_full_text(&mut rng)).map_err(|e| format!("full text: {e}"))?;
    repeat(1_000, |_| {
        let n = rng.gen_range(1..80);
        props::check_isolate(&mut rng, n)
    })
    .map_err(|e| format!("isolate: {e}"))?;
    Ok(format!(
        "1000 cases per mode and 1000 isolate cases, 0 failures (expression entities matched {}, missed {}, errored {})",
        outcomes.matched, outcomes.missed, outcomes.errored
    ))
}

fn view() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    repeat(1_000, |_| {
        let n = rng.gen_range(1..80);
        props::check_view_sequence(&mut rng, n, 40)
    })?;
    repeat(1_000, |_| {
        let n = rng.gen_range(1..80);
        props::check_default_view(&mut rng, n)
    })
    .map_err(|e| format!("default view: {e}"))?;
    Ok("1000 sequences of 40 operations and 1000 default views, 0 failures".into())
}

fn glyphs() -> Outcome {
    let cases = props::check_glyph_table()?;
    props::check_reference_glyphs()?;
    Ok(format!("{cases} table cases and the reference glyphs, 0 failures"))
}

fn miner_ledger() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut nodes = 0;
    repeat(10, |i| {
        let projects = rng.gen_range(1..=8);
        let target = rng.gen_range(projects + 1..=4000);
        let seed = rng.gen();
        let fixture = synth(&SynthConfig::new(projects, target, seed)).map_err(|e| e.to_string())?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        fixture.write(dir.path()).map_err(|e| e.to_string())?;
        let mut cfg = MinerConfig::new(dir.path());
        cfg.diagnostics = Some(dir.path().join("diagnostics.jsonl"));
        let g = mine(&cfg).map_err(|e| e.to_string())?;
        nodes += g.entities.len();
        let diffs = fixture.ledger.differences(&Ledger::observe(&g));
        if diffs.is_empty() {
            Ok(())
        } else {
            Err(format!("seed {seed} ({i}): {}", diffs.join("; ")))
        }
    })
    .map(|m| format!("10 seeds, {nodes} mined nodes in total, {m}"))
}

#[test]
fn acceptance() {
    let (determinism, scale) = determinism_and_scale();
    let results: Vec<(&str, Outcome)> = vec![
        ("determinism", determinism),
        ("scale target", scale),
        ("token properties", tokens()),
        ("serializer round trip", serializer()),
        ("tidy tree structure", tidy_tree()),
        ("force model", force_model()),
        ("filter oracle equivalence", filters()),
        ("view model oracle", view()),
        ("glyph table", glyphs()),
        ("miner ledger agreement", miner_ledger()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
