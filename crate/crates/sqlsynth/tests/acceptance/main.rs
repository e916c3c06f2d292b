//! Acceptance gate. Each criterion prints one `PASS` or `FAIL` line; the
//! process exits non-zero if any criterion fails.
//!
//! `ACCEPTANCE_ONLY=fig1,scale` restricts the run to criteria whose names
//! start with one of the given prefixes.

mod evaluator;
mod fig1;
mod normal_form;
mod projection;
mod propagation;
mod scale;

use std::time::Instant;

/// Outcome of one criterion: a one-line summary, `Err` when it failed.
pub type Verdict = Result<String, String>;

fn main() {
    let criteria: &[(&str, fn() -> Verdict)] = &[
        ("scale.fast", scale::fast_points),
        ("scale.growth", scale::growth),
        ("scale.baseline", scale::baseline_struggles),
        ("fig1.latest_row", fig1::latest_row),
        ("projection.oracle", projection::oracle),
        ("propagation.soundness", propagation::soundness),
        ("normal_form.matrix", normal_form::matrix),
        ("normal_form.minimality", normal_form::minimality),
        ("normal_form.determinism", normal_form::determinism),
        ("evaluator.golden", evaluator::golden),
    ];
    let only: Option<Vec<String>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').map(str::to_owned).collect());
    let mut failed = 0;
    for (name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.iter().any(|p| name.starts_with(p.as_str()))) {
            continue;
        }
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
