//! Acceptance criteria 1–10: runs every suite once, prints one line per criterion
//! from the checks carrying its anchor, and exits non-zero if any criterion fails.

use std::process::ExitCode;

use mvop::report::{Check, Report, ANCHORS};
use mvop::suites::{run, Options, Suite};

fn line(report: &Report, number: usize, extra: &str) -> bool {
    let cs: Vec<&Check> = report
        .checks
        .iter()
        .filter(|c| c.anchor == ANCHORS[number - 1])
        .collect();
    let failed: Vec<_> = cs.iter().filter(|c| !c.pass).collect();
    let worst = cs.iter().map(|c| c.max_residual / c.tolerance).fold(0.0, |a: f64, b| {
        if a.is_nan() || b.is_nan() {
            f64::NAN
        } else {
            a.max(b)
        }
    });
    let pass = !cs.is_empty() && failed.is_empty();
    println!(
        "criterion {number:>2} {}  {} ({} checks, worst residual/tolerance {worst:.2e}){extra}",
        if pass { "PASS" } else { "FAIL" },
        ANCHORS[number - 1],
        cs.len()
    );
    for c in failed {
        println!(
            "    {} = {:.3e}, tolerance {:.0e}: {}",
            c.id,
            c.max_residual,
            c.tolerance,
            c.note.as_deref().unwrap_or("")
        );
    }
    pass
}

fn note(report: &Report, id: &str) -> String {
    match report.checks.iter().find(|c| c.id == id) {
        Some(Check { note: Some(n), .. }) => format!("; {n}"),
        Some(c) => format!("; {:.3} s", c.max_residual),
        None => String::new(),
    }
}

fn main() -> ExitCode {
    let report = run(Suite::All, &Options::default());
    let seconds = report.elapsed_ms / 1e3;
    let mut all = true;
    for number in 1..=10 {
        let extra = match number {
            1 => note(&report, "oracle.scalar-hermite.seconds"),
            5 => note(&report, "fast.n3.time-ratio"),
            10 => format!("; verify all took {seconds:.1} s (limit 120 s)"),
            _ => String::new(),
        };
        all &= line(&report, number, &extra);
    }
    if seconds >= 120.0 {
        println!("verify all exceeded two minutes");
        all = false;
    }
    let stray: Vec<_> = report.checks.iter().filter(|c| !ANCHORS.contains(&c.anchor)).collect();
    if !stray.is_empty() {
        println!("{} checks carry no criterion anchor", stray.len());
        all = false;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
