//! Check records and the JSON report of a verify run.

use serde::Serialize;

/// What each check verifies. Every check carries exactly one of these.
pub const ANCHORS: [&str; 10] = [
    "oracle: scalar Hermite recurrence and norm",
    "ladder relations P·D = M·P, P·D† = M†·P",
    "string relations and zero-coefficient identity",
    "discrete Painlevé I for the quartic weight",
    "fast Hermite-type pipeline: norm recursion, xi recursion, assembly",
    "oscillator eigen-equation and Casimir operator",
    "Pearson equation, two-step derivative expansion, second-order norm recursion",
    "deformation lattices and Lax form",
    "E/F ladder and Christoffel–Darboux",
    "closed form of H(0)",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    /// `null` in JSON when a computation failed or produced NaN.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Degree and abscissa of the worst residual, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Running maximum of residuals; NaN counts as a failure.
#[derive(Debug, Default)]
pub struct Probe {
    worst: f64,
    n: Option<usize>,
    x: Option<f64>,
    nan: bool,
    seen: bool,
    note: Option<String>,
}

impl Probe {
    pub fn record(&mut self, n: impl Into<Option<usize>>, x: impl Into<Option<f64>>, r: f64) {
        if self.nan {
            return;
        }
        if r.is_nan() || !self.seen || r > self.worst {
            self.nan = r.is_nan();
            self.seen = true;
            self.worst = r;
            self.n = n.into();
            self.x = x.into();
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.note = Some(text.into());
    }

    fn finish(self, id: String, anchor: &'static str, tolerance: f64) -> Check {
        let max_residual = if self.nan { f64::NAN } else { self.worst };
        Check {
            id,
            anchor,
            pass: !self.nan && max_residual < tolerance,
            max_residual,
            tolerance,
            n: self.n,
            x: self.x,
            note: self.note,
        }
    }
}

/// Runs `body` against a fresh [`Probe`]; an error fails the check and becomes its note.
pub fn check<E: std::fmt::Display>(
    id: impl Into<String>,
    anchor: usize,
    tolerance: f64,
    body: impl FnOnce(&mut Probe) -> Result<(), E>,
) -> Check {
    let mut probe = Probe::default();
    let id = id.into();
    match body(&mut probe) {
        Ok(()) => probe.finish(id, ANCHORS[anchor], tolerance),
        Err(e) => {
            let mut c = probe.finish(id, ANCHORS[anchor], tolerance);
            c.max_residual = f64::NAN;
            c.pass = false;
            c.note = Some(e.to_string());
            c
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub pass: bool,
    pub elapsed_ms: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>, mut checks: Vec<Check>, elapsed_ms: f64) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            suite: suite.into(),
            pass: checks.iter().all(|c| c.pass),
            elapsed_ms,
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<48} {:>10.3e} < {:.0e}",
                if c.pass { "pass" } else { "FAIL" },
                c.id,
                c.max_residual,
                c.tolerance
            ));
            if let Some(note) = &c.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{}: {} checks, {} failed, {:.1} s\n",
            self.suite,
            self.checks.len(),
            failed,
            self.elapsed_ms / 1e3
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_keeps_the_worst_location() {
        let c = check("a", 0, 1e-8, |p| {
            p.record(1, 0.5, 1e-12);
            p.record(2, -1.0, 1e-9);
            p.record(3, None, 1e-10);
            Ok::<_, String>(())
        });
        assert!(c.pass);
        assert_eq!((c.n, c.x, c.max_residual), (Some(2), Some(-1.0), 1e-9));
    }

    #[test]
    fn nan_and_errors_fail() {
        let c = check("a", 0, 1.0, |p| {
            p.record(0, None, f64::NAN);
            p.record(1, None, 0.1);
            Ok::<_, String>(())
        });
        assert!(!c.pass && c.max_residual.is_nan());
        let c = check("b", 1, 1.0, |_| Err("boom"));
        assert!(!c.pass);
        assert_eq!(c.note.as_deref(), Some("boom"));
        assert_eq!(
            serde_json::to_value(&c).unwrap()["max_residual"],
            serde_json::Value::Null
        );
    }

    #[test]
    fn report_is_sorted() {
        let mk = |id: &str, pass| {
            check(id, 0, 1.0, |p| {
                p.record(None, None, if pass { 0.0 } else { 2.0 });
                Ok::<_, String>(())
            })
        };
        let r = Report::new("s", vec![mk("b", true), mk("a", false)], 1.0);
        assert_eq!(r.checks[0].id, "a");
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
    }
}
