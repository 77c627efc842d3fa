//! Line-oriented verification reports.

use std::fmt::Write as _;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    /// Passes when `value <= tol`. NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= tol,
            value,
            tol,
        }
    }
}

/// Named checks plus the settings that produced them. `passed` holds
/// exactly when every check passes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub settings: Vec<(String, String)>,
    pub checks: Vec<Check>,
    /// Free-form diagnostics, rendered as comments.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn new(settings: Vec<(String, String)>) -> Self {
        Self {
            settings,
            ..Self::default()
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `# key = value` settings, one `check-name: PASS|FAIL (value, tolerance)`
    /// line per check, then notes and the overall verdict as comments.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.settings {
            let _ = writeln!(s, "# {k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "{}: {} ({:e}, {:e})", c.name, if c.pass { "PASS" } else { "FAIL" }, c.value, c.tol);
        }
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        let _ = writeln!(s, "# elapsed = {:.3} s", self.elapsed.as_secs_f64());
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            s,
            "# overall = {} ({passed} of {} checks pass)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_lines() {
        let mut r = VerificationReport::new(vec![("levels".into(), "5".into())]);
        r.push(Check::at_most("ortho-1-1", 2.5e-16, 1e-10));
        r.push(Check::at_most("drift", f64::NAN, 1e-9));
        let text = r.render();
        assert!(text.starts_with("# levels = 5\n"));
        assert!(text.contains("ortho-1-1: PASS (2.5e-16, 1e-10)\n"));
        assert!(text.contains("drift: FAIL (NaN, 1e-9)\n"));
        assert!(!r.passed());
    }

    #[test]
    fn empty_report_passes() {
        assert!(VerificationReport::default().passed());
    }
}
