//! PASS / FAIL / INFO lines for `summary.txt`.

use std::fmt::Write as _;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Summary {
    lines: Vec<String>,
    failed: Vec<String>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records an asserted invariant.
    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl AsRef<str>) {
        let name = name.into();
        self.lines.push(format!("{} {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref()));
        if !ok {
            self.failed.push(name);
        }
    }

    /// Asserts lhs ≤ rhs and reports the margin rhs − lhs.
    pub fn check_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.check(name, lhs <= rhs, format!("{lhs:.6e} <= {rhs:.6e} (margin {:.3e})", rhs - lhs));
    }

    pub fn info(&mut self, name: impl Into<String>, detail: impl AsRef<str>) {
        self.lines.push(format!("INFO {}: {}", name.into(), detail.as_ref()));
    }

    pub fn failed(&self) -> &[String] {
        &self.failed
    }

    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for line in &self.lines {
            let _ = writeln!(s, "{line}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fail_lines_drive_status() {
        let mut s = Summary::new();
        s.check_le("a", 1.0, 2.0);
        s.info("b", "note");
        assert!(s.passed());
        s.check("c", false, "bad");
        assert_eq!(s.failed(), ["c"]);
        let text = s.render();
        assert!(text.starts_with("PASS a: 1.000000e0 <= 2.000000e0 (margin 1.000e0)\nINFO b: note\nFAIL c: bad\n"));
    }
}
