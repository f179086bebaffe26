//! Check reports shared by the axiom checkers and the CLI.

use std::fmt::Write;

/// Witnesses printed per check before truncating.
const SHOWN: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
}

impl Check {
    pub fn new(name: &str) -> Check {
        Check { name: name.to_string(), ..Check::default() }
    }

    /// Records one instance; `None` means an input was missing.
    pub fn record(&mut self, ok: Option<bool>, witness: impl FnOnce() -> String) {
        match ok {
            None => self.skipped += 1,
            Some(true) => self.checked += 1,
            Some(false) => {
                self.checked += 1;
                self.violations.push(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Report {
        Report { title: title.to_string(), ..Report::default() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn n_checked(&self) -> usize {
        self.checks.iter().map(|c| c.checked).sum()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect()
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        if !self.title.is_empty() {
            writeln!(s, "{}", self.title).unwrap();
        }
        for n in &self.notes {
            writeln!(s, "note: {n}").unwrap();
        }
        for c in &self.checks {
            write!(s, "{}: checked={} violations={}", c.name, c.checked, c.violations.len()).unwrap();
            if c.skipped > 0 {
                write!(s, " skipped={}", c.skipped).unwrap();
            }
            s.push('\n');
            for w in c.violations.iter().take(SHOWN) {
                writeln!(s, "  witness: {w}").unwrap();
            }
            if c.violations.len() > SHOWN {
                writeln!(s, "  ... {} more", c.violations.len() - SHOWN).unwrap();
            }
        }
        writeln!(s, "RESULT {} n_checked={}", if self.passed() { "pass" } else { "fail" }, self.n_checked())
            .unwrap();
        s
    }
}
