//! Reporting for the acceptance suite: each criterion collects checks and
//! prints a single PASS/FAIL line.

use std::process::ExitCode;

#[derive(Debug, Clone)]
pub struct Check {
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn new(id: u8, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check {
            ok,
            detail: detail.into(),
        });
        self
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.ok)
    }

    /// `PASS  3 title: detail; detail`, failing checks marked with `!`.
    pub fn line(&self) -> String {
        let details: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                if c.ok {
                    c.detail.clone()
                } else {
                    format!("!{}", c.detail)
                }
            })
            .collect();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!(
            "{verdict} {:>2} {}: {}",
            self.id,
            self.title,
            details.join("; ")
        )
    }
}

/// Prints one line per criterion plus a summary; fails if any criterion did.
pub fn report(criteria: &[Criterion]) -> ExitCode {
    for c in criteria {
        println!("{}", c.line());
    }
    let failed = criteria.iter().filter(|c| !c.passed()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
