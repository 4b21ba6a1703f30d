//! Verdict reporting for the acceptance suite in `tests/acceptance.rs`.

pub enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

/// Prints one line per criterion and counts the gating failures.
#[derive(Debug, Default)]
pub struct Report {
    failed: usize,
}

impl Report {
    pub fn line(&mut self, name: &str, v: Verdict) {
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag}  {name}: {detail}");
    }

    /// Prints a verdict without letting it change the exit code.
    pub fn line_not_gating(&mut self, name: &str, v: Verdict) {
        let failed = self.failed;
        self.line(name, v);
        self.failed = failed;
    }

    pub fn failed(&self) -> usize {
        self.failed
    }
}

pub fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}
