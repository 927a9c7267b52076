//! Versioned report schema shared by every CLI command, plus the text
//! renderer and atomic file output.
//!
//! A report is {schema_version, config, checks, wall_time_seconds} where
//! each check carries the claim it certifies, a pass flag, and the
//! worst-case residuals, so a failing CI line names the exact claim that
//! broke. Reports with the same config and seed are identical except for
//! the wall time.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Bumped whenever the JSON layout changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default directory for report files.
pub const OUT_DIR_ENV: &str = "FKT_OUT_DIR";

/// One verification outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    /// Stable machine-readable name, e.g. "block-ranks".
    pub name: String,
    /// The mathematical claim this check certifies, in words.
    pub claim: String,
    pub pass: bool,
    /// Check-specific numbers: ranks, counts, residual magnitudes.
    pub residuals: Value,
}

/// Top-level report emitted by every command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: Value,
    pub checks: Vec<CheckResult>,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Terse text mode: one `OK`/`FAIL` line per check and a final
    /// verdict. Conjecture-level checks are findings rather than
    /// assertions, so they read CONSISTENT/INCONSISTENT instead.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let word = if c.name.starts_with("tk-consistency") {
                if c.pass {
                    "CONSISTENT"
                } else {
                    "INCONSISTENT"
                }
            } else if c.pass {
                "OK"
            } else {
                "FAIL"
            };
            out.push_str(&format!("{word:12} {}", c.name));
            if let Some(note) = residual_note(&c.residuals) {
                out.push_str(&format!("  [{note}]"));
            }
            out.push('\n');
        }
        let verdict = if self.passed() { "OK" } else { "FAIL" };
        out.push_str(&format!("{verdict}\n"));
        out
    }
}

/// A short bracketed summary pulled out of the residuals, when the
/// residual object carries one under the "summary" key.
fn residual_note(residuals: &Value) -> Option<String> {
    residuals
        .get("summary")
        .and_then(Value::as_str)
        .map(str::to_string)
}

/// Default report path `$FKT_OUT_DIR/<slug>.<ext>`, when the variable is
/// set. The slug is derived from the command and algebra, never from the
/// clock, so reruns overwrite deterministically.
pub fn default_out_path(slug: &str, ext: &str) -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{slug}.{ext}")))
}

/// Writes through a sibling temp file and renames, so a crashed run
/// never leaves a truncated report behind.
pub fn atomic_write(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
