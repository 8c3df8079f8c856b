//! The `verify` report. Written by hand rather than through serde so every
//! number carries exactly `{:.16e}` and the bytes depend only on the inputs.

use std::fmt::Write;
use worm_core::io::fmt_f64;
use worm_core::suite::Check;

use crate::config::RunConfig;

fn num(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        "null".into()
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn verify_json(cfg: &RunConfig, suite: &str, checks: &[Check]) -> String {
    let mut out = String::new();
    let passed = checks.iter().all(Check::passed);
    out.push_str("{\n");
    let _ = writeln!(out, "  \"suite\": {},", string(suite));
    let _ = writeln!(out, "  \"beta\": {},", num(cfg.params.beta()));
    let _ = writeln!(out, "  \"L\": {},", num(cfg.grid.half_length()));
    let _ = writeln!(out, "  \"Nx\": {},", cfg.grid.nx());
    let _ = writeln!(out, "  \"Nj\": {},", cfg.grid.nj());
    let _ = writeln!(out, "  \"seed\": {},", cfg.seed);
    let _ = writeln!(out, "  \"passed\": {passed},");
    out.push_str("  \"checks\": [");
    for (i, c) in checks.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            out,
            "    {{\"check_name\": {}, \"status\": {}, \"measured\": {}, \"tolerance\": {}}}",
            string(&c.name),
            string(&c.status.to_string()),
            num(c.measured),
            num(c.tolerance)
        );
    }
    out.push_str(if checks.is_empty() { "]\n" } else { "\n  ]\n" });
    out.push_str("}\n");
    out
}

/// Fixed-width table for the terminal.
pub fn check_table(checks: &[Check]) -> String {
    let w = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!(
        "{:<w$}  {:<6}  {:>23}  {:>23}\n",
        "check", "status", "measured", "tolerance"
    );
    for c in checks {
        let _ = writeln!(
            out,
            "{:<w$}  {:<6}  {:>23}  {:>23}",
            c.name,
            c.status.to_string(),
            fmt_f64(c.measured),
            fmt_f64(c.tolerance)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommonArgs, RunConfig};
    use clap::Parser;

    #[derive(Parser)]
    struct T {
        #[command(flatten)]
        c: CommonArgs,
    }

    #[test]
    fn report_is_valid_json_with_all_fields() {
        let cfg = RunConfig::resolve(&T::parse_from(["t", "--beta", "4"]).c).unwrap();
        let checks = vec![Check::new("a.b", 0.5, 1.0), Check::new("c.d", f64::NAN, 1.0)];
        let s = verify_json(&cfg, "all", &checks);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["passed"], false);
        let cs = v["checks"].as_array().unwrap();
        assert_eq!(cs[0]["check_name"], "a.b");
        assert_eq!(cs[0]["status"], "pass");
        assert!(s.contains("\"measured\": 5.0000000000000000e-1"));
        assert!(cs[1]["measured"].is_null());
        assert_eq!(cs[1]["status"], "fail");
        assert!(s.contains("\"tolerance\": 1.0000000000000000e0"));
        let empty: serde_json::Value = serde_json::from_str(&verify_json(&cfg, "x", &[])).unwrap();
        assert_eq!(empty["passed"], true);
    }
}
