//! CSV and manifest emission, plus readers for the `compare`/`curves`
//! subcommands.
//!
//! Floats print in Rust's shortest round-trip notation and rows follow the
//! in-memory ordering, so identical results serialize to identical bytes.

use super::{ExperimentResult, LearningCurve};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const COMPARISONS_FILE: &str = "comparisons.csv";
pub const MANIFEST_FILE: &str = "manifest";

pub fn curves_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("policy,run,checkpoint,episode,return,steps\n");
    for curve in &result.curves {
        for (run, (returns, steps)) in curve.returns.iter().zip(&curve.steps).enumerate() {
            for (k, (&ret, &st)) in returns.iter().zip(steps).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    curve.policy,
                    run,
                    k + 1,
                    curve.episodes[k],
                    ret,
                    st
                );
            }
        }
    }
    out
}

pub fn summary_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("policy,mean_sum_return,stderr,n\n");
    for s in &result.summaries {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.policy, s.mean_sum_return, s.stderr, s.n
        );
    }
    out
}

pub fn comparisons_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("policy_a,policy_b,mean_a,mean_b,t,df,p\n");
    for c in &result.comparisons {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.policy_a, c.policy_b, c.mean_a, c.mean_b, c.t, c.df, c.p
        );
    }
    out
}

/// Writes `curves.csv`, `summary.csv`, `comparisons.csv` and the `manifest`
/// (the fully resolved config) into `dir`.
pub fn emit_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(path.display().to_string(), e))
    };
    write(CURVES_FILE, curves_csv(result))?;
    write(SUMMARY_FILE, summary_csv(result))?;
    write(COMPARISONS_FILE, comparisons_csv(result))?;
    write(MANIFEST_FILE, result.config.to_toml())?;
    Ok(())
}

/// Reads the learning curves back from an output directory.
pub fn read_curves(dir: &Path) -> Result<Vec<LearningCurve>> {
    let path = dir.join(CURVES_FILE);
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_curves_csv(&text)
}

pub fn parse_curves_csv(text: &str) -> Result<Vec<LearningCurve>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("policy,run,checkpoint,episode,return,steps") => {}
        other => {
            return Err(Error::Parse(format!(
                "unexpected curves.csv header: {other:?}"
            )))
        }
    }
    let mut curves: Vec<LearningCurve> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "curves.csv line {}: expected 6 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("curves.csv line {}: bad {what}", lineno + 2));
        let policy = fields[0];
        let run: usize = fields[1].parse().map_err(|_| bad("run"))?;
        let episode: usize = fields[3].parse().map_err(|_| bad("episode"))?;
        let ret: f64 = fields[4].parse().map_err(|_| bad("return"))?;
        let steps: f64 = fields[5].parse().map_err(|_| bad("steps"))?;

        if curves.last().map(|c| c.policy.as_str()) != Some(policy) {
            curves.push(LearningCurve {
                policy: policy.to_string(),
                episodes: Vec::new(),
                returns: Vec::new(),
                steps: Vec::new(),
            });
        }
        let curve = curves.last_mut().expect("just ensured");
        if curve.returns.len() <= run {
            curve.returns.push(Vec::new());
            curve.steps.push(Vec::new());
        }
        if run == 0 {
            curve.episodes.push(episode);
        }
        curve.returns[run].push(ret);
        curve.steps[run].push(steps);
    }
    Ok(curves)
}

/// Plot-ready data: one gnuplot index block per policy with
/// `episode mean stderr` columns.
pub fn plot_blocks(curves: &[LearningCurve], policies: &[String]) -> Result<String> {
    let mut out = String::new();
    for (i, id) in policies.iter().enumerate() {
        let curve = curves
            .iter()
            .find(|c| &c.policy == id)
            .ok_or_else(|| Error::MissingPolicy { id: id.clone() })?;
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# policy: {id}");
        let _ = writeln!(out, "# episode mean_return stderr");
        let runs = curve.returns.len() as f64;
        for (k, &episode) in curve.episodes.iter().enumerate() {
            let column: Vec<f64> = curve.returns.iter().map(|r| r[k]).collect();
            let mean = super::stats::mean(&column);
            let se = if column.len() > 1 {
                super::stats::standard_error(&column)
            } else {
                0.0
            };
            debug_assert!(runs >= 1.0);
            let _ = writeln!(out, "{episode} {mean} {se}");
        }
    }
    Ok(out)
}
