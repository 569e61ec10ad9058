//! The `report` subcommand: aggregate summary files into per-method
//! medians and reduction factors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Failure, Flags, RunSummaryFile};
use crate::{Error, Result};

/// Median of already-recorded simulation counts. Runs that never solved
/// carry their full spent budget, so medians are conservative for slow
/// methods rather than flattering.
pub(crate) fn median(values: &[u64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

fn collect_summaries(dir: &Path, into: &mut Vec<RunSummaryFile>) -> Result<()> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    for path in paths {
        if path.is_dir() {
            collect_summaries(&path, into)?;
        } else if path
            .file_name()
            .is_some_and(|n| n.to_string_lossy().ends_with(".summary.json"))
        {
            let text = fs::read_to_string(&path)?;
            let summary: RunSummaryFile = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            into.push(summary);
        }
    }
    Ok(())
}

pub(crate) fn cmd_report(flags: &Flags) -> std::result::Result<(), Failure> {
    let input = PathBuf::from(
        flags
            .get("input")
            .ok_or_else(|| Failure::usage("missing required flag --input"))?,
    );
    let mut summaries = Vec::new();
    collect_summaries(&input, &mut summaries).map_err(Failure::config)?;
    if summaries.is_empty() {
        return Err(Failure {
            code: 1,
            message: format!("no *.summary.json files under {}", input.display()),
        });
    }

    // benchmark -> method -> (sim counts, solved count)
    let mut table: BTreeMap<String, BTreeMap<String, (Vec<u64>, usize)>> = BTreeMap::new();
    for s in &summaries {
        let entry = table
            .entry(s.result.benchmark.clone())
            .or_default()
            .entry(s.result.method.clone())
            .or_default();
        entry.0.push(s.result.simulations);
        if s.result.solved {
            entry.1 += 1;
        }
    }

    for (benchmark, methods) in &table {
        println!("benchmark {benchmark}");
        println!(
            "  {:<14} {:>5} {:>7} {:>12} {:>10}",
            "method", "runs", "solved", "median sims", "reduction"
        );
        let reference = methods.get("robustanalog").map(|(sims, _)| median(sims));
        for (method, (sims, solved)) in methods {
            let med = median(sims);
            let reduction = match reference {
                Some(ra_median) if method != "robustanalog" && ra_median > 0.0 => {
                    format!("{:.1}x", med / ra_median)
                }
                Some(_) if method == "robustanalog" => "1.0x".to_string(),
                _ => "-".to_string(),
            };
            println!(
                "  {:<14} {:>5} {:>7} {:>12.0} {:>10}",
                method,
                sims.len(),
                format!("{solved}/{}", sims.len()),
                med,
                reduction
            );
        }
        println!();
    }
    println!(
        "published reference results on the two-stage OTA: 26x fewer simulations than \
         single-task DDPG, 30x fewer than Bayesian optimization, 14x fewer than the \
         evolution strategy."
    );
    println!("note: the Bayesian optimization baseline is not implemented here.");
    Ok(())
}
