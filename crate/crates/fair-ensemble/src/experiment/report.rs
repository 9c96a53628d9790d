//! CSV and key-value output writers.
//!
//! Floats go out in shortest round-trip form so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::experiment::{CofSample, ConfigOutcome};
use crate::metrics::SweepRecord;

fn fmt_f64(v: f64) -> String {
    v.to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// `alpha,f1,f2,dp,if,auc,ridge_triggered,w_0..w_{k-1}`, rows ascending in
/// alpha.
pub fn write_sweep_csv(path: &Path, records: &[SweepRecord], k: usize) -> Result<()> {
    let mut out = String::from("alpha,f1,f2,dp,if,auc,ridge_triggered");
    for i in 0..k {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for rec in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(rec.alpha),
            fmt_f64(rec.f1),
            fmt_f64(rec.f2),
            fmt_f64(rec.dp),
            fmt_f64(rec.if_value),
            fmt_opt(rec.auc),
            rec.ridge_triggered
        );
        for w in rec.weights.values() {
            let _ = write!(out, ",{}", fmt_f64(*w));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// `alpha,cof_weighted,cof_unweighted,undef_weighted,undef_unweighted`;
/// undefined samples leave the value cell empty and raise the flag.
pub fn write_cof_csv(path: &Path, samples: &[CofSample]) -> Result<()> {
    let mut out =
        String::from("alpha,cof_weighted,cof_unweighted,undef_weighted,undef_unweighted\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(s.alpha),
            fmt_opt(s.weighted),
            fmt_opt(s.unweighted),
            s.weighted.is_none(),
            s.unweighted.is_none()
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Per-config endpoint table for batch runs.
pub fn write_summary_csv(path: &Path, outcomes: &[ConfigOutcome]) -> Result<()> {
    let mut out = String::from(
        "name,dataset,base_method,fairness,weighted_f1,status,f2_alpha0,f2_alpha_max,auc_alpha0,auc_alpha_max,ridge_any,error\n",
    );
    for oc in outcomes {
        match &oc.endpoints {
            Ok(e) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},ok,{},{},{},{},{},",
                    oc.name,
                    oc.dataset,
                    oc.base_method,
                    oc.fairness,
                    oc.weighted_f1,
                    fmt_f64(e.f2_alpha0),
                    fmt_f64(e.f2_alpha_max),
                    fmt_opt(e.auc_alpha0),
                    fmt_opt(e.auc_alpha_max),
                    e.ridge_any
                );
            }
            Err(msg) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},error,,,,,,\"{}\"",
                    oc.name,
                    oc.dataset,
                    oc.base_method,
                    oc.fairness,
                    oc.weighted_f1,
                    msg.replace('"', "'")
                );
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Key-value metadata echo, keys sorted so output is stable.
pub fn write_meta(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut sorted: Vec<&(String, String)> = pairs.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    for (k, v) in sorted {
        let _ = writeln!(out, "{k} = {v}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Test helper: file contents with Windows newlines normalized away.
pub fn read_to_string_normalized(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?.replace("\r\n", "\n"))
}
