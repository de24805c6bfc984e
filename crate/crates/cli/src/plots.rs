//! Plot-ready series derived from a results directory.
//!
//! Each series is a CSV with columns `x,mean,std`, written to `<dir>/plots/`:
//! - `summary.csv` gives `<experiment>_success_<method>.csv` and
//!   `<experiment>_threshold_<method>.csv` over N
//! - `rolling.csv` gives `visibility_<method>.csv` over episodes
//! - `branches.csv` gives `branches_rm.csv`, `branches_cra.csv`, `branches_rml.csv` over M

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("no results in {0} (expected summary.csv, rolling.csv or branches.csv)")]
    MissingInputs(PathBuf),
    #[error("{path}: missing column `{column}`")]
    Column { path: PathBuf, column: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
}

type Series = BTreeMap<String, Vec<[String; 3]>>;

fn read(path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>), PlotError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().collect::<Result<_, _>>()?;
    Ok((headers, rows))
}

fn col(path: &Path, headers: &[String], name: &str) -> Result<usize, PlotError> {
    headers.iter().position(|h| h == name).ok_or_else(|| PlotError::Column {
        path: path.to_path_buf(),
        column: name.to_string(),
    })
}

fn write_series(dir: &Path, series: Series, written: &mut Vec<PathBuf>) -> Result<(), PlotError> {
    for (name, points) in series {
        let path = dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["x", "mean", "std"])?;
        for p in points {
            w.write_record(&p)?;
        }
        w.flush().map_err(|e| PlotError::Io(path.clone(), e))?;
        written.push(path);
    }
    Ok(())
}

/// Writes every series derivable from the CSVs in `dir`; returns the files written.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let out = dir.join("plots");
    let mut written = Vec::new();
    let mut found = false;

    let summary = dir.join("summary.csv");
    if summary.exists() {
        found = true;
        let (h, rows) = read(&summary)?;
        let [e, n, m, fm, fs, tm, ts] = ["experiment", "n", "method", "final_success_mean", "final_success_std", "threshold_mean", "threshold_std"]
            .map(|c| col(&summary, &h, c));
        let (e, n, m, fm, fs, tm, ts) = (e?, n?, m?, fm?, fs?, tm?, ts?);
        let mut series = Series::new();
        for r in &rows {
            let (exp, method) = (&r[e], &r[m]);
            series
                .entry(format!("{exp}_success_{method}"))
                .or_default()
                .push([r[n].to_string(), r[fm].to_string(), r[fs].to_string()]);
            series
                .entry(format!("{exp}_threshold_{method}"))
                .or_default()
                .push([r[n].to_string(), r[tm].to_string(), r[ts].to_string()]);
        }
        fs::create_dir_all(&out).map_err(|err| PlotError::Io(out.clone(), err))?;
        write_series(&out, series, &mut written)?;
    }

    let rolling = dir.join("rolling.csv");
    if rolling.exists() {
        found = true;
        let (h, rows) = read(&rolling)?;
        let (m, ep, mean, std) = (
            col(&rolling, &h, "method")?,
            col(&rolling, &h, "episode")?,
            col(&rolling, &h, "mean")?,
            col(&rolling, &h, "std")?,
        );
        let mut series = Series::new();
        for r in &rows {
            series
                .entry(format!("visibility_{}", &r[m]))
                .or_default()
                .push([r[ep].to_string(), r[mean].to_string(), r[std].to_string()]);
        }
        fs::create_dir_all(&out).map_err(|err| PlotError::Io(out.clone(), err))?;
        write_series(&out, series, &mut written)?;
    }

    let branches = dir.join("branches.csv");
    if branches.exists() {
        found = true;
        let (h, rows) = read(&branches)?;
        let m = col(&branches, &h, "m")?;
        let mut series = Series::new();
        for kind in ["rm", "cra", "rml"] {
            let c = col(&branches, &h, &format!("{kind}_branches"))?;
            series.insert(
                format!("branches_{kind}"),
                rows.iter().map(|r| [r[m].to_string(), r[c].to_string(), "0".to_string()]).collect(),
            );
        }
        fs::create_dir_all(&out).map_err(|err| PlotError::Io(out.clone(), err))?;
        write_series(&out, series, &mut written)?;
    }

    if !found {
        return Err(PlotError::MissingInputs(dir.to_path_buf()));
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_from_each_input() {
        let d = tempfile::tempdir().unwrap();
        fs::write(
            d.path().join("summary.csv"),
            "experiment,n,method,seeds,final_success_mean,final_success_std,threshold_mean,threshold_std,reached\n\
             flexibility,1,rml,2,1,0,120,3,2\nflexibility,2,rml,2,1,0,130,4,2\nflexibility,1,cra-ql,2,1,0,110,1,2\n",
        )
        .unwrap();
        fs::write(d.path().join("rolling.csv"), "method,episode,mean,std\nrml,1,0,0\nrml,2,0.5,0.1\nrmlgym,1,0,0\n").unwrap();
        fs::write(d.path().join("branches.csv"), "m,rm_branches,cra_branches,rml_branches\n1,1,1,2\n2,2,2,2\n").unwrap();
        let files = emit_plots(d.path()).unwrap();
        assert_eq!(files.len(), 4 + 2 + 3);
        let s = fs::read_to_string(d.path().join("plots/flexibility_threshold_rml.csv")).unwrap();
        assert_eq!(s, "x,mean,std\n1,120,3\n2,130,4\n");
        let s = fs::read_to_string(d.path().join("plots/branches_rm.csv")).unwrap();
        assert_eq!(s, "x,mean,std\n1,1,0\n2,2,0\n");
        assert!(d.path().join("plots/visibility_rmlgym.csv").exists());
    }

    #[test]
    fn empty_directory_is_an_error() {
        let d = tempfile::tempdir().unwrap();
        assert!(matches!(emit_plots(d.path()), Err(PlotError::MissingInputs(_))));
    }
}
