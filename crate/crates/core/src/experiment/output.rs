//! CSV files and run manifests.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::plot::plot_sweep;
use crate::experiment::sweep::{ResultRow, SweepSpec};

/// Column order of every result CSV.
pub const CSV_HEADER: [&str; 17] = [
    "swept_var",
    "value",
    "model",
    "source",
    "p_fa",
    "p_fa_lo",
    "p_fa_hi",
    "p_md",
    "p_md_lo",
    "p_md_hi",
    "xi",
    "ima",
    "ima_lo",
    "ima_hi",
    "n_trials",
    "seed",
    "note",
];

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write_csv_to<W: Write>(rows: &[ResultRow], writer: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_from<R: Read>(reader: R) -> csv::Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize().collect()
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv_to(rows, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv_from(std::io::BufReader::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Files written for one sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedFiles {
    pub csv: PathBuf,
    pub plot: PathBuf,
}

/// Writes `<name>.csv` and `<name>.svg` into `out_dir`, creating it if needed.
pub fn emit_outputs(rows: &[ResultRow], spec: &SweepSpec, out_dir: &Path) -> Result<EmittedFiles> {
    create_dir(out_dir)?;
    let csv = out_dir.join(format!("{}.csv", spec.name));
    write_csv(rows, &csv)?;
    let plot = out_dir.join(format!("{}.svg", spec.name));
    plot_sweep(rows, spec.variable, &spec.name, &plot)?;
    Ok(EmittedFiles { csv, plot })
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Everything needed to regenerate the files of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Command line that produced the run, minus the program name.
    pub command: Vec<String>,
    pub sweeps: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// Configuration text as given, before command-line overrides.
    pub config: String,
    pub seed: u64,
    pub n_trials: u64,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command,
            sweeps: Vec::new(),
        }
    }

    pub fn record(&mut self, spec: &SweepSpec, config_text: &str, files: &EmittedFiles) {
        let name = |p: &Path| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        self.sweeps.push(ManifestEntry {
            name: spec.name.clone(),
            config: config_text.to_owned(),
            seed: spec.seed,
            n_trials: spec.n_trials,
            files: vec![name(&files.csv), name(&files.plot)],
        });
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        create_dir(out_dir)?;
        let path = out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io {
            path: path.clone(),
            source: e.into(),
        })?;
        fs::write(&path, text + "\n").map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sweep::{Source, SweepVariable};

    fn row(value: f64, note: &str) -> ResultRow {
        ResultRow {
            swept_var: SweepVariable::Dt,
            value,
            model: "PRM(zeta)".into(),
            source: Source::MonteCarlo,
            p_fa: Some(0.0),
            p_fa_lo: Some(0.0),
            p_fa_hi: Some(3.841e-5),
            p_md: None,
            p_md_lo: None,
            p_md_hi: None,
            xi: Some(0.1 + 0.2),
            ima: Some(0.987_654_321_012_345_6),
            ima_lo: Some(0.98),
            ima_hi: Some(0.99),
            n_trials: Some(100_000),
            seed: None,
            note: note.into(),
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![row(20.0, ""), row(1e-7, "undefined: p_md, \"quoted\"")];
        let mut buf = Vec::new();
        write_csv_to(&rows, &mut buf).unwrap();
        let back = read_csv_from(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }
}
