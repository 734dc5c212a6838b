use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::RunError;

/// `<out>/<name>/`, created on demand.
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path, name: &str) -> Result<Self, RunError> {
        let dir = root.join(name);
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write_json<T: Serialize>(&self, file: &str, value: &T) -> Result<(), RunError> {
        let mut f = fs::File::create(self.dir.join(file))?;
        serde_json::to_writer_pretty(&mut f, value)?;
        writeln!(f)?;
        Ok(())
    }

    pub fn write_config(&self, cfg: &ExperimentConfig) -> Result<(), RunError> {
        self.write_json("resolved-config.json", cfg)
    }

    /// CSV whose first line is a `#` comment with the resolved parameters,
    /// followed by the column header (units in brackets where they apply).
    pub fn write_csv(&self, file: &str, params: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
        let mut f = fs::File::create(self.dir.join(file))?;
        writeln!(f, "# {params}")?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Full-precision float for CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
