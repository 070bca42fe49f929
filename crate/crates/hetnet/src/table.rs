use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use hetnet_core::CurvePoint;

use crate::error::CliError;

/// CSV column order.
pub const HEADER: [&str; 13] = [
    "scheme",
    "axis_name",
    "axis_value",
    "beta_db",
    "epsilon",
    "lambda_sbs",
    "p_max_dbm",
    "source",
    "p_success",
    "ci_half_width",
    "ase",
    "n_realizations",
    "seed",
];

/// Rows of a run, written as CSV with [`HEADER`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<CurvePoint>,
}

impl ResultTable {
    pub fn new(rows: Vec<CurvePoint>) -> Self {
        ResultTable { rows }
    }

    pub fn extend(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| CliError::io("<csv output>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(CliError::config(format!(
                "unexpected csv header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows = r.deserialize().collect::<Result<Vec<CurvePoint>, _>>()?;
        Ok(ResultTable { rows })
    }

    pub fn write_path(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_path(path: &Path) -> Result<Self, CliError> {
        let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read_csv(file)
    }
}
