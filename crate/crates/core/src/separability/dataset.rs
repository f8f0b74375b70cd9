use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{ModelParams, RngSeed};

/// How a simulated dataset was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub params: ModelParams,
    pub seed: RngSeed,
    pub kappa: f64,
}

/// `n` observations: an `n x p` covariate matrix and labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<f64>,
    meta: Option<DatasetMeta>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        let data = Self { x, y, meta: None };
        data.validate()?;
        Ok(data)
    }

    pub fn with_meta(mut self, meta: DatasetMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let (n, p) = self.x.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidDataset(format!("need n >= 1 and p >= 1, got {n} x {p}")));
        }
        if self.y.len() != n {
            return Err(Error::InvalidDataset(format!("{n} rows but {} labels", self.y.len())));
        }
        if let Some(bad) = self.y.iter().find(|v| v.abs() != 1.0) {
            return Err(Error::InvalidDataset(format!("labels must be -1 or +1, got {bad}")));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariate matrix has a non-finite entry".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn meta(&self) -> Option<&DatasetMeta> {
        self.meta.as_ref()
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.x.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Reads a CSV with a header row, a `y` column and one column per
    /// covariate (all other columns, in order). Labels may be `{-1, 1}` or
    /// `{0, 1}`; the latter are mapped to `{-1, 1}`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let y_col = headers
            .iter()
            .position(|h| h == "y")
            .ok_or_else(|| Error::InvalidDataset("no `y` column in header".into()))?;
        let p = headers.len() - 1;
        if p == 0 {
            return Err(Error::InvalidDataset("no covariate columns".into()));
        }
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            for (k, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::InvalidDataset(format!("row {}: cannot parse `{field}` as a number", line + 1))
                })?;
                if k == y_col {
                    labels.push(v);
                } else {
                    values.push(v);
                }
            }
        }
        let n = labels.len();
        let zero_one = labels.iter().all(|&v| v == 0.0 || v == 1.0) && labels.contains(&0.0);
        if zero_one {
            labels.iter_mut().for_each(|v| *v = 2.0 * *v - 1.0);
        }
        if n == 0 {
            return Err(Error::InvalidDataset("no data rows".into()));
        }
        Self::new(DMatrix::from_row_slice(n, p, &values), labels)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// CSV in the format read by [`from_csv_reader`](Self::from_csv_reader).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("y");
        for j in 1..=self.p() {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for i in 0..self.n() {
            out.push_str(&format!("{}", self.y[i]));
            for j in 0..self.p() {
                out.push_str(&format!(",{}", self.x[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Dataset::new(DMatrix::zeros(0, 1), vec![]).is_err());
        assert!(Dataset::new(DMatrix::zeros(2, 1), vec![1.0]).is_err());
        assert!(Dataset::new(DMatrix::zeros(2, 1), vec![1.0, 0.5]).is_err());
        let mut x = DMatrix::zeros(2, 1);
        x[(1, 0)] = f64::NAN;
        assert!(matches!(Dataset::new(x, vec![1.0, -1.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn csv_label_mapping() {
        let a = Dataset::from_csv_reader("y,x1\n0,-1.5\n1,2\n".as_bytes()).unwrap();
        let b = Dataset::from_csv_reader("y,x1\n-1,-1.5\n1,2\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.y(), &[-1.0, 1.0]);
        // y need not be the first column.
        let c = Dataset::from_csv_reader("x1, y\n-1.5,-1\n2,1\n".as_bytes()).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn csv_errors() {
        assert!(Dataset::from_csv_reader("x1,x2\n1,2\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("y\n1\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("y,x1\n1,abc\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("y,x1\n2,1\n".as_bytes()).is_err());
        assert!(Dataset::from_csv_reader("y,x1\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = Dataset::new(DMatrix::from_row_slice(2, 2, &[0.25, -1.0, 3.5, 1e-3]), vec![1.0, -1.0]).unwrap();
        assert_eq!(Dataset::from_csv_reader(d.to_csv_string().as_bytes()).unwrap(), d);
    }
}
