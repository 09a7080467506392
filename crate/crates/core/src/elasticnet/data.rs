//! Classification datasets: the synthetic sparse toy problem and a CSV
//! loader, both with an 80/20 train/test split and feature normalization
//! fitted on the training rows.

use std::fs::File;
use std::path::Path;

use thiserror::Error;

use crate::numerics::{Mat, Rng};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}, column `{column}`: cannot parse `{value}` as a number")]
    Parse { line: u64, column: String, value: String },
    #[error("label column `{0}` not found in header")]
    MissingLabel(String),
    #[error("labels must be binary ({{-1, +1}} or {{0, 1}}), found {value} on line {line}")]
    Label { line: u64, value: f64 },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("dataset needs at least {min} rows, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Features as loaded or generated.
    pub raw: Mat,
    /// Features normalized with the training statistics.
    pub z: Mat,
    pub y: Vec<f64>,
    pub split: Vec<Split>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub feature_names: Vec<String>,
}

/// Number of training rows for `n` samples.
pub fn train_rows(n: usize) -> usize {
    n * 4 / 5
}

impl Dataset {
    /// Splits the first 80% of rows (rounded down) into training and
    /// normalizes every column to zero mean, unit variance on those rows.
    pub fn from_raw(raw: Mat, y: Vec<f64>, feature_names: Vec<String>) -> Result<Self, DataError> {
        if raw.rows() != y.len() {
            return Err(DataError::Dimensions(format!(
                "{} feature rows, {} labels",
                raw.rows(),
                y.len()
            )));
        }
        let n_train = train_rows(raw.rows());
        if n_train == 0 {
            return Err(DataError::TooFew {
                min: 2,
                got: raw.rows(),
            });
        }
        let split: Vec<Split> = (0..raw.rows())
            .map(|i| if i < n_train { Split::Train } else { Split::Test })
            .collect();

        let d = raw.cols();
        let mut mean = vec![0.0; d];
        for i in 0..n_train {
            for (m, v) in mean.iter_mut().zip(raw.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n_train as f64);
        let mut std = vec![0.0; d];
        for i in 0..n_train {
            for ((s, v), m) in std.iter_mut().zip(raw.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in std.iter_mut() {
            *s = (*s / n_train as f64).sqrt();
            if *s <= f64::EPSILON {
                *s = 1.0;
            }
        }
        let z = Mat::from_fn(raw.rows(), d, |i, j| (raw[(i, j)] - mean[j]) / std[j]);
        Ok(Self {
            raw,
            z,
            y,
            split,
            mean,
            std,
            feature_names,
        })
    }

    pub fn n_train(&self) -> usize {
        self.split.iter().filter(|s| **s == Split::Train).count()
    }

    fn rows_of(&self, which: Split) -> (Mat, Vec<f64>) {
        let idx: Vec<usize> = (0..self.y.len()).filter(|&i| self.split[i] == which).collect();
        let z = Mat::from_fn(idx.len(), self.z.cols(), |r, c| self.z[(idx[r], c)]);
        (z, idx.iter().map(|&i| self.y[i]).collect())
    }

    /// Normalized training rows and labels.
    pub fn train(&self) -> (Mat, Vec<f64>) {
        self.rows_of(Split::Train)
    }

    pub fn test(&self) -> (Mat, Vec<f64>) {
        self.rows_of(Split::Test)
    }
}

/// Sparse binary classification: `t` relevant features drawn from
/// `N(±μ, Σ)` with `μ ∈ {-1, +1}ᵗ` and `Σ = AAᵀ/t` (a Wishart draw with
/// `t` degrees of freedom, `A` standard normal), followed by `d - t`
/// standard-normal distractors. Labels are fair coin flips.
pub fn make_toy_classification(n: usize, d: usize, t: usize, seed: u64) -> Result<Dataset, DataError> {
    if t < 1 || t > d {
        return Err(DataError::Dimensions(format!("need 1 <= T <= d, got T = {t}, d = {d}")));
    }
    if n < 10 {
        return Err(DataError::TooFew { min: 10, got: n });
    }
    let mut rng = Rng::new(seed);
    let mu: Vec<f64> = (0..t).map(|_| rng.sign()).collect();
    let scale = 1.0 / (t as f64).sqrt();
    let a = Mat::from_fn(t, t, |_, _| rng.normal() * scale);

    let mut y = Vec::with_capacity(n);
    let mut raw = Mat::zeros(n, d);
    for i in 0..n {
        let label = rng.sign();
        y.push(label);
        let xi = rng.normal_vec(t);
        let correlated = a.matvec(&xi);
        let row = raw.row_mut(i);
        for j in 0..t {
            row[j] = label * mu[j] + correlated[j];
        }
        for v in row.iter_mut().skip(t) {
            *v = rng.normal();
        }
    }
    let names = (0..d).map(|j| format!("x{j}")).collect();
    Dataset::from_raw(raw, y, names)
}

/// Reads a comma-separated file with a header row. `label_column` names the
/// target; every other column is a numeric feature.
pub fn load_csv_dataset(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| DataError::MissingLabel(label_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(DataError::Ragged {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for (i, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                line,
                column: headers[i].trim().to_string(),
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DataError::Parse {
                    line,
                    column: headers[i].trim().to_string(),
                    value: field.to_string(),
                });
            }
            if i == label_idx {
                labels.push(value);
            } else {
                features.push(value);
            }
        }
        lines.push(line);
    }

    let zero_one = labels.iter().all(|&v| v == 0.0 || v == 1.0);
    let y = labels
        .iter()
        .zip(&lines)
        .map(|(&v, &line)| match v {
            1.0 => Ok(1.0),
            -1.0 if !zero_one => Ok(-1.0),
            0.0 if zero_one => Ok(-1.0),
            _ => Err(DataError::Label { line, value: v }),
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let raw =
        Mat::from_vec(labels.len(), feature_names.len(), features).map_err(|e| DataError::Dimensions(e.to_string()))?;
    Dataset::from_raw(raw, y, feature_names)
}

/// Writes the raw features and labels in the format [`load_csv_dataset`]
/// reads. Values are printed in shortest round-trip form.
pub fn save_csv_dataset(data: &Dataset, path: impl AsRef<Path>, label_column: &str) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    let mut header: Vec<&str> = data.feature_names.iter().map(String::as_str).collect();
    header.push(label_column);
    writer.write_record(&header)?;
    for i in 0..data.y.len() {
        let mut row: Vec<String> = data.raw.row(i).iter().map(|v| v.to_string()).collect();
        row.push(data.y[i].to_string());
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn toy_shapes_and_split() {
        let ds = make_toy_classification(103, 20, 4, 1).unwrap();
        assert_eq!(ds.z.shape(), (103, 20));
        assert_eq!(ds.y.len(), 103);
        assert_eq!(ds.n_train(), 82);
        assert!(ds.y.iter().all(|&v| v == 1.0 || v == -1.0));
        let (zt, _) = ds.train();
        for j in 0..20 {
            let col: Vec<f64> = (0..zt.rows()).map(|i| zt[(i, j)]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn toy_is_deterministic() {
        let a = make_toy_classification(50, 10, 3, 77).unwrap();
        let b = make_toy_classification(50, 10, 3, 77).unwrap();
        assert_eq!(a, b);
        let c = make_toy_classification(50, 10, 3, 78).unwrap();
        assert_ne!(a.raw, c.raw);
    }

    #[test]
    fn toy_rejects_bad_dimensions() {
        assert!(make_toy_classification(50, 10, 0, 1).is_err());
        assert!(make_toy_classification(50, 10, 11, 1).is_err());
        assert!(make_toy_classification(9, 10, 3, 1).is_err());
    }

    #[test]
    fn test_rows_use_training_statistics() {
        let ds = make_toy_classification(40, 5, 2, 3).unwrap();
        let i = 39;
        assert_eq!(ds.split[i], Split::Test);
        for j in 0..5 {
            assert_eq!(ds.z[(i, j)], (ds.raw[(i, j)] - ds.mean[j]) / ds.std[j]);
        }
    }

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn csv_four_rows() {
        let f = write("a,b,label\n1,2,1\n3,4,-1\n5,6.5,1\n7,8,-1\n");
        let ds = load_csv_dataset(f.path(), "label").unwrap();
        assert_eq!(ds.n_train(), 3);
        assert_eq!(ds.test().1.len(), 1);
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        assert_eq!(ds.raw[(2, 1)], 6.5);
    }

    #[test]
    fn csv_zero_one_labels() {
        let f = write("label,a\n0,1\n1,2\n0,3\n1,4\n");
        let ds = load_csv_dataset(f.path(), "label").unwrap();
        assert_eq!(ds.y, vec![-1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn csv_errors_name_location() {
        let f = write("a,b,label\n1,2,1\n3,oops,-1\n");
        match load_csv_dataset(f.path(), "label").unwrap_err() {
            DataError::Parse { line, column, value } => {
                assert_eq!((line, column.as_str(), value.as_str()), (3, "b", "oops"));
            }
            other => panic!("unexpected {other}"),
        }
        let f = write("a,label\n1,2\n3,1\n");
        assert!(matches!(
            load_csv_dataset(f.path(), "label").unwrap_err(),
            DataError::Label { line: 2, value } if value == 2.0
        ));
        let f = write("a,b\n1,2\n");
        assert!(matches!(
            load_csv_dataset(f.path(), "label"),
            Err(DataError::MissingLabel(_))
        ));
        assert!(matches!(
            load_csv_dataset("/nonexistent/file.csv", "label"),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let ds = make_toy_classification(30, 6, 2, 9).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_csv_dataset(&ds, f.path(), "y").unwrap();
        let back = load_csv_dataset(f.path(), "y").unwrap();
        assert_eq!(back.raw, ds.raw);
        assert_eq!(back.y, ds.y);
        assert_eq!(back.z, ds.z);
    }
}
