//! Dense matrix CSV: a `rows,cols` header record followed by one record per
//! row. Values are written in shortest round-trip form, so reading back is
//! exact.

use std::fs::{self, File};
use std::path::Path;

use super::{Histogram, OtError, TransportProblem};
use crate::numerics::Mat;

const PARTS: [&str; 8] = ["cost", "mu_s", "mu_t", "lap_s", "lap_t", "xs", "xt", "params"];

fn io_err(path: &Path, e: impl std::fmt::Display) -> OtError {
    OtError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn write_matrix_csv(path: &Path, m: &Mat) -> Result<(), OtError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(file);
    let (r, c) = m.shape();
    w.write_record([r.to_string(), c.to_string()])
        .map_err(|e| io_err(path, e))?;
    for i in 0..r {
        w.write_record(m.row(i).iter().map(|v| v.to_string()))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<Mat, OtError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut records = rd.records();
    let header = records
        .next()
        .ok_or_else(|| io_err(path, "missing dimension header"))?
        .map_err(|e| io_err(path, e))?;
    let dims: Vec<usize> = header
        .iter()
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| io_err(path, format!("bad dimension header: {e}")))?;
    let [rows, cols] = dims[..] else {
        return Err(io_err(path, "dimension header must have two fields"));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        if rec.len() != cols {
            return Err(io_err(
                path,
                format!("row {line} has {} fields, expected {cols}", rec.len()),
            ));
        }
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| io_err(path, format!("row {line}, column {col}: cannot parse {field:?}")))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        return Err(io_err(
            path,
            format!("expected {rows} rows, found {}", data.len() / cols.max(1)),
        ));
    }
    Ok(Mat::from_vec(rows, cols, data)?)
}

/// Writes one CSV per component into `dir` (created if missing).
pub fn write_problem(dir: &Path, p: &TransportProblem) -> Result<(), OtError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let row = |v: &[f64]| Mat::from_vec(1, v.len(), v.to_vec()).expect("length matches");
    let params = row(&[p.lambda_ent, p.lambda_lap, p.lambda_s, p.lambda_t]);
    let mats = [
        &p.cost,
        &row(p.mu_s.weights()),
        &row(p.mu_t.weights()),
        &p.lap_s,
        &p.lap_t,
        &p.xs,
        &p.xt,
        &params,
    ];
    for (name, m) in PARTS.iter().zip(mats) {
        write_matrix_csv(&dir.join(format!("{name}.csv")), m)?;
    }
    Ok(())
}

pub fn read_problem(dir: &Path) -> Result<TransportProblem, OtError> {
    let mut mats = Vec::with_capacity(PARTS.len());
    for name in PARTS {
        mats.push(read_matrix_csv(&dir.join(format!("{name}.csv")))?);
    }
    let params = mats.pop().expect("eight parts");
    if params.shape() != (1, 4) {
        return Err(io_err(&dir.join("params.csv"), "expected a 1x4 row"));
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().expect("seven parts");
    let cost = next();
    let mu_s = Histogram::new(next().into_vec())?;
    let mu_t = Histogram::new(next().into_vec())?;
    let p = TransportProblem {
        cost,
        mu_s,
        mu_t,
        lap_s: next(),
        lap_t: next(),
        xs: next(),
        xt: next(),
        lambda_ent: params[(0, 0)],
        lambda_lap: params[(0, 1)],
        lambda_s: params[(0, 2)],
        lambda_t: params[(0, 3)],
    };
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::{make_cluster_data, DEFAULT_POSITION_SCALE};

    #[test]
    fn matrix_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = Mat::from_rows(&[vec![0.1, 1.0 / 3.0, -2e-300], vec![1e300, 0.0, -0.0]]).unwrap();
        write_matrix_csv(&path, &m).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2,3\n"));
        assert_eq!(read_matrix_csv(&path).unwrap(), m);
    }

    #[test]
    fn problem_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = make_cluster_data(12, 9, 3, 0.2, 4).unwrap();
        let p = TransportProblem::from_clusters(&data, 0.05, 10.0, 3, DEFAULT_POSITION_SCALE).unwrap();
        write_problem(dir.path(), &p).unwrap();
        let q = read_problem(dir.path()).unwrap();
        assert_eq!(q.cost, p.cost);
        assert_eq!(q.lap_t, p.lap_t);
        assert_eq!(q.mu_s, p.mu_s);
        assert_eq!(q.lambda_lap, p.lambda_lap);
    }

    #[test]
    fn malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "2,2\n1,2\n3\n").unwrap();
        assert!(read_matrix_csv(&path).is_err());
        fs::write(&path, "2,2\n1,2\n").unwrap();
        assert!(read_matrix_csv(&path).is_err());
        fs::write(&path, "2,2\n1,x\n3,4\n").unwrap();
        assert!(read_matrix_csv(&path).is_err());
        assert!(read_matrix_csv(&dir.path().join("missing.csv")).is_err());
    }
}
