//! CSV exchange for datasets and prediction vectors.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::num::fmt_sig17;
use crate::risk::Dataset;

fn csv_err(e: csv::Error) -> Error {
    Error::Dataset(e.to_string())
}

/// Writes `x1..xd,y` with 17 significant digits.
pub fn write_dataset<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=data.d()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(csv_err)?;
    for (x, y) in data.x().iter().zip(data.y()) {
        let rec: Vec<String> = x.iter().chain(std::iter::once(y)).map(|v| fmt_sig17(*v)).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset whose last column is named `y`.
pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().next_back() != Some("y") {
        return Err(Error::Dataset("the last column must be named `y`".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Row {
                row: i,
                source: Box::new(Error::Dataset(e.to_string())),
            })?;
        let (x, y) = vals.split_at(vals.len() - 1);
        xs.push(x.to_vec());
        ys.push(y[0]);
    }
    Dataset::new(xs, ys)
}

/// Reads the first column of a headed CSV as predictions.
pub fn read_predictions<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let v = rec
            .get(0)
            .unwrap_or("")
            .parse::<f64>()
            .map_err(|e| Error::Row {
                row: i,
                source: Box::new(Error::Dataset(e.to_string())),
            })?;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip_is_exact() {
        let d = Dataset::new(
            vec![vec![0.1, -1.0 / 3.0], vec![2.5e-300, 7.0]],
            vec![std::f64::consts::PI, 1e10],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,y\n"));
        assert_eq!(read_dataset(&buf[..]).unwrap(), d);
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_dataset("x1,z\n1,2\n".as_bytes()).is_err());
        assert!(read_dataset("x1,y\n1,abc\n".as_bytes()).is_err());
        assert!(read_dataset("y\n".as_bytes()).is_err());
        assert_eq!(read_predictions("p\n1.5\n2\n".as_bytes()).unwrap(), vec![1.5, 2.0]);
    }
}
