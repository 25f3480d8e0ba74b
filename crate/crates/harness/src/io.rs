//! Dataset ingestion and dense matrix persistence.

use std::io::{Read, Write};
use std::path::Path;

use rada_core::linalg::Mat;
use rada_core::problem::Dataset;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Keep only the first of several identical rows (features and label).
    pub dedup: bool,
    /// Zero-based sample indices to drop, counted after the header.
    pub drop_rows: Vec<usize>,
    /// Rescale every feature to `[0, 1]` over the kept samples; constant
    /// features become 0.
    pub min_max: bool,
}

pub fn min_max_scale(points: &mut Mat) {
    for mut row in points.row_iter_mut() {
        let lo = row.min();
        let span = row.max() - lo;
        row.apply(|v| *v = if span > 0.0 { (*v - lo) / span } else { 0.0 });
    }
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &str, source: csv::Error) -> HarnessError {
    HarnessError::Csv {
        path: path.to_string(),
        source,
    }
}

pub fn load_dataset_csv(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let name = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    parse_dataset_csv(file, &path.display().to_string(), &name, opts)
}

/// One sample per row, numeric features, class label in the last column.
/// A first row with a non-numeric feature is taken as a header.
pub fn parse_dataset_csv<R: Read>(input: R, origin: &str, name: &str, opts: &LoadOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let parse_err = |line: usize, reason: String| HarnessError::Parse {
        path: origin.to_string(),
        line,
        reason,
    };
    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut width = None;
    let mut sample = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(origin, e))?;
        let line = i + 1;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() < 2 {
            return Err(parse_err(line, "need at least one feature and a label".into()));
        }
        let features: Vec<&str> = rec.iter().take(rec.len() - 1).collect();
        let parsed: Vec<Option<f64>> = features.iter().map(|s| s.parse::<f64>().ok()).collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(parse_err(line, format!("expected {w} fields, found {}", rec.len())));
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(features.len());
        for (s, v) in features.iter().zip(parsed) {
            match v {
                Some(v) if v.is_finite() => values.push(v),
                _ => return Err(parse_err(line, format!("non-numeric feature `{s}`"))),
            }
        }
        let keep = !opts.drop_rows.contains(&sample);
        sample += 1;
        if !keep {
            continue;
        }
        let entry = (values, rec[rec.len() - 1].to_string());
        if opts.dedup && rows.contains(&entry) {
            continue;
        }
        rows.push(entry);
    }
    if rows.is_empty() {
        return Err(rada_core::Error::EmptyInput.into());
    }
    let d = rows[0].0.len();
    let mut points = Mat::from_fn(d, rows.len(), |i, j| rows[j].0[i]);
    if opts.min_max {
        min_max_scale(&mut points);
    }
    let mut names: Vec<String> = Vec::new();
    let labels = rows
        .iter()
        .map(|(_, l)| match names.iter().position(|n| n == l) {
            Some(p) => p,
            None => {
                names.push(l.clone());
                names.len() - 1
            }
        })
        .collect();
    Ok(Dataset::new(points, Some(labels), name)?)
}

/// Dense row-major CSV without a header.
pub fn write_matrix_csv(path: &Path, m: &Mat) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_matrix(file, m).map_err(|e| io_err(path, e))
}

pub fn write_matrix<W: Write>(mut out: W, m: &Mat) -> std::io::Result<()> {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

pub fn read_matrix_csv(path: &Path) -> Result<Mat> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    read_matrix(file, &path.display().to_string())
}

pub fn read_matrix<R: Read>(input: R, origin: &str) -> Result<Mat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut cols = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(origin, e))?;
        cols = rec.len();
        for s in rec.iter() {
            data.push(s.parse::<f64>().map_err(|_| HarnessError::Parse {
                path: origin.to_string(),
                line: i + 1,
                reason: format!("non-numeric entry `{s}`"),
            })?);
        }
    }
    if data.is_empty() {
        return Err(rada_core::Error::EmptyInput.into());
    }
    Ok(Mat::from_row_slice(data.len() / cols, cols, &data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, opts: &LoadOptions) -> Result<Dataset> {
        parse_dataset_csv(text.as_bytes(), "inline", "t", opts)
    }

    #[test]
    fn two_row_file() {
        let d = parse("1,2,a\n3,4,b\n", &LoadOptions::default()).unwrap();
        assert_eq!(d.points, Mat::from_row_slice(2, 2, &[1.0, 3.0, 2.0, 4.0]));
        assert_eq!(d.labels, Some(vec![0, 1]));
    }

    #[test]
    fn header_is_detected_and_labels_follow_first_appearance() {
        let d = parse("x,y,class\n1,2,b\n3,4,a\n5,6,b\n", &LoadOptions::default()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.labels, Some(vec![0, 1, 0]));
    }

    #[test]
    fn malformed_files_are_rejected() {
        let opts = LoadOptions::default();
        assert!(matches!(parse("1,2,a\n3,b\n", &opts), Err(HarnessError::Parse { line: 2, .. })));
        assert!(matches!(parse("1,2,a\n3,x,b\n", &opts), Err(HarnessError::Parse { line: 2, .. })));
        assert!(matches!(parse("", &opts), Err(HarnessError::Core(rada_core::Error::EmptyInput))));
        assert!(matches!(parse("a,b,c\n", &opts), Err(HarnessError::Core(rada_core::Error::EmptyInput))));
    }

    #[test]
    fn min_max_scaling() {
        let opts = LoadOptions {
            min_max: true,
            ..LoadOptions::default()
        };
        let d = parse("1,5,a\n3,5,b\n2,5,a\n", &opts).unwrap();
        assert_eq!(d.points.row(0).iter().copied().collect::<Vec<_>>(), [0.0, 1.0, 0.5]);
        assert_eq!(d.points.row(1).iter().copied().collect::<Vec<_>>(), [0.0; 3]);
    }

    #[test]
    fn dedup_and_drop() {
        let text = "1,2,a\n3,4,b\n1,2,a\n5,6,c\n";
        assert_eq!(parse(text, &LoadOptions::default()).unwrap().len(), 4);
        let dedup = LoadOptions {
            dedup: true,
            ..LoadOptions::default()
        };
        assert_eq!(parse(text, &dedup).unwrap().len(), 3);
        let drop = LoadOptions {
            drop_rows: vec![1],
            ..LoadOptions::default()
        };
        let d = parse(text, &drop).unwrap();
        assert_eq!(d.points.column(1)[0], 1.0);
        assert_eq!(d.labels, Some(vec![0, 0, 1]));
    }

    #[test]
    fn bundled_iris() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
        let d = load_dataset_csv(&path, &LoadOptions::default()).unwrap();
        assert_eq!((d.dim(), d.len(), d.classes()), (4, 150, Some(3)));
        let opts = LoadOptions {
            dedup: true,
            ..LoadOptions::default()
        };
        assert_eq!(load_dataset_csv(&path, &opts).unwrap().len(), 149);
    }

    #[test]
    fn matrix_round_trip() {
        let m = Mat::from_row_slice(2, 3, &[1.0, -2.5e-300, 3.0, 0.1, 1.0 / 3.0, -7.0]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        assert_eq!(read_matrix(buf.as_slice(), "buf").unwrap(), m);
    }
}
