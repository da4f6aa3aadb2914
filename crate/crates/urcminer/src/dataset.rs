//! Tabular data exchanged between pipeline stages: named columns, one row per
//! comment, optional labels. Serialized as CSV with `#` metadata lines.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::real::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    pub feature_names: Vec<String>,
    pub ids: Vec<i64>,
    pub labels: Option<Vec<String>>,
    pub rows: Vec<Vec<R>>,
    /// Free-form metadata carried through CSV `# key=value` lines.
    pub meta: BTreeMap<String, String>,
}

impl<R: Real> Matrix<R> {
    pub fn new(feature_names: Vec<String>) -> Self {
        Matrix { feature_names, ids: Vec::new(), labels: None, rows: Vec::new(), meta: BTreeMap::new() }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn push_row(&mut self, id: i64, row: Vec<R>, label: Option<String>) {
        assert_eq!(row.len(), self.feature_names.len(), "row width mismatch");
        self.ids.push(id);
        self.rows.push(row);
        match (&mut self.labels, label) {
            (Some(labels), Some(l)) => labels.push(l),
            (None, Some(l)) => {
                assert!(self.rows.len() == 1, "labels must be present from the first row");
                self.labels = Some(vec![l]);
            }
            (Some(_), None) => panic!("label missing for labeled matrix"),
            (None, None) => {}
        }
    }

    /// Horizontal concatenation; both sides must carry the same row ids in
    /// the same order.
    pub fn hstack(&self, other: &Matrix<R>) -> Result<Matrix<R>> {
        if self.ids != other.ids {
            return Err(Error::Schema("hstack: row ids differ between matrices".into()));
        }
        let mut names = self.feature_names.clone();
        names.extend(other.feature_names.iter().cloned());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().copied());
                r
            })
            .collect();
        Ok(Matrix {
            feature_names: names,
            ids: self.ids.clone(),
            labels: self.labels.clone().or_else(|| other.labels.clone()),
            rows,
            meta: self.meta.clone(),
        })
    }

    /// Reorders columns to match `names`; errors on the first column that is
    /// missing or unexpected.
    pub fn align_to(&self, names: &[String]) -> Result<Matrix<R>> {
        let mut index = BTreeMap::new();
        for (i, n) in self.feature_names.iter().enumerate() {
            index.insert(n.as_str(), i);
        }
        let mut order = Vec::with_capacity(names.len());
        for n in names {
            match index.get(n.as_str()) {
                Some(&i) => order.push(i),
                None => return Err(Error::Schema(format!("missing column {n:?}"))),
            }
        }
        if names.len() != self.feature_names.len() {
            let extra = self
                .feature_names
                .iter()
                .find(|n| !names.contains(n))
                .cloned()
                .unwrap_or_default();
            return Err(Error::Schema(format!("unexpected column {extra:?}")));
        }
        Ok(Matrix {
            feature_names: names.to_vec(),
            ids: self.ids.clone(),
            labels: self.labels.clone(),
            rows: self.rows.iter().map(|r| order.iter().map(|&i| r[i]).collect()).collect(),
            meta: self.meta.clone(),
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<writer>", e);
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}").map_err(io)?;
        }
        writeln!(w, "comment_id,label,{}", self.feature_names.join(",")).map_err(io)?;
        for (i, row) in self.rows.iter().enumerate() {
            let label = self.labels.as_ref().map(|l| l[i].as_str()).unwrap_or("");
            let values: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            writeln!(w, "{},{},{}", self.ids[i], label, values.join(",")).map_err(io)?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<Rd: std::io::Read>(r: Rd) -> Result<Matrix<R>> {
        let mut meta = BTreeMap::new();
        let mut lines = BufReader::new(r).lines();
        let header = loop {
            match lines.next() {
                None => return Err(Error::Schema("empty feature CSV".into())),
                Some(line) => {
                    let line = line.map_err(|e| Error::io("<reader>", e))?;
                    if let Some(rest) = line.strip_prefix('#') {
                        if let Some((k, v)) = rest.trim().split_once('=') {
                            meta.insert(k.trim().to_string(), v.trim().to_string());
                        }
                        continue;
                    }
                    break line;
                }
            }
        };
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "comment_id" || cols[1] != "label" {
            return Err(Error::Schema("feature CSV must start with comment_id,label".into()));
        }
        let feature_names: Vec<String> = cols[2..].iter().map(|s| s.to_string()).collect();
        let mut matrix = Matrix::new(feature_names);
        matrix.meta = meta;
        let mut any_label = false;
        let mut labels = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io("<reader>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != matrix.feature_names.len() + 2 {
                return Err(Error::Schema(format!(
                    "feature CSV line {}: expected {} fields, got {}",
                    lineno + 2,
                    matrix.feature_names.len() + 2,
                    fields.len()
                )));
            }
            let id: i64 = fields[0]
                .parse()
                .map_err(|_| Error::Schema(format!("line {}: bad comment id", lineno + 2)))?;
            if !fields[1].is_empty() {
                any_label = true;
            }
            labels.push(fields[1].to_string());
            let row = fields[2..]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map(R::real_from)
                        .map_err(|_| Error::Schema(format!("line {}: bad value {f:?}", lineno + 2)))
                })
                .collect::<Result<Vec<R>>>()?;
            matrix.ids.push(id);
            matrix.rows.push(row);
        }
        if any_label {
            matrix.labels = Some(labels);
        }
        Ok(matrix)
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Matrix<R>> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Matrix::read_csv(f)
    }
}

fn format_value<R: Real>(v: R) -> String {
    let f = v.as_f64();
    if f == f.trunc() && f.abs() < 1e15 {
        format!("{}", f as i64)
    } else {
        // Shortest round-trippable form.
        format!("{f}")
    }
}
