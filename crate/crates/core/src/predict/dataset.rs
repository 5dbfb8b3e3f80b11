use std::io::{BufRead, Write};

use crate::{Error, Result};

/// Rows of numeric features with binary labels and the cluster each row
/// came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<u8>,
    ids: Vec<u64>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        ids: Vec<u64>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("dataset has no rows".into()));
        }
        if labels.len() != rows.len() || ids.len() != rows.len() {
            return Err(Error::InvalidInput("rows, labels and ids differ in length".into()));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::InvalidInput(format!(
                "row {r} has {} values for {} features",
                rows[r].len(),
                feature_names.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite feature value".into()));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidInput("labels must be 0 or 1".into()));
        }
        Ok(Dataset {
            feature_names,
            rows,
            labels,
            ids,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Always false: construction rejects empty datasets.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.feature_names.clone(),
            indices.iter().map(|&i| self.rows[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            indices.iter().map(|&i| self.ids[i]).collect(),
        )
    }

    /// Header of feature names then `label,cluster_id`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{},label,cluster_id", self.feature_names.join(","))?;
        for ((row, label), id) in self.rows.iter().zip(&self.labels).zip(&self.ids) {
            for v in row {
                write!(out, "{v},")?;
            }
            writeln!(out, "{label},{id}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Dataset> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing header"))??;
        let mut names: Vec<String> = header.split(',').map(str::to_string).collect();
        if names.len() < 2 || names[names.len() - 2..] != ["label", "cluster_id"] {
            return Err(Error::parse(1, "header must end with label,cluster_id"));
        }
        names.truncate(names.len() - 2);
        let (mut rows, mut labels, mut ids) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() + 2 {
                return Err(Error::parse(lineno, "wrong number of fields"));
            }
            let row = fields[..names.len()]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| Error::parse(lineno, format!("bad number `{f}`"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
            labels.push(
                fields[names.len()]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad label"))?,
            );
            ids.push(
                fields[names.len() + 1]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad cluster id"))?,
            );
        }
        Dataset::new(names, rows, labels, ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 0.5], vec![2.0, -3.25], vec![0.0, 1e-3]],
            vec![0, 1, 1],
            vec![7, 8, 9],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let names = vec!["a".to_string()];
        assert!(Dataset::new(names.clone(), vec![], vec![], vec![]).is_err());
        assert!(Dataset::new(names.clone(), vec![vec![1.0, 2.0]], vec![0], vec![0]).is_err());
        assert!(Dataset::new(names.clone(), vec![vec![f64::NAN]], vec![0], vec![0]).is_err());
        assert!(Dataset::new(names.clone(), vec![vec![1.0]], vec![2], vec![0]).is_err());
        assert!(Dataset::new(names, vec![vec![1.0]], vec![1], vec![]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = tiny();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a,b,label,cluster_id\n1,0.5,0,7\n"));
        assert_eq!(Dataset::read_csv(text.as_bytes()).unwrap(), d);
        assert!(Dataset::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(Dataset::read_csv("a,label,cluster_id\nx,0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn subsets_and_counts() {
        let d = tiny();
        assert_eq!(d.class_counts(), [1, 2]);
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.ids(), &[9, 7]);
        assert_eq!(s.column(0), vec![0.0, 1.0]);
    }
}
