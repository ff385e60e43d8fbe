use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{LabError, Result};

use super::spec::ARTIFACT_VERSION;

/// `# spec_hash=<hash> version=<version>`, the first line of every file.
pub fn header_line(spec_hash: &str) -> String {
    format!("# spec_hash={spec_hash} version={ARTIFACT_VERSION}")
}

/// Reads the hash back out of a header line.
pub fn parse_header(line: &str) -> Option<(String, String)> {
    let rest = line.strip_prefix("# ")?;
    let mut hash = None;
    let mut version = None;
    for part in rest.split_whitespace() {
        if let Some(v) = part.strip_prefix("spec_hash=") {
            hash = Some(v.to_string());
        } else if let Some(v) = part.strip_prefix("version=") {
            version = Some(v.to_string());
        }
    }
    Some((hash?, version?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Long-format CSV with a header comment. Fields are written with `{}`
/// formatting, which round-trips `f64` exactly.
pub struct CsvWriter {
    out: BufWriter<File>,
    width: usize,
    path: PathBuf,
}

impl CsvWriter {
    pub fn create(path: impl Into<PathBuf>, spec_hash: &str, columns: &[&str]) -> Result<Self> {
        let path = path.into();
        let mut out = create(&path)?;
        writeln!(out, "{}", header_line(spec_hash))?;
        writeln!(out, "{}", columns.join(","))?;
        Ok(Self {
            out,
            width: columns.len(),
            path,
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        if fields.len() != self.width {
            return Err(LabError::Config(format!(
                "row has {} fields, header has {}",
                fields.len(),
                self.width
            )));
        }
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        if line.iter().any(|f| f.contains(',') || f.contains('\n')) {
            return Err(LabError::Config("CSV fields may not contain commas or newlines".into()));
        }
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush()?;
        Ok(self.path)
    }
}

/// Formats an optional value; `None` becomes an empty field.
pub fn opt_field<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One JSON object per line after the header comment.
pub fn write_jsonl<T: Serialize>(path: &Path, spec_hash: &str, items: &[T]) -> Result<PathBuf> {
    let mut out = create(path)?;
    writeln!(out, "{}", header_line(spec_hash))?;
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(path.to_path_buf())
}

/// Reads a JSONL file, skipping `#` comment lines.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut items = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line)?);
    }
    Ok(items)
}

/// Parsed CSV: header comment, column names and raw rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub spec_hash: String,
    pub version: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let (spec_hash, version) = lines
            .next()
            .and_then(parse_header)
            .ok_or_else(|| LabError::Parse(format!("{} lacks a header comment", path.display())))?;
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| LabError::Parse("missing column row".into()))?
            .split(',')
            .map(String::from)
            .collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
            return Err(LabError::Parse(format!("ragged row {bad:?}")));
        }
        Ok(Self {
            spec_hash,
            version,
            columns,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    struct Item {
        a: u32,
        b: f64,
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/t.csv");
        let mut w = CsvWriter::create(&p, "abc", &["x", "y"]).unwrap();
        w.row(&["1", &0.1f64.to_string()]).unwrap();
        w.row(&[String::from("2"), opt_field::<f64>(None)]).unwrap();
        assert!(w.row(&["1"]).is_err());
        assert!(w.row(&["1,2", "3"]).is_err());
        w.finish().unwrap();
        let t = CsvTable::read(&p).unwrap();
        assert_eq!(t.spec_hash, "abc");
        assert_eq!(t.version, ARTIFACT_VERSION);
        assert_eq!(t.column("y").unwrap(), vec!["0.1", ""]);
        assert_eq!(t.column("y").unwrap()[0].parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        let items = vec![Item { a: 1, b: 1.0 / 3.0 }, Item { a: 2, b: -0.0 }];
        write_jsonl(&p, "h", &items).unwrap();
        let back: Vec<Item> = read_jsonl(&p).unwrap();
        assert_eq!(back, items);
        let first = fs::read_to_string(&p).unwrap().lines().next().unwrap().to_string();
        assert_eq!(parse_header(&first).unwrap().0, "h");
    }
}
