// SPDX-License-Identifier: MIT OR Apache-2.0

//! Frame tables as CSV, versioned JSON or aligned text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameRecord;

pub const SCHEMA: &str = "k3lat.frames/1";

pub const COLUMNS: [&str; 7] = ["W", "N_root", "W_root", "W/W_root", "|Δ(W)|", "|O(W)|", "multiplicity"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(Error::Parse(format!("unknown format `{s}`"))),
        }
    }
}

/// One emitted row. `aut_order` is a decimal string (it exceeds `u64`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub w: String,
    pub n_root: String,
    pub w_root: String,
    pub quotient: String,
    pub roots: usize,
    pub aut_order: String,
    pub multiplicity: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<i64>>>,
}

impl TableRow {
    /// Row for a frame record; unlabelled frames are numbered `#k` by position.
    pub fn from_record(r: &FrameRecord, index: usize, with_gram: bool) -> Self {
        TableRow {
            w: r.label.clone().unwrap_or_else(|| format!("#{}", index + 1)),
            n_root: r.n_root().to_string(),
            w_root: r.w_root.clone(),
            quotient: r.quotient(),
            roots: r.roots,
            aut_order: r.aut_order.to_string(),
            multiplicity: r.multiplicity,
            gram: with_gram.then(|| r.gram.clone()),
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.w.clone(),
            self.n_root.clone(),
            self.w_root.clone(),
            self.quotient.clone(),
            self.roots.to_string(),
            self.aut_order.clone(),
            self.multiplicity.to_string(),
        ]
    }
}

pub fn rows_from_records(records: &[FrameRecord], with_gram: bool) -> Vec<TableRow> {
    records.iter().enumerate().map(|(i, r)| TableRow::from_record(r, i, with_gram)).collect()
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    schema: String,
    columns: Vec<String>,
    rows: Vec<TableRow>,
}

/// Serializes rows in a stable column order. The `gram` column is present
/// exactly when `with_gram` is set; an empty row list gives a header only.
pub fn emit_table(rows: &[TableRow], format: Format, with_gram: bool) -> Result<String> {
    let mut header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    if with_gram {
        header.push("gram".into());
    }
    let cells = |r: &TableRow| -> Vec<String> {
        let mut c = r.cells();
        if with_gram {
            c.push(serde_json::to_string(&r.gram.clone().unwrap_or_default()).expect("serializable"));
        }
        c
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
            for r in rows {
                w.write_record(cells(r)).map_err(|e| Error::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8"))
        }
        Format::Json => {
            let rows = rows
                .iter()
                .map(|r| TableRow { gram: if with_gram { Some(r.gram.clone().unwrap_or_default()) } else { None }, ..r.clone() })
                .collect();
            let t = JsonTable { schema: SCHEMA.into(), columns: header, rows };
            Ok(serde_json::to_string_pretty(&t).expect("serializable") + "\n")
        }
        Format::Text => {
            let body: Vec<Vec<String>> = rows.iter().map(|r| r.cells()).collect();
            let widths: Vec<usize> = (0..COLUMNS.len())
                .map(|i| body.iter().map(|r| r[i].chars().count()).chain([COLUMNS[i].chars().count()]).max().unwrap())
                .collect();
            let line = |c: Vec<String>| -> String {
                c.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}", w = *w)).collect::<Vec<_>>().join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(COLUMNS.iter().map(|s| s.to_string()).collect());
            for r in body {
                out += &line(r);
            }
            if with_gram {
                for r in rows {
                    out += &format!("{}: {}\n", r.w, serde_json::to_string(&r.gram.clone().unwrap_or_default()).expect("serializable"));
                }
            }
            Ok(out)
        }
    }
}

/// Parses CSV or JSON produced by [`emit_table`].
pub fn parse_table(text: &str, format: Format) -> Result<Vec<TableRow>> {
    match format {
        Format::Json => {
            let t: JsonTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            if t.schema != SCHEMA {
                return Err(Error::Parse(format!("unsupported schema `{}`", t.schema)));
            }
            Ok(t.rows)
        }
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
            let with_gram = header.len() == COLUMNS.len() + 1;
            if header.iter().take(COLUMNS.len()).ne(COLUMNS.iter().copied()) {
                return Err(Error::Parse("unexpected CSV header".into()));
            }
            let mut out = vec![];
            for rec in r.records() {
                let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
                let num = |i: usize| rec[i].parse::<u64>().map_err(|e| Error::Parse(format!("column {}: {e}", COLUMNS[i])));
                out.push(TableRow {
                    w: rec[0].to_string(),
                    n_root: rec[1].to_string(),
                    w_root: rec[2].to_string(),
                    quotient: rec[3].to_string(),
                    roots: num(4)? as usize,
                    aut_order: rec[5].to_string(),
                    multiplicity: num(6)?,
                    gram: if with_gram { Some(serde_json::from_str(&rec[7]).map_err(|e| Error::Parse(e.to_string()))?) } else { None },
                });
            }
            Ok(out)
        }
        Format::Text => Err(Error::Parse("text tables are not parseable".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(w: &str, gram: Option<Vec<Vec<i64>>>) -> TableRow {
        TableRow {
            w: w.into(),
            n_root: "D8^3".into(),
            w_root: "D8^2".into(),
            quotient: "Z + Z/2Z".into(),
            roots: 224,
            aut_order: "106542032486400".into(),
            multiplicity: 1,
            gram,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = emit_table(&[], Format::Csv, false).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(parse_table(&csv, Format::Csv).unwrap().is_empty());
        let json = emit_table(&[], Format::Json, false).unwrap();
        assert!(parse_table(&json, Format::Json).unwrap().is_empty());
    }

    #[test]
    fn round_trip_with_gram() {
        let rows = vec![row("W11", Some(vec![vec![-2, 1], vec![1, -4]])), row("W12", Some(vec![vec![-2]]))];
        for f in [Format::Csv, Format::Json] {
            let s = emit_table(&rows, f, true).unwrap();
            assert_eq!(parse_table(&s, f).unwrap(), rows);
        }
        let plain: Vec<TableRow> = rows.iter().map(|r| TableRow { gram: None, ..r.clone() }).collect();
        for f in [Format::Csv, Format::Json] {
            let s = emit_table(&rows, f, false).unwrap();
            assert_eq!(parse_table(&s, f).unwrap(), plain);
        }
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut r = row("W1", None);
        r.n_root = "A1,A2".into();
        let s = emit_table(&[r.clone()], Format::Csv, false).unwrap();
        assert!(s.contains("\"A1,A2\""));
        assert_eq!(parse_table(&s, Format::Csv).unwrap(), vec![r]);
    }
}
