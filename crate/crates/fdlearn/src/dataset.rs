//! Relational tables: typed cells, CSV ingestion, and the attribute
//! ordering that every downstream matrix indexes against.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A single cell. `Missing` is distinct from every token, including the
/// empty string.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Categorical(String),
    Numeric(f64),
    Missing,
}

impl CellValue {
    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }

    /// Text form used when writing CSV. Missing renders as the empty string.
    pub fn render(&self) -> String {
        match self {
            CellValue::Categorical(s) => s.clone(),
            CellValue::Numeric(v) => format!("{v}"),
            CellValue::Missing => String::new(),
        }
    }
}

/// Equality indicator between two cells: 1 iff both are non-missing and
/// equal under their type. Any missing operand compares unequal, so a
/// pair of nulls never counts as agreement.
pub fn equality(a: &CellValue, b: &CellValue) -> u8 {
    match (a, b) {
        (CellValue::Categorical(x), CellValue::Categorical(y)) => u8::from(x == y),
        (CellValue::Numeric(x), CellValue::Numeric(y)) => u8::from(x == y),
        _ => 0,
    }
}

/// Total order used when sorting rows by one attribute: Missing first,
/// then numerics by value, then categorical tokens lexicographically.
pub fn cmp_cells(a: &CellValue, b: &CellValue) -> Ordering {
    use CellValue::*;
    match (a, b) {
        (Missing, Missing) => Ordering::Equal,
        (Missing, _) => Ordering::Less,
        (_, Missing) => Ordering::Greater,
        (Numeric(x), Numeric(y)) => x.total_cmp(y),
        (Numeric(_), Categorical(_)) => Ordering::Less,
        (Categorical(_), Numeric(_)) => Ordering::Greater,
        (Categorical(x), Categorical(y)) => x.cmp(y),
    }
}

/// An immutable column-major table. The schema order is stable and
/// defines the row/column index of every downstream matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<String>,
    columns: Vec<Vec<CellValue>>,
}

impl Dataset {
    pub fn new(schema: Vec<String>, columns: Vec<Vec<CellValue>>) -> Result<Self> {
        if schema.is_empty() {
            return Err(Error::InvalidDataset("no attributes".into()));
        }
        if schema.len() != columns.len() {
            return Err(Error::InvalidDataset(format!(
                "{} attribute names but {} columns",
                schema.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &schema {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateAttribute(name.clone()));
            }
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidDataset("columns of unequal length".into()));
        }
        Ok(Dataset { schema, columns })
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn k(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn column(&self, j: usize) -> &[CellValue] {
        &self.columns[j]
    }

    pub fn cell(&self, row: usize, col: usize) -> &CellValue {
        &self.columns[col][row]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|s| s == name)
    }

    /// Reorder columns to the given attribute order. Every schema name
    /// must appear exactly once.
    pub fn permute_columns(&self, order: &[String]) -> Result<Dataset> {
        if order.len() != self.k() {
            return Err(Error::InvalidParameter(format!(
                "column order names {} attributes, dataset has {}",
                order.len(),
                self.k()
            )));
        }
        let mut columns = Vec::with_capacity(self.k());
        for name in order {
            let idx = self.attribute_index(name).ok_or_else(|| {
                Error::InvalidParameter(format!("unknown attribute `{name}` in column order"))
            })?;
            columns.push(self.columns[idx].clone());
        }
        Dataset::new(order.to_vec(), columns)
    }

    /// Keep only the listed rows (indices into the current ordering).
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&r| c[r].clone()).collect())
            .collect();
        Dataset {
            schema: self.schema.clone(),
            columns,
        }
    }
}

/// CSV ingestion options.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// First row supplies attribute names when true; otherwise names are
    /// synthesized as col0, col1, ...
    pub header: bool,
    /// Tokens treated as missing values.
    pub na_tokens: HashSet<String>,
    /// Columns whose non-missing cells all parse as numbers become numeric.
    pub numeric_detect: bool,
}

impl CsvOptions {
    pub fn default_na_tokens() -> HashSet<String> {
        ["", "NULL", "null", "NaN"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            header: true,
            na_tokens: Self::default_na_tokens(),
            numeric_detect: true,
        }
    }
}

/// Load a comma-delimited file. Quoted fields follow RFC-4180 conventions.
pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_csv_reader(file, options)
}

/// Same as [`load_csv`] but from any reader.
pub fn load_csv_reader<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records = rdr.records();
    let first = match records.next() {
        None => return Err(Error::EmptyInput("csv has no rows".into())),
        Some(rec) => rec?,
    };
    let k = first.len();

    let schema: Vec<String> = if options.header {
        let names: Vec<String> = first.iter().map(|s| s.to_string()).collect();
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateAttribute(name.clone()));
            }
        }
        names
    } else {
        (0..k).map(|i| format!("col{i}")).collect()
    };

    let mut raw: Vec<Vec<String>> = Vec::new();
    if !options.header {
        raw.push(first.iter().map(|s| s.to_string()).collect());
    }
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != k {
            return Err(Error::RaggedRow {
                row: i + 2, // 1-based, counting the first physical row
                expected: k,
                found: rec.len(),
            });
        }
        raw.push(rec.iter().map(|s| s.to_string()).collect());
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput("csv has a header but no data rows".into()));
    }

    let n = raw.len();
    let mut columns: Vec<Vec<CellValue>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut col: Vec<CellValue> = Vec::with_capacity(n);
        let mut all_numeric = true;
        for row in &raw {
            let tok = &row[j];
            if options.na_tokens.contains(tok) {
                col.push(CellValue::Missing);
            } else {
                if all_numeric && tok.parse::<f64>().is_err() {
                    all_numeric = false;
                }
                col.push(CellValue::Categorical(tok.clone()));
            }
        }
        if options.numeric_detect && all_numeric && col.iter().any(|c| !c.is_missing()) {
            for cell in col.iter_mut() {
                if let CellValue::Categorical(tok) = cell {
                    *cell = CellValue::Numeric(tok.parse::<f64>().expect("checked above"));
                }
            }
        }
        columns.push(col);
    }

    Dataset::new(schema, columns)
}

/// Write the dataset back out as CSV with a header row. Missing cells
/// render as empty fields.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(d.schema())?;
    for row in 0..d.n() {
        let rec: Vec<String> = (0..d.k()).map(|j| d.cell(row, j).render()).collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}
