//! Result tables and their CSV/JSON encodings.
//!
//! Both encodings carry the numeric columns followed by a string `error`
//! column. Missing values are empty cells in CSV and `null` in JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

pub const ERROR_COLUMN: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Numeric column names; the error column is implicit.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    fn check(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(CliError::Table("nothing to write: the table is empty".into()));
        }
        if let Some(row) = self.rows.iter().find(|r| r.values.len() != self.columns.len()) {
            return Err(CliError::Table(format!(
                "row has {} values for {} columns",
                row.values.len(),
                self.columns.len()
            )));
        }
        Ok(())
    }
}

fn table_err(e: impl std::fmt::Display) -> CliError {
    CliError::Table(e.to_string())
}

fn format_value(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    table.check()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.columns.iter().map(String::as_str).chain([ERROR_COLUMN]))
        .map_err(table_err)?;
    for row in &table.rows {
        let mut record: Vec<String> = row.values.iter().map(|&v| format_value(v)).collect();
        record.push(row.error.clone().unwrap_or_default());
        w.write_record(&record).map_err(table_err)?;
    }
    w.flush().map_err(table_err)
}

pub fn write_json<W: Write>(table: &Table, mut out: W) -> Result<()> {
    table.check()?;
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, v) in table.columns.iter().zip(&row.values) {
                let value = v.and_then(Number::from_f64).map_or(Value::Null, Value::Number);
                obj.insert(name.clone(), value);
            }
            obj.insert(
                ERROR_COLUMN.into(),
                row.error.clone().map_or(Value::Null, Value::String),
            );
            Value::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &rows).map_err(table_err)?;
    writeln!(out).map_err(table_err)
}

pub fn read_table_csv(text: &[u8]) -> Result<Table> {
    let mut r = csv::Reader::from_reader(text);
    let header = r.headers().map_err(table_err)?.clone();
    let names: Vec<&str> = header.iter().collect();
    let Some((&last, columns)) = names.split_last() else {
        return Err(CliError::Table("missing header".into()));
    };
    if last != ERROR_COLUMN {
        return Err(CliError::Table(format!(
            "last column must be `{ERROR_COLUMN}`, got `{last}`"
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(table_err)?;
        if record.len() != names.len() {
            return Err(CliError::Table(format!(
                "record has {} fields, header has {}",
                record.len(),
                names.len()
            )));
        }
        let values = record
            .iter()
            .take(columns.len())
            .map(|cell| match cell {
                "" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| CliError::Table(format!("`{s}` is not a number"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let error = Some(&record[columns.len()])
            .filter(|e| !e.is_empty())
            .map(str::to_string);
        rows.push(Row { values, error });
    }
    Ok(Table {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

pub fn read_table_json(text: &str) -> Result<Table> {
    let value: Value = serde_json::from_str(text).map_err(table_err)?;
    let Value::Array(items) = value else {
        return Err(CliError::Table("expected an array of objects".into()));
    };
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for item in items {
        let Value::Object(obj) = item else {
            return Err(CliError::Table("expected an array of objects".into()));
        };
        let keys: Vec<String> = obj.keys().cloned().collect();
        if keys.last().map(String::as_str) != Some(ERROR_COLUMN) {
            return Err(CliError::Table(format!("last key must be `{ERROR_COLUMN}`")));
        }
        let names = &keys[..keys.len() - 1];
        match &columns {
            Some(c) if c != names => return Err(CliError::Table("objects have different keys".into())),
            Some(_) => {}
            None => columns = Some(names.to_vec()),
        }
        let values = names
            .iter()
            .map(|k| match &obj[k] {
                Value::Null => Ok(None),
                Value::Number(n) => Ok(n.as_f64()),
                other => Err(CliError::Table(format!("`{k}`: expected a number, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let error = match &obj[ERROR_COLUMN] {
            Value::Null => None,
            Value::String(s) => Some(s.clone()),
            other => return Err(CliError::Table(format!("error: expected a string, got {other}"))),
        };
        rows.push(Row { values, error });
    }
    Ok(Table {
        columns: columns.unwrap_or_default(),
        rows,
    })
}
