use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// A named, unit-annotated column. The CSV header cell is `name[unit]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

/// Rectangular numeric results plus an ordered provenance block. Serialized
/// form: `# `-prefixed provenance lines, one header row, then data rows.
/// Floats are written in shortest round-trip form, so serialize -> parse ->
/// serialize is byte-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub provenance: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        ResultTable {
            provenance: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.provenance.push(format!("{key} = {value}"));
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column values looked up by bare name (unit suffix ignored).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            let _ = writeln!(out, "# {line}");
        }
        let header: Vec<String> = self.columns.iter().map(|c| c.header()).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| CliError::io(path.display().to_string(), e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut provenance = Vec::new();
        let mut columns: Option<Vec<Column>> = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let loc = || format!("csv line {}", lineno + 1);
            if let Some(rest) = line.strip_prefix("# ") {
                if columns.is_some() {
                    return Err(CliError::config(&loc(), "provenance after header"));
                }
                provenance.push(rest.to_string());
                continue;
            }
            if line.is_empty() {
                continue;
            }
            match &columns {
                None => {
                    let mut cols = Vec::new();
                    for cell in line.split(',') {
                        let open = cell.find('[').ok_or_else(|| {
                            CliError::config(&loc(), format!("header cell `{cell}` lacks [unit]"))
                        })?;
                        if !cell.ends_with(']') {
                            return Err(CliError::config(
                                &loc(),
                                format!("header cell `{cell}` lacks closing ]"),
                            ));
                        }
                        cols.push(Column::new(&cell[..open], &cell[open + 1..cell.len() - 1]));
                    }
                    columns = Some(cols);
                }
                Some(cols) => {
                    let cells: Vec<&str> = line.split(',').collect();
                    if cells.len() != cols.len() {
                        return Err(CliError::config(
                            &loc(),
                            format!("expected {} cells, got {}", cols.len(), cells.len()),
                        ));
                    }
                    let mut row = Vec::with_capacity(cells.len());
                    for cell in cells {
                        row.push(cell.parse::<f64>().map_err(|_| {
                            CliError::config(&loc(), format!("bad float `{cell}`"))
                        })?);
                    }
                    rows.push(row);
                }
            }
        }
        let columns =
            columns.ok_or_else(|| CliError::config("csv", "missing header line"))?;
        Ok(ResultTable {
            provenance,
            columns,
            rows,
        })
    }
}
