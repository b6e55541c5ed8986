//! CSV tables with `# key: value` metadata lines, a header row and cells that
//! are either numbers (written with 17 significant digits) or plain text.

use std::fmt::Write as _;

use harmonic_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

fn check_text(s: &str, what: &str) -> Result<()> {
    if s.is_empty() || s.contains([',', '\n', '\r']) || s.starts_with('#') || s.trim() != s {
        return Err(Error::Validation(format!("{what} {s:?} cannot be written to CSV")));
    }
    Ok(())
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Validation(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            if k.is_empty() || k.contains([':', '\n', '\r']) || v.contains(['\n', '\r']) {
                return Err(Error::Validation(format!("metadata {k:?} cannot be written")));
            }
            let _ = writeln!(out, "# {k}: {v}");
        }
        for c in &self.columns {
            check_text(c, "column name")?;
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut cells = Vec::with_capacity(row.len());
            for cell in row {
                cells.push(match cell {
                    Cell::Num(v) => format!("{v:.16e}"),
                    Cell::Text(s) => {
                        check_text(s, "text cell")?;
                        if s.parse::<f64>().is_ok() {
                            return Err(Error::Validation(format!("text cell {s:?} would read back as a number")));
                        }
                        s.clone()
                    }
                });
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Table::default();
        let mut header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if !header {
                if let Some(rest) = raw.strip_prefix('#') {
                    let rest = rest.strip_prefix(' ').unwrap_or(rest);
                    let Some((k, v)) = rest.split_once(": ").filter(|(k, v)| {
                        !k.is_empty() && !k.contains([':', '\r']) && !v.contains('\r')
                    }) else {
                        return Err(Error::Parse { line, msg: "metadata must read '# key: value'".into() });
                    };
                    table.meta.push((k.to_string(), v.to_string()));
                    continue;
                }
                if raw.is_empty() {
                    return Err(Error::Parse { line, msg: "missing header row".into() });
                }
                table.columns = raw.split(',').map(str::to_string).collect();
                for c in &table.columns {
                    check_text(c, "column name").map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                }
                header = true;
                continue;
            }
            let cells: Vec<Cell> = raw
                .split(',')
                .map(|s| match s.parse::<f64>() {
                    Ok(v) => Ok(Cell::Num(v)),
                    Err(_) => check_text(s, "text cell")
                        .map(|_| Cell::Text(s.to_string()))
                        .map_err(|e| Error::Parse { line, msg: e.to_string() }),
                })
                .collect::<Result<_>>()?;
            if cells.len() != table.columns.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} cells, found {}", table.columns.len(), cells.len()),
                });
            }
            table.rows.push(cells);
        }
        if !header {
            return Err(Error::Parse { line: text.lines().count() + 1, msg: "missing header row".into() });
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = Table::new(&["name", "x", "y"]);
        t.push_meta("config-hash", "abc");
        t.push_row(vec!["a".into(), 0.1.into(), (1.0 / 3.0).into()]).unwrap();
        t.push_row(vec!["b".into(), f64::MIN_POSITIVE.into(), (-2.5e300).into()]).unwrap();
        t.push_row(vec!["c".into(), f64::NAN.into(), f64::INFINITY.into()]).unwrap();
        let text = t.to_csv().unwrap();
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.meta("config-hash"), Some("abc"));
        assert_eq!(back.rows[0], t.rows[0]);
        assert_eq!(back.rows[1], t.rows[1]);
        assert!(back.rows[2][1].num().unwrap().is_nan());
        assert_eq!(back.to_csv().unwrap(), text);
    }

    #[test]
    fn seventeen_significant_digits() {
        let mut t = Table::new(&["x"]);
        t.push_row(vec![0.1.into()]).unwrap();
        assert_eq!(t.to_csv().unwrap(), "x\n1.0000000000000001e-1\n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(Table::parse("").is_err());
        assert!(Table::parse("# no separator\nx\n").is_err());
        assert!(matches!(Table::parse("x,y\n1,2\n3\n"), Err(Error::Parse { line: 3, .. })));
        assert!(Table::parse("x,y\n1,\n").is_err());
        let mut t = Table::new(&["x"]);
        t.push_row(vec!["1.5".into()]).unwrap();
        assert!(t.to_csv().is_err());
        assert!(t.push_row(vec![]).is_err());
    }
}
