//! Report documents and their table, CSV and JSON renderings.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), params: Vec::new(), tables: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_table(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k}: {v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n[{}]", t.name);
            let mut widths: Vec<usize> = t.columns.iter().map(String::len).collect();
            for row in &t.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            for row in &t.rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        for (n, t) in self.tables.iter().enumerate() {
            if n > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# table={}", t.name);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.columns).expect("in-memory write");
            for row in &t.rows {
                w.write_record(row).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input"));
        }
        out
    }

    fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            command: &'a str,
            params: serde_json::Map<String, serde_json::Value>,
            tables: &'a [Table],
        }
        let params = self.params.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
        let doc = Doc { command: &self.command, params, tables: &self.tables };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

pub fn int(n: &BigUint) -> String {
    n.to_string()
}

pub fn rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A real number with 12 significant digits.
pub fn real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..12).contains(&exp) {
        format!("{x:.prec$}", prec = (11 - exp) as usize)
    } else {
        sci
    }
}
