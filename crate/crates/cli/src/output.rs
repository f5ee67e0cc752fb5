//! Rendering helpers: aligned tables, CSV rows and pretty JSON.

use dt4_core::{QSeries, Rat, RatFn, UniPoly};
use serde_json::Value;

/// Left-aligned plain-text table.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(i))
                    .chain(std::iter::once(&self.header[i]))
                    .map(|c| c.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// Pretty JSON with keys in insertion order and a trailing newline.
pub fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
    s.push('\n');
    s
}

fn poly_cell(p: &UniPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    p.coeffs().iter().map(Rat::to_string).collect::<Vec<_>>().join(";")
}

/// Coefficient cells `coeff_num, coeff_den` of a rational function in `s1`.
pub trait CsvCells {
    fn cells(&self) -> [String; 2];
}

impl CsvCells for RatFn {
    fn cells(&self) -> [String; 2] {
        [poly_cell(self.num()), poly_cell(self.den())]
    }
}

impl CsvCells for Rat {
    fn cells(&self) -> [String; 2] {
        RatFn::constant(self.clone()).cells()
    }
}

/// CSV with columns `n, coeff_num, coeff_den` and optional boolean `match`.
pub fn csv<F: dt4_core::Field + CsvCells>(series: &QSeries<F>, matches: Option<&[bool]>) -> String {
    let mut out = String::from("n,coeff_num,coeff_den");
    if matches.is_some() {
        out.push_str(",match");
    }
    out.push('\n');
    for (n, c) in series.coeffs().iter().enumerate() {
        let [num, den] = c.cells();
        out.push_str(&format!("{n},{num},{den}"));
        if let Some(m) = matches {
            out.push_str(&format!(",{}", m[n]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let mut t = Table::new(&["n", "value"]);
        t.row(vec!["0".into(), "1".into()]);
        t.row(vec!["10".into(), "-3/2".into()]);
        assert_eq!(t.render(), "n   value\n--  -----\n0   1\n10  -3/2\n");
    }

    #[test]
    fn csv_joins_polynomial_coefficients() {
        let f = RatFn::reduce(UniPoly::from_ints(&[1, 0, 3]), UniPoly::from_ints(&[0, 2])).unwrap();
        let s = QSeries::new(1, vec![RatFn::one(), f]);
        assert_eq!(csv(&s, Some(&[true, false])), "n,coeff_num,coeff_den,match\n0,1,1,true\n1,1/2;0;3/2,0;1,false\n");
    }
}
