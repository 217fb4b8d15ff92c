//! CSV rendering with a fixed column order and 17 significant digits.

use csv::{Terminator, WriterBuilder};

/// Formats a float with 17 significant digits, which round-trips binary64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of strings under a fixed header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Value of `column` in row `i`.
    pub fn get(&self, i: usize, column: &str) -> Option<&str> {
        let j = self.header.iter().position(|h| h == column)?;
        self.rows.get(i).map(|r| r[j].as_str())
    }

    /// UTF-8 CSV with LF line endings.
    pub fn to_csv(&self) -> String {
        let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 0.6257358072, -2.5e-300, 12345.678] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn intervals_are_quoted() {
        let mut t = Table::new(&["interval", "mean"]);
        t.push(vec!["(0,1]".into(), fmt_f64(0.5)]);
        assert_eq!(t.to_csv(), "interval,mean\n\"(0,1]\",5.0000000000000000e-1\n");
        assert_eq!(t.get(0, "mean"), Some("5.0000000000000000e-1"));
    }
}
