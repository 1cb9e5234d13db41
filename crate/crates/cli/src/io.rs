//! RFC-4180 CSV, atomic file writes and the binary grid dump.

use crate::{CliError, Result};
use fractal_dims::field::Grid2;
use std::path::Path;

/// Shortest round-trip representation, so equal values give equal bytes.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// CSV table with a header row and CRLF line ends.
#[derive(Clone, Debug)]
pub struct Csv {
    width: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv { width: header.len(), text: String::new() };
        c.push_line(header.iter().map(|h| h.to_string()));
        c
    }

    fn push_line(&mut self, fields: impl Iterator<Item = String>) {
        let line: Vec<String> = fields.map(|f| escape(&f)).collect();
        self.text.push_str(&line.join(","));
        self.text.push_str("\r\n");
    }

    pub fn row(&mut self, fields: Vec<String>) {
        assert_eq!(fields.len(), self.width, "CSV row width");
        self.push_line(fields.into_iter());
    }

    pub fn nums(&mut self, vals: &[f64]) {
        self.row(vals.iter().map(|&v| num(v)).collect());
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Parse a CSV written by [`Csv`] back into its header and numeric rows.
pub fn read_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Config(format!("CSV row {}: {e}", i + 2)))?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}

/// Write through a temporary sibling and rename it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(io_err(path))
}

/// Raw little-endian values plus the JSON sidecar.
pub fn grid_dump(grid: &Grid2) -> (Vec<u8>, Vec<u8>) {
    let side = serde_json::to_vec_pretty(&grid.sidecar()).expect("sidecar serializes");
    (grid.to_le_bytes(), side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_escapes_and_round_trips() {
        let mut c = Csv::new(&["a", "b"]);
        c.nums(&[0.1, -2.5e-7]);
        c.row(vec!["x,y".into(), "say \"hi\"".into()]);
        let s = String::from_utf8(c.into_bytes()).unwrap();
        assert_eq!(s, "a,b\r\n1e-1,-2.5e-7\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n");
        let mut c = Csv::new(&["t", "v"]);
        c.nums(&[1.0 / 3.0, 2f64.sqrt()]);
        let (h, rows) = read_numeric_csv(std::str::from_utf8(&c.into_bytes()).unwrap()).unwrap();
        assert_eq!(h, vec!["t", "v"]);
        assert_eq!(rows[0], vec![1.0 / 3.0, 2f64.sqrt()]);
    }

    #[test]
    fn grid_dump_layout() {
        let g = Grid2 { x0: 0.0, y0: 1.0, h: 0.5, nx: 2, ny: 1, values: vec![1.0, -2.0] };
        let (raw, side) = grid_dump(&g);
        assert_eq!(raw.len(), 16);
        assert_eq!(f64::from_le_bytes(raw[8..16].try_into().unwrap()), -2.0);
        let v: serde_json::Value = serde_json::from_slice(&side).unwrap();
        assert_eq!(v["nx"], 2);
        assert_eq!(v["bbox"][3], 1.5);
    }
}
