//! Configuration merging and CSV/JSON emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Experiment settings. Every field can come from a TOML file or a flag;
/// flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// High valuation.
    #[arg(long = "vh")]
    pub v_h: Option<f64>,
    /// Low valuation.
    #[arg(long = "vl")]
    pub v_l: Option<f64>,
    /// Low valuation as a fraction of the high valuation.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Social loss from a one-sided interaction.
    #[arg(long)]
    pub l: Option<f64>,
    /// Cost of interacting with an unlike buyer.
    #[arg(long)]
    pub c: Option<f64>,
    /// Loss from being approached by an unlike buyer.
    #[arg(long)]
    pub r: Option<f64>,
    /// Prior probability of a High buyer.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Upper end of the continuous valuation range.
    #[arg(long = "vbar")]
    pub v_bar: Option<f64>,
    /// Edge-list file; the bundled graph is used when absent.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Arrival shuffles per sweep point.
    #[arg(long)]
    pub shuffles: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest v_H of the sweep.
    #[arg(long = "vh-max")]
    pub vh_max: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        Settings { $($f: $top.$f.clone().or_else(|| $base.$f.clone())),* }
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `top` replace those of `self`.
    pub fn overlay(&self, top: &Settings) -> Settings {
        let base = self;
        overlay!(base, top; v_h, v_l, ratio, l, c, r, alpha, v_bar, graph, samples, shuffles, seed, vh_max, steps, output, format)
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
        value.clone().ok_or_else(|| Error::InvalidInput(format!("missing required setting `{name}`")))
    }
}

/// `x` rounded to 9 significant digits, printed in shortest form.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// A table of named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidInput(format!("row has {} cells, table has {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    /// CSV with `#`-prefixed comment lines before the header.
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let mut out = out;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => sig9(*x),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            w.write_record(&cells).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// Provenance comments for CSV output.
pub fn run_comments(command: &str, seed: Option<u64>) -> Vec<String> {
    let mut c = vec![format!("strategic-pricing {} {command}", env!("CARGO_PKG_VERSION"))];
    if let Some(s) = seed {
        c.push(format!("seed={s}"));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(2.0), "2");
        assert_eq!(sig9(123456789.87), "123456790");
        assert_eq!(sig9(-0.000012345678912), "-0.0000123456789");
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::from_toml("v_h = 3.0\nl = 0.4\nseed = 1\n").unwrap();
        let flags = Settings { l: Some(0.5), ..Default::default() };
        let m = file.overlay(&flags);
        assert_eq!((m.v_h, m.l, m.seed), (Some(3.0), Some(0.5), Some(1)));
        assert!(Settings::from_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.5.into(), "x".into()]).unwrap();
        assert!(t.push(vec![1.0.into()]).is_err());
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &["seed=7".into()]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# seed=7\na,b\n1.5,x\n");
    }
}
