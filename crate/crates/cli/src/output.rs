//! Plot-data writers. Every number leaves the program rounded to 9
//! significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<ezpath::OutputFormat> for Format {
    fn from(f: ezpath::OutputFormat) -> Self {
        match f {
            ezpath::OutputFormat::Csv => Format::Csv,
            ezpath::OutputFormat::Json => Format::Json,
        }
    }
}

pub fn round9(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        format!("{x:.8e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

/// CSV cell for a number; empty for `None`.
pub fn cell(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{:?}", round9(v)))
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round9(x)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// JSON with every float rounded; non-finite values become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_owned(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, to_json(value)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &[String],
        rows: &[Vec<String>],
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let mut w =
            csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(round9(7.033932069706056), 7.03393207);
        assert_eq!(round9(-1.23456789012e-7), -1.23456789e-7);
        assert_eq!(cell(Some(1.95)), "1.95");
        assert_eq!(cell(Some(2.0)), "2.0");
        assert_eq!(cell(None), "");
        assert!(round9(f64::INFINITY).is_infinite());
    }

    #[test]
    fn json_rounds_nested_numbers() {
        let text =
            to_json(&serde_json::json!({"a": [1.0000000001, 3], "b": {"c": f64::NAN}})).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["a"][0], 1.0);
        assert_eq!(v["a"][1], 3);
        assert!(v["b"]["c"].is_null());
    }
}
