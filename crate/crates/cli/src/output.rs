use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{Context as _, Result};
use serde::Serialize;

use crate::manifest::{Report, RunManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// `--out json`, `--out csv`, or a file path whose extension picks the format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutTarget {
    Stdout(Format),
    File(PathBuf, Format),
}

impl Default for OutTarget {
    fn default() -> Self {
        OutTarget::Stdout(Format::Json)
    }
}

impl FromStr for OutTarget {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "json" | "-" => OutTarget::Stdout(Format::Json),
            "csv" => OutTarget::Stdout(Format::Csv),
            path => {
                let p = PathBuf::from(path);
                let fmt = match p.extension().and_then(|e| e.to_str()) {
                    Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
                    _ => Format::Json,
                };
                OutTarget::File(p, fmt)
            }
        })
    }
}

impl OutTarget {
    pub fn format(&self) -> Format {
        match self {
            OutTarget::Stdout(f) | OutTarget::File(_, f) => *f,
        }
    }

    fn write(&self, text: &str) -> Result<()> {
        match self {
            OutTarget::Stdout(_) => {
                print!("{text}");
                Ok(())
            }
            OutTarget::File(path, _) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        }
    }
}

pub fn json_report<T: Serialize>(manifest: &RunManifest, result: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Report { manifest, result }).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the report as JSON, or as CSV rows led by a `#` manifest line.
pub fn emit<T: Serialize>(
    target: &OutTarget,
    manifest: &RunManifest,
    result: &T,
    csv: impl FnOnce() -> String,
) -> Result<()> {
    let text = match target.format() {
        Format::Json => json_report(manifest, result),
        Format::Csv => {
            let m = serde_json::to_string(manifest).expect("manifest serializes");
            format!("# manifest: {m}\n{}", csv())
        }
    };
    target.write(&text)
}

pub fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
