//! Tables of `nu_p(A^r_n)` with rows `n` and columns `r`.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use descent_core::padic::valuation;
use descent_core::{PowerSumSource, Prime};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(name = "md", alias = "markdown")]
    Markdown,
    Json,
}

/// An inclusive, nonempty range of positive integers written `A..B` or `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span(pub RangeInclusive<u32>);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("'{t}' is not a nonnegative integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo == 0 {
            return Err("range must start at 1 or above".into());
        }
        if lo > hi {
            return Err(format!("range {lo}..{hi} is empty"));
        }
        Ok(Span(lo..=hi))
    }
}

#[derive(Debug, Clone)]
pub struct TableSpec {
    pub p: Prime,
    pub n: Span,
    pub r: Span,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub n: u32,
    pub r: u32,
    pub valuation: u64,
}

/// Every cell of the table, row-major.
pub fn cells<S: PowerSumSource + ?Sized>(source: &S, spec: &TableSpec) -> Result<Vec<Cell>> {
    let rs: Vec<u32> = spec.r.0.clone().collect();
    let mut cells = Vec::new();
    for n in spec.n.0.clone() {
        let values = source.power_sums(n, &rs)?;
        for (&r, value) in rs.iter().zip(values) {
            cells.push(Cell {
                n,
                r,
                valuation: valuation(&value, spec.p)?,
            });
        }
    }
    Ok(cells)
}

pub fn render<S: PowerSumSource + ?Sized>(source: &S, spec: &TableSpec) -> Result<String> {
    let cells = cells(source, spec)?;
    let rs: Vec<u32> = spec.r.0.clone().collect();
    let rows = cells.chunks(rs.len());
    let mut out = String::new();
    match spec.format {
        Format::Csv => {
            out.push_str("n\\r");
            for r in &rs {
                write!(out, ",{r}").unwrap();
            }
            out.push('\n');
            for row in rows {
                write!(out, "{}", row[0].n).unwrap();
                for c in row {
                    write!(out, ",{}", c.valuation).unwrap();
                }
                out.push('\n');
            }
        }
        Format::Markdown => {
            out.push_str("| n\\r |");
            for r in &rs {
                write!(out, " {r} |").unwrap();
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(rs.len()));
            out.push('\n');
            for row in rows {
                write!(out, "| {} |", row[0].n).unwrap();
                for c in row {
                    write!(out, " {} |", c.valuation).unwrap();
                }
                out.push('\n');
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(&cells).map_err(|e| CliError::usage(e.to_string()))?;
            out.push('\n');
        }
    }
    Ok(out)
}
