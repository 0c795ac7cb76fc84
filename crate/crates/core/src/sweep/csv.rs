use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{SweepError, SweepRecord};
use crate::measures::Classification;

pub const CSV_HEADER: &str = "x,s_otoc,m_re,m_im,negativity,ccnr,class";
const DIAGNOSTIC_COLUMNS: &str = "ccnr_clipped,realignment";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Append `ccnr_clipped` and `realignment` columns.
    pub diagnostics: bool,
}

/// Formats `v` with 12 significant digits in the style of C's `%.12g`.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders records as CSV text with LF line endings.
pub fn write_csv(records: &[SweepRecord], opts: CsvOptions) -> Result<String, SweepError> {
    if records.is_empty() {
        return Err(SweepError::EmptySweep);
    }
    let mut out = String::with_capacity(records.len() * 96);
    out.push_str(CSV_HEADER);
    if opts.diagnostics {
        out.push(',');
        out.push_str(DIAGNOSTIC_COLUMNS);
    }
    out.push('\n');
    for r in records {
        let fields = [r.x, r.s, r.m_re, r.m_im, r.negativity, r.ccnr];
        let row: Vec<String> = fields.iter().map(|&v| format_sig(v)).collect();
        out.push_str(&row.join(","));
        let _ = write!(out, ",{}", r.classification);
        if opts.diagnostics {
            let realign = r.realignment.map(format_sig).unwrap_or_default();
            let _ = write!(out, ",{},{}", format_sig(r.ccnr_clipped()), realign);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes records to `path`. Nothing is written when `records` is empty.
pub fn emit_csv(records: &[SweepRecord], path: &Path, opts: CsvOptions) -> Result<(), SweepError> {
    let text = write_csv(records, opts)?;
    fs::write(path, text).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads back CSV written by [`write_csv`], with or without diagnostics.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>, SweepError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(SweepError::EmptySweep)?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let base: Vec<&str> = CSV_HEADER.split(',').collect();
    if cols.len() < base.len() || cols[..base.len()] != base[..] {
        return Err(SweepError::MalformedCsv {
            line: 1,
            reason: format!("expected header starting with {CSV_HEADER:?}"),
        });
    }
    let realign_col = cols.iter().position(|&c| c == "realignment");

    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(SweepError::MalformedCsv {
                line: line_no,
                reason: format!("expected {} fields, found {}", cols.len(), fields.len()),
            });
        }
        let num = |i: usize| -> Result<f64, SweepError> {
            fields[i].parse::<f64>().map_err(|e| SweepError::MalformedCsv {
                line: line_no,
                reason: format!("column {}: {e}", cols[i]),
            })
        };
        let classification = Classification::parse(fields[6]).ok_or_else(|| SweepError::MalformedCsv {
            line: line_no,
            reason: format!("unknown class {:?}", fields[6]),
        })?;
        let realignment = match realign_col {
            Some(i) if !fields[i].is_empty() => Some(num(i)?),
            _ => None,
        };
        records.push(SweepRecord {
            x: num(0)?,
            s: num(1)?,
            m_re: num(2)?,
            m_im: num(3)?,
            negativity: num(4)?,
            ccnr: num(5)?,
            realignment,
            classification,
        });
    }
    if records.is_empty() {
        return Err(SweepError::EmptySweep);
    }
    Ok(records)
}
