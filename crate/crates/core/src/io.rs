//! Chain input files and result serialization.
//!
//! Chain files come in two flavours:
//!
//! * CSV with header `name,tolerance[,influence]`;
//! * JSON `{"contributors": [{"name": .., "tolerance": .., "influence": ..}]}`.
//!
//! `tolerance` is the half-width (the magnitude after `±`). Results are
//! written as aligned text, CSV or JSON; the last two round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{CurvePoint, Method, ToleranceResult};
use crate::chain::{Contributor, StackChain};
use crate::error::{Error, Result};
use crate::study::{MethodEntry, StudyRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainFormat {
    Csv,
    Json,
}

impl ChainFormat {
    /// Guess from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ChainFormat::Json,
            _ => ChainFormat::Csv,
        }
    }
}

pub fn read_chain(path: impl AsRef<Path>) -> Result<StackChain> {
    let path = path.as_ref();
    read_chain_as(path, ChainFormat::from_path(path))
}

pub fn read_chain_as(path: &Path, format: ChainFormat) -> Result<StackChain> {
    let text = fs::read_to_string(path).map_err(|source| Error::ReadFile {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        ChainFormat::Csv => parse_chain_csv(&text, path),
        ChainFormat::Json => parse_chain_json(&text, path),
    }
}

fn parse_err(path: &Path, line: u64, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_number(path: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw.starts_with(['+', '-', '±']) {
        return Err(parse_err(
            path,
            line,
            field,
            format!("'{raw}': signs are not allowed, give the magnitude only"),
        ));
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_err(path, line, field, format!("'{raw}' is not a number"))),
    }
}

/// Parses CSV chain text; `origin` is used in error messages only.
pub fn parse_chain_csv(text: &str, origin: &Path) -> Result<StackChain> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(origin, 1, "header", e.to_string()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(name_col), Some(tol_col)) = (column("name"), column("tolerance")) else {
        return Err(parse_err(
            origin,
            1,
            "header",
            "expected columns name,tolerance[,influence]",
        ));
    };
    let infl_col = column("influence");
    if let Some(extra) = headers
        .iter()
        .find(|h| !["name", "tolerance", "influence"].contains(&h.to_ascii_lowercase().as_str()))
    {
        return Err(parse_err(origin, 1, "header", format!("unknown column '{extra}'")));
    }

    let mut contributors = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(origin, line, "record", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(name_col).unwrap_or("").to_string();
        if name.is_empty() {
            return Err(parse_err(origin, line, "name", "contributor name is empty"));
        }
        let tolerance = parse_number(origin, line, "tolerance", record.get(tol_col).unwrap_or(""))?;
        if tolerance <= 0.0 {
            return Err(parse_err(
                origin,
                line,
                "tolerance",
                format!("contributor '{name}': tolerance must be strictly positive, got {tolerance}"),
            ));
        }
        let influence = match infl_col.and_then(|c| record.get(c)) {
            Some(raw) if !raw.is_empty() => {
                let raw = raw.trim_start_matches('+');
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        parse_err(origin, line, "influence", format!("'{raw}' is not a number"))
                    })?
            }
            _ => 1.0,
        };
        contributors.push(Contributor::new(name, tolerance, influence));
    }
    StackChain::new(contributors)
}

#[derive(Debug, Serialize, Deserialize)]
struct ChainDoc {
    contributors: Vec<ContributorDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ContributorDoc {
    name: String,
    tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    influence: Option<f64>,
}

pub fn parse_chain_json(text: &str, origin: &Path) -> Result<StackChain> {
    let doc: ChainDoc = serde_json::from_str(text).map_err(|e| {
        parse_err(origin, e.line() as u64, "json", e.to_string())
    })?;
    let contributors = doc
        .contributors
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            if !(c.tolerance.is_finite() && c.tolerance > 0.0) {
                return Err(Error::InvalidContributor {
                    name: c.name,
                    reason: format!(
                        "contributor #{}: tolerance must be strictly positive, got {}",
                        i + 1,
                        c.tolerance
                    ),
                });
            }
            Ok(Contributor::new(c.name, c.tolerance, c.influence.unwrap_or(1.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    StackChain::new(contributors)
}

/// Serializes a chain back to the JSON chain format.
pub fn chain_to_json(chain: &StackChain) -> String {
    let doc = ChainDoc {
        contributors: chain
            .contributors()
            .iter()
            .map(|c| ContributorDoc {
                name: c.name.clone(),
                tolerance: c.half_width,
                influence: Some(c.influence),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("chain serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Domain(format!("unknown output format '{s}'"))),
        }
    }
}

/// Anything the tool can write.
#[derive(Debug, Clone, Copy)]
pub enum Results<'a> {
    Tolerance(&'a [ToleranceResult]),
    Curve(&'a [CurvePoint]),
    Study(&'a [StudyRow]),
}

impl Results<'_> {
    fn is_empty(&self) -> bool {
        match self {
            Results::Tolerance(r) => r.is_empty(),
            Results::Curve(r) => r.is_empty(),
            Results::Study(r) => r.is_empty(),
        }
    }
}

pub fn write_results<W: Write>(results: Results<'_>, format: OutputFormat, dest: &mut W) -> Result<()> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    match format {
        OutputFormat::Json => {
            match results {
                Results::Tolerance(r) => serde_json::to_writer_pretty(&mut *dest, r),
                Results::Curve(r) => serde_json::to_writer_pretty(&mut *dest, r),
                Results::Study(r) => serde_json::to_writer_pretty(&mut *dest, r),
            }
            .map_err(std::io::Error::from)?;
            writeln!(dest)?;
        }
        OutputFormat::Csv => write_lines(dest, &csv_lines(results))?,
        OutputFormat::Table => write_lines(dest, &table_lines(results))?,
    }
    dest.flush()?;
    Ok(())
}

fn write_lines<W: Write>(dest: &mut W, lines: &[String]) -> std::io::Result<()> {
    for l in lines {
        writeln!(dest, "{l}")?;
    }
    Ok(())
}

/// Shortest decimal that parses back to the same `f64`.
fn full(x: f64) -> String {
    format!("{x:?}")
}

fn full_opt(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

/// Four significant digits.
fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (3 - mag).max(0) as usize, x)
    } else {
        format!("{x:.3e}")
    }
}

fn sig4_opt(x: Option<f64>) -> String {
    x.map(sig4).unwrap_or_else(|| "-".into())
}

fn study_methods(rows: &[StudyRow]) -> Vec<Method> {
    rows[0].entries.iter().map(|e| e.method).collect()
}

fn csv_lines(results: Results<'_>) -> Vec<String> {
    let mut out = Vec::new();
    match results {
        Results::Tolerance(rows) => {
            out.push("method,t,t_clamped,f,coverage,rho".to_string());
            for r in rows {
                out.push(format!(
                    "{},{},{},{},{},{}",
                    r.method,
                    full(r.t),
                    full(r.t_clamped),
                    full_opt(r.f),
                    full(r.coverage),
                    full_opt(r.rho)
                ));
            }
        }
        Results::Curve(points) => {
            out.push("rho,method,t".to_string());
            for p in points {
                out.push(format!("{},{},{}", full(p.rho), p.method, full(p.t)));
            }
        }
        Results::Study(rows) => {
            let methods = study_methods(rows);
            let mut header = vec!["chain_id".to_string(), "s1".into(), "d_factor".into()];
            for m in &methods {
                header.push(format!("{}_t", m.column_prefix()));
                header.push(format!("{}_f", m.column_prefix()));
            }
            header.push("mc_t".into());
            out.push(header.join(","));
            for r in rows {
                let mut cells = vec![r.chain_id.to_string(), full(r.s1), full(r.d_factor)];
                for e in &r.entries {
                    cells.push(full(e.t));
                    cells.push(full(e.f));
                }
                cells.push(full_opt(r.mc_t));
                out.push(cells.join(","));
            }
        }
    }
    out
}

fn table_lines(results: Results<'_>) -> Vec<String> {
    let mut grid: Vec<Vec<String>> = Vec::new();
    match results {
        Results::Tolerance(rows) => {
            grid.push(
                ["method", "t", "t_clamped", "f", "coverage", "rho"]
                    .map(String::from)
                    .to_vec(),
            );
            for r in rows {
                grid.push(vec![
                    r.method.to_string(),
                    sig4(r.t),
                    sig4(r.t_clamped),
                    sig4_opt(r.f),
                    sig4(r.coverage),
                    sig4_opt(r.rho),
                ]);
            }
        }
        Results::Curve(points) => {
            grid.push(["rho", "method", "t"].map(String::from).to_vec());
            for p in points {
                grid.push(vec![sig4(p.rho), p.method.to_string(), sig4(p.t)]);
            }
        }
        Results::Study(rows) => {
            let mut header = vec!["chain_id".to_string(), "s1".into(), "d_factor".into()];
            for m in study_methods(rows) {
                header.push(format!("{}_t", m.column_prefix()));
                header.push(format!("{}_f", m.column_prefix()));
            }
            header.push("mc_t".into());
            grid.push(header);
            for r in rows {
                let mut cells = vec![r.chain_id.to_string(), sig4(r.s1), sig4(r.d_factor)];
                for e in &r.entries {
                    cells.push(sig4(e.t));
                    cells.push(sig4(e.f));
                }
                cells.push(sig4_opt(r.mc_t));
                grid.push(cells);
            }
        }
    }
    let cols = grid[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    grid.iter()
        .map(|row| {
            row.iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect()
}

fn data_err(origin: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: origin.to_path_buf(),
        message: message.into(),
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn opt_cell(origin: &Path, line: u64, field: &str, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        raw.parse()
            .map(Some)
            .map_err(|_| parse_err(origin, line, field, format!("'{raw}' is not a number")))
    }
}

fn cell(origin: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    opt_cell(origin, line, field, raw)?
        .ok_or_else(|| parse_err(origin, line, field, "missing value"))
}

fn records(text: &str, origin: &Path, expected: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = csv_reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(origin, 1, "header", e.to_string()))?;
    if !expected.is_empty() && headers.iter().ne(expected.iter().copied()) {
        return Err(parse_err(
            origin,
            1,
            "header",
            format!("expected '{}'", expected.join(",")),
        ));
    }
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| parse_err(origin, 0, "record", e.to_string()))?;
            Ok((r.position().map_or(0, |p| p.line()), r))
        })
        .collect()
}

pub fn parse_results_csv(text: &str, origin: &Path) -> Result<Vec<ToleranceResult>> {
    records(text, origin, &["method", "t", "t_clamped", "f", "coverage", "rho"])?
        .into_iter()
        .map(|(line, r)| {
            Ok(ToleranceResult {
                method: r[0].parse()?,
                t: cell(origin, line, "t", &r[1])?,
                t_clamped: cell(origin, line, "t_clamped", &r[2])?,
                f: opt_cell(origin, line, "f", &r[3])?,
                coverage: cell(origin, line, "coverage", &r[4])?,
                rho: opt_cell(origin, line, "rho", &r[5])?,
            })
        })
        .collect()
}

pub fn parse_curve_csv(text: &str, origin: &Path) -> Result<Vec<CurvePoint>> {
    records(text, origin, &["rho", "method", "t"])?
        .into_iter()
        .map(|(line, r)| {
            Ok(CurvePoint {
                rho: cell(origin, line, "rho", &r[0])?,
                method: r[1].parse()?,
                t: cell(origin, line, "t", &r[2])?,
            })
        })
        .collect()
}

pub fn parse_study_csv(text: &str, origin: &Path) -> Result<Vec<StudyRow>> {
    let mut rdr = csv_reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(origin, 1, "header", e.to_string()))?
        .clone();
    let h: Vec<&str> = headers.iter().collect();
    let bad_header = || data_err(origin, "study CSV header must be chain_id,s1,d_factor,<m>_t,<m>_f,...,mc_t");
    if h.len() < 4 || h[..3] != ["chain_id", "s1", "d_factor"] || h[h.len() - 1] != "mc_t" {
        return Err(bad_header());
    }
    let middle = &h[3..h.len() - 1];
    if !middle.len().is_multiple_of(2) {
        return Err(bad_header());
    }
    let methods = middle
        .chunks(2)
        .map(|pair| {
            let (Some(mt), Some(mf)) = (pair[0].strip_suffix("_t"), pair[1].strip_suffix("_f")) else {
                return Err(bad_header());
            };
            if mt != mf {
                return Err(bad_header());
            }
            mt.parse::<Method>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for r in rdr.records() {
        let r = r.map_err(|e| parse_err(origin, 0, "record", e.to_string()))?;
        let line = r.position().map_or(0, |p| p.line());
        let chain_id = r[0]
            .parse()
            .map_err(|_| parse_err(origin, line, "chain_id", "not an integer"))?;
        let entries = methods
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                Ok(MethodEntry {
                    method: m,
                    t: cell(origin, line, h[3 + 2 * k], &r[3 + 2 * k])?,
                    f: cell(origin, line, h[4 + 2 * k], &r[4 + 2 * k])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(StudyRow {
            chain_id,
            s1: cell(origin, line, "s1", &r[1])?,
            d_factor: cell(origin, line, "d_factor", &r[2])?,
            entries,
            mc_t: opt_cell(origin, line, "mc_t", &r[h.len() - 1])?,
        });
    }
    Ok(rows)
}

pub fn parse_results_json(text: &str, origin: &Path) -> Result<Vec<ToleranceResult>> {
    from_json(text, origin)
}

pub fn parse_curve_json(text: &str, origin: &Path) -> Result<Vec<CurvePoint>> {
    from_json(text, origin)
}

pub fn parse_study_json(text: &str, origin: &Path) -> Result<Vec<StudyRow>> {
    from_json(text, origin)
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(origin, e.line() as u64, "json", e.to_string()))
}

/// Writes to a file, creating parent directories as needed.
pub fn write_results_to_path(results: Results<'_>, format: OutputFormat, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut buf = Vec::new();
    write_results(results, format, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Placeholder origin for in-memory text.
pub fn memory_origin() -> PathBuf {
    PathBuf::from("<memory>")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{analyze_all, ConfidenceLevel};

    fn origin() -> PathBuf {
        memory_origin()
    }

    const TABLE2: &str = "name,tolerance\n\
        Frame 1,1\nFrame 2,0.5\nProcess tolerance,0.25\nProcess tolerance,0.23\n\
        Process tolerance,0.2\nProcess tolerance,0.2\nProcess tolerance,0.15\n\
        Process tolerance,0.13\nProcess tolerance,0.1\nProcess tolerance,0.09\n";

    #[test]
    fn reads_case_study_without_influence_column() {
        let c = parse_chain_csv(TABLE2, &origin()).unwrap();
        assert_eq!(c.len(), 10);
        assert!((c.t_wc() - 2.85).abs() < 1e-12);
        assert!(c.contributors().iter().all(|x| x.influence == 1.0));
        assert_eq!(c.contributors()[1].name, "Frame 2");
    }

    #[test]
    fn reads_influence_and_crlf() {
        let text = "name,tolerance,influence\r\na,2,-0.5\r\nb,1,\r\nc,3,0\r\n";
        let c = parse_chain_csv(text, &origin()).unwrap();
        assert_eq!(c.weighted_bounds(), &[1.0, 1.0]);
    }

    #[test]
    fn zero_tolerance_names_the_row() {
        let text = "name,tolerance\nok,1\nbroken part,0\n";
        match parse_chain_csv(text, &origin()) {
            Err(Error::Parse { line, field, message, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "tolerance");
                assert!(message.contains("broken part"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_signs_and_garbage() {
        for cell in ["±1", "+1", "-1", "abc", ""] {
            let text = format!("name,tolerance\nx,{cell}\n");
            assert!(
                matches!(parse_chain_csv(&text, &origin()), Err(Error::Parse { .. })),
                "accepted {cell}"
            );
        }
        assert!(parse_chain_csv("name,tol\nx,1\n", &origin()).is_err());
        assert!(parse_chain_csv("name,tolerance,colour\nx,1,red\n", &origin()).is_err());
        assert!(matches!(parse_chain_csv("name,tolerance\n", &origin()), Err(Error::EmptyChain)));
    }

    #[test]
    fn json_chain() {
        let text = r#"{"contributors": [{"name": "a", "tolerance": 2.0, "influence": -0.5},
                                         {"name": "b", "tolerance": 1.0}]}"#;
        let c = parse_chain_json(text, &origin()).unwrap();
        assert_eq!(c.weighted_bounds(), &[1.0, 1.0]);
        assert_eq!(parse_chain_json(&chain_to_json(&c), &origin()).unwrap(), c);
        let bad = r#"{"contributors": [{"name": "a", "tolerance": 0}]}"#;
        assert!(matches!(
            parse_chain_json(bad, &origin()),
            Err(Error::InvalidContributor { .. })
        ));
        assert!(matches!(parse_chain_json("{", &origin()), Err(Error::Parse { .. })));
    }

    fn sample_results() -> Vec<ToleranceResult> {
        let c = StackChain::from_half_widths(&[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        analyze_all(&c, ConfidenceLevel::new(0.05).unwrap()).unwrap()
    }

    #[test]
    fn single_result_csv_has_one_row() {
        let r = &sample_results()[..1];
        let mut buf = Vec::new();
        write_results(Results::Tolerance(r), OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("method,t,t_clamped,f,coverage,rho\nWC,15.0,"));
    }

    #[test]
    fn tolerance_round_trips() {
        let r = sample_results();
        for fmt in [OutputFormat::Csv, OutputFormat::Json] {
            let mut buf = Vec::new();
            write_results(Results::Tolerance(&r), fmt, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let back = match fmt {
                OutputFormat::Csv => parse_results_csv(&text, &origin()).unwrap(),
                _ => parse_results_json(&text, &origin()).unwrap(),
            };
            assert_eq!(back, r);
        }
    }

    #[test]
    fn table_uses_four_significant_digits() {
        let r = sample_results();
        let mut buf = Vec::new();
        write_results(Results::Tolerance(&r), OutputFormat::Table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("7.416"), "{text}");
        assert!(text.contains("15.00"));
        assert_eq!(text.lines().count(), 9);
        assert_eq!(sig4(0.00012345), "0.0001234");
        assert_eq!(sig4(1234567.0), "1.235e6");
    }

    #[test]
    fn empty_results_rejected() {
        let mut buf = Vec::new();
        assert!(matches!(
            write_results(Results::Curve(&[]), OutputFormat::Csv, &mut buf),
            Err(Error::EmptyResults)
        ));
    }

    #[test]
    fn study_csv_header_and_round_trip() {
        let rows = vec![StudyRow {
            chain_id: 3,
            s1: 0.125,
            d_factor: 0.1,
            entries: vec![
                MethodEntry { method: Method::Chernov, t: 1.5, f: 0.3 },
                MethodEntry { method: Method::Wc, t: 2.5, f: 0.7 },
            ],
            mc_t: None,
        }];
        let mut buf = Vec::new();
        write_results(Results::Study(&rows), OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("chain_id,s1,d_factor,chernov_t,chernov_f,wc_t,wc_f,mc_t\n"));
        assert_eq!(parse_study_csv(&text, &origin()).unwrap(), rows);
    }
}
