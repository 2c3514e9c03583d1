//! Text formats: price series, correlation matrices and moments files.

use std::fmt::Write;

use chrono::{Datelike, NaiveDate};
use cpoint_core::moments::{Day, MomentSet, PriceSeries};
use cpoint_core::numerics::Matrix;

use crate::Error;

/// Accepts `dd/mm/yy`, `dd/mm/yyyy` and ISO `yyyy-mm-dd`.
///
/// Two-digit years follow the POSIX pivot: `69..=99` map to the 1900s, the rest to the 2000s.
pub fn parse_date(s: &str) -> Option<Day> {
    let d = ["%Y-%m-%d", "%d/%m/%Y", "%d/%m/%y"]
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(s, f).ok().filter(|d| f.contains("%y") || d.year() >= 1000))?;
    Day::from_ymd(d.year(), d.month(), d.day())
}

pub fn format_date(d: Day) -> String {
    let (y, m, day) = d.to_ymd();
    format!("{y:04}-{m:02}-{day:02}")
}

fn format_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Format { file: file.to_string(), line, message: message.into() }
}

/// Reads a price series: `Asset:`, `Deflator:` and `Shares:` header lines,
/// an optional column heading, `date price` rows and a `*` terminator.
/// Anything after the terminator is ignored.
pub fn parse_series(file: &str, text: &str) -> Result<PriceSeries, Error> {
    let mut asset = None;
    let mut deflator = None;
    let mut shares = None;
    let mut observations = Vec::new();
    let mut terminated = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let no = i + 1;
        if line.is_empty() {
            continue;
        }
        if line.starts_with('*') {
            terminated = true;
            break;
        }
        if let Some((key, value)) = line.split_once(':') {
            let value = value.trim();
            match key.trim().to_ascii_lowercase().as_str() {
                "asset" => asset = Some(value.to_string()),
                "deflator" => deflator = Some(value.to_string()),
                "shares" => {
                    shares = Some(value.parse::<f64>().map_err(|_| format_err(file, no, "invalid share count"))?)
                }
                _ => return Err(format_err(file, no, format!("unknown header {key:?}"))),
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(d), Some(p)) = (parts.next(), parts.next()) else {
            return Err(format_err(file, no, "expected a date and a price"));
        };
        if observations.is_empty() && d.eq_ignore_ascii_case("date") {
            continue;
        }
        let date = parse_date(d).ok_or_else(|| format_err(file, no, format!("invalid date {d:?}")))?;
        let price: f64 = p.parse().map_err(|_| format_err(file, no, format!("invalid price {p:?}")))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(format_err(file, no, "prices must be positive"));
        }
        observations.push((date, price));
    }
    if !terminated {
        return Err(format_err(file, text.lines().count(), "missing '*' terminator"));
    }
    Ok(PriceSeries {
        asset: asset.ok_or_else(|| format_err(file, 1, "missing Asset header"))?,
        deflator: deflator.unwrap_or_default(),
        shares: shares.unwrap_or(1.0),
        observations,
    })
}

/// Writes a series with ISO dates, latest first.
pub fn write_series(s: &PriceSeries) -> String {
    let mut obs = s.observations.clone();
    obs.sort_by_key(|o| std::cmp::Reverse(o.0));
    let mut out = format!("Asset: {}\nDeflator: {}\nShares: {:E}\nDate        Price\n", s.asset, s.deflator, s.shares);
    for (d, p) in obs {
        let _ = writeln!(out, "{}  {:E}", format_date(d), p);
    }
    out.push_str("*\n");
    out
}

/// Reads a correlation file: asset names on the first line, then one row per asset.
pub fn parse_correl(file: &str, text: &str) -> Result<(Vec<String>, Matrix), Error> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| format_err(file, 1, "empty correlation file"))?;
    let names: Vec<String> = head.split_whitespace().map(str::to_string).collect();
    let n = names.len();
    let mut m = Matrix::zeros(n, n);
    let mut rows = 0;
    for (i, line) in lines {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|v| v.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format_err(file, i + 1, "invalid number"))?;
        if vals.len() != n || rows == n {
            return Err(format_err(file, i + 1, format!("expected {n} rows of {n} values")));
        }
        for (j, v) in vals.into_iter().enumerate() {
            m[(rows, j)] = v;
        }
        rows += 1;
    }
    if rows != n {
        return Err(format_err(file, text.lines().count(), format!("expected {n} rows, found {rows}")));
    }
    Ok((names, m))
}

pub fn write_correl(names: &[String], c: &Matrix) -> String {
    let mut out = names.join(" ");
    out.push('\n');
    for i in 0..c.rows() {
        let row: Vec<String> = c.row(i).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn vector_block(out: &mut String, label: &str, names: &[String], values: &[f64]) {
    let items: Vec<String> = names.iter().zip(values).map(|(n, v)| format!("{v:e}@{n}")).collect();
    let _ = writeln!(out, "{label}[all]={{");
    for chunk in items.chunks(3) {
        let _ = writeln!(out, "{},", chunk.join(", "));
    }
    out.truncate(out.len() - 2);
    out.push_str(" };\n\n");
}

/// Moments in MDL vector syntax, followed by the named scalars.
pub fn write_moments(ms: &MomentSet, scalars: &[(&str, f64)]) -> String {
    let mut out = String::from("all={\n");
    let _ = writeln!(out, "{}}};\n", ms.names.join(","));
    vector_block(&mut out, "er", &ms.names, &ms.er);
    vector_block(&mut out, "std", &ms.names, &ms.std);
    for (k, v) in scalars {
        let _ = writeln!(out, "{k}={v};");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpoint_core::mdl::parse_moment_vectors;

    const TEL3: &str = include_str!("../tests/fixtures/TEL3.ofc");

    #[test]
    fn dates() {
        assert_eq!(parse_date("30/12/94"), Day::from_ymd(1994, 12, 30));
        assert_eq!(parse_date("01/02/05"), Day::from_ymd(2005, 2, 1));
        assert_eq!(parse_date("1994-12-30"), Day::from_ymd(1994, 12, 30));
        assert_eq!(parse_date("30/12/1994"), Day::from_ymd(1994, 12, 30));
        assert_eq!(parse_date("31/02/94"), None);
        assert_eq!(format_date(parse_date("27/12/94").unwrap()), "1994-12-27");
    }

    #[test]
    fn listing_parses() {
        let s = parse_series("TEL3.ofc", TEL3).unwrap();
        assert_eq!(s.asset, "TEL3");
        assert_eq!(s.deflator, "DOLOF.OFC");
        assert_eq!(s.shares, 1e4);
        assert_eq!(s.observations.len(), 4);
        assert_eq!(s.observations[0], (Day::from_ymd(1994, 12, 30).unwrap(), 431.4));
        assert_eq!(s.observations[3], (Day::from_ymd(1994, 12, 27).unwrap(), 402.5));
        assert_eq!(parse_series("x", &write_series(&s)).unwrap(), s);
    }

    #[test]
    fn series_errors() {
        let e = parse_series("f", "Asset: A\n01/01/94 1.0\n").unwrap_err();
        assert!(matches!(e, Error::Format { .. }));
        let e = parse_series("f", "Asset: A\n01/13/94 1.0\n*\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 2, .. }), "{e:?}");
        let e = parse_series("f", "Asset: A\n01/01/94 -1.0\n*\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 2, .. }));
        assert!(parse_series("f", "01/01/94 1\n*\n").is_err());
    }

    #[test]
    fn correl_round_trip() {
        let names = vec!["A".to_string(), "B".to_string()];
        let c = Matrix::from_rows(&[[1.0, 0.25], [0.25, 1.0]]);
        let (n2, c2) = parse_correl("c", &write_correl(&names, &c)).unwrap();
        assert_eq!((n2, c2), (names, c));
        assert!(matches!(parse_correl("c", "A B\n1 0\n"), Err(Error::Format { .. })));
        assert!(matches!(parse_correl("c", "A B\n1 0\n0 x\n"), Err(Error::Format { line: 3, .. })));
    }

    #[test]
    fn moments_file_reads_back() {
        let names: Vec<String> = ["TEL4", "ELE6", "PET4", "BB4"].iter().map(|s| s.to_string()).collect();
        let ms = MomentSet::new(names, vec![4.5e-3, -0.1, 1.0 / 3.0, 0.0], vec![0.2, 0.3, 0.25, 0.0], Matrix::identity(4))
            .unwrap();
        let text = write_moments(&ms, &[("Hurst", 0.5), ("extrap", 30.0)]);
        let v = parse_moment_vectors(&text).unwrap();
        assert_eq!(v.names, ms.names);
        assert_eq!(v.er, ms.er);
        assert_eq!(v.std, ms.std);
        assert_eq!(v.scalars["Hurst"], 0.5);
    }
}
