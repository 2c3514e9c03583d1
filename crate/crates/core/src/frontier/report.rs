use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::PortfolioSelection;

const HEADER: &str = "Selected Portfolios: Parameters, Assets and Composition\n";
const PER_LINE: usize = 5;

/// Scientific notation with a decimal comma and two-digit exponent, e.g. `4,22E-01`.
pub fn format_sci(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        return String::from("NaN");
    }
    if x.is_infinite() {
        return String::from(if x > 0.0 { "Inf" } else { "-Inf" });
    }
    let raw = format!("{:.*e}", decimals, x);
    let (mant, exp) = raw.split_once('e').unwrap_or((&raw, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{}E{}{:02}", mant.replace('.', ","), sign, exp.abs())
}

/// Inverse of [`format_sci`].
pub fn parse_sci(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "Inf" => Some(f64::INFINITY),
        "-Inf" => Some(f64::NEG_INFINITY),
        _ => s.replace(',', ".").parse().ok(),
    }
}

fn label(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

/// Text block listing each selection's parameters and composition.
pub fn report(selections: &[PortfolioSelection]) -> String {
    let mut out = String::from(HEADER);
    for (i, p) in selections.iter().enumerate() {
        let name = label(i);
        let _ = writeln!(out, "\nParameters of portfolio {name}");
        let _ = writeln!(
            out,
            "{:<10}{:<10}{:<10}{:<10}{:<11}{:>4}  l",
            "eta", "esp", "var", "std", "rate", "k"
        );
        let _ = writeln!(
            out,
            "{:<10}{:<10}{:<10}{:<10}{:<11}{:>4}  {}",
            format_sci(p.eta, 2),
            format_sci(p.e, 2),
            format_sci(p.v, 2),
            format_sci(p.s, 2),
            format_sci(p.r, 2),
            p.k,
            format_sci(p.l, 2)
        );
        let _ = writeln!(out, "\nAssets and Composition of portfolio {name}");
        let entries: Vec<String> = p
            .composition
            .iter()
            .filter(|(_, w)| w.abs() >= 5e-7)
            .map(|(n, w)| format!("{}@{}", format_sci(*w, 6), n))
            .collect();
        for chunk in entries.chunks(PER_LINE) {
            let _ = writeln!(out, "{}", chunk.join("  "));
        }
    }
    out
}
