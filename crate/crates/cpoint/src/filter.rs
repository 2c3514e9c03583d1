//! Reads a directory of price series and writes moments and correlation files.

use std::path::{Path, PathBuf};

use cpoint_core::moments::{filter_estimate, FilterParams, PriceSeries};

use crate::formats::{parse_series, write_correl, write_moments};
use crate::Error;

#[derive(Debug, Clone)]
pub struct SeriesSource {
    pub dir: PathBuf,
    /// File extension of the series files, without the dot; matched case-insensitively.
    pub extension: String,
    /// Calendar file to leave out of the asset list.
    pub deflator: Option<String>,
    /// Assets to read, by file stem; empty means every series in the directory.
    pub assets: Vec<String>,
}

fn has_extension(p: &Path, ext: &str) -> bool {
    p.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn find_asset(dir: &Path, files: &[PathBuf], asset: &str, ext: &str) -> Result<PathBuf, Error> {
    files
        .iter()
        .find(|p| p.file_stem().and_then(|s| s.to_str()).is_some_and(|s| s.eq_ignore_ascii_case(asset)))
        .cloned()
        .ok_or_else(|| {
            let path = dir.join(format!("{asset}.{ext}"));
            Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "no series file for asset"))
        })
}

pub fn read_series(src: &SeriesSource) -> Result<Vec<PriceSeries>, Error> {
    let entries = std::fs::read_dir(&src.dir).map_err(|e| Error::io(&src.dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && has_extension(p, &src.extension))
        .collect();
    files.sort();
    let chosen: Vec<PathBuf> = if src.assets.is_empty() {
        let skip = src.deflator.as_deref().unwrap_or("");
        files
            .into_iter()
            .filter(|p| !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.eq_ignore_ascii_case(skip)))
            .collect()
    } else {
        src.assets.iter().map(|a| find_asset(&src.dir, &files, a, &src.extension)).collect::<Result<_, _>>()?
    };
    chosen
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_series(&p.display().to_string(), &text)
        })
        .collect()
}

/// Moments file and correlation file texts for the given series.
pub fn run_filter(series: &[PriceSeries], params: &FilterParams) -> Result<(String, String), Error> {
    let (ms, _) = filter_estimate(series, params)?;
    let scalars = [
        ("Hurst", params.hurst),
        ("extrap", params.extrap),
        ("sample", params.samples as f64),
        ("interval", params.interval as f64),
    ];
    Ok((write_moments(&ms, &scalars), write_correl(&ms.names, &ms.correl)))
}
