//! JSON and SVG output for the nested interval approximations of a tile.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use tilescope_core::digits::normalize;
use tilescope_core::geometry::{approx, hull};
use tilescope_core::{DigitSet, Rational};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedLevel {
    pub level: u32,
    /// `[lo_num, lo_den, hi_num, hi_den]` per interval.
    pub intervals: Vec<[i64; 4]>,
    /// `[num, den]`.
    pub length: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub base: i64,
    pub digits: Vec<i64>,
    pub levels: Vec<RenderedLevel>,
}

fn pair(r: Rational) -> [i64; 2] {
    [*r.numer(), *r.denom()]
}

/// Levels `0..=max_level` of the outer approximation of the normalized set.
pub fn tower(base: i64, raw: &[i64], max_level: u32) -> Result<Tower, CliError> {
    let digits = normalize(raw, base)?.digits;
    let levels = (0..=max_level)
        .map(|k| {
            let u = approx(&digits, k)?;
            Ok(RenderedLevel {
                level: k,
                intervals: u
                    .intervals
                    .iter()
                    .map(|&(lo, hi)| {
                        let [a, b] = pair(lo);
                        let [c, d] = pair(hi);
                        [a, b, c, d]
                    })
                    .collect(),
                length: pair(u.total_length),
            })
        })
        .collect::<Result<Vec<_>, tilescope_core::Error>>()?;
    Ok(Tower {
        base,
        digits: digits.digits().to_vec(),
        levels,
    })
}

fn to_f64(num: i64, den: i64) -> f64 {
    num as f64 / den as f64
}

/// SVG 1.1 tower: one band per level, top to bottom, x linear over the hull.
pub fn svg(tower: &Tower, width: u32, height: u32) -> Result<String, CliError> {
    let digits = DigitSet::new(tower.base, tower.digits.iter().copied())?;
    let (lo, hi) = hull(&digits);
    let (x0, x1) = (
        to_f64(*lo.numer(), *lo.denom()),
        to_f64(*hi.numer(), *hi.denom()),
    );
    let margin = 20.0;
    let label = 60.0;
    let plot_w = (width as f64 - 2.0 * margin - label).max(1.0);
    let bands = tower.levels.len().max(1) as f64;
    let band_h = ((height as f64 - 2.0 * margin) / bands).max(1.0);
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let x = |v: f64| margin + label + (v - x0) / span * plot_w;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        r#"<title>base {} digits {:?}</title>"#,
        tower.base, tower.digits
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
    for (i, level) in tower.levels.iter().enumerate() {
        let y = margin + i as f64 * band_h;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">k={} ({}/{})</text>"#,
            margin,
            y + band_h * 0.6,
            level.level,
            level.length[0],
            level.length[1]
        );
        let _ = writeln!(out, r#"<g fill="steelblue">"#);
        for iv in &level.intervals {
            let (a, b) = (x(to_f64(iv[0], iv[1])), x(to_f64(iv[2], iv[3])));
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.2}" width="{:.3}" height="{:.2}"/>"#,
                a,
                y + band_h * 0.15,
                (b - a).max(0.5),
                band_h * 0.7
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

pub fn render(
    base: i64,
    raw: &[i64],
    max_level: u32,
    format: Format,
    width: u32,
    height: u32,
) -> Result<String, CliError> {
    let t = tower(base, raw, max_level)?;
    match format {
        Format::Json => crate::to_json(&t),
        Format::Svg => svg(&t, width, height),
    }
}
