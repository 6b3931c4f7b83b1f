//! The `analyze` pipeline: normalize, decide tiling, find the stabilization
//! exponent, decompose `D_m`, then build the cyclotomic and spectral data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tilescope_core::cyclotomic::{check_t2, laba_spectrum, support, T2Mode};
use tilescope_core::digits::{normalize, MAX_ENUMERATION};
use tilescope_core::geometry::{measure_report, MeasureReport};
use tilescope_core::skewform::{detect, verify_decomposition, Detection, Rejection};
use tilescope_core::spectral::{build_spectral_data, truncated_spectrum};
use tilescope_core::tiling::{
    is_tile, self_replicating_tiling, stabilization_exponent, tile_measure, verify_self_replicating,
};
use tilescope_core::{
    AnLaiReport, DigitSet, PrimePowerSupport, Rational, RationalSpectrum, SkewDecomposition,
    TileWitness,
};

use crate::{exit, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub max_m: u32,
    pub max_level: u32,
    pub t2_mode: T2Mode,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            max_m: 12,
            max_level: 6,
            t2_mode: T2Mode::CoprimeFactors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub base: i64,
    pub digits: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub offset: i64,
    pub scale: i64,
    pub digits: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileVerdict {
    pub is_tile: bool,
    pub witness: TileWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizationStatus {
    Found,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilization {
    pub status: StabilizationStatus,
    pub m: Option<u32>,
    pub max_m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingSetReport {
    pub period: i64,
    pub residues: Vec<i64>,
    pub density: Rational,
    pub self_replicating: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// `b^m`.
    pub base: i64,
    pub stage: u32,
    /// Expansion level `m` whose digits were decomposed.
    pub level: u32,
    pub a: Vec<i64>,
    pub bs: Vec<Vec<i64>>,
    pub product_form: bool,
    pub verified: bool,
}

/// Cyclotomic data for one set (`A`, a distinct `B_j`, or the digit set).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicPart {
    pub name: String,
    /// Indices `j` sharing this set (empty for `A` and the digit set).
    pub indices: Vec<usize>,
    pub set: Vec<i64>,
    pub support: PrimePowerSupport,
    pub t1: bool,
    pub t2: bool,
    pub spectrum: Option<RationalSpectrum>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub message: String,
}

/// Everything `analyze` learns about one digit set. Field names and order
/// are part of the JSON interface; new fields are only ever appended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub normalization: Normalization,
    pub tile: TileVerdict,
    pub stabilization: Option<Stabilization>,
    pub tiling_set: Option<TilingSetReport>,
    pub measure: Option<Rational>,
    pub digit_cyclotomic: Option<CyclotomicPart>,
    pub decomposition: Option<DecompositionReport>,
    pub decomposition_rejection: Option<Rejection>,
    pub parts: Vec<CyclotomicPart>,
    pub an_lai: Option<AnLaiReport>,
    pub an_lai_all_hold: Option<bool>,
    pub uniform_spectrum: Option<RationalSpectrum>,
    pub measure_convergence: Option<MeasureReport>,
    pub failure: Option<Failure>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        match &self.stabilization {
            Some(s) if s.status == StabilizationStatus::Inconclusive => exit::INCONCLUSIVE,
            _ => exit::OK,
        }
    }

    fn fail(&mut self, stage: &str, err: impl std::fmt::Display) {
        self.failure = Some(Failure {
            stage: stage.to_string(),
            message: err.to_string(),
        });
    }
}

fn cyclotomic_part(
    name: &str,
    indices: Vec<usize>,
    set: &[i64],
    mode: T2Mode,
) -> tilescope_core::Result<CyclotomicPart> {
    let s = support(set)?;
    let t1 = s.product_of_primes() == Some(set.len() as u64);
    let t2 = check_t2(set, mode)?;
    let spectrum = if t1 && t2 {
        Some(laba_spectrum(set, mode)?)
    } else {
        None
    };
    Ok(CyclotomicPart {
        name: name.to_string(),
        indices,
        set: set.to_vec(),
        support: s,
        t1,
        t2,
        spectrum,
    })
}

/// Cyclotomic parts of a decomposition: `A`, then each distinct `B_j` in
/// order of first appearance.
pub fn decomposition_parts(
    dec: &SkewDecomposition,
    mode: T2Mode,
) -> tilescope_core::Result<Vec<CyclotomicPart>> {
    let mut parts = vec![cyclotomic_part("A", Vec::new(), &dec.a, mode)?];
    let mut groups: BTreeMap<&[i64], Vec<usize>> = BTreeMap::new();
    let mut order: Vec<&[i64]> = Vec::new();
    for (j, b) in dec.bs.iter().enumerate() {
        let entry = groups.entry(b.as_slice()).or_default();
        if entry.is_empty() {
            order.push(b.as_slice());
        }
        entry.push(j);
    }
    for b in order {
        parts.push(cyclotomic_part("B", groups[b].clone(), b, mode)?);
    }
    Ok(parts)
}

/// Runs the full pipeline. Input validation errors are returned as `Err`;
/// later failures are recorded in [`AnalysisReport::failure`] together with
/// everything computed before them.
pub fn analyze(
    base: i64,
    raw: &[i64],
    options: &AnalyzeOptions,
) -> Result<AnalysisReport, CliError> {
    if options.max_m == 0 {
        return Err(CliError::Input("--mmax must be at least 1".into()));
    }
    let normalized = normalize(raw, base)?;
    let digits = normalized.digits.clone();
    let witness = is_tile(&digits);
    let mut report = AnalysisReport {
        input: InputEcho {
            base,
            digits: raw.to_vec(),
        },
        normalization: Normalization {
            offset: normalized.offset,
            scale: normalized.scale,
            digits: digits.digits().to_vec(),
        },
        tile: TileVerdict {
            is_tile: witness.is_tile(),
            witness,
        },
        stabilization: None,
        tiling_set: None,
        measure: None,
        digit_cyclotomic: None,
        decomposition: None,
        decomposition_rejection: None,
        parts: Vec::new(),
        an_lai: None,
        an_lai_all_hold: None,
        uniform_spectrum: None,
        measure_convergence: None,
        failure: None,
    };
    if !report.tile.is_tile {
        return Ok(report);
    }
    match cyclotomic_part("D", Vec::new(), digits.digits(), options.t2_mode) {
        Ok(part) => report.digit_cyclotomic = Some(part),
        Err(e) => report.fail("cyclotomic", e),
    }
    run_tile_pipeline(&mut report, &digits, options);
    Ok(report)
}

fn run_tile_pipeline(report: &mut AnalysisReport, digits: &DigitSet, options: &AnalyzeOptions) {
    let m = match stabilization_exponent(digits, options.max_m) {
        Ok(m) => m,
        Err(e) => return report.fail("stabilization", e),
    };
    report.stabilization = Some(Stabilization {
        status: if m.is_some() {
            StabilizationStatus::Found
        } else {
            StabilizationStatus::Inconclusive
        },
        m,
        max_m: options.max_m,
    });
    let Some(m) = m else { return };

    let tiling = match self_replicating_tiling(digits, m) {
        Ok(j) => j,
        Err(e) => return report.fail("tiling_set", e),
    };
    report.tiling_set = Some(TilingSetReport {
        period: tiling.period(),
        residues: tiling.residues().to_vec(),
        density: tiling.density(),
        self_replicating: verify_self_replicating(&tiling, digits),
    });
    match tile_measure(&tiling) {
        Ok(mu) => report.measure = Some(mu),
        Err(e) => return report.fail("tiling_set", e),
    }

    let expanded = match digits.expand(m) {
        Ok(e) => e,
        Err(e) => return report.fail("decomposition", e),
    };
    let modulus = digits.base().pow(m);
    let dec = match detect(&expanded.values, modulus, 1) {
        Ok(Detection::Found(dec)) => dec,
        Ok(Detection::Rejected(why)) => {
            report.decomposition_rejection = Some(why);
            return report.fail("decomposition", "D_m is not a skew-product-form digit set");
        }
        Err(e) => return report.fail("decomposition", e),
    };
    report.decomposition = Some(DecompositionReport {
        base: dec.base,
        stage: dec.stage,
        level: m,
        a: dec.a.clone(),
        bs: dec.bs.clone(),
        product_form: dec.is_product_form(),
        verified: verify_decomposition(&dec, &expanded.values),
    });

    match decomposition_parts(&dec, options.t2_mode) {
        Ok(parts) => report.parts = parts,
        Err(e) => return report.fail("cyclotomic", e),
    }

    match build_spectral_data(&dec, options.t2_mode) {
        Ok(an_lai) => {
            report.an_lai_all_hold = Some(an_lai.all_hold());
            if an_lai.all_hold()
                && modulus
                    .checked_mul(modulus)
                    .is_some_and(|n| n <= MAX_ENUMERATION)
            {
                let combined = tilescope_core::digits::sumset(&an_lai.l1, &an_lai.l2);
                if let Ok(c) = combined {
                    match truncated_spectrum(&expanded.values, modulus, &c, 2) {
                        Ok(spec) => report.uniform_spectrum = spec,
                        Err(e) => report.fail("spectral", e),
                    }
                }
            }
            report.an_lai = Some(an_lai);
        }
        Err(e) => report.fail("spectral", e),
    }

    let mut level = options.max_level.min(digits.max_safe_level());
    while level > 1
        && digits
            .base()
            .checked_pow(level)
            .is_none_or(|n| n > MEASURE_BUDGET)
    {
        level -= 1;
    }
    match measure_report(digits, level, Some(&tiling)) {
        Ok(mr) => report.measure_convergence = Some(mr),
        Err(e) => report.fail("measure", e),
    }
}

/// Largest `b^k` enumerated for the measure table.
pub const MEASURE_BUDGET: i64 = 1 << 18;

/// Short human-readable summary.
pub fn summary(report: &AnalysisReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let n = &report.normalization;
    let _ = writeln!(
        out,
        "base {} digits {:?}",
        report.input.base, report.input.digits
    );
    let _ = writeln!(
        out,
        "normalized {:?} (offset {}, scale {})",
        n.digits, n.offset, n.scale
    );
    match &report.tile.witness {
        TileWitness::Tile => {
            let _ = writeln!(out, "tile: yes");
        }
        TileWitness::Collision { left, right, value } => {
            let _ = writeln!(out, "tile: no ({left:?} and {right:?} both give {value})");
        }
    }
    if let Some(s) = &report.stabilization {
        match s.m {
            Some(m) => {
                let _ = writeln!(out, "stabilization exponent m = {m}");
            }
            None => {
                let _ = writeln!(out, "stabilization inconclusive for m <= {}", s.max_m);
            }
        }
    }
    if let Some(j) = &report.tiling_set {
        let _ = writeln!(
            out,
            "tiling set {:?} + {}Z, density {}",
            j.residues, j.period, j.density
        );
    }
    if let Some(mu) = report.measure {
        let _ = writeln!(out, "measure {mu}");
    }
    if let Some(d) = &report.decomposition {
        let _ = writeln!(
            out,
            "decomposition of D_{} mod {}: A = {:?}",
            d.level, d.base, d.a
        );
        for (a, b) in d.a.iter().zip(&d.bs) {
            let _ = writeln!(out, "  a = {a}: B = {b:?}");
        }
    }
    for p in &report.parts {
        let _ = writeln!(
            out,
            "{} {:?}: S = {:?}, T1 {}, T2 {}",
            p.name, p.set, p.support.entries, p.t1, p.t2
        );
    }
    if let Some(a) = &report.an_lai {
        let _ = writeln!(
            out,
            "L1 = {:?}, L2 = {:?}, hypotheses hold: {}",
            a.l1,
            a.l2,
            a.all_hold()
        );
    }
    if let Some(m) = &report.measure_convergence {
        let lengths: Vec<String> = m.lengths.iter().map(|l| l.length.to_string()).collect();
        let _ = writeln!(out, "approximation lengths: {}", lengths.join(", "));
    }
    if let Some(f) = &report.failure {
        let _ = writeln!(out, "stopped at {}: {}", f.stage, f.message);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            analyze(4, &[0, 1, 1, 2], &AnalyzeOptions::default()),
            Err(CliError::Core(_))
        ));
        assert!(analyze(4, &[0, 1, 2], &AnalyzeOptions::default()).is_err());
        let opts = AnalyzeOptions {
            max_m: 0,
            ..Default::default()
        };
        assert!(matches!(
            analyze(2, &[0, 1], &opts),
            Err(CliError::Input(_))
        ));
    }

    #[test]
    fn binary_digits() {
        let r = analyze(2, &[0, 1], &AnalyzeOptions::default()).unwrap();
        assert!(r.tile.is_tile);
        assert_eq!(r.stabilization.as_ref().unwrap().m, Some(1));
        let j = r.tiling_set.as_ref().unwrap();
        assert_eq!((j.period, j.residues.clone()), (1, vec![0]));
        assert_eq!(r.measure, Some(Rational::from_integer(1)));
        let a = &r.parts[0];
        assert_eq!(
            a.spectrum.as_ref().unwrap().elements,
            vec![Rational::new(0, 1), Rational::new(1, 2)]
        );
        assert_eq!(r.exit_code(), exit::OK);
        assert!(r.failure.is_none());
    }

    #[test]
    fn non_tile_stops_after_verdict() {
        let r = analyze(4, &[0, 1, 2, 5], &AnalyzeOptions::default()).unwrap();
        assert!(!r.tile.is_tile);
        assert_eq!(
            r.tile.witness,
            TileWitness::Collision {
                left: vec![5, 0],
                right: vec![1, 1],
                value: 5
            }
        );
        assert!(r.stabilization.is_none() && r.decomposition.is_none() && r.an_lai.is_none());
    }

    #[test]
    fn unnormalized_input() {
        let r = analyze(4, &[2, 4, 18, 20], &AnalyzeOptions::default()).unwrap();
        assert_eq!((r.normalization.offset, r.normalization.scale), (2, 2));
        assert_eq!(r.normalization.digits, vec![0, 1, 8, 9]);
        assert_eq!(r.measure, Some(Rational::from_integer(2)));
    }

    #[test]
    fn inconclusive_exit_code() {
        // {0,1,32,33} is a 2-stage form: J_2* = J_3* but J_1* != J_2*.
        let full = analyze(4, &[0, 1, 32, 33], &AnalyzeOptions::default()).unwrap();
        assert_eq!(full.stabilization.unwrap().m, Some(2));
        assert_eq!(full.decomposition.as_ref().unwrap().base, 16);
        assert_eq!(full.an_lai_all_hold, Some(true));
        let opts = AnalyzeOptions {
            max_m: 1,
            ..Default::default()
        };
        let r = analyze(4, &[0, 1, 32, 33], &opts).unwrap();
        assert_eq!(r.exit_code(), exit::INCONCLUSIVE);
        assert!(r.decomposition.is_none());
    }
}
