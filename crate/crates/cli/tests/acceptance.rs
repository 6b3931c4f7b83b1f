//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use tilescope::analyze::{analyze, AnalysisReport, AnalyzeOptions};
use tilescope::search::{search_records, SearchOptions};
use tilescope::to_json;
use tilescope_core::cyclotomic::{
    check_t1, check_t2, cyclotomic, laba_spectrum, support, vanishes_at, T2Mode,
};
use tilescope_core::digits::sumset;
use tilescope_core::skewform::skew_decompose;
use tilescope_core::spectral::{build_spectral_data, is_hadamard, unitarity_residual, AnLaiReport};
use tilescope_core::tiling::{is_tile, is_tile_oracle, replicating_chain, stabilization_exponent};
use tilescope_core::{DigitSet, IntPolynomial, Rational};

const EXAMPLE3: [i64; 12] = [0, 1, 4, 8, 9, 17, 25, 33, 41, 72, 76, 80];

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn timed(limit: Duration, f: impl FnOnce() -> AnalysisReport) -> Result<AnalysisReport, String> {
    let start = Instant::now();
    let report = f();
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:?}, limit {limit:?}"));
    }
    Ok(report)
}

fn criterion_1() -> Outcome {
    let r = timed(Duration::from_secs(1), || {
        analyze(12, &EXAMPLE3, &AnalyzeOptions::default()).unwrap()
    })?;
    ensure!(r.tile.is_tile, "not reported as a tile");
    ensure!(
        r.stabilization.as_ref().and_then(|s| s.m) == Some(1),
        "m != 1"
    );
    let dec = r.decomposition.as_ref().ok_or("no decomposition")?;
    ensure!(dec.a == vec![0, 1, 4, 8, 9, 17], "A = {:?}", dec.a);
    let expected: Vec<Vec<i64>> = [[0, 6], [0, 2], [0, 6], [0, 6], [0, 2], [0, 2]]
        .iter()
        .map(|b| b.to_vec())
        .collect();
    ensure!(dec.bs == expected, "B classes = {:?}", dec.bs);
    for (a, b) in dec.a.iter().zip(&dec.bs) {
        let want: &[i64] = if [0, 4, 8].contains(a) {
            &[0, 6]
        } else {
            &[0, 2]
        };
        ensure!(b == want, "class {a} has B = {b:?}");
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let r = timed(Duration::from_secs(1), || {
        analyze(4, &[0, 1, 8, 9], &AnalyzeOptions::default()).unwrap()
    })?;
    ensure!(r.tile.is_tile, "not a tile");
    ensure!(
        r.stabilization.as_ref().and_then(|s| s.m) == Some(1),
        "m != 1"
    );
    let dec = r.decomposition.as_ref().ok_or("no decomposition")?;
    ensure!(dec.a == vec![0, 1], "A = {:?}", dec.a);
    ensure!(dec.bs.iter().all(|b| b == &[0, 2]), "B = {:?}", dec.bs);
    let digit_support = &r
        .digit_cyclotomic
        .as_ref()
        .ok_or("no digit support")?
        .support
        .entries;
    ensure!(digit_support == &[2u64, 16], "S_D = {digit_support:?}");
    let j = r.tiling_set.as_ref().ok_or("no tiling set")?;
    ensure!(
        (j.period, j.residues.as_slice()) == (4, &[0i64, 1][..]),
        "J = ({}, {:?})",
        j.period,
        j.residues
    );
    ensure!(
        r.measure == Some(Rational::from_integer(2)),
        "measure = {:?}",
        r.measure
    );
    let mc = r.measure_convergence.as_ref().ok_or("no measure table")?;
    ensure!(!mc.lengths.is_empty(), "empty measure table");
    for l in &mc.lengths {
        ensure!(
            l.level == 0 || l.length == Rational::from_integer(2),
            "level {} length {}",
            l.level,
            l.length
        );
    }
    Ok(())
}

/// All `D ⊂ [0, 20]` with `0 ∈ D`, `#D = 4`.
fn base4_corpus() -> Vec<DigitSet> {
    let mut out = Vec::new();
    for a in 1..=20 {
        for b in a + 1..=20 {
            for c in b + 1..=20 {
                out.push(DigitSet::new(4, [0, a, b, c]).unwrap());
            }
        }
    }
    out
}

fn decomposes_at(d: &DigitSet, m: u32) -> bool {
    let e = d.expand(m).unwrap();
    e.collisions == 0
        && skew_decompose(&e.values, d.base().pow(m), 1)
            .unwrap()
            .is_some()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let corpus = base4_corpus();
    ensure!(corpus.len() == 1140, "corpus has {} sets", corpus.len());
    let mut violations = Vec::new();
    for d in &corpus {
        let tile = is_tile(d).is_tile();
        if tile != is_tile_oracle(d, 8).unwrap() {
            violations.push(format!("{:?}: automaton disagrees with oracle", d.digits()));
        }
        if tile != (1..=6).any(|m| decomposes_at(d, m)) {
            violations.push(format!(
                "{:?}: tile = {tile} but decomposition disagrees",
                d.digits()
            ));
        }
    }
    ensure!(
        violations.is_empty(),
        "{} violations, first {}",
        violations.len(),
        violations[0]
    );
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut tiles = 0;
    for d in base4_corpus().iter().filter(|d| is_tile(d).is_tile()) {
        tiles += 1;
        let chain = replicating_chain(d, 7).unwrap();
        for m in 1..=6u32 {
            let k = m as usize;
            let stable = chain.entries[k + 1] == chain.entries[k];
            ensure!(
                stable == decomposes_at(d, m),
                "{:?} at m = {m}: J stable {stable}, decomposition {}",
                d.digits(),
                !stable
            );
        }
    }
    ensure!(tiles > 0, "no tiles in corpus");
    Ok(())
}

fn criterion_5() -> Outcome {
    for n in 2..=64u64 {
        let mut product = IntPolynomial::one();
        for d in (2..=n).filter(|d| n % d == 0) {
            product = product.checked_mul(&cyclotomic::<i64>(d).unwrap()).unwrap();
        }
        let ones = IntPolynomial::new(vec![1; n as usize]);
        ensure!(product == ones, "product of Φ_d for d | {n} is {product}");
    }
    ensure!(
        cyclotomic::<i64>(16).unwrap() == IntPolynomial::new(vec![1, 0, 0, 0, 0, 0, 0, 0, 1]),
        "Φ_16 wrong"
    );
    ensure!(
        cyclotomic::<i64>(6).unwrap() == IntPolynomial::new(vec![1, -1, 1]),
        "Φ_6 wrong"
    );
    Ok(())
}

/// `(modulus, set, spectrum)` triples gathered by criteria 6 and 7.
#[derive(Default)]
struct Triples(Vec<(i64, Vec<i64>, Vec<i64>)>);

impl Triples {
    fn push(&mut self, n: i64, set: &[i64], spectrum: &[i64]) {
        self.0.push((n, set.to_vec(), spectrum.to_vec()));
    }
}

/// Digit sets, and the parts of their decompositions, from the tile corpora
/// for bases 4, 6 and 12.
fn spectral_corpus() -> (BTreeSet<Vec<i64>>, Vec<AnLaiReport>) {
    let mut sets = BTreeSet::new();
    let mut reports = Vec::new();
    let mut digit_sets: Vec<DigitSet> = Vec::new();
    for (base, bound) in [(4, 20), (6, 16), (12, 15)] {
        let mut o = SearchOptions::new(base, bound);
        o.max_m = 6;
        for r in search_records(&o).unwrap() {
            digit_sets.push(DigitSet::new(base, r.digits).unwrap());
        }
    }
    digit_sets.push(DigitSet::new(12, EXAMPLE3).unwrap());
    for d in &digit_sets {
        sets.insert(d.digits().to_vec());
        if !is_tile(d).is_tile() {
            continue;
        }
        let Some(m) = stabilization_exponent(d, 6).unwrap() else {
            continue;
        };
        let values = d.expand(m).unwrap().values;
        let Some(dec) = skew_decompose(&values, d.base().pow(m), 1).unwrap() else {
            continue;
        };
        for part in std::iter::once(&dec.a).chain(&dec.bs) {
            if part.len() <= 12 {
                sets.insert(part.clone());
            }
        }
        match build_spectral_data(&dec, T2Mode::default()) {
            Ok(report) => reports.push(report),
            Err(e) => eprintln!("no spectral data for {:?}: {e}", d.digits()),
        }
    }
    (sets, reports)
}

fn criterion_6(triples: &mut Triples) -> Outcome {
    let (sets, _) = spectral_corpus();
    let mut checked = 0;
    for set in sets.iter().filter(|s| s.len() <= 12) {
        if !(check_t1(set).unwrap() && check_t2(set, T2Mode::default()).unwrap()) {
            continue;
        }
        checked += 1;
        let spectrum = laba_spectrum(set, T2Mode::default()).unwrap();
        ensure!(
            spectrum.len() == set.len(),
            "{set:?}: #Λ = {}",
            spectrum.len()
        );
        let n = spectrum.modulus;
        let nums = spectrum.numerators();
        for (i, x) in nums.iter().enumerate() {
            for y in &nums[i + 1..] {
                ensure!(
                    vanishes_at(set, x - y, n).unwrap(),
                    "{set:?}: {x}/{n} and {y}/{n} not orthogonal"
                );
            }
        }
        triples.push(n, set, &nums);
    }
    ensure!(checked > 100, "only {checked} sets satisfied T1 and T2");
    Ok(())
}

fn l_values(report: &AnLaiReport) -> (Vec<i64>, Vec<i64>) {
    (report.l1.clone(), report.l2.clone())
}

fn criterion_7(triples: &mut Triples) -> Outcome {
    let a3 = analyze(12, &EXAMPLE3, &AnalyzeOptions::default()).unwrap();
    let r = a3
        .an_lai
        .as_ref()
        .ok_or("no spectral data for the base-12 example")?;
    ensure!(
        r.support_a.entries == vec![2, 3],
        "S_A = {:?}",
        r.support_a.entries
    );
    ensure!(
        r.support_b.entries == vec![4],
        "S_B = {:?}",
        r.support_b.entries
    );
    for b in &r.decomposition.bs {
        ensure!(support(b).unwrap().entries == vec![4], "S_B for {b:?}");
    }
    ensure!(
        l_values(r) == (vec![0, 2, 4, 6, 8, 10], vec![0, 3]),
        "base-12 L values {:?}",
        l_values(r)
    );
    let a2 = analyze(4, &[0, 1, 8, 9], &AnalyzeOptions::default()).unwrap();
    let r2 = a2
        .an_lai
        .as_ref()
        .ok_or("no spectral data for the base-4 example")?;
    ensure!(
        l_values(r2) == (vec![0, 2], vec![0, 1]),
        "base-4 L values {:?}",
        l_values(r2)
    );

    let (_, corpus_reports) = spectral_corpus();
    ensure!(
        !corpus_reports.is_empty(),
        "no spectral data from the corpora"
    );
    for r in [r, r2].into_iter().chain(&corpus_reports) {
        ensure!(r.all_hold(), "flags fail for {:?}", r.decomposition);
        let l = sumset(&r.l1, &r.l2).unwrap();
        let residues: BTreeSet<i64> = l.iter().map(|x| x.rem_euclid(r.modulus)).collect();
        ensure!(
            l.len() as i64 == r.modulus && residues.len() as i64 == r.modulus,
            "L1 ⊕ L2 not complete"
        );
        let n = r.modulus;
        triples.push(n, &r.decomposition.a, &r.l1);
        triples.push(r.lcm_a, &r.decomposition.a, &r.spectrum_a.numerators());
        for b in &r.decomposition.bs {
            triples.push(n, b, &r.l2);
            triples.push(r.lcm_b, b, &r.spectrum_b.numerators());
            triples.push(n, &sumset(&r.decomposition.a, b).unwrap(), &l);
        }
    }
    Ok(())
}

fn criterion_8(triples: &Triples) -> Outcome {
    ensure!(!triples.0.is_empty(), "no triples from criteria 6 and 7");
    let (mut trues, mut falses) = (0, 0);
    let mut check = |n: i64, set: &[i64], spectrum: &[i64]| -> Outcome {
        let exact = is_hadamard(n, set, spectrum).unwrap();
        let residual: f64 = unitarity_residual(n, set, spectrum);
        if exact {
            trues += 1;
            ensure!(
                residual < 1e-9,
                "({n}, {set:?}, {spectrum:?}) exact true, residual {residual:e}"
            );
        } else {
            falses += 1;
            ensure!(
                residual > 1e-2,
                "({n}, {set:?}, {spectrum:?}) exact false, residual {residual:e}"
            );
        }
        Ok(())
    };
    for (n, set, spectrum) in &triples.0 {
        check(*n, set, spectrum)?;
        if spectrum.len() > 1 {
            // The same triple with one spectral point moved.
            let mut moved = spectrum.clone();
            let last = moved.len() - 1;
            moved[last] = (moved[last] + 1).rem_euclid(*n);
            if !spectrum.contains(&moved[last]) {
                check(*n, set, &moved)?;
            }
        }
    }
    ensure!(
        trues > 0 && falses > 0,
        "{trues} true and {falses} false triples"
    );
    Ok(())
}

fn analyze_json(base: i64, digits: &[i64]) -> String {
    to_json(&analyze(base, digits, &AnalyzeOptions::default()).unwrap()).unwrap()
}

fn criterion_9() -> Outcome {
    let inputs: Vec<(i64, Vec<i64>)> = vec![
        (12, EXAMPLE3.to_vec()),
        (4, vec![0, 1, 8, 9]),
        (4, vec![0, 1, 2, 5]),
        (2, vec![0, 1]),
        (4, vec![0, 1, 32, 33]),
        (4, vec![3, 5, 19, 21]),
    ];
    for (b, d) in &inputs {
        ensure!(
            analyze_json(*b, d) == analyze_json(*b, d),
            "in-process JSON differs for {d:?}"
        );
    }
    let exe = env!("CARGO_BIN_EXE_tilescope");
    let run = |args: &[&str], workers: &str| {
        Command::new(exe)
            .args(args)
            .env("TILESCOPE_WORKERS", workers)
            .output()
            .unwrap()
    };
    for (b, d) in &inputs {
        let digits = d.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        let args = ["analyze", "-b", &b.to_string(), "-d", &digits, "--json"];
        let (x, y) = (run(&args, "1"), run(&args, "1"));
        ensure!(
            !x.stdout.is_empty() && x.stdout == y.stdout,
            "CLI JSON differs for {d:?}"
        );
    }
    let dir = std::env::temp_dir().join(format!("tilescope-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let path = dir.join(format!("records-{workers}.jsonl"));
        let out = run(
            &[
                "search",
                "-b",
                "4",
                "--bound",
                "20",
                "--out",
                path.to_str().unwrap(),
            ],
            workers,
        );
        outputs.push((out.stdout, std::fs::read(&path).map_err(|e| e.to_string())?));
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure!(
        outputs[0] == outputs[1],
        "search output depends on worker count"
    );
    Ok(())
}

fn main() {
    let mut triples = Triples::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = panic::catch_unwind(panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        let detail = outcome
            .as_ref()
            .err()
            .map(|e| format!(": {e}"))
            .unwrap_or_default();
        println!(
            "criterion {n} [{status}] {name} ({:.2?}){detail}",
            start.elapsed()
        );
        results.push((n, name, outcome));
    };
    run(1, "base-12 example decomposition", &mut criterion_1);
    run(2, "product-form fixture {0,1,8,9}", &mut criterion_2);
    run(
        3,
        "tile iff decomposition, base 4, digits <= 20",
        &mut criterion_3,
    );
    run(4, "per-m stabilization iff decomposition", &mut criterion_4);
    run(5, "cyclotomic self-check", &mut criterion_5);
    run(6, "Łaba spectra orthogonality", &mut || {
        criterion_6(&mut triples)
    });
    run(7, "spectral data flags and L values", &mut || {
        criterion_7(&mut triples)
    });
    run(8, "exact vs float Hadamard residual", &mut || {
        criterion_8(&triples)
    });
    run(9, "deterministic JSON", &mut criterion_9);
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
