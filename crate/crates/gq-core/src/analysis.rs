//! Growth surveys, the cubic lower-bound experiment and rewrite-trace
//! invariance fuzzing, plus the CSV rendering used by the command line.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{
    build_diagram, isodiametric_bound, isoperimetric_bound, DiagramError,
};
use crate::group::{normalize, normalize_traced, relators, GroupParams, RewriteTrace};
use crate::word::{cubic_witness_word, Letter, Word, GENERATORS};

/// Hard ceiling on the word length fed to the diagram builder.
pub const MAX_SURVEY_WORD_LEN: usize = 200;

pub const SURVEY_CSV_HEADER: &str =
    "n,word_length,area,area_bound,diameter,diameter_bound,depth_used,trace_c1,trace_c2,trace_c3,wall_time_ms";

#[derive(Debug, Clone)]
pub struct SurveyRow {
    pub n: u32,
    pub word_length: usize,
    pub area: u64,
    /// Floor of the exact rational area bound.
    pub area_bound: BigInt,
    pub diameter: u32,
    pub diameter_bound: i64,
    pub depth_used: u32,
    pub trace: RewriteTrace,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Error)]
pub enum SurveyRowError {
    #[error("n = {n}: word length {len} exceeds the budget {max}")]
    OverBudget { n: u32, len: usize, max: usize },
    #[error("n = {n}: {source}")]
    Build {
        n: u32,
        #[source]
        source: DiagramError,
    },
    #[error("n = {n}: row invariant violated: {what}")]
    Invariant { n: u32, what: String },
}

#[derive(Debug, Clone)]
pub struct SurveyOptions {
    pub seed: u64,
    /// Extra rows per n built from random trivial words.
    pub random_per_n: u32,
    /// Report real wall times; off by default so CSV output is
    /// byte-identical across runs.
    pub timings: bool,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        SurveyOptions {
            seed: 0,
            random_per_n: 0,
            timings: false,
        }
    }
}

fn survey_one(n: u32, word: &Word, params: &GroupParams, timings: bool) -> Result<SurveyRow, SurveyRowError> {
    if word.len() > MAX_SURVEY_WORD_LEN {
        return Err(SurveyRowError::OverBudget {
            n,
            len: word.len(),
            max: MAX_SURVEY_WORD_LEN,
        });
    }
    let start = Instant::now();
    let (_, trace) = normalize_traced(word, params);
    let d = build_diagram(word, params).map_err(|source| SurveyRowError::Build { n, source })?;
    let area_bound = isoperimetric_bound(word.len(), params).floor().to_integer();
    let diameter_bound = isodiametric_bound(word.len(), params);
    let row = SurveyRow {
        n,
        word_length: word.len(),
        area: d.area(),
        area_bound,
        diameter: d.diameter(),
        diameter_bound,
        depth_used: d.max_depth_used,
        trace,
        wall_time_ms: if timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
    };
    if BigInt::from(row.area) > row.area_bound {
        return Err(SurveyRowError::Invariant {
            n,
            what: format!("area {} exceeds bound {}", row.area, row.area_bound),
        });
    }
    if i64::from(row.diameter) > row.diameter_bound {
        return Err(SurveyRowError::Invariant {
            n,
            what: format!("diameter {} exceeds bound {}", row.diameter, row.diameter_bound),
        });
    }
    Ok(row)
}

/// One row per n for the witness family, plus optional rows from random
/// trivial words (a random word followed by a rewrite-perturbed spelling
/// of its inverse). Per-row failures are reported, never propagated.
pub fn survey(
    params: &GroupParams,
    ns: &[u32],
    opts: &SurveyOptions,
) -> Vec<Result<SurveyRow, SurveyRowError>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for &n in ns {
        let word = cubic_witness_word(n, params.q() as u32);
        out.push(survey_one(n, &word, params, opts.timings));
        for _ in 0..opts.random_per_n {
            let word = random_trivial_word(params, n as usize + 2, &mut rng);
            out.push(survey_one(n, &word, params, opts.timings));
        }
    }
    out
}

/// Render successful rows as CSV with the fixed header.
pub fn render_survey_csv(rows: &[Result<SurveyRow, SurveyRowError>]) -> String {
    let mut s = String::from(SURVEY_CSV_HEADER);
    s.push('\n');
    for row in rows.iter().flatten() {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.n,
            row.word_length,
            row.area,
            row.area_bound,
            row.diameter,
            row.diameter_bound,
            row.depth_used,
            row.trace.c1,
            row.trace.c2,
            row.trace.c3,
            row.wall_time_ms
        ));
    }
    s
}

#[derive(Debug, Clone)]
pub struct LowerBoundReport {
    pub n: u32,
    pub word_length: usize,
    pub trace: RewriteTrace,
    pub area_built: u64,
    /// |c2| == n^3 and the built area is at least n^3.
    pub passed: bool,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("word length {len} exceeds the budget {max}")]
    OverBudget { len: usize, max: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("input word is not trivial in the group")]
    NotTrivial,
}

/// The cubic lower-bound experiment: the witness word for n must carry
/// exactly n^3 signed [x, z] applications, and any diagram for it at
/// least that many cells.
pub fn lower_bound_check(n: u32, params: &GroupParams) -> Result<LowerBoundReport, AnalysisError> {
    let word = cubic_witness_word(n, params.q() as u32);
    if word.len() > MAX_SURVEY_WORD_LEN {
        return Err(AnalysisError::OverBudget {
            len: word.len(),
            max: MAX_SURVEY_WORD_LEN,
        });
    }
    let (nf, trace) = normalize_traced(&word, params);
    debug_assert!(nf.is_identity());
    let d = build_diagram(&word, params)?;
    let cube = (n as i64).pow(3);
    let passed = trace.c2.abs() == cube && d.area() as i64 >= cube;
    Ok(LowerBoundReport {
        n,
        word_length: word.len(),
        trace,
        area_built: d.area(),
        passed,
    })
}

#[derive(Debug, Clone)]
pub struct FuzzMismatch {
    pub iteration: u32,
    pub trace: RewriteTrace,
    pub word: Word,
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub base_trace: RewriteTrace,
    pub variants: u32,
    pub mismatches: Vec<FuzzMismatch>,
}

impl FuzzReport {
    pub fn all_equal(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Trace-invariance fuzzing: random trivial perturbations of a trivial
/// word (free insertions, balanced conjugated-relator insertions,
/// cyclic rotations) must all renormalize to the identical trace.
/// Deterministic under the seed.
pub fn invariance_fuzz(
    w: &Word,
    iterations: u32,
    seed: u64,
    params: &GroupParams,
) -> Result<FuzzReport, AnalysisError> {
    if !normalize(w, params).is_identity() {
        return Err(AnalysisError::NotTrivial);
    }
    let (_, base_trace) = normalize_traced(w, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for iteration in 0..iterations {
        let mut letters = w.letters().to_vec();
        let ops = rng.gen_range(1..=3);
        for _ in 0..ops {
            perturb(&mut letters, params, &mut rng);
        }
        let variant = Word::new(letters);
        let (nf, trace) = normalize_traced(&variant, params);
        if !nf.is_identity() || trace != base_trace {
            mismatches.push(FuzzMismatch {
                iteration,
                trace,
                word: variant,
            });
        }
    }
    Ok(FuzzReport {
        base_trace,
        variants: iterations,
        mismatches,
    })
}

/// One trivial perturbation: a free l l^-1 insertion, a pair of
/// conjugated relator insertions with opposite orientations (net trace
/// zero), or a cyclic rotation.
fn perturb(letters: &mut Vec<Letter>, params: &GroupParams, rng: &mut ChaCha8Rng) {
    match rng.gen_range(0..3u8) {
        0 => {
            let l = *GENERATORS.choose(rng).unwrap();
            let pos = rng.gen_range(0..=letters.len());
            letters.splice(pos..pos, [l, l.inverse()]);
        }
        1 => {
            let rels = relators(params);
            let r = rels.choose(rng).unwrap();
            let flip = rng.gen_bool(0.5);
            let (first, second) = if flip {
                (r.inverse(), r.clone())
            } else {
                (r.clone(), r.inverse())
            };
            insert_conjugated(letters, &first, rng);
            insert_conjugated(letters, &second, rng);
        }
        _ => {
            if !letters.is_empty() {
                let k = rng.gen_range(0..letters.len());
                letters.rotate_left(k);
            }
        }
    }
}

fn insert_conjugated(letters: &mut Vec<Letter>, r: &Word, rng: &mut ChaCha8Rng) {
    let clen = rng.gen_range(0..=2);
    let conj: Vec<Letter> = (0..clen)
        .map(|_| *GENERATORS.choose(rng).unwrap())
        .collect();
    let mut chunk = conj.clone();
    chunk.extend_from_slice(r.letters());
    chunk.extend(conj.iter().rev().map(|l| l.inverse()));
    let pos = rng.gen_range(0..=letters.len());
    letters.splice(pos..pos, chunk);
}

/// A random freely reduced word of exactly the requested length.
fn random_reduced_word(len: usize, rng: &mut ChaCha8Rng) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = *GENERATORS.choose(rng).unwrap();
        if letters.last().is_some_and(|&top| top.is_inverse_of(l)) {
            continue;
        }
        letters.push(l);
    }
    Word::new(letters)
}

/// A nonempty freely reduced trivial word: u followed by a
/// rewrite-perturbed spelling of u^-1, trivial by construction.
pub fn random_trivial_word(params: &GroupParams, half_len: usize, rng: &mut ChaCha8Rng) -> Word {
    loop {
        let u = random_reduced_word(half_len.max(1), rng);
        let mut tail = u.inverse().letters().to_vec();
        for _ in 0..rng.gen_range(1..=2) {
            perturb(&mut tail, params, rng);
        }
        let w = u.concat(&Word::new(tail)).free_reduce();
        if !w.is_empty() && normalize(&w, params).is_identity() {
            return w;
        }
    }
}

/// Reported (not asserted) growth indicator log(area) / log(n).
pub fn log_area_ratio(row: &SurveyRow) -> Option<f64> {
    if row.n < 2 || row.area == 0 {
        return None;
    }
    let area = BigInt::from(row.area).to_f64()?;
    Some(area.ln() / (row.n as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_small_cases() {
        let p1 = GroupParams::new(1);
        assert_eq!(lower_bound_check(1, &p1).unwrap().trace.c2.abs(), 1);
        assert_eq!(lower_bound_check(2, &p1).unwrap().trace.c2.abs(), 8);
        let p2 = GroupParams::new(2);
        let r = lower_bound_check(3, &p2).unwrap();
        assert_eq!(r.trace.c2.abs(), 27);
        assert!(r.passed);
    }

    #[test]
    fn survey_rows_satisfy_invariants() {
        let p = GroupParams::new(1);
        let rows = survey(&p, &[1, 2, 3], &SurveyOptions::default());
        assert_eq!(rows.len(), 3);
        let mut seen = Vec::new();
        for row in rows {
            let row = row.expect("row should build");
            assert!(BigInt::from(row.area) <= row.area_bound);
            assert!(i64::from(row.diameter) <= row.diameter_bound);
            seen.push(row.trace.c2.abs());
        }
        assert_eq!(seen, vec![1, 8, 27]);
    }

    #[test]
    fn survey_csv_is_deterministic() {
        let p = GroupParams::new(1);
        let opts = SurveyOptions {
            random_per_n: 2,
            ..SurveyOptions::default()
        };
        let a = render_survey_csv(&survey(&p, &[1, 2], &opts));
        let b = render_survey_csv(&survey(&p, &[1, 2], &opts));
        assert_eq!(a, b);
        assert!(a.starts_with(SURVEY_CSV_HEADER));
        assert_eq!(a.lines().count(), 1 + 2 * 3);
    }

    #[test]
    fn fuzz_constant_trace_on_small_words() {
        let p = GroupParams::new(1);
        let empty = invariance_fuzz(&Word::empty(), 50, 7, &p).unwrap();
        assert_eq!(empty.base_trace, RewriteTrace::default());
        assert!(empty.all_equal());

        let comm = Word::parse("xzXZ").unwrap();
        let report = invariance_fuzz(&comm, 1000, 1, &p).unwrap();
        assert!(report.all_equal(), "{:?}", report.mismatches.first());
        assert_eq!(report.base_trace.c2.abs(), 1);
    }

    #[test]
    fn fuzz_rejects_nontrivial_words() {
        let p = GroupParams::new(1);
        assert!(matches!(
            invariance_fuzz(&Word::parse("xy").unwrap(), 10, 0, &p),
            Err(AnalysisError::NotTrivial)
        ));
    }

    #[test]
    fn fuzz_deterministic_under_seed() {
        let p = GroupParams::new(2);
        let word = cubic_witness_word(1, 2);
        let a = invariance_fuzz(&word, 200, 42, &p).unwrap();
        let b = invariance_fuzz(&word, 200, 42, &p).unwrap();
        assert_eq!(a.base_trace, b.base_trace);
        assert_eq!(a.mismatches.len(), b.mismatches.len());
        assert!(a.all_equal());
    }

    #[test]
    fn random_trivial_words_are_trivial() {
        let p = GroupParams::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = random_trivial_word(&p, 5, &mut rng);
            assert!(!w.is_empty());
            assert!(w.is_reduced());
            assert!(normalize(&w, &p).is_identity());
        }
    }
}
