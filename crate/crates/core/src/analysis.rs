//! Exhaustive sweeps over string families and `(w, m)` phase-space statistics.
//!
//! Every aggregate here is an integer count folded in a fixed order, so
//! results do not depend on the number of rayon workers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{
    box_size, count_bounded_compositions, decode_index, BoundedCompositions,
};
use crate::engine::{self, ClassifyLimits, DigitString, EngineError, Outcome};
use crate::ratio::Fraction;

/// Default ceiling on the number of games or strings one call may evaluate.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Results range over `0..=99`.
pub const RESULT_SLOTS: usize = 100;

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("request needs {required} evaluations, above the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("string width must be at least 2, got {0}")]
    WidthTooSmall(usize),
    #[error("digit cap must be in 1..=10, got {0}")]
    CapOutOfRange(u32),
    #[error("n must be at least 1")]
    NonPositiveN,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// The set of all width-`w` strings with digits below `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub w: usize,
    pub cap: u32,
    pub limits: ClassifyLimits,
}

impl SweepSpec {
    pub fn new(w: usize, cap: u32) -> Self {
        Self {
            w,
            cap,
            limits: ClassifyLimits::default(),
        }
    }

    pub fn with_limits(mut self, limits: ClassifyLimits) -> Self {
        self.limits = limits;
        self
    }

    fn validate(&self, budget: u64) -> Result<u64, AnalysisError> {
        if self.w < 2 {
            return Err(AnalysisError::WidthTooSmall(self.w));
        }
        if !(1..=10).contains(&self.cap) {
            return Err(AnalysisError::CapOutOfRange(self.cap));
        }
        match box_size(self.w, self.cap) {
            Some(size) if size <= budget => Ok(size),
            Some(size) => Err(AnalysisError::BudgetExceeded {
                required: size as u128,
                budget,
            }),
            None => Err(AnalysisError::BudgetExceeded {
                required: u128::MAX,
                budget,
            }),
        }
    }
}

/// Outcome tallies for all strings sharing one starting magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagnitudeRow {
    pub m: u32,
    pub terminated: u64,
    pub looping: u64,
    pub divergent: u64,
    pub undetermined: u64,
    /// Terminal result counts, indexed by result.
    pub results: Vec<u64>,
}

impl MagnitudeRow {
    fn empty(m: u32) -> Self {
        Self {
            m,
            terminated: 0,
            looping: 0,
            divergent: 0,
            undetermined: 0,
            results: vec![0; RESULT_SLOTS],
        }
    }

    pub fn total(&self) -> u64 {
        self.terminated + self.looping + self.divergent + self.undetermined
    }

    fn merge(&mut self, other: &MagnitudeRow) {
        self.terminated += other.terminated;
        self.looping += other.looping;
        self.divergent += other.divergent;
        self.undetermined += other.undetermined;
        for (a, b) in self.results.iter_mut().zip(&other.results) {
            *a += b;
        }
    }
}

/// Shape of one terminating chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainShape {
    pub start: DigitString,
    pub d: u32,
    pub max_width: usize,
    pub increasing_steps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayBin {
    pub d: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub w: usize,
    pub cap: u32,
    pub total: u64,
    pub terminated: u64,
    pub looping: u64,
    pub divergent: u64,
    pub undetermined: u64,
    /// Terminal result counts, indexed by result.
    pub result_counts: Vec<u64>,
    /// One row per magnitude `0..=(cap-1)*w`.
    pub by_magnitude: Vec<MagnitudeRow>,
    pub decay_histogram: Vec<DecayBin>,
    /// Terminating chains in lexicographic order of their start strings.
    pub chains: Vec<ChainShape>,
}

struct Partial {
    rows: Vec<MagnitudeRow>,
    decay: BTreeMap<u32, u64>,
    chains: Vec<ChainShape>,
}

impl Partial {
    fn new(max_m: u32) -> Self {
        Self {
            rows: (0..=max_m).map(MagnitudeRow::empty).collect(),
            decay: BTreeMap::new(),
            chains: Vec::new(),
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.merge(b);
        }
        for (d, c) in other.decay {
            *self.decay.entry(d).or_default() += c;
        }
        self.chains.extend(other.chains);
        self
    }
}

/// Classifies every string in the sweep box with the default budget.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport, AnalysisError> {
    sweep_with_budget(spec, DEFAULT_BUDGET)
}

pub fn sweep_with_budget(spec: &SweepSpec, budget: u64) -> Result<SweepReport, AnalysisError> {
    let size = spec.validate(budget)?;
    let max_m = (spec.cap - 1) * spec.w as u32;
    let chunks = size.div_ceil(CHUNK);

    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut part = Partial::new(max_m);
            let mut buf = vec![0u8; spec.w];
            let end = ((chunk + 1) * CHUNK).min(size);
            for index in chunk * CHUNK..end {
                decode_index(index, spec.cap, &mut buf);
                let s = DigitString::from_digits_unchecked(buf.clone());
                let row = &mut part.rows[s.magnitude() as usize];
                match engine::classify(&s, &spec.limits) {
                    Ok((
                        Outcome::Terminated {
                            result,
                            decay_length,
                            ..
                        },
                        trace,
                    )) => {
                        row.terminated += 1;
                        row.results[result as usize] += 1;
                        *part.decay.entry(decay_length).or_default() += 1;
                        part.chains.push(ChainShape {
                            start: s,
                            d: decay_length,
                            max_width: trace.max_width,
                            increasing_steps: trace.increasing_steps,
                        });
                    }
                    Ok((Outcome::Looping { .. }, _)) => row.looping += 1,
                    Ok((Outcome::Divergent { .. }, _)) => row.divergent += 1,
                    Err(EngineError::Undetermined { .. }) => row.undetermined += 1,
                    Err(e) => unreachable!("sweep strings are valid: {e}"),
                }
            }
            part
        })
        .collect();

    let merged = partials
        .into_iter()
        .fold(Partial::new(max_m), Partial::merge);

    let mut result_counts = vec![0u64; RESULT_SLOTS];
    for row in &merged.rows {
        for (a, b) in result_counts.iter_mut().zip(&row.results) {
            *a += b;
        }
    }
    let sum = |f: fn(&MagnitudeRow) -> u64| merged.rows.iter().map(f).sum::<u64>();
    Ok(SweepReport {
        w: spec.w,
        cap: spec.cap,
        total: size,
        terminated: sum(|r| r.terminated),
        looping: sum(|r| r.looping),
        divergent: sum(|r| r.divergent),
        undetermined: sum(|r| r.undetermined),
        result_counts,
        decay_histogram: merged
            .decay
            .into_iter()
            .map(|(d, count)| DecayBin { d, count })
            .collect(),
        by_magnitude: merged.rows,
        chains: merged.chains,
    })
}

/// Per-magnitude outcome probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: u32,
    pub count: u64,
    pub p_terminated: Fraction,
    pub p_looping: Fraction,
    pub p_divergent: Fraction,
    pub p_undetermined: Fraction,
}

/// Fraction of strings per magnitude with each verdict.
pub fn divergence_profile(report: &SweepReport) -> Vec<ProfileRow> {
    report
        .by_magnitude
        .iter()
        .filter(|row| row.total() > 0)
        .map(|row| {
            let total = row.total();
            ProfileRow {
                m: row.m,
                count: total,
                p_terminated: Fraction::of_counts(row.terminated, total),
                p_looping: Fraction::of_counts(row.looping, total),
                p_divergent: Fraction::of_counts(row.divergent, total),
                p_undetermined: Fraction::of_counts(row.undetermined, total),
            }
        })
        .collect()
}

/// Probability of one terminal result among strings of one magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultCell {
    pub m: u32,
    pub result: u8,
    pub count: u64,
    /// Given that the string terminates.
    pub conditional: Fraction,
    /// Over all strings of magnitude `m`.
    pub unconditional: Fraction,
}

/// Non-zero `(m, result)` cells, ordered by `m` then result.
pub fn result_by_magnitude(report: &SweepReport) -> Vec<ResultCell> {
    let mut cells = Vec::new();
    for row in &report.by_magnitude {
        if row.terminated == 0 {
            continue;
        }
        for (result, &count) in row.results.iter().enumerate() {
            if count > 0 {
                cells.push(ResultCell {
                    m: row.m,
                    result: result as u8,
                    count,
                    conditional: Fraction::of_counts(count, row.terminated),
                    unconditional: Fraction::of_counts(count, row.total()),
                });
            }
        }
    }
    cells
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainShapeSummary {
    pub w: usize,
    pub terminating: u64,
    pub max_d: u32,
    pub max_width: usize,
    pub max_increasing_steps: u32,
    pub records: Vec<ChainShape>,
}

/// Chain shapes of every terminating string plus their maxima.
pub fn chain_shape(report: &SweepReport) -> ChainShapeSummary {
    let chains = &report.chains;
    ChainShapeSummary {
        w: report.w,
        terminating: chains.len() as u64,
        max_d: chains.iter().map(|c| c.d).max().unwrap_or(0),
        max_width: chains.iter().map(|c| c.max_width).max().unwrap_or(0),
        max_increasing_steps: chains.iter().map(|c| c.increasing_steps).max().unwrap_or(0),
        records: chains.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayStats {
    pub w: usize,
    pub cap: u32,
    pub terminating: u64,
    pub min_d: u32,
    pub max_d: u32,
    pub mean_d: Fraction,
    pub histogram: Vec<DecayBin>,
}

/// Distribution of decay lengths over the terminating strings of a sweep.
pub fn decay_stats(report: &SweepReport) -> DecayStats {
    let hist = &report.decay_histogram;
    let terminating: u64 = hist.iter().map(|b| b.count).sum();
    let weighted: u64 = hist.iter().map(|b| b.d as u64 * b.count).sum();
    DecayStats {
        w: report.w,
        cap: report.cap,
        terminating,
        min_d: hist.first().map_or(0, |b| b.d),
        max_d: hist.last().map_or(0, |b| b.d),
        mean_d: if terminating == 0 {
            Fraction::new(0, 1)
        } else {
            Fraction::of_counts(weighted, terminating)
        },
        histogram: hist.clone(),
    }
}

/// Exact one-step averages over every string at `(w, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub w: usize,
    pub m: u32,
    pub string_count: u64,
    pub sum_delta_w: i64,
    pub sum_delta_m: i64,
    pub sum_n: u64,
}

impl PhaseCell {
    pub fn mean_delta_w(&self) -> Ratio<i64> {
        Ratio::new(self.sum_delta_w, self.string_count as i64)
    }

    pub fn mean_delta_m(&self) -> Ratio<i64> {
        Ratio::new(self.sum_delta_m, self.string_count as i64)
    }

    pub fn mean_n(&self) -> Ratio<i64> {
        Ratio::new(self.sum_n as i64, self.string_count as i64)
    }
}

/// Phase-space cells for every `(w, m)` in range that holds at least one
/// string. Populations are enumerated exhaustively, never sampled.
pub fn phase_field(
    w_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<u32>,
    budget: u64,
) -> Result<Vec<PhaseCell>, AnalysisError> {
    if *w_range.start() < 2 {
        return Err(AnalysisError::WidthTooSmall(*w_range.start()));
    }
    let coords: Vec<(usize, u32)> = w_range
        .flat_map(|w| m_range.clone().map(move |m| (w, m)))
        .filter(|&(w, m)| m <= 9 * w as u32)
        .collect();
    let required: u128 = coords
        .iter()
        .map(|&(w, m)| count_bounded_compositions(m, w, 9))
        .sum();
    if required > budget as u128 {
        return Err(AnalysisError::BudgetExceeded { required, budget });
    }
    Ok(coords
        .into_par_iter()
        .map(|(w, m)| phase_cell(w, m))
        .collect())
}

fn phase_cell(w: usize, m: u32) -> PhaseCell {
    let mut cell = PhaseCell {
        w,
        m,
        string_count: 0,
        sum_delta_w: 0,
        sum_delta_m: 0,
        sum_n: 0,
    };
    for digits in BoundedCompositions::new(m, w, 9) {
        let s = DigitString::from_digits_unchecked(digits);
        let stats = engine::step_stats(&s).expect("phase widths are at least 2");
        cell.string_count += 1;
        cell.sum_delta_w += stats.delta_w;
        cell.sum_delta_m += stats.delta_m;
        cell.sum_n += stats.n as u64;
    }
    cell
}

/// Heuristic divergence boundary `18 / (3/2)^(w-4)`.
pub fn critical_magnitude(w: usize) -> Result<BigRational, AnalysisError> {
    if w < 2 {
        return Err(AnalysisError::WidthTooSmall(w));
    }
    let base = BigRational::new(BigInt::from(3), BigInt::from(2));
    let exponent = w as i32 - 4;
    let scale: BigRational = if exponent >= 0 {
        Pow::pow(&base, exponent as u32)
    } else {
        BigRational::one() / Pow::pow(&base, (-exponent) as u32)
    };
    Ok(BigRational::from_integer(BigInt::from(18)) / scale)
}

/// Smallest magnitude of a string with `n` adjacent pairs summing to 10 or
/// more: `10 * floor((n + 1) / 2) + (1 - n mod 2)`, realised by `{1, 9, 1, 9, ...}`.
pub fn min_magnitude_for_n(n: u32) -> Result<u32, AnalysisError> {
    if n < 1 {
        return Err(AnalysisError::NonPositiveN);
    }
    Ok(10 * n.div_ceil(2) + (1 - n % 2))
}
