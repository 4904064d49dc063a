//! The game rule, outcome classification and one-step statistics.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Shortest string the rule can be applied to.
pub const MIN_ITERABLE_WIDTH: usize = 2;

/// A game is over once the string is shorter than this.
pub const TERMINAL_WIDTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("digit string is empty")]
    Empty,
    #[error("digit {digit} at position {position} is outside 0..=9")]
    DigitOutOfRange { position: usize, digit: u32 },
    #[error("invalid character {found:?} in digit string")]
    InvalidCharacter { found: char },
    #[error("string of length {width} is too short to iterate (need at least 2 digits)")]
    TooShort { width: usize },
    #[error("letter counts are empty")]
    EmptyCounts,
    #[error("no verdict after {iterations} iterations (width {width}); raise the iteration limit")]
    Undetermined { iterations: u32, width: usize },
}

/// An ordered, non-empty sequence of base-10 digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitString(Vec<u8>);

impl DigitString {
    pub fn new(digits: Vec<u8>) -> Result<Self, EngineError> {
        if digits.is_empty() {
            return Err(EngineError::Empty);
        }
        if let Some((position, &d)) = digits.iter().enumerate().find(|(_, &d)| d > 9) {
            return Err(EngineError::DigitOutOfRange {
                position,
                digit: d as u32,
            });
        }
        Ok(Self(digits))
    }

    /// Caller guarantees every digit is in `0..=9` and the vector is non-empty.
    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        debug_assert!(!digits.is_empty() && digits.iter().all(|&d| d <= 9));
        Self(digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    /// Length `w`.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    /// Digit sum `m`.
    pub fn magnitude(&self) -> u32 {
        self.0.iter().map(|&d| d as u32).sum()
    }

    /// Number of adjacent pairs summing to 10 or more.
    pub fn high_pairs(&self) -> usize {
        self.0.windows(2).filter(|p| p[0] + p[1] >= 10).count()
    }

    /// `10 * s1 + s2` for a two-digit string, the single digit for a one-digit string.
    pub fn result(&self) -> Option<u8> {
        match self.0.as_slice() {
            [a] => Some(*a),
            [a, b] => Some(10 * a + b),
            _ => None,
        }
    }

    /// Formats as `{1, 1, 0, 1, 0}`.
    pub fn braced(&self) -> String {
        let inner: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        format!("{{{}}}", inner.join(", "))
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitString({self})")
    }
}

impl FromStr for DigitString {
    type Err = EngineError;

    /// Parses a bare digit sequence such as `11010`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or(EngineError::InvalidCharacter { found: c })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(digits)
    }
}

impl TryFrom<&[u8]> for DigitString {
    type Error = EngineError;

    fn try_from(digits: &[u8]) -> Result<Self, Self::Error> {
        Self::new(digits.to_vec())
    }
}

impl Serialize for DigitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DigitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Applies the rule once: concatenates the decimal sums of adjacent pairs.
pub fn iterate(s: &DigitString) -> Result<DigitString, EngineError> {
    if s.width() < MIN_ITERABLE_WIDTH {
        return Err(EngineError::TooShort { width: s.width() });
    }
    Ok(DigitString(iterate_digits(&s.0)))
}

fn iterate_digits(digits: &[u8]) -> Vec<u8> {
    let mut next = Vec::with_capacity(2 * digits.len());
    for pair in digits.windows(2) {
        let sum = pair[0] + pair[1];
        if sum >= 10 {
            next.push(1);
            next.push(sum - 10);
        } else {
            next.push(sum);
        }
    }
    next
}

/// Predicted shape of the next string, derived from the pair structure alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub n: usize,
    pub predicted_w: usize,
    pub predicted_m: u32,
    pub delta_w: i64,
    pub delta_m: i64,
}

/// Width and magnitude of `iterate(s)` computed without building it:
/// `w -> w - 1 + n` and `m -> s1 + sw + 2 * (inner digits) - 9n`.
pub fn step_stats(s: &DigitString) -> Result<StepStats, EngineError> {
    let w = s.width();
    if w < MIN_ITERABLE_WIDTH {
        return Err(EngineError::TooShort { width: w });
    }
    let d = &s.0;
    let n = s.high_pairs();
    let inner: u32 = d[1..w - 1].iter().map(|&x| x as u32).sum();
    let predicted_m = d[0] as u32 + d[w - 1] as u32 + 2 * inner - 9 * n as u32;
    let predicted_w = w - 1 + n;
    Ok(StepStats {
        n,
        predicted_w,
        predicted_m,
        delta_w: predicted_w as i64 - w as i64,
        delta_m: predicted_m as i64 - s.magnitude() as i64,
    })
}

/// Builds a starting string from raw letter counts. Counts of 10 or more
/// are written out in decimal in place, so a count of 12 contributes `1, 2`.
pub fn play(counts: &[u32]) -> Result<DigitString, EngineError> {
    if counts.is_empty() {
        return Err(EngineError::EmptyCounts);
    }
    let mut digits = Vec::with_capacity(counts.len());
    for &c in counts {
        if c < 10 {
            digits.push(c as u8);
        } else {
            digits.extend(c.to_string().bytes().map(|b| b - b'0'));
        }
    }
    Ok(DigitString(digits))
}

/// Bounds for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyLimits {
    /// Width above which a chain is declared divergent. `None` means `2 * w0 + 8`.
    pub max_width: Option<usize>,
    pub max_iterations: u32,
}

impl ClassifyLimits {
    pub const DEFAULT_MAX_ITERATIONS: u32 = 10_000;

    pub fn new(max_width: Option<usize>, max_iterations: u32) -> Self {
        Self {
            max_width,
            max_iterations,
        }
    }

    /// Divergence width for a game starting at width `w0`.
    pub fn width_limit(&self, w0: usize) -> usize {
        self.max_width.unwrap_or(2 * w0 + 8)
    }
}

impl Default for ClassifyLimits {
    fn default() -> Self {
        Self {
            max_width: None,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Terminated,
    Looping,
    Divergent,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Terminated => "terminated",
            OutcomeKind::Looping => "looping",
            OutcomeKind::Divergent => "divergent",
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fate of one game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Terminated {
        final_string: DigitString,
        result: u8,
        #[serde(rename = "d")]
        decay_length: u32,
    },
    Looping {
        preperiod: u32,
        period: u32,
        /// The cycle, starting at the first repeated string.
        cycle_strings: Vec<DigitString>,
    },
    /// Heuristic verdict: the width passed the configured limit.
    Divergent {
        iterations_to_detection: u32,
        width_at_detection: usize,
    },
}

impl Outcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Terminated { .. } => OutcomeKind::Terminated,
            Outcome::Looping { .. } => OutcomeKind::Looping,
            Outcome::Divergent { .. } => OutcomeKind::Divergent,
        }
    }

    pub fn result(&self) -> Option<u8> {
        match self {
            Outcome::Terminated { result, .. } => Some(*result),
            _ => None,
        }
    }

    pub fn decay_length(&self) -> Option<u32> {
        match self {
            Outcome::Terminated { decay_length, .. } => Some(*decay_length),
            _ => None,
        }
    }
}

/// History statistics of one game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTrace {
    /// `None` for games that never terminate.
    pub decay_length: Option<u32>,
    pub max_width: usize,
    pub increasing_steps: u32,
    pub visited_count: usize,
}

/// Plays `s` to a verdict.
///
/// Terminates once fewer than three digits remain, loops when a string
/// recurs (exact), and diverges when the width passes
/// [`ClassifyLimits::width_limit`] (heuristic). Strings of length 1 or 2 are
/// already terminal with `d = 0`.
pub fn classify(
    s: &DigitString,
    limits: &ClassifyLimits,
) -> Result<(Outcome, ChainTrace), EngineError> {
    let w0 = s.width();
    if w0 < TERMINAL_WIDTH {
        let result = s.result().expect("width is 1 or 2");
        return Ok((
            Outcome::Terminated {
                final_string: s.clone(),
                result,
                decay_length: 0,
            },
            ChainTrace {
                decay_length: Some(0),
                max_width: w0,
                increasing_steps: 0,
                visited_count: 1,
            },
        ));
    }

    let width_limit = limits.width_limit(w0);
    let mut history: Vec<Vec<u8>> = vec![s.0.clone()];
    let mut seen: HashMap<Vec<u8>, u32> = HashMap::new();
    seen.insert(s.0.clone(), 0);
    let mut max_width = w0;
    let mut increasing_steps = 0u32;

    for step in 1..=limits.max_iterations {
        let current = history.last().expect("history is never empty");
        let next = iterate_digits(current);
        if next.len() > current.len() {
            increasing_steps += 1;
        }
        max_width = max_width.max(next.len());
        let trace = |decay_length, visited_count| ChainTrace {
            decay_length,
            max_width,
            increasing_steps,
            visited_count,
        };

        if next.len() < TERMINAL_WIDTH {
            let final_string = DigitString(next);
            let result = final_string.result().expect("width is 1 or 2");
            return Ok((
                Outcome::Terminated {
                    final_string,
                    result,
                    decay_length: step,
                },
                trace(Some(step), history.len() + 1),
            ));
        }
        if next.len() > width_limit {
            return Ok((
                Outcome::Divergent {
                    iterations_to_detection: step,
                    width_at_detection: next.len(),
                },
                trace(None, history.len() + 1),
            ));
        }
        if let Some(&first) = seen.get(&next) {
            let cycle_strings = history[first as usize..]
                .iter()
                .map(|d| DigitString(d.clone()))
                .collect();
            return Ok((
                Outcome::Looping {
                    preperiod: first,
                    period: step - first,
                    cycle_strings,
                },
                trace(None, history.len()),
            ));
        }
        seen.insert(next.clone(), step);
        history.push(next);
    }

    Err(EngineError::Undetermined {
        iterations: limits.max_iterations,
        width: history.last().map_or(w0, Vec::len),
    })
}

/// The sequence of strings visited from `s`, stopping after the first
/// terminal string. Infinite for looping and divergent games.
pub fn trajectory(s: &DigitString) -> Trajectory {
    Trajectory {
        next: Some(s.clone()),
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    next: Option<DigitString>,
}

impl Iterator for Trajectory {
    type Item = DigitString;

    fn next(&mut self) -> Option<DigitString> {
        let current = self.next.take()?;
        if current.width() >= TERMINAL_WIDTH {
            self.next = Some(DigitString(iterate_digits(&current.0)));
        }
        Some(current)
    }
}
