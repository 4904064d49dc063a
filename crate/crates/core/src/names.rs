//! Keyword letter counting, name rosters, and pairing and scoring experiments.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{AnalysisError, RESULT_SLOTS};
use crate::combinatorics::{box_size, decode_index};
use crate::engine::{self, ClassifyLimits, EngineError, Outcome, OutcomeKind};
use crate::ratio::Fraction;

/// Results at or above this count as a high score.
pub const HIGH_SCORE: u8 = 95;

const BUNDLED_ROSTER: &str = include_str!("../data/uk_top50_2010.csv");

#[derive(Debug, Error)]
pub enum NamesError {
    #[error("keyword {0:?} must contain at least two ASCII letters and nothing else")]
    InvalidKeyword(String),
    #[error("counts set has {got} entries but the keyword has {expected} letters")]
    SetLengthMismatch { expected: usize, got: usize },
    #[error("invalid counts set {0:?}")]
    InvalidSet(String),
    #[error("roster line {line}: {message}")]
    InvalidRecord { line: u64, message: String },
    #[error("roster is empty")]
    EmptyRoster,
    #[error("roster CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// The game word. Letters are stored lowercase; repeats are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Keyword {
    letters: Vec<u8>,
}

impl Keyword {
    pub fn new(word: &str) -> Result<Self, NamesError> {
        if word.len() < 2 || !word.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(NamesError::InvalidKeyword(word.to_string()));
        }
        Ok(Self {
            letters: word.bytes().map(|b| b.to_ascii_lowercase()).collect(),
        })
    }

    pub fn loves() -> Self {
        Self::new("LOVES").expect("valid keyword")
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn width(&self) -> usize {
        self.letters.len()
    }

    /// Occurrences of each keyword letter in `text`, ignoring case and
    /// anything outside `a-z`.
    pub fn count_in(&self, text: &str) -> Vec<u32> {
        let mut tally = [0u32; 26];
        for b in text.bytes() {
            let b = b.to_ascii_lowercase();
            if b.is_ascii_lowercase() {
                tally[(b - b'a') as usize] += 1;
            }
        }
        self.letters
            .iter()
            .map(|&l| tally[(l - b'a') as usize])
            .collect()
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.letters).to_ascii_uppercase())
    }
}

impl FromStr for Keyword {
    type Err = NamesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

/// Keyword letter counts over both names together.
pub fn letter_counts(name_a: &str, name_b: &str, keyword: &Keyword) -> Vec<u32> {
    keyword
        .count_in(name_a)
        .into_iter()
        .zip(keyword.count_in(name_b))
        .map(|(a, b)| a + b)
        .collect()
}

pub fn play_names(
    name_a: &str,
    name_b: &str,
    keyword: &Keyword,
    limits: &ClassifyLimits,
) -> Result<Outcome, NamesError> {
    let start = engine::play(&letter_counts(name_a, name_b, keyword))?;
    Ok(engine::classify(&start, limits)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Boy,
    Girl,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameRecord {
    pub name: String,
    pub gender: Gender,
    pub rank: u32,
}

/// An ordered list of names. Duplicate names are kept as separate entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Roster {
    records: Vec<NameRecord>,
}

impl Roster {
    /// Parses UTF-8 CSV with header `name,gender,rank`.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, NamesError> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = Vec::new();
        for row in csv.deserialize::<NameRecord>() {
            let record = row?;
            let line = records.len() as u64 + 2;
            if !record.name.bytes().any(|b| b.is_ascii_alphabetic()) {
                return Err(NamesError::InvalidRecord {
                    line,
                    message: format!("name {:?} has no letters", record.name),
                });
            }
            if !(1..=50).contains(&record.rank) {
                return Err(NamesError::InvalidRecord {
                    line,
                    message: format!("rank {} outside 1..=50", record.rank),
                });
            }
            records.push(record);
        }
        if records.is_empty() {
            return Err(NamesError::EmptyRoster);
        }
        Ok(Self { records })
    }

    /// The top 50 boys' and girls' first names for England and Wales, 2010.
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_ROSTER.as_bytes()).expect("bundled roster parses")
    }

    pub fn from_names<S: AsRef<str>>(names: &[S], gender: Gender) -> Self {
        Self {
            records: names
                .iter()
                .enumerate()
                .map(|(i, n)| NameRecord {
                    name: n.as_ref().to_string(),
                    gender,
                    rank: i as u32 + 1,
                })
                .collect(),
        }
    }

    pub fn records(&self) -> &[NameRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub name_a: String,
    pub name_b: String,
    /// `None` when the iteration cap was hit.
    pub kind: Option<OutcomeKind>,
    pub result: Option<u8>,
    pub magnitude: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub value: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterDistribution {
    pub letter: char,
    pub position: usize,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub keyword: String,
    pub pairs: Vec<PairRecord>,
    pub terminated: u64,
    pub looping: u64,
    pub divergent: u64,
    pub undetermined: u64,
    pub result_counts: Vec<u64>,
    /// Magnitudes of the starting strings.
    pub magnitude_histogram: Vec<HistogramBin>,
    /// Raw count distribution per keyword position.
    pub letter_distributions: Vec<LetterDistribution>,
}

impl PairingReport {
    pub fn total(&self) -> u64 {
        self.pairs.len() as u64
    }
}

fn histogram(values: impl Iterator<Item = u32>) -> Vec<HistogramBin> {
    let mut counts = std::collections::BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0u64) += 1;
    }
    counts
        .into_iter()
        .map(|(value, count)| HistogramBin { value, count })
        .collect()
}

/// Plays every unordered pair of distinct roster entries.
pub fn roster_pairings(
    roster: &Roster,
    keyword: &Keyword,
    limits: &ClassifyLimits,
) -> Result<PairingReport, NamesError> {
    let records = roster.records();
    let singles: Vec<Vec<u32>> = records.iter().map(|r| keyword.count_in(&r.name)).collect();
    let index_pairs: Vec<(usize, usize)> = (0..records.len())
        .flat_map(|i| (i + 1..records.len()).map(move |j| (i, j)))
        .collect();

    let played: Vec<(Vec<u32>, PairRecord)> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let counts: Vec<u32> = singles[i]
                .iter()
                .zip(&singles[j])
                .map(|(a, b)| a + b)
                .collect();
            let start = engine::play(&counts)?;
            let (kind, result) = match engine::classify(&start, limits) {
                Ok((outcome, _)) => (Some(outcome.kind()), outcome.result()),
                Err(EngineError::Undetermined { .. }) => (None, None),
                Err(e) => return Err(e.into()),
            };
            Ok((
                counts,
                PairRecord {
                    name_a: records[i].name.clone(),
                    name_b: records[j].name.clone(),
                    kind,
                    result,
                    magnitude: start.magnitude(),
                },
            ))
        })
        .collect::<Result<_, NamesError>>()?;

    let mut result_counts = vec![0u64; RESULT_SLOTS];
    let (mut terminated, mut looping, mut divergent, mut undetermined) = (0, 0, 0, 0);
    for (_, p) in &played {
        match p.kind {
            Some(OutcomeKind::Terminated) => {
                terminated += 1;
                result_counts[p.result.expect("terminated has result") as usize] += 1;
            }
            Some(OutcomeKind::Looping) => looping += 1,
            Some(OutcomeKind::Divergent) => divergent += 1,
            None => undetermined += 1,
        }
    }
    let magnitude_histogram = histogram(played.iter().map(|(_, p)| p.magnitude));
    let letter_distributions = keyword
        .letters()
        .iter()
        .enumerate()
        .map(|(position, &l)| LetterDistribution {
            letter: (l as char).to_ascii_uppercase(),
            position,
            histogram: histogram(played.iter().map(|(c, _)| c[position])),
        })
        .collect();

    Ok(PairingReport {
        keyword: keyword.to_string(),
        pairs: played.into_iter().map(|(_, p)| p).collect(),
        terminated,
        looping,
        divergent,
        undetermined,
        result_counts,
        magnitude_histogram,
        letter_distributions,
    })
}

/// One subject's letter counts played against every roster member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub set: Vec<u32>,
    pub magnitude: u32,
    pub result_sum: u64,
    pub terminating_partners: u64,
    pub high_partner_count: u64,
    pub nonterminating_partner_count: u64,
}

impl ScoreCard {
    /// Mean result over terminating partners; `None` if there are none.
    pub fn average_score(&self) -> Option<Ratio<u64>> {
        (self.terminating_partners > 0)
            .then(|| Ratio::new(self.result_sum, self.terminating_partners))
    }

    /// Compact set label such as `02000`. Counts above 9 are bracketed.
    pub fn label(&self) -> String {
        format_set(&self.set)
    }
}

pub fn format_set(set: &[u32]) -> String {
    set.iter()
        .map(|&c| {
            if c < 10 {
                c.to_string()
            } else {
                format!("[{c}]")
            }
        })
        .collect()
}

/// Parses a set label such as `02000` (one digit per keyword letter).
pub fn parse_set(label: &str) -> Result<Vec<u32>, NamesError> {
    label
        .chars()
        .map(|c| {
            c.to_digit(10)
                .ok_or_else(|| NamesError::InvalidSet(label.to_string()))
        })
        .collect()
}

fn score_against(
    set: &[u32],
    partners: &[Vec<u32>],
    limits: &ClassifyLimits,
) -> Result<ScoreCard, NamesError> {
    let mut card = ScoreCard {
        set: set.to_vec(),
        magnitude: set.iter().sum(),
        result_sum: 0,
        terminating_partners: 0,
        high_partner_count: 0,
        nonterminating_partner_count: 0,
    };
    for partner in partners {
        let counts: Vec<u32> = set.iter().zip(partner).map(|(a, b)| a + b).collect();
        let start = engine::play(&counts)?;
        let outcome = match engine::classify(&start, limits) {
            Ok((outcome, _)) => Some(outcome),
            Err(EngineError::Undetermined { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        match outcome.as_ref().and_then(Outcome::result) {
            Some(result) => {
                card.result_sum += result as u64;
                card.terminating_partners += 1;
                if result >= HIGH_SCORE {
                    card.high_partner_count += 1;
                }
            }
            None => card.nonterminating_partner_count += 1,
        }
    }
    Ok(card)
}

fn partner_counts(roster: &Roster, keyword: &Keyword) -> Vec<Vec<u32>> {
    roster
        .records()
        .iter()
        .map(|r| keyword.count_in(&r.name))
        .collect()
}

/// Scores a counts set against every roster entry (including any entry
/// whose own counts equal the set).
pub fn score_individual(
    set: &[u32],
    roster: &Roster,
    keyword: &Keyword,
    limits: &ClassifyLimits,
) -> Result<ScoreCard, NamesError> {
    if set.len() != keyword.width() {
        return Err(NamesError::SetLengthMismatch {
            expected: keyword.width(),
            got: set.len(),
        });
    }
    score_against(set, &partner_counts(roster, keyword), limits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedSets {
    pub cap: u32,
    /// Highest average first; ties broken by set order.
    pub by_average: Vec<ScoreCard>,
    /// Most high-scoring partners first; ties broken by average, then set order.
    pub by_high: Vec<ScoreCard>,
}

fn cmp_average(a: &ScoreCard, b: &ScoreCard) -> std::cmp::Ordering {
    // Cards with no terminating partner sort last.
    match (a.average_score(), b.average_score()) {
        (Some(x), Some(y)) => y.cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    }
}

/// Scores every counts set with all entries below `cap`.
pub fn rank_sets(
    cap: u32,
    roster: &Roster,
    keyword: &Keyword,
    limits: &ClassifyLimits,
    budget: u64,
) -> Result<RankedSets, NamesError> {
    if !(1..=10).contains(&cap) {
        return Err(AnalysisError::CapOutOfRange(cap).into());
    }
    let w = keyword.width();
    let size = box_size(w, cap)
        .filter(|&s| s.saturating_mul(roster.len() as u64) <= budget)
        .ok_or(AnalysisError::BudgetExceeded {
            required: (cap as u128).saturating_pow(w as u32) * roster.len() as u128,
            budget,
        })?;
    let partners = partner_counts(roster, keyword);

    let cards: Vec<ScoreCard> = (0..size)
        .into_par_iter()
        .map(|index| {
            let mut digits = vec![0u8; w];
            decode_index(index, cap, &mut digits);
            let set: Vec<u32> = digits.into_iter().map(u32::from).collect();
            score_against(&set, &partners, limits)
        })
        .collect::<Result<_, _>>()?;

    let mut by_average = cards.clone();
    by_average.sort_by(|a, b| cmp_average(a, b).then_with(|| a.set.cmp(&b.set)));
    let mut by_high = cards;
    by_high.sort_by(|a, b| {
        b.high_partner_count
            .cmp(&a.high_partner_count)
            .then_with(|| cmp_average(a, b))
            .then_with(|| a.set.cmp(&b.set))
    });
    Ok(RankedSets {
        cap,
        by_average,
        by_high,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeScore {
    pub set: String,
    pub m: u32,
    pub average: Option<Fraction>,
}

/// `(m, average)` for each card, in the given order.
pub fn score_vs_magnitude(ranked: &[ScoreCard]) -> Vec<MagnitudeScore> {
    ranked
        .iter()
        .map(|c| MagnitudeScore {
            set: c.label(),
            m: c.magnitude,
            average: c
                .average_score()
                .map(|r| Fraction::new(*r.numer() as i64, *r.denom() as i64)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyword_validation() {
        assert!(Keyword::new("L").is_err());
        assert!(Keyword::new("LO VES").is_err());
        assert!(Keyword::new("").is_err());
        assert_eq!(Keyword::new("loves").unwrap(), Keyword::loves());
        assert_eq!(Keyword::new("Seviyor").unwrap().width(), 7);
    }

    #[test]
    fn known_counts() {
        let loves = Keyword::loves();
        assert_eq!(letter_counts("Alice", "Bob", &loves), vec![1, 1, 0, 1, 0]);
        assert_eq!(
            letter_counts("Steve-O", "Esmie", &loves),
            vec![0, 1, 1, 4, 2]
        );
        assert_eq!(
            letter_counts("Reese Witherspoon", "Calvin Harris", &loves),
            vec![1, 2, 1, 4, 3]
        );
        let lores = Keyword::new("LORES").unwrap();
        assert_eq!(
            letter_counts("Connor", "Harrison", &lores),
            vec![0, 3, 3, 0, 1]
        );
    }

    #[test]
    fn repeated_letters_share_counts() {
        let elsker = Keyword::new("ELSKER").unwrap();
        let c = letter_counts("Eleanor", "Kees", &elsker);
        assert_eq!(c[0], c[4]);
        assert_eq!(c, vec![4, 1, 1, 1, 4, 1]);
    }

    #[test]
    fn alice_loves_bob() {
        let o = play_names(
            "Alice",
            "Bob",
            &Keyword::loves(),
            &ClassifyLimits::default(),
        )
        .unwrap();
        assert_eq!(o.result(), Some(54));
    }

    #[test]
    fn two_name_roster() {
        let roster = Roster::from_names(&["Alice", "Bob"], Gender::Girl);
        let report =
            roster_pairings(&roster, &Keyword::loves(), &ClassifyLimits::default()).unwrap();
        assert_eq!(report.total(), 1);
        assert_eq!(report.pairs[0].result, Some(54));
        assert_eq!(report.result_counts[54], 1);
        assert_eq!(
            report.magnitude_histogram,
            vec![HistogramBin { value: 3, count: 1 }]
        );
    }

    #[test]
    fn roster_csv_errors() {
        let bad = "name,gender,rank\n---,boy,1\n";
        assert!(matches!(
            Roster::from_reader(bad.as_bytes()),
            Err(NamesError::InvalidRecord { line: 2, .. })
        ));
        let bad = "name,gender,rank\nAmy,girl,51\n";
        assert!(Roster::from_reader(bad.as_bytes()).is_err());
        let bad = "name,gender,rank\nAmy,other,1\n";
        assert!(matches!(
            Roster::from_reader(bad.as_bytes()),
            Err(NamesError::Csv(_))
        ));
        let empty = "name,gender,rank\n";
        assert!(matches!(
            Roster::from_reader(empty.as_bytes()),
            Err(NamesError::EmptyRoster)
        ));
    }

    #[test]
    fn bundled_roster_shape() {
        let roster = Roster::bundled();
        assert_eq!(roster.len(), 100);
        let boys = roster
            .records()
            .iter()
            .filter(|r| r.gender == Gender::Boy)
            .count();
        assert_eq!(boys, 50);
        assert_eq!(roster.records()[0].name, "Oliver");
    }

    #[test]
    fn set_length_checked() {
        let roster = Roster::from_names(&["Amy"], Gender::Girl);
        assert!(matches!(
            score_individual(
                &[0, 0],
                &roster,
                &Keyword::loves(),
                &ClassifyLimits::default()
            ),
            Err(NamesError::SetLengthMismatch {
                expected: 5,
                got: 2
            })
        ));
    }

    #[test]
    fn cap_one_ranks_single_set() {
        let roster = Roster::from_names(&["Amy", "Alice"], Gender::Girl);
        let ranked = rank_sets(
            1,
            &roster,
            &Keyword::loves(),
            &ClassifyLimits::default(),
            1000,
        )
        .unwrap();
        assert_eq!(ranked.by_average.len(), 1);
        assert_eq!(ranked.by_average[0].label(), "00000");
        let svm = score_vs_magnitude(&ranked.by_average);
        assert_eq!(svm[0].m, 0);
    }

    #[test]
    fn set_labels() {
        assert_eq!(parse_set("02000").unwrap(), vec![0, 2, 0, 0, 0]);
        assert!(parse_set("0a").is_err());
        assert_eq!(format_set(&[1, 12, 0]), "1[12]0");
    }
}
