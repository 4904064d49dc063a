//! Reconstruction of width-5 starting strings that reach a chosen two-digit
//! result through a chain with no length-increasing steps.
//!
//! Running the rule backwards from `{s1, s2}` with `n = 0` at every step
//! introduces one free leading digit per row (`a1`, `a2`, `a3`); each
//! further digit is fixed by the pair sums of the row below. A chain is
//! valid exactly when every reconstructed digit lies in `0..=9`, so the
//! 1000 parameter triples are searched exhaustively.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, DigitString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BacktrackError {
    #[error("target digits must be in 0..=9, got ({0}, {1})")]
    TargetOutOfRange(u8, u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacktrackSolution {
    pub target: (u8, u8),
    pub parameters: (u8, u8, u8),
    /// Rows of widths 2, 3, 4 and 5; the last is the starting string.
    pub chain: [DigitString; 4],
}

impl BacktrackSolution {
    pub fn start(&self) -> &DigitString {
        &self.chain[3]
    }
}

/// All solutions for target `{s1, s2}`, sorted by `(a1, a2, a3)`.
pub fn backtrack(s1: u8, s2: u8) -> Result<Vec<BacktrackSolution>, BacktrackError> {
    if s1 > 9 || s2 > 9 {
        return Err(BacktrackError::TargetOutOfRange(s1, s2));
    }
    let mut out = Vec::new();
    for a1 in 0..=9u8 {
        for a2 in 0..=9u8 {
            for a3 in 0..=9u8 {
                if let Some(chain) = build_chain(s1, s2, a1, a2, a3) {
                    if replays(&chain) {
                        out.push(BacktrackSolution {
                            target: (s1, s2),
                            parameters: (a1, a2, a3),
                            chain,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn build_chain(s1: u8, s2: u8, a1: u8, a2: u8, a3: u8) -> Option<[DigitString; 4]> {
    let (s1, s2, a1, a2, a3) = (s1 as i32, s2 as i32, a1 as i32, a2 as i32, a3 as i32);
    let rows: [Vec<i32>; 4] = [
        vec![s1, s2],
        vec![a1, s1 - a1, s2 - s1 + a1],
        vec![a2, a1 - a2, s1 - 2 * a1 + a2, s2 - 2 * s1 + 3 * a1 - a2],
        vec![
            a3,
            a2 - a3,
            a1 - 2 * a2 + a3,
            s1 - 3 * a1 + 3 * a2 - a3,
            s2 - 3 * s1 + 6 * a1 - 4 * a2 + a3,
        ],
    ];
    if rows.iter().flatten().any(|d| !(0..=9).contains(d)) {
        return None;
    }
    let [r2, r3, r4, r5] = rows
        .map(|row| DigitString::from_digits_unchecked(row.into_iter().map(|d| d as u8).collect()));
    Some([r2, r3, r4, r5])
}

/// Forward check: each row iterates to the one below with no high pairs.
fn replays(chain: &[DigitString; 4]) -> bool {
    chain.windows(2).all(|pair| {
        pair[1].high_pairs() == 0 && engine::iterate(&pair[1]).is_ok_and(|next| next == pair[0])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alice_and_bob_chain() {
        let sols = backtrack(5, 4).unwrap();
        let sol = sols
            .iter()
            .find(|s| s.parameters == (3, 2, 1))
            .expect("(3, 2, 1) is a solution");
        let rows: Vec<String> = sol.chain.iter().map(|r| r.to_string()).collect();
        assert_eq!(rows, vec!["54", "322", "2111", "11010"]);
        assert_eq!(sol.start().to_string(), "11010");
    }

    #[test]
    fn zero_target() {
        let sols = backtrack(0, 0).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].parameters, (0, 0, 0));
        assert!(sols[0].chain.iter().all(|r| r.magnitude() == 0));
    }

    #[test]
    fn sorted_and_parameter_identities() {
        for s1 in 0..=9 {
            for s2 in 0..=9 {
                let sols = backtrack(s1, s2).unwrap();
                assert!(sols.windows(2).all(|w| w[0].parameters < w[1].parameters));
                for s in &sols {
                    let (a1, a2, a3) = s.parameters;
                    assert_eq!(s.chain[1].digits()[0], a1);
                    assert_eq!(s.chain[2].digits()[0], a2);
                    assert_eq!(s.chain[3].digits()[0], a3);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_target() {
        assert_eq!(
            backtrack(10, 0),
            Err(BacktrackError::TargetOutOfRange(10, 0))
        );
    }
}
