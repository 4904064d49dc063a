//! Enumeration of digit strings: full `c^w` boxes and bounded compositions.

/// Number of strings of `width` digits drawn from `0..cap`, or `None` on overflow.
pub fn box_size(width: usize, cap: u32) -> Option<u64> {
    (cap as u64).checked_pow(u32::try_from(width).ok()?)
}

/// Writes the `index`-th string (lexicographic order) of the `cap^width` box into `out`.
pub fn decode_index(mut index: u64, cap: u32, out: &mut [u8]) {
    let cap = cap as u64;
    for slot in out.iter_mut().rev() {
        *slot = (index % cap) as u8;
        index /= cap;
    }
}

/// Number of ways to write `total` as an ordered sum of `parts` integers in `0..=max_part`.
pub fn count_bounded_compositions(total: u32, parts: usize, max_part: u32) -> u128 {
    let total = total as usize;
    let max_part = max_part as usize;
    // ways[t] = compositions of t into the parts seen so far
    let mut ways = vec![0u128; total + 1];
    ways[0] = 1;
    for _ in 0..parts {
        let mut next = vec![0u128; total + 1];
        for (t, slot) in next.iter_mut().enumerate() {
            let lo = t.saturating_sub(max_part);
            *slot = ways[lo..=t].iter().sum();
        }
        ways = next;
    }
    ways[total]
}

/// Lexicographic iterator over compositions of `total` into `parts` digits,
/// each at most `max_part`.
#[derive(Debug, Clone)]
pub struct BoundedCompositions {
    current: Vec<u8>,
    max_part: u8,
    done: bool,
}

impl BoundedCompositions {
    pub fn new(total: u32, parts: usize, max_part: u8) -> Self {
        let feasible = total <= parts as u32 * max_part as u32;
        let mut current = vec![0u8; parts];
        if feasible {
            fill_from_right(&mut current, total, max_part);
        }
        Self {
            current,
            max_part,
            done: !feasible,
        }
    }
}

/// Places `remaining` into `slots` as far right as possible (the lexicographically smallest fill).
fn fill_from_right(slots: &mut [u8], mut remaining: u32, max_part: u8) {
    for slot in slots.iter_mut().rev() {
        let take = remaining.min(max_part as u32);
        *slot = take as u8;
        remaining -= take;
    }
    debug_assert_eq!(remaining, 0);
}

impl Iterator for BoundedCompositions {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();

        // Successor: bump the rightmost position that can grow while its
        // suffix still has mass to give, then refill the suffix minimally.
        let len = self.current.len();
        let mut suffix_sum: u32 = 0;
        let mut advanced = false;
        for i in (0..len).rev() {
            if i + 1 < len {
                suffix_sum += self.current[i + 1] as u32;
            }
            if self.current[i] < self.max_part && suffix_sum > 0 {
                self.current[i] += 1;
                fill_from_right(&mut self.current[i + 1..], suffix_sum - 1, self.max_part);
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(total: u32, parts: usize, max_part: u8) -> Vec<Vec<u8>> {
        let size = box_size(parts, max_part as u32 + 1).unwrap();
        let mut out = Vec::new();
        let mut buf = vec![0u8; parts];
        for i in 0..size {
            decode_index(i, max_part as u32 + 1, &mut buf);
            if buf.iter().map(|&d| d as u32).sum::<u32>() == total {
                out.push(buf.clone());
            }
        }
        out
    }

    #[test]
    fn matches_filtered_box() {
        for parts in 1..=4 {
            for total in 0..=(parts as u32 * 9 + 1) {
                let got: Vec<_> = BoundedCompositions::new(total, parts, 9).collect();
                assert_eq!(got, brute(total, parts, 9), "total={total} parts={parts}");
                assert_eq!(
                    got.len() as u128,
                    count_bounded_compositions(total, parts, 9)
                );
            }
        }
    }

    #[test]
    fn small_cases() {
        let got: Vec<_> = BoundedCompositions::new(2, 2, 9).collect();
        assert_eq!(got, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(BoundedCompositions::new(0, 3, 9).count(), 1);
        assert_eq!(BoundedCompositions::new(28, 3, 9).count(), 0);
        assert_eq!(count_bounded_compositions(45, 5, 9), 1);
        assert_eq!(BoundedCompositions::new(1, 0, 9).count(), 0);
    }

    #[test]
    fn decode_is_lexicographic() {
        let mut buf = [0u8; 3];
        decode_index(123, 10, &mut buf);
        assert_eq!(buf, [1, 2, 3]);
        decode_index(5, 2, &mut buf);
        assert_eq!(buf, [1, 0, 1]);
        assert_eq!(box_size(5, 10), Some(100_000));
        assert_eq!(box_size(30, 10), None);
    }
}
