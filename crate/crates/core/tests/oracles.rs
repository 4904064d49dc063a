use std::collections::BTreeMap;

use loves::analysis::{
    chain_shape, decay_stats, min_magnitude_for_n, phase_field, sweep, SweepSpec,
};
use loves::backtrack::backtrack;
use loves::{classify, iterate, step_stats, ClassifyLimits, DigitString, Outcome};

fn naive_step(v: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for i in 0..v.len() - 1 {
        let s = v[i] + v[i + 1];
        out.extend(s.to_string().bytes().map(|b| b - b'0'));
    }
    out
}

fn strings(w: usize) -> Vec<Vec<u8>> {
    let mut all = vec![Vec::new()];
    for _ in 0..w {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                (0..10u8).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    all
}

#[derive(Debug, PartialEq)]
enum Fate {
    Terminated { result: u8, d: u32 },
    Looping { preperiod: u32, period: u32 },
    Divergent { at: u32 },
}

fn naive_classify(start: &[u8]) -> Fate {
    let limit = 2 * start.len() + 8;
    let mut history = vec![start.to_vec()];
    loop {
        let next = naive_step(history.last().unwrap());
        let step = history.len() as u32;
        if next.len() < 3 {
            let result = next.iter().fold(0, |acc, &d| 10 * acc + d);
            return Fate::Terminated { result, d: step };
        }
        if next.len() > limit {
            return Fate::Divergent { at: step };
        }
        if let Some(first) = history.iter().position(|h| *h == next) {
            return Fate::Looping {
                preperiod: first as u32,
                period: step - first as u32,
            };
        }
        history.push(next);
    }
}

fn fate(o: &Outcome) -> Fate {
    match o {
        Outcome::Terminated {
            result,
            decay_length,
            ..
        } => Fate::Terminated {
            result: *result,
            d: *decay_length,
        },
        Outcome::Looping {
            preperiod, period, ..
        } => Fate::Looping {
            preperiod: *preperiod,
            period: *period,
        },
        Outcome::Divergent {
            iterations_to_detection,
            ..
        } => Fate::Divergent {
            at: *iterations_to_detection,
        },
    }
}

#[test]
fn iterate_matches_naive_rule() {
    for w in 2..=5 {
        for v in strings(w) {
            let s = DigitString::new(v.clone()).unwrap();
            assert_eq!(iterate(&s).unwrap().digits(), naive_step(&v), "{s}");
        }
    }
}

#[test]
fn step_law_matches_iterate_through_w6() {
    for w in 2..=6 {
        for v in strings(w) {
            let s = DigitString::new(v).unwrap();
            let stats = step_stats(&s).unwrap();
            let next = iterate(&s).unwrap();
            assert_eq!(stats.predicted_w, next.width(), "{s}");
            assert_eq!(stats.predicted_m, next.magnitude(), "{s}");
            assert_eq!(stats.delta_w, next.width() as i64 - s.width() as i64);
            assert_eq!(
                stats.delta_m,
                next.magnitude() as i64 - s.magnitude() as i64
            );
        }
    }
}

#[test]
fn classify_matches_naive_classifier_w4() {
    let limits = ClassifyLimits::default();
    for v in strings(4) {
        let s = DigitString::new(v.clone()).unwrap();
        let (outcome, _) = classify(&s, &limits).unwrap();
        assert_eq!(fate(&outcome), naive_classify(&v), "{s}");
    }
}

#[test]
fn classify_matches_naive_classifier_w5_sample() {
    let limits = ClassifyLimits::default();
    for v in strings(5).into_iter().step_by(37) {
        let s = DigitString::new(v.clone()).unwrap();
        let (outcome, _) = classify(&s, &limits).unwrap();
        assert_eq!(fate(&outcome), naive_classify(&v), "{s}");
    }
}

#[test]
fn sweep_tallies_match_naive_classifier() {
    let report = sweep(&SweepSpec::new(4, 10)).unwrap();
    let mut results = vec![0u64; 100];
    let (mut term, mut looping, mut div) = (0u64, 0u64, 0u64);
    let mut decay: BTreeMap<u32, u64> = BTreeMap::new();
    for v in strings(4) {
        match naive_classify(&v) {
            Fate::Terminated { result, d } => {
                term += 1;
                results[result as usize] += 1;
                *decay.entry(d).or_default() += 1;
            }
            Fate::Looping { .. } => looping += 1,
            Fate::Divergent { .. } => div += 1,
        }
    }
    assert_eq!(report.total, 10_000);
    assert_eq!(
        (report.terminated, report.looping, report.divergent),
        (term, looping, div)
    );
    assert_eq!(report.undetermined, 0);
    assert_eq!(report.result_counts, results);
    let hist: BTreeMap<u32, u64> = report
        .decay_histogram
        .iter()
        .map(|b| (b.d, b.count))
        .collect();
    assert_eq!(hist, decay);

    let stats = decay_stats(&report);
    assert_eq!(stats.terminating, term);
    assert_eq!(stats.min_d, *decay.keys().next().unwrap());
    assert_eq!(stats.max_d, *decay.keys().last().unwrap());
    let total_d: u64 = decay.iter().map(|(d, c)| *d as u64 * c).sum();
    assert_eq!(
        (stats.mean_d.num, stats.mean_d.den),
        reduce(total_d as i64, term as i64)
    );

    let by_m_total: u64 = report.by_magnitude.iter().map(|r| r.total()).sum();
    assert_eq!(by_m_total, 10_000);
}

fn reduce(a: i64, b: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(a, b);
    (a / g, b / g)
}

#[test]
fn chain_shape_records_match_replay() {
    let report = sweep(&SweepSpec::new(4, 10)).unwrap();
    let summary = chain_shape(&report);
    assert_eq!(summary.terminating, report.terminated);
    for rec in &summary.records {
        let mut cur = rec.start.digits().to_vec();
        let (mut d, mut max_w, mut inc) = (0, cur.len(), 0);
        while cur.len() >= 3 {
            let next = naive_step(&cur);
            inc += u32::from(next.len() > cur.len());
            max_w = max_w.max(next.len());
            d += 1;
            cur = next;
        }
        assert_eq!(
            (rec.d, rec.max_width, rec.increasing_steps),
            (d, max_w, inc),
            "{}",
            rec.start
        );
    }
}

#[test]
fn phase_cells_match_brute_force() {
    let cells = phase_field(2..=5, 0..=45, u64::MAX).unwrap();
    let mut expected: BTreeMap<(usize, u32), (u64, i64, i64, u64)> = BTreeMap::new();
    for w in 2..=5 {
        for v in strings(w) {
            let m: u32 = v.iter().map(|&d| d as u32).sum();
            let next = naive_step(&v);
            let m_next: u32 = next.iter().map(|&d| d as u32).sum();
            let n = v.windows(2).filter(|p| p[0] + p[1] >= 10).count() as u64;
            let e = expected.entry((w, m)).or_default();
            e.0 += 1;
            e.1 += next.len() as i64 - w as i64;
            e.2 += m_next as i64 - m as i64;
            e.3 += n;
        }
    }
    let got: BTreeMap<(usize, u32), (u64, i64, i64, u64)> = cells
        .iter()
        .map(|c| {
            (
                (c.w, c.m),
                (c.string_count, c.sum_delta_w, c.sum_delta_m, c.sum_n),
            )
        })
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn min_magnitude_matches_brute_force() {
    let mut minima = BTreeMap::new();
    for w in 2..=6 {
        for v in strings(w) {
            let n = v.windows(2).filter(|p| p[0] + p[1] >= 10).count() as u32;
            let m: u32 = v.iter().map(|&d| d as u32).sum();
            let e = minima.entry(n).or_insert(u32::MAX);
            *e = (*e).min(m);
        }
    }
    for n in 1..=5 {
        assert_eq!(min_magnitude_for_n(n).unwrap(), minima[&n], "n = {n}");
    }
}

#[test]
fn backtrack_matches_forward_oracle_for_every_target() {
    let mut forward: BTreeMap<(u8, u8), Vec<Vec<u8>>> = BTreeMap::new();
    for v in strings(5) {
        let mut cur = v.clone();
        let mut shrinking = true;
        while cur.len() >= 3 && shrinking {
            let next = naive_step(&cur);
            shrinking = next.len() + 1 == cur.len();
            cur = next;
        }
        if shrinking && cur.len() == 2 {
            forward.entry((cur[0], cur[1])).or_default().push(v);
        }
    }
    for s1 in 0..=9u8 {
        for s2 in 0..=9u8 {
            let mut got: Vec<Vec<u8>> = backtrack(s1, s2)
                .unwrap()
                .iter()
                .map(|sol| sol.start().digits().to_vec())
                .collect();
            got.sort();
            let want = forward.remove(&(s1, s2)).unwrap_or_default();
            assert_eq!(got, want, "target {s1}{s2}");
        }
    }
}

#[test]
fn backtrack_parameters_are_leading_digits() {
    for sol in backtrack(5, 4).unwrap() {
        let (a1, a2, a3) = sol.parameters;
        assert_eq!(sol.chain[1].digits()[0], a1);
        assert_eq!(sol.chain[2].digits()[0], a2);
        assert_eq!(sol.chain[3].digits()[0], a3);
    }
}
