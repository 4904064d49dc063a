use std::fs::File;
use std::path::Path;

use loves::analysis::{self, SweepSpec};
use loves::backtrack;
use loves::engine::{self, trajectory};
use loves::names::{self, Keyword, Roster, ScoreCard};
use loves::ratio::Fraction;
use loves::{ClassifyLimits, DigitString, Outcome};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{float, CsvTable, Envelope, Rendered, FORMAT_VERSION};
use crate::{Cli, CliError, Command, DecayTable, GameInput, RankBy, SweepTable};

pub fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    let limits = ClassifyLimits::new(cli.max_width, cli.max_iters);
    let limits_json = json!({ "max_width": cli.max_width, "max_iters": cli.max_iters });
    match &cli.command {
        Command::Play(input) => play(input, &limits, limits_json),
        Command::Classify(input) => classify(input, &limits, limits_json),
        Command::Sweep { w, cap, table } => {
            sweep(*w, *cap, *table, &limits, cli.budget, limits_json)
        }
        Command::Phase {
            w_min,
            w_max,
            m_min,
            m_max,
        } => phase(*w_min..=*w_max, *m_min..=*m_max, cli.budget),
        Command::NamesPairings { roster, keyword } => {
            pairings(roster.as_deref(), keyword, &limits, limits_json)
        }
        Command::ScoreSets {
            roster,
            keyword,
            cap,
            sets,
            rank_by,
        } => score_sets(
            roster.as_deref(),
            keyword,
            *cap,
            sets,
            *rank_by,
            &limits,
            cli.budget,
            limits_json,
        ),
        Command::Backtrack { target } => backtrack(target),
        Command::DecayStats { w, cap, table } => {
            decay_stats(*w, *cap, *table, &limits, cli.budget, limits_json)
        }
    }
}

fn envelope(
    command: &'static str,
    parameters: Value,
    data: impl Serialize,
) -> Result<Envelope, CliError> {
    Ok(Envelope {
        command,
        format_version: FORMAT_VERSION,
        parameters,
        data: serde_json::to_value(data)?,
    })
}

fn parse_digits(input: &str) -> Result<DigitString, CliError> {
    input.parse().map_err(|source| CliError::Digits {
        input: input.to_string(),
        source,
    })
}

fn parse_keyword(word: &str) -> Result<Keyword, CliError> {
    Keyword::new(word).map_err(CliError::from)
}

fn load_roster(path: Option<&Path>) -> Result<(Roster, String), CliError> {
    match path {
        None => Ok((Roster::bundled(), "bundled".to_string())),
        Some(p) => {
            let shown = p.display().to_string();
            let file = File::open(p).map_err(|source| CliError::RosterFile {
                path: shown.clone(),
                source,
            })?;
            let roster = Roster::from_reader(file).map_err(|source| CliError::Roster {
                path: shown.clone(),
                source,
            })?;
            Ok((roster, shown))
        }
    }
}

/// Resolves `--string` or `--names` to a starting string plus the echoed inputs.
fn start_string(input: &GameInput) -> Result<(DigitString, Value), CliError> {
    match (&input.string, &input.names) {
        (Some(s), _) => Ok((parse_digits(s)?, json!({ "string": s }))),
        (None, Some(names)) => {
            let keyword = parse_keyword(&input.keyword)?;
            let counts = names::letter_counts(&names[0], &names[1], &keyword);
            let start = engine::play(&counts)?;
            Ok((
                start,
                json!({ "names": names, "keyword": keyword.to_string(), "counts": counts }),
            ))
        }
        (None, None) => Err(CliError::Usage(
            "one of --string or --names is required".into(),
        )),
    }
}

fn fraction_cells(f: &Fraction) -> [String; 3] {
    [f.num.to_string(), f.den.to_string(), float(f.value)]
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct PlayData<'a> {
    start: &'a DigitString,
    #[serde(flatten)]
    outcome: &'a Outcome,
}

fn play(
    input: &GameInput,
    limits: &ClassifyLimits,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let (start, mut parameters) = start_string(input)?;
    parameters["limits"] = limits_json;
    let (outcome, trace) = engine::classify(&start, limits)?;

    let mut table = CsvTable::new(&["start", "kind", "result", "d"]);
    table.push([
        start.to_string(),
        outcome.kind().to_string(),
        opt(outcome.result()),
        opt(trace.decay_length),
    ]);
    Ok(Rendered {
        envelope: envelope(
            "play",
            parameters,
            PlayData {
                start: &start,
                outcome: &outcome,
            },
        )?,
        table,
    })
}

#[derive(Serialize)]
struct ChainStep {
    step: usize,
    string: DigitString,
    w: usize,
    m: u32,
    n: usize,
}

fn classify(
    input: &GameInput,
    limits: &ClassifyLimits,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let (start, mut parameters) = start_string(input)?;
    parameters["limits"] = limits_json;
    let (outcome, trace) = engine::classify(&start, limits)?;
    let steps = match &outcome {
        Outcome::Terminated { decay_length, .. } => *decay_length,
        Outcome::Looping {
            preperiod, period, ..
        } => preperiod + period,
        Outcome::Divergent {
            iterations_to_detection,
            ..
        } => *iterations_to_detection,
    };
    let chain: Vec<ChainStep> = trajectory(&start)
        .take(steps as usize + 1)
        .enumerate()
        .map(|(step, s)| ChainStep {
            step,
            w: s.width(),
            m: s.magnitude(),
            n: s.high_pairs(),
            string: s,
        })
        .collect();

    let mut table = CsvTable::new(&["step", "string", "w", "m", "n"]);
    for c in &chain {
        table.push([
            c.step.to_string(),
            c.string.to_string(),
            c.w.to_string(),
            c.m.to_string(),
            c.n.to_string(),
        ]);
    }
    let data = json!({ "start": start, "outcome": outcome, "trace": trace, "chain": chain });
    Ok(Rendered {
        envelope: envelope("classify", parameters, data)?,
        table,
    })
}

fn sweep(
    w: usize,
    cap: u32,
    which: SweepTable,
    limits: &ClassifyLimits,
    budget: u64,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let spec = SweepSpec::new(w, cap).with_limits(*limits);
    let report = analysis::sweep_with_budget(&spec, budget)?;
    let profile = analysis::divergence_profile(&report);
    let by_result = analysis::result_by_magnitude(&report);

    let table = match which {
        SweepTable::Results => {
            let mut t = CsvTable::new(&["result", "count"]);
            for (result, count) in report.result_counts.iter().enumerate() {
                t.push([result.to_string(), count.to_string()]);
            }
            t
        }
        SweepTable::Magnitude => {
            let mut t = CsvTable::new(&["m", "terminated", "looping", "divergent", "undetermined"]);
            for r in &report.by_magnitude {
                t.push([
                    r.m.to_string(),
                    r.terminated.to_string(),
                    r.looping.to_string(),
                    r.divergent.to_string(),
                    r.undetermined.to_string(),
                ]);
            }
            t
        }
        SweepTable::Profile => {
            let mut t = CsvTable::new(&[
                "m",
                "count",
                "p_terminated_num",
                "p_terminated_den",
                "p_terminated",
                "p_looping_num",
                "p_looping_den",
                "p_looping",
                "p_divergent_num",
                "p_divergent_den",
                "p_divergent",
                "p_undetermined_num",
                "p_undetermined_den",
                "p_undetermined",
            ]);
            for r in &profile {
                let mut row = vec![r.m.to_string(), r.count.to_string()];
                for f in [
                    &r.p_terminated,
                    &r.p_looping,
                    &r.p_divergent,
                    &r.p_undetermined,
                ] {
                    row.extend(fraction_cells(f));
                }
                t.push(row);
            }
            t
        }
        SweepTable::ResultMagnitude => {
            let mut t = CsvTable::new(&[
                "m",
                "result",
                "count",
                "conditional_num",
                "conditional_den",
                "conditional",
                "unconditional_num",
                "unconditional_den",
                "unconditional",
            ]);
            for c in &by_result {
                let mut row = vec![c.m.to_string(), c.result.to_string(), c.count.to_string()];
                row.extend(fraction_cells(&c.conditional));
                row.extend(fraction_cells(&c.unconditional));
                t.push(row);
            }
            t
        }
    };

    let magnitude: Vec<Value> = report
        .by_magnitude
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "terminated": r.terminated,
                "looping": r.looping,
                "divergent": r.divergent,
                "undetermined": r.undetermined,
            })
        })
        .collect();
    let results: Vec<Value> = report
        .result_counts
        .iter()
        .enumerate()
        .map(|(result, count)| json!({ "result": result, "count": count }))
        .collect();
    let data = json!({
        "w": report.w,
        "cap": report.cap,
        "total": report.total,
        "terminated": report.terminated,
        "looping": report.looping,
        "divergent": report.divergent,
        "undetermined": report.undetermined,
        "results": results,
        "magnitude": magnitude,
        "profile": profile,
        "result_by_magnitude": by_result,
    });
    let parameters = json!({ "w": w, "cap": cap, "limits": limits_json, "budget": budget });
    Ok(Rendered {
        envelope: envelope("sweep", parameters, data)?,
        table,
    })
}

fn phase(
    w_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<u32>,
    budget: u64,
) -> Result<Rendered, CliError> {
    let parameters = json!({
        "w_min": w_range.start(), "w_max": w_range.end(),
        "m_min": m_range.start(), "m_max": m_range.end(),
        "budget": budget,
    });
    let cells = analysis::phase_field(w_range.clone(), m_range, budget)?;

    let mut table = CsvTable::new(&["w", "m", "count", "mean_dw", "mean_dm", "mean_n"]);
    let mut rows = Vec::with_capacity(cells.len());
    for c in &cells {
        let (dw, dm, n) = (
            Fraction::from(c.mean_delta_w()),
            Fraction::from(c.mean_delta_m()),
            Fraction::from(c.mean_n()),
        );
        table.push([
            c.w.to_string(),
            c.m.to_string(),
            c.string_count.to_string(),
            float(dw.value),
            float(dm.value),
            float(n.value),
        ]);
        rows.push(json!({
            "w": c.w, "m": c.m, "count": c.string_count,
            "mean_dw": dw, "mean_dm": dm, "mean_n": n,
        }));
    }
    let critical: Vec<Value> = w_range
        .map(|w| {
            let m = analysis::critical_magnitude(w)?;
            Ok(json!({
                "w": w,
                "num": m.numer().to_string(),
                "den": m.denom().to_string(),
                "value": m.to_f64(),
            }))
        })
        .collect::<Result<_, CliError>>()?;
    let data = json!({ "cells": rows, "critical_line": critical });
    Ok(Rendered {
        envelope: envelope("phase", parameters, data)?,
        table,
    })
}

fn pairings(
    roster_path: Option<&Path>,
    keyword: &str,
    limits: &ClassifyLimits,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let keyword = parse_keyword(keyword)?;
    let (roster, shown) = load_roster(roster_path)?;
    let report = names::roster_pairings(&roster, &keyword, limits)?;

    let mut table = CsvTable::new(&["name_a", "name_b", "kind", "result"]);
    for p in &report.pairs {
        table.push([
            p.name_a.clone(),
            p.name_b.clone(),
            p.kind.map_or("undetermined".to_string(), |k| k.to_string()),
            opt(p.result),
        ]);
    }
    let total = report.total().max(1);
    let data = json!({
        "pairs_total": report.total(),
        "terminated": report.terminated,
        "looping": report.looping,
        "divergent": report.divergent,
        "undetermined": report.undetermined,
        "p_divergent": Fraction::of_counts(report.divergent, total),
        "p_looping": Fraction::of_counts(report.looping, total),
        "result_counts": report.result_counts,
        "magnitude_histogram": report.magnitude_histogram,
        "letter_distributions": report.letter_distributions,
        "pairs": report.pairs,
    });
    let parameters =
        json!({ "roster": shown, "keyword": keyword.to_string(), "limits": limits_json });
    Ok(Rendered {
        envelope: envelope("names-pairings", parameters, data)?,
        table,
    })
}

fn card_json(card: &ScoreCard) -> Value {
    let average = card
        .average_score()
        .map(|r| Fraction::new(*r.numer() as i64, *r.denom() as i64));
    json!({
        "set": card.label(),
        "m": card.magnitude,
        "average": average,
        "average_display": average.map(|f| format!("{:.2}", f.value)),
        "high_partners": card.high_partner_count,
        "terminating_partners": card.terminating_partners,
        "nonterminating_partners": card.nonterminating_partner_count,
    })
}

#[allow(clippy::too_many_arguments)]
fn score_sets(
    roster_path: Option<&Path>,
    keyword: &str,
    cap: u32,
    sets: &[String],
    rank_by: RankBy,
    limits: &ClassifyLimits,
    budget: u64,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let keyword = parse_keyword(keyword)?;
    let (roster, shown) = load_roster(roster_path)?;

    let (cards, by_high, parameters) = if sets.is_empty() {
        let ranked = names::rank_sets(cap, &roster, &keyword, limits, budget)?;
        let by_high: Vec<String> = ranked.by_high.iter().map(ScoreCard::label).collect();
        let cards = match rank_by {
            RankBy::Average => ranked.by_average,
            RankBy::High => ranked.by_high,
        };
        let parameters = json!({
            "roster": shown, "keyword": keyword.to_string(), "cap": cap,
            "rank_by": format!("{rank_by:?}").to_lowercase(),
            "limits": limits_json, "budget": budget,
        });
        (cards, Some(by_high), parameters)
    } else {
        let cards = sets
            .iter()
            .map(|label| {
                let set = names::parse_set(label)?;
                names::score_individual(&set, &roster, &keyword, limits)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let parameters = json!({
            "roster": shown, "keyword": keyword.to_string(), "sets": sets, "limits": limits_json,
        });
        (cards, None, parameters)
    };

    let mut table = CsvTable::new(&["set", "m", "avg_num", "avg_den", "avg", "high_partners"]);
    for c in &cards {
        let avg = c.average_score();
        table.push([
            c.label(),
            c.magnitude.to_string(),
            opt(avg.map(|r| *r.numer())),
            opt(avg.map(|r| *r.denom())),
            opt(avg.map(|r| float(*r.numer() as f64 / *r.denom() as f64))),
            c.high_partner_count.to_string(),
        ]);
    }
    let data = json!({
        "roster_size": roster.len(),
        "scores": cards.iter().map(card_json).collect::<Vec<_>>(),
        "ranked_by_high": by_high,
        "score_vs_magnitude": names::score_vs_magnitude(&cards),
    });
    Ok(Rendered {
        envelope: envelope("score-sets", parameters, data)?,
        table,
    })
}

fn parse_target(target: &str) -> Result<(u8, u8), CliError> {
    let digits: Vec<u8> = target
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| c.to_digit(10).map(|d| d as u8))
        .collect::<Option<_>>()
        .filter(|d: &Vec<u8>| d.len() == 2)
        .ok_or_else(|| {
            CliError::Invalid(format!("target {target:?} must be two digits, e.g. 54"))
        })?;
    Ok((digits[0], digits[1]))
}

fn backtrack(target: &str) -> Result<Rendered, CliError> {
    let (s1, s2) = parse_target(target)?;
    let solutions = backtrack::backtrack(s1, s2)?;

    let mut table = CsvTable::new(&["a1", "a2", "a3", "row2", "row3", "row4", "start"]);
    let mut rows = Vec::with_capacity(solutions.len());
    for s in &solutions {
        let (a1, a2, a3) = s.parameters;
        table.push(
            [a1.to_string(), a2.to_string(), a3.to_string()]
                .into_iter()
                .chain(s.chain.iter().map(|r| r.to_string())),
        );
        rows.push(json!({
            "parameters": [a1, a2, a3],
            "chain": s.chain,
            "start": s.start(),
        }));
    }
    let data = json!({ "target": [s1, s2], "count": solutions.len(), "solutions": rows });
    Ok(Rendered {
        envelope: envelope("backtrack", json!({ "target": target }), data)?,
        table,
    })
}

fn decay_stats(
    w: usize,
    cap: u32,
    which: DecayTable,
    limits: &ClassifyLimits,
    budget: u64,
    limits_json: Value,
) -> Result<Rendered, CliError> {
    let spec = SweepSpec::new(w, cap).with_limits(*limits);
    let report = analysis::sweep_with_budget(&spec, budget)?;
    let stats = analysis::decay_stats(&report);
    let shape = analysis::chain_shape(&report);

    let table = match which {
        DecayTable::Histogram => {
            let mut t = CsvTable::new(&["d", "count"]);
            for b in &stats.histogram {
                t.push([b.d.to_string(), b.count.to_string()]);
            }
            t
        }
        DecayTable::Chains => {
            let mut t = CsvTable::new(&["start", "d", "max_width", "increasing_steps"]);
            for c in &shape.records {
                t.push([
                    c.start.to_string(),
                    c.d.to_string(),
                    c.max_width.to_string(),
                    c.increasing_steps.to_string(),
                ]);
            }
            t
        }
    };
    let data = json!({
        "decay": stats,
        "chain_shape": {
            "w": shape.w,
            "terminating": shape.terminating,
            "max_d": shape.max_d,
            "max_width": shape.max_width,
            "max_increasing_steps": shape.max_increasing_steps,
        },
    });
    let parameters = json!({ "w": w, "cap": cap, "limits": limits_json, "budget": budget });
    Ok(Rendered {
        envelope: envelope("decay-stats", parameters, data)?,
        table,
    })
}
