//! Human-readable renderings of the reports printed to stdout.

use std::fmt::Write;

use isobenefit::report::{BreakpointReport, HuffReport, PggReport, SweepRow, UniformityReport};
use isobenefit::{BreakPoint, UniformityResult};

fn u_line(out: &mut String, name: &str, u: Option<&UniformityResult>) {
    match u {
        Some(u) => writeln!(out, "U({name}) = {} (mean {}, sd {}, m {})", u.u, u.mean, u.stddev, u.m),
        None => writeln!(out, "U({name}) = undefined"),
    }
    .unwrap();
}

pub fn uniformity(r: &UniformityReport) -> String {
    let mut out = String::new();
    u_line(&mut out, "all", Some(&r.all));
    if r.positive.is_some() || r.negative.is_some() || r.notes.iter().any(|n| n.contains("part")) {
        u_line(&mut out, "positive", r.positive.as_ref());
        u_line(&mut out, "negative", r.negative.as_ref());
    }
    let s = &r.summary;
    writeln!(
        out,
        "B total {} mean {} min {} max {} over {} cells",
        s.total, s.mean, s.min, s.max, s.count
    )
    .unwrap();
    for n in &r.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    out
}

fn bp_line(out: &mut String, name: &str, b: Option<&BreakPoint>, note: Option<&String>) {
    match (b, note) {
        (Some(b), _) => {
            write!(
                out,
                "{name:<8} at ({}, {}), {} from 1, {} from 2",
                b.position.0, b.position.1, b.distance_from_1, b.distance_from_2
            )
            .unwrap();
            if let Some(v) = b.benefit_at_point {
                write!(out, ", benefit {v}").unwrap();
            }
            out.push('\n');
        }
        (None, note) => {
            writeln!(out, "{name:<8} not defined: {}", note.map_or("", |s| s.as_str())).unwrap();
        }
    }
}

pub fn breakpoint(r: &BreakpointReport) -> String {
    let mut out = format!(
        "pair 1 = {}, 2 = {}, distance {}\n",
        r.amenity_1, r.amenity_2, r.distance
    );
    bp_line(&mut out, "reilly", r.reilly.as_ref(), r.reilly_note.as_ref());
    bp_line(&mut out, "surface", r.numeric.as_ref(), r.numeric_note.as_ref());
    out
}

pub fn huff(r: &HuffReport) -> String {
    let mut out = String::new();
    for (id, p) in &r.result.probabilities {
        writeln!(out, "{id}\t{p}").unwrap();
    }
    out
}

pub fn pgg(r: &PggReport) -> String {
    let s = &r.summary;
    format!(
        "PGG {} vs {}: gain cells {} (sum {}), loss cells {} (sum {}), neutral {}; mean {} min {} max {}\n",
        r.person,
        r.majority,
        s.gain_cells,
        s.gain_total,
        s.loss_cells,
        s.loss_total,
        s.neutral_cells,
        s.stats.mean,
        s.stats.min,
        s.stats.max
    )
}

pub fn sweep(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
    let mut out = String::from("E\tU_all\tU_pos\tU_neg\ttotal\tmean\tmin\tmax\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            r.efficiency,
            opt(r.u_all),
            opt(r.u_positive),
            opt(r.u_negative),
            r.summary.total,
            r.summary.mean,
            r.summary.min,
            r.summary.max
        )
        .unwrap();
    }
    out
}
