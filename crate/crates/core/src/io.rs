//! Candidate-set CSV serialization. One row per point, columns
//! `x1..xn, f1..fk, feasible, violation`. Floats are written with Rust's
//! shortest round-trip formatting, so writing the same set twice yields
//! byte-identical text and parsing recovers the exact values. The parser
//! re-evaluates every row under the given problem and cross-checks the
//! recorded image and feasibility, so a file cannot silently be replayed
//! against the wrong problem.

use crate::error::{Error, Result};
use crate::problem::{CandidateSolution, ProblemSpec};

/// Relative slack when cross-checking parsed against re-evaluated values;
/// generous enough for hand-shortened decimals, far below any real
/// wrong-problem mismatch.
const CROSS_CHECK_TOL: f64 = 1e-9;

pub fn csv_header(p: &ProblemSpec) -> String {
    let mut cols: Vec<String> = (1..=p.n()).map(|i| format!("x{i}")).collect();
    cols.extend((1..=p.k()).map(|l| format!("f{l}")));
    cols.push("feasible".into());
    cols.push("violation".into());
    cols.join(",")
}

/// Shortest round-trip text, with negative zero folded into "0" so the
/// textual form doesn't depend on which arithmetic path produced a zero.
fn fmt(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        v.to_string()
    }
}

/// Renders a candidate set as CSV text (header + one row per point, `\n`
/// separators, trailing newline).
pub fn candidates_to_csv(set: &[CandidateSolution], p: &ProblemSpec) -> String {
    let mut out = csv_header(p);
    out.push('\n');
    for c in set {
        let mut fields: Vec<String> = c.x.iter().copied().map(fmt).collect();
        fields.extend(c.fx.as_slice().iter().copied().map(fmt));
        fields.push(c.is_feasible().to_string());
        fields.push(fmt(c.violation));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CROSS_CHECK_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Parses CSV text produced by [`candidates_to_csv`] (or compatible) back
/// into candidates for `p`. Every row is re-evaluated; the stored image,
/// feasibility flag, and violation must agree with the fresh evaluation.
/// The returned candidates carry the re-evaluated data.
pub fn candidates_from_csv(text: &str, p: &ProblemSpec) -> Result<Vec<CandidateSolution>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        msg: "empty input, expected a header".into(),
    })?;
    let expected = csv_header(p);
    if header.trim() != expected {
        return Err(Error::Csv {
            line: 1,
            msg: format!("header {header:?} does not match expected {expected:?}"),
        });
    }
    let n = p.n();
    let k = p.k();
    let mut set = Vec::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != n + k + 2 {
            return Err(Error::Csv {
                line,
                msg: format!("expected {} fields, found {}", n + k + 2, fields.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Csv {
                line,
                msg: format!("bad {what} value {s:?}: {e}"),
            })
        };
        let x: Vec<f64> = fields[..n]
            .iter()
            .map(|s| parse(s, "coordinate"))
            .collect::<Result<_>>()?;
        let fresh = p.evaluate(&x).map_err(|e| Error::Csv {
            line,
            msg: format!("row does not evaluate under problem {:?}: {e}", p.name()),
        })?;
        for (l, s) in fields[n..n + k].iter().enumerate() {
            let recorded = parse(s, "objective")?;
            let actual = fresh.fx.as_slice()[l];
            if !close(recorded, actual) {
                return Err(Error::Csv {
                    line,
                    msg: format!(
                        "objective f{} is {recorded} in the file but {actual} under problem {:?}",
                        l + 1,
                        p.name()
                    ),
                });
            }
        }
        let feasible = match fields[n + k].trim() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Csv {
                    line,
                    msg: format!("bad feasible flag {other:?}, expected true or false"),
                })
            }
        };
        if feasible != fresh.is_feasible() {
            return Err(Error::Csv {
                line,
                msg: format!(
                    "row is marked feasible={feasible} but evaluates to {} under problem {:?}",
                    fresh.is_feasible(),
                    p.name()
                ),
            });
        }
        let violation = parse(fields[n + k + 1], "violation")?;
        if !close(violation, fresh.violation) {
            return Err(Error::Csv {
                line,
                msg: format!(
                    "violation is {violation} in the file but {} on re-evaluation",
                    fresh.violation
                ),
            });
        }
        set.push(fresh);
    }
    Ok(set)
}
