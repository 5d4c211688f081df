//! Deriving outer candidate sets from relaxed problems: filter a lower
//! shell of the relaxed problem down to the members that bound the original
//! problem's front from outside, and the end-to-end two-sided run that
//! samples both problems and reports descriptive metrics.

use serde::Serialize;

use crate::conditions::check_lower_shell;
use crate::dominance::{nadir, weakly_below_unchecked};
use crate::error::{Error, Result};
use crate::problem::{CandidateSolution, ProblemSpec, RelaxationDescriptor};
use crate::sampler::{sample_run, SamplerConfig};
use crate::staircase;

fn images_2d(set: &[CandidateSolution]) -> Vec<[f64; 2]> {
    set.iter()
        .map(|c| {
            let fx = c.fx.as_slice();
            [fx[0], fx[1]]
        })
        .collect()
}

/// Derived seed for the relaxed-problem sampler run, so the two runs inside
/// one seeded pipeline draw independent streams.
const RELAXED_RUN_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Outcome of filtering a relaxed-problem shell against the original
/// problem: the surviving outer candidates plus a full accounting of the
/// discards. The four buckets partition the input.
#[derive(Debug, Clone)]
pub struct ThetaResult {
    /// Survivors: strictly infeasible, undominated by the lower shell, and
    /// strictly above its nadir.
    pub theta: Vec<CandidateSolution>,
    /// Members feasible for the original problem (ambiguity band included).
    pub discarded_feasible: usize,
    /// Members whose image some lower-shell image dominates.
    pub discarded_dominated: usize,
    /// Members whose image fails to clear the lower shell's nadir.
    pub discarded_nadir: usize,
    /// Input size, `theta.len()` plus all discards.
    pub source_size: usize,
}

/// Filters a lower shell of a relaxed problem into an upper approximation
/// for the original problem `p`.
///
/// Preconditions: `lower` must pass [`check_lower_shell`] under `p` (its
/// report is propagated on failure), and the images of `relaxed` under `p`
/// must form an antichain — feasibility of `relaxed` for its own (absent
/// here) relaxed problem cannot be checked and is the caller's obligation.
/// All images are re-evaluated under `p`; cached values are never trusted.
///
/// Each member lands in exactly one bucket, tested in order: feasible for
/// `p`, dominated by a lower-shell image, below the lower shell's nadir,
/// otherwise kept.
pub fn extract_theta(
    relaxed: &[CandidateSolution],
    lower: &[CandidateSolution],
    p: &ProblemSpec,
) -> Result<ThetaResult> {
    if relaxed.is_empty() {
        return Err(Error::Empty {
            what: "relaxed shell",
        });
    }
    let report = check_lower_shell(lower, p, 0.0)?;
    if !report.passed() {
        return Err(Error::Precondition {
            what: "lower shell fails its own conditions under the original problem".into(),
            report: Some(Box::new(report)),
        });
    }
    let lower_fresh: Vec<CandidateSolution> = lower
        .iter()
        .map(|c| p.evaluate(&c.x))
        .collect::<Result<_>>()?;
    let members: Vec<CandidateSolution> = relaxed
        .iter()
        .map(|c| p.evaluate(&c.x))
        .collect::<Result<_>>()?;
    // Sorted clean check for the exact biobjective case; the quadratic scan
    // only runs to name an ordered pair.
    let clean = p.k() == 2 && staircase::is_antichain(&images_2d(&members));
    if !clean {
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate().skip(i + 1) {
                if weakly_below_unchecked(a.fx.as_slice(), b.fx.as_slice(), 0.0)
                    || weakly_below_unchecked(b.fx.as_slice(), a.fx.as_slice(), 0.0)
                {
                    return Err(Error::Precondition {
                        what: format!(
                            "relaxed shell is not an antichain: members {i} and {j} are ordered"
                        ),
                        report: None,
                    });
                }
            }
        }
    }

    let reference_nadir = nadir(lower_fresh.iter().map(|c| &c.fx))?;
    // The lower shell just passed its antichain condition, so biobjective
    // problems get staircase domination queries.
    let lower_stair = if p.k() == 2 {
        staircase::Staircase::build(&images_2d(&lower_fresh))
    } else {
        None
    };
    let mut result = ThetaResult {
        theta: Vec::new(),
        discarded_feasible: 0,
        discarded_dominated: 0,
        discarded_nadir: 0,
        source_size: members.len(),
    };
    for m in members {
        let dominated = |m: &CandidateSolution| match &lower_stair {
            Some(stair) => {
                let fx = m.fx.as_slice();
                stair.dominates([fx[0], fx[1]])
            }
            None => lower_fresh
                .iter()
                .any(|s| weakly_below_unchecked(m.fx.as_slice(), s.fx.as_slice(), 0.0)),
        };
        if m.is_feasible() {
            result.discarded_feasible += 1;
        } else if dominated(&m) {
            result.discarded_dominated += 1;
        } else if !weakly_below_unchecked(
            reference_nadir.as_slice(),
            m.fx.as_slice(),
            0.0,
        ) {
            result.discarded_nadir += 1;
        } else {
            result.theta.push(m);
        }
    }
    Ok(result)
}

/// Per-objective summary of a two-sided run: the lower shell's worst image
/// value and the outer set's best one. Descriptive only — these are sample
/// extremes, not certified bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveBound {
    pub lower_min: f64,
    pub theta_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoSidedMetrics {
    /// One entry per objective; see [`ObjectiveBound`].
    pub bounding: Vec<ObjectiveBound>,
    /// Largest distance from an outer-candidate image to its nearest
    /// lower-shell image; `None` when no candidate survived.
    pub image_gap: Option<f64>,
    pub lower_size: usize,
    pub relaxed_size: usize,
    pub theta_size: usize,
    pub lower_evaluations: usize,
    pub lower_eval_failures: usize,
    pub relaxed_evaluations: usize,
    pub relaxed_eval_failures: usize,
    pub note: &'static str,
}

/// Everything a two-sided derivation produces.
#[derive(Debug, Clone)]
pub struct TwoSidedOutcome {
    pub lower_shell: Vec<CandidateSolution>,
    pub theta: ThetaResult,
    pub metrics: TwoSidedMetrics,
}

/// Samples the problem and its relaxation (full budget each, derived seed
/// for the second run), then extracts the outer candidates. Errors if a
/// budget is unusable or either sampler finds no feasible point.
pub fn run_two_sided(
    p: &ProblemSpec,
    r: &RelaxationDescriptor,
    budget: usize,
    seed: u64,
) -> Result<TwoSidedOutcome> {
    if budget == 0 {
        return Err(Error::InvalidConfig(
            "a two-sided run needs a positive evaluation budget".into(),
        ));
    }
    let relaxed_problem = p.relax(r)?;
    let lower_run = sample_run(p, &SamplerConfig::new(budget, seed))?;
    let relaxed_run = sample_run(
        &relaxed_problem,
        &SamplerConfig::new(budget, seed ^ RELAXED_RUN_SALT),
    )?;
    let lower = lower_run.shell;
    let theta = extract_theta(&relaxed_run.shell, &lower, p)?;

    let bounding = (0..p.k())
        .map(|l| ObjectiveBound {
            lower_min: lower
                .iter()
                .map(|c| c.fx.as_slice()[l])
                .fold(f64::INFINITY, f64::min),
            theta_max: theta
                .theta
                .iter()
                .map(|c| c.fx.as_slice()[l])
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.max(v)))
                }),
        })
        .collect();
    let image_gap = if theta.theta.is_empty() {
        None
    } else if p.k() == 2 {
        let mut pts = images_2d(&lower);
        pts.sort_by(|u, v| u[0].total_cmp(&v[0]));
        let mut worst = 0.0f64;
        for t in &theta.theta {
            let fx = t.fx.as_slice();
            worst = worst.max(staircase::nearest_distance_sq(&pts, [fx[0], fx[1]]).sqrt());
        }
        Some(worst)
    } else {
        let mut worst = 0.0f64;
        for t in &theta.theta {
            let mut best = f64::INFINITY;
            for s in &lower {
                let d2: f64 = t
                    .fx
                    .as_slice()
                    .iter()
                    .zip(s.fx.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.min(d2.sqrt());
            }
            worst = worst.max(best);
        }
        Some(worst)
    };
    let metrics = TwoSidedMetrics {
        bounding,
        image_gap,
        lower_size: lower.len(),
        relaxed_size: theta.source_size,
        theta_size: theta.theta.len(),
        lower_evaluations: lower_run.evaluations,
        lower_eval_failures: lower_run.eval_failures,
        relaxed_evaluations: relaxed_run.evaluations,
        relaxed_eval_failures: relaxed_run.eval_failures,
        note: "bounding intervals and gap are descriptive sample extremes, not certified bounds",
    };
    Ok(TwoSidedOutcome {
        lower_shell: lower,
        theta,
        metrics,
    })
}
