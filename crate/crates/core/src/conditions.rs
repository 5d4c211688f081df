//! Verifiable conditions for lower shells, upper shells, and upper
//! approximations, reported with witnesses.
//!
//! Validators never trust cached images: every member is re-evaluated under
//! the problem they are checked against, so a set can be validated under a
//! swapped objective formulation. Reports are total — every condition is
//! evaluated even after another one has failed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::dominance::{weakly_below_unchecked, ObjectiveVector};
use crate::error::{Error, Result};
use crate::problem::{CandidateSolution, ProblemSpec, Region};
use crate::staircase;

/// Condition identifiers used as report keys.
pub mod condition_id {
    /// Lower-shell membership: every element feasible.
    pub const LS_MEMBER: &str = "LS-member";
    /// Lower shell is an antichain.
    pub const LS_2: &str = "LS-2";
    /// Upper-shell membership: every element infeasible.
    pub const US_MEMBER: &str = "US-member";
    /// Upper shell is an antichain.
    pub const US_3: &str = "US-3";
    /// No element dominated by a reference efficient point.
    pub const US_4: &str = "US-4";
    /// Every element strictly above the reference nadir.
    pub const US_5: &str = "US-5";
    /// Upper-approximation membership: every element infeasible.
    pub const UA_MEMBER: &str = "UA-member";
    /// Upper approximation is an antichain.
    pub const UA_6: &str = "UA-6";
    /// No element dominated by a lower-shell point.
    pub const UA_7: &str = "UA-7";
    /// Every element strictly above the lower-shell nadir.
    pub const UA_8: &str = "UA-8";
    /// Image avoids the region weakly below any reference front point.
    pub const L1_REGION: &str = "L1-region";
    /// No feasible sample image sits componentwise at or above the element.
    pub const L2_DISJOINT: &str = "L2-disjoint";
    /// Some reference point lies strictly below in every component.
    pub const L3_STRICT_OUTER: &str = "L3-strict-outer";
    /// Some reference point is weakly below the element.
    pub const C16_STRONG: &str = "C16-strong";
}

/// Cap on stored witnesses per condition; the count field stays exact.
const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellRole {
    LowerShell,
    UpperShell,
    UpperApproximation,
}

impl fmt::Display for ShellRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ShellRole::LowerShell => "lower shell",
            ShellRole::UpperShell => "upper shell",
            ShellRole::UpperApproximation => "upper approximation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPoint {
    /// Index into the checked set, or into the reference set for partners.
    pub index: usize,
    /// Decision coordinates; empty for pure value-space references.
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub element: WitnessPoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<WitnessPoint>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionResult {
    Pass,
    Fail { count: usize, witnesses: Vec<Witness> },
}

impl ConditionResult {
    pub fn is_pass(&self) -> bool {
        matches!(self, ConditionResult::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub role: ShellRole,
    pub tau: f64,
    /// Number of elements re-evaluated.
    pub checked: usize,
    pub conditions: BTreeMap<String, ConditionResult>,
}

impl ValidationReport {
    fn new(role: ShellRole, tau: f64, checked: usize) -> Self {
        ValidationReport {
            role,
            tau,
            checked,
            conditions: BTreeMap::new(),
        }
    }

    fn record(&mut self, id: &str, mut witnesses: Vec<Witness>, count: usize) {
        let result = if count == 0 {
            ConditionResult::Pass
        } else {
            witnesses.truncate(MAX_WITNESSES);
            ConditionResult::Fail { count, witnesses }
        };
        self.conditions.insert(id.to_string(), result);
    }

    pub fn passed(&self) -> bool {
        !self.conditions.is_empty() && self.conditions.values().all(ConditionResult::is_pass)
    }

    /// Same condition set with the same pass/fail status, witnesses ignored.
    pub fn statuses_match(&self, other: &ValidationReport) -> bool {
        self.conditions.len() == other.conditions.len()
            && self
                .conditions
                .iter()
                .zip(&other.conditions)
                .all(|((ka, va), (kb, vb))| ka == kb && va.is_pass() == vb.is_pass())
    }

    pub fn failed_conditions(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|(_, v)| !v.is_pass())
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

struct Member {
    index: usize,
    x: Vec<f64>,
    fx: Vec<f64>,
    region: Region,
    violation: f64,
}

impl Member {
    fn point(&self) -> WitnessPoint {
        WitnessPoint {
            index: self.index,
            x: self.x.clone(),
            fx: self.fx.clone(),
        }
    }
}

fn reevaluate(p: &ProblemSpec, set: &[CandidateSolution]) -> Result<Vec<Member>> {
    set.iter()
        .enumerate()
        .map(|(index, c)| {
            let eval = p.evaluate(&c.x)?;
            let region = p.region(&c.x)?;
            Ok(Member {
                index,
                x: c.x.clone(),
                fx: eval.fx.into_inner(),
                region,
                violation: eval.violation,
            })
        })
        .collect()
}

fn componentwise_min(rows: &[Member]) -> Vec<f64> {
    let mut acc = rows[0].fx.clone();
    for m in &rows[1..] {
        for (a, v) in acc.iter_mut().zip(&m.fx) {
            if *v < *a {
                *a = *v;
            }
        }
    }
    acc
}

fn images_2d(members: &[Member]) -> Vec<[f64; 2]> {
    members.iter().map(|m| [m.fx[0], m.fx[1]]).collect()
}

fn antichain_witnesses(members: &[Member], tau: f64) -> (Vec<Witness>, usize) {
    // Exact biobjective sets get a sorted clean check; the quadratic scan
    // below only runs when witnesses have to be enumerated.
    if tau == 0.0
        && members.first().is_some_and(|m| m.fx.len() == 2)
        && staircase::is_antichain(&images_2d(members))
    {
        return (Vec::new(), 0);
    }
    let mut witnesses = Vec::new();
    let mut count = 0;
    for i in 0..members.len() {
        for j in 0..members.len() {
            if i == j {
                continue;
            }
            if weakly_below_unchecked(&members[i].fx, &members[j].fx, tau) {
                count += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        element: members[i].point(),
                        partner: Some(members[j].point()),
                        detail: format!(
                            "image dominated by member {} of the same set",
                            members[j].index
                        ),
                    });
                }
            }
        }
    }
    (witnesses, count)
}

/// Checks that `set` is a lower shell for `p`: every member feasible
/// (LS-member) and no member's image dominated by another's (LS-2).
pub fn check_lower_shell(
    set: &[CandidateSolution],
    p: &ProblemSpec,
    tau: f64,
) -> Result<ValidationReport> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(Error::Empty { what: "lower shell" });
    }
    let members = reevaluate(p, set)?;
    let mut report = ValidationReport::new(ShellRole::LowerShell, tau, members.len());

    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        if m.region == Region::Outside {
            count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    element: m.point(),
                    partner: None,
                    detail: format!("infeasible with violation {}", m.violation),
                });
            }
        }
    }
    report.record(condition_id::LS_MEMBER, witnesses, count);

    let (witnesses, count) = antichain_witnesses(&members, tau);
    report.record(condition_id::LS_2, witnesses, count);
    Ok(report)
}

fn check_upper_against(
    role: ShellRole,
    ids: [&'static str; 4],
    set: &[CandidateSolution],
    reference: &[CandidateSolution],
    reference_what: &str,
    p: &ProblemSpec,
    tau: f64,
    strict_nadir: bool,
) -> Result<ValidationReport> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(Error::Empty {
            what: "upper candidate set",
        });
    }
    let members = reevaluate(p, set)?;
    let refs = reevaluate(p, reference)?;
    let mut report = ValidationReport::new(role, tau, members.len());
    let [member_id, antichain_id, undominated_id, nadir_id] = ids;

    // Membership: strictly outside the feasible set, boundary band excluded.
    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        if m.region != Region::Outside {
            count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    element: m.point(),
                    partner: None,
                    detail: format!(
                        "{} the feasible set",
                        if m.region == Region::Boundary {
                            "on the boundary band of"
                        } else {
                            "inside"
                        }
                    ),
                });
            }
        }
    }
    report.record(member_id, witnesses, count);

    let (witnesses, count) = antichain_witnesses(&members, tau);
    report.record(antichain_id, witnesses, count);

    // Not dominated by any reference element. An exact biobjective
    // reference that forms an antichain is queried through its staircase;
    // the quadratic scan only runs to enumerate witnesses.
    let mut witnesses = Vec::new();
    let mut count = 0;
    let clean = tau == 0.0
        && p.k() == 2
        && staircase::Staircase::build(&images_2d(&refs)).is_some_and(|stair| {
            members.iter().all(|m| !stair.dominates([m.fx[0], m.fx[1]]))
        });
    if !clean {
        for m in &members {
            for r in &refs {
                if weakly_below_unchecked(&m.fx, &r.fx, tau) {
                    count += 1;
                    if witnesses.len() < MAX_WITNESSES {
                        witnesses.push(Witness {
                            element: m.point(),
                            partner: Some(r.point()),
                            detail: format!("image dominated by {reference_what} {}", r.index),
                        });
                    }
                }
            }
        }
    }
    report.record(undominated_id, witnesses, count);

    // Strictly above the reference nadir.
    let nadir = componentwise_min(&refs);
    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        let ok = if strict_nadir {
            nadir.iter().zip(&m.fx).all(|(lo, v)| lo + tau < *v)
        } else {
            weakly_below_unchecked(&nadir, &m.fx, tau)
        };
        if !ok {
            count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    element: m.point(),
                    partner: None,
                    detail: format!("image does not dominate the {reference_what} nadir {nadir:?}"),
                });
            }
        }
    }
    report.record(nadir_id, witnesses, count);
    Ok(report)
}

/// Checks upper-approximation conditions for `set` against a lower shell.
/// The lower shell must itself pass [`check_lower_shell`] first; otherwise a
/// precondition error carrying its report is returned.
///
/// With `strict_nadir` every component must clear the nadir strictly, instead
/// of the default "dominates the nadir" test.
pub fn check_upper_approximation(
    set: &[CandidateSolution],
    lower: &[CandidateSolution],
    p: &ProblemSpec,
    tau: f64,
    strict_nadir: bool,
) -> Result<ValidationReport> {
    let lower_report = check_lower_shell(lower, p, tau)?;
    if !lower_report.passed() {
        return Err(Error::Precondition {
            what: "the reference set fails the lower-shell conditions".into(),
            report: Some(Box::new(lower_report)),
        });
    }
    check_upper_against(
        ShellRole::UpperApproximation,
        [
            condition_id::UA_MEMBER,
            condition_id::UA_6,
            condition_id::UA_7,
            condition_id::UA_8,
        ],
        set,
        lower,
        "lower-shell element",
        p,
        tau,
        strict_nadir,
    )
}

/// Checks upper-shell conditions for `set` against a reference efficient set
/// (typically produced by exhaustive enumeration).
pub fn check_upper_shell(
    set: &[CandidateSolution],
    efficient: &[CandidateSolution],
    p: &ProblemSpec,
    tau: f64,
    strict_nadir: bool,
) -> Result<ValidationReport> {
    if efficient.is_empty() {
        return Err(Error::Empty {
            what: "efficient reference set",
        });
    }
    check_upper_against(
        ShellRole::UpperShell,
        [
            condition_id::US_MEMBER,
            condition_id::US_3,
            condition_id::US_4,
            condition_id::US_5,
        ],
        set,
        efficient,
        "efficient element",
        p,
        tau,
        strict_nadir,
    )
}

fn front_point(index: usize, q: &ObjectiveVector) -> WitnessPoint {
    WitnessPoint {
        index,
        x: Vec::new(),
        fx: q.as_slice().to_vec(),
    }
}

/// Checks that every element's image escapes the region weakly below the
/// reference front: for each front point some component exceeds it by more
/// than `tau` (L1-region).
pub fn check_outer_region(
    set: &[CandidateSolution],
    front: &[ObjectiveVector],
    p: &ProblemSpec,
    tau: f64,
) -> Result<ValidationReport> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(Error::Empty {
            what: "upper candidate set",
        });
    }
    if front.is_empty() {
        return Err(Error::Empty {
            what: "reference front",
        });
    }
    let members = reevaluate(p, set)?;
    let mut report = ValidationReport::new(ShellRole::UpperShell, tau, members.len());
    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        for (qi, q) in front.iter().enumerate() {
            if q.len() != m.fx.len() {
                return Err(Error::DimensionMismatch {
                    left: m.fx.len(),
                    right: q.len(),
                });
            }
            let escapes = m
                .fx
                .iter()
                .zip(q.as_slice())
                .any(|(v, ql)| *v > *ql + tau);
            if !escapes {
                count += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        element: m.point(),
                        partner: Some(front_point(qi, q)),
                        detail: "image weakly below a reference front point".into(),
                    });
                }
            }
        }
    }
    report.record(condition_id::L1_REGION, witnesses, count);
    Ok(report)
}

/// Checks that no sampled feasible image sits componentwise at or above any
/// element's image (L2-disjoint): the element's upper cone misses the sampled
/// image of the feasible set.
pub fn check_image_disjoint(
    set: &[CandidateSolution],
    feasible_images: &[ObjectiveVector],
    p: &ProblemSpec,
    tau: f64,
) -> Result<ValidationReport> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(Error::Empty {
            what: "upper candidate set",
        });
    }
    let members = reevaluate(p, set)?;
    let mut report = ValidationReport::new(ShellRole::UpperShell, tau, members.len());
    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        for (zi, z) in feasible_images.iter().enumerate() {
            if z.len() != m.fx.len() {
                return Err(Error::DimensionMismatch {
                    left: m.fx.len(),
                    right: z.len(),
                });
            }
            let covers = z
                .as_slice()
                .iter()
                .zip(&m.fx)
                .all(|(zl, v)| *zl >= *v - tau);
            if covers {
                count += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        element: m.point(),
                        partner: Some(front_point(zi, z)),
                        detail: "feasible image componentwise at or above the element".into(),
                    });
                }
            }
        }
    }
    report.record(condition_id::L2_DISJOINT, witnesses, count);
    Ok(report)
}

/// Checks the two strengthened outer conditions against a reference front:
/// L3-strict-outer (some reference point strictly below in every component)
/// and C16-strong (some reference point weakly below).
pub fn check_strict_outer(
    set: &[CandidateSolution],
    front: &[ObjectiveVector],
    p: &ProblemSpec,
    tau: f64,
) -> Result<ValidationReport> {
    check_tau(tau)?;
    if set.is_empty() {
        return Err(Error::Empty {
            what: "upper candidate set",
        });
    }
    if front.is_empty() {
        return Err(Error::Empty {
            what: "reference front",
        });
    }
    let members = reevaluate(p, set)?;
    for q in front {
        if q.len() != p.k() {
            return Err(Error::DimensionMismatch {
                left: p.k(),
                right: q.len(),
            });
        }
    }
    let mut report = ValidationReport::new(ShellRole::UpperShell, tau, members.len());

    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        let ok = front.iter().any(|q| {
            q.as_slice()
                .iter()
                .zip(&m.fx)
                .all(|(ql, v)| *ql + tau < *v)
        });
        if !ok {
            count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    element: m.point(),
                    partner: None,
                    detail: "no reference point strictly below in every component".into(),
                });
            }
        }
    }
    report.record(condition_id::L3_STRICT_OUTER, witnesses, count);

    let mut witnesses = Vec::new();
    let mut count = 0;
    for m in &members {
        let ok = front
            .iter()
            .any(|q| weakly_below_unchecked(q.as_slice(), &m.fx, tau));
        if !ok {
            count += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    element: m.point(),
                    partner: None,
                    detail: "no reference point weakly below the element".into(),
                });
            }
        }
    }
    report.record(condition_id::C16_STRONG, witnesses, count);
    Ok(report)
}
