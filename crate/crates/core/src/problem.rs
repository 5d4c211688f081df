//! Problem model: objectives, inequality constraints, box bounds, relaxation.
//!
//! Objectives are stored in maximization sense; minimization inputs are
//! negated once at construction so every downstream comparison is "larger is
//! better". Constraints are `g_j(x) <= b_j`. The box is a per-variable
//! interval, optionally open at either end; open ends are handled by shifting
//! the working endpoint inward by a fixed relative nudge so that evaluation
//! and sampling never sit exactly on an excluded boundary.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dominance::ObjectiveVector;
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};

/// Relative tolerance scale for feasibility classification.
pub const FEAS_EPS: f64 = 1e-9;

/// Relative inward nudge applied to open interval endpoints.
const OPEN_ENDPOINT_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub lo_open: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub hi_open: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "interval endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if !(lo < hi) {
            return Err(Error::InvalidProblem(format!(
                "interval must have positive width, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi, false, false)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Working endpoints: open ends nudged inward by a relative hair so the
    /// closed working interval is a subset of the declared one.
    pub fn effective(&self) -> (f64, f64) {
        let w = self.width();
        let lo = if self.lo_open {
            self.lo + OPEN_ENDPOINT_NUDGE * w
        } else {
            self.lo
        };
        let hi = if self.hi_open {
            self.hi - OPEN_ENDPOINT_NUDGE * w
        } else {
            self.hi
        };
        (lo, hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.effective();
        x >= lo && x <= hi
    }

    fn is_unit_binary(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0 && !self.lo_open && !self.hi_open
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Max,
    Min,
}

/// Inequality constraint `expr <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: Expr,
    pub bound: f64,
}

impl Constraint {
    pub fn new(expr: Expr, bound: f64) -> Result<Self> {
        if !bound.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "constraint bound must be finite, got {bound}"
            )));
        }
        Ok(Constraint { expr, bound })
    }

    /// Classification tolerance for this constraint, scaled by bound size.
    pub fn tolerance(&self) -> f64 {
        FEAS_EPS * self.bound.abs().max(1.0)
    }
}

/// Where a point sits relative to the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Infeasible,
    Unevaluated,
}

/// A decision point together with its image and feasibility classification.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub x: Vec<f64>,
    pub fx: ObjectiveVector,
    pub feasibility: Feasibility,
    /// Largest positive margin over all constraints and box bounds; zero for
    /// points classified inside or on the boundary.
    pub violation: f64,
}

impl CandidateSolution {
    pub fn is_feasible(&self) -> bool {
        self.feasibility == Feasibility::Feasible
    }
}

/// How to widen a problem's box when building its relaxation.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxRelaxation {
    /// Widen every interval about its midpoint by this factor (>= 1).
    Scale(f64),
    /// Replace the box with explicit intervals, each containing the original.
    Explicit(Vec<Interval>),
}

/// Recipe for deriving an enclosing problem: a widened box, loosened
/// constraint bounds, and optionally dropped constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationDescriptor {
    pub box_relax: BoxRelaxation,
    /// Per-constraint loosening factors rho_j >= 1, applied as
    /// `b' = b + (rho - 1) * |b|`. A single entry broadcasts to all
    /// constraints; empty means all bounds stay put.
    pub constraint_scale: Vec<f64>,
    pub dropped_constraints: BTreeSet<usize>,
}

impl RelaxationDescriptor {
    pub fn box_scale(factor: f64) -> Self {
        RelaxationDescriptor {
            box_relax: BoxRelaxation::Scale(factor),
            constraint_scale: Vec::new(),
            dropped_constraints: BTreeSet::new(),
        }
    }

    pub fn uniform(box_factor: f64, constraint_factor: f64) -> Self {
        RelaxationDescriptor {
            box_relax: BoxRelaxation::Scale(box_factor),
            constraint_scale: vec![constraint_factor],
            dropped_constraints: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    name: String,
    objectives: Vec<Expr>,
    constraints: Vec<Constraint>,
    bounds: Vec<Interval>,
    monotone_objectives: Vec<bool>,
    monotone_constraints: Vec<bool>,
    binary: bool,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        objectives: Vec<(Expr, Sense)>,
        constraints: Vec<Constraint>,
        bounds: Vec<Interval>,
        monotone_objectives: Vec<bool>,
        monotone_constraints: Vec<bool>,
        binary: bool,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidProblem("problem name is empty".into()));
        }
        let n = bounds.len();
        if n == 0 {
            return Err(Error::InvalidProblem("box has no variables".into()));
        }
        if objectives.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least two objectives, got {}",
                objectives.len()
            )));
        }
        if monotone_objectives.len() != objectives.len() {
            return Err(Error::InvalidProblem(format!(
                "monotone flags cover {} objectives but there are {}",
                monotone_objectives.len(),
                objectives.len()
            )));
        }
        if monotone_constraints.len() != constraints.len() {
            return Err(Error::InvalidProblem(format!(
                "monotone flags cover {} constraints but there are {}",
                monotone_constraints.len(),
                constraints.len()
            )));
        }
        let objectives: Vec<Expr> = objectives
            .into_iter()
            .map(|(e, sense)| match sense {
                Sense::Max => e,
                Sense::Min => -e,
            })
            .collect();
        for (what, e) in objectives
            .iter()
            .map(|e| ("objective", e))
            .chain(constraints.iter().map(|c| ("constraint", &c.expr)))
        {
            if let Some(max_var) = e.max_var() {
                if max_var >= n {
                    return Err(Error::InvalidProblem(format!(
                        "{what} uses x{} but the box has {} variables",
                        max_var + 1,
                        n
                    )));
                }
            }
        }
        if binary && !bounds.iter().all(Interval::is_unit_binary) {
            return Err(Error::InvalidProblem(
                "binary problems need every variable bounded by the closed unit interval".into(),
            ));
        }
        Ok(ProblemSpec {
            name,
            objectives,
            constraints,
            bounds,
            monotone_objectives,
            monotone_constraints,
            binary,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Result<ProblemSpec> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidProblem("problem name must not be empty".into()));
        }
        self.name = name;
        Ok(self)
    }

    /// Swaps objective `l` (zero-based, already in maximized form) for a new
    /// formula over the same variables. The declared monotonicity flag is
    /// kept: swapping in anything but an order-preserving replacement is on
    /// the caller.
    pub fn replace_objective(&mut self, l: usize, expr: Expr) -> Result<()> {
        if l >= self.k() {
            return Err(Error::InvalidConfig(format!(
                "objective index {l} out of range for {} objectives",
                self.k()
            )));
        }
        if let Some(mv) = expr.max_var() {
            if mv > self.n() {
                return Err(Error::UnknownVariable {
                    index: mv - 1,
                    n: self.n(),
                });
            }
        }
        self.objectives[l] = expr;
        Ok(())
    }

    /// Number of decision variables.
    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    /// Number of objectives.
    pub fn k(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[Expr] {
        &self.objectives
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn monotone_objectives(&self) -> &[bool] {
        &self.monotone_objectives
    }

    pub fn monotone_constraints(&self) -> &[bool] {
        &self.monotone_constraints
    }

    pub fn is_binary(&self) -> bool {
        self.binary
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.n(),
            });
        }
        Ok(())
    }

    pub fn evaluate_objectives(&self, x: &[f64]) -> Result<ObjectiveVector> {
        self.check_arity(x)?;
        let values = self
            .objectives
            .iter()
            .map(|e| e.eval(x))
            .collect::<Result<Vec<f64>>>()?;
        ObjectiveVector::new(values)
    }

    /// Signed margins: positive means violated. One entry per constraint,
    /// then one per box dimension.
    fn margins(&self, x: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.check_arity(x)?;
        let mut out = Vec::with_capacity(self.constraints.len() + self.n());
        for c in &self.constraints {
            let g = c.expr.eval(x)?;
            out.push((g - c.bound, c.tolerance()));
        }
        for (xi, iv) in x.iter().zip(&self.bounds) {
            let (lo, hi) = iv.effective();
            let margin = (lo - xi).max(xi - hi);
            let tol = FEAS_EPS * lo.abs().max(hi.abs()).max(1.0);
            out.push((margin, tol));
        }
        Ok(out)
    }

    pub fn region(&self, x: &[f64]) -> Result<Region> {
        let margins = self.margins(x)?;
        if margins.iter().any(|(m, tol)| *m > *tol) {
            return Ok(Region::Outside);
        }
        if margins.iter().any(|(m, tol)| m.abs() <= *tol) {
            return Ok(Region::Boundary);
        }
        Ok(Region::Inside)
    }

    pub fn is_outside(&self, x: &[f64]) -> Result<bool> {
        Ok(self.region(x)? == Region::Outside)
    }

    pub fn is_strictly_inside(&self, x: &[f64]) -> Result<bool> {
        Ok(self.region(x)? == Region::Inside)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<CandidateSolution> {
        let fx = self.evaluate_objectives(x)?;
        let margins = self.margins(x)?;
        let outside = margins.iter().any(|(m, tol)| *m > *tol);
        let violation = if outside {
            margins.iter().fold(0.0f64, |acc, (m, _)| acc.max(*m))
        } else {
            0.0
        };
        Ok(CandidateSolution {
            x: x.to_vec(),
            fx,
            feasibility: if outside {
                Feasibility::Infeasible
            } else {
                Feasibility::Feasible
            },
            violation,
        })
    }

    /// Builds the enclosing problem described by `r`. Every feasible point of
    /// `self` stays feasible in the result; anything that would shrink the
    /// feasible set is rejected.
    pub fn relax(&self, r: &RelaxationDescriptor) -> Result<ProblemSpec> {
        let relaxed_bounds: Vec<Interval> = match &r.box_relax {
            BoxRelaxation::Scale(factor) => {
                if !factor.is_finite() || *factor < 1.0 {
                    return Err(Error::InvalidRelaxation(format!(
                        "box scale factor must be >= 1, got {factor}"
                    )));
                }
                if self.binary && *factor != 1.0 {
                    return Err(Error::InvalidRelaxation(
                        "binary box cannot be widened; use scale factor 1".into(),
                    ));
                }
                self.bounds
                    .iter()
                    .map(|iv| {
                        if self.binary {
                            return Ok(*iv);
                        }
                        let mid = 0.5 * (iv.lo + iv.hi);
                        let half = 0.5 * iv.width() * factor;
                        // Widened intervals are closed: the open endpoint was a
                        // modelling artifact of the original domain boundary.
                        Interval::closed(mid - half, mid + half)
                    })
                    .collect::<Result<Vec<Interval>>>()?
            }
            BoxRelaxation::Explicit(intervals) => {
                if intervals.len() != self.n() {
                    return Err(Error::InvalidRelaxation(format!(
                        "explicit box has {} intervals but the problem has {} variables",
                        intervals.len(),
                        self.n()
                    )));
                }
                for (i, (new, old)) in intervals.iter().zip(&self.bounds).enumerate() {
                    if new.lo > old.lo || new.hi < old.hi {
                        return Err(Error::InvalidRelaxation(format!(
                            "explicit interval {} = [{}, {}] does not contain the original [{}, {}]",
                            i + 1,
                            new.lo,
                            new.hi,
                            old.lo,
                            old.hi
                        )));
                    }
                }
                intervals.clone()
            }
        };

        let m = self.constraints.len();
        for &idx in &r.dropped_constraints {
            if idx >= m {
                return Err(Error::InvalidRelaxation(format!(
                    "cannot drop constraint {idx}: problem has {m} constraints"
                )));
            }
        }
        let scales: Vec<f64> = match r.constraint_scale.len() {
            0 => vec![1.0; m],
            1 => vec![r.constraint_scale[0]; m],
            len if len == m => r.constraint_scale.clone(),
            len => {
                return Err(Error::InvalidRelaxation(format!(
                    "constraint scale list has {len} entries for {m} constraints"
                )))
            }
        };
        if let Some(bad) = scales.iter().find(|s| !s.is_finite() || **s < 1.0) {
            return Err(Error::InvalidRelaxation(format!(
                "constraint scale factors must be >= 1, got {bad}"
            )));
        }

        let mut relaxed_constraints = Vec::new();
        let mut relaxed_monotone = Vec::new();
        for (j, (c, rho)) in self.constraints.iter().zip(&scales).enumerate() {
            if r.dropped_constraints.contains(&j) {
                continue;
            }
            let bound = c.bound + (rho - 1.0) * c.bound.abs();
            relaxed_constraints.push(Constraint::new(c.expr.clone(), bound)?);
            relaxed_monotone.push(self.monotone_constraints[j]);
        }

        Ok(ProblemSpec {
            name: format!("{}-relaxed", self.name),
            objectives: self.objectives.clone(),
            constraints: relaxed_constraints,
            bounds: relaxed_bounds,
            monotone_objectives: self.monotone_objectives.clone(),
            monotone_constraints: relaxed_monotone,
            binary: self.binary,
        })
    }

    /// True when both problems pose the same feasibility question and the
    /// same number of objectives, i.e. only objective formulas may differ.
    pub fn same_frame(&self, other: &ProblemSpec) -> bool {
        self.n() == other.n()
            && self.k() == other.k()
            && self.bounds == other.bounds
            && self.binary == other.binary
            && self.constraints == other.constraints
    }
}

// ---------------------------------------------------------------------------
// JSON document form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ObjectiveDoc {
    expr: String,
    sense: Sense,
}

#[derive(Serialize, Deserialize)]
struct ConstraintDoc {
    expr: String,
    bound: f64,
}

#[derive(Serialize, Deserialize)]
struct MonotoneDoc {
    objectives: Vec<bool>,
    constraints: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct ProblemDocument {
    name: String,
    n: usize,
    k: usize,
    objectives: Vec<ObjectiveDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    #[serde(rename = "box")]
    bounds: Vec<Interval>,
    monotone: MonotoneDoc,
    #[serde(default, skip_serializing_if = "is_false")]
    binary: bool,
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let doc: ProblemDocument = serde_json::from_str(text)?;
    if doc.n != doc.bounds.len() {
        return Err(Error::InvalidProblem(format!(
            "declared n = {} but the box lists {} intervals",
            doc.n,
            doc.bounds.len()
        )));
    }
    if doc.k != doc.objectives.len() {
        return Err(Error::InvalidProblem(format!(
            "declared k = {} but there are {} objectives",
            doc.k,
            doc.objectives.len()
        )));
    }
    let objectives = doc
        .objectives
        .into_iter()
        .map(|o| Ok((parse_expr(&o.expr)?, o.sense)))
        .collect::<Result<Vec<(Expr, Sense)>>>()?;
    let constraints = doc
        .constraints
        .into_iter()
        .map(|c| Constraint::new(parse_expr(&c.expr)?, c.bound))
        .collect::<Result<Vec<Constraint>>>()?;
    let bounds = doc
        .bounds
        .into_iter()
        .map(|iv| Interval::new(iv.lo, iv.hi, iv.lo_open, iv.hi_open))
        .collect::<Result<Vec<Interval>>>()?;
    ProblemSpec::new(
        doc.name,
        objectives,
        constraints,
        bounds,
        doc.monotone.objectives,
        doc.monotone.constraints,
        doc.binary,
    )
}

/// Canonical JSON form: everything maximization-sense, pretty-printed, with a
/// trailing newline. Parsing the output reproduces the problem exactly.
pub fn serialize_problem(p: &ProblemSpec) -> String {
    let doc = ProblemDocument {
        name: p.name.clone(),
        n: p.n(),
        k: p.k(),
        objectives: p
            .objectives
            .iter()
            .map(|e| ObjectiveDoc {
                expr: e.to_string(),
                sense: Sense::Max,
            })
            .collect(),
        constraints: p
            .constraints
            .iter()
            .map(|c| ConstraintDoc {
                expr: c.expr.to_string(),
                bound: c.bound,
            })
            .collect(),
        bounds: p.bounds.clone(),
        monotone: MonotoneDoc {
            objectives: p.monotone_objectives.clone(),
            constraints: p.monotone_constraints.clone(),
        },
        binary: p.binary,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("problem document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn two_var_problem() -> ProblemSpec {
        // max x1 + x2, max x1 - x2 subject to x1 + 2 x2 <= 4 on [0, 2] x [0, 2]
        let f1 = Expr::var(1) + Expr::var(2);
        let f2 = Expr::var(1) - Expr::var(2);
        let g = Expr::var(1) + Expr::num(2.0) * Expr::var(2);
        ProblemSpec::new(
            "toy",
            vec![(f1, Sense::Max), (f2, Sense::Max)],
            vec![Constraint::new(g, 4.0).unwrap()],
            vec![
                Interval::closed(0.0, 2.0).unwrap(),
                Interval::closed(0.0, 2.0).unwrap(),
            ],
            vec![true, false],
            vec![true],
            false,
        )
        .unwrap()
    }

    #[test]
    fn minimization_is_negated_at_construction() {
        let p = ProblemSpec::new(
            "flip",
            vec![
                (Expr::var(1), Sense::Min),
                (Expr::var(1) * Expr::num(2.0), Sense::Max),
            ],
            vec![],
            vec![Interval::closed(0.0, 1.0).unwrap()],
            vec![false, false],
            vec![],
            false,
        )
        .unwrap();
        let fx = p.evaluate_objectives(&[0.25]).unwrap();
        assert_eq!(fx.as_slice(), &[-0.25, 0.5]);
    }

    #[test]
    fn region_classification_uses_scaled_tolerances() {
        let p = two_var_problem();
        assert_eq!(p.region(&[1.0, 1.0]).unwrap(), Region::Inside);
        // On the constraint boundary: x1 + 2 x2 = 4.
        assert_eq!(p.region(&[2.0, 1.0]).unwrap(), Region::Boundary);
        assert_eq!(p.region(&[2.0, 1.5]).unwrap(), Region::Outside);
        // Just over the bound but inside the tolerance band.
        assert_eq!(p.region(&[2.0, 1.0 + 1e-12]).unwrap(), Region::Boundary);
        // Box face.
        assert_eq!(p.region(&[0.0, 1.0]).unwrap(), Region::Boundary);
        assert_eq!(p.region(&[-0.1, 1.0]).unwrap(), Region::Outside);
    }

    #[test]
    fn evaluate_reports_violation_magnitude() {
        let p = two_var_problem();
        let inside = p.evaluate(&[1.0, 1.0]).unwrap();
        assert_eq!(inside.feasibility, Feasibility::Feasible);
        assert_eq!(inside.violation, 0.0);
        assert_eq!(inside.fx.as_slice(), &[2.0, 0.0]);

        let outside = p.evaluate(&[2.0, 2.0]).unwrap();
        assert_eq!(outside.feasibility, Feasibility::Infeasible);
        // Constraint margin 2 is the largest violation.
        assert!((outside.violation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn open_endpoints_are_nudged_inward() {
        let iv = Interval::new(0.0, 0.1, true, false).unwrap();
        let (lo, hi) = iv.effective();
        assert!(lo > 0.0 && lo < 1e-9);
        assert_eq!(hi, 0.1);
        assert!(!iv.contains(0.0));
        assert!(iv.contains(0.1));
    }

    #[test]
    fn scale_relaxation_widens_about_the_midpoint() {
        let p = ProblemSpec::new(
            "widen",
            vec![(Expr::var(1), Sense::Max), (-Expr::var(1), Sense::Max)],
            vec![Constraint::new(Expr::var(1), 10.0).unwrap()],
            vec![Interval::closed(1.0, 5.0).unwrap()],
            vec![true, false],
            vec![true],
            false,
        )
        .unwrap();
        let relaxed = p
            .relax(&RelaxationDescriptor::uniform(1.5, 1.2))
            .unwrap();
        let iv = relaxed.bounds()[0];
        assert_eq!((iv.lo, iv.hi), (0.0, 6.0));
        assert_eq!(relaxed.constraints()[0].bound, 12.0);
        assert_eq!(relaxed.name(), "widen-relaxed");
        assert_eq!(relaxed.objectives(), p.objectives());
    }

    #[test]
    fn negative_bounds_loosen_toward_zero_and_beyond() {
        let p = ProblemSpec::new(
            "neg",
            vec![(Expr::var(1), Sense::Max), (-Expr::var(1), Sense::Max)],
            vec![Constraint::new(Expr::var(1), -10.0).unwrap()],
            vec![Interval::closed(-20.0, 0.0).unwrap()],
            vec![true, false],
            vec![true],
            false,
        )
        .unwrap();
        let relaxed = p
            .relax(&RelaxationDescriptor {
                box_relax: BoxRelaxation::Scale(1.0),
                constraint_scale: vec![1.5],
                dropped_constraints: BTreeSet::new(),
            })
            .unwrap();
        // b' = -10 + 0.5 * 10 = -5: the feasible slab x <= -10 grew to x <= -5.
        assert_eq!(relaxed.constraints()[0].bound, -5.0);
    }

    #[test]
    fn shrinking_relaxations_are_rejected() {
        let p = two_var_problem();
        assert!(p.relax(&RelaxationDescriptor::box_scale(0.9)).is_err());
        assert!(p
            .relax(&RelaxationDescriptor::uniform(1.0, 0.5))
            .is_err());
        let too_small = RelaxationDescriptor {
            box_relax: BoxRelaxation::Explicit(vec![
                Interval::closed(0.5, 2.0).unwrap(),
                Interval::closed(0.0, 2.0).unwrap(),
            ]),
            constraint_scale: vec![],
            dropped_constraints: BTreeSet::new(),
        };
        assert!(p.relax(&too_small).is_err());
        let bad_drop = RelaxationDescriptor {
            box_relax: BoxRelaxation::Scale(1.0),
            constraint_scale: vec![],
            dropped_constraints: [7usize].into_iter().collect(),
        };
        assert!(p.relax(&bad_drop).is_err());
    }

    #[test]
    fn dropping_a_constraint_removes_it_and_its_flag() {
        let p = two_var_problem();
        let r = RelaxationDescriptor {
            box_relax: BoxRelaxation::Scale(1.0),
            constraint_scale: vec![],
            dropped_constraints: [0usize].into_iter().collect(),
        };
        let relaxed = p.relax(&r).unwrap();
        assert!(relaxed.constraints().is_empty());
        assert!(relaxed.monotone_constraints().is_empty());
        assert_eq!(relaxed.region(&[2.0, 2.0]).unwrap(), Region::Boundary);
    }

    #[test]
    fn relaxation_keeps_feasible_points_feasible() {
        let p = two_var_problem();
        let relaxed = p.relax(&RelaxationDescriptor::uniform(1.5, 1.2)).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let x = [2.0 * i as f64 / 19.0, 2.0 * j as f64 / 19.0];
                if !p.is_outside(&x).unwrap() {
                    assert!(
                        !relaxed.is_outside(&x).unwrap(),
                        "{x:?} lost feasibility under relaxation"
                    );
                }
            }
        }
    }

    #[test]
    fn binary_problems_demand_unit_boxes() {
        let make = |bounds: Vec<Interval>| {
            ProblemSpec::new(
                "bin",
                vec![(Expr::var(1), Sense::Max), (-Expr::var(1), Sense::Max)],
                vec![],
                bounds,
                vec![true, false],
                vec![],
                true,
            )
        };
        assert!(make(vec![Interval::closed(0.0, 1.0).unwrap()]).is_ok());
        assert!(make(vec![Interval::closed(0.0, 2.0).unwrap()]).is_err());
        let p = make(vec![Interval::closed(0.0, 1.0).unwrap()]).unwrap();
        assert!(p.relax(&RelaxationDescriptor::box_scale(1.5)).is_err());
        assert!(p.relax(&RelaxationDescriptor::box_scale(1.0)).is_ok());
    }

    #[test]
    fn arity_violations_are_construction_errors() {
        let res = ProblemSpec::new(
            "arity",
            vec![(Expr::var(3), Sense::Max), (Expr::var(1), Sense::Max)],
            vec![],
            vec![
                Interval::closed(0.0, 1.0).unwrap(),
                Interval::closed(0.0, 1.0).unwrap(),
            ],
            vec![false, false],
            vec![],
            false,
        );
        assert!(matches!(res, Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn json_round_trip_is_a_fixed_point() {
        let text = r#"{
            "name": "toy",
            "n": 2,
            "k": 2,
            "objectives": [
                {"expr": "x1 + x2", "sense": "max"},
                {"expr": "x1 - x2", "sense": "min"}
            ],
            "constraints": [
                {"expr": "x1 + 2*x2", "bound": 4.0}
            ],
            "box": [
                {"lo": 0.0, "hi": 2.0},
                {"lo": 0.0, "hi": 2.0, "hi_open": true}
            ],
            "monotone": {"objectives": [true, false], "constraints": [true]}
        }"#;
        let p = parse_problem(text).unwrap();
        // The "min" objective got negated.
        assert_eq!(
            p.evaluate_objectives(&[1.0, 0.5]).unwrap().as_slice(),
            &[1.5, -0.5]
        );
        let round1 = serialize_problem(&p);
        let p2 = parse_problem(&round1).unwrap();
        assert_eq!(p, p2);
        assert_eq!(serialize_problem(&p2), round1);
        assert!(round1.ends_with('\n'));
        assert!(round1.contains("\"sense\": \"max\""));
        assert!(!round1.contains("min"));
    }

    #[test]
    fn parse_rejects_inconsistent_headers() {
        let bad_n = r#"{
            "name": "bad", "n": 3, "k": 2,
            "objectives": [
                {"expr": "x1", "sense": "max"},
                {"expr": "x2", "sense": "max"}
            ],
            "box": [{"lo": 0.0, "hi": 1.0}, {"lo": 0.0, "hi": 1.0}],
            "monotone": {"objectives": [false, false], "constraints": []}
        }"#;
        assert!(matches!(
            parse_problem(bad_n),
            Err(Error::InvalidProblem(_))
        ));
        let bad_expr = r#"{
            "name": "bad", "n": 1, "k": 2,
            "objectives": [
                {"expr": "x1 + * 2", "sense": "max"},
                {"expr": "x1", "sense": "max"}
            ],
            "box": [{"lo": 0.0, "hi": 1.0}],
            "monotone": {"objectives": [false, false], "constraints": []}
        }"#;
        assert!(matches!(parse_problem(bad_expr), Err(Error::Syntax { .. })));
        assert!(parse_problem("{ not json").is_err());
    }
}
