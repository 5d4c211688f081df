//! Order-invariant objective replacement: checking that swapping an
//! objective formula for one generating the same linear order leaves shell
//! validation verdicts unchanged, with the generalized-uniform-dose pair
//! (power mean vs plain mean) as the worked instance.

use std::collections::BTreeMap;
use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conditions::{
    check_lower_shell, check_upper_approximation, check_upper_shell, ConditionResult, ShellRole,
    ValidationReport, Witness,
};
use crate::dominance::compare;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{CandidateSolution, Interval, ProblemSpec};
use crate::sampler::uniform_point;

/// Relative tolerance below which two transformed values count as tied when
/// comparing orders.
const TIE_TOL: f64 = 1e-12;
/// Cap on stored violation/mismatch records; totals are always exact.
const MAX_RECORDS: usize = 16;

/// A dose distribution with the exponent of the power mean: `v` nonnegative
/// per-voxel doses and `a >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoseVector {
    d: Vec<f64>,
    a: f64,
}

impl DoseVector {
    pub fn new(d: Vec<f64>, a: f64) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Empty {
                what: "dose vector",
            });
        }
        if let Some(bad) = d.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dose components must be finite and nonnegative, got {bad}"
            )));
        }
        if !a.is_finite() || a < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "dose exponent must be finite and >= 1, got {a}"
            )));
        }
        Ok(DoseVector { d, a })
    }

    pub fn doses(&self) -> &[f64] {
        &self.d
    }

    pub fn exponent(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid DoseVector always has at least one component
    }
}

/// Power mean of the doses: `((1/v) * sum d_j^a)^(1/a)`. At `a = 1` this is
/// exactly the plain mean.
pub fn geud_power(dv: &DoseVector) -> f64 {
    let v = dv.d.len() as f64;
    let sum: f64 = dv.d.iter().map(|x| x.powf(dv.a)).sum();
    (sum / v).powf(1.0 / dv.a)
}

/// Plain mean of the doses.
pub fn geud_linear(dv: &DoseVector) -> f64 {
    dv.d.iter().sum::<f64>() / dv.d.len() as f64
}

/// An original/replacement formula pair with the box they are probed over.
#[derive(Debug, Clone)]
pub struct ObjectivePair {
    original: Expr,
    replacement: Expr,
    domain: Vec<Interval>,
}

impl ObjectivePair {
    /// Validates that both formulas reference only variables the box
    /// provides and evaluate at its midpoint.
    pub fn new(original: Expr, replacement: Expr, domain: Vec<Interval>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::Empty {
                what: "sampling domain",
            });
        }
        for expr in [&original, &replacement] {
            if let Some(mv) = expr.max_var() {
                if mv > domain.len() {
                    return Err(Error::UnknownVariable {
                        index: mv - 1,
                        n: domain.len(),
                    });
                }
            }
        }
        let mid: Vec<f64> = domain
            .iter()
            .map(|iv| {
                let (lo, hi) = iv.effective();
                0.5 * (lo + hi)
            })
            .collect();
        original.eval(&mid)?;
        replacement.eval(&mid)?;
        Ok(ObjectivePair {
            original,
            replacement,
            domain,
        })
    }

    pub fn original(&self) -> &Expr {
        &self.original
    }

    pub fn replacement(&self) -> &Expr {
        &self.replacement
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }
}

/// One sampled pair whose original and replacement values are ordered
/// differently.
#[derive(Debug, Clone, Serialize)]
pub struct OrderViolation {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub original: (f64, f64),
    pub replacement: (f64, f64),
}

/// Outcome of an order-agreement probe. `consistent` means no disagreement
/// among the `compared` pairs; draws whose evaluation failed or that
/// collapsed to a single point are `skipped`.
#[derive(Debug, Clone, Serialize)]
pub struct OrderProbe {
    pub consistent: bool,
    pub trials: usize,
    pub compared: usize,
    pub skipped: usize,
    pub disagreements: usize,
    /// At most the first few violations; `disagreements` is the full count.
    pub violations: Vec<OrderViolation>,
}

/// Sign of `x - y` as -1/0/+1, with ties decided by a relative tolerance so
/// that equal-up-to-rounding transformed values don't count as ordered.
fn tri_sign(x: f64, y: f64) -> i8 {
    let scale = x.abs().max(y.abs());
    let diff = x - y;
    if diff.abs() <= TIE_TOL * scale {
        0
    } else if diff > 0.0 {
        1
    } else {
        -1
    }
}

/// Probes whether the pair's formulas generate the same linear order on the
/// values attained over the domain. Each trial draws a comparable pair
/// `u <= w` (componentwise, `w` above `u` within the box) so the verdict
/// reflects order along the domain's natural direction rather than the
/// incomparable bulk of a multidimensional box.
pub fn same_linear_order_probe(
    pair: &ObjectivePair,
    trials: usize,
    seed: u64,
) -> Result<OrderProbe> {
    if trials == 0 {
        return Err(Error::InvalidConfig(
            "order probe needs at least one trial".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = OrderProbe {
        consistent: true,
        trials,
        compared: 0,
        skipped: 0,
        disagreements: 0,
        violations: Vec::new(),
    };
    for _ in 0..trials {
        let u: Vec<f64> = pair
            .domain
            .iter()
            .map(|iv| {
                let (lo, hi) = iv.effective();
                rng.gen_range(lo..=hi)
            })
            .collect();
        let w: Vec<f64> = u
            .iter()
            .zip(&pair.domain)
            .map(|(ui, iv)| rng.gen_range(*ui..=iv.effective().1))
            .collect();
        if u == w {
            probe.skipped += 1;
            continue;
        }
        let values = (
            pair.original.eval(&u),
            pair.original.eval(&w),
            pair.replacement.eval(&u),
            pair.replacement.eval(&w),
        );
        let (ou, ow, ru, rw) = match values {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => (a, b, c, d),
            _ => {
                probe.skipped += 1;
                continue;
            }
        };
        probe.compared += 1;
        if tri_sign(ou, ow) != tri_sign(ru, rw) {
            probe.disagreements += 1;
            if probe.violations.len() < MAX_RECORDS {
                probe.violations.push(OrderViolation {
                    u,
                    w,
                    original: (ou, ow),
                    replacement: (ru, rw),
                });
            }
        }
    }
    probe.consistent = probe.disagreements == 0;
    Ok(probe)
}

/// One sampled pair whose dominance verdicts differ between formulations.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceMismatch {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub original: String,
    pub replacement: String,
}

/// Dominance-verdict agreement between two formulations of the same
/// problem, sampled over independent point pairs from the shared box.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceAgreement {
    pub trials: usize,
    pub compared: usize,
    pub skipped: usize,
    pub agreements: usize,
    pub agreement_fraction: f64,
    /// At most the first few mismatches.
    pub mismatches: Vec<DominanceMismatch>,
}

/// Samples independent point pairs and compares the dominance verdict of
/// their images under both problems. This is the level at which an
/// order-preserving replacement is exactly invariant: verdicts, not values.
pub fn dominance_agreement(
    p: &ProblemSpec,
    p_replaced: &ProblemSpec,
    trials: usize,
    seed: u64,
) -> Result<DominanceAgreement> {
    if trials == 0 {
        return Err(Error::InvalidConfig(
            "dominance agreement needs at least one trial".into(),
        ));
    }
    if !p.same_frame(p_replaced) {
        return Err(Error::Precondition {
            what: "replacement problem must keep the original feasibility frame".into(),
            report: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DominanceAgreement {
        trials,
        compared: 0,
        skipped: 0,
        agreements: 0,
        agreement_fraction: 0.0,
        mismatches: Vec::new(),
    };
    for _ in 0..trials {
        let u = uniform_point(p, &mut rng);
        let w = uniform_point(p, &mut rng);
        let images = (
            p.evaluate_objectives(&u),
            p.evaluate_objectives(&w),
            p_replaced.evaluate_objectives(&u),
            p_replaced.evaluate_objectives(&w),
        );
        let (fu, fw, gu, gw) = match images {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => (a, b, c, d),
            _ => {
                out.skipped += 1;
                continue;
            }
        };
        let va = compare(fu.as_slice(), fw.as_slice(), 0.0)?;
        let vb = compare(gu.as_slice(), gw.as_slice(), 0.0)?;
        out.compared += 1;
        if va == vb {
            out.agreements += 1;
        } else if out.mismatches.len() < MAX_RECORDS {
            out.mismatches.push(DominanceMismatch {
                u,
                w,
                original: format!("{va:?}"),
                replacement: format!("{vb:?}"),
            });
        }
    }
    out.agreement_fraction = if out.compared == 0 {
        0.0
    } else {
        out.agreements as f64 / out.compared as f64
    };
    Ok(out)
}

/// Validates `shell` in the given role under both the original and the
/// replaced problem and merges the two reports: a condition passes only
/// when it passes under both, and failures carry witnesses labeled with the
/// formulation they came from.
///
/// `companion` supplies the reference set the role's validator needs — the
/// efficient reference for an upper shell, the lower shell for an upper
/// approximation; lower shells take none.
pub fn check_invariance(
    shell: &[CandidateSolution],
    role: ShellRole,
    p: &ProblemSpec,
    p_replaced: &ProblemSpec,
    companion: Option<&[CandidateSolution]>,
) -> Result<ValidationReport> {
    if !p.same_frame(p_replaced) {
        return Err(Error::Precondition {
            what: "replacement problem must keep the original feasibility frame".into(),
            report: None,
        });
    }
    let run = |problem: &ProblemSpec| -> Result<ValidationReport> {
        match role {
            ShellRole::LowerShell => check_lower_shell(shell, problem, 0.0),
            ShellRole::UpperShell => {
                let reference = companion.ok_or_else(|| {
                    Error::InvalidConfig(
                        "upper-shell invariance needs the efficient reference set".into(),
                    )
                })?;
                check_upper_shell(shell, reference, problem, 0.0, false)
            }
            ShellRole::UpperApproximation => {
                let lower = companion.ok_or_else(|| {
                    Error::InvalidConfig(
                        "upper-approximation invariance needs the lower shell".into(),
                    )
                })?;
                check_upper_approximation(shell, lower, problem, 0.0, false)
            }
        }
    };
    let original = run(p)?;
    let replaced = run(p_replaced)?;

    let mut conditions = BTreeMap::new();
    for (id, ra) in &original.conditions {
        let rb = replaced.conditions.get(id);
        let sides: [(&str, Option<&ConditionResult>); 2] =
            [("original", Some(ra)), ("replacement", rb)];
        let mut count = 0;
        let mut witnesses: Vec<Witness> = Vec::new();
        for (label, result) in sides {
            match result {
                Some(ConditionResult::Pass) => {}
                Some(ConditionResult::Fail {
                    count: c,
                    witnesses: ws,
                }) => {
                    count += c;
                    for w in ws {
                        if witnesses.len() < MAX_RECORDS {
                            let mut w = w.clone();
                            w.detail = format!("{label} formulation: {}", w.detail);
                            witnesses.push(w);
                        }
                    }
                }
                // A validator always emits the same condition set, so a
                // missing entry is itself a failure worth surfacing.
                None => count += 1,
            }
        }
        let merged = if count == 0 {
            ConditionResult::Pass
        } else {
            ConditionResult::Fail { count, witnesses }
        };
        conditions.insert(id.clone(), merged);
    }
    Ok(ValidationReport {
        role,
        tau: 0.0,
        checked: original.checked + replaced.checked,
        conditions,
    })
}

/// Wall-clock comparison of the power mean against the plain mean, averaged
/// over `calls` evaluations of seeded random dose vectors. Informational
/// only: the ratio is hardware- and length-dependent.
#[derive(Debug, Clone, Serialize)]
pub struct GeudTiming {
    pub calls: usize,
    pub vector_len: usize,
    pub exponent: f64,
    pub power_ns_per_call: f64,
    pub linear_ns_per_call: f64,
    pub speedup: f64,
}

pub fn geud_timing(vector_len: usize, a: f64, calls: usize, seed: u64) -> Result<GeudTiming> {
    if calls == 0 {
        return Err(Error::InvalidConfig(
            "timing needs at least one call".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<DoseVector> = (0..calls.min(256))
        .map(|_| {
            let d = (0..vector_len.max(1))
                .map(|_| rng.gen_range(0.0..=100.0))
                .collect();
            DoseVector::new(d, a)
        })
        .collect::<Result<_>>()?;

    let time = |f: &dyn Fn(&DoseVector) -> f64| -> f64 {
        let start = Instant::now();
        let mut acc = 0.0;
        for i in 0..calls {
            acc += f(black_box(&pool[i % pool.len()]));
        }
        black_box(acc);
        start.elapsed().as_nanos() as f64 / calls as f64
    };
    let power_ns_per_call = time(&geud_power);
    let linear_ns_per_call = time(&geud_linear);
    Ok(GeudTiming {
        calls,
        vector_len: vector_len.max(1),
        exponent: a,
        power_ns_per_call,
        linear_ns_per_call,
        speedup: power_ns_per_call / linear_ns_per_call.max(1e-9),
    })
}
