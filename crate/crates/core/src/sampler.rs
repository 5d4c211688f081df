//! Randomized lower-shell producers: a uniform sampler and a small
//! steady-state evolutionary loop, both feeding a dominance archive. These
//! stand in for whatever external search produces candidate solutions — any
//! generator that feeds the archive works the same way.
//!
//! Runs are single-threaded and driven by one seeded stream, so a fixed
//! seed gives bit-identical output on a platform.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archive::ParetoArchive;
use crate::dominance::{compare, DominanceVerdict, ObjectiveVector};
use crate::error::{Error, Result};
use crate::problem::{CandidateSolution, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    PureRandom,
    Evolutionary,
}

fn default_population() -> usize {
    32
}

fn default_mutation_scale() -> f64 {
    0.1
}

fn default_mode() -> SamplerMode {
    SamplerMode::Evolutionary
}

/// Search budget and reproducibility knobs. `budget` counts evaluation
/// attempts (failed evaluations included — they spent the call).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub budget: usize,
    #[serde(default = "default_population")]
    pub population: usize,
    /// Mutation step per dimension as a fraction of box width (and the
    /// per-bit flip probability on binary problems). In (0, 1].
    #[serde(default = "default_mutation_scale")]
    pub mutation_scale: f64,
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: SamplerMode,
}

impl SamplerConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        SamplerConfig {
            budget,
            population: default_population().min(budget.max(1)),
            mutation_scale: default_mutation_scale(),
            seed,
            mode: default_mode(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::InvalidConfig("population must be at least 1".into()));
        }
        if self.budget < self.population {
            return Err(Error::InvalidConfig(format!(
                "budget {} is smaller than the population {}",
                self.budget, self.population
            )));
        }
        if !(self.mutation_scale > 0.0 && self.mutation_scale <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mutation scale must lie in (0, 1], got {}",
                self.mutation_scale
            )));
        }
        Ok(())
    }
}

/// One standard normal via Box-Muller on the config's own stream.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub(crate) fn uniform_point(p: &ProblemSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if p.is_binary() {
        return (0..p.n())
            .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
            .collect();
    }
    p.bounds()
        .iter()
        .map(|iv| {
            let (lo, hi) = iv.effective();
            rng.gen_range(lo..=hi)
        })
        .collect()
}

fn mutate(p: &ProblemSpec, parent: &[f64], scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if p.is_binary() {
        let mut child: Vec<f64> = parent.to_vec();
        let mut flipped = false;
        for b in child.iter_mut() {
            if rng.gen::<f64>() < scale {
                *b = 1.0 - *b;
                flipped = true;
            }
        }
        if !flipped {
            let i = rng.gen_range(0..child.len());
            child[i] = 1.0 - child[i];
        }
        return child;
    }
    parent
        .iter()
        .zip(p.bounds())
        .map(|(x, iv)| {
            let (lo, hi) = iv.effective();
            (x + scale * (hi - lo) * standard_normal(rng)).clamp(lo, hi)
        })
        .collect()
}

/// Tournament order: feasible beats infeasible, then dominance, then lower
/// violation; remaining ties fall to a seeded coin.
fn first_wins(a: &CandidateSolution, b: &CandidateSolution, rng: &mut ChaCha8Rng) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => return true,
        (false, true) => return false,
        (true, true) => {
            match compare(a.fx.as_slice(), b.fx.as_slice(), 0.0)
                .expect("population images share a dimension")
            {
                DominanceVerdict::SecondDominated => return true,
                DominanceVerdict::FirstDominated => return false,
                DominanceVerdict::Incomparable | DominanceVerdict::Equal => {}
            }
        }
        (false, false) => {
            if a.violation != b.violation {
                return a.violation < b.violation;
            }
        }
    }
    rng.gen::<bool>()
}

/// Complete record of one sampler run: the shell, the infeasible side pool
/// (every infeasible evaluation, in order), and the budget accounting.
/// `evaluations` counts attempts, including the `eval_failures` whose
/// objective evaluation errored.
#[derive(Debug, Clone)]
pub struct SampleRun {
    pub shell: Vec<CandidateSolution>,
    pub infeasible_pool: Vec<CandidateSolution>,
    pub evaluations: usize,
    pub eval_failures: usize,
}

/// Runs the sampler and returns the full record; the `sample_lower_shell*`
/// wrappers discard the parts most callers don't need.
pub fn sample_run(p: &ProblemSpec, cfg: &SamplerConfig) -> Result<SampleRun> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut archive = ParetoArchive::new(0.0)?;
    // Exact decision vectors already offered to the archive: a shell is a
    // set, so revisiting the same point (common on binary problems, possible
    // via clamping on continuous ones) must not duplicate a member. Distinct
    // points with equal images still both enter, as the archive allows.
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut pool = Vec::new();
    let mut evaluations = 0usize;
    let mut eval_failures = 0usize;
    let mut population: Vec<Option<CandidateSolution>> = vec![None; cfg.population];

    let spend = |x: &[f64],
                     archive: &mut ParetoArchive,
                     seen: &mut HashSet<Vec<u64>>,
                     pool: &mut Vec<CandidateSolution>,
                     eval_failures: &mut usize|
     -> Result<Option<CandidateSolution>> {
        match p.evaluate(x) {
            Ok(c) => {
                if c.is_feasible() {
                    if seen.insert(x.iter().map(|v| v.to_bits()).collect()) {
                        archive.insert(c.clone())?;
                    }
                } else {
                    pool.push(c.clone());
                }
                Ok(Some(c))
            }
            Err(Error::Eval { .. }) => {
                *eval_failures += 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };

    // Uniform initialization, one budget unit per slot.
    for slot in population.iter_mut() {
        if evaluations == cfg.budget {
            break;
        }
        let x = uniform_point(p, &mut rng);
        evaluations += 1;
        *slot = spend(&x, &mut archive, &mut seen, &mut pool, &mut eval_failures)?;
    }

    while evaluations < cfg.budget {
        let x = match cfg.mode {
            SamplerMode::PureRandom => uniform_point(p, &mut rng),
            SamplerMode::Evolutionary => {
                let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..cfg.population);
                let (i, j) = (pick(&mut rng), pick(&mut rng));
                let parent = match (&population[i], &population[j]) {
                    (Some(a), Some(b)) => {
                        if first_wins(a, b, &mut rng) {
                            population[i].clone()
                        } else {
                            population[j].clone()
                        }
                    }
                    (Some(_), None) => population[i].clone(),
                    (None, Some(_)) => population[j].clone(),
                    (None, None) => None,
                };
                match parent {
                    Some(c) => mutate(p, &c.x, cfg.mutation_scale, &mut rng),
                    // Nothing evaluable yet; keep probing uniformly.
                    None => uniform_point(p, &mut rng),
                }
            }
        };
        evaluations += 1;
        let child = spend(&x, &mut archive, &mut seen, &mut pool, &mut eval_failures)?;
        if let (SamplerMode::Evolutionary, Some(c)) = (cfg.mode, child) {
            // Steady state: the child takes a random slot if it beats the
            // incumbent (or the slot is empty).
            let slot = rng.gen_range(0..cfg.population);
            let replace = match &population[slot] {
                Some(incumbent) => first_wins(&c, incumbent, &mut rng),
                None => true,
            };
            if replace {
                population[slot] = Some(c);
            }
        }
    }

    if archive.is_empty() {
        return Err(Error::NoFeasiblePoints {
            evaluations,
            eval_failures,
        });
    }
    Ok(SampleRun {
        shell: archive.into_members(),
        infeasible_pool: pool,
        evaluations,
        eval_failures,
    })
}

/// Samples a lower shell: a feasible antichain found within the budget.
/// Deterministic for a fixed config. Errors with the evaluation counts if
/// not a single feasible point was found.
pub fn sample_lower_shell(p: &ProblemSpec, cfg: &SamplerConfig) -> Result<Vec<CandidateSolution>> {
    Ok(sample_run(p, cfg)?.shell)
}

/// [`sample_lower_shell`] plus the infeasible side pool, for callers who
/// sample a relaxed problem and want the discarded points too. The pool is
/// every evaluated infeasible point, in evaluation order.
pub fn sample_lower_shell_with_pool(
    p: &ProblemSpec,
    cfg: &SamplerConfig,
) -> Result<(Vec<CandidateSolution>, Vec<CandidateSolution>)> {
    let run = sample_run(p, cfg)?;
    Ok((run.shell, run.infeasible_pool))
}

/// How far the reference front sticks out above a shell's image: the
/// largest over reference points of the distance to the nearest shell
/// image (Euclidean, in objective space). Zero means every reference point
/// is matched exactly.
pub fn front_coverage_gap(
    shell: &[CandidateSolution],
    front: &[ObjectiveVector],
) -> Result<f64> {
    if shell.is_empty() {
        return Err(Error::Empty { what: "shell" });
    }
    if front.is_empty() {
        return Err(Error::Empty { what: "reference front" });
    }
    let mut worst = 0.0f64;
    for q in front {
        let mut best = f64::INFINITY;
        for s in shell {
            if s.fx.len() != q.len() {
                return Err(Error::DimensionMismatch {
                    left: s.fx.len(),
                    right: q.len(),
                });
            }
            let d2: f64 = s
                .fx
                .as_slice()
                .iter()
                .zip(q.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            best = best.min(d2.sqrt());
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::check_lower_shell;
    use crate::expr::Expr;
    use crate::oracle::grid_enumerate;
    use crate::problem::{Constraint, Interval, Sense};

    fn plane_problem() -> ProblemSpec {
        ProblemSpec::new(
            "plane",
            vec![
                (Expr::var(1) + Expr::num(0.1) * Expr::var(2), Sense::Max),
                (Expr::num(0.1) * Expr::var(1) + Expr::var(2), Sense::Max),
            ],
            vec![Constraint::new(Expr::var(1) + Expr::var(2), 10.0).unwrap()],
            vec![
                Interval::closed(0.0, 10.0).unwrap(),
                Interval::closed(0.0, 10.0).unwrap(),
            ],
            vec![true, true],
            vec![true],
            false,
        )
        .unwrap()
    }

    #[test]
    fn config_validation_rejects_bad_knobs() {
        let mut cfg = SamplerConfig::new(100, 1);
        cfg.population = 0;
        assert!(cfg.validate().is_err());
        cfg = SamplerConfig::new(100, 1);
        cfg.population = 101;
        assert!(cfg.validate().is_err());
        cfg = SamplerConfig::new(100, 1);
        cfg.mutation_scale = 0.0;
        assert!(cfg.validate().is_err());
        cfg.mutation_scale = 1.5;
        assert!(cfg.validate().is_err());
        assert!(SamplerConfig::new(100, 1).validate().is_ok());
    }

    #[test]
    fn output_is_a_valid_lower_shell() {
        let p = plane_problem();
        for mode in [SamplerMode::PureRandom, SamplerMode::Evolutionary] {
            let cfg = SamplerConfig {
                mode,
                ..SamplerConfig::new(500, 11)
            };
            let shell = sample_lower_shell(&p, &cfg).unwrap();
            assert!(!shell.is_empty());
            let report = check_lower_shell(&shell, &p, 0.0).unwrap();
            assert!(report.passed(), "{mode:?}: {report:?}");
        }
    }

    #[test]
    fn fixed_seed_reproduces_bitwise() {
        let p = plane_problem();
        let cfg = SamplerConfig::new(400, 99);
        let a = sample_lower_shell(&p, &cfg).unwrap();
        let b = sample_lower_shell(&p, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.x, y.x);
            assert_eq!(x.fx.as_slice(), y.fx.as_slice());
        }
        let other = sample_lower_shell(&p, &SamplerConfig::new(400, 100)).unwrap();
        assert!(a.iter().map(|c| &c.x).ne(other.iter().map(|c| &c.x)));
    }

    #[test]
    fn impossible_constraint_reports_the_evaluation_counts() {
        let p = ProblemSpec::new(
            "impossible",
            vec![(Expr::var(1), Sense::Max), (-Expr::var(1), Sense::Max)],
            vec![Constraint::new(Expr::var(1), -5.0).unwrap()],
            vec![Interval::closed(0.0, 1.0).unwrap()],
            vec![false, false],
            vec![false],
            false,
        )
        .unwrap();
        match sample_lower_shell(&p, &SamplerConfig::new(50, 3)) {
            Err(Error::NoFeasiblePoints {
                evaluations,
                eval_failures,
            }) => {
                assert_eq!(evaluations, 50);
                assert_eq!(eval_failures, 0);
            }
            other => panic!("expected NoFeasiblePoints, got {other:?}"),
        }
    }

    #[test]
    fn binary_sampling_finds_the_full_antichain() {
        let p = ProblemSpec::new(
            "two-items",
            vec![
                (Expr::var(1) + Expr::num(2.0) * Expr::var(2), Sense::Max),
                (Expr::num(2.0) * Expr::var(1) + Expr::var(2), Sense::Max),
            ],
            vec![Constraint::new(Expr::var(1) + Expr::var(2), 1.0).unwrap()],
            vec![
                Interval::closed(0.0, 1.0).unwrap(),
                Interval::closed(0.0, 1.0).unwrap(),
            ],
            vec![true, true],
            vec![true],
            true,
        )
        .unwrap();
        let shell = sample_lower_shell(&p, &SamplerConfig::new(64, 5)).unwrap();
        let mut images: Vec<Vec<f64>> =
            shell.iter().map(|c| c.fx.as_slice().to_vec()).collect();
        images.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(images, vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
    }

    #[test]
    fn side_pool_holds_only_infeasible_points() {
        let p = plane_problem();
        let (shell, pool) =
            sample_lower_shell_with_pool(&p, &SamplerConfig::new(500, 21)).unwrap();
        assert!(!shell.is_empty());
        assert!(!pool.is_empty());
        for c in &pool {
            assert!(!c.is_feasible());
            assert!(c.violation > 0.0);
        }
    }

    #[test]
    fn coverage_gap_shrinks_toward_the_grid_front() {
        let p = plane_problem();
        let front = grid_enumerate(&p, 1.0).unwrap().front;
        let shell = sample_lower_shell(&p, &SamplerConfig::new(4000, 7)).unwrap();
        let gap = front_coverage_gap(&shell, &front).unwrap();
        assert!(gap < 1.0, "gap {gap}");
        // A tiny budget cannot do better than a large one here.
        let rough = sample_lower_shell(&p, &SamplerConfig::new(40, 7)).unwrap();
        let rough_gap = front_coverage_gap(&rough, &front).unwrap();
        assert!(rough_gap >= gap, "rough {rough_gap} vs {gap}");
    }

    #[test]
    fn gap_is_zero_when_the_shell_matches_the_front() {
        let p = plane_problem();
        let oracle = grid_enumerate(&p, 1.0).unwrap();
        let gap = front_coverage_gap(&oracle.efficient_set, &oracle.front).unwrap();
        assert_eq!(gap, 0.0);
    }
}
