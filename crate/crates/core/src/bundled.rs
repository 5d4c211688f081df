//! Builders for the bundled benchmark problems: a pair of shifted concave
//! paraboloids with a known structure, a round hollow beam sizing problem
//! (mass vs tip deflection under a bending-stress limit), and seeded
//! biobjective knapsacks for the binary construction path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{Constraint, Interval, ProblemSpec, Sense};

/// The two-paraboloid problem: maximize `f1 = -(x1-3)^2 - (x2-4)^2` and
/// `f2 = -(x1-4)^2 - (x2-1)^2` over a box. `relaxed` of `None` gives the
/// standard box `[1,5]^2`; `Some((a, b))` builds the widened variant, which
/// must strictly contain it (`a < 1`, `b > 5`).
pub fn paraboloids_problem(relaxed: Option<(f64, f64)>) -> Result<ProblemSpec> {
    let (name, lo, hi) = match relaxed {
        None => ("example1", 1.0, 5.0),
        Some((a, b)) => {
            if !(a < 1.0) || !(b > 5.0) {
                return Err(Error::InvalidProblem(format!(
                    "relaxed box [{a}, {b}] must strictly contain [1, 5]"
                )));
            }
            ("example1_relaxed", a, b)
        }
    };
    let f1 = -((Expr::var(1) - Expr::num(3.0)).pow(2.0))
        - (Expr::var(2) - Expr::num(4.0)).pow(2.0);
    let f2 = -((Expr::var(1) - Expr::num(4.0)).pow(2.0))
        - (Expr::var(2) - Expr::num(1.0)).pow(2.0);
    ProblemSpec::new(
        name,
        vec![(f1, Sense::Max), (f2, Sense::Max)],
        vec![],
        vec![Interval::closed(lo, hi)?, Interval::closed(lo, hi)?],
        vec![false, false],
        vec![],
        false,
    )
}

/// Physical data for the hollow round beam: a cantilever of length
/// `length` loaded by `load` at the tip, cross-section an annulus with
/// inner diameter `x1 = d` and wall thickness `x2 = g`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamParameters {
    /// Tip load in newtons.
    pub load: f64,
    /// Beam length in meters.
    pub length: f64,
    /// Material density in kg/m^3.
    pub density: f64,
    /// Young's modulus in pascals.
    pub elasticity: f64,
    /// Allowed bending stress in pascals.
    pub stress_limit: f64,
    /// Bounds for the inner diameter; the physical model needs `d > 0`.
    pub diameter_bounds: Interval,
    /// Bounds for the wall thickness.
    pub thickness_bounds: Interval,
}

impl Default for BeamParameters {
    fn default() -> Self {
        BeamParameters {
            load: 1.0e4,
            length: 3.0,
            density: 7.86e3,
            elasticity: 2.1e11,
            stress_limit: 150.0e6,
            diameter_bounds: Interval::new(0.0, 0.1, true, false).unwrap(),
            thickness_bounds: Interval::closed(0.001, 0.1).unwrap(),
        }
    }
}

impl BeamParameters {
    fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("load", self.load),
            ("length", self.length),
            ("density", self.density),
            ("elasticity", self.elasticity),
            ("stress limit", self.stress_limit),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidProblem(format!(
                    "beam {label} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `(d+2g)^4 - d^4`, the section term both the deflection and the stress
/// formulas divide by.
fn section_term() -> Expr {
    (Expr::var(1) + Expr::num(2.0) * Expr::var(2)).pow(4.0) - Expr::var(1).pow(4.0)
}

/// The beam problem: maximize negated mass `-pi (d+g) g rho l` and negated
/// tip deflection `-4 F l^3 / (3 E pi ((d+2g)^4 - d^4))`, subject to the
/// bending-stress bound `(8 F l / pi) (d+2g) / ((d+2g)^4 - d^4) <= k`.
///
/// The deflection objective increases in both variables (a thicker section
/// bends less). The mass objective decreases, and the stress constraint is
/// not monotone in `d` uniformly, so both carry `false` monotonicity flags.
pub fn beam_problem(params: &BeamParameters) -> Result<ProblemSpec> {
    params.validate()?;
    let BeamParameters {
        load,
        length,
        density,
        elasticity,
        ..
    } = *params;
    let pi = std::f64::consts::PI;
    let mass = Expr::num(pi * density * length)
        * (Expr::var(1) + Expr::var(2))
        * Expr::var(2);
    let deflection =
        Expr::num(-4.0 * load * length.powi(3) / (3.0 * elasticity * pi)) / section_term();
    let stress =
        Expr::num(8.0 * load * length / pi) * (Expr::var(1) + Expr::num(2.0) * Expr::var(2))
            / section_term();
    ProblemSpec::new(
        "beam",
        vec![(-mass, Sense::Max), (deflection, Sense::Max)],
        vec![Constraint::new(stress, params.stress_limit)?],
        vec![params.diameter_bounds, params.thickness_bounds],
        vec![false, true],
        vec![false],
        false,
    )
}

/// The order-preserving stand-in for the beam's deflection objective: the
/// same expression with `l^3` replaced by `l`, i.e. the original scaled by
/// the positive constant `1/l^2`.
pub fn beam_deflection_replacement(params: &BeamParameters) -> Result<Expr> {
    params.validate()?;
    let pi = std::f64::consts::PI;
    Ok(Expr::num(-4.0 * params.load * params.length / (3.0 * params.elasticity * pi))
        / section_term())
}

/// A binary knapsack with two profit objectives and one capacity row per
/// weight row. Every coefficient must be strictly positive: that is what
/// guarantees any infeasible pack that dominates a feasible one stays
/// strictly outside the feasible set, which the shift construction relies
/// on.
pub fn knapsack_problem(
    weights: &[Vec<f64>],
    profits: (&[f64], &[f64]),
    capacities: &[f64],
) -> Result<ProblemSpec> {
    let n = profits.0.len();
    if n == 0 {
        return Err(Error::Empty { what: "profit row" });
    }
    if profits.1.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: profits.1.len(),
        });
    }
    if weights.is_empty() {
        return Err(Error::Empty {
            what: "weight matrix",
        });
    }
    if weights.len() != capacities.len() {
        return Err(Error::DimensionMismatch {
            left: weights.len(),
            right: capacities.len(),
        });
    }
    let positive = |label: &str, row: &[f64]| -> Result<()> {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: row.len(),
            });
        }
        match row.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            Some(bad) => Err(Error::InvalidProblem(format!(
                "{label} coefficients must be positive and finite, got {bad}"
            ))),
            None => Ok(()),
        }
    };
    positive("profit", profits.0)?;
    positive("profit", profits.1)?;
    for row in weights {
        positive("weight", row)?;
    }
    if let Some(bad) = capacities.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(Error::InvalidProblem(format!(
            "capacities must be positive and finite, got {bad}"
        )));
    }

    let linear = |coeffs: &[f64]| -> Expr {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| Expr::num(*c) * Expr::var(i + 1))
            .reduce(|a, b| a + b)
            .expect("nonempty coefficient row")
    };
    ProblemSpec::new(
        format!("knapsack_n{n}"),
        vec![
            (linear(profits.0), Sense::Max),
            (linear(profits.1), Sense::Max),
        ],
        weights
            .iter()
            .zip(capacities)
            .map(|(row, cap)| Constraint::new(linear(row), *cap))
            .collect::<Result<_>>()?,
        vec![Interval::closed(0.0, 1.0)?; n],
        vec![true, true],
        vec![true; weights.len()],
        true,
    )
}

/// A seeded random knapsack: integer profits and weights drawn uniformly
/// from `[1, 100]`, one capacity row at half the total weight.
pub fn knapsack_instance(n: usize, seed: u64) -> Result<ProblemSpec> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "knapsack instance needs at least one item".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw_row = || -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(1..=100) as f64).collect()
    };
    let p1 = draw_row();
    let p2 = draw_row();
    let w = draw_row();
    let capacity = w.iter().sum::<f64>() / 2.0;
    let p = knapsack_problem(&[w], (&p1, &p2), &[capacity])?;
    p.with_name(format!("knapsack_n{n}_s{seed}"))
}
