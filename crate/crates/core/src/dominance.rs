//! Componentwise dominance between objective vectors, maximization sense.

use crate::error::{Error, Result};

/// A point in objective space. Always finite, always at least two components.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidVector(format!(
                "need at least two components, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidVector(format!("non-finite component {bad}")));
        }
        Ok(ObjectiveVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Outcome of comparing two objective vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceVerdict {
    FirstDominated,
    SecondDominated,
    Incomparable,
    Equal,
}

fn check_pair(u: &[f64], v: &[f64], tau: f64) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "dominance tolerance must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

/// True iff `u` sits weakly below `v`: every component within `tau` of not
/// exceeding `v`, and at least one component below by more than `tau`.
/// With `tau = 0` this is exactly "v dominates u".
pub fn weakly_below(u: &[f64], v: &[f64], tau: f64) -> Result<bool> {
    check_pair(u, v, tau)?;
    Ok(weakly_below_unchecked(u, v, tau))
}

#[inline]
pub(crate) fn weakly_below_unchecked(u: &[f64], v: &[f64], tau: f64) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if *a > *b + tau {
            return false;
        }
        if *a < *b - tau {
            strict = true;
        }
    }
    strict
}

/// Classifies the pair. Vectors equal within `tau` in every component are
/// `Equal`; the tolerance cannot produce mutual domination because a strict
/// gap beyond `tau` in one direction excludes the weak bound in the other.
pub fn compare(u: &[f64], v: &[f64], tau: f64) -> Result<DominanceVerdict> {
    check_pair(u, v, tau)?;
    if u.iter().zip(v).all(|(a, b)| (a - b).abs() <= tau) {
        return Ok(DominanceVerdict::Equal);
    }
    if weakly_below_unchecked(u, v, tau) {
        return Ok(DominanceVerdict::FirstDominated);
    }
    if weakly_below_unchecked(v, u, tau) {
        return Ok(DominanceVerdict::SecondDominated);
    }
    Ok(DominanceVerdict::Incomparable)
}

/// Componentwise minimum over a nonempty collection of objective vectors.
pub fn nadir<'a, I>(points: I) -> Result<ObjectiveVector>
where
    I: IntoIterator<Item = &'a ObjectiveVector>,
{
    let mut iter = points.into_iter();
    let first = iter.next().ok_or(Error::Empty {
        what: "nadir input",
    })?;
    let mut acc = first.as_slice().to_vec();
    for p in iter {
        if p.len() != acc.len() {
            return Err(Error::DimensionMismatch {
                left: acc.len(),
                right: p.len(),
            });
        }
        for (m, v) in acc.iter_mut().zip(p.as_slice()) {
            if *v < *m {
                *m = *v;
            }
        }
    }
    ObjectiveVector::new(acc)
}

/// Componentwise maximum, the counterpart of [`nadir`].
pub fn ideal<'a, I>(points: I) -> Result<ObjectiveVector>
where
    I: IntoIterator<Item = &'a ObjectiveVector>,
{
    let mut iter = points.into_iter();
    let first = iter.next().ok_or(Error::Empty {
        what: "ideal input",
    })?;
    let mut acc = first.as_slice().to_vec();
    for p in iter {
        if p.len() != acc.len() {
            return Err(Error::DimensionMismatch {
                left: acc.len(),
                right: p.len(),
            });
        }
        for (m, v) in acc.iter_mut().zip(p.as_slice()) {
            if *v > *m {
                *m = *v;
            }
        }
    }
    ObjectiveVector::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weakly_below_needs_a_strict_component() {
        assert!(weakly_below(&[0.0, 0.0], &[1.0, 0.0], 0.0).unwrap());
        assert!(!weakly_below(&[0.0, 0.0], &[0.0, 0.0], 0.0).unwrap());
        assert!(!weakly_below(&[0.0, -10.0], &[-10.0, 0.0], 0.0).unwrap());
        assert!(!weakly_below(&[-10.0, 0.0], &[0.0, -10.0], 0.0).unwrap());
    }

    #[test]
    fn tolerance_widens_the_weak_part_and_narrows_the_strict_part() {
        // Within tau everywhere: no strict gap, so not below.
        assert!(!weakly_below(&[0.9, 1.0], &[1.0, 1.0], 0.2).unwrap());
        // One component below by more than tau, the other within tau above.
        assert!(weakly_below(&[1.1, 0.0], &[1.0, 1.0], 0.2).unwrap());
        // A component above by more than tau blocks it.
        assert!(!weakly_below(&[1.3, 0.0], &[1.0, 1.0], 0.2).unwrap());
    }

    #[test]
    fn compare_covers_all_four_verdicts() {
        assert_eq!(
            compare(&[0.0, 0.0], &[1.0, 0.0], 0.0).unwrap(),
            DominanceVerdict::FirstDominated
        );
        assert_eq!(
            compare(&[1.0, 0.0], &[0.0, 0.0], 0.0).unwrap(),
            DominanceVerdict::SecondDominated
        );
        assert_eq!(
            compare(&[0.0, -10.0], &[-10.0, 0.0], 0.0).unwrap(),
            DominanceVerdict::Incomparable
        );
        assert_eq!(
            compare(&[2.0, 2.0], &[2.0, 2.0], 0.0).unwrap(),
            DominanceVerdict::Equal
        );
        assert_eq!(
            compare(&[2.0, 2.05], &[2.0, 2.0], 0.1).unwrap(),
            DominanceVerdict::Equal
        );
    }

    #[test]
    fn dimension_and_tolerance_are_validated() {
        assert!(weakly_below(&[1.0, 2.0], &[1.0], 0.0).is_err());
        assert!(compare(&[1.0, 2.0], &[1.0, 2.0], -0.5).is_err());
        assert!(compare(&[1.0, 2.0], &[1.0, 2.0], f64::NAN).is_err());
    }

    #[test]
    fn vectors_must_be_finite_and_at_least_two_wide() {
        assert!(ObjectiveVector::new(vec![1.0]).is_err());
        assert!(ObjectiveVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(ObjectiveVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(ObjectiveVector::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn nadir_is_the_componentwise_minimum() {
        let pts = vec![
            ObjectiveVector::new(vec![0.0, -10.0]).unwrap(),
            ObjectiveVector::new(vec![-10.0, 0.0]).unwrap(),
            ObjectiveVector::new(vec![-4.0, -4.0]).unwrap(),
        ];
        assert_eq!(nadir(&pts).unwrap().as_slice(), &[-10.0, -10.0]);
        assert_eq!(ideal(&pts).unwrap().as_slice(), &[0.0, 0.0]);
        let empty: Vec<ObjectiveVector> = vec![];
        assert!(nadir(&empty).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn vec2() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-100.0f64..100.0, 2..5)
        }

        proptest! {
            #[test]
            fn antisymmetric_at_zero_tolerance(u in vec2()) {
                let v: Vec<f64> = u.iter().map(|x| x + 1.0).collect();
                prop_assert!(weakly_below(&u, &v, 0.0).unwrap());
                prop_assert!(!weakly_below(&v, &u, 0.0).unwrap());
            }

            #[test]
            fn irreflexive(u in vec2(), tau in 0.0f64..1.0) {
                prop_assert!(!weakly_below(&u, &u, tau).unwrap());
            }

            #[test]
            fn verdicts_swap_under_argument_swap(u in vec2(), tau in 0.0f64..1.0) {
                let w: Vec<f64> = u.iter().enumerate()
                    .map(|(i, x)| if i % 2 == 0 { x + 3.0 } else { x - 3.0 })
                    .collect();
                let ab = compare(&u, &w, tau).unwrap();
                let ba = compare(&w, &u, tau).unwrap();
                let expected = match ab {
                    DominanceVerdict::FirstDominated => DominanceVerdict::SecondDominated,
                    DominanceVerdict::SecondDominated => DominanceVerdict::FirstDominated,
                    other => other,
                };
                prop_assert_eq!(ba, expected);
            }
        }
    }
}
